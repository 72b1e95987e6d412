//! Small dense complex matrices and the singular-value kernel.
//!
//! Singular values come from one-sided (Hestenes) Jacobi: columns are
//! rotated pairwise until mutually orthogonal, which is cyclic Jacobi on
//! `M*M` without ever forming it. Forming `M*M` squares the condition
//! number and loses the small singular values we care most about.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// `σ_min ≤ SINGULAR_RTOL · max(1, σ_max)` counts as singular.
pub const SINGULAR_RTOL: f64 = 1e-10;

/// Pairwise orthogonality target for a Jacobi rotation.
pub const JACOBI_TOL: f64 = 1e-14;

pub const MAX_SWEEPS: usize = 60;

/// Default cap on the number of entries of a Kronecker product.
pub const DEFAULT_KRON_CAP: usize = 1 << 24;

/// Row-major dense complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    /// Builds from a closure; the closure must return finite values.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Self::from_fn(r, c, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        assert!(v.re.is_finite() && v.im.is_finite(), "non-finite entry");
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i)).expect("finite")
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj()).expect("finite")
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Shape("subtraction of differently shaped matrices".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(ComplexMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, s: f64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest singular value (works for any shape).
    pub fn operator_norm(&self) -> Result<f64> {
        Ok(column_singular_values(self)?.last().copied().unwrap_or(0.0))
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// `P M Q` for row permutation `rows` and column permutation `cols`.
    pub fn permuted(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(rows[i], cols[j])).expect("finite")
    }

    /// `diag(left) · M · diag(right)`.
    pub fn diag_scaled(&self, left: &[Complex64], right: &[Complex64]) -> Result<Self> {
        if left.len() != self.rows || right.len() != self.cols {
            return Err(Error::Shape("diagonal length mismatch".into()));
        }
        Self::from_fn(self.rows, self.cols, |i, j| left[i] * self.get(i, j) * right[j])
    }
}

/// Singular values sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SingularSpectrum {
    values: Vec<f64>,
}

impl SingularSpectrum {
    pub fn from_values(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        SingularSpectrum { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }

    pub fn product(&self) -> f64 {
        self.values.iter().product()
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.values.iter().map(|s| s * s).sum()
    }

    pub fn is_singular(&self) -> bool {
        self.min() <= SINGULAR_RTOL * self.max().max(1.0)
    }
}

/// Singular values of a square matrix.
pub fn singular_values(m: &ComplexMatrix) -> Result<SingularSpectrum> {
    if !m.is_square() || m.rows() == 0 {
        return Err(Error::Shape(format!("expected non-empty square matrix, got {}x{}", m.rows(), m.cols())));
    }
    Ok(SingularSpectrum::from_values(column_singular_values(m)?))
}

/// One-sided Jacobi. Returns `min(rows, cols)`-many values only when
/// `rows >= cols`; otherwise works on the transpose.
fn column_singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if m.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    if m.rows < m.cols {
        return column_singular_values(&m.conj_transpose());
    }
    let n = m.cols;
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| m.column(j)).collect();
    let mut norms: Vec<f64> = cols.iter().map(|c| norm_sqr(c)).collect();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma: Complex64 = cols[p].iter().zip(&cols[q]).map(|(a, b)| a.conj() * b).sum();
                let g = gamma.norm();
                if g <= JACOBI_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Rephase column q so the inner product is real and positive.
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let sign = if zeta < 0.0 { -1.0 } else { 1.0 };
                let t = sign / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                let (cp, cq) = (&mut left[p], &mut right[0]);
                for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                    let a = *x;
                    let b = *y * phase;
                    *x = a * c - b * s;
                    *y = a * s + b * c;
                }
                norms[p] = norm_sqr(&cols[p]);
                norms[q] = norm_sqr(&cols[q]);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut values: Vec<f64> = norms.iter().map(|v| v.sqrt()).collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// `|det M|` by Gaussian elimination with partial pivoting.
pub fn abs_determinant(m: &ComplexMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::Shape(format!("determinant of a {}x{} matrix", m.rows(), m.cols())));
    }
    if m.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = m.rows();
    let mut a = m.data.clone();
    let mut det = 1.0;
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| a[i * n + k].norm().total_cmp(&a[j * n + k].norm()))
            .expect("non-empty range");
        let p = a[pivot * n + k];
        if p.norm() == 0.0 {
            return Ok(0.0);
        }
        if pivot != k {
            for j in 0..n {
                a.swap(k * n + j, pivot * n + j);
            }
        }
        det *= p.norm();
        for i in k + 1..n {
            let f = a[i * n + k] / p;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in k..n {
                let v = a[k * n + j];
                a[i * n + j] -= f * v;
            }
        }
    }
    Ok(det)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    kron_with_cap(a, b, DEFAULT_KRON_CAP)
}

/// Kronecker product; errors when the result would exceed `cap` entries.
pub fn kron_with_cap(a: &ComplexMatrix, b: &ComplexMatrix, cap: usize) -> Result<ComplexMatrix> {
    let rows = a.rows.checked_mul(b.rows);
    let cols = a.cols.checked_mul(b.cols);
    let entries = rows.zip(cols).and_then(|(r, c)| r.checked_mul(c));
    match entries {
        Some(e) if e <= cap => {}
        _ => {
            return Err(Error::CapExceeded {
                what: "Kronecker product entries",
                size: (a.rows * a.cols) as u128 * (b.rows * b.cols) as u128,
                cap: cap as u128,
            })
        }
    }
    let (rows, cols) = (a.rows * b.rows, a.cols * b.cols);
    ComplexMatrix::from_fn(rows, cols, |i, j| {
        a.get(i / b.rows, j / b.cols) * b.get(i % b.rows, j % b.cols)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn omega3() -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).unwrap()
    }

    /// Independent oracle: eigenvalues of the 2x2 Hermitian `M*M` in closed form.
    fn sigma_2x2(m: &ComplexMatrix) -> (f64, f64) {
        let g = m.conj_transpose().matmul(m).unwrap();
        let (a, d, b) = (g.get(0, 0).re, g.get(1, 1).re, g.get(0, 1).norm());
        let mid = (a + d) / 2.0;
        let rad = (((a - d) / 2.0).powi(2) + b * b).sqrt();
        ((mid - rad).max(0.0).sqrt(), (mid + rad).sqrt())
    }

    #[test]
    fn spec_examples() {
        let h = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]]).unwrap();
        let s = singular_values(&h).unwrap();
        for v in s.values() {
            assert!((v - 2f64.sqrt()).abs() < 1e-14);
        }
        let w = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), omega3()]).unwrap();
        let s = singular_values(&w).unwrap();
        assert!((s.min() - 1.0).abs() < 1e-14);
        assert!((s.max() - 3f64.sqrt()).abs() < 1e-14);
        assert!((abs_determinant(&w).unwrap() - 3f64.sqrt()).abs() < 1e-14);
        let ones = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let s = singular_values(&ones).unwrap();
        assert!(s.min() < 1e-15 && (s.max() - 2.0).abs() < 1e-14);
        assert!(s.is_singular());
        assert_eq!(abs_determinant(&ones).unwrap(), 0.0);
        assert!((abs_determinant(&ComplexMatrix::identity(3)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            ComplexMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]),
            Err(Error::NonFinite)
        );
        assert!(ComplexMatrix::new(2, 2, vec![c(1.0, 0.0)]).is_err());
        assert!(singular_values(&ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn matches_closed_form_on_2x2() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let m = random_matrix(&mut rng, 2);
            let s = singular_values(&m).unwrap();
            let (lo, hi) = sigma_2x2(&m);
            assert!((s.min() - lo).abs() <= 1e-12 * hi);
            assert!((s.max() - hi).abs() <= 1e-12 * hi);
        }
    }

    #[test]
    fn scaled_unitary_is_exact_at_64() {
        // DFT of order 64: all singular values equal to 8.
        let n = 64;
        let dft = ComplexMatrix::from_fn(n, n, |i, j| {
            crate::group::root_of_unity((i * j % n) as u64, n as u64)
        })
        .unwrap();
        let s = singular_values(&dft).unwrap();
        for v in s.values() {
            assert!((v - 8.0).abs() <= 1e-12 * 8.0, "{v}");
        }
    }

    #[test]
    fn determinant_cross_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=16 {
            for _ in 0..10 {
                let m = random_matrix(&mut rng, n);
                let det = abs_determinant(&m).unwrap();
                let prod = singular_values(&m).unwrap().product();
                assert!((det - prod).abs() <= 1e-9 * det.max(prod), "n={n}: {det} vs {prod}");
            }
        }
    }

    #[test]
    fn kron_shapes_and_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = random_matrix(&mut rng, 3);
        let one = ComplexMatrix::identity(1);
        assert_eq!(kron(&one, &b).unwrap(), b);
        let a = random_matrix(&mut rng, 2);
        let k = kron(&a, &b).unwrap();
        assert_eq!((k.rows(), k.cols()), (6, 6));
        assert!(matches!(kron_with_cap(&a, &b, 35), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn operator_norm_of_rectangular() {
        let m = ComplexMatrix::from_real_rows(&[vec![3.0, 0.0, 0.0], vec![0.0, 4.0, 0.0]]).unwrap();
        assert!((m.operator_norm().unwrap() - 4.0).abs() < 1e-14);
    }

    fn matrix_strategy(n: usize) -> impl Strategy<Value = ComplexMatrix> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |v| {
            ComplexMatrix::new(n, n, v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap()
        })
    }

    fn close(a: &SingularSpectrum, b: &SingularSpectrum, rel: f64) -> bool {
        let scale = a.max().max(b.max()).max(1e-300);
        a.values().iter().zip(b.values()).all(|(x, y)| (x - y).abs() <= rel * scale)
    }

    proptest! {
        #[test]
        fn invariant_under_permutations_and_phases(
            m in (1usize..=8).prop_flat_map(matrix_strategy),
            seed in any::<u64>(),
        ) {
            let n = m.rows();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut rows: Vec<usize> = (0..n).collect();
            let mut cols: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                rows.swap(i, rng.gen_range(0..=i));
                cols.swap(i, rng.gen_range(0..=i));
            }
            let left: Vec<Complex64> = (0..n).map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..6.3))).collect();
            let right: Vec<Complex64> = (0..n).map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..6.3))).collect();
            let base = singular_values(&m).unwrap();
            let moved = singular_values(&m.permuted(&rows, &cols).diag_scaled(&left, &right).unwrap()).unwrap();
            prop_assert!(close(&base, &moved, 1e-10));
        }

        #[test]
        fn kron_spectrum_is_pairwise_products(
            a in (1usize..=3).prop_flat_map(matrix_strategy),
            b in (1usize..=3).prop_flat_map(matrix_strategy),
        ) {
            let sa = singular_values(&a).unwrap();
            let sb = singular_values(&b).unwrap();
            let expected = SingularSpectrum::from_values(
                sa.values().iter().flat_map(|x| sb.values().iter().map(move |y| x * y)).collect(),
            );
            let got = singular_values(&kron(&a, &b).unwrap()).unwrap();
            prop_assert!(close(&expected, &got, 1e-12));
        }

        #[test]
        fn frobenius_identity(m in (1usize..=10).prop_flat_map(matrix_strategy)) {
            let s = singular_values(&m).unwrap();
            let f = m.frobenius_norm().powi(2);
            prop_assert!((s.sum_of_squares() - f).abs() <= 1e-12 * f.max(1.0));
        }
    }
}
