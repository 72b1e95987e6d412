//! Fourier matrices of equal-size pairs and their tightness quantities.
//!
//! For `|E| = |B| = n` with singular values `σ_1 ≤ … ≤ σ_n` of `T(E, B)`:
//! `L = σ_1²`, `U = σ_n²`, `ρ = U / L`, `D = ∏ σ_i`. The normalized forms
//! are all `≥ 1` with equality exactly for spectral pairs.
//!
//! Weighted (density) pairs: with densities `E(x)` and `B(b)` the operator
//! `c ↦ Σ c(b) B(b) b` from `L²(B)` to `L²(E)` becomes, in orthonormal
//! coordinates, `diag(√E) · [b(x)] · diag(√B)` on the supports.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{normalize_subset, totient, Element, GroupSpec};
use crate::numeric::{singular_values, ComplexMatrix, SingularSpectrum};
use crate::real;

/// `is_spectral` tolerance: `max |σ_i² − n| ≤ SPECTRAL_RTOL · n`.
pub const SPECTRAL_RTOL: f64 = 1e-8;

/// An equal-size pair `E ⊆ G`, `B ⊆ Ĝ`, both sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetPair {
    group: GroupSpec,
    e: Vec<Element>,
    b: Vec<Element>,
}

impl SubsetPair {
    pub fn new(group: &GroupSpec, e: Vec<Element>, b: Vec<Element>) -> Result<Self> {
        for x in e.iter().chain(&b) {
            group.check(x)?;
        }
        if e.len() != b.len() {
            return Err(Error::SizeMismatch { e: e.len(), b: b.len() });
        }
        if e.is_empty() {
            return Err(Error::InvalidSubset("empty set".into()));
        }
        Ok(SubsetPair { group: group.clone(), e: normalize_subset(e)?, b: normalize_subset(b)? })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn e(&self) -> &[Element] {
        &self.e
    }

    pub fn b(&self) -> &[Element] {
        &self.b
    }

    pub fn n(&self) -> usize {
        self.e.len()
    }

    /// `(B, E)`, reading `B` in the double dual through the same coordinates.
    pub fn swapped(&self) -> SubsetPair {
        SubsetPair { group: self.group.clone(), e: self.b.clone(), b: self.e.clone() }
    }
}

/// `T_{ij} = b_j(x_i)`.
pub fn fourier_matrix(pair: &SubsetPair) -> ComplexMatrix {
    fourier_matrix_of(&pair.group, &pair.e, &pair.b)
}

/// Fourier matrix for arbitrary (possibly non-square) element lists, in the
/// given order. Elements must conform to the group.
pub fn fourier_matrix_of(group: &GroupSpec, rows: &[Element], cols: &[Element]) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows.len(), cols.len(), |i, j| {
        group.character_unchecked(&cols[j], &rows[i])
    })
    .expect("characters are finite")
}

/// Normalized quantities: `L̃ = n/L`, `Ũ = U/n`, `ρ̃ = ρ`, `D̃ = √n / D^{1/n}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Normalized {
    #[serde(rename = "L", serialize_with = "real::serialize")]
    pub l: f64,
    #[serde(rename = "U", serialize_with = "real::serialize")]
    pub u: f64,
    #[serde(serialize_with = "real::serialize")]
    pub rho: f64,
    #[serde(rename = "D", serialize_with = "real::serialize")]
    pub d: f64,
}

impl Normalized {
    pub fn get(&self, q: Quantity) -> f64 {
        match q {
            Quantity::L => self.l,
            Quantity::U => self.u,
            Quantity::Rho => self.rho,
            Quantity::D => self.d,
        }
    }
}

/// One of the four tightness quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Quantity {
    L,
    U,
    #[serde(rename = "rho")]
    Rho,
    D,
}

impl Quantity {
    pub const ALL: [Quantity; 4] = [Quantity::L, Quantity::U, Quantity::Rho, Quantity::D];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::L => "L",
            Quantity::U => "U",
            Quantity::Rho => "rho",
            Quantity::D => "D",
        }
    }

    /// Whether larger raw values are better (`L`, `D`) or smaller (`U`, `ρ`).
    pub fn maximize(self) -> bool {
        matches!(self, Quantity::L | Quantity::D)
    }
}

impl std::str::FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "L" | "l" => Ok(Quantity::L),
            "U" | "u" => Ok(Quantity::U),
            "rho" | "Rho" | "RHO" => Ok(Quantity::Rho),
            "D" | "d" => Ok(Quantity::D),
            _ => Err(Error::Precondition(format!("unknown quantity `{s}`"))),
        }
    }
}

/// All tightness quantities of one pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TightnessReport {
    pub n: usize,
    #[serde(serialize_with = "ser_spectrum")]
    pub sigmas: SingularSpectrum,
    #[serde(rename = "L", serialize_with = "real::serialize")]
    pub l: f64,
    #[serde(rename = "U", serialize_with = "real::serialize")]
    pub u: f64,
    #[serde(serialize_with = "real::serialize")]
    pub rho: f64,
    #[serde(rename = "D", serialize_with = "real::serialize")]
    pub d: f64,
    pub normalized: Normalized,
    pub is_basis: bool,
    pub is_spectral: bool,
}

fn ser_spectrum<S: serde::Serializer>(s: &SingularSpectrum, ser: S) -> std::result::Result<S::Ok, S::Error> {
    real::serialize_vec(s.values(), ser)
}

impl TightnessReport {
    /// Builds the report from a square matrix with unit-modulus entries.
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self::from_spectrum(singular_values(m).expect("square finite matrix"))
    }

    pub fn from_spectrum(sigmas: SingularSpectrum) -> Self {
        let n = sigmas.len();
        let nf = n as f64;
        let l = sigmas.min().powi(2);
        let u = sigmas.max().powi(2);
        let is_basis = !sigmas.is_singular();
        let rho = if is_basis { u / l } else { f64::INFINITY };
        let d = sigmas.product();
        let is_spectral =
            is_basis && sigmas.values().iter().all(|s| (s * s - nf).abs() <= SPECTRAL_RTOL * nf);
        let normalized = Normalized {
            l: if is_basis { nf / l } else { f64::INFINITY },
            u: u / nf,
            rho,
            d: if is_basis {
                let log_mean = sigmas.values().iter().map(|s| s.ln()).sum::<f64>() / nf;
                nf.sqrt() / log_mean.exp()
            } else {
                f64::INFINITY
            },
        };
        TightnessReport { n, sigmas, l, u, rho, d, normalized, is_basis, is_spectral }
    }

    pub fn raw(&self, q: Quantity) -> f64 {
        match q {
            Quantity::L => self.l,
            Quantity::U => self.u,
            Quantity::Rho => self.rho,
            Quantity::D => self.d,
        }
    }
}

pub fn tightness_report(pair: &SubsetPair) -> TightnessReport {
    TightnessReport::from_matrix(&fourier_matrix(pair))
}

/// Largest `π/2 − θ` over pairs of distinct columns, where `θ ∈ [0, π/2]`
/// is the angle between them.
pub fn ortho_measure(pair: &SubsetPair) -> Result<f64> {
    if pair.n() < 2 {
        return Err(Error::Precondition("ortho_measure needs n >= 2".into()));
    }
    let t = fourier_matrix(pair);
    let cols: Vec<Vec<Complex64>> = (0..t.cols()).map(|j| t.column(j)).collect();
    let norms: Vec<f64> = cols.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
    let mut worst = 0.0f64;
    for i in 0..cols.len() {
        for j in i + 1..cols.len() {
            let ip: Complex64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
            let cos = (ip.norm() / (norms[i] * norms[j])).clamp(0.0, 1.0);
            worst = worst.max(FRAC_PI_2 - cos.acos());
        }
    }
    Ok(worst)
}

/// Direction of an inequality `lhs (rel) rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

/// Result of evaluating one named inequality. `slack` is positive when the
/// inequality holds with room to spare.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub name: &'static str,
    #[serde(serialize_with = "real::serialize")]
    pub lhs: f64,
    pub relation: Relation,
    #[serde(serialize_with = "real::serialize")]
    pub rhs: f64,
    pub holds: bool,
    #[serde(serialize_with = "real::serialize")]
    pub slack: f64,
}

/// Relative tolerance for non-strict inequalities that can hold with equality.
pub const INEQUALITY_RTOL: f64 = 1e-9;

impl InequalityCheck {
    pub fn new(name: &'static str, lhs: f64, relation: Relation, rhs: f64) -> Self {
        let slack = match relation {
            Relation::Le | Relation::Lt => rhs - lhs,
            Relation::Ge | Relation::Gt => lhs - rhs,
        };
        let tol = INEQUALITY_RTOL * lhs.abs().max(rhs.abs()).max(1.0);
        let holds = if slack.is_nan() {
            // inf - inf: both sides infinite
            false
        } else {
            match relation {
                Relation::Le | Relation::Ge => slack >= -tol,
                Relation::Lt | Relation::Gt => slack > 0.0,
            }
        };
        InequalityCheck { name, lhs, relation, rhs, holds, slack }
    }
}

/// Evaluates the pair-level inequalities. Bounds that need an invertible
/// matrix are only included for basis pairs.
pub fn pair_inequalities(pair: &SubsetPair) -> Vec<InequalityCheck> {
    let r = tightness_report(pair);
    let n = r.n as f64;
    let hadamard = n.powf(n / 2.0);
    let mut out = vec![
        InequalityCheck::new("L >= 0", r.l, Relation::Ge, 0.0),
        InequalityCheck::new("L <= n", r.l, Relation::Le, n),
        InequalityCheck::new("U >= n", r.u, Relation::Ge, n),
        InequalityCheck::new("U <= n^2", r.u, Relation::Le, n * n),
        InequalityCheck::new("rho >= 1", r.rho, Relation::Ge, 1.0),
        InequalityCheck::new("D <= n^(n/2)", r.d, Relation::Le, hadamard),
        InequalityCheck::new("trace identity", r.sigmas.sum_of_squares(), Relation::Le, n * n),
        InequalityCheck::new("trace identity (lower)", r.sigmas.sum_of_squares(), Relation::Ge, n * n),
    ];
    if !r.is_basis || r.n < 2 {
        return out;
    }
    let m = pair.group().exponent();
    let phi = totient(m) as f64;
    let e = (n - 1.0) / 2.0;
    out.extend([
        InequalityCheck::new("D <= sqrt(L) ((n^2-L)/(n-1))^((n-1)/2)", r.d, Relation::Le, r.l.sqrt() * ((n * n - r.l) / (n - 1.0)).powf(e)),
        InequalityCheck::new("D <= sqrt(U) ((n^2-U)/(n-1))^((n-1)/2)", r.d, Relation::Le, r.u.sqrt() * ((n * n - r.u).max(0.0) / (n - 1.0)).powf(e)),
        InequalityCheck::new("D <= 2 sqrt(rho)/(rho+1) n^(n/2)", r.d, Relation::Le, 2.0 * r.rho.sqrt() / (r.rho + 1.0) * hadamard),
        InequalityCheck::new("L > ((n-1)/n^2)^(n-1) D^2", r.l, Relation::Gt, ((n - 1.0) / (n * n)).powf(n - 1.0) * r.d * r.d),
        InequalityCheck::new("n^2 - U > (n-1) (D/n)^(2/(n-1))", n * n - r.u, Relation::Gt, (n - 1.0) * (r.d / n).powf(2.0 / (n - 1.0))),
        InequalityCheck::new("rho < 4 n^n / D^2", r.rho, Relation::Lt, 4.0 * n.powf(n) / (r.d * r.d)),
        InequalityCheck::new("D >= n^(n(1-phi(M))/2)", r.d, Relation::Ge, n.powf(n * (1.0 - phi) / 2.0)),
        InequalityCheck::new("rho < 4 n^(n phi(M))", r.rho, Relation::Lt, 4.0 * n.powf(n * phi)),
    ]);
    out
}

/// A density on a group (or its dual), stored on its support.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSubset {
    group: GroupSpec,
    weights: BTreeMap<Element, f64>,
}

impl WeightedSubset {
    /// Entries must be strictly positive and finite; zero weights are the
    /// caller's to drop.
    pub fn new(group: &GroupSpec, weights: impl IntoIterator<Item = (Element, f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (x, w) in weights {
            group.check(&x)?;
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidSubset(format!("weight {w} at {x} is not positive")));
            }
            if map.insert(x.clone(), w).is_some() {
                return Err(Error::InvalidSubset(format!("duplicate weight for {x}")));
            }
        }
        if map.is_empty() {
            return Err(Error::InvalidSubset("empty support".into()));
        }
        Ok(WeightedSubset { group: group.clone(), weights: map })
    }

    /// Indicator density of an ordinary subset.
    pub fn indicator(group: &GroupSpec, set: &[Element]) -> Result<Self> {
        Self::new(group, set.iter().map(|x| (x.clone(), 1.0)))
    }

    pub fn support(&self) -> Vec<Element> {
        self.weights.keys().cloned().collect()
    }

    pub fn weights(&self) -> &BTreeMap<Element, f64> {
        &self.weights
    }
}

/// Singular values and Riesz ratio of a weighted pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedReport {
    pub n: usize,
    #[serde(serialize_with = "ser_spectrum")]
    pub sigmas: SingularSpectrum,
    #[serde(rename = "L", serialize_with = "real::serialize")]
    pub l: f64,
    #[serde(rename = "U", serialize_with = "real::serialize")]
    pub u: f64,
    #[serde(serialize_with = "real::serialize")]
    pub rho: f64,
    pub is_basis: bool,
}

pub fn weighted_matrix(e: &WeightedSubset, b: &WeightedSubset) -> Result<ComplexMatrix> {
    if e.group != b.group {
        return Err(Error::Precondition("densities live on different groups".into()));
    }
    if e.weights.len() != b.weights.len() {
        return Err(Error::SizeMismatch { e: e.weights.len(), b: b.weights.len() });
    }
    let rows: Vec<Element> = e.support();
    let cols: Vec<Element> = b.support();
    let left: Vec<Complex64> = e.weights.values().map(|w| Complex64::new(w.sqrt(), 0.0)).collect();
    let right: Vec<Complex64> = b.weights.values().map(|w| Complex64::new(w.sqrt(), 0.0)).collect();
    fourier_matrix_of(&e.group, &rows, &cols).diag_scaled(&left, &right)
}

pub fn weighted_tightness(e: &WeightedSubset, b: &WeightedSubset) -> Result<WeightedReport> {
    let sigmas = singular_values(&weighted_matrix(e, b)?)?;
    let l = sigmas.min().powi(2);
    let u = sigmas.max().powi(2);
    let is_basis = !sigmas.is_singular();
    let rho = if is_basis { u / l } else { f64::INFINITY };
    Ok(WeightedReport { n: sigmas.len(), sigmas, l, u, rho, is_basis })
}
