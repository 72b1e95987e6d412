//! Multi-tiling by subgroups and the spectra built from it.
//!
//! `E` multi-tiles `G` by `H` at level `ℓ` when every coset `g_i + H` meets
//! `E` in exactly `ℓ` points `F_i`. Shifting each section into `H` and
//! taking the lexicographically smallest `H`-translate gives the canonical
//! translated sections `F_i'`; the number of distinct ones is `k`.
//!
//! `Ĥ` is represented by `Ĝ / H^⊥`, each class by its smallest element.
//! A spectrum `B_H ⊆ Ĥ` lifts to `B = {φ̃ + ψ : φ ∈ B_H, ψ ∈ H^⊥}`.
//!
//! With rows ordered by (coset, element) and columns by (`ψ`, `φ`),
//! `T(E, B) = T₁ T₂` where `T₁ = blockdiag T(F_i, B̃_H)` and block `(i, j)`
//! of `T₂` is `ψ_j(g_i) I_ℓ`. `T₂ / √m` is unitary, so every normalized
//! quantity of `(E, B)` follows from the sections.

use std::collections::BTreeMap;
use std::f64::consts::E as EULER;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{
    annihilator, cosets, enumerate_subgroups, normalize_subset, units, Element, GroupSpec, Subgroup,
};
use crate::numeric::{kron, ComplexMatrix};
use crate::pairs::{fourier_matrix, fourier_matrix_of, Normalized, Quantity, SubsetPair, TightnessReport};
use crate::real;
use crate::search::{exhaustive_quantities, simultaneous_basis_among, SearchConfig, Strategy};

/// One coset of `H` and the part of `E` inside it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Section {
    pub coset_rep: Element,
    pub elements: Vec<Element>,
    /// Canonical translate inside `H`.
    pub translated: Vec<Element>,
    pub class: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiTileAnalysis {
    #[serde(rename = "H", serialize_with = "ser_subgroup")]
    pub subgroup: Subgroup,
    pub level: Option<usize>,
    #[serde(rename = "k")]
    pub distinct_count: usize,
    pub sections: Vec<Section>,
    /// Distinct canonical translated sections, in order of first appearance.
    pub classes: Vec<Vec<Element>>,
}

fn ser_subgroup<S: serde::Serializer>(h: &Subgroup, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize;
    h.elements().serialize(s)
}

impl MultiTileAnalysis {
    pub fn m(&self) -> usize {
        self.sections.len()
    }

    /// Translated sections with multiplicity, one per coset.
    pub fn translated_sections(&self) -> Vec<&[Element]> {
        self.sections.iter().map(|s| s.translated.as_slice()).collect()
    }
}

/// Lexicographically smallest `H`-translate of a subset of `H`.
pub fn canonical_translate(group: &GroupSpec, h: &Subgroup, set: &[Element]) -> Vec<Element> {
    h.elements()
        .iter()
        .map(|t| {
            let mut moved: Vec<Element> = set.iter().map(|x| group.add(x, t)).collect();
            moved.sort();
            moved
        })
        .min()
        .unwrap_or_default()
}

fn check_subgroup(group: &GroupSpec, h: &Subgroup) -> Result<()> {
    if h.parent() != group {
        return Err(Error::Precondition("subgroup belongs to a different group".into()));
    }
    Ok(())
}

pub fn multi_tile_analysis(group: &GroupSpec, e: &[Element], h: &Subgroup) -> Result<MultiTileAnalysis> {
    check_subgroup(group, h)?;
    if e.is_empty() {
        return Err(Error::InvalidSubset("E is empty".into()));
    }
    for x in e {
        group.check(x)?;
    }
    let e = normalize_subset(e.to_vec())?;
    let mut classes: Vec<Vec<Element>> = Vec::new();
    let mut sections = Vec::new();
    for coset in cosets(group, h) {
        let elements: Vec<Element> = e.iter().filter(|x| h.same_coset(x, &coset.representative)).cloned().collect();
        let shifted: Vec<Element> = elements.iter().map(|x| group.sub(x, &coset.representative)).collect();
        let translated = canonical_translate(group, h, &shifted);
        let class = match classes.iter().position(|c| c == &translated) {
            Some(i) => i,
            None => {
                classes.push(translated.clone());
                classes.len() - 1
            }
        };
        sections.push(Section { coset_rep: coset.representative, elements, translated, class });
    }
    let first = sections[0].elements.len();
    let level = sections.iter().all(|s| s.elements.len() == first).then_some(first);
    Ok(MultiTileAnalysis { subgroup: h.clone(), level, distinct_count: classes.len(), sections, classes })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TilingSubgroup {
    #[serde(rename = "H", serialize_with = "ser_subgroup")]
    pub subgroup: Subgroup,
    pub level: usize,
    pub k: usize,
}

/// Every subgroup by which `E` multi-tiles, sorted by level, then `k`.
pub fn find_multi_tiling_subgroups(group: &GroupSpec, e: &[Element], cap: u64) -> Result<Vec<TilingSubgroup>> {
    let mut out = Vec::new();
    for h in enumerate_subgroups(group, cap)? {
        let a = multi_tile_analysis(group, e, &h)?;
        if let Some(level) = a.level {
            out.push(TilingSubgroup { subgroup: h, level, k: a.distinct_count });
        }
    }
    out.sort_by_key(|t| (t.level, t.k));
    Ok(out)
}

/// Elements of `Ĥ`, each as the smallest element of its `H^⊥`-coset in `Ĝ`.
pub fn subgroup_dual(group: &GroupSpec, h: &Subgroup) -> Vec<Element> {
    let perp = annihilator(group, h);
    cosets(group, &perp).into_iter().map(|c| c.representative).collect()
}

/// Smallest element of `φ + H^⊥`.
pub fn canonical_lift(group: &GroupSpec, h: &Subgroup, phi: &Element) -> Element {
    annihilator(group, h).coset_representative(phi)
}

/// `{φ̃ + ψ : φ ∈ B_H, ψ ∈ H^⊥}`. Elements of `B_H` may be any
/// representatives of their classes.
pub fn lift_spectrum(group: &GroupSpec, h: &Subgroup, b_h: &[Element]) -> Result<Vec<Element>> {
    check_subgroup(group, h)?;
    let perp = annihilator(group, h);
    let mut lifts = Vec::with_capacity(b_h.len());
    for phi in b_h {
        group.check(phi)?;
        lifts.push(perp.coset_representative(phi));
    }
    let mut sorted = lifts.clone();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidSubset("two elements of B_H define the same character of H".into()));
    }
    let mut b: Vec<Element> = lifts
        .iter()
        .flat_map(|phi| perp.elements().iter().map(move |psi| group.add(phi, psi)))
        .collect();
    b.sort();
    Ok(b)
}

/// For a tile (`ℓ = 1`), the spectrum `H^⊥`.
pub fn tile_spectrum(group: &GroupSpec, e: &[Element], h: &Subgroup) -> Result<Vec<Element>> {
    let a = multi_tile_analysis(group, e, h)?;
    if a.level != Some(1) {
        return Err(Error::Precondition("E does not tile G by H".into()));
    }
    lift_spectrum(group, h, &[group.zero()])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantityComparison {
    pub quantity: Quantity,
    #[serde(serialize_with = "real::serialize")]
    pub direct: f64,
    #[serde(serialize_with = "real::serialize")]
    pub formula: f64,
    #[serde(serialize_with = "real::serialize")]
    pub deviation: f64,
}

/// `|a − b| / |b|`, zero when both are the same infinity.
pub fn relative_deviation(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else if !a.is_finite() || !b.is_finite() {
        f64::INFINITY
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}

fn compare(q: Quantity, direct: f64, formula: f64) -> QuantityComparison {
    QuantityComparison { quantity: q, direct, formula, deviation: relative_deviation(direct, formula) }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Factorization {
    /// `‖T − T₁T₂‖`
    #[serde(serialize_with = "real::serialize")]
    pub product_residual: f64,
    /// `‖T₂*T₂ / m − I‖`
    #[serde(serialize_with = "real::serialize")]
    pub unitarity_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecomposeReport {
    pub level: usize,
    pub m: usize,
    pub b: Vec<Element>,
    pub direct: TightnessReport,
    pub sections: Vec<TightnessReport>,
    pub comparisons: Vec<QuantityComparison>,
    #[serde(serialize_with = "real::serialize")]
    pub max_deviation: f64,
    pub factorization: Factorization,
}

/// Normalized quantities of `(E, lift(B_H))` from the section formulas.
pub fn section_formula(sections: &[TightnessReport]) -> Normalized {
    let max_of = |f: fn(&TightnessReport) -> f64| sections.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    let l = max_of(|r| r.normalized.l);
    let u = max_of(|r| r.normalized.u);
    let d = if sections.iter().all(|r| r.normalized.d.is_finite()) {
        let logs: f64 = sections.iter().map(|r| r.normalized.d.ln()).sum();
        (logs / sections.len() as f64).exp()
    } else {
        f64::INFINITY
    };
    Normalized { l, u, rho: l * u, d }
}

/// Checks the decomposition of `T(E, lift(B_H))` against its sections.
pub fn decompose_verify(group: &GroupSpec, e: &[Element], h: &Subgroup, b_h: &[Element]) -> Result<DecomposeReport> {
    let analysis = multi_tile_analysis(group, e, h)?;
    let level = analysis.level.ok_or_else(|| Error::Precondition("E does not multi-tile G by H".into()))?;
    if level != b_h.len() {
        return Err(Error::Precondition(format!("level {level} differs from |B_H| = {}", b_h.len())));
    }
    let perp = annihilator(group, h);
    let lifts: Vec<Element> = b_h.iter().map(|phi| perp.coset_representative(phi)).collect();
    let b = lift_spectrum(group, h, b_h)?;
    let e_sorted = normalize_subset(e.to_vec())?;
    let direct_pair = SubsetPair::new(group, e_sorted, b.clone())?;
    let direct = TightnessReport::from_matrix(&fourier_matrix(&direct_pair));
    let sections: Vec<TightnessReport> = analysis
        .sections
        .iter()
        .map(|s| TightnessReport::from_matrix(&fourier_matrix_of(group, &s.translated, &lifts)))
        .collect();
    let formula = section_formula(&sections);
    let comparisons: Vec<QuantityComparison> =
        Quantity::ALL.iter().map(|&q| compare(q, direct.normalized.get(q), formula.get(q))).collect();
    let max_deviation = comparisons.iter().map(|c| c.deviation).fold(0.0, f64::max);

    // Block factorization, rows by (coset, element), columns by (ψ, φ).
    let m = analysis.m();
    let rows: Vec<Element> = analysis.sections.iter().flat_map(|s| s.elements.iter().cloned()).collect();
    let cols: Vec<Element> = perp
        .elements()
        .iter()
        .flat_map(|psi| lifts.iter().map(move |phi| group.add(phi, psi)))
        .collect();
    let t = fourier_matrix_of(group, &rows, &cols);
    let n = m * level;
    let mut t1 = ComplexMatrix::zeros(n, n);
    for (i, s) in analysis.sections.iter().enumerate() {
        let block = fourier_matrix_of(group, &s.elements, &lifts);
        for r in 0..level {
            for c in 0..level {
                t1.set(i * level + r, i * level + c, block.get(r, c));
            }
        }
    }
    let reps: Vec<Element> = analysis.sections.iter().map(|s| s.coset_rep.clone()).collect();
    let k_matrix = fourier_matrix_of(group, &reps, perp.elements());
    let t2 = kron(&k_matrix, &ComplexMatrix::identity(level))?;
    let product_residual = t.sub(&t1.matmul(&t2)?)?.operator_norm()?;
    let gram = t2.conj_transpose().matmul(&t2)?.scale(1.0 / m as f64);
    let unitarity_residual = gram.sub(&ComplexMatrix::identity(n))?.operator_norm()?;

    Ok(DecomposeReport {
        level,
        m,
        b,
        direct,
        sections,
        comparisons,
        max_deviation,
        factorization: Factorization { product_residual, unitarity_residual },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductPairReport {
    pub group: String,
    pub e: Vec<Element>,
    pub b: Vec<Element>,
    pub comparisons: Vec<QuantityComparison>,
    #[serde(serialize_with = "real::serialize")]
    pub max_deviation: f64,
    /// `‖T(E, B) − T(E₁, B₁) ⊗ T(E₂, B₂)‖`
    #[serde(serialize_with = "real::serialize")]
    pub kron_residual: f64,
}

/// `E × F` in `H ⊕ K`, lexicographic.
pub fn cartesian(a: &[Element], b: &[Element]) -> Vec<Element> {
    let mut out: Vec<Element> = a.iter().flat_map(|x| b.iter().map(move |y| x.concat(y))).collect();
    out.sort();
    out
}

/// Multiplicativity of the normalized quantities for a product pair.
pub fn product_pair_verify(
    h: &GroupSpec,
    e1: &[Element],
    b1: &[Element],
    k: &GroupSpec,
    e2: &[Element],
    b2: &[Element],
) -> Result<ProductPairReport> {
    let p1 = SubsetPair::new(h, e1.to_vec(), b1.to_vec())?;
    let p2 = SubsetPair::new(k, e2.to_vec(), b2.to_vec())?;
    let g = h.product(k);
    let e = cartesian(p1.e(), p2.e());
    let b = cartesian(p1.b(), p2.b());
    let pair = SubsetPair::new(&g, e.clone(), b.clone())?;
    let t = fourier_matrix(&pair);
    let r = TightnessReport::from_matrix(&t);
    let r1 = TightnessReport::from_matrix(&fourier_matrix(&p1));
    let r2 = TightnessReport::from_matrix(&fourier_matrix(&p2));
    let comparisons: Vec<QuantityComparison> = Quantity::ALL
        .iter()
        .map(|&q| compare(q, r.normalized.get(q), r1.normalized.get(q) * r2.normalized.get(q)))
        .collect();
    let max_deviation = comparisons.iter().map(|c| c.deviation).fold(0.0, f64::max);
    let kron_residual = t.sub(&kron(&fourier_matrix(&p1), &fourier_matrix(&p2))?)?.operator_norm()?;
    Ok(ProductPairReport { group: g.to_string(), e, b, comparisons, max_deviation, kron_residual })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetComparison {
    pub quantity: Quantity,
    #[serde(serialize_with = "real::serialize")]
    pub left: f64,
    #[serde(serialize_with = "real::serialize")]
    pub right: f64,
    pub holds: bool,
}

/// `Q̃(E₁ × E₂) ≤ Q̃(E₁) Q̃(E₂)` by exhaustive search on all three sets.
pub fn product_set_verify(
    h: &GroupSpec,
    e1: &[Element],
    k: &GroupSpec,
    e2: &[Element],
    cfg: &SearchConfig,
) -> Result<Vec<SetComparison>> {
    let g = h.product(k);
    let q1 = exhaustive_quantities(h, e1, cfg)?;
    let q2 = exhaustive_quantities(k, e2, cfg)?;
    let q = exhaustive_quantities(&g, &cartesian(e1, e2), cfg)?;
    Ok((0..4)
        .map(|i| {
            let right = q1[i].normalized * q2[i].normalized;
            SetComparison {
                quantity: q[i].quantity,
                left: q[i].normalized,
                right,
                holds: q[i].normalized <= right * (1.0 + 1e-9),
            }
        })
        .collect())
}

/// `Q̃(E₁ × K) = Q̃(E₁)`, both sides exhaustive.
pub fn dimexpand_verify(h: &GroupSpec, e1: &[Element], k: &GroupSpec, cfg: &SearchConfig) -> Result<Vec<SetComparison>> {
    let g = h.product(k);
    let lhs = exhaustive_quantities(h, e1, cfg)?;
    let rhs = exhaustive_quantities(&g, &cartesian(e1, &k.elements()), cfg)?;
    Ok((0..4)
        .map(|i| {
            let (left, right) = (lhs[i].normalized, rhs[i].normalized);
            SetComparison {
                quantity: lhs[i].quantity,
                left,
                right,
                holds: relative_deviation(right, left) <= 1e-8,
            }
        })
        .collect())
}

/// Main-theorem bounds for level `ℓ` and `k` distinct sections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelBounds {
    #[serde(rename = "L", serialize_with = "real::serialize")]
    pub l: f64,
    #[serde(rename = "U", serialize_with = "real::serialize")]
    pub u: f64,
    #[serde(serialize_with = "real::serialize")]
    pub rho: f64,
    #[serde(rename = "D", serialize_with = "real::serialize")]
    pub d: f64,
}

impl LevelBounds {
    pub fn new(level: usize, k: usize) -> Self {
        let l = level as f64;
        let k = k as f64;
        LevelBounds {
            l: EULER * l.powf(k * l),
            u: l - (l - 1.0) / (2f64.powf(k + 1.0) * l.powf(k)),
            rho: EULER * l.powf(k * l + 1.0),
            d: l.sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub quantity: Quantity,
    #[serde(serialize_with = "real::serialize")]
    pub achieved: f64,
    #[serde(serialize_with = "real::serialize")]
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoopedPair {
    pub s: u64,
    pub b_h: Vec<Element>,
    pub b: Vec<Element>,
    /// `∏ D_{F'}(s B_H)` over the sections this pair was chosen for.
    #[serde(serialize_with = "real::serialize")]
    pub section_product: f64,
    pub report: TightnessReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MainBoundCertificate {
    pub level: usize,
    pub k: usize,
    pub m: usize,
    pub simultaneous_basis: Option<Vec<Element>>,
    /// Pair chosen so the product over the `k` distinct sections is `≥ 1`;
    /// it certifies the `L̃`, `Ũ` and `ρ` bounds.
    pub pair: Option<LoopedPair>,
    /// Pair chosen so the product over all `m` sections is `≥ 1`; it
    /// certifies `D̃ ≤ √ℓ`.
    pub det_pair: Option<LoopedPair>,
    pub bounds: LevelBounds,
    pub checks: Vec<BoundCheck>,
    pub diagnostics: Vec<String>,
}

impl MainBoundCertificate {
    pub fn all_hold(&self) -> bool {
        self.pair.is_some() && self.checks.iter().all(|c| c.holds)
    }
}

/// Simultaneous basis of the translated sections inside `Ĥ`: `{0, b, …,
/// (ℓ−1) b}` for cyclic `H` with `b(h) = e^{2πi/r}` on a generator `h`,
/// otherwise the first one found exhaustively.
pub fn sections_simultaneous_basis(
    group: &GroupSpec,
    h: &Subgroup,
    classes: &[Vec<Element>],
    cfg: &SearchConfig,
) -> Result<Option<Vec<Element>>> {
    let level = classes.first().map_or(0, |c| c.len());
    if let Some(gen) = h.cyclic_generator() {
        let r = h.order();
        let target = group.exponent() / r;
        if let Some(b) = group.elements().into_iter().find(|b| group.phase(b, &gen) == target) {
            let perp = annihilator(group, h);
            let mut b_h: Vec<Element> =
                (0..level as u64).map(|j| perp.coset_representative(&group.scale(j, &b))).collect();
            b_h.sort();
            return Ok(Some(b_h));
        }
    }
    let dual = subgroup_dual(group, h);
    simultaneous_basis_among(group, classes, &dual, Strategy::Exhaustive, cfg)
}

/// `log ∏ D_F(B)` over `sets`.
fn log_det_product(group: &GroupSpec, sets: &[&[Element]], b: &[Element]) -> f64 {
    sets.iter()
        .map(|f| TightnessReport::from_matrix(&fourier_matrix_of(group, f, b)).d.ln())
        .sum()
}

/// Certifies the main-theorem bounds for a multi-tile at level `ℓ > 1`.
pub fn main_bound_certify(group: &GroupSpec, e: &[Element], h: &Subgroup, cfg: &SearchConfig) -> Result<MainBoundCertificate> {
    let analysis = multi_tile_analysis(group, e, h)?;
    let level = analysis.level.ok_or_else(|| Error::Precondition("E does not multi-tile G by H".into()))?;
    if level == 1 {
        return Err(Error::Precondition("level 1: E tiles G by H and is spectral; use tile_spectrum".into()));
    }
    let k = analysis.distinct_count;
    let m = analysis.m();
    let bounds = LevelBounds::new(level, k);
    let mut diagnostics = Vec::new();
    let b_h = sections_simultaneous_basis(group, h, &analysis.classes, cfg)?;
    let Some(b_h) = b_h else {
        diagnostics.push(format!(
            "the {k} translated sections have no simultaneous basis in the dual of H; the theorem does not apply"
        ));
        return Ok(MainBoundCertificate {
            level,
            k,
            m,
            simultaneous_basis: None,
            pair: None,
            det_pair: None,
            bounds,
            checks: Vec::new(),
            diagnostics,
        });
    };
    let perp = annihilator(group, h);
    let e_sorted = normalize_subset(e.to_vec())?;
    let distinct: Vec<&[Element]> = analysis.classes.iter().map(|c| c.as_slice()).collect();
    let full = analysis.translated_sections();

    let mut best_distinct: Option<(f64, u64, Vec<Element>)> = None;
    let mut best_full: Option<(f64, u64, Vec<Element>)> = None;
    for s in units(h.exponent()) {
        let mut sb: Vec<Element> = b_h.iter().map(|y| perp.coset_representative(&group.scale(s, y))).collect();
        sb.sort();
        let pd = log_det_product(group, &distinct, &sb);
        let pf = log_det_product(group, &full, &sb);
        if best_distinct.as_ref().is_none_or(|(v, _, _)| pd > *v) {
            best_distinct = Some((pd, s, sb.clone()));
        }
        if best_full.as_ref().is_none_or(|(v, _, _)| pf > *v) {
            best_full = Some((pf, s, sb));
        }
    }
    let build = |(logp, s, sb): (f64, u64, Vec<Element>)| -> Result<LoopedPair> {
        let b = lift_spectrum(group, h, &sb)?;
        let report = TightnessReport::from_matrix(&fourier_matrix(&SubsetPair::new(group, e_sorted.clone(), b.clone())?));
        Ok(LoopedPair { s, b_h: sb, b, section_product: logp.exp(), report })
    };
    let pair = build(best_distinct.expect("s = 1 is a unit"))?;
    let det_pair = build(best_full.expect("s = 1 is a unit"))?;
    if pair.section_product < 1.0 - 1e-9 {
        diagnostics.push("no s gave a distinct-section determinant product >= 1".into());
    }
    let n = pair.report.normalized;
    let checks = vec![
        BoundCheck { quantity: Quantity::L, achieved: n.l, bound: bounds.l, holds: n.l < bounds.l },
        BoundCheck { quantity: Quantity::U, achieved: n.u, bound: bounds.u, holds: n.u < bounds.u },
        BoundCheck { quantity: Quantity::Rho, achieved: n.rho, bound: bounds.rho, holds: n.rho < bounds.rho },
        BoundCheck {
            quantity: Quantity::D,
            achieved: det_pair.report.normalized.d,
            bound: bounds.d,
            holds: det_pair.report.normalized.d <= bounds.d * (1.0 + 1e-12),
        },
    ];
    Ok(MainBoundCertificate {
        level,
        k,
        m,
        simultaneous_basis: Some(b_h),
        pair: Some(pair),
        det_pair: Some(det_pair),
        bounds,
        checks,
        diagnostics,
    })
}

/// Summary used in JSON output of the tiling command.
pub fn analysis_summary(a: &MultiTileAnalysis) -> BTreeMap<&'static str, serde_json::Value> {
    BTreeMap::from([
        ("level", serde_json::json!(a.level)),
        ("k", serde_json::json!(a.distinct_count)),
        ("m", serde_json::json!(a.m())),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{parse_subset, subgroup_closure};
    use crate::pairs::tightness_report;
    use crate::search::vandermonde_spectrum;

    fn el(v: &[u64]) -> Element {
        Element::new(v.to_vec())
    }

    /// `({0,1} × (Z_m \ {0})) ∪ {(0,0),(2,0)}` with `H = Z_m × {0}`.
    fn two_cross_sections(m: u64) -> (GroupSpec, Vec<Element>, Subgroup) {
        let g = GroupSpec::new(vec![m, m]).unwrap();
        let mut e = vec![el(&[0, 0]), el(&[2, 0])];
        for y in 1..m {
            e.push(el(&[0, y]));
            e.push(el(&[1, y]));
        }
        let h = subgroup_closure(&g, &[el(&[1, 0])]).unwrap();
        (g, normalize_subset(e).unwrap(), h)
    }

    #[test]
    fn two_cross_sections_structure() {
        let (g, e, h) = two_cross_sections(3);
        let a = multi_tile_analysis(&g, &e, &h).unwrap();
        assert_eq!(a.level, Some(2));
        // In Z3, {0,2} + 1 = {0,1}: one class only.
        assert_eq!(a.distinct_count, 1);
        assert_eq!(a.classes, vec![vec![el(&[0, 0]), el(&[1, 0])]]);

        let (g, e, h) = two_cross_sections(5);
        let a = multi_tile_analysis(&g, &e, &h).unwrap();
        assert_eq!((a.level, a.distinct_count), (Some(2), 2));
        assert!(a.classes.contains(&vec![el(&[0, 0]), el(&[2, 0])]));
        assert!(a.classes.contains(&vec![el(&[0, 0]), el(&[1, 0])]));
    }

    #[test]
    fn analysis_edge_cases() {
        let g = GroupSpec::parse("Z4").unwrap();
        let h = subgroup_closure(&g, &[el(&[2])]).unwrap();
        let a = multi_tile_analysis(&g, &[el(&[0]), el(&[1])], &h).unwrap();
        assert_eq!((a.level, a.distinct_count), (Some(1), 1));
        let a = multi_tile_analysis(&g, h.elements(), &h).unwrap();
        assert_eq!(a.level, None);
        let a = multi_tile_analysis(&g, &[el(&[0]), el(&[1]), el(&[2])], &h).unwrap();
        assert_eq!(a.level, None);
    }

    #[test]
    fn tiling_subgroup_lists() {
        let g = GroupSpec::parse("Z2^2").unwrap();
        let e = parse_subset(&g, "(0,0),(1,0),(0,1)").unwrap();
        let found = find_multi_tiling_subgroups(&g, &e, 64).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!((found[0].subgroup.order(), found[0].level), (4, 3));

        let all = g.elements();
        let found = find_multi_tiling_subgroups(&g, &all, 64).unwrap();
        assert_eq!(found.len(), 5);
        assert!(found.iter().all(|t| t.level as u64 == t.subgroup.order()));

        let g = GroupSpec::parse("Z3^2").unwrap();
        let e = parse_subset(&g, "(0,0),(1,0),(2,0)").unwrap();
        let found = find_multi_tiling_subgroups(&g, &e, 64).unwrap();
        let vertical = subgroup_closure(&g, &[el(&[0, 1])]).unwrap();
        assert!(found.iter().any(|t| t.level == 1 && t.subgroup == vertical));
        assert!(!found.iter().any(|t| t.subgroup.elements() == e.as_slice()));
    }

    #[test]
    fn lift_examples() {
        let g = GroupSpec::parse("Z4").unwrap();
        let h = subgroup_closure(&g, &[el(&[2])]).unwrap();
        assert_eq!(lift_spectrum(&g, &h, &[el(&[0])]).unwrap(), vec![el(&[0]), el(&[2])]);
        assert!(lift_spectrum(&g, &h, &[el(&[0]), el(&[2])]).is_err());
        let whole = Subgroup::whole(&g);
        assert_eq!(lift_spectrum(&g, &whole, &[el(&[1]), el(&[3])]).unwrap(), vec![el(&[1]), el(&[3])]);
        let g = GroupSpec::parse("Z3^2").unwrap();
        let h = subgroup_closure(&g, &[el(&[1, 0])]).unwrap();
        let b = lift_spectrum(&g, &h, &[el(&[0, 0]), el(&[1, 0])]).unwrap();
        assert_eq!(b.len(), 6);
    }

    #[test]
    fn decomposition_two_cross_sections() {
        let (g, e, h) = two_cross_sections(3);
        let b_h: Vec<Element> = vandermonde_spectrum(3, 2).unwrap().iter().map(|b| el(&[b.coords()[0], 0])).collect();
        let r = decompose_verify(&g, &e, &h, &b_h).unwrap();
        assert!(r.max_deviation <= 1e-9, "{:?}", r.comparisons);
        assert!(r.factorization.product_residual <= 1e-9);
        assert!(r.factorization.unitarity_residual <= 1e-9);
    }

    #[test]
    fn sum_with_tile_matches_section() {
        // F = {0,1} ⊆ H = Z3 × {0}, T = {0} × Z3 tiles by H.
        let g = GroupSpec::parse("Z3^2").unwrap();
        let h = subgroup_closure(&g, &[el(&[1, 0])]).unwrap();
        let f = vec![el(&[0, 0]), el(&[1, 0])];
        let e: Vec<Element> = f.iter().flat_map(|x| (0..3).map(move |t| el(&[x.coords()[0], t]))).collect();
        let r = decompose_verify(&g, &e, &h, &f).unwrap();
        let section = tightness_report(&SubsetPair::new(&g, f.clone(), f).unwrap());
        for q in Quantity::ALL {
            assert!(relative_deviation(r.direct.normalized.get(q), section.normalized.get(q)) < 1e-12);
        }
    }

    #[test]
    fn tiles_are_spectral() {
        for gs in ["Z4xZ2", "Z2^3", "Z8", "Z4^2", "Z2^4"] {
            let g = GroupSpec::parse(gs).unwrap();
            for h in enumerate_subgroups(&g, 64).unwrap() {
                // any set of coset representatives tiles
                let reps: Vec<Element> = cosets(&g, &h).into_iter().map(|c| c.elements.last().unwrap().clone()).collect();
                let b = tile_spectrum(&g, &reps, &h).unwrap();
                let r = tightness_report(&SubsetPair::new(&g, reps, b).unwrap());
                assert!(r.is_spectral, "{gs}");
            }
        }
    }

    #[test]
    fn product_pair_z3() {
        let z3 = GroupSpec::parse("Z3").unwrap();
        let s = parse_subset(&z3, "0,1").unwrap();
        let r = product_pair_verify(&z3, &s, &s, &z3, &s, &s).unwrap();
        let rho = r.comparisons.iter().find(|c| c.quantity == Quantity::Rho).unwrap();
        assert!((rho.direct - 9.0).abs() < 1e-9);
        assert!(r.max_deviation < 1e-12 && r.kron_residual < 1e-12);

        let sets = product_set_verify(&z3, &s, &z3, &s, &SearchConfig::default()).unwrap();
        let rho = sets.iter().find(|c| c.quantity == Quantity::Rho).unwrap();
        assert!(rho.left < rho.right - 1.0);
        assert!(sets.iter().all(|c| c.holds));
    }

    #[test]
    fn dimexpand_z3_by_z2() {
        let z3 = GroupSpec::parse("Z3").unwrap();
        let z2 = GroupSpec::parse("Z2").unwrap();
        let s = parse_subset(&z3, "0,1").unwrap();
        let r = dimexpand_verify(&z3, &s, &z2, &SearchConfig::default()).unwrap();
        assert!(r.iter().all(|c| c.holds), "{r:?}");
        let rho = r.iter().find(|c| c.quantity == Quantity::Rho).unwrap();
        assert!((rho.left - 3.0).abs() < 1e-9);
    }

    #[test]
    fn main_bound_two_cross_sections() {
        for m in [3, 5] {
            let (g, e, h) = two_cross_sections(m);
            let c = main_bound_certify(&g, &e, &h, &SearchConfig::default()).unwrap();
            assert!(c.all_hold(), "{c:?}");
            assert!(c.pair.as_ref().unwrap().report.rho < 32.0 * EULER);
        }
    }

    #[test]
    fn main_bound_without_simultaneous_basis() {
        // Z2^2 x Z3 with the three order-2 subgroups of Z2^2 as sections.
        let g = GroupSpec::parse("Z2^2xZ3").unwrap();
        let h = subgroup_closure(&g, &[el(&[1, 0, 0]), el(&[0, 1, 0])]).unwrap();
        let f = [[[0, 0], [1, 0]], [[0, 0], [0, 1]], [[0, 0], [1, 1]]];
        let e: Vec<Element> = (0..3u64)
            .flat_map(|t| f[t as usize].iter().map(move |x| el(&[x[0], x[1], t])))
            .collect();
        let c = main_bound_certify(&g, &e, &h, &SearchConfig::default()).unwrap();
        assert_eq!((c.level, c.k), (2, 3));
        assert!(c.simultaneous_basis.is_none());
        assert!(!c.diagnostics.is_empty());
    }

    #[test]
    fn level_one_is_rejected() {
        let g = GroupSpec::parse("Z4").unwrap();
        let h = subgroup_closure(&g, &[el(&[2])]).unwrap();
        assert!(main_bound_certify(&g, &[el(&[0]), el(&[1])], &h, &SearchConfig::default()).is_err());
    }

    #[test]
    fn level_bounds_formula() {
        let b = LevelBounds::new(2, 1);
        assert!((b.rho - 8.0 * EULER).abs() < 1e-12);
        let b = LevelBounds::new(2, 2);
        assert!((b.rho - 32.0 * EULER).abs() < 1e-12);
        assert!((b.u - (2.0 - 1.0 / 32.0)).abs() < 1e-12);
    }
}
