//! Property suite behind the `verify` command.
//!
//! Every check is deterministic given the seed: random cases draw from a
//! ChaCha stream keyed by (seed, check name, case index), and cases are
//! merged in index order whatever the thread count.

use std::collections::BTreeMap;
use std::f64::consts::{E as EULER, PI};

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::families;
use crate::group::{
    annihilator, cosets, enumerate_subgroups, normalize_subset, totient, Element, GroupSpec, ZLinearMap,
    affine_transform_pair, gcd,
};
use crate::numeric::{abs_determinant, kron, singular_values, ComplexMatrix};
use crate::pairs::{
    ortho_measure, pair_inequalities, tightness_report, weighted_tightness, Quantity, SubsetPair, TightnessReport,
    WeightedSubset,
};
use crate::real;
use crate::search::{
    basis_partners, exhaustive_quantities, loop_around, loop_product_check, next_combination, random_basis,
    simultaneous_basis, unrank_combination, vandermonde_spectrum, SearchConfig, SetBounds, Strategy,
};
use crate::tiling::{
    decompose_verify, dimexpand_verify, find_multi_tiling_subgroups, lift_spectrum, main_bound_certify,
    product_pair_verify, product_set_verify, subgroup_dual, tile_spectrum,
};

pub const DEFAULT_CASES: usize = 200;

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Random cases per randomized check.
    pub cases: usize,
    /// Replaces the default tolerance of every tolerance-based check.
    pub tol: Option<f64>,
    /// Check names to run; empty runs all.
    pub only: Vec<String>,
    pub search: SearchConfig,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 0, cases: DEFAULT_CASES, tol: None, only: Vec::new(), search: SearchConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: &'static str,
    pub about: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Smallest margin before failure, relative where the check is relative.
    #[serde(serialize_with = "real::serialize_opt")]
    pub worst_slack: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub cases: usize,
    pub checks_run: usize,
    pub failures: usize,
    pub checks: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, Default)]
struct Tally {
    cases: usize,
    failures: usize,
    worst: Option<f64>,
    first_failure: Option<String>,
}

impl Tally {
    fn slack(&mut self, slack: f64, what: impl FnOnce() -> String) {
        let slack = if slack.is_nan() { f64::NEG_INFINITY } else { slack };
        self.cases += 1;
        self.worst = Some(self.worst.map_or(slack, |w| w.min(slack)));
        if slack < 0.0 {
            self.fail(what);
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.fail(what);
        }
    }

    fn fail(&mut self, what: impl FnOnce() -> String) {
        self.failures += 1;
        if self.first_failure.is_none() {
            self.first_failure = Some(what());
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.cases += other.cases;
        self.failures += other.failures;
        self.worst = match (self.worst, other.worst) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.first_failure = self.first_failure.or(other.first_failure);
        self
    }
}

/// Margin of `a ≈ b`: `tol − |a − b| / max(1, |b|)`; equal infinities match.
fn close(a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        tol
    } else if !a.is_finite() || !b.is_finite() {
        f64::NEG_INFINITY
    } else {
        tol - (a - b).abs() / b.abs().max(1.0)
    }
}

/// Margin of `a ≤ b`, relative to `max(1, |b|)`.
fn below(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else if a == f64::INFINITY || b == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else if b == f64::INFINITY || a == f64::NEG_INFINITY {
        f64::INFINITY
    } else {
        (b - a) / b.abs().max(1.0)
    }
}

fn above(a: f64, b: f64) -> f64 {
    below(b, a)
}

fn fnv(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

struct Ctx<'a> {
    cfg: &'a VerifyConfig,
    name: &'static str,
}

impl Ctx<'_> {
    fn tol(&self, default: f64) -> f64 {
        self.cfg.tol.unwrap_or(default)
    }

    fn search(&self) -> &SearchConfig {
        &self.cfg.search
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.cfg.seed ^ fnv(self.name))
    }

    /// Runs `n` independent random cases in parallel, merged in order.
    fn random<F>(&self, n: usize, f: F) -> Result<Tally>
    where
        F: Fn(&mut ChaCha8Rng, &mut Tally) -> Result<()> + Sync,
    {
        let base = self.cfg.seed ^ fnv(self.name);
        let parts: Vec<Result<Tally>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(base);
                rng.set_stream(i as u64);
                let mut t = Tally::default();
                f(&mut rng, &mut t).map(|_| t)
            })
            .collect();
        parts.into_iter().try_fold(Tally::default(), |acc, t| Ok(acc.merge(t?)))
    }
}

type CheckFn = fn(&Ctx) -> Result<Tally>;

/// Name, description and body of every check, in run order.
const CHECKS: &[(&str, &str, CheckFn)] = &[
    ("character-hom", "b(x+y) = b(x) b(y)", character_hom),
    ("linear-invariance", "characters and reports under invertible affine maps", linear_invariance),
    ("cosets", "cosets partition G into pieces of size |H|", coset_partition),
    ("double-annihilator", "annihilator of the annihilator is H, |G| <= 16", double_annihilator),
    ("svd-determinant", "product of singular values equals |det|, n <= 16", svd_determinant),
    ("svd-invariance", "singular values under permutations and diagonal unitaries", svd_invariance),
    ("kron-spectrum", "singular values of a Kronecker product are pairwise products", kron_spectrum),
    ("duality", "report(E, B) = report(B, E)", duality),
    ("translation", "report(E + x, B + y) = report(E, B)", translation),
    ("trace-identity", "sum of squared singular values is n^2", trace_identity),
    ("pair-inequalities", "relations between L, U, rho and D on random pairs", inequalities),
    ("spectral-cluster", "spectral conditions hold or fail together", spectral_cluster),
    ("equidistribution", "basis partners of E1 x K are equidistributed over the dual of K", equidistribution),
    ("counting-constraint", "surplus of B per class of the dual of H is at most |E \\ H|", counting_constraint),
    ("normalization-pruning", "fixing 0 in B does not change set quantities, |G| <= 9", normalization_pruning),
    ("search-determinism", "exhaustive search is independent of thread count", search_determinism),
    ("set-bounds", "group-independent set bounds for 2 <= |E| <= 3", set_bounds),
    ("spectral-witness", "rho(E) = 1 iff a spectral witness exists iff D(E) = n^(n/2)", spectral_witness),
    ("cyclotomic", "D_E(B) >= n^(n(1 - phi(M))/2) on basis pairs", cyclotomic),
    ("loop-around", "some k coprime to M gives D_E(kB) >= 1", loop_around_check),
    ("loop-product", "product of D_E(kB) over k is a positive integer", loop_product),
    ("multiplicativity", "normalized quantities multiply on product pairs", multiplicativity),
    ("product-set", "set quantities of a product are at most the products", product_set),
    ("decomposition", "multi-tile decomposition and the T1 T2 factorization", decomposition),
    ("dimexpand", "Q(E1 x K) = Q(E1)", dimexpand),
    ("tile-spectral", "tiles by a subgroup are spectral, |G| <= 16", tile_spectral),
    ("tiling-analysis", "E = G multi-tiles by every H at level |H|", tiling_analysis),
    ("cond-to-infty", "rho(E) >= (m+1)/2 for (Z_m x {0}) u {(0,1)}, m <= 4", cond_to_infty),
    ("size-two", "rho({0,1}; Z_p) decreases, witnessed by {0,(p-1)/2}", size_two),
    ("non-convergence", "{0,m/3} and {0,1,3} stay away from spectral", non_convergence),
    ("nosimulbasis", "the Z2^2 triple has no simultaneous basis", nosimulbasis),
    ("vandermonde", "{0,...,k-1} is a basis partner of every k-subset of Z_m, m <= 8", vandermonde),
    ("bad-simul-basis", "product-form spectra of the unbounded-k family are no better than ({0,1},{0,1})", bad_simul_basis),
    ("main-bound", "main-theorem bounds on level-2 multi-tiles", main_bound),
    ("weighted-z2", "weighted Riesz ratio on Z2 against its closed form", weighted_z2),
    ("table", "exhaustive values for {0,1} in Z3 and {0,1}^2 in Z3^2", table),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

/// Name and description of every check.
pub fn check_list() -> Vec<(&'static str, &'static str)> {
    CHECKS.iter().map(|c| (c.0, c.1)).collect()
}

/// Runs the suite. Unknown names in `only` are reported as errors.
pub fn run_suite(cfg: &VerifyConfig) -> Result<SuiteReport> {
    for name in &cfg.only {
        if !CHECKS.iter().any(|c| c.0 == name) {
            return Err(crate::Error::Precondition(format!(
                "unknown check `{name}`; known: {}",
                check_names().join(", ")
            )));
        }
    }
    let selected: Vec<_> = CHECKS.iter().filter(|c| cfg.only.is_empty() || cfg.only.iter().any(|o| o == c.0)).collect();
    cfg.search.install(|| {
        let mut checks = Vec::new();
        for &&(name, about, body) in &selected {
            let tally = body(&Ctx { cfg, name }).unwrap_or_else(|e| {
                let mut t = Tally::default();
                t.fail(|| format!("error: {e}"));
                t.cases = 1;
                t
            });
            checks.push(CheckReport {
                name,
                about,
                cases: tally.cases,
                failures: tally.failures,
                worst_slack: tally.worst,
                first_failure: tally.first_failure,
            });
        }
        let failures = checks.iter().map(|c| c.failures).sum();
        Ok(SuiteReport { seed: cfg.seed, cases: cfg.cases, checks_run: checks.len(), failures, checks })
    })
}

const GROUPS: &[&str] = &[
    "Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "Z9", "Z10", "Z12", "Z16", "Z24", "Z2^2", "Z2xZ4", "Z2^3", "Z3^2",
    "Z2xZ6", "Z2^2xZ3", "Z4^2", "Z2^4", "Z2xZ8", "Z3xZ6", "Z2xZ10", "Z2^2xZ5", "Z2xZ12", "Z2^3xZ3", "Z4xZ6",
];

fn groups_up_to(order: u64) -> Vec<GroupSpec> {
    GROUPS.iter().map(|g| GroupSpec::parse(g).expect("valid group")).filter(|g| g.order() <= order).collect()
}

fn random_group(rng: &mut ChaCha8Rng) -> GroupSpec {
    GroupSpec::parse(GROUPS[rng.gen_range(0..GROUPS.len())]).expect("valid group")
}

fn random_element(group: &GroupSpec, rng: &mut ChaCha8Rng) -> Element {
    group.element_at(rng.gen_range(0..group.order() as usize))
}

fn random_subset(group: &GroupSpec, n: usize, rng: &mut ChaCha8Rng) -> Vec<Element> {
    let mut s: Vec<Element> = sample(rng, group.order() as usize, n).into_iter().map(|i| group.element_at(i)).collect();
    s.sort();
    s
}

fn random_pair(rng: &mut ChaCha8Rng, max_n: usize) -> Result<SubsetPair> {
    let group = random_group(rng);
    let n = rng.gen_range(1..=max_n.min(group.order() as usize));
    let e = random_subset(&group, n, rng);
    let b = random_subset(&group, n, rng);
    SubsetPair::new(&group, e, b)
}

/// All `k`-subsets of `G`, lexicographic.
fn subsets(group: &GroupSpec, k: usize) -> Vec<Vec<Element>> {
    let m = group.order() as usize;
    if k > m {
        return Vec::new();
    }
    let mut comb = unrank_combination(m, k, 0);
    let mut out = Vec::new();
    loop {
        out.push(comb.iter().map(|&i| group.element_at(i)).collect());
        if !next_combination(&mut comb, m) {
            return out;
        }
    }
}

fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .expect("finite entries")
}

fn describe(pair: &SubsetPair) -> String {
    format!(
        "G={} E={} B={}",
        pair.group(),
        crate::group::format_subset(pair.e()),
        crate::group::format_subset(pair.b())
    )
}

fn compare_reports(t: &mut Tally, a: &TightnessReport, b: &TightnessReport, tol: f64, what: impl Fn() -> String) {
    let scale = b.sigmas.max().max(1.0);
    let sigma_dev = a
        .sigmas
        .values()
        .iter()
        .zip(b.sigmas.values())
        .map(|(x, y)| (x - y).abs() / scale)
        .fold(0.0, f64::max);
    let mut slack = tol - sigma_dev;
    for q in Quantity::ALL {
        slack = slack.min(close(a.raw(q), b.raw(q), tol)).min(close(a.normalized.get(q), b.normalized.get(q), tol));
    }
    if a.is_basis != b.is_basis || a.is_spectral != b.is_spectral || a.n != b.n {
        slack = f64::NEG_INFINITY;
    }
    t.slack(slack, what);
}

fn character_hom(ctx: &Ctx) -> Result<Tally> {
    let tol = ctx.tol(1e-12);
    ctx.random(ctx.cfg.cases, |rng, t| {
        let g = random_group(rng);
        let (b, x, y) = (random_element(&g, rng), random_element(&g, rng), random_element(&g, rng));
        let lhs = g.character(&b, &g.add(&x, &y))?;
        let rhs = g.character(&b, &x)? * g.character(&b, &y)?;
        t.slack(tol - (lhs - rhs).norm(), || format!("G={g} b={b} x={x} y={y}"));
        Ok(())
    })
}

/// A random well-defined endomorphism, retried until invertible.
fn random_automorphism(g: &GroupSpec, rng: &mut ChaCha8Rng) -> Result<ZLinearMap> {
    let mods = g.moduli();
    for _ in 0..200 {
        let matrix: Vec<Vec<i64>> = mods
            .iter()
            .map(|&mi| {
                mods.iter()
                    .map(|&nj| {
                        let step = mi / gcd(mi, nj);
                        (rng.gen_range(0..mi) * step % mi) as i64
                    })
                    .collect()
            })
            .collect();
        let map = ZLinearMap::new(g.clone(), g.clone(), matrix)?;
        if map.is_invertible() {
            return Ok(map);
        }
    }
    Ok(ZLinearMap::identity(g))
}

fn linear_invariance(ctx: &Ctx) -> Result<Tally> {
    let tol = ctx.tol(1e-10);
    ctx.random(ctx.cfg.cases, |rng, t| {
        let pair = random_pair(rng, 8)?;
        let g = pair.group().clone();
        let map = random_automorphism(&g, rng)?;
        let shift = random_element(&g, rng);
        let inv = map.inverse()?;
        let phases_ok = pair
            .e()
            .iter()
            .all(|x| pair.b().iter().all(|b| g.phase(&inv.transpose_apply(b), &map.apply(x)) == g.phase(b, x)));
        t.check(phases_ok, || format!("phase identity fails: {}", describe(&pair)));
        let (e2, b2) = affine_transform_pair(&g, pair.e(), pair.b(), &map, &shift)?;
        let moved = tightness_report(&SubsetPair::new(&g, e2, b2)?);
        compare_reports(t, &moved, &tightness_report(&pair), tol, || describe(&pair));
        Ok(())
    })
}

fn coset_partition(_: &Ctx) -> Result<Tally> {
    let mut t = Tally::default();
    for g in groups_up_to(24) {
        for h in enumerate_subgroups(&g, 1024)? {
            let cs = cosets(&g, &h);
            let mut all: Vec<Element> = cs.iter().flat_map(|c| c.elements.iter().cloned()).collect();
            let sizes_ok = cs.iter().all(|c| c.elements.len() as u64 == h.order());
            all.sort();
            let partition_ok = all == g.elements();
            t.check(sizes_ok && partition_ok, || format!("G={g} H={}", crate::group::format_subset(h.elements())));
        }
    }
    Ok(t)
}

fn double_annihilator(_: &Ctx) -> Result<Tally> {
    let mut t = Tally::default();
    for g in groups_up_to(16) {
        for h in enumerate_subgroups(&g, 1024)? {
            let back = annihilator(&g, &annihilator(&g, &h));
            t.check(back == h, || format!("G={g} H={}", crate::group::format_subset(h.elements())));
        }
    }
    Ok(t)
}

fn svd_determinant(ctx: &Ctx) -> Result<Tally> {
    let tol = ctx.tol(1e-9);
    ctx.random(ctx.cfg.cases, |rng, t| {
        let n = rng.gen_range(1..=16);
        let m = random_matrix(n, rng);
        let p = singular_values(&m)?.product();
        let d = abs_determinant(&m)?;
        t.slack(tol - (p - d).abs() / d.max(f64::MIN_POSITIVE), || format!("n={n}: {p} vs {d}"));
        Ok(())
    })
}

fn svd_invariance(ctx: &Ctx) -> Result<Tally> {
    let tol = ctx.tol(1e-10);
    ctx.random(ctx.cfg.cases, |rng, t| {
        let n = rng.gen_range(1..=10);
        let m = random_matrix(n, rng);
        let mut rows: Vec<usize> = (0..n).collect();
        let mut cols: Vec<usize> = (0..n).collect();
        rows.shuffle(rng);
        cols.shuffle(rng);
        let mut phase = |_| Complex64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI));
        let left: Vec<Complex64> = (0..n).map(&mut phase).collect();
        let right: Vec<Complex64> = (0..n).map(&mut phase).collect();
        let moved = m.permuted(&rows, &cols).diag_scaled(&left, &right)?;
        let a = singular_values(&m)?;
        let b = singular_values(&moved)?;
        let dev = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / a.max();
        t.slack(tol - dev, || format!("n={n}"));
        Ok(())
    })
}

fn kron_spectrum(ctx: &Ctx) -> Result<Tally> {
    let tol = ctx.tol(1e-10);
    ctx.random(ctx.cfg.cases, |rng, t| {
        let (p, q) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let (a, b) = (random_matrix(p, rng), random_matrix(q, rng));
        let (sa, sb) = (singular_values(&a)?, singular_values(&b)?);
        let mut expected: Vec<f64> = sa.values().iter().flat_map(|x| sb.values().iter().map(move |y| x * y)).collect();
        expected.sort_by(f64::total_cmp);
        let got = singular_values(&kron(&a, &b)?)?;
        let scale = got.max();
        let dev = got.values().iter().zip(&expected).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale;
        t.slack(tol - dev, || format!("{p}x{p} kron {q}x{q}"));
        Ok(())
    })
}

fn duality(ctx: &Ctx) -> Result<Tally> {
    let tol = ctx.tol(1e-10);
    ctx.random(ctx.cfg.cases, |rng, t| {
        let pair = random_pair(rng, 8)?;
        compare_reports(t, &tightness_report(&pair.swapped()), &tightness_report(&pair), tol, || describe(&pair));
        Ok(())
    })
}

fn translation(ctx: &Ctx) -> Result<Tally> {
    let tol = ctx.tol(1e-10);
    ctx.random(ctx.cfg.cases, |rng, t| {
        let pair = random_pair(rng, 8)?;
        let g = pair.group();
        let (x, y) = (random_element(g, rng), random_element(g, rng));
        let e: Vec<Element> = pair.e().iter().map(|a| g.add(a, &x)).collect();
        let b: Vec<Element> = pair.b().iter().map(|a| g.add(a, &y)).collect();
        let moved = tightness_report(&SubsetPair::new(g, normalize_subset(e)?, normalize_subset(b)?)?);
        compare_reports(t, &moved, &tightness_report(&pair), tol, || describe(&pair));
        Ok(())
    })
}

fn trace_identity(ctx: &Ctx) -> Result<Tally> {
    let tol = ctx.tol(1e-9);
    ctx.random(ctx.cfg.cases, |rng, t| {
        let pair = random_pair(rng, 12)?;
        let r = tightness_report(&pair);
        let n2 = (r.n * r.n) as f64;
        t.slack(tol - (r.sigmas.sum_of_squares() - n2).abs() / n2, || describe(&pair));
        Ok(())
    })
}

fn inequalities(ctx: &Ctx) -> Result<Tally> {
    ctx.random(ctx.cfg.cases, |rng, t| {
        let pair = random_pair(rng, 8)?;
        for c in pair_inequalities(&pair) {
            t.check(c.holds, || format!("{}: {}", c.name, describe(&pair)));
        }
        Ok(())
    })
}

fn spectral_cluster(ctx: &Ctx) -> Result<Tally> {
    let eps = ctx.tol(1e-8);
    ctx.random(ctx.cfg.cases, |rng, t| {
        let pair = if rng.gen_bool(0.5) {
            random_pair(rng, 8)?
        } else {
            // a subgroup against characters that differ on it is spectral
            let g = random_group(rng);
            let subs = enumerate_subgroups(&g, 1024)?;
            let h = &subs[rng.gen_range(0..subs.len())];
            let (x, y) = (random_element(&g, rng), random_element(&g, rng));
            let e: Vec<Element> = h.elements().iter().map(|a| g.add(a, &x)).collect();
            let b: Vec<Element> = subgroup_dual(&g, h).iter().map(|a| g.add(a, &y)).collect();
            SubsetPair::new(&g, normalize_subset(e)?, normalize_subset(b)?)?
        };
        let r = tightness_report(&pair);
        let n = r.n as f64;
        let full = n.powf(n / 2.0);
        let mut flags = vec![
            r.rho <= 1.0 + eps,
            (r.l - n).abs() <= eps * n,
            (r.u - n).abs() <= eps * n,
            (r.d - full).abs() <= eps * full,
            r.is_spectral,
        ];
        if r.n >= 2 {
            flags.push(ortho_measure(&pair)? <= eps.sqrt());
        }
        t.check(flags.iter().all(|&f| f == flags[0]), || format!("{flags:?}: {}", describe(&pair)));
        Ok(())
    })
}

/// `(H, K)` with `|H ⊕ K| ≤ 12`.
fn direct_sums() -> Vec<(GroupSpec, GroupSpec)> {
    [("Z2", "Z2"), ("Z2", "Z3"), ("Z3", "Z2"), ("Z2", "Z4"), ("Z4", "Z2"), ("Z3", "Z3"), ("Z2^2", "Z2"), ("Z2^2", "Z3"), ("Z3", "Z4"), ("Z2", "Z6")]
        .iter()
        .map(|(h, k)| (GroupSpec::parse(h).unwrap(), GroupSpec::parse(k).unwrap()))
        .collect()
}

fn equidistribution(ctx: &Ctx) -> Result<Tally> {
    let mut t = Tally::default();
    for (h, k) in direct_sums() {
        let g = h.product(&k);
        let rh = h.rank();
        for size in 1..=h.order() as usize {
            for e1 in subsets(&h, size) {
                let e = crate::tiling::cartesian(&e1, &k.elements());
                for b in basis_partners(&g, &e, ctx.search().cap)? {
                    let mut counts: BTreeMap<&[u64], usize> = BTreeMap::new();
                    for y in &b {
                        *counts.entry(&y.coords()[rh..]).or_default() += 1;
                    }
                    let ok = counts.len() as u64 == k.order() && counts.values().all(|&c| c == e1.len());
                    t.check(ok, || {
                        format!("G={g} E1={} B={}", crate::group::format_subset(&e1), crate::group::format_subset(&b))
                    });
                }
            }
        }
    }
    Ok(t)
}

fn counting_constraint(ctx: &Ctx) -> Result<Tally> {
    let mut t = Tally::default();
    for (h, k) in direct_sums() {
        let g = h.product(&k);
        let rh = h.rank();
        for size in 2..=3 {
            for e in subsets(&g, size) {
                let outside = e.iter().filter(|x| x.coords()[rh..].iter().any(|&c| c != 0)).count();
                for b in basis_partners(&g, &e, ctx.search().cap)? {
                    // b ~ b' when they agree on H, i.e. share their H coordinates
                    let mut counts: BTreeMap<&[u64], usize> = BTreeMap::new();
                    for y in &b {
                        *counts.entry(&y.coords()[..rh]).or_default() += 1;
                    }
                    let surplus: usize = counts.values().map(|c| c - 1).sum();
                    t.slack(outside as f64 - surplus as f64, || {
                        format!("G={g} E={} B={}", crate::group::format_subset(&e), crate::group::format_subset(&b))
                    });
                }
            }
        }
    }
    Ok(t)
}

fn normalization_pruning(ctx: &Ctx) -> Result<Tally> {
    let tol = ctx.tol(1e-9);
    let mut t = Tally::default();
    let unpruned = SearchConfig { normalize_zero: false, ..ctx.search().clone() };
    for g in groups_up_to(9) {
        for size in 1..=3 {
            for e in subsets(&g, size) {
                let a = exhaustive_quantities(&g, &e, ctx.search())?;
                let b = exhaustive_quantities(&g, &e, &unpruned)?;
                for (x, y) in a.iter().zip(&b) {
                    t.slack(close(x.value, y.value, tol), || format!("G={g} E={} {:?}", crate::group::format_subset(&e), x.quantity));
                }
            }
        }
    }
    Ok(t)
}

fn search_determinism(ctx: &Ctx) -> Result<Tally> {
    let mut t = Tally::default();
    let cases: Vec<(GroupSpec, Vec<Element>)> = vec![
        families::cond_to_infty(4).map(|i| (i.group, i.e))?,
        families::two_cross_sections(3).map(|i| (i.group, i.e))?,
        (GroupSpec::parse("Z2^2xZ5")?, GroupSpec::parse("Z2^2xZ5").and_then(|g| crate::group::parse_subset(&g, "(0,0,0),(0,1,1),(1,0,2),(1,1,3),(0,0,4)"))?),
    ];
    for (g, e) in cases {
        let runs: Vec<_> = [1usize, 2, 4]
            .iter()
            .map(|&threads| {
                let cfg = SearchConfig { threads: Some(threads), ..ctx.search().clone() };
                cfg.install(|| exhaustive_quantities(&g, &e, &cfg))
            })
            .collect::<Result<_>>()?;
        t.check(runs.windows(2).all(|w| w[0] == w[1]), || format!("G={g}"));
    }
    Ok(t)
}

fn set_bounds(ctx: &Ctx) -> Result<Tally> {
    let mut t = Tally::default();
    for gs in ["Z6", "Z2^3", "Z3^2"] {
        let g = GroupSpec::parse(gs)?;
        for size in 2..=3 {
            let bounds = SetBounds::for_size(size);
            for e in subsets(&g, size) {
                let q = exhaustive_quantities(&g, &e, ctx.search())?;
                let what = || format!("G={g} E={}", crate::group::format_subset(&e));
                t.slack(above(q[0].value, bounds.l_lower), what);
                t.slack(below(q[1].value, bounds.u_upper), what);
                t.slack(below(q[2].value, bounds.rho_upper), what);
                t.slack(above(q[3].value, bounds.d_lower) + 1e-9, what);
            }
        }
    }
    Ok(t)
}

fn spectral_witness(ctx: &Ctx) -> Result<Tally> {
    let eps = ctx.tol(1e-8);
    let mut t = Tally::default();
    for g in groups_up_to(8) {
        for size in 1..=4usize.min(g.order() as usize) {
            for e in subsets(&g, size) {
                let q = exhaustive_quantities(&g, &e, ctx.search())?;
                let n = size as f64;
                let rho_one = q[2].value <= 1.0 + eps;
                let witness = tightness_report(&SubsetPair::new(&g, e.clone(), q[2].witness.clone())?).is_spectral;
                let full = n.powf(n / 2.0);
                let d_full = (q[3].value - full).abs() <= eps * full;
                t.check(rho_one == witness && witness == d_full, || {
                    format!("G={g} E={}: {rho_one} {witness} {d_full}", crate::group::format_subset(&e))
                });
            }
        }
    }
    Ok(t)
}

fn cyclotomic(ctx: &Ctx) -> Result<Tally> {
    let mut t = Tally::default();
    for gs in ["Z4", "Z6", "Z8", "Z2^2", "Z3^2"] {
        let g = GroupSpec::parse(gs)?;
        let phi = totient(g.exponent()) as f64;
        for size in 2..=3 {
            let n = size as f64;
            let bound = n.powf(n * (1.0 - phi) / 2.0);
            for e in subsets(&g, size) {
                for b in basis_partners(&g, &e, ctx.search().cap)? {
                    let d = tightness_report(&SubsetPair::new(&g, e.clone(), b.clone())?).d;
                    t.slack(d - bound + 1e-9, || {
                        format!("G={g} E={} B={}", crate::group::format_subset(&e), crate::group::format_subset(&b))
                    });
                }
            }
        }
    }
    Ok(t)
}

fn loop_around_check(ctx: &Ctx) -> Result<Tally> {
    ctx.random(ctx.cfg.cases, |rng, t| {
        let g = GroupSpec::parse(if rng.gen_bool(0.5) { "Z8" } else { "Z12" })?;
        let n = rng.gen_range(2..=4);
        let e = random_subset(&g, n, rng);
        let (b, _) = random_basis(&g, &e, rng, ctx.search().budget)?;
        let looped = loop_around(&g, &e, &b)?;
        t.slack(looped.best_d - 1.0 + 1e-9, || {
            format!("G={g} E={} B={}", crate::group::format_subset(&e), crate::group::format_subset(&b))
        });
        t.check(looped.first_k_at_least_one.is_some(), || format!("G={g} E={}", crate::group::format_subset(&e)));
        Ok(())
    })
}

fn loop_product(ctx: &Ctx) -> Result<Tally> {
    const SMALL_EXPONENT: &[&str] =
        &["Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "Z9", "Z10", "Z12", "Z2^2", "Z2xZ4", "Z2xZ6", "Z3^2", "Z2^3", "Z4^2", "Z2^2xZ3"];
    let tol = ctx.tol(1e-6);
    ctx.random(ctx.cfg.cases, |rng, t| {
        let g = GroupSpec::parse(SMALL_EXPONENT[rng.gen_range(0..SMALL_EXPONENT.len())])?;
        let n = rng.gen_range(1..=3usize.min(g.order() as usize));
        let e = random_subset(&g, n, rng);
        let (b, _) = random_basis(&g, &e, rng, ctx.search().budget)?;
        let p = loop_product_check(&g, &e, &b, 12)?;
        let what = || format!("G={g} E={} B={}: {}", crate::group::format_subset(&e), crate::group::format_subset(&b), p.product);
        t.slack(tol - p.deviation, what);
        t.check(p.nearest_integer >= 1, what);
        Ok(())
    })
}

fn multiplicativity(ctx: &Ctx) -> Result<Tally> {
    let tol = ctx.tol(1e-9);
    let (h, k) = (GroupSpec::parse("Z3")?, GroupSpec::parse("Z4")?);
    ctx.random(ctx.cfg.cases, |rng, t| {
        let (n1, n2) = (rng.gen_range(1..=3), rng.gen_range(1..=4));
        let (e1, b1) = (random_subset(&h, n1, rng), random_subset(&h, n1, rng));
        let (e2, b2) = (random_subset(&k, n2, rng), random_subset(&k, n2, rng));
        let r = product_pair_verify(&h, &e1, &b1, &k, &e2, &b2)?;
        let what = || format!("E={} B={}", crate::group::format_subset(&r.e), crate::group::format_subset(&r.b));
        t.slack(tol - r.max_deviation, what);
        t.slack(tol - r.kron_residual, what);
        Ok(())
    })
}

fn product_set(ctx: &Ctx) -> Result<Tally> {
    let mut t = Tally::default();
    let cases = [("Z3", "0,1", "Z3", "0,1"), ("Z2", "0", "Z3", "0,1"), ("Z4", "0,1", "Z3", "0,1"), ("Z5", "0,1", "Z2", "0,1")];
    for (h, e1, k, e2) in cases {
        let (h, k) = (GroupSpec::parse(h)?, GroupSpec::parse(k)?);
        let (e1, e2) = (crate::group::parse_subset(&h, e1)?, crate::group::parse_subset(&k, e2)?);
        for c in product_set_verify(&h, &e1, &k, &e2, ctx.search())? {
            t.slack(below(c.left, c.right) + 1e-9, || format!("{h} x {k} {:?}", c.quantity));
        }
    }
    Ok(t)
}

const DECOMPOSITION_GROUPS: &[&str] = &["Z2xZ6", "Z3xZ6", "Z4^2", "Z2^2xZ3", "Z6^2", "Z3^2", "Z2xZ4", "Z2^3xZ3", "Z3xZ9", "Z12", "Z2^2xZ4"];

fn decomposition(ctx: &Ctx) -> Result<Tally> {
    let tol = ctx.tol(1e-9);
    ctx.random((ctx.cfg.cases / 10).max(20), |rng, t| {
        let g = GroupSpec::parse(DECOMPOSITION_GROUPS[rng.gen_range(0..DECOMPOSITION_GROUPS.len())])?;
        let subs: Vec<_> = enumerate_subgroups(&g, 1024)?.into_iter().filter(|h| h.order() >= 2).collect();
        let h = subs[rng.gen_range(0..subs.len())].clone();
        let level = rng.gen_range(1..=3usize.min(h.order() as usize));
        let mut e = Vec::new();
        for c in cosets(&g, &h) {
            e.extend(sample(rng, c.elements.len(), level).into_iter().map(|i| c.elements[i].clone()));
        }
        let e = normalize_subset(e)?;
        let dual = subgroup_dual(&g, &h);
        let b_h: Vec<Element> = sample(rng, dual.len(), level).into_iter().map(|i| dual[i].clone()).collect();
        let r = decompose_verify(&g, &e, &h, &b_h)?;
        let what = || format!("G={g} H={} E={}", crate::group::format_subset(h.elements()), crate::group::format_subset(&e));
        t.slack(tol - r.max_deviation, what);
        t.slack(tol - r.factorization.product_residual, what);
        t.slack(tol - r.factorization.unitarity_residual, what);
        Ok(())
    })
}

fn dimexpand(ctx: &Ctx) -> Result<Tally> {
    let mut t = Tally::default();
    let z2 = GroupSpec::parse("Z2")?;
    for hs in ["Z3", "Z4"] {
        let h = GroupSpec::parse(hs)?;
        for e1 in subsets(&h, 2) {
            for c in dimexpand_verify(&h, &e1, &z2, ctx.search())? {
                t.slack(close(c.right, c.left, ctx.tol(1e-8)), || {
                    format!("{h} E1={} {:?}", crate::group::format_subset(&e1), c.quantity)
                });
            }
        }
    }
    Ok(t)
}

fn tile_spectral(ctx: &Ctx) -> Result<Tally> {
    let mut t = Tally::default();
    let mut rng = ctx.rng();
    for g in groups_up_to(16) {
        for h in enumerate_subgroups(&g, 1024)? {
            let reps: Vec<Element> =
                cosets(&g, &h).iter().map(|c| c.elements[rng.gen_range(0..c.elements.len())].clone()).collect();
            let reps = normalize_subset(reps)?;
            let b = tile_spectrum(&g, &reps, &h)?;
            let r = tightness_report(&SubsetPair::new(&g, reps.clone(), b)?);
            t.check(r.is_spectral, || format!("G={g} E={}", crate::group::format_subset(&reps)));
        }
    }
    Ok(t)
}

fn tiling_analysis(_: &Ctx) -> Result<Tally> {
    let mut t = Tally::default();
    for g in groups_up_to(16) {
        let found = find_multi_tiling_subgroups(&g, &g.elements(), 1024)?;
        let all = enumerate_subgroups(&g, 1024)?;
        t.check(found.len() == all.len(), || format!("G={g}: {} of {}", found.len(), all.len()));
        for f in &found {
            t.check(f.level as u64 == f.subgroup.order() && f.k == 1, || format!("G={g}"));
        }
    }
    Ok(t)
}

fn cond_to_infty(ctx: &Ctx) -> Result<Tally> {
    let mut t = Tally::default();
    for m in 2..=4u64 {
        let inst = families::cond_to_infty(m)?;
        let rho = exhaustive_quantities(&inst.group, &inst.e, ctx.search())?[2].value;
        t.slack(above(rho, (m as f64 + 1.0) / 2.0), || format!("m={m}: rho={rho}"));
    }
    Ok(t)
}

fn size_two(ctx: &Ctx) -> Result<Tally> {
    let mut t = Tally::default();
    let mut prev = f64::INFINITY;
    for p in [3u64, 5, 7, 11, 13] {
        let inst = families::size_two(p)?;
        let rho = exhaustive_quantities(&inst.group, &inst.e, ctx.search())?[2].value;
        let b = vec![Element::new(vec![0]), Element::new(vec![(p - 1) / 2])];
        let at_witness = tightness_report(&SubsetPair::new(&inst.group, inst.e.clone(), b)?).rho;
        t.slack(close(at_witness, rho, ctx.tol(1e-9)), || format!("p={p}: {at_witness} vs {rho}"));
        t.slack(below(rho, prev), || format!("p={p}: {rho} after {prev}"));
        t.check(rho > 1.0, || format!("p={p}"));
        prev = rho;
    }
    Ok(t)
}

fn non_convergence(ctx: &Ctx) -> Result<Tally> {
    let mut t = Tally::default();
    let mut insts = Vec::new();
    for m in [3, 6, 9] {
        insts.push(families::zm_size_two(m)?);
    }
    for p in [5, 7, 11] {
        insts.push(families::zp_size_three(p)?);
    }
    for inst in insts {
        let rho = exhaustive_quantities(&inst.group, &inst.e, ctx.search())?[2].value;
        t.slack(above(rho, 1.05), || format!("G={} rho={rho}", inst.group));
    }
    Ok(t)
}

fn nosimulbasis(ctx: &Ctx) -> Result<Tally> {
    let mut t = Tally::default();
    let (g, sets) = families::nosimulbasis_triple();
    let found = simultaneous_basis(&g, &sets, Strategy::Exhaustive, ctx.search())?;
    t.check(found.is_none(), || format!("found {found:?}"));
    // any two of the three do have one
    for skip in 0..3 {
        let two: Vec<_> = sets.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, s)| s.clone()).collect();
        t.check(simultaneous_basis(&g, &two, Strategy::Exhaustive, ctx.search())?.is_some(), || format!("pair without {skip}"));
    }
    for p in [3, 5] {
        let inst = families::cross_sect_no_simul_basis(p)?;
        let c = main_bound_certify(&inst.group, &inst.e, inst.subgroup.as_ref().expect("subgroup"), ctx.search())?;
        t.check(c.simultaneous_basis.is_none() && c.k == 3, || format!("p={p}"));
    }
    Ok(t)
}

fn vandermonde(_: &Ctx) -> Result<Tally> {
    let mut t = Tally::default();
    for m in 1..=8u64 {
        let g = GroupSpec::cyclic(m)?;
        for k in 1..=m {
            let b = vandermonde_spectrum(m, k)?;
            for e in subsets(&g, k as usize) {
                let r = tightness_report(&SubsetPair::new(&g, e.clone(), b.clone())?);
                t.check(r.is_basis, || format!("m={m} E={}", crate::group::format_subset(&e)));
            }
        }
    }
    Ok(t)
}

fn bad_simul_basis(ctx: &Ctx) -> Result<Tally> {
    let mut t = Tally::default();
    for p in [3u64, 5] {
        let inst = families::cross_sect_bad_simul_basis(p)?;
        let h = inst.subgroup.as_ref().expect("subgroup");
        let zp = GroupSpec::cyclic(p)?;
        let pair01 = SubsetPair::new(&zp, vec![Element::new(vec![0]), Element::new(vec![1])], vec![Element::new(vec![0]), Element::new(vec![1])])?;
        let floor = tightness_report(&pair01).rho;
        let dual = subgroup_dual(&inst.group, h);
        for i in 0..dual.len() {
            for j in i + 1..dual.len() {
                let b = lift_spectrum(&inst.group, h, &[dual[i].clone(), dual[j].clone()])?;
                let rho = tightness_report(&SubsetPair::new(&inst.group, inst.e.clone(), b)?).rho;
                t.slack(above(rho, floor) + ctx.tol(1e-9), || format!("p={p} B_H={{{},{}}}: {rho} < {floor}", dual[i], dual[j]));
            }
        }
    }
    Ok(t)
}

fn main_bound(ctx: &Ctx) -> Result<Tally> {
    let mut t = Tally::default();
    let insts = vec![
        ("twoCrossSects m=3", families::two_cross_sections(3)?),
        ("twoCrossSects m=5", families::two_cross_sections(5)?),
        ("nearly spectral p=3", families::multi_tile_nearly_spec(3)?),
        ("nearly spectral p=5", families::multi_tile_nearly_spec(5)?),
        ("product p=3", families::cart_close_spec(3)?),
        ("unbounded k p=5", families::cross_sect_bad_simul_basis(5)?),
        ("unbounded k p=7", families::cross_sect_bad_simul_basis(7)?),
    ];
    for (label, inst) in insts {
        let h = inst.subgroup.as_ref().expect("subgroup");
        let c = main_bound_certify(&inst.group, &inst.e, h, ctx.search())?;
        t.check(c.pair.is_some(), || format!("{label}: no pair"));
        for check in &c.checks {
            t.slack(below(check.achieved, check.bound), || format!("{label}: {:?}", check.quantity));
        }
        if label.starts_with("twoCrossSects") {
            let rho = c.pair.as_ref().map_or(f64::INFINITY, |p| p.report.rho);
            t.slack(below(rho, 32.0 * EULER), || format!("{label}: rho={rho}"));
            if label.ends_with("m=3") {
                let set_rho = exhaustive_quantities(&inst.group, &inst.e, ctx.search())?[2].value;
                t.slack(below(set_rho, rho) + 1e-9, || format!("{label}: rho(E)={set_rho} > {rho}"));
            }
        }
    }
    Ok(t)
}

/// Weighted `ρ` of densities `(x, y)` on `Z2` against `(a, b)` on its dual.
pub fn weighted_rho_z2(x: f64, y: f64, a: f64, b: f64) -> Result<f64> {
    let z2 = GroupSpec::cyclic(2)?;
    let (zero, one) = (Element::new(vec![0]), Element::new(vec![1]));
    let e = WeightedSubset::new(&z2, [(zero.clone(), x), (one.clone(), y)])?;
    let bw = WeightedSubset::new(&z2, [(zero, a), (one, b)])?;
    Ok(weighted_tightness(&e, &bw)?.rho)
}

/// `(1 + √q) / (1 − √q)` with `q = 1 − (4ab/(a+b)²)(4xy/(x+y)²)`.
pub fn weighted_closed_form(x: f64, y: f64, a: f64, b: f64) -> f64 {
    let q = 1.0 - (4.0 * a * b / (a + b).powi(2)) * (4.0 * x * y / (x + y).powi(2));
    (1.0 + q.sqrt()) / (1.0 - q.sqrt())
}

fn weighted_z2(ctx: &Ctx) -> Result<Tally> {
    let tol = ctx.tol(1e-9);
    let mut t = Tally::default();
    for x in [1.0, 2.0, 4.0] {
        for y in [1.0, 2.0, 4.0] {
            let rho = weighted_rho_z2(x, y, 1.0, 1.0)?;
            t.slack(close(rho, x.max(y) / x.min(y), tol), || format!("(x,y)=({x},{y})"));
            for (a, b) in [(1.0, 3.0), (2.0, 1.0), (1.0, 4.0)] {
                let rho = weighted_rho_z2(x, y, a, b)?;
                t.slack(close(rho, weighted_closed_form(x, y, a, b), tol), || format!("(x,y,a,b)=({x},{y},{a},{b})"));
            }
        }
    }
    Ok(t)
}

fn table(ctx: &Ctx) -> Result<Tally> {
    let mut t = Tally::default();
    let z3 = GroupSpec::parse("Z3")?;
    let q = exhaustive_quantities(&z3, &crate::group::parse_subset(&z3, "0,1")?, ctx.search())?;
    let expected = [2.0, 1.5, 3.0, 2f64.sqrt() / 3f64.powf(0.25)];
    for (r, v) in q.iter().zip(expected) {
        t.slack(close(r.normalized, v, ctx.tol(1e-10)), || format!("Z3 {:?}", r.quantity));
    }
    let z33 = GroupSpec::parse("Z3^2")?;
    let e = crate::group::parse_subset(&z33, "(0,0),(0,1),(1,0),(1,1)")?;
    let q = exhaustive_quantities(&z33, &e, ctx.search())?;
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let expected = [(3.490711985, 1e-6), (1.5, 1e-9), (golden.powi(4), 1e-8), (2.0 / 3f64.sqrt(), 1e-9)];
    for (r, (v, tol)) in q.iter().zip(expected) {
        t.slack(close(r.normalized, v, ctx.tol(tol)), || format!("Z3^2 {:?}: {}", r.quantity, r.normalized));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(only: &str) -> SuiteReport {
        run_suite(&VerifyConfig { cases: 20, only: vec![only.to_string()], ..Default::default() }).unwrap()
    }

    #[test]
    fn margins() {
        assert_eq!(close(f64::INFINITY, f64::INFINITY, 1e-9), 1e-9);
        assert!(close(1.0, f64::INFINITY, 1e-9) < 0.0);
        assert!(below(1.0, 2.0) > 0.0 && below(2.0, 1.0) < 0.0);
        assert!(below(f64::INFINITY, 2.0) < 0.0);
    }

    #[test]
    fn unknown_check_is_an_error() {
        let cfg = VerifyConfig { only: vec!["nope".into()], ..Default::default() };
        assert!(run_suite(&cfg).is_err());
    }

    #[test]
    fn selected_checks_pass() {
        for name in ["character-hom", "trace-identity", "nosimulbasis", "weighted-z2", "table"] {
            let r = quick(name);
            assert_eq!(r.checks_run, 1);
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn failing_tolerance_is_reported() {
        let cfg = VerifyConfig { cases: 10, tol: Some(-1.0), only: vec!["trace-identity".into()], ..Default::default() };
        let r = run_suite(&cfg).unwrap();
        assert_eq!(r.failures, 10);
        assert!(r.checks[0].first_failure.is_some());
    }

    #[test]
    fn names_are_unique() {
        let mut names = check_names();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), CHECKS.len());
    }
}
