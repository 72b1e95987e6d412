//! Set-level quantities: optimizing the pair quantities over spectra `B`.
//!
//! Exhaustive search fixes `0 ∈ B` by default. Translating `B` by `y`
//! multiplies row `x` of `T(E, B)` by the unimodular `y(x)`, which leaves
//! every singular value unchanged, so nothing is lost.
//!
//! Candidates are ranked lexicographically and cut into fixed-size chunks.
//! Each chunk keeps its prefix-best records, and the merge picks the first
//! record (in rank order) within the tie slack of the global optimum. The
//! result therefore does not depend on how chunks are scheduled.

use std::collections::BTreeMap;
use std::f64::consts::E as EULER;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{normalize_subset, units, Element, GroupSpec};
use crate::numeric::{singular_values, ComplexMatrix};
use crate::pairs::{fourier_matrix_of, tightness_report, Quantity, SubsetPair, TightnessReport};
use crate::real;

/// Absolute slack when comparing optima.
pub const TIE_SLACK: f64 = 1e-9;
pub const DEFAULT_SEARCH_CAP: u128 = 10_000_000;
pub const DEFAULT_LOOP_PRODUCT_CAP: u64 = 60;
pub const CHUNK: u128 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Exhaustive,
    RandomLoop,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(Strategy::Exhaustive),
            "random-loop" | "random" => Ok(Strategy::RandomLoop),
            _ => Err(Error::Precondition(format!("unknown strategy `{s}`"))),
        }
    }
}

/// Optional necessary condition for basis pairs: with `ℓ` points of `E`
/// outside `H`, `B` may not put more than `ℓ` surplus elements into the
/// classes of `Ĝ / H^⊥`. Candidates failing it are singular and skipped.
#[derive(Debug, Clone)]
pub struct CosetFilter {
    pub subgroup: crate::group::Subgroup,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub cap: u128,
    pub normalize_zero: bool,
    pub coset_filter: Option<CosetFilter>,
    pub seed: u64,
    /// Random bases drawn by the random-loop strategy.
    pub samples: usize,
    /// Draws allowed while looking for one basis pair.
    pub budget: u64,
    pub threads: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            cap: DEFAULT_SEARCH_CAP,
            normalize_zero: true,
            coset_filter: None,
            seed: 0,
            samples: 64,
            budget: 100_000,
            threads: None,
        }
    }
}

impl SearchConfig {
    /// Runs `f` on a dedicated pool when a thread count is configured.
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> T {
        match self.threads {
            Some(t) => rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .expect("thread pool")
                .install(f),
            None => f(),
        }
    }
}

/// Theorem bounds valid for every set of size `n`, whatever the group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SetBounds {
    /// `L(E) > 1 / (e n^{n-1})`
    #[serde(rename = "L_lower", serialize_with = "real::serialize")]
    pub l_lower: f64,
    /// `U(E) < n² − (n−1)/4`
    #[serde(rename = "U_upper", serialize_with = "real::serialize")]
    pub u_upper: f64,
    /// `ρ(E) < 4 nⁿ`
    #[serde(rename = "rho_upper", serialize_with = "real::serialize")]
    pub rho_upper: f64,
    /// `D(E) ≥ 1`
    #[serde(rename = "D_lower", serialize_with = "real::serialize")]
    pub d_lower: f64,
}

impl SetBounds {
    pub fn for_size(n: usize) -> Self {
        let n = n as f64;
        SetBounds {
            l_lower: 1.0 / (EULER * n.powf(n - 1.0)),
            u_upper: n * n - (n - 1.0) / 4.0,
            rho_upper: 4.0 * n.powf(n),
            d_lower: 1.0,
        }
    }

    pub fn get(&self, q: Quantity) -> f64 {
        match q {
            Quantity::L => self.l_lower,
            Quantity::U => self.u_upper,
            Quantity::Rho => self.rho_upper,
            Quantity::D => self.d_lower,
        }
    }

    /// Whether a report satisfies all four (with `1e-9` slack on `D ≥ 1`).
    pub fn check(&self, r: &TightnessReport) -> BTreeMap<&'static str, bool> {
        BTreeMap::from([
            ("L_lower", r.l > self.l_lower),
            ("U_upper", r.u < self.u_upper),
            ("rho_upper", r.rho < self.rho_upper),
            ("D_lower", r.d >= self.d_lower - 1e-9),
        ])
    }
}

/// The group-independent bound on one set quantity and whether the reported
/// value obeys it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub bound: &'static str,
    #[serde(serialize_with = "real::serialize")]
    pub value: f64,
    pub holds: bool,
}

impl Certificate {
    pub fn new(q: Quantity, achieved: f64, bounds: &SetBounds) -> Self {
        let (bound, value, holds) = match q {
            Quantity::L => ("L_lower", bounds.l_lower, achieved > bounds.l_lower),
            Quantity::U => ("U_upper", bounds.u_upper, achieved < bounds.u_upper),
            Quantity::Rho => ("rho_upper", bounds.rho_upper, achieved < bounds.rho_upper),
            Quantity::D => ("D_lower", bounds.d_lower, achieved >= bounds.d_lower - 1e-9),
        };
        Certificate { bound, value, holds }
    }
}

/// Normalized form of a raw value for a set of size `n`.
pub fn normalize(q: Quantity, raw: f64, n: usize) -> f64 {
    let nf = n as f64;
    match q {
        Quantity::L => {
            if raw > 0.0 {
                nf / raw
            } else {
                f64::INFINITY
            }
        }
        Quantity::U => raw / nf,
        Quantity::Rho => raw,
        Quantity::D => {
            if raw > 0.0 {
                nf.sqrt() / raw.powf(1.0 / nf)
            } else {
                f64::INFINITY
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub quantity: Quantity,
    #[serde(serialize_with = "real::serialize")]
    pub value: f64,
    #[serde(serialize_with = "real::serialize")]
    pub normalized: f64,
    pub witness: Vec<Element>,
    pub strategy: Strategy,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub certificates: Certificate,
    pub candidates: u128,
}

pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// The `rank`-th `k`-subset of `{0..m}` in lexicographic order.
pub fn unrank_combination(m: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut c = 0usize;
    for i in 0..k {
        loop {
            let count = binomial((m - 1 - c) as u128, (k - 1 - i) as u128);
            if rank < count {
                break;
            }
            rank -= count;
            c += 1;
        }
        out.push(c);
        c += 1;
    }
    out
}

/// Advances to the next `k`-subset of `{0..m}`; false after the last.
pub fn next_combination(comb: &mut [usize], m: usize) -> bool {
    let k = comb.len();
    for i in (0..k).rev() {
        if comb[i] < m - k + i {
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Candidate spectra as index sets into the lexicographic enumeration of `Ĝ`.
#[derive(Debug, Clone, Copy)]
struct CandidateSpace {
    order: usize,
    n: usize,
    normalize_zero: bool,
}

impl CandidateSpace {
    fn count(&self) -> u128 {
        if self.normalize_zero {
            binomial(self.order as u128 - 1, self.n as u128 - 1)
        } else {
            binomial(self.order as u128, self.n as u128)
        }
    }

    fn free(&self) -> (usize, usize) {
        if self.normalize_zero {
            (self.order - 1, self.n - 1)
        } else {
            (self.order, self.n)
        }
    }

    fn assemble(&self, comb: &[usize], out: &mut Vec<usize>) {
        out.clear();
        if self.normalize_zero {
            out.push(0);
            out.extend(comb.iter().map(|c| c + 1));
        } else {
            out.extend_from_slice(comb);
        }
    }

    /// Visits ranks `[start, end)` in order.
    fn for_each(&self, start: u128, end: u128, mut f: impl FnMut(u128, &[usize])) {
        if start >= end {
            return;
        }
        let (m, k) = self.free();
        let mut comb = unrank_combination(m, k, start);
        let mut cols = Vec::with_capacity(self.n);
        let mut rank = start;
        loop {
            self.assemble(&comb, &mut cols);
            f(rank, &cols);
            rank += 1;
            if rank >= end || !next_combination(&mut comb, m) {
                break;
            }
        }
    }
}

fn check_cap(count: u128, cap: u128) -> Result<()> {
    if count > cap {
        return Err(Error::CapExceeded { what: "search space", size: count, cap });
    }
    Ok(())
}

/// Precomputed `b(x)` for every `x ∈ E` and every `b ∈ Ĝ`.
struct CharacterTable {
    n: usize,
    order: usize,
    values: Vec<num_complex::Complex64>,
}

impl CharacterTable {
    fn new(group: &GroupSpec, e: &[Element]) -> Self {
        Self::from_matrix(fourier_matrix_of(group, e, &group.elements()))
    }

    fn from_matrix(m: ComplexMatrix) -> Self {
        CharacterTable { n: m.rows(), order: m.cols(), values: m.data().to_vec() }
    }

    fn matrix(&self, cols: &[usize]) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.n, cols.len(), |i, j| self.values[i * self.order + cols[j]])
            .expect("finite")
    }
}

#[derive(Debug, Clone)]
struct Track {
    maximize: bool,
    records: Vec<(u128, f64)>,
}

fn better(maximize: bool, a: f64, b: f64) -> bool {
    if maximize {
        a > b
    } else {
        a < b
    }
}

fn within(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= TIE_SLACK
}

impl Track {
    fn new(q: Quantity) -> Self {
        Track { maximize: q.maximize(), records: Vec::new() }
    }

    fn push(&mut self, rank: u128, v: f64) {
        match self.records.last() {
            Some(&(_, best)) if !better(self.maximize, v, best) => {}
            _ => self.records.push((rank, v)),
        }
    }

    fn best(&self) -> Option<f64> {
        self.records.last().map(|r| r.1)
    }

    fn prune(&mut self) {
        if let Some(best) = self.best() {
            self.records.retain(|r| within(r.1, best));
        }
    }
}

fn merge(tracks: &[Track]) -> Option<(u128, f64)> {
    let maximize = tracks.first()?.maximize;
    let mut global: Option<f64> = None;
    for t in tracks {
        if let Some(b) = t.best() {
            if global.is_none_or(|g| better(maximize, b, g)) {
                global = Some(b);
            }
        }
    }
    let g = global?;
    tracks.iter().flat_map(|t| t.records.iter()).find(|r| within(r.1, g)).copied()
}

fn passes_filter(group: &GroupSpec, e: &[Element], duals: &[Element], cols: &[usize], filter: &CosetFilter) -> bool {
    let h = &filter.subgroup;
    let outside = e.iter().filter(|x| !h.contains(x)).count();
    // b1 ~ b2 iff they agree on H, i.e. b1 - b2 kills every generator of H.
    let mut classes: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
    for &c in cols {
        let key: Vec<u64> = h.generators().iter().map(|g| group.phase(&duals[c], g)).collect();
        *classes.entry(key).or_default() += 1;
    }
    classes.values().map(|c| c - 1).sum::<usize>() <= outside
}

fn validate_set(group: &GroupSpec, e: &[Element]) -> Result<Vec<Element>> {
    if e.is_empty() {
        return Err(Error::InvalidSubset("E is empty".into()));
    }
    for x in e {
        group.check(x)?;
    }
    let e = normalize_subset(e.to_vec())?;
    Ok(e)
}

/// Exhaustive optimum of every quantity in one sweep.
pub fn exhaustive_quantities(group: &GroupSpec, e: &[Element], cfg: &SearchConfig) -> Result<[SearchResult; 4]> {
    let e = validate_set(group, e)?;
    let space = CandidateSpace { order: group.order() as usize, n: e.len(), normalize_zero: cfg.normalize_zero };
    let total = space.count();
    check_cap(total, cfg.cap)?;
    let table = CharacterTable::new(group, &e);
    let duals = group.elements();
    let chunks = total.div_ceil(CHUNK);
    let per_chunk: Vec<[Track; 4]> = cfg.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut tracks = Quantity::ALL.map(Track::new);
                space.for_each(c * CHUNK, ((c + 1) * CHUNK).min(total), |rank, cols| {
                    if let Some(f) = &cfg.coset_filter {
                        if !passes_filter(group, &e, &duals, cols, f) {
                            return;
                        }
                    }
                    let r = TightnessReport::from_spectrum(
                        singular_values(&table.matrix(cols)).expect("square"),
                    );
                    for (t, q) in tracks.iter_mut().zip(Quantity::ALL) {
                        t.push(rank, r.raw(q));
                    }
                });
                for t in tracks.iter_mut() {
                    t.prune();
                }
                tracks
            })
            .collect()
    });
    let bounds = SetBounds::for_size(e.len());
    let (m, k) = space.free();
    let mut results = Vec::with_capacity(4);
    for (qi, q) in Quantity::ALL.into_iter().enumerate() {
        let tracks: Vec<Track> = per_chunk.iter().map(|t| t[qi].clone()).collect();
        let (rank, value) = merge(&tracks).ok_or_else(|| {
            Error::Precondition("no candidate spectrum survived the filter".into())
        })?;
        let mut cols = Vec::new();
        space.assemble(&unrank_combination(m, k, rank), &mut cols);
        let witness = cols.iter().map(|&c| duals[c].clone()).collect();
        results.push(SearchResult {
            quantity: q,
            value,
            normalized: normalize(q, value, e.len()),
            witness,
            strategy: Strategy::Exhaustive,
            seed: None,
            certificates: Certificate::new(q, value, &bounds),
            candidates: total,
        });
    }
    Ok(results.try_into().expect("four quantities"))
}

/// A random spectrum containing `0`.
fn random_spectrum(group: &GroupSpec, n: usize, rng: &mut ChaCha8Rng) -> Vec<Element> {
    let order = group.order() as usize;
    let mut b = vec![group.zero()];
    b.extend(sample(rng, order - 1, n - 1).into_iter().map(|i| group.element_at(i + 1)));
    b.sort();
    b
}

/// Draws random spectra until one forms a basis pair with `E`.
pub fn random_basis(group: &GroupSpec, e: &[Element], rng: &mut ChaCha8Rng, budget: u64) -> Result<(Vec<Element>, u64)> {
    let e = validate_set(group, e)?;
    for draw in 1..=budget {
        let b = random_spectrum(group, e.len(), rng);
        let pair = SubsetPair::new(group, e.clone(), b.clone())?;
        if tightness_report(&pair).is_basis {
            return Ok((b, draw));
        }
    }
    Err(Error::BudgetExhausted(budget))
}

/// Random-loop: seeded random bases, each improved by loop-around.
pub fn random_loop_quantities(group: &GroupSpec, e: &[Element], cfg: &SearchConfig) -> Result<[SearchResult; 4]> {
    let e = validate_set(group, e)?;
    if e.len() as u64 > group.order() {
        return Err(Error::InvalidSubset("E larger than the group".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: [Option<(f64, Vec<Element>)>; 4] = Default::default();
    let mut evaluated = 0u128;
    for _ in 0..cfg.samples.max(1) {
        let (b, _) = random_basis(group, &e, &mut rng, cfg.budget)?;
        let looped = loop_around(group, &e, &b)?;
        for entry in &looped.table {
            evaluated += 1;
            let pair = SubsetPair::new(group, e.clone(), entry.spectrum.clone())?;
            let r = tightness_report(&pair);
            for (slot, q) in best.iter_mut().zip(Quantity::ALL) {
                let v = r.raw(q);
                if slot.as_ref().is_none_or(|(cur, _)| better(q.maximize(), v, *cur)) {
                    *slot = Some((v, entry.spectrum.clone()));
                }
            }
        }
    }
    let bounds = SetBounds::for_size(e.len());
    let results: Vec<SearchResult> = best
        .into_iter()
        .zip(Quantity::ALL)
        .map(|(slot, q)| {
            let (value, witness) = slot.expect("at least one sample");
            SearchResult {
                quantity: q,
                value,
                normalized: normalize(q, value, e.len()),
                witness,
                strategy: Strategy::RandomLoop,
                seed: Some(cfg.seed),
                certificates: Certificate::new(q, value, &bounds),
                candidates: evaluated,
            }
        })
        .collect();
    Ok(results.try_into().expect("four quantities"))
}

pub fn set_quantities(group: &GroupSpec, e: &[Element], strategy: Strategy, cfg: &SearchConfig) -> Result<[SearchResult; 4]> {
    match strategy {
        Strategy::Exhaustive => exhaustive_quantities(group, e, cfg),
        Strategy::RandomLoop => random_loop_quantities(group, e, cfg),
    }
}

pub fn set_quantity(group: &GroupSpec, e: &[Element], q: Quantity, strategy: Strategy, cfg: &SearchConfig) -> Result<SearchResult> {
    let all = set_quantities(group, e, strategy, cfg)?;
    Ok(all.into_iter().find(|r| r.quantity == q).expect("all quantities present"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoopEntry {
    pub k: u64,
    pub spectrum: Vec<Element>,
    #[serde(rename = "D", serialize_with = "real::serialize")]
    pub d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoopAround {
    pub best_k: u64,
    #[serde(rename = "best_D", serialize_with = "real::serialize")]
    pub best_d: f64,
    /// Smallest `k` with `D_E(kB) ≥ 1` (up to `1e-9`), if any.
    pub first_k_at_least_one: Option<u64>,
    pub table: Vec<LoopEntry>,
}

/// `D_E(kB)` for every `k` coprime to the minimal exponent.
pub fn loop_around(group: &GroupSpec, e: &[Element], b: &[Element]) -> Result<LoopAround> {
    let e = validate_set(group, e)?;
    let mut table = Vec::new();
    for k in units(group.exponent()) {
        let kb: Vec<Element> = b.iter().map(|y| group.scale(k, y)).collect();
        let pair = SubsetPair::new(group, e.clone(), kb)?;
        let d = tightness_report(&pair).d;
        table.push(LoopEntry { k, spectrum: pair.b().to_vec(), d });
    }
    let best = table
        .iter()
        .fold(None::<&LoopEntry>, |acc, x| match acc {
            Some(a) if a.d >= x.d => Some(a),
            _ => Some(x),
        })
        .expect("k = 1 is always coprime");
    let first_k_at_least_one = table.iter().find(|t| t.d >= 1.0 - 1e-9).map(|t| t.k);
    Ok(LoopAround { best_k: best.k, best_d: best.d, first_k_at_least_one, table })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifiedPair {
    pub b: Vec<Element>,
    pub k: u64,
    pub seed: u64,
    pub draws: u64,
    pub report: TightnessReport,
    pub certificates: SetBounds,
    pub holds: BTreeMap<&'static str, bool>,
}

/// A pair whose quantities obey the group-independent set bounds: a random
/// basis improved by loop-around.
pub fn certified_pair(group: &GroupSpec, e: &[Element], seed: u64, budget: u64) -> Result<CertifiedPair> {
    let e = validate_set(group, e)?;
    if e.len() < 2 {
        return Err(Error::Precondition("certified_pair needs |E| > 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (b, draws) = random_basis(group, &e, &mut rng, budget)?;
    let looped = loop_around(group, &e, &b)?;
    let best = looped.table.iter().find(|t| t.k == looped.best_k).expect("best k in table");
    let report = tightness_report(&SubsetPair::new(group, e.clone(), best.spectrum.clone())?);
    let certificates = SetBounds::for_size(e.len());
    let holds = certificates.check(&report);
    Ok(CertifiedPair { b: best.spectrum.clone(), k: looped.best_k, seed, draws, report, certificates, holds })
}

/// `{0, 1, …, k−1} ⊆ Ẑ_m`.
pub fn vandermonde_spectrum(m: u64, k: u64) -> Result<Vec<Element>> {
    if k < 1 || k > m {
        return Err(Error::Precondition(format!("need 1 <= k <= m, got k={k}, m={m}")));
    }
    Ok((0..k).map(|j| Element::new(vec![j])).collect())
}

/// First spectrum (lexicographic, containing `0`) that is a basis partner
/// for every set in the family, or `None`.
pub fn simultaneous_basis(group: &GroupSpec, sets: &[Vec<Element>], strategy: Strategy, cfg: &SearchConfig) -> Result<Option<Vec<Element>>> {
    simultaneous_basis_among(group, sets, &group.elements(), strategy, cfg)
}

/// As [`simultaneous_basis`], choosing `B` from `candidates` (sorted, with
/// the zero character first). Used for dual groups of subgroups, whose
/// elements are represented by coset representatives in `Ĝ`.
pub fn simultaneous_basis_among(
    group: &GroupSpec,
    sets: &[Vec<Element>],
    candidates: &[Element],
    strategy: Strategy,
    cfg: &SearchConfig,
) -> Result<Option<Vec<Element>>> {
    let sets: Vec<Vec<Element>> = sets.iter().map(|s| validate_set(group, s)).collect::<Result<_>>()?;
    let n = match sets.first() {
        Some(s) => s.len(),
        None => return Err(Error::Precondition("empty family".into())),
    };
    if sets.iter().any(|s| s.len() != n) {
        return Err(Error::Precondition("sets differ in size".into()));
    }
    if candidates.first() != Some(&group.zero()) {
        return Err(Error::Precondition("candidate list must start with zero".into()));
    }
    if n > candidates.len() {
        return Ok(None);
    }
    let tables: Vec<CharacterTable> = sets
        .iter()
        .map(|s| CharacterTable::from_matrix(fourier_matrix_of(group, s, candidates)))
        .collect();
    let is_simultaneous = |cols: &[usize]| {
        tables
            .iter()
            .all(|t| !singular_values(&t.matrix(cols)).expect("square").is_singular())
    };
    let found = match strategy {
        Strategy::Exhaustive => {
            let space = CandidateSpace { order: candidates.len(), n, normalize_zero: cfg.normalize_zero };
            let total = space.count();
            check_cap(total, cfg.cap)?;
            let chunks = total.div_ceil(CHUNK);
            cfg.install(|| {
                (0..chunks).into_par_iter().find_map_first(|c| {
                    let mut hit = None;
                    space.for_each(c * CHUNK, ((c + 1) * CHUNK).min(total), |_, cols| {
                        if hit.is_none() && is_simultaneous(cols) {
                            hit = Some(cols.to_vec());
                        }
                    });
                    hit
                })
            })
        }
        Strategy::RandomLoop => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut hit = None;
            for _ in 0..cfg.budget {
                let mut cols = vec![0];
                cols.extend(sample(&mut rng, candidates.len() - 1, n - 1).into_iter().map(|i| i + 1));
                cols.sort();
                if is_simultaneous(&cols) {
                    hit = Some(cols);
                    break;
                }
            }
            hit
        }
    };
    Ok(found.map(|cols| cols.iter().map(|&c| candidates[c].clone()).collect()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoopProduct {
    #[serde(serialize_with = "real::serialize")]
    pub product: f64,
    pub nearest_integer: u64,
    /// `|product − nearest| / max(1, product)`
    #[serde(serialize_with = "real::serialize")]
    pub deviation: f64,
    pub factors: Vec<LoopEntry>,
}

/// `∏_k D_E(kB)` over `k` coprime to the minimal exponent. It is the norm of
/// an algebraic integer, so it is an integer.
pub fn loop_product_check(group: &GroupSpec, e: &[Element], b: &[Element], cap: u64) -> Result<LoopProduct> {
    if group.exponent() > cap {
        return Err(Error::CapExceeded {
            what: "minimal exponent for loop product",
            size: group.exponent() as u128,
            cap: cap as u128,
        });
    }
    if e.len() != b.len() {
        return Err(Error::SizeMismatch { e: e.len(), b: b.len() });
    }
    let looped = loop_around(group, e, b)?;
    let product: f64 = looped.table.iter().map(|t| t.d).product();
    let nearest = product.round().max(0.0);
    Ok(LoopProduct {
        product,
        nearest_integer: nearest as u64,
        deviation: (product - nearest).abs() / product.max(1.0),
        factors: looped.table,
    })
}

/// Every `B` (no normalization) with `(E, B)` a basis pair.
pub fn basis_partners(group: &GroupSpec, e: &[Element], cap: u128) -> Result<Vec<Vec<Element>>> {
    let e = validate_set(group, e)?;
    let space = CandidateSpace { order: group.order() as usize, n: e.len(), normalize_zero: false };
    let total = space.count();
    check_cap(total, cap)?;
    let table = CharacterTable::new(group, &e);
    let duals = group.elements();
    let mut out = Vec::new();
    space.for_each(0, total, |_, cols| {
        if !singular_values(&table.matrix(cols)).expect("square").is_singular() {
            out.push(cols.iter().map(|&c| duals[c].clone()).collect());
        }
    });
    Ok(out)
}
