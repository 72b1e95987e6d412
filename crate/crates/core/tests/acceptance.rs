//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness. The process exits non-zero if any
//! criterion fails, except those listed in `KNOWN_FAILURES`, which are still
//! reported as FAIL. A known failure that starts passing also fails the run,
//! so the list cannot go stale.

use std::f64::consts::{E as EULER, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use riesz_core::cli::verify::{run_suite, weighted_rho_z2, VerifyConfig};
use riesz_core::families;
use riesz_core::group::{cosets, enumerate_subgroups, normalize_subset, parse_subset, totient};
use riesz_core::pairs::tightness_report;
use riesz_core::search::{
    basis_partners, exhaustive_quantities, loop_around, loop_product_check, random_basis, simultaneous_basis,
    vandermonde_spectrum, SearchConfig, Strategy, DEFAULT_LOOP_PRODUCT_CAP,
};
use riesz_core::tiling::{
    decompose_verify, dimexpand_verify, main_bound_certify, product_pair_verify, relative_deviation, subgroup_dual,
};
use riesz_core::{Element, GroupSpec, Result, SubsetPair};

/// Criterion 10 asks for `ρ(E)` to be strictly increasing in `m` on
/// `m ∈ {2,3,4}`. The exhaustive values are 4, 9.849…, 8 (checked against
/// an independent numpy brute force), so that clause cannot hold.
const KNOWN_FAILURES: &[u32] = &[10];

struct Outcome {
    ok: bool,
    detail: String,
}

impl Outcome {
    fn new(ok: bool, detail: impl Into<String>) -> Self {
        Outcome { ok, detail: detail.into() }
    }
}

/// Collects failure messages; the criterion passes when none were recorded.
#[derive(Default)]
struct Failures(Vec<String>);

impl Failures {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.0.push(what());
        }
    }

    fn outcome(self, summary: impl Into<String>) -> Outcome {
        match self.0.first() {
            None => Outcome::new(true, summary),
            Some(first) => Outcome::new(false, format!("{} failure(s), first: {first}", self.0.len())),
        }
    }
}

fn group(s: &str) -> GroupSpec {
    GroupSpec::parse(s).expect("valid group")
}

fn subsets(g: &GroupSpec, k: usize) -> Vec<Vec<Element>> {
    let n = g.order() as usize;
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.iter().map(|&i| g.element_at(i)).collect());
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn random_subset(g: &GroupSpec, n: usize, rng: &mut ChaCha8Rng) -> Vec<Element> {
    let mut s: Vec<Element> = sample(rng, g.order() as usize, n).into_iter().map(|i| g.element_at(i)).collect();
    s.sort();
    s
}

fn within(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn rel_within(a: f64, b: f64, tol: f64) -> bool {
    relative_deviation(a, b) <= tol
}

fn table_reproduction() -> Result<Outcome> {
    let cfg = SearchConfig::default();
    let mut f = Failures::default();
    let z3 = group("Z3");
    let q = exhaustive_quantities(&z3, &parse_subset(&z3, "0,1")?, &cfg)?;
    let want = [2.0, 1.5, 3.0, 2f64.sqrt() / 3f64.powf(0.25)];
    for (r, w) in q.iter().zip(want) {
        f.check(within(r.normalized, w, 1e-10), || format!("Z3 {:?} = {} want {w}", r.quantity, r.normalized));
    }
    let z33 = group("Z3^2");
    let q = exhaustive_quantities(&z33, &parse_subset(&z33, "(0,0),(0,1),(1,0),(1,1)")?, &cfg)?;
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let want = [(3.490711985, 1e-6), (1.5, 1e-9), (golden.powi(4), 1e-8), (2.0 / 3f64.sqrt(), 1e-9)];
    for (r, (w, tol)) in q.iter().zip(want) {
        f.check(within(r.normalized, w, tol), || format!("Z3^2 {:?} = {} want {w}", r.quantity, r.normalized));
    }
    Ok(f.outcome("Z3 and Z3^2 tables match"))
}

fn trace_identity() -> Result<Outcome> {
    const SMALL: &[&str] =
        &["Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "Z9", "Z10", "Z11", "Z12", "Z16", "Z24", "Z2^2", "Z2^3", "Z3^2", "Z2xZ6", "Z4^2", "Z2^4", "Z2xZ12", "Z2^2xZ3"];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut f = Failures::default();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let g = group(SMALL[rng.gen_range(0..SMALL.len())]);
        let n = rng.gen_range(1..=(g.order() as usize).min(12));
        let (e, b) = (random_subset(&g, n, &mut rng), random_subset(&g, n, &mut rng));
        let r = tightness_report(&SubsetPair::new(&g, e, b)?);
        let nn = (n * n) as f64;
        let dev = (r.sigmas.sum_of_squares() - nn).abs() / nn;
        worst = worst.max(dev);
        f.check(dev <= 1e-9, || format!("G={g} n={n}: relative deviation {dev}"));
    }
    Ok(f.outcome(format!("1000 pairs, worst relative deviation {worst:.1e}")))
}

fn set_bounds() -> Result<Outcome> {
    let cfg = SearchConfig::default();
    let mut f = Failures::default();
    let mut sets = 0;
    for gs in ["Z6", "Z2^3", "Z3^2"] {
        let g = group(gs);
        for size in 2..=3usize {
            let n = size as f64;
            for e in subsets(&g, size) {
                let q = exhaustive_quantities(&g, &e, &cfg)?;
                let (l, u, rho, d) = (q[0].value, q[1].value, q[2].value, q[3].value);
                let what = || format!("G={g} E={e:?}: L={l} U={u} rho={rho} D={d}");
                f.check(l > 1.0 / (EULER * n.powf(n - 1.0)), what);
                f.check(u < n * n - (n - 1.0) / 4.0, what);
                f.check(rho < 4.0 * n.powf(n), what);
                f.check(d >= 1.0 - 1e-9, what);
                sets += 1;
            }
        }
    }
    Ok(f.outcome(format!("{sets} sets within all four bounds")))
}

fn cyclotomic() -> Result<Outcome> {
    let mut f = Failures::default();
    let mut pairs = 0;
    for gs in ["Z4", "Z6"] {
        let g = group(gs);
        let phi = totient(g.exponent()) as f64;
        let bound = 2f64.powf(2.0 * (1.0 - phi) / 2.0);
        for e in subsets(&g, 2) {
            for b in basis_partners(&g, &e, u128::MAX)? {
                let d = tightness_report(&SubsetPair::new(&g, e.clone(), b.clone())?).d;
                f.check(d >= bound - 1e-9, || format!("G={g} E={e:?} B={b:?}: D={d} < {bound}"));
                pairs += 1;
            }
        }
    }
    Ok(f.outcome(format!("{pairs} basis pairs")))
}

fn loop_around_criterion() -> Result<Outcome> {
    let budget = SearchConfig::default().budget;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut f = Failures::default();
    for case in 0..200 {
        let g = group(if case % 2 == 0 { "Z8" } else { "Z12" });
        let n = rng.gen_range(2..=4);
        let e = random_subset(&g, n, &mut rng);
        let (b, _) = random_basis(&g, &e, &mut rng, budget)?;
        let looped = loop_around(&g, &e, &b)?;
        f.check(looped.best_d >= 1.0 - 1e-9, || format!("G={g} E={e:?} B={b:?}: best D {}", looped.best_d));
    }
    const SMALL_EXPONENT: &[&str] =
        &["Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "Z9", "Z10", "Z11", "Z12", "Z2^2", "Z2xZ4", "Z2xZ6", "Z3^2", "Z2^3", "Z4^2", "Z3xZ6"];
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let g = group(SMALL_EXPONENT[rng.gen_range(0..SMALL_EXPONENT.len())]);
        let n = rng.gen_range(1..=3usize.min(g.order() as usize));
        let e = random_subset(&g, n, &mut rng);
        let (b, _) = random_basis(&g, &e, &mut rng, budget)?;
        let p = loop_product_check(&g, &e, &b, DEFAULT_LOOP_PRODUCT_CAP)?;
        let rel = (p.product - p.product.round()).abs() / p.product.max(1.0);
        worst = worst.max(rel);
        f.check(rel <= 1e-6 && p.product.round() >= 1.0, || format!("G={g} E={e:?} B={b:?}: product {}", p.product));
    }
    Ok(f.outcome(format!("200 looped pairs reach D >= 1; 200 products integral, worst {worst:.1e}")))
}

fn multiplicativity() -> Result<Outcome> {
    let (h, k) = (group("Z3"), group("Z4"));
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut f = Failures::default();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (n1, n2) = (rng.gen_range(1..=3), rng.gen_range(1..=4));
        let (e1, b1) = (random_subset(&h, n1, &mut rng), random_subset(&h, n1, &mut rng));
        let (e2, b2) = (random_subset(&k, n2, &mut rng), random_subset(&k, n2, &mut rng));
        let r = product_pair_verify(&h, &e1, &b1, &k, &e2, &b2)?;
        worst = worst.max(r.max_deviation);
        f.check(r.comparisons.len() == 4 && r.max_deviation <= 1e-9, || {
            format!("E={:?} B={:?}: deviation {}", r.e, r.b, r.max_deviation)
        });
    }
    Ok(f.outcome(format!("100 product pairs, worst deviation {worst:.1e}")))
}

fn decomposition() -> Result<Outcome> {
    const GROUPS: &[&str] = &["Z2xZ6", "Z3xZ6", "Z4^2", "Z2^2xZ3", "Z6^2", "Z3^2", "Z2xZ4", "Z2^3xZ3", "Z3xZ9", "Z12", "Z2^2xZ4"];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut f = Failures::default();
    let mut worst = 0.0f64;
    let mut built = 0;
    while built < 20 {
        let g = group(GROUPS[rng.gen_range(0..GROUPS.len())]);
        assert!(g.order() <= 36);
        let subs: Vec<_> = enumerate_subgroups(&g, 1024)?.into_iter().filter(|h| h.order() >= 2).collect();
        let h = subs[rng.gen_range(0..subs.len())].clone();
        let level = rng.gen_range(1..=3usize.min(h.order() as usize));
        let mut e = Vec::new();
        for c in cosets(&g, &h) {
            e.extend(sample(&mut rng, c.elements.len(), level).into_iter().map(|i| c.elements[i].clone()));
        }
        let e = normalize_subset(e)?;
        let dual = subgroup_dual(&g, &h);
        let b_h: Vec<Element> = sample(&mut rng, dual.len(), level).into_iter().map(|i| dual[i].clone()).collect();
        let r = decompose_verify(&g, &e, &h, &b_h)?;
        let fz = &r.factorization;
        worst = worst.max(r.max_deviation).max(fz.product_residual).max(fz.unitarity_residual);
        f.check(r.level == level, || format!("G={g}: level {} != {level}", r.level));
        f.check(r.max_deviation <= 1e-9, || format!("G={g} E={e:?}: deviation {}", r.max_deviation));
        f.check(fz.product_residual <= 1e-9 && fz.unitarity_residual <= 1e-9, || format!("G={g} E={e:?}: {fz:?}"));
        built += 1;
    }
    Ok(f.outcome(format!("20 multi-tiles, worst residual {worst:.1e}")))
}

fn dimension_expansion() -> Result<Outcome> {
    let cfg = SearchConfig::default();
    let (z3, z2) = (group("Z3"), group("Z2"));
    let mut f = Failures::default();
    for e1 in subsets(&z3, 2) {
        let c = dimexpand_verify(&z3, &e1, &z2, &cfg)?;
        f.check(c.len() == 4, || "missing quantities".into());
        for c in c {
            f.check(rel_within(c.right, c.left, 1e-8), || format!("E1={e1:?} {:?}: {} vs {}", c.quantity, c.right, c.left));
        }
    }
    Ok(f.outcome("3 sets, all four quantities agree"))
}

fn simultaneous_bases() -> Result<Outcome> {
    let cfg = SearchConfig::default();
    let mut f = Failures::default();
    let (g, sets) = families::nosimulbasis_triple();
    let found = simultaneous_basis(&g, &sets, Strategy::Exhaustive, &cfg)?;
    f.check(found.is_none(), || format!("Z2^2 triple has partner {found:?}"));
    let mut checked = 0;
    for m in 1..=8u64 {
        let g = GroupSpec::cyclic(m)?;
        for k in 1..=m {
            let b = vandermonde_spectrum(m, k)?;
            for e in subsets(&g, k as usize) {
                let r = tightness_report(&SubsetPair::new(&g, e.clone(), b.clone())?);
                f.check(r.is_basis, || format!("m={m} E={e:?}"));
                checked += 1;
            }
        }
    }
    Ok(f.outcome(format!("triple has none; {checked} subsets share the Vandermonde spectrum")))
}

fn divergent_family() -> Result<Outcome> {
    let cfg = SearchConfig::default();
    let mut f = Failures::default();
    let mut rhos = Vec::new();
    for m in 2..=4u64 {
        let inst = families::cond_to_infty(m)?;
        let rho = exhaustive_quantities(&inst.group, &inst.e, &cfg)?[2].value;
        f.check(rho >= (m as f64 + 1.0) / 2.0, || format!("m={m}: rho={rho} below (m+1)/2"));
        rhos.push(rho);
    }
    f.check(rhos.windows(2).all(|w| w[0] < w[1]), || format!("not strictly increasing: {rhos:?}"));
    Ok(f.outcome(format!("rho = {rhos:?}")))
}

fn convergent_family() -> Result<Outcome> {
    let cfg = SearchConfig::default();
    let mut f = Failures::default();
    let mut rhos = Vec::new();
    for p in [3u64, 5, 7, 11, 13, 53] {
        let inst = families::size_two(p)?;
        rhos.push(exhaustive_quantities(&inst.group, &inst.e, &cfg)?[2].value);
    }
    let rho53 = rhos[5];
    let scaled = (rho53 - 1.0) * 53.0 / PI;
    f.check((scaled - 1.0).abs() <= 0.3, || format!("(rho-1) p/pi = {scaled} at p=53"));
    f.check(rhos.windows(2).all(|w| w[0] > w[1]), || format!("not strictly decreasing: {rhos:?}"));
    f.check(rhos.iter().all(|&r| r > 1.0), || format!("some rho <= 1: {rhos:?}"));
    Ok(f.outcome(format!("(rho-1) p/pi = {scaled:.4} at p=53")))
}

fn main_theorem() -> Result<Outcome> {
    let cfg = SearchConfig::default();
    let mut f = Failures::default();
    let mut found = Vec::new();
    for m in [3u64, 5] {
        let inst = families::two_cross_sections(m)?;
        let c = main_bound_certify(&inst.group, &inst.e, inst.subgroup.as_ref().expect("subgroup"), &cfg)?;
        let Some(pair) = &c.pair else {
            f.check(false, || format!("m={m}: no pair"));
            continue;
        };
        let rho = pair.report.rho;
        f.check(rho < 32.0 * EULER, || format!("m={m}: rho_E(B)={rho}"));
        found.push(rho);
        if m == 3 {
            let set_rho = exhaustive_quantities(&inst.group, &inst.e, &cfg)?[2].value;
            f.check(set_rho <= rho * (1.0 + 1e-9), || format!("m=3: rho(E)={set_rho} > rho_E(B)={rho}"));
        }
    }
    Ok(f.outcome(format!("certified rho_E(B) = {found:?}, bound {:.4}", 32.0 * EULER)))
}

fn weighted_closed_form() -> Result<Outcome> {
    // written out here rather than taken from the library
    let q_form = |x: f64, y: f64, a: f64, b: f64| {
        let q = 1.0 - (4.0 * a * b / (a + b).powi(2)) * (4.0 * x * y / (x + y).powi(2));
        (1.0 + q.sqrt()) / (1.0 - q.sqrt())
    };
    let mut f = Failures::default();
    for x in [1.0, 2.0, 4.0] {
        for y in [1.0, 2.0, 4.0] {
            let rho = weighted_rho_z2(x, y, 1.0, 1.0)?;
            let want = x.max(y) / x.min(y);
            f.check(within(rho, want, 1e-9), || format!("(x,y)=({x},{y}): {rho} vs {want}"));
            let rho = weighted_rho_z2(x, y, 1.0, 3.0)?;
            let want = q_form(x, y, 1.0, 3.0);
            f.check(within(rho, want, 1e-9), || format!("(x,y,a,b)=({x},{y},1,3): {rho} vs {want}"));
        }
    }
    Ok(f.outcome("9 grid points, both forms"))
}

fn verify_suite() -> Result<Outcome> {
    let run = |threads| {
        let mut cfg = VerifyConfig::default();
        cfg.search.threads = Some(threads);
        run_suite(&cfg)
    };
    let start = Instant::now();
    let one = run(1)?;
    let elapsed = start.elapsed();
    let four = run(4)?;
    let again = run(1)?;
    let json = |r| serde_json::to_string(r).expect("report serializes");
    let mut f = Failures::default();
    f.check(one.passed(), || {
        let bad: Vec<_> = one.checks.iter().filter(|c| c.failures > 0).map(|c| c.name).collect();
        format!("{} failures in {bad:?}", one.failures)
    });
    f.check(json(&one) == json(&again), || "two runs at the same seed differ".into());
    f.check(json(&one) == json(&four), || "1 and 4 threads differ".into());
    f.check(elapsed < Duration::from_secs(300), || format!("took {elapsed:?}"));
    Ok(f.outcome(format!("{} checks, 0 failures, {:.1}s, identical at 1 and 4 threads", one.checks_run, elapsed.as_secs_f64())))
}

type Criterion = (u32, &'static str, Option<Duration>, fn() -> Result<Outcome>);

const CRITERIA: &[Criterion] = &[
    (1, "table reproduction", Some(Duration::from_secs(1)), table_reproduction),
    (2, "trace identity", Some(Duration::from_secs(10)), trace_identity),
    (3, "group-independent set bounds", Some(Duration::from_secs(60)), set_bounds),
    (4, "cyclotomic pair bound", None, cyclotomic),
    (5, "loop-around", None, loop_around_criterion),
    (6, "multiplicativity", None, multiplicativity),
    (7, "decomposition", None, decomposition),
    (8, "dimension expansion", None, dimension_expansion),
    (9, "simultaneous bases", None, simultaneous_bases),
    (10, "divergent family", None, divergent_family),
    (11, "convergent family", None, convergent_family),
    (12, "main theorem certification", None, main_theorem),
    (13, "weighted closed form", None, weighted_closed_form),
    (14, "verify suite", None, verify_suite),
];

fn main() -> ExitCode {
    let mut unexpected = 0;
    for &(id, name, limit, body) in CRITERIA {
        let start = Instant::now();
        let mut outcome = body().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        let elapsed = start.elapsed();
        if let Some(limit) = limit {
            if elapsed >= limit {
                outcome = Outcome::new(false, format!("took {elapsed:?}, limit {limit:?}; {}", outcome.detail));
            }
        }
        let known = KNOWN_FAILURES.contains(&id);
        let status = match (outcome.ok, known) {
            (true, false) => "PASS",
            (true, true) => "PASS (listed as a known failure)",
            (false, false) => "FAIL",
            (false, true) => "FAIL (known)",
        };
        if outcome.ok == known {
            unexpected += 1;
        }
        println!("{status} [{id:>2}] {name} ({:.2}s): {}", elapsed.as_secs_f64(), outcome.detail);
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
