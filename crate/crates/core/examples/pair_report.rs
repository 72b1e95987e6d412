//! Tightness quantities of a single pair `(E, B)`.
//!
//! `cargo run --example pair_report`

use std::fmt::Write;

use riesz_core::group::parse_subset;
use riesz_core::pairs::{pair_inequalities, tightness_report};
use riesz_core::{GroupSpec, Result, SubsetPair};

pub fn run() -> Result<String> {
    let mut out = String::new();
    let g = GroupSpec::parse("Z3")?;
    for (e, b) in [("0,1", "0,1"), ("0", "2"), ("0,1,2", "0,1,2")] {
        let pair = SubsetPair::new(&g, parse_subset(&g, e)?, parse_subset(&g, b)?)?;
        let r = tightness_report(&pair);
        writeln!(out, "E={{{e}}} B={{{b}}}: L={:.6} U={:.6} rho={:.6} D={:.6} spectral={}", r.l, r.u, r.rho, r.d, r.is_spectral).unwrap();
    }
    // a pair that is not a basis has L = 0 and rho = inf
    let g = GroupSpec::parse("Z4")?;
    let pair = SubsetPair::new(&g, parse_subset(&g, "0,2")?, parse_subset(&g, "0,2")?)?;
    let r = tightness_report(&pair);
    writeln!(out, "Z4 E={{0,2}} B={{0,2}}: basis={} rho={}", r.is_basis, r.rho).unwrap();

    let g = GroupSpec::parse("Z2xZ4")?;
    let pair = SubsetPair::new(&g, parse_subset(&g, "(0,0),(0,1),(1,2)")?, parse_subset(&g, "(0,0),(1,1),(0,3)")?)?;
    let failed: Vec<_> = pair_inequalities(&pair).into_iter().filter(|c| !c.holds).map(|c| c.name).collect();
    writeln!(out, "inequalities violated: {}", failed.len()).unwrap();
    Ok(out)
}

fn main() -> Result<()> {
    print!("{}", run()?);
    Ok(())
}
