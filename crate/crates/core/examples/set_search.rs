//! Optimizing over every partner `B` of a set `E`, exhaustively and by
//! random loop-around sampling.
//!
//! `cargo run --release --example set_search`

use std::fmt::Write;

use riesz_core::group::{format_subset, parse_subset};
use riesz_core::search::{set_quantities, SearchConfig, Strategy};
use riesz_core::{GroupSpec, Result};

pub fn run() -> Result<String> {
    let mut out = String::new();
    let cfg = SearchConfig::default();
    for (g, e) in [("Z3", "0,1"), ("Z3^2", "(0,0),(0,1),(1,0),(1,1)"), ("Z7", "0,1,3")] {
        let g = GroupSpec::parse(g)?;
        let e = parse_subset(&g, e)?;
        writeln!(out, "{g} E={}", format_subset(&e)).unwrap();
        for strategy in [Strategy::Exhaustive, Strategy::RandomLoop] {
            for r in set_quantities(&g, &e, strategy, &cfg)? {
                writeln!(
                    out,
                    "  {:?} {:>4}: normalized {:.9} at B={} (bound holds: {})",
                    strategy,
                    r.quantity.name(),
                    r.normalized,
                    format_subset(&r.witness),
                    r.certificates.holds
                )
                .unwrap();
            }
        }
    }
    Ok(out)
}

fn main() -> Result<()> {
    print!("{}", run()?);
    Ok(())
}
