//! One spectrum shared by several sets, and a triple that has none.
//!
//! `cargo run --example simultaneous_basis`

use std::fmt::Write;

use riesz_core::families::nosimulbasis_triple;
use riesz_core::group::{format_subset, parse_subset};
use riesz_core::search::{simultaneous_basis, vandermonde_spectrum, SearchConfig, Strategy};
use riesz_core::{GroupSpec, Result};

pub fn run() -> Result<String> {
    let mut out = String::new();
    let cfg = SearchConfig::default();
    let (g, sets) = nosimulbasis_triple();
    let found = simultaneous_basis(&g, &sets, Strategy::Exhaustive, &cfg)?;
    writeln!(out, "Z2^2 triple: {:?}", found.map(|b| format_subset(&b))).unwrap();
    let found = simultaneous_basis(&g, &sets[..2], Strategy::Exhaustive, &cfg)?;
    writeln!(out, "first two: {:?}", found.map(|b| format_subset(&b))).unwrap();

    // {0, ..., k-1} works for every k-subset of Z_m
    let g = GroupSpec::cyclic(7)?;
    let sets = vec![parse_subset(&g, "0,1,2")?, parse_subset(&g, "0,2,5")?, parse_subset(&g, "1,3,6")?];
    let b = vandermonde_spectrum(7, 3)?;
    let found = simultaneous_basis(&g, &sets, Strategy::Exhaustive, &cfg)?;
    writeln!(out, "Z7: vandermonde {}, search found {:?}", format_subset(&b), found.map(|b| format_subset(&b))).unwrap();
    Ok(out)
}

fn main() -> Result<()> {
    print!("{}", run()?);
    Ok(())
}
