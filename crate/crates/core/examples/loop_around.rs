//! Replacing `B` by `kB` for every `k` coprime to the exponent. Some `k`
//! reaches `D ≥ 1`, and the product over all `k` is a positive integer.
//!
//! `cargo run --example loop_around`

use std::fmt::Write;

use riesz_core::group::parse_subset;
use riesz_core::search::{loop_around, loop_product_check, DEFAULT_LOOP_PRODUCT_CAP};
use riesz_core::{GroupSpec, Result};

pub fn run() -> Result<String> {
    let mut out = String::new();
    for (g, e, b) in [("Z5", "0,1", "0,1"), ("Z12", "0,1,5", "0,2,3"), ("Z3^2", "(0,0),(1,0),(0,1)", "(0,0),(1,1),(2,0)")] {
        let g = GroupSpec::parse(g)?;
        let (e, b) = (parse_subset(&g, e)?, parse_subset(&g, b)?);
        let looped = loop_around(&g, &e, &b)?;
        let table: Vec<String> = looped.table.iter().map(|t| format!("k={} D={:.6}", t.k, t.d)).collect();
        writeln!(out, "{g}: {}", table.join(", ")).unwrap();
        writeln!(out, "  best k={} D={:.6}, first k with D>=1: {:?}", looped.best_k, looped.best_d, looped.first_k_at_least_one).unwrap();
        let p = loop_product_check(&g, &e, &b, DEFAULT_LOOP_PRODUCT_CAP)?;
        writeln!(out, "  product {:.9} ~ {}", p.product, p.nearest_integer).unwrap();
    }
    Ok(out)
}

fn main() -> Result<()> {
    print!("{}", run()?);
    Ok(())
}
