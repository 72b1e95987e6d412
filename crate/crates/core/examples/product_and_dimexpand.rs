//! Normalized quantities multiply over direct products, and do not change
//! when a set is extended by a whole factor.
//!
//! `cargo run --release --example product_and_dimexpand`

use std::fmt::Write;

use riesz_core::group::parse_subset;
use riesz_core::search::SearchConfig;
use riesz_core::tiling::{dimexpand_verify, product_pair_verify, product_set_verify};
use riesz_core::{GroupSpec, Result};

pub fn run() -> Result<String> {
    let mut out = String::new();
    let (h, k) = (GroupSpec::parse("Z3")?, GroupSpec::parse("Z4")?);
    let (e1, b1) = (parse_subset(&h, "0,1")?, parse_subset(&h, "0,2")?);
    let (e2, b2) = (parse_subset(&k, "0,1,2")?, parse_subset(&k, "0,1,3")?);
    let r = product_pair_verify(&h, &e1, &b1, &k, &e2, &b2)?;
    for c in &r.comparisons {
        writeln!(out, "pair {:>4}: direct {:.9} product {:.9}", c.quantity.name(), c.direct, c.formula).unwrap();
    }

    let cfg = SearchConfig::default();
    let z2 = GroupSpec::parse("Z2")?;
    for c in product_set_verify(&h, &e1, &z2, &parse_subset(&z2, "0,1")?, &cfg)? {
        writeln!(out, "set  {:>4}: {:.9} <= {:.9}: {}", c.quantity.name(), c.left, c.right, c.holds).unwrap();
    }
    for c in dimexpand_verify(&h, &e1, &z2, &cfg)? {
        writeln!(out, "E1 x Z2 {:>4}: {:.9} vs {:.9}", c.quantity.name(), c.left, c.right).unwrap();
    }
    Ok(out)
}

fn main() -> Result<()> {
    print!("{}", run()?);
    Ok(())
}
