//! Multi-tiling analysis, the section decomposition of the Fourier matrix,
//! and a certificate for the level/complexity bounds.
//!
//! `cargo run --example multi_tiling`

use std::fmt::Write;

use riesz_core::families::two_cross_sections;
use riesz_core::group::format_subset;
use riesz_core::search::SearchConfig;
use riesz_core::tiling::{decompose_verify, find_multi_tiling_subgroups, main_bound_certify, multi_tile_analysis, subgroup_dual};
use riesz_core::Result;

pub fn run() -> Result<String> {
    let mut out = String::new();
    let cfg = SearchConfig::default();
    for m in [3, 5] {
        let inst = two_cross_sections(m)?;
        let h = inst.subgroup.as_ref().expect("family has a subgroup");
        let a = multi_tile_analysis(&inst.group, &inst.e, h)?;
        writeln!(out, "m={m}: E={}", format_subset(&inst.e)).unwrap();
        writeln!(out, "  level {:?}, {} section classes over {} cosets", a.level, a.distinct_count, a.m()).unwrap();
        let tilings = find_multi_tiling_subgroups(&inst.group, &inst.e, 1024)?;
        writeln!(out, "  {} subgroups multi-tile E", tilings.len()).unwrap();

        let dual = subgroup_dual(&inst.group, h);
        let r = decompose_verify(&inst.group, &inst.e, h, &dual[..2])?;
        writeln!(
            out,
            "  decomposition: deviation {:.1e}, |T - T1 T2| {:.1e}",
            r.max_deviation, r.factorization.product_residual
        )
        .unwrap();

        let c = main_bound_certify(&inst.group, &inst.e, h, &cfg)?;
        if let Some(p) = &c.pair {
            writeln!(out, "  certified B={} (s={}) rho={:.6} < {:.6}", format_subset(&p.b), p.s, p.report.rho, c.bounds.rho).unwrap();
        }
        writeln!(out, "  all bounds hold: {}", c.all_hold()).unwrap();
    }
    Ok(out)
}

fn main() -> Result<()> {
    print!("{}", run()?);
    Ok(())
}
