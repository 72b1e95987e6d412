//! Runs a few checks of the property suite behind `riesz verify`.
//!
//! `cargo run --release --example verify_suite`

use std::fmt::Write;

use riesz_core::cli::verify::{run_suite, VerifyConfig};
use riesz_core::Result;

pub fn run() -> Result<String> {
    let cfg = VerifyConfig {
        cases: 50,
        only: ["trace-identity", "duality", "loop-around", "decomposition", "table"].map(String::from).to_vec(),
        ..VerifyConfig::default()
    };
    let report = run_suite(&cfg)?;
    let mut out = String::new();
    for c in &report.checks {
        writeln!(out, "{:<16} {:>5} cases {:>3} failures", c.name, c.cases, c.failures).unwrap();
    }
    writeln!(out, "passed: {}", report.passed()).unwrap();
    Ok(out)
}

fn main() -> Result<()> {
    print!("{}", run()?);
    Ok(())
}
