//! Weighted Riesz ratio on `Z2` against its closed form.
//!
//! `cargo run --example weighted_z2`

use std::fmt::Write;

use riesz_core::cli::verify::{weighted_closed_form, weighted_rho_z2};
use riesz_core::Result;

pub fn run() -> Result<String> {
    let mut out = String::new();
    for (x, y) in [(1.0, 1.0), (1.0, 2.0), (1.0, 4.0), (2.0, 4.0)] {
        // equal dual weights are optimal and give max/min
        let best = weighted_rho_z2(x, y, 1.0, 1.0)?;
        let skew = weighted_rho_z2(x, y, 1.0, 3.0)?;
        writeln!(
            out,
            "(x,y)=({x},{y}): rho={best:.9} (max/min {:.9}); (a,b)=(1,3): {skew:.9} closed form {:.9}",
            x.max(y) / x.min(y),
            weighted_closed_form(x, y, 1.0, 3.0)
        )
        .unwrap();
    }
    Ok(out)
}

fn main() -> Result<()> {
    print!("{}", run()?);
    Ok(())
}
