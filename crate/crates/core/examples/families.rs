//! Parameter sweeps over the named example families, as CSV.
//!
//! `cargo run --release --example families`

use riesz_core::cli::reproduce::{run_family, Table};
use riesz_core::search::{SearchConfig, Strategy};
use riesz_core::Result;

fn csv(t: &Table) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&t.columns).expect("in-memory write");
    for row in &t.rows {
        w.write_record(row.iter().map(|c| c.render())).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn run() -> Result<String> {
    let cfg = SearchConfig::default();
    let mut out = String::new();
    for (family, params) in [("condtoinfty", &[2, 3, 4, 5][..]), ("cartclosespec", &[3, 5, 7, 11, 13]), ("zpsize3", &[5, 7])] {
        out += &format!("# {family}\n");
        out += &csv(&run_family(family, params, Strategy::Exhaustive, &cfg)?);
    }
    Ok(out)
}

fn main() -> Result<()> {
    print!("{}", run()?);
    Ok(())
}
