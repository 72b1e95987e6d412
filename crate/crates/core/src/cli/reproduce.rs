//! Parameter sweeps over the named families, one row per parameter value.

use std::f64::consts::{E as EULER, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{self, Instance};
use crate::group::{format_subset, Element, GroupSpec};
use crate::pairs::{fourier_matrix, Quantity, SubsetPair, TightnessReport};
use crate::real;
use crate::search::{set_quantity, SearchConfig, Strategy};
use crate::tiling::{lift_spectrum, main_bound_certify, multi_tile_analysis, subgroup_dual, LevelBounds};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(u64),
    Real(#[serde(serialize_with = "real::serialize")] f64),
    Text(String),
    Null,
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => real::format(*v),
            Cell::Text(s) => s.clone(),
            Cell::Null => String::new(),
        }
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Null, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Rows as objects keyed by column name.
    pub fn records(&self) -> Vec<serde_json::Map<String, serde_json::Value>> {
        self.rows
            .iter()
            .map(|r| {
                self.columns
                    .iter()
                    .zip(r)
                    .map(|(c, v)| (c.clone(), serde_json::to_value(v).expect("cell serializes")))
                    .collect()
            })
            .collect()
    }
}

pub const FAMILIES: &[(&str, &str, &str)] = &[
    ("condtoinfty", "m", "(Z_m x {0}) u {(0,1)} in Z_m^2: rho(E) >= (m+1)/2"),
    ("cartclosespec", "p", "{0,1} x Z_p: rho(E) <= rho({0,1}; Z_p) -> 1"),
    ("multitilenearlyspec", "p", "({0,1} x Z_p*) u {(1,0),(2,0)}: level 2, one section class"),
    ("twocrosssects", "m", "({0,1} x Z_m*) u {(0,0),(2,0)}: certified main bound"),
    ("q3family", "p", "({0} x Z_p) u (1,1)Z_p u {(1,0)}: experiment, no expected values"),
    ("crosssectbad", "p", "unbounded section classes: best product-form rho vs rho_{0,1}({0,1})"),
    ("zmsize2", "m", "{0,m/3} in Z_m"),
    ("zpsize3", "p", "{0,1,3} in Z_p"),
];

pub fn default_range(family: &str) -> Vec<u64> {
    match family {
        "condtoinfty" => vec![2, 3, 4],
        "cartclosespec" | "multitilenearlyspec" => vec![3, 5, 7, 11],
        "twocrosssects" => vec![3, 5],
        "q3family" => vec![3],
        "crosssectbad" => vec![3, 5, 7],
        "zmsize2" => vec![3, 6, 9],
        "zpsize3" => vec![5, 7, 11],
        _ => Vec::new(),
    }
}

/// Parses `2..4` (inclusive), `3,5,7`, or mixtures such as `3,5..7`.
pub fn parse_range(text: &str) -> Result<Vec<u64>> {
    let bad = || Error::Precondition(format!("bad parameter list `{text}`"));
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

fn rho_of(inst: &Instance, strategy: Strategy, cfg: &SearchConfig) -> Result<(f64, Vec<Element>)> {
    let r = set_quantity(&inst.group, &inst.e, Quantity::Rho, strategy, cfg)?;
    Ok((r.value, r.witness))
}

fn report(group: &GroupSpec, e: &[Element], b: Vec<Element>) -> Result<TightnessReport> {
    Ok(TightnessReport::from_matrix(&fourier_matrix(&SubsetPair::new(group, e.to_vec(), b)?)))
}

/// `ρ({0,1}; Z_p)` and its witness `b` in `B = {0, b}`.
fn size_two_rho(p: u64, strategy: Strategy, cfg: &SearchConfig) -> Result<(f64, u64)> {
    let (rho, w) = rho_of(&families::size_two(p)?, strategy, cfg)?;
    Ok((rho, w[1].coords()[0]))
}

/// `{0, b} × Ẑ_p` lifted from the horizontal subgroup.
fn lifted(inst: &Instance, b: u64) -> Result<Vec<Element>> {
    let h = inst.subgroup.as_ref().expect("family has a subgroup");
    lift_spectrum(&inst.group, h, &[Element::new(vec![0, 0]), Element::new(vec![b, 0])])
}

pub fn run_family(family: &str, params: &[u64], strategy: Strategy, cfg: &SearchConfig) -> Result<Table> {
    let table = match family {
        "condtoinfty" => {
            let mut t = Table::new(&["m", "n", "rho", "lower_bound", "witness"]);
            for &m in params {
                let inst = families::cond_to_infty(m)?;
                let (rho, w) = rho_of(&inst, strategy, cfg)?;
                t.push(vec![m.into(), inst.e.len().into(), rho.into(), ((m as f64 + 1.0) / 2.0).into(), format_subset(&w).into()]);
            }
            t
        }
        "cartclosespec" => {
            let mut t = Table::new(&["p", "rho_pair", "witness_b", "rho_product_pair", "scaled_gap"]);
            for &p in params {
                let (rho, b) = size_two_rho(p, strategy, cfg)?;
                let inst = families::cart_close_spec(p)?;
                let direct = report(&inst.group, &inst.e, lifted(&inst, b)?)?.rho;
                t.push(vec![p.into(), rho.into(), b.into(), direct.into(), ((rho - 1.0) * p as f64 / PI).into()]);
            }
            t
        }
        "multitilenearlyspec" => {
            let mut t = Table::new(&["p", "k", "rho_pair", "witness_b", "rho_lifted"]);
            for &p in params {
                let (rho, b) = size_two_rho(p, strategy, cfg)?;
                let inst = families::multi_tile_nearly_spec(p)?;
                let a = multi_tile_analysis(&inst.group, &inst.e, inst.subgroup.as_ref().expect("subgroup"))?;
                let direct = report(&inst.group, &inst.e, lifted(&inst, b)?)?.rho;
                t.push(vec![p.into(), a.distinct_count.into(), rho.into(), b.into(), direct.into()]);
            }
            t
        }
        "twocrosssects" => {
            let mut t = Table::new(&["m", "level", "k", "rho_certified", "rho_bound", "all_bounds_hold"]);
            for &m in params {
                let inst = families::two_cross_sections(m)?;
                let c = main_bound_certify(&inst.group, &inst.e, inst.subgroup.as_ref().expect("subgroup"), cfg)?;
                t.push(vec![
                    m.into(),
                    c.level.into(),
                    c.k.into(),
                    c.pair.as_ref().map(|p| p.report.rho).into(),
                    LevelBounds::new(c.level, c.k).rho.into(),
                    c.all_hold().to_string().into(),
                ]);
            }
            t
        }
        "q3family" => {
            let mut t = Table::new(&["p", "n", "k", "rho", "witness"]);
            for &p in params {
                let inst = families::q3_family(p)?;
                let a = multi_tile_analysis(&inst.group, &inst.e, inst.subgroup.as_ref().expect("subgroup"))?;
                let (rho, w) = rho_of(&inst, strategy, cfg)?;
                t.push(vec![p.into(), inst.e.len().into(), a.distinct_count.into(), rho.into(), format_subset(&w).into()]);
            }
            t
        }
        "crosssectbad" => {
            let mut t = Table::new(&["p", "k", "best_product_rho", "rho_01_01", "bound_at_k"]);
            for &p in params {
                let inst = families::cross_sect_bad_simul_basis(p)?;
                let h = inst.subgroup.as_ref().expect("subgroup");
                let a = multi_tile_analysis(&inst.group, &inst.e, h)?;
                let dual = subgroup_dual(&inst.group, h);
                let mut best = f64::INFINITY;
                for i in 0..dual.len() {
                    for j in i + 1..dual.len() {
                        let b = lift_spectrum(&inst.group, h, &[dual[i].clone(), dual[j].clone()])?;
                        best = best.min(report(&inst.group, &inst.e, b)?.rho);
                    }
                }
                let zp = GroupSpec::cyclic(p)?;
                let s = vec![Element::new(vec![0]), Element::new(vec![1])];
                let floor = report(&zp, &s, s.clone())?.rho;
                t.push(vec![
                    p.into(),
                    a.distinct_count.into(),
                    best.into(),
                    floor.into(),
                    (EULER * 2f64.powf(2.0 * a.distinct_count as f64 + 1.0)).into(),
                ]);
            }
            t
        }
        "zmsize2" | "zpsize3" => {
            let mut t = Table::new(&[if family == "zmsize2" { "m" } else { "p" }, "rho", "witness"]);
            for &m in params {
                let inst = if family == "zmsize2" { families::zm_size_two(m)? } else { families::zp_size_three(m)? };
                let (rho, w) = rho_of(&inst, strategy, cfg)?;
                t.push(vec![m.into(), rho.into(), format_subset(&w).into()]);
            }
            t
        }
        _ => {
            let known: Vec<&str> = FAMILIES.iter().map(|f| f.0).collect();
            return Err(Error::Precondition(format!("unknown family `{family}`; known: {}", known.join(", "))));
        }
    };
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn column(t: &Table, name: &str) -> Vec<f64> {
        let i = t.columns.iter().position(|c| c == name).unwrap();
        t.rows
            .iter()
            .map(|r| match &r[i] {
                Cell::Real(v) => *v,
                Cell::Int(v) => *v as f64,
                c => panic!("{c:?}"),
            })
            .collect()
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2..4").unwrap(), vec![2, 3, 4]);
        assert_eq!(parse_range("3,5,7,11").unwrap(), vec![3, 5, 7, 11]);
        assert_eq!(parse_range("3, 5..=7").unwrap(), vec![3, 5, 6, 7]);
        assert!(parse_range("4..2").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn cond_to_infty_rows() {
        let t = run_family("condtoinfty", &[2, 3, 4], Strategy::Exhaustive, &SearchConfig::default()).unwrap();
        let rho = column(&t, "rho");
        let lower = column(&t, "lower_bound");
        assert!(rho.iter().zip(&lower).all(|(r, l)| r >= l));
        // independent brute force (numpy SVD over all B); not monotone in m
        for (r, want) in rho.iter().zip([4.0, 9.849359820068168, 8.0]) {
            assert!((r - want).abs() < 1e-9 * want, "{r} vs {want}");
        }
    }

    #[test]
    fn cart_close_spec_decreases() {
        let t = run_family("cartclosespec", &[3, 5, 7, 11], Strategy::Exhaustive, &SearchConfig::default()).unwrap();
        let rho = column(&t, "rho_pair");
        assert!(rho.windows(2).all(|w| w[0] > w[1]));
        // the product pair has the same ratio as its factor
        for (a, b) in rho.iter().zip(column(&t, "rho_product_pair")) {
            assert!((a - b).abs() < 1e-9 * a);
        }
    }

    #[test]
    fn nearly_spectral_lift_matches_sections() {
        let t = run_family("multitilenearlyspec", &[3, 5], Strategy::Exhaustive, &SearchConfig::default()).unwrap();
        for (a, b) in column(&t, "rho_pair").iter().zip(column(&t, "rho_lifted")) {
            assert!((a - b).abs() < 1e-9 * a);
        }
    }

    #[test]
    fn unknown_family() {
        assert!(run_family("nope", &[3], Strategy::Exhaustive, &SearchConfig::default()).is_err());
    }
}
