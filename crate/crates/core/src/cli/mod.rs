//! Command-line interface: `quantities`, `search`, `tiling`, `verify` and
//! `examples`.
//!
//! Exit codes: 0 success, 1 verification failure, 2 bad input, 3 cap exceeded.

pub mod reproduce;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::{format_subset, parse_subset, subgroup_closure, Element, GroupSpec, Subgroup};
use crate::pairs::{pair_inequalities, tightness_report, Quantity, SubsetPair};
use crate::real;
use crate::search::{
    basis_partners, certified_pair, loop_around, loop_product_check, set_quantities, simultaneous_basis,
    SearchConfig, SearchResult, Strategy, DEFAULT_LOOP_PRODUCT_CAP, DEFAULT_SEARCH_CAP,
};
use crate::tiling::{
    decompose_verify, find_multi_tiling_subgroups, main_bound_certify, multi_tile_analysis, tile_spectrum,
    LevelBounds, MultiTileAnalysis,
};
use reproduce::{Cell, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 2;
pub const EXIT_CAP_EXCEEDED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "riesz", version, about = "Riesz-basis tightness quantities on finite abelian groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quantities of a pair (E, B), or of a set E with --set.
    Quantities(QuantitiesArgs),
    /// Spectrum search: optimize, certify, loop around, simultaneous bases, basis partners.
    Search(SearchArgs),
    /// Multi-tiling analysis, decomposition and main-bound certification.
    Tiling(TilingArgs),
    /// Run the property suite.
    Verify(VerifyArgs),
    /// Parameter sweeps over the named example families.
    Examples(ExamplesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest number of candidate spectra an exhaustive search may visit.
    #[arg(long)]
    pub cap: Option<u128>,
    /// Largest number of subgroups enumerated.
    #[arg(long, default_value_t = 1024)]
    pub subgroup_cap: u64,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Tolerance override for the checks of `verify`.
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,
}

impl Common {
    fn search_config(&self) -> Result<SearchConfig> {
        let cap = self.cap.unwrap_or(DEFAULT_SEARCH_CAP);
        if cap == 0 || self.subgroup_cap == 0 || self.threads == Some(0) {
            return Err(Error::Precondition("caps and thread counts must be positive".into()));
        }
        Ok(SearchConfig { cap, seed: self.seed, threads: self.threads, ..SearchConfig::default() })
    }
}

fn parse_quantity(s: &str) -> std::result::Result<Quantity, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_strategy(s: &str) -> std::result::Result<Strategy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct QuantitiesArgs {
    /// Group, e.g. `Z3^2` or `Z4xZ2`.
    #[arg(short = 'g', long = "group")]
    pub group: String,
    /// Subset of G: literal such as `(0,0),(1,0)`, or a file (`@path` or an existing path).
    #[arg(short = 'E')]
    pub e: String,
    /// Subset of the dual group, same syntax as -E.
    #[arg(short = 'B')]
    pub b: Option<String>,
    /// Optimize over B instead of evaluating one pair.
    #[arg(long)]
    pub set: bool,
    #[arg(long = "q", value_parser = parse_quantity)]
    pub quantity: Option<Quantity>,
    #[arg(long, value_parser = parse_strategy, default_value = "exhaustive")]
    pub strategy: Strategy,
    /// Random bases drawn by random-loop.
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    /// Pair mode: add the inequality checks; set mode: add a certified pair.
    #[arg(long)]
    pub certify: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SearchMode {
    Optimize,
    Certify,
    Loop,
    Simultaneous,
    Partners,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[arg(short = 'g', long = "group")]
    pub group: String,
    /// Subset of G; repeat for a simultaneous-basis search.
    #[arg(short = 'E', required = true)]
    pub e: Vec<String>,
    /// Spectrum to loop around.
    #[arg(short = 'B')]
    pub b: Option<String>,
    /// Defaults to `loop` with -B, `simultaneous` with several -E, else `optimize`.
    #[arg(long, value_enum)]
    pub mode: Option<SearchMode>,
    #[arg(long = "q", value_parser = parse_quantity)]
    pub quantity: Option<Quantity>,
    #[arg(long, value_parser = parse_strategy, default_value = "exhaustive")]
    pub strategy: Strategy,
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    /// Draws allowed while looking for one random basis pair.
    #[arg(long, default_value_t = 100_000)]
    pub budget: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct TilingArgs {
    #[arg(short = 'g', long = "group")]
    pub group: String,
    #[arg(short = 'E')]
    pub e: String,
    /// Generators of H; without it every subgroup is tried.
    #[arg(short = 'H', long = "subgroup")]
    pub subgroup: Option<String>,
    /// Spectrum B_H in the dual of H (any representatives); adds the decomposition check.
    #[arg(short = 'B')]
    pub b: Option<String>,
    /// Certify the main-theorem bounds.
    #[arg(long)]
    pub certify: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Comma-separated check names.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
    /// Random cases per randomized check.
    #[arg(short = 'n', default_value_t = verify::DEFAULT_CASES)]
    pub cases: usize,
    /// List the checks and exit.
    #[arg(long)]
    pub list: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct ExamplesArgs {
    /// Family name; `list` shows them all.
    pub family: String,
    /// Values of m, e.g. `2..4` or `3,6,9`.
    #[arg(long)]
    pub m: Option<String>,
    /// Values of p, e.g. `3,5,7,11`.
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long, value_parser = parse_strategy, default_value = "exhaustive")]
    pub strategy: Strategy,
    #[command(flatten)]
    pub common: Common,
}

/// A command result: JSON document, tabular view and exit code.
pub struct Output {
    pub json: Value,
    pub table: Table,
    pub exit: i32,
}

impl Output {
    fn ok(json: Value, table: Table) -> Self {
        Output { json, table, exit: EXIT_OK }
    }

    pub fn render(&self, format: Format, seed: u64) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("json value serializes");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let mut header = self.table.columns.clone();
                header.push("seed".into());
                w.write_record(&header).expect("in-memory write");
                for row in &self.table.rows {
                    let mut rec: Vec<String> = row.iter().map(Cell::render).collect();
                    rec.push(seed.to_string());
                    w.write_record(&rec).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
            }
            Format::Table => {
                let mut cells: Vec<Vec<String>> = vec![self.table.columns.clone()];
                cells.extend(self.table.rows.iter().map(|r| r.iter().map(Cell::render).collect()));
                let widths: Vec<usize> = (0..self.table.columns.len())
                    .map(|i| cells.iter().map(|r| r[i].chars().count()).max().unwrap_or(0))
                    .collect();
                let mut s = format!("seed: {seed}\n");
                for r in cells {
                    let line: Vec<String> = r.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
                    s.push_str(line.join("  ").trim_end());
                    s.push('\n');
                }
                s
            }
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CapExceeded { .. } => EXIT_CAP_EXCEEDED,
        _ => EXIT_BAD_INPUT,
    }
}

/// Reads a subset given inline, as `@path`, or as the path of an existing file.
pub fn read_subset(group: &GroupSpec, arg: &str) -> Result<Vec<Element>> {
    let path = arg.strip_prefix('@').map(Path::new).or_else(|| {
        let p = Path::new(arg);
        p.is_file().then_some(p)
    });
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Precondition(format!("cannot read {}: {e}", p.display())))?;
            parse_subset(group, &text)
        }
        None => parse_subset(group, arg),
    }
}

fn read_subgroup(group: &GroupSpec, gens: &str) -> Result<Subgroup> {
    subgroup_closure(group, &read_subset(group, gens)?)
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn quantity_rows(results: &[SearchResult]) -> Table {
    let mut t = Table::new(&["quantity", "value", "normalized", "witness", "strategy"]);
    for r in results {
        t.push(vec![
            r.quantity.name().to_string().into(),
            r.value.into(),
            r.normalized.into(),
            format_subset(&r.witness).into(),
            to_json(&r.strategy).as_str().unwrap_or_default().to_string().into(),
        ]);
    }
    t
}

fn select(results: [SearchResult; 4], q: Option<Quantity>) -> Vec<SearchResult> {
    results.into_iter().filter(|r| q.is_none_or(|q| r.quantity == q)).collect()
}

fn cmd_quantities(a: &QuantitiesArgs) -> Result<Output> {
    let group = GroupSpec::parse(&a.group)?;
    let e = read_subset(&group, &a.e)?;
    let cfg = SearchConfig { samples: a.samples, ..a.common.search_config()? };
    let seed = a.common.seed;
    if a.set || a.b.is_none() {
        let results = cfg.install(|| set_quantities(&group, &e, a.strategy, &cfg))?;
        let results = select(results, a.quantity);
        let mut json = json!({
            "command": "quantities",
            "group": group.to_string(),
            "seed": seed,
            "E": e,
            "results": results,
        });
        if a.certify {
            json["certified_pair"] = to_json(&certified_pair(&group, &e, seed, cfg.budget)?);
        }
        return Ok(Output::ok(json, quantity_rows(&results)));
    }
    let b = read_subset(&group, a.b.as_deref().expect("checked above"))?;
    let pair = SubsetPair::new(&group, e, b)?;
    let report = tightness_report(&pair);
    let mut json = json!({
        "command": "quantities",
        "group": group.to_string(),
        "seed": seed,
        "E": pair.e(),
        "B": pair.b(),
        "report": report,
    });
    if let Some(q) = a.quantity {
        json["quantity"] = json!(q);
        json["value"] = to_json(&real::Real(report.raw(q)));
        json["normalized_value"] = to_json(&real::Real(report.normalized.get(q)));
    }
    let mut t = Table::new(&["quantity", "value", "normalized"]);
    for q in Quantity::ALL.into_iter().filter(|q| a.quantity.is_none_or(|s| s == *q)) {
        t.push(vec![q.name().to_string().into(), report.raw(q).into(), report.normalized.get(q).into()]);
    }
    let mut exit = EXIT_OK;
    if a.certify {
        let checks = pair_inequalities(&pair);
        if checks.iter().any(|c| !c.holds) {
            exit = EXIT_VERIFY_FAILED;
        }
        json["inequalities"] = to_json(&checks);
    }
    Ok(Output { json, table: t, exit })
}

fn cmd_search(a: &SearchArgs) -> Result<Output> {
    let group = GroupSpec::parse(&a.group)?;
    let sets: Vec<Vec<Element>> = a.e.iter().map(|s| read_subset(&group, s)).collect::<Result<_>>()?;
    let cfg = SearchConfig { samples: a.samples, budget: a.budget, ..a.common.search_config()? };
    let seed = a.common.seed;
    let mode = a.mode.unwrap_or(if a.b.is_some() {
        SearchMode::Loop
    } else if sets.len() > 1 {
        SearchMode::Simultaneous
    } else {
        SearchMode::Optimize
    });
    if sets.len() > 1 && mode != SearchMode::Simultaneous {
        return Err(Error::Precondition("several -E sets are only used by --mode simultaneous".into()));
    }
    let e = &sets[0];
    let mut json = json!({ "command": "search", "group": group.to_string(), "seed": seed });
    let table = match mode {
        SearchMode::Optimize => {
            let results = select(cfg.install(|| set_quantities(&group, e, a.strategy, &cfg))?, a.quantity);
            json["E"] = to_json(e);
            json["results"] = to_json(&results);
            quantity_rows(&results)
        }
        SearchMode::Certify => {
            let c = certified_pair(&group, e, seed, a.budget)?;
            let mut t = Table::new(&["bound", "holds"]);
            for (k, v) in &c.holds {
                t.push(vec![k.to_string().into(), v.to_string().into()]);
            }
            json["E"] = to_json(e);
            json["certified_pair"] = to_json(&c);
            t
        }
        SearchMode::Loop => {
            let b = read_subset(&group, a.b.as_deref().ok_or_else(|| Error::Precondition("--mode loop needs -B".into()))?)?;
            let looped = loop_around(&group, e, &b)?;
            let product = if group.exponent() <= DEFAULT_LOOP_PRODUCT_CAP {
                Some(loop_product_check(&group, e, &b, DEFAULT_LOOP_PRODUCT_CAP)?)
            } else {
                None
            };
            let mut t = Table::new(&["k", "D", "spectrum"]);
            for entry in &looped.table {
                t.push(vec![entry.k.into(), entry.d.into(), format_subset(&entry.spectrum).into()]);
            }
            json["E"] = to_json(e);
            json["B"] = to_json(&b);
            json["loop_around"] = to_json(&looped);
            json["loop_product"] = to_json(&product);
            t
        }
        SearchMode::Simultaneous => {
            let basis = simultaneous_basis(&group, &sets, a.strategy, &cfg)?;
            let mut t = Table::new(&["basis"]);
            t.push(vec![basis.as_deref().map(format_subset).unwrap_or_else(|| "NONE".into()).into()]);
            json["sets"] = to_json(&sets);
            json["strategy"] = to_json(&a.strategy);
            json["basis"] = to_json(&basis);
            t
        }
        SearchMode::Partners => {
            let partners = basis_partners(&group, e, cfg.cap)?;
            let mut t = Table::new(&["B"]);
            for b in &partners {
                t.push(vec![format_subset(b).into()]);
            }
            json["E"] = to_json(e);
            json["count"] = json!(partners.len());
            json["partners"] = to_json(&partners);
            t
        }
    };
    Ok(Output::ok(json, table))
}

fn analysis_json(a: &MultiTileAnalysis) -> Value {
    let mut v = to_json(a);
    v["bounds"] = to_json(&a.level.map(|l| LevelBounds::new(l, a.distinct_count)));
    v
}

fn section_rows(a: &MultiTileAnalysis) -> Table {
    let mut t = Table::new(&["coset_rep", "elements", "translated", "class"]);
    for s in &a.sections {
        t.push(vec![
            s.coset_rep.to_string().into(),
            format_subset(&s.elements).into(),
            format_subset(&s.translated).into(),
            s.class.into(),
        ]);
    }
    t
}

fn cmd_tiling(a: &TilingArgs) -> Result<Output> {
    let group = GroupSpec::parse(&a.group)?;
    let e = read_subset(&group, &a.e)?;
    let cfg = a.common.search_config()?;
    let mut json = json!({ "command": "tiling", "group": group.to_string(), "seed": a.common.seed, "E": e });
    let mut exit = EXIT_OK;
    let h = match &a.subgroup {
        Some(gens) => Some(read_subgroup(&group, gens)?),
        None => {
            let tilings = find_multi_tiling_subgroups(&group, &e, a.common.subgroup_cap)?;
            json["tilings"] = to_json(&tilings);
            let chosen = if a.certify || a.b.is_some() {
                tilings.iter().find(|t| t.level >= 2).or(tilings.first()).map(|t| t.subgroup.clone())
            } else {
                None
            };
            if chosen.is_none() {
                let mut t = Table::new(&["H", "level", "k"]);
                for x in &tilings {
                    t.push(vec![format_subset(x.subgroup.elements()).into(), x.level.into(), x.k.into()]);
                }
                return Ok(Output::ok(json, t));
            }
            chosen
        }
    };
    let h = h.expect("set above");
    let analysis = multi_tile_analysis(&group, &e, &h)?;
    json["analysis"] = analysis_json(&analysis);
    if let Some(b) = &a.b {
        let b_h = read_subset(&group, b)?;
        let d = decompose_verify(&group, &e, &h, &b_h)?;
        if d.max_deviation > 1e-9 || d.factorization.product_residual > 1e-9 || d.factorization.unitarity_residual > 1e-9 {
            exit = EXIT_VERIFY_FAILED;
        }
        json["decomposition"] = to_json(&d);
    }
    if a.certify {
        match analysis.level {
            Some(1) => json["tile_spectrum"] = to_json(&tile_spectrum(&group, &e, &h)?),
            Some(_) => {
                let c = cfg.install(|| main_bound_certify(&group, &e, &h, &cfg))?;
                if c.pair.is_some() && !c.all_hold() {
                    exit = EXIT_VERIFY_FAILED;
                }
                json["certificate"] = to_json(&c);
            }
            None => json["certificate"] = Value::Null,
        }
    }
    Ok(Output { json, table: section_rows(&analysis), exit })
}

fn cmd_verify(a: &VerifyArgs) -> Result<Output> {
    if a.list {
        let mut t = Table::new(&["check", "about"]);
        for (name, about) in verify::check_list() {
            t.push(vec![name.to_string().into(), about.to_string().into()]);
        }
        let json = json!({ "command": "verify", "seed": a.common.seed, "checks": t.records() });
        return Ok(Output::ok(json, t));
    }
    let cfg = verify::VerifyConfig {
        seed: a.common.seed,
        cases: a.cases,
        tol: a.common.tol,
        only: a.only.clone(),
        search: a.common.search_config()?,
    };
    let report = verify::run_suite(&cfg)?;
    let mut t = Table::new(&["check", "cases", "failures", "worst_slack"]);
    for c in &report.checks {
        t.push(vec![c.name.to_string().into(), c.cases.into(), c.failures.into(), c.worst_slack.into()]);
    }
    let exit = if report.passed() { EXIT_OK } else { EXIT_VERIFY_FAILED };
    let mut json = to_json(&report);
    json["command"] = json!("verify");
    Ok(Output { json, table: t, exit })
}

fn cmd_examples(a: &ExamplesArgs) -> Result<Output> {
    let cfg = a.common.search_config()?;
    if a.family == "list" {
        let mut t = Table::new(&["family", "parameter", "about"]);
        for (name, param, about) in reproduce::FAMILIES {
            t.push(vec![name.to_string().into(), param.to_string().into(), about.to_string().into()]);
        }
        let json = json!({ "command": "examples", "seed": a.common.seed, "families": t.records() });
        return Ok(Output::ok(json, t));
    }
    let params = match a.m.as_deref().or(a.p.as_deref()) {
        Some(text) => reproduce::parse_range(text)?,
        None => reproduce::default_range(&a.family),
    };
    let table = cfg.install(|| reproduce::run_family(&a.family, &params, a.strategy, &cfg))?;
    let json = json!({
        "command": "examples",
        "family": a.family,
        "seed": a.common.seed,
        "strategy": a.strategy,
        "rows": table.records(),
    });
    Ok(Output::ok(json, table))
}

/// Parses `args` (including the program name), runs the command and writes
/// its output. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_BAD_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let (common, default_format) = match &cli.command {
        Command::Quantities(a) => (&a.common, Format::Json),
        Command::Search(a) => (&a.common, Format::Json),
        Command::Tiling(a) => (&a.common, Format::Json),
        Command::Verify(a) => (&a.common, Format::Json),
        Command::Examples(a) => (&a.common, Format::Csv),
    };
    let result = match &cli.command {
        Command::Quantities(a) => cmd_quantities(a),
        Command::Search(a) => cmd_search(a),
        Command::Tiling(a) => cmd_tiling(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Examples(a) => cmd_examples(a),
    };
    match result {
        Ok(output) => {
            let text = output.render(common.format.unwrap_or(default_format), common.seed);
            if out.write_all(text.as_bytes()).is_err() {
                return EXIT_BAD_INPUT;
            }
            output.exit
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("riesz").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn json_of(args: &[&str]) -> Value {
        let (code, out, err) = run_args(args);
        assert_eq!(code, 0, "{err}");
        serde_json::from_str(&out).unwrap()
    }

    #[test]
    fn pair_quantities() {
        let v = json_of(&["quantities", "-g", "Z3", "-E", "(0),(1)", "-B", "(0),(1)"]);
        assert_eq!(v["report"]["rho"].as_f64().unwrap(), 3.0);
        assert_eq!(v["seed"], 0);
        let v = json_of(&["quantities", "-g", "Z2", "-E", "(0)", "-B", "(0)"]);
        assert_eq!(v["report"]["rho"].as_f64().unwrap(), 1.0);
    }

    #[test]
    fn set_quantities_rho() {
        let v = json_of(&["quantities", "-g", "Z3^2", "-E", "(0,0),(0,1),(1,0),(1,1)", "--set", "--q", "rho"]);
        let results = v["results"].as_array().unwrap();
        assert_eq!(results.len(), 1);
        assert!((results[0]["value"].as_f64().unwrap() - 6.8541).abs() < 1e-4);
        assert!(results[0]["certificates"]["holds"].as_bool().unwrap());
    }

    #[test]
    fn singular_pair_renders_inf() {
        let v = json_of(&["quantities", "-g", "Z4", "-E", "0,2", "-B", "0,2"]);
        assert_eq!(v["report"]["rho"], "inf");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["quantities", "-g", "Q3", "-E", "0"]).0, EXIT_BAD_INPUT);
        assert_eq!(run_args(&["quantities", "-g", "Z3", "-E", "(0,1)", "-B", "0"]).0, EXIT_BAD_INPUT);
        assert_eq!(run_args(&["quantities", "-g", "Z3", "-E", "0,1", "-B", "0"]).0, EXIT_BAD_INPUT);
        assert_eq!(run_args(&["bogus"]).0, EXIT_BAD_INPUT);
        assert_eq!(run_args(&["quantities", "-g", "Z8", "-E", "0,1,2", "--set", "--cap", "5"]).0, EXIT_CAP_EXCEEDED);
        assert_eq!(run_args(&["quantities", "-g", "Z8", "-E", "0,1", "--set", "--cap", "0"]).0, EXIT_BAD_INPUT);
        assert_eq!(run_args(&["verify", "--only", "trace-identity", "-n", "5", "--tol", "-1"]).0, EXIT_VERIFY_FAILED);
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn tiling_commands() {
        let v = json_of(&["tiling", "-g", "Z2^2", "-E", "(0,0),(0,1),(1,0),(1,1)"]);
        let tilings = v["tilings"].as_array().unwrap();
        assert_eq!(tilings.len(), 5);
        for t in tilings {
            assert_eq!(t["level"].as_u64().unwrap() as usize, t["H"].as_array().unwrap().len());
        }
        let v = json_of(&["tiling", "-g", "Z4", "-E", "0,1,2", "-H", "2"]);
        assert!(v["analysis"]["level"].is_null());
        assert!(v["analysis"]["bounds"].is_null());

        let e = "(0,0),(2,0),(0,1),(1,1),(0,2),(1,2)";
        let v = json_of(&["tiling", "-g", "Z3^2", "-E", e, "--certify"]);
        assert_eq!(v["analysis"]["level"], 2);
        let rho = v["certificate"]["pair"]["report"]["rho"].as_f64().unwrap();
        assert!(rho < 32.0 * std::f64::consts::E);
        let v = json_of(&["tiling", "-g", "Z3^2", "-E", e, "-H", "(1,0)", "-B", "(0,0),(1,0)"]);
        assert!(v["decomposition"]["max_deviation"].as_f64().unwrap() < 1e-9);
    }

    #[test]
    fn search_modes() {
        let v = json_of(&["search", "-g", "Z2^2", "-E", "(0,0),(0,1)", "-E", "(0,0),(1,0)", "-E", "(0,0),(1,1)"]);
        assert!(v["basis"].is_null());
        let (_, out, _) = run_args(&["search", "-g", "Z2^2", "-E", "(0,0),(0,1)", "-E", "(0,0),(1,0)", "--format", "table"]);
        assert!(!out.contains("NONE"));
        let v = json_of(&["search", "-g", "Z5", "-E", "0,1", "-B", "0,1"]);
        assert_eq!(v["loop_around"]["best_k"], 2);
        assert_eq!(v["loop_product"]["nearest_integer"], 5);
        let v = json_of(&["search", "-g", "Z4", "-E", "0,1", "--mode", "partners"]);
        // ω^a ≠ ω^b for a ≠ b, so every 2-subset works
        assert_eq!(v["count"], 6);
        let v = json_of(&["search", "-g", "Z7", "-E", "0,1,3", "--mode", "certify", "--seed", "3"]);
        assert_eq!(v["certified_pair"]["seed"], 3);
    }

    #[test]
    fn examples_csv() {
        let (code, out, _) = run_args(&["examples", "condtoinfty", "--m", "2..3"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "m,n,rho,lower_bound,witness,seed");
        assert_eq!(lines.len(), 3);
        assert_eq!(run_args(&["examples", "nope"]).0, EXIT_BAD_INPUT);
    }

    #[test]
    fn output_is_repeatable() {
        let args = ["search", "-g", "Z12", "-E", "0,1,5", "--strategy", "random-loop", "--seed", "9", "--samples", "8"];
        let a = run_args(&args);
        let b = run_args(&args);
        assert_eq!(a, b);
        let mut threaded = args.to_vec();
        threaded.extend(["--threads", "3"]);
        assert_eq!(run_args(&threaded).1, a.1);
    }

    #[test]
    fn subset_files() {
        let dir = std::env::temp_dir().join(format!("riesz-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("e.txt");
        std::fs::write(&path, "# E\n(0,0)\n(0,1)\n(1,0)\n(1,1)\n").unwrap();
        let arg = format!("@{}", path.display());
        let v = json_of(&["quantities", "-g", "Z3^2", "-E", &arg, "--set", "--q", "U"]);
        assert!((v["results"][0]["normalized"].as_f64().unwrap() - 1.5).abs() < 1e-9);
        std::fs::remove_dir_all(dir).unwrap();
    }
}
