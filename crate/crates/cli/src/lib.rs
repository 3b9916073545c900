//! Batch driver for the `logdrw` verification suites: configuration, the canonical
//! text encoding of elements, JSON reports and the suites themselves.

pub mod config;
pub mod report;
pub mod serialize;
pub mod suites;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use logdrw::homology::{homology_of, weight_subcomplex, Variant};
use logdrw::{Error, Result};
use serde_json::json;

use config::{RawConfig, SuiteConfig};
use report::{Outcome, Report, Table, Tally};

#[derive(Debug, Parser)]
#[command(name = "logdrw", version, about = "Verification suites for log de Rham-Witt complexes of local models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Default)]
struct Common {
    /// `key=value` file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model descriptor such as `poly:p=3,n=2,e=1,f=0` or `semistable:p=2,n=2,e=2,f=0,d=2`.
    #[arg(long)]
    model: Option<String>,
    /// Truncation level (largest level for suites that sweep levels).
    #[arg(long)]
    m: Option<u32>,
    /// Largest numerator of a grid weight entry.
    #[arg(long = "max-num")]
    max_num: Option<u64>,
    /// Largest p-exponent of a grid weight denominator.
    #[arg(long = "max-den")]
    max_den: Option<u32>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated list of positive rationals.
    #[arg(long)]
    eps: Option<String>,
    /// Witt vector length.
    #[arg(long = "N")]
    len: Option<usize>,
    /// Record wall-clock time in the report (makes it run-dependent).
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one verification suite.
    Verify {
        #[arg(long)]
        suite: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Elementary divisors of one weight piece.
    Cohomology {
        /// Weight such as `[1,1/p^1,-inf]`.
        #[arg(long)]
        weight: Option<String>,
        /// `absolute`, `relative`, `lift` or `steenbrink-row:j`.
        #[arg(long)]
        variant: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Per-weight comparison with the lifted de Rham complex.
    CompareLift(Common),
    /// The weight spectral sequence.
    E1(Common),
    /// Gauss norm identities and bounds.
    Gauss(Common),
    /// Mayer-Vietoris exactness.
    Mv(Common),
    /// The Steenbrink double complex.
    Steenbrink(Common),
}

fn raw_config(common: &Common, extra: &[(&str, Option<String>)]) -> Result<RawConfig> {
    let mut raw = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Malformed(format!("cannot read {}: {e}", path.display())))?;
            config::parse_file(&text)?
        }
        None => RawConfig::new(),
    };
    let flags = [
        ("model", common.model.clone()),
        ("m", common.m.map(|x| x.to_string())),
        ("max-num", common.max_num.map(|x| x.to_string())),
        ("max-den", common.max_den.map(|x| x.to_string())),
        ("trials", common.trials.map(|x| x.to_string())),
        ("seed", common.seed.map(|x| x.to_string())),
        ("out", common.out.as_ref().map(|x| x.display().to_string())),
        ("eps", common.eps.clone()),
        ("N", common.len.map(|x| x.to_string())),
    ];
    for (k, v) in flags.iter().chain(extra.iter()) {
        if let Some(v) = v {
            raw.insert(k.to_string(), v.clone());
        }
    }
    Ok(raw)
}

fn cohomology(cfg: &SuiteConfig) -> Result<Outcome> {
    let model = &cfg.model;
    let text = cfg
        .weight
        .as_ref()
        .ok_or_else(|| Error::Malformed("cohomology needs --weight".into()))?;
    let k = serialize::parse_weight(model.p, text)?;
    k.validate(model)?;
    let variant: Variant = cfg.variant.as_deref().unwrap_or("absolute").parse()?;
    let mut t = Tally::new("complex_well_formed");
    let mut rows = Vec::new();
    match weight_subcomplex(model, cfg.m, &k, variant).and_then(|c| homology_of(&c)) {
        Ok(h) => {
            t.record(true, Vec::new);
            rows.push(json!({
                "m": cfg.m,
                "weight": serialize::weight_text(model.p, &k),
                "variant": variant.to_string(),
                "lo": h.lo,
                "divisors": h.divisor_strings(),
            }));
        }
        Err(e) => t.record(false, || vec![format!("error: {e}")]),
    }
    Ok(Outcome {
        checks: vec![t.finish()],
        tables: vec![Table {
            name: format!("cohomology {model}"),
            rows,
        }],
    })
}

/// Builds the report for `suite` on `cfg`.
pub fn run_report(suite: &str, cfg: &SuiteConfig, timing: bool) -> Result<Report> {
    let start = Instant::now();
    let outcome = match suite {
        "cohomology" => cohomology(cfg)?,
        _ => suites::run_suite(suite, cfg)?,
    };
    let ms = timing.then(|| start.elapsed().as_millis() as u64);
    Ok(Report::new(suite, cfg.echo(), outcome, ms))
}

fn execute(command: Command) -> Result<Report> {
    let (suite, common, extra) = match command {
        Command::Verify { suite, common } => {
            let extra = vec![("suite", suite)];
            ("", common, extra)
        }
        Command::Cohomology {
            weight,
            variant,
            common,
        } => ("cohomology", common, vec![("weight", weight), ("variant", variant)]),
        Command::CompareLift(c) => ("comparison", c, vec![]),
        Command::E1(c) => ("e1", c, vec![]),
        Command::Gauss(c) => ("gauss", c, vec![]),
        Command::Mv(c) => ("mv", c, vec![]),
        Command::Steenbrink(c) => ("steenbrink", c, vec![]),
    };
    let raw = raw_config(&common, &extra)?;
    let mut cfg = SuiteConfig::from_raw(&raw)?;
    let suite = if suite.is_empty() {
        if cfg.suite.is_empty() {
            return Err(Error::Malformed("verify needs --suite".into()));
        }
        cfg.suite.clone()
    } else {
        cfg.suite = suite.to_string();
        suite.to_string()
    };
    let report = run_report(&suite, &cfg, common.timing)?;
    let json = report.to_json();
    match &cfg.out {
        Some(path) => std::fs::write(path, json)
            .map_err(|e| Error::Malformed(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{json}"),
    }
    Ok(report)
}

/// Runs the command line `argv` (program name first). Returns 0 when every check
/// passes, 1 when a check fails and 2 on invalid input.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(report) => {
            for c in &report.checks {
                eprintln!("{:<4} {} ({} instances)", if c.passed() { "ok" } else { "FAIL" }, c.name, c.details.instances);
            }
            if report.passed() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
