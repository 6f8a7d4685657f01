//! Command-line front end.
//!
//! Exit codes: 0 when the analysis ran (whatever the verdict), 1 for bad
//! inputs or failed preconditions, 2 for internal failures.

use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::frame::analyze;
use crate::gallery::{self, GalleryName};
use crate::io::FrameSystemFile;
use crate::norm::NormKind;
use crate::operator::DenseOperator;
use crate::perturb::{basis_perturbation_check, operator_perturbation_check, pair_perturbation_check, PerturbationOptions};
use crate::report::{growth_csv, InputRecord, Report};
use crate::reproduce::{reproduce, Reproduction, ReproductionId};
use crate::search::{SearchOptions, DEFAULT_EXHAUSTIVE_CAP, DEFAULT_RESTARTS};
use crate::unc::{unc_conditions, Condition, UncOptions, UncScope, UncThresholds, DEFAULT_THRESHOLD_FACTOR};
use crate::weave::{worst_weaving, WeaveOptions, DEFAULT_BLOW_UP_THRESHOLD};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "weavelab", version, about = "Approximate Schauder frames and their weavings in finite dimensions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Frame constants of one system.
    Analyze {
        /// File path or `gallery:<name>:<d>`.
        input: String,
        /// Read the system with this norm instead of the file's.
        #[arg(long)]
        norm: Option<NormKind>,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Worst weaving constant of two systems.
    WeaveSearch {
        a: String,
        b: String,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long = "blowup-threshold", default_value_t = DEFAULT_BLOW_UP_THRESHOLD)]
        blowup_threshold: f64,
        /// `d0..d1`: regenerate both gallery systems for every d in the range.
        #[arg(long, value_parser = parse_range)]
        sweep: Option<RangeInclusive<usize>>,
        /// Log every pattern (only when 2^n ≤ 4096).
        #[arg(long)]
        log_all_patterns: bool,
        /// Growth table as `d,constant` (sweeps only).
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Conditions for every weaving of two unconditional bases to be unconditional.
    CheckWoven {
        a: String,
        b: String,
        /// Subset such as `v,vi`; all six by default.
        #[arg(long, value_delimiter = ',')]
        conditions: Vec<Condition>,
        /// Thresholds as multiples of the larger unconditional constant of the two bases.
        #[arg(long, default_value_t = DEFAULT_THRESHOLD_FACTOR)]
        threshold_factor: f64,
        /// Evaluate this many seeded random patterns instead of all of them.
        #[arg(long)]
        sampled: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Include every per-pattern evaluation in the report.
        #[arg(long)]
        evaluations: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Perturbation budgets and certificates.
    Perturb {
        input: String,
        /// Compare against `(a·x_i, f_i)`.
        #[arg(long, group = "target")]
        op_scale: Option<f64>,
        /// Compare against a second system.
        #[arg(long, group = "target")]
        pair: Option<String>,
        /// Compare a basis against candidate vectors.
        #[arg(long, group = "target")]
        basis_candidate: Option<String>,
        /// Search weavings even when the budget fails.
        #[arg(long)]
        informational: bool,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Write a gallery family as a system file.
    Example {
        name: GalleryName,
        #[arg(long)]
        dim: usize,
        /// Also write the biorthogonal functionals.
        #[arg(long)]
        with_functionals: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Growth tables for the counterexample families.
    Reproduce {
        /// Which tables; all four by default.
        ids: Vec<ReproductionId>,
        /// `d0..d1`; each table's default range otherwise (odd d skipped for the subspace pair).
        #[arg(long, value_parser = parse_range)]
        dims: Option<RangeInclusive<usize>>,
        /// Headline growth columns as `id,d,value`.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Heuristic,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SearchArgs {
    #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
    pub mode: Mode,
    /// Largest 2^n enumerated before falling back to local search.
    #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_CAP)]
    pub exhaustive_cap: u64,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl SearchArgs {
    fn options(&self) -> SearchOptions {
        let mut o = match self.mode {
            Mode::Exhaustive => SearchOptions { seed: self.seed, ..SearchOptions::default() },
            Mode::Heuristic => SearchOptions::heuristic(self.restarts, self.seed),
        };
        o.exhaustive_cap = self.exhaustive_cap;
        o
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Write here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_range(s: &str) -> std::result::Result<RangeInclusive<usize>, String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected d0..d1, got {s:?}"))?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad range start in {s:?}"))?;
    let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| format!("bad range end in {s:?}"))?;
    if a > b {
        return Err(format!("empty range {s:?}"));
    }
    Ok(a..=b)
}

/// A resolved input: the file contents plus a provenance record.
struct Loaded {
    file: FrameSystemFile,
    record: InputRecord,
}

enum Source {
    Path(PathBuf),
    Gallery(GalleryName, Option<usize>),
}

fn source(arg: &str) -> Result<Source> {
    let Some(rest) = arg.strip_prefix("gallery:") else {
        return Ok(Source::Path(PathBuf::from(arg)));
    };
    let (name, d) = match rest.split_once(':') {
        Some((n, d)) => (n, Some(d.parse().map_err(|_| Error::Input(format!("{arg}: bad dimension {d:?}")))?)),
        None => (rest, None),
    };
    Ok(Source::Gallery(name.parse()?, d))
}

fn gallery_file(name: GalleryName, d: usize) -> Result<FrameSystemFile> {
    Ok(FrameSystemFile::from_system(&gallery::system(name, d)?))
}

fn load(arg: &str) -> Result<Loaded> {
    match source(arg)? {
        Source::Path(p) => {
            let bytes = fs::read(&p).map_err(|e| Error::Input(format!("{}: {e}", p.display())))?;
            let text = String::from_utf8(bytes.clone()).map_err(|_| Error::Input(format!("{}: not UTF-8", p.display())))?;
            let file = FrameSystemFile::parse(&text).map_err(|e| match e {
                Error::Input(m) => Error::Input(format!("{}: {m}", p.display())),
                other => other,
            })?;
            Ok(Loaded { file, record: InputRecord::new(arg, &bytes) })
        }
        Source::Gallery(name, Some(d)) => {
            let file = gallery_file(name, d)?;
            let record = InputRecord::new(arg, file.to_json().as_bytes());
            Ok(Loaded { file, record })
        }
        Source::Gallery(name, None) => Err(Error::Input(format!("gallery:{name} needs a dimension, e.g. gallery:{name}:4"))),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

/// Failure of a subcommand, already classified by exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: EXIT_INPUT, message: e.to_string() }
    }
}

fn write_out(path: &Option<PathBuf>, text: &str) -> std::result::Result<(), Failure> {
    match path {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(p: &Path, text: &str) -> std::result::Result<(), Failure> {
    fs::write(p, text).map_err(|e| Failure { code: EXIT_INTERNAL, message: format!("{}: {e}", p.display()) })
}

fn emit(out: &OutArgs, report: Report) -> std::result::Result<(), Failure> {
    write_out(&out.out, &report.to_json())
}

pub fn run(cli: Cli) -> std::result::Result<(), Failure> {
    match cli.command {
        Command::Analyze { input, norm, search, out } => {
            let l = load(&input)?;
            let f = l.file.to_system(norm)?;
            let report = analyze(&f, &search.options());
            let params = json!({ "norm": f.norm(), "search": search });
            emit(&out, Report::new("analyze", vec![l.record], params, to_value(&report)))
        }
        Command::WeaveSearch { a, b, search, blowup_threshold, sweep, log_all_patterns, csv, out } => {
            let opts = WeaveOptions {
                search: search.options(),
                blow_up_threshold: blowup_threshold,
                log_all_patterns,
                ..WeaveOptions::default()
            };
            let params = json!({
                "search": search,
                "blowup_threshold": blowup_threshold,
                "log_all_patterns": log_all_patterns,
                "sweep": sweep.as_ref().map(|r| [*r.start(), *r.end()]),
            });
            match sweep {
                None => {
                    if csv.is_some() {
                        return Err(Error::Input("--csv needs --sweep".into()).into());
                    }
                    let (la, lb) = (load(&a)?, load(&b)?);
                    let result = worst_weaving(&la.file.to_system(None)?, &lb.file.to_system(None)?, &opts)?;
                    emit(&out, Report::new("weave-search", vec![la.record, lb.record], params, to_value(&result)))
                }
                Some(range) => {
                    let (Source::Gallery(na, _), Source::Gallery(nb, _)) = (source(&a)?, source(&b)?) else {
                        return Err(Error::Input("--sweep regenerates systems and needs gallery:<name> inputs".into()).into());
                    };
                    let mut rows = Vec::new();
                    let mut inputs = Vec::new();
                    let mut table = Vec::new();
                    for d in range {
                        let (fa, fb) = (gallery_file(na, d)?, gallery_file(nb, d)?);
                        inputs.push(InputRecord::new(format!("gallery:{na}:{d}"), fa.to_json().as_bytes()));
                        inputs.push(InputRecord::new(format!("gallery:{nb}:{d}"), fb.to_json().as_bytes()));
                        let r = worst_weaving(&fa.to_system(None)?, &fb.to_system(None)?, &opts)?;
                        table.push((d, r.worst_constant));
                        rows.push(json!({ "d": d, "result": r }));
                    }
                    if let Some(p) = &csv {
                        write_file(p, &growth_csv("worst_constant", &table))?;
                    }
                    emit(&out, Report::new("weave-search", inputs, params, json!({ "sweep": rows })))
                }
            }
        }
        Command::CheckWoven { a, b, conditions, threshold_factor, sampled, seed, evaluations, out } => {
            let (la, lb) = (load(&a)?, load(&b)?);
            let scope = sampled.map(|count| UncScope::Sampled { count, seed });
            let opts = UncOptions { scope, thresholds: UncThresholds::uniform(threshold_factor), seed, ..UncOptions::default() };
            let verdict =
                unc_conditions(&la.file.to_system(None)?, &lb.file.to_system(None)?, &conditions, &opts, evaluations)?;
            let params = json!({
                "conditions": if conditions.is_empty() { Condition::ALL.to_vec() } else { conditions },
                "threshold_factor": threshold_factor,
                "sampled": sampled,
                "seed": seed,
            });
            emit(&out, Report::new("check-woven", vec![la.record, lb.record], params, to_value(&verdict)))
        }
        Command::Perturb { input, op_scale, pair, basis_candidate, informational, search, out } => {
            let l = load(&input)?;
            let f = l.file.to_system(None)?;
            let opts = PerturbationOptions { weave: WeaveOptions { search: search.options(), ..WeaveOptions::default() }, informational };
            let mut inputs = vec![l.record];
            let params = json!({ "op_scale": op_scale, "pair": pair, "basis_candidate": basis_candidate, "informational": informational, "search": search });
            let result = if let Some(p) = &pair {
                let lp = load(p)?;
                let r = pair_perturbation_check(&f, &lp.file.to_system(None)?, &opts)?;
                inputs.push(lp.record);
                json!({ "pair": r })
            } else if let Some(c) = &basis_candidate {
                let lc = load(c)?;
                let r = basis_perturbation_check(&f, &lc.file.vectors, search.seed)?;
                inputs.push(lc.record);
                json!({ "basis": r })
            } else {
                let a = op_scale.unwrap_or(1.0);
                let t = DenseOperator::identity(f.dim(), f.norm()).scale(a);
                json!({ "operator": operator_perturbation_check(&f, &t, &opts)? })
            };
            emit(&out, Report::new("perturb", inputs, params, result))
        }
        Command::Example { name, dim, with_functionals, out } => {
            let v = gallery::vectors(name, dim)?;
            let mut file = FrameSystemFile::from_vectors(dim, name.norm(), v, format!("{name}[{dim}]"));
            if with_functionals {
                file = gallery_file(name, dim)?;
            }
            write_out(&out.out, &file.to_json())
        }
        Command::Reproduce { ids, dims, csv, out } => {
            let ids = if ids.is_empty() { ReproductionId::ALL.to_vec() } else { ids };
            let mut tables = Vec::new();
            let mut flat = String::from("id,d,value\n");
            for id in &ids {
                let d: Vec<usize> = match &dims {
                    Some(r) => r.clone().filter(|d| *id != ReproductionId::SubspacePair || d % 2 == 0).collect(),
                    None => id.default_dims(),
                };
                let r: Reproduction = reproduce(*id, &d)?;
                for (d, v) in r.growth() {
                    flat.push_str(&format!("{id},{d},{v}\n"));
                }
                tables.push(json!({ "id": id, "table": r }));
            }
            if let Some(p) = &csv {
                write_file(p, &flat)?;
            }
            let params = json!({ "ids": ids, "dims": dims.as_ref().map(|r| [*r.start(), *r.end()]) });
            emit(&out, Report::new("reproduce", Vec::new(), params, Value::Array(tables)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2..10").unwrap(), 2..=10);
        assert_eq!(parse_range("2..=3").unwrap(), 2..=3);
        assert!(parse_range("5..2").is_err());
        assert!(parse_range("5").is_err());
    }

    #[test]
    fn gallery_sources() {
        assert!(matches!(source("gallery:summing-c0:3").unwrap(), Source::Gallery(GalleryName::SummingC0, Some(3))));
        assert!(matches!(source("gallery:standard").unwrap(), Source::Gallery(GalleryName::StandardL1, None)));
        assert!(source("gallery:nope:3").is_err());
        assert!(load("gallery:summing-c0").is_err());
    }

    #[test]
    fn cli_parses() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
        let c = Cli::try_parse_from(["weavelab", "check-woven", "a", "b", "--conditions", "v,vi"]).unwrap();
        let Command::CheckWoven { conditions, .. } = c.command else { panic!() };
        assert_eq!(conditions, vec![Condition::V, Condition::Vi]);
    }
}
