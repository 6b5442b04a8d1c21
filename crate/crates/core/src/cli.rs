//! Command-line front end.
//!
//! Exit codes: 0 feasible / success, 1 infeasible / invalid, 2 undecided,
//! 64 usage or parse error, 65 dimension or outcome cap, 66 non-monotone
//! bisection bracket, 74 I/O error.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::compat::{build_stack, index_of_incompatibility, is_k_compatible, SolverOracle};
use crate::error::{Error, Result};
use crate::feasibility::{solve_with, threshold_bisect, FeasibilityProblem, SolverConfig, Verdict};
use crate::observable::{Observable, ObservableSet};
use crate::qubit::{noisy_spin, Axis};
use crate::stacks::{enumerate_stacks, summary_csv, validate_stack, CompatibilityStack};
use crate::symmetry::symmetrize_observable;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_UNDECIDED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_CAP: i32 = 65;
pub const EXIT_NON_MONOTONE: i32 = 66;
pub const EXIT_IO: i32 = 74;

#[derive(Debug, Parser)]
#[command(
    name = "kcompat",
    version,
    about = "k-compatibility of quantum observables"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalOpts,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Iteration budget per solver run (default: KCOMPAT_BUDGET or 20000).
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Multiplies the iteration budget.
    #[arg(long, global = true, default_value_t = 1)]
    pub budget_multiplier: usize,
    /// Worker threads for sweeps and stack construction.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
    /// Print run metadata to stderr.
    #[arg(long, global = true)]
    pub meta: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Joint measurability of a set of observables.
    Check { file: PathBuf },
    /// k-compatibility of a set of observables.
    Kcheck {
        file: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Index of incompatibility.
    Index { file: PathBuf },
    /// Compatibility stack of a set of observables.
    Stack { file: PathBuf },
    /// All compatibility stacks on n vertices up to relabeling.
    EnumStacks {
        n: usize,
        /// Print the summary table (CSV) instead of the stack list.
        #[arg(long)]
        summary: bool,
        /// Also write the summary table to this path.
        #[arg(long)]
        summary_out: Option<PathBuf>,
    },
    /// Feasibility threshold of a built-in family by bisection.
    Threshold {
        family: Family,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value_t = 0.0)]
        lo: f64,
        #[arg(long, default_value_t = 1.0)]
        hi: f64,
    },
    /// Index of a built-in family over a parameter grid, as CSV.
    Sweep {
        family: Family,
        /// `start:stop:step`, inclusive.
        #[arg(long)]
        grid: Grid,
    },
    /// Validate an observable, observable set or stack file.
    Validate { file: PathBuf },
}

/// Built-in noisy spin families parametrized by a common noise parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `{X_t, Y_t}`.
    PairXy,
    /// `{X_t, Y_t, Z_t}` at one copy.
    TripleK1,
    /// `{X_t, Y_t, Z_t}` at two copies.
    TripleK2,
    /// `{X_t, Y_t, Z_t}`, index of incompatibility.
    TripleIndex,
}

impl Family {
    fn axes(self) -> &'static [Axis] {
        match self {
            Family::PairXy => &[Axis::X, Axis::Y],
            _ => &Axis::ALL,
        }
    }

    pub fn set(self, t: f64) -> Result<ObservableSet> {
        let members = self
            .axes()
            .iter()
            .map(|&a| noisy_spin(a, t))
            .collect::<Result<Vec<_>>>()?;
        let names: Vec<String> = self
            .axes()
            .iter()
            .map(|a| a.to_string().to_uppercase())
            .collect();
        ObservableSet::named(names, members)
    }

    fn copies(self) -> Option<usize> {
        match self {
            Family::PairXy | Family::TripleK1 => Some(1),
            Family::TripleK2 => Some(2),
            Family::TripleIndex => None,
        }
    }

    /// The feasibility problem whose transition the threshold command locates.
    pub fn problem(self, t: f64) -> Result<FeasibilityProblem> {
        let k = self.copies().ok_or_else(|| {
            Error::InvalidArgument(format!("family `{self}` has no single copy count"))
        })?;
        let targets = self
            .set(t)?
            .members()
            .iter()
            .map(|a| symmetrize_observable(a, k))
            .collect::<Result<Vec<_>>>()?;
        if k == 1 {
            FeasibilityProblem::new(targets)
        } else {
            FeasibilityProblem::symmetric(targets, k)
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::PairXy => "pair:xy",
            Family::TripleK1 => "triple:xyz:k1",
            Family::TripleK2 => "triple:xyz:k2",
            Family::TripleIndex => "triple:xyz:index",
        })
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pair:xy" => Ok(Family::PairXy),
            "triple:xyz:k1" => Ok(Family::TripleK1),
            "triple:xyz:k2" => Ok(Family::TripleK2),
            "triple:xyz:index" => Ok(Family::TripleIndex),
            _ => Err(Error::Parse(format!(
                "unknown family `{s}` (expected pair:xy, triple:xyz:k1, triple:xyz:k2 or triple:xyz:index)"
            ))),
        }
    }
}

/// An inclusive grid `start:stop:step` within `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub points: Vec<f64>,
}

impl FromStr for Grid {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad grid `{s}`")))
            })
            .collect::<Result<_>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(Error::Parse(format!("grid `{s}` is not start:stop:step")));
        };
        if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&stop) || start > stop {
            return Err(Error::InvalidArgument(format!("grid `{s}` outside [0, 1]")));
        }
        if step.is_nan() || step <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "grid step {step} must be positive"
            )));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        let points = (0..count)
            .map(|i| round_sig(start + i as f64 * step))
            .collect();
        Ok(Grid { points })
    }
}

/// `x` rounded to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    format!("{x:.11e}").parse().expect("formatted float")
}

/// Parses `args` (including the program name), runs, and returns the exit
/// code. Results go to `stdout` (or `--out`), diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => EXIT_USAGE,
            };
        }
    };
    let start = Instant::now();
    let outcome = execute(&cli);
    if cli.global.meta {
        let meta = json!({
            "version": env!("CARGO_PKG_VERSION"),
            "command": command_name(&cli.command),
            "elapsed_ms": start.elapsed().as_millis() as u64,
            "jobs": cli.global.jobs.unwrap_or_else(rayon::current_num_threads),
        });
        let _ = writeln!(stderr, "{meta}");
    }
    match outcome {
        Ok(Output { body, code }) => {
            let written = match &cli.global.out {
                Some(path) => {
                    std::fs::write(path, body.as_bytes()).map_err(|e| Error::Io(annotate(e, path)))
                }
                None => stdout.write_all(body.as_bytes()).map_err(Error::Io),
            };
            match written {
                Ok(()) => code,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    EXIT_IO
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CapExceeded { .. } => EXIT_CAP,
        Error::NonMonotone { .. } => EXIT_NON_MONOTONE,
        Error::Undecided(_) => EXIT_UNDECIDED,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Check { .. } => "check",
        Command::Kcheck { .. } => "kcheck",
        Command::Index { .. } => "index",
        Command::Stack { .. } => "stack",
        Command::EnumStacks { .. } => "enum-stacks",
        Command::Threshold { .. } => "threshold",
        Command::Sweep { .. } => "sweep",
        Command::Validate { .. } => "validate",
    }
}

struct Output {
    body: String,
    code: i32,
}

impl Output {
    fn json(value: &impl Serialize, code: i32) -> Self {
        let mut body = serde_json::to_string_pretty(value).expect("serializable");
        body.push('\n');
        Output { body, code }
    }
}

fn annotate(e: std::io::Error, path: &Path) -> std::io::Error {
    std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(annotate(e, path)))?;
    Ok(serde_json::from_str(&text)?)
}

/// An observable set file; a single observable object is a one-member set.
fn read_set(path: &Path) -> Result<ObservableSet> {
    let value = read_json(path)?;
    if value.get("effects").is_some() {
        let obs: Observable = serde_json::from_value(value)?;
        return ObservableSet::new(vec![obs]);
    }
    Ok(serde_json::from_value(value)?)
}

fn solver_config(global: &GlobalOpts) -> Result<SolverConfig> {
    let mut config = SolverConfig::from_env()?;
    if let Some(b) = global.budget {
        config.budget = b;
    }
    if global.budget_multiplier == 0 {
        return Err(Error::InvalidArgument(
            "budget multiplier must be positive".into(),
        ));
    }
    config.budget = config.budget.saturating_mul(global.budget_multiplier);
    Ok(config)
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Feasible => EXIT_OK,
        Verdict::Infeasible => EXIT_INFEASIBLE,
        Verdict::Undecided => EXIT_UNDECIDED,
    }
}

fn with_pool<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(Error::InvalidArgument("--jobs must be positive".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

fn execute(cli: &Cli) -> Result<Output> {
    let config = solver_config(&cli.global)?;
    match &cli.command {
        Command::Check { file } => {
            let set = read_set(file)?;
            let report = solve_with(&FeasibilityProblem::new(set.members().to_vec())?, &config)?;
            Ok(Output::json(&report, verdict_code(report.verdict)))
        }
        Command::Kcheck { file, k } => {
            let set = read_set(file)?;
            let report = is_k_compatible(&set, *k, &config)?;
            Ok(Output::json(&report, verdict_code(report.verdict)))
        }
        Command::Index { file } => {
            let set = read_set(file)?;
            let result = index_of_incompatibility(&set, &config)?;
            Ok(Output::json(&result, EXIT_OK))
        }
        Command::Stack { file } => {
            let set = read_set(file)?;
            let built = with_pool(cli.global.jobs, || {
                build_stack(&set, &SolverOracle::new(config.clone()))
            })??;
            Ok(Output::json(&built.to_json(), EXIT_OK))
        }
        Command::EnumStacks {
            n,
            summary,
            summary_out,
        } => {
            let stacks = enumerate_stacks(*n)?;
            let csv = summary_csv(&stacks, *n)?;
            if let Some(path) = summary_out {
                std::fs::write(path, csv.as_bytes()).map_err(|e| Error::Io(annotate(e, path)))?;
            }
            if *summary {
                Ok(Output {
                    body: csv,
                    code: EXIT_OK,
                })
            } else {
                let list: Vec<Value> = stacks.iter().map(|s| s.to_json(None)).collect();
                Ok(Output::json(&list, EXIT_OK))
            }
        }
        Command::Threshold {
            family,
            tol,
            lo,
            hi,
        } => {
            if *family == Family::TripleIndex {
                return Err(Error::InvalidArgument(
                    "threshold needs a fixed-copy family".into(),
                ));
            }
            let found = threshold_bisect(|t| family.problem(t), *lo, *hi, *tol, &config)?;
            let body = json!({
                "family": family.to_string(),
                "threshold": round_sig(found.threshold),
                "bracket": [round_sig(found.bracket.0), round_sig(found.bracket.1)],
                "solver_stats": {
                    "evaluations": found.evaluations.len(),
                    "iterations": found.total_iterations(),
                    "budget": config.budget,
                },
            });
            Ok(Output::json(&body, EXIT_OK))
        }
        Command::Sweep { family, grid } => {
            let rows = with_pool(cli.global.jobs, || {
                grid.points
                    .par_iter()
                    .map(|&t| Ok((t, index_of_incompatibility(&family.set(t)?, &config)?.index)))
                    .collect::<Result<Vec<_>>>()
            })??;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["a", "index"]).map_err(csv_error)?;
            for (t, index) in rows {
                w.write_record([round_sig(t).to_string(), index.to_string()])
                    .map_err(csv_error)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
            Ok(Output {
                body: String::from_utf8(bytes).expect("utf-8"),
                code: EXIT_OK,
            })
        }
        Command::Validate { file } => validate_file(file),
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn validate_file(path: &Path) -> Result<Output> {
    let value = read_json(path)?;
    if value.get("levels").is_some() {
        let stack = CompatibilityStack::from_json(&value)?;
        let report = validate_stack(&stack);
        let violations: Vec<Value> = report
            .violations
            .iter()
            .map(|v| {
                let mut entry = serde_json::to_value(v).expect("violation json");
                entry["message"] = Value::String(v.to_string());
                entry
            })
            .collect();
        let code = if report.is_valid() {
            EXIT_OK
        } else {
            EXIT_INFEASIBLE
        };
        return Ok(Output::json(
            &json!({"kind": "stack", "valid": report.is_valid(), "violations": violations}),
            code,
        ));
    }
    let set = if value.get("effects").is_some() {
        ObservableSet::new(vec![serde_json::from_value(value)?])?
    } else {
        serde_json::from_value(value)?
    };
    let members: Vec<Value> = set
        .names()
        .iter()
        .zip(set.members())
        .map(|(name, obs)| {
            let report = obs.validate();
            json!({
                "name": name,
                "valid": report.is_ok(),
                "violations": report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            })
        })
        .collect();
    let valid = members.iter().all(|m| m["valid"] == true);
    let code = if valid { EXIT_OK } else { EXIT_INFEASIBLE };
    Ok(Output::json(
        &json!({"kind": "observables", "valid": valid, "members": members}),
        code,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: Grid = "0.0:1.0:0.05".parse().unwrap();
        assert_eq!(g.points.len(), 21);
        assert_eq!(g.points[3], 0.15);
        assert_eq!(*g.points.last().unwrap(), 1.0);
        assert_eq!("0:0:0.1".parse::<Grid>().unwrap().points, vec![0.0]);
        assert!("0:2:0.1".parse::<Grid>().is_err());
        assert!("0:1".parse::<Grid>().is_err());
        assert!("0:1:0".parse::<Grid>().is_err());
    }

    #[test]
    fn family_names_round_trip() {
        for f in [
            Family::PairXy,
            Family::TripleK1,
            Family::TripleK2,
            Family::TripleIndex,
        ] {
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
        assert!("pair:xz".parse::<Family>().is_err());
    }

    #[test]
    fn round_sig_trims_noise() {
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(round_sig(1.0 / 3.0).to_string(), "0.333333333333");
    }

    #[test]
    fn usage_errors_exit_64() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        assert_eq!(run(["kcompat", "bogus"], &mut out, &mut err), EXIT_USAGE);
        assert_eq!(
            run(["kcompat", "enum-stacks", "9"], &mut out, &mut err),
            EXIT_USAGE
        );
    }

    #[test]
    fn enum_stacks_summary() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        assert_eq!(
            run(
                ["kcompat", "enum-stacks", "3", "--summary"],
                &mut out,
                &mut err
            ),
            EXIT_OK
        );
        assert!(String::from_utf8(out)
            .unwrap()
            .starts_with("bulk_index,0,1,2,3\n"));
    }
}
