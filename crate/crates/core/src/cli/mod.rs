//! Command-line surface: argument definitions, polynomial parser, scenario
//! files and reports. The `genjacobi` binary only calls [`main_with_args`].

mod parse;
mod report;
mod scenario;

pub use parse::{parse_poly, ParseError};
pub use report::{OutputFormat, Report, TOOL};
pub use scenario::{
    digest, ConnectionSource, ExplicitTransport, Generation, GeometryDefinition, Scenario, ScenarioBody,
    ScenarioError, TransportDefinition,
};

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::geometry::{verify_geometry_identity, GeometryError, GeometryIdentity};
use crate::index_bracket::{bracket_apply, cyclic_sum, BracketError, BracketPositions, IndexTuple, Label, TupleSum};
use crate::jacobi_verify::{
    antisymmetry_order_check, verify_identities_12_to_14, verify_identity15_formal, verify_pth_jacobi_in,
    verify_pth_jacobi_matrix, verify_pth_jacobi_symbolic, verify_reduction, JacobiError, RingInstance,
};
use crate::transport::{verify_transport_identity, TransportError, TransportIdentity};
use crate::verification::{timed, VerificationResult};

/// Exit status for usage, parse and input errors.
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Bracket(#[from] BracketError),
    #[error(transparent)]
    Jacobi(#[from] JacobiError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Transport(#[from] TransportError),
}

#[derive(Debug, Parser)]
#[command(name = "genjacobi", version, about = "Exact checks of generalized Jacobi, curvature and transport identities")]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub output: OutputFormat,
    /// Seed for every random draw; required by randomized checks.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Random instances per check.
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Report zero timings so output is byte-stable.
    #[arg(long, global = true)]
    pub deterministic: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Operations on formal index-tuple sums.
    #[command(subcommand)]
    Bracket(BracketCommand),
    /// Identity checks.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Debug, Subcommand)]
pub enum BracketCommand {
    /// Applies the multi-index bracket to a tuple and prints the signed tuples.
    Expand(ExpandArgs),
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    /// Comma-separated labels, e.g. `i,j,k`.
    #[arg(long)]
    pub tuple: String,
    /// 1-based bracket positions; defaults to all slots.
    #[arg(long)]
    pub positions: Option<String>,
    /// Labels to sum cyclically over afterwards.
    #[arg(long)]
    pub cycle: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum JacobiMode {
    Symbolic,
    Matrix,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// p-th Jacobi identity for commutators.
    Jacobi {
        #[arg(long)]
        p: usize,
        #[arg(long, value_enum, default_value_t = JacobiMode::Symbolic)]
        mode: JacobiMode,
        /// Matrix size in matrix mode.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Any other bracket (`cross3`, `anticommutator<D>`, ...); overrides `--mode`.
        #[arg(long)]
        ring: Option<String>,
    },
    /// Formal cancellation of the reversed-tail cyclic identity.
    Identity15 {
        #[arg(long)]
        p: usize,
    },
    /// Reversed-tail identity instantiated with products of generators.
    Reduction {
        #[arg(long)]
        p: usize,
    },
    /// The cyclic identities of orders 2, 3 and 4 in one bracket.
    Cyclic {
        #[arg(long, default_value = "free")]
        ring: String,
    },
    /// Antisymmetry of order k (sign rule first).
    Antisymmetry {
        #[arg(long, default_value = "free")]
        ring: String,
        #[arg(long)]
        k: usize,
    },
    /// Curvature and torsion identities of an affine connection.
    Geometry(SuiteArgs),
    /// Transport, consistency and generalized curvature identities.
    Transport(SuiteArgs),
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// Scenario file describing the connection or transport family
    #[arg(long)]
    pub scenario: PathBuf,
    /// Comma-separated identity ids.
    #[arg(long, conflicts_with = "all", required_unless_present = "all")]
    pub identities: Option<String>,
    /// Every identity that applies to the scenario.
    #[arg(long)]
    pub all: bool,
}

/// Text written to stdout plus the exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub exit_code: i32,
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect()
}

fn need_seed(cli: &Cli, what: &str) -> Result<u64, CliError> {
    cli.seed
        .ok_or_else(|| CliError::Usage(format!("{what} draws random instances; pass --seed")))
}

fn invocation_digest(parts: &[&dyn std::fmt::Display]) -> String {
    let joined: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
    digest(&joined.join(" "))
}

fn expand(args: &ExpandArgs, format: OutputFormat) -> Result<Output, CliError> {
    let names = split_list(&args.tuple);
    if names.is_empty() {
        return Err(CliError::Usage("--tuple needs at least one label".into()));
    }
    let tuple = IndexTuple::new(names.iter().map(|n| Label::new(n)).collect());
    let q = tuple.len();
    let positions: Vec<usize> = match &args.positions {
        None => (1..=q).collect(),
        Some(p) => split_list(p)
            .iter()
            .map(|s| s.parse().map_err(|_| CliError::Usage(format!("bad position `{s}`"))))
            .collect::<Result<_, _>>()?,
    };
    let pos = BracketPositions::new(&positions, q)?;
    let mut sum = bracket_apply(&TupleSum::singleton(tuple.clone()), &pos)?;
    if let Some(cycle) = &args.cycle {
        let labels: Vec<Label> = split_list(cycle).iter().map(|n| Label::new(n)).collect();
        sum = cyclic_sum(&sum, &labels)?;
    }
    let stdout = match format {
        OutputFormat::Text => format!("{sum}\n"),
        OutputFormat::Json => {
            let v = json!({
                "tool": TOOL,
                "tuple": tuple.to_string(),
                "positions": positions,
                "cycle": args.cycle.as_deref().map(split_list),
                "result": sum.to_string(),
                "terms": sum.len(),
                "coefficient_sum": sum.coefficient_sum(),
            });
            format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
        }
    };
    Ok(Output { stdout, exit_code: 0 })
}

fn run_suite<I: Copy + Send + Sync, E: Send>(
    ids: &[I],
    check: impl Fn(I) -> Result<VerificationResult, E> + Sync,
) -> Result<Vec<VerificationResult>, E> {
    // Ordered collect keeps the report independent of scheduling.
    ids.par_iter().map(|&id| timed(|| check(id))).collect()
}

fn parse_ids<T: std::str::FromStr>(list: &str) -> Result<Vec<T>, T::Err> {
    split_list(list).iter().map(|s| s.parse()).collect()
}

fn verify(cli: &Cli, cmd: &VerifyCommand) -> Result<Report, CliError> {
    let trials = cli.trials;
    Ok(match cmd {
        VerifyCommand::Jacobi { p, mode, dim, ring } => {
            let ring: Option<RingInstance> = ring.as_deref().map(str::parse).transpose()?;
            let result = match (ring, mode) {
                (Some(RingInstance::FreeAlgebra), _) | (None, JacobiMode::Symbolic) => {
                    timed(|| verify_pth_jacobi_symbolic(*p))?
                }
                (None, JacobiMode::Matrix) => {
                    let seed = need_seed(cli, "matrix mode")?;
                    timed(|| verify_pth_jacobi_matrix(*p, *dim, trials.unwrap_or(20), seed))?
                }
                (Some(r), _) => {
                    let seed = need_seed(cli, "this ring")?;
                    timed(|| verify_pth_jacobi_in(r, *p, trials.unwrap_or(20), seed))?
                }
            };
            let digest = invocation_digest(&[&"jacobi", p, &format!("{mode:?}"), dim, &format!("{ring:?}")]);
            Report::new(cli.seed.unwrap_or(0), digest, vec![result])
        }
        VerifyCommand::Identity15 { p } => Report::new(
            cli.seed.unwrap_or(0),
            invocation_digest(&[&"identity15", p]),
            vec![timed(|| verify_identity15_formal(*p))?],
        ),
        VerifyCommand::Reduction { p } => Report::new(
            cli.seed.unwrap_or(0),
            invocation_digest(&[&"reduction", p]),
            vec![timed(|| verify_reduction(*p))?],
        ),
        VerifyCommand::Cyclic { ring } => {
            let r: RingInstance = ring.parse()?;
            let seed = if r == RingInstance::FreeAlgebra { cli.seed.unwrap_or(0) } else { need_seed(cli, "this ring")? };
            let start = std::time::Instant::now();
            let mut results = verify_identities_12_to_14(r, trials.unwrap_or(20), seed)?;
            let each = start.elapsed().as_millis() as u64 / results.len().max(1) as u64;
            for res in &mut results {
                res.millis = each;
            }
            Report::new(seed, invocation_digest(&[&"cyclic", &r]), results)
        }
        VerifyCommand::Antisymmetry { ring, k } => {
            let r: RingInstance = ring.parse()?;
            let seed = if r == RingInstance::FreeAlgebra { cli.seed.unwrap_or(0) } else { need_seed(cli, "this ring")? };
            let result = timed(|| antisymmetry_order_check(r, *k, trials.unwrap_or(20), seed))?;
            Report::new(seed, invocation_digest(&[&"antisymmetry", &r, k]), vec![result])
        }
        VerifyCommand::Geometry(args) => {
            let scenario = Scenario::load(&args.scenario)?;
            let ScenarioBody::Geometry(def) = &scenario.body else {
                return Err(CliError::Usage(format!("{} is not a geometry scenario", args.scenario.display())));
            };
            let seed = need_seed(cli, "verify geometry")?;
            let built = def.build(seed)?;
            let ids: Vec<GeometryIdentity> = match &args.identities {
                Some(list) => parse_ids(list)?,
                None if built.connection.is_symmetric() => GeometryIdentity::ALL.to_vec(),
                None => GeometryIdentity::general(),
            };
            let results = run_suite(&ids, |id| verify_geometry_identity(&built, id, trials.unwrap_or(3), seed))?;
            Report::new(seed, scenario.digest, results)
        }
        VerifyCommand::Transport(args) => {
            let scenario = Scenario::load(&args.scenario)?;
            let ScenarioBody::Transport(def) = &scenario.body else {
                return Err(CliError::Usage(format!("{} is not a transport scenario", args.scenario.display())));
            };
            let seed = need_seed(cli, "verify transport")?;
            let built = def.build(seed)?;
            let ids: Vec<TransportIdentity> = match &args.identities {
                Some(list) => parse_ids(list)?,
                None => TransportIdentity::ALL.to_vec(),
            };
            let results = run_suite(&ids, |id| verify_transport_identity(&built, id, trials.unwrap_or(2), seed))?;
            Report::new(seed, scenario.digest, results)
        }
    })
}

/// Runs parsed arguments.
pub fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Bracket(BracketCommand::Expand(args)) => expand(args, cli.output),
        Command::Verify(cmd) => {
            let mut report = verify(cli, cmd)?;
            if cli.deterministic {
                report.strip_timings();
            }
            Ok(Output {
                stdout: report.emit(cli.output),
                exit_code: report.exit_code(),
            })
        }
    }
}

/// Parses `args` (including the program name), runs, prints, and returns
/// the exit status: 0 all verified, 1 something violated, 2 error.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { 0 };
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            out.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<Output, CliError> {
        let cli = Cli::try_parse_from(std::iter::once("genjacobi").chain(args.iter().copied())).unwrap();
        run(&cli)
    }

    #[test]
    fn bracket_expand_text() {
        let out = run_args(&["--output", "text", "bracket", "expand", "--tuple", "i,j"]).unwrap();
        assert_eq!(out.stdout, "+ (i,j) - (j,i)\n");
        let out = run_args(&["--output", "text", "bracket", "expand", "--tuple", "i,j", "--cycle", "i,j"]).unwrap();
        assert_eq!(out.stdout, "0\n");
    }

    #[test]
    fn jacobi_symbolic_report() {
        let out = run_args(&["--deterministic", "verify", "jacobi", "--p", "4", "--mode", "symbolic"]).unwrap();
        assert_eq!(out.exit_code, 0);
        let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["results"][0]["verdict"], "verified");
        assert_eq!(v["results"][0]["stats"]["residual_terms"], 0);
    }

    #[test]
    fn randomized_checks_require_a_seed() {
        let err = run_args(&["verify", "jacobi", "--p", "3", "--mode", "matrix"]).unwrap_err();
        assert!(matches!(err, CliError::Usage(_)));
    }

    #[test]
    fn symmetric_operation_exits_nonzero() {
        let out = run_args(&["--seed", "1", "verify", "antisymmetry", "--ring", "anticommutator2", "--k", "2"]).unwrap();
        assert_eq!(out.exit_code, 1);
    }
}
