//! `curveasym`: support/tangent ratio experiments from the command line.
//!
//! Exit codes: 0 success, 1 a violated, inconclusive or unresolved verdict,
//! 2 input or configuration error, 3 numerical failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod output;

use std::f64::consts::E;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use curveasym_core::arclength::{arc_ratio_trace, ArcConfig, ArcVerdict};
use curveasym_core::asymptote::{
    check_universal_bound, limsup_estimate, make_sequence, ratio_trace, RatioKind, SequenceSpec, Verdict,
};
use curveasym_core::catalog::{self, Family};
use curveasym_core::meanvalue::{lagrange_extremal, meanvalue_trace, power_weight, remark41, Problem, SolverConfig};
use curveasym_core::verify;

use config::{log_spaced, CurveExperiment, KeyValues, MeanValueExperiment};
use output::{Failure, Summary};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
    #[error(transparent)]
    Core(#[from] curveasym_core::Error),
    #[error("cannot write CSV: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Csv(_) => 2,
            CliError::Core(e) if e.is_input() => 2,
            CliError::Core(_) | CliError::Numerical(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "curveasym",
    version,
    about = "Support and tangent point asymptotics of planar curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a built-in example with its constants pinned.
    Example(ExampleArgs),
    /// Trace DS/D and DT/D for a curve described in a config file.
    Analyze(AnalyzeArgs),
    /// Trace a mean-value point toward the left end of its interval.
    Meanvalue(MeanValueArgs),
    /// Trace the arc-length ratios for a config curve or a catalog family.
    Arclength(ArcArgs),
    /// Run the acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the verdict record as JSON (to PATH, or standard output).
    #[arg(long, value_name = "PATH", num_args = 0..=1)]
    json_summary: Option<Option<PathBuf>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExampleName {
    Ex1,
    Ex2,
    Ex3,
    Remark41,
    LagrangeExtremal,
    Powerweight,
}

#[derive(Debug, Args)]
struct ExampleArgs {
    #[arg(long, value_enum)]
    name: ExampleName,
    /// Spiral exponent (ex1, ex2) or power (remark41).
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Exponent of exp(-(-t)^l) (ex3).
    #[arg(long, default_value_t = 2.0)]
    l: f64,
    /// Weight exponent (powerweight).
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Number of sequence terms.
    #[arg(long)]
    count: Option<usize>,
    /// Smallest x for mean-value examples.
    #[arg(long)]
    xmin: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Preset {
    Remark41,
    LagrangeExtremal,
    Powerweight,
}

#[derive(Debug, Args)]
struct MeanValueArgs {
    #[arg(long, value_enum, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<Preset>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, conflicts_with = "config")]
    xmin: Option<f64>,
    #[arg(long, conflicts_with = "config")]
    count: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ArcArgs {
    #[arg(long, conflicts_with = "name", required_unless_present = "name")]
    config: Option<PathBuf>,
    /// A catalog family, e.g. `parabola` or `polygonal-spiral`.
    #[arg(long)]
    name: Option<String>,
    /// Skip the check that every probed arc length is finite and at least
    /// the chord.
    #[arg(long)]
    assume_rectifiable: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Run only this criterion (1 to 9).
    #[arg(long)]
    criterion: Option<u8>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Example(args) => example(args),
        Command::Analyze(args) => {
            let ex = CurveExperiment::from_config(&KeyValues::read(&args.config)?)?;
            curve_run(
                &ex.curve,
                &ex.sequence,
                &ex.support,
                ex.window,
                ex.epsilon,
                &args.output,
            )
        }
        Command::Meanvalue(args) => {
            let ex = match (&args.config, args.preset) {
                (Some(path), _) => MeanValueExperiment::from_config(&KeyValues::read(path)?)?,
                (None, Some(p)) => preset(p, args.alpha, args.beta, args.xmin, args.count)?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            meanvalue_run(&ex, &args.output)
        }
        Command::Arclength(args) => arclength(args),
        Command::Verify(args) => {
            let outcomes = match args.criterion {
                Some(id) => {
                    vec![verify::run(id).ok_or_else(|| CliError::Input(format!("no criterion {id}; use 1 to 9")))?]
                }
                None => verify::run_all(),
            };
            for o in &outcomes {
                println!("{}", o.line());
            }
            Ok(u8::from(outcomes.iter().any(|o| !o.passed)))
        }
    }
}

fn with_count(spec: SequenceSpec, count: Option<usize>) -> SequenceSpec {
    let Some(n) = count else { return spec };
    match spec {
        SequenceSpec::GeometricToFinite { a, t0, r, .. } => SequenceSpec::GeometricToFinite { a, t0, r, count: n },
        SequenceSpec::ExponentialToMinusInf { t0, s, .. } => SequenceSpec::ExponentialToMinusInf { t0, s, count: n },
    }
}

fn example(args: ExampleArgs) -> Result<u8, CliError> {
    let family = match args.name {
        ExampleName::Ex1 => catalog::ex1(args.alpha)?,
        ExampleName::Ex2 => catalog::ex2(args.alpha)?,
        ExampleName::Ex3 => catalog::ex3(args.l)?,
        ExampleName::Remark41 => {
            return meanvalue_run(
                &preset(Preset::Remark41, args.alpha, args.beta, args.xmin, args.count)?,
                &args.output,
            )
        }
        ExampleName::LagrangeExtremal => {
            return meanvalue_run(
                &preset(Preset::LagrangeExtremal, args.alpha, args.beta, args.xmin, args.count)?,
                &args.output,
            )
        }
        ExampleName::Powerweight => {
            return meanvalue_run(
                &preset(Preset::Powerweight, args.alpha, args.beta, args.xmin, args.count)?,
                &args.output,
            )
        }
    };
    if args.xmin.is_some() {
        return Err(CliError::Input("--xmin only applies to mean-value examples".into()));
    }
    if let Some(v) = family.expected {
        eprintln!("{}: closed-form ratio {v:.10}", family.name);
    }
    let seq = with_count(family.sequence, args.count);
    curve_run(
        &family.curve,
        &seq,
        &family.config,
        curveasym_core::asymptote::DEFAULT_WINDOW,
        1e-3,
        &args.output,
    )
}

fn preset(
    p: Preset,
    alpha: f64,
    beta: f64,
    xmin: Option<f64>,
    count: Option<usize>,
) -> Result<MeanValueExperiment, CliError> {
    let solver = SolverConfig::default();
    let count = count.unwrap_or(16);
    let (problem, x0, default_xmin) = match p {
        Preset::Remark41 => {
            if !(alpha > 0.0) {
                return Err(CliError::Input(format!("--alpha must be positive, got {alpha}")));
            }
            (Problem::Cauchy(remark41(alpha)), 1.0, 1e-6)
        }
        Preset::LagrangeExtremal => (Problem::Cauchy(lagrange_extremal(solver.quad_tol)), 0.5, 1e-8),
        Preset::Powerweight => {
            if !(beta >= 0.0) {
                return Err(CliError::Input(format!("--beta must be non-negative, got {beta}")));
            }
            (power_weight(beta), 1.0, 1e-6)
        }
    };
    Ok(MeanValueExperiment {
        problem,
        xs: log_spaced(0.0, x0, xmin.unwrap_or(default_xmin), count)?,
        solver,
        window: curveasym_core::asymptote::DEFAULT_WINDOW,
        epsilon: 1e-3,
    })
}

fn worst(verdicts: &[Verdict]) -> Verdict {
    if verdicts.contains(&Verdict::Violated) {
        Verdict::Violated
    } else if verdicts.contains(&Verdict::Inconclusive) {
        Verdict::Inconclusive
    } else {
        Verdict::Holds
    }
}

fn emit(summary: &Summary, out: &OutputArgs) -> Result<(), CliError> {
    eprintln!("{}", summary.describe());
    if let Some(path) = &out.json_summary {
        summary.write_json(path.as_deref())?;
    }
    Ok(())
}

fn curve_run(
    curve: &curveasym_core::curve::Curve,
    spec: &SequenceSpec,
    cfg: &curveasym_core::support::SupportConfig,
    window: usize,
    epsilon: f64,
    out: &OutputArgs,
) -> Result<u8, CliError> {
    let seq = make_sequence(spec, curve.domain())?;
    let trace = ratio_trace(curve, &seq, cfg);
    let failures: Vec<Failure> = trace
        .failures()
        .map(|s| Failure {
            at: s.t,
            error: s.error.as_ref().map(ToString::to_string).unwrap_or_default(),
        })
        .collect();
    let support = trace.series(RatioKind::Support);
    if support.is_empty() {
        return Err(CliError::Numerical(format!(
            "every sample failed; first: {}",
            failures.first().map_or("", |f| f.error.as_str())
        )));
    }
    output::write_trace(output::sink(out.out.as_deref())?, &trace)?;
    let est = limsup_estimate(&support, window)?;
    let mut verdicts = vec![check_universal_bound(&est, epsilon)];
    let tangent = trace.series(RatioKind::Tangent);
    let tangent_est = if tangent.is_empty() {
        None
    } else {
        Some(limsup_estimate(&tangent, window)?)
    };
    if let Some(t) = &tangent_est {
        verdicts.push(check_universal_bound(t, epsilon));
    }
    let verdict = worst(&verdicts);
    let mut summary = Summary::new(&est, 1.0 / E, verdict, support.len(), failures);
    summary.tangent_estimate = tangent_est.and_then(|t| t.value.finite());
    emit(&summary, out)?;
    Ok(u8::from(verdict != Verdict::Holds))
}

fn meanvalue_run(ex: &MeanValueExperiment, out: &OutputArgs) -> Result<u8, CliError> {
    if let Problem::Mu(p) | Problem::Cauchy(p) = &ex.problem {
        p.check_increasing(ex.xs[0], 1000)?;
    }
    let trace = meanvalue_trace(&ex.problem, &ex.xs, &ex.solver, ex.window, ex.epsilon)?;
    let failures: Vec<Failure> = trace
        .samples
        .iter()
        .filter_map(|(x, r)| {
            r.as_ref().err().map(|e| Failure {
                at: *x,
                error: e.to_string(),
            })
        })
        .collect();
    output::write_meanvalue(output::sink(out.out.as_deref())?, &trace)?;
    if let Some(c) = &trace.c {
        eprintln!(
            "C estimate {:.10} from {} samples (continuity assumed)",
            c.value, c.samples_used
        );
    }
    let summary = Summary::new(
        &trace.estimate,
        trace.bound,
        trace.verdict,
        trace.results().count(),
        failures,
    );
    emit(&summary, out)?;
    Ok(u8::from(trace.verdict != Verdict::Holds))
}

fn arclength(args: ArcArgs) -> Result<u8, CliError> {
    let (curve, spec, cfg) = match (&args.config, &args.name) {
        (Some(path), _) => {
            let ex = CurveExperiment::from_config(&KeyValues::read(path)?)?;
            let cfg = ArcConfig {
                support: ex.support,
                window: ex.window,
                epsilon: ex.epsilon,
                ..Default::default()
            };
            (ex.curve, ex.sequence, cfg)
        }
        (None, Some(name)) => {
            let cat = catalog::catalog()?;
            let Some(Family {
                curve,
                sequence,
                config,
                ..
            }) = cat.into_iter().find(|f| &f.name == name)
            else {
                let names: Vec<String> = catalog::catalog()?.into_iter().map(|f| f.name).collect();
                return Err(CliError::Input(format!(
                    "unknown family `{name}`; known: {}",
                    names.join(", ")
                )));
            };
            (
                curve,
                sequence,
                ArcConfig {
                    support: config,
                    ..Default::default()
                },
            )
        }
        (None, None) => unreachable!("clap requires one of them"),
    };
    let seq = make_sequence(&spec, curve.domain())?;
    let trace = arc_ratio_trace(&curve, &seq, &cfg);
    let failures: Vec<Failure> = trace
        .samples
        .iter()
        .filter_map(|s| {
            s.error.as_ref().map(|e| Failure {
                at: s.t,
                error: e.to_string(),
            })
        })
        .collect();
    if !args.assume_rectifiable {
        for s in trace.samples.iter().filter(|s| s.error.is_none()) {
            if !s.l.is_finite() || s.l < s.d * (1.0 - 1e-9) {
                return Err(CliError::Numerical(format!(
                    "arc length at t = {} is {} against chord {}; the curve may not be rectifiable there \
                     (pass --assume-rectifiable to skip this check)",
                    s.t, s.l, s.d
                )));
            }
        }
    }
    let Some(est) = trace.support_estimate else {
        return Err(CliError::Numerical(format!(
            "no arc-length ratio could be formed; first failure: {}",
            failures.first().map_or("", |f| f.error.as_str())
        )));
    };
    output::write_arc(output::sink(args.output.out.as_deref())?, &trace)?;
    let verdict = match trace.verdict {
        ArcVerdict::Holds => "holds".to_string(),
        ArcVerdict::Unresolved => format!("unresolved after refining to {} grid steps", trace.n_grid),
    };
    let rows = trace.samples.len() - failures.len();
    let mut summary = Summary::new(&est, 1.0 / E, verdict, rows, failures);
    summary.tangent_estimate = trace.tangent_estimate.and_then(|t| t.value.finite());
    emit(&summary, &args.output)?;
    Ok(u8::from(trace.verdict != ArcVerdict::Holds))
}
