use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use halflin::config::{CheckConfig, CriteriaSelection, OutputFormat, RunConfig, Spanned, TransformConfig};
use halflin::criteria::CriterionId;
use halflin::report::{Report, StageOutcome};
use halflin::reproduce::reproduce_example;
use halflin::run::{run, StageSelection};

const EXIT_CONFIG: u8 = 1;
const EXIT_STAGE: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "halflin", version, about = "Half-linear delay difference equations: criteria, simulation and transforms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the coefficient hypotheses on the horizon.
    Validate(StageArgs),
    /// Decide whether Σ r^(-1/α) converges.
    Classify(StageArgs),
    /// Iterate the recurrence from the configured initial data.
    Simulate(StageArgs),
    /// Evaluate oscillation criteria.
    Check(StageArgs),
    /// Build the canonical comparison equation.
    Transform(StageArgs),
    /// Run every stage present in the configuration.
    Run(StageArgs),
    /// Reproduce a built-in worked example.
    Example(ExampleArgs),
}

#[derive(Args)]
struct StageArgs {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Criterion identifier or `all`.
    #[arg(long, value_name = "ID|all")]
    criterion: Option<String>,
    /// Horizon for `check` and `simulate`.
    #[arg(long, value_name = "N")]
    horizon: Option<i64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ExampleArgs {
    #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
    number: u8,
    /// Coefficient scale for example 1.
    #[arg(long, value_name = "X")]
    lambda0: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Suppress the summary printed to standard error.
    #[arg(long)]
    quiet: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
        }
    }
}

enum Failure {
    Config(String),
    Internal(String),
}

fn selection(cmd: &Command) -> StageSelection {
    let only = |f: fn(&mut StageSelection)| {
        let mut s = StageSelection::NONE;
        f(&mut s);
        s
    };
    match cmd {
        Command::Validate(_) => only(|s| s.validate = true),
        Command::Classify(_) => only(|s| s.classify = true),
        Command::Simulate(_) => only(|s| s.simulate = true),
        Command::Check(_) => only(|s| s.check = true),
        Command::Transform(_) => only(|s| s.transform = true),
        Command::Run(_) | Command::Example(_) => StageSelection::ALL,
    }
}

/// Applies command-line overrides and fills the section the subcommand needs.
fn prepare_config(cmd: &Command, args: &StageArgs) -> Result<RunConfig, Failure> {
    let mut cfg = RunConfig::from_path(&args.config).map_err(|e| Failure::Config(e.to_string()))?;
    let criterion = args
        .criterion
        .as_deref()
        .map(|c| {
            if c.eq_ignore_ascii_case("all") {
                Ok(CriteriaSelection::Keyword("all".into()))
            } else {
                c.parse::<CriterionId>()
                    .map(|id| CriteriaSelection::List(vec![id.as_str().into()]))
                    .map_err(Failure::Config)
            }
        })
        .transpose()?;

    match cmd {
        Command::Check(_) | Command::Run(_) => {
            if matches!(cmd, Command::Check(_)) || criterion.is_some() || args.horizon.is_some() {
                let check = cfg.check.get_or_insert_with(|| CheckConfig {
                    criteria: Spanned::new(0..0, CriteriaSelection::Keyword("all".into())),
                    horizon: halflin::criteria::DEFAULT_HORIZON,
                    start: None,
                });
                if let Some(sel) = criterion {
                    check.criteria = Spanned::new(0..0, sel);
                }
                if let Some(h) = args.horizon {
                    check.horizon = h;
                }
            }
        }
        Command::Simulate(_) => {
            let zeta0 = cfg.equation.zeta0;
            let sim = cfg
                .simulate
                .as_mut()
                .ok_or_else(|| Failure::Config("the configuration has no [simulate] section".into()))?;
            if let Some(h) = args.horizon {
                if h <= zeta0 + 1 {
                    return Err(Failure::Config(format!("--horizon must exceed zeta0 + 1 = {}", zeta0 + 1)));
                }
                sim.horizon = Spanned::new(0..0, h);
            }
        }
        Command::Transform(_) => {
            cfg.transform.get_or_insert_with(TransformConfig::default);
        }
        _ => {}
    }
    Ok(cfg)
}

fn summary(report: &Report) -> Vec<String> {
    let mut lines = Vec::new();
    let status = |failed: bool| if failed { "error" } else { "ok" };
    let s = &report.stages;
    if let Some(v) = &s.validation {
        let detail = match v {
            StageOutcome::Ok(r) if r.is_clean() => "clean".to_string(),
            StageOutcome::Ok(r) => format!("{} violation(s)", r.violations.len()),
            StageOutcome::Error { message } => message.clone(),
        };
        lines.push(format!("validate: {} ({detail})", status(v.is_error())));
    }
    if let Some(c) = &s.classification {
        let detail = match c {
            StageOutcome::Ok(f) => format!("{f:?}"),
            StageOutcome::Error { message } => message.clone(),
        };
        lines.push(format!("classify: {detail}"));
    }
    if let Some(sim) = &s.simulation {
        let detail = match sim {
            StageOutcome::Ok(o) => match &o.class {
                StageOutcome::Ok(c) => format!("{:?}, {c:?}", o.status),
                StageOutcome::Error { message } => message.clone(),
            },
            StageOutcome::Error { message } => message.clone(),
        };
        lines.push(format!("simulate: {detail}"));
    }
    for entry in &s.criteria {
        let detail = match &entry.outcome {
            StageOutcome::Ok(v) => format!("{:?}: {}", v.status, v.conclusion),
            StageOutcome::Error { message } => format!("error: {message}"),
        };
        lines.push(format!("{}: {detail}", entry.criterion));
    }
    if let Some(t) = &s.transform {
        let detail = match t {
            StageOutcome::Ok(o) => format!("{} samples, theta certified: {}", o.samples.len(), o.theta_certified),
            StageOutcome::Error { message } => message.clone(),
        };
        lines.push(format!("transform: {detail}"));
    }
    let disagree = report.comparisons.iter().filter(|c| !c.agrees).count();
    if !report.comparisons.is_empty() {
        lines.push(format!(
            "comparisons: {} rows, {disagree} disagree with the claimed value",
            report.comparisons.len()
        ));
    }
    for d in &report.discrepancies {
        lines.push(format!("discrepancy {}: {}", d.id, d.description));
    }
    lines
}

fn emit(report: &Report, format: OutputFormat, out: Option<&Path>, trajectory: bool) -> Result<(), Failure> {
    let body = match format {
        OutputFormat::Json => report.to_json(),
        OutputFormat::Csv if trajectory => report.trajectory_csv(),
        OutputFormat::Csv => report.evidence_csv(),
    };
    let written = match out {
        Some(path) => std::fs::write(path, body),
        None => std::io::stdout().lock().write_all(body.as_bytes()),
    };
    written.map_err(|e| Failure::Internal(format!("cannot write report: {e}")))
}

fn execute(cli: Cli) -> Result<bool, Failure> {
    let sel = selection(&cli.command);
    let (report, output, cfg_output) = match &cli.command {
        Command::Example(args) => {
            if args.lambda0.is_some() && args.number != 1 {
                return Err(Failure::Config("--lambda0 applies to example 1 only".into()));
            }
            let report = reproduce_example(args.number, args.lambda0).map_err(|e| Failure::Config(e.to_string()))?;
            (report, &args.output, None)
        }
        Command::Validate(args)
        | Command::Classify(args)
        | Command::Simulate(args)
        | Command::Check(args)
        | Command::Transform(args)
        | Command::Run(args) => {
            let cfg = prepare_config(&cli.command, args)?;
            let report = run(&cfg, &args.config.display().to_string(), sel);
            let cfg_output = cfg.output();
            (report, &args.output, Some(cfg_output))
        }
    };

    let format = output
        .format
        .map(OutputFormat::from)
        .or(cfg_output.as_ref().map(|o| o.format))
        .unwrap_or_default();
    let path = output
        .out
        .clone()
        .or_else(|| cfg_output.and_then(|o| o.path));
    let trajectory = matches!(cli.command, Command::Simulate(_));
    emit(&report, format, path.as_deref(), trajectory)?;
    if !output.quiet {
        for line in summary(&report) {
            eprintln!("{line}");
        }
    }
    Ok(!report.has_stage_errors())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = std::panic::catch_unwind(|| execute(cli));
    match outcome {
        Ok(Ok(true)) => ExitCode::SUCCESS,
        Ok(Ok(false)) => ExitCode::from(EXIT_STAGE),
        Ok(Err(Failure::Config(msg))) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Ok(Err(Failure::Internal(msg))) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(EXIT_INTERNAL)
        }
        Err(_) => ExitCode::from(EXIT_INTERNAL),
    }
}
