use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spl_impact::cia::{gsn_ia, gsn_ia_lifted, CiaError, Lifted, ResultFile};
use spl_impact::exec::Execution;
use spl_impact::model::{index_inputs, load_inputs, validate, ModelError, ModelFile, SplInputs};
use spl_impact::oracle::{check_commutation_with, run_campaign, ConfigRecord, Limits, OracleError};
use spl_impact::pcalc::Config;
use spl_impact::slicer::{SliceDepth, SlicerConfig};

#[derive(Parser)]
#[command(
    name = "spl-impact",
    version,
    about = "Change impact assessment for product-line safety cases"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lifted analysis over all products.
    Analyze(AnalyzeArgs),
    /// Analysis of the single product selected by --config.
    AnalyzeProduct {
        #[command(flatten)]
        analysis: AnalyzeArgs,
        #[arg(long)]
        config: String,
    },
    /// Write the product model selected by --config.
    Index {
        model: PathBuf,
        #[arg(long)]
        config: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// List valid configurations.
    Products { model: PathBuf },
    /// Print diagnostics; fails if any is an error.
    Validate { model: PathBuf },
    /// Compare the lifted analysis against every product.
    Check(CheckArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    model: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Include intermediate sets in the result.
    #[arg(long)]
    trace: bool,
    /// Impact-edge steps followed when slicing system models: a positive integer or "unbounded".
    #[arg(long, default_value_t = SliceDepth::ONE)]
    sys_slice_depth: SliceDepth,
}

#[derive(Args)]
struct CheckArgs {
    /// Model to check; omit when running a random campaign.
    #[arg(required_unless_present = "random")]
    model: Option<PathBuf>,
    /// Check N generated inputs instead of a model file.
    #[arg(long, value_name = "N", conflicts_with = "model")]
    random: Option<u64>,
    /// First seed of the random campaign [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = SliceDepth::ONE)]
    sys_slice_depth: SliceDepth,
    /// Write the JSON report here (model checks only).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Check configurations one at a time.
    #[arg(long)]
    sequential: bool,
}

enum Failure {
    Usage(String),
    Input(String),
    Mismatch,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Input(_) => 2,
            Failure::Mismatch => 3,
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(msg) | Failure::Input(msg) => eprintln!("error: {msg}"),
                Failure::Mismatch => {}
            }
            ExitCode::from(f.code())
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Analyze(args) => {
            let inputs = load(&args.model)?;
            let cfg = SlicerConfig {
                sys_depth: args.sys_slice_depth,
            };
            let (result, trace) = gsn_ia_lifted(&inputs, &cfg).map_err(analysis_failure)?;
            let file =
                ResultFile::from_lifted(&result, args.trace.then_some(&trace), &inputs.space)
                    .map_err(|e| Failure::Input(e.to_string()))?;
            emit(args.output.as_deref(), &file.to_json())
        }
        Command::AnalyzeProduct {
            analysis: args,
            config,
        } => {
            let inputs = load(&args.model)?;
            let rho = config_arg(&inputs, &config)?;
            let product = index_inputs(&inputs, &rho).map_err(|e| Failure::Usage(e.to_string()))?;
            let cfg = SlicerConfig {
                sys_depth: args.sys_slice_depth,
            };
            let (result, trace) = gsn_ia(&product, &cfg).map_err(analysis_failure)?;
            let file = ResultFile::from_product(&result, args.trace.then_some(&trace));
            emit(args.output.as_deref(), &file.to_json())
        }
        Command::Index {
            model,
            config,
            output,
        } => {
            let inputs = load(&model)?;
            let rho = config_arg(&inputs, &config)?;
            let product = index_inputs(&inputs, &rho).map_err(|e| Failure::Usage(e.to_string()))?;
            emit(
                output.as_deref(),
                &ModelFile::from_product(&product, &inputs.space).to_json(),
            )
        }
        Command::Products { model } => {
            let inputs = load(&model)?;
            let configs = inputs
                .space
                .configs()
                .map_err(|e| Failure::Input(e.to_string()))?;
            let mut text = String::new();
            for rho in &configs {
                text.push_str(&inputs.space.render_config(rho));
                text.push('\n');
            }
            emit(None, &text)
        }
        Command::Validate { model } => {
            let inputs = load(&model)?;
            let diagnostics = validate(&inputs);
            let mut text = String::new();
            for d in &diagnostics {
                text.push_str(&d.to_string());
                text.push('\n');
            }
            let errors = diagnostics.iter().filter(|d| d.is_error()).count();
            text.push_str(&format!(
                "{errors} error(s), {} warning(s)\n",
                diagnostics.len() - errors
            ));
            emit(None, &text)?;
            if errors > 0 {
                Err(Failure::Input(format!(
                    "{} failed validation",
                    model.display()
                )))
            } else {
                Ok(())
            }
        }
        Command::Check(args) => check(args),
    }
}

fn check(args: CheckArgs) -> Outcome {
    let cfg = SlicerConfig {
        sys_depth: args.sys_slice_depth,
    };
    if args.seed.is_some() && args.random.is_none() {
        return Err(Failure::Usage("--seed only applies with --random".into()));
    }
    let exec = if args.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    if let Some(n) = args.random {
        let seed = args.seed.unwrap_or(0);
        let end = seed
            .checked_add(n)
            .ok_or_else(|| Failure::Usage("seed range overflows".into()))?;
        let cases =
            run_campaign(seed..end, &Limits::default(), &cfg, exec).map_err(oracle_failure)?;
        let mut text = String::new();
        for case in &cases {
            let r = &case.report;
            let status = if r.overall() { "ok" } else { "MISMATCH" };
            text.push_str(&format!(
                "seed {}: {status} {}/{}\n",
                case.seed,
                r.matching(),
                r.configs.len()
            ));
            if let Some(first) = r.first_failure() {
                text.push_str(&failure_detail(first));
            }
        }
        let passed = cases.iter().filter(|c| c.report.overall()).count();
        text.push_str(&format!("{passed}/{} seeds commute\n", cases.len()));
        emit(None, &text)?;
        return if passed == cases.len() {
            Ok(())
        } else {
            Err(Failure::Mismatch)
        };
    }

    let model = args.model.expect("clap requires a model without --random");
    let inputs = load(&model)?;
    let report = check_commutation_with(&inputs, &cfg, &Lifted, exec).map_err(oracle_failure)?;
    if let Some(path) = &args.output {
        emit(Some(path), &report.to_json())?;
    }
    let mut text = String::new();
    for r in &report.configs {
        let label = if r.label.is_empty() {
            "{}"
        } else {
            r.label.as_str()
        };
        text.push_str(&format!(
            "{} {label}\n",
            if r.matches() { "ok" } else { "MISMATCH" }
        ));
        if !r.matches() {
            text.push_str(&failure_detail(r));
        }
    }
    text.push_str(&format!(
        "{}/{} configurations match\n",
        report.matching(),
        report.configs.len()
    ));
    emit(None, &text)?;
    if report.overall() {
        Ok(())
    } else {
        Err(Failure::Mismatch)
    }
}

fn failure_detail(r: &ConfigRecord) -> String {
    let mut text = String::new();
    let label = if r.label.is_empty() {
        "{}"
    } else {
        r.label.as_str()
    };
    for d in &r.diff {
        text.push_str(&format!(
            "  at {label}: {} expected {:?}, lifted {:?}\n",
            d.id, d.expected, d.actual
        ));
    }
    if !r.stage_mismatches.is_empty() {
        text.push_str(&format!(
            "  at {label}: intermediate sets differ: {}\n",
            r.stage_mismatches.join(", ")
        ));
    }
    text
}

fn load(path: &Path) -> Result<SplInputs, Failure> {
    load_inputs(path).map_err(|e| match e {
        ModelError::Io { .. } => Failure::Input(e.to_string()),
        other => Failure::Input(format!("{}: {other}", path.display())),
    })
}

fn config_arg(inputs: &SplInputs, text: &str) -> Result<Config, Failure> {
    inputs
        .space
        .parse_config(text)
        .map_err(|e| Failure::Usage(format!("--config: {e}")))
}

fn analysis_failure(e: CiaError) -> Failure {
    match e {
        CiaError::ValidationFailed(diagnostics) => {
            let lines: Vec<String> = diagnostics.iter().map(ToString::to_string).collect();
            Failure::Input(format!("inputs failed validation\n{}", lines.join("\n")))
        }
        other => Failure::Input(other.to_string()),
    }
}

fn oracle_failure(e: OracleError) -> Failure {
    match e {
        OracleError::ValidationFailed(diagnostics) => {
            analysis_failure(CiaError::ValidationFailed(diagnostics))
        }
        other => Failure::Input(other.to_string()),
    }
}

fn emit(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|()| out.flush())
                .map_err(|e| Failure::Input(format!("stdout: {e}")))
        }
    }
}
