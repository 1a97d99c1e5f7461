//! Command-line driver for the meanfix laboratory.
//!
//! Exit codes: 0 when every check passed, 1 when a mathematical check
//! failed, 2 for configuration or IO problems.

use clap::{Args, Parser, Subcommand};

use meanfix::driver::{
    cmd_afps_run, cmd_conditions_sweep, cmd_examples_verify, cmd_lipschitz, cmd_witness,
    known_examples, DriverError, ExperimentConfig, Format, Scheme, DEFAULT_SEED,
};
use meanfix::report;

#[derive(Parser)]
#[command(
    name = "meanfix",
    version,
    about = "Iteration schemes and inequality checks for mean nonexpansive mappings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Checks on the registered example maps
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
    /// Approximate-fixed-point runs on the product space
    Afps {
        #[command(subcommand)]
        action: AfpsAction,
    },
    /// Closed-form threshold conditions
    Conditions {
        #[command(subcommand)]
        action: ConditionsAction,
    },
    /// Sampled Lipschitz constants for T, T^2, T_alpha, tau_alpha
    Lipschitz(CommonOpts),
    /// Search for a pair violating plain nonexpansiveness
    Witness(CommonOpts),
}

#[derive(Subcommand)]
enum ExamplesAction {
    /// Self-map, inequality, witness, and exact-value checks
    Verify(CommonOpts),
}

#[derive(Subcommand)]
enum AfpsAction {
    /// Run a scheme on J and report the terminal residual family
    Run(CommonOpts),
}

#[derive(Subcommand)]
enum ConditionsAction {
    /// Evaluate all applicable conditions over the weight simplex grid
    Sweep(CommonOpts),
}

#[derive(Args)]
struct CommonOpts {
    /// Example id: ex1-l1, ex2-l2, disc-f, affine, identity
    #[arg(long, default_value = "ex1-l1")]
    example: String,
    /// Comma-separated multi-index weights, e.g. 0.5,0.5
    #[arg(long)]
    alpha: Option<String>,
    /// Outer exponent of the weighted product norm (defaults to the
    /// example's natural exponent)
    #[arg(long)]
    p: Option<f64>,
    /// Truncation dimension (default 16; 32 for afps runs)
    #[arg(long)]
    dim: Option<usize>,
    /// Iteration scheme: km or anchored
    #[arg(long, default_value = "km")]
    scheme: String,
    /// Averaging parameter of the km scheme
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    /// Anchor weight of the anchored scheme
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    /// Iteration cap
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
    /// Residual tolerance (km) or inner Picard tolerance (anchored)
    #[arg(long)]
    tol: Option<f64>,
    /// RNG seed; MEANFIX_SEED overrides this default
    #[arg(long)]
    seed: Option<u64>,
    /// Sampling budget for checks and estimates
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<String>,
    /// Output format: json or csv
    #[arg(long, default_value = "json")]
    format: String,
}

enum CommandKind {
    ExamplesVerify,
    AfpsRun,
    ConditionsSweep,
    Lipschitz,
    Witness,
}

fn parse_alpha(raw: &Option<String>) -> Result<Vec<f64>, String> {
    match raw {
        None => Ok(vec![0.5, 0.5]),
        Some(s) => s
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|e| format!("bad alpha entry {tok:?}: {e}"))
            })
            .collect(),
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, String> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("MEANFIX_SEED") {
        Ok(raw) => raw
            .parse::<u64>()
            .map_err(|e| format!("MEANFIX_SEED must be an unsigned integer: {e}")),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn build_config(kind: &CommandKind, opts: &CommonOpts) -> Result<ExperimentConfig, String> {
    let alpha = parse_alpha(&opts.alpha)?;
    let scheme = ExperimentConfig::parse_scheme(&opts.scheme).map_err(|e| e.to_string())?;
    let format = ExperimentConfig::parse_format(&opts.format).map_err(|e| e.to_string())?;
    let p = opts.p.unwrap_or(match opts.example.as_str() {
        "ex2-l2" => 2.0,
        _ => 1.0,
    });
    let dim = opts.dim.unwrap_or(match kind {
        CommandKind::AfpsRun => 32,
        _ => 16,
    });
    let tol = opts.tol.unwrap_or(match scheme {
        Scheme::Km => 1e-3,
        Scheme::Anchored => 1e-12,
    });
    let seed = resolve_seed(opts.seed)?;
    Ok(ExperimentConfig {
        example: opts.example.clone(),
        dim,
        alpha,
        p,
        scheme,
        lambda: opts.lambda,
        eps: opts.eps,
        max_iter: opts.max_iter,
        tol,
        seed,
        trials: opts.trials,
        out: opts.out.clone(),
        format,
    })
}

fn emit(cfg: &ExperimentConfig, content: String) -> i32 {
    match report::write_output(cfg.out.as_deref(), &content) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("meanfix: cannot write output: {e}");
            2
        }
    }
}

fn run(kind: CommandKind, opts: &CommonOpts) -> i32 {
    let cfg = match build_config(&kind, opts) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("meanfix: {msg}");
            return 2;
        }
    };
    let outcome: Result<(String, bool), DriverError> = match kind {
        CommandKind::ExamplesVerify => cmd_examples_verify(&cfg).map(|r| {
            let content = match cfg.format {
                Format::Json => report::to_json(&r),
                Format::Csv => report::verify_csv(&r),
            };
            (content, r.pass)
        }),
        CommandKind::AfpsRun => cmd_afps_run(&cfg).map(|r| {
            if !r.pass {
                eprintln!(
                    "meanfix: afps run failed (converged: {}, monotonicity violations: {})",
                    r.converged, r.monotonicity_violations
                );
            }
            let content = match cfg.format {
                Format::Json => report::to_json(&r),
                Format::Csv => report::afps_csv(&r),
            };
            (content, r.pass)
        }),
        CommandKind::ConditionsSweep => cmd_conditions_sweep(&cfg).map(|r| {
            let content = match cfg.format {
                Format::Json => report::to_json(&r),
                Format::Csv => report::sweep_csv(&r),
            };
            (content, r.pass)
        }),
        CommandKind::Lipschitz => cmd_lipschitz(&cfg).map(|r| {
            let content = match cfg.format {
                Format::Json => report::to_json(&r),
                Format::Csv => report::lipschitz_csv(&r),
            };
            (content, r.pass)
        }),
        CommandKind::Witness => cmd_witness(&cfg).map(|r| {
            let content = match cfg.format {
                Format::Json => report::to_json(&r),
                Format::Csv => report::witness_csv(&r),
            };
            (content, r.pass)
        }),
    };
    match outcome {
        Ok((content, pass)) => {
            let io_code = emit(&cfg, content);
            if io_code != 0 {
                io_code
            } else if pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("meanfix: {e}");
            if matches!(e, DriverError::Example(_)) {
                eprintln!("meanfix: known examples: {}", known_examples().join(", "));
            }
            e.exit_code()
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Examples {
            action: ExamplesAction::Verify(opts),
        } => run(CommandKind::ExamplesVerify, opts),
        Command::Afps {
            action: AfpsAction::Run(opts),
        } => run(CommandKind::AfpsRun, opts),
        Command::Conditions {
            action: ConditionsAction::Sweep(opts),
        } => run(CommandKind::ConditionsSweep, opts),
        Command::Lipschitz(opts) => run(CommandKind::Lipschitz, opts),
        Command::Witness(opts) => run(CommandKind::Witness, opts),
    };
    std::process::exit(code);
}
