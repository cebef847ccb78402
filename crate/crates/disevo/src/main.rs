use std::path::PathBuf;
use std::process::exit;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use disevo::cli::{
    cmd_analyze, cmd_dof, cmd_evolve, cmd_verify, to_csv, EvolveArgs, EXIT_USAGE,
};
use disevo::models::{load_scenario, ArithmeticMode, Scenario};
use disevo::scalar::{set_float_tolerance, Rat, Scalar};

#[derive(Parser)]
#[command(
    name = "disevo",
    about = "Constraint analysis and canonical evolution for variational discrete systems"
)]
struct Cli {
    /// Arithmetic mode; DISEVO_MODE env var takes precedence, scenario
    /// file default applies when neither is given.
    #[arg(long, global = true)]
    mode: Option<Mode>,
    /// Zero tolerance for float mode.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Propagate and classify the constraints of a scenario.
    Analyze { scenario: PathBuf },
    /// Forward-evolve initial data through a slab schedule.
    Evolve {
        scenario: PathBuf,
        /// Initial configuration, comma-separated (defaults to zeros).
        #[arg(long)]
        x: Option<String>,
        /// Initial momenta, comma-separated (defaults to zeros).
        #[arg(long)]
        p: Option<String>,
        /// Free-parameter values per move: groups split by ';', values by ','.
        #[arg(long)]
        lambda: Option<String>,
        /// Fail instead of defaulting missing free parameters to zero.
        #[arg(long)]
        strict: bool,
    },
    /// Count propagating degrees of freedom between slices.
    Dof {
        scenario: PathBuf,
        #[arg(long)]
        i: usize,
        /// Interior slice for the reduced phase-space dimension.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        f: usize,
    },
    /// Run the randomized structural-theorem suites.
    Verify {
        #[arg(long)]
        suite: Option<String>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
    },
}

fn usage_bail(msg: &str) -> ! {
    eprintln!("disevo: {msg}");
    exit(EXIT_USAGE);
}

fn resolve_mode(flag: Option<Mode>, scenario: Option<&Scenario>) -> ArithmeticMode {
    if let Ok(env) = std::env::var("DISEVO_MODE") {
        return match env.as_str() {
            "exact" => ArithmeticMode::Exact,
            "float" => ArithmeticMode::Float,
            other => usage_bail(&format!("DISEVO_MODE must be exact or float, got {other:?}")),
        };
    }
    match flag {
        Some(Mode::Exact) => ArithmeticMode::Exact,
        Some(Mode::Float) => ArithmeticMode::Float,
        None => scenario.map(|s| s.mode).unwrap_or_default(),
    }
}

fn parse_values<S: Scalar>(text: &str, what: &str) -> Vec<S> {
    text.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            S::parse_str(t.trim())
                .unwrap_or_else(|| usage_bail(&format!("cannot parse {what} entry {t:?}")))
        })
        .collect()
}

fn evolve_args<S: Scalar>(
    x: &Option<String>,
    p: &Option<String>,
    lambda: &Option<String>,
    strict: bool,
) -> EvolveArgs<S> {
    EvolveArgs {
        x0: x.as_ref().map(|t| parse_values(t, "--x")),
        p0: p.as_ref().map(|t| parse_values(t, "--p")),
        lambdas: lambda
            .as_ref()
            .map(|t| {
                t.split(';')
                    .map(|group| parse_values(group, "--lambda"))
                    .collect()
            })
            .unwrap_or_default(),
        strict,
    }
}

fn load(path: &std::path::Path) -> Scenario {
    load_scenario(path).unwrap_or_else(|e| usage_bail(&e.to_string()))
}

fn emit(report: Value, code: i32, format: Format) -> ! {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
        Format::Csv => print!("{}", to_csv(&report)),
    }
    exit(code);
}

fn main() {
    let cli = Cli::try_parse().unwrap_or_else(|e| {
        // clap's help/version output still belongs on stdout with code 0.
        if e.use_stderr() {
            eprint!("{e}");
            exit(EXIT_USAGE);
        }
        print!("{e}");
        exit(0);
    });

    if let Cmd::Verify { suite, seed, count } = &cli.cmd {
        let (report, code) = cmd_verify(suite.as_deref(), *seed, *count);
        emit(report, code, cli.format);
    }

    let (report, code) = match &cli.cmd {
        Cmd::Analyze { scenario } => {
            let sc = load(scenario);
            match resolve_mode(cli.mode, Some(&sc)) {
                ArithmeticMode::Exact => cmd_analyze::<Rat>(&sc),
                ArithmeticMode::Float => {
                    if let Some(t) = cli.tol {
                        set_float_tolerance(t);
                    }
                    cmd_analyze::<f64>(&sc)
                }
            }
        }
        Cmd::Evolve {
            scenario,
            x,
            p,
            lambda,
            strict,
        } => {
            let sc = load(scenario);
            match resolve_mode(cli.mode, Some(&sc)) {
                ArithmeticMode::Exact => cmd_evolve::<Rat>(&sc, &evolve_args(x, p, lambda, *strict)),
                ArithmeticMode::Float => {
                    if let Some(t) = cli.tol {
                        set_float_tolerance(t);
                    }
                    cmd_evolve::<f64>(&sc, &evolve_args(x, p, lambda, *strict))
                }
            }
        }
        Cmd::Dof { scenario, i, n, f } => {
            let sc = load(scenario);
            match resolve_mode(cli.mode, Some(&sc)) {
                ArithmeticMode::Exact => cmd_dof::<Rat>(&sc, *i, *n, *f),
                ArithmeticMode::Float => {
                    if let Some(t) = cli.tol {
                        set_float_tolerance(t);
                    }
                    cmd_dof::<f64>(&sc, *i, *n, *f)
                }
            }
        }
        Cmd::Verify { .. } => unreachable!("handled above"),
    };
    emit(report, code, cli.format);
}
