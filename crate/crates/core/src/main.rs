use std::process::ExitCode;

use clap::Parser;

use fixaccel::cli::{render, run_experiment, run_suite, ExperimentConfig, OutputFormat};
use fixaccel::engine::DEFAULT_MAX_ITER;
use fixaccel::{Method, Scalar};

/// Run fixed-point accelerators on the built-in problems and reproduce the
/// reference tables.
#[derive(Debug, Parser)]
#[command(name = "fixaccel", version)]
struct Args {
    /// Problem name: sin, logistic, fdil, power_family, s_family, kvb_complex
    #[arg(long, required_unless_present = "suite")]
    problem: Option<String>,

    /// Problem parameter as key=value (repeatable)
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, String)>,

    /// Method or transform to run (repeatable), e.g. standard, compose(standard,2)
    #[arg(long = "method")]
    methods: Vec<Method>,

    /// Real part of the start point (defaults to the problem's start)
    #[arg(long, allow_negative_numbers = true)]
    x0: Option<f64>,

    /// Imaginary part of the start point
    #[arg(long, requires = "x0", allow_negative_numbers = true)]
    x0_im: Option<f64>,

    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,

    #[arg(long, default_value_t = 1e-13)]
    tol: f64,

    /// Stop an iteration once |x_n| exceeds this
    #[arg(long, default_value_t = f64::INFINITY)]
    divergence_bound: f64,

    #[arg(long, value_enum, default_value_t = OutputFormat::Markdown)]
    format: OutputFormat,

    /// Reference suite to check: table1, table2, table3 (repeatable)
    #[arg(long = "suite", conflicts_with = "problem")]
    suite: Vec<String>,
}

fn parse_param(s: &str) -> Result<(String, String), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn main() -> ExitCode {
    let args = Args::parse();

    if !args.suite.is_empty() {
        return match run_suite(&args.suite) {
            Ok(report) => {
                println!("{report}");
                if report.passed() {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::FAILURE
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        };
    }

    let x0 = args.x0.map(|re| match args.x0_im {
        Some(im) => Scalar::complex(re, im),
        None => Scalar::real(re),
    });
    let config = ExperimentConfig {
        problem: args.problem.expect("clap requires --problem without --suite"),
        params: args.params,
        methods: args.methods,
        x0,
        max_iter: args.max_iter,
        tol: args.tol,
        divergence_bound: args.divergence_bound,
        format: args.format,
    };
    match run_experiment(&config) {
        Ok(report) => {
            print!("{}", render(&report, config.format));
            if config.format == OutputFormat::Json {
                println!();
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
