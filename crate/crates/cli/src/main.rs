use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use aluthge_core::aluthge::{aluthge, aluthge_orbit};
use aluthge_core::harness::{self, orbit_csv, properties, read_element, write_element, SuiteConfig};
use aluthge_core::preservers::Expectation;
use aluthge_core::{Error, Lambda, TolerancePolicy};

const EXIT_PROPERTY: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(name = "aluthge-lab")]
#[command(about = "Aluthge transforms and seeded verification suites over finite-dimensional operator algebras")]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Apply the λ-Aluthge transform to an element stored as JSON
    Transform {
        #[arg(long)]
        lambda: f64,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
    },
    /// Run property suites and write a JSON report
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated property ids or group prefixes, or "all"
        #[arg(long, default_value = "all")]
        suite: String,
        /// Block profiles, e.g. "2;3;2,2" (one algebra per ';')
        #[arg(long)]
        profiles: Option<String>,
        /// Comma-separated exponents in [0, 1]
        #[arg(long)]
        lambdas: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Iterate the transform and write a CSV of step, quasi-normality residual and step size
    Orbit {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
    },
    /// Print every property id with its expected outcome
    ListProperties,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_)
            | Error::InvalidTolerance(_)
            | Error::BadLambda(_)
            | Error::InvalidAlgebra(_)
            | Error::ShapeMismatch(_)
            | Error::NotSquare { .. } => EXIT_USAGE,
            _ => EXIT_NUMERIC,
        };
        Self { code, message: e.to_string() }
    }
}

fn tolerance() -> Result<TolerancePolicy, Failure> {
    match std::env::var("ALUTHGE_TOL") {
        Ok(raw) => {
            let eq_tol: f64 = raw.trim().parse().map_err(|_| Failure::usage(format!("ALUTHGE_TOL: not a number: {raw}")))?;
            Ok(TolerancePolicy::default().with_eq_tol(eq_tol)?)
        }
        Err(_) => Ok(TolerancePolicy::default()),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn parse_list<T: std::str::FromStr>(raw: &str, sep: char, what: &str) -> Result<Vec<T>, Failure> {
    raw.split(sep)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Failure::usage(format!("bad {what}: '{s}'"))))
        .collect()
}

fn cmd_transform(lambda: f64, input: &Path, output: &Path) -> Result<(), Failure> {
    let tol = tolerance()?;
    let lambda = Lambda::new(lambda)?;
    let a = read_element(input)?;
    let out = aluthge(&a, lambda, &tol)?;
    write_file(output, &write_element(&out))
}

fn cmd_orbit(lambda: f64, steps: usize, input: &Path, output: &Path) -> Result<(), Failure> {
    let tol = tolerance()?;
    let lambda = Lambda::new(lambda)?;
    let a = read_element(input)?;
    let orbit = aluthge_orbit(&a, lambda, steps, &tol)?;
    write_file(output, &orbit_csv(&orbit))
}

fn cmd_verify(
    seed: u64,
    suite: &str,
    profiles: Option<&str>,
    lambdas: Option<&str>,
    trials: Option<usize>,
    report: Option<&Path>,
) -> Result<(), Failure> {
    let mut config = SuiteConfig::with_seed(seed);
    config.tolerance = tolerance()?;
    if let Some(p) = profiles {
        config.block_profiles =
            p.split(';').filter(|s| !s.trim().is_empty()).map(|s| parse_list(s, ',', "block size")).collect::<Result<_, _>>()?;
        if config.block_profiles.is_empty() {
            return Err(Failure::usage("empty profile list"));
        }
    }
    if let Some(l) = lambdas {
        config.lambda_grid = parse_list(l, ',', "lambda")?;
    }
    if let Some(t) = trials {
        config.trials_per_property = t;
    }
    let selection: Vec<String> = suite.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    let result = harness::run_suite(&config, &selection)?;
    for r in &result.reports {
        let tag = if r.passed() { "PASS" } else { "FAIL" };
        let note = match (r.expectation, r.holds) {
            (Expectation::Fails, false) => " (failed as expected)",
            (Expectation::Fails, true) => " (expected a failure)",
            _ => "",
        };
        println!("{tag} {} max_residual={:e}{note}", r.property, r.max_residual);
    }
    println!("{} passed, {} failed", result.passed, result.failed);
    if let Some(path) = report {
        write_file(path, &result.to_json())?;
    }
    if result.all_passed() {
        Ok(())
    } else {
        Err(Failure { code: EXIT_PROPERTY, message: format!("{} properties failed", result.failed) })
    }
}

fn cmd_list() {
    for p in properties() {
        let exp = match p.expectation {
            Expectation::Holds => "holds",
            Expectation::Fails => "fails",
        };
        println!("{:<38} {:<6} {}", p.id, exp, p.description);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Commands::Transform { lambda, input, output } => cmd_transform(*lambda, input, output),
        Commands::Verify { seed, suite, profiles, lambdas, trials, report } => {
            cmd_verify(*seed, suite, profiles.as_deref(), lambdas.as_deref(), *trials, report.as_deref())
        }
        Commands::Orbit { lambda, steps, input, output } => cmd_orbit(*lambda, *steps, input, output),
        Commands::ListProperties => {
            cmd_list();
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("aluthge-lab: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
