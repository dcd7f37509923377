use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use etale_lab::gallery::{self, FixtureStatus};
use etale_lab::random::DEFAULT_SEED;
use etale_lab::report::{self, Options, Params, Report};
use etale_lab::scenario::Scenario;
use etale_lab::selftest;
use etale_lab::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Command {
    /// Build and check a germ system.
    Validate,
    /// Freeness verdicts, Hausdorffness, minimality, pure infiniteness.
    Report,
    /// Normal forms, expectations and products of the scenario's sections.
    Eval,
    /// Singularity by both routes, and essential equality.
    Singular,
    /// Orbit matrices and norm probes.
    Orbit,
    /// Run built-in scenarios and compare with stored fixtures.
    Gallery,
    /// Run the randomized invariant suites.
    Selftest,
}

/// Exact symbolic workbench for étale groupoids of germs.
///
/// Exit codes: 0 success, 1 invalid scenario or usage, 2 internal
/// invariant violation or fixture mismatch, 3 bound exceeded or unstable.
#[derive(Parser, Debug)]
#[command(name = "etale-lab", version)]
struct Cli {
    command: Command,
    /// Scenario file, or a gallery scenario name.
    target: Option<String>,
    /// Composition bound for regime B label enumeration.
    #[arg(long)]
    bound: Option<usize>,
    /// Cylinder depth for minimality and the pure-infiniteness search.
    #[arg(long)]
    depth: Option<usize>,
    /// Label length for the pure-infiniteness search.
    #[arg(long)]
    len: Option<usize>,
    /// Relative tolerance of norm estimates.
    #[arg(long)]
    tol: Option<f64>,
    /// Seed of the randomized suites.
    #[arg(long)]
    seed: Option<u64>,
    /// Cases per randomized suite (selftest).
    #[arg(long)]
    cases: Option<usize>,
    /// Machine-readable output.
    #[arg(long, conflicts_with = "text")]
    json: bool,
    /// Human-readable output (default).
    #[arg(long)]
    text: bool,
    /// Overwrite gallery fixtures with the current output.
    #[arg(long)]
    regenerate: bool,
}

fn load_target(target: Option<&str>) -> Result<Scenario> {
    let target = target.ok_or_else(|| Error::Parse("this command needs a scenario file".into()))?;
    if Path::new(target).exists() {
        Scenario::load(Path::new(target))
    } else if gallery::names().iter().any(|n| n == target) || target.starts_with("random-") {
        gallery::scenario(target)
    } else {
        Scenario::load(Path::new(target))
    }
}

fn emit(cli: &Cli, report: &Report) {
    if cli.json {
        print!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
}

fn run(cli: &Cli) -> Result<()> {
    match cli.command {
        Command::Gallery => {
            let names = match &cli.target {
                Some(n) => vec![n.clone()],
                None => gallery::names(),
            };
            let mut mismatch = None;
            for name in &names {
                let run = gallery::run(name, cli.regenerate)?;
                if names.len() == 1 {
                    emit(cli, &run.report);
                }
                let status = match &run.fixture {
                    FixtureStatus::Match => "fixture matches".to_string(),
                    FixtureStatus::Written => "fixture written".to_string(),
                    FixtureStatus::Missing => "no fixture stored".to_string(),
                    FixtureStatus::Differs { line, expected, actual } => {
                        mismatch.get_or_insert_with(|| name.clone());
                        format!("fixture differs at line {line}: expected {expected:?}, got {actual:?}")
                    }
                };
                eprintln!("gallery {name}: {status}");
            }
            match mismatch {
                Some(name) => Err(Error::Invariant(format!("gallery output of {name} differs from its fixture"))),
                None => Ok(()),
            }
        }
        Command::Selftest => {
            let seed = cli.seed.unwrap_or(DEFAULT_SEED);
            let results = selftest::run_all(seed, cli.cases);
            let mut failed = Vec::new();
            for r in &results {
                println!("{r}");
                if !r.passed() {
                    failed.push(r.name.clone());
                }
            }
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Error::Invariant(format!("selftest suites failed: {}", failed.join(", "))))
            }
        }
        cmd => {
            let sc = load_target(cli.target.as_deref())?;
            let loaded = sc.load_all()?;
            let opts = Options {
                bound: cli.bound,
                depth: cli.depth,
                len: cli.len,
                tol: cli.tol,
            };
            let params = Params::resolve(&loaded, &opts);
            let (name, results) = match cmd {
                Command::Validate => ("validate", report::validate(&loaded, &params)),
                Command::Report => ("report", report::freeness(&loaded, &params)?),
                Command::Eval => ("eval", report::eval(&loaded, &params)?),
                Command::Singular => ("singular", report::singular(&loaded, &params)?),
                Command::Orbit => ("orbit", report::orbit(&loaded, &params)?),
                Command::Gallery | Command::Selftest => unreachable!("handled above"),
            };
            emit(
                cli,
                &Report {
                    scenario: sc.name.clone(),
                    command: name.into(),
                    params,
                    results,
                },
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
