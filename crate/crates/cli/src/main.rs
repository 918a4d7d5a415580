use std::io::{BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use assoc_cli::checks::{algebra_suite, rep_suite, CheckSuite};
use assoc_cli::config::{apply_overrides, output_path, parse_override, RunConfig};
use assoc_cli::report::{parse_report, render_text, report_passes, write_csv};
use assoc_cli::solve::{run_solve, SolveOptions};
use assoc_cli::verify::{load_example, run_verify, Example, VerifyOptions};
use assoc_cli::{CliError, CliResult};
use assoc_core::g2::{EpsilonTable, BASE_TRIPLES};
use assoc_core::hl::BoundaryFamily;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "assoc",
    version,
    about = "Numerical checks for associative 3-folds in flat R^7"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Structure constants, cross product identities and B_phi definiteness.
    AlgebraCheck {
        /// Reverse the sign of one base triple (fault injection), e.g. 246.
        #[arg(long, value_name = "IJK", num_args = 0..=1, default_missing_value = "246")]
        flip_epsilon: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Clebsch-Gordan ranks, Schur vanishing and the stabilizer model.
    RepCheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the pointwise pipeline on sample points of an example.
    Verify {
        /// plane, sl-cone, perturbed-cone, sphere-cylinder or graph:FILE
        example: String,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Override one tolerance, e.g. symmetry=1e-6 (repeatable).
        #[arg(long = "tol-override", value_name = "KEY=VALUE")]
        tol_override: Vec<String>,
        /// Write JSON lines here instead of stdout.
        #[arg(long, value_name = "FILE")]
        json: Option<PathBuf>,
        /// Drop the Levi-Civita terms of the covariant derivative (fault injection).
        #[arg(long)]
        skip_christoffel: bool,
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
        /// Include wall-clock times in the records.
        #[arg(long)]
        timing: bool,
    },
    /// Newton solve of the graph equation on the unit box.
    SolveGraph {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        amplitude: Option<f64>,
        /// zero, affine, holomorphic (default), holomorphic-exp or sincos
        #[arg(long)]
        boundary: Option<String>,
        #[arg(long, value_name = "FILE", default_value = "graph.grid")]
        out: PathBuf,
        #[arg(long)]
        no_continuation: bool,
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
    },
    /// Summarize a JSON-lines report, or export its samples as CSV.
    Report {
        file: PathBuf,
        #[arg(long)]
        csv: bool,
    },
}

fn parse_triple(s: &str) -> CliResult<[usize; 3]> {
    let digits: Vec<usize> = s
        .chars()
        .filter_map(|c| c.to_digit(10).map(|d| d as usize))
        .collect();
    let bad = || CliError::Config(format!("{s:?} is not one of the base triples"));
    let t: [usize; 3] = digits.try_into().map_err(|_| bad())?;
    BASE_TRIPLES.contains(&t).then_some(t).ok_or_else(bad)
}

fn print_suite(title: &str, suite: &CheckSuite) -> bool {
    print!("{}", suite.render());
    match suite.first_failure() {
        None => println!("{title}: all {} checks pass", suite.checks.len()),
        Some(c) => println!("{title}: FAIL at {}: {}", c.name, c.detail),
    }
    suite.pass()
}

fn run(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::AlgebraCheck { flip_epsilon, seed } => {
            let table = match flip_epsilon {
                Some(t) => {
                    let t = parse_triple(&t)?;
                    println!(
                        "fault injection: epsilon sign of ({}{}{}) reversed",
                        t[0], t[1], t[2]
                    );
                    EpsilonTable::standard().with_flipped_triple(t)
                }
                None => EpsilonTable::standard().clone(),
            };
            Ok(print_suite("algebra-check", &algebra_suite(&table, seed)))
        }
        Command::RepCheck { seed } => Ok(print_suite("rep-check", &rep_suite(seed))),
        Command::Verify {
            example,
            samples,
            seed,
            tol_override,
            json,
            skip_christoffel,
            config,
            timing,
        } => {
            let cfg = RunConfig::load(config.as_deref())?.verify;
            let ex = load_example(&example.parse::<Example>()?)?;
            let mut tolerances = ex.tolerances;
            apply_overrides(
                &mut tolerances,
                cfg.tolerances.iter().map(|(k, v)| (k.as_str(), *v)),
            )?;
            let cli_overrides = tol_override
                .iter()
                .map(|s| parse_override(s))
                .collect::<CliResult<Vec<_>>>()?;
            apply_overrides(
                &mut tolerances,
                cli_overrides.iter().map(|(k, v)| (k.as_str(), *v)),
            )?;
            let opts = VerifyOptions {
                samples: samples.or(cfg.samples).unwrap_or(20),
                seed: seed.or(cfg.seed).unwrap_or(1),
                tolerances,
                skip_christoffel: skip_christoffel || cfg.skip_christoffel,
                timing,
            };
            let report = run_verify(&ex, &opts)?;
            match json {
                Some(path) => {
                    let path = output_path(&path)?;
                    let file = std::fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
                    let mut w = std::io::BufWriter::new(file);
                    report
                        .write_jsonl(&mut w)
                        .and_then(|_| w.flush())
                        .map_err(|e| CliError::io(&path, e))?;
                    println!("{}", report.human_summary());
                    println!("wrote {}", path.display());
                }
                None => {
                    report
                        .write_jsonl(std::io::stdout().lock())
                        .map_err(|e| CliError::io("<stdout>", e))?;
                    eprintln!("{}", report.human_summary());
                }
            }
            Ok(report.summary.pass)
        }
        Command::SolveGraph {
            n,
            amplitude,
            boundary,
            out,
            no_continuation,
            config,
        } => {
            let cfg = RunConfig::load(config.as_deref())?.solve;
            let defaults = SolveOptions::default();
            let boundary = match boundary {
                Some(b) => b.parse::<BoundaryFamily>()?,
                None => cfg.boundary.unwrap_or(defaults.boundary),
            };
            let mut solver = cfg.solver;
            if no_continuation {
                solver.continuation = false;
            }
            let opts = SolveOptions {
                n: n.or(cfg.n).unwrap_or(defaults.n),
                amplitude: amplitude.or(cfg.amplitude).unwrap_or(defaults.amplitude),
                boundary,
                config: solver,
                out: output_path(&out)?,
            };
            run_solve(&opts, &mut std::io::stdout().lock())?;
            Ok(true)
        }
        Command::Report { file, csv } => {
            let f = std::fs::File::open(&file).map_err(|e| CliError::io(&file, e))?;
            let report = parse_report(BufReader::new(f))?;
            if csv {
                write_csv(&report, std::io::stdout().lock())?;
            } else {
                print!("{}", render_text(&report));
            }
            Ok(report_passes(&report))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
