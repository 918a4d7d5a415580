use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use assoc_core::hl::{solve_unit_box, BoundaryData, BoundaryFamily, SolveOutcome, SolverConfig};
use assoc_core::Error;

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub n: usize,
    pub amplitude: f64,
    pub boundary: BoundaryFamily,
    pub config: SolverConfig,
    pub out: PathBuf,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            n: 17,
            amplitude: 0.1,
            boundary: BoundaryFamily::Holomorphic,
            config: SolverConfig::default(),
            out: PathBuf::from("graph.grid"),
        }
    }
}

fn print_history(log: &mut impl Write, history: &[f64]) -> std::io::Result<()> {
    for (k, r) in history.iter().enumerate() {
        writeln!(log, "iteration {k:>3}  residual {r:.6e}")?;
    }
    Ok(())
}

pub fn write_grid(path: &Path, outcome: &SolveOutcome) -> CliResult<()> {
    let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    outcome.grid.write_to(&mut w, outcome.residual())?;
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Solves on the unit box, prints the residual history to `log` and writes
/// the grid to `opts.out`. A diverged solve prints the history and fails.
pub fn run_solve(opts: &SolveOptions, log: &mut impl Write) -> CliResult<SolveOutcome> {
    if !opts.amplitude.is_finite() {
        return Err(CliError::Config(format!(
            "amplitude must be finite, got {}",
            opts.amplitude
        )));
    }
    let boundary = BoundaryData::new(opts.boundary, opts.amplitude);
    let io = |e| CliError::io("<stdout>", e);
    writeln!(
        log,
        "boundary {} amplitude {} n {}",
        opts.boundary, opts.amplitude, opts.n
    )
    .map_err(io)?;
    match solve_unit_box(&boundary, opts.n, &opts.config) {
        Ok(outcome) => {
            print_history(log, &outcome.history).map_err(io)?;
            write_grid(&opts.out, &outcome)?;
            writeln!(
                log,
                "converged after {} iterations{}: residual {:.3e}, wrote {}",
                outcome.iterations,
                if outcome.continuation_used {
                    " with continuation"
                } else {
                    ""
                },
                outcome.residual(),
                opts.out.display()
            )
            .map_err(io)?;
            Ok(outcome)
        }
        Err(Error::Diverged {
            iterations,
            history,
        }) => {
            print_history(log, &history).map_err(io)?;
            writeln!(log, "diverged after {iterations} iterations").map_err(io)?;
            Err(Error::Diverged {
                iterations,
                history,
            }
            .into())
        }
        Err(e) => Err(e.into()),
    }
}
