//! Damped Newton for the discretized Harvey–Lawson equation
//!
//! ```text
//! R(f) = i ∂₁f + j ∂₂f + k ∂₃f − ∂₁f × ∂₂f × ∂₃f = 0
//! ```
//!
//! with central differences, Dirichlet data, and restarted GMRES on the
//! exact (matrix-free) Jacobian.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{BoundaryData, GraphGrid};
use crate::error::{Error, Result};
use crate::g2::{triple_cross4, Quaternion};

const UNITS: [Quaternion; 3] = [Quaternion::I, Quaternion::J, Quaternion::K];

/// Sign of the triple-product term relative to `Σ e_a ∂_a f`.
pub const TRIPLE_SIGN: f64 = -1.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Sup-norm of the residual at which Newton stops.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Step length multiplier in `(0, 1]`.
    pub damping: f64,
    /// Order of the finite-difference scheme (only 2 is available).
    pub scheme_order: u32,
    /// Ramp the boundary amplitude if plain Newton fails.
    pub continuation: bool,
    pub continuation_steps: usize,
    pub gmres_restart: usize,
    pub gmres_tolerance: f64,
    pub gmres_max_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 20,
            damping: 1.0,
            scheme_order: 2,
            continuation: true,
            continuation_steps: 4,
            gmres_restart: 60,
            gmres_tolerance: 1e-12,
            gmres_max_iterations: 600,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return bad(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            ));
        }
        if self.max_iterations < 1 {
            return bad("max_iterations must be at least 1".into());
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return bad(format!("damping must lie in (0, 1], got {}", self.damping));
        }
        if self.scheme_order != 2 {
            return bad(format!(
                "scheme order {} is not implemented (only 2)",
                self.scheme_order
            ));
        }
        if self.continuation_steps < 1 || self.gmres_restart < 1 || self.gmres_max_iterations < 1 {
            return bad("continuation and GMRES counts must be at least 1".into());
        }
        if !(self.gmres_tolerance > 0.0 && self.gmres_tolerance < 1.0) {
            return bad(format!(
                "gmres_tolerance must lie in (0, 1), got {}",
                self.gmres_tolerance
            ));
        }
        Ok(())
    }
}

/// Central differences `(δ₁f, δ₂f, δ₃f)` at an interior node.
#[inline]
fn gradient(
    values: &[Quaternion],
    grid: &GraphGrid,
    inv2h: [f64; 3],
    i: usize,
    j: usize,
    k: usize,
) -> [Quaternion; 3] {
    let s = grid.n + 1;
    let c = grid.index(i, j, k);
    let strides = [s * s, s, 1];
    std::array::from_fn(|a| (values[c + strides[a]] - values[c - strides[a]]) * inv2h[a])
}

fn inverse_double_spacing(grid: &GraphGrid) -> [f64; 3] {
    grid.spacing().map(|h| 0.5 / h)
}

/// Residual at interior nodes, ordered `(i, j, k)` with `k` fastest.
pub fn dirac_residual(grid: &GraphGrid) -> Vec<Quaternion> {
    let n = grid.n;
    if n < 2 {
        return Vec::new();
    }
    let inv2h = inverse_double_spacing(grid);
    (1..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            (1..n).flat_map(move |j| {
                (1..n).map(move |k| {
                    let g = gradient(&grid.values, grid, inv2h, i, j, k);
                    let lin = UNITS[0] * g[0] + UNITS[1] * g[1] + UNITS[2] * g[2];
                    lin + triple_cross4(g[0], g[1], g[2]) * TRIPLE_SIGN
                })
            })
        })
        .collect()
}

pub fn sup_norm(r: &[Quaternion]) -> f64 {
    r.iter().map(|q| q.max_abs()).fold(0.0, f64::max)
}

pub fn residual_sup_norm(grid: &GraphGrid) -> f64 {
    sup_norm(&dirac_residual(grid))
}

/// Positions of the interior unknowns in the full node array.
pub fn interior_indices(grid: &GraphGrid) -> Vec<usize> {
    let n = grid.n;
    let mut out = Vec::with_capacity(grid.interior_count());
    for i in 1..n {
        for j in 1..n {
            for k in 1..n {
                out.push(grid.index(i, j, k));
            }
        }
    }
    out
}

/// Jacobian-vector product `dR_f[v]` for `v` vanishing on the boundary.
pub fn jacobian_apply(grid: &GraphGrid, interior: &[usize], v: &[f64]) -> Vec<f64> {
    let mut full = vec![Quaternion::ZERO; grid.values.len()];
    for (m, &idx) in interior.iter().enumerate() {
        full[idx] = Quaternion([v[4 * m], v[4 * m + 1], v[4 * m + 2], v[4 * m + 3]]);
    }
    let n = grid.n;
    let inv2h = inverse_double_spacing(grid);
    let per_node: Vec<Quaternion> = (1..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let full = &full;
            (1..n).flat_map(move |j| {
                (1..n).map(move |k| {
                    let g = gradient(&grid.values, grid, inv2h, i, j, k);
                    let d = gradient(full, grid, inv2h, i, j, k);
                    let lin = UNITS[0] * d[0] + UNITS[1] * d[1] + UNITS[2] * d[2];
                    let cubic = triple_cross4(d[0], g[1], g[2])
                        + triple_cross4(g[0], d[1], g[2])
                        + triple_cross4(g[0], g[1], d[2]);
                    lin + cubic * TRIPLE_SIGN
                })
            })
        })
        .collect();
    per_node.iter().flat_map(|q| q.0).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Clone, Debug)]
pub struct GmresOutcome {
    pub x: Vec<f64>,
    pub relative_residual: f64,
    pub iterations: usize,
}

/// Restarted GMRES with modified Gram–Schmidt and Givens rotations.
pub fn gmres(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    restart: usize,
    tol: f64,
    max_iter: usize,
) -> GmresOutcome {
    let dim = b.len();
    let bnorm = norm(b);
    let mut x = vec![0.0; dim];
    if bnorm == 0.0 {
        return GmresOutcome {
            x,
            relative_residual: 0.0,
            iterations: 0,
        };
    }
    let mut total = 0;
    let mut rel = 1.0;
    let mut cycle_start = f64::INFINITY;
    while total < max_iter {
        let ax = apply(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let beta = norm(&r);
        rel = beta / bnorm;
        // Stop on convergence or when a whole restart cycle made no progress.
        if rel <= tol || rel > STAGNATION * cycle_start {
            break;
        }
        cycle_start = rel;
        let m = restart.min(max_iter - total);
        let mut basis: Vec<Vec<f64>> = vec![r.iter().map(|v| v / beta).collect()];
        let mut h = vec![vec![0.0; m]; m + 1];
        let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut used = 0;
        for k in 0..m {
            let mut w = apply(&basis[k]);
            for (jdx, vj) in basis.iter().enumerate() {
                let hj = dot(&w, vj);
                h[jdx][k] = hj;
                w.iter_mut().zip(vj).for_each(|(wi, vi)| *wi -= hj * vi);
            }
            let wn = norm(&w);
            h[k + 1][k] = wn;
            for jdx in 0..k {
                let t = cs[jdx] * h[jdx][k] + sn[jdx] * h[jdx + 1][k];
                h[jdx + 1][k] = -sn[jdx] * h[jdx][k] + cs[jdx] * h[jdx + 1][k];
                h[jdx][k] = t;
            }
            let denom = h[k][k].hypot(h[k + 1][k]);
            if denom == 0.0 {
                break;
            }
            cs[k] = h[k][k] / denom;
            sn[k] = h[k + 1][k] / denom;
            h[k][k] = denom;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            used = k + 1;
            total += 1;
            rel = g[k + 1].abs() / bnorm;
            if rel <= tol || wn == 0.0 {
                break;
            }
            basis.push(w.iter().map(|v| v / wn).collect());
        }
        // Back substitution for the least-squares coefficients.
        let mut y = vec![0.0; used];
        for r in (0..used).rev() {
            let s: f64 = (r + 1..used).map(|c| h[r][c] * y[c]).sum();
            y[r] = (g[r] - s) / h[r][r];
        }
        for (c, yc) in y.iter().enumerate() {
            x.iter_mut()
                .zip(&basis[c])
                .for_each(|(xi, vi)| *xi += yc * vi);
        }
        if rel <= tol || used == 0 {
            break;
        }
    }
    GmresOutcome {
        x,
        relative_residual: rel,
        iterations: total,
    }
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub grid: GraphGrid,
    /// Sup-norm residual before each Newton step and after the last one.
    pub history: Vec<f64>,
    pub iterations: usize,
    pub continuation_used: bool,
}

impl SolveOutcome {
    pub fn residual(&self) -> f64 {
        self.history.last().copied().unwrap_or(f64::NAN)
    }
}

/// Residual growth factor treated as divergence.
const BLOWUP: f64 = 1e8;
/// Residual ratio over one GMRES restart cycle regarded as no progress.
const STAGNATION: f64 = 0.999;

fn newton(mut grid: GraphGrid, config: &SolverConfig) -> Result<(GraphGrid, Vec<f64>)> {
    if grid.n.is_multiple_of(2) {
        // δ² = −4 sin² on each axis vanishes at the middle mode when the
        // interior count n − 1 is odd, so the linearization is singular.
        return Err(Error::LinearSolve(format!(
            "central-difference Dirac operator is singular with {} interior nodes per axis",
            grid.n - 1
        )));
    }
    let interior = interior_indices(&grid);
    let mut history = Vec::new();
    let mut r = dirac_residual(&grid);
    let r0 = sup_norm(&r);
    history.push(r0);
    for _ in 0..config.max_iterations {
        let current = *history.last().unwrap();
        if current < config.tolerance {
            return Ok((grid, history));
        }
        let rhs: Vec<f64> = r.iter().flat_map(|q| q.0.map(|c| -c)).collect();
        let sol = gmres(
            |v| jacobian_apply(&grid, &interior, v),
            &rhs,
            config.gmres_restart,
            config.gmres_tolerance,
            config.gmres_max_iterations,
        );
        // Inexact steps are accepted; a stagnating solve shows up as a
        // Newton iteration that fails to converge.
        if sol.x.iter().any(|v| !v.is_finite()) {
            return Err(Error::LinearSolve(format!(
                "GMRES produced a non-finite step after {} iterations",
                sol.iterations
            )));
        }
        for (m, &idx) in interior.iter().enumerate() {
            let d = Quaternion([
                sol.x[4 * m],
                sol.x[4 * m + 1],
                sol.x[4 * m + 2],
                sol.x[4 * m + 3],
            ]);
            grid.values[idx] = grid.values[idx] + d * config.damping;
        }
        r = dirac_residual(&grid);
        let next = sup_norm(&r);
        history.push(next);
        if !next.is_finite() || next > BLOWUP * r0.max(config.tolerance) {
            return Err(Error::Diverged {
                iterations: history.len() - 1,
                history,
            });
        }
    }
    if *history.last().unwrap() < config.tolerance {
        return Ok((grid, history));
    }
    Err(Error::Diverged {
        iterations: history.len() - 1,
        history,
    })
}

/// Solves on the box `[lo, hi]` with `n` cells per axis. `initial` (if
/// given) supplies the interior guess; boundary nodes always come from
/// `boundary`.
pub fn solve_graph(
    boundary: &BoundaryData,
    lo: [f64; 3],
    hi: [f64; 3],
    n: usize,
    config: &SolverConfig,
    initial: Option<&GraphGrid>,
) -> Result<SolveOutcome> {
    config.validate()?;
    if n < 3 {
        return Err(Error::InvalidConfig(format!(
            "resolution must be at least 3 cells, got {n}"
        )));
    }
    let start = |b: &BoundaryData, guess: Option<&GraphGrid>| -> Result<GraphGrid> {
        let mut g = GraphGrid::with_boundary(lo, hi, n, b);
        if let Some(guess) = guess {
            if guess.n != n || guess.lo != lo || guess.hi != hi {
                return Err(Error::InvalidConfig(
                    "initial guess does not match the grid".into(),
                ));
            }
            for i in 1..n {
                for j in 1..n {
                    for k in 1..n {
                        let idx = g.index(i, j, k);
                        g.values[idx] = guess.values[idx];
                    }
                }
            }
        }
        Ok(g)
    };
    match newton(start(boundary, initial)?, config) {
        Ok((grid, history)) => {
            let iterations = history.len() - 1;
            Ok(SolveOutcome {
                grid,
                history,
                iterations,
                continuation_used: false,
            })
        }
        Err(Error::Diverged {
            iterations,
            history,
        }) if !config.continuation => Err(Error::Diverged {
            iterations,
            history,
        }),
        Err(Error::Diverged { .. }) => {
            let steps = config.continuation_steps;
            let mut guess: Option<GraphGrid> = initial.cloned();
            let mut history = Vec::new();
            for s in 1..=steps {
                let b = boundary.with_amplitude(boundary.amplitude * s as f64 / steps as f64);
                let (grid, h) =
                    newton(start(&b, guess.as_ref())?, config).map_err(|e| match e {
                        Error::Diverged { history: h, .. } => {
                            let mut all = history.clone();
                            all.extend(h);
                            Error::Diverged {
                                iterations: all.len(),
                                history: all,
                            }
                        }
                        other => other,
                    })?;
                history.extend(h);
                guess = Some(grid);
            }
            let iterations = history.len() - steps;
            Ok(SolveOutcome {
                grid: guess.expect("at least one step"),
                history,
                iterations,
                continuation_used: true,
            })
        }
        Err(e) => Err(e),
    }
}

/// Convenience wrapper on the unit box.
pub fn solve_unit_box(
    boundary: &BoundaryData,
    n: usize,
    config: &SolverConfig,
) -> Result<SolveOutcome> {
    solve_graph(boundary, [0.0; 3], [1.0; 3], n, config, None)
}
