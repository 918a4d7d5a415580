use nalgebra::DMatrix;

use super::grid::GraphGrid;
use super::solver::residual_sup_norm;
use crate::error::{Error, Result};
use crate::g2::{Quaternion, Vector7};
use crate::geom::{BoxDomain, ImmersionPatch, Point3, PointJet};
use crate::spin4::stabilizer::quaternion_to_normal;

/// Not-a-knot cubic spline on uniform nodes, as a linear map of the data.
#[derive(Clone, Debug)]
struct Spline1d {
    lo: f64,
    h: f64,
    n: usize,
    /// Second derivatives at the nodes, `M = K y`.
    moments: DMatrix<f64>,
}

impl Spline1d {
    fn new(lo: f64, hi: f64, n: usize) -> Self {
        let h = (hi - lo) / n as f64;
        let m = n + 1;
        let mut a = DMatrix::zeros(m, m);
        let mut b = DMatrix::zeros(m, m);
        // Third derivative continuous across the first and last interior knots.
        a[(0, 0)] = 1.0;
        a[(0, 1)] = -2.0;
        a[(0, 2)] = 1.0;
        a[(n, n - 2)] = 1.0;
        a[(n, n - 1)] = -2.0;
        a[(n, n)] = 1.0;
        for i in 1..n {
            a[(i, i - 1)] = 1.0;
            a[(i, i)] = 4.0;
            a[(i, i + 1)] = 1.0;
            let s = 6.0 / (h * h);
            b[(i, i - 1)] = s;
            b[(i, i)] = -2.0 * s;
            b[(i, i + 1)] = s;
        }
        let moments = a
            .lu()
            .solve(&b)
            .expect("not-a-knot system is nonsingular for n >= 3");
        Self { lo, h, n, moments }
    }

    /// Weights `w` with `s^{(d)}(x) = Σ w_i y_i` for `d = 0..=3`.
    fn weights(&self, x: f64) -> [Vec<f64>; 4] {
        let h = self.h;
        let t = (x - self.lo) / h;
        let i = (t.floor().max(0.0) as usize).min(self.n - 1);
        let (xl, xr) = (self.lo + i as f64 * h, self.lo + (i + 1) as f64 * h);
        let (a, b) = (xr - x, x - xl);
        // s = M_i a³/6h + M_{i+1} b³/6h + (y_i − M_i h²/6) a/h + (y_{i+1} − M_{i+1} h²/6) b/h
        let coef_y = [[a / h, b / h], [-1.0 / h, 1.0 / h], [0.0, 0.0], [0.0, 0.0]];
        let coef_m = [
            [
                a.powi(3) / (6.0 * h) - a * h / 6.0,
                b.powi(3) / (6.0 * h) - b * h / 6.0,
            ],
            [-a * a / (2.0 * h) + h / 6.0, b * b / (2.0 * h) - h / 6.0],
            [a / h, b / h],
            [-1.0 / h, 1.0 / h],
        ];
        std::array::from_fn(|d| {
            let mut w = vec![0.0; self.n + 1];
            w[i] += coef_y[d][0];
            w[i + 1] += coef_y[d][1];
            for (col, wc) in w.iter_mut().enumerate() {
                *wc += coef_m[d][0] * self.moments[(i, col)]
                    + coef_m[d][1] * self.moments[(i + 1, col)];
            }
            w
        })
    }
}

/// Tricubic interpolant of a grid function with derivatives to order three.
#[derive(Clone, Debug)]
pub struct TensorSpline {
    axes: [Spline1d; 3],
    grid: GraphGrid,
}

impl TensorSpline {
    pub fn new(grid: &GraphGrid) -> Result<Self> {
        if grid.n < 3 {
            return Err(Error::InvalidConfig(format!(
                "spline needs at least 3 cells, got {}",
                grid.n
            )));
        }
        let axes = std::array::from_fn(|a| Spline1d::new(grid.lo[a], grid.hi[a], grid.n));
        Ok(Self {
            axes,
            grid: grid.clone(),
        })
    }

    /// `∂^{n₀,n₁,n₂} f(x)` for all multi-indices with `n₀ + n₁ + n₂ ≤ 3`,
    /// stored at `[n₀][n₁][n₂]`.
    pub fn derivatives(&self, x: Point3) -> [[[Quaternion; 4]; 4]; 4] {
        let n1 = self.grid.n + 1;
        let w: [[Vec<f64>; 4]; 3] = std::array::from_fn(|a| self.axes[a].weights(x[a]));
        // Contract the first axis: t0[d0][j][k]
        let mut t0 = vec![vec![Quaternion::ZERO; n1 * n1]; 4];
        for (d0, slab) in t0.iter_mut().enumerate() {
            for (i, wi) in w[0][d0].iter().enumerate() {
                if *wi == 0.0 {
                    continue;
                }
                let base = i * n1 * n1;
                for (jk, s) in slab.iter_mut().enumerate() {
                    *s = *s + self.grid.values[base + jk] * *wi;
                }
            }
        }
        let mut out = [[[Quaternion::ZERO; 4]; 4]; 4];
        for d0 in 0..4 {
            for d1 in 0..4 - d0 {
                let mut t1 = vec![Quaternion::ZERO; n1];
                for (j, wj) in w[1][d1].iter().enumerate() {
                    if *wj == 0.0 {
                        continue;
                    }
                    for (k, s) in t1.iter_mut().enumerate() {
                        *s = *s + t0[d0][j * n1 + k] * *wj;
                    }
                }
                for d2 in 0..4 - d0 - d1 {
                    out[d0][d1][d2] = t1
                        .iter()
                        .zip(&w[2][d2])
                        .fold(Quaternion::ZERO, |acc, (q, wk)| acc + *q * *wk);
                }
            }
        }
        out
    }
}

/// The graph `x ↦ (x, f(x))` with normal coordinates from
/// [`quaternion_to_normal`].
#[derive(Clone, Debug)]
pub struct GraphPatch {
    pub spline: TensorSpline,
    pub domain: BoxDomain,
    name: String,
}

/// Ambient point of the graph over `x` with value `f`.
pub fn graph_point(x: Point3, f: Quaternion) -> Vector7 {
    let n = quaternion_to_normal(f);
    Vector7::from_column_slice(&[x[0], x[1], x[2], n[0], n[1], n[2], n[3]])
}

impl GraphPatch {
    /// Spline patch of any grid, converged or not. The domain is shrunk by
    /// one cell on every side.
    pub fn from_grid_unchecked(name: &str, grid: &GraphGrid) -> Result<Self> {
        let spline = TensorSpline::new(grid)?;
        let h = grid.spacing();
        let domain = BoxDomain::new(
            std::array::from_fn(|a| grid.lo[a] + h[a]),
            std::array::from_fn(|a| grid.hi[a] - h[a]),
        );
        Ok(Self {
            spline,
            domain,
            name: name.into(),
        })
    }
}

/// Spline patch of a grid whose Dirac residual is below `tolerance`.
pub fn graph_to_patch(grid: &GraphGrid, tolerance: f64) -> Result<GraphPatch> {
    let residual = residual_sup_norm(grid);
    if !(residual < tolerance) {
        return Err(Error::Unconverged {
            residual,
            tolerance,
        });
    }
    GraphPatch::from_grid_unchecked("graph", grid)
}

impl ImmersionPatch for GraphPatch {
    fn name(&self) -> &str {
        &self.name
    }

    fn domain(&self) -> BoxDomain {
        self.domain
    }

    fn expected_associative(&self) -> bool {
        true
    }

    fn raw_jet(&self, x: Point3) -> PointJet {
        let d = self.spline.derivatives(x);
        let lift = |q: Quaternion| {
            let n = quaternion_to_normal(q);
            Vector7::from_column_slice(&[0.0, 0.0, 0.0, n[0], n[1], n[2], n[3]])
        };
        let at = |idx: &[usize]| {
            let mut c = [0usize; 3];
            for &i in idx {
                c[i] += 1;
            }
            lift(d[c[0]][c[1]][c[2]])
        };
        let mut jet = PointJet::zero(x);
        jet.u = graph_point(x, d[0][0][0]);
        for a in 0..3 {
            jet.d1[a] = at(&[a]);
            jet.d1[a][a] += 1.0;
            for b in 0..3 {
                jet.d2[a][b] = at(&[a, b]);
                for c in 0..3 {
                    jet.d3[a][b][c] = at(&[a, b, c]);
                }
            }
        }
        jet
    }
}
