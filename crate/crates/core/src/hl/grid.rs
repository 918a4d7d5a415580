use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::g2::Quaternion;

/// Values of `f : Ω → H` on the `(n+1)³` nodes of a uniform grid with `n`
/// cells per axis. Node `(i, j, k)` is stored at `((i (n+1)) + j)(n+1) + k`.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphGrid {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    pub n: usize,
    pub values: Vec<Quaternion>,
}

impl GraphGrid {
    pub fn from_fn(
        lo: [f64; 3],
        hi: [f64; 3],
        n: usize,
        mut f: impl FnMut([f64; 3]) -> Quaternion,
    ) -> Self {
        let mut g = Self {
            lo,
            hi,
            n,
            values: vec![Quaternion::ZERO; (n + 1).pow(3)],
        };
        for i in 0..=n {
            for j in 0..=n {
                for k in 0..=n {
                    let idx = g.index(i, j, k);
                    g.values[idx] = f(g.node(i, j, k));
                }
            }
        }
        g
    }

    /// Boundary nodes from `boundary`, interior nodes zero.
    pub fn with_boundary(lo: [f64; 3], hi: [f64; 3], n: usize, boundary: &BoundaryData) -> Self {
        let mut g = Self::from_fn(lo, hi, n, |x| boundary.value(x));
        for i in 1..n {
            for j in 1..n {
                for k in 1..n {
                    let idx = g.index(i, j, k);
                    g.values[idx] = Quaternion::ZERO;
                }
            }
        }
        g
    }

    pub fn unit_box(n: usize, boundary: &BoundaryData) -> Self {
        Self::with_boundary([0.0; 3], [1.0; 3], n, boundary)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * (self.n + 1) + j) * (self.n + 1) + k
    }

    pub fn spacing(&self) -> [f64; 3] {
        std::array::from_fn(|a| (self.hi[a] - self.lo[a]) / self.n as f64)
    }

    pub fn node(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        let h = self.spacing();
        [
            self.lo[0] + i as f64 * h[0],
            self.lo[1] + j as f64 * h[1],
            self.lo[2] + k as f64 * h[2],
        ]
    }

    pub fn is_boundary(&self, i: usize, j: usize, k: usize) -> bool {
        [i, j, k].iter().any(|&c| c == 0 || c == self.n)
    }

    pub fn interior_count(&self) -> usize {
        self.n.saturating_sub(1).pow(3)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|q| q.max_abs()).fold(0.0, f64::max)
    }

    /// Largest difference from `other` on boundary nodes.
    pub fn boundary_mismatch(&self, other: &GraphGrid) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..=self.n {
            for j in 0..=self.n {
                for k in 0..=self.n {
                    if self.is_boundary(i, j, k) {
                        let idx = self.index(i, j, k);
                        worst = worst.max((self.values[idx] - other.values[idx]).max_abs());
                    }
                }
            }
        }
        worst
    }

    /// Text format: `box` line with `lo` then `hi`, `n`, `residual`, then
    /// `(n+1)³` lines of four reals with `k` varying fastest.
    pub fn write_to(&self, mut out: impl Write, residual: f64) -> Result<()> {
        let mut s = String::new();
        let [a, b, c] = self.lo;
        let [d, e, f] = self.hi;
        writeln!(s, "box {a:e} {b:e} {c:e} {d:e} {e:e} {f:e}").unwrap();
        writeln!(s, "n {}", self.n).unwrap();
        writeln!(s, "residual {residual:e}").unwrap();
        for q in &self.values {
            writeln!(s, "{:e} {:e} {:e} {:e}", q.0[0], q.0[1], q.0[2], q.0[3]).unwrap();
        }
        out.write_all(s.as_bytes())?;
        Ok(())
    }

    /// Returns the grid and the residual recorded in the header.
    pub fn read_from(input: impl BufRead) -> Result<(Self, f64)> {
        let mut lines = input.lines();
        let mut next = |what: &str| -> Result<String> {
            lines
                .next()
                .ok_or_else(|| Error::GridFormat(format!("missing {what}")))?
                .map_err(Error::from)
        };
        let header = |line: String, key: &str, count: usize| -> Result<Vec<f64>> {
            let mut parts = line.split_whitespace();
            if parts.next() != Some(key) {
                return Err(Error::GridFormat(format!(
                    "expected `{key}` line, got {line:?}"
                )));
            }
            let v = parts.map(parse_f64).collect::<Result<Vec<_>>>()?;
            if v.len() != count {
                return Err(Error::GridFormat(format!(
                    "`{key}` needs {count} values, got {}",
                    v.len()
                )));
            }
            Ok(v)
        };
        let bx = header(next("box")?, "box", 6)?;
        let n_line = next("n")?;
        let n = n_line
            .strip_prefix("n ")
            .and_then(|s| s.trim().parse::<usize>().ok())
            .ok_or_else(|| Error::GridFormat(format!("bad resolution line {n_line:?}")))?;
        if n < 3 {
            return Err(Error::GridFormat(format!(
                "resolution {n} is below the minimum of 3"
            )));
        }
        let residual = header(next("residual")?, "residual", 1)?[0];
        let lo = [bx[0], bx[1], bx[2]];
        let hi = [bx[3], bx[4], bx[5]];
        if (0..3).any(|a| !(hi[a] > lo[a])) {
            return Err(Error::GridFormat("empty box".into()));
        }
        let total = (n + 1).pow(3);
        let mut values = Vec::with_capacity(total);
        for idx in 0..total {
            let line = next(&format!("node {idx}"))?;
            let v = line
                .split_whitespace()
                .map(parse_f64)
                .collect::<Result<Vec<_>>>()?;
            if v.len() != 4 {
                return Err(Error::GridFormat(format!(
                    "node {idx}: expected 4 values, got {}",
                    v.len()
                )));
            }
            values.push(Quaternion([v[0], v[1], v[2], v[3]]));
        }
        if let Some(extra) = lines.find(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty())) {
            return Err(Error::GridFormat(format!(
                "trailing data after {total} nodes: {:?}",
                extra.ok()
            )));
        }
        Ok((Self { lo, hi, n, values }, residual))
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    let v: f64 = s
        .parse()
        .map_err(|_| Error::GridFormat(format!("not a number: {s:?}")))?;
    if !v.is_finite() {
        return Err(Error::GridFormat(format!("non-finite value {s}")));
    }
    Ok(v)
}

/// Named analytic boundary families. The holomorphic families restrict exact
/// solutions `f(x) = G(z) c`, where `z = ⟨v, x − x0⟩ − ⟨w, x − x0⟩ U`
/// lies in the complex line spanned by `1` and the unit imaginary `U = v × w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryFamily {
    Zero,
    /// `G(z) = z`: an associative 3-plane.
    Affine,
    /// `G(z) = z²`
    Holomorphic,
    /// `G(z) = e^z − 1`
    HolomorphicExp,
    /// `(sin πx1, cos πx2, 0, 0)`, not the trace of a solution.
    Sincos,
}

impl BoundaryFamily {
    pub const ALL: [BoundaryFamily; 5] = [
        BoundaryFamily::Zero,
        BoundaryFamily::Affine,
        BoundaryFamily::Holomorphic,
        BoundaryFamily::HolomorphicExp,
        BoundaryFamily::Sincos,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Zero => "zero",
            Self::Affine => "affine",
            Self::Holomorphic => "holomorphic",
            Self::HolomorphicExp => "holomorphic-exp",
            Self::Sincos => "sincos",
        }
    }

    /// Whether the family is the restriction of an exact solution.
    pub fn is_exact(self) -> bool {
        !matches!(self, Self::Sincos)
    }
}

impl FromStr for BoundaryFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|f| f.name()).collect();
                Error::InvalidConfig(format!(
                    "unknown boundary family {s:?} (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

impl std::fmt::Display for BoundaryFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryData {
    pub family: BoundaryFamily,
    pub amplitude: f64,
    pub center: [f64; 3],
    pub v: [f64; 3],
    pub w: [f64; 3],
    pub c: Quaternion,
}

impl BoundaryData {
    pub fn new(family: BoundaryFamily, amplitude: f64) -> Self {
        let c = Quaternion::new(0.5, 0.5, -0.5, 0.5);
        Self {
            family,
            amplitude,
            center: [0.5; 3],
            v: [2.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0],
            w: [1.0 / 3.0, 2.0 / 3.0, -2.0 / 3.0],
            c,
        }
    }

    pub fn with_amplitude(&self, amplitude: f64) -> Self {
        Self { amplitude, ..*self }
    }

    /// `z(x)` and the unit imaginary `U`.
    pub fn complex_coordinate(&self, x: [f64; 3]) -> (Quaternion, Quaternion) {
        let d: [f64; 3] = std::array::from_fn(|a| x[a] - self.center[a]);
        let dot = |p: [f64; 3]| p[0] * d[0] + p[1] * d[1] + p[2] * d[2];
        let u = Quaternion::imaginary(self.v) * Quaternion::imaginary(self.w);
        (Quaternion::ONE * dot(self.v) - u * dot(self.w), u)
    }

    pub fn value(&self, x: [f64; 3]) -> Quaternion {
        let a = self.amplitude;
        match self.family {
            BoundaryFamily::Zero => Quaternion::ZERO,
            BoundaryFamily::Sincos => {
                let pi = std::f64::consts::PI;
                Quaternion::new((pi * x[0]).sin(), (pi * x[1]).cos(), 0.0, 0.0) * a
            }
            BoundaryFamily::Affine => self.complex_coordinate(x).0 * self.c * a,
            BoundaryFamily::Holomorphic => {
                let z = self.complex_coordinate(x).0;
                z * z * self.c * a
            }
            BoundaryFamily::HolomorphicExp => {
                let (z, u) = self.complex_coordinate(x);
                // z = p + q U with U² = −1, so e^z = e^p (cos q + U sin q).
                let (p, q) = (z.0[0], z.dot(u));
                let e = (Quaternion::ONE * q.cos() + u * q.sin()) * p.exp();
                (e - Quaternion::ONE) * self.c * a
            }
        }
    }
}
