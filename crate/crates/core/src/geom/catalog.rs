//! Parametrized 3-folds with closed-form or finite-difference jets.

use std::sync::Arc;

use nalgebra::{Matrix3, SMatrix, Vector3};
use rand::Rng;

use super::patch::{BoxDomain, ImmersionPatch, Point3, PointJet};
use crate::g2::Vector7;

/// Multiplicities of each parameter in a derivative `∂_a ∂_b ∂_c`.
fn counts(idx: &[usize]) -> [usize; 3] {
    let mut c = [0; 3];
    for &i in idx {
        c[i] += 1;
    }
    c
}

/// Fills a jet from a function of derivative multiplicities.
fn jet_from_counts(x: Point3, mut f: impl FnMut([usize; 3]) -> Vector7) -> PointJet {
    let mut jet = PointJet::zero(x);
    jet.u = f([0; 3]);
    for a in 0..3 {
        jet.d1[a] = f(counts(&[a]));
        for b in 0..3 {
            jet.d2[a][b] = f(counts(&[a, b]));
            for c in 0..3 {
                jet.d3[a][b][c] = f(counts(&[a, b, c]));
            }
        }
    }
    jet
}

/// `u(x) = A x + b`.
#[derive(Clone, Debug)]
pub struct AffinePatch {
    pub name: String,
    pub matrix: SMatrix<f64, 7, 3>,
    pub offset: Vector7,
    pub domain: BoxDomain,
}

impl AffinePatch {
    /// The associative plane `span(e1, e2, e3)`.
    pub fn calibrated_plane() -> Self {
        let mut matrix = SMatrix::<f64, 7, 3>::zeros();
        for i in 0..3 {
            matrix[(i, i)] = 1.0;
        }
        Self {
            name: "plane".into(),
            matrix,
            offset: Vector7::zeros(),
            domain: BoxDomain::new([-1.0; 3], [1.0; 3]),
        }
    }

    pub fn spanned_by(name: &str, columns: [Vector7; 3], offset: Vector7) -> Self {
        Self {
            name: name.into(),
            matrix: SMatrix::<f64, 7, 3>::from_columns(&columns),
            offset,
            domain: BoxDomain::new([-1.0; 3], [1.0; 3]),
        }
    }
}

impl ImmersionPatch for AffinePatch {
    fn name(&self) -> &str {
        &self.name
    }

    fn domain(&self) -> BoxDomain {
        self.domain
    }

    fn expected_associative(&self) -> bool {
        crate::g2::associativity_residual(
            &self.matrix.column(0).into_owned(),
            &self.matrix.column(1).into_owned(),
            &self.matrix.column(2).into_owned(),
        )
        .is_ok_and(|r| r < 1e-12)
    }

    fn raw_jet(&self, x: Point3) -> PointJet {
        let mut jet = PointJet::zero(x);
        jet.u = self.matrix * Vector3::from(x) + self.offset;
        for a in 0..3 {
            jet.d1[a] = self.matrix.column(a).into_owned();
        }
        jet
    }
}

/// Lift of the special Lagrangian cone `{|z1| = |z2| = |z3|, arg z1 z2 z3 = 0}`
/// in `C^3` to `R ⊕ C^3 = R^7`, with `z_k = x_{2k} + i x_{2k+1}`:
///
/// ```text
/// u(s, θ1, θ2) = (t0, r e^{iθ2}, r e^{iθ1}, r e^{−i(θ1+θ2)}),   r = s / √3
/// ```
///
/// The order of the first two complex slots fixes the orientation.
#[derive(Clone, Debug)]
pub struct SlCone {
    pub t0: f64,
    pub domain: BoxDomain,
}

impl Default for SlCone {
    fn default() -> Self {
        Self {
            t0: 0.0,
            domain: BoxDomain::new([0.5, -3.0, -3.0], [2.0, 3.0, 3.0]),
        }
    }
}

/// Phase exponents `(a, b)` of `e^{i(a θ1 + b θ2)}` in each complex slot.
const CONE_PHASES: [(f64, f64); 3] = [(0.0, 1.0), (1.0, 0.0), (-1.0, -1.0)];

impl SlCone {
    fn derivative(&self, x: Point3, n: [usize; 3]) -> Vector7 {
        let mut out = Vector7::zeros();
        if n == [0, 0, 0] {
            out[0] = self.t0;
        }
        let radial = match n[0] {
            0 => x[0],
            1 => 1.0,
            _ => return out,
        } / 3f64.sqrt();
        for (k, &(a, b)) in CONE_PHASES.iter().enumerate() {
            let theta = a * x[1] + b * x[2];
            let scale = radial * a.powi(n[1] as i32) * b.powi(n[2] as i32);
            // d^m/dθ^m e^{iθ} = i^m e^{iθ}
            let shift = (n[1] + n[2]) as f64 * std::f64::consts::FRAC_PI_2;
            out[1 + 2 * k] = scale * (theta + shift).cos();
            out[2 + 2 * k] = scale * (theta + shift).sin();
        }
        out
    }
}

impl ImmersionPatch for SlCone {
    fn name(&self) -> &str {
        "sl-cone"
    }

    fn domain(&self) -> BoxDomain {
        self.domain
    }

    fn expected_associative(&self) -> bool {
        true
    }

    fn raw_jet(&self, x: Point3) -> PointJet {
        jet_from_counts(x, |n| self.derivative(x, n))
    }
}

/// A polynomial map `R^3 → R^7` given by monomials.
#[derive(Clone, Debug, Default)]
pub struct Polynomial7 {
    /// `(component, coefficient, exponents)`
    pub terms: Vec<(usize, f64, [u32; 3])>,
}

impl Polynomial7 {
    pub fn derivative(&self, x: Point3, n: [usize; 3]) -> Vector7 {
        let mut out = Vector7::zeros();
        for &(comp, coef, pow) in &self.terms {
            let mut v = coef;
            for i in 0..3 {
                let (p, k) = (pow[i] as usize, n[i]);
                if k > p {
                    v = 0.0;
                    break;
                }
                let falling: usize = (p - k + 1..=p).product();
                v *= falling as f64 * x[i].powi((p - k) as i32);
            }
            out[comp] += v;
        }
        out
    }
}

/// The cone plus a polynomial perturbation that destroys associativity.
#[derive(Clone, Debug)]
pub struct PerturbedCone {
    pub cone: SlCone,
    pub perturbation: Polynomial7,
}

impl PerturbedCone {
    pub fn new(epsilon: f64) -> Self {
        let perturbation = Polynomial7 {
            terms: vec![
                (1, epsilon, [1, 2, 0]),
                (3, epsilon, [2, 0, 1]),
                (6, epsilon, [1, 1, 1]),
                (4, -epsilon, [0, 0, 2]),
            ],
        };
        Self {
            cone: SlCone::default(),
            perturbation,
        }
    }
}

impl Default for PerturbedCone {
    fn default() -> Self {
        Self::new(0.3)
    }
}

impl ImmersionPatch for PerturbedCone {
    fn name(&self) -> &str {
        "perturbed-cone"
    }

    fn domain(&self) -> BoxDomain {
        self.cone.domain
    }

    fn expected_associative(&self) -> bool {
        false
    }

    fn raw_jet(&self, x: Point3) -> PointJet {
        jet_from_counts(x, |n| {
            self.cone.derivative(x, n) + self.perturbation.derivative(x, n)
        })
    }
}

/// `S^2 × R ⊂ R^4 ⊂ R^7`, `u(θ, ϕ, t) = (cos θ cos ϕ, cos θ sin ϕ, sin θ, t, 0, 0, 0)`.
/// Not associative; its principal curvatures along the inward normal are `1, 1, 0`.
#[derive(Clone, Debug)]
pub struct SphereCylinder {
    pub domain: BoxDomain,
}

impl Default for SphereCylinder {
    fn default() -> Self {
        Self {
            domain: BoxDomain::new([-1.0, 0.0, -1.0], [1.0, 2.0, 1.0]),
        }
    }
}

fn cos_derivative(x: f64, n: usize) -> f64 {
    (x + n as f64 * std::f64::consts::FRAC_PI_2).cos()
}

fn sin_derivative(x: f64, n: usize) -> f64 {
    (x + n as f64 * std::f64::consts::FRAC_PI_2).sin()
}

impl ImmersionPatch for SphereCylinder {
    fn name(&self) -> &str {
        "sphere-cylinder"
    }

    fn domain(&self) -> BoxDomain {
        self.domain
    }

    fn expected_associative(&self) -> bool {
        false
    }

    fn raw_jet(&self, x: Point3) -> PointJet {
        jet_from_counts(x, |n| {
            let mut v = Vector7::zeros();
            if n[2] == 0 {
                v[0] = cos_derivative(x[0], n[0]) * cos_derivative(x[1], n[1]);
                v[1] = cos_derivative(x[0], n[0]) * sin_derivative(x[1], n[1]);
                if n[1] == 0 {
                    v[2] = sin_derivative(x[0], n[0]);
                }
            }
            v[3] = match n {
                [0, 0, 0] => x[2],
                [0, 0, 1] => 1.0,
                _ => 0.0,
            };
            v
        })
    }
}

const STENCIL: [[f64; 5]; 4] = [
    [0.0, 0.0, 1.0, 0.0, 0.0],
    [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0],
    [
        -1.0 / 12.0,
        16.0 / 12.0,
        -30.0 / 12.0,
        16.0 / 12.0,
        -1.0 / 12.0,
    ],
    [-0.5, 1.0, 0.0, -1.0, 0.5],
];

/// Jets by 5-point central differences with one Richardson step.
///
/// Orders one and two use step `h`; third derivatives use the larger `h3`
/// to keep round-off under control.
pub struct FdPatch<F> {
    pub name: String,
    pub domain: BoxDomain,
    pub associative: bool,
    pub h: f64,
    pub h3: f64,
    pub f: F,
}

impl<F> FdPatch<F>
where
    F: Fn(Point3) -> Vector7 + Send + Sync,
{
    pub fn new(name: &str, domain: BoxDomain, associative: bool, f: F) -> Self {
        Self {
            name: name.into(),
            domain,
            associative,
            h: 1e-3,
            h3: 1e-2,
            f,
        }
    }

    fn stencil_derivative(&self, x: Point3, n: [usize; 3], h: f64) -> Vector7 {
        let mut acc = Vector7::zeros();
        for (o0, w0) in STENCIL[n[0]].iter().enumerate().filter(|(_, w)| **w != 0.0) {
            for (o1, w1) in STENCIL[n[1]].iter().enumerate().filter(|(_, w)| **w != 0.0) {
                for (o2, w2) in STENCIL[n[2]].iter().enumerate().filter(|(_, w)| **w != 0.0) {
                    let p = [
                        x[0] + (o0 as f64 - 2.0) * h,
                        x[1] + (o1 as f64 - 2.0) * h,
                        x[2] + (o2 as f64 - 2.0) * h,
                    ];
                    acc += (self.f)(p) * (w0 * w1 * w2);
                }
            }
        }
        acc / h.powi((n[0] + n[1] + n[2]) as i32)
    }

    fn derivative(&self, x: Point3, n: [usize; 3]) -> Vector7 {
        let total = n[0] + n[1] + n[2];
        if total == 0 {
            return (self.f)(x);
        }
        let h = if total >= 3 { self.h3 } else { self.h };
        let order = if n.contains(&3) { 2 } else { 4 };
        let coarse = self.stencil_derivative(x, n, h);
        let fine = self.stencil_derivative(x, n, 0.5 * h);
        fine + (fine - coarse) / (2f64.powi(order) - 1.0)
    }
}

impl<F> ImmersionPatch for FdPatch<F>
where
    F: Fn(Point3) -> Vector7 + Send + Sync,
{
    fn name(&self) -> &str {
        &self.name
    }

    fn domain(&self) -> BoxDomain {
        self.domain
    }

    fn expected_associative(&self) -> bool {
        self.associative
    }

    fn stencil_radius(&self) -> f64 {
        2.0 * self.h.max(self.h3)
    }

    fn raw_jet(&self, x: Point3) -> PointJet {
        jet_from_counts(x, |n| self.derivative(x, n))
    }
}

/// `ψ(y) = b + A y + (w_a sin⟨k_a, y⟩)_a`, a diffeomorphism when `w` is small.
#[derive(Clone, Debug)]
pub struct Reparametrization {
    pub offset: Vector3<f64>,
    pub linear: Matrix3<f64>,
    pub warp: [f64; 3],
    pub freq: [Vector3<f64>; 3],
}

/// Derivatives of `ψ` up to order three at a point.
struct MapJet {
    value: Vector3<f64>,
    d1: Matrix3<f64>,
    d2: [[Vector3<f64>; 3]; 3],
    d3: [[[Vector3<f64>; 3]; 3]; 3],
}

impl Reparametrization {
    pub fn identity() -> Self {
        Self {
            offset: Vector3::zeros(),
            linear: Matrix3::identity(),
            warp: [0.0; 3],
            freq: [Vector3::zeros(); 3],
        }
    }

    /// A random orientation-preserving map close to a rotation, centred so
    /// that `ψ(0) ≈ center`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, center: Point3) -> Self {
        let mut m = Matrix3::from_fn(|_, _| rng.random_range(-1.0..1.0));
        let mut q = m.qr().q();
        if q.determinant() < 0.0 {
            q.column_mut(0).neg_mut();
        }
        m = q * Matrix3::from_diagonal(&Vector3::from_fn(|_, _| rng.random_range(0.7..1.3)));
        let warp = std::array::from_fn(|_| rng.random_range(-0.05..0.05));
        let freq = std::array::from_fn(|_| Vector3::from_fn(|_, _| rng.random_range(-1.5..1.5)));
        Self {
            offset: Vector3::from(center),
            linear: m,
            warp,
            freq,
        }
    }

    fn jet(&self, y: Point3) -> MapJet {
        let y = Vector3::from(y);
        let mut value = self.offset + self.linear * y;
        let mut d1 = self.linear;
        let mut d2 = [[Vector3::zeros(); 3]; 3];
        let mut d3 = [[[Vector3::zeros(); 3]; 3]; 3];
        for a in 0..3 {
            let k = self.freq[a];
            let phase = k.dot(&y);
            let (s, c) = phase.sin_cos();
            let w = self.warp[a];
            value[a] += w * s;
            for i in 0..3 {
                d1[(a, i)] += w * c * k[i];
                for j in 0..3 {
                    d2[i][j][a] = -w * s * k[i] * k[j];
                    for l in 0..3 {
                        d3[i][j][l][a] = -w * c * k[i] * k[j] * k[l];
                    }
                }
            }
        }
        MapJet { value, d1, d2, d3 }
    }

    pub fn apply(&self, y: Point3) -> Point3 {
        self.jet(y).value.into()
    }

    /// Solves `ψ(y) = x` by Newton's method from `A⁻¹(x − b)`.
    pub fn inverse(&self, x: Point3) -> Option<Point3> {
        let target = Vector3::from(x);
        let inv = self.linear.try_inverse()?;
        let mut y = inv * (target - self.offset);
        for _ in 0..50 {
            let j = self.jet(y.into());
            let r = j.value - target;
            if r.amax() < 1e-15 * (1.0 + target.amax()) {
                return Some(y.into());
            }
            y -= j.d1.try_inverse()? * r;
        }
        let r = self.jet(y.into()).value - target;
        (r.amax() < 1e-12).then(|| y.into())
    }
}

/// `u ∘ ψ`, with jets from the chain rule.
pub struct ReparametrizedPatch {
    pub base: Arc<dyn ImmersionPatch>,
    pub map: Reparametrization,
    pub domain: BoxDomain,
    name: String,
}

impl ReparametrizedPatch {
    /// The parameter box is a loose bound; validity is checked pointwise
    /// through the base patch.
    pub fn new(base: Arc<dyn ImmersionPatch>, map: Reparametrization) -> Self {
        let d = base.domain();
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for corner in 0..8 {
            let x = std::array::from_fn(|i| {
                if corner >> i & 1 == 0 {
                    d.lo[i]
                } else {
                    d.hi[i]
                }
            });
            let y = map
                .linear
                .try_inverse()
                .map(|m| m * (Vector3::from(x) - map.offset))
                .unwrap_or_default();
            for i in 0..3 {
                lo[i] = lo[i].min(y[i] - 1.0);
                hi[i] = hi[i].max(y[i] + 1.0);
            }
        }
        let name = format!("{}∘ψ", base.name());
        Self {
            base,
            map,
            domain: BoxDomain::new(lo, hi),
            name,
        }
    }
}

impl ImmersionPatch for ReparametrizedPatch {
    fn name(&self) -> &str {
        &self.name
    }

    fn domain(&self) -> BoxDomain {
        self.domain
    }

    fn expected_associative(&self) -> bool {
        self.base.expected_associative()
    }

    fn margin(&self, y: Point3) -> f64 {
        let x = self.map.apply(y);
        self.domain
            .margin(y)
            .min(self.base.margin(x) - self.base.stencil_radius())
    }

    fn raw_jet(&self, y: Point3) -> PointJet {
        let p = self.map.jet(y);
        let b = self.base.raw_jet(p.value.into());
        let d = &p.d1;
        let mut jet = PointJet::zero(y);
        jet.u = b.u;
        for i in 0..3 {
            jet.d1[i] = (0..3).map(|a| b.d1[a] * d[(a, i)]).sum();
            for j in 0..3 {
                let mut v = Vector7::zeros();
                for a in 0..3 {
                    v += b.d1[a] * p.d2[i][j][a];
                    for bb in 0..3 {
                        v += b.d2[a][bb] * (d[(a, i)] * d[(bb, j)]);
                    }
                }
                jet.d2[i][j] = v;
                for k in 0..3 {
                    let mut v = Vector7::zeros();
                    for a in 0..3 {
                        v += b.d1[a] * p.d3[i][j][k][a];
                        for bb in 0..3 {
                            let mixed = p.d2[i][j][a] * d[(bb, k)]
                                + p.d2[i][k][a] * d[(bb, j)]
                                + p.d2[j][k][a] * d[(bb, i)];
                            v += b.d2[a][bb] * mixed;
                            for c in 0..3 {
                                v += b.d3[a][bb][c] * (d[(a, i)] * d[(bb, j)] * d[(c, k)]);
                            }
                        }
                    }
                    jet.d3[i][j][k] = v;
                }
            }
        }
        jet
    }
}
