use nalgebra::{Matrix3, Rotation3, Vector3};
use rand::Rng;

use super::patch::PointJet;
use crate::error::{Error, Result};
use crate::g2::{basis7, cross7, EpsilonTable, Vector7};

/// Gauge freedom in the frame construction.
#[derive(Clone, Debug)]
pub struct FrameGauge {
    /// Applied to the coordinate tangent vectors before Gram–Schmidt.
    pub tangent_rotation: Rotation3<f64>,
    pub seed_normal: Vector7,
}

impl Default for FrameGauge {
    fn default() -> Self {
        Self {
            tangent_rotation: Rotation3::identity(),
            seed_normal: basis7(4),
        }
    }
}

impl FrameGauge {
    /// Uniform random rotation axis and angle, seed from the unit cube.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let axis = Vector3::from_fn(|_, _| rng.random_range(-1.0..1.0));
        let angle = rng.random_range(0.0..std::f64::consts::TAU);
        Self {
            tangent_rotation: Rotation3::new(axis.normalize() * angle),
            seed_normal: Vector7::from_fn(|_, _| rng.random_range(-1.0..1.0)),
        }
    }
}

/// An orthonormal frame `e1..e7` with `e1, e2, e3` tangent.
#[derive(Clone, Debug)]
pub struct AdaptedFrame {
    pub e: [Vector7; 7],
    /// `e_i = Σ_a coords[(i, a)] ∂_a u` for the tangent vectors.
    pub coords: Matrix3<f64>,
    /// `|φ(e1, e2, e3) − 1|` for the orthonormalized tangent frame.
    pub associativity_residual: f64,
    /// Whether `e3 = e1 × e2` (as opposed to the Gram–Schmidt completion).
    pub strict: bool,
}

/// Normal component of the seed below which it is rejected.
const SEED_TOLERANCE: f64 = 1e-6;

fn normalized(v: Vector7) -> Vector7 {
    v / v.norm()
}

fn reject(v: Vector7, basis: &[Vector7]) -> Vector7 {
    basis.iter().fold(v, |acc, b| acc - b * b.dot(&acc))
}

struct TangentData {
    e: [Vector7; 3],
    residual: f64,
}

fn tangent_frame(jet: &PointJet, gauge: &FrameGauge) -> TangentData {
    let r = gauge.tangent_rotation.matrix();
    let v: [Vector7; 3] = std::array::from_fn(|i| (0..3).map(|a| jet.d1[a] * r[(i, a)]).sum());
    let e1 = normalized(v[0]);
    let e2 = normalized(reject(v[1], &[e1]));
    let e3 = normalized(reject(v[2], &[e1, e2]));
    let residual = (EpsilonTable::standard().phi(&e1, &e2, &e3) - 1.0).abs();
    TangentData {
        e: [e1, e2, e3],
        residual,
    }
}

fn complete(
    jet: &PointJet,
    tangent: [Vector7; 3],
    seed: &Vector7,
    strict: bool,
    residual: f64,
) -> Result<AdaptedFrame> {
    let [e1, e2, e3] = tangent;
    let n = reject(*seed, &tangent);
    let normal_norm = n.norm() / seed.norm().max(f64::MIN_POSITIVE);
    if !(normal_norm > SEED_TOLERANCE) {
        return Err(Error::BadSeed { normal_norm });
    }
    let e4 = n / n.norm();
    let (e5, e6, e7) = if strict {
        (cross7(&e1, &e4), cross7(&e2, &e4), cross7(&e4, &e3))
    } else {
        // Off the associative locus the products leave the normal space;
        // project back and orthonormalize.
        let t = [e1, e2, e3, e4];
        let e5 = normalized(reject(cross7(&e1, &e4), &t));
        let e6 = normalized(reject(cross7(&e2, &e4), &[e1, e2, e3, e4, e5]));
        let e7 = normalized(reject(cross7(&e4, &e3), &[e1, e2, e3, e4, e5, e6]));
        (e5, e6, e7)
    };
    let g = jet.metric();
    let m = Matrix3::from_fn(|i, b| tangent[i].dot(&jet.d1[b]));
    let coords = m * g
        .try_inverse()
        .ok_or_else(|| Error::DegenerateInput("singular induced metric".into()))?;
    Ok(AdaptedFrame {
        e: [e1, e2, e3, e4, e5, e6, e7],
        coords,
        associativity_residual: residual,
        strict,
    })
}

/// SO(4)-frame at an associative point: `e3 = e1 × e2` and
/// `φ(e_i, e_j, e_k) = ε_ijk` for all triples.
pub fn adapted_frame(jet: &PointJet, gauge: &FrameGauge, tolerance: f64) -> Result<AdaptedFrame> {
    let t = tangent_frame(jet, gauge);
    if !(t.residual <= tolerance) {
        return Err(Error::FrameFailure {
            residual: t.residual,
            tolerance,
        });
    }
    let [e1, e2, _] = t.e;
    complete(
        jet,
        [e1, e2, cross7(&e1, &e2)],
        &gauge.seed_normal,
        true,
        t.residual,
    )
}

/// Orthonormal frame split into tangent and normal parts, defined at every
/// immersed point. Agrees with [`adapted_frame`] on associative planes.
pub fn split_frame(jet: &PointJet, gauge: &FrameGauge) -> Result<AdaptedFrame> {
    let t = tangent_frame(jet, gauge);
    complete(jet, t.e, &gauge.seed_normal, false, t.residual)
}

impl AdaptedFrame {
    /// Largest `|φ(e_i, e_j, e_k) − ε_ijk|` over all 343 triples.
    pub fn epsilon_residual(&self) -> f64 {
        let table = EpsilonTable::standard();
        let mut worst = 0.0f64;
        for i in 0..7 {
            for j in 0..7 {
                let c = cross7(&self.e[i], &self.e[j]);
                for k in 0..7 {
                    let expect = table.get(i + 1, j + 1, k + 1) as f64;
                    worst = worst.max((c.dot(&self.e[k]) - expect).abs());
                }
            }
        }
        worst
    }

    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..7 {
            for j in 0..7 {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.e[i].dot(&self.e[j]) - expect).abs());
            }
        }
        worst
    }

    pub fn tangent(&self) -> [Vector7; 3] {
        [self.e[0], self.e[1], self.e[2]]
    }

    pub fn normal(&self) -> [Vector7; 4] {
        [self.e[3], self.e[4], self.e[5], self.e[6]]
    }
}
