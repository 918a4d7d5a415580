use rand::Rng;

use crate::error::{Error, Result};
use crate::g2::Vector7;

pub type Point3 = [f64; 3];

/// Axis-aligned box in parameter space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxDomain {
    pub lo: Point3,
    pub hi: Point3,
}

impl BoxDomain {
    pub fn new(lo: Point3, hi: Point3) -> Self {
        Self { lo, hi }
    }

    /// Distance from `x` to the boundary; negative outside.
    pub fn margin(&self, x: Point3) -> f64 {
        (0..3)
            .map(|i| (x[i] - self.lo[i]).min(self.hi[i] - x[i]))
            .fold(f64::INFINITY, f64::min)
    }

    /// Uniform sample from the box shrunk by `inset` on every side.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, inset: f64) -> Point3 {
        std::array::from_fn(|i| rng.random_range(self.lo[i] + inset..self.hi[i] - inset))
    }

    pub fn center(&self) -> Point3 {
        std::array::from_fn(|i| 0.5 * (self.lo[i] + self.hi[i]))
    }
}

/// `u(x)` with all partial derivatives up to order three.
#[derive(Clone, Debug, PartialEq)]
pub struct PointJet {
    pub x: Point3,
    pub u: Vector7,
    pub d1: [Vector7; 3],
    pub d2: [[Vector7; 3]; 3],
    pub d3: [[[Vector7; 3]; 3]; 3],
}

impl PointJet {
    pub fn zero(x: Point3) -> Self {
        let z = Vector7::zeros();
        Self {
            x,
            u: z,
            d1: [z; 3],
            d2: [[z; 3]; 3],
            d3: [[[z; 3]; 3]; 3],
        }
    }

    /// Largest difference between partials that differ only by index order.
    pub fn mixed_partial_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..3 {
            for b in 0..3 {
                worst = worst.max((self.d2[a][b] - self.d2[b][a]).amax());
                for c in 0..3 {
                    let t = self.d3[a][b][c];
                    for s in [
                        self.d3[a][c][b],
                        self.d3[b][a][c],
                        self.d3[b][c][a],
                        self.d3[c][a][b],
                        self.d3[c][b][a],
                    ] {
                        worst = worst.max((t - s).amax());
                    }
                }
            }
        }
        worst
    }

    /// Induced metric `g_ab = ⟨u_a, u_b⟩`.
    pub fn metric(&self) -> nalgebra::Matrix3<f64> {
        nalgebra::Matrix3::from_fn(|a, b| self.d1[a].dot(&self.d1[b]))
    }

    pub fn jacobian(&self) -> nalgebra::SMatrix<f64, 7, 3> {
        nalgebra::SMatrix::<f64, 7, 3>::from_columns(&self.d1)
    }
}

/// A parametrized 3-fold in `R^7`.
pub trait ImmersionPatch: Send + Sync {
    fn name(&self) -> &str;
    fn domain(&self) -> BoxDomain;
    fn expected_associative(&self) -> bool;

    /// Jet at `x` without any domain or rank checks.
    fn raw_jet(&self, x: Point3) -> PointJet;

    /// How far from the boundary `raw_jet` needs to look.
    fn stencil_radius(&self) -> f64 {
        0.0
    }

    fn margin(&self, x: Point3) -> f64 {
        self.domain().margin(x)
    }
}

/// Smallest Jacobian singular value accepted relative to the largest.
const RANK_TOLERANCE: f64 = 1e-8;

pub fn jet(patch: &dyn ImmersionPatch, x: Point3) -> Result<PointJet> {
    let margin = patch.margin(x);
    if !(margin > patch.stencil_radius()) {
        return Err(Error::OutOfDomain { point: x, margin });
    }
    let jet = patch.raw_jet(x);
    let sv = jet.jacobian().singular_values();
    let (smin, smax) = (sv.min(), sv.max());
    if !(smin > RANK_TOLERANCE * smax.max(1.0)) {
        return Err(Error::RankDeficient {
            point: x,
            sigma_min: smin,
        });
    }
    Ok(jet)
}
