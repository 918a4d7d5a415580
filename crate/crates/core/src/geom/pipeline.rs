use serde::Serialize;

use super::frame::{adapted_frame, split_frame, FrameGauge};
use super::patch::{jet, ImmersionPatch, Point3};
use super::sff::{
    covariant_derivative_sff, harmonicity_check, second_fundamental_form, sff_symmetry_residual,
    v15_membership, CovDerivOptions, IsotypicBreakdown,
};
use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

#[derive(Clone, Debug, Default)]
pub struct EvalOptions {
    pub gauge: FrameGauge,
    pub frame_tolerance: f64,
    pub cov: CovDerivOptions,
}

impl EvalOptions {
    pub fn new(frame_tolerance: f64) -> Self {
        Self {
            frame_tolerance,
            ..Self::default()
        }
    }
}

/// All pointwise quantities at one sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointEvaluation {
    pub x: Point3,
    pub associativity_residual: f64,
    /// No SO(4)-frame exists within tolerance; an orthonormal split frame was used.
    pub frame_failure: bool,
    pub epsilon_residual: f64,
    pub mean_curvature: f64,
    pub sff_norm: f64,
    pub traceless_norm: f64,
    pub symmetry_residual: f64,
    pub w15: f64,
    pub w13: f64,
    pub breakdown: IsotypicBreakdown,
    /// `‖∇II − Sym(∇II)‖ / ‖∇II‖`
    pub codazzi_defect: f64,
}

fn ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        if a == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        a / b
    }
}

impl PointEvaluation {
    pub fn w13_relative(&self) -> f64 {
        ratio(self.w13, self.traceless_norm)
    }

    /// Largest change of any reported norm between two evaluations of the
    /// same point, relative to the size of the tensor it belongs to, so that
    /// vanishing components are compared on the scale of their parent.
    pub fn relative_change(&self, other: &PointEvaluation) -> f64 {
        let sff = |e: &PointEvaluation| {
            [
                e.sff_norm,
                e.traceless_norm,
                e.mean_curvature,
                e.w15,
                e.w13,
                e.symmetry_residual,
            ]
        };
        let cov = |e: &PointEvaluation| {
            let [n17, n15, n13, n11] = e.breakdown.norms();
            [
                n17,
                n15,
                n13,
                n11,
                e.breakdown.trace_norm,
                e.breakdown.total,
            ]
        };
        let rel = |x: [f64; 6], y: [f64; 6], scale: f64| {
            x.iter()
                .zip(y)
                .map(|(p, q)| (p - q).abs() / scale.max(p.abs()).max(q.abs()))
                .fold(0.0, f64::max)
        };
        let s1 = self.sff_norm.max(other.sff_norm).max(f64::MIN_POSITIVE);
        let s2 = self
            .breakdown
            .full_norm()
            .max(other.breakdown.full_norm())
            .max(f64::MIN_POSITIVE);
        let assoc = (self.associativity_residual - other.associativity_residual).abs();
        rel(sff(self), sff(other), s1)
            .max(rel(cov(self), cov(other), s2))
            .max(assoc)
    }
}

pub fn evaluate_point(
    patch: &dyn ImmersionPatch,
    x: Point3,
    opts: &EvalOptions,
) -> Result<PointEvaluation> {
    let j = jet(patch, x)?;
    let (frame, frame_failure) = match adapted_frame(&j, &opts.gauge, opts.frame_tolerance) {
        Ok(f) => (f, false),
        Err(Error::FrameFailure { .. }) => (split_frame(&j, &opts.gauge)?, true),
        Err(e) => return Err(e),
    };
    let sff = second_fundamental_form(&j, &frame);
    let [w15, w13] = v15_membership(&sff);
    let cov = covariant_derivative_sff(&j, &frame, opts.cov);
    let cov_norm = cov.norm();
    Ok(PointEvaluation {
        x,
        associativity_residual: frame.associativity_residual,
        frame_failure,
        epsilon_residual: frame.epsilon_residual(),
        mean_curvature: sff.mean_norm(),
        sff_norm: sff.norm(),
        traceless_norm: sff.traceless_norm(),
        symmetry_residual: sff_symmetry_residual(&frame, &sff),
        w15,
        w13,
        breakdown: harmonicity_check(&cov),
        codazzi_defect: ratio(cov.symmetrization_defect(), cov_norm),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub associative: bool,
    pub minimal: bool,
    pub symmetric: bool,
    pub in_v15: bool,
    pub harmonic: bool,
    pub curved: bool,
}

impl Verdict {
    pub fn new(e: &PointEvaluation, tol: &Tolerances) -> Self {
        Self {
            associative: !e.frame_failure && e.associativity_residual < tol.associativity,
            minimal: e.mean_curvature < tol.mean_curvature,
            symmetric: e.symmetry_residual < tol.symmetry,
            in_v15: e.w13_relative() < tol.membership,
            harmonic: e.breakdown.non_harmonic_fraction() < tol.harmonic,
            curved: e.traceless_norm >= tol.min_traceless,
        }
    }

    pub fn pass(&self) -> bool {
        self.associative
            && self.minimal
            && self.symmetric
            && self.in_v15
            && self.harmonic
            && self.curved
    }

    /// Names of the failed checks.
    pub fn failures(&self) -> Vec<&'static str> {
        [
            ("associative", self.associative),
            ("minimal", self.minimal),
            ("symmetric", self.symmetric),
            ("in_v15", self.in_v15),
            ("harmonic", self.harmonic),
            ("curved", self.curved),
        ]
        .into_iter()
        .filter(|(_, ok)| !ok)
        .map(|(n, _)| n)
        .collect()
    }
}
