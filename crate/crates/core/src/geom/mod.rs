//! Extrinsic geometry of parametrized 3-folds in flat `R^7`.

pub mod catalog;
pub mod fiber;
pub mod frame;
pub mod patch;
pub mod pipeline;
pub mod sff;

pub use catalog::{
    AffinePatch, FdPatch, PerturbedCone, Reparametrization, ReparametrizedPatch, SlCone,
    SphereCylinder,
};
pub use frame::{adapted_frame, split_frame, AdaptedFrame, FrameGauge};
pub use patch::{jet, BoxDomain, ImmersionPatch, Point3, PointJet};
pub use pipeline::{evaluate_point, EvalOptions, PointEvaluation, Verdict};
pub use sff::{
    covariant_derivative_sff, harmonicity_check, principal_curvatures, second_fundamental_form,
    sff_symmetry_residual, v15_membership, CovDerivOptions, CovDerivTensor, IsotypicBreakdown,
    SecondFundamentalForm,
};
