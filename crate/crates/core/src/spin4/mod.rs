//! Spin(4) = SU(2) × SU(2) representations `U_{p,q}`, their real forms, and
//! the fiber models used by the geometric checks.

pub mod clifford;
pub mod irrep;
pub mod projector;
pub mod real_form;
pub mod stabilizer;

pub use clifford::{build_isomorphism_f, clifford_map, CliffordMap, CliffordSign, FIsomorphism};
pub use irrep::{
    build_irrep, build_irrep_checked, tensor, tensor_all, CMat, IrrepLabel, RepSpace, C64,
};
pub use projector::{
    decomposition_ranks, isotypic_decomposition, isotypic_projector, IsotypicProjector,
};
pub use real_form::{real_form, RealForm};
pub use stabilizer::StabilizerModel;
