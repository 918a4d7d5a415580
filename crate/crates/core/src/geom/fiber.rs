//! Real isotypic projectors on the fibers `Sym²₀ ⊗ N` and `T* ⊗ Sym²₀ ⊗ N`,
//! in the coordinates of [`StabilizerModel`] aligned to an adapted frame.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use crate::spin4::{isotypic_projector, IrrepLabel, StabilizerModel};

pub const LABELS_60: [IrrepLabel; 4] = [
    IrrepLabel::new(1, 7),
    IrrepLabel::new(1, 5),
    IrrepLabel::new(1, 3),
    IrrepLabel::new(1, 1),
];

pub struct FiberProjectors {
    /// `(1,5)` and `(1,3)` on the 20-dimensional space.
    pub sym2_0: [DMatrix<f64>; 2],
    /// Ordered as [`LABELS_60`].
    pub cov: [DMatrix<f64>; 4],
}

impl FiberProjectors {
    pub fn get() -> &'static FiberProjectors {
        static CELL: OnceLock<FiberProjectors> = OnceLock::new();
        CELL.get_or_init(|| {
            let model = StabilizerModel::new();
            let s20 = model.sym2_0_normal_space();
            let s60 = model.cotangent_sym2_0_normal_space();
            let sym2_0 = [IrrepLabel::new(1, 5), IrrepLabel::new(1, 3)]
                .map(|l| isotypic_projector(&s20, l).real_matrix());
            let cov = LABELS_60.map(|l| isotypic_projector(&s60, l).real_matrix());
            FiberProjectors { sym2_0, cov }
        })
    }

    pub fn sym2_0_norms(&self, v: &DVector<f64>) -> [f64; 2] {
        self.sym2_0.each_ref().map(|p| (p * v).norm())
    }

    pub fn cov_norms(&self, v: &DVector<f64>) -> [f64; 4] {
        self.cov.each_ref().map(|p| (p * v).norm())
    }
}
