//! Isotypic projectors as polynomials in the two Casimirs.
//!
//! On any space where the p-Casimir has spectrum inside `{n(n+2) : n ≤ max_p}`
//! (and likewise for q), the Lagrange product
//! `Π_{n≠p} (C_p − λ_n)/(λ_p − λ_n) · Π_{m≠q} (C_q − λ_m)/(λ_q − λ_m)`
//! is the spectral projector onto the `U_{p,q}`-isotypic component.

use nalgebra::DMatrix;

use super::irrep::{casimir_eigenvalue, CMat, IrrepLabel, RepSpace, C64};

#[derive(Clone, Debug)]
pub struct IsotypicProjector {
    pub target: IrrepLabel,
    pub matrix: CMat,
    pub rank: usize,
}

impl IsotypicProjector {
    pub fn multiplicity(&self) -> usize {
        self.rank / self.target.dim()
    }

    pub fn apply(&self, v: &nalgebra::DVector<C64>) -> nalgebra::DVector<C64> {
        &self.matrix * v
    }

    /// Real part of the matrix, for projectors on complexified real spaces.
    pub fn real_matrix(&self) -> DMatrix<f64> {
        self.matrix.map(|z| z.re)
    }
}

fn lagrange_factor(casimir: &CMat, n_max: usize, target: usize) -> CMat {
    let d = casimir.nrows();
    let id = CMat::identity(d, d);
    let lt = casimir_eigenvalue(target);
    let mut out = id.clone();
    for n in 0..=n_max {
        if n == target {
            continue;
        }
        let ln = casimir_eigenvalue(n);
        out *= (casimir - &id * C64::new(ln, 0.0)) / C64::new(lt - ln, 0.0);
    }
    out
}

/// Spectral projector onto the `target`-isotypic component of `space`.
/// Returns the zero matrix if the target cannot occur.
pub fn isotypic_projector(space: &RepSpace, target: IrrepLabel) -> IsotypicProjector {
    let d = space.dim();
    if target.p > space.max_p() || target.q > space.max_q() {
        return IsotypicProjector {
            target,
            matrix: CMat::zeros(d, d),
            rank: 0,
        };
    }
    let fp = lagrange_factor(&space.casimir_p(), space.max_p(), target.p);
    let fq = lagrange_factor(&space.casimir_q(), space.max_q(), target.q);
    let matrix = fp * fq;
    let rank = matrix.trace().re.round().max(0.0) as usize;
    IsotypicProjector {
        target,
        matrix,
        rank,
    }
}

/// All labels occurring in `space`, with multiplicities.
pub fn decomposition_ranks(space: &RepSpace) -> Vec<(IrrepLabel, usize)> {
    let mut out = Vec::new();
    for p in 0..=space.max_p() {
        for q in 0..=space.max_q() {
            let label = IrrepLabel::new(p, q);
            let proj = isotypic_projector(space, label);
            if proj.rank > 0 {
                out.push((label, proj.multiplicity()));
            }
        }
    }
    out
}

/// Projectors for every label that occurs, summing to the identity.
pub fn isotypic_decomposition(space: &RepSpace) -> Vec<IsotypicProjector> {
    let mut out = Vec::new();
    for p in 0..=space.max_p() {
        for q in 0..=space.max_q() {
            let proj = isotypic_projector(space, IrrepLabel::new(p, q));
            if proj.rank > 0 {
                out.push(proj);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::irrep::{build_irrep, tensor};
    use super::*;

    fn lbl(p: usize, q: usize) -> IrrepLabel {
        IrrepLabel::new(p, q)
    }

    #[test]
    fn clebsch_gordan_ranks() {
        let t = tensor(&build_irrep(lbl(0, 1)), &build_irrep(lbl(1, 4)));
        assert_eq!(isotypic_projector(&t, lbl(1, 5)).rank, 12);
        assert_eq!(isotypic_projector(&t, lbl(1, 3)).rank, 8);
        assert_eq!(isotypic_projector(&t, lbl(3, 3)).rank, 0);
        assert_eq!(
            decomposition_ranks(&t),
            vec![(lbl(1, 3), 1), (lbl(1, 5), 1)]
        );
    }

    #[test]
    fn spinor_times_pure_p_is_irreducible() {
        let t = tensor(&build_irrep(lbl(0, 1)), &build_irrep(lbl(1, 0)));
        let p = isotypic_projector(&t, lbl(1, 1));
        assert_eq!(p.rank, 4);
        assert!((p.matrix - CMat::identity(4, 4)).norm() < 1e-12);
    }

    #[test]
    fn trivial_space() {
        assert_eq!(
            decomposition_ranks(&build_irrep(lbl(0, 0))),
            vec![(lbl(0, 0), 1)]
        );
    }

    #[test]
    fn projectors_are_complete_orthogonal_equivariant() {
        let t = tensor(&build_irrep(lbl(1, 2)), &build_irrep(lbl(1, 3)));
        let projs = isotypic_decomposition(&t);
        let d = t.dim();
        let mut sum = CMat::zeros(d, d);
        for (a, pa) in projs.iter().enumerate() {
            sum += &pa.matrix;
            assert!((&pa.matrix - pa.matrix.adjoint()).norm() < 1e-10);
            for g in t.generators() {
                assert!((&pa.matrix * g - g * &pa.matrix).norm() < 1e-10);
            }
            for (b, pb) in projs.iter().enumerate() {
                let prod = &pa.matrix * &pb.matrix;
                let expect = if a == b {
                    pa.matrix.clone()
                } else {
                    CMat::zeros(d, d)
                };
                assert!((prod - expect).norm() < 1e-10);
            }
        }
        assert!((sum - CMat::identity(d, d)).norm() < 1e-10);
        let total: usize = projs.iter().map(|p| p.rank).sum();
        assert_eq!(total, d);
    }
}
