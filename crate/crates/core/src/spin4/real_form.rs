use nalgebra::{DMatrix, DVector};

use super::irrep::{build_irrep, CMat, IrrepLabel, C64};
use crate::error::{Error, Result};

/// The real structure `c(v) = C v̄` on `U_{p,q}` and a real basis of its
/// fixed subspace `W_{p,q}`.
#[derive(Clone, Debug)]
pub struct RealForm {
    pub label: IrrepLabel,
    pub structure: CMat,
    pub basis: Vec<DVector<C64>>,
}

impl RealForm {
    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.structure * v.map(|z| z.conj())
    }

    pub fn real_dim(&self) -> usize {
        self.basis.len()
    }
}

/// Real-linear matrix of `v ↦ C v̄` acting on `(Re v, Im v)`.
fn realify(c: &CMat) -> DMatrix<f64> {
    let d = c.nrows();
    let mut m = DMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            let z = c[(i, j)];
            // C (x - i y) = (Re C x + Im C y) + i (Im C x - Re C y)
            m[(i, j)] = z.re;
            m[(i, d + j)] = z.im;
            m[(d + i, j)] = z.im;
            m[(d + i, d + j)] = -z.re;
        }
    }
    m
}

pub fn real_form(label: IrrepLabel) -> Result<RealForm> {
    if !label.has_real_form() {
        return Err(Error::NoRealForm {
            p: label.p,
            q: label.q,
        });
    }
    let space = build_irrep(label);
    let structure = space.real_structure().expect("parity checked").clone();
    let d = space.dim();
    let m = realify(&structure) - DMatrix::identity(2 * d, 2 * d);
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let scale = svd.singular_values.max().max(1.0);
    let mut basis = Vec::new();
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s <= 1e-10 * scale {
            let row = v_t.row(k);
            basis.push(DVector::from_fn(d, |i, _| C64::new(row[i], row[d + i])));
        }
    }
    Ok(RealForm {
        label,
        structure,
        basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin4::irrep::sym_power_structure;

    #[test]
    fn w11_is_four_dimensional() {
        let w = real_form(IrrepLabel::new(1, 1)).unwrap();
        assert_eq!(w.real_dim(), 4);
    }

    #[test]
    fn parity_mismatch_has_no_real_form() {
        assert!(matches!(
            real_form(IrrepLabel::new(1, 0)),
            Err(Error::NoRealForm { p: 1, q: 0 })
        ));
    }

    #[test]
    fn structure_is_an_involution_commuting_with_the_action() {
        for (p, q) in [(1, 5), (0, 2), (2, 2), (1, 1), (3, 1)] {
            let label = IrrepLabel::new(p, q);
            let w = real_form(label).unwrap();
            let c = &w.structure;
            // c∘c(v) = C conj(C) v
            let cc = c * c.map(|z| z.conj());
            assert!((cc - CMat::identity(c.nrows(), c.nrows())).norm() < 1e-12);
            let space = build_irrep(label);
            for g in space.generators() {
                let lhs = c * g.map(|z| z.conj());
                let rhs = g * c;
                assert!((lhs - rhs).norm() < 1e-12, "({p},{q})");
            }
            assert_eq!(w.real_dim(), label.dim());
            for b in &w.basis {
                assert!((w.apply(b) - b).norm() < 1e-10);
            }
            // complexification recovers U_{p,q}: basis is C-linearly independent
            let mat = CMat::from_columns(&w.basis);
            let rank = mat
                .svd(false, false)
                .singular_values
                .iter()
                .filter(|s| **s > 1e-8)
                .count();
            assert_eq!(rank, label.dim());
        }
    }

    #[test]
    fn odd_symmetric_powers_are_quaternionic() {
        let c = sym_power_structure(3);
        let cc = &c * c.map(|z| z.conj());
        assert!((cc + CMat::identity(4, 4)).norm() < 1e-12);
    }
}
