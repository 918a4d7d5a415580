//! Clifford multiplication `cl : (R^3)^C ⊗ U_{0,1} ⊗ U_{1,4} → U_{0,1} ⊗ U_{1,4}`
//! and the isomorphism `F : Sym²₀(R^3) ⊗ R^4 ⊗ C → U_{0,1} ⊗ U_{1,4}`.

use nalgebra::DVector;

use super::irrep::{build_irrep, tensor, tensor_all, CMat, IrrepLabel, RepSpace, C64};
use super::stabilizer::{sym2_0_basis, StabilizerModel};
use crate::error::{Error, Result};

/// Sign convention for Clifford multiplication on `U_{0,1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CliffordSign {
    /// `α·α·σ = −|α|² σ`
    #[default]
    Negative,
    /// `α·α·σ = +|α|² σ`
    Positive,
}

/// Image of the tangent vector `e_a` acting on `U_{0,1}`.
pub fn clifford_generator(a: usize, sign: CliffordSign) -> CMat {
    let u01 = build_irrep(IrrepLabel::new(0, 1));
    let y = u01.q_generators()[a].clone();
    match sign {
        CliffordSign::Negative => y,
        CliffordSign::Positive => y * C64::i(),
    }
}

#[derive(Clone, Debug)]
pub struct CliffordMap {
    pub sign: CliffordSign,
    /// `(R^3)^C ⊗ U_{0,1} ⊗ U_{1,4}`, index `20 a + 10 s + t`.
    pub domain: RepSpace,
    /// `U_{0,1} ⊗ U_{1,4}`, index `10 s + t`.
    pub codomain: RepSpace,
    pub matrix: CMat,
}

pub fn clifford_map(sign: CliffordSign) -> CliffordMap {
    let tangent = StabilizerModel::new().tangent_space();
    let u01 = build_irrep(IrrepLabel::new(0, 1));
    let u14 = build_irrep(IrrepLabel::new(1, 4));
    let domain = tensor_all(&[&tangent, &u01, &u14]);
    let codomain = tensor(&u01, &u14);
    let mut matrix = CMat::zeros(20, 60);
    for a in 0..3 {
        let rho = clifford_generator(a, sign);
        for s_out in 0..2 {
            for s in 0..2 {
                for t in 0..10 {
                    matrix[(s_out * 10 + t, a * 20 + s * 10 + t)] = rho[(s_out, s)];
                }
            }
        }
    }
    CliffordMap {
        sign,
        domain,
        codomain,
        matrix,
    }
}

/// The unique (up to scale) equivariant map `dom → cod`, normalized so its
/// largest singular value is 1. Fails unless the intertwiner space is
/// one-dimensional.
pub fn intertwiner(dom: &RepSpace, cod: &RepSpace) -> Result<CMat> {
    let (n, m) = (dom.dim(), cod.dim());
    let id_n = CMat::identity(n, n);
    let id_m = CMat::identity(m, m);
    let pairs: Vec<(&CMat, &CMat)> = dom
        .p_generators()
        .iter()
        .zip(cod.p_generators())
        .chain(dom.q_generators().iter().zip(cod.q_generators()))
        .collect();
    let block = n * m;
    let mut sys = CMat::zeros(pairs.len() * block, block);
    for (k, (gd, gc)) in pairs.iter().enumerate() {
        // vec(M G_d − G_c M) = (G_dᵀ ⊗ I − I ⊗ G_c) vec(M)
        let eq = gd.transpose().kronecker(&id_m) - id_n.kronecker(gc);
        sys.view_mut((k * block, 0), (block, block)).copy_from(&eq);
    }
    let svd = sys.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let scale = svd.singular_values.max().max(1.0);
    let null: Vec<usize> = (0..block)
        .filter(|&k| svd.singular_values[k] <= 1e-9 * scale)
        .collect();
    if null.len() != 1 {
        return Err(Error::DegenerateInput(format!(
            "intertwiner space has dimension {}, expected 1",
            null.len()
        )));
    }
    let row = v_t.row(null[0]);
    let mut mat = CMat::from_fn(m, n, |i, j| row[j * m + i].conj());
    let top = mat.clone().svd(false, false).singular_values.max();
    mat /= C64::new(top, 0.0);
    Ok(mat)
}

/// Product of two elements of `Sym²(C²)` in `Sym⁴(C²)`, both in the unitary
/// monomial bases used by [`build_irrep`].
fn quadratic_product(u: &DVector<C64>, v: &DVector<C64>) -> DVector<C64> {
    let fact = |k: usize| (1..=k).product::<usize>() as f64;
    let norm = |n: usize, r: usize| (fact(n - r) * fact(r)).sqrt();
    let mut w = DVector::zeros(5);
    for r1 in 0..3 {
        for r2 in 0..3 {
            let c = norm(4, r1 + r2) / (norm(2, r1) * norm(2, r2));
            w[r1 + r2] += u[r1] * v[r2] * c;
        }
    }
    w
}

#[derive(Clone, Debug)]
pub struct FIsomorphism {
    /// `Sym²₀(R^3) ⊗ R^4`, index `4 s + α`.
    pub domain: RepSpace,
    /// `U_{0,1} ⊗ U_{1,4}`, index `10 s + 5 r + t`.
    pub codomain: RepSpace,
    pub matrix: CMat,
}

/// Builds `F` as the composite of `R^3 ≅ Sym²(C²)`, multiplication
/// `Sym² ⊗ Sym² → Sym⁴` applied to `S = Σ S_ab e_a e_b`, and
/// `R^4 ⊗ C ≅ U_{1,0} ⊗ U_{0,1}`.
pub fn build_isomorphism_f() -> Result<FIsomorphism> {
    let model = StabilizerModel::new();
    let tangent = model.tangent_space();
    let normal = model.normal_space();
    let iota_t = intertwiner(&tangent, &build_irrep(IrrepLabel::new(0, 2)))?;
    let iota_n = intertwiner(&normal, &build_irrep(IrrepLabel::new(1, 1)))?;

    let mut matrix = CMat::zeros(20, 20);
    for (s, sm) in sym2_0_basis().iter().enumerate() {
        let mut quartic = DVector::<C64>::zeros(5);
        for a in 0..3 {
            for b in 0..3 {
                if sm[(a, b)] == 0.0 {
                    continue;
                }
                let prod = quadratic_product(
                    &iota_t.column(a).into_owned(),
                    &iota_t.column(b).into_owned(),
                );
                quartic += prod * C64::new(sm[(a, b)], 0.0);
            }
        }
        for alpha in 0..4 {
            let nvec = iota_n.column(alpha);
            for ip in 0..2 {
                for iq in 0..2 {
                    let coef = nvec[ip * 2 + iq];
                    for t in 0..5 {
                        matrix[(iq * 10 + ip * 5 + t, 4 * s + alpha)] += coef * quartic[t];
                    }
                }
            }
        }
    }
    let codomain = tensor(
        &build_irrep(IrrepLabel::new(0, 1)),
        &build_irrep(IrrepLabel::new(1, 4)),
    );
    Ok(FIsomorphism {
        domain: model.sym2_0_normal_space(),
        codomain,
        matrix,
    })
}

impl FIsomorphism {
    /// Largest `‖F ρ_dom(g) − ρ_cod(g) F‖` over the six generators.
    pub fn equivariance_defect(&self) -> f64 {
        let dom = self.domain.generators();
        let cod = self.codomain.generators();
        dom.zip(cod)
            .map(|(gd, gc)| (&self.matrix * gd - gc * &self.matrix).norm())
            .fold(0.0, f64::max)
    }

    pub fn smallest_singular_value(&self) -> f64 {
        self.matrix.clone().svd(false, false).singular_values.min()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin4::projector::isotypic_projector;

    #[test]
    fn clifford_relation_both_signs() {
        let alpha = [0.3, -1.1, 0.7];
        let n2: f64 = alpha.iter().map(|x| x * x).sum();
        for (sign, expect) in [(CliffordSign::Negative, -n2), (CliffordSign::Positive, n2)] {
            let mut m = CMat::zeros(2, 2);
            for (a, x) in alpha.iter().enumerate() {
                m += clifford_generator(a, sign) * C64::new(*x, 0.0);
            }
            let sq = &m * &m;
            assert!((sq - CMat::identity(2, 2) * C64::new(expect, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn clifford_map_is_equivariant_and_onto() {
        for sign in [CliffordSign::Negative, CliffordSign::Positive] {
            let cl = clifford_map(sign);
            for (gd, gc) in cl.domain.generators().zip(cl.codomain.generators()) {
                assert!((&cl.matrix * gd - gc * &cl.matrix).norm() < 1e-12);
            }
            let rank = cl
                .matrix
                .clone()
                .svd(false, false)
                .singular_values
                .iter()
                .filter(|s| **s > 1e-9)
                .count();
            assert_eq!(rank, 20);
        }
    }

    #[test]
    fn f_is_an_equivariant_bijection() {
        let f = build_isomorphism_f().unwrap();
        assert!(f.equivariance_defect() < 1e-10);
        assert!(f.smallest_singular_value() > 1e-3);
    }

    #[test]
    fn f_maps_isotypic_pieces() {
        let f = build_isomorphism_f().unwrap();
        let inv = f.matrix.clone().try_inverse().unwrap();
        for label in [IrrepLabel::new(1, 5), IrrepLabel::new(1, 3)] {
            let pd = isotypic_projector(&f.domain, label).matrix;
            let pc = isotypic_projector(&f.codomain, label).matrix;
            assert!((&f.matrix * pd * &inv - pc).norm() < 1e-9);
        }
    }

    #[test]
    fn intertwiner_rejects_non_isomorphic_pairs() {
        let a = build_irrep(IrrepLabel::new(0, 2));
        let b = build_irrep(IrrepLabel::new(1, 1));
        assert!(intertwiner(&a, &b).is_err());
    }
}
