//! The `so(4) = sp(1) ⊕ sp(1)` subalgebra of `g2` fixing the splitting
//! `R^7 = R^3 ⊕ R^4` into tangent and normal parts of an SO(4)-frame.
//!
//! Tangent coordinates `(x1, x2, x3)` are identified with `Im H` via
//! `e1, e2, e3 ↦ i, j, k`. A normal vector with coordinates `(n4, n5, n6, n7)`
//! is identified with the quaternion `y = n4 − n5 i − n6 j + n7 k`. With these
//! choices the pair `(a, b) ∈ Im H ⊕ Im H` acts by
//!
//! ```text
//! x ↦ a x − x a        (tangent)
//! y ↦ a y − y b        (normal)
//! ```
//!
//! and preserves `φ`. The `a`-factor acts on both tangent and normal spaces
//! and carries the second label `q` of `U_{p,q}`; the `b`-factor carries `p`.

use nalgebra::{DMatrix, Matrix3, Matrix4};

use super::irrep::RepSpace;
use crate::g2::{EpsilonTable, Matrix7, Quaternion, Vector7};

/// Sign pattern taking normal coordinates to quaternion components (an involution).
pub const NORMAL_SIGNS: [f64; 4] = [1.0, -1.0, -1.0, 1.0];

pub fn normal_to_quaternion(n: [f64; 4]) -> Quaternion {
    Quaternion(std::array::from_fn(|i| NORMAL_SIGNS[i] * n[i]))
}

pub fn quaternion_to_normal(y: Quaternion) -> [f64; 4] {
    std::array::from_fn(|i| NORMAL_SIGNS[i] * y.0[i])
}

/// Orthonormal basis of traceless symmetric 3×3 matrices (Frobenius inner product).
pub fn sym2_0_basis() -> [Matrix3<f64>; 5] {
    let r2 = std::f64::consts::SQRT_2;
    let r6 = 6f64.sqrt();
    [
        Matrix3::new(1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0) / r2,
        Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -2.0) / r6,
        Matrix3::new(0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0) / r2,
        Matrix3::new(0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0) / r2,
        Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0) / r2,
    ]
}

#[derive(Clone, Debug)]
pub struct StabilizerModel {
    /// Generators of the factor acting on the tangent space (`a`, label `q`).
    pub q_gens: [Matrix7; 3],
    /// Generators of the factor acting only on the normal space (`b`, label `p`).
    pub p_gens: [Matrix7; 3],
}

fn generator(a: Quaternion, b: Quaternion) -> Matrix7 {
    let mut g = Matrix7::zeros();
    for c in 0..3 {
        let x = Quaternion::unit(c);
        let r = a * x - x * a;
        for row in 0..3 {
            g[(row, c)] = r.0[row + 1];
        }
    }
    for c in 0..4 {
        let mut n = [0.0; 4];
        n[c] = 1.0;
        let y = normal_to_quaternion(n);
        let r = quaternion_to_normal(a * y - y * b);
        for row in 0..4 {
            g[(3 + row, 3 + c)] = r[row];
        }
    }
    g
}

impl StabilizerModel {
    pub fn new() -> Self {
        let zero = Quaternion::ZERO;
        Self {
            q_gens: std::array::from_fn(|a| generator(Quaternion::unit(a), zero)),
            p_gens: std::array::from_fn(|a| generator(zero, Quaternion::unit(a))),
        }
    }

    pub fn generators(&self) -> impl Iterator<Item = &Matrix7> {
        self.p_gens.iter().chain(self.q_gens.iter())
    }

    /// Largest entry of `G·φ` over the six generators, with `G` acting as a
    /// derivation on 3-forms.
    pub fn phi_annihilation_defect(&self) -> f64 {
        phi_annihilation_defect(self.generators(), EpsilonTable::standard())
    }

    pub fn skew_defect(&self) -> f64 {
        self.generators()
            .map(|g| (g + g.transpose()).abs().max())
            .fold(0.0, f64::max)
    }

    /// Largest off-diagonal-block entry: generators must preserve `R^3 ⊕ R^4`.
    pub fn block_defect(&self) -> f64 {
        self.generators()
            .map(|g| {
                let mut m = 0.0f64;
                for i in 0..3 {
                    for j in 3..7 {
                        m = m.max(g[(i, j)].abs()).max(g[(j, i)].abs());
                    }
                }
                m
            })
            .fold(0.0, f64::max)
    }

    fn tangent_block(g: &Matrix7) -> Matrix3<f64> {
        g.fixed_view::<3, 3>(0, 0).into_owned()
    }

    fn normal_block(g: &Matrix7) -> Matrix4<f64> {
        g.fixed_view::<4, 4>(3, 3).into_owned()
    }

    fn real_space<F>(&self, basis: Vec<String>, max_p: usize, max_q: usize, build: F) -> RepSpace
    where
        F: Fn(&Matrix3<f64>, &Matrix4<f64>) -> DMatrix<f64>,
    {
        let mk = |g: &Matrix7| build(&Self::tangent_block(g), &Self::normal_block(g));
        RepSpace::from_real_generators(
            basis,
            self.p_gens.each_ref().map(mk),
            self.q_gens.each_ref().map(mk),
            max_p,
            max_q,
        )
    }

    /// `R^3 ≅ W_{0,2}` (tangent or cotangent vectors).
    pub fn tangent_space(&self) -> RepSpace {
        let basis = (1..=3).map(|i| format!("e{i}")).collect();
        self.real_space(basis, 0, 2, |a, _| dense(a.as_slice(), 3))
    }

    /// `R^4 ≅ W_{1,1}` (normal vectors).
    pub fn normal_space(&self) -> RepSpace {
        let basis = (4..=7).map(|i| format!("e{i}")).collect();
        self.real_space(basis, 1, 1, |_, b| dense(b.as_slice(), 4))
    }

    /// `Sym²₀(R^3) ⊗ R^4`, coordinates `(s, α)` flattened as `4 s + α` over
    /// [`sym2_0_basis`].
    pub fn sym2_0_normal_space(&self) -> RepSpace {
        let mut basis = Vec::new();
        for s in 0..5 {
            for a in 4..=7 {
                basis.push(format!("S{s}⊗e{a}"));
            }
        }
        self.real_space(basis, 1, 5, |a, b| {
            let ms = sym2_0_action(a);
            kron_real(&ms, &DMatrix::identity(4, 4))
                + kron_real(&DMatrix::identity(5, 5), &dense(b.as_slice(), 4))
        })
    }

    /// `R^3 ⊗ Sym²₀(R^3) ⊗ R^4`, coordinates `(k, s, α)` flattened as
    /// `20 k + 4 s + α`.
    pub fn cotangent_sym2_0_normal_space(&self) -> RepSpace {
        let mut basis = Vec::new();
        for k in 1..=3 {
            for s in 0..5 {
                for a in 4..=7 {
                    basis.push(format!("e{k}⊗S{s}⊗e{a}"));
                }
            }
        }
        self.real_space(basis, 1, 7, |a, b| {
            let ta = dense(a.as_slice(), 3);
            let ms = sym2_0_action(a);
            let nb = dense(b.as_slice(), 4);
            let i3 = DMatrix::identity(3, 3);
            let i4 = DMatrix::identity(4, 4);
            let i5 = DMatrix::identity(5, 5);
            kron_real(&kron_real(&ta, &i5), &i4)
                + kron_real(&kron_real(&i3, &ms), &i4)
                + kron_real(&kron_real(&i3, &i5), &nb)
        })
    }
}

impl Default for StabilizerModel {
    fn default() -> Self {
        Self::new()
    }
}

pub fn phi_annihilation_defect<'a>(
    gens: impl Iterator<Item = &'a Matrix7>,
    table: &EpsilonTable,
) -> f64 {
    let phi = table.three_form();
    let mut worst = 0.0f64;
    for g in gens {
        for i in 0..7 {
            for j in 0..7 {
                for k in 0..7 {
                    let mut s = 0.0;
                    for l in 0..7 {
                        s += g[(l, i)] * phi.coefficient(l, j, k)
                            + g[(l, j)] * phi.coefficient(i, l, k)
                            + g[(l, k)] * phi.coefficient(i, j, l);
                    }
                    worst = worst.max(s.abs());
                }
            }
        }
    }
    worst
}

/// Column-major slice of a square matrix into a `DMatrix`.
fn dense(slice: &[f64], n: usize) -> DMatrix<f64> {
    DMatrix::from_column_slice(n, n, slice)
}

pub(crate) fn kron_real(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

/// Matrix of `S ↦ A S − S A` on [`sym2_0_basis`] for skew `A`.
fn sym2_0_action(a: &Matrix3<f64>) -> DMatrix<f64> {
    let basis = sym2_0_basis();
    let mut m = DMatrix::zeros(5, 5);
    for (s, bs) in basis.iter().enumerate() {
        let img = a * bs - bs * a;
        for (t, bt) in basis.iter().enumerate() {
            m[(t, s)] = bt.component_mul(&img).sum();
        }
    }
    m
}

/// Components of a 3×3×4 array `h[i][j][α]` in the coordinates of
/// [`StabilizerModel::sym2_0_normal_space`]. Only the traceless symmetric
/// part contributes.
pub fn sym2_0_normal_coords(h: &[[[f64; 4]; 3]; 3]) -> Vec<f64> {
    let basis = sym2_0_basis();
    let mut out = vec![0.0; 20];
    for (s, bs) in basis.iter().enumerate() {
        for a in 0..4 {
            let mut acc = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    acc += bs[(i, j)] * h[i][j][a];
                }
            }
            out[4 * s + a] = acc;
        }
    }
    out
}

/// Ambient vector with the given tangent and normal coordinates.
pub fn split_vector(tangent: [f64; 3], normal: [f64; 4]) -> Vector7 {
    Vector7::from_fn(|i, _| if i < 3 { tangent[i] } else { normal[i - 3] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::g2::cross7;

    #[test]
    fn generators_fix_phi_and_are_skew() {
        let m = StabilizerModel::new();
        assert!(m.phi_annihilation_defect() <= 1e-12);
        assert!(m.skew_defect() <= 1e-12);
        assert_eq!(m.block_defect(), 0.0);
    }

    #[test]
    fn unsigned_normal_identification_fails() {
        // Reading n4..n7 directly as quaternion components breaks invariance.
        let a = Quaternion::I;
        let mut g = generator(a, Quaternion::ZERO);
        for c in 0..4 {
            let mut y = Quaternion::ZERO;
            y.0[c] = 1.0;
            let r = a * y;
            for row in 0..4 {
                g[(3 + row, 3 + c)] = r.0[row];
            }
        }
        assert!(phi_annihilation_defect(std::iter::once(&g), EpsilonTable::standard()) > 0.5);
    }

    #[test]
    fn cross_with_tangent_is_quaternion_multiplication() {
        // e_a × · restricted to the normal space is a complex structure.
        let e = |i: usize| {
            let mut v = Vector7::zeros();
            v[i] = 1.0;
            v
        };
        for a in 0..3 {
            for c in 3..7 {
                let once = cross7(&e(a), &e(c));
                let twice = cross7(&e(a), &once);
                assert!((twice + e(c)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn real_spaces_satisfy_brackets() {
        let m = StabilizerModel::new();
        for space in [
            m.tangent_space(),
            m.normal_space(),
            m.sym2_0_normal_space(),
            m.cotangent_sym2_0_normal_space(),
        ] {
            assert!(space.bracket_defect() < 1e-12, "{}", space.dim());
        }
    }

    #[test]
    fn sym2_0_basis_is_orthonormal_and_traceless() {
        let b = sym2_0_basis();
        for (i, x) in b.iter().enumerate() {
            assert!(x.trace().abs() < 1e-15);
            assert!((x - x.transpose()).norm() < 1e-15);
            for (j, y) in b.iter().enumerate() {
                let ip = x.component_mul(y).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - expect).abs() < 1e-15);
            }
        }
    }
}
