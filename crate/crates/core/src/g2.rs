//! The flat G2-structure on R^7 and the quaternionic triple cross product on R^4.
//!
//! Everything is written in the standard coordinate frame `e1..e7`. The
//! structure constants are stored as an integer table so that identities
//! between basis vectors can be checked exactly.

use std::ops::{Add, Index, Mul, Neg, Sub};
use std::sync::OnceLock;

use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vector7 = SVector<f64, 7>;
pub type Matrix7 = SMatrix<f64, 7, 7>;

/// The seven index triples (1-based) carrying `ε = +1`.
pub const BASE_TRIPLES: [[usize; 3]; 7] = [
    [1, 2, 3],
    [1, 4, 5],
    [1, 6, 7],
    [2, 4, 6],
    [2, 7, 5],
    [3, 7, 4],
    [3, 6, 5],
];

const PERMS: [([usize; 3], i8); 6] = [
    ([0, 1, 2], 1),
    ([1, 2, 0], 1),
    ([2, 0, 1], 1),
    ([1, 0, 2], -1),
    ([0, 2, 1], -1),
    ([2, 1, 0], -1),
];

/// Totally antisymmetric structure constants `ε_ijk ∈ {-1, 0, 1}`.
///
/// Indices passed to the public accessors are 1-based, matching the usual
/// labelling of the frame `e1..e7`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsilonTable {
    entries: [[[i8; 7]; 7]; 7],
}

impl EpsilonTable {
    /// The standard table built from [`BASE_TRIPLES`].
    pub fn standard() -> &'static EpsilonTable {
        static TABLE: OnceLock<EpsilonTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            let signed: Vec<([usize; 3], i8)> = BASE_TRIPLES.iter().map(|t| (*t, 1)).collect();
            EpsilonTable::from_signed_triples(&signed).expect("standard triples are valid")
        })
    }

    /// Builds a table from base triples and their signs, filling in every
    /// permutation by antisymmetry.
    pub fn from_signed_triples(triples: &[([usize; 3], i8)]) -> Result<Self> {
        let mut entries = [[[0i8; 7]; 7]; 7];
        for &(t, s) in triples {
            if t.iter().any(|&i| !(1..=7).contains(&i))
                || t[0] == t[1]
                || t[1] == t[2]
                || t[0] == t[2]
            {
                return Err(Error::DegenerateInput(format!("bad epsilon triple {t:?}")));
            }
            if s != 1 && s != -1 {
                return Err(Error::DegenerateInput(format!(
                    "epsilon sign must be ±1, got {s}"
                )));
            }
            for (perm, ps) in PERMS {
                let (i, j, k) = (t[perm[0]] - 1, t[perm[1]] - 1, t[perm[2]] - 1);
                let v = s * ps;
                if entries[i][j][k] != 0 && entries[i][j][k] != v {
                    return Err(Error::DegenerateInput(format!(
                        "conflicting entries for {t:?}"
                    )));
                }
                entries[i][j][k] = v;
            }
        }
        Ok(Self { entries })
    }

    /// Copy of this table with the sign of one base triple (and all of its
    /// permutations) reversed. Used for fault injection.
    pub fn with_flipped_triple(&self, triple: [usize; 3]) -> Self {
        let mut out = self.clone();
        for (perm, _) in PERMS {
            let (i, j, k) = (
                triple[perm[0]] - 1,
                triple[perm[1]] - 1,
                triple[perm[2]] - 1,
            );
            out.entries[i][j][k] = -out.entries[i][j][k];
        }
        out
    }

    /// `ε_ijk` with 1-based indices.
    pub fn get(&self, i: usize, j: usize, k: usize) -> i8 {
        self.entries[i - 1][j - 1][k - 1]
    }

    fn raw(&self, i: usize, j: usize, k: usize) -> i8 {
        self.entries[i][j][k]
    }

    pub fn is_totally_antisymmetric(&self) -> bool {
        (0..7).all(|i| {
            (0..7).all(|j| {
                (0..7).all(|k| {
                    let t = [i, j, k];
                    let v = self.entries[i][j][k];
                    PERMS
                        .iter()
                        .all(|(p, s)| self.entries[t[p[0]]][t[p[1]]][t[p[2]]] == s * v)
                })
            })
        })
    }

    /// Integer cross product of basis vectors, `e_i × e_j` (1-based).
    pub fn cross_basis(&self, i: usize, j: usize) -> [i32; 7] {
        let mut out = [0i32; 7];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = self.raw(i - 1, j - 1, k) as i32;
        }
        out
    }

    /// `(u × v)_k = Σ ε_ijk u_i v_j`, summed over `i < j` so that `u × u`
    /// is exactly zero.
    pub fn cross(&self, u: &Vector7, v: &Vector7) -> Vector7 {
        let mut out = Vector7::zeros();
        for i in 0..7 {
            for j in i + 1..7 {
                let uv = u[i] * v[j] - u[j] * v[i];
                if uv == 0.0 {
                    continue;
                }
                for k in 0..7 {
                    let e = self.raw(i, j, k);
                    if e != 0 {
                        out[k] += e as f64 * uv;
                    }
                }
            }
        }
        out
    }

    pub fn phi(&self, u: &Vector7, v: &Vector7, w: &Vector7) -> f64 {
        self.cross(u, v).dot(w)
    }

    pub fn three_form(&self) -> ThreeForm7 {
        ThreeForm7::from_fn(|i, j, k| self.raw(i, j, k) as f64)
    }
}

/// `u × v` for the standard G2-structure.
pub fn cross7(u: &Vector7, v: &Vector7) -> Vector7 {
    EpsilonTable::standard().cross(u, v)
}

/// `φ(u, v, w) = ⟨u × v, w⟩` for the standard G2-structure.
pub fn phi_eval(u: &Vector7, v: &Vector7, w: &Vector7) -> f64 {
    EpsilonTable::standard().phi(u, v, w)
}

/// Standard basis vector `e_i` (1-based).
pub fn basis7(i: usize) -> Vector7 {
    let mut v = Vector7::zeros();
    v[i - 1] = 1.0;
    v
}

/// An alternating 3-tensor on R^7, stored densely (0-based indices).
#[derive(Clone, Debug, PartialEq)]
pub struct ThreeForm7 {
    c: [[[f64; 7]; 7]; 7],
}

impl ThreeForm7 {
    pub fn zero() -> Self {
        Self {
            c: [[[0.0; 7]; 7]; 7],
        }
    }

    pub fn standard() -> Self {
        EpsilonTable::standard().three_form()
    }

    /// Builds the alternating part of the tensor given by `f`.
    pub fn from_fn(mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut raw = [[[0.0; 7]; 7]; 7];
        for (i, a) in raw.iter_mut().enumerate() {
            for (j, b) in a.iter_mut().enumerate() {
                for (k, x) in b.iter_mut().enumerate() {
                    *x = f(i, j, k);
                }
            }
        }
        let mut c = [[[0.0; 7]; 7]; 7];
        for i in 0..7 {
            for j in 0..7 {
                for k in 0..7 {
                    let t = [i, j, k];
                    c[i][j][k] = PERMS
                        .iter()
                        .map(|(p, s)| *s as f64 * raw[t[p[0]]][t[p[1]]][t[p[2]]])
                        .sum::<f64>()
                        / 6.0;
                }
            }
        }
        Self { c }
    }

    pub fn coefficient(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[i][j][k]
    }

    pub fn is_alternating(&self, tol: f64) -> bool {
        (0..7).all(|i| {
            (0..7).all(|j| {
                (0..7).all(|k| {
                    let t = [i, j, k];
                    let v = self.c[i][j][k];
                    PERMS.iter().all(|(p, s)| {
                        (self.c[t[p[0]]][t[p[1]]][t[p[2]]] - *s as f64 * v).abs() <= tol
                    })
                })
            })
        })
    }

    pub fn eval(&self, u: &Vector7, v: &Vector7, w: &Vector7) -> f64 {
        let mut acc = 0.0;
        for i in 0..7 {
            for j in 0..7 {
                for k in 0..7 {
                    acc += self.c[i][j][k] * u[i] * v[j] * w[k];
                }
            }
        }
        acc
    }

    pub fn add_scaled(&self, other: &ThreeForm7, s: f64) -> ThreeForm7 {
        let mut out = self.clone();
        for i in 0..7 {
            for j in 0..7 {
                for k in 0..7 {
                    out.c[i][j][k] += s * other.c[i][j][k];
                }
            }
        }
        out
    }

    /// Coefficients on `e^{ijk}`, `i<j<k`, indexed by bitmask.
    fn masked(&self) -> [f64; 128] {
        let mut out = [0.0; 128];
        for i in 0..7 {
            for j in i + 1..7 {
                for k in j + 1..7 {
                    out[(1 << i) | (1 << j) | (1 << k)] = self.c[i][j][k];
                }
            }
        }
        out
    }

    /// Interior product `ι_{e_a} φ` as a masked 2-form.
    fn interior_basis(&self, a: usize) -> [f64; 128] {
        let mut out = [0.0; 128];
        for j in 0..7 {
            for k in j + 1..7 {
                out[(1 << j) | (1 << k)] = self.c[a][j][k];
            }
        }
        out
    }
}

/// Sign of reordering the concatenation of two increasing index sets.
fn merge_sign(a: usize, b: usize) -> f64 {
    let mut inversions = 0u32;
    for i in 0..7 {
        if a & (1 << i) != 0 {
            // count elements of b that are smaller than i
            inversions += (b & ((1 << i) - 1)).count_ones();
        }
    }
    if inversions.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn wedge(a: &[f64; 128], b: &[f64; 128]) -> [f64; 128] {
    let mut out = [0.0; 128];
    for (ma, &ca) in a.iter().enumerate() {
        if ca == 0.0 {
            continue;
        }
        for (mb, &cb) in b.iter().enumerate() {
            if cb == 0.0 || ma & mb != 0 {
                continue;
            }
            out[ma | mb] += merge_sign(ma, mb) * ca * cb;
        }
    }
    out
}

/// Matrix of `B_φ(e_a, e_b)`: the coefficient of `e^{1234567}` in
/// `(ι_{e_a} φ) ∧ (ι_{e_b} φ) ∧ φ`.
pub fn b_form_matrix(phi: &ThreeForm7) -> Matrix7 {
    let full = phi.masked();
    let interiors: Vec<[f64; 128]> = (0..7).map(|a| phi.interior_basis(a)).collect();
    let mut m = Matrix7::zeros();
    for a in 0..7 {
        for b in a..7 {
            let top = wedge(&wedge(&interiors[a], &interiors[b]), &full)[127];
            m[(a, b)] = top;
            m[(b, a)] = top;
        }
    }
    m
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Signature {
    PositiveDefinite,
    NegativeDefinite,
    Indefinite,
    Degenerate,
}

impl Signature {
    pub fn is_definite(self) -> bool {
        matches!(
            self,
            Signature::PositiveDefinite | Signature::NegativeDefinite
        )
    }
}

/// Classifies `B_φ` by the signs of its eigenvalues.
pub fn b_form_signature(phi: &ThreeForm7) -> (Signature, [f64; 7]) {
    let eig = b_form_matrix(phi).symmetric_eigen().eigenvalues;
    let mut vals = [0.0; 7];
    vals.copy_from_slice(eig.as_slice());
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let zero_tol = 1e-10 * scale.max(f64::MIN_POSITIVE);
    let sig = if scale == 0.0 || vals.iter().any(|v| v.abs() <= zero_tol) {
        Signature::Degenerate
    } else if vals.iter().all(|&v| v > 0.0) {
        Signature::PositiveDefinite
    } else if vals.iter().all(|&v| v < 0.0) {
        Signature::NegativeDefinite
    } else {
        Signature::Indefinite
    };
    (sig, vals)
}

/// Quaternion `w + x i + y j + z k`, stored in the basis order `(1, i, j, k)`.
///
/// Also used as the plain vector type of R^4.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Quaternion(pub [f64; 4]);

pub type Vector4 = Quaternion;

impl Quaternion {
    pub const ONE: Quaternion = Quaternion([1.0, 0.0, 0.0, 0.0]);
    pub const I: Quaternion = Quaternion([0.0, 1.0, 0.0, 0.0]);
    pub const J: Quaternion = Quaternion([0.0, 0.0, 1.0, 0.0]);
    pub const K: Quaternion = Quaternion([0.0, 0.0, 0.0, 1.0]);
    pub const ZERO: Quaternion = Quaternion([0.0; 4]);

    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self([w, x, y, z])
    }

    /// Imaginary unit `i`, `j`, `k` for `a = 0, 1, 2`.
    pub fn unit(a: usize) -> Self {
        [Self::I, Self::J, Self::K][a]
    }

    /// Imaginary quaternion with the given components.
    pub fn imaginary(v: [f64; 3]) -> Self {
        Self([0.0, v[0], v[1], v[2]])
    }

    pub fn conj(self) -> Self {
        let [w, x, y, z] = self.0;
        Self([w, -x, -y, -z])
    }

    pub fn dot(self, other: Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Self(self.0.map(|c| c * s))
    }

    pub fn max_abs(self) -> f64 {
        self.0.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }
}

impl Index<usize> for Quaternion {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        self.scale(-1.0)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Quaternion) -> Quaternion {
        let [a0, a1, a2, a3] = self.0;
        let [b0, b1, b2, b3] = o.0;
        Quaternion([
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ])
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, s: f64) -> Quaternion {
        self.scale(s)
    }
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Triple cross product on R^4: the unique `d` with `⟨d, x⟩ = det[a|b|c|x]`,
/// computed by cofactor expansion along the last column.
pub fn triple_cross4(a: Vector4, b: Vector4, c: Vector4) -> Vector4 {
    let mut d = [0.0; 4];
    for (m, dm) in d.iter_mut().enumerate() {
        let rows: Vec<usize> = (0..4).filter(|&r| r != m).collect();
        let minor: [[f64; 3]; 3] = std::array::from_fn(|r| {
            let row = rows[r];
            [a.0[row], b.0[row], c.0[row]]
        });
        let sign = if (m + 3) % 2 == 0 { 1.0 } else { -1.0 };
        *dm = sign * det3(minor);
    }
    Quaternion(d)
}

/// Modified Gram–Schmidt on the given vectors, in order.
pub fn gram_schmidt7(vs: &[Vector7]) -> Result<Vec<Vector7>> {
    let scale = vs.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    if scale == 0.0 {
        return Err(Error::DegenerateInput("all input vectors vanish".into()));
    }
    let mut out: Vec<Vector7> = Vec::with_capacity(vs.len());
    for v in vs {
        let mut w = *v;
        for o in &out {
            w -= o * o.dot(&w);
        }
        let n = w.norm();
        if n <= 1e-12 * scale {
            return Err(Error::DegenerateInput(
                "input vectors are linearly dependent".into(),
            ));
        }
        out.push(w / n);
    }
    Ok(out)
}

/// `|φ(o1, o2, o3) − 1|` for the oriented orthonormalization of the inputs.
pub fn associativity_residual(t1: &Vector7, t2: &Vector7, t3: &Vector7) -> Result<f64> {
    let o = gram_schmidt7(&[*t1, *t2, *t3])?;
    Ok((phi_eval(&o[0], &o[1], &o[2]) - 1.0).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_examples() {
        assert_eq!(cross7(&basis7(1), &basis7(2)), basis7(3));
        assert_eq!(cross7(&basis7(2), &basis7(7)), basis7(5));
        let u = Vector7::from_fn(|i, _| (i as f64 + 1.0).sin());
        assert_eq!(cross7(&u, &u).norm(), 0.0);
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_eval(&basis7(1), &basis7(4), &basis7(5)), 1.0);
        assert_eq!(phi_eval(&basis7(1), &basis7(2), &basis7(4)), 0.0);
        assert_eq!(phi_eval(&basis7(2), &basis7(1), &basis7(3)), -1.0);
    }

    #[test]
    fn table_counts() {
        let t = EpsilonTable::standard();
        assert!(t.is_totally_antisymmetric());
        let nonzero = (1..=7)
            .flat_map(|i| (1..=7).flat_map(move |j| (1..=7).map(move |k| (i, j, k))))
            .filter(|&(i, j, k)| t.get(i, j, k) != 0)
            .count();
        assert_eq!(nonzero, 42);
        for b in BASE_TRIPLES {
            assert_eq!(t.get(b[0], b[1], b[2]), 1);
        }
    }

    #[test]
    fn conflicting_triples_rejected() {
        let r = EpsilonTable::from_signed_triples(&[([1, 2, 3], 1), ([2, 1, 3], 1)]);
        assert!(r.is_err());
        assert!(EpsilonTable::from_signed_triples(&[([1, 1, 3], 1)]).is_err());
        assert!(EpsilonTable::from_signed_triples(&[([1, 2, 8], 1)]).is_err());
    }

    #[test]
    fn flipped_table_stays_antisymmetric() {
        let t = EpsilonTable::standard().with_flipped_triple([2, 4, 6]);
        assert!(t.is_totally_antisymmetric());
        assert_eq!(t.get(2, 4, 6), -1);
        assert_eq!(t.get(6, 4, 2), 1);
    }

    #[test]
    fn b_form_standard_is_definite() {
        let (sig, vals) = b_form_signature(&ThreeForm7::standard());
        assert!(sig.is_definite());
        // B_φ = 6 g vol for the standard φ
        for v in vals {
            assert!((v - 6.0).abs() < 1e-12, "{vals:?}");
        }
        assert_eq!(
            b_form_signature(&ThreeForm7::zero()).0,
            Signature::Degenerate
        );
    }

    #[test]
    fn b_form_of_decomposable_form_is_degenerate() {
        let f = ThreeForm7::from_fn(|i, j, k| if (i, j, k) == (0, 1, 2) { 1.0 } else { 0.0 });
        assert!(f.is_alternating(0.0));
        assert_eq!(b_form_signature(&f).0, Signature::Degenerate);
    }

    #[test]
    fn triple_cross_examples() {
        let d = triple_cross4(Quaternion::I, Quaternion::J, Quaternion::K);
        assert_eq!(d, Quaternion([-1.0, 0.0, 0.0, 0.0]));
        let a = Quaternion::new(0.3, -1.2, 0.5, 2.0);
        let c = Quaternion::new(1.0, 0.1, -0.4, 0.7);
        assert_eq!(triple_cross4(a, a, c).max_abs(), 0.0);
    }

    #[test]
    fn quaternion_units() {
        assert_eq!(Quaternion::I * Quaternion::J, Quaternion::K);
        assert_eq!(Quaternion::J * Quaternion::K, Quaternion::I);
        assert_eq!(Quaternion::K * Quaternion::I, Quaternion::J);
        assert_eq!(Quaternion::I * Quaternion::I, -Quaternion::ONE);
    }

    #[test]
    fn associativity_examples() {
        let r = |a, b, c| associativity_residual(&basis7(a), &basis7(b), &basis7(c)).unwrap();
        assert_eq!(r(1, 2, 3), 0.0);
        assert_eq!(r(1, 4, 5), 0.0);
        assert_eq!(r(1, 2, 4), 1.0);
        // reversed orientation is anti-associative
        assert_eq!(r(2, 1, 3), 2.0);
        let rank_deficient =
            associativity_residual(&basis7(1), &basis7(2), &(basis7(1) * 2.0 + basis7(2)));
        assert!(matches!(rank_deficient, Err(Error::DegenerateInput(_))));
    }
}
