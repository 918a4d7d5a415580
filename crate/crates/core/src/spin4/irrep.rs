//! Concrete models of the Spin(4) = SU(2) × SU(2) representations
//! `U_{p,q} = Sym^p(C^2) ⊗ Sym^q(C^2)`.
//!
//! Lie-algebra generators are normalized as the quaternion units `i, j, k`
//! acting on `C^2`, so `[X_a, X_b] = 2 ε_abc X_c` and the Casimir
//! `−Σ X_a²` acts on `Sym^p(C^2)` by `p(p+2)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

const I: C64 = C64::new(0.0, 1.0);

/// Label `(p, q)` of the irreducible representation `U_{p,q}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IrrepLabel {
    pub p: usize,
    pub q: usize,
}

impl IrrepLabel {
    pub const fn new(p: usize, q: usize) -> Self {
        Self { p, q }
    }

    /// Validates signed indices, e.g. from user input.
    pub fn checked(p: i64, q: i64) -> Result<Self> {
        if p < 0 || q < 0 {
            return Err(Error::InvalidLabel { p, q });
        }
        Ok(Self {
            p: p as usize,
            q: q as usize,
        })
    }

    pub fn dim(self) -> usize {
        (self.p + 1) * (self.q + 1)
    }

    pub fn has_real_form(self) -> bool {
        self.p % 2 == self.q % 2
    }

    pub fn casimir_p(self) -> f64 {
        casimir_eigenvalue(self.p)
    }

    pub fn casimir_q(self) -> f64 {
        casimir_eigenvalue(self.q)
    }
}

impl std::fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// `n(n+2)`, the Casimir eigenvalue on `Sym^n(C^2)`.
pub fn casimir_eigenvalue(n: usize) -> f64 {
    (n * (n + 2)) as f64
}

/// A finite-dimensional complex representation of `su(2) ⊕ su(2)`, given by
/// three generator matrices for each factor.
#[derive(Clone, Debug)]
pub struct RepSpace {
    basis: Vec<String>,
    p_gens: [CMat; 3],
    q_gens: [CMat; 3],
    max_p: usize,
    max_q: usize,
    /// Matrix `C` of an antilinear real structure `v ↦ C v̄`.
    real_structure: Option<CMat>,
}

impl RepSpace {
    /// Wraps generator matrices. `max_p` / `max_q` bound the highest weights
    /// that can occur and determine the spectral projectors.
    pub fn from_generators(
        basis: Vec<String>,
        p_gens: [CMat; 3],
        q_gens: [CMat; 3],
        max_p: usize,
        max_q: usize,
    ) -> Self {
        let d = basis.len();
        for g in p_gens.iter().chain(q_gens.iter()) {
            assert_eq!(g.shape(), (d, d), "generator shape does not match basis");
        }
        Self {
            basis,
            p_gens,
            q_gens,
            max_p,
            max_q,
            real_structure: None,
        }
    }

    /// Complexification of a real representation.
    pub fn from_real_generators(
        basis: Vec<String>,
        p_gens: [DMatrix<f64>; 3],
        q_gens: [DMatrix<f64>; 3],
        max_p: usize,
        max_q: usize,
    ) -> Self {
        let d = basis.len();
        let lift = |m: &DMatrix<f64>| m.map(|x| C64::new(x, 0.0));
        let mut space = Self::from_generators(
            basis,
            p_gens.each_ref().map(lift),
            q_gens.each_ref().map(lift),
            max_p,
            max_q,
        );
        space.real_structure = Some(CMat::identity(d, d));
        space
    }

    pub fn with_real_structure(mut self, c: CMat) -> Self {
        assert_eq!(c.shape(), (self.dim(), self.dim()));
        self.real_structure = Some(c);
        self
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_labels(&self) -> &[String] {
        &self.basis
    }

    pub fn p_generators(&self) -> &[CMat; 3] {
        &self.p_gens
    }

    pub fn q_generators(&self) -> &[CMat; 3] {
        &self.q_gens
    }

    /// All six generators, first the p-factor then the q-factor.
    pub fn generators(&self) -> impl Iterator<Item = &CMat> {
        self.p_gens.iter().chain(self.q_gens.iter())
    }

    pub fn max_p(&self) -> usize {
        self.max_p
    }

    pub fn max_q(&self) -> usize {
        self.max_q
    }

    pub fn real_structure(&self) -> Option<&CMat> {
        self.real_structure.as_ref()
    }

    pub fn casimir_p(&self) -> CMat {
        casimir(&self.p_gens)
    }

    pub fn casimir_q(&self) -> CMat {
        casimir(&self.q_gens)
    }

    /// Largest violation of the bracket relations
    /// `[X_a, X_b] = 2 ε_abc X_c`, `[Y_a, Y_b] = 2 ε_abc Y_c`, `[X_a, Y_b] = 0`.
    pub fn bracket_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for gens in [&self.p_gens, &self.q_gens] {
            for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
                let lhs = commutator(&gens[a], &gens[b]);
                worst = worst.max((lhs - &gens[c] * C64::new(2.0, 0.0)).norm());
            }
        }
        for x in &self.p_gens {
            for y in &self.q_gens {
                worst = worst.max(commutator(x, y).norm());
            }
        }
        worst
    }
}

fn casimir(gens: &[CMat; 3]) -> CMat {
    let d = gens[0].nrows();
    let mut c = CMat::zeros(d, d);
    for g in gens {
        c -= g * g;
    }
    c
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Quaternion units as 2×2 complex matrices (`ij = k`).
pub fn spin_half_units() -> [CMat; 3] {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    [
        CMat::from_row_slice(2, 2, &[I, z, z, -I]),
        CMat::from_row_slice(2, 2, &[z, one, -one, z]),
        CMat::from_row_slice(2, 2, &[z, I, I, z]),
    ]
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Action of a 2×2 Lie-algebra element `X` on `Sym^n(C^2)` through
/// `(A·f)(z) = f(Aᵀ z)`, in the unitary basis `z1^{n−r} z2^r / √((n−r)! r!)`.
pub fn sym_power_generator(x: &CMat, n: usize) -> CMat {
    let d = n + 1;
    let mut m = CMat::zeros(d, d);
    let norm = |r: usize| (factorial(n - r) * factorial(r)).sqrt();
    for r in 0..d {
        // column for monomial z1^a z2^b with a = n - r, b = r
        let (a, b) = ((n - r) as f64, r as f64);
        // unnormalized image: (a X11 + b X22) m(a,b) + a X21 m(a-1,b+1) + b X12 m(a+1,b-1)
        let src = norm(r);
        m[(r, r)] += x[(0, 0)] * a + x[(1, 1)] * b;
        if r < n {
            m[(r + 1, r)] += x[(1, 0)] * a * (norm(r + 1) / src);
        }
        if r > 0 {
            m[(r - 1, r)] += x[(0, 1)] * b * (norm(r - 1) / src);
        }
    }
    m
}

/// Antilinear quaternionic structure on `Sym^n(C^2)` induced by
/// `(z1, z2) ↦ (−z̄2, z̄1)`; it squares to `(−1)^n`.
pub fn sym_power_structure(n: usize) -> CMat {
    let d = n + 1;
    let mut c = CMat::zeros(d, d);
    for r in 0..d {
        // z1^{n-r} z2^r ↦ (−1)^r z1^r z2^{n-r}
        let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
        c[(n - r, r)] = C64::new(sign, 0.0);
    }
    c
}

fn monomial_labels(n: usize, v1: &str, v2: &str) -> Vec<String> {
    (0..=n)
        .map(|r| format!("{v1}^{}{v2}^{}", n - r, r))
        .collect()
}

/// Builds `U_{p,q}` on its monomial weight basis.
pub fn build_irrep(label: IrrepLabel) -> RepSpace {
    let units = spin_half_units();
    let (p, q) = (label.p, label.q);
    let ip = CMat::identity(p + 1, p + 1);
    let iq = CMat::identity(q + 1, q + 1);
    let p_gens = units
        .each_ref()
        .map(|u| kron(&sym_power_generator(u, p), &iq));
    let q_gens = units
        .each_ref()
        .map(|u| kron(&ip, &sym_power_generator(u, q)));
    let mut basis = Vec::with_capacity(label.dim());
    for a in monomial_labels(p, "z1", "z2") {
        for b in monomial_labels(q, "w1", "w2") {
            basis.push(format!("{a}⊗{b}"));
        }
    }
    let mut space = RepSpace::from_generators(basis, p_gens, q_gens, p, q);
    if label.has_real_form() {
        space.real_structure = Some(kron(&sym_power_structure(p), &sym_power_structure(q)));
    }
    space
}

/// Validating entry point for signed labels.
pub fn build_irrep_checked(p: i64, q: i64) -> Result<RepSpace> {
    Ok(build_irrep(IrrepLabel::checked(p, q)?))
}

/// Tensor product with the Leibniz-rule action.
pub fn tensor(a: &RepSpace, b: &RepSpace) -> RepSpace {
    let ia = CMat::identity(a.dim(), a.dim());
    let ib = CMat::identity(b.dim(), b.dim());
    let leibniz = |ga: &CMat, gb: &CMat| kron(ga, &ib) + kron(&ia, gb);
    let p_gens = std::array::from_fn(|k| leibniz(&a.p_gens[k], &b.p_gens[k]));
    let q_gens = std::array::from_fn(|k| leibniz(&a.q_gens[k], &b.q_gens[k]));
    let mut basis = Vec::with_capacity(a.dim() * b.dim());
    for x in &a.basis {
        for y in &b.basis {
            basis.push(format!("({x})⊗({y})"));
        }
    }
    let real_structure = match (&a.real_structure, &b.real_structure) {
        (Some(ca), Some(cb)) => Some(kron(ca, cb)),
        _ => None,
    };
    RepSpace {
        basis,
        p_gens,
        q_gens,
        max_p: a.max_p + b.max_p,
        max_q: a.max_q + b.max_q,
        real_structure,
    }
}

/// Tensor product of several spaces, left to right.
pub fn tensor_all(spaces: &[&RepSpace]) -> RepSpace {
    let mut it = spaces.iter();
    let first = (*it.next().expect("at least one space")).clone();
    it.fold(first, |acc, s| tensor(&acc, s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eigenvalues(m: &CMat) -> Vec<f64> {
        // Casimirs are Hermitian in the unitary basis
        let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
        let mut v: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn trivial_irrep() {
        let u = build_irrep(IrrepLabel::new(0, 0));
        assert_eq!(u.dim(), 1);
        assert!(u.generators().all(|g| g.norm() == 0.0));
    }

    #[test]
    fn dimensions() {
        assert_eq!(build_irrep(IrrepLabel::new(1, 4)).dim(), 10);
        assert_eq!(IrrepLabel::new(1, 4).dim(), 10);
    }

    #[test]
    fn negative_label_rejected() {
        assert!(matches!(
            build_irrep_checked(-1, 2),
            Err(Error::InvalidLabel { .. })
        ));
        assert!(build_irrep_checked(2, 0).is_ok());
    }

    #[test]
    fn casimir_pair_of_u01() {
        let u = build_irrep(IrrepLabel::new(0, 1));
        let cp = eigenvalues(&u.casimir_p());
        let cq = eigenvalues(&u.casimir_q());
        assert_eq!(cp.len(), 2);
        for v in cp {
            assert!(v.abs() < 1e-12);
        }
        for v in cq {
            assert!((v - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn irreps_satisfy_brackets_and_are_unitary() {
        for p in 0..5 {
            for q in 0..5 {
                let u = build_irrep(IrrepLabel::new(p, q));
                assert!(u.bracket_defect() < 1e-12, "({p},{q})");
                for g in u.generators() {
                    assert!((g + g.adjoint()).norm() < 1e-12);
                }
                let cq = eigenvalues(&u.casimir_q());
                assert!(cq.iter().all(|v| (v - casimir_eigenvalue(q)).abs() < 1e-10));
                let cp = eigenvalues(&u.casimir_p());
                assert!(cp.iter().all(|v| (v - casimir_eigenvalue(p)).abs() < 1e-10));
            }
        }
    }

    #[test]
    fn tensor_casimir_spectrum() {
        let t = tensor(
            &build_irrep(IrrepLabel::new(0, 1)),
            &build_irrep(IrrepLabel::new(1, 4)),
        );
        assert_eq!(t.dim(), 20);
        assert!(t.bracket_defect() < 1e-12);
        let cq = eigenvalues(&t.casimir_q());
        let mut distinct: Vec<f64> = Vec::new();
        for v in cq {
            if !distinct.iter().any(|d| (d - v).abs() < 1e-8) {
                distinct.push(v);
            }
        }
        distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(distinct.len(), 2);
        assert!((distinct[0] - 15.0).abs() < 1e-10);
        assert!((distinct[1] - 35.0).abs() < 1e-10);
    }
}
