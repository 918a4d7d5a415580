//! The algebra and representation self-check suites.

use std::fmt::Write as _;

use assoc_core::g2::{
    b_form_signature, basis7, triple_cross4, EpsilonTable, Quaternion, Vector7, BASE_TRIPLES,
};
use assoc_core::spin4::irrep::{build_irrep, tensor, CMat, IrrepLabel, C64};
use assoc_core::spin4::{
    build_isomorphism_f, clifford_map, decomposition_ranks, isotypic_decomposition,
    isotypic_projector, CliffordSign, StabilizerModel,
};
use nalgebra::{DVector, Matrix4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

const RANDOM_SAMPLES: usize = 1000;
const CLIFFORD_SAMPLES: usize = 100;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CheckSuite {
    pub checks: Vec<Check>,
}

impl CheckSuite {
    fn push(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    /// `value < bound`, with the value reported.
    fn below(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        self.push(
            name,
            value < bound,
            format!("{value:.3e} (bound {bound:.0e})"),
        );
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let mark = if c.pass { "ok  " } else { "FAIL" };
            writeln!(s, "{mark} {}: {}", c.name, c.detail).unwrap();
        }
        s
    }
}

/// `ε_ijk` straight from the list of base triples (1-based).
fn reference_epsilon(i: usize, j: usize, k: usize) -> i32 {
    for t in BASE_TRIPLES {
        for (p, sign) in [
            ([0, 1, 2], 1),
            ([1, 2, 0], 1),
            ([2, 0, 1], 1),
            ([1, 0, 2], -1),
            ([0, 2, 1], -1),
            ([2, 1, 0], -1),
        ] {
            if [t[p[0]], t[p[1]], t[p[2]]] == [i, j, k] {
                return sign;
            }
        }
    }
    0
}

fn random7(rng: &mut ChaCha8Rng) -> Vector7 {
    Vector7::from_fn(|_, _| rng.random_range(-1.0..1.0))
}

fn random4(rng: &mut ChaCha8Rng) -> Quaternion {
    Quaternion(std::array::from_fn(|_| rng.random_range(-1.0..1.0)))
}

/// Exact and random-sample identities of the cross product built from `table`.
pub fn algebra_suite(table: &EpsilonTable, seed: u64) -> CheckSuite {
    let mut suite = CheckSuite::default();
    suite.push(
        "epsilon table is totally antisymmetric",
        table.is_totally_antisymmetric(),
        "",
    );

    let mut mismatches = Vec::new();
    for i in 1..=7 {
        for j in 1..=7 {
            let int = table.cross_basis(i, j);
            let float = table.cross(&basis7(i), &basis7(j));
            for k in 1..=7 {
                let want = reference_epsilon(i, j, k);
                if int[k - 1] != want || float[k - 1] != want as f64 {
                    mismatches.push(format!(
                        "<e{i} x e{j}, e{k}> = {}, expected {want}",
                        int[k - 1]
                    ));
                }
            }
        }
    }
    let detail = match mismatches.first() {
        None => "343 integer values agree".to_string(),
        Some(first) => format!("{} mismatches, first {first}", mismatches.len()),
    };
    suite.push(
        "<e_i x e_j, e_k> = epsilon_ijk",
        mismatches.is_empty(),
        detail,
    );

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut orth, mut lagrange, mut pairing) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..RANDOM_SAMPLES {
        let (u, v, w) = (random7(&mut rng), random7(&mut rng), random7(&mut rng));
        let c = table.cross(&u, &v);
        orth = orth.max(c.dot(&u).abs()).max(c.dot(&v).abs());
        lagrange = lagrange.max(
            (c.norm_squared() - (u.norm_squared() * v.norm_squared() - u.dot(&v).powi(2))).abs(),
        );
        pairing = pairing.max((table.phi(&u, &v, &w) - c.dot(&w)).abs());
    }
    suite.below("<u x v, u> = 0 on 1000 random pairs", orth, 1e-12);
    suite.below(
        "|u x v|^2 = |u|^2 |v|^2 - <u,v>^2 on 1000 random pairs",
        lagrange,
        1e-12,
    );
    suite.below(
        "phi(u,v,w) = <u x v, w> on 1000 random triples",
        pairing,
        1e-12,
    );

    let (mut det, mut quat) = (0.0f64, 0.0f64);
    for _ in 0..RANDOM_SAMPLES {
        let (a, b, c, x) = (
            random4(&mut rng),
            random4(&mut rng),
            random4(&mut rng),
            random4(&mut rng),
        );
        let m = Matrix4::from_columns(&[a.0.into(), b.0.into(), c.0.into(), x.0.into()]);
        det = det.max((triple_cross4(a, b, c).dot(x) - m.determinant()).abs());
        quat = quat
            .max(((a * b) * c - a * (b * c)).max_abs())
            .max(((a * b).norm() - a.norm() * b.norm()).abs());
    }
    suite.below(
        "triple cross product matches the 4x4 determinant",
        det,
        1e-12,
    );
    suite.below(
        "quaternion product is associative and norm-multiplicative",
        quat,
        1e-12,
    );

    let (sig, eig) = b_form_signature(&table.three_form());
    suite.push(
        "B_phi is definite",
        sig.is_definite(),
        format!(
            "{sig:?}, eigenvalues in [{:.3}, {:.3}]",
            eig.iter().copied().fold(f64::INFINITY, f64::min),
            eig.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        ),
    );
    suite
}

fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

fn rank(m: &CMat) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.max();
    sv.iter().filter(|s| **s > 1e-9 * top.max(1.0)).count()
}

fn format_ranks(r: &[(IrrepLabel, usize)]) -> String {
    r.iter()
        .map(|(l, m)| format!("({},{}):{m}", l.p, l.q))
        .collect::<Vec<_>>()
        .join(" ")
}

fn lbl(p: usize, q: usize) -> IrrepLabel {
    IrrepLabel::new(p, q)
}

/// Clebsch–Gordan ranks, Schur vanishing of Clifford multiplication, the
/// stabilizer model, and the isomorphism `F`.
pub fn rep_suite(seed: u64) -> CheckSuite {
    let mut suite = CheckSuite::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut casimir = 0.0f64;
    for q in [1, 3, 5, 7] {
        let c = build_irrep(lbl(1, q)).casimir_q();
        let eig = c.symmetric_eigen().eigenvalues;
        let want = (q * (q + 2)) as f64;
        casimir = casimir.max(eig.iter().map(|e| (e - want).abs()).fold(0.0, f64::max));
    }
    suite.below(
        "q-Casimir on W_{1,1}, W_{1,3}, W_{1,5}, W_{1,7} is 3, 15, 35, 63",
        casimir,
        1e-10,
    );

    let u01 = build_irrep(lbl(0, 1));
    let s14 = tensor(&u01, &build_irrep(lbl(1, 4)));
    let p15 = isotypic_projector(&s14, lbl(1, 5));
    let p13 = isotypic_projector(&s14, lbl(1, 3));
    suite.push(
        "U_{0,1} x U_{1,4}: rank P_{1,5} = 12",
        p15.rank == 12,
        format!("rank {}", p15.rank),
    );
    suite.push(
        "U_{0,1} x U_{1,4}: rank P_{1,3} = 8",
        p13.rank == 8,
        format!("rank {}", p13.rank),
    );
    let id = CMat::identity(20, 20);
    suite.below(
        "U_{0,1} x U_{1,4}: |P_{1,5} + P_{1,3} - Id|",
        (&p15.matrix + &p13.matrix - &id).norm(),
        1e-10,
    );
    let p33 = isotypic_projector(&s14, lbl(3, 3));
    suite.push(
        "U_{0,1} x U_{1,4}: rank P_{3,3} = 0",
        p33.rank == 0 && p33.matrix.norm() == 0.0,
        format!("rank {}", p33.rank),
    );
    let s10 = tensor(&u01, &build_irrep(lbl(1, 0)));
    let p11 = isotypic_projector(&s10, lbl(1, 1));
    suite.below(
        "U_{0,1} x U_{1,0}: |P_{1,1} - Id|",
        (p11.matrix - CMat::identity(4, 4)).norm(),
        1e-10,
    );

    let model = StabilizerModel::new();
    suite.below(
        "stabilizer generators annihilate phi",
        model.phi_annihilation_defect(),
        1e-12,
    );
    suite.below("stabilizer generators are skew", model.skew_defect(), 1e-12);

    let expected = vec![
        (lbl(1, 1), 1),
        (lbl(1, 3), 2),
        (lbl(1, 5), 2),
        (lbl(1, 7), 1),
    ];
    let real60 = model.cotangent_sym2_0_normal_space();
    let r = decomposition_ranks(&real60);
    suite.push(
        "T* x Sym2_0 x N decomposes as (1,7) + 2(1,5) + 2(1,3) + (1,1)",
        r == expected,
        format_ranks(&r),
    );

    for sign in [CliffordSign::Negative, CliffordSign::Positive] {
        let cl = clifford_map(sign);
        let tag = format!("{sign:?}");
        let r = decomposition_ranks(&cl.domain);
        let dims: usize = r.iter().map(|(l, m)| l.dim() * m).sum();
        suite.push(
            format!(
                "[{tag}] domain decomposes as (1,7) + 2(1,5) + 2(1,3) + (1,1), 60 = 16+24+16+4"
            ),
            r == expected && dims == 60 && cl.domain.dim() == 60,
            format!("{} (total {dims})", format_ranks(&r)),
        );

        let projectors = isotypic_decomposition(&cl.domain);
        let n = cl.domain.dim();
        let mut sum = CMat::zeros(n, n);
        let (mut idem, mut equiv) = (0.0f64, 0.0f64);
        for (a, pa) in projectors.iter().enumerate() {
            sum += &pa.matrix;
            for (b, pb) in projectors.iter().enumerate() {
                let target = if a == b {
                    pa.matrix.clone()
                } else {
                    CMat::zeros(n, n)
                };
                idem = idem.max((&pa.matrix * &pb.matrix - target).norm());
            }
            for g in cl.domain.generators() {
                equiv = equiv.max((&pa.matrix * g - g * &pa.matrix).norm());
            }
        }
        suite.below(
            format!("[{tag}] projectors sum to Id"),
            (sum - CMat::identity(n, n)).norm(),
            1e-10,
        );
        suite.below(
            format!("[{tag}] projectors are orthogonal idempotents"),
            idem,
            1e-10,
        );
        suite.below(
            format!("[{tag}] projectors commute with the action"),
            equiv,
            1e-10,
        );

        let sgn = if sign == CliffordSign::Negative {
            1.0
        } else {
            -1.0
        };
        let gens: Vec<CMat> = (0..3)
            .map(|a| assoc_core::spin4::clifford::clifford_generator(a, sign))
            .collect();
        let mut relation = 0.0f64;
        for _ in 0..CLIFFORD_SAMPLES {
            let alpha: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let sigma = DVector::from_fn(2, |_, _| {
                C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            let m = (0..3).fold(CMat::zeros(2, 2), |acc, a| {
                acc + &gens[a] * C64::new(alpha[a], 0.0)
            });
            let n2: f64 = alpha.iter().map(|x| x * x).sum();
            relation = relation.max((&m * (&m * &sigma) + &sigma * C64::new(sgn * n2, 0.0)).norm());
        }
        suite.below(
            format!("[{tag}] Clifford relation on 100 random (alpha, sigma)"),
            relation,
            1e-12,
        );

        let rk = rank(&cl.matrix);
        suite.push(
            format!("[{tag}] rank cl = 20"),
            rk == 20,
            format!("rank {rk}"),
        );
        for (p, q, vanish) in [(1, 7, true), (1, 1, true), (1, 5, false), (1, 3, false)] {
            let norm = op_norm(&(&cl.matrix * isotypic_projector(&cl.domain, lbl(p, q)).matrix));
            if vanish {
                suite.below(format!("[{tag}] |cl o P_{{{p},{q}}}|"), norm, 1e-10);
            } else {
                suite.push(
                    format!("[{tag}] cl o P_{{{p},{q}}} is nonzero"),
                    norm > 1e-3,
                    format!("{norm:.3e}"),
                );
            }
        }
    }

    match build_isomorphism_f() {
        Ok(f) => {
            suite.below("F is equivariant", f.equivariance_defect(), 1e-10);
            let smin = f.smallest_singular_value();
            suite.push(
                "F is invertible",
                smin > 1e-6,
                format!("smallest singular value {smin:.3e}"),
            );
            let conj = f.matrix.clone().try_inverse().map(|inv| {
                [lbl(1, 5), lbl(1, 3)]
                    .into_iter()
                    .map(|l| {
                        let pd = isotypic_projector(&f.domain, l).matrix;
                        let pc = isotypic_projector(&f.codomain, l).matrix;
                        (&f.matrix * pd * &inv - pc).norm()
                    })
                    .fold(0.0, f64::max)
            });
            suite.below(
                "F maps W_{1,5} onto E_{1,5} and W_{1,3} onto E_{1,3}",
                conj.unwrap_or(f64::INFINITY),
                1e-9,
            );
        }
        Err(e) => suite.push("F is equivariant", false, e.to_string()),
    }
    suite
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_epsilon_agrees_with_the_table() {
        let t = EpsilonTable::standard();
        for i in 1..=7 {
            for j in 1..=7 {
                for k in 1..=7 {
                    assert_eq!(reference_epsilon(i, j, k), t.get(i, j, k) as i32);
                }
            }
        }
    }

    #[test]
    fn flipped_table_fails_on_the_structure_constants() {
        let s = algebra_suite(&EpsilonTable::standard().with_flipped_triple([2, 4, 6]), 0);
        let first = s.first_failure().unwrap();
        assert!(first.name.contains("<e_i x e_j, e_k>"));
        assert!(first.detail.contains("6 mismatches"));
    }
}
