#![allow(clippy::needless_range_loop)]

use assoc_core::g2::{associativity_residual, triple_cross4, Quaternion, Vector7};
use assoc_core::geom::{evaluate_point, jet, EvalOptions, ImmersionPatch};
use assoc_core::hl::solver::{interior_indices, jacobian_apply, TRIPLE_SIGN};
use assoc_core::hl::*;
use assoc_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_quaternion(rng: &mut ChaCha8Rng, scale: f64) -> Quaternion {
    Quaternion(std::array::from_fn(|_| rng.random_range(-scale..scale)))
}

#[test]
fn constant_graph_has_zero_residual() {
    let c = Quaternion::new(0.3, -1.0, 2.0, 0.5);
    let g = GraphGrid::from_fn([0.0; 3], [1.0; 3], 6, |_| c);
    assert!(dirac_residual(&g).iter().all(|q| q.max_abs() == 0.0));
}

#[test]
fn linear_graph_residual_is_i() {
    let g = GraphGrid::from_fn([0.0; 3], [1.0; 3], 5, |x| Quaternion::ONE * x[0]);
    for q in dirac_residual(&g) {
        assert!((q - Quaternion::I).max_abs() < 1e-14);
    }
}

#[test]
fn zero_boundary_is_solved_immediately() {
    let out = solve_unit_box(
        &BoundaryData::new(BoundaryFamily::Zero, 0.0),
        17,
        &SolverConfig::default(),
    )
    .unwrap();
    assert!(out.iterations <= 1);
    assert_eq!(out.grid.max_abs(), 0.0);
}

#[test]
fn sincos_boundary_converges() {
    let b = BoundaryData::new(BoundaryFamily::Sincos, 0.1);
    let out = solve_unit_box(&b, 17, &SolverConfig::default()).unwrap();
    assert!(out.iterations <= 10, "{:?}", out.history);
    assert!(out.residual() < 1e-8);
    assert!(!out.continuation_used);
    assert_eq!(
        out.grid.boundary_mismatch(&GraphGrid::unit_box(17, &b)),
        0.0
    );
}

#[test]
fn newton_converges_quadratically() {
    let b = BoundaryData::new(BoundaryFamily::HolomorphicExp, 0.5);
    let out = solve_unit_box(&b, 17, &SolverConfig::default()).unwrap();
    let h = &out.history;
    assert!(h.len() >= 3, "{h:?}");
    for k in h.len() - 3..h.len() - 1 {
        let ratio = h[k + 1] / (h[k] * h[k]);
        assert!(ratio < 1.0, "r_{{k+1}}/r_k² = {ratio} in {h:?}");
    }
}

#[test]
fn large_amplitude_without_continuation_diverges() {
    let b = BoundaryData::new(BoundaryFamily::Sincos, 10.0);
    let config = SolverConfig {
        continuation: false,
        ..SolverConfig::default()
    };
    match solve_unit_box(&b, 17, &config) {
        Err(Error::Diverged {
            iterations,
            history,
        }) => {
            assert_eq!(history.len(), iterations + 1);
            assert!(history.last().unwrap() > &1.0);
        }
        other => panic!("expected divergence, got {:?}", other.map(|o| o.history)),
    }
}

#[test]
fn even_cell_count_is_singular() {
    let b = BoundaryData::new(BoundaryFamily::Holomorphic, 0.1);
    assert!(matches!(
        solve_unit_box(&b, 16, &SolverConfig::default()),
        Err(Error::LinearSolve(_))
    ));
}

#[test]
fn invalid_configs_are_rejected() {
    let b = BoundaryData::new(BoundaryFamily::Zero, 0.0);
    for bad in [
        SolverConfig {
            tolerance: 0.0,
            ..SolverConfig::default()
        },
        SolverConfig {
            max_iterations: 0,
            ..SolverConfig::default()
        },
        SolverConfig {
            damping: 1.5,
            ..SolverConfig::default()
        },
        SolverConfig {
            scheme_order: 4,
            ..SolverConfig::default()
        },
    ] {
        assert!(matches!(
            solve_unit_box(&b, 9, &bad),
            Err(Error::InvalidConfig(_))
        ));
    }
    assert!(matches!(
        solve_unit_box(&b, 2, &SolverConfig::default()),
        Err(Error::InvalidConfig(_))
    ));
}

#[test]
fn holomorphic_families_are_exact_solutions() {
    // Central differences are exact on quadratics, so the discrete solution
    // coincides with the analytic one.
    let b = BoundaryData::new(BoundaryFamily::Holomorphic, 0.1);
    let exact = GraphGrid::from_fn([0.0; 3], [1.0; 3], 17, |x| b.value(x));
    assert!(residual_sup_norm(&exact) < 1e-15);
    let out = solve_unit_box(&b, 17, &SolverConfig::default()).unwrap();
    let err = out
        .grid
        .values
        .iter()
        .zip(&exact.values)
        .map(|(p, q)| (*p - *q).max_abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-10);
    for fam in [BoundaryFamily::Affine, BoundaryFamily::HolomorphicExp] {
        let b = BoundaryData::new(fam, 0.3);
        let fine = GraphGrid::from_fn([0.0; 3], [1.0; 3], 33, |x| b.value(x));
        // O(h²) consistency of the non-polynomial family.
        assert!(residual_sup_norm(&fine) < 1e-2, "{fam}");
    }
}

/// Smooth non-solution with closed-form residual `i f₁ + j f₂`.
fn sincos_residual_error(n: usize) -> f64 {
    let b = BoundaryData::new(BoundaryFamily::Sincos, 0.1);
    let g = GraphGrid::from_fn([0.0; 3], [1.0; 3], n, |x| b.value(x));
    let r = dirac_residual(&g);
    let pi = std::f64::consts::PI;
    let mut worst = 0.0f64;
    let mut m = 0;
    for i in 1..n {
        for j in 1..n {
            for _k in 1..n {
                let x = g.node(i, j, 0);
                let f1 = Quaternion::new(0.1 * pi * (pi * x[0]).cos(), 0.0, 0.0, 0.0);
                let f2 = Quaternion::new(0.0, -0.1 * pi * (pi * x[1]).sin(), 0.0, 0.0);
                let exact = Quaternion::I * f1
                    + Quaternion::J * f2
                    + triple_cross4(f1, f2, Quaternion::ZERO);
                worst = worst.max((r[m] - exact).max_abs());
                m += 1;
            }
        }
    }
    worst
}

#[test]
fn residual_converges_at_second_order() {
    let errs: Vec<f64> = [8, 16, 32].into_iter().map(sincos_residual_error).collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 2.0).abs() < 0.3, "observed order {order}");
    }
}

#[test]
fn jacobian_matches_directional_derivative() {
    let b = BoundaryData::new(BoundaryFamily::Sincos, 0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let base = GraphGrid::from_fn([0.0; 3], [1.0; 3], 7, |x| {
        b.value(x) + Quaternion::ONE * (x[0] * x[1])
    });
    let interior = interior_indices(&base);
    let v: Vec<f64> = (0..4 * interior.len())
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    let shifted = |s: f64| {
        let mut g = base.clone();
        for (m, &idx) in interior.iter().enumerate() {
            g.values[idx] = g.values[idx]
                + Quaternion([v[4 * m], v[4 * m + 1], v[4 * m + 2], v[4 * m + 3]]) * s;
        }
        dirac_residual(&g)
    };
    let eps = 1e-5;
    let (plus, minus) = (shifted(eps), shifted(-eps));
    let fd: Vec<f64> = plus
        .iter()
        .zip(&minus)
        .flat_map(|(p, m)| ((*p - *m) * (0.5 / eps)).0)
        .collect();
    let jv = jacobian_apply(&base, &interior, &v);
    let err = jv
        .iter()
        .zip(&fd)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-7, "{err}");
}

#[test]
fn gmres_solves_small_nonsymmetric_system() {
    let a = [[4.0, 1.0, 0.0], [-2.0, 3.0, 1.0], [0.5, 0.0, 2.0]];
    let x_true = [1.0, -2.0, 0.5];
    let apply = |v: &[f64]| {
        (0..3)
            .map(|i| (0..3).map(|j| a[i][j] * v[j]).sum())
            .collect::<Vec<f64>>()
    };
    let b = apply(&x_true);
    let out = gmres(apply, &b, 2, 1e-14, 100);
    for i in 0..3 {
        assert!((out.x[i] - x_true[i]).abs() < 1e-12);
    }
}

#[test]
fn grid_file_roundtrip_and_errors() {
    let b = BoundaryData::new(BoundaryFamily::Holomorphic, 0.1);
    let g = GraphGrid::from_fn([0.0, -1.0, 2.0], [1.0, 0.5, 3.0], 4, |x| b.value(x));
    let mut buf = Vec::new();
    g.write_to(&mut buf, 1.5e-12).unwrap();
    let (back, res) = GraphGrid::read_from(buf.as_slice()).unwrap();
    assert_eq!(back, g);
    assert_eq!(res, 1.5e-12);

    let text = String::from_utf8(buf).unwrap();
    let truncated: String = text.lines().take(10).map(|l| format!("{l}\n")).collect();
    assert!(matches!(
        GraphGrid::read_from(truncated.as_bytes()),
        Err(Error::GridFormat(_))
    ));
    let bad_header = text.replacen("box", "bx", 1);
    assert!(matches!(
        GraphGrid::read_from(bad_header.as_bytes()),
        Err(Error::GridFormat(_))
    ));
    let nan = text.replacen("residual 1.5e-12", "residual NaN", 1);
    assert!(matches!(
        GraphGrid::read_from(nan.as_bytes()),
        Err(Error::GridFormat(_))
    ));
    let extra = format!("{text}1 2 3 4\n");
    assert!(matches!(
        GraphGrid::read_from(extra.as_bytes()),
        Err(Error::GridFormat(_))
    ));
}

#[test]
fn boundary_family_names_roundtrip() {
    for f in BoundaryFamily::ALL {
        assert_eq!(f.name().parse::<BoundaryFamily>().unwrap(), f);
    }
    assert!("nope".parse::<BoundaryFamily>().is_err());
}

#[test]
fn spline_reproduces_cubics() {
    let p = |x: [f64; 3]| {
        Quaternion::new(
            x[0].powi(3) - 2.0 * x[1] * x[2],
            x[0] * x[1] * x[2],
            x[2].powi(3) + x[1] * x[1],
            1.0 + x[0] * x[2] * x[2],
        )
    };
    let g = GraphGrid::from_fn([-1.0, 0.0, 0.5], [1.0, 2.0, 1.5], 6, p);
    let s = TensorSpline::new(&g).unwrap();
    let x = [0.137, 1.21, 0.93];
    let d = s.derivatives(x);
    assert!((d[0][0][0] - p(x)).max_abs() < 1e-12);
    // ∂x0³ of the first component is 6, ∂x0∂x1∂x2 of the second is 1
    assert!((d[3][0][0].0[0] - 6.0).abs() < 1e-9);
    assert!((d[1][1][1].0[1] - 1.0).abs() < 1e-9);
    assert!((d[0][0][2].0[3] - 2.0 * x[0]).abs() < 1e-9);
    assert!((d[0][2][0].0[2] - 2.0).abs() < 1e-9);
}

#[test]
fn constant_grid_gives_flat_patch() {
    let c = Quaternion::new(0.2, 0.1, -0.3, 0.4);
    let g = GraphGrid::from_fn([0.0; 3], [1.0; 3], 5, |_| c);
    let p = graph_to_patch(&g, 1e-12).unwrap();
    let e = evaluate_point(&p, [0.5, 0.5, 0.5], &EvalOptions::new(1e-9)).unwrap();
    assert!(e.associativity_residual < 1e-15);
    assert!(e.sff_norm < 1e-12);
}

#[test]
fn unconverged_grid_is_refused() {
    let b = BoundaryData::new(BoundaryFamily::Sincos, 0.1);
    let g = GraphGrid::unit_box(9, &b);
    assert!(matches!(
        graph_to_patch(&g, 1e-8),
        Err(Error::Unconverged { .. })
    ));
}

#[test]
fn patch_domain_excludes_outer_cells() {
    let g = GraphGrid::from_fn([0.0; 3], [1.0; 3], 5, |_| Quaternion::ZERO);
    let p = graph_to_patch(&g, 1.0).unwrap();
    assert!(jet(&p, [0.1, 0.5, 0.5]).is_err());
    assert!(jet(&p, [0.3, 0.5, 0.5]).is_ok());
}

/// Solves `Σ e_a A_a + σ A₁×A₂×A₃ = 0` for `A₁` by fixed-point iteration.
fn complete_left(a2: Quaternion, a3: Quaternion, sigma: f64) -> Quaternion {
    let mut a1 = Quaternion::ZERO;
    for _ in 0..200 {
        let rest = Quaternion::J * a2 + Quaternion::K * a3 + triple_cross4(a1, a2, a3) * sigma;
        a1 = Quaternion::I * rest;
    }
    a1
}

fn complete_right(a2: Quaternion, a3: Quaternion, sigma: f64) -> Quaternion {
    let mut a1 = Quaternion::ZERO;
    for _ in 0..200 {
        let rest = a2 * Quaternion::J + a3 * Quaternion::K + triple_cross4(a1, a2, a3) * sigma;
        a1 = rest * Quaternion::I;
    }
    a1
}

/// Tangent plane of a graph with differential `A`, normal coordinates from `embed`.
fn plane_residual(a: [Quaternion; 3], embed: impl Fn(Quaternion) -> [f64; 4]) -> f64 {
    let t: [Vector7; 3] = std::array::from_fn(|i| {
        let n = embed(a[i]);
        let mut v = Vector7::zeros();
        v[i] = 1.0;
        for r in 0..4 {
            v[3 + r] = n[r];
        }
        v
    });
    associativity_residual(&t[0], &t[1], &t[2]).unwrap()
}

#[test]
fn calibration_of_the_graph_equation() {
    // With left multiplication and the normal identification used for graph
    // patches, the pointwise equation is exactly the associativity of the
    // tangent plane when the triple product enters with a minus sign.
    let conj_embed = assoc_core::spin4::stabilizer::quaternion_to_normal;
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let a2 = random_quaternion(&mut rng, 0.5);
        let a3 = random_quaternion(&mut rng, 0.5);
        let good = complete_left(a2, a3, TRIPLE_SIGN);
        let r = Quaternion::I * good
            + Quaternion::J * a2
            + Quaternion::K * a3
            + triple_cross4(good, a2, a3) * TRIPLE_SIGN;
        assert!(r.max_abs() < 1e-14);
        assert!(plane_residual([good, a2, a3], conj_embed) < 1e-13);
        let wrong_sign = complete_left(a2, a3, -TRIPLE_SIGN);
        assert!(plane_residual([wrong_sign, a2, a3], conj_embed) > 1e-6);
        // Reading the normal coordinates without conjugation breaks it as well.
        assert!(plane_residual([good, a2, a3], |q| q.0) > 1e-3);
    }
}

#[test]
fn right_multiplication_needs_a_different_embedding() {
    // Σ A_a e_a − A₁×A₂×A₃ = 0 matches associativity when the normal space is
    // read as (q0, q1, q2, −q3).
    let flip_last = |q: Quaternion| [q.0[0], q.0[1], q.0[2], -q.0[3]];
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..20 {
        let a2 = random_quaternion(&mut rng, 0.5);
        let a3 = random_quaternion(&mut rng, 0.5);
        let good = complete_right(a2, a3, TRIPLE_SIGN);
        assert!(plane_residual([good, a2, a3], flip_last) < 1e-13);
        assert!(
            plane_residual(
                [good, a2, a3],
                assoc_core::spin4::stabilizer::quaternion_to_normal
            ) > 1e-3
        );
    }
}

fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let rank = |v: &[f64]| {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
        let mut r = vec![0.0; v.len()];
        for (pos, &i) in idx.iter().enumerate() {
            r[i] = pos as f64;
        }
        r
    };
    let (ra, rb) = (rank(a), rank(b));
    let n = a.len() as f64;
    let d2: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - y).powi(2)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

#[test]
fn dirac_and_geometric_residuals_vanish_together() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut dirac = Vec::new();
    let mut geometric = Vec::new();
    for _ in 0..20 {
        let eps = 10f64.powf(rng.random_range(-3.0..-0.5));
        let coef: Vec<Quaternion> = (0..9).map(|_| random_quaternion(&mut rng, 1.0)).collect();
        let f = |x: [f64; 3]| {
            let mono = [
                x[0],
                x[1],
                x[2],
                x[0] * x[0],
                x[1] * x[1],
                x[2] * x[2],
                x[0] * x[1],
                x[1] * x[2],
                x[0] * x[2],
            ];
            coef.iter()
                .zip(mono)
                .fold(Quaternion::ZERO, |acc, (c, m)| acc + *c * m)
                * eps
        };
        let g = GraphGrid::from_fn([0.0; 3], [1.0; 3], 9, f);
        dirac.push(residual_sup_norm(&g));
        let p = GraphPatch::from_grid_unchecked("random", &g).unwrap();
        let geo = [[0.3, 0.4, 0.5], [0.6, 0.7, 0.3], [0.5, 0.5, 0.5]]
            .into_iter()
            .map(|x| {
                evaluate_point(&p, x, &EvalOptions::new(1.0))
                    .unwrap()
                    .associativity_residual
            })
            .fold(0.0, f64::max);
        geometric.push(geo);
        assert!(p.expected_associative());
    }
    let rho = spearman(&dirac, &geometric);
    assert!(rho > 0.9, "rank correlation {rho}");
    // An exact solution has both residuals at round-off level.
    let b = BoundaryData::new(BoundaryFamily::Holomorphic, 0.1);
    let g = GraphGrid::from_fn([0.0; 3], [1.0; 3], 9, |x| b.value(x));
    let p = graph_to_patch(&g, 1e-12).unwrap();
    assert!(
        evaluate_point(&p, [0.4, 0.5, 0.6], &EvalOptions::new(1e-9))
            .unwrap()
            .associativity_residual
            < 1e-14
    );
}
