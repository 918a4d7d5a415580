use nalgebra::{DVector, Matrix3};
use serde::Serialize;

use super::fiber::FiberProjectors;
use super::frame::AdaptedFrame;
use super::patch::PointJet;
use crate::g2::{cross7, Vector7};
use crate::spin4::stabilizer::{sym2_0_basis, sym2_0_normal_coords};

/// `h[i][j][α]`: tangent indices `i, j`, normal index `α` (frame `e_{4+α}`).
pub type Tensor334 = [[[f64; 4]; 3]; 3];
/// `t[k][i][j][α]`: derivative slot `k`, form slots `i, j`.
pub type Tensor3334 = [[[[f64; 4]; 3]; 3]; 3];

#[derive(Clone, Debug, PartialEq)]
pub struct SecondFundamentalForm {
    pub h: Tensor334,
    /// Mean curvature vector in normal-frame components, `tr(h) / 3`.
    pub mean: [f64; 4],
    pub h0: Tensor334,
}

fn frobenius(t: &Tensor334) -> f64 {
    t.iter()
        .flatten()
        .flatten()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
}

impl SecondFundamentalForm {
    pub fn from_tensor(h: Tensor334) -> Self {
        let mean: [f64; 4] = std::array::from_fn(|a| (h[0][0][a] + h[1][1][a] + h[2][2][a]) / 3.0);
        let mut h0 = h;
        for i in 0..3 {
            for a in 0..4 {
                h0[i][i][a] -= mean[a];
            }
        }
        Self { h, mean, h0 }
    }

    pub fn mean_norm(&self) -> f64 {
        self.mean.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn norm(&self) -> f64 {
        frobenius(&self.h)
    }

    pub fn traceless_norm(&self) -> f64 {
        frobenius(&self.h0)
    }

    /// Largest entry of `h0 + H ⊗ Id − h`.
    pub fn reconstruction_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                for a in 0..4 {
                    let id = if i == j { self.mean[a] } else { 0.0 };
                    worst = worst.max((self.h0[i][j][a] + id - self.h[i][j][a]).abs());
                }
            }
        }
        worst
    }

    /// `II(e_i, e_j)` as an ambient vector.
    pub fn value(&self, frame: &AdaptedFrame, i: usize, j: usize) -> Vector7 {
        (0..4).map(|a| frame.e[3 + a] * self.h[i][j][a]).sum()
    }

    /// `II(X, Y)` for ambient `X, Y`, through their tangential components.
    pub fn apply(&self, frame: &AdaptedFrame, x: &Vector7, y: &Vector7) -> Vector7 {
        let mut out = Vector7::zeros();
        for i in 0..3 {
            let xi = x.dot(&frame.e[i]);
            for j in 0..3 {
                out += self.value(frame, i, j) * (xi * y.dot(&frame.e[j]));
            }
        }
        out
    }
}

/// Tangential coordinate derivatives converted to frame components.
fn to_frame2(frame: &AdaptedFrame, coord: impl Fn(usize, usize) -> [f64; 4]) -> Tensor334 {
    let e = &frame.coords;
    let mut out = [[[0.0; 4]; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            let v = coord(a, b);
            for i in 0..3 {
                for j in 0..3 {
                    let w = e[(i, a)] * e[(j, b)];
                    for al in 0..4 {
                        out[i][j][al] += w * v[al];
                    }
                }
            }
        }
    }
    out
}

fn normal_components(frame: &AdaptedFrame, v: &Vector7) -> [f64; 4] {
    std::array::from_fn(|a| v.dot(&frame.e[3 + a]))
}

/// `h^α_ij = ⟨∂²u(e_i, e_j), e_{4+α}⟩`.
pub fn second_fundamental_form(jet: &PointJet, frame: &AdaptedFrame) -> SecondFundamentalForm {
    SecondFundamentalForm::from_tensor(to_frame2(frame, |a, b| {
        normal_components(frame, &jet.d2[a][b])
    }))
}

/// `max ‖II(e_i × e_j, e_k) − e_i × II(e_j, e_k) − II(e_i, e_k) × e_j‖`.
pub fn sff_symmetry_residual(frame: &AdaptedFrame, sff: &SecondFundamentalForm) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let eij = cross7(&frame.e[i], &frame.e[j]);
            for k in 0..3 {
                let lhs = sff.apply(frame, &eij, &frame.e[k]);
                let rhs = cross7(&frame.e[i], &sff.value(frame, j, k))
                    + cross7(&sff.value(frame, i, k), &frame.e[j]);
                worst = worst.max((lhs - rhs).norm());
            }
        }
    }
    worst
}

/// Norms of the `(1,5)` and `(1,3)` isotypic parts of `h0` in `Sym²₀ ⊗ N`.
pub fn v15_membership(sff: &SecondFundamentalForm) -> [f64; 2] {
    let c = DVector::from_vec(sym2_0_normal_coords(&sff.h0));
    FiberProjectors::get().sym2_0_norms(&c)
}

/// Eigenvalues (ascending) of the shape operator `⟨II(·,·), ν⟩`.
pub fn principal_curvatures(
    frame: &AdaptedFrame,
    sff: &SecondFundamentalForm,
    nu: &Vector7,
) -> [f64; 3] {
    let nc = normal_components(frame, nu);
    let m = Matrix3::from_fn(|i, j| (0..4).map(|a| sff.h[i][j][a] * nc[a]).sum::<f64>());
    let mut ev: [f64; 3] = m.symmetric_eigenvalues().into();
    ev.sort_by(f64::total_cmp);
    ev
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CovDerivOptions {
    /// Fault injection: drop the Levi-Civita corrections.
    pub skip_christoffel: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CovDerivTensor {
    pub t: Tensor3334,
}

/// `(∇_X II)(Y, Z)` in frame components, from the flat-ambient formula
/// `∇⊥_a II_bc − Γ^d_ab II_dc − Γ^d_ac II_bd` with
/// `∇⊥_a II_bc = P⊥ u_abc − Γ^d_bc II_ad`.
pub fn covariant_derivative_sff(
    jet: &PointJet,
    frame: &AdaptedFrame,
    opts: CovDerivOptions,
) -> CovDerivTensor {
    let ginv = jet.metric().try_inverse().unwrap_or_else(Matrix3::zeros);
    let gamma: [[[f64; 3]; 3]; 3] = std::array::from_fn(|d| {
        std::array::from_fn(|b| {
            std::array::from_fn(|c| {
                (0..3)
                    .map(|e| ginv[(d, e)] * jet.d2[b][c].dot(&jet.d1[e]))
                    .sum()
            })
        })
    });
    let ii: [[[f64; 4]; 3]; 3] =
        std::array::from_fn(|b| std::array::from_fn(|c| normal_components(frame, &jet.d2[b][c])));
    let mut coord = [[[[0.0; 4]; 3]; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                let mut v = normal_components(frame, &jet.d3[a][b][c]);
                for d in 0..3 {
                    for al in 0..4 {
                        v[al] -= gamma[d][b][c] * ii[a][d][al];
                        if !opts.skip_christoffel {
                            v[al] -= gamma[d][a][b] * ii[d][c][al] + gamma[d][a][c] * ii[b][d][al];
                        }
                    }
                }
                coord[a][b][c] = v;
            }
        }
    }
    let e = &frame.coords;
    let mut t = [[[[0.0; 4]; 3]; 3]; 3];
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                for a in 0..3 {
                    for b in 0..3 {
                        for c in 0..3 {
                            let w = e[(k, a)] * e[(i, b)] * e[(j, c)];
                            if w == 0.0 {
                                continue;
                            }
                            for al in 0..4 {
                                t[k][i][j][al] += w * coord[a][b][c][al];
                            }
                        }
                    }
                }
            }
        }
    }
    CovDerivTensor { t }
}

impl CovDerivTensor {
    pub fn norm(&self) -> f64 {
        self.t
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }

    /// `‖T − Sym(T)‖`, with `Sym` the full symmetrization of the three slots.
    pub fn symmetrization_defect(&self) -> f64 {
        let t = &self.t;
        let mut acc = 0.0;
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    for a in 0..4 {
                        let sym = (t[k][i][j][a]
                            + t[k][j][i][a]
                            + t[i][k][j][a]
                            + t[i][j][k][a]
                            + t[j][k][i][a]
                            + t[j][i][k][a])
                            / 6.0;
                        acc += (t[k][i][j][a] - sym).powi(2);
                    }
                }
            }
        }
        acc.sqrt()
    }

    /// Norms of the traces over slot pairs `(k,i)` and `(i,j)`.
    pub fn trace_norms(&self) -> [f64; 2] {
        let t = &self.t;
        let mut ki = 0.0;
        let mut ij = 0.0;
        for x in 0..3 {
            for a in 0..4 {
                let a1: f64 = (0..3).map(|m| t[m][m][x][a]).sum();
                let a2: f64 = (0..3).map(|m| t[x][m][m][a]).sum();
                ki += a1 * a1;
                ij += a2 * a2;
            }
        }
        [ki.sqrt(), ij.sqrt()]
    }

    /// Components in `T* ⊗ Sym²₀ ⊗ N`, index `20 k + 4 s + α`.
    pub fn traceless_coords(&self) -> DVector<f64> {
        let basis = sym2_0_basis();
        let mut out = DVector::zeros(60);
        for k in 0..3 {
            for (s, bs) in basis.iter().enumerate() {
                for a in 0..4 {
                    let mut acc = 0.0;
                    for i in 0..3 {
                        for j in 0..3 {
                            acc += bs[(i, j)] * self.t[k][i][j][a];
                        }
                    }
                    out[20 * k + 4 * s + a] = acc;
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IsotypicBreakdown {
    pub n17: f64,
    pub n15: f64,
    pub n13: f64,
    pub n11: f64,
    /// Norm of the part that is traceless in the form slots.
    pub total: f64,
    /// Norm of the form-slot trace part (the covariant derivative of `H`).
    pub trace_norm: f64,
}

impl IsotypicBreakdown {
    pub fn full_norm(&self) -> f64 {
        self.total.hypot(self.trace_norm)
    }

    pub fn norms(&self) -> [f64; 4] {
        [self.n17, self.n15, self.n13, self.n11]
    }

    /// `(Σ n²)^{1/2} − total`, relative to the total.
    pub fn completeness_defect(&self) -> f64 {
        let s: f64 = self.norms().iter().map(|x| x * x).sum::<f64>();
        if self.total == 0.0 {
            return s.sqrt();
        }
        (s - self.total * self.total).abs() / (self.total * self.total)
    }

    /// Largest of the `(1,5)`, `(1,3)`, `(1,1)` and trace norms, relative to the full norm.
    pub fn non_harmonic_fraction(&self) -> f64 {
        let full = self.full_norm();
        if full == 0.0 {
            return 0.0;
        }
        [self.n15, self.n13, self.n11, self.trace_norm]
            .into_iter()
            .fold(0.0, f64::max)
            / full
    }
}

pub fn harmonicity_check(cov: &CovDerivTensor) -> IsotypicBreakdown {
    let c = cov.traceless_coords();
    let [n17, n15, n13, n11] = FiberProjectors::get().cov_norms(&c);
    let tr = cov.trace_norms()[1];
    IsotypicBreakdown {
        n17,
        n15,
        n13,
        n11,
        total: c.norm(),
        trace_norm: tr / 3f64.sqrt(),
    }
}
