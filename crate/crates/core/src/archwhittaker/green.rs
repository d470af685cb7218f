//! The Green function ξ(x, z) = −Ei(−2πR(x,z))·e^{−π(x,x)} on quadratic
//! spaces of signature (m, 2), m ∈ {0, 1}, and the n = 1 archimedean local
//! height.

use super::special::exp_integral;
use crate::error::{Error, Result};
use num::complex::Complex64;

/// One evaluation of ξ: the projection data R(x,z), the value, and the
/// majorant (x,x)_z = (x,x) + 2R(x,z).
#[derive(Debug, Clone)]
pub struct GreenEvaluation {
    pub r: f64,
    pub xi: f64,
    pub xi0: f64,
    pub majorant: f64,
}

fn pair(gram: &[Vec<f64>], a: &[f64], b: &[f64]) -> f64 {
    let n = gram.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += a[i] * gram[i][j] * b[j];
        }
    }
    acc
}

fn finish(r: f64, xx: f64) -> Result<GreenEvaluation> {
    if r <= 1e-12 {
        return Err(Error::Singular(
            "z lies on the divisor D_x: R(x,z) = 0, ξ has a logarithmic singularity".into(),
        ));
    }
    let xi0 = -exp_integral(-2.0 * std::f64::consts::PI * r)?;
    Ok(GreenEvaluation {
        r,
        xi: xi0 * (-std::f64::consts::PI * xx).exp(),
        xi0,
        majorant: xx + 2.0 * r,
    })
}

/// m = 0: the space is negative definite of rank 2 and z is the whole space,
/// so x_z = x and R = −(x,x) = −2T with T = Q(x).
pub fn green_xi_m0(gram: &[Vec<f64>], x: &[f64]) -> Result<GreenEvaluation> {
    if gram.len() != 2 {
        return Err(Error::Domain("m = 0 needs a rank-2 Gram matrix".into()));
    }
    let xx = pair(gram, x, x);
    if xx >= 0.0 {
        return Err(Error::Domain(
            "the m = 0 space must be negative definite at x".into(),
        ));
    }
    finish(-xx, xx)
}

/// Standard signature (1,2) Gram in the Witt basis (b₁, e, f): Q(b₁) = q_b < 0,
/// e, f isotropic with (e, f) = 1.
pub fn witt_gram_m1(q_b: f64) -> Vec<Vec<f64>> {
    vec![
        vec![2.0 * q_b, 0.0, 0.0],
        vec![0.0, 0.0, 1.0],
        vec![0.0, 1.0, 0.0],
    ]
}

/// m = 1: the tube-domain point ζ gives w(ζ) = ζ·b₁ + e − ζ²Q(b₁)·f; the
/// negative plane is span(Re w, Im w) and x_z is the orthogonal projection of
/// x onto it. Coordinates are in the Witt basis of `witt_gram_m1`.
pub fn green_xi_m1(q_b: f64, x: &[f64], zeta: Complex64) -> Result<GreenEvaluation> {
    if q_b >= 0.0 {
        return Err(Error::Domain("Q(b₁) must be negative".into()));
    }
    let gram = witt_gram_m1(q_b);
    let w = w_of(q_b, zeta);
    let u1: Vec<f64> = w.iter().map(|c| c.re).collect();
    let u2: Vec<f64> = w.iter().map(|c| c.im).collect();
    // the plane must be negative definite (tube-domain condition)
    let g11 = pair(&gram, &u1, &u1);
    let g12 = pair(&gram, &u1, &u2);
    let g22 = pair(&gram, &u2, &u2);
    let det = g11 * g22 - g12 * g12;
    if g11 >= 0.0 || det <= 0.0 {
        return Err(Error::Domain(
            "ζ is outside the tube domain: span(Re w, Im w) is not negative definite".into(),
        ));
    }
    // x_z = c₁u₁ + c₂u₂ with Gram([u1,u2])·c = ((x,u1),(x,u2))
    let b1 = pair(&gram, x, &u1);
    let b2 = pair(&gram, x, &u2);
    let c1 = (b1 * g22 - b2 * g12) / det;
    let c2 = (g11 * b2 - g12 * b1) / det;
    let xz: Vec<f64> = (0..3).map(|i| c1 * u1[i] + c2 * u2[i]).collect();
    let r = -pair(&gram, &xz, &xz);
    finish(r, pair(&gram, x, x))
}

/// w(ζ) = ζ·b₁ + e − ζ²·Q(b₁)·f in the Witt basis (b₁, e, f).
pub fn w_of(q_b: f64, zeta: Complex64) -> [Complex64; 3] {
    [
        zeta,
        Complex64::new(1.0, 0.0),
        -zeta * zeta * q_b,
    ]
}

/// Recover ζ from a multiple of w: normalize by the e-coordinate and read the
/// b₁-coordinate (used by the O(V)-invariance tests).
pub fn zeta_of_w(w: &[Complex64; 3]) -> Result<Complex64> {
    if w[1].norm() < 1e-14 {
        return Err(Error::Singular("w has no e-component".into()));
    }
    Ok(w[0] / w[1])
}

/// exp(A) for a 3×3 matrix by scaled Taylor series.
pub fn mat_exp3(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let norm: f64 = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let s = (norm.log2().ceil().max(0.0)) as u32 + 1;
    let scale = 1.0 / 2f64.powi(s as i32);
    let mut term = vec![vec![0.0; 3]; 3];
    let mut result = vec![vec![0.0; 3]; 3];
    for i in 0..3 {
        term[i][i] = 1.0;
        result[i][i] = 1.0;
    }
    for k in 1..30 {
        let mut next = vec![vec![0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for l in 0..3 {
                    next[i][j] += term[i][l] * a[l][j] * scale / k as f64;
                }
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                result[i][j] += next[i][j];
            }
        }
        term = next;
    }
    for _ in 0..s {
        let mut sq = vec![vec![0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for l in 0..3 {
                    sq[i][j] += result[i][l] * result[l][j];
                }
            }
        }
        result = sq;
    }
    result
}

/// A special-orthogonal element h = exp(G⁻¹K) of the (1,2) Witt space from an
/// antisymmetric seed K (used by the invariance tests).
pub fn so_element_m1(q_b: f64, k01: f64, k02: f64, k12: f64) -> Vec<Vec<f64>> {
    let gram = witt_gram_m1(q_b);
    let k = vec![
        vec![0.0, k01, k02],
        vec![-k01, 0.0, k12],
        vec![-k02, -k12, 0.0],
    ];
    // G⁻¹ of the Witt Gram: diag block inverse
    let ginv = vec![
        vec![1.0 / (2.0 * q_b), 0.0, 0.0],
        vec![0.0, 0.0, 1.0],
        vec![0.0, 1.0, 0.0],
    ];
    let mut a = vec![vec![0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for l in 0..3 {
                a[i][j] += ginv[i][l] * k[l][j];
            }
        }
    }
    let h = mat_exp3(&a);
    debug_assert!({
        // hᵀGh = G
        let mut gh = vec![vec![0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for l in 0..3 {
                    gh[i][j] += gram[i][l] * h[l][j];
                }
            }
        }
        let mut hgh = vec![vec![0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for l in 0..3 {
                    hgh[i][j] += h[l][i] * gh[l][j];
                }
            }
        }
        (0..3).all(|i| (0..3).all(|j| (hgh[i][j] - gram[i][j]).abs() < 1e-9))
    });
    h
}

/// ξ(hx, hz) against ξ(x, z) for h ∈ SO(V): relative residual of ξ₀.
pub fn invariance_residual_m1(
    q_b: f64,
    x: &[f64],
    zeta: Complex64,
    h: &[Vec<f64>],
) -> Result<f64> {
    let base = green_xi_m1(q_b, x, zeta)?;
    let hx: Vec<f64> = (0..3)
        .map(|i| (0..3).map(|j| h[i][j] * x[j]).sum())
        .collect();
    let w = w_of(q_b, zeta);
    let mut hw = [Complex64::new(0.0, 0.0); 3];
    for i in 0..3 {
        for j in 0..3 {
            hw[i] += h[i][j] * w[j];
        }
    }
    let hzeta = zeta_of_w(&hw)?;
    let moved = green_xi_m1(q_b, &hx, hzeta)?;
    Ok((moved.xi0 - base.xi0).abs() / base.xi0.abs().max(1e-300))
}

/// n = 1, m = 0 archimedean local height: Ht_∞ = ξ₀(x) = −Ei(4πT), T = Q(x) < 0.
pub fn height_arch_n1(t: f64) -> Result<f64> {
    if t >= 0.0 {
        return Err(Error::Domain("the height needs T < 0".into()));
    }
    Ok(-exp_integral(4.0 * std::f64::consts::PI * t)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m0_matches_height() {
        // Gram of ⟨−2a,−2b⟩ with Q(e₁) = −1: T = −1, ξ₀ = −Ei(−4π)
        let gram = vec![vec![-2.0, 0.0], vec![0.0, -2.0]];
        let g = green_xi_m0(&gram, &[1.0, 0.0]).unwrap();
        assert!((g.r - 2.0).abs() < 1e-14); // R = −(x,x) = 2
        assert!((g.xi0 - height_arch_n1(-1.0).unwrap()).abs() < 1e-14);
        assert!((g.majorant - (-2.0 + 4.0)).abs() < 1e-14);
    }

    #[test]
    fn m1_projection_and_divisor() {
        // z = i (purely imaginary ζ), x = b₁: x lies in the negative plane?
        // w(i) = i·b₁ + e + q_b·f; Re w = e + q_b f, Im w = b₁ ⇒ x = b₁ is IN
        // the plane: R = −(x,x) > 0 off the divisor only if x ∉ plane^⊥...
        let q_b = -1.0;
        // x = e − f: (x,x) = −2 < 0, generic position
        let g = green_xi_m1(q_b, &[0.0, 1.0, -1.0], Complex64::new(0.3, 1.0)).unwrap();
        assert!(g.r > 0.0);
        assert!((g.majorant - (pairless(q_b, &[0.0, 1.0, -1.0]) + 2.0 * g.r)).abs() < 1e-12);
        // x = f ⊥ ... choose x with x ⊥ plane: x = Re w is in the plane, so
        // a vector orthogonal to the plane gives R = 0 → singular error.
        // e − q_b f pairs to zero with both Re w(i) and Im w(i):
        let sing = green_xi_m1(q_b, &[0.0, 1.0, 1.0], Complex64::new(0.0, 1.0));
        assert!(sing.is_err());
    }

    fn pairless(q_b: f64, x: &[f64]) -> f64 {
        let gram = witt_gram_m1(q_b);
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                acc += x[i] * gram[i][j] * x[j];
            }
        }
        acc
    }

    #[test]
    fn m1_invariance() {
        let q_b = -1.0;
        let h = so_element_m1(q_b, 0.3, -0.2, 0.15);
        let res =
            invariance_residual_m1(q_b, &[0.0, 1.0, -1.0], Complex64::new(0.3, 1.0), &h).unwrap();
        assert!(res < 1e-9, "residual {res}");
    }

    #[test]
    fn height_examples() {
        use super::super::special::e1;
        let t = -1.0;
        let h = height_arch_n1(t).unwrap();
        assert!((h - e1(4.0 * std::f64::consts::PI).unwrap()).abs() < 1e-16);
        assert!(height_arch_n1(0.5).is_err());
        // logarithmic divergence as T → 0⁻
        assert!(height_arch_n1(-1e-8).unwrap() > 10.0);
    }
}
