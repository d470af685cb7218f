//! Shimura's η function of matrix argument,
//!
//!   η^{(n)}(y, T, α, β) = ∫_{u > ±T} e^{−tr(uy)} det(u−T)^{β−ρ_n} det(u+T)^{α−ρ_n} du,
//!
//! evaluated by double-exponential quadrature for n ≤ 2 (ρ_n = (n+1)/2).

use super::quad::{exp_sinh_lenient, tanh_sinh_lenient, QuadResult, QuadratureSpec};
use super::special::siegel_gamma_real;
use crate::error::{Error, Result};

/// η for n = 1: after shifting u past max(T, −T) the integral is
/// e^{−|T|y}·∫₀^∞ e^{−uy} u^{p₀} (u + 2|T|)^{p₁} du with (p₀, p₁) = (β−1, α−1)
/// for T ≥ 0 and (α−1, β−1) for T < 0.
pub fn eta1(y: f64, t: f64, alpha: f64, beta: f64, spec: &QuadratureSpec) -> Result<QuadResult<f64>> {
    if y <= 0.0 {
        return Err(Error::Domain("y must be positive".into()));
    }
    if alpha <= 0.0 || beta <= 0.0 {
        return Err(Error::Domain(
            "η diverges: need Re α, Re β > ρ_n − 1 = 0".into(),
        ));
    }
    let c = 2.0 * t.abs();
    let (p0, p1) = if t >= 0.0 { (beta - 1.0, alpha - 1.0) } else { (alpha - 1.0, beta - 1.0) };
    let damp = (-t.abs() * y).exp();
    let r = super::quad::exp_sinh(
        |u: f64, off: f64| (-u * y).exp() * off.powf(p0) * (u + c).powf(p1),
        0.0,
        spec,
    )?;
    Ok(QuadResult {
        value: damp * r.value,
        err_estimate: damp * r.err_estimate,
        nodes_used: r.nodes_used,
    })
}

/// Eigen-rotation of a symmetric 2×2 matrix: returns (R, d₁, d₂) with
/// RᵀTR = diag(d₁, d₂) and det R = 1.
fn rotate2(t: &[[f64; 2]; 2]) -> ([[f64; 2]; 2], f64, f64) {
    let theta = 0.5 * (2.0 * t[0][1]).atan2(t[0][0] - t[1][1]);
    let (s, c) = theta.sin_cos();
    let r = [[c, -s], [s, c]];
    let d1 = c * c * t[0][0] + 2.0 * c * s * t[0][1] + s * s * t[1][1];
    let d2 = s * s * t[0][0] - 2.0 * c * s * t[0][1] + c * c * t[1][1];
    (r, d1, d2)
}

fn congr2(r: &[[f64; 2]; 2], y: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    // RᵀyR
    let mut yr = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            yr[i][j] = y[i][0] * r[0][j] + y[i][1] * r[1][j];
        }
    }
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = r[0][i] * yr[0][j] + r[1][i] * yr[1][j];
        }
    }
    out
}

/// η for n = 2, iterated over eigen-coordinates of T: the cone {u > ±T}
/// becomes u₁₁ > |d₁|, u₂₂ > |d₂|, u₁₂² < min((u₁₁±d₁)(u₂₂±d₂)).
pub fn eta2(
    y: &[[f64; 2]; 2],
    t: &[[f64; 2]; 2],
    alpha: f64,
    beta: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult<f64>> {
    let rho = 1.5;
    if alpha <= rho - 1.0 || beta <= rho - 1.0 {
        return Err(Error::Domain(
            "η diverges: need Re α, Re β > ρ_n − 1 = 1/2".into(),
        ));
    }
    if y[0][0] <= 0.0 || y[0][0] * y[1][1] - y[0][1] * y[0][1] <= 0.0 {
        return Err(Error::Domain("y must be positive definite".into()));
    }
    let (rot, d1, d2) = rotate2(t);
    let yt = congr2(&rot, y);
    let pa = alpha - rho;
    let pb = beta - rho;
    let inner_spec = QuadratureSpec { tol: spec.tol * 1e-2, max_level: spec.max_level };
    let mid_spec = QuadratureSpec { tol: spec.tol * 1e-1, max_level: spec.max_level };
    // peel the exponential minimum off so the outer integrand is O(1) near 0
    let damp0 = (-(d1.abs() * yt[0][0] + d2.abs() * yt[1][1])).exp();
    let outer = super::quad::exp_sinh(
        |_u11: f64, off1: f64| {
            let u11 = off1 + d1.abs();
            let e1 = (-off1 * yt[0][0]).exp();
            let mid = exp_sinh_lenient(
                |_u22: f64, off2: f64| {
                    let u22 = off2 + d2.abs();
                    let rp2 = (u11 + d1) * (u22 + d2);
                    let rm2 = (u11 - d1) * (u22 - d2);
                    let r2 = rp2.min(rm2);
                    if r2 <= 0.0 {
                        return 0.0;
                    }
                    let r = r2.sqrt();
                    let rp = rp2.sqrt();
                    let rm = rm2.sqrt();
                    let inner = tanh_sinh_lenient(
                        |u12: f64, da: f64, db: f64| {
                            // (r±² − u₁₂²) via endpoint distances, no cancellation
                            let fp = ((rp - r) + db) * ((rp - r) + da);
                            let fm = ((rm - r) + db) * ((rm - r) + da);
                            (-2.0 * u12 * yt[0][1]).exp() * fp.powf(pa) * fm.powf(pb)
                        },
                        -r,
                        r,
                        &inner_spec,
                    );
                    (-off2 * yt[1][1]).exp() * inner.value
                },
                0.0,
                &mid_spec,
            );
            e1 * mid.value
        },
        0.0,
        spec,
    )?;
    Ok(QuadResult {
        value: damp0 * outer.value,
        err_estimate: damp0 * outer.err_estimate,
        nodes_used: outer.nodes_used,
    })
}

/// Dispatch by genus on row-major flat matrices.
pub fn eta(
    n: usize,
    y: &[f64],
    t: &[f64],
    alpha: f64,
    beta: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult<f64>> {
    match n {
        1 => eta1(y[0], t[0], alpha, beta, spec),
        2 => {
            let ym = [[y[0], y[1]], [y[2], y[3]]];
            let tm = [[t[0], t[1]], [t[2], t[3]]];
            eta2(&ym, &tm, alpha, beta, spec)
        }
        _ => Err(Error::Unsupported(format!("η quadrature for n = {n}"))),
    }
}

/// Closed form η(y, T, ρ_n, β) = Γ_n(β)·det(y)^{−β}·e^{−tr(yT)} for positive
/// definite T (used as a quadrature oracle).
pub fn eta_closed_rho(n: usize, y: &[f64], t: &[f64], beta: f64) -> Result<f64> {
    let (dety, tr) = match n {
        1 => (y[0], y[0] * t[0]),
        2 => (
            y[0] * y[3] - y[1] * y[2],
            y[0] * t[0] + y[1] * t[2] + y[2] * t[1] + y[3] * t[3],
        ),
        _ => return Err(Error::Unsupported(format!("n = {n}"))),
    };
    Ok(siegel_gamma_real(n, beta)? * dety.powf(-beta) * (-tr).exp())
}

/// Lemma etatrafo residual: |η(SᵀyS,T,α,β) − |S|^{2(ρ_n−α−β)}·η(y,STSᵀ,α,β)|
/// relative to the magnitude of the two sides.
pub fn etatrafo_residual(
    n: usize,
    y: &[f64],
    t: &[f64],
    s_mat: &[f64],
    alpha: f64,
    beta: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let rho = (n as f64 + 1.0) / 2.0;
    let (dets, sys, sts) = match n {
        1 => {
            let s = s_mat[0];
            (s, vec![s * y[0] * s], vec![s * t[0] * s])
        }
        2 => {
            let s = [[s_mat[0], s_mat[1]], [s_mat[2], s_mat[3]]];
            let det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
            let ym = [[y[0], y[1]], [y[2], y[3]]];
            let tm = [[t[0], t[1]], [t[2], t[3]]];
            // SᵀyS
            let mut ys = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    ys[i][j] = ym[i][0] * s[0][j] + ym[i][1] * s[1][j];
                }
            }
            let mut sys = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    sys[i][j] = s[0][i] * ys[0][j] + s[1][i] * ys[1][j];
                }
            }
            // STSᵀ
            let mut ts = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    ts[i][j] = tm[i][0] * s[j][0] + tm[i][1] * s[j][1];
                }
            }
            let mut sts = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    sts[i][j] = s[i][0] * ts[0][j] + s[i][1] * ts[1][j];
                }
            }
            (
                det,
                vec![sys[0][0], sys[0][1], sys[1][0], sys[1][1]],
                vec![sts[0][0], sts[0][1], sts[1][0], sts[1][1]],
            )
        }
        _ => return Err(Error::Unsupported(format!("n = {n}"))),
    };
    if dets <= 0.0 {
        return Err(Error::Domain("S must have positive determinant".into()));
    }
    let lhs = eta(n, &sys, t, alpha, beta, spec)?.value;
    let rhs = dets.powf(2.0 * (rho - alpha - beta)) * eta(n, y, &sts, alpha, beta, spec)?.value;
    let scale = lhs.abs().max(rhs.abs()).max(1e-300);
    Ok((lhs - rhs).abs() / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn eta1_elementary() {
        // (y=2, T=π, α=1, β=2): ∫_π^∞ e^{−2u}(u−π) du = e^{−2π}/4
        let spec = QuadratureSpec::default();
        let r = eta1(2.0, PI, 1.0, 2.0, &spec).unwrap();
        let expect = (-2.0 * PI).exp() / 4.0;
        assert!((r.value - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn eta1_negative_t_kummer() {
        // T<0: η = e^{−|T|y}|2T|^{α+β−1}Γ(α)U(α, α+β, 2|T|y)
        let spec = QuadratureSpec::default();
        let (y, t, a, b) = (1.5, -0.8, 1.25, 2.0);
        let r = eta1(y, t, a, b, &spec).unwrap();
        let c = 2.0 * t.abs();
        let u = super::super::special::kummer_u(a, a + b, c * y, &spec).unwrap();
        let expect = (-t.abs() * y).exp()
            * c.powf(a + b - 1.0)
            * super::super::special::gamma_real(a)
            * u.value;
        assert!((r.value - expect).abs() < 1e-10 * expect.abs(), "{} vs {expect}", r.value);
    }

    #[test]
    fn eta1_closed_rho() {
        let spec = QuadratureSpec::default();
        for beta in [0.7, 1.3] {
            let r = eta1(2.0, 0.6, 1.0, beta, &spec).unwrap();
            let expect = eta_closed_rho(1, &[2.0], &[0.6], beta).unwrap();
            assert!((r.value - expect).abs() < 1e-10 * expect, "β={beta}");
        }
    }

    #[test]
    fn eta2_closed_rho() {
        let spec = QuadratureSpec { tol: 1e-9, max_level: 11 };
        let y = [1.1, 0.2, 0.2, 0.9];
        let t = [0.8, 0.1, 0.1, 0.5];
        for beta in [1.7, 2.4] {
            let r = eta(2, &y, &t, 1.5, beta, &spec).unwrap();
            let expect = eta_closed_rho(2, &y, &t, beta).unwrap();
            assert!(
                (r.value - expect).abs() < 1e-6 * expect,
                "β={beta}: {} vs {expect}",
                r.value
            );
        }
    }

    #[test]
    fn etatrafo_scalar() {
        let spec = QuadratureSpec::default();
        let res = etatrafo_residual(1, &[1.2], &[0.7], &[1.8], 1.5, 2.0, &spec).unwrap();
        assert!(res < 1e-9, "residual {res}");
    }
}
