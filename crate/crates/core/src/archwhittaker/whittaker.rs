//! Real-place Whittaker values W_T(m(a), s, Φ_κ) through η, the closed form
//! at s = 0 for positive definite T, the vanishing-order bound, the n = 1
//! central derivative, and the asymptotic limit checks.

use super::eta::{eta, eta1};
use super::quad::{QuadratureSpec};
use super::special::{gamma_real, kummer_u, siegel_gamma_real};
use crate::error::{Error, Result};
use num::complex::Complex64;

use std::f64::consts::PI;

/// s, κ and the derived confluent exponents for genus n.
#[derive(Debug, Clone, Copy)]
pub struct ConfluentParams {
    pub n: usize,
    pub kappa: f64,
    pub s: f64,
}

impl ConfluentParams {
    pub fn rho(&self) -> f64 {
        (self.n as f64 + 1.0) / 2.0
    }
    pub fn alpha(&self) -> f64 {
        (self.s + self.rho() + self.kappa) / 2.0
    }
    pub fn beta(&self) -> f64 {
        (self.s + self.rho() - self.kappa) / 2.0
    }
}

/// y = a·aᵀ on the diagonal torus; flat row-major storage.
#[derive(Debug, Clone)]
pub struct RadialPoint {
    pub n: usize,
    pub y: Vec<f64>,
}

/// Cholesky pivots of a flat symmetric matrix; None when not positive
/// definite.
fn cholesky_pivots(n: usize, m: &[f64]) -> Option<Vec<f64>> {
    let mut a = m.to_vec();
    let mut pivots = Vec::with_capacity(n);
    for k in 0..n {
        let piv = a[k * n + k];
        if piv <= 0.0 {
            return None;
        }
        pivots.push(piv);
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                a[i * n + j] -= a[i * n + k] * a[k * n + j] / piv;
            }
        }
    }
    Some(pivots)
}

pub(crate) fn det_posdef(n: usize, m: &[f64]) -> Option<f64> {
    cholesky_pivots(n, m).map(|p| p.iter().product())
}

impl RadialPoint {
    pub fn scalar(y: f64) -> Self {
        RadialPoint { n: 1, y: vec![y] }
    }
    pub fn from_flat(n: usize, y: Vec<f64>) -> Result<Self> {
        if y.len() != n * n {
            return Err(Error::Domain("y has the wrong shape".into()));
        }
        if det_posdef(n, &y).is_none() {
            return Err(Error::Domain("y must be positive definite".into()));
        }
        Ok(RadialPoint { n, y })
    }
    pub fn from_diag(d: &[f64]) -> Result<Self> {
        let n = d.len();
        let mut y = vec![0.0; n * n];
        for (i, &v) in d.iter().enumerate() {
            y[i * n + i] = v;
        }
        RadialPoint::from_flat(n, y)
    }
    pub fn det(&self) -> f64 {
        det_posdef(self.n, &self.y).unwrap_or(f64::NAN)
    }
    /// |a| = det(a) for a·aᵀ = y
    pub fn a_det(&self) -> f64 {
        self.det().sqrt()
    }
}

fn trace_prod(n: usize, t: &[f64], y: &[f64]) -> f64 {
    let mut tr = 0.0;
    for i in 0..n {
        for j in 0..n {
            tr += t[i * n + j] * y[j * n + i];
        }
    }
    tr
}

/// (−2πi)^{nκ} on the principal branch: (2π)^{nκ}·e^{−iπnκ/2}.
fn minus_two_pi_i_pow(nk: f64) -> Complex64 {
    Complex64::from_polar((2.0 * PI).powf(nk), -PI * nk / 2.0)
}

/// Closed form W_T(m(a), 0, Φ_κ) for positive definite T:
/// (−2πi)^{nκ}·2^{−n(n−1)/4}/Γ_n(κ)·det(y)^{κ/2}·e^{−2π tr(Ty)}.
pub fn whitt0_value(n: usize, kappa: f64, t: &[f64], point: &RadialPoint) -> Result<Complex64> {
    if det_posdef(n, t).is_none() {
        return Err(Error::Domain("closed form needs positive definite T".into()));
    }
    let nf = n as f64;
    let g = siegel_gamma_real(n, kappa)?;
    let tr = trace_prod(n, t, &point.y);
    Ok(minus_two_pi_i_pow(nf * kappa)
        * 2f64.powf(-nf * (nf - 1.0) / 4.0)
        * point.det().powf(kappa / 2.0)
        * (-2.0 * PI * tr).exp()
        / g)
}

/// W_T(m(a), s, Φ_κ) = c_n(α,β)·|a|^{s+ρ_n}·η(2y, πT, α, β) with
/// c_n = 2^{n(n−1)/4}·i^{n(β−α)}·2^{−n(ρ_n−1)}·(2π)^{nρ_n}/(Γ_n(α)Γ_n(β)),
/// quadrature branch; falls back to the closed form at s = 0, κ = ρ_n,
/// T positive definite.
pub fn whittaker_real(
    t: &[f64],
    point: &RadialPoint,
    s: f64,
    kappa: f64,
    spec: &QuadratureSpec,
) -> Result<(Complex64, f64)> {
    let n = point.n;
    let params = ConfluentParams { n, kappa, s };
    let (alpha, beta, rho) = (params.alpha(), params.beta(), params.rho());
    if beta <= rho - 1.0 || alpha <= rho - 1.0 {
        // outside the η convergence strip: only the closed form is available
        if s == 0.0 && kappa == rho {
            return Ok((whitt0_value(n, kappa, t, point)?, 0.0));
        }
        return Err(Error::Domain(
            "η diverges at these parameters; no closed form applies".into(),
        ));
    }
    let nf = n as f64;
    let two_y: Vec<f64> = point.y.iter().map(|v| 2.0 * v).collect();
    let pi_t: Vec<f64> = t.iter().map(|v| PI * v).collect();
    let e = eta(n, &two_y, &pi_t, alpha, beta, spec)?;
    // i^{n(β−α)} = i^{−nκ} = e^{−iπnκ/2}
    let phase = Complex64::from_polar(1.0, -PI * nf * kappa / 2.0);
    let c = phase * 2f64.powf(nf * (nf - 1.0) / 4.0 - nf * (rho - 1.0))
        * (2.0 * PI).powf(nf * rho)
        / (siegel_gamma_real(n, alpha)? * siegel_gamma_real(n, beta)?);
    let scale = point.a_det().powf(s + rho);
    Ok((c * scale * e.value, (c * scale).norm() * e.err_estimate))
}

/// Vanishing-order lower bound ⌊(j+1)/2⌋ at s = 0 for sig(T) = (n−j, j),
/// κ = ρ_n.
pub fn whittaker_vanishing_bound(j: usize) -> usize {
    (j + 1) / 2
}

/// W′_T(1, 0, Φ₁) for n = 1, κ = 1, T < 0:
/// −iπ·e^{−2π|T|}·U(1, 1, 4π|T|). Only the 1/Γ(β) factor of the closed form
/// contributes at s = 0.
pub fn whittaker_derivative_n1(t: f64, spec: &QuadratureSpec) -> Result<(Complex64, f64)> {
    if t >= 0.0 {
        return Err(Error::Domain(
            "W_T(1,0) does not vanish for T ≥ 0; derivative route needs T < 0".into(),
        ));
    }
    let z = 4.0 * PI * t.abs();
    let u = kummer_u(1.0, 1.0, z, spec)?;
    let m = PI * (-2.0 * PI * t.abs()).exp();
    Ok((Complex64::new(0.0, -m * u.value), m * u.err_estimate))
}

/// Cross-check of `whittaker_derivative_n1` against W(s)/s extrapolated to
/// s = 0 from quadrature values inside the convergence strip. Returns the
/// relative residual.
pub fn whittaker_derivative_n1_crosscheck(t: f64, spec: &QuadratureSpec) -> Result<f64> {
    let (closed, _) = whittaker_derivative_n1(t, spec)?;
    let nodes = [0.25, 0.5, 0.75, 1.0];
    let point = RadialPoint::scalar(1.0);
    let mut vals = Vec::new();
    for &s in &nodes {
        let (w, _) = whittaker_real(&[t], &point, s, 1.0, spec)?;
        vals.push(w / s);
    }
    // Lagrange extrapolation to s = 0
    let mut extr = Complex64::new(0.0, 0.0);
    for i in 0..nodes.len() {
        let mut l = 1.0;
        for j in 0..nodes.len() {
            if i != j {
                l *= (0.0 - nodes[j]) / (nodes[i] - nodes[j]);
            }
        }
        extr += vals[i] * l;
    }
    Ok((extr - closed).norm() / closed.norm())
}

/// Evaluations of e^{T₁y₁}·y₁^β·η along a y₁-schedule against the closed
/// limit, with raw residuals and a Richardson-extrapolated one (the limit is
/// approached with an O(1/y₁) correction, which two doubling steps remove).
#[derive(Debug, Clone)]
pub struct AsymptoticCheck {
    pub lhs: Vec<f64>,
    pub rhs: f64,
    pub raw_residuals: Vec<f64>,
    pub richardson_residual: f64,
}

/// Asymptotic limit of Shimura's η: for n = 1 the limit is Γ(β)(2T₁)^{α−1}
/// (or 0 for T₁ < 0); for n = 2 with y = [[y₁, y₁₂],[y₁₂, y₂]] the limit is
/// e^{−2T₁₂y₁₂+(T̃₂−T₂)y₂}·Γ(β+1−ρ_n)·√π·(2T₁)^{α−ρ_n}·η⁽¹⁾(y₂, T̃₂, α−½, β)
/// with T̃₂ = T₂ − T₁₂²/T₁.
pub fn eta_asymptotic_check(
    n: usize,
    t: &[f64],
    alpha: f64,
    beta: f64,
    schedule: &[f64],
    y_rest: &[f64],
    spec: &QuadratureSpec,
) -> Result<AsymptoticCheck> {
    let rho = (n as f64 + 1.0) / 2.0;
    if beta <= rho - 0.5 {
        return Err(Error::Domain("need Re β > ρ_n − 1/2".into()));
    }
    if schedule.len() < 2 {
        return Err(Error::Domain("schedule needs at least two points".into()));
    }
    let (rhs, t1) = match n {
        1 => {
            let t1 = t[0];
            if t1 == 0.0 {
                return Err(Error::Domain("T₁ = 0 is degenerate".into()));
            }
            let rhs = if t1 > 0.0 {
                gamma_real(beta) * (2.0 * t1).powf(alpha - 1.0)
            } else {
                0.0
            };
            (rhs, t1)
        }
        2 => {
            let (t1, t12, t2) = (t[0], t[1], t[3]);
            if t1 <= 0.0 {
                return Err(Error::Domain("the n = 2 check needs T₁ > 0".into()));
            }
            let (y12, y2) = (y_rest[0], y_rest[1]);
            let tt2 = t2 - t12 * t12 / t1;
            let inner = eta1(y2, tt2, alpha - 0.5, beta, spec)?.value;
            let rhs = (-2.0 * t12 * y12 + (tt2 - t2) * y2).exp()
                * gamma_real(beta + 1.0 - rho)
                * PI.sqrt()
                * (2.0 * t1).powf(alpha - rho)
                * inner;
            (rhs, t1)
        }
        _ => return Err(Error::Unsupported(format!("n = {n}"))),
    };
    let mut lhs = Vec::new();
    for &y1 in schedule {
        let v = match n {
            1 => eta1(y1, t1, alpha, beta, spec)?.value,
            _ => {
                let y = [y1, y_rest[0], y_rest[0], y_rest[1]];
                eta(2, &y, t, alpha, beta, spec)?.value
            }
        };
        lhs.push((t1 * y1).exp() * y1.powf(beta) * v);
    }
    let scale = rhs.abs().max(1.0);
    let raw_residuals: Vec<f64> = lhs.iter().map(|v| (v - rhs).abs() / scale).collect();
    let m = lhs.len();
    let (ya, yb) = (schedule[m - 2], schedule[m - 1]);
    // L(y) = L∞ + c/y ⇒ L∞ = (yb·L(yb) − ya·L(ya))/(yb − ya)
    let rich = (yb * lhs[m - 1] - ya * lhs[m - 2]) / (yb - ya);
    let richardson_residual = (rich - rhs).abs() / scale;
    Ok(AsymptoticCheck { lhs, rhs, raw_residuals, richardson_residual })
}

/// e(x) = e^{2πix}
pub fn e_of(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * x)
}

/// Covariance residual at n = 1: det(v)^{−κ/2}·W_T(g_τ, s) against
/// e(Tu)·|a|^{−s}·W_{aTa}(1, s) for τ = u + iv, a = √v.
pub fn i11_residual(t: f64, tau: Complex64, s: f64, spec: &QuadratureSpec) -> Result<f64> {
    let (u, v) = (tau.re, tau.im);
    if v <= 0.0 {
        return Err(Error::Domain("τ must lie in the upper half plane".into()));
    }
    let kappa = 1.0;
    let a = v.sqrt();
    let (w_at_a, _) = whittaker_real(&[t], &RadialPoint::scalar(v), s, kappa, spec)?;
    let lhs = v.powf(-kappa / 2.0) * e_of(t * u) * w_at_a;
    let (w_scaled, _) = whittaker_real(&[a * t * a], &RadialPoint::scalar(1.0), s, kappa, spec)?;
    let rhs = e_of(t * u) * a.powf(-s) * w_scaled;
    Ok((lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1e-300))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whitt0_examples() {
        // n=1, T=1, κ=1: (−2πi)e^{−2π}
        let p = RadialPoint::scalar(1.0);
        let v = whitt0_value(1, 1.0, &[1.0], &p).unwrap();
        let expect = Complex64::new(0.0, -2.0 * PI) * (-2.0 * PI).exp();
        assert!((v - expect).norm() < 1e-14);

        // n=2, T=I₂, κ=3/2: (−2πi)³·2^{−1/2}/Γ₂(3/2)·e^{−4π} = 8√2π²i·e^{−4π}
        let p = RadialPoint::from_flat(2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let v = whitt0_value(2, 1.5, &[1.0, 0.0, 0.0, 1.0], &p).unwrap();
        let expect = Complex64::new(0.0, 8.0 * 2f64.sqrt() * PI * PI) * (-4.0 * PI).exp();
        assert!((v - expect).norm() < 1e-12 * expect.norm(), "{v} vs {expect}");
    }

    #[test]
    fn vanishing_bound() {
        assert_eq!(whittaker_vanishing_bound(0), 0);
        assert_eq!(whittaker_vanishing_bound(1), 1);
        assert_eq!(whittaker_vanishing_bound(2), 1);
        assert_eq!(whittaker_vanishing_bound(3), 2);
    }

    #[test]
    fn derivative_requires_negative() {
        let spec = QuadratureSpec::default();
        assert!(whittaker_derivative_n1(1.0, &spec).is_err());
        let (v, _) = whittaker_derivative_n1(-1.0, &spec).unwrap();
        assert!(v.re.abs() < 1e-15 && v.im < 0.0);
    }

    #[test]
    fn derivative_crosscheck() {
        let spec = QuadratureSpec::default();
        let res = whittaker_derivative_n1_crosscheck(-1.0, &spec).unwrap();
        assert!(res < 1e-3, "residual {res}");
    }

    #[test]
    fn identity_transformation() {
        // b = 0, a = 1 in the covariance law leaves the value unchanged
        let spec = QuadratureSpec::default();
        let res = i11_residual(0.8, Complex64::new(0.0, 1.0), 1.0, &spec).unwrap();
        assert!(res < 1e-10, "residual {res}");
    }

    #[test]
    fn asymptotic_n1() {
        let spec = QuadratureSpec::default();
        // T=2, α=2, β=3/2 → Γ(3/2)·4
        let c =
            eta_asymptotic_check(1, &[2.0], 2.0, 1.5, &[12.5, 25.0, 50.0], &[], &spec).unwrap();
        assert!((c.rhs - gamma_real(1.5) * 4.0).abs() < 1e-12);
        assert!(c.richardson_residual < 1e-6, "rich {}", c.richardson_residual);
        // T=−1 → limit 0
        let c =
            eta_asymptotic_check(1, &[-1.0], 2.0, 1.5, &[25.0, 50.0], &[], &spec).unwrap();
        assert_eq!(c.rhs, 0.0);
        assert!(c.raw_residuals.last().unwrap() < &1e-4);
    }
}
