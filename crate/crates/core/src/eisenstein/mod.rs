//! Global assembly: Diff sets and order bounds, the per-place factorization
//! of nonsingular coefficients E_T and central derivatives E′_T of the
//! incoherent Eisenstein series, and the degree-prediction reports.

pub mod constants;

use crate::archwhittaker::whittaker::{whitt0_value, whittaker_derivative_n1, RadialPoint};
use crate::archwhittaker::QuadratureSpec;
use crate::error::{Error, Result};
use crate::localdensity::{height_ratio, vol_ratio, whittaker_finite, Provenance};
use crate::quadform::{diff_set, LatticeGram, MomentMatrix, Place};
use crate::rat::{kronecker, odd_prime_support, rat_to_f64, Rat};
use constants::{dirichlet_l, fundamental_discriminant, zeta_even};
use num::complex::Complex64;
use num::Signed;

/// The incoherent collection C attached to a lattice L on a rational space of
/// signature (m, 2): C_p = (L ⊗ Z_p classes) at finite places, positive
/// definite at ∞.
#[derive(Debug, Clone)]
pub struct IncoherentDatum {
    pub lattice: LatticeGram,
    pub m: usize,
    /// odd primes dividing det L where L ⊗ Z_p is NOT unimodular (reported;
    /// empty is required by the closed-form fast paths)
    pub non_unimodular_odd: Vec<u64>,
}

impl IncoherentDatum {
    pub fn new(lattice: LatticeGram) -> Result<Self> {
        let diag = lattice.quadratic_diag();
        let pos = diag.iter().filter(|d| d.is_positive()).count();
        let neg = diag.iter().filter(|d| d.is_negative()).count();
        if neg != 2 || pos + neg != lattice.rank() {
            return Err(Error::Domain(format!(
                "signature must be (m,2), got ({pos},{neg})"
            )));
        }
        let mut non_unimodular_odd = Vec::new();
        for p in odd_prime_support(&lattice.det()) {
            if !lattice.is_p_unimodular(p) {
                non_unimodular_odd.push(p);
            }
        }
        Ok(IncoherentDatum { lattice, m: pos, non_unimodular_odd })
    }

    /// genus n = m + 1
    pub fn n(&self) -> usize {
        self.m + 1
    }

    /// weight κ = (m + 2)/2 = ρ_n
    pub fn kappa(&self) -> f64 {
        (self.m as f64 + 2.0) / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorProvenance {
    ClosedForm,
    Counting,
    Quadrature,
    SymbolicUnit,
}

impl std::fmt::Display for FactorProvenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FactorProvenance::ClosedForm => "closed-form",
            FactorProvenance::Counting => "counting",
            FactorProvenance::Quadrature => "quadrature",
            FactorProvenance::SymbolicUnit => "symbolic-unit",
        };
        write!(f, "{s}")
    }
}

/// One local factor of E_T with its provenance; `derivative` is set on the
/// unique Diff place.
#[derive(Debug, Clone)]
pub struct PlaceFactor {
    pub place: Place,
    pub value: Complex64,
    pub exact: Option<String>,
    pub derivative: Option<Complex64>,
    pub derivative_exact: Option<String>,
    pub provenance: FactorProvenance,
}

/// The assembled central derivative E′_T(τ, 0) with its factorization.
#[derive(Debug, Clone)]
pub struct CoefficientReport {
    pub diff: Vec<Place>,
    pub order_lower_bound: usize,
    pub factors: Vec<PlaceFactor>,
    pub euler_tail: f64,
    pub euler_tail_err: f64,
    /// None when the archimedean derivative is symbolically unavailable
    /// (Diff = {∞}, n ≥ 2)
    pub assembled_derivative: Option<Complex64>,
    /// the p = 2 unit factor is carried symbolically (product-formula
    /// convention), never numerically
    pub two_adic_symbolic: bool,
    /// q^T = e(tr(Tτ)) at the supplied τ
    pub q_t: Complex64,
}

/// ord_{s=0} E_T ≥ |Diff(C, T)|.
pub fn order_lower_bound(datum: &IncoherentDatum, t: &MomentMatrix) -> Result<usize> {
    Ok(diff_set(&datum.lattice.mat, t)?.len())
}

/// Completed good-prime Euler tail: the product over odd primes q outside
/// `excluded` of the closed-form factor
/// (1 − δ_L(q)q^{−l/2})·∏_{f even ∈ [l−n+1, l−1]}(1 − q^{−f}),
/// expressed through exact ζ(2k) and a quadratic Dirichlet L-value. Returns
/// (value, err_estimate). `excluded` must contain 2 and every separately
/// treated odd prime.
pub fn euler_tail(l: usize, n: usize, det_s: &Rat, excluded: &[u64]) -> Result<(f64, f64)> {
    if n >= l {
        return Err(Error::Domain("need n < l for the tail pattern".into()));
    }
    let mut value = 1.0f64;
    let mut rel_err = 0.0f64;
    // family ∏(1 − q^{−f}) for even f in [l−n+1, l−1]
    let lo = l as i64 - n as i64 + 1;
    let mut f = if lo % 2 == 0 { lo } else { lo + 1 };
    while f <= l as i64 - 1 {
        let zeta = zeta_even(f as usize)?.complex_value().re;
        let mut correction = 1.0f64;
        for &q in excluded {
            correction *= 1.0 - (q as f64).powi(-(f as i32));
        }
        value /= zeta * correction;
        f += 2;
    }
    // δ_L family for even l: character of D̃ from (−1)^{l(l−1)/2}·det S
    if l % 2 == 0 {
        let sign = if (l * (l - 1) / 2) % 2 == 0 { 1 } else { -1 };
        let disc = fundamental_discriminant(&(crate::rat::rat_int(sign) * det_s))?;
        let s_exp = (l / 2) as u32;
        let (lval, lerr) = if disc == 1 {
            if s_exp % 2 != 0 {
                return Err(Error::Unsupported(
                    "trivial character with odd exponent: divergent tail".into(),
                ));
            }
            (zeta_even(s_exp as usize)?.complex_value().re, 0.0)
        } else {
            dirichlet_l(s_exp, disc)?
        };
        let mut correction = 1.0f64;
        for &q in excluded {
            let chi = if disc == 1 { 1 } else { kronecker(disc, q as i64) };
            correction *= 1.0 - chi as f64 * (q as f64).powi(-(s_exp as i32));
        }
        value /= lval * correction;
        rel_err += lerr / lval.abs().max(1e-300);
    }
    Ok((value, rel_err * value.abs()))
}

fn flat_f64(t: &MomentMatrix) -> Vec<f64> {
    t.mat.to_f64().into_iter().flatten().collect()
}

fn trace_t_y(n: usize, t: &[f64], y_diag: &[f64]) -> f64 {
    (0..n).map(|i| t[i * n + i] * y_diag[i]).sum()
}

/// Per-place factorization of E′_T(τ, 0, λ(φ_L) ⊗ Φ_κ). τ is supplied as the
/// diagonal imaginary part y (τ = i·diag(y)).
pub fn coefficient_derivative(
    datum: &IncoherentDatum,
    t: &MomentMatrix,
    tau_im_diag: &[f64],
) -> Result<CoefficientReport> {
    let n = t.rank();
    if n != datum.n() {
        return Err(Error::Domain(format!(
            "T has rank {n} but the datum has n = {}",
            datum.n()
        )));
    }
    if tau_im_diag.len() != n || tau_im_diag.iter().any(|v| *v <= 0.0) {
        return Err(Error::Domain("τ needs a positive diagonal imaginary part".into()));
    }
    t.require_nonsingular()?;
    let l = datum.lattice.rank();
    debug_assert_eq!(l, n + 1);
    let kappa = datum.kappa();
    let t_flat = flat_f64(t);
    let q_t = Complex64::new((-2.0 * std::f64::consts::PI * trace_t_y(n, &t_flat, tau_im_diag)).exp(), 0.0);

    let diff = diff_set(&datum.lattice.mat, t)?;
    if diff.len() > 1 {
        // Theorem: both the coefficient and its derivative vanish
        return Ok(CoefficientReport {
            order_lower_bound: diff.len(),
            diff,
            factors: Vec::new(),
            euler_tail: 1.0,
            euler_tail_err: 0.0,
            assembled_derivative: Some(Complex64::new(0.0, 0.0)),
            two_adic_symbolic: true,
            q_t,
        });
    }
    let diff_place = diff[0];
    if diff_place == Place::Finite(2) {
        return Err(Error::Unsupported("Diff = {2}: dyadic density theory".into()));
    }

    // odd primes needing individual treatment: support of det(2T) and det S
    let det2t = t.bilinear_gram().det();
    let det_s = datum.lattice.det();
    let mut bad: Vec<u64> = odd_prime_support(&det2t);
    for q in odd_prime_support(&det_s) {
        if !bad.contains(&q) {
            bad.push(q);
        }
    }
    bad.sort_unstable();

    let spec = QuadratureSpec::default();
    let mut factors: Vec<PlaceFactor> = Vec::new();
    let mut excluded: Vec<u64> = vec![2];
    let mut product = Complex64::new(1.0, 0.0);
    let mut derivative: Option<Complex64> = None;
    let mut arch_unavailable = false;

    match diff_place {
        Place::Finite(p) => {
            // derivative factor at p: (ν·log p)·W_{T^u,p}(1,0)
            let hr = height_ratio(p, &datum.lattice, t)?;
            let (pref_u, alpha_u1, _) = vol_ratio(p, &datum.lattice)?;
            let w_u = pref_u.value() * rat_to_f64(&alpha_u1);
            let d = w_u * rat_to_f64(&hr.coeff) * (p as f64).ln();
            derivative = Some(d);
            factors.push(PlaceFactor {
                place: Place::Finite(p),
                value: Complex64::new(0.0, 0.0),
                exact: Some("W_{T,p}(1,0) = 0 (Diff place)".into()),
                derivative: Some(d),
                derivative_exact: Some(format!(
                    "{} * log {p} * [{} * prefactor(p^({}/2), e({}/8))]",
                    hr.coeff, alpha_u1, pref_u.sqrtp_half_exponent, pref_u.eighth.numerator_mod_8
                )),
                provenance: FactorProvenance::Counting,
            });
            excluded.push(p);
            // archimedean factor: T is positive definite on the Diff={p} branch
            let y = RadialPoint::from_diag(tau_im_diag)?;
            let arch = whitt0_value(n, kappa, &t_flat, &y)?;
            product *= arch;
            factors.push(PlaceFactor {
                place: Place::Infinity,
                value: arch,
                exact: None,
                derivative: None,
                derivative_exact: None,
                provenance: FactorProvenance::ClosedForm,
            });
            for &q in &bad {
                if q == p {
                    continue;
                }
                let wf = whittaker_finite(q, &datum.lattice, t)?;
                let v = wf.numeric_value_at_0();
                product *= v;
                factors.push(PlaceFactor {
                    place: Place::Finite(q),
                    value: v,
                    exact: Some(format!(
                        "{} * prefactor(q^({}/2), e({}/8))",
                        wf.value_at_0, wf.prefactor.sqrtp_half_exponent,
                        wf.prefactor.eighth.numerator_mod_8
                    )),
                    derivative: None,
                    derivative_exact: None,
                    provenance: match wf.poly.provenance {
                        Provenance::ClosedForm => FactorProvenance::ClosedForm,
                        Provenance::Interpolated => FactorProvenance::Counting,
                    },
                });
                excluded.push(q);
            }
        }
        Place::Infinity => {
            if n == 1 {
                let t1 = t_flat[0];
                let (d, _) = whittaker_derivative_n1(t1, &spec)?;
                derivative = Some(d);
                factors.push(PlaceFactor {
                    place: Place::Infinity,
                    value: Complex64::new(0.0, 0.0),
                    exact: Some("W_{T,∞}(1,0) = 0 (Diff place)".into()),
                    derivative: Some(d),
                    derivative_exact: Some(format!(
                        "-iπ·e^(-2π|T|)·U(1,1,4π|T|) at T = {t1}"
                    )),
                    provenance: FactorProvenance::Quadrature,
                });
            } else {
                arch_unavailable = true;
                factors.push(PlaceFactor {
                    place: Place::Infinity,
                    value: Complex64::new(0.0, 0.0),
                    exact: Some("archimedean derivative symbolic-unavailable for n ≥ 2".into()),
                    derivative: None,
                    derivative_exact: None,
                    provenance: FactorProvenance::SymbolicUnit,
                });
            }
            for &q in &bad {
                let wf = whittaker_finite(q, &datum.lattice, t)?;
                let v = wf.numeric_value_at_0();
                product *= v;
                factors.push(PlaceFactor {
                    place: Place::Finite(q),
                    value: v,
                    exact: Some(format!(
                        "{} * prefactor(q^({}/2), e({}/8))",
                        wf.value_at_0, wf.prefactor.sqrtp_half_exponent,
                        wf.prefactor.eighth.numerator_mod_8
                    )),
                    derivative: None,
                    derivative_exact: None,
                    provenance: match wf.poly.provenance {
                        Provenance::ClosedForm => FactorProvenance::ClosedForm,
                        Provenance::Interpolated => FactorProvenance::Counting,
                    },
                });
                excluded.push(q);
            }
        }
    }
    // p = 2: symbolic unit, numeric contribution 1 by the product-formula
    // convention
    factors.push(PlaceFactor {
        place: Place::Finite(2),
        value: Complex64::new(1.0, 0.0),
        exact: Some("unit fixed by the global product formula".into()),
        derivative: None,
        derivative_exact: None,
        provenance: FactorProvenance::SymbolicUnit,
    });
    excluded.sort_unstable();
    excluded.dedup();
    let (tail, tail_err) = euler_tail(l, n, &det_s, &excluded)?;

    // invariant: exactly one derivative factor when |Diff| = 1
    debug_assert_eq!(
        factors.iter().filter(|f| f.derivative.is_some()).count(),
        usize::from(!arch_unavailable)
    );
    let assembled = if arch_unavailable {
        None
    } else {
        Some(derivative.unwrap() * product * tail)
    };
    Ok(CoefficientReport {
        order_lower_bound: diff.len(),
        diff,
        factors,
        euler_tail: tail,
        euler_tail_err: tail_err,
        assembled_derivative: assembled,
        two_adic_symbolic: true,
        q_t,
    })
}

/// Ht_p·log p together with the point-count shape
/// |Z(T)| = counting_constant × W_{T,f}(1, 0, λ(φ_Λ̂)); the global volume
/// ratio stays the user-supplied constant.
#[derive(Debug, Clone)]
pub struct DegreePrediction {
    pub p: u64,
    pub height_coeff: Rat,
    pub height_value: f64,
    pub counting_constant: Rat,
    /// finite Whittaker product with the p-factor taken on the type-2 vertex
    /// lattice; None when that factor is unavailable
    pub finite_whittaker: Option<Complex64>,
    pub finite_err: f64,
}

pub fn degree_prediction(
    datum: &IncoherentDatum,
    t: &MomentMatrix,
    counting_constant: Rat,
) -> Result<DegreePrediction> {
    let diff = diff_set(&datum.lattice.mat, t)?;
    let p = match diff.as_slice() {
        [Place::Finite(p)] if *p != 2 => *p,
        [Place::Infinity] => {
            return Err(Error::Domain("finite-place prediction only".into()))
        }
        _ => return Err(Error::Domain("need Diff = {p} with p odd".into())),
    };
    let n = t.rank();
    let hr = height_ratio(p, &datum.lattice, t)?;
    // finite product: Λ̂ agrees with L away from p and is the type-2 vertex
    // lattice at p
    let det2t = t.bilinear_gram().det();
    let det_s = datum.lattice.det();
    let mut excluded: Vec<u64> = vec![2, p];
    let mut product = Complex64::new(1.0, 0.0);
    for q in odd_prime_support(&det2t)
        .into_iter()
        .chain(odd_prime_support(&det_s))
    {
        if q == p || excluded.contains(&q) {
            continue;
        }
        let wf = whittaker_finite(q, &datum.lattice, t)?;
        product *= wf.numeric_value_at_0();
        excluded.push(q);
    }
    excluded.sort_unstable();
    excluded.dedup();
    let (tail, tail_err) = euler_tail(datum.lattice.rank(), n, &det_s, &excluded)?;
    let p_factor = crate::localdensity::vertex_lattice_gram(p, 2, n, &det_s)
        .and_then(|v| whittaker_finite(p, &v.gram, t))
        .map(|wf| wf.numeric_value_at_0())
        .ok();
    Ok(DegreePrediction {
        p,
        height_value: rat_to_f64(&hr.coeff) * (p as f64).ln(),
        height_coeff: hr.coeff,
        counting_constant,
        finite_whittaker: p_factor.map(|f| f * product * tail),
        finite_err: tail_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::SymRat;
    use crate::rat::{rat, rat_int};

    fn split_lattice() -> LatticeGram {
        // H ⊕ H, signature (2,2), det 1
        let h = LatticeGram::hyperbolic_plane();
        h.direct_sum(&h)
    }

    #[test]
    fn datum_invariants() {
        let d = IncoherentDatum::new(split_lattice()).unwrap();
        assert_eq!(d.m, 2);
        assert_eq!(d.n(), 3);
        assert_eq!(d.kappa(), 2.0);
        assert!(d.non_unimodular_odd.is_empty());
        // positive definite lattice is rejected
        assert!(IncoherentDatum::new(LatticeGram::from_quadratic_diag_i64(&[1, 1])).is_err());
    }

    #[test]
    fn order_bound_examples() {
        let d = IncoherentDatum::new(split_lattice()).unwrap();
        let t = MomentMatrix::from_diag_i64(&[1, 1, 3]);
        assert_eq!(order_lower_bound(&d, &t).unwrap(), 1);
    }

    #[test]
    fn euler_tail_doubling() {
        // truncating at B vs 2B agrees within the completed form
        let det_s = rat_int(1);
        let (full, _) = euler_tail(4, 3, &det_s, &[2, 3]).unwrap();
        // brute product over odd primes q ≤ 3000, q ≠ 3 of (1−q^{−2})²
        let mut brute = 1.0f64;
        let mut brute_half = 1.0f64;
        let is_prime = |q: u64| (2..q).take_while(|d| d * d <= q).all(|d| q % d != 0);
        for q in (5..3000u64).filter(|q| is_prime(*q)) {
            let f = (1.0 - (q as f64).powi(-2)).powi(2);
            brute *= f;
            if q < 1500 {
                brute_half *= f;
            }
        }
        assert!((full - brute).abs() < 1e-4, "{full} vs {brute}");
        assert!((full - brute).abs() < (full - brute_half).abs() + 1e-12);
    }

    #[test]
    fn vanishing_for_large_diff() {
        // T negative definite in several coordinates forces ∞ ∈ Diff along
        // with finite places: |Diff| > 1 → assembled 0
        let d = IncoherentDatum::new(split_lattice()).unwrap();
        let t = MomentMatrix::new(SymRat::diag_i64(&[-1, -1, -3]));
        let rep = coefficient_derivative(&d, &t, &[1.0, 1.0, 1.0]).unwrap();
        assert!(rep.diff.len() > 1);
        assert_eq!(rep.assembled_derivative, Some(Complex64::new(0.0, 0.0)));
        assert!(rep.factors.is_empty());
    }

    #[test]
    fn full_pipeline_signature_2_2() {
        let d = IncoherentDatum::new(split_lattice()).unwrap();
        let t = MomentMatrix::from_diag_i64(&[1, 1, 3]);
        let rep = coefficient_derivative(&d, &t, &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(rep.diff, vec![Place::Finite(3)]);
        assert_eq!(rep.order_lower_bound, 1);
        assert!(rep.two_adic_symbolic);
        let deriv_factors: Vec<_> =
            rep.factors.iter().filter(|f| f.derivative.is_some()).collect();
        assert_eq!(deriv_factors.len(), 1);
        assert_eq!(deriv_factors[0].place, Place::Finite(3));
        // the derivative factor is exactly 1·log 3 × W_{T^u,3}
        assert!(deriv_factors[0]
            .derivative_exact
            .as_ref()
            .unwrap()
            .starts_with("1 * log 3"));
        let a = rep.assembled_derivative.unwrap();
        assert!(a.norm() > 0.0 && a.is_finite());
        // determinism
        let rep2 = coefficient_derivative(&d, &t, &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(rep2.assembled_derivative.unwrap(), a);
    }

    #[test]
    fn diff_infinity_m0() {
        // m = 0: V = ⟨−2a, −2b⟩ with a = b = 1: L negative definite rank 2,
        // T < 0 → Diff = {∞}
        let l = LatticeGram::from_quadratic_diag_i64(&[-1, -1]);
        let d = IncoherentDatum::new(l).unwrap();
        assert_eq!(d.n(), 1);
        let t = MomentMatrix::new(SymRat::from_diag(&[rat(-1, 1)]));
        let rep = coefficient_derivative(&d, &t, &[1.0]).unwrap();
        assert_eq!(rep.diff, vec![Place::Infinity]);
        let a = rep.assembled_derivative.unwrap();
        assert!(a.norm() > 0.0);
        // the archimedean derivative is −iπe^{−2π}U(1,1,4π) times positive
        // real finite data: phase on the negative imaginary axis
        assert!(a.im < 0.0 && a.re.abs() < 1e-10 * a.norm());
    }

    #[test]
    fn degree_prediction_example() {
        let d = IncoherentDatum::new(split_lattice()).unwrap();
        let t = MomentMatrix::from_diag_i64(&[1, 1, 3]);
        let rep = degree_prediction(&d, &t, rat(1, 2)).unwrap();
        assert_eq!(rep.p, 3);
        assert_eq!(rep.height_coeff, rat_int(1)); // Ht·log p = 1·log 3
        assert_eq!(rep.counting_constant, rat(1, 2));
        // Diff = {∞} rejected
        let l = LatticeGram::from_quadratic_diag_i64(&[-1, -1]);
        let d0 = IncoherentDatum::new(l).unwrap();
        let t0 = MomentMatrix::new(SymRat::from_diag(&[rat(-1, 1)]));
        assert!(matches!(
            degree_prediction(&d0, &t0, rat(1, 1)),
            Err(Error::Domain(_))
        ));
    }
}
