//! Exact constants: monomials q·e(k/8)·2^{a/2}·π^{b/2}, the archimedean
//! constants B_{n,∞}, special orthogonal volumes, exact ζ(2k), and quadratic
//! Dirichlet L-values by series.

use crate::error::{Error, Result};
use crate::quadform::EighthRoot;
use crate::rat::{kronecker, rat_int, Rat};
use num::bigint::BigInt;
use num::complex::Complex64;
use num::{One, Signed, Zero};

/// A constant of the exact shape q·e(k/8)·2^{a/2}·π^{b/2} with q rational.
/// Canonical form: q > 0 (sign folded into e(4/8) = −1), a ∈ {0, 1}.
/// Representation is unique, so equality is field-wise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactConstant {
    pub rat: Rat,
    pub eighth: EighthRoot,
    pub two_half: i64,
    pub pi_half: i64,
}

impl ExactConstant {
    pub fn one() -> Self {
        ExactConstant { rat: Rat::one(), eighth: EighthRoot::one(), two_half: 0, pi_half: 0 }
    }

    pub fn from_rat(q: Rat) -> Self {
        let mut c = ExactConstant { rat: q, ..ExactConstant::one() };
        c.normalize();
        c
    }

    pub fn e_eighth(k: i64) -> Self {
        ExactConstant { eighth: EighthRoot::new(k), ..ExactConstant::one() }
    }

    pub fn two_pow_half(a: i64) -> Self {
        let mut c = ExactConstant { two_half: a, ..ExactConstant::one() };
        c.normalize();
        c
    }

    pub fn pi_pow_half(b: i64) -> Self {
        ExactConstant { pi_half: b, ..ExactConstant::one() }
    }

    fn normalize(&mut self) {
        if self.rat.is_zero() {
            self.eighth = EighthRoot::one();
            self.two_half = 0;
            self.pi_half = 0;
            return;
        }
        if self.rat.is_negative() {
            self.rat = -self.rat.clone();
            self.eighth = self.eighth.mul(EighthRoot::new(4));
        }
        // fold whole powers of 2 out of the half-exponent
        let whole = self.two_half.div_euclid(2);
        self.two_half -= 2 * whole;
        self.rat *= Rat::from(BigInt::from(2)).pow(whole as i32);
    }

    pub fn mul(&self, o: &ExactConstant) -> ExactConstant {
        let mut c = ExactConstant {
            rat: &self.rat * &o.rat,
            eighth: self.eighth.mul(o.eighth),
            two_half: self.two_half + o.two_half,
            pi_half: self.pi_half + o.pi_half,
        };
        c.normalize();
        c
    }

    pub fn div(&self, o: &ExactConstant) -> Result<ExactConstant> {
        if o.rat.is_zero() {
            return Err(Error::Domain("division by zero constant".into()));
        }
        let mut c = ExactConstant {
            rat: &self.rat / &o.rat,
            eighth: self.eighth.mul(o.eighth.inverse()),
            two_half: self.two_half - o.two_half,
            pi_half: self.pi_half - o.pi_half,
        };
        c.normalize();
        Ok(c)
    }

    pub fn complex_value(&self) -> Complex64 {
        let m = crate::rat::rat_to_f64(&self.rat)
            * 2f64.powf(self.two_half as f64 / 2.0)
            * std::f64::consts::PI.powf(self.pi_half as f64 / 2.0);
        self.eighth.value() * m
    }
}

impl std::fmt::Display for ExactConstant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} * e({}/8) * 2^({}/2) * pi^({}/2)",
            self.rat, self.eighth.numerator_mod_8, self.two_half, self.pi_half
        )
    }
}

/// Γ(j/2) for j ≥ 1 as an exact constant: (j/2 − 1)! for even j,
/// (2m)!/(4^m·m!)·√π for j = 2m+1.
pub fn gamma_half(j: i64) -> Result<ExactConstant> {
    if j < 1 {
        return Err(Error::Domain("Γ(j/2) needs j ≥ 1".into()));
    }
    if j % 2 == 0 {
        let mut f = BigInt::one();
        for i in 1..(j / 2) {
            f *= i;
        }
        Ok(ExactConstant::from_rat(Rat::from(f)))
    } else {
        let m = (j - 1) / 2;
        let mut num = BigInt::one();
        for i in 1..=(2 * m) {
            num *= i;
        }
        let mut den = BigInt::from(4).pow(m as u32);
        for i in 1..=m {
            den *= i;
        }
        Ok(ExactConstant::from_rat(Rat::new(num, den)).mul(&ExactConstant::pi_pow_half(1)))
    }
}

/// B_{n,∞} = e((n²+n−4)/8)·(n−1)!·∏_{j=1}^{n−1}Γ(j/2) / (2^{n−2}(2π)^{n(n+3)/4}).
#[derive(Debug, Clone)]
pub struct ArchConstant {
    pub n: usize,
    pub exact: ExactConstant,
}

pub fn b_infinity(n: usize) -> Result<ArchConstant> {
    if n < 1 {
        return Err(Error::Domain("b_infinity needs n ≥ 1".into()));
    }
    let ni = n as i64;
    let mut c = ExactConstant::e_eighth(ni * ni + ni - 4);
    let mut fact = BigInt::one();
    for i in 1..ni {
        fact *= i;
    }
    c = c.mul(&ExactConstant::from_rat(Rat::from(fact)));
    for j in 1..ni {
        c = c.mul(&gamma_half(j)?);
    }
    // divide by 2^{n−2}·(2π)^{n(n+3)/4}
    let den = ExactConstant::two_pow_half(2 * (ni - 2))
        .mul(&ExactConstant::two_pow_half(ni * (ni + 3) / 2))
        .mul(&ExactConstant::pi_pow_half(ni * (ni + 3) / 2));
    c = c.div(&den)?;
    Ok(ArchConstant { n, exact: c })
}

/// The quotient law B_n/B_{n−1} = i^n·Γ(ρ_n)/(2π)^{ρ_n}, ρ_n = (n+1)/2.
pub fn b_quotient_rhs(n: usize) -> Result<ExactConstant> {
    let ni = n as i64;
    let num = ExactConstant::e_eighth(2 * ni).mul(&gamma_half(ni + 1)?);
    let den = ExactConstant::two_pow_half(ni + 1).mul(&ExactConstant::pi_pow_half(ni + 1));
    num.div(&den)
}

/// vol(SO(l)) = 2^{l−1}·π^{l(l+1)/4}/∏_{j=1}^{l}Γ(j/2).
pub fn so_volume(l: usize) -> Result<ExactConstant> {
    if l < 1 {
        return Err(Error::Domain("so_volume needs l ≥ 1".into()));
    }
    let li = l as i64;
    let mut num = ExactConstant::two_pow_half(2 * (li - 1))
        .mul(&ExactConstant::pi_pow_half(li * (li + 1) / 2));
    for j in 1..=li {
        num = num.div(&gamma_half(j)?)?;
    }
    Ok(num)
}

/// Exact Bernoulli numbers B_0..B_m by the defining recurrence.
pub fn bernoulli(m: usize) -> Vec<Rat> {
    let mut b: Vec<Rat> = Vec::with_capacity(m + 1);
    for k in 0..=m {
        if k == 0 {
            b.push(Rat::one());
            continue;
        }
        // B_k = −1/(k+1)·Σ_{j<k} C(k+1,j)·B_j
        let mut sum = Rat::zero();
        let mut binom = Rat::one(); // C(k+1, 0)
        for (j, bj) in b.iter().enumerate() {
            sum += &binom * bj;
            binom = binom * rat_int((k + 1 - j) as i64) / rat_int((j + 1) as i64);
        }
        b.push(-sum / rat_int(k as i64 + 1));
    }
    b
}

/// ζ(2k) = (−1)^{k+1}·B_{2k}·(2π)^{2k}/(2·(2k)!), exactly.
pub fn zeta_even(two_k: usize) -> Result<ExactConstant> {
    if two_k == 0 || two_k % 2 != 0 {
        return Err(Error::Domain("zeta_even needs a positive even argument".into()));
    }
    let k = two_k / 2;
    let b = bernoulli(two_k);
    let mut fact = BigInt::one();
    for i in 1..=two_k {
        fact *= i;
    }
    let sign = if k % 2 == 1 { 1 } else { -1 };
    let q = rat_int(sign) * &b[two_k] / (rat_int(2) * Rat::from(fact));
    Ok(ExactConstant::from_rat(q)
        .mul(&ExactConstant::two_pow_half(2 * two_k as i64))
        .mul(&ExactConstant::pi_pow_half(2 * two_k as i64)))
}

/// Fundamental discriminant attached to a nonzero rational determinant
/// class: D̃ of the squarefree part d is d for d ≡ 1 (mod 4), else 4d.
pub fn fundamental_discriminant(x: &Rat) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::Singular("zero determinant".into()));
    }
    // squarefree part of numer·denom (same square class)
    let prod = x.numer() * x.denom();
    let as_i64: i64 = prod
        .try_into()
        .map_err(|_| Error::Infeasible("determinant too large for discriminant".into()))?;
    let d = crate::rat::squarefree_part(as_i64);
    Ok(if d.rem_euclid(4) == 1 { d } else { 4 * d })
}

/// L(s, χ_D) for the Kronecker character of a fundamental discriminant D, by
/// direct series with the Abel tail bound 2|D|·(N+1)^{−s}. Returns
/// (value, err_estimate).
pub fn dirichlet_l(s: u32, disc: i64) -> Result<(f64, f64)> {
    if s < 1 {
        return Err(Error::Domain("need s ≥ 1".into()));
    }
    if disc == 1 {
        return Err(Error::Domain("trivial character: use zeta_even".into()));
    }
    let f = disc.unsigned_abs() as f64;
    let tol = 1e-13f64;
    let n_max: u64 = if s >= 2 {
        (((2.0 * f) / tol).powf(1.0 / s as f64).ceil() as u64).clamp(1000, 20_000_000)
    } else {
        20_000_000
    };
    let mut sum = 0.0f64;
    for j in 1..=n_max {
        let chi = kronecker(disc, j as i64);
        if chi != 0 {
            sum += chi as f64 * (j as f64).powi(-(s as i32));
        }
    }
    let err = 2.0 * f * ((n_max + 1) as f64).powi(-(s as i32));
    Ok((sum, err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;
    use std::f64::consts::PI;

    #[test]
    fn exact_constant_canonical() {
        // −√2·e(1/8) = e(5/8)·√2, and √8 = 2√2
        let a = ExactConstant::from_rat(rat(-1, 1))
            .mul(&ExactConstant::two_pow_half(1))
            .mul(&ExactConstant::e_eighth(1));
        let b = ExactConstant::two_pow_half(3)
            .div(&ExactConstant::from_rat(rat(2, 1)))
            .unwrap()
            .mul(&ExactConstant::e_eighth(5));
        assert_eq!(a, b);
        assert!((a.complex_value() - b.complex_value()).norm() < 1e-15);
    }

    #[test]
    fn b_infinity_small() {
        // B₁ = 1/(πi) = −i/π
        let b1 = b_infinity(1).unwrap().exact;
        let expect = Complex64::new(0.0, -1.0 / PI);
        assert!((b1.complex_value() - expect).norm() < 1e-15);
        // B₂ = i/(4√2π²)
        let b2 = b_infinity(2).unwrap().exact;
        let expect = Complex64::new(0.0, 1.0 / (4.0 * 2f64.sqrt() * PI * PI));
        assert!((b2.complex_value() - expect).norm() < 1e-16);
    }

    #[test]
    fn b_quotient_exact() {
        for n in 2..=6 {
            let lhs = b_infinity(n)
                .unwrap()
                .exact
                .div(&b_infinity(n - 1).unwrap().exact)
                .unwrap();
            assert_eq!(lhs, b_quotient_rhs(n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn so_volumes() {
        // vol SO(2) = 2π exactly
        let v = so_volume(2).unwrap();
        let expect = ExactConstant::from_rat(rat(2, 1)).mul(&ExactConstant::pi_pow_half(2));
        assert_eq!(v, expect);
        assert_eq!(so_volume(1).unwrap(), ExactConstant::one());
        // vol SO(3) = 8π²
        let v = so_volume(3).unwrap();
        let expect = ExactConstant::from_rat(rat(8, 1)).mul(&ExactConstant::pi_pow_half(4));
        assert_eq!(v, expect);
    }

    #[test]
    fn zeta_values() {
        // ζ(2) = π²/6, ζ(4) = π⁴/90
        let z2 = zeta_even(2).unwrap();
        assert_eq!(
            z2,
            ExactConstant::from_rat(rat(1, 6)).mul(&ExactConstant::pi_pow_half(4))
        );
        let z4 = zeta_even(4).unwrap();
        assert_eq!(
            z4,
            ExactConstant::from_rat(rat(1, 90)).mul(&ExactConstant::pi_pow_half(8))
        );
    }

    #[test]
    fn dirichlet_values() {
        // L(2, χ_{−4}) = Catalan's constant
        let (v, err) = dirichlet_l(2, -4).unwrap();
        assert!((v - 0.915_965_594_177_219).abs() < err.max(1e-9), "got {v}");
        // disc 4·3 = 12? squarefree part of 3 → D = 12? kronecker(12,·)
        assert_eq!(fundamental_discriminant(&rat(3, 1)).unwrap(), 12);
        assert_eq!(fundamental_discriminant(&rat(5, 1)).unwrap(), 5);
        assert_eq!(fundamental_discriminant(&rat(18, 1)).unwrap(), 8);
    }
}
