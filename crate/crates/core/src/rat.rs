//! Exact rational / modular helpers used throughout the exact modules.

use num::bigint::{BigInt, Sign};
use num::rational::BigRational;
use num::{One, Signed, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// p-adic valuation of a nonzero rational (negative for denominators).
pub fn valuation(x: &Rat, p: u64) -> i64 {
    assert!(!x.is_zero(), "valuation of zero");
    int_valuation(x.numer(), p) - int_valuation(x.denom(), p)
}

pub fn int_valuation(x: &BigInt, p: u64) -> i64 {
    assert!(!x.is_zero());
    let p = BigInt::from(p);
    let mut v = 0i64;
    let mut cur = x.abs();
    while (&cur % &p).is_zero() {
        cur /= &p;
        v += 1;
    }
    v
}

/// Unit part of x at p: x / p^{val_p(x)}, still a rational prime to p.
pub fn unit_part(x: &Rat, p: u64) -> Rat {
    let v = valuation(x, p);
    let pw = Rat::from(BigInt::from(p)).pow(v as i32);
    x / pw
}

/// Reduce a p-integral rational modulo p^k into `0..p^k`.
pub fn reduce_mod(x: &Rat, q: u64) -> u64 {
    let qb = BigInt::from(q);
    let num = x.numer().mod_floor_big(&qb);
    let den = x.denom().mod_floor_big(&qb);
    let d = den.to_u64_digits_checked(q);
    let inv = mod_inverse(d, q).expect("denominator not invertible mod q");
    let n = num.to_u64_digits_checked(q);
    mul_mod(n, inv, q)
}

trait ModFloorExt {
    fn mod_floor_big(&self, m: &BigInt) -> BigInt;
    fn to_u64_digits_checked(&self, q: u64) -> u64;
}

impl ModFloorExt for BigInt {
    fn mod_floor_big(&self, m: &BigInt) -> BigInt {
        let r = self % m;
        if r.sign() == Sign::Minus {
            r + m
        } else {
            r
        }
    }
    fn to_u64_digits_checked(&self, q: u64) -> u64 {
        use num::ToPrimitive;
        let v = self.to_u64().expect("residue fits u64");
        debug_assert!(v < q);
        v
    }
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Inverse of a modulo m (m not necessarily prime), None if not coprime.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let qu = r / new_r;
        (t, new_t) = (new_t, t - qu * new_t);
        (r, new_r) = (new_r, r - qu * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(((t % m as i128 + m as i128) % m as i128) as u64)
}

/// Legendre symbol (a|p) for odd prime p; 0 when p divides a.
pub fn legendre(a: i64, p: u64) -> i32 {
    let am = a.rem_euclid(p as i64) as u64;
    if am == 0 {
        return 0;
    }
    let e = pow_mod(am, (p - 1) / 2, p);
    if e == 1 {
        1
    } else {
        -1
    }
}

pub fn legendre_big(a: &BigInt, p: u64) -> i32 {
    let pb = BigInt::from(p);
    let r = a.mod_floor_big(&pb);
    use num::ToPrimitive;
    legendre(r.to_i64().unwrap(), p)
}

pub fn legendre_rat(a: &Rat, p: u64) -> i32 {
    assert_eq!(valuation(a, p), 0, "legendre of a non-unit");
    let u = unit_part(a, p);
    let num = legendre_big(u.numer(), p);
    let den = legendre_big(u.denom(), p);
    num * den
}

/// Kronecker symbol (a|n) extending the Jacobi symbol.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut a = a;
    let mut n = n;
    let mut result = 1i32;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    // factor out twos of n
    while n % 2 == 0 {
        n /= 2;
        if a % 2 == 0 {
            return 0;
        }
        let am = a.rem_euclid(8);
        if am == 3 || am == 5 {
            result = -result;
        }
    }
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let nm = n.rem_euclid(8);
            if nm == 3 || nm == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.rem_euclid(4) == 3 && n.rem_euclid(4) == 3 {
            result = -result;
        }
        a = a.rem_euclid(n);
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Squarefree part of a nonzero integer (sign preserved).
pub fn squarefree_part(x: i64) -> i64 {
    assert!(x != 0);
    let sign = x.signum();
    let mut m = x.abs();
    let mut out = 1i64;
    let mut d = 2i64;
    while d * d <= m {
        let mut e = 0;
        while m % d == 0 {
            m /= d;
            e += 1;
        }
        if e % 2 == 1 {
            out *= d;
        }
        d += 1;
    }
    sign * out * m
}

/// Smallest quadratic non-residue modulo the odd prime p.
pub fn smallest_nonresidue(p: u64) -> u64 {
    (2..p).find(|&u| legendre(u as i64, p) == -1).expect("odd prime has a non-residue")
}

/// Odd prime factors of a nonzero rational's numerator and denominator.
pub fn odd_prime_support(x: &Rat) -> Vec<u64> {
    let mut primes = Vec::new();
    for part in [x.numer().abs(), x.denom().abs()] {
        let mut m = part;
        let mut d = BigInt::from(2u64);
        // trial division; inputs in this artifact are desk-scale
        while &d * &d <= m {
            if (&m % &d).is_zero() {
                use num::ToPrimitive;
                let dp = d.to_u64().unwrap();
                if dp % 2 == 1 && !primes.contains(&dp) {
                    primes.push(dp);
                }
                while (&m % &d).is_zero() {
                    m /= &d;
                }
            }
            d += 1;
        }
        if m > BigInt::one() {
            use num::ToPrimitive;
            if let Some(dp) = m.to_u64() {
                if dp % 2 == 1 && !primes.contains(&dp) {
                    primes.push(dp);
                }
            }
        }
    }
    primes.sort_unstable();
    primes
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    use num::ToPrimitive;
    x.to_f64().expect("rational representable as f64")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuation_and_unit_part() {
        assert_eq!(valuation(&rat(18, 5), 3), 2);
        assert_eq!(valuation(&rat(5, 9), 3), -2);
        assert_eq!(unit_part(&rat(18, 5), 3), rat(2, 5));
    }

    #[test]
    fn legendre_small() {
        assert_eq!(legendre(2, 5), -1);
        assert_eq!(legendre(4, 5), 1);
        assert_eq!(legendre(3, 5), -1);
        assert_eq!(legendre(10, 5), 0);
    }

    #[test]
    fn kronecker_matches_legendre_on_odd_primes() {
        for p in [3i64, 5, 7, 11, 13] {
            for a in 1..p {
                assert_eq!(kronecker(a, p), legendre(a, p as u64), "a={a} p={p}");
            }
        }
        // (2|n) supplementary law
        assert_eq!(kronecker(2, 7), 1);
        assert_eq!(kronecker(2, 3), -1);
    }

    #[test]
    fn reduce_mod_handles_denominators() {
        // 1/2 mod 9 = 5
        assert_eq!(reduce_mod(&rat(1, 2), 9), 5);
        assert_eq!(reduce_mod(&rat(-1, 1), 9), 8);
    }

    #[test]
    fn squarefree() {
        assert_eq!(squarefree_part(18), 2);
        assert_eq!(squarefree_part(-4), -1);
        assert_eq!(squarefree_part(1), 1);
    }
}
