//! Exact character-sum evaluation of representation counts mod p^k (p odd).
//!
//! For q = p^k, S the bilinear Gram of a rank-m lattice and G = 2T the target
//! bilinear matrix,
//!
//!   N_k · q^{n(n+1)/2} = Σ_B G_S(B) · ψ(−tr(B·G)),
//!
//! where B runs over half-integral symmetric matrices mod q (parametrized by
//! c_ii = B_ii, c_ij = 2B_ij, all mod q) and G_S(B) = Σ_X ψ(tr(B·XᵀSX)) is a
//! product of quadratic Gauss sums once B is diagonalized over Z/q. Each
//! Gauss sum is a monomial i^b·√p^a, so the whole outer sum collapses to a
//! histogram over (diagonal class of B, tr(B·G) mod q); assembling the
//! histogram against a given S is exact arithmetic in Z[i][ζ_q], reduced mod
//! the cyclotomic polynomial Φ_{p^k}. The reduction must leave a rational
//! constant — that is asserted, so any bookkeeping error is self-detected.
//!
//! The histogram does not depend on S or on the number r of hyperbolic
//! copies, so one O(q^{n(n+1)/2}) pass serves every lattice and every r.

use crate::error::{Error, Result};
use crate::rat::Rat;
use num::bigint::BigInt;
use num::{Signed, Zero};
use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

const MAX_ITERATIONS: u64 = 700_000_000;
const MAX_N: usize = 4;

/// Histogram of diagonal classes of half-integral symmetric B mod p^k against
/// the phase v = tr(B·G) mod p^k for one target G.
#[derive(Debug, Clone)]
pub struct Histogram {
    pub p: u64,
    pub k: u32,
    pub n: usize,
    /// classes are (t, χ) for t < k (χ the Legendre class of the unit of the
    /// *doubled* matrix entry) plus the single class t = k; id = 2t + (χ<0),
    /// id = 2k for t = k
    pub class_count: usize,
    /// counts[multiset_flat * q + v]
    pub counts: Vec<u64>,
}

fn feasible(p: u64, k: u32, n: usize) -> Result<u64> {
    if n == 0 || n > MAX_N {
        return Err(Error::Unsupported(format!("charsum supports 1 ≤ n ≤ {MAX_N}, got {n}")));
    }
    let q = p.pow(k);
    let sigma = (n * (n + 1) / 2) as u32;
    let mut total: u64 = 1;
    for _ in 0..sigma {
        total = total
            .checked_mul(q)
            .filter(|&t| t <= MAX_ITERATIONS)
            .ok_or_else(|| {
                Error::Infeasible(format!(
                    "character sum needs q^{sigma} = {q}^{sigma} iterations (ceiling {MAX_ITERATIONS})"
                ))
            })?;
    }
    Ok(total)
}

struct Tables {
    q: u64,
    k: u32,
    val: Vec<u32>,      // valuation of residue, k for 0
    unit: Vec<u64>,     // residue / p^val (0 for 0)
    inv: Vec<u64>,      // inverse mod q for units, 0 otherwise
    leg: Vec<i8>,       // legendre symbol of residue mod p (index mod p)
    p_pow: Vec<u64>,    // p^0..p^k
}

fn build_tables(p: u64, k: u32) -> Tables {
    let q = p.pow(k);
    let mut val = vec![0u32; q as usize];
    let mut unit = vec![0u64; q as usize];
    for x in 1..q {
        let mut v = 0u32;
        let mut u = x;
        while u % p == 0 {
            u /= p;
            v += 1;
        }
        val[x as usize] = v;
        unit[x as usize] = u;
    }
    val[0] = k;
    let mut inv = vec![0u64; q as usize];
    for x in 1..q {
        if x % p != 0 {
            inv[x as usize] = crate::rat::mod_inverse(x, q).unwrap();
        }
    }
    let mut leg = vec![0i8; p as usize];
    for x in 1..p {
        leg[x as usize] = crate::rat::legendre(x as i64, p) as i8;
    }
    let mut p_pow = vec![1u64; (k + 1) as usize];
    for i in 1..=k as usize {
        p_pow[i] = p_pow[i - 1] * p;
    }
    Tables { q, k, val, unit, inv, leg, p_pow }
}

/// Diagonal classes of the symmetric matrix `m` (entries mod q), destroying
/// `m`. Returns class ids sorted ascending.
fn diagonal_classes(tab: &Tables, p: u64, m: &mut [[u64; MAX_N]; MAX_N], n: usize) -> [u8; MAX_N] {
    let q = tab.q;
    let k = tab.k;
    let mut ids = [0u8; MAX_N];
    let mut active = [true; MAX_N];
    let mut done = 0usize;
    while done < n {
        // locate the entry of minimal valuation among active indices; a
        // diagonal entry attaining the minimum must win, otherwise the
        // row-addition below could cancel
        let mut best_v = k + 1;
        let mut best = (0usize, 0usize);
        let mut best_is_diag = false;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            for j in i..n {
                if !active[j] {
                    continue;
                }
                let v = tab.val[m[i][j] as usize];
                if v < best_v || (v == best_v && !best_is_diag && i == j) {
                    best_v = v;
                    best = (i, j);
                    best_is_diag = i == j;
                }
            }
        }
        if best_v >= k {
            // remaining block vanishes mod q: every remaining class is t = k
            for _ in done..n {
                ids[done] = (2 * k) as u8;
                done += 1;
            }
            break;
        }
        let (bi, bj) = best;
        if bi != bj {
            // row/col bi += row/col bj: the new diagonal entry keeps val best_v
            for c in 0..n {
                m[bi][c] = (m[bi][c] + m[bj][c]) % q;
            }
            for r in 0..n {
                m[r][bi] = (m[r][bi] + m[r][bj]) % q;
            }
        }
        let s = bi;
        let piv = m[s][s];
        let v = tab.val[piv as usize];
        debug_assert_eq!(v, best_v);
        let u = tab.unit[piv as usize];
        ids[done] = (2 * v + if tab.leg[(u % p) as usize] < 0 { 1 } else { 0 }) as u8;
        done += 1;
        active[s] = false;
        // clear row/col s against the remaining active indices
        let pv = tab.p_pow[v as usize];
        let inv_u = tab.inv[u as usize];
        let mut lam = [0u64; MAX_N];
        for j in 0..n {
            if active[j] {
                lam[j] = crate::rat::mul_mod(m[s][j] / pv, inv_u, q);
            }
        }
        let mss = m[s][s];
        for jj in 0..n {
            if !active[jj] {
                continue;
            }
            for ll in jj..n {
                if !active[ll] {
                    continue;
                }
                let a = m[jj][ll];
                let b = crate::rat::mul_mod(lam[jj], m[s][ll], q);
                let c = crate::rat::mul_mod(lam[ll], m[jj][s], q);
                let d = crate::rat::mul_mod(crate::rat::mul_mod(lam[jj], lam[ll], q), mss, q);
                let x = (a + 2 * q - b % q - c % q + d) % q;
                m[jj][ll] = x;
                m[ll][jj] = x;
            }
        }
    }
    ids[..n].sort_unstable();
    ids
}

/// One pass over all B for several targets G (each an n×n symmetric matrix of
/// residues mod q, G = 2T mod q). Returns one histogram per target.
pub fn histograms(p: u64, k: u32, n: usize, targets: &[Vec<Vec<u64>>]) -> Result<Vec<Histogram>> {
    if p == 2 {
        return Err(Error::Unsupported("character sums at p = 2".into()));
    }
    feasible(p, k, n)?;
    let tab = build_tables(p, k);
    let q = tab.q;
    let class_count = (2 * k + 1) as usize;
    let sigma = n * (n + 1) / 2;
    // flat multiset index: Σ ids[i]·C^i with ids sorted ascending
    let mut c_pows = [1usize; MAX_N];
    for i in 1..n {
        c_pows[i] = c_pows[i - 1] * class_count;
    }
    let bins = c_pows[n - 1] * class_count;
    let mut hists: Vec<Histogram> = targets
        .iter()
        .map(|_| Histogram {
            p,
            k,
            n,
            class_count,
            counts: vec![0u64; bins * q as usize],
        })
        .collect();
    // iterate c over (Z/q)^sigma with an odometer; positions 0..n are the
    // diagonal entries c_ii, then the off-diagonal c_ij (i<j)
    let mut positions: Vec<(usize, usize)> = Vec::with_capacity(sigma);
    for i in 0..n {
        positions.push((i, i));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            positions.push((i, j));
        }
    }
    // v increments per position and target: diag positions weigh G_ii, the
    // off-diagonal ones weigh G_ij (see module docs)
    let weights: Vec<Vec<u64>> = targets
        .iter()
        .map(|g| {
            positions
                .iter()
                .map(|&(i, j)| if i == j { g[i][i] % q } else { g[i][j] % q })
                .collect()
        })
        .collect();
    let mut c = vec![0u64; sigma];
    let mut v = vec![0u64; targets.len()];
    let mut b2 = [[0u64; MAX_N]; MAX_N]; // 2B: diag 2c_ii, off-diag c_ij
    loop {
        // build 2B from the current odometer state
        for (pos, &(i, j)) in positions.iter().enumerate() {
            if i == j {
                b2[i][i] = (2 * c[pos]) % q;
            } else {
                b2[i][j] = c[pos];
                b2[j][i] = c[pos];
            }
        }
        let mut work = b2;
        let ids = diagonal_classes(&tab, p, &mut work, n);
        let mut flat = 0usize;
        for i in 0..n {
            flat += ids[i] as usize * c_pows[i];
        }
        for (ti, h) in hists.iter_mut().enumerate() {
            h.counts[flat * q as usize + v[ti] as usize] += 1;
        }
        // advance odometer
        let mut pos = 0usize;
        loop {
            if pos == sigma {
                return Ok(hists);
            }
            c[pos] += 1;
            for (ti, vv) in v.iter_mut().enumerate() {
                *vv += weights[ti][pos];
                if *vv >= q {
                    *vv -= q;
                }
            }
            if c[pos] < q {
                break;
            }
            // reset digit: subtract q * weight from v, i.e. nothing mod q,
            // but the accumulated v must drop by q*w ≡ 0 (mod q); recompute
            // cheaply by noting q wraps cancel exactly
            c[pos] = 0;
            for (ti, vv) in v.iter_mut().enumerate() {
                // v gained q*w over the full cycle of this digit — a multiple
                // of q, already reduced away. Nothing to undo.
                let _ = ti;
                let _ = vv;
            }
            pos += 1;
        }
    }
}

/// Monomial i^{i4} · √p^{sqrtp}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Monomial {
    pub sqrtp: u32,
    pub i4: u8,
}

impl Monomial {
    fn one() -> Self {
        Monomial { sqrtp: 0, i4: 0 }
    }
    fn mul(self, o: Monomial) -> Monomial {
        Monomial { sqrtp: self.sqrtp + o.sqrtp, i4: (self.i4 + o.i4) % 4 }
    }
}

/// Quadratic Gauss sum h(a) = Σ_{y mod p^k} ψ(a y²/p^k) for a = p^τ·u as a
/// monomial: p^τ · p^{(k−τ)/2} · (u|p)^{k−τ} · ε_{p^{k−τ}}.
fn gauss_h(p: u64, k: u32, tau: u32, chi_u: i8) -> Monomial {
    let tau = tau.min(k);
    if tau == k {
        return Monomial { sqrtp: 2 * k, i4: 0 };
    }
    let j = k - tau; // modulus exponent of the primitive part
    let mut i4 = 0u8;
    // ε_{p^j} = 1 if p^j ≡ 1 (mod 4), i if p^j ≡ 3 (mod 4)
    let pj_mod4 = crate::rat::pow_mod(p % 4, j as u64, 4);
    if pj_mod4 == 3 {
        i4 += 1;
    }
    if j % 2 == 1 && chi_u < 0 {
        i4 += 2;
    }
    Monomial { sqrtp: k + tau, i4: i4 % 4 }
}

/// Bilinear diagonal data of a lattice at p: (exponent, Legendre class of the
/// unit part) per diagonal entry of the Gram matrix over Z_p.
pub type BilinearDiag = Vec<(i64, i8)>;

/// Per-class Gauss factor ∏_j h(d·s_j) · (Gauss factor of H)^r for the
/// diagonal class id of B.
fn class_factor(p: u64, k: u32, s_diag: &BilinearDiag, r: usize, leg2: i8, id: usize) -> Monomial {
    let q_exp = 2 * k; // √p exponent of q = p^k
    let (t, chi_b2) = if id == (2 * k) as usize {
        (k, 1i8)
    } else {
        (id as u32 / 2, if id % 2 == 1 { -1 } else { 1 })
    };
    // the histogram classifies 2B; the true diagonal entry is d = d''/2
    let chi_d = chi_b2 * leg2;
    let mut m = Monomial::one();
    for &(e, chi_w) in s_diag {
        let tau = (t as i64 + e).min(k as i64) as u32;
        m = m.mul(gauss_h(p, k, tau, chi_d * chi_w));
    }
    // hyperbolic plane: Σ_{x,y mod q} ψ(d·2xy/q) = q · p^{min(t,k)}
    let hyper = Monomial { sqrtp: q_exp + 2 * t.min(k), i4: 0 };
    for _ in 0..r {
        m = m.mul(hyper);
    }
    m
}

/// Assemble the histogram against the lattice with bilinear diagonal data
/// `s_diag` (rank l) plus r hyperbolic planes. Returns the raw count N_k.
pub fn assemble(hist: &Histogram, s_diag: &BilinearDiag, r: usize) -> Result<BigInt> {
    let p = hist.p;
    let k = hist.k;
    let q = p.pow(k) as usize;
    let n = hist.n;
    let class_count = hist.class_count;
    let leg2 = crate::rat::legendre(2, p) as i8;
    let factors: Vec<Monomial> = (0..class_count)
        .map(|id| class_factor(p, k, s_diag, r, leg2, id))
        .collect();
    // polynomial in ζ_q over Z[i], split by parity of the √p exponent
    let zero = || (BigInt::zero(), BigInt::zero());
    let mut even: Vec<(BigInt, BigInt)> = (0..q).map(|_| zero()).collect();
    let mut odd: Vec<(BigInt, BigInt)> = (0..q).map(|_| zero()).collect();
    let mut c_pows = vec![1usize; n];
    for i in 1..n {
        c_pows[i] = c_pows[i - 1] * class_count;
    }
    let bins = c_pows[n - 1] * class_count;
    for flat in 0..bins {
        // decode the multiset and multiply the class factors
        let mut rest = flat;
        let mut mono = Monomial::one();
        let mut valid = true;
        let mut prev = 0usize;
        for i in 0..n {
            let id = (flat / c_pows[i]) % class_count;
            if id < prev {
                valid = false; // only sorted multisets are populated
                break;
            }
            prev = id;
            mono = mono.mul(factors[id]);
            rest /= class_count;
        }
        let _ = rest;
        if !valid {
            continue;
        }
        for v in 0..q {
            let count = hist.counts[flat * q + v];
            if count == 0 {
                continue;
            }
            let expo = (q - v) % q; // ψ(−tr(BG)) = ζ^{q−v}
            let whole = BigInt::from(p).pow(mono.sqrtp / 2) * BigInt::from(count);
            let (re, im): (BigInt, BigInt) = match mono.i4 {
                0 => (whole, BigInt::zero()),
                1 => (BigInt::zero(), whole),
                2 => (-whole, BigInt::zero()),
                _ => (BigInt::zero(), -whole),
            };
            let target = if mono.sqrtp % 2 == 0 { &mut even } else { &mut odd };
            target[expo].0 += re;
            target[expo].1 += im;
        }
    }
    // fold the odd part: √p = θ·G with G = Σ_j (j|p)·ζ_q^{j·p^{k−1}} and
    // θ = 1 for p ≡ 1 (mod 4), θ = −i for p ≡ 3 (mod 4)
    let has_odd = odd.iter().any(|(a, b)| !a.is_zero() || !b.is_zero());
    if has_odd {
        let stride = (q as u64 / p) as usize; // p^{k−1}
        let mut conv: Vec<(BigInt, BigInt)> = (0..q).map(|_| zero()).collect();
        for j in 1..p as usize {
            let lg = crate::rat::legendre(j as i64, p);
            if lg == 0 {
                continue;
            }
            let shift = (j * stride) % q;
            for e in 0..q {
                let (a, b) = &odd[e];
                if a.is_zero() && b.is_zero() {
                    continue;
                }
                let dst = (e + shift) % q;
                if lg > 0 {
                    conv[dst].0 += a;
                    conv[dst].1 += b;
                } else {
                    conv[dst].0 -= a;
                    conv[dst].1 -= b;
                }
            }
        }
        for e in 0..q {
            let (a, b) = conv[e].clone();
            if p % 4 == 1 {
                even[e].0 += a;
                even[e].1 += b;
            } else {
                // multiply by θ = −i: (a + bi)(−i) = b − ai
                even[e].0 += b;
                even[e].1 -= a;
            }
        }
    }
    // reduce mod Φ_{p^k}(X) = Σ_{j=0}^{p−1} X^{j·p^{k−1}}
    let stride = (q as u64 / p) as usize;
    let phi_deg = stride * (p as usize - 1);
    for e in (phi_deg..q).rev() {
        let (a, b) = even[e].clone();
        if a.is_zero() && b.is_zero() {
            continue;
        }
        even[e] = zero();
        for j in 0..(p as usize - 1) {
            let dst = e - phi_deg + j * stride;
            even[dst].0 -= &a;
            even[dst].1 -= &b;
        }
    }
    for e in 1..phi_deg {
        if !even[e].0.is_zero() || !even[e].1.is_zero() {
            return Err(Error::Internal(
                "character sum did not reduce to a rational constant".into(),
            ));
        }
    }
    if !even[0].1.is_zero() {
        return Err(Error::Internal("character sum has an imaginary part".into()));
    }
    let total = even[0].0.clone();
    let sigma = (n * (n + 1) / 2) as u32;
    let qs = BigInt::from(p).pow(k * sigma);
    if (&total % &qs) != BigInt::zero() || total.is_negative() {
        return Err(Error::Internal("count is not a nonnegative multiple of q^σ".into()));
    }
    Ok(total / qs)
}

/// Normalized count p^{−k(n·m − n(n+1)/2)}·N_k for a rank-m lattice.
pub fn normalize(p: u64, k: u32, n: usize, m: usize, n_k: &BigInt) -> Rat {
    let sigma = n * (n + 1) / 2;
    let expo = k as i64 * (n as i64 * m as i64 - sigma as i64);
    Rat::from(n_k.clone()) / Rat::from(BigInt::from(p)).pow(expo as i32)
}

// ---- cache ----------------------------------------------------------------

type CacheKey = (u64, u32, usize, Vec<u64>);
static CACHE: Lazy<Mutex<HashMap<CacheKey, Arc<Histogram>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn key_of(p: u64, k: u32, g: &[Vec<u64>]) -> CacheKey {
    let n = g.len();
    let mut flat = Vec::with_capacity(n * n);
    for row in g {
        flat.extend_from_slice(row);
    }
    (p, k, n, flat)
}

/// Cached histogram access; computes all still-missing targets in one pass.
pub fn cached_histograms(p: u64, k: u32, targets: &[Vec<Vec<u64>>]) -> Result<Vec<Arc<Histogram>>> {
    let n = targets.first().map(|g| g.len()).unwrap_or(0);
    let mut missing: Vec<Vec<Vec<u64>>> = Vec::new();
    {
        let cache = CACHE.lock().unwrap();
        for g in targets {
            if !cache.contains_key(&key_of(p, k, g)) && !missing.contains(g) {
                missing.push(g.clone());
            }
        }
    }
    if !missing.is_empty() {
        let fresh = histograms(p, k, n, &missing)?;
        let mut cache = CACHE.lock().unwrap();
        for (g, h) in missing.iter().zip(fresh) {
            cache.insert(key_of(p, k, g), Arc::new(h));
        }
    }
    let cache = CACHE.lock().unwrap();
    Ok(targets
        .iter()
        .map(|g| cache.get(&key_of(p, k, g)).unwrap().clone())
        .collect())
}

/// Prewarm the cache for a batch of targets sharing (p, k).
pub fn prewarm(p: u64, k: u32, targets: &[Vec<Vec<u64>>]) -> Result<()> {
    cached_histograms(p, k, targets).map(|_| ())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(p: u64, k: u32, s_diag: &BilinearDiag, r: usize, g: Vec<Vec<u64>>) -> BigInt {
        let h = histograms(p, k, g.len(), &[g]).unwrap();
        assemble(&h[0], s_diag, r).unwrap()
    }

    #[test]
    fn scalar_squares() {
        // Q(x) = x² over Z_3 (bilinear diag (2)): x² ≡ 1 mod 9 has 2 solutions
        let s: BilinearDiag = vec![(0, crate::rat::legendre(2, 3) as i8)];
        assert_eq!(count(3, 2, &s, 0, vec![vec![2]]), BigInt::from(2));
        // x² ≡ 3 mod 9 insoluble
        assert_eq!(count(3, 2, &s, 0, vec![vec![6]]), BigInt::from(0));
    }

    #[test]
    fn hyperbolic_plane_xy() {
        // L = H (no extra copies: realize via rank-0 lattice with r=1):
        // xy ≡ 1 mod 5 has 4 solutions
        let s: BilinearDiag = vec![];
        assert_eq!(count(5, 1, &s, 1, vec![vec![2]]), BigInt::from(4));
    }

    #[test]
    fn two_by_two_target() {
        // L = ⟨1,1,1⟩ (S = 2I₃), T = I₂ mod 3: direct count cross-check below
        let leg2 = crate::rat::legendre(2, 3) as i8;
        let s: BilinearDiag = vec![(0, leg2); 3];
        let g = vec![vec![2, 0], vec![0, 2]];
        let n = count(3, 1, &s, 0, g);
        // brute force over (Z/3)^6
        let mut brute = 0u64;
        for a in 0..3i64 {
            for b in 0..3i64 {
                for c in 0..3i64 {
                    for d in 0..3i64 {
                        for e in 0..3i64 {
                            for f in 0..3i64 {
                                let x = [a, b, c];
                                let y = [d, e, f];
                                let q11: i64 = x.iter().map(|v| v * v).sum();
                                let q22: i64 = y.iter().map(|v| v * v).sum();
                                let q12: i64 = x.iter().zip(&y).map(|(u, v)| u * v).sum();
                                if q11 % 3 == 1 && q22 % 3 == 1 && q12.rem_euclid(3) == 0 {
                                    brute += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
        assert_eq!(n, BigInt::from(brute));
    }
}
