//! Exact invariants of quadratic forms and lattices over Q, R and Q_p:
//! Hilbert symbols, Jordan decompositions, Hasse invariants, Weil indices,
//! and codimension-one local representability.
//!
//! Conventions used everywhere in this crate:
//! * a lattice carries its bilinear Gram matrix S = ((e_i, e_j)) with
//!   quadratic form Q(x) = ½·xᵀSx;
//! * a target is a moment matrix T = Q(x) = ½((x_i, x_j)), so the lattice
//!   M_T spanned by such an n-tuple has bilinear Gram 2T.

use crate::error::{Error, Result};
use crate::matrix::SymRat;
use crate::rat::{
    self, legendre, legendre_rat, odd_prime_support, rat_int, unit_part, valuation, Rat,
};
use num::complex::Complex64;
use num::{One, Signed, Zero};

/// A place of Q. Finite places carry the prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Finite(u64),
    Infinity,
}

impl std::fmt::Display for Place {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "{p}"),
            Place::Infinity => write!(f, "infinity"),
        }
    }
}

/// Moment matrix T = Q(x), symmetric rational, with nonsingularity checked
/// where an operation needs it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentMatrix {
    pub mat: SymRat,
}

impl MomentMatrix {
    pub fn new(mat: SymRat) -> Self {
        MomentMatrix { mat }
    }

    pub fn from_diag_i64(d: &[i64]) -> Self {
        MomentMatrix { mat: SymRat::diag_i64(d) }
    }

    pub fn rank(&self) -> usize {
        self.mat.n
    }

    pub fn det(&self) -> Rat {
        self.mat.det()
    }

    /// Bilinear Gram matrix 2T of the lattice M_T.
    pub fn bilinear_gram(&self) -> SymRat {
        self.mat.scale(&rat_int(2))
    }

    pub fn require_nonsingular(&self) -> Result<()> {
        if self.det().is_zero() {
            return Err(Error::Singular("moment matrix is singular".into()));
        }
        Ok(())
    }
}

/// Integral symmetric Gram matrix S = ((e_i, e_j)) of a lattice with
/// Q(x) = ½·xᵀSx. Construct with `new` for genuinely integral lattices;
/// `new_p_local` admits p-integral rational entries for intermediate
/// Z_p-lattices produced by Jordan splitting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeGram {
    pub mat: SymRat,
}

impl LatticeGram {
    pub fn new(mat: SymRat) -> Result<Self> {
        for i in 0..mat.n {
            for j in 0..mat.n {
                if !mat.at(i, j).is_integer() {
                    return Err(Error::Domain("lattice Gram must be integral".into()));
                }
            }
        }
        let g = LatticeGram { mat };
        if g.det().is_zero() {
            return Err(Error::Singular("lattice Gram is singular".into()));
        }
        Ok(g)
    }

    pub fn new_p_local(mat: SymRat, p: u64) -> Result<Self> {
        for i in 0..mat.n {
            for j in 0..mat.n {
                let x = mat.at(i, j);
                if !x.is_zero() && valuation(x, p) < 0 {
                    return Err(Error::Domain("lattice Gram must be p-integral".into()));
                }
            }
        }
        let g = LatticeGram { mat };
        if g.det().is_zero() {
            return Err(Error::Singular("lattice Gram is singular".into()));
        }
        Ok(g)
    }

    /// Diagonal quadratic form ⟨a_1, ..., a_l⟩, i.e. Q = Σ a_i x_i², which in
    /// the Gram convention means S = diag(2a_i).
    pub fn from_quadratic_diag_i64(a: &[i64]) -> Self {
        let d: Vec<Rat> = a.iter().map(|&x| rat_int(2 * x)).collect();
        LatticeGram { mat: SymRat::from_diag(&d) }
    }

    /// Hyperbolic plane Q = x·y: Gram [[0,1],[1,0]].
    pub fn hyperbolic_plane() -> Self {
        let mut m = SymRat::zeros(2);
        m.set(0, 1, Rat::one());
        LatticeGram { mat: m }
    }

    pub fn rank(&self) -> usize {
        self.mat.n
    }

    pub fn det(&self) -> Rat {
        self.mat.det()
    }

    pub fn direct_sum(&self, other: &LatticeGram) -> LatticeGram {
        LatticeGram { mat: self.mat.direct_sum(&other.mat) }
    }

    /// L ⊕ H^r.
    pub fn with_hyperbolic(&self, r: usize) -> LatticeGram {
        let mut out = self.clone();
        for _ in 0..r {
            out = out.direct_sum(&LatticeGram::hyperbolic_plane());
        }
        out
    }

    /// Rescaled lattice L^- with Q replaced by -Q.
    pub fn negated(&self) -> LatticeGram {
        LatticeGram { mat: self.mat.scale(&rat_int(-1)) }
    }

    /// Diagonal coefficients of the quadratic form over Q: Q ≅ Σ a_i x_i².
    pub fn quadratic_diag(&self) -> Vec<Rat> {
        self.mat
            .diagonalize()
            .into_iter()
            .map(|d| d / rat_int(2))
            .collect()
    }

    pub fn is_p_unimodular(&self, p: u64) -> bool {
        valuation(&self.det(), p) == 0
    }

    /// [L':L] = |det S|_p^{-1} = p^{ord_p det S} for odd p.
    pub fn dual_index_exponent(&self, p: u64) -> i64 {
        valuation(&self.det(), p)
    }
}

/// Jordan decomposition over Z_p (p odd): blocks (exponent e, unit diagonal),
/// exponents strictly increasing, units normalized to 1 or the smallest
/// quadratic non-residue mod p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JordanForm {
    pub p: u64,
    /// (exponent, canonical unit representatives) per scale, exponents increasing
    pub blocks: Vec<(i64, Vec<i64>)>,
    pub rank: usize,
}

impl JordanForm {
    /// All diagonal entries p^e·u in block order.
    pub fn diagonal(&self) -> Vec<Rat> {
        let mut out = Vec::new();
        for (e, units) in &self.blocks {
            for &u in units {
                let pe = Rat::from(num::BigInt::from(self.p)).pow(*e as i32);
                out.push(pe * rat_int(u));
            }
        }
        out
    }

    /// Rank of the exponent-zero (unimodular) block.
    pub fn unimodular_rank(&self) -> usize {
        self.blocks
            .iter()
            .find(|(e, _)| *e == 0)
            .map(|(_, u)| u.len())
            .unwrap_or(0)
    }

    /// All exponents with multiplicity, nondecreasing.
    pub fn exponents(&self) -> Vec<i64> {
        let mut out = Vec::new();
        for (e, units) in &self.blocks {
            for _ in units {
                out.push(*e);
            }
        }
        out
    }

    /// Legendre class of the product of units in the given block (+1/-1),
    /// or +1 for an absent scale.
    pub fn block_unit_class(&self, e: i64) -> i32 {
        self.blocks
            .iter()
            .find(|(be, _)| *be == e)
            .map(|(_, u)| u.iter().map(|&x| legendre(x, self.p)).product())
            .unwrap_or(1)
    }
}

/// Local invariants of a nondegenerate quadratic space at one place.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalInvariants {
    pub place: Place,
    pub dim: usize,
    /// determinant of the diagonalized quadratic form (square class carrier)
    pub det: Rat,
    pub hasse: i32,
}

impl LocalInvariants {
    pub fn of_diagonal(place: Place, d: &[Rat]) -> Result<Self> {
        if d.iter().any(|x| x.is_zero()) {
            return Err(Error::Singular("zero diagonal entry".into()));
        }
        Ok(LocalInvariants {
            place,
            dim: d.len(),
            det: d.iter().product(),
            hasse: hasse_invariant(place, d)?,
        })
    }

    /// χ_V(a) = (a, (-1)^{l(l-1)/2}·det V)_place.
    pub fn chi(&self, a: &Rat) -> Result<i32> {
        let l = self.dim as i64;
        let sign = if (l * (l - 1) / 2) % 2 == 0 { 1 } else { -1 };
        hilbert_symbol(a, &(rat_int(sign) * &self.det), self.place)
    }
}

/// Signature (p_plus, q_minus) of a real quadratic space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignaturePair {
    pub p_plus: usize,
    pub q_minus: usize,
}

impl SignaturePair {
    pub fn dim(&self) -> usize {
        self.p_plus + self.q_minus
    }
}

/// Hilbert symbol (a, b)_place on nonzero rationals.
pub fn hilbert_symbol(a: &Rat, b: &Rat, place: Place) -> Result<i32> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::Domain("Hilbert symbol of zero".into()));
    }
    match place {
        Place::Infinity => Ok(if a.is_negative() && b.is_negative() { -1 } else { 1 }),
        Place::Finite(2) => {
            // (a,b)_2 = (-1)^{ε(u)ε(v) + α·ω(v) + β·ω(u)} for a = 2^α u, b = 2^β v
            let alpha = valuation(a, 2);
            let beta = valuation(b, 2);
            let u = unit_part(a, 2);
            let v = unit_part(b, 2);
            let umod = odd_unit_mod8(&u);
            let vmod = odd_unit_mod8(&v);
            let eps = |x: u64| ((x - 1) / 2) % 2; // (x-1)/2 mod 2
            let omega = |x: u64| ((x * x - 1) / 8) % 2;
            let e = eps(umod) * eps(vmod)
                + (alpha.rem_euclid(2) as u64) * omega(vmod)
                + (beta.rem_euclid(2) as u64) * omega(umod);
            Ok(if e % 2 == 0 { 1 } else { -1 })
        }
        Place::Finite(p) => {
            let alpha = valuation(a, p);
            let beta = valuation(b, p);
            let u = unit_part(a, p);
            let v = unit_part(b, p);
            // (a,b)_p = (-1|p)^{αβ} (u|p)^β (v|p)^α
            let mut s = 1i32;
            if (alpha * beta) % 2 != 0 {
                s *= legendre(-1, p);
            }
            if beta % 2 != 0 {
                s *= legendre_rat(&u, p);
            }
            if alpha % 2 != 0 {
                s *= legendre_rat(&v, p);
            }
            Ok(s)
        }
    }
}

fn odd_unit_mod8(u: &Rat) -> u64 {
    // reduce an odd rational unit mod 8 using the inverse of the denominator
    let num = rat::reduce_mod(&Rat::from(u.numer().clone()), 8);
    let den = rat::reduce_mod(&Rat::from(u.denom().clone()), 8);
    let inv = rat::mod_inverse(den, 8).expect("odd denominator");
    (num * inv) % 8
}

/// Jordan decomposition of a moment matrix over Z_p, p odd.
pub fn jordan_decompose(p: u64, t: &MomentMatrix) -> Result<JordanForm> {
    if p == 2 {
        return Err(Error::Unsupported("Jordan decomposition at p = 2".into()));
    }
    t.require_nonsingular()?;
    let n = t.rank();
    // check p-integrality
    for i in 0..n {
        for j in 0..n {
            let x = t.mat.at(i, j);
            if !x.is_zero() && valuation(x, p) < 0 {
                return Err(Error::Domain("entries must be p-integral".into()));
            }
        }
    }
    let mut m: Vec<Vec<Rat>> = (0..n)
        .map(|i| (0..n).map(|j| t.mat.at(i, j).clone()).collect())
        .collect();
    let mut diag: Vec<(i64, i64)> = Vec::new(); // (exponent, unit class rep)
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        // find minimal valuation among active entries
        let mut best: Option<(i64, usize, usize)> = None;
        for (ai, &i) in active.iter().enumerate() {
            for &j in active.iter().skip(ai) {
                let x = &m[i][j];
                if x.is_zero() {
                    continue;
                }
                let v = valuation(x, p);
                // prefer a diagonal entry among those of minimal valuation;
                // the merge step below is only valuation-safe when no
                // diagonal entry attains the minimum
                let better = match best {
                    None => true,
                    Some((bv, pi, pj)) => v < bv || (v == bv && pi != pj && i == j),
                };
                if better {
                    best = Some((v, i, j));
                }
            }
        }
        let (bv, bi, bj) = best.ok_or_else(|| Error::Singular("degenerate block".into()))?;
        let pivot_idx = if bi == bj {
            bi
        } else {
            // row/col bi += row/col bj makes m[bi][bi] attain the minimum
            for c in 0..n {
                let add = m[bj][c].clone();
                m[bi][c] += add;
            }
            for r in 0..n {
                let add = m[r][bj].clone();
                m[r][bi] += add;
            }
            bi
        };
        let piv = m[pivot_idx][pivot_idx].clone();
        let v = valuation(&piv, p);
        debug_assert_eq!(v, bv, "pivot lost the minimal valuation");
        let u = unit_part(&piv, p);
        diag.push((v, if legendre_rat(&u, p) == 1 { 1 } else { -1 }));
        // clear the pivot row/column among the remaining active indices
        for &r in active.iter() {
            if r == pivot_idx {
                continue;
            }
            let lam = &m[r][pivot_idx] / &piv;
            if lam.is_zero() {
                continue;
            }
            for c in 0..n {
                let sub = &lam * &m[pivot_idx][c];
                m[r][c] -= sub;
            }
            for rr in 0..n {
                let sub = &lam * &m[rr][pivot_idx];
                m[rr][r] -= sub;
            }
        }
        active.retain(|&x| x != pivot_idx);
    }
    // group by exponent, canonical unit representatives
    diag.sort_by_key(|&(e, _)| e);
    let eps = rat::smallest_nonresidue(p) as i64;
    let mut blocks: Vec<(i64, Vec<i64>)> = Vec::new();
    for (e, cls) in diag {
        let rep = if cls == 1 { 1 } else { eps };
        match blocks.last_mut() {
            Some((be, units)) if *be == e => units.push(rep),
            _ => blocks.push((e, vec![rep])),
        }
    }
    // canonical order inside a block: all 1's first
    for (_, units) in blocks.iter_mut() {
        units.sort_by_key(|&u| if u == 1 { 0 } else { 1 });
    }
    Ok(JordanForm { p, blocks, rank: n })
}

/// Hasse invariant ∏_{i<j} (d_i, d_j)_place of a diagonal form.
pub fn hasse_invariant(place: Place, d: &[Rat]) -> Result<i32> {
    if d.iter().any(|x| x.is_zero()) {
        return Err(Error::Domain("Hasse invariant with zero entry".into()));
    }
    let mut s = 1i32;
    for i in 0..d.len() {
        for j in (i + 1)..d.len() {
            s *= hilbert_symbol(&d[i], &d[j], place)?;
        }
    }
    Ok(s)
}

/// Exact eighth root of unity e(k/8).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EighthRoot {
    pub numerator_mod_8: u8,
}

impl EighthRoot {
    pub fn one() -> Self {
        EighthRoot { numerator_mod_8: 0 }
    }

    pub fn new(k: i64) -> Self {
        EighthRoot { numerator_mod_8: k.rem_euclid(8) as u8 }
    }

    pub fn mul(self, other: EighthRoot) -> EighthRoot {
        EighthRoot::new(self.numerator_mod_8 as i64 + other.numerator_mod_8 as i64)
    }

    pub fn inverse(self) -> EighthRoot {
        EighthRoot::new(-(self.numerator_mod_8 as i64))
    }

    pub fn pow(self, n: i64) -> EighthRoot {
        EighthRoot::new(self.numerator_mod_8 as i64 * n)
    }

    pub fn value(self) -> Complex64 {
        let th = std::f64::consts::PI * (self.numerator_mod_8 as f64) / 4.0;
        Complex64::new(th.cos(), th.sin())
    }
}

impl std::fmt::Display for EighthRoot {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "e({}/8)", self.numerator_mod_8)
    }
}

/// γ(V^n) = e(n(q-p)/8) for a real space of signature (p, q).
pub fn gamma_real(sig: SignaturePair, n: i64) -> EighthRoot {
    EighthRoot::new(n * (sig.q_minus as i64 - sig.p_plus as i64))
}

/// Weil index of ψ(a x²) at odd p with the canonical unramified ψ:
/// the phase of the finite quadratic Gauss sum Σ_{x mod p^k} e(a x²/p^k)
/// at k = ord_p(a)+1, enumerated and snapped to an eighth root of unity.
pub fn weil_index_p(a: &Rat, p: u64) -> Result<EighthRoot> {
    if p == 2 {
        return Err(Error::Unsupported("Weil index at p = 2".into()));
    }
    if a.is_zero() {
        return Err(Error::Domain("Weil index of zero".into()));
    }
    // only t mod 2 and the unit class matter: x -> p^m x rescales the sum
    let t = valuation(a, p).rem_euclid(2) as u64;
    let u = unit_part(a, p);
    let k = t + 1;
    let q: u64 = p.pow(k as u32);
    let a_mod = rat::mul_mod(rat::reduce_mod(&u, q), rat::pow_mod(p, t, q), q);
    let mut sum = Complex64::new(0.0, 0.0);
    for x in 0..q {
        let e = rat::mul_mod(rat::mul_mod(x, x, q), a_mod, q);
        let th = 2.0 * std::f64::consts::PI * (e as f64) / (q as f64);
        sum += Complex64::new(th.cos(), th.sin());
    }
    let norm = sum.norm();
    if norm < 1e-9 {
        return Err(Error::Internal("Gauss sum vanished".into()));
    }
    let phase = sum / norm;
    // snap to the nearest eighth root and verify
    for k8 in 0..8u8 {
        let cand = EighthRoot { numerator_mod_8: k8 };
        if (phase - cand.value()).norm() < 1e-6 {
            return Ok(cand);
        }
    }
    Err(Error::Internal("Gauss sum phase is not an eighth root".into()))
}

/// Weil index of a p-adic quadratic space given by a diagonal form:
/// the product ∏_i weil_index_p(d_i, p).
///
/// The source identity "γ(V^n) = γ(ψ∘det Q)^{-n}" conflicts with this
/// product-over-diagonal definition; the product form is implemented and the
/// literal reading is flagged here rather than silently reconciled.
pub fn gamma_space_p(p: u64, d: &[Rat]) -> Result<EighthRoot> {
    if p == 2 {
        return Err(Error::Unsupported("Weil index at p = 2".into()));
    }
    if d.iter().any(|x| x.is_zero()) {
        return Err(Error::Domain("zero diagonal entry".into()));
    }
    let mut g = EighthRoot::one();
    for a in d {
        g = g.mul(weil_index_p(a, p)?);
    }
    Ok(g)
}

/// Does the local quadratic space (diagonal form of dimension n+1) represent
/// the rank-n moment matrix T? Codimension-one Witt criterion only.
pub fn local_represents(place: Place, space: &[Rat], t: &MomentMatrix) -> Result<bool> {
    t.require_nonsingular()?;
    let n = t.rank();
    if space.len() != n + 1 {
        return Err(Error::Domain(format!(
            "codimension-one criterion needs dim space = {} (got {})",
            n + 1,
            space.len()
        )));
    }
    if space.iter().any(|x| x.is_zero()) {
        return Err(Error::Singular("degenerate space".into()));
    }
    // diagonal quadratic coefficients of the T-span: diagonalize T itself
    let t_diag = t.mat.diagonalize();
    match place {
        Place::Infinity => {
            let pos_space = space.iter().filter(|x| x.is_positive()).count();
            let neg_space = space.len() - pos_space;
            let pos_t = t_diag.iter().filter(|x| x.is_positive()).count();
            let neg_t = n - pos_t;
            Ok(pos_t <= pos_space && neg_t <= neg_space)
        }
        Place::Finite(p) => {
            let place = Place::Finite(p);
            // δ makes det(M_T ⊥ ⟨δ⟩) match det(space) up to squares
            let det_space: Rat = space.iter().product();
            let det_t: Rat = t_diag.iter().product();
            let delta = det_space / det_t;
            let mut candidate = t_diag.clone();
            candidate.push(delta);
            let h_candidate = hasse_invariant(place, &candidate)?;
            let h_space = hasse_invariant(place, space)?;
            Ok(h_candidate == h_space)
        }
    }
}

/// Diff(C, T) for the incoherent collection attached to V (rational Gram of
/// signature (m,2) in the ½xᵀSx convention): V_p at every finite place,
/// positive definite at ∞.
pub fn diff_set(v_gram: &SymRat, t: &MomentMatrix) -> Result<Vec<Place>> {
    t.require_nonsingular()?;
    let n = t.rank();
    let (mp, mq) = v_gram.signature()?;
    if mq != 2 || mp + 2 != n + 1 {
        return Err(Error::Domain(format!(
            "expected signature (m,2) with m = n-1 = {}, got ({mp},{mq})",
            n - 1
        )));
    }
    let v_diag: Vec<Rat> = v_gram
        .diagonalize()
        .into_iter()
        .map(|d| d / rat_int(2))
        .collect();
    // candidate finite places: 2 plus odd primes in the supports of the
    // diagonalized space and of det(2T); everywhere else all symbols are
    // trivial and the unimodular space represents every unimodular class.
    let mut candidates: Vec<u64> = vec![2];
    let two_t_det = t.bilinear_gram().det();
    for x in v_diag.iter().chain(std::iter::once(&two_t_det)) {
        for p in odd_prime_support(x) {
            if !candidates.contains(&p) {
                candidates.push(p);
            }
        }
    }
    candidates.sort_unstable();
    let mut diff = Vec::new();
    // at infinity the incoherent space is positive definite
    let pos_def: Vec<Rat> = vec![Rat::one(); n + 1];
    if !local_represents(Place::Infinity, &pos_def, t)? {
        diff.push(Place::Infinity);
    }
    for p in candidates {
        if !local_represents(Place::Finite(p), &v_diag, t)? {
            diff.push(Place::Finite(p));
        }
    }
    Ok(diff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn hilbert_examples() {
        let inf = Place::Infinity;
        assert_eq!(hilbert_symbol(&rat(-1, 1), &rat(-1, 1), inf).unwrap(), -1);
        assert_eq!(
            hilbert_symbol(&rat(2, 1), &rat(3, 1), Place::Finite(7)).unwrap(),
            1
        );
        // squares mod 5 are {1,4}; 3 is a non-residue
        assert_eq!(
            hilbert_symbol(&rat(3, 1), &rat(5, 1), Place::Finite(5)).unwrap(),
            -1
        );
    }

    #[test]
    fn hilbert_product_formula_spot() {
        for (a, b) in [(3i64, 5i64), (-2, 7), (6, -10), (15, 21)] {
            let a = rat(a, 1);
            let b = rat(b, 1);
            let mut prod = hilbert_symbol(&a, &b, Place::Infinity).unwrap();
            let mut primes = vec![2u64];
            primes.extend(odd_prime_support(&(&a * &b)));
            for p in primes {
                prod *= hilbert_symbol(&a, &b, Place::Finite(p)).unwrap();
            }
            assert_eq!(prod, 1, "product formula for ({a}, {b})");
        }
    }

    #[test]
    fn jordan_examples() {
        let t = MomentMatrix::from_diag_i64(&[1, 3]);
        let j = jordan_decompose(3, &t).unwrap();
        assert_eq!(j.blocks, vec![(0, vec![1]), (1, vec![1])]);

        let t = MomentMatrix::new(
            SymRat::from_rows(vec![
                vec![rat(1, 1), rat(1, 1)],
                vec![rat(1, 1), rat(10, 1)],
            ])
            .unwrap(),
        );
        let j = jordan_decompose(3, &t).unwrap();
        assert_eq!(j.blocks, vec![(0, vec![1]), (2, vec![1])]);

        let t = MomentMatrix::from_diag_i64(&[2, 5]);
        let j = jordan_decompose(5, &t).unwrap();
        assert_eq!(j.blocks, vec![(0, vec![2]), (1, vec![1])]);
    }

    #[test]
    fn hasse_examples() {
        let p3 = Place::Finite(3);
        assert_eq!(
            hasse_invariant(p3, &[rat(1, 1), rat(1, 1), rat(1, 1)]).unwrap(),
            1
        );
        // (p, -p·u) with u a non-residue: (3, -3·2) at p=3
        assert_eq!(hasse_invariant(p3, &[rat(3, 1), rat(-6, 1)]).unwrap(), -1);
        assert_eq!(
            hasse_invariant(p3, &[rat(1, 1), rat(3, 1), rat(3, 1)]).unwrap(),
            -1
        );
    }

    #[test]
    fn gamma_real_examples() {
        assert_eq!(
            gamma_real(SignaturePair { p_plus: 0, q_minus: 2 }, 1),
            EighthRoot::new(2)
        );
        assert_eq!(
            gamma_real(SignaturePair { p_plus: 2, q_minus: 2 }, 3),
            EighthRoot::one()
        );
        assert_eq!(
            gamma_real(SignaturePair { p_plus: 1, q_minus: 2 }, 2),
            EighthRoot::new(2)
        );
    }

    #[test]
    fn weil_index_examples() {
        assert_eq!(weil_index_p(&rat(1, 1), 5).unwrap(), EighthRoot::one());
        assert_eq!(weil_index_p(&rat(5, 1), 5).unwrap(), EighthRoot::one());
        // Σ_{x mod 3} e(x²/3) = i√3 scaled: phase i
        assert_eq!(weil_index_p(&rat(3, 1), 3).unwrap(), EighthRoot::new(2));
        assert_eq!(weil_index_p(&rat(1, 1), 3).unwrap(), EighthRoot::new(2));
    }

    #[test]
    fn gamma_space_examples() {
        assert_eq!(
            gamma_space_p(5, &[rat(1, 1), rat(1, 1), rat(1, 1)]).unwrap(),
            EighthRoot::one()
        );
        // at p = 3 the unit Gauss sum Σ e(x²/3) = i√3 already has phase i,
        // so ⟨1,3⟩ gives i·i = -1 under the operational definition
        assert_eq!(
            gamma_space_p(3, &[rat(1, 1), rat(3, 1)]).unwrap(),
            EighthRoot::new(4)
        );
        assert_eq!(
            gamma_space_p(3, &[rat(3, 1), rat(3, 1)]).unwrap(),
            EighthRoot::new(4)
        );
    }

    #[test]
    fn local_represents_examples() {
        let p3 = Place::Finite(3);
        let space = vec![rat(1, 1), rat(1, 1), rat(1, 1)];
        let t = MomentMatrix::from_diag_i64(&[1, 1]);
        assert!(local_represents(p3, &space, &t).unwrap());
        let t = MomentMatrix::from_diag_i64(&[1, 3]);
        assert!(!local_represents(p3, &space, &t).unwrap());
        let t = MomentMatrix::from_diag_i64(&[1, -1]);
        assert!(!local_represents(Place::Infinity, &space, &t).unwrap());
    }

    #[test]
    fn diff_set_examples() {
        // V = ⟨-1,-1⟩ (negative definite plane), T = (1): Diff = {2}
        let v = LatticeGram::from_quadratic_diag_i64(&[-1, -1]);
        let t = MomentMatrix::from_diag_i64(&[1]);
        let d = diff_set(&v.mat, &t).unwrap();
        assert_eq!(d, vec![Place::Finite(2)]);

        // split signature (2,2) space, T = diag(1,1,3): Diff = {3}
        let v = LatticeGram::hyperbolic_plane()
            .direct_sum(&LatticeGram::hyperbolic_plane());
        let t = MomentMatrix::from_diag_i64(&[1, 1, 3]);
        let d = diff_set(&v.mat, &t).unwrap();
        assert_eq!(d, vec![Place::Finite(3)]);

        // a negative eigenvalue forces ∞ ∈ Diff
        let t = MomentMatrix::from_diag_i64(&[1, -1, 3]);
        let d = diff_set(&v.mat, &t).unwrap();
        assert!(d.contains(&Place::Infinity));
        assert_eq!(d.len() % 2, 1);
    }
}
