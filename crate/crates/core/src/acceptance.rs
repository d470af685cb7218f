//! Self-contained verification battery: each check exercises one of the
//! headline identities end to end and reports pass/fail with a diagnostic
//! line. The checks are deterministic (fixed RNG seeds) and respect the
//! stated runtime budgets.

use crate::archwhittaker::eta::etatrafo_residual;
use crate::archwhittaker::green::height_arch_n1;
use crate::archwhittaker::whittaker::{
    det_posdef, eta_asymptotic_check, whitt0_value, whittaker_derivative_n1, whittaker_real,
    RadialPoint,
};
use crate::archwhittaker::QuadratureSpec;
use crate::eisenstein::constants::{b_infinity, b_quotient_rhs, so_volume, ExactConstant};
use crate::eisenstein::{coefficient_derivative, IncoherentDatum};
use crate::error::Result;
use crate::localdensity::{
    count_representations, density_polynomial_general, density_unimodular_t, nu_p,
    prewarm_counts, height_ratio,
};
use crate::matrix::SymRat;
use crate::quadform::{diff_set, hilbert_symbol, jordan_decompose, LatticeGram, MomentMatrix, Place};
use crate::rat::{odd_prime_support, rat, rat_int, Rat};
use num::complex::Complex64;
use num::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub index: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl std::fmt::Display for CheckReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "ACCEPTANCE {} ({}): {} — {}",
            self.index,
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.detail
        )
    }
}

fn report(index: usize, name: &'static str, r: Result<(bool, String)>) -> CheckReport {
    match r {
        Ok((pass, detail)) => CheckReport { index, name, pass, detail },
        Err(e) => CheckReport { index, name, pass: false, detail: format!("error: {e}") },
    }
}

/// Archimedean local Siegel–Weil at n = 1:
/// Ht_∞(T)·e^{−2πT} + B_{1,∞}·W′_T(1, 0, Φ₁) = 0 for T < 0.
fn check1() -> Result<(bool, String)> {
    let start = Instant::now();
    let spec = QuadratureSpec::default();
    let b1 = b_infinity(1)?.exact.complex_value();
    let mut worst = 0.0f64;
    for &t in &[-0.5, -1.0, -2.0] {
        let ht = height_arch_n1(t)?;
        let lhs = Complex64::new(ht * (-2.0 * PI * t).exp(), 0.0);
        let (wd, _) = whittaker_derivative_n1(t, &spec)?;
        let rel = (lhs + b1 * wd).norm() / lhs.norm();
        worst = worst.max(rel);
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst < 1e-8 && secs < 1.0;
    Ok((pass, format!("worst relative residual {worst:.2e} over T ∈ {{−1/2,−1,−2}}, {secs:.2}s")))
}

/// Closed-form density vs exact counting for unimodular L and T.
fn check2() -> Result<(bool, String)> {
    let start = Instant::now();
    let mut instances = 0usize;
    let mut pass = true;
    let mut note = String::new();
    for &p in &[3u64, 5] {
        let x_inv = Rat::one() / rat_int(p as i64);
        for rank in 1..=4usize {
            for variant in 0..2usize {
                let mut diag = vec![1i64; rank];
                if variant == 1 {
                    diag[rank - 1] = 2;
                }
                let l = LatticeGram::from_quadratic_diag_i64(&diag);
                for t_diag in [vec![1i64], vec![2], vec![1, 1], vec![1, 2]] {
                    if t_diag.len() > rank {
                        continue;
                    }
                    let t = MomentMatrix::from_diag_i64(&t_diag);
                    let closed = density_unimodular_t(p, &l, &t)?;
                    for (r, x) in [(0usize, Rat::one()), (1, x_inv.clone())] {
                        let c = count_representations(p, &l, &t, r, 1)?;
                        if !c.stabilized || closed.eval(&x) != c.normalized {
                            pass = false;
                            note = format!(
                                "mismatch at p={p}, L=⟨{diag:?}⟩, T={t_diag:?}, r={r}"
                            );
                        }
                        instances += 1;
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if instances < 2 * 40 {
        pass = false;
        note = format!("only {instances} evaluations");
    }
    if secs >= 60.0 {
        pass = false;
    }
    if note.is_empty() {
        note = format!("{instances} exact evaluations across 56 (L, T, r) instances, {secs:.1}s");
    }
    Ok((pass, note))
}

/// W′_{T,3}/W_{T^u,3} from counting equals ν_3(exponents)·log 3 exactly.
fn check3() -> Result<(bool, String)> {
    let start = Instant::now();
    let l = LatticeGram::from_quadratic_diag_i64(&[1, 1, 1, 1]);
    let cases = [
        MomentMatrix::from_diag_i64(&[1, 1, 3]),
        MomentMatrix::from_diag_i64(&[1, 3, 3]),
        MomentMatrix::from_diag_i64(&[3, 3, 3]),
    ];
    // one histogram pass per modulus serves all three targets
    for k in 1..=3u32 {
        prewarm_counts(3, k, &[&cases[0], &cases[1], &cases[2]])?;
    }
    let mut pass = true;
    let mut parts = Vec::new();
    for t in &cases {
        let diag: Vec<i64> = (0..3).map(|i| t.mat.at(i, i).numer().try_into().unwrap()).collect();
        match height_ratio(3, &l, t) {
            Ok(hr) => {
                let j = jordan_decompose(3, t)?;
                let e = j.exponents();
                let nu = nu_p(e[0] as u64, e[1] as u64, e[2] as u64, 3)?;
                if hr.coeff != nu {
                    pass = false;
                }
                parts.push(format!("T=diag{diag:?}: W′/W_{{T^u}} = {}·log 3", hr.coeff));
            }
            Err(crate::error::Error::Domain(msg)) => {
                parts.push(format!("T=diag{diag:?}: skipped ({msg})"));
            }
            Err(e) => return Err(e),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 300.0 {
        pass = false;
    }
    Ok((pass, format!("{}; {secs:.0}s", parts.join("; "))))
}

fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    while out.len() > 1 && out.last().unwrap().is_zero() {
        out.pop();
    }
    out
}

/// The ratio α(X,T,L)/α(X,T^u,L) is insensitive to replacing (T, L) by the
/// lower-rank companion (T₂, L₂); verified as an exact identity of rational
/// functions via cross multiplication.
fn check4() -> Result<(bool, String)> {
    let start = Instant::now();
    let l = LatticeGram::from_quadratic_diag_i64(&[1, 1, 1, 1]);
    let l2 = LatticeGram::from_quadratic_diag_i64(&[1, 1, 1]);
    let t = MomentMatrix::from_diag_i64(&[1, 3, 3]);
    let t2 = MomentMatrix::from_diag_i64(&[3, 3]);
    let a_t = density_polynomial_general(3, &l, &t)?;
    let a_tu = density_unimodular_t(3, &l, &MomentMatrix::new(SymRat::identity(3)))?;
    let a_t2 = density_polynomial_general(3, &l2, &t2)?;
    let a_t2u = density_unimodular_t(3, &l2, &MomentMatrix::new(SymRat::identity(2)))?;
    let lhs = poly_mul(&a_t.coeffs, &a_t2u.coeffs);
    let rhs = poly_mul(&a_tu.coeffs, &a_t2.coeffs);
    let pass = lhs == rhs;
    let secs = start.elapsed().as_secs_f64();
    Ok((
        pass,
        format!(
            "cross products of degrees {}·{} and {}·{} agree exactly; {secs:.0}s",
            a_t.degree(),
            a_t2u.degree(),
            a_tu.degree(),
            a_t2.degree()
        ),
    ))
}

fn check5() -> Result<(bool, String)> {
    let b1 = b_infinity(1)?.exact.complex_value();
    let b2 = b_infinity(2)?.exact.complex_value();
    let e1 = (b1 - Complex64::new(0.0, -1.0 / PI)).norm();
    let e2 = (b2 - Complex64::new(0.0, 1.0 / (4.0 * 2f64.sqrt() * PI * PI))).norm();
    let mut pass = e1 < 1e-14 && e2 < 1e-14;
    for n in 2..=6usize {
        let lhs = b_infinity(n)?.exact.div(&b_infinity(n - 1)?.exact)?;
        if lhs != b_quotient_rhs(n)? {
            pass = false;
        }
    }
    let two_pi = ExactConstant::from_rat(rat(2, 1)).mul(&ExactConstant::pi_pow_half(2));
    if so_volume(2)? != two_pi {
        pass = false;
    }
    Ok((pass, format!("|B₁ err| = {e1:.1e}, |B₂ err| = {e2:.1e}; quotient law exact for n ≤ 6; vol SO(2) = 2π")))
}

/// The one-parameter closed family through the s = 0 special value:
/// W(β) = e^{−iπnκ/2}·2^{n(n−1)/4−n(ρ−1)}·(2π)^{nρ}/Γ_n(ρ)·|a|^{β+ρ}·
/// det(2y)^{−β}·e^{−2π tr(Ty)} with κ = ρ − β (the Γ_n(β) pair cancelled).
fn closed_w_family(n: usize, t: &[f64], point: &RadialPoint, beta: f64) -> Result<Complex64> {
    let nf = n as f64;
    let rho = (nf + 1.0) / 2.0;
    let kappa = rho - beta;
    let two_y: Vec<f64> = point.y.iter().map(|v| 2.0 * v).collect();
    let det2y = det_posdef(n, &two_y).ok_or_else(|| {
        crate::error::Error::Domain("y must be positive definite".into())
    })?;
    let mut tr = 0.0;
    for i in 0..n {
        for j in 0..n {
            tr += t[i * n + j] * point.y[j * n + i];
        }
    }
    let phase = Complex64::from_polar(1.0, -PI * nf * kappa / 2.0);
    let g = crate::archwhittaker::special::siegel_gamma_real(n, rho)?;
    Ok(phase
        * 2f64.powf(nf * (nf - 1.0) / 4.0 - nf * (rho - 1.0))
        * (2.0 * PI).powf(nf * rho)
        / g
        * point.a_det().powf(beta + rho)
        * det2y.powf(-beta)
        * (-2.0 * PI * tr).exp())
}

/// Quadrature along the α = ρ_n line against the closed family, whose β → 0
/// endpoint is the s = 0 special value for positive definite T; plus the
/// normalization −(1/2)·B_n·W_T(1,0,Φ_{ρ_n}) = e^{−2π tr T}.
fn check6() -> Result<(bool, String)> {
    let spec = QuadratureSpec { tol: 1e-11, max_level: 12 };
    let mut pass = true;
    let mut parts = Vec::new();
    let cases: [(usize, Vec<f64>, Vec<f64>, Vec<f64>, f64); 2] = [
        (1, vec![0.75], vec![0.5], vec![1.0, 0.5], 1e-8),
        (2, vec![1.0, 0.25, 0.25, 0.75], vec![0.5, 0.0, 0.0, 0.5], vec![1.5, 1.0], 1e-6),
    ];
    for (n, t, y, betas, tol) in &cases {
        let point = RadialPoint::from_flat(*n, y.clone())?;
        let rho = (*n as f64 + 1.0) / 2.0;
        let mut worst = 0.0f64;
        for &beta in betas {
            // on the α = ρ line, (s, κ) = (β, ρ − β)
            let (quad, _) = whittaker_real(t, &point, beta, rho - beta, &spec)?;
            let closed = closed_w_family(*n, t, &point, beta)?;
            worst = worst.max((quad - closed).norm() / closed.norm());
        }
        // the β → 0 endpoint of the closed family is the special value
        let endpoint = closed_w_family(*n, t, &point, 0.0)?;
        let w0 = whitt0_value(*n, rho, t, &point)?;
        let e0 = (endpoint - w0).norm() / w0.norm();
        // Remark: −(1/2)·B_n·W_T(1, 0) = e^{−2π tr T} at y = 1
        let unit = RadialPoint::from_diag(&vec![1.0; *n])?;
        let w_at_one = whitt0_value(*n, rho, t, &unit)?;
        let tr: f64 = (0..*n).map(|i| t[i * n + i]).sum();
        let bn = b_infinity(*n)?.exact.complex_value();
        let norm_res =
            (Complex64::new(-0.5, 0.0) * bn * w_at_one - (-2.0 * PI * tr).exp()).norm()
                / (-2.0 * PI * tr).exp();
        if worst >= *tol || e0 >= *tol || norm_res >= *tol {
            pass = false;
        }
        parts.push(format!(
            "n={n}: quadrature {worst:.1e}, endpoint {e0:.1e}, normalization {norm_res:.1e}"
        ));
    }
    Ok((pass, parts.join("; ")))
}

/// Radial asymptotics of η: closed limits at n = 1, monotone approach at
/// n = 2.
fn check7() -> Result<(bool, String)> {
    let spec = QuadratureSpec { tol: 1e-9, max_level: 11 };
    let mut pass = true;
    let mut parts = Vec::new();
    // n = 1, T > 0: Richardson-extrapolated residual over {12.5, 25, 50}
    for (t1, alpha, beta) in [(2.0, 2.0, 1.5), (3.0, 2.5, 1.2)] {
        let c = eta_asymptotic_check(1, &[t1], alpha, beta, &[12.5, 25.0, 50.0], &[], &spec)?;
        let rel = c.richardson_residual / c.rhs.abs().max(1.0);
        if rel >= 1e-4 {
            pass = false;
        }
        parts.push(format!("n=1 T={t1}: {rel:.1e}"));
    }
    // n = 1, T < 0: the limit is 0
    let c = eta_asymptotic_check(1, &[-1.0], 2.0, 1.5, &[25.0, 50.0], &[], &spec)?;
    let rel0 = *c.raw_residuals.last().unwrap();
    if c.rhs != 0.0 || rel0 >= 1e-4 {
        pass = false;
    }
    parts.push(format!("n=1 T=−1: {rel0:.1e}"));
    // n = 2: residual < 1e−2 at y₁ = 40, decreasing along {10, 20, 40}
    let t = [4.0, 0.3, 0.3, 1.0];
    let c = eta_asymptotic_check(2, &t, 2.5, 2.0, &[10.0, 20.0, 40.0], &[0.2, 1.5], &spec)?;
    let r = &c.raw_residuals;
    if !(r[0] > r[1] && r[1] > r[2] && r[2] < 1e-2) {
        pass = false;
    }
    parts.push(format!("n=2: residuals {:.1e} > {:.1e} > {:.1e}", r[0], r[1], r[2]));
    Ok((pass, parts.join("; ")))
}

fn random_nonzero(rng: &mut StdRng, bound: i64) -> i64 {
    loop {
        let v = rng.gen_range(-bound..=bound);
        if v != 0 {
            return v;
        }
    }
}

fn check8() -> Result<(bool, String)> {
    let mut pass = true;
    let mut parts = Vec::new();

    // Hilbert product formula over all places, 200 random pairs
    let mut rng = StdRng::seed_from_u64(0x5157_1e61);
    let mut worst_pair = String::new();
    for _ in 0..200 {
        let a = rat(random_nonzero(&mut rng, 30), rng.gen_range(1..=12));
        let b = rat(random_nonzero(&mut rng, 30), rng.gen_range(1..=12));
        let mut places = vec![Place::Infinity, Place::Finite(2)];
        for p in odd_prime_support(&a).into_iter().chain(odd_prime_support(&b)) {
            if !places.contains(&Place::Finite(p)) {
                places.push(Place::Finite(p));
            }
        }
        let mut prod = 1i32;
        for pl in places {
            prod *= hilbert_symbol(&a, &b, pl)?;
        }
        if prod != 1 {
            pass = false;
            worst_pair = format!(" (fails at a={a}, b={b})");
        }
    }
    parts.push(format!("Hilbert product = 1 on 200 pairs{worst_pair}"));

    // |Diff| is odd, 100 random signature-(m,2) instances
    let mut rng = StdRng::seed_from_u64(0xd1ff_0dd5);
    let mut odd_ok = true;
    for _ in 0..100 {
        let m = rng.gen_range(1..=3usize);
        let mut diag: Vec<i64> = (0..m).map(|_| rng.gen_range(1..=7i64)).collect();
        diag.push(-rng.gen_range(1..=3i64));
        diag.push(-rng.gen_range(1..=3i64));
        let l = LatticeGram::from_quadratic_diag_i64(&diag);
        // at most two negative eigenvalues: the parity law compares Hasse
        // invariants of T ⊥ ⟨δ⟩ against the positive definite space at ∞,
        // and with three or more negatives both invariants can be +1 while
        // the signatures still differ, so oddness is only a theorem in this
        // regime (explicit even example: V = ⟨2,4,−3,−1⟩, T = diag(−3,−3,−4)
        // has Diff = {∞, 2})
        let mut t_diag: Vec<i64> = (0..=m).map(|_| random_nonzero(&mut rng, 5)).collect();
        let mut negs = t_diag.iter().filter(|x| **x < 0).count();
        for x in t_diag.iter_mut() {
            if negs <= 2 {
                break;
            }
            if *x < 0 {
                *x = -*x;
                negs -= 1;
            }
        }
        let t = MomentMatrix::from_diag_i64(&t_diag);
        let d = diff_set(&l.mat, &t)?;
        if d.len() % 2 != 1 {
            odd_ok = false;
            pass = false;
        }
    }
    parts.push(format!("|Diff| odd on 100 instances: {odd_ok}"));

    // η transformation invariance, 20 random S (15 at n=1, 5 at n=2)
    let spec = QuadratureSpec { tol: 1e-9, max_level: 11 };
    let mut rng = StdRng::seed_from_u64(0xe7a7_af00);
    let mut worst_eta = 0.0f64;
    for _ in 0..15 {
        let s = rng.gen_range(0.3..2.5f64);
        let y = rng.gen_range(0.5..2.0f64);
        let mut t = rng.gen_range(-1.5..1.5f64);
        if t.abs() < 0.1 {
            t += 0.2;
        }
        let alpha = rng.gen_range(1.2..2.5f64);
        let beta = rng.gen_range(1.2..2.5f64);
        let res = etatrafo_residual(1, &[y], &[t], &[s], alpha, beta, &spec)?;
        worst_eta = worst_eta.max(res);
    }
    for _ in 0..5 {
        // S with positive determinant, y = AᵀA + I/2, regular symmetric T
        let s = loop {
            let c: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0f64)).collect();
            if c[0] * c[3] - c[1] * c[2] > 0.3 {
                break c;
            }
        };
        let a: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0f64)).collect();
        let y = [
            a[0] * a[0] + a[2] * a[2] + 0.5,
            a[0] * a[1] + a[2] * a[3],
            a[0] * a[1] + a[2] * a[3],
            a[1] * a[1] + a[3] * a[3] + 0.5,
        ];
        let t = loop {
            let d: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0f64)).collect();
            if (d[0] * d[2] - d[1] * d[1]).abs() > 0.05 {
                break [d[0], d[1], d[1], d[2]];
            }
        };
        let alpha = rng.gen_range(1.8..2.6f64);
        let beta = rng.gen_range(1.8..2.6f64);
        let res = etatrafo_residual(2, &y, &t, &s, alpha, beta, &spec)?;
        worst_eta = worst_eta.max(res);
    }
    if worst_eta >= 1e-6 {
        pass = false;
    }
    parts.push(format!("η transformation worst residual {worst_eta:.1e} over 20 S"));

    // Jordan invariants under 50 random unimodular base changes
    let mut rng = StdRng::seed_from_u64(0x0bad_da7a);
    let mut jordan_ok = true;
    for _ in 0..50 {
        let p = if rng.gen_bool(0.5) { 3u64 } else { 5 };
        let n = rng.gen_range(2..=4usize);
        let diag: Vec<Rat> = (0..n)
            .map(|_| {
                let e = rng.gen_range(0..=2i32);
                let u = if rng.gen_bool(0.5) { 1 } else { 2 };
                rat_int(u) * Rat::from(num::BigInt::from(p)).pow(e)
            })
            .collect();
        let gram = SymRat::from_diag(&diag);
        // random product of integer shears: determinant stays 1
        let mut u: Vec<Vec<Rat>> = (0..n)
            .map(|i| (0..n).map(|j| rat_int((i == j) as i64)).collect())
            .collect();
        for _ in 0..4 {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n);
            while j == i {
                j = rng.gen_range(0..n);
            }
            let c = rat_int(rng.gen_range(-2..=2i64));
            for r in 0..n {
                let add = &u[r][i] * &c;
                u[r][j] += add;
            }
        }
        let changed = gram.congruence(&u);
        let j1 = jordan_decompose(p, &MomentMatrix::new(gram))?;
        let j2 = jordan_decompose(p, &MomentMatrix::new(changed))?;
        if j1.exponents() != j2.exponents() {
            jordan_ok = false;
            pass = false;
            continue;
        }
        let mut exps = j1.exponents();
        exps.dedup();
        for e in exps {
            if j1.block_unit_class(e) != j2.block_unit_class(e) {
                jordan_ok = false;
                pass = false;
            }
        }
    }
    parts.push(format!("Jordan invariants stable under 50 base changes: {jordan_ok}"));

    Ok((pass, parts.join("; ")))
}

/// End-to-end derivative assembly on the signature-(2,2) split instance.
fn check9() -> Result<(bool, String)> {
    let h = LatticeGram::hyperbolic_plane();
    let datum = IncoherentDatum::new(h.direct_sum(&h))?;
    let t = MomentMatrix::from_diag_i64(&[1, 1, 3]);
    let tau = [1.0, 1.0, 1.0];
    let rep = coefficient_derivative(&datum, &t, &tau)?;
    let rep2 = coefficient_derivative(&datum, &t, &tau)?;
    let mut pass = rep.diff == vec![Place::Finite(3)];
    let deriv: Vec<_> = rep.factors.iter().filter(|f| f.derivative.is_some()).collect();
    if deriv.len() != 1 || deriv[0].place != Place::Finite(3) {
        pass = false;
    }
    let exact_ok = deriv
        .first()
        .and_then(|f| f.derivative_exact.as_deref())
        .map(|s| s.starts_with("1 * log 3"))
        .unwrap_or(false);
    if !exact_ok {
        pass = false;
    }
    let assembled = rep.assembled_derivative.unwrap_or(Complex64::new(f64::NAN, 0.0));
    if !assembled.is_finite() || assembled.norm() == 0.0 {
        pass = false;
    }
    if rep2.assembled_derivative != rep.assembled_derivative {
        pass = false;
    }
    let provenances: Vec<String> = rep
        .factors
        .iter()
        .map(|f| format!("{:?}:{}", f.place, f.provenance))
        .collect();
    Ok((
        pass,
        format!(
            "Diff = {{3}}, derivative factor {} (= {:.6e}+{:.6e}i assembled), provenance [{}], deterministic",
            deriv.first().and_then(|f| f.derivative_exact.clone()).unwrap_or_default(),
            assembled.re,
            assembled.im,
            provenances.join(", ")
        ),
    ))
}

pub fn run_criterion(index: usize) -> CheckReport {
    match index {
        1 => report(1, "archimedean local Siegel-Weil, n=1", check1()),
        2 => report(2, "density closed form vs counting oracle", check2()),
        3 => report(3, "finite Whittaker derivative ratio at p=3", check3()),
        4 => report(4, "density ratio identity", check4()),
        5 => report(5, "exact archimedean constants", check5()),
        6 => report(6, "special value vs quadrature", check6()),
        7 => report(7, "radial asymptotics of η", check7()),
        8 => report(8, "property suites", check8()),
        9 => report(9, "end-to-end coefficient derivative", check9()),
        _ => CheckReport {
            index,
            name: "unknown",
            pass: false,
            detail: "criteria are numbered 1..=9".into(),
        },
    }
}

pub fn run_all() -> Vec<CheckReport> {
    (1..=9).map(run_criterion).collect()
}
