//! Small dense symmetric matrices over the rationals, exact arithmetic only.

use crate::error::{Error, Result};
use crate::rat::{rat_int, Rat};
use num::{One, Signed, Zero};

/// Symmetric rational matrix stored densely (row major).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymRat {
    pub n: usize,
    a: Vec<Rat>,
}

impl SymRat {
    pub fn zeros(n: usize) -> Self {
        SymRat { n, a: vec![Rat::zero(); n * n] }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Domain("matrix is not square".into()));
        }
        let mut m = SymRat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.a[i * n + j] = rows[i][j].clone();
            }
        }
        for i in 0..n {
            for j in 0..i {
                if m.at(i, j) != m.at(j, i) {
                    return Err(Error::Domain("matrix is not symmetric".into()));
                }
            }
        }
        Ok(m)
    }

    pub fn from_diag(d: &[Rat]) -> Self {
        let mut m = SymRat::zeros(d.len());
        for (i, x) in d.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![Rat::one(); n])
    }

    pub fn at(&self, i: usize, j: usize) -> &Rat {
        &self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.a[i * self.n + j] = v.clone();
        self.a[j * self.n + i] = v;
    }

    pub fn scale(&self, c: &Rat) -> SymRat {
        let mut out = self.clone();
        for x in out.a.iter_mut() {
            *x *= c;
        }
        out
    }

    /// Direct sum of two symmetric matrices.
    pub fn direct_sum(&self, other: &SymRat) -> SymRat {
        let n = self.n + other.n;
        let mut out = SymRat::zeros(n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.a[i * n + j] = self.at(i, j).clone();
            }
        }
        for i in 0..other.n {
            for j in 0..other.n {
                out.a[(self.n + i) * n + (self.n + j)] = other.at(i, j).clone();
            }
        }
        out
    }

    /// Exact determinant by fraction-free-ish Gaussian elimination.
    pub fn det(&self) -> Rat {
        let n = self.n;
        let mut m = self.a.clone();
        let mut det = Rat::one();
        for col in 0..n {
            let pivot_row = (col..n).find(|&r| !m[r * n + col].is_zero());
            let Some(pr) = pivot_row else { return Rat::zero() };
            if pr != col {
                for j in 0..n {
                    m.swap(pr * n + j, col * n + j);
                }
                det = -det;
            }
            let piv = m[col * n + col].clone();
            det *= &piv;
            for r in (col + 1)..n {
                let factor = &m[r * n + col] / &piv;
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    let sub = &factor * &m[col * n + j];
                    m[r * n + j] -= sub;
                }
            }
        }
        det
    }

    /// Congruence diagonalization over Q: returns d with P^T A P = diag(d)
    /// for some invertible rational P. Zero diagonal entries appear exactly
    /// for the radical (rank deficiency).
    pub fn diagonalize(&self) -> Vec<Rat> {
        let n = self.n;
        let mut m = self.a.clone();
        let at = |m: &Vec<Rat>, i: usize, j: usize| m[i * n + j].clone();
        let mut out = Vec::with_capacity(n);
        let mut rows: Vec<usize> = (0..n).collect(); // active indices
        while let Some(&s) = rows.first() {
            // ensure a nonzero diagonal pivot among active rows
            let diag_pivot = rows.iter().position(|&i| !at(&m, i, i).is_zero());
            match diag_pivot {
                None => {
                    // all active diagonal entries vanish; find off-diagonal
                    let mut found = None;
                    'outer: for (ai, &i) in rows.iter().enumerate() {
                        for &j in rows.iter().skip(ai + 1) {
                            if !at(&m, i, j).is_zero() {
                                found = Some((i, j));
                                break 'outer;
                            }
                        }
                    }
                    let Some((i, j)) = found else {
                        // active block is zero: the rest of the diagonal is 0
                        for _ in &rows {
                            out.push(Rat::zero());
                        }
                        break;
                    };
                    // row/col i += row/col j creates diagonal 2*m[i][j]
                    for c in 0..n {
                        let add = at(&m, j, c);
                        m[i * n + c] += &add;
                    }
                    for r in 0..n {
                        let add = at(&m, r, j);
                        m[r * n + i] += &add;
                    }
                    continue;
                }
                Some(pos) => {
                    let i = rows[pos];
                    if i != s {
                        // move pivot to the front of active set by swapping labels
                        rows.swap(0, pos);
                    }
                }
            }
            let i = rows[0];
            let piv = at(&m, i, i);
            out.push(piv.clone());
            for &r in rows.iter().skip(1) {
                let lam = &at(&m, r, i) / &piv;
                if lam.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let sub = &lam * &at(&m, i, c);
                    m[r * n + c] -= sub;
                }
                for rr in 0..n {
                    let sub = &lam * &at(&m, rr, i);
                    m[rr * n + r] -= sub;
                }
            }
            rows.remove(0);
        }
        out
    }

    /// Signature (#positive, #negative) of the nondegenerate form.
    pub fn signature(&self) -> Result<(usize, usize)> {
        let d = self.diagonalize();
        if d.iter().any(|x| x.is_zero()) {
            return Err(Error::Singular("signature of a singular matrix".into()));
        }
        let pos = d.iter().filter(|x| x.is_positive()).count();
        Ok((pos, d.len() - pos))
    }

    /// g^T A g for a square rational g (not necessarily symmetric-preserving
    /// beyond congruence).
    pub fn congruence(&self, g: &[Vec<Rat>]) -> SymRat {
        let n = self.n;
        assert_eq!(g.len(), n);
        let mut out = SymRat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut s = Rat::zero();
                for k in 0..n {
                    for l in 0..n {
                        s += &g[k][i] * self.at(k, l) * &g[l][j];
                    }
                }
                out.a[i * n + j] = s;
            }
        }
        out
    }

    pub fn principal_block(&self, lo: usize, hi: usize) -> SymRat {
        let k = hi - lo;
        let mut out = SymRat::zeros(k);
        for i in 0..k {
            for j in 0..k {
                out.a[i * k + j] = self.at(lo + i, lo + j).clone();
            }
        }
        out
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| crate::rat::rat_to_f64(self.at(i, j))).collect())
            .collect()
    }

    pub fn diag_i64(d: &[i64]) -> SymRat {
        Self::from_diag(&d.iter().map(|&x| rat_int(x)).collect::<Vec<_>>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn det_small() {
        let m = SymRat::from_rows(vec![
            vec![rat(1, 1), rat(1, 1)],
            vec![rat(1, 1), rat(10, 1)],
        ])
        .unwrap();
        assert_eq!(m.det(), rat(9, 1));
        let h = SymRat::from_rows(vec![
            vec![rat(0, 1), rat(1, 1)],
            vec![rat(1, 1), rat(0, 1)],
        ])
        .unwrap();
        assert_eq!(h.det(), rat(-1, 1));
    }

    #[test]
    fn diagonalize_hyperbolic() {
        let h = SymRat::from_rows(vec![
            vec![rat(0, 1), rat(1, 1)],
            vec![rat(1, 1), rat(0, 1)],
        ])
        .unwrap();
        let d = h.diagonalize();
        assert_eq!(d.len(), 2);
        // one positive, one negative, product with -1 a square times det
        let (p, q) = h.signature().unwrap();
        assert_eq!((p, q), (1, 1));
        assert!(!d[0].is_zero() && !d[1].is_zero());
    }

    #[test]
    fn signature_mixed() {
        let m = SymRat::diag_i64(&[2, -3, 5, -7]);
        assert_eq!(m.signature().unwrap(), (2, 2));
    }

    #[test]
    fn congruence_preserves_det_up_to_square() {
        let m = SymRat::diag_i64(&[1, 2]);
        let g = vec![vec![rat(1, 1), rat(3, 1)], vec![rat(1, 1), rat(4, 1)]];
        let c = m.congruence(&g);
        // det(g) = 1, so determinant preserved exactly here
        assert_eq!(c.det(), m.det());
        assert_eq!(c.at(0, 0), &rat(3, 1)); // 1*1 + 2*1
    }
}
