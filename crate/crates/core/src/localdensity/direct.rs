//! Direct column-by-column enumeration of representation counts mod p^k.
//! Small-instance oracle for the character-sum engine: columns are placed one
//! at a time and every Gram constraint touching the new column is checked
//! immediately, pruning the search tree.

use crate::error::{Error, Result};
use num::bigint::BigInt;

const MAX_STATES: u128 = 40_000_000;

/// Count X = (x_1..x_n), x_i ∈ (Z/q)^m with XᵀSX ≡ G (mod q), where S and G
/// are symmetric matrices of residues mod q.
pub fn count_direct(q: u64, s: &[Vec<u64>], g: &[Vec<u64>], ) -> Result<BigInt> {
    let m = s.len();
    let n = g.len();
    let states = (q as u128).pow(m as u32) * (n as u128);
    if states > MAX_STATES {
        return Err(Error::Infeasible(format!(
            "direct enumeration needs ~{states} states (ceiling {MAX_STATES})"
        )));
    }
    let mut columns: Vec<Vec<u64>> = Vec::with_capacity(n);
    let mut total = BigInt::from(0u64);
    let mut x = vec![0u64; m];
    enumerate(q, s, g, m, n, &mut columns, &mut x, &mut total);
    Ok(total)
}

fn pair(q: u64, s: &[Vec<u64>], a: &[u64], b: &[u64]) -> u64 {
    let m = s.len();
    let mut acc: u128 = 0;
    for i in 0..m {
        for j in 0..m {
            acc += (a[i] as u128) * (s[i][j] as u128) % q as u128 * (b[j] as u128);
            acc %= (q as u128) << 32; // keep headroom, reduce lazily
        }
    }
    (acc % q as u128) as u64
}

fn enumerate(
    q: u64,
    s: &[Vec<u64>],
    g: &[Vec<u64>],
    m: usize,
    n: usize,
    columns: &mut Vec<Vec<u64>>,
    x: &mut Vec<u64>,
    total: &mut BigInt,
) {
    let col = columns.len();
    // iterate x over (Z/q)^m
    for v in x.iter_mut() {
        *v = 0;
    }
    loop {
        // constraint check for the candidate column
        let ok = (0..col).all(|i| pair(q, s, &columns[i], x) == g[i][col])
            && pair(q, s, x, x) == g[col][col];
        if ok {
            if col + 1 == n {
                *total += 1;
            } else {
                columns.push(x.clone());
                let mut y = vec![0u64; m];
                enumerate(q, s, g, m, n, columns, &mut y, total);
                columns.pop();
            }
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos == m {
                return;
            }
            x[pos] += 1;
            if x[pos] < q {
                break;
            }
            x[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xy_mod_5() {
        // hyperbolic plane S = [[0,1],[1,0]], target 2T = (2): xy ≡ 1 mod 5
        let s = vec![vec![0, 1], vec![1, 0]];
        let g = vec![vec![2]];
        assert_eq!(count_direct(5, &s, &g).unwrap(), BigInt::from(4));
    }

    #[test]
    fn square_mod_9() {
        let s = vec![vec![2]];
        assert_eq!(count_direct(9, &s, &vec![vec![2]]).unwrap(), BigInt::from(2));
        assert_eq!(count_direct(9, &s, &vec![vec![6]]).unwrap(), BigInt::from(0));
    }
}
