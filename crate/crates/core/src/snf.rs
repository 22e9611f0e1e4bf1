//! Smith normal form over the integers, used to certify saturation of the
//! lattice spanned by the outgoing directions at a vertex.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Nonzero elementary divisors `d_1 | d_2 | ...` of the row lattice of
/// `rows`. Their count is the rank.
pub fn elementary_divisors(rows: &[Vec<i64>]) -> Vec<BigInt> {
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let mut out = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        // pivot: smallest nonzero entry in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let p = a[t][t].clone();
            let mut dirty = None;
            for i in t + 1..m {
                let q = a[i][t].div_floor(&p);
                if !q.is_zero() {
                    for j in t..n {
                        let x = &q * &a[t][j];
                        a[i][j] -= x;
                    }
                }
                if !a[i][t].is_zero() {
                    dirty = Some((i, t));
                }
            }
            for j in t + 1..n {
                let q = a[t][j].div_floor(&p);
                if !q.is_zero() {
                    for row in a.iter_mut().skip(t) {
                        let x = &q * &row[t];
                        row[j] -= x;
                    }
                }
                if !a[t][j].is_zero() {
                    dirty = Some((t, j));
                }
            }
            if let Some((i, j)) = dirty {
                // the remainder is smaller than the pivot; make it the pivot
                a.swap(t, i);
                for row in a.iter_mut() {
                    row.swap(t, j);
                }
                continue;
            }
            // divisibility of the rest of the block; a bad row is folded into
            // row t and reduced again
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !a[i][j].is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    for k in t..n {
                        let x = a[i][k].clone();
                        a[t][k] += x;
                    }
                }
                None => break,
            }
        }
        out.push(a[t][t].abs());
        t += 1;
    }
    out
}

/// Rank of the row lattice.
pub fn rank(rows: &[Vec<i64>]) -> usize {
    elementary_divisors(rows).len()
}
