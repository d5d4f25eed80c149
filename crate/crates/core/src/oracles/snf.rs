//! Smith normal form invariants over the integers.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Nonzero invariant factors of a sparse integer matrix, ascending, each
/// dividing the next. `entries` lists `(row, column, value)`.
pub fn invariant_factors(rows: usize, cols: usize, entries: &[(usize, usize, i64)]) -> Vec<BigInt> {
    let mut m: Vec<BTreeMap<usize, BigInt>> = vec![BTreeMap::new(); rows];
    let mut by_col: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); cols];
    for &(r, c, v) in entries {
        if v == 0 {
            continue;
        }
        let e = m[r].entry(c).or_insert_with(BigInt::zero);
        *e += v;
        if e.is_zero() {
            m[r].remove(&c);
            by_col[c].remove(&r);
        } else {
            by_col[c].insert(r);
        }
    }
    let mut alive: BTreeSet<usize> = (0..rows).filter(|&r| !m[r].is_empty()).collect();
    let mut units = 0;
    // unit pivots: clearing the pivot column by row operations leaves the
    // pivot row independent of everything else
    loop {
        let pivot = alive
            .iter()
            .filter_map(|&r| m[r].iter().find(|(_, v)| v.abs().is_one()).map(|(&c, v)| (m[r].len(), r, c, v.clone())))
            .min_by_key(|p| (p.0, p.1));
        let Some((_, r, c, v)) = pivot else { break };
        let pivot_row = m[r].clone();
        for r2 in by_col[c].clone() {
            if r2 == r {
                continue;
            }
            let factor = &m[r2][&c] * &v;
            for (&cc, x) in &pivot_row {
                let e = m[r2].entry(cc).or_insert_with(BigInt::zero);
                *e -= &factor * x;
                if e.is_zero() {
                    m[r2].remove(&cc);
                    by_col[cc].remove(&r2);
                } else {
                    by_col[cc].insert(r2);
                }
            }
            if m[r2].is_empty() {
                alive.remove(&r2);
            }
        }
        for &cc in pivot_row.keys() {
            by_col[cc].remove(&r);
        }
        m[r].clear();
        alive.remove(&r);
        units += 1;
    }
    let live_cols: Vec<usize> = (0..cols).filter(|&c| !by_col[c].is_empty()).collect();
    let col_pos: BTreeMap<usize, usize> = live_cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let dense: Vec<Vec<BigInt>> = alive
        .iter()
        .map(|&r| {
            let mut row = vec![BigInt::zero(); live_cols.len()];
            for (c, v) in &m[r] {
                row[col_pos[c]] = v.clone();
            }
            row
        })
        .collect();
    let mut out = vec![BigInt::one(); units];
    out.extend(dense_invariants(dense));
    out
}

fn dense_invariants(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pr, pc)) = smallest_nonzero(&a, t) else { break };
        a.swap(t, pr);
        for row in a.iter_mut() {
            row.swap(t, pc);
        }
        loop {
            let mut clean = true;
            for r in t + 1..rows {
                if a[r][t].is_zero() {
                    continue;
                }
                let q = a[r][t].div_floor(&a[t][t]);
                for c in t..cols {
                    let delta = &q * &a[t][c];
                    a[r][c] -= delta;
                }
                if !a[r][t].is_zero() {
                    clean = false;
                }
            }
            for c in t + 1..cols {
                if a[t][c].is_zero() {
                    continue;
                }
                let q = a[t][c].div_floor(&a[t][t]);
                for row in a.iter_mut().skip(t) {
                    let delta = &q * &row[t];
                    row[c] -= delta;
                }
                if !a[t][c].is_zero() {
                    clean = false;
                }
            }
            if clean {
                // divisibility: fold in a row whose entry the pivot does not divide
                let bad = (t + 1..rows).find(|&r| (t + 1..cols).any(|c| !a[r][c].is_multiple_of(&a[t][t])));
                match bad {
                    Some(r) => {
                        for c in t..cols {
                            let x = a[r][c].clone();
                            a[t][c] += x;
                        }
                    }
                    None => break,
                }
            } else {
                let (pr, pc) = smallest_nonzero(&a, t).expect("nonzero remains");
                a.swap(t, pr);
                for row in a.iter_mut() {
                    row.swap(t, pc);
                }
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

fn smallest_nonzero(a: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (r, row) in a.iter().enumerate().skip(t) {
        for (c, v) in row.iter().enumerate().skip(t) {
            if !v.is_zero() && best.map_or(true, |(br, bc)| v.abs() < a[br][bc].abs()) {
                best = Some((r, c));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inv(rows: usize, cols: usize, dense: &[i64]) -> Vec<i64> {
        let entries: Vec<_> = dense.iter().enumerate().map(|(k, &v)| (k / cols, k % cols, v)).collect();
        invariant_factors(rows, cols, &entries).into_iter().map(|b| i64::try_from(b).unwrap()).collect()
    }

    #[test]
    fn diagonal_needs_reordering() {
        assert_eq!(inv(2, 2, &[2, 0, 0, 3]), vec![1, 6]);
        assert_eq!(inv(2, 2, &[4, 0, 0, 6]), vec![2, 12]);
    }

    #[test]
    fn rank_deficient() {
        assert_eq!(inv(3, 3, &[1, 2, 3, 4, 5, 6, 7, 8, 9]), vec![1, 3]);
        assert_eq!(inv(2, 3, &[0, 0, 0, 0, 0, 0]), Vec::<i64>::new());
    }

    #[test]
    fn projective_plane_boundary() {
        // ∂2 of the minimal RP² complex has a single invariant 2
        assert_eq!(inv(1, 1, &[2]), vec![2]);
        assert_eq!(inv(2, 2, &[2, 4, 6, 8]), vec![2, 4]);
    }
}
