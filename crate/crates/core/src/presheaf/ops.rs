//! Simplicial operators `θ: [m] -> [n]`, written `⟨a_0, ..., a_m⟩`.

use super::{CellId, Multidegree, Presheaf};
use crate::error::{Error, Result};

/// All monotone maps `[m] -> [n]` in lexicographic order.
pub fn monotone_maps(m: usize, n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(m + 1);
    fn go(m: usize, n: usize, lo: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == m + 1 {
            out.push(cur.clone());
            return;
        }
        for v in lo..=n {
            cur.push(v as u8);
            go(m, n, v, cur, out);
            cur.pop();
        }
    }
    go(m, n, 0, &mut cur, &mut out);
    out
}

/// Applies `θ^*` for `θ = ⟨a_0, ..., a_m⟩: [m] -> [d_dir]` to a cell of
/// degree `d`, by factoring `θ` into a surjection followed by an injection.
pub fn apply_operator(x: &Presheaf, d: Multidegree, dir: usize, theta: &[u8], c: CellId) -> Result<(Multidegree, CellId)> {
    let n = d.get(dir);
    if theta.is_empty() || theta.windows(2).any(|w| w[0] > w[1]) || theta.iter().any(|&a| a as usize > n) {
        return Err(Error::InvalidSpec(format!("{theta:?} is not a monotone map into [{n}]")));
    }
    let m = theta.len() - 1;
    if m > x.truncation().get(dir) {
        return Err(Error::OutOfRange { degree: d.with(dir, m).to_string(), truncation: x.truncation().to_string() });
    }
    let mut image: Vec<usize> = theta.iter().map(|&a| a as usize).collect();
    image.dedup();
    let (mut deg, mut cell) = (d, c);
    for j in (0..=n).rev() {
        if !image.contains(&j) {
            cell = x.face(deg, dir, j, cell);
            deg = deg.lowered(dir);
        }
    }
    for p in 0..m {
        if theta[p] == theta[p + 1] {
            cell = x.degen(deg, dir, p, cell);
            deg = deg.raised(dir);
        }
    }
    Ok((deg, cell))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn monotone_count_is_binomial() {
        for m in 0..4 {
            for n in 0..4 {
                assert_eq!(monotone_maps(m, n).len(), binom(n + m + 1, m + 1));
            }
        }
    }

    #[test]
    fn operator_on_representable_is_composition() {
        // In Δ[n] a k-cell is a monotone map [k] -> [n]; θ^* precomposes.
        let x = shapes::delta(2, 3).unwrap();
        let keys = shapes::delta_keys(2, 3);
        let top = Multidegree::new(&[2]).unwrap();
        let id = keys[2].iter().position(|k| k == &vec![0, 1, 2]).unwrap() as CellId;
        for theta in monotone_maps(3, 2) {
            let (deg, cell) = apply_operator(&x, top, 0, &theta, id).unwrap();
            assert_eq!(deg.get(0), 3);
            assert_eq!(keys[3][cell as usize], theta);
        }
        for theta in monotone_maps(1, 2) {
            let (_, cell) = apply_operator(&x, top, 0, &theta, id).unwrap();
            assert_eq!(keys[1][cell as usize], theta);
        }
    }
}
