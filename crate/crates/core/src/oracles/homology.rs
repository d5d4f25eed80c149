//! Components and integral homology of arity-1 presheaves.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::snf::invariant_factors;
use crate::error::{Error, Result};
use crate::presheaf::{CellId, Multidegree, Presheaf, PresheafMap};

fn require_arity_one(x: &Presheaf) -> Result<()> {
    if x.arity() != 1 {
        return Err(Error::ArityMismatch { expected: 1, found: x.arity() });
    }
    Ok(())
}

fn deg(n: usize) -> Multidegree {
    Multidegree::new(&[n]).expect("degree")
}

/// Component index of every vertex, numbered by least vertex.
pub fn component_labels(x: &Presheaf) -> Result<Vec<usize>> {
    require_arity_one(x)?;
    let n0 = x.count(deg(0));
    let mut parent: Vec<usize> = (0..n0).collect();
    fn root(p: &mut [usize], mut a: usize) -> usize {
        while p[a] != a {
            p[a] = p[p[a]];
            a = p[a];
        }
        a
    }
    if x.truncation().get(0) >= 1 {
        for e in 0..x.count(deg(1)) as CellId {
            let (a, b) = (x.face(deg(1), 0, 0, e) as usize, x.face(deg(1), 0, 1, e) as usize);
            let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut label = vec![usize::MAX; n0];
    let mut next = 0;
    let mut out = vec![0; n0];
    for v in 0..n0 {
        let r = root(&mut parent, v);
        if label[r] == usize::MAX {
            label[r] = next;
            next += 1;
        }
        out[v] = label[r];
    }
    Ok(out)
}

/// Connected components as sorted vertex lists.
pub fn pi0(x: &Presheaf) -> Result<Vec<Vec<CellId>>> {
    let labels = component_labels(x)?;
    let count = labels.iter().max().map_or(0, |m| m + 1);
    let mut out = vec![Vec::new(); count];
    for (v, &l) in labels.iter().enumerate() {
        out[l].push(v as CellId);
    }
    Ok(out)
}

/// The induced map of component sets.
pub fn pi0_map(f: &PresheafMap) -> Result<Vec<usize>> {
    let (ls, lt) = (component_labels(f.source())?, component_labels(f.target())?);
    let count = ls.iter().max().map_or(0, |m| m + 1);
    let mut out = vec![0; count];
    for (v, &l) in ls.iter().enumerate() {
        out[l] = lt[f.image(deg(0), v as CellId) as usize];
    }
    Ok(out)
}

fn last_vertex(x: &Presheaf, n: usize, mut c: CellId) -> CellId {
    for m in (1..=n).rev() {
        c = x.face(deg(m), 0, 0, c);
    }
    c
}

/// Inclusions of the connected components, in [`pi0`] order.
pub fn components(x: &Arc<Presheaf>) -> Result<Vec<PresheafMap>> {
    let labels = component_labels(x)?;
    let count = labels.iter().max().map_or(0, |m| m + 1);
    (0..count)
        .map(|k| x.subobject(|d, c| labels[last_vertex(x, d.get(0), c) as usize] == k))
        .collect()
}

/// One homology group: free rank and torsion coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyGroup {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Homology in dimensions `0..=maxdim`; higher dimensions are absent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyTable {
    pub groups: Vec<HomologyGroup>,
}

impl HomologyTable {
    pub fn maxdim(&self) -> usize {
        self.groups.len().saturating_sub(1)
    }

    /// First dimension where the tables differ, over their common range.
    pub fn first_difference(&self, other: &HomologyTable) -> Option<usize> {
        self.groups.iter().zip(&other.groups).position(|(a, b)| a != b)
    }

    pub fn is_point_like(&self) -> bool {
        self.groups.iter().enumerate().all(|(i, g)| g.torsion.is_empty() && g.rank == usize::from(i == 0))
    }
}

impl fmt::Display for HomologyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.groups.iter().enumerate().map(|(i, g)| format!("H{i}={g}")).collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// Boundary matrix `C_n -> C_{n-1}` of the normalized complex.
fn boundary_entries(x: &Presheaf, n: usize, index: &[Vec<Option<usize>>]) -> Vec<(usize, usize, i64)> {
    let mut out = Vec::new();
    for (col, c) in x.nondegenerate(deg(n)).into_iter().enumerate() {
        for i in 0..=n {
            let f = x.face(deg(n), 0, i, c);
            if let Some(row) = index[n - 1][f as usize] {
                out.push((row, col, if i % 2 == 0 { 1 } else { -1 }));
            }
        }
    }
    out
}

/// Integral homology through `maxdim`, which needs `maxdim + 1` cells.
pub fn homology(x: &Presheaf, maxdim: usize) -> Result<HomologyTable> {
    require_arity_one(x)?;
    if maxdim + 1 > x.truncation().get(0) {
        return Err(Error::UnsoundBound(format!(
            "homology through dimension {maxdim} needs truncation {}, have {}",
            maxdim + 1,
            x.truncation()
        )));
    }
    let top = maxdim + 1;
    let index: Vec<Vec<Option<usize>>> = (0..=top)
        .map(|n| {
            let mut idx = vec![None; x.count(deg(n))];
            for (k, c) in x.nondegenerate(deg(n)).into_iter().enumerate() {
                idx[c as usize] = Some(k);
            }
            idx
        })
        .collect();
    let dims: Vec<usize> = (0..=top).map(|n| x.nondegenerate_count(deg(n))).collect();
    // invariants of ∂_n for n = 1..=top
    let factors: Vec<Vec<BigInt>> = (1..=top)
        .into_par_iter()
        .map(|n| invariant_factors(dims[n - 1], dims[n], &boundary_entries(x, n, &index)))
        .collect();
    let rank = |n: usize| if n == 0 { 0 } else { factors[n - 1].len() };
    let groups = (0..=maxdim)
        .map(|n| HomologyGroup {
            rank: dims[n] - rank(n) - rank(n + 1),
            torsion: factors[n].iter().filter(|t| !t.is_one()).cloned().collect(),
        })
        .collect();
    Ok(HomologyTable { groups })
}

/// The largest sound `maxdim` for `x`, if any.
pub fn sound_maxdim(x: &Presheaf) -> Option<usize> {
    x.truncation().get(0).checked_sub(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    fn table(x: &Presheaf, m: usize) -> String {
        homology(x, m).unwrap().to_string()
    }

    #[test]
    fn components_of_small_shapes() {
        assert_eq!(pi0(&shapes::delta(3, 3).unwrap()).unwrap().len(), 1);
        assert_eq!(pi0(&shapes::boundary(1, 2).unwrap()).unwrap().len(), 2);
        assert_eq!(components(&shapes::boundary(1, 2).unwrap()).unwrap().len(), 2);
    }

    #[test]
    fn spheres() {
        assert_eq!(table(&shapes::boundary(2, 3).unwrap(), 2), "H0=Z, H1=Z, H2=0");
        assert_eq!(table(&shapes::boundary(3, 4).unwrap(), 3), "H0=Z, H1=0, H2=Z, H3=0");
        assert_eq!(table(&shapes::delta(2, 3).unwrap(), 2), "H0=Z, H1=0, H2=0");
    }

    #[test]
    fn empty_and_unsound() {
        let e = Presheaf::empty(deg(2));
        assert_eq!(table(&e, 1), "H0=0, H1=0");
        assert!(matches!(homology(&shapes::delta(1, 2).unwrap(), 2), Err(Error::UnsoundBound(_))));
    }
}
