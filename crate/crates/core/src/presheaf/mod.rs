//! Finite truncated presheaves on `Δ^a` for `a = 1, 2, 3`.
//!
//! A [`Presheaf`] stores every cell (degenerate or not) of every multidegree
//! below its truncation, together with all face and degeneracy tables. The
//! Eilenberg–Zilber decomposition of each cell is computed once at
//! construction, so nondegenerate cells and normal forms are cheap queries.
//! All computations happen in the presheaf topos on the truncated site
//! `Δ^a_{<= t}`; answers are qualified by the truncation `t`.

mod degree;
mod map;
mod ops;
mod reindex;
mod validate;

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::OnceLock;

pub use degree::{Multidegree, MAX_ARITY};
pub use map::PresheafMap;
pub use ops::{apply_operator, monotone_maps};
pub use reindex::{Reindexing, Slot};

use crate::error::{Error, Result};

/// Opaque cell identifier, scoped to one presheaf and one multidegree.
pub type CellId = u32;

/// `c = s_index^dir(base)`: one step of the Eilenberg–Zilber decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegeneracyStep {
    pub dir: u8,
    pub index: u8,
    pub base: CellId,
}

/// Normalized representation of a cell: a nondegenerate cell together with
/// strictly decreasing degeneracy words, one per direction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormalForm {
    pub degree: Multidegree,
    pub cell: CellId,
    pub words: Vec<Vec<usize>>,
}

impl NormalForm {
    pub fn is_nondegenerate(&self) -> bool {
        self.words.iter().all(|w| w.is_empty())
    }
}

type Table = Vec<CellId>;

#[derive(Debug)]
pub struct Presheaf {
    arity: usize,
    trunc: Multidegree,
    dims: [usize; MAX_ARITY],
    counts: Vec<usize>,
    /// `faces[flat][dir][i]`, empty when the degree in `dir` is zero.
    faces: Vec<Vec<Vec<Table>>>,
    /// `degens[flat][dir][i]`, empty at the truncation bound in `dir`.
    degens: Vec<Vec<Vec<Table>>>,
    decomposition: Vec<Vec<Option<DegeneracyStep>>>,
    face_index: OnceLock<Vec<HashMap<CellId, Vec<CellId>>>>,
}

impl Clone for Presheaf {
    fn clone(&self) -> Self {
        Presheaf {
            arity: self.arity,
            trunc: self.trunc,
            dims: self.dims,
            counts: self.counts.clone(),
            faces: self.faces.clone(),
            degens: self.degens.clone(),
            decomposition: self.decomposition.clone(),
            face_index: OnceLock::new(),
        }
    }
}

impl PartialEq for Presheaf {
    /// Equality of cell tables (same labels), not isomorphism.
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity
            && self.trunc == other.trunc
            && self.counts == other.counts
            && self.faces == other.faces
            && self.degens == other.degens
    }
}

impl Eq for Presheaf {}

/// Output of [`Presheaf::from_fn`]: the presheaf plus the key of every cell.
pub struct Built<K> {
    pub presheaf: Presheaf,
    pub keys: Vec<Vec<K>>,
    pub index: Vec<HashMap<K, CellId>>,
}

impl<K: Eq + Hash> Built<K> {
    pub fn id_of(&self, d: Multidegree, key: &K) -> Option<CellId> {
        self.index[self.presheaf.flat(d)].get(key).copied()
    }
}

fn dims_of(trunc: &Multidegree) -> [usize; MAX_ARITY] {
    let mut dims = [1; MAX_ARITY];
    for (j, slot) in dims.iter_mut().enumerate().take(trunc.arity()) {
        *slot = trunc.get(j) + 1;
    }
    dims
}

impl Presheaf {
    /// Builds a presheaf from a cell model: `cells(d)` lists the cells of
    /// degree `d` by key, `face`/`degen` act on keys. Every produced key must
    /// name a cell of the appropriate degree.
    pub fn from_fn<K, C, F, S>(trunc: Multidegree, cells: C, face: F, degen: S) -> Result<Built<K>>
    where
        K: Clone + Eq + Hash,
        C: Fn(Multidegree) -> Vec<K>,
        F: Fn(Multidegree, usize, usize, &K) -> K,
        S: Fn(Multidegree, usize, usize, &K) -> K,
    {
        let arity = trunc.arity();
        let dims = dims_of(&trunc);
        let degrees = trunc.below();
        let n = degrees.len();
        let mut keys: Vec<Vec<K>> = Vec::with_capacity(n);
        let mut index: Vec<HashMap<K, CellId>> = Vec::with_capacity(n);
        for &d in &degrees {
            let ks = cells(d);
            let mut idx = HashMap::with_capacity(ks.len());
            for (i, k) in ks.iter().enumerate() {
                if idx.insert(k.clone(), i as CellId).is_some() {
                    return Err(Error::MalformedCell(format!("duplicate cell key at {d}")));
                }
            }
            keys.push(ks);
            index.push(idx);
        }
        let flat = |d: Multidegree| -> usize {
            let mut f = 0;
            for j in 0..arity {
                f = f * dims[j] + d.get(j);
            }
            f
        };
        let mut faces = vec![Vec::new(); n];
        let mut degens = vec![Vec::new(); n];
        for &d in &degrees {
            let fd = flat(d);
            let mut fdirs = Vec::with_capacity(arity);
            let mut sdirs = Vec::with_capacity(arity);
            for dir in 0..arity {
                let m = d.get(dir);
                let mut ftabs = Vec::new();
                if m >= 1 {
                    let lower = d.lowered(dir);
                    let fl = flat(lower);
                    for i in 0..=m {
                        let tab: Result<Table> = keys[fd]
                            .iter()
                            .map(|k| {
                                let fk = face(d, dir, i, k);
                                index[fl].get(&fk).copied().ok_or_else(|| {
                                    Error::MalformedCell(format!("face d{i} in direction {dir} of a cell at {d} is missing"))
                                })
                            })
                            .collect();
                        ftabs.push(tab?);
                    }
                }
                fdirs.push(ftabs);
                let mut stabs = Vec::new();
                if m < trunc.get(dir) {
                    let upper = d.raised(dir);
                    let fu = flat(upper);
                    for i in 0..=m {
                        let tab: Result<Table> = keys[fd]
                            .iter()
                            .map(|k| {
                                let sk = degen(d, dir, i, k);
                                index[fu].get(&sk).copied().ok_or_else(|| {
                                    Error::MalformedCell(format!(
                                        "degeneracy s{i} in direction {dir} of a cell at {d} is missing"
                                    ))
                                })
                            })
                            .collect();
                        stabs.push(tab?);
                    }
                }
                sdirs.push(stabs);
            }
            faces[fd] = fdirs;
            degens[fd] = sdirs;
        }
        let counts = keys.iter().map(|k| k.len()).collect();
        let presheaf = Presheaf::from_tables(trunc, counts, faces, degens)?;
        Ok(Built { presheaf, keys, index })
    }

    /// Assembles a presheaf from raw tables indexed by flat degree.
    pub(crate) fn from_tables(
        trunc: Multidegree,
        counts: Vec<usize>,
        faces: Vec<Vec<Vec<Table>>>,
        degens: Vec<Vec<Vec<Table>>>,
    ) -> Result<Presheaf> {
        let arity = trunc.arity();
        let mut p = Presheaf {
            arity,
            trunc,
            dims: dims_of(&trunc),
            counts,
            faces,
            degens,
            decomposition: Vec::new(),
            face_index: OnceLock::new(),
        };
        p.check_shapes()?;
        p.decomposition = p.compute_decomposition();
        Ok(p)
    }

    fn check_shapes(&self) -> Result<()> {
        for d in self.trunc.below() {
            let fd = self.flat(d);
            for dir in 0..self.arity {
                let m = d.get(dir);
                let want_faces = if m >= 1 { m + 1 } else { 0 };
                let want_degens = if m < self.trunc.get(dir) { m + 1 } else { 0 };
                let fs = self.faces[fd].get(dir).map(|v| v.len()).unwrap_or(0);
                let ss = self.degens[fd].get(dir).map(|v| v.len()).unwrap_or(0);
                if fs != want_faces || ss != want_degens {
                    return Err(Error::MalformedCell(format!("operator tables at {d} have the wrong shape")));
                }
                for i in 0..want_faces {
                    let t = &self.faces[fd][dir][i];
                    let lim = self.counts[self.flat(d.lowered(dir))];
                    if t.len() != self.counts[fd] || t.iter().any(|&c| c as usize >= lim) {
                        return Err(Error::MalformedCell(format!("face d{i} (direction {dir}) at {d} out of range")));
                    }
                }
                for i in 0..want_degens {
                    let t = &self.degens[fd][dir][i];
                    let lim = self.counts[self.flat(d.raised(dir))];
                    if t.len() != self.counts[fd] || t.iter().any(|&c| c as usize >= lim) {
                        return Err(Error::MalformedCell(format!(
                            "degeneracy s{i} (direction {dir}) at {d} out of range"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn compute_decomposition(&self) -> Vec<Vec<Option<DegeneracyStep>>> {
        let mut out = vec![Vec::new(); self.counts.len()];
        for d in self.trunc.below() {
            let fd = self.flat(d);
            let mut row = Vec::with_capacity(self.counts[fd]);
            for c in 0..self.counts[fd] as CellId {
                row.push(self.find_degeneracy(d, c));
            }
            out[fd] = row;
        }
        out
    }

    fn find_degeneracy(&self, d: Multidegree, c: CellId) -> Option<DegeneracyStep> {
        for dir in 0..self.arity {
            let m = d.get(dir);
            if m == 0 {
                continue;
            }
            let lower = d.lowered(dir);
            for i in (0..m).rev() {
                let z = self.face(d, dir, i, c);
                if self.degen(lower, dir, i, z) == c {
                    return Some(DegeneracyStep { dir: dir as u8, index: i as u8, base: z });
                }
            }
        }
        None
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn truncation(&self) -> Multidegree {
        self.trunc
    }

    /// All multidegrees below the truncation, lexicographically.
    pub fn degrees(&self) -> Vec<Multidegree> {
        self.trunc.below()
    }

    pub(crate) fn flat(&self, d: Multidegree) -> usize {
        let mut f = 0;
        for j in 0..self.arity {
            f = f * self.dims[j] + d.get(j);
        }
        f
    }

    pub(crate) fn num_flat(&self) -> usize {
        self.counts.len()
    }

    pub fn contains_degree(&self, d: Multidegree) -> bool {
        d.le(&self.trunc)
    }

    /// Number of cells (degenerate included) in degree `d`.
    pub fn count(&self, d: Multidegree) -> usize {
        self.counts[self.flat(d)]
    }

    /// Checked cell count; errors when `d` exceeds the truncation.
    pub fn cell_count(&self, d: Multidegree) -> Result<usize> {
        if d.arity() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: d.arity() });
        }
        if !self.contains_degree(d) {
            return Err(Error::OutOfRange { degree: d.to_string(), truncation: self.trunc.to_string() });
        }
        Ok(self.count(d))
    }

    pub fn total_cells(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    pub fn face(&self, d: Multidegree, dir: usize, i: usize, c: CellId) -> CellId {
        self.faces[self.flat(d)][dir][i][c as usize]
    }

    pub fn degen(&self, d: Multidegree, dir: usize, i: usize, c: CellId) -> CellId {
        self.degens[self.flat(d)][dir][i][c as usize]
    }

    pub fn face_table(&self, d: Multidegree, dir: usize, i: usize) -> &[CellId] {
        &self.faces[self.flat(d)][dir][i]
    }

    pub fn degen_table(&self, d: Multidegree, dir: usize, i: usize) -> &[CellId] {
        &self.degens[self.flat(d)][dir][i]
    }

    pub fn degeneracy_step(&self, d: Multidegree, c: CellId) -> Option<DegeneracyStep> {
        self.decomposition[self.flat(d)][c as usize]
    }

    pub fn is_degenerate(&self, d: Multidegree, c: CellId) -> bool {
        self.degeneracy_step(d, c).is_some()
    }

    pub fn nondegenerate(&self, d: Multidegree) -> Vec<CellId> {
        self.decomposition[self.flat(d)]
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_none())
            .map(|(c, _)| c as CellId)
            .collect()
    }

    pub fn nondegenerate_count(&self, d: Multidegree) -> usize {
        self.decomposition[self.flat(d)].iter().filter(|s| s.is_none()).count()
    }

    /// Eilenberg–Zilber normal form of a cell.
    pub fn normal_form(&self, d: Multidegree, c: CellId) -> NormalForm {
        let mut words = vec![Vec::new(); self.arity];
        let (mut deg, mut cell) = (d, c);
        while let Some(step) = self.degeneracy_step(deg, cell) {
            words[step.dir as usize].push(step.index as usize);
            deg = deg.lowered(step.dir as usize);
            cell = step.base;
        }
        NormalForm { degree: deg, cell, words }
    }

    /// Applies a normalized degeneracy word (per direction, strictly
    /// decreasing) to a cell of degree `d`.
    pub fn apply_degeneracies(&self, d: Multidegree, c: CellId, words: &[Vec<usize>]) -> Result<(Multidegree, CellId)> {
        let (mut deg, mut cell) = (d, c);
        for (dir, word) in words.iter().enumerate() {
            for &i in word.iter().rev() {
                if deg.get(dir) >= self.trunc.get(dir) || i > deg.get(dir) {
                    return Err(Error::OutOfRange {
                        degree: deg.raised(dir).to_string(),
                        truncation: self.trunc.to_string(),
                    });
                }
                cell = self.degen(deg, dir, i, cell);
                deg = deg.raised(dir);
            }
        }
        Ok((deg, cell))
    }

    /// Cells of degree `d` grouped by their face `d_0` in the first
    /// direction with positive degree. Used to prune map searches.
    pub(crate) fn cells_by_first_face(&self, d: Multidegree) -> Option<(usize, &HashMap<CellId, Vec<CellId>>)> {
        let dir = (0..self.arity).find(|&j| d.get(j) > 0)?;
        let index = self.face_index.get_or_init(|| {
            self.degrees()
                .into_iter()
                .map(|deg| {
                    let mut m: HashMap<CellId, Vec<CellId>> = HashMap::new();
                    if let Some(dir) = (0..self.arity).find(|&j| deg.get(j) > 0) {
                        for (c, &f) in self.face_table(deg, dir, 0).iter().enumerate() {
                            m.entry(f).or_default().push(c as CellId);
                        }
                    }
                    m
                })
                .collect()
        });
        Some((dir, &index[self.flat(d)]))
    }

    /// The empty presheaf.
    pub fn empty(trunc: Multidegree) -> Presheaf {
        Presheaf::from_fn(trunc, |_| Vec::<()>::new(), |_, _, _, k| *k, |_, _, _, k| *k)
            .expect("empty presheaf")
            .presheaf
    }

    /// The terminal presheaf: one cell in every degree.
    pub fn point(trunc: Multidegree) -> Presheaf {
        Presheaf::from_fn(trunc, |_| vec![()], |_, _, _, k| *k, |_, _, _, k| *k).expect("point").presheaf
    }

    /// Restricts to a smaller truncation.
    pub fn truncate(&self, t: Multidegree) -> Result<Presheaf> {
        if !t.le(&self.trunc) {
            return Err(Error::OutOfRange { degree: t.to_string(), truncation: self.trunc.to_string() });
        }
        Ok(Presheaf::from_fn(
            t,
            |d| (0..self.count(d) as CellId).collect(),
            |d, dir, i, &c| self.face(d, dir, i, c),
            |d, dir, i, &c| self.degen(d, dir, i, c),
        )?
        .presheaf)
    }

    /// Index reversal `[m] -> [m]`, `i -> m - i`, in one direction. Swaps
    /// `d_i` with `d_{m-i}` and `s_i` with `s_{m-i}`.
    pub fn opposite(&self, dir: usize) -> Presheaf {
        Presheaf::from_fn(
            self.trunc,
            |d| (0..self.count(d) as CellId).collect(),
            |d, j, i, &c| if j == dir { self.face(d, j, d.get(j) - i, c) } else { self.face(d, j, i, c) },
            |d, j, i, &c| if j == dir { self.degen(d, j, d.get(j) - i, c) } else { self.degen(d, j, i, c) },
        )
        .expect("opposite of a valid presheaf")
        .presheaf
    }

    /// Sub-presheaf of the cells satisfying `keep`; the predicate must be
    /// closed under all operators. Returns the inclusion.
    pub fn subobject<P>(self: &std::sync::Arc<Self>, keep: P) -> Result<PresheafMap>
    where
        P: Fn(Multidegree, CellId) -> bool,
    {
        let built = Presheaf::from_fn(
            self.trunc,
            |d| (0..self.count(d) as CellId).filter(|&c| keep(d, c)).collect(),
            |d, dir, i, &c| self.face(d, dir, i, c),
            |d, dir, i, &c| self.degen(d, dir, i, c),
        )?;
        let images = built.keys.clone();
        PresheafMap::new(std::sync::Arc::new(built.presheaf), self.clone(), images)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn normal_form_is_idempotent_on_delta() {
        let x = shapes::delta(2, 3).unwrap();
        for d in x.degrees() {
            for c in 0..x.count(d) as CellId {
                let nf = x.normal_form(d, c);
                let nf2 = x.normal_form(nf.degree, nf.cell);
                assert!(nf2.is_nondegenerate());
                assert_eq!(nf2.cell, nf.cell);
                for w in &nf.words {
                    assert!(w.windows(2).all(|p| p[0] > p[1]), "word {w:?} not strictly decreasing");
                }
                assert_eq!(x.apply_degeneracies(nf.degree, nf.cell, &nf.words).unwrap(), (d, c));
            }
        }
    }

    #[test]
    fn opposite_is_involutive() {
        let x = shapes::horn(2, 0, 3).unwrap();
        assert_eq!(x.opposite(0).opposite(0), *x);
    }

    #[test]
    fn cell_count_out_of_range() {
        let x = shapes::delta(1, 2).unwrap();
        let d = Multidegree::new(&[3]).unwrap();
        assert!(matches!(x.cell_count(d), Err(Error::OutOfRange { .. })));
    }
}
