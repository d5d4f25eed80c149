//! Backtracking enumeration of presheaf maps.
//!
//! A map is determined by the images of the nondegenerate source cells.
//! Cells are assigned in order of increasing total degree; each candidate
//! must agree on every face with the images already chosen. Candidates are
//! drawn from the target cells sharing the required first face.

use std::ops::ControlFlow;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::presheaf::{CellId, Multidegree, Presheaf, PresheafMap};

/// Default node budget for a single search.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

struct FaceConstraint {
    dir: usize,
    i: usize,
    base: usize,
    base_degree: Multidegree,
    words: Vec<Vec<usize>>,
}

struct Slot {
    degree: Multidegree,
    cell: CellId,
    faces: Vec<FaceConstraint>,
}

/// A configured map search from `source` to `target`.
pub struct HomSearch<'a> {
    source: &'a Arc<Presheaf>,
    target: &'a Arc<Presheaf>,
    fixed: Option<&'a [Vec<Option<CellId>>]>,
    over: Option<(&'a PresheafMap, &'a PresheafMap)>,
    injective: bool,
    budget: u64,
}

/// For every cell, the latest breadth-first rank among its vertices, so that
/// each cell is assigned as soon as its vertices are.
fn vertex_reach(s: &Presheaf) -> Vec<Vec<usize>> {
    let zero = Multidegree::zero(s.arity());
    let nv = s.count(zero);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for dir in 0..s.arity() {
        if s.truncation().get(dir) == 0 {
            continue;
        }
        let e = zero.raised(dir);
        for c in 0..s.count(e) as CellId {
            let (a, b) = (s.face(e, dir, 0, c) as usize, s.face(e, dir, 1, c) as usize);
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let mut rank = vec![usize::MAX; nv];
    let mut next = 0;
    for start in 0..nv {
        if rank[start] != usize::MAX {
            continue;
        }
        let mut queue = std::collections::VecDeque::from([start]);
        rank[start] = next;
        next += 1;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if rank[w] == usize::MAX {
                    rank[w] = next;
                    next += 1;
                    queue.push_back(w);
                }
            }
        }
    }
    let mut reach: Vec<Vec<usize>> = s.degrees().into_iter().map(|d| vec![0; s.count(d)]).collect();
    for d in s.degrees() {
        let f = s.flat(d);
        for c in 0..s.count(d) as CellId {
            reach[f][c as usize] = if d == zero {
                rank[c as usize]
            } else {
                let dir = (0..s.arity()).find(|&j| d.get(j) > 0).expect("positive degree");
                let lo = d.lowered(dir);
                let fl = s.flat(lo);
                (0..=d.get(dir)).map(|i| reach[fl][s.face(d, dir, i, c) as usize]).max().unwrap_or(0)
            };
        }
    }
    reach
}

impl<'a> HomSearch<'a> {
    pub fn new(source: &'a Arc<Presheaf>, target: &'a Arc<Presheaf>) -> Self {
        HomSearch { source, target, fixed: None, over: None, injective: false, budget: DEFAULT_BUDGET }
    }

    /// Prescribes images of some source cells, indexed `[flat degree][cell]`.
    pub fn fixed(mut self, fixed: &'a [Vec<Option<CellId>>]) -> Self {
        self.fixed = Some(fixed);
        self
    }

    /// Restricts to maps `g` with `p ∘ g = s`, for `p: target -> X` and `s: source -> X`.
    pub fn over(mut self, p: &'a PresheafMap, s: &'a PresheafMap) -> Self {
        self.over = Some((p, s));
        self
    }

    /// Restricts to maps sending nondegenerate cells injectively to
    /// nondegenerate cells.
    pub fn injective(mut self) -> Self {
        self.injective = true;
        self
    }

    pub fn budget(mut self, nodes: u64) -> Self {
        self.budget = nodes;
        self
    }

    fn check(&self) -> Result<()> {
        let (s, t) = (self.source, self.target);
        if s.arity() != t.arity() {
            return Err(Error::ArityMismatch { expected: s.arity(), found: t.arity() });
        }
        if s.truncation() != t.truncation() {
            return Err(Error::TruncationMismatch { left: s.truncation().to_string(), right: t.truncation().to_string() });
        }
        if let Some((p, g)) = self.over {
            if !(Arc::ptr_eq(p.source(), t) || **p.source() == **t) || !(Arc::ptr_eq(g.source(), s) || **g.source() == **s) {
                return Err(Error::Mismatch("over-object"));
            }
            if !(Arc::ptr_eq(p.target(), g.target()) || p.target() == g.target()) {
                return Err(Error::Mismatch("base"));
            }
        }
        Ok(())
    }

    fn slots(&self) -> Vec<Slot> {
        let s = self.source;
        let mut cells: Vec<(Multidegree, CellId)> =
            s.degrees().into_iter().flat_map(|d| s.nondegenerate(d).into_iter().map(move |c| (d, c))).collect();
        let reach = vertex_reach(s);
        cells.sort_by_key(|(d, c)| (reach[s.flat(*d)][*c as usize], d.total(), d.as_vec(), *c));
        let mut position = std::collections::HashMap::new();
        for (k, &(d, c)) in cells.iter().enumerate() {
            position.insert((d, c), k);
        }
        cells
            .iter()
            .map(|&(d, c)| {
                let mut faces = Vec::new();
                for dir in 0..s.arity() {
                    if d.get(dir) == 0 {
                        continue;
                    }
                    for i in 0..=d.get(dir) {
                        let nf = s.normal_form(d.lowered(dir), s.face(d, dir, i, c));
                        faces.push(FaceConstraint {
                            dir,
                            i,
                            base: position[&(nf.degree, nf.cell)],
                            base_degree: nf.degree,
                            words: nf.words,
                        });
                    }
                }
                Slot { degree: d, cell: c, faces }
            })
            .collect()
    }

    /// Visits every map as a full image table; the visitor may stop early.
    pub fn for_each<F>(&self, mut visit: F) -> Result<u64>
    where
        F: FnMut(&[Vec<CellId>]) -> ControlFlow<()>,
    {
        self.check()?;
        let (s, t) = (self.source, self.target);
        let slots = self.slots();
        let n = slots.len();
        let mut assign: Vec<CellId> = vec![0; n];
        let mut current: Vec<Option<CellId>> = vec![None; n];
        let mut used: Vec<Vec<bool>> = if self.injective {
            t.degrees().into_iter().map(|d| vec![false; t.count(d)]).collect()
        } else {
            Vec::new()
        };
        let mut nodes: u64 = 0;
        let mut emitted: u64 = 0;

        let face_image = |fc: &FaceConstraint, assign: &[CellId]| -> CellId {
            let (_, y) = t.apply_degeneracies(fc.base_degree, assign[fc.base], &fc.words).expect("degeneracy within truncation");
            y
        };
        let candidates = |k: usize, assign: &[CellId]| -> Vec<CellId> {
            let slot = &slots[k];
            if let Some(fixed) = self.fixed {
                if let Some(y) = fixed[s.flat(slot.degree)][slot.cell as usize] {
                    return vec![y];
                }
            }
            if let Some((dir, index)) = t.cells_by_first_face(slot.degree) {
                let fc = slot.faces.iter().find(|fc| fc.dir == dir && fc.i == 0).expect("first face");
                let want = face_image(fc, assign);
                return index.get(&want).cloned().unwrap_or_default();
            }
            (0..t.count(slot.degree) as CellId).collect()
        };
        let admissible = |k: usize, y: CellId, assign: &[CellId], used: &[Vec<bool>]| -> bool {
            let slot = &slots[k];
            let d = slot.degree;
            if self.injective && (t.is_degenerate(d, y) || used[t.flat(d)][y as usize]) {
                return false;
            }
            if let Some((p, g)) = self.over {
                if p.image(d, y) != g.image(d, slot.cell) {
                    return false;
                }
            }
            slot.faces.iter().all(|fc| t.face(d, fc.dir, fc.i, y) == face_image(fc, assign))
        };

        if n == 0 {
            let table = self.extend(&slots, &assign)?;
            let _ = visit(&table);
            return Ok(1);
        }
        let mut cands: Vec<Vec<CellId>> = vec![Vec::new(); n];
        let mut next: Vec<usize> = vec![0; n];
        cands[0] = candidates(0, &assign);
        let mut level = 0;
        loop {
            if let Some(prev) = current[level].take() {
                if self.injective {
                    used[t.flat(slots[level].degree)][prev as usize] = false;
                }
            }
            if next[level] < cands[level].len() {
                let y = cands[level][next[level]];
                next[level] += 1;
                nodes += 1;
                if nodes > self.budget {
                    return Err(Error::SearchLimit(self.budget));
                }
                if !admissible(level, y, &assign, &used) {
                    continue;
                }
                assign[level] = y;
                current[level] = Some(y);
                if self.injective {
                    used[t.flat(slots[level].degree)][y as usize] = true;
                }
                if level + 1 == n {
                    emitted += 1;
                    let table = self.extend(&slots, &assign)?;
                    if visit(&table).is_break() {
                        return Ok(emitted);
                    }
                } else {
                    level += 1;
                    cands[level] = candidates(level, &assign);
                    next[level] = 0;
                }
            } else {
                if level == 0 {
                    return Ok(emitted);
                }
                level -= 1;
            }
        }
    }

    fn extend(&self, slots: &[Slot], assign: &[CellId]) -> Result<Vec<Vec<CellId>>> {
        let s = self.source;
        let mut table: Vec<Vec<CellId>> = s.degrees().into_iter().map(|d| vec![0; s.count(d)]).collect();
        for (k, slot) in slots.iter().enumerate() {
            table[s.flat(slot.degree)][slot.cell as usize] = assign[k];
        }
        PresheafMap::extend_nondegenerate(s, self.target, &table)
    }

    /// All maps, in canonical order.
    pub fn all(&self) -> Result<Vec<PresheafMap>> {
        let mut out = Vec::new();
        self.for_each(|table| {
            out.push(table.to_vec());
            ControlFlow::Continue(())
        })?;
        out.into_iter().map(|images| PresheafMap::new_unchecked(self.source.clone(), self.target.clone(), images)).collect()
    }

    /// The first map in canonical order, if any.
    pub fn first(&self) -> Result<Option<PresheafMap>> {
        let mut out = None;
        self.for_each(|table| {
            out = Some(table.to_vec());
            ControlFlow::Break(())
        })?;
        out.map(|images| PresheafMap::new_unchecked(self.source.clone(), self.target.clone(), images)).transpose()
    }

    pub fn count(&self) -> Result<u64> {
        self.for_each(|_| ControlFlow::Continue(()))
    }
}

/// All maps `x -> y`.
pub fn hom(x: &Arc<Presheaf>, y: &Arc<Presheaf>) -> Result<Vec<PresheafMap>> {
    HomSearch::new(x, y).all()
}

/// Searches for an isomorphism `x -> y`.
pub fn find_isomorphism(x: &Arc<Presheaf>, y: &Arc<Presheaf>, budget: u64) -> Result<Option<PresheafMap>> {
    if x.arity() != y.arity() || x.truncation() != y.truncation() {
        return Ok(None);
    }
    for d in x.degrees() {
        if x.count(d) != y.count(d) || x.nondegenerate_count(d) != y.nondegenerate_count(d) {
            return Ok(None);
        }
    }
    HomSearch::new(x, y).injective().budget(budget).first()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn maps_between_intervals() {
        let d1 = shapes::delta(1, 2).unwrap();
        assert_eq!(hom(&d1, &d1).unwrap().len(), 3);
        let b = shapes::boundary(1, 2).unwrap();
        assert_eq!(hom(&b, &d1).unwrap().len(), 4);
    }

    #[test]
    fn maps_out_of_representable_are_cells() {
        let x = shapes::horn(2, 1, 3).unwrap();
        for n in 0..=3 {
            let d = shapes::delta(n, 3).unwrap();
            let count = hom(&d, &x).unwrap().len();
            assert_eq!(count, x.count(Multidegree::new(&[n]).unwrap()));
        }
    }

    #[test]
    fn enumerated_maps_are_natural() {
        let x = shapes::boundary(2, 2).unwrap();
        let y = shapes::j(1, 2).unwrap();
        for m in hom(&x, &y).unwrap() {
            assert!(m.naturality_violation().is_none());
        }
    }

    #[test]
    fn opposite_of_horn_is_isomorphic_to_other_horn() {
        let h0 = shapes::horn(2, 0, 3).unwrap();
        let h2 = Arc::new(shapes::horn(2, 2, 3).unwrap().opposite(0));
        assert!(find_isomorphism(&h0, &h2, DEFAULT_BUDGET).unwrap().is_some());
        let h1 = shapes::horn(2, 1, 3).unwrap();
        assert!(find_isomorphism(&h0, &h1, DEFAULT_BUDGET).unwrap().is_none());
        let b = shapes::boundary(2, 3).unwrap();
        assert!(find_isomorphism(&h0, &b, DEFAULT_BUDGET).unwrap().is_none());
    }
}
