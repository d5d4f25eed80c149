use std::sync::Arc;

use super::{CellId, Multidegree, Presheaf};
use crate::error::{Error, Result};

/// A natural transformation between presheaves of equal arity and
/// truncation, stored as the image of every cell.
#[derive(Clone, Debug)]
pub struct PresheafMap {
    source: Arc<Presheaf>,
    target: Arc<Presheaf>,
    images: Vec<Vec<CellId>>,
}

impl PartialEq for PresheafMap {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.source, &other.source) || self.source == other.source)
            && (Arc::ptr_eq(&self.target, &other.target) || self.target == other.target)
            && self.images == other.images
    }
}

fn compatible(a: &Presheaf, b: &Presheaf) -> Result<()> {
    if a.arity() != b.arity() {
        return Err(Error::ArityMismatch { expected: a.arity(), found: b.arity() });
    }
    if a.truncation() != b.truncation() {
        return Err(Error::TruncationMismatch { left: a.truncation().to_string(), right: b.truncation().to_string() });
    }
    Ok(())
}

impl PresheafMap {
    /// Checked constructor: verifies ranges and naturality on every cell.
    pub fn new(source: Arc<Presheaf>, target: Arc<Presheaf>, images: Vec<Vec<CellId>>) -> Result<Self> {
        let m = Self::new_unchecked(source, target, images)?;
        if let Some(problem) = m.naturality_violation() {
            return Err(Error::NotNatural(problem));
        }
        Ok(m)
    }

    /// Checks shapes and ranges only.
    pub(crate) fn new_unchecked(source: Arc<Presheaf>, target: Arc<Presheaf>, images: Vec<Vec<CellId>>) -> Result<Self> {
        compatible(&source, &target)?;
        if images.len() != source.num_flat() {
            return Err(Error::MalformedCell("image table has the wrong number of degrees".into()));
        }
        for d in source.degrees() {
            let f = source.flat(d);
            if images[f].len() != source.count(d) || images[f].iter().any(|&y| y as usize >= target.count(d)) {
                return Err(Error::MalformedCell(format!("image table at {d} out of range")));
            }
        }
        Ok(PresheafMap { source, target, images })
    }

    /// Extends an assignment on nondegenerate cells (`assign[flat][cell]`,
    /// ignored for degenerate cells) along degeneracies.
    pub fn from_nondegenerate(source: Arc<Presheaf>, target: Arc<Presheaf>, assign: &[Vec<CellId>]) -> Result<Self> {
        compatible(&source, &target)?;
        let images = Self::extend_nondegenerate(&source, &target, assign)?;
        Self::new(source, target, images)
    }

    /// The full image table determined by images of nondegenerate cells.
    pub(crate) fn extend_nondegenerate(source: &Presheaf, target: &Presheaf, assign: &[Vec<CellId>]) -> Result<Vec<Vec<CellId>>> {
        let mut images: Vec<Vec<CellId>> = vec![Vec::new(); source.num_flat()];
        let mut order = source.degrees();
        order.sort_by_key(|d| d.total());
        for d in order {
            let f = source.flat(d);
            let mut row = Vec::with_capacity(source.count(d));
            for c in 0..source.count(d) as CellId {
                let y = match source.degeneracy_step(d, c) {
                    None => *assign
                        .get(f)
                        .and_then(|r| r.get(c as usize))
                        .ok_or_else(|| Error::MalformedCell(format!("no image for nondegenerate cell {c} at {d}")))?,
                    Some(step) => {
                        let lower = d.lowered(step.dir as usize);
                        let base = images[source.flat(lower)][step.base as usize];
                        target.degen(lower, step.dir as usize, step.index as usize, base)
                    }
                };
                if y as usize >= target.count(d) {
                    return Err(Error::MalformedCell(format!("image of cell {c} at {d} out of range")));
                }
                row.push(y);
            }
            images[f] = row;
        }
        Ok(images)
    }

    pub fn identity(x: Arc<Presheaf>) -> Self {
        let images = x.degrees().into_iter().map(|d| (0..x.count(d) as CellId).collect()).collect();
        PresheafMap { source: x.clone(), target: x, images }
    }

    /// The unique map out of the empty presheaf.
    pub fn from_empty(target: Arc<Presheaf>) -> Self {
        let source = Arc::new(Presheaf::empty(target.truncation()));
        let images = vec![Vec::new(); source.num_flat()];
        PresheafMap { source, target, images }
    }

    /// The unique map to the terminal presheaf.
    pub fn to_point(source: Arc<Presheaf>) -> Self {
        let target = Arc::new(Presheaf::point(source.truncation()));
        let images = source.degrees().into_iter().map(|d| vec![0; source.count(d)]).collect();
        PresheafMap { source, target, images }
    }

    pub fn source(&self) -> &Arc<Presheaf> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Presheaf> {
        &self.target
    }

    pub fn image(&self, d: Multidegree, c: CellId) -> CellId {
        self.images[self.source.flat(d)][c as usize]
    }

    pub fn images_at(&self, d: Multidegree) -> &[CellId] {
        &self.images[self.source.flat(d)]
    }

    pub fn images(&self) -> &[Vec<CellId>] {
        &self.images
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &PresheafMap) -> Result<PresheafMap> {
        if !(Arc::ptr_eq(&self.target, &other.source) || *self.target == *other.source) {
            return Err(Error::Mismatch("middle object"));
        }
        let images = self
            .images
            .iter()
            .zip(self.source.degrees())
            .map(|(row, d)| row.iter().map(|&y| other.image(d, y)).collect())
            .collect();
        Ok(PresheafMap { source: self.source.clone(), target: other.target.clone(), images })
    }

    /// Same map with replaced (equal) endpoints.
    pub fn with_endpoints(&self, source: Arc<Presheaf>, target: Arc<Presheaf>) -> Result<PresheafMap> {
        if *source != *self.source || *target != *self.target {
            return Err(Error::Mismatch("endpoint"));
        }
        Ok(PresheafMap { source, target, images: self.images.clone() })
    }

    /// First violated naturality square, if any.
    pub fn naturality_violation(&self) -> Option<String> {
        let (x, y) = (&self.source, &self.target);
        for d in x.degrees() {
            for dir in 0..x.arity() {
                let m = d.get(dir);
                for c in 0..x.count(d) as CellId {
                    let fc = self.image(d, c);
                    if m >= 1 {
                        let lower = d.lowered(dir);
                        for i in 0..=m {
                            if self.image(lower, x.face(d, dir, i, c)) != y.face(d, dir, i, fc) {
                                return Some(format!("d{i} (direction {dir}) of cell {c} at {d}"));
                            }
                        }
                    }
                    if m < x.truncation().get(dir) {
                        let upper = d.raised(dir);
                        for i in 0..=m {
                            if self.image(upper, x.degen(d, dir, i, c)) != y.degen(d, dir, i, fc) {
                                return Some(format!("s{i} (direction {dir}) of cell {c} at {d}"));
                            }
                        }
                    }
                }
            }
        }
        None
    }

    /// First pair of distinct cells with equal image, if any.
    pub fn injectivity_violation(&self) -> Option<(Multidegree, CellId, CellId)> {
        for d in self.source.degrees() {
            let mut seen = vec![u32::MAX; self.target.count(d)];
            for (c, &y) in self.images_at(d).iter().enumerate() {
                if seen[y as usize] != u32::MAX {
                    return Some((d, seen[y as usize], c as CellId));
                }
                seen[y as usize] = c as CellId;
            }
        }
        None
    }

    pub fn is_mono(&self) -> bool {
        self.injectivity_violation().is_none()
    }

    pub fn is_epi(&self) -> bool {
        self.source.degrees().into_iter().all(|d| {
            let mut hit = vec![false; self.target.count(d)];
            self.images_at(d).iter().for_each(|&y| hit[y as usize] = true);
            hit.into_iter().all(|h| h)
        })
    }

    pub fn is_iso(&self) -> bool {
        self.source.degrees().into_iter().all(|d| self.source.count(d) == self.target.count(d)) && self.is_mono()
    }

    /// Inverse of an isomorphism.
    pub fn inverse(&self) -> Option<PresheafMap> {
        if !self.is_iso() {
            return None;
        }
        let images = self
            .source
            .degrees()
            .into_iter()
            .map(|d| {
                let mut inv = vec![0; self.target.count(d)];
                for (c, &y) in self.images_at(d).iter().enumerate() {
                    inv[y as usize] = c as CellId;
                }
                inv
            })
            .collect();
        Some(PresheafMap { source: self.target.clone(), target: self.source.clone(), images })
    }

    /// Restriction to a smaller truncation.
    pub fn truncate(&self, t: Multidegree) -> Result<PresheafMap> {
        let s = Arc::new(self.source.truncate(t)?);
        let tg = Arc::new(self.target.truncate(t)?);
        let images = t.below().into_iter().map(|d| self.images_at(d).to_vec()).collect();
        PresheafMap::new_unchecked(s, tg, images)
    }

    /// Index reversal in one direction applied to both ends.
    pub fn opposite(&self, dir: usize) -> PresheafMap {
        PresheafMap {
            source: Arc::new(self.source.opposite(dir)),
            target: Arc::new(self.target.opposite(dir)),
            images: self.images.clone(),
        }
    }
}
