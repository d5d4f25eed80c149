//! Localizer sets and locality of maps against them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{hom_into, HomSearch};
use crate::error::{Error, Result};
use crate::lifting::Family;
use crate::oracles::{weq, Effort};
use crate::presheaf::{Multidegree, PresheafMap, Reindexing};
use crate::verdict::{Labeled, Verdict};

/// The named localizer sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Localizer {
    Segal,
    Css,
    Kan,
    Custom,
}

impl Localizer {
    pub fn name(self) -> &'static str {
        match self {
            Localizer::Segal => "segal",
            Localizer::Css => "css",
            Localizer::Kan => "kan",
            Localizer::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "segal" => Localizer::Segal,
            "css" => Localizer::Css,
            "kan" => Localizer::Kan,
            other => return Err(Error::InvalidSpec(format!("unknown localizer {other}"))),
        })
    }
}

/// A finite set of monomorphisms of simplicial spaces.
#[derive(Clone, Debug)]
pub struct LocalizerSet {
    pub name: Localizer,
    pub bound: usize,
    custom: Vec<(String, PresheafMap)>,
}

impl LocalizerSet {
    pub fn named(name: Localizer, bound: usize) -> Self {
        LocalizerSet { name, bound, custom: Vec::new() }
    }

    pub fn segal(bound: usize) -> Self {
        Self::named(Localizer::Segal, bound)
    }

    pub fn css(bound: usize) -> Self {
        Self::named(Localizer::Css, bound)
    }

    pub fn kan(bound: usize) -> Self {
        Self::named(Localizer::Kan, bound)
    }

    pub fn custom(members: Vec<(String, PresheafMap)>) -> Self {
        LocalizerSet { name: Localizer::Custom, bound: 0, custom: members }
    }

    /// Members built (or truncated) at the arity-2 truncation `t`; the
    /// bound is clamped to the categorical truncation.
    pub fn members(&self, t: Multidegree) -> Result<Vec<(String, PresheafMap)>> {
        if t.arity() != 2 {
            return Err(Error::ArityMismatch { expected: 2, found: t.arity() });
        }
        let bound = self.bound.min(t.get(0));
        let segal = || Family::SpineInclusions.members(bound, t);
        match self.name {
            Localizer::Segal => segal(),
            Localizer::Css => {
                let mut out = segal()?;
                if t.get(0) >= 1 {
                    out.extend(Family::CompletenessInclusion.members(1, t)?);
                }
                Ok(out)
            }
            Localizer::Kan => Family::VertexInclusions.members(bound, t),
            Localizer::Custom => self.custom.iter().map(|(n, f)| Ok((n.clone(), f.truncate(t)?))).collect(),
        }
    }
}

/// Options shared by the locality checks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LocalityOptions {
    /// Only structure maps that send every vertex to one vertex.
    pub vertex_only: bool,
    pub effort: Effort,
}

/// For each member `i: A -> B` (in `p`'s arity and truncation) and each
/// structure map `q: B -> X`, weak equivalence of
/// `Map_{/X}(B, Y) -> Map_{/X}(A, Y)`.
pub fn local_over(p: &PresheafMap, members: &[(String, PresheafMap)], opts: LocalityOptions) -> Result<Verdict> {
    let last = p.source().arity() - 1;
    let mut jobs = Vec::new();
    for (name, i) in members {
        let qs = HomSearch::new(i.target(), p.target()).all()?;
        for (j, q) in qs.into_iter().enumerate() {
            if opts.vertex_only {
                let zero = &q.images()[0];
                if zero.windows(2).any(|w| w[0] != w[1]) {
                    continue;
                }
            }
            jobs.push((format!("{name} via structure map {j}"), i, q));
        }
    }
    let parts = jobs
        .par_iter()
        .map(|(label, i, q)| {
            let iq = i.then(q)?;
            let mb = hom_into(i.target(), p.source(), &[last], None, Some((p, q)))?;
            let ma = hom_into(i.source(), p.source(), &[last], None, Some((p, &iq)))?;
            let r = mb.restrict(i, &ma)?;
            Ok(Labeled::new(label.clone(), weq(&r, opts.effort)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Verdict::all(parts))
}

/// Locality of an arity-2 map (an object when the target is a point).
pub fn is_local2(p: &PresheafMap, s: &LocalizerSet, opts: LocalityOptions) -> Result<Verdict> {
    if p.source().arity() != 2 {
        return Err(Error::ArityMismatch { expected: 2, found: p.source().arity() });
    }
    local_over(p, &s.members(p.source().truncation())?, opts)
}

/// Locality of an arity-3 map against `VEmb` of the members.
pub fn is_local(p: &PresheafMap, s: &LocalizerSet, opts: LocalityOptions) -> Result<Verdict> {
    if p.source().arity() != 3 {
        return Err(Error::ArityMismatch { expected: 3, found: p.source().arity() });
    }
    let t = p.source().truncation();
    let vemb = Reindexing::vemb(t.get(1));
    let members = s
        .members(Multidegree::new(&[t.get(0), t.get(2)])?)?
        .into_iter()
        .map(|(n, f)| Ok((n, vemb.apply_map(&f)?)))
        .collect::<Result<Vec<_>>>()?;
    local_over(p, &members, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;
    use std::sync::Arc;

    fn t2(k: usize, l: usize) -> Multidegree {
        Multidegree::new(&[k, l]).unwrap()
    }

    fn object(x: Arc<crate::presheaf::Presheaf>) -> PresheafMap {
        PresheafMap::to_point(x)
    }

    #[test]
    fn member_counts() {
        let t = t2(3, 1);
        assert_eq!(LocalizerSet::segal(3).members(t).unwrap().len(), 2);
        assert_eq!(LocalizerSet::css(3).members(t).unwrap().len(), 3);
        assert_eq!(LocalizerSet::kan(3).members(t).unwrap().len(), 4);
    }

    #[test]
    fn segal_and_completeness_of_small_objects() {
        let t = t2(2, 1);
        let o = LocalityOptions::default();
        let f1 = object(shapes::f(1, t).unwrap());
        let e1 = object(shapes::e(1, t).unwrap());
        let g2 = object(shapes::g(2, t).unwrap());
        assert!(is_local2(&f1, &LocalizerSet::segal(2), o).unwrap().is_holds());
        assert!(is_local2(&f1, &LocalizerSet::css(2), o).unwrap().is_holds());
        assert!(is_local2(&f1, &LocalizerSet::kan(2), o).unwrap().is_fails());
        assert!(is_local2(&e1, &LocalizerSet::segal(2), o).unwrap().is_holds());
        assert!(is_local2(&e1, &LocalizerSet::css(2), o).unwrap().is_fails());
        assert!(is_local2(&g2, &LocalizerSet::segal(2), o).unwrap().is_fails());
        let w = object(shapes::chaotic_segal(t).unwrap());
        assert!(is_local2(&w, &LocalizerSet::css(2), o).unwrap().is_holds());
    }
}
