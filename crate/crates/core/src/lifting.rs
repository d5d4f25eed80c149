//! Right lifting properties by exhaustive filler search, the named
//! generating families, and a bounded small-object argument.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{cocone_map, external_map, pushout, pushout_product, HomSearch};
use crate::error::{Error, Result};
use crate::presheaf::{CellId, Multidegree, Presheaf, PresheafMap};
use crate::shapes;
use crate::verdict::{Certificate, MapRecord, Verdict, Witness};

/// A commuting square `top: A -> Y`, `bottom: B -> X` over `left: A -> B`
/// and `right: Y -> X`.
#[derive(Clone, Debug)]
pub struct LiftingProblem {
    pub left: PresheafMap,
    pub right: PresheafMap,
    pub top: PresheafMap,
    pub bottom: PresheafMap,
}

impl LiftingProblem {
    pub fn new(left: PresheafMap, right: PresheafMap, top: PresheafMap, bottom: PresheafMap) -> Result<Self> {
        let a = top.then(&right).map_err(|_| Error::NonCommuting("top and right are not composable".into()))?;
        let b = left.then(&bottom).map_err(|_| Error::NonCommuting("left and bottom are not composable".into()))?;
        if a.images() != b.images() {
            return Err(Error::NonCommuting("right ∘ top differs from bottom ∘ left".into()));
        }
        Ok(LiftingProblem { left, right, top, bottom })
    }

    /// Searches for a diagonal filler `B -> Y`.
    pub fn filler(&self, budget: u64) -> Result<Option<PresheafMap>> {
        let (a, b) = (self.left.source(), self.left.target());
        let mut fixed: Vec<Vec<Option<CellId>>> = b.degrees().into_iter().map(|d| vec![None; b.count(d)]).collect();
        for d in a.degrees() {
            for c in 0..a.count(d) as CellId {
                let x = self.left.image(d, c);
                if b.is_degenerate(d, x) {
                    continue;
                }
                let want = self.top.image(d, c);
                let slot = &mut fixed[b.flat(d)][x as usize];
                match *slot {
                    Some(prev) if prev != want => return Ok(None),
                    _ => *slot = Some(want),
                }
            }
        }
        let found = HomSearch::new(b, self.right.source()).fixed(&fixed).over(&self.right, &self.bottom).budget(budget).first()?;
        Ok(found.filter(|g| self.left.then(g).map(|h| h.images() == self.top.images()).unwrap_or(false)))
    }
}

/// Decides one lifting problem: Holds with a filler, Fails otherwise.
pub fn solve_lift(sq: &LiftingProblem) -> Result<Verdict> {
    Ok(match sq.filler(crate::algebra::DEFAULT_BUDGET)? {
        Some(g) => Verdict::holds(Certificate::Filler { map: MapRecord::of(&g) }),
        None => Verdict::fails(Witness::Unfillable {
            family: "single".into(),
            member: "square".into(),
            bound: 0,
            top: MapRecord::of(&sq.top),
            bottom: MapRecord::of(&sq.bottom),
        }),
    })
}

/// The named families of monomorphisms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `Λ[n,i] ↪ Δ[n]`, `1 <= n <= bound`.
    Horns,
    /// Horns with `0 < i < n`.
    InnerHorns,
    /// Horns with `i < n`.
    LeftHorns,
    /// Horns with `0 < i`.
    RightHorns,
    /// `∂Δ[n] ↪ Δ[n]`, `0 <= n <= bound`.
    Boundaries,
    /// `G(n) ↪ F(n)`, `2 <= n <= bound`.
    SpineInclusions,
    /// `⟨0⟩: F(0) -> E(1)`.
    CompletenessInclusion,
    /// `⟨0⟩: F(0) -> F(n)`, `0 <= n <= bound`.
    VertexInclusions,
    /// An arity-1 family placed in direction `dir` of arity `arity`, with
    /// its own bound if given.
    Embedded { family: Box<Family>, arity: usize, dir: usize, bound: Option<usize> },
    /// Pushout-products of members of two families of equal arity.
    PpClosure(Box<Family>, Box<Family>),
}

/// A family with a dimension bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratingFamily {
    pub family: Family,
    pub bound: usize,
}

fn md(v: &[usize]) -> Multidegree {
    Multidegree::new(v).expect("degree")
}

fn embed_map(f: &PresheafMap, t: Multidegree, dir: usize) -> Result<PresheafMap> {
    let arity = t.arity();
    let mut out = if dir == 0 {
        f.clone()
    } else {
        let pt = Arc::new(Presheaf::point(md(&t.as_vec()[..dir])));
        external_map(&PresheafMap::identity(pt), f)?
    };
    if dir + 1 < arity {
        let pt = Arc::new(Presheaf::point(md(&t.as_vec()[dir + 1..])));
        out = external_map(&out, &PresheafMap::identity(pt))?;
    }
    Ok(out)
}

impl Family {
    pub fn name(&self) -> String {
        match self {
            Family::Horns => "horns".into(),
            Family::InnerHorns => "inner_horns".into(),
            Family::LeftHorns => "left_horns".into(),
            Family::RightHorns => "right_horns".into(),
            Family::Boundaries => "boundaries".into(),
            Family::SpineInclusions => "spine_inclusions".into(),
            Family::CompletenessInclusion => "completeness_inclusion".into(),
            Family::VertexInclusions => "vertex_inclusions".into(),
            Family::Embedded { family, dir, .. } => format!("{}@{dir}", family.name()),
            Family::PpClosure(a, b) => format!("pp({}, {})", a.name(), b.name()),
        }
    }

    pub fn parse(name: &str) -> Result<Family> {
        Ok(match name {
            "horns" => Family::Horns,
            "inner_horns" | "inner-horns" => Family::InnerHorns,
            "left_horns" | "left-horns" | "left-anodyne" => Family::LeftHorns,
            "right_horns" | "right-horns" | "right-anodyne" => Family::RightHorns,
            "boundaries" => Family::Boundaries,
            "spine_inclusions" | "spine" | "segal" => Family::SpineInclusions,
            "completeness_inclusion" | "completeness" => Family::CompletenessInclusion,
            "vertex_inclusions" | "vertex" | "kan" => Family::VertexInclusions,
            other => return Err(Error::InvalidSpec(format!("unknown family {other}"))),
        })
    }

    /// The arity of the members.
    pub fn arity(&self) -> usize {
        match self {
            Family::Horns | Family::InnerHorns | Family::LeftHorns | Family::RightHorns | Family::Boundaries => 1,
            Family::SpineInclusions | Family::CompletenessInclusion | Family::VertexInclusions => 2,
            Family::Embedded { arity, .. } => *arity,
            Family::PpClosure(a, _) => a.arity(),
        }
    }

    /// The largest degree (per direction) a member with this bound reaches.
    fn reach(&self, bound: usize) -> Vec<usize> {
        match self {
            Family::Embedded { family, arity, dir, bound: own } => {
                let mut v = vec![0; *arity];
                v[*dir] = family.reach(own.unwrap_or(bound))[0];
                v
            }
            Family::PpClosure(a, b) => a.reach(bound).iter().zip(b.reach(bound)).map(|(x, y)| (*x).max(y)).collect(),
            Family::CompletenessInclusion => vec![1, 0],
            f if f.arity() == 2 => vec![bound, 0],
            _ => vec![bound],
        }
    }

    /// Members as named inclusions, built at truncation `t`.
    pub fn members(&self, bound: usize, t: Multidegree) -> Result<Vec<(String, PresheafMap)>> {
        if t.arity() != self.arity() {
            return Err(Error::ArityMismatch { expected: self.arity(), found: t.arity() });
        }
        let reach = self.reach(bound);
        if reach.iter().enumerate().any(|(j, &r)| r > t.get(j)) {
            return Err(Error::UnsoundBound(format!(
                "family {} with bound {bound} needs truncation {:?}, have {t}",
                self.name(),
                reach
            )));
        }
        let horns = |keep: &dyn Fn(usize, usize) -> bool| -> Result<Vec<(String, PresheafMap)>> {
            let mut out = Vec::new();
            for n in 1..=bound {
                for i in 0..=n {
                    if keep(n, i) {
                        out.push((format!("horn({n},{i})"), shapes::horn_inclusion(n, i, t.get(0))?));
                    }
                }
            }
            Ok(out)
        };
        match self {
            Family::Horns => horns(&|_, _| true),
            Family::InnerHorns => horns(&|n, i| 0 < i && i < n),
            Family::LeftHorns => horns(&|n, i| i < n),
            Family::RightHorns => horns(&|_, i| 0 < i),
            Family::Boundaries => {
                (0..=bound).map(|n| Ok((format!("boundary({n})"), shapes::boundary_inclusion(n, t.get(0))?))).collect()
            }
            Family::SpineInclusions => {
                (2..=bound).map(|n| Ok((format!("spine({n})"), shapes::spine_inclusion(n, t)?))).collect()
            }
            Family::CompletenessInclusion => Ok(vec![("completeness".into(), shapes::e_vertex_map(1, 0, t)?)]),
            Family::VertexInclusions => {
                (0..=bound).map(|n| Ok((format!("vertex(0->{n})"), shapes::vertex_map(n, 0, t)?))).collect()
            }
            Family::Embedded { family, dir, bound: own, .. } => {
                let inner = family.members(own.unwrap_or(bound), md(&[t.get(*dir)]))?;
                inner.into_iter().map(|(name, f)| Ok((format!("{name}@{dir}"), embed_map(&f, t, *dir)?))).collect()
            }
            Family::PpClosure(a, b) => {
                let (ma, mb) = (a.members(bound, t)?, b.members(bound, t)?);
                let mut out = Vec::new();
                for (na, fa) in &ma {
                    for (nb, fb) in &mb {
                        out.push((format!("{na} □ {nb}"), pushout_product(fa, fb)?));
                    }
                }
                Ok(out)
            }
        }
    }
}

impl GeneratingFamily {
    pub fn new(family: Family, bound: usize) -> Self {
        GeneratingFamily { family, bound }
    }

    pub fn horns(bound: usize) -> Self {
        Self::new(Family::Horns, bound)
    }

    pub fn boundaries(bound: usize) -> Self {
        Self::new(Family::Boundaries, bound)
    }

    /// `(∂F(n) ↪ F(n)) □ (horns in the space direction)`, `n <= cat`,
    /// horns up to `space`.
    pub fn reedy_horns(cat: usize, space: usize) -> Self {
        let c = Family::Embedded { family: Box::new(Family::Boundaries), arity: 2, dir: 0, bound: Some(cat) };
        let s = Family::Embedded { family: Box::new(Family::Horns), arity: 2, dir: 1, bound: Some(space) };
        Self::new(Family::PpClosure(Box::new(c), Box::new(s)), cat.max(space))
    }

    /// `(∂F(k,n) ↪ F(k,n)) □ (horns in the space direction)`.
    pub fn bireedy_horns(level: usize, cat: usize, space: usize) -> Self {
        let k = Family::Embedded { family: Box::new(Family::Boundaries), arity: 3, dir: 0, bound: Some(level) };
        let c = Family::Embedded { family: Box::new(Family::Boundaries), arity: 3, dir: 1, bound: Some(cat) };
        let s = Family::Embedded { family: Box::new(Family::Horns), arity: 3, dir: 2, bound: Some(space) };
        let bnd = Family::PpClosure(Box::new(k), Box::new(c));
        Self::new(Family::PpClosure(Box::new(bnd), Box::new(s)), level.max(cat).max(space))
    }

    pub fn members(&self, t: Multidegree) -> Result<Vec<(String, PresheafMap)>> {
        self.family.members(self.bound, t)
    }
}

/// All lifting problems of `i` against `p`, in canonical order.
pub fn problems(i: &PresheafMap, p: &PresheafMap) -> Result<Vec<(PresheafMap, PresheafMap)>> {
    let bottoms = HomSearch::new(i.target(), p.target()).all()?;
    let mut out = Vec::new();
    for bottom in bottoms {
        let base = i.then(&bottom)?;
        for top in HomSearch::new(i.source(), p.source()).over(p, &base).all()? {
            out.push((top, bottom.clone()));
        }
    }
    Ok(out)
}

/// Right lifting property of `p` against every member of the family.
/// Exhausting the search budget gives Unknown.
pub fn rlp(p: &PresheafMap, fam: &GeneratingFamily) -> Result<Verdict> {
    match rlp_exact(p, fam) {
        Err(Error::SearchLimit(n)) => Ok(Verdict::unknown(format!("{}: search budget of {n} nodes exhausted", fam.family.name()))),
        r => r,
    }
}

fn rlp_exact(p: &PresheafMap, fam: &GeneratingFamily) -> Result<Verdict> {
    let members = fam.members(p.source().truncation())?;
    let mut total = 0;
    for (name, i) in &members {
        let probs = problems(i, p)?;
        total += probs.len();
        let failure = probs
            .par_iter()
            .map(|(top, bottom)| {
                let sq = LiftingProblem { left: i.clone(), right: p.clone(), top: top.clone(), bottom: bottom.clone() };
                sq.filler(crate::algebra::DEFAULT_BUDGET).map(|f| f.is_none())
            })
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .position(|unsolved| unsolved);
        if let Some(k) = failure {
            let (top, bottom) = &probs[k];
            return Ok(Verdict::fails(Witness::Unfillable {
                family: fam.family.name(),
                member: name.clone(),
                bound: fam.bound,
                top: MapRecord::of(top),
                bottom: MapRecord::of(bottom),
            }));
        }
    }
    Ok(Verdict::holds(Certificate::Lifting { family: fam.family.name(), bound: fam.bound, problems: total }))
}

/// Output of the bounded small-object argument.
#[derive(Clone, Debug)]
pub struct FactorizationResult {
    pub middle: Arc<Presheaf>,
    pub left: PresheafMap,
    pub right: PresheafMap,
    /// Nondegenerate cells attached.
    pub consumed: usize,
    pub exhausted: bool,
    pub rounds: usize,
}

const MAX_ROUNDS: usize = 64;

/// Factors `f` as a relative cell complex over the family followed by a map
/// with the lifting property against every problem found, attaching at most
/// `budget` nondegenerate cells.
pub fn factor(f: &PresheafMap, fam: &GeneratingFamily, budget: usize) -> Result<FactorizationResult> {
    let members = fam.members(f.source().truncation())?;
    let mut left = PresheafMap::identity(f.source().clone());
    let mut right = f.clone();
    let mut consumed = 0;
    for round in 0..MAX_ROUNDS {
        let mut pending = Vec::new();
        for (_, i) in &members {
            for (top, bottom) in problems(i, &right)? {
                let sq = LiftingProblem { left: i.clone(), right: right.clone(), top: top.clone(), bottom: bottom.clone() };
                if sq.filler(crate::algebra::DEFAULT_BUDGET)?.is_none() {
                    pending.push((i.clone(), top, bottom));
                }
            }
        }
        if pending.is_empty() {
            return Ok(FactorizationResult { middle: right.source().clone(), left, right, consumed, exhausted: false, rounds: round });
        }
        // tops were computed against the middle object at the start of the round
        let mut carry = PresheafMap::identity(right.source().clone());
        for (i, top, bottom) in pending {
            let cost: usize = i.target().degrees().into_iter().map(|d| i.target().nondegenerate_count(d)).sum::<usize>()
                - i.source().degrees().into_iter().map(|d| i.source().nondegenerate_count(d)).sum::<usize>();
            if consumed + cost > budget {
                return Ok(FactorizationResult { middle: right.source().clone(), left, right, consumed, exhausted: true, rounds: round + 1 });
            }
            let top_now = top.then(&carry)?;
            let po = pushout(&top_now, &i)?;
            right = cocone_map(&po, &right, &bottom)?;
            left = left.then(&po.first)?;
            carry = carry.then(&po.first)?;
            consumed += cost;
        }
    }
    Ok(FactorizationResult { middle: right.source().clone(), left, right, consumed, exhausted: true, rounds: MAX_ROUNDS })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(v: usize) -> Multidegree {
        Multidegree::new(&[v]).unwrap()
    }

    #[test]
    fn point_is_kan() {
        let pt = Arc::new(Presheaf::point(one(3)));
        assert!(rlp(&PresheafMap::identity(pt), &GeneratingFamily::horns(3)).unwrap().is_holds());
    }

    #[test]
    fn simplex_is_not_kan() {
        let x = shapes::delta(2, 2).unwrap();
        let v = rlp(&PresheafMap::to_point(x), &GeneratingFamily::horns(2)).unwrap();
        match v {
            Verdict::Fails { witness: Witness::Unfillable { member, .. } } => assert_eq!(member, "horn(2,0)"),
            other => panic!("expected a horn witness, got {}", other.summary()),
        }
    }

    #[test]
    fn groupoid_nerve_is_kan() {
        let j = shapes::j(1, 4).unwrap();
        assert!(rlp(&PresheafMap::to_point(j), &GeneratingFamily::horns(3)).unwrap().is_holds());
    }

    #[test]
    fn degenerate_filler_of_one_dimensional_horn() {
        let i = shapes::horn_inclusion(1, 0, 2).unwrap();
        let p = PresheafMap::to_point(shapes::delta(2, 2).unwrap());
        let probs = problems(&i, &p).unwrap();
        assert_eq!(probs.len(), 3);
        for (top, bottom) in probs {
            let sq = LiftingProblem::new(i.clone(), p.clone(), top, bottom).unwrap();
            assert!(solve_lift(&sq).unwrap().is_holds());
        }
    }

    #[test]
    fn factor_identity_is_free() {
        let x = shapes::delta(1, 2).unwrap();
        let r = factor(&PresheafMap::identity(x), &GeneratingFamily::horns(2), 10).unwrap();
        assert_eq!(r.consumed, 0);
        assert!(!r.exhausted);
    }

    #[test]
    fn factor_boundary_over_point() {
        let b = shapes::boundary(2, 2).unwrap();
        let f = PresheafMap::to_point(b);
        let r = factor(&f, &GeneratingFamily::boundaries(2), 50).unwrap();
        assert!(!r.exhausted);
        assert!(rlp(&r.right, &GeneratingFamily::boundaries(2)).unwrap().is_holds());
        assert!(r.left.is_mono());
        assert_eq!(r.left.then(&r.right).unwrap().images(), f.images());
    }

    #[test]
    fn unsound_family_bound_is_refused() {
        let x = shapes::delta(1, 2).unwrap();
        assert!(matches!(rlp(&PresheafMap::to_point(x), &GeneratingFamily::horns(3)), Err(Error::UnsoundBound(_))));
    }
}
