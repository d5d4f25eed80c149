use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::homology::{component_labels, homology, pi0_map, sound_maxdim};
use crate::algebra::{cone_map, product, pullback, HomSearch};
use crate::error::{Error, Result};
use crate::lifting::{factor, rlp, GeneratingFamily};
use crate::presheaf::{CellId, Multidegree, Presheaf, PresheafMap, Reindexing};
use crate::shapes;
use crate::verdict::{Certificate, Labeled, MapRecord, Verdict, Witness};

/// How hard [`weq`] looks for a positive certificate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Effort {
    /// Isomorphism, trivial fibration and refutations only.
    Low,
    /// Also homotopy inverses and the factor-then-check pipeline.
    #[default]
    High,
}

impl std::str::FromStr for Effort {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "low" => Ok(Effort::Low),
            "high" => Ok(Effort::High),
            other => Err(Error::InvalidSpec(format!("unknown effort {other}"))),
        }
    }
}

const SEARCH_NODES: u64 = 2_000_000;
const INVERSE_CANDIDATES: usize = 64;
const FACTOR_CELLS: usize = 64;

fn bounded(r: Result<Option<PresheafMap>>) -> Result<Option<PresheafMap>> {
    match r {
        Err(Error::SearchLimit(_)) => Ok(None),
        other => other,
    }
}

/// An elementary simplicial homotopy between `a` and `b`, in either
/// orientation.
fn homotopy(a: &PresheafMap, b: &PresheafMap) -> Result<Option<PresheafMap>> {
    let x = a.source();
    let t = x.truncation().get(0);
    let cyl = product(x, &shapes::delta(1, t)?)?.object;
    for (start, end) in [(a, b), (b, a)] {
        let mut fixed: Vec<Vec<Option<CellId>>> = cyl.degrees().into_iter().map(|d| vec![None; cyl.count(d)]).collect();
        for d in x.degrees() {
            let m = (d.get(0) + 2) as CellId;
            for c in 0..x.count(d) as CellId {
                fixed[cyl.flat(d)][(c * m) as usize] = Some(start.image(d, c));
                fixed[cyl.flat(d)][(c * m + m - 1) as usize] = Some(end.image(d, c));
            }
        }
        let found = bounded(HomSearch::new(&cyl, a.target()).fixed(&fixed).budget(SEARCH_NODES).first())?;
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// Searches for `g` with `g f ≃ id` and `f g ≃ id` through single
/// elementary homotopies.
fn homotopy_inverse(f: &PresheafMap) -> Result<Option<PresheafMap>> {
    let (x, y) = (f.source(), f.target());
    let mut candidates = Vec::new();
    let _ = HomSearch::new(y, x).budget(SEARCH_NODES).for_each(|table| {
        candidates.push(table.to_vec());
        if candidates.len() >= INVERSE_CANDIDATES {
            std::ops::ControlFlow::Break(())
        } else {
            std::ops::ControlFlow::Continue(())
        }
    });
    for images in candidates {
        let g = PresheafMap::new(y.clone(), x.clone(), images)?;
        let gf = f.then(&g)?;
        let fg = g.then(f)?;
        if homotopy(&gf, &PresheafMap::identity(x.clone()))?.is_some()
            && homotopy(&fg, &PresheafMap::identity(y.clone()))?.is_some()
        {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

/// Greedy elementary expansions from the image of a monomorphism `f`:
/// each step adds a simplex together with its one missing face. Returns
/// the steps `(dimension, simplex, face index)` if they exhaust the target.
pub fn anodyne_expansion(f: &PresheafMap) -> Result<Option<Vec<(usize, CellId, usize)>>> {
    let x = f.target();
    if x.arity() != 1 {
        return Err(Error::ArityMismatch { expected: 1, found: x.arity() });
    }
    if !f.is_mono() {
        return Ok(None);
    }
    let top = x.truncation().get(0);
    let deg = |n: usize| Multidegree::new(&[n]).expect("degree");
    let mut inside: Vec<Vec<bool>> = (0..=top).map(|n| vec![false; x.count(deg(n))]).collect();
    for n in 0..=top {
        for c in 0..f.source().count(deg(n)) as CellId {
            inside[n][f.image(deg(n), c) as usize] = true;
        }
    }
    let root = |n: usize, c: CellId| {
        let nf = x.normal_form(deg(n), c);
        (nf.degree.get(0), nf.cell)
    };
    let mut missing: usize = (0..=top).map(|n| x.nondegenerate(deg(n)).iter().filter(|&&c| !inside[n][c as usize]).count()).sum();
    let mut steps = Vec::new();
    while missing > 0 {
        let mut step = None;
        'search: for n in 1..=top {
            for c in x.nondegenerate(deg(n)) {
                if inside[n][c as usize] {
                    continue;
                }
                let faces: Vec<(usize, CellId)> = (0..=n).map(|i| root(n - 1, x.face(deg(n), 0, i, c))).collect();
                let out: Vec<usize> = (0..=n).filter(|&i| !inside[faces[i].0][faces[i].1 as usize]).collect();
                if let [i] = out[..] {
                    if faces[i].0 == n - 1 {
                        step = Some((n, c, i, faces[i].1));
                        break 'search;
                    }
                }
            }
        }
        let Some((n, c, i, face)) = step else { return Ok(None) };
        inside[n][c as usize] = true;
        inside[n - 1][face as usize] = true;
        missing -= 2;
        steps.push((n, c, i));
    }
    Ok(Some(steps))
}

/// A vertex from which `x` expands to everything.
fn contraction_vertex(x: &Arc<Presheaf>) -> Result<Option<(CellId, usize)>> {
    let d0 = Multidegree::new(&[0]).expect("degree");
    let pt = Arc::new(Presheaf::point(x.truncation()));
    for v in 0..x.count(d0) as CellId {
        let images = x.degrees().into_iter().map(|d| vec![iterated_degeneracy(x, v, d.get(0))]).collect();
        let inc = PresheafMap::new(pt.clone(), x.clone(), images)?;
        if let Some(steps) = anodyne_expansion(&inc)? {
            return Ok(Some((v, steps.len())));
        }
    }
    Ok(None)
}

fn iterated_degeneracy(x: &Presheaf, v: CellId, n: usize) -> CellId {
    let mut c = v;
    for m in 0..n {
        c = x.degen(Multidegree::new(&[m]).expect("degree"), 0, 0, c);
    }
    c
}

/// Refutation by components and homology, if any.
fn refute(f: &PresheafMap) -> Result<Option<Witness>> {
    let (x, y) = (f.source(), f.target());
    let on_components = pi0_map(f)?;
    let target_count = component_labels(y)?.iter().max().map_or(0, |m| m + 1);
    let mut hit = vec![false; target_count];
    let mut injective = true;
    for &k in &on_components {
        injective &= !hit[k];
        hit[k] = true;
    }
    if !injective || hit.iter().any(|h| !h) {
        return Ok(Some(Witness::Components {
            source: on_components.len(),
            target: target_count,
            detail: if injective { "not surjective on components".into() } else { "not injective on components".into() },
        }));
    }
    if let Some(m) = sound_maxdim(x) {
        let (hx, hy) = (homology(x, m)?, homology(y, m)?);
        if let Some(dim) = hx.first_difference(&hy) {
            return Ok(Some(Witness::Homology {
                dim,
                source: hx.groups[dim].to_string(),
                target: hy.groups[dim].to_string(),
            }));
        }
    }
    Ok(None)
}

/// Weak equivalence of arity-1 presheaves, through the truncation.
pub fn weq(f: &PresheafMap, effort: Effort) -> Result<Verdict> {
    let (x, y) = (f.source(), f.target());
    if x.arity() != 1 {
        return Err(Error::ArityMismatch { expected: 1, found: x.arity() });
    }
    if f.is_iso() {
        return Ok(Verdict::holds(Certificate::Isomorphism { map: MapRecord::of(f) }));
    }
    let t = x.truncation().get(0);
    let trivial = rlp(f, &GeneratingFamily::boundaries(t))?;
    if trivial.is_holds() {
        return Ok(Verdict::holds(Certificate::Derived {
            rule: "trivial fibration".into(),
            parts: vec![Labeled::new("rlp boundaries", trivial)],
        }));
    }
    if let Some(w) = refute(f)? {
        return Ok(Verdict::fails(w));
    }
    if let Some(steps) = anodyne_expansion(f)? {
        return Ok(Verdict::holds(Certificate::Derived {
            rule: "anodyne expansion".into(),
            parts: vec![Labeled::new(
                format!("{} elementary expansions", steps.len()),
                Verdict::holds(Certificate::Injective { cells_checked: x.total_cells() }),
            )],
        }));
    }
    if let (Some((u, a)), Some((v, b))) = (contraction_vertex(x)?, contraction_vertex(y)?) {
        let part = |name: String, k: usize| Labeled::new(name, Verdict::holds(Certificate::Lifting { family: "elementary expansions".into(), bound: t, problems: k }));
        return Ok(Verdict::holds(Certificate::Derived {
            rule: "both ends contractible".into(),
            parts: vec![part(format!("source expands from vertex {u}"), a), part(format!("target expands from vertex {v}"), b)],
        }));
    }
    if effort == Effort::High {
        if let Some(g) = homotopy_inverse(f)? {
            return Ok(Verdict::holds(Certificate::Derived {
                rule: "homotopy inverse".into(),
                parts: vec![Labeled::new(
                    "inverse",
                    Verdict::holds(Certificate::Filler { map: MapRecord::of(&g) }),
                )],
            }));
        }
        if t >= 1 {
            let fact = match factor(f, &GeneratingFamily::horns(t), FACTOR_CELLS) {
                Err(Error::SearchLimit(_)) => None,
                r => Some(r?),
            };
            if let Some(fact) = fact.filter(|r| !r.exhausted) {
                let second = rlp(&fact.right, &GeneratingFamily::boundaries(t))?;
                if second.is_holds() {
                    return Ok(Verdict::holds(Certificate::Derived {
                        rule: "anodyne then trivial fibration".into(),
                        parts: vec![Labeled::new("rlp boundaries of second factor", second)],
                    }));
                }
            }
        }
    }
    Ok(Verdict::unknown(format!(
        "components and homology through dimension {} agree but no certificate was found",
        t.saturating_sub(1)
    )))
}

/// `x -> Δ[0]` is a weak equivalence.
pub fn is_contractible(x: &Arc<Presheaf>, effort: Effort) -> Result<Verdict> {
    weq(&PresheafMap::to_point(x.clone()), effort)
}

/// The diagonal of an arity-2 presheaf is contractible.
pub fn diag_contractible(x: &Presheaf, effort: Effort) -> Result<Verdict> {
    if x.arity() != 2 {
        return Err(Error::ArityMismatch { expected: 2, found: x.arity() });
    }
    let d = Arc::new(Reindexing::fdiag().apply(x)?);
    is_contractible(&d, effort)
}

/// A commuting square `top: P -> Y`, `left: P -> A`, `right: Y -> X`,
/// `bottom: A -> X`.
#[derive(Clone, Debug)]
pub struct Square {
    pub top: PresheafMap,
    pub left: PresheafMap,
    pub right: PresheafMap,
    pub bottom: PresheafMap,
}

impl Square {
    pub fn new(top: PresheafMap, left: PresheafMap, right: PresheafMap, bottom: PresheafMap) -> Result<Self> {
        let a = top.then(&right)?;
        let b = left.then(&bottom)?;
        if a.images() != b.images() {
            return Err(Error::NonCommuting("right ∘ top differs from bottom ∘ left".into()));
        }
        Ok(Square { top, left, right, bottom })
    }

    /// The comparison map from the corner into the strict pullback.
    pub fn comparison(&self) -> Result<PresheafMap> {
        let pb = pullback(&self.bottom, &self.right)?;
        cone_map(&pb, &self.left, &self.top)
    }
}

/// Homotopy pullback test; `evidence` must certify that the right leg is a
/// Kan fibration.
pub fn homotopy_pullback(sq: &Square, evidence: &Verdict, effort: Effort) -> Result<Verdict> {
    if !evidence.is_holds() {
        return Err(Error::Refused("the right leg has no Kan fibration certificate".into()));
    }
    let v = weq(&sq.comparison()?, effort)?;
    Ok(Verdict::all(vec![Labeled::new("right leg is a Kan fibration", evidence.clone()), Labeled::new("comparison", v)]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_collapse() {
        let x = shapes::delta(2, 3).unwrap();
        assert!(weq(&PresheafMap::identity(x), Effort::Low).unwrap().is_holds());
        let i = shapes::delta(1, 3).unwrap();
        assert!(weq(&PresheafMap::to_point(i), Effort::High).unwrap().is_holds());
    }

    #[test]
    fn boundary_inclusion_fails_on_h1() {
        let v = weq(&shapes::boundary_inclusion(2, 3).unwrap(), Effort::High).unwrap();
        match v {
            Verdict::Fails { witness: Witness::Homology { dim, .. } } => assert_eq!(dim, 1),
            other => panic!("{}", other.summary()),
        }
    }

    #[test]
    fn two_points_are_not_one() {
        let v = weq(&PresheafMap::to_point(shapes::boundary(1, 2).unwrap()), Effort::High).unwrap();
        assert!(matches!(v, Verdict::Fails { witness: Witness::Components { .. } }));
    }

    #[test]
    fn horn_inclusion_is_a_weak_equivalence() {
        assert!(weq(&shapes::horn_inclusion(2, 1, 2).unwrap(), Effort::High).unwrap().is_holds());
    }

    #[test]
    fn diagonals() {
        let t = Multidegree::new(&[3, 3]).unwrap();
        let v = diag_contractible(&shapes::f(2, t).unwrap(), Effort::High).unwrap();
        assert!(v.is_holds(), "{}", v.summary());
        let v = diag_contractible(&shapes::g(3, t).unwrap(), Effort::High).unwrap();
        assert!(v.is_holds(), "{}", v.summary());
        let b = shapes::boundary_f_inclusion(2, t).unwrap();
        let v = diag_contractible(b.source(), Effort::High).unwrap();
        assert!(v.is_fails(), "{}", v.summary());
    }

    #[test]
    fn refusal_without_evidence() {
        let id = PresheafMap::identity(shapes::delta(0, 1).unwrap());
        let sq = Square::new(id.clone(), id.clone(), id.clone(), id).unwrap();
        assert!(homotopy_pullback(&sq, &Verdict::unknown("none"), Effort::Low).is_err());
        let ok = Verdict::holds(Certificate::Vacuous { reason: "identity".into() });
        assert!(homotopy_pullback(&sq, &ok, Effort::Low).unwrap().is_holds());
    }
}
