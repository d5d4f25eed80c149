//! Independent readings of locality, the S/D/C/P conditions on localizing
//! maps, matching objects, and equivalence criteria between fibrations.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::classes::{check_class, FibrationClass};
use super::local::{is_local, is_local2, LocalityOptions, LocalizerSet};
use super::reedy::{is_bireedy_fib, is_left_fib, ReedyMode, lemb_base, lemb_map, space_of_maps};
use crate::algebra::{cone_map, find_isomorphism, hom_into, internal_hom, pullback, pullback_exponential, HomSearch, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::grothendieck::vertex_of;
use crate::oracles::{diag_contractible, weq, Effort};
use crate::presheaf::{CellId, Multidegree, Presheaf, PresheafMap, Reindexing};
use crate::shapes;
use crate::verdict::{Labeled, Status, Verdict};

/// Whether the decided readings agree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub readings: Vec<Labeled>,
    pub agree: bool,
    pub decided: usize,
}

impl AgreementReport {
    pub fn new(readings: Vec<Labeled>) -> Self {
        let decided: Vec<Status> = readings.iter().map(|r| r.verdict.status()).filter(|s| *s != Status::Unknown).collect();
        let agree = decided.windows(2).all(|w| w[0] == w[1]);
        AgreementReport { decided: decided.len(), agree, readings }
    }

    /// The common decided status, if any reading was decided.
    pub fn status(&self) -> Status {
        self.readings.iter().map(|r| r.verdict.status()).find(|s| *s != Status::Unknown).unwrap_or(Status::Unknown)
    }
}

/// The representable map `F(m) -> X` picking the cell `sigma` of degree `(m, 0)`.
pub fn simplex_map(x: &Arc<Presheaf>, m: usize, sigma: CellId) -> Result<PresheafMap> {
    let t = x.truncation();
    let fm = shapes::f(m, t)?;
    let top = Multidegree::new(&[m, 0])?;
    let mut fixed: Vec<Vec<Option<CellId>>> = fm.degrees().into_iter().map(|d| vec![None; fm.count(d)]).collect();
    let id = fm.nondegenerate(top).into_iter().last().ok_or(Error::Mismatch("representable without a top cell"))?;
    fixed[fm.degrees().iter().position(|d| *d == top).expect("degree")][id as usize] = Some(sigma);
    HomSearch::new(&fm, x).fixed(&fixed).first()?.ok_or(Error::Mismatch("simplex does not extend"))
}

/// Fiber of an arity-3 map over a vertex of its base, as a map to the point.
fn vertex_fiber(p: &PresheafMap, x: CellId) -> Result<Arc<Presheaf>> {
    Ok(pullback(&vertex_of(p.target(), x)?, p)?.object)
}

/// Five readings of S-locality: global, `Val`, each `Val_n`, fiberwise, and
/// after pulling back along every simplex of the base.
pub fn characterization_crosscheck(p: &PresheafMap, s: &LocalizerSet, bound: usize, opts: LocalityOptions) -> Result<AgreementReport> {
    let x = lemb_base(p.target())?;
    let t = p.source().truncation();
    let global = is_local(p, s, opts)?;
    let val = is_local2(&Reindexing::val().apply_map(p)?, s, opts)?;
    let mut vals = Vec::new();
    for n in 0..=bound.min(t.get(1)) {
        vals.push(Labeled::new(format!("Val_{n}"), is_local2(&Reindexing::val_at(n).apply_map(p)?, s, opts)?));
    }
    let mut fibers = Vec::new();
    for v in 0..x.count(Multidegree::zero(2)) as CellId {
        let fib = Reindexing::val().apply(vertex_fiber(p, v)?.as_ref())?;
        fibers.push(Labeled::new(format!("vertex {v}"), is_local2(&PresheafMap::to_point(Arc::new(fib)), s, opts)?));
    }
    let mut simplices = Vec::new();
    for m in 0..=bound.min(t.get(1)) {
        for sigma in x.nondegenerate(Multidegree::new(&[m, 0])?) {
            let along = lemb_map(&simplex_map(&x, m, sigma)?, t.get(0))?;
            let pb = pullback(&along, p)?;
            simplices.push(Labeled::new(format!("simplex {m}:{sigma}"), is_local(&pb.first, s, opts)?));
        }
    }
    Ok(AgreementReport::new(vec![
        Labeled::new("global", global),
        Labeled::new("Val", val),
        Labeled::new("Val_n", Verdict::all(vals)),
        Labeled::new("fiberwise", Verdict::all(fibers)),
        Labeled::new("pullback to simplices", Verdict::all(simplices)),
    ]))
}

/// Conditions on a localizing monomorphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    /// The diagonal of the map is a weak equivalence.
    S,
    /// The codomain is diagonally contractible.
    D,
    /// Both.
    C,
}

impl Condition {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "S" | "s" => Ok(Condition::S),
            "D" | "d" => Ok(Condition::D),
            "C" | "c" => Ok(Condition::C),
            other => Err(Error::InvalidSpec(format!("unknown condition {other}"))),
        }
    }
}

pub fn condition_check(f: &PresheafMap, which: Condition, effort: Effort) -> Result<Verdict> {
    if f.source().arity() != 2 {
        return Err(Error::ArityMismatch { expected: 2, found: f.source().arity() });
    }
    let s = || -> Result<Verdict> { weq(&Reindexing::fdiag().apply_map(f)?, effort) };
    let d = || diag_contractible(f.target(), effort);
    Ok(match which {
        Condition::S => s()?,
        Condition::D => d()?,
        Condition::C => Verdict::all(vec![Labeled::new("S", s()?), Labeled::new("D", d()?)]),
    })
}

/// For every local `W` and shape `X`, `W^X` is again local for `f`; a
/// sampled necessary check. Objects that are not local for `f` are skipped.
pub fn condition_p_sample(
    f: &PresheafMap,
    locals: &[(String, Arc<Presheaf>)],
    shapes: &[(String, Arc<Presheaf>)],
    opts: LocalityOptions,
) -> Result<Verdict> {
    let s = LocalizerSet::custom(vec![("f".into(), f.clone())]);
    let mut parts = Vec::new();
    for (wn, w) in locals {
        if !is_local2(&PresheafMap::to_point(w.clone()), &s, opts)?.is_holds() {
            continue;
        }
        for (xn, x) in shapes {
            let wx = internal_hom(x, w)?.object;
            parts.push(Labeled::new(format!("{wn}^{xn}"), is_local2(&PresheafMap::to_point(wx), &s, opts)?));
        }
    }
    if parts.is_empty() {
        return Ok(Verdict::unknown("no sampled object is local for the map"));
    }
    Ok(Verdict::all(parts))
}

/// `M_k L` with `L_k -> M_k L -> X`.
#[derive(Clone, Debug)]
pub struct MatchingObject {
    pub object: Arc<Presheaf>,
    pub to_base: PresheafMap,
    pub from_level: PresheafMap,
}

/// Cells of `Map(D, LEmb X)` in directions `(n, l)`, read off in `X`.
fn evaluate_into_base(m: &crate::algebra::MappingObject, x: &Arc<Presheaf>) -> Result<PresheafMap> {
    let mut images = Vec::new();
    for e in m.object.degrees() {
        let d3 = Multidegree::new(&[0, e.get(0), e.get(1)])?;
        let rep = shapes::representable(d3, m.source().truncation())?;
        let top = rep.nondegenerate(d3)[0];
        let v0 = vertex_of(m.source(), 0)?.image(d3, 0);
        let cell = v0 * rep.count(d3) as CellId + top;
        let mut row = Vec::new();
        for c in 0..m.object.count(e) as CellId {
            row.push(m.map_of(e, c)?.image(d3, cell));
        }
        images.push(row);
    }
    PresheafMap::new(m.object.clone(), x.clone(), images)
}

pub fn matching_object(p: &PresheafMap, k: usize) -> Result<MatchingObject> {
    let x = lemb_base(p.target())?;
    let t = p.source().truncation();
    if k > t.get(0) {
        return Err(Error::UnsoundBound(format!("level {k} exceeds truncation {t}")));
    }
    let (y, target) = (p.source(), p.target());
    let level = Reindexing::level(k).apply_map(p)?;
    if k == 0 {
        return Ok(MatchingObject { object: x.clone(), to_base: PresheafMap::identity(x), from_level: level });
    }
    let i = shapes::representable_boundary(Multidegree::new(&[k, 0, 0])?, t)?;
    let (kk, dd) = (i.source(), i.target());
    let dirs = [1, 2];
    let (ky, dy) = (hom_into(kk, y, &dirs, None, None)?, hom_into(dd, y, &dirs, None, None)?);
    let (kt, dt) = (hom_into(kk, target, &dirs, None, None)?, hom_into(dd, target, &dirs, None, None)?);
    let corner = pullback(&ky.postcompose(p, &kt)?, &dt.restrict(&i, &kt)?)?;
    let from = cone_map(&corner, &dy.restrict(&i, &ky)?, &dy.postcompose(p, &dt)?)?;
    let to_base = corner.second.then(&evaluate_into_base(&dt, &x)?)?;
    // identify Map(Δ[k], L) with the level L_k
    let iso = crate::algebra::find_isomorphism(level.source(), from.source(), crate::algebra::DEFAULT_BUDGET)?
        .ok_or(Error::Mismatch("level and mapping object differ"))?;
    let mut from_level = iso.then(&from)?;
    // keep the identification over the base
    if from_level.then(&to_base)?.images() != level.images() {
        let candidates = HomSearch::new(level.source(), from.source()).injective().all()?;
        from_level = candidates
            .into_iter()
            .filter(|c| c.is_iso())
            .map(|c| c.then(&from))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .find(|c| c.then(&to_base).map(|h| h.images() == level.images()).unwrap_or(false))
            .ok_or(Error::Mismatch("no identification of the level over the base"))?;
    }
    Ok(MatchingObject { object: corner.object.clone(), to_base, from_level })
}

/// `is_left_fib(L_k -> M_k L)` next to `is_left_fib(L_k -> X)`.
pub fn matching_crosscheck(p: &PresheafMap, k: usize, bound: usize, effort: Effort) -> Result<AgreementReport> {
    let m = matching_object(p, k)?;
    let direct = Reindexing::level(k).apply_map(p)?;
    Ok(AgreementReport::new(vec![
        Labeled::new("over the matching object", is_left_fib(&m.from_level, bound, None, effort)?),
        Labeled::new("over the base", is_left_fib(&direct, bound, None, effort)?),
    ]))
}

/// Three criteria for a map `g: Y -> Z` over a common `LEmb` base to be an
/// equivalence: levelwise, on `Val`, and on diagonals of vertex fibers.
pub fn equivalence_criteria(g: &PresheafMap, py: &PresheafMap, pz: &PresheafMap, effort: Effort) -> Result<AgreementReport> {
    if g.then(pz)?.images() != py.images() {
        return Err(Error::NonCommuting("g is not a map over the base".into()));
    }
    let x = lemb_base(pz.target())?;
    let t = g.source().truncation();
    let mut levelwise = Vec::new();
    for k in 0..=t.get(0) {
        for n in 0..=t.get(1) {
            let col = Reindexing::column(n).apply_map(&Reindexing::level(k).apply_map(g)?)?;
            levelwise.push(Labeled::new(format!("k={k},n={n}"), weq(&col, effort)?));
        }
    }
    let val = Reindexing::val().apply_map(g)?;
    let mut on_val = Vec::new();
    for k in 0..=t.get(0) {
        on_val.push(Labeled::new(format!("k={k}"), weq(&Reindexing::column(k).apply_map(&val)?, effort)?));
    }
    let mut fiberwise = Vec::new();
    for v in 0..x.count(Multidegree::zero(2)) as CellId {
        let point = vertex_of(pz.target(), v)?;
        let fz = pullback(&point, pz)?;
        let fy = pullback(&point, py)?;
        let gv = cone_map(&fz, &fy.first, &fy.second.then(g)?)?;
        let d = Reindexing::val().then(&Reindexing::fdiag())?.apply_map(&gv)?;
        fiberwise.push(Labeled::new(format!("vertex {v}"), weq(&d, effort)?));
    }
    Ok(AgreementReport::new(vec![
        Labeled::new("levelwise", Verdict::all(levelwise)),
        Labeled::new("Val", Verdict::all(on_val)),
        Labeled::new("fiberwise diagonal", Verdict::all(fiberwise)),
    ]))
}

/// The direct reading over a common base: Holds on a levelwise weak
/// equivalence; Fails when `Map_{/T}(-, W)` separates for some fibrant
/// `W -> T`, or when both ends are fibrant and the map is not levelwise an
/// equivalence.
pub fn localized_equivalence_direct(
    g: &PresheafMap,
    py: &PresheafMap,
    pz: &PresheafMap,
    fibrant: &[(String, PresheafMap)],
    ends_fibrant: bool,
    effort: Effort,
) -> Result<Verdict> {
    let t = g.source().truncation();
    let mut cols = Vec::new();
    for k in 0..=t.get(0) {
        for n in 0..=t.get(1) {
            let col = Reindexing::column(n).apply_map(&Reindexing::level(k).apply_map(g)?)?;
            cols.push(Labeled::new(format!("k={k},n={n}"), weq(&col, effort)?));
        }
    }
    let levelwise = Verdict::all(cols);
    if levelwise.is_holds() || (ends_fibrant && levelwise.is_fails()) {
        return Ok(levelwise);
    }
    let last = g.source().arity() - 1;
    let mut parts = Vec::new();
    for (name, pw) in fibrant {
        let mz = hom_into(g.target(), pw.source(), &[last], None, Some((pw, pz)))?;
        let my = hom_into(g.source(), pw.source(), &[last], None, Some((pw, py)))?;
        parts.push(Labeled::new(name.clone(), weq(&mz.restrict(g, &my)?, effort)?));
    }
    let mapping = Verdict::all(parts);
    Ok(if mapping.is_fails() {
        mapping
    } else {
        Verdict::unknown("not levelwise an equivalence and no mapping-space witness")
    })
}

/// Localized equivalence of an arity-2 map: Holds on a levelwise weak
/// equivalence, Fails if some mapping space into a fibrant object is not
/// preserved.
pub fn localized_equivalence2(g: &PresheafMap, fibrant: &[(String, Arc<Presheaf>)], effort: Effort) -> Result<Verdict> {
    let t = g.source().truncation();
    let mut cols = Vec::new();
    for n in 0..=t.get(0) {
        cols.push(Labeled::new(format!("column {n}"), weq(&Reindexing::column(n).apply_map(g)?, effort)?));
    }
    let levelwise = Verdict::all(cols);
    if levelwise.is_holds() {
        return Ok(levelwise);
    }
    let mut parts = Vec::new();
    for (name, w) in fibrant {
        let (mz, my) = (space_of_maps(g.target(), w)?, space_of_maps(g.source(), w)?);
        parts.push(Labeled::new(name.clone(), weq(&mz.restrict(g, &my)?, effort)?));
    }
    let mapping = Verdict::all(parts);
    Ok(if mapping.is_fails() {
        mapping
    } else {
        Verdict::unknown("not levelwise an equivalence and no mapping-space witness")
    })
}

/// Closure of a fibration class under pullback-exponentials with a level
/// monomorphism `i: A -> B` whose codomain maps trivially into the base.
/// Checks the exponential map itself for biReedy fibrancy, and the class on
/// `Y^B` and on the corner, each carried over the base through an
/// isomorphism `T^B ≅ T`.
pub fn exponentiation_check(i: &PresheafMap, p: &PresheafMap, class: FibrationClass, bound: usize, opts: LocalityOptions) -> Result<Verdict> {
    let t = p.source().truncation();
    let pe = pullback_exponential(i, p)?;
    let base = p.target();
    let to_base = find_isomorphism(&pe.x_b.object, base, DEFAULT_BUDGET)?
        .ok_or_else(|| Error::InvalidSpec("the exponent does not map trivially into the base".into()))?;
    let over = pe.y_b.postcompose(p, &pe.x_b)?.then(&to_base)?;
    let corner = pe.corner.second.then(&to_base)?;
    let bi = is_bireedy_fib(&pe.map, bound.min(t.get(0)), bound.min(t.get(1)), ReedyMode::Comparison)?;
    Ok(Verdict::all(vec![
        Labeled::new("exponential map biReedy", bi),
        Labeled::new("exponential over the base", check_class(&over, class, bound, opts)?.verdict),
        Labeled::new("corner over the base", check_class(&corner, class, bound, opts)?.verdict),
    ]))
}

/// The level boundary inclusion `∂Δ[k] ⊠ pt ⊠ pt -> Δ[k] ⊠ pt ⊠ pt`.
pub fn level_boundary(k: usize, t: Multidegree) -> Result<PresheafMap> {
    shapes::representable_boundary(Multidegree::new(&[k, 0, 0])?, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::FiniteCategory;
    use crate::fibrations::Localizer;
    use crate::grothendieck::{groth, groth_map, DiagramFunctor};

    fn t2(k: usize, l: usize) -> Multidegree {
        Multidegree::new(&[k, l]).unwrap()
    }

    fn constant(fiber: Arc<Presheaf>) -> DiagramFunctor {
        DiagramFunctor::constant(Arc::new(FiniteCategory::chain(1)), fiber).unwrap()
    }

    #[test]
    fn exponentials_of_a_constant_fibration() {
        let t = t2(2, 1);
        let p = groth(&constant(shapes::f(1, t).unwrap()), 2).unwrap();
        let i = level_boundary(1, p.source().truncation()).unwrap();
        let v = exponentiation_check(&i, &p, FibrationClass::SegalCocart, 2, LocalityOptions::default()).unwrap();
        assert!(v.is_holds(), "{}", v.summary());
    }

    #[test]
    fn readings_agree_on_constant_diagrams() {
        let t = t2(2, 1);
        let o = LocalityOptions::default();
        for (fiber, segal) in [(shapes::f(1, t).unwrap(), Status::Holds), (shapes::g(2, t).unwrap(), Status::Fails)] {
            let p = groth(&constant(fiber), 2).unwrap();
            let r = characterization_crosscheck(&p, &LocalizerSet::named(Localizer::Segal, 2), 2, o).unwrap();
            assert!(r.agree, "{r:?}");
            assert_eq!(r.decided, 5);
            assert_eq!(r.status(), segal);
        }
    }

    #[test]
    fn conditions_on_localizing_maps() {
        let t = t2(2, 2);
        let e = Effort::High;
        let spine = shapes::spine_inclusion(2, t).unwrap();
        let complete = shapes::e_vertex_map(1, 0, t).unwrap();
        for f in [&spine, &complete] {
            assert!(condition_check(f, Condition::C, e).unwrap().is_holds());
        }
        let bdry = shapes::boundary_f_inclusion(1, t).unwrap();
        assert!(condition_check(&bdry, Condition::S, e).unwrap().is_fails());
        assert!(condition_check(&bdry, Condition::D, e).unwrap().is_holds());
        assert!(condition_check(&bdry, Condition::C, e).unwrap().is_fails());
    }

    #[test]
    fn exponentials_stay_local() {
        let t = t2(2, 1);
        let spine = shapes::spine_inclusion(2, t).unwrap();
        let locals = vec![("F1".to_string(), shapes::f(1, t).unwrap()), ("G2".to_string(), shapes::g(2, t).unwrap())];
        let shapes_ = vec![("F1".to_string(), shapes::f(1, t).unwrap())];
        let v = condition_p_sample(&spine, &locals, &shapes_, LocalityOptions::default()).unwrap();
        assert!(v.is_holds(), "{}", v.summary());
    }

    #[test]
    fn matching_objects_of_the_identity() {
        let p = groth(&constant(Arc::new(Presheaf::point(t2(2, 1)))), 2).unwrap();
        let m0 = matching_object(&p, 0).unwrap();
        assert!(m0.to_base.is_iso());
        let m1 = matching_object(&p, 1).unwrap();
        assert!(m1.to_base.is_iso());
        assert!(m1.from_level.is_iso());
        let r = matching_crosscheck(&p, 1, 2, Effort::High).unwrap();
        assert!(r.agree && r.status() == Status::Holds, "{r:?}");
    }

    #[test]
    fn equivalence_criteria_on_maps_of_elements() {
        let t = t2(1, 1);
        let pt = constant(Arc::new(Presheaf::point(t)));
        let two = crate::algebra::coproduct(&Arc::new(Presheaf::point(t)), &Arc::new(Presheaf::point(t))).unwrap().object;
        let two = constant(two);
        let id = vec![PresheafMap::identity(pt.values[0].clone()); 2];
        let (g, py, pz) = groth_map(&id, &pt, &pt, 2).unwrap();
        let r = equivalence_criteria(&g, &py, &pz, Effort::High).unwrap();
        assert!(r.agree && r.status() == Status::Holds, "{r:?}");
        let fold = HomSearch::new(&two.values[0], &pt.values[0]).first().unwrap().unwrap();
        let (g, py, pz) = groth_map(&[fold.clone(), fold], &two, &pt, 2).unwrap();
        let r = equivalence_criteria(&g, &py, &pz, Effort::High).unwrap();
        assert!(r.agree && r.status() == Status::Fails, "{r:?}");
    }
}
