//! Kan, Reedy and biReedy fibrations, and left and right fibrations of
//! simplicial spaces.

use std::sync::Arc;

use crate::algebra::{cone_map, hom_into, pullback, MappingObject};
use crate::error::{Error, Result};
use crate::lifting::{rlp, GeneratingFamily};
use crate::oracles::{homotopy_pullback, Effort, Square};
use crate::presheaf::{CellId, Presheaf, PresheafMap};
use crate::shapes;
use crate::verdict::{Labeled, Verdict};

/// How Reedy fibrancy is decided.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ReedyMode {
    /// Kan fibrancy of each matching comparison map.
    #[default]
    Comparison,
    /// Lifting against pushout-products of boundaries with horns.
    Lifting,
}

fn last(p: &PresheafMap) -> usize {
    p.source().arity() - 1
}

fn space_bound(p: &PresheafMap) -> usize {
    p.source().truncation().get(last(p))
}

fn require(p: &PresheafMap, arity: usize) -> Result<()> {
    if p.source().arity() != arity {
        return Err(Error::ArityMismatch { expected: arity, found: p.source().arity() });
    }
    Ok(())
}

fn check_bound(p: &PresheafMap, dir: usize, bound: usize) -> Result<()> {
    let t = p.source().truncation();
    if bound > t.get(dir) {
        return Err(Error::UnsoundBound(format!("bound {bound} in direction {dir} exceeds truncation {t}")));
    }
    Ok(())
}

/// Space of maps in the last direction, for a source built at `p`'s truncation.
pub(crate) fn space_of_maps(k: &Arc<Presheaf>, l: &Arc<Presheaf>) -> Result<MappingObject> {
    let last = l.arity() - 1;
    hom_into(k, l, &[last], None, None)
}

/// `Map(B,Y) -> Map(A,Y) ×_{Map(A,X)} Map(B,X)` for `i: A -> B`, `p: Y -> X`.
pub fn matching_comparison(i: &PresheafMap, p: &PresheafMap) -> Result<PresheafMap> {
    let (a, b) = (i.source(), i.target());
    let (y, x) = (p.source(), p.target());
    let (by, ay) = (space_of_maps(b, y)?, space_of_maps(a, y)?);
    let (bx, ax) = (space_of_maps(b, x)?, space_of_maps(a, x)?);
    let corner = pullback(&ay.postcompose(p, &ax)?, &bx.restrict(i, &ax)?)?;
    cone_map(&corner, &by.restrict(i, &ay)?, &by.postcompose(p, &bx)?)
}

/// Horn lifting through dimension `bound`.
pub fn is_kan_fib(f: &PresheafMap, bound: usize) -> Result<Verdict> {
    require(f, 1)?;
    check_bound(f, 0, bound)?;
    rlp(f, &GeneratingFamily::horns(bound))
}

/// Reedy fibrancy of a map of simplicial spaces, through categorical degree `bound`.
pub fn is_reedy_fib(p: &PresheafMap, bound: usize, mode: ReedyMode) -> Result<Verdict> {
    require(p, 2)?;
    check_bound(p, 0, bound)?;
    let t = p.source().truncation();
    let tl = space_bound(p);
    match mode {
        ReedyMode::Comparison => {
            let mut parts = Vec::new();
            for n in 0..=bound {
                let c = matching_comparison(&shapes::boundary_f_inclusion(n, t)?, p)?;
                let v = if tl == 0 { Verdict::all(Vec::new()) } else { is_kan_fib(&c, tl)? };
                parts.push(Labeled::new(format!("n={n}"), v));
            }
            Ok(Verdict::all(parts))
        }
        ReedyMode::Lifting => rlp(p, &GeneratingFamily::reedy_horns(bound, tl)),
    }
}

/// Reedy fibrancy in both simplicial directions of an arity-3 map.
pub fn is_bireedy_fib(p: &PresheafMap, level_bound: usize, cat_bound: usize, mode: ReedyMode) -> Result<Verdict> {
    require(p, 3)?;
    check_bound(p, 0, level_bound)?;
    check_bound(p, 1, cat_bound)?;
    let t = p.source().truncation();
    let tl = space_bound(p);
    match mode {
        ReedyMode::Comparison => {
            let mut parts = Vec::new();
            for k in 0..=level_bound {
                for n in 0..=cat_bound {
                    let c = matching_comparison(&shapes::boundary_f2_inclusion(k, n, t)?, p)?;
                    let v = if tl == 0 { Verdict::all(Vec::new()) } else { is_kan_fib(&c, tl)? };
                    parts.push(Labeled::new(format!("k={k},n={n}"), v));
                }
            }
            Ok(Verdict::all(parts))
        }
        ReedyMode::Lifting => rlp(p, &GeneratingFamily::bireedy_horns(level_bound, cat_bound, tl)),
    }
}

/// The square `L_n -> X_n` over `L_0 -> X_0` along the first vertex.
pub fn left_square(p: &PresheafMap, n: usize) -> Result<Square> {
    let t = p.source().truncation();
    let (y, x) = (p.source(), p.target());
    let v = shapes::vertex_map(n, 0, t)?;
    let (f0, fnn) = (v.source(), v.target());
    let (ly0, lyn) = (space_of_maps(f0, y)?, space_of_maps(fnn, y)?);
    let (lx0, lxn) = (space_of_maps(f0, x)?, space_of_maps(fnn, x)?);
    Square::new(lyn.restrict(&v, &ly0)?, lyn.postcompose(p, &lxn)?, ly0.postcompose(p, &lx0)?, lxn.restrict(&v, &lx0)?)
}

/// Left fibration: Reedy fibrant, and each square along the first vertex
/// is a homotopy pullback.
pub fn is_left_fib(p: &PresheafMap, bound: usize, reedy: Option<Verdict>, effort: Effort) -> Result<Verdict> {
    require(p, 2)?;
    check_bound(p, 0, bound)?;
    let reedy = match reedy {
        Some(v) => v,
        None => is_reedy_fib(p, bound, ReedyMode::Comparison)?,
    };
    let mut parts = vec![Labeled::new("reedy", reedy.clone())];
    if reedy.is_fails() {
        return Ok(Verdict::all(parts));
    }
    let tl = space_bound(p);
    let base = left_square(p, 0)?.right;
    let evidence = if tl == 0 { Verdict::all(Vec::new()) } else { is_kan_fib(&base, tl)? };
    for n in 1..=bound {
        let sq = left_square(p, n)?;
        let v = if evidence.is_holds() {
            homotopy_pullback(&sq, &evidence, effort)?
        } else {
            Verdict::unknown("the base column has no Kan fibration certificate")
        };
        parts.push(Labeled::new(format!("n={n}"), v));
    }
    Ok(Verdict::all(parts))
}

/// Right fibration: a left fibration after reversing the categorical direction.
pub fn is_right_fib(p: &PresheafMap, bound: usize, reedy: Option<Verdict>, effort: Effort) -> Result<Verdict> {
    is_left_fib(&p.opposite(0), bound, reedy, effort)
}

/// `LEmb` of an arity-2 base at level bound `k`.
pub fn lemb(x: &Presheaf, level_bound: usize) -> Result<Arc<Presheaf>> {
    Ok(Arc::new(crate::presheaf::Reindexing::lemb(level_bound).apply(x)?))
}

/// The arity-2 base `X` of a target of the form `LEmb(X)`.
pub fn lemb_base(target: &Presheaf) -> Result<Arc<Presheaf>> {
    if target.arity() != 3 {
        return Err(Error::ArityMismatch { expected: 3, found: target.arity() });
    }
    let x = crate::presheaf::Reindexing::level(0).apply(target)?;
    if *lemb(&x, target.truncation().get(0))? != *target {
        return Err(Error::InvalidSpec("target is not constant in the level direction".into()));
    }
    Ok(Arc::new(x))
}

/// `p` with its target replaced by the literal `LEmb(X)`, composing with the
/// canonical isomorphism when the target is only level-constant up to cell
/// numbering (as after reading from a file).
pub fn lemb_normalize(p: &PresheafMap) -> Result<PresheafMap> {
    let target = p.target();
    if target.arity() != 3 {
        return Err(Error::ArityMismatch { expected: 3, found: target.arity() });
    }
    let x = crate::presheaf::Reindexing::level(0).apply(target)?;
    let l = lemb(&x, target.truncation().get(0))?;
    if *l == **target {
        return Ok(p.clone());
    }
    let not_constant = || Error::InvalidSpec("target is not constant in the level direction".into());
    // a cell of LEmb(X) at level k is the k-fold level degeneracy of a level-0 cell
    let images = l
        .degrees()
        .into_iter()
        .map(|d| {
            (0..l.count(d) as CellId)
                .map(|c| (0..d.get(0)).fold(c, |y, k| target.degen(d.with(0, k), 0, 0, y)))
                .collect()
        })
        .collect();
    let iso = PresheafMap::new(l, target.clone(), images).map_err(|_| not_constant())?;
    let inv = iso.inverse().ok_or_else(not_constant)?;
    p.then(&inv)
}

/// Lifts an arity-2 map to `LEmb(p)`.
pub fn lemb_map(p: &PresheafMap, level_bound: usize) -> Result<PresheafMap> {
    crate::presheaf::Reindexing::lemb(level_bound).apply_map(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presheaf::Multidegree;

    fn degree(v: &[usize]) -> Multidegree {
        Multidegree::new(v).expect("degree")
    }

    fn t2(k: usize, l: usize) -> Multidegree {
        degree(&[k, l])
    }

    #[test]
    fn renumbered_targets_are_normalized() {
        let x = shapes::f(1, t2(1, 1)).unwrap();
        let p = lemb_map(&PresheafMap::identity(x), 2).unwrap();
        let text = crate::json::to_string(&crate::json::map_to_doc(&p, true));
        let doc: crate::json::MapDoc = serde_json::from_str(&text).unwrap();
        let q = crate::json::Loader::new(".").map(&doc).unwrap();
        let n = lemb_normalize(&q).unwrap();
        assert!(lemb_base(n.target()).is_ok());
        let iso = crate::algebra::find_isomorphism(n.target(), p.target(), crate::algebra::DEFAULT_BUDGET).unwrap();
        assert!(iso.is_some());
        assert!(n.is_iso());
        let bad = shapes::f2(1, 1, degree(&[1, 1, 1])).unwrap();
        assert!(lemb_normalize(&PresheafMap::identity(bad)).is_err());
    }

    #[test]
    fn kan_examples() {
        let j = shapes::j(1, 4).unwrap();
        assert!(is_kan_fib(&PresheafMap::to_point(j), 3).unwrap().is_holds());
        let d = shapes::delta(2, 2).unwrap();
        assert!(is_kan_fib(&PresheafMap::to_point(d.clone()), 2).unwrap().is_fails());
        assert!(is_kan_fib(&PresheafMap::identity(d), 2).unwrap().is_holds());
    }

    #[test]
    fn vertex_dichotomy() {
        let t = t2(2, 1);
        let v0 = shapes::vertex_map(1, 0, t).unwrap();
        let v1 = shapes::vertex_map(1, 1, t).unwrap();
        assert!(is_left_fib(&v1, 2, None, Effort::High).unwrap().is_holds());
        assert!(is_left_fib(&v0, 2, None, Effort::High).unwrap().is_fails());
        assert!(is_right_fib(&v0, 2, None, Effort::High).unwrap().is_holds());
        assert!(is_right_fib(&v1, 2, None, Effort::High).unwrap().is_fails());
    }

    #[test]
    fn reedy_modes_agree_on_small_maps() {
        let t = t2(2, 1);
        let maps = vec![
            PresheafMap::to_point(shapes::f(1, t).unwrap()),
            PresheafMap::to_point(shapes::e(1, t).unwrap()),
            shapes::vertex_map(1, 0, t).unwrap(),
            PresheafMap::to_point(shapes::chaotic_segal(t).unwrap()),
            shapes::boundary_f_inclusion(1, t).unwrap(),
            PresheafMap::to_point(lemb_space(&shapes::delta(1, 1).unwrap(), 2)),
        ];
        let mut failures = 0;
        for p in maps {
            let a = is_reedy_fib(&p, 1, ReedyMode::Comparison).unwrap();
            let b = is_reedy_fib(&p, 1, ReedyMode::Lifting).unwrap();
            assert_eq!(a.status(), b.status(), "{} vs {}", a.summary(), b.summary());
            failures += usize::from(a.is_fails());
        }
        assert_eq!(failures, 1);
    }

    fn lemb_space(s: &Presheaf, k: usize) -> Arc<Presheaf> {
        Arc::new(crate::presheaf::Reindexing::constant_space(k).apply(s).unwrap())
    }

    #[test]
    fn lemb_roundtrip() {
        let x = shapes::f(1, t2(2, 1)).unwrap();
        let l = lemb(&x, 2).unwrap();
        assert_eq!(*lemb_base(&l).unwrap(), *x);
        let bad = shapes::f2(1, 0, degree(&[2, 2, 1])).unwrap();
        assert!(lemb_base(&bad).is_err());
    }
}
