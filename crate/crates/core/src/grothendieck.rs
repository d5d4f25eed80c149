//! Diagrams of presheaves on finite categories, their categories of
//! elements, and slice replacements over nerves.

use std::sync::Arc;

use crate::algebra::{find_isomorphism, pullback, DEFAULT_BUDGET};
use crate::category::FiniteCategory;
use crate::error::{Error, Result};
use crate::fibrations::{is_kan_fib, is_local2, is_reedy_fib, LocalityOptions, LocalizerSet, ReedyMode};
use crate::presheaf::{Built, CellId, Multidegree, Presheaf, PresheafMap, Reindexing};
use crate::verdict::{Certificate, Labeled, MapRecord, Verdict, Witness};

/// A functor from a finite category to presheaves of a fixed arity and
/// truncation.
#[derive(Clone, Debug)]
pub struct DiagramFunctor {
    pub category: Arc<FiniteCategory>,
    pub values: Vec<Arc<Presheaf>>,
    /// One map per generating arrow.
    pub arrow_maps: Vec<PresheafMap>,
    /// `morphism_maps[m]` for every morphism of the category.
    morphism_maps: Vec<PresheafMap>,
}

impl DiagramFunctor {
    pub fn new(category: Arc<FiniteCategory>, values: Vec<Arc<Presheaf>>, arrow_maps: Vec<PresheafMap>) -> Result<Self> {
        if values.len() != category.object_count() {
            return Err(Error::InvalidSpec(format!("{} values for {} objects", values.len(), category.object_count())));
        }
        if arrow_maps.len() != category.arrows().len() {
            return Err(Error::InvalidSpec(format!("{} maps for {} arrows", arrow_maps.len(), category.arrows().len())));
        }
        let t = values.first().map(|v| v.truncation());
        if let Some(t) = t {
            if let Some(v) = values.iter().find(|v| v.truncation() != t) {
                return Err(Error::TruncationMismatch { left: t.to_string(), right: v.truncation().to_string() });
            }
        }
        for (a, f) in category.arrows().iter().zip(&arrow_maps) {
            if **f.source() != *values[a.source] || **f.target() != *values[a.target] {
                return Err(Error::NotFunctorial(format!("arrow {} has the wrong endpoints", a.name)));
            }
        }
        let morphism_maps = (0..category.morphism_count())
            .map(|m| {
                let mor = category.morphism(m);
                let mut g = PresheafMap::identity(values[mor.source].clone());
                for &a in &mor.word {
                    g = g.then(&arrow_maps[a])?;
                }
                Ok(g)
            })
            .collect::<Result<Vec<_>>>()?;
        let d = DiagramFunctor { category, values, arrow_maps, morphism_maps };
        for a in 0..d.category.morphism_count() {
            for b in 0..d.category.morphism_count() {
                if let Some(ba) = d.category.compose(a, b) {
                    if d.morphism_maps[a].then(&d.morphism_maps[b])?.images() != d.morphism_maps[ba].images() {
                        return Err(Error::NotFunctorial(format!("composite of morphisms {a} and {b}")));
                    }
                }
            }
        }
        Ok(d)
    }

    /// The constant functor at `p`.
    pub fn constant(category: Arc<FiniteCategory>, p: Arc<Presheaf>) -> Result<Self> {
        let values = vec![p.clone(); category.object_count()];
        let maps = category.arrows().iter().map(|_| PresheafMap::identity(p.clone())).collect();
        Self::new(category, values, maps)
    }

    pub fn arity(&self) -> usize {
        self.values.first().map_or(0, |v| v.arity())
    }

    pub fn truncation(&self) -> Multidegree {
        self.values[0].truncation()
    }

    /// The map assigned to a morphism.
    pub fn on_morphism(&self, m: usize) -> &PresheafMap {
        &self.morphism_maps[m]
    }
}

/// Output truncation: the base direction sits before the last direction.
fn groth_truncation(t: Multidegree, base_bound: usize) -> Result<Multidegree> {
    let mut v = t.as_vec();
    v.insert(v.len() - 1, base_bound);
    Multidegree::new(&v)
}

fn split(e: Multidegree) -> (usize, Multidegree) {
    let mut v = e.as_vec();
    let pos = v.len() - 2;
    let m = v.remove(pos);
    (m, Multidegree::new(&v).expect("fiber degree"))
}

/// The nerve of `C` placed in the base direction of the output arity.
pub fn nerve_base(c: &FiniteCategory, t: Multidegree, base_bound: usize) -> Result<Arc<Presheaf>> {
    let n = c.nerve(base_bound)?;
    let disc = Reindexing::discrete(t.get(t.arity() - 1)).apply(&n)?;
    Ok(Arc::new(match t.arity() {
        1 => disc,
        2 => Reindexing::lemb(t.get(0)).apply(&disc)?,
        a => return Err(Error::ArityMismatch { expected: 2, found: a }),
    }))
}

/// The category of elements `∫F -> N(C)`, levelwise.
pub fn groth(f: &DiagramFunctor, base_bound: usize) -> Result<PresheafMap> {
    Ok(groth_built(f, base_bound)?.1)
}

type Element = (Vec<u32>, CellId);

fn groth_built(f: &DiagramFunctor, base_bound: usize) -> Result<(Built<Element>, PresheafMap)> {
    let c = &f.category;
    let t = f.truncation();
    let a = t.arity();
    let out = groth_truncation(t, base_bound)?;
    let base_dir = a - 1;
    let nerve = c.nerve_built(base_bound)?;
    let first = |m: usize, key: &[u32]| c.vertex(m, key, 0);
    let built = Presheaf::from_fn(
        out,
        |e| {
            let (m, fd) = split(e);
            let mut cells = Vec::new();
            for key in c.composable(m) {
                for x in 0..f.values[first(m, &key)].count(fd) as CellId {
                    cells.push((key.clone(), x));
                }
            }
            cells
        },
        |e, dir, i, (key, x)| {
            let (m, fd) = split(e);
            if dir == base_dir {
                let x2 = if i == 0 { f.on_morphism(key[0] as usize).image(fd, *x) } else { *x };
                (c.nerve_face(m, key, i), x2)
            } else {
                let fdir = if dir < base_dir { dir } else { dir - 1 };
                (key.clone(), f.values[first(m, key)].face(fd, fdir, i, *x))
            }
        },
        |e, dir, i, (key, x)| {
            let (m, fd) = split(e);
            if dir == base_dir {
                (c.nerve_degen(m, key, i), *x)
            } else {
                let fdir = if dir < base_dir { dir } else { dir - 1 };
                (key.clone(), f.values[first(m, key)].degen(fd, fdir, i, *x))
            }
        },
    )?;
    let base = nerve_base(c, t, base_bound)?;
    let images = built
        .presheaf
        .degrees()
        .into_iter()
        .map(|e| {
            let (m, _) = split(e);
            let d = Multidegree::new(&[m]).expect("degree");
            built.keys[built.presheaf.flat(e)].iter().map(|(key, _)| nerve.id_of(d, key).expect("nerve cell") as CellId).collect()
        })
        .collect();
    let p = PresheafMap::new(Arc::new(built.presheaf.clone()), base, images)?;
    Ok((built, p))
}

/// Checks that `eta` is natural from `f` to `g`.
pub fn check_natural(eta: &[PresheafMap], f: &DiagramFunctor, g: &DiagramFunctor) -> Result<()> {
    if !Arc::ptr_eq(&f.category, &g.category) && f.category.name() != g.category.name() {
        return Err(Error::Mismatch("diagrams over different categories"));
    }
    if eta.len() != f.values.len() {
        return Err(Error::InvalidSpec(format!("{} components for {} objects", eta.len(), f.values.len())));
    }
    for (c, e) in eta.iter().enumerate() {
        if **e.source() != *f.values[c] || **e.target() != *g.values[c] {
            return Err(Error::NotFunctorial(format!("component {c} has the wrong endpoints")));
        }
    }
    for (i, a) in f.category.arrows().iter().enumerate() {
        let lhs = f.arrow_maps[i].then(&eta[a.target])?;
        let rhs = eta[a.source].then(&g.arrow_maps[i])?;
        if lhs.images() != rhs.images() {
            return Err(Error::NotFunctorial(format!("not natural at arrow {}", a.name)));
        }
    }
    Ok(())
}

/// `∫F -> ∫G` induced by a natural transformation, over the common base.
pub fn groth_map(eta: &[PresheafMap], f: &DiagramFunctor, g: &DiagramFunctor, base_bound: usize) -> Result<(PresheafMap, PresheafMap, PresheafMap)> {
    check_natural(eta, f, g)?;
    let (bf, pf) = groth_built(f, base_bound)?;
    let (bg, pg) = groth_built(g, base_bound)?;
    let c = &f.category;
    let src = pf.source().clone();
    let images = src
        .degrees()
        .into_iter()
        .map(|e| {
            let (m, fd) = split(e);
            bf.keys[src.flat(e)]
                .iter()
                .map(|(key, x)| {
                    let o = c.vertex(m, key, 0);
                    bg.id_of(e, &(key.clone(), eta[o].image(fd, *x))).expect("element")
                })
                .collect()
        })
        .collect();
    let h = PresheafMap::new(src, pg.source().clone(), images)?;
    Ok((h, pf, pg))
}

/// The totally degenerate cell on vertex `v`, as a map from the point.
pub fn vertex_of(x: &Arc<Presheaf>, v: CellId) -> Result<PresheafMap> {
    let pt = Arc::new(Presheaf::point(x.truncation()));
    let images = x
        .degrees()
        .into_iter()
        .map(|d| {
            let mut cur = Multidegree::zero(d.arity());
            let mut c = v;
            for dir in 0..d.arity() {
                for _ in 0..d.get(dir) {
                    c = x.degen(cur, dir, 0, c);
                    cur = cur.raised(dir);
                }
            }
            vec![c]
        })
        .collect();
    PresheafMap::new(pt, x.clone(), images)
}

/// The fiber of `∫F` over object `c` is `F(c)`, constant in the base direction.
pub fn fiber_check(p: &PresheafMap, f: &DiagramFunctor, c: usize) -> Result<Verdict> {
    let pb = pullback(&vertex_of(p.target(), c as CellId)?, p)?;
    let t = p.source().truncation();
    let base_bound = t.get(t.arity() - 2);
    let embedded = Arc::new(match f.arity() {
        1 => Reindexing::constant_space(base_bound).apply(&f.values[c])?,
        2 => Reindexing::vemb(base_bound).apply(&f.values[c])?,
        a => return Err(Error::ArityMismatch { expected: 2, found: a }),
    });
    Ok(match find_isomorphism(&pb.object, &embedded, DEFAULT_BUDGET)? {
        Some(iso) => Verdict::holds(Certificate::Isomorphism { map: MapRecord::of(&iso) }),
        None => Verdict::fails(Witness::Mismatch { detail: format!("fiber over object {c} is not isomorphic to its value") }),
    })
}

/// Objectwise Reedy fibrancy and locality of the values.
pub fn projectively_fibrant_check(f: &DiagramFunctor, s: &LocalizerSet, bound: usize, opts: LocalityOptions) -> Result<Verdict> {
    let mut parts = Vec::new();
    for (c, name) in f.category.object_names().iter().enumerate() {
        let p = PresheafMap::to_point(f.values[c].clone());
        let v = match f.arity() {
            1 => {
                let tl = f.truncation().get(0);
                if tl == 0 {
                    Verdict::all(Vec::new())
                } else {
                    is_kan_fib(&p, tl)?
                }
            }
            2 => Verdict::all(vec![
                Labeled::new("reedy", is_reedy_fib(&p, bound, ReedyMode::Comparison)?),
                Labeled::new(format!("local for {}", s.name.name()), is_local2(&p, s, opts)?),
            ]),
            a => return Err(Error::ArityMismatch { expected: 2, found: a }),
        };
        parts.push(Labeled::new(format!("value at {name}"), v));
    }
    Ok(Verdict::all(parts))
}

/// `N(C/x) -> N(C)` as a map of simplicial spaces, discrete in the space
/// direction with bound `space_bound`.
pub fn slice_replacement(c: &FiniteCategory, x: usize, cat_bound: usize, space_bound: usize) -> Result<PresheafMap> {
    Reindexing::discrete(space_bound).apply_map(&c.slice_nerve(x, cat_bound)?)
}

/// Per vertex `x` of a nerve base: pull `g` back along the slice
/// replacement of `x`, take the diagonal, and test it as an equivalence in
/// the localized diagonal reading. Holds on a diagonal weak equivalence,
/// Fails when mapping into some supplied local fibrant object separates.
pub fn recognition_equiv(
    g: &PresheafMap,
    py: &PresheafMap,
    pz: &PresheafMap,
    c: &FiniteCategory,
    s: &LocalizerSet,
    fibrant: &[(String, Arc<Presheaf>)],
    opts: LocalityOptions,
) -> Result<Verdict> {
    if g.then(pz)?.images() != py.images() {
        return Err(Error::NonCommuting("g is not a map over the base".into()));
    }
    let t = g.source().truncation();
    let mut local = Vec::new();
    for (name, w) in fibrant {
        let to_pt = PresheafMap::to_point(w.clone());
        let bound = w.truncation().get(0);
        if is_reedy_fib(&to_pt, bound, ReedyMode::Comparison)?.is_holds() && is_local2(&to_pt, s, opts)?.is_holds() {
            local.push((name.clone(), w.clone()));
        }
    }
    let mut parts = Vec::new();
    for x in 0..c.object_count() {
        let r = slice_replacement(c, x, t.get(1), t.get(2))?;
        let along = crate::fibrations::lemb_map(&r, t.get(0))?;
        let (cz, cy) = (pullback(&along, pz)?, pullback(&along, py)?);
        let gx = crate::algebra::cone_map(&cz, &cy.first, &cy.second.then(g)?)?;
        let d = Reindexing::diag1().apply_map(&gx)?;
        let name = c.object_names()[x].clone();
        parts.push(Labeled::new(format!("object {name}"), crate::fibrations::localized_equivalence2(&d, &local, opts.effort)?));
    }
    Ok(Verdict::all(parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibrations::{check_class, is_right_fib, FibrationClass};
    use crate::oracles::Effort;
    use crate::shapes;

    fn t2(k: usize, l: usize) -> Multidegree {
        Multidegree::new(&[k, l]).unwrap()
    }

    fn step(t: Multidegree) -> DiagramFunctor {
        let c = Arc::new(FiniteCategory::chain(1));
        let e = Arc::new(Presheaf::empty(t));
        let pt = Arc::new(Presheaf::point(t));
        DiagramFunctor::new(c, vec![e.clone(), pt.clone()], vec![PresheafMap::from_empty(pt)]).unwrap()
    }

    #[test]
    fn constant_functor_is_a_product() {
        let t = t2(2, 1);
        let c = Arc::new(FiniteCategory::chain(1));
        let d = DiagramFunctor::constant(c, shapes::f(1, t).unwrap()).unwrap();
        let p = groth(&d, 2).unwrap();
        assert!(p.source().validate().is_holds());
        let expected = crate::algebra::product(
            &shapes::f2(0, 1, Multidegree::new(&[2, 2, 1]).unwrap()).unwrap(),
            &Arc::new(Reindexing::vemb(2).apply(&shapes::f(1, t).unwrap()).unwrap()),
        )
        .unwrap()
        .object;
        assert!(find_isomorphism(p.source(), &expected, DEFAULT_BUDGET).unwrap().is_some());
        for c in 0..2 {
            assert!(fiber_check(&p, &d, c).unwrap().is_holds());
        }
    }

    #[test]
    fn step_functor_gives_the_terminal_vertex() {
        let d = step(t2(2, 1));
        let p = groth(&d, 2).unwrap();
        let s = p.source();
        assert_eq!(s.count(Multidegree::new(&[0, 0, 0]).unwrap()), 1);
        assert_eq!(s.count(Multidegree::new(&[0, 2, 0]).unwrap()), 1);
        assert!(fiber_check(&p, &d, 0).unwrap().is_holds());
        assert!(fiber_check(&p, &d, 1).unwrap().is_holds());
        let r = check_class(&p, FibrationClass::Left, 2, LocalityOptions::default()).unwrap();
        assert!(r.verdict.is_holds(), "{}", r.verdict.summary());
    }

    #[test]
    fn representable_diagram_fibers_are_points() {
        let c = Arc::new(FiniteCategory::chain(2));
        let t = Multidegree::new(&[1]).unwrap();
        // Hom(0, -) on [2]: a single point everywhere
        let pt = Arc::new(Presheaf::point(t));
        let d = DiagramFunctor::constant(c, pt).unwrap();
        let p = groth(&d, 2).unwrap();
        for o in 0..3 {
            assert!(fiber_check(&p, &d, o).unwrap().is_holds());
        }
        assert!(is_right_fib(&p, 2, None, Effort::High).unwrap().is_holds());
    }

    #[test]
    fn slices_of_the_interval() {
        let c = FiniteCategory::chain(1);
        let r0 = slice_replacement(&c, 0, 2, 1).unwrap();
        assert_eq!(r0.source().total_cells(), shapes::f(0, t2(2, 1)).unwrap().total_cells());
        let r1 = slice_replacement(&c, 1, 2, 1).unwrap();
        assert!(r1.is_iso());
        for r in [r0, r1] {
            assert!(is_right_fib(&r, 2, None, Effort::High).unwrap().is_holds());
        }
        let g = FiniteCategory::chaotic(1);
        let r = slice_replacement(&g, 0, 2, 1).unwrap();
        assert!(is_right_fib(&r, 2, None, Effort::High).unwrap().is_holds());
    }

    #[test]
    fn projective_check_of_values() {
        let d = step(t2(2, 1));
        let o = LocalityOptions::default();
        assert!(projectively_fibrant_check(&d, &LocalizerSet::kan(2), 2, o).unwrap().is_holds());
    }

    #[test]
    fn recognition_of_the_step_inclusion() {
        let t = t2(1, 1);
        let d = step(t);
        let c = d.category.clone();
        let pt = DiagramFunctor::constant(c.clone(), Arc::new(Presheaf::point(t))).unwrap();
        let inc = vec![PresheafMap::from_empty(pt.values[0].clone()), PresheafMap::identity(pt.values[1].clone())];
        let (g, py, pz) = groth_map(&inc, &d, &pt, 2).unwrap();
        let two = crate::algebra::coproduct(&pt.values[0], &pt.values[0]).unwrap().object;
        let fibrant = vec![("pt".to_string(), pt.values[0].clone()), ("two".to_string(), two)];
        let o = LocalityOptions::default();
        let s = LocalizerSet::kan(1);
        let v = recognition_equiv(&g, &py, &pz, &c, &s, &fibrant, o).unwrap();
        assert!(v.is_fails(), "{}", v.summary());
        assert!(v.summary().contains("object 0"), "{}", v.summary());
        let id = vec![PresheafMap::identity(pt.values[0].clone()); 2];
        let (g, py, pz) = groth_map(&id, &pt, &pt, 2).unwrap();
        assert!(recognition_equiv(&g, &py, &pz, &c, &s, &fibrant, o).unwrap().is_holds());
    }
}
