//! Seeded diagrams over small categories, for cross-checking fibration
//! classes against objectwise fibrancy.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::HomSearch;
use crate::category::FiniteCategory;
use crate::error::{Error, Result};
use crate::grothendieck::DiagramFunctor;
use crate::presheaf::{Multidegree, Presheaf, PresheafMap};
use crate::shapes;

/// A named diagram.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub diagram: DiagramFunctor,
}

/// The fiber shapes: empty, point, `F(1)`, `E(1)` and the non-Segal `G(2)`.
pub fn fiber_catalog(t: Multidegree) -> Result<Vec<(String, Arc<Presheaf>)>> {
    Ok(vec![
        ("empty".into(), Arc::new(Presheaf::empty(t))),
        ("pt".into(), Arc::new(Presheaf::point(t))),
        ("F1".into(), shapes::f(1, t)?),
        ("E1".into(), shapes::e(1, t)?),
        ("G2".into(), shapes::g(2, t)?),
    ])
}

/// The base categories `[1]`, `[2]` and `I[1]`.
pub fn categories() -> Vec<Arc<FiniteCategory>> {
    vec![Arc::new(FiniteCategory::chain(1)), Arc::new(FiniteCategory::chain(2)), Arc::new(FiniteCategory::chaotic(1))]
}

fn pick<T: Clone>(rng: &mut ChaCha8Rng, xs: &[T]) -> T {
    xs[rng.gen_range(0..xs.len())].clone()
}

fn random_chain_diagram(
    rng: &mut ChaCha8Rng,
    c: &Arc<FiniteCategory>,
    fibers: &[(String, Arc<Presheaf>)],
) -> Result<Option<(String, DiagramFunctor)>> {
    let objects = c.object_count();
    let chosen: Vec<usize> = (0..objects).map(|_| rng.gen_range(0..fibers.len())).collect();
    let mut maps = Vec::new();
    let mut picks = Vec::new();
    for a in c.arrows() {
        let (s, t) = (&fibers[chosen[a.source]].1, &fibers[chosen[a.target]].1);
        let all = HomSearch::new(s, t).all()?;
        if all.is_empty() {
            return Ok(None);
        }
        let k = rng.gen_range(0..all.len());
        picks.push(k);
        maps.push(all[k].clone());
    }
    let values = chosen.iter().map(|&i| fibers[i].1.clone()).collect();
    let name = format!(
        "{}:{}:{}",
        c.name(),
        chosen.iter().map(|&i| fibers[i].0.as_str()).collect::<Vec<_>>().join(","),
        picks.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",")
    );
    match DiagramFunctor::new(c.clone(), values, maps) {
        Ok(d) => Ok(Some((name, d))),
        Err(Error::NotFunctorial(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn random_groupoid_diagram(
    rng: &mut ChaCha8Rng,
    c: &Arc<FiniteCategory>,
    fibers: &[(String, Arc<Presheaf>)],
) -> Result<Option<(String, DiagramFunctor)>> {
    let (fname, x) = pick(rng, fibers);
    let autos: Vec<PresheafMap> = HomSearch::new(&x, &x).injective().all()?.into_iter().filter(|m| m.is_iso()).collect();
    let k = rng.gen_range(0..autos.len());
    let phi = autos[k].clone();
    let inv = phi.inverse().ok_or(Error::Mismatch("automorphism without inverse"))?;
    let mut maps = Vec::new();
    for (g, _) in c.arrows().iter().enumerate() {
        maps.push(if g % 2 == 0 { phi.clone() } else { inv.clone() });
    }
    let name = format!("{}:{}:{}", c.name(), vec![fname.as_str(); c.object_count()].join(","), k);
    Ok(Some((name, DiagramFunctor::new(c.clone(), vec![x; c.object_count()], maps)?)))
}

/// Constant diagrams at every fiber over every category, followed by
/// random diagrams, `size` in total.
pub fn generate(seed: u64, size: usize, t: Multidegree) -> Result<Vec<CorpusEntry>> {
    let fibers = fiber_catalog(t)?;
    let cats = categories();
    let mut out = Vec::new();
    'constants: for c in &cats {
        for (name, x) in &fibers {
            if out.len() >= size {
                break 'constants;
            }
            out.push(CorpusEntry {
                name: format!("{}:const {name}", c.name()),
                diagram: DiagramFunctor::constant(c.clone(), x.clone())?,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attempts = 0;
    while out.len() < size {
        attempts += 1;
        if attempts > 100 * size {
            return Err(Error::Refused(format!("could not draw {size} diagrams")));
        }
        let c = &cats[out.len() % cats.len()];
        let drawn = if c.is_groupoid() && c.object_count() > 1 {
            random_groupoid_diagram(&mut rng, c, &fibers)?
        } else {
            random_chain_diagram(&mut rng, c, &fibers)?
        };
        if let Some((name, diagram)) = drawn {
            if out.iter().any(|e| e.name == name) {
                continue;
            }
            out.push(CorpusEntry { name, diagram });
        }
    }
    Ok(out)
}

/// Up to `limit` natural transformations `f -> g`, in search order.
pub fn natural_transformations(f: &DiagramFunctor, g: &DiagramFunctor, limit: usize) -> Result<Vec<Vec<PresheafMap>>> {
    let comps = (0..f.values.len()).map(|c| HomSearch::new(&f.values[c], &g.values[c]).all()).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    let mut idx = vec![0usize; comps.len()];
    if comps.iter().any(|c| c.is_empty()) {
        return Ok(out);
    }
    loop {
        let eta: Vec<PresheafMap> = idx.iter().zip(&comps).map(|(&i, c)| c[i].clone()).collect();
        if crate::grothendieck::check_natural(&eta, f, g).is_ok() {
            out.push(eta);
            if out.len() >= limit {
                return Ok(out);
            }
        }
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return Ok(out);
            }
            idx[pos] += 1;
            if idx[pos] < comps[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_seeded() {
        let t = Multidegree::new(&[2, 1]).unwrap();
        let a = generate(7, 30, t).unwrap();
        let b = generate(7, 30, t).unwrap();
        assert_eq!(a.len(), 30);
        let names: Vec<_> = a.iter().map(|e| e.name.clone()).collect();
        assert_eq!(names, b.iter().map(|e| e.name.clone()).collect::<Vec<_>>());
        assert!(names.iter().any(|n| n.starts_with("I[1]") && !n.contains("const")));
    }

    #[test]
    fn transformations_between_constant_diagrams() {
        let t = Multidegree::new(&[1, 1]).unwrap();
        let c = Arc::new(FiniteCategory::chain(1));
        let f1 = DiagramFunctor::constant(c.clone(), shapes::f(1, t).unwrap()).unwrap();
        // natural maps F1 => F1 over [1] are pairs of equal endomaps
        let n = natural_transformations(&f1, &f1, 100).unwrap();
        assert_eq!(n.len(), 3);
        let pt = DiagramFunctor::constant(c, Arc::new(Presheaf::point(t))).unwrap();
        assert_eq!(natural_transformations(&f1, &pt, 100).unwrap().len(), 1);
    }
}
