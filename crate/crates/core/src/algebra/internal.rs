//! Mapping objects `[K, L]` whose cells of degree `e` are the maps
//! `K × rep(φ(e)) -> L`, where `φ` places the output directions into some
//! directions of `L` and sets the others to zero.

use std::collections::HashMap;
use std::sync::Arc;

use super::limits::{cocone_map, cone_map, product, product_map, pullback, pushout, Cone};
use super::search::HomSearch;
use crate::error::{Error, Result};
use crate::presheaf::{CellId, Multidegree, Presheaf, PresheafMap};
use crate::shapes::{representable, representable_operator};

type Table = Vec<Vec<CellId>>;

/// A mapping object together with the enumerated maps behind its cells.
#[derive(Clone, Debug)]
pub struct MappingObject {
    pub object: Arc<Presheaf>,
    source: Arc<Presheaf>,
    target: Arc<Presheaf>,
    dir_map: Vec<usize>,
    /// `maps[flat(e)][cell]`: the image table of the map behind the cell.
    maps: Vec<Vec<Table>>,
    index: Vec<HashMap<Table, CellId>>,
}

fn embed(dir_map: &[usize], arity: usize, e: Multidegree) -> Multidegree {
    let mut v = vec![0; arity];
    for (j, &u) in dir_map.iter().enumerate() {
        v[u] = e.get(j);
    }
    Multidegree::new(&v).expect("embedded degree")
}

/// The largest output truncation for which every cell is determined.
pub fn sound_truncation(l: &Presheaf, dir_map: &[usize]) -> Result<Multidegree> {
    let v: Vec<usize> = dir_map.iter().map(|&u| l.truncation().get(u)).collect();
    Multidegree::new(&v)
}

/// `id_K × θ` for an operator between representables, in product numbering.
fn precompose_table(k: &Presheaf, theta: &PresheafMap) -> Vec<Vec<CellId>> {
    k.degrees()
        .into_iter()
        .map(|d| {
            let (lo, hi) = (theta.source().count(d) as CellId, theta.target().count(d) as CellId);
            let mut row = Vec::with_capacity(k.count(d) * lo as usize);
            for a in 0..k.count(d) as CellId {
                for b in 0..lo {
                    row.push(a * hi + theta.image(d, b));
                }
            }
            row
        })
        .collect()
}

fn compose_tables(first: &[Vec<CellId>], second: &Table) -> Table {
    first.iter().zip(second).map(|(row, img)| row.iter().map(|&c| img[c as usize]).collect()).collect()
}

/// Builds `[K, L]` with output directions `dir_map` (into the directions of
/// `L`), truncated at `out` (or the sound bound). With `over = (p, s)` for
/// `p: L -> X` and `s: K -> X`, only maps `g` with `p ∘ g = s ∘ pr_K` are kept.
pub fn hom_into(
    k: &Arc<Presheaf>,
    l: &Arc<Presheaf>,
    dir_map: &[usize],
    out: Option<Multidegree>,
    over: Option<(&PresheafMap, &PresheafMap)>,
) -> Result<MappingObject> {
    if k.arity() != l.arity() {
        return Err(Error::ArityMismatch { expected: l.arity(), found: k.arity() });
    }
    if k.truncation() != l.truncation() {
        return Err(Error::TruncationMismatch { left: k.truncation().to_string(), right: l.truncation().to_string() });
    }
    let sound = sound_truncation(l, dir_map)?;
    let trunc = match out {
        Some(t) if !t.le(&sound) => {
            return Err(Error::UnsoundBound(format!("requested {t}, largest sound truncation is {sound}")));
        }
        Some(t) => t,
        None => sound,
    };
    let a = l.arity();
    let lt = l.truncation();
    let degrees = trunc.below();
    let mut maps: Vec<Vec<Table>> = Vec::with_capacity(degrees.len());
    let mut index: Vec<HashMap<Table, CellId>> = Vec::with_capacity(degrees.len());
    for &e in &degrees {
        let rep = representable(embed(dir_map, a, e), lt)?;
        let cone = product(k, &rep)?;
        let found: Vec<Table> = match over {
            None => HomSearch::new(&cone.object, l).all()?.into_iter().map(|m| m.images().to_vec()).collect(),
            Some((p, s)) => {
                let base = cone.first.then(s)?;
                HomSearch::new(&cone.object, l).over(p, &base).all()?.into_iter().map(|m| m.images().to_vec()).collect()
            }
        };
        index.push(found.iter().enumerate().map(|(i, t)| (t.clone(), i as CellId)).collect());
        maps.push(found);
    }
    let flat_of = |e: Multidegree| degrees.iter().position(|d| *d == e).expect("degree");
    // precomposition tables for every coface and codegeneracy
    let mut face_tabs: HashMap<(usize, usize, usize), Vec<Vec<CellId>>> = HashMap::new();
    let mut degen_tabs: HashMap<(usize, usize, usize), Vec<Vec<CellId>>> = HashMap::new();
    for &e in &degrees {
        for (j, &u) in dir_map.iter().enumerate() {
            let m = e.get(j);
            let hi = embed(dir_map, a, e);
            if m >= 1 {
                for i in 0..=m {
                    let theta: Vec<u8> = (0..=m as u8).filter(|&v| v as usize != i).collect();
                    let op = representable_operator(hi, u, &theta, lt)?;
                    face_tabs.insert((flat_of(e), j, i), precompose_table(k, &op));
                }
            }
            if m < trunc.get(j) {
                for i in 0..=m {
                    let mut theta: Vec<u8> = (0..=m as u8).collect();
                    theta.insert(i, i as u8);
                    let op = representable_operator(hi, u, &theta, lt)?;
                    degen_tabs.insert((flat_of(e), j, i), precompose_table(k, &op));
                }
            }
        }
    }
    let built = Presheaf::from_fn(
        trunc,
        |e| (0..maps[flat_of(e)].len() as CellId).collect(),
        |e, j, i, &c| {
            let g = &maps[flat_of(e)][c as usize];
            let composed = compose_tables(&face_tabs[&(flat_of(e), j, i)], g);
            *index[flat_of(e.lowered(j))].get(&composed).expect("face of a map is a map")
        },
        |e, j, i, &c| {
            let g = &maps[flat_of(e)][c as usize];
            let composed = compose_tables(&degen_tabs[&(flat_of(e), j, i)], g);
            *index[flat_of(e.raised(j))].get(&composed).expect("degeneracy of a map is a map")
        },
    )?;
    Ok(MappingObject { object: Arc::new(built.presheaf), source: k.clone(), target: l.clone(), dir_map: dir_map.to_vec(), maps, index })
}

impl MappingObject {
    pub fn source(&self) -> &Arc<Presheaf> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Presheaf> {
        &self.target
    }

    /// The map behind a cell, as a presheaf map `K × rep -> L`.
    pub fn map_of(&self, e: Multidegree, c: CellId) -> Result<PresheafMap> {
        let rep = representable(embed(&self.dir_map, self.target.arity(), e), self.target.truncation())?;
        let prod = product(&self.source, &rep)?.object;
        PresheafMap::new_unchecked(prod, self.target.clone(), self.maps[self.object.flat(e)][c as usize].clone())
    }

    fn lookup(&self, e: Multidegree, table: &Table) -> Option<CellId> {
        self.index[self.object.flat(e)].get(table).copied()
    }

    /// `[B, L] -> [A, L]` induced by `f: A -> B`; `other` must be `[A, L]`
    /// (possibly restricted over a base compatible with `f`).
    pub fn restrict(&self, f: &PresheafMap, other: &MappingObject) -> Result<PresheafMap> {
        if self.object.truncation() != other.object.truncation() {
            return Err(Error::TruncationMismatch {
                left: self.object.truncation().to_string(),
                right: other.object.truncation().to_string(),
            });
        }
        let a = self.target.arity();
        let lt = self.target.truncation();
        let mut images = Vec::new();
        for e in self.object.degrees() {
            let rep = representable(embed(&self.dir_map, a, e), lt)?;
            let fx = product_map(f, &PresheafMap::identity(rep))?;
            let row = self.maps[self.object.flat(e)]
                .iter()
                .map(|g| {
                    let composed: Table = fx.images().iter().zip(g).map(|(r, img)| r.iter().map(|&c| img[c as usize]).collect()).collect();
                    other.lookup(e, &composed).ok_or(Error::Mismatch("restricted map outside the target mapping object"))
                })
                .collect::<Result<Vec<_>>>()?;
            images.push(row);
        }
        PresheafMap::new(self.object.clone(), other.object.clone(), images)
    }

    /// `[K, L] -> [K, L']` induced by `h: L -> L'`; `other` must be `[K, L']`.
    pub fn postcompose(&self, h: &PresheafMap, other: &MappingObject) -> Result<PresheafMap> {
        let mut images = Vec::new();
        for e in self.object.degrees() {
            let row = self.maps[self.object.flat(e)]
                .iter()
                .map(|g| {
                    let composed: Table =
                        g.iter().enumerate().map(|(f, r)| r.iter().map(|&c| h.images()[f][c as usize]).collect()).collect();
                    other.lookup(e, &composed).ok_or(Error::Mismatch("postcomposed map outside the target mapping object"))
                })
                .collect::<Result<Vec<_>>>()?;
            images.push(row);
        }
        PresheafMap::new(self.object.clone(), other.object.clone(), images)
    }
}

/// `Map(X, Y)`: the space of maps, in the last direction, truncated at `n`.
pub fn map_space(x: &Arc<Presheaf>, y: &Arc<Presheaf>, n: usize) -> Result<MappingObject> {
    let last = y.arity() - 1;
    hom_into(x, y, &[last], Some(Multidegree::new(&[n])?), None)
}

/// `Map_{/X}(Y, L)` for `q: Y -> X` and `p: L -> X`.
pub fn map_space_over(q: &PresheafMap, p: &PresheafMap, n: usize) -> Result<MappingObject> {
    let last = p.source().arity() - 1;
    hom_into(q.source(), p.source(), &[last], Some(Multidegree::new(&[n])?), Some((p, q)))
}

/// The internal hom `Y^B`.
pub fn internal_hom(b: &Arc<Presheaf>, y: &Arc<Presheaf>) -> Result<MappingObject> {
    let dirs: Vec<usize> = (0..y.arity()).collect();
    hom_into(b, y, &dirs, None, None)
}

/// The pushout-product `i □ j`, from `B×C ⊔_{A×C} A×D` to `B×D`.
pub fn pushout_product(i: &PresheafMap, j: &PresheafMap) -> Result<PresheafMap> {
    let id_c = PresheafMap::identity(j.source().clone());
    let id_d = PresheafMap::identity(j.target().clone());
    let id_b = PresheafMap::identity(i.target().clone());
    let left = product_map(i, &id_c)?; // A×C -> B×C
    let right = product_map(&PresheafMap::identity(i.source().clone()), j)?; // A×C -> A×D
    let po = pushout(&left, &right)?;
    let u = product_map(&id_b, j)?; // B×C -> B×D
    let v = product_map(i, &id_d)?; // A×D -> B×D
    let v = v.with_endpoints(po.second.source().clone(), u.target().clone())?;
    cocone_map(&po, &u, &v)
}

/// The pullback-exponential of `i: A -> B` and `p: Y -> X`, with its parts.
pub struct PullbackExponential {
    /// `Y^B -> Y^A ×_{X^A} X^B`.
    pub map: PresheafMap,
    pub corner: Cone,
    pub y_b: MappingObject,
    pub x_b: MappingObject,
}

pub fn pullback_exponential(i: &PresheafMap, p: &PresheafMap) -> Result<PullbackExponential> {
    let (a, b) = (i.source(), i.target());
    let (y, x) = (p.source(), p.target());
    let y_b = internal_hom(b, y)?;
    let y_a = internal_hom(a, y)?;
    let x_a = internal_hom(a, x)?;
    let x_b = internal_hom(b, x)?;
    let ya_xa = y_a.postcompose(p, &x_a)?;
    let xb_xa = x_b.restrict(i, &x_a)?;
    let corner = pullback(&ya_xa, &xb_xa)?;
    let yb_ya = y_b.restrict(i, &y_a)?;
    let yb_xb = y_b.postcompose(p, &x_b)?;
    let map = cone_map(&corner, &yb_ya, &yb_xb)?;
    Ok(PullbackExponential { map, corner, y_b, x_b })
}
