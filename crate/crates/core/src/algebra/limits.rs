//! Finite limits and colimits, computed levelwise on all cells.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::presheaf::{CellId, Multidegree, Presheaf, PresheafMap};

/// An object with two outgoing legs (product or pullback).
#[derive(Clone, Debug)]
pub struct Cone {
    pub object: Arc<Presheaf>,
    pub first: PresheafMap,
    pub second: PresheafMap,
}

/// An object with two incoming legs (coproduct or pushout).
#[derive(Clone, Debug)]
pub struct Cocone {
    pub object: Arc<Presheaf>,
    pub first: PresheafMap,
    pub second: PresheafMap,
}

fn same_shape(a: &Presheaf, b: &Presheaf) -> Result<()> {
    if a.arity() != b.arity() {
        return Err(Error::ArityMismatch { expected: a.arity(), found: b.arity() });
    }
    if a.truncation() != b.truncation() {
        return Err(Error::TruncationMismatch { left: a.truncation().to_string(), right: b.truncation().to_string() });
    }
    Ok(())
}

fn legs_from_keys<K>(
    built_keys: &[Vec<K>],
    object: &Arc<Presheaf>,
    left: &Arc<Presheaf>,
    right: &Arc<Presheaf>,
    pick: impl Fn(&K) -> (CellId, CellId),
) -> Result<(PresheafMap, PresheafMap)> {
    let mut a = Vec::with_capacity(built_keys.len());
    let mut b = Vec::with_capacity(built_keys.len());
    for keys in built_keys {
        let (x, y): (Vec<_>, Vec<_>) = keys.iter().map(&pick).unzip();
        a.push(x);
        b.push(y);
    }
    Ok((PresheafMap::new_unchecked(object.clone(), left.clone(), a)?, PresheafMap::new_unchecked(object.clone(), right.clone(), b)?))
}

/// Binary product with its projections.
pub fn product(x: &Arc<Presheaf>, y: &Arc<Presheaf>) -> Result<Cone> {
    same_shape(x, y)?;
    let built = Presheaf::from_fn(
        x.truncation(),
        |d| {
            let (n, m) = (x.count(d) as CellId, y.count(d) as CellId);
            (0..n).flat_map(|a| (0..m).map(move |b| (a, b))).collect()
        },
        |d, dir, i, &(a, b)| (x.face(d, dir, i, a), y.face(d, dir, i, b)),
        |d, dir, i, &(a, b)| (x.degen(d, dir, i, a), y.degen(d, dir, i, b)),
    )?;
    let object = Arc::new(built.presheaf);
    let (first, second) = legs_from_keys(&built.keys, &object, x, y, |&k| k)?;
    Ok(Cone { object, first, second })
}

/// Fiber product of `f: Y -> X` and `g: Z -> X`.
pub fn pullback(f: &PresheafMap, g: &PresheafMap) -> Result<Cone> {
    if !(Arc::ptr_eq(f.target(), g.target()) || f.target() == g.target()) {
        return Err(Error::Mismatch("target"));
    }
    let (y, z) = (f.source().clone(), g.source().clone());
    let built = Presheaf::from_fn(
        y.truncation(),
        |d| {
            let mut by_image: Vec<Vec<CellId>> = vec![Vec::new(); f.target().count(d)];
            for (b, &t) in g.images_at(d).iter().enumerate() {
                by_image[t as usize].push(b as CellId);
            }
            let mut out = Vec::new();
            for (a, &t) in f.images_at(d).iter().enumerate() {
                out.extend(by_image[t as usize].iter().map(|&b| (a as CellId, b)));
            }
            out
        },
        |d, dir, i, &(a, b)| (y.face(d, dir, i, a), z.face(d, dir, i, b)),
        |d, dir, i, &(a, b)| (y.degen(d, dir, i, a), z.degen(d, dir, i, b)),
    )?;
    let object = Arc::new(built.presheaf);
    let (first, second) = legs_from_keys(&built.keys, &object, &y, &z, |&k| k)?;
    Ok(Cone { object, first, second })
}

/// `f × g`, with cells numbered as in [`product`].
pub fn product_map(f: &PresheafMap, g: &PresheafMap) -> Result<PresheafMap> {
    let s = product(f.source(), g.source())?.object;
    let t = product(f.target(), g.target())?.object;
    let images = s
        .degrees()
        .into_iter()
        .map(|d| {
            let m = g.target().count(d) as CellId;
            let mut row = Vec::with_capacity(s.count(d));
            for a in 0..f.source().count(d) as CellId {
                for b in 0..g.source().count(d) as CellId {
                    row.push(f.image(d, a) * m + g.image(d, b));
                }
            }
            row
        })
        .collect();
    PresheafMap::new_unchecked(s, t, images)
}

/// Pullback along one cell: the fiber of `p` over a map from the point.
pub fn fiber(p: &PresheafMap, point: &PresheafMap) -> Result<Arc<Presheaf>> {
    Ok(pullback(point, p)?.object)
}

/// Coproduct with its injections.
pub fn coproduct(x: &Arc<Presheaf>, y: &Arc<Presheaf>) -> Result<Cocone> {
    same_shape(x, y)?;
    let built = Presheaf::from_fn(
        x.truncation(),
        |d| {
            let left = (0..x.count(d) as CellId).map(|a| (false, a));
            left.chain((0..y.count(d) as CellId).map(|b| (true, b))).collect()
        },
        |d, dir, i, &(s, c)| (s, if s { y.face(d, dir, i, c) } else { x.face(d, dir, i, c) }),
        |d, dir, i, &(s, c)| (s, if s { y.degen(d, dir, i, c) } else { x.degen(d, dir, i, c) }),
    )?;
    let object = Arc::new(built.presheaf);
    let first = x.degrees().into_iter().map(|d| (0..x.count(d) as CellId).collect()).collect();
    let second = y
        .degrees()
        .into_iter()
        .map(|d| (0..y.count(d) as CellId).map(|b| b + x.count(d) as CellId).collect())
        .collect();
    Ok(Cocone {
        first: PresheafMap::new_unchecked(x.clone(), object.clone(), first)?,
        second: PresheafMap::new_unchecked(y.clone(), object.clone(), second)?,
        object,
    })
}

struct UnionFind(Vec<u32>);

impl UnionFind {
    fn find(&mut self, a: u32) -> u32 {
        let mut r = a;
        while self.0[r as usize] != r {
            r = self.0[r as usize];
        }
        let mut c = a;
        while self.0[c as usize] != r {
            let next = self.0[c as usize];
            self.0[c as usize] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi as usize] = lo;
        }
    }
}

/// Pushout of `f: A -> B` and `g: A -> C`, with injections from `B` and `C`.
pub fn pushout(f: &PresheafMap, g: &PresheafMap) -> Result<Cocone> {
    if !(Arc::ptr_eq(f.source(), g.source()) || f.source() == g.source()) {
        return Err(Error::Mismatch("source"));
    }
    let (a, b, c) = (f.source(), f.target().clone(), g.target().clone());
    same_shape(&b, &c)?;
    // Cells of B come first, then cells of C; classes are keyed by their least member.
    let mut classes: Vec<Vec<u32>> = Vec::with_capacity(a.num_flat());
    for d in a.degrees() {
        let nb = b.count(d) as u32;
        let mut uf = UnionFind((0..nb + c.count(d) as u32).collect());
        for (x, y) in f.images_at(d).iter().zip(g.images_at(d)) {
            uf.union(*x, nb + *y);
        }
        classes.push((0..uf.0.len() as u32).map(|e| uf.find(e)).collect());
    }
    let flat = |d: Multidegree| a.flat(d);
    let element_face = |d: Multidegree, dir: usize, i: usize, e: u32| -> u32 {
        let nb = b.count(d) as u32;
        if e < nb {
            b.face(d, dir, i, e)
        } else {
            b.count(d.lowered(dir)) as u32 + c.face(d, dir, i, e - nb)
        }
    };
    let element_degen = |d: Multidegree, dir: usize, i: usize, e: u32| -> u32 {
        let nb = b.count(d) as u32;
        if e < nb {
            b.degen(d, dir, i, e)
        } else {
            b.count(d.raised(dir)) as u32 + c.degen(d, dir, i, e - nb)
        }
    };
    let built = Presheaf::from_fn(
        a.truncation(),
        |d| {
            let cl = &classes[flat(d)];
            (0..cl.len() as u32).filter(|&e| cl[e as usize] == e).collect()
        },
        |d, dir, i, &e| classes[flat(d.lowered(dir))][element_face(d, dir, i, e) as usize],
        |d, dir, i, &e| classes[flat(d.raised(dir))][element_degen(d, dir, i, e) as usize],
    )?;
    let mut first = Vec::new();
    let mut second = Vec::new();
    for d in a.degrees() {
        let cl = &classes[flat(d)];
        let nb = b.count(d);
        let id = |e: usize| built.id_of(d, &cl[e]).expect("class");
        first.push((0..nb).map(id).collect());
        second.push((nb..cl.len()).map(id).collect());
    }
    let object = Arc::new(built.presheaf);
    Ok(Cocone {
        first: PresheafMap::new_unchecked(b, object.clone(), first)?,
        second: PresheafMap::new_unchecked(c, object.clone(), second)?,
        object,
    })
}

/// The map out of a pushout (or coproduct) induced by `u` on the first
/// corner and `v` on the second.
pub fn cocone_map(po: &Cocone, u: &PresheafMap, v: &PresheafMap) -> Result<PresheafMap> {
    let target = u.target().clone();
    let p = &po.object;
    let mut images: Vec<Vec<Option<CellId>>> = p.degrees().into_iter().map(|d| vec![None; p.count(d)]).collect();
    for (leg, m) in [(&po.first, u), (&po.second, v)] {
        for d in p.degrees() {
            let f = p.flat(d);
            for (x, &y) in leg.images_at(d).iter().enumerate() {
                let t = m.image(d, x as CellId);
                match images[f][y as usize] {
                    Some(prev) if prev != t => {
                        return Err(Error::NonCommuting(format!("induced map is not well defined at {d}")))
                    }
                    _ => images[f][y as usize] = Some(t),
                }
            }
        }
    }
    let images = images
        .into_iter()
        .map(|row| row.into_iter().map(|o| o.ok_or_else(|| Error::MalformedCell("cell outside both legs".into()))).collect())
        .collect::<Result<Vec<Vec<CellId>>>>()?;
    PresheafMap::new(p.clone(), target, images)
}

/// The map into a pullback (or product) induced by `u` and `v`.
pub fn cone_map(pb: &Cone, u: &PresheafMap, v: &PresheafMap) -> Result<PresheafMap> {
    let source = u.source().clone();
    let p = &pb.object;
    let mut images = Vec::with_capacity(p.num_flat());
    for d in p.degrees() {
        let mut index = std::collections::HashMap::with_capacity(p.count(d));
        for c in 0..p.count(d) as CellId {
            index.insert((pb.first.image(d, c), pb.second.image(d, c)), c);
        }
        let row = (0..source.count(d) as CellId)
            .map(|x| {
                index
                    .get(&(u.image(d, x), v.image(d, x)))
                    .copied()
                    .ok_or_else(|| Error::NonCommuting(format!("cone legs disagree at {d}")))
            })
            .collect::<Result<Vec<_>>>()?;
        images.push(row);
    }
    PresheafMap::new_unchecked(source, p.clone(), images)
}

/// External product: `(X ⊠ Y)_{(d, e)} = X_d × Y_e`, of arity the sum.
pub fn external(x: &Presheaf, y: &Presheaf) -> Result<Presheaf> {
    let a = x.arity();
    let mut t = x.truncation().as_vec();
    t.extend(y.truncation().as_vec());
    let trunc = Multidegree::new(&t)?;
    let split = |d: Multidegree| {
        let v = d.as_vec();
        (Multidegree::new(&v[..a]).expect("left"), Multidegree::new(&v[a..]).expect("right"))
    };
    Ok(Presheaf::from_fn(
        trunc,
        |d| {
            let (l, r) = split(d);
            let (n, m) = (x.count(l) as CellId, y.count(r) as CellId);
            (0..n).flat_map(|p| (0..m).map(move |q| (p, q))).collect()
        },
        |d, dir, i, &(p, q)| {
            let (l, r) = split(d);
            if dir < a {
                (x.face(l, dir, i, p), q)
            } else {
                (p, y.face(r, dir - a, i, q))
            }
        },
        |d, dir, i, &(p, q)| {
            let (l, r) = split(d);
            if dir < a {
                (x.degen(l, dir, i, p), q)
            } else {
                (p, y.degen(r, dir - a, i, q))
            }
        },
    )?
    .presheaf)
}

/// External product of maps; cells are numbered as in [`external`].
pub fn external_map(f: &PresheafMap, g: &PresheafMap) -> Result<PresheafMap> {
    let s = Arc::new(external(f.source(), g.source())?);
    let t = Arc::new(external(f.target(), g.target())?);
    let a = f.source().arity();
    let images = s
        .degrees()
        .into_iter()
        .map(|d| {
            let v = d.as_vec();
            let (l, r) = (Multidegree::new(&v[..a]).unwrap(), Multidegree::new(&v[a..]).unwrap());
            let m = g.target().count(r) as CellId;
            let mut row = Vec::with_capacity(s.count(d));
            for p in 0..f.source().count(l) as CellId {
                for q in 0..g.source().count(r) as CellId {
                    row.push(f.image(l, p) * m + g.image(r, q));
                }
            }
            row
        })
        .collect();
    PresheafMap::new_unchecked(s, t, images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    fn deg(v: &[usize]) -> Multidegree {
        Multidegree::new(v).unwrap()
    }

    #[test]
    fn square_of_an_interval() {
        let d1 = shapes::delta(1, 3).unwrap();
        let sq = product(&d1, &d1).unwrap().object;
        assert_eq!(sq.nondegenerate_count(deg(&[0])), 4);
        assert_eq!(sq.nondegenerate_count(deg(&[1])), 5);
        assert_eq!(sq.nondegenerate_count(deg(&[2])), 2);
        assert_eq!(sq.nondegenerate_count(deg(&[3])), 0);
        assert!(sq.validate().is_holds());
    }

    #[test]
    fn pushout_of_two_intervals_is_a_circle() {
        let b = shapes::boundary_inclusion(1, 2).unwrap();
        let po = pushout(&b, &b).unwrap();
        assert_eq!(po.object.count(deg(&[0])), 2);
        assert_eq!(po.object.nondegenerate_count(deg(&[1])), 2);
        assert!(po.object.validate().is_holds());
    }

    #[test]
    fn induced_map_out_of_pushout() {
        let b = shapes::boundary_inclusion(1, 2).unwrap();
        let po = pushout(&b, &b).unwrap();
        let id = PresheafMap::identity(b.target().clone());
        let fold = cocone_map(&po, &id, &id).unwrap();
        assert!(fold.is_epi());
        assert!(!fold.is_mono());
    }
}
