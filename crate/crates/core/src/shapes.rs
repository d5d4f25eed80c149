//! The standard objects: simplices, boundaries, horns, groupoid nerves,
//! the categorical shapes `F(n)`, `E(n)`, `G(n)`, `F(k,n)` and their
//! boundaries, and the maps between them.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{cocone_map, external, pushout};
use crate::category::FiniteCategory;
use crate::error::{Error, Result};
use crate::presheaf::{monotone_maps, Built, CellId, Multidegree, Presheaf, PresheafMap};

type Key = Vec<Vec<u8>>;

fn is_onto(seq: &[u8], n: usize) -> bool {
    (0..=n).all(|v| seq.contains(&(v as u8)))
}

fn representable_built(d: Multidegree, t: Multidegree) -> Result<Built<Key>> {
    if d.arity() != t.arity() {
        return Err(Error::ArityMismatch { expected: t.arity(), found: d.arity() });
    }
    let a = d.arity();
    Presheaf::from_fn(
        t,
        |e| {
            let mut out: Vec<Key> = vec![Vec::new()];
            for j in 0..a {
                let options = monotone_maps(e.get(j), d.get(j));
                out = out
                    .into_iter()
                    .flat_map(|k| {
                        options.iter().map(move |o| {
                            let mut k = k.clone();
                            k.push(o.clone());
                            k
                        })
                    })
                    .collect();
            }
            out
        },
        |_, dir, i, k| {
            let mut k = k.clone();
            k[dir].remove(i);
            k
        },
        |_, dir, i, k| {
            let mut k = k.clone();
            let v = k[dir][i];
            k[dir].insert(i, v);
            k
        },
    )
}

/// The representable presheaf at `d`, truncated at `t`. Cells are tuples of
/// monotone maps, ordered lexicographically with the first direction outermost.
pub fn representable(d: Multidegree, t: Multidegree) -> Result<Arc<Presheaf>> {
    Ok(Arc::new(representable_built(d, t)?.presheaf))
}

/// `∂` of a representable: cells missing a vertex in some direction.
pub fn representable_boundary(d: Multidegree, t: Multidegree) -> Result<PresheafMap> {
    let built = representable_built(d, t)?;
    let keys = built.keys;
    let x = Arc::new(built.presheaf);
    let flat: Vec<Multidegree> = x.degrees();
    let lookup = |e: Multidegree| flat.iter().position(|f| *f == e).expect("degree");
    x.subobject(|e, c| {
        let k = &keys[lookup(e)][c as usize];
        (0..d.arity()).any(|j| !is_onto(&k[j], d.get(j)))
    })
}

/// The operator `θ^*` between representables, `rep(d with θ's source) -> rep(d)`,
/// for a monotone `θ = ⟨a_0, ..., a_m⟩` into `[d_dir]`.
pub fn representable_operator(d: Multidegree, dir: usize, theta: &[u8], t: Multidegree) -> Result<PresheafMap> {
    let n = d.get(dir);
    if theta.is_empty() || theta.windows(2).any(|w| w[0] > w[1]) || theta.iter().any(|&v| v as usize > n) {
        return Err(Error::InvalidSpec(format!("⟨{theta:?}⟩ is not a monotone map into [{n}]")));
    }
    let src_deg = d.with(dir, theta.len() - 1);
    let src = representable_built(src_deg, t)?;
    let tgt = representable_built(d, t)?;
    let images = src
        .presheaf
        .degrees()
        .into_iter()
        .map(|e| {
            src.keys[src.presheaf.flat(e)]
                .iter()
                .map(|k| {
                    let mut k = k.clone();
                    k[dir] = k[dir].iter().map(|&p| theta[p as usize]).collect();
                    tgt.id_of(e, &k).expect("image cell")
                })
                .collect()
        })
        .collect();
    PresheafMap::new(Arc::new(src.presheaf), Arc::new(tgt.presheaf), images)
}

fn one(v: usize) -> Multidegree {
    Multidegree::new(&[v]).expect("degree")
}

/// Cells of `Δ[n]` in each degree `0..=t`, as monotone sequences.
pub fn delta_keys(n: usize, t: usize) -> Vec<Vec<Vec<u8>>> {
    (0..=t).map(|k| monotone_maps(k, n)).collect()
}

/// `Δ[n]` truncated at `t`.
pub fn delta(n: usize, t: usize) -> Result<Arc<Presheaf>> {
    representable(one(n), one(t))
}

pub fn boundary_inclusion(n: usize, t: usize) -> Result<PresheafMap> {
    representable_boundary(one(n), one(t))
}

/// `∂Δ[n]`.
pub fn boundary(n: usize, t: usize) -> Result<Arc<Presheaf>> {
    Ok(boundary_inclusion(n, t)?.source().clone())
}

/// `Λ[n, i] ↪ Δ[n]`: cells whose image misses some vertex other than `i`.
pub fn horn_inclusion(n: usize, i: usize, t: usize) -> Result<PresheafMap> {
    if n == 0 || i > n {
        return Err(Error::InvalidSpec(format!("horn needs 0 <= i <= n and n >= 1, got n={n}, i={i}")));
    }
    let keys = delta_keys(n, t);
    let x = delta(n, t)?;
    x.subobject(|e, c| {
        let k = &keys[e.get(0)][c as usize];
        (0..=n).any(|v| v != i && !k.contains(&(v as u8)))
    })
}

pub fn horn(n: usize, i: usize, t: usize) -> Result<Arc<Presheaf>> {
    Ok(horn_inclusion(n, i, t)?.source().clone())
}

/// `⟨a_0, ..., a_m⟩: Δ[m] -> Δ[n]`.
pub fn delta_operator(theta: &[u8], n: usize, t: usize) -> Result<PresheafMap> {
    representable_operator(one(n), 0, theta, one(t))
}

/// `J[l]`: the nerve of the chaotic groupoid on `l + 1` objects.
pub fn j(l: usize, t: usize) -> Result<Arc<Presheaf>> {
    FiniteCategory::chaotic(l).nerve(t)
}

fn two(t: &Multidegree) -> Result<()> {
    if t.arity() != 2 {
        return Err(Error::ArityMismatch { expected: 2, found: t.arity() });
    }
    Ok(())
}

fn three(t: &Multidegree) -> Result<()> {
    if t.arity() != 3 {
        return Err(Error::ArityMismatch { expected: 3, found: t.arity() });
    }
    Ok(())
}

fn md(v: &[usize]) -> Multidegree {
    Multidegree::new(v).expect("degree")
}

/// `F(n) = Δ[n] ⊠ Δ[0]`: `F(n)_{k,l} = Δ[n]_k`.
pub fn f(n: usize, t: Multidegree) -> Result<Arc<Presheaf>> {
    two(&t)?;
    representable(md(&[n, 0]), t)
}

/// `∂F(n) ↪ F(n)`.
pub fn boundary_f_inclusion(n: usize, t: Multidegree) -> Result<PresheafMap> {
    two(&t)?;
    representable_boundary(md(&[n, 0]), t)
}

/// `E(n) = J[n] ⊠ Δ[0]`: `E(n)_{k,l} = J[n]_k`.
pub fn e(n: usize, t: Multidegree) -> Result<Arc<Presheaf>> {
    two(&t)?;
    let jn = j(n, t.get(0))?;
    let pt = Presheaf::point(one(t.get(1)));
    Ok(Arc::new(external(&jn, &pt)?))
}

/// `⟨a_0, ..., a_m⟩: F(m) -> F(n)`.
pub fn f_operator(theta: &[u8], n: usize, t: Multidegree) -> Result<PresheafMap> {
    two(&t)?;
    representable_operator(md(&[n, 0]), 0, theta, t)
}

/// `⟨i⟩: F(0) -> F(n)`.
pub fn vertex_map(n: usize, i: usize, t: Multidegree) -> Result<PresheafMap> {
    if i > n {
        return Err(Error::InvalidSpec(format!("vertex {i} out of range for F({n})")));
    }
    f_operator(&[i as u8], n, t)
}

/// `⟨i⟩: F(0) -> E(n)`; `E(n)` has the objects of `I[n]` as vertices.
pub fn e_vertex_map(n: usize, i: usize, t: Multidegree) -> Result<PresheafMap> {
    if i > n {
        return Err(Error::InvalidSpec(format!("vertex {i} out of range for E({n})")));
    }
    let target = e(n, t)?;
    let cat = FiniteCategory::chaotic(n);
    let source = f(0, t)?;
    let images = source
        .degrees()
        .into_iter()
        .map(|d| {
            let m = d.get(0);
            let strings = cat.composable(m);
            let key: Vec<u32> = if m == 0 { vec![i as u32] } else { vec![cat.identity(i) as u32; m] };
            let c = strings.iter().position(|s| *s == key).expect("constant string") as CellId;
            vec![c]
        })
        .collect();
    PresheafMap::new(source, target, images)
}

/// The spine `G(n) ↪ F(n)`, with `G(n)` glued from copies of `F(1)` along
/// `F(0)` and the inclusion induced by the edges `⟨i, i+1⟩`.
pub fn spine_inclusion(n: usize, t: Multidegree) -> Result<PresheafMap> {
    two(&t)?;
    if n == 0 {
        return Ok(PresheafMap::identity(f(0, t)?));
    }
    let edge = |i: usize| f_operator(&[i as u8, i as u8 + 1], n, t);
    let first_vertex = vertex_map(1, 0, t)?;
    let last_vertex = vertex_map(1, 1, t)?;
    // `g` is G(m) -> F(n); `tip` is the last vertex F(0) -> G(m)
    let mut g = edge(0)?;
    let mut tip = last_vertex.clone();
    for m in 1..n {
        let po = pushout(&tip, &first_vertex)?;
        g = cocone_map(&po, &g, &edge(m)?)?;
        tip = last_vertex.then(&po.second)?;
    }
    Ok(g)
}

/// `G(n)`.
pub fn g(n: usize, t: Multidegree) -> Result<Arc<Presheaf>> {
    Ok(spine_inclusion(n, t)?.source().clone())
}

/// `F(k,n) = Δ[k] ⊠ Δ[n] ⊠ Δ[0]`.
pub fn f2(k: usize, n: usize, t: Multidegree) -> Result<Arc<Presheaf>> {
    three(&t)?;
    representable(md(&[k, n, 0]), t)
}

/// `∂F(k,n) ↪ F(k,n)`: the union of `∂Δ[k] ⊠ Δ[n]` and `Δ[k] ⊠ ∂Δ[n]`.
pub fn boundary_f2_inclusion(k: usize, n: usize, t: Multidegree) -> Result<PresheafMap> {
    three(&t)?;
    representable_boundary(md(&[k, n, 0]), t)
}

/// The complete Segal object of the walking isomorphism: cells of degree
/// `(k,l)` are all functions `[k] × [l] -> {0, 1}`.
pub fn chaotic_segal(t: Multidegree) -> Result<Arc<Presheaf>> {
    two(&t)?;
    let built = Presheaf::from_fn(
        t,
        |d| {
            let size = (d.get(0) + 1) * (d.get(1) + 1);
            (0u32..1 << size).map(|bits| (0..size).map(|p| ((bits >> p) & 1) as u8).collect::<Vec<u8>>()).collect()
        },
        |d, dir, i, k| {
            let (rows, cols) = (d.get(0) + 1, d.get(1) + 1);
            let mut out = Vec::with_capacity(k.len());
            for r in 0..rows {
                for c in 0..cols {
                    if (dir == 0 && r != i) || (dir == 1 && c != i) {
                        out.push(k[r * cols + c]);
                    }
                }
            }
            out
        },
        |d, dir, i, k| {
            let (rows, cols) = (d.get(0) + 1, d.get(1) + 1);
            let mut out = Vec::with_capacity(k.len() * 2);
            for r in 0..rows {
                let times = if dir == 0 && r == i { 2 } else { 1 };
                for _ in 0..times {
                    for c in 0..cols {
                        out.push(k[r * cols + c]);
                        if dir == 1 && c == i {
                            out.push(k[r * cols + c]);
                        }
                    }
                }
            }
            out
        },
    )?;
    Ok(Arc::new(built.presheaf))
}

/// Which named object to build.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShapeSpec {
    Delta { n: usize },
    Boundary { n: usize },
    Horn { n: usize, i: usize },
    J { l: usize },
    F { n: usize },
    PartialF { n: usize },
    E { n: usize },
    G { n: usize },
    F2 { k: usize, n: usize },
    PartialF2 { k: usize, n: usize },
    Chaotic,
}

impl ShapeSpec {
    /// Parses `kind` with positional parameters, as on the command line.
    pub fn parse(kind: &str, params: &[usize]) -> Result<Self> {
        let p = |i: usize| params.get(i).copied().unwrap_or(0);
        let (spec, expected) = match kind {
            "delta" => (ShapeSpec::Delta { n: p(0) }, 1),
            "boundary" => (ShapeSpec::Boundary { n: p(0) }, 1),
            "horn" => (ShapeSpec::Horn { n: p(0), i: p(1) }, 2),
            "J" | "j" => (ShapeSpec::J { l: p(0) }, 1),
            "F" | "f" => (ShapeSpec::F { n: p(0) }, 1),
            "partialF" | "dF" => (ShapeSpec::PartialF { n: p(0) }, 1),
            "E" | "e" => (ShapeSpec::E { n: p(0) }, 1),
            "G" | "g" => (ShapeSpec::G { n: p(0) }, 1),
            "F2" | "f2" => (ShapeSpec::F2 { k: p(0), n: p(1) }, 2),
            "partialF2" | "dF2" => (ShapeSpec::PartialF2 { k: p(0), n: p(1) }, 2),
            "chaotic" => (ShapeSpec::Chaotic, 0),
            other => return Err(Error::InvalidSpec(format!("unknown shape kind {other}"))),
        };
        if params.len() != expected {
            return Err(Error::InvalidSpec(format!("{kind} takes {expected} parameter(s), got {}", params.len())));
        }
        Ok(spec)
    }

    pub fn arity(&self) -> usize {
        match self {
            ShapeSpec::Delta { .. } | ShapeSpec::Boundary { .. } | ShapeSpec::Horn { .. } | ShapeSpec::J { .. } => 1,
            ShapeSpec::F2 { .. } | ShapeSpec::PartialF2 { .. } => 3,
            _ => 2,
        }
    }

    /// The object, and for boundary-like kinds the canonical inclusion.
    pub fn build(&self, t: Multidegree) -> Result<(Arc<Presheaf>, Option<PresheafMap>)> {
        if t.arity() != self.arity() {
            return Err(Error::ArityMismatch { expected: self.arity(), found: t.arity() });
        }
        let with = |m: PresheafMap| (m.source().clone(), Some(m));
        Ok(match *self {
            ShapeSpec::Delta { n } => (delta(n, t.get(0))?, None),
            ShapeSpec::Boundary { n } => with(boundary_inclusion(n, t.get(0))?),
            ShapeSpec::Horn { n, i } => with(horn_inclusion(n, i, t.get(0))?),
            ShapeSpec::J { l } => (j(l, t.get(0))?, None),
            ShapeSpec::F { n } => (f(n, t)?, None),
            ShapeSpec::PartialF { n } => with(boundary_f_inclusion(n, t)?),
            ShapeSpec::E { n } => (e(n, t)?, None),
            ShapeSpec::G { n } => with(spine_inclusion(n, t)?),
            ShapeSpec::F2 { k, n } => (f2(k, n, t)?, None),
            ShapeSpec::PartialF2 { k, n } => with(boundary_f2_inclusion(k, n, t)?),
            ShapeSpec::Chaotic => (chaotic_segal(t)?, None),
        })
    }
}
