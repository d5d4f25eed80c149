//! The `presheaf/1`, `map/1` and `diagram/1` interchange formats.
//!
//! Only nondegenerate cells are written. Each carries, for every direction
//! and face index, the normal form of its face: a nondegenerate cell plus
//! strictly decreasing degeneracy words.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::category::{FiniteCategory, Presentation};
use crate::error::{Error, Result};
use crate::grothendieck::DiagramFunctor;
use crate::presheaf::{CellId, Multidegree, Presheaf, PresheafMap};

pub const PRESHEAF_FORMAT: &str = "presheaf/1";
pub const MAP_FORMAT: &str = "map/1";
pub const DIAGRAM_FORMAT: &str = "diagram/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceDoc {
    pub degree: String,
    pub cell: CellId,
    #[serde(default)]
    pub degeneracies: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellDoc {
    pub id: CellId,
    /// `faces[dir][i]`; empty for directions of degree zero.
    pub faces: Vec<Vec<FaceDoc>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresheafDoc {
    pub format: String,
    pub arity: usize,
    pub truncation: Vec<usize>,
    pub cells: BTreeMap<String, Vec<CellDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<BTreeMap<String, BTreeMap<String, String>>>,
}

/// An embedded document or a path relative to the referring file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PresheafRef {
    Inline(Box<PresheafDoc>),
    File(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentDoc {
    pub cell: CellId,
    pub image: FaceDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapDoc {
    pub format: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<PresheafRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<PresheafRef>,
    pub assignment: BTreeMap<String, Vec<AssignmentDoc>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramDoc {
    pub format: String,
    pub category: Presentation,
    pub values: BTreeMap<String, PresheafRef>,
    pub arrow_maps: BTreeMap<String, MapDoc>,
}

fn degree_key(d: Multidegree) -> String {
    d.as_vec().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn check_format(found: &str, expected: &str) -> Result<()> {
    if found != expected {
        return Err(Error::Format(format!("expected format {expected}, found {found}")));
    }
    Ok(())
}

/// Position of each nondegenerate cell among the nondegenerate cells of its degree.
fn nondegenerate_positions(x: &Presheaf) -> Vec<HashMap<CellId, CellId>> {
    x.degrees().into_iter().map(|d| x.nondegenerate(d).into_iter().enumerate().map(|(i, c)| (c, i as CellId)).collect()).collect()
}

fn face_doc(x: &Presheaf, pos: &[HashMap<CellId, CellId>], d: Multidegree, c: CellId) -> FaceDoc {
    let nf = x.normal_form(d, c);
    FaceDoc { degree: degree_key(nf.degree), cell: pos[x.flat(nf.degree)][&nf.cell], degeneracies: nf.words }
}

pub fn presheaf_to_doc(x: &Presheaf) -> PresheafDoc {
    let pos = nondegenerate_positions(x);
    let mut cells = BTreeMap::new();
    for d in x.degrees() {
        let nd = x.nondegenerate(d);
        if nd.is_empty() {
            continue;
        }
        let docs = nd
            .into_iter()
            .enumerate()
            .map(|(i, c)| CellDoc {
                id: i as CellId,
                faces: (0..x.arity())
                    .map(|dir| {
                        if d.get(dir) == 0 {
                            return Vec::new();
                        }
                        (0..=d.get(dir)).map(|k| face_doc(x, &pos, d.lowered(dir), x.face(d, dir, k, c))).collect()
                    })
                    .collect(),
            })
            .collect();
        cells.insert(degree_key(d), docs);
    }
    PresheafDoc { format: PRESHEAF_FORMAT.into(), arity: x.arity(), truncation: x.truncation().as_vec(), cells, names: None }
}

/// A cell as `surj* c` for a nondegenerate generator `c` and one monotone
/// surjection per direction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Key {
    deg: Vec<usize>,
    cell: u32,
    surj: Vec<Vec<u8>>,
}

struct Generators {
    /// Generators per degree, in document order.
    cells: HashMap<Vec<usize>, Vec<CellId>>,
    /// `faces[(deg, cell)][dir][i]`.
    faces: HashMap<(Vec<usize>, CellId), Vec<Vec<Key>>>,
}

fn identity_surj(deg: &[usize]) -> Vec<Vec<u8>> {
    deg.iter().map(|&m| (0..=m as u8).collect()).collect()
}

fn key_of_face(f: &FaceDoc, arity: usize, ids: &HashMap<Vec<usize>, HashMap<CellId, CellId>>) -> Result<(Key, Vec<usize>)> {
    let deg = Multidegree::parse(&f.degree)?.as_vec();
    if deg.len() != arity || f.degeneracies.len() > arity {
        return Err(Error::Format(format!("face degree {} has the wrong arity", f.degree)));
    }
    let cell = *ids.get(&deg).and_then(|m| m.get(&f.cell)).ok_or_else(|| Error::MalformedCell(format!("unknown cell {} at {}", f.cell, f.degree)))?;
    let mut surj = identity_surj(&deg);
    let mut total = deg.clone();
    for (dir, word) in f.degeneracies.iter().enumerate() {
        if word.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::MalformedCell(format!("degeneracy word {word:?} is not strictly decreasing")));
        }
        let m = deg[dir] + word.len();
        if word.iter().any(|&j| j >= m) {
            return Err(Error::MalformedCell(format!("degeneracy word {word:?} out of range")));
        }
        // merge positions of the surjection are exactly the word's entries
        let mut s = Vec::with_capacity(m + 1);
        let mut v = 0u8;
        for j in 0..=m {
            s.push(v);
            if !word.contains(&j) {
                v += 1;
            }
        }
        surj[dir] = s;
        total[dir] = m;
    }
    Ok((Key { deg, cell, surj }, total))
}

impl Generators {
    /// `mu* c` for an injective monotone `mu` into the generator's degree.
    fn apply_mono(&self, deg: &[usize], cell: CellId, dir: usize, mu: &[u8]) -> Key {
        let k = deg[dir];
        if mu.len() == k + 1 {
            return Key { deg: deg.to_vec(), cell, surj: identity_surj(deg) };
        }
        let missing = (0..=k as u8).rev().find(|v| !mu.contains(v)).expect("a missing vertex");
        let face = &self.faces[&(deg.to_vec(), cell)][dir][missing as usize];
        let rest: Vec<u8> = mu.iter().map(|&v| if v > missing { v - 1 } else { v }).collect();
        self.apply(face, dir, &rest)
    }

    /// `alpha* x` for a monotone `alpha` into the degree of `x` in `dir`.
    fn apply(&self, x: &Key, dir: usize, alpha: &[u8]) -> Key {
        let composite: Vec<u8> = alpha.iter().map(|&a| x.surj[dir][a as usize]).collect();
        let mut mu: Vec<u8> = composite.clone();
        mu.dedup();
        let eps: Vec<u8> = composite.iter().map(|v| mu.iter().position(|m| m == v).expect("image") as u8).collect();
        let r = self.apply_mono(&x.deg, x.cell, dir, &mu);
        let surj = (0..x.surj.len())
            .map(|o| {
                if o == dir {
                    eps.iter().map(|&e| r.surj[dir][e as usize]).collect()
                } else {
                    x.surj[o].iter().map(|&s| r.surj[o][s as usize]).collect()
                }
            })
            .collect();
        Key { deg: r.deg, cell: r.cell, surj }
    }
}

/// Monotone surjections `[m] -> [k]`, in lexicographic order of merge positions.
fn surjections(m: usize, k: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    fn go(j: usize, m: usize, left: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if j == m {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let last = *cur.last().expect("nonempty");
        if left > 0 {
            cur.push(last + 1);
            go(j + 1, m, left - 1, cur, out);
            cur.pop();
        }
        if m - j > left {
            cur.push(last);
            go(j + 1, m, left, cur, out);
            cur.pop();
        }
    }
    if k <= m {
        go(0, m, k, &mut vec![0], &mut out);
    }
    out
}

fn product_of<T: Clone>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    lists.iter().fold(vec![Vec::new()], |acc, l| {
        acc.into_iter().flat_map(|p| l.iter().map(move |x| [p.clone(), vec![x.clone()]].concat())).collect()
    })
}

/// The presheaf with its generator ids: `ids[flat][doc id]` is the cell id.
pub struct ParsedPresheaf {
    pub presheaf: Arc<Presheaf>,
    ids: HashMap<Vec<usize>, HashMap<CellId, CellId>>,
}

impl ParsedPresheaf {
    /// The cell named by a normal form in document ids.
    pub fn resolve(&self, f: &FaceDoc) -> Result<(Multidegree, CellId)> {
        let d = Multidegree::parse(&f.degree)?;
        let c = *self.ids.get(&d.as_vec()).and_then(|m| m.get(&f.cell)).ok_or_else(|| Error::MalformedCell(format!("unknown cell {} at {}", f.cell, f.degree)))?;
        let mut words = f.degeneracies.clone();
        words.resize(d.arity(), Vec::new());
        self.presheaf.apply_degeneracies(d, c, &words)
    }

    /// The cell id of a generator.
    pub fn generator(&self, d: Multidegree, id: CellId) -> Result<CellId> {
        self.ids.get(&d.as_vec()).and_then(|m| m.get(&id)).copied().ok_or_else(|| Error::MalformedCell(format!("unknown cell {id} at {d}")))
    }
}

pub fn presheaf_from_doc(doc: &PresheafDoc) -> Result<ParsedPresheaf> {
    check_format(&doc.format, PRESHEAF_FORMAT)?;
    let t = Multidegree::new(&doc.truncation)?;
    if t.arity() != doc.arity {
        return Err(Error::Format(format!("arity {} with truncation {t}", doc.arity)));
    }
    let mut doc_ids: HashMap<Vec<usize>, HashMap<CellId, CellId>> = HashMap::new();
    let mut cells: HashMap<Vec<usize>, Vec<CellId>> = HashMap::new();
    for (k, list) in &doc.cells {
        let d = Multidegree::parse(k)?;
        if d.arity() != doc.arity || !d.le(&t) {
            return Err(Error::OutOfRange { degree: d.to_string(), truncation: t.to_string() });
        }
        let mut m = HashMap::new();
        for (i, c) in list.iter().enumerate() {
            if m.insert(c.id, i as CellId).is_some() {
                return Err(Error::MalformedCell(format!("duplicate cell id {} at {k}", c.id)));
            }
        }
        cells.insert(d.as_vec(), (0..list.len() as CellId).collect());
        doc_ids.insert(d.as_vec(), m);
    }
    let mut faces = HashMap::new();
    for (k, list) in &doc.cells {
        let d = Multidegree::parse(k)?.as_vec();
        for (i, c) in list.iter().enumerate() {
            if c.faces.len() != doc.arity {
                return Err(Error::MalformedCell(format!("cell {} at {k} needs faces in {} directions", c.id, doc.arity)));
            }
            let mut per_dir = Vec::new();
            for (dir, fs) in c.faces.iter().enumerate() {
                let expected = if d[dir] == 0 { 0 } else { d[dir] + 1 };
                if fs.len() != expected {
                    return Err(Error::MalformedCell(format!("cell {} at {k} has {} faces in direction {dir}", c.id, fs.len())));
                }
                let mut keys = Vec::new();
                for f in fs {
                    let (key, total) = key_of_face(f, doc.arity, &doc_ids)?;
                    let mut want = d.clone();
                    want[dir] -= 1;
                    if total != want {
                        return Err(Error::MalformedCell(format!("face of cell {} at {k} has the wrong degree", c.id)));
                    }
                    keys.push(key);
                }
                per_dir.push(keys);
            }
            faces.insert((d.clone(), i as CellId), per_dir);
        }
    }
    let gens = Generators { cells, faces };
    let mut gen_degrees: Vec<&Vec<usize>> = gens.cells.keys().collect();
    gen_degrees.sort();
    let built = Presheaf::from_fn(
        t,
        |d| {
            let dv = d.as_vec();
            let mut out: Vec<Key> = gens.cells.get(&dv).into_iter().flatten().map(|&c| Key { deg: dv.clone(), cell: c, surj: identity_surj(&dv) }).collect();
            for g in &gen_degrees {
                if **g == dv || !g.iter().zip(&dv).all(|(a, b)| a <= b) {
                    continue;
                }
                let per_dir: Vec<Vec<Vec<u8>>> = (0..dv.len()).map(|o| surjections(dv[o], g[o])).collect();
                for &c in &gens.cells[*g] {
                    for surj in product_of(&per_dir) {
                        out.push(Key { deg: (*g).clone(), cell: c, surj });
                    }
                }
            }
            out
        },
        |d, dir, i, key| {
            let m = d.get(dir);
            let delta: Vec<u8> = (0..=m as u8).filter(|&v| v as usize != i).collect();
            gens.apply(key, dir, &delta)
        },
        |d, dir, j, key| {
            let m = d.get(dir);
            let sigma: Vec<u8> = (0..=m as u8 + 1).map(|v| if v as usize <= j { v } else { v - 1 }).collect();
            gens.apply(key, dir, &sigma)
        },
    )?;
    let presheaf = Arc::new(built.presheaf);
    let valid = presheaf.validate();
    if !valid.is_holds() {
        return Err(Error::MalformedCell(format!("simplicial identities fail: {}", valid.summary())));
    }
    let mut ids = HashMap::new();
    for (d, m) in doc_ids {
        let deg = Multidegree::new(&d)?;
        let resolved = m
            .into_iter()
            .map(|(doc_id, i)| {
                let key = Key { deg: d.clone(), cell: i, surj: identity_surj(&d) };
                (doc_id, built.index[presheaf.flat(deg)][&key])
            })
            .collect();
        ids.insert(d, resolved);
    }
    Ok(ParsedPresheaf { presheaf, ids })
}

pub fn map_to_doc(f: &PresheafMap, embed: bool) -> MapDoc {
    let (s, t) = (f.source(), f.target());
    let tpos = nondegenerate_positions(t);
    let mut assignment = BTreeMap::new();
    for d in s.degrees() {
        let nd = s.nondegenerate(d);
        if nd.is_empty() {
            continue;
        }
        let row = nd.into_iter().enumerate().map(|(i, c)| AssignmentDoc { cell: i as CellId, image: face_doc(t, &tpos, d, f.image(d, c)) }).collect();
        assignment.insert(degree_key(d), row);
    }
    let inline = |x: &Presheaf| Some(PresheafRef::Inline(Box::new(presheaf_to_doc(x))));
    MapDoc {
        format: MAP_FORMAT.into(),
        source: if embed { inline(s) } else { None },
        target: if embed { inline(t) } else { None },
        assignment,
    }
}

/// A map between already parsed endpoints.
pub fn map_between(doc: &MapDoc, source: &ParsedPresheaf, target: &ParsedPresheaf) -> Result<PresheafMap> {
    check_format(&doc.format, MAP_FORMAT)?;
    let s = &source.presheaf;
    let mut assign: Vec<Vec<CellId>> = s.degrees().into_iter().map(|d| vec![0; s.count(d)]).collect();
    let mut seen = 0;
    for (k, row) in &doc.assignment {
        let d = Multidegree::parse(k)?;
        for a in row {
            let c = source.generator(d, a.cell)?;
            let (e, img) = target.resolve(&a.image)?;
            if e != d {
                return Err(Error::MalformedCell(format!("image of cell {} at {k} has degree {e}", a.cell)));
            }
            assign[s.flat(d)][c as usize] = img;
            seen += 1;
        }
    }
    let needed: usize = s.degrees().into_iter().map(|d| s.nondegenerate_count(d)).sum();
    if seen != needed {
        return Err(Error::MalformedCell(format!("{seen} assignments for {needed} nondegenerate cells")));
    }
    PresheafMap::from_nondegenerate(s.clone(), target.presheaf.clone(), &assign)
}

pub fn diagram_to_doc(f: &DiagramFunctor) -> DiagramDoc {
    let names = f.category.object_names();
    DiagramDoc {
        format: DIAGRAM_FORMAT.into(),
        category: f.category.presentation(),
        values: names.iter().zip(&f.values).map(|(n, v)| (n.clone(), PresheafRef::Inline(Box::new(presheaf_to_doc(v))))).collect(),
        arrow_maps: f.category.arrows().iter().zip(&f.arrow_maps).map(|(a, m)| (a.name.clone(), map_to_doc(m, false))).collect(),
    }
}

/// Reads JSON documents, resolving file references relative to a directory.
pub struct Loader {
    base: PathBuf,
}

impl Loader {
    pub fn new(base: impl Into<PathBuf>) -> Self {
        Loader { base: base.into() }
    }

    /// A loader for references inside `file`.
    pub fn beside(file: &Path) -> Self {
        Loader::new(file.parent().map(Path::to_path_buf).unwrap_or_default())
    }

    fn read<T: for<'de> Deserialize<'de>>(&self, path: &str) -> Result<T> {
        let text = std::fs::read_to_string(self.base.join(path)).map_err(|e| Error::Format(format!("{path}: {e}")))?;
        serde_json::from_str(&text).map_err(|e| Error::Format(format!("{path}: {e}")))
    }

    pub fn presheaf_ref(&self, r: &PresheafRef) -> Result<ParsedPresheaf> {
        match r {
            PresheafRef::Inline(doc) => presheaf_from_doc(doc),
            PresheafRef::File(p) => presheaf_from_doc(&self.read(p)?),
        }
    }

    /// A map whose endpoints are embedded or referenced.
    pub fn map(&self, doc: &MapDoc) -> Result<PresheafMap> {
        let endpoint = |r: &Option<PresheafRef>, what: &str| -> Result<ParsedPresheaf> {
            self.presheaf_ref(r.as_ref().ok_or_else(|| Error::Format(format!("map without a {what}")))?)
        };
        map_between(doc, &endpoint(&doc.source, "source")?, &endpoint(&doc.target, "target")?)
    }

    pub fn diagram(&self, doc: &DiagramDoc) -> Result<DiagramFunctor> {
        check_format(&doc.format, DIAGRAM_FORMAT)?;
        let c = Arc::new(FiniteCategory::from_presentation("diagram", &doc.category)?);
        let values = c
            .object_names()
            .iter()
            .map(|n| self.presheaf_ref(doc.values.get(n).ok_or_else(|| Error::Format(format!("no value for object {n}")))?))
            .collect::<Result<Vec<_>>>()?;
        let maps = c
            .arrows()
            .iter()
            .map(|a| {
                let m = doc.arrow_maps.get(&a.name).ok_or_else(|| Error::Format(format!("no map for arrow {}", a.name)))?;
                map_between(m, &values[a.source], &values[a.target])
            })
            .collect::<Result<Vec<_>>>()?;
        DiagramFunctor::new(c, values.into_iter().map(|v| v.presheaf).collect(), maps)
    }
}

pub fn to_string<T: Serialize>(doc: &T) -> String {
    serde_json::to_string_pretty(doc).expect("serializable document")
}

pub fn parse_presheaf(text: &str) -> Result<Arc<Presheaf>> {
    let doc: PresheafDoc = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    Ok(presheaf_from_doc(&doc)?.presheaf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{find_isomorphism, DEFAULT_BUDGET};
    use crate::shapes;

    fn round_trip(x: &Arc<Presheaf>) {
        let doc = presheaf_to_doc(x);
        let parsed = presheaf_from_doc(&doc).unwrap();
        assert_eq!(parsed.presheaf.total_cells(), x.total_cells());
        assert_eq!(presheaf_to_doc(&parsed.presheaf), doc);
        assert!(find_isomorphism(x, &parsed.presheaf, DEFAULT_BUDGET).unwrap().is_some());
    }

    #[test]
    fn surjection_counts() {
        assert_eq!(surjections(3, 1).len(), 3);
        assert_eq!(surjections(4, 2).len(), 6);
        assert_eq!(surjections(2, 2), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn shapes_round_trip() {
        let t2 = Multidegree::new(&[2, 2]).unwrap();
        round_trip(&shapes::delta(3, 4).unwrap());
        round_trip(&shapes::horn(3, 1, 4).unwrap());
        round_trip(&shapes::j(1, 3).unwrap());
        round_trip(&shapes::g(2, t2).unwrap());
        round_trip(&shapes::e(1, t2).unwrap());
        round_trip(&shapes::f2(1, 1, Multidegree::new(&[2, 2, 1]).unwrap()).unwrap());
        round_trip(&Arc::new(Presheaf::empty(t2)));
    }

    #[test]
    fn maps_round_trip() {
        let t = Multidegree::new(&[2, 1]).unwrap();
        let f = shapes::spine_inclusion(2, t).unwrap();
        let doc = map_to_doc(&f, true);
        let text = to_string(&doc);
        let back: MapDoc = serde_json::from_str(&text).unwrap();
        let g = Loader::new(".").map(&back).unwrap();
        assert_eq!(map_to_doc(&g, true), doc);
        assert!(g.injectivity_violation().is_none());
    }

    #[test]
    fn broken_faces_are_rejected() {
        let mut doc = presheaf_to_doc(&shapes::delta(2, 2).unwrap());
        let edges = doc.cells.get_mut("1").unwrap();
        edges[0].faces[0][0].cell = edges[0].faces[0][1].cell;
        assert!(presheaf_from_doc(&doc).is_err());
        let mut doc = presheaf_to_doc(&shapes::delta(1, 1).unwrap());
        doc.format = "presheaf/2".into();
        assert!(matches!(presheaf_from_doc(&doc), Err(Error::Format(_))));
    }

    #[test]
    fn diagrams_round_trip() {
        let t = Multidegree::new(&[1, 1]).unwrap();
        let c = Arc::new(FiniteCategory::chain(1));
        let e = Arc::new(Presheaf::empty(t));
        let d = DiagramFunctor::new(c, vec![e, shapes::f(1, t).unwrap()], vec![PresheafMap::from_empty(shapes::f(1, t).unwrap())]).unwrap();
        let doc = diagram_to_doc(&d);
        let back = Loader::new(".").diagram(&serde_json::from_str(&to_string(&doc)).unwrap()).unwrap();
        assert_eq!(diagram_to_doc(&back), doc);
    }
}
