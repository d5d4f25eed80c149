//! Finite categories presented by generators and relations, and their nerves.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::presheaf::{Built, CellId, Multidegree, Presheaf, PresheafMap};

const MAX_MORPHISMS: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

/// A morphism in normal form: a word of generating arrows in diagrammatic
/// order (first arrow first). Identities have empty words.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Morphism {
    pub source: usize,
    pub target: usize,
    pub word: Vec<usize>,
}

/// The serializable presentation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub objects: Vec<String>,
    pub arrows: Vec<Arrow>,
    #[serde(default)]
    pub relations: Vec<(Vec<String>, Vec<String>)>,
}

#[derive(Clone, Debug)]
pub struct FiniteCategory {
    name: String,
    objects: Vec<String>,
    arrows: Vec<Arrow>,
    rules: Vec<(Vec<usize>, Vec<usize>)>,
    morphisms: Vec<Morphism>,
    /// `compose[a][b]` is `b ∘ a` when `target(a) = source(b)`.
    compose: Vec<Vec<Option<u32>>>,
}

fn shortlex_greater(a: &[usize], b: &[usize]) -> bool {
    a.len() > b.len() || (a.len() == b.len() && a > b)
}

fn rewrite(rules: &[(Vec<usize>, Vec<usize>)], word: &[usize]) -> Vec<usize> {
    let mut w = word.to_vec();
    'outer: loop {
        for (lhs, rhs) in rules {
            if lhs.is_empty() || lhs.len() > w.len() {
                continue;
            }
            if let Some(pos) = (0..=w.len() - lhs.len()).find(|&p| w[p..p + lhs.len()] == lhs[..]) {
                w.splice(pos..pos + lhs.len(), rhs.iter().copied());
                continue 'outer;
            }
        }
        return w;
    }
}

impl FiniteCategory {
    /// Builds the category from a presentation; relations are word pairs in
    /// diagrammatic order, with the empty word standing for an identity.
    pub fn new(name: &str, objects: Vec<String>, arrows: Vec<Arrow>, relations: Vec<(Vec<usize>, Vec<usize>)>) -> Result<Self> {
        for (g, a) in arrows.iter().enumerate() {
            if a.source >= objects.len() || a.target >= objects.len() {
                return Err(Error::InvalidCategory(format!("arrow {g} has an unknown endpoint")));
            }
        }
        let ends = |w: &[usize]| -> Result<Option<(usize, usize)>> {
            if w.is_empty() {
                return Ok(None);
            }
            for pair in w.windows(2) {
                if arrows.get(pair[0]).map(|a| a.target) != arrows.get(pair[1]).map(|a| a.source) {
                    return Err(Error::InvalidCategory("relation word is not composable".into()));
                }
            }
            let first = arrows.get(w[0]).ok_or_else(|| Error::InvalidCategory("unknown arrow in relation".into()))?;
            let last = arrows.get(w[w.len() - 1]).ok_or_else(|| Error::InvalidCategory("unknown arrow in relation".into()))?;
            Ok(Some((first.source, last.target)))
        };
        let mut rules = Vec::new();
        for (u, v) in &relations {
            match (ends(u)?, ends(v)?) {
                (Some(a), Some(b)) if a != b => {
                    return Err(Error::InvalidCategory("relation sides have different endpoints".into()))
                }
                (Some((s, t)), None) | (None, Some((s, t))) if s != t => {
                    return Err(Error::InvalidCategory("identity relation on a non-endomorphism".into()))
                }
                _ => {}
            }
            if shortlex_greater(u, v) {
                rules.push((u.clone(), v.clone()));
            } else if shortlex_greater(v, u) {
                rules.push((v.clone(), u.clone()));
            }
        }
        let mut morphisms: Vec<Morphism> =
            (0..objects.len()).map(|o| Morphism { source: o, target: o, word: Vec::new() }).collect();
        let mut seen: HashMap<(usize, Vec<usize>), usize> =
            morphisms.iter().enumerate().map(|(i, m)| ((m.source, m.word.clone()), i)).collect();
        let mut next = 0;
        while next < morphisms.len() {
            let m = morphisms[next].clone();
            next += 1;
            for (g, a) in arrows.iter().enumerate() {
                if a.source != m.target {
                    continue;
                }
                let mut w = m.word.clone();
                w.push(g);
                let w = rewrite(&rules, &w);
                let key = (m.source, w.clone());
                if !seen.contains_key(&key) {
                    if morphisms.len() >= MAX_MORPHISMS {
                        return Err(Error::InvalidCategory(format!("more than {MAX_MORPHISMS} morphisms")));
                    }
                    let target = w.last().map_or(m.source, |&l| arrows[l].target);
                    seen.insert(key, morphisms.len());
                    morphisms.push(Morphism { source: m.source, target, word: w });
                }
            }
        }
        let compose = morphisms
            .iter()
            .map(|a| {
                morphisms
                    .iter()
                    .map(|b| {
                        if a.target != b.source {
                            return None;
                        }
                        let mut w = a.word.clone();
                        w.extend_from_slice(&b.word);
                        seen.get(&(a.source, rewrite(&rules, &w))).map(|&i| i as u32)
                    })
                    .collect()
            })
            .collect();
        let cat = FiniteCategory { name: name.into(), objects, arrows, rules, morphisms, compose };
        cat.check_associative()?;
        Ok(cat)
    }

    fn check_associative(&self) -> Result<()> {
        let n = self.morphisms.len();
        for a in 0..n {
            for b in 0..n {
                let Some(ab) = self.compose[a][b] else { continue };
                for c in 0..n {
                    let Some(bc) = self.compose[b][c] else { continue };
                    if self.compose[ab as usize][c] != self.compose[a][bc as usize] || self.compose[ab as usize][c].is_none() {
                        return Err(Error::InvalidCategory("relations are not confluent".into()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn from_presentation(name: &str, p: &Presentation) -> Result<Self> {
        let lookup = |s: &String| -> Result<usize> {
            p.arrows
                .iter()
                .position(|a| &a.name == s)
                .ok_or_else(|| Error::InvalidCategory(format!("unknown arrow {s}")))
        };
        let relations = p
            .relations
            .iter()
            .map(|(u, v)| Ok((u.iter().map(lookup).collect::<Result<_>>()?, v.iter().map(lookup).collect::<Result<_>>()?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(name, p.objects.clone(), p.arrows.clone(), relations)
    }

    pub fn presentation(&self) -> Presentation {
        let names = |w: &Vec<usize>| w.iter().map(|&g| self.arrows[g].name.clone()).collect();
        Presentation {
            objects: self.objects.clone(),
            arrows: self.arrows.clone(),
            relations: self.rules.iter().map(|(u, v)| (names(u), names(v))).collect(),
        }
    }

    /// The poset `[n] = {0 < 1 < ... < n}`.
    pub fn chain(n: usize) -> Self {
        let objects = (0..=n).map(|i| i.to_string()).collect();
        let arrows = (0..n).map(|i| Arrow { name: format!("{i}{}", i + 1), source: i, target: i + 1 }).collect();
        Self::new(&format!("[{n}]"), objects, arrows, Vec::new()).expect("chain category")
    }

    /// The chaotic groupoid on `l + 1` objects: exactly one arrow between
    /// any two objects.
    pub fn chaotic(l: usize) -> Self {
        let objects = (0..=l).map(|i| i.to_string()).collect();
        let mut arrows = Vec::new();
        let mut relations = Vec::new();
        for i in 0..l {
            arrows.push(Arrow { name: format!("{i}{}", i + 1), source: i, target: i + 1 });
            arrows.push(Arrow { name: format!("{}{i}", i + 1), source: i + 1, target: i });
            relations.push((vec![2 * i, 2 * i + 1], vec![]));
            relations.push((vec![2 * i + 1, 2 * i], vec![]));
        }
        Self::new(&format!("I[{l}]"), objects, arrows, relations).expect("chaotic groupoid")
    }

    /// A finite poset given by its covering relations; all parallel paths
    /// are identified.
    pub fn poset(name: &str, size: usize, covers: &[(usize, usize)]) -> Result<Self> {
        let objects = (0..size).map(|i| i.to_string()).collect();
        let arrows: Vec<Arrow> =
            covers.iter().map(|&(s, t)| Arrow { name: format!("{s}<{t}"), source: s, target: t }).collect();
        // paths between every pair, by depth-first search on the cover graph
        let mut paths: Vec<Vec<Vec<usize>>> = vec![Vec::new(); size * size];
        fn walk(arrows: &[Arrow], start: usize, at: usize, cur: &mut Vec<usize>, paths: &mut Vec<Vec<Vec<usize>>>, size: usize, depth: usize) -> Result<()> {
            if depth > size {
                return Err(Error::InvalidCategory("cover relation has a cycle".into()));
            }
            for (g, a) in arrows.iter().enumerate() {
                if a.source == at {
                    cur.push(g);
                    paths[start * size + a.target].push(cur.clone());
                    walk(arrows, start, a.target, cur, paths, size, depth + 1)?;
                    cur.pop();
                }
            }
            Ok(())
        }
        for s in 0..size {
            walk(&arrows, s, s, &mut Vec::new(), &mut paths, size, 0)?;
        }
        let mut relations = Vec::new();
        for ps in &paths {
            for p in ps.iter().skip(1) {
                relations.push((p.clone(), ps[0].clone()));
            }
        }
        Self::new(name, objects, arrows, relations)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn object_names(&self) -> &[String] {
        &self.objects
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn morphism(&self, m: usize) -> &Morphism {
        &self.morphisms[m]
    }

    /// Identities are numbered like the objects.
    pub fn identity(&self, object: usize) -> usize {
        object
    }

    /// The morphism named by a generating arrow.
    pub fn generator(&self, g: usize) -> usize {
        let a = &self.arrows[g];
        self.morphisms.iter().position(|m| m.source == a.source && m.word == rewrite(&self.rules, &[g])).expect("generator")
    }

    /// `b ∘ a`, if composable.
    pub fn compose(&self, a: usize, b: usize) -> Option<usize> {
        self.compose[a][b].map(|x| x as usize)
    }

    pub fn hom(&self, c: usize, d: usize) -> Vec<usize> {
        (0..self.morphisms.len()).filter(|&m| self.morphisms[m].source == c && self.morphisms[m].target == d).collect()
    }

    pub fn is_groupoid(&self) -> bool {
        (0..self.morphisms.len()).all(|a| {
            let m = &self.morphisms[a];
            self.hom(m.target, m.source)
                .into_iter()
                .any(|b| self.compose(a, b) == Some(m.source) && self.compose(b, a) == Some(m.target))
        })
    }

    /// Composable strings of `m` morphisms; for `m = 0`, the objects.
    pub fn composable(&self, m: usize) -> Vec<Vec<u32>> {
        if m == 0 {
            return (0..self.objects.len() as u32).map(|o| vec![o]).collect();
        }
        let mut cur: Vec<Vec<u32>> = (0..self.morphisms.len() as u32).map(|a| vec![a]).collect();
        for _ in 1..m {
            let mut next = Vec::new();
            for s in &cur {
                let last = &self.morphisms[*s.last().unwrap() as usize];
                for (b, mb) in self.morphisms.iter().enumerate() {
                    if mb.source == last.target {
                        let mut t = s.clone();
                        t.push(b as u32);
                        next.push(t);
                    }
                }
            }
            cur = next;
        }
        cur
    }

    /// First and last objects of a nerve cell of degree `m`.
    pub fn endpoints(&self, m: usize, key: &[u32]) -> (usize, usize) {
        if m == 0 {
            (key[0] as usize, key[0] as usize)
        } else {
            (self.morphisms[key[0] as usize].source, self.morphisms[key[m - 1] as usize].target)
        }
    }

    /// Object at vertex `i` of a nerve cell.
    pub fn vertex(&self, m: usize, key: &[u32], i: usize) -> usize {
        if m == 0 {
            key[0] as usize
        } else if i == 0 {
            self.morphisms[key[0] as usize].source
        } else {
            self.morphisms[key[i - 1] as usize].target
        }
    }

    pub(crate) fn nerve_face(&self, m: usize, key: &[u32], i: usize) -> Vec<u32> {
        if m == 1 {
            let a = &self.morphisms[key[0] as usize];
            return vec![if i == 0 { a.target } else { a.source } as u32];
        }
        let mut k = key.to_vec();
        if i == 0 {
            k.remove(0);
        } else if i == m {
            k.pop();
        } else {
            let c = self.compose(k[i - 1] as usize, k[i] as usize).expect("composable") as u32;
            k.splice(i - 1..=i, [c]);
        }
        k
    }

    pub(crate) fn nerve_degen(&self, m: usize, key: &[u32], i: usize) -> Vec<u32> {
        if m == 0 {
            return vec![key[0]];
        }
        let obj = self.vertex(m, key, i);
        let mut k = key.to_vec();
        k.insert(i, obj as u32);
        k
    }

    /// The nerve, truncated at `t`, with composable strings as keys.
    pub fn nerve_built(&self, t: usize) -> Result<Built<Vec<u32>>> {
        Presheaf::from_fn(
            Multidegree::new(&[t])?,
            |d| self.composable(d.get(0)),
            |d, _, i, k| self.nerve_face(d.get(0), k, i),
            |d, _, i, k| self.nerve_degen(d.get(0), k, i),
        )
    }

    pub fn nerve(&self, t: usize) -> Result<Arc<Presheaf>> {
        Ok(Arc::new(self.nerve_built(t)?.presheaf))
    }

    /// Nerve of the slice `C/x` with its projection to the nerve of `C`.
    pub fn slice_nerve(&self, x: usize, t: usize) -> Result<PresheafMap> {
        if x >= self.objects.len() {
            return Err(Error::InvalidSpec(format!("object {x} out of range")));
        }
        let base = self.nerve_built(t)?;
        let built = Presheaf::from_fn(
            Multidegree::new(&[t])?,
            |d| {
                let m = d.get(0);
                let mut out = Vec::new();
                for s in self.composable(m) {
                    let (_, last) = self.endpoints(m, &s);
                    for a in self.hom(last, x) {
                        out.push((s.clone(), a as u32));
                    }
                }
                out
            },
            |d, _, i, (s, a)| {
                let m = d.get(0);
                let a2 = if i == m && m >= 1 {
                    self.compose(s[m - 1] as usize, *a as usize).expect("composable") as u32
                } else {
                    *a
                };
                (self.nerve_face(m, s, i), a2)
            },
            |d, _, i, (s, a)| (self.nerve_degen(d.get(0), s, i), *a),
        )?;
        let images = built
            .presheaf
            .degrees()
            .into_iter()
            .map(|d| {
                built.keys[built.presheaf.flat(d)].iter().map(|(s, _)| base.id_of(d, s).expect("base cell") as CellId).collect()
            })
            .collect();
        PresheafMap::new(Arc::new(built.presheaf), Arc::new(base.presheaf), images)
    }
}
