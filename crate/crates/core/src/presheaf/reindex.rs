//! Precomposition with functors `Δ^b -> Δ^a` built from diagonals,
//! projections and constant evaluations.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{CellId, Multidegree, Presheaf, PresheafMap};
use crate::error::{Error, Result};

/// Where one source direction is read from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Slot {
    /// The source direction follows this output direction.
    Dir(usize),
    /// The source direction is evaluated at a fixed degree.
    Fixed(usize),
}

/// A reindexing functor: `(X ∘ φ)_e = X_{φ(e)}` with `φ(e)_j = e_{slot_j}`.
/// Output directions not referenced by any slot are constant, and need an
/// explicit truncation bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reindexing {
    pub name: String,
    pub source_arity: usize,
    pub output_arity: usize,
    pub slots: Vec<Slot>,
    pub constant_bounds: Vec<Option<usize>>,
}

impl Reindexing {
    fn new(name: &str, source_arity: usize, output_arity: usize, slots: Vec<Slot>) -> Self {
        Reindexing { name: name.into(), source_arity, output_arity, slots, constant_bounds: vec![None; output_arity] }
    }

    /// Sets the truncation bound of a constant output direction.
    pub fn with_bound(mut self, dir: usize, bound: usize) -> Self {
        self.constant_bounds[dir] = Some(bound);
        self
    }

    /// `Diag₁`: `(X)_{n,l} = Y_{n,l,l}`.
    pub fn diag1() -> Self {
        Self::new("Diag1", 3, 2, vec![Slot::Dir(0), Slot::Dir(1), Slot::Dir(1)])
    }

    /// Diagonal of a bisimplicial set, `(diag X)_n = X_{n,n}`.
    pub fn fdiag() -> Self {
        Self::new("fDiag", 2, 1, vec![Slot::Dir(0), Slot::Dir(0)])
    }

    /// `LEmb = p₁^*`: `LEmb(X)_{k,n,l} = X_{n,l}`, constant in the level direction.
    pub fn lemb(level_bound: usize) -> Self {
        Self::new("LEmb", 2, 3, vec![Slot::Dir(1), Slot::Dir(2)]).with_bound(0, level_bound)
    }

    /// `VEmb = p₂^*`: `VEmb(X)_{k,n,l} = X_{k,l}`, constant in the categorical direction.
    pub fn vemb(categorical_bound: usize) -> Self {
        Self::new("VEmb", 2, 3, vec![Slot::Dir(0), Slot::Dir(2)]).with_bound(1, categorical_bound)
    }

    /// `Val`: `Val(Y)_{k,l} = Y_{k,0,l}`.
    pub fn val() -> Self {
        Self::val_at(0)
    }

    /// `Val_n`: `Val_n(Y)_{k,l} = Y_{k,n,l}`.
    pub fn val_at(n: usize) -> Self {
        let mut r = Self::new("Val", 3, 2, vec![Slot::Dir(0), Slot::Fixed(n), Slot::Dir(1)]);
        if n > 0 {
            r.name = format!("Val_{n}");
        }
        r
    }

    /// `LFib`: `LFib(Y)_{n,l} = Y_{0,n,l}`.
    pub fn lfib() -> Self {
        Self::level(0)
    }

    /// The `k`-th level `Y_k`: `(n,l) -> Y_{k,n,l}`.
    pub fn level(k: usize) -> Self {
        let mut r = Self::new("LFib", 3, 2, vec![Slot::Fixed(k), Slot::Dir(0), Slot::Dir(1)]);
        if k > 0 {
            r.name = format!("LFib_{k}");
        }
        r
    }

    /// The space `X_n` of a simplicial space: `l -> X_{n,l}`.
    pub fn column(n: usize) -> Self {
        Self::new("column", 2, 1, vec![Slot::Fixed(n), Slot::Dir(0)])
    }

    /// Constant simplicial space on a space: `X_{k,l} = S_l`.
    pub fn constant_space(categorical_bound: usize) -> Self {
        Self::new("const", 1, 2, vec![Slot::Dir(1)]).with_bound(0, categorical_bound)
    }

    /// Discrete simplicial space on a simplicial set: `X_{k,l} = S_k`.
    pub fn discrete(space_bound: usize) -> Self {
        Self::new("disc", 1, 2, vec![Slot::Dir(0)]).with_bound(1, space_bound)
    }

    /// Looks up a reindexing by its command-line name.
    pub fn by_name(name: &str, bound: usize) -> Result<Self> {
        Ok(match name {
            "Diag1" | "diag1" => Self::diag1(),
            "fDiag" | "fdiag" => Self::fdiag(),
            "LEmb" | "lemb" | "p1" => Self::lemb(bound),
            "VEmb" | "vemb" | "p2" => Self::vemb(bound),
            "Val" | "val" => Self::val(),
            "LFib" | "lfib" => Self::lfib(),
            "const" => Self::constant_space(bound),
            "disc" => Self::discrete(bound),
            other => {
                if let Some(n) = other.strip_prefix("Val_").and_then(|s| s.parse().ok()) {
                    Self::val_at(n)
                } else if let Some(k) = other.strip_prefix("LFib_").and_then(|s| s.parse().ok()) {
                    Self::level(k)
                } else {
                    return Err(Error::UnsupportedFunctor(other.to_string()));
                }
            }
        })
    }

    /// `other ∘ self`, i.e. reindex along `self` and then along `other`.
    pub fn then(&self, other: &Reindexing) -> Result<Reindexing> {
        if other.source_arity != self.output_arity {
            return Err(Error::ArityMismatch { expected: self.output_arity, found: other.source_arity });
        }
        let slots = self
            .slots
            .iter()
            .map(|s| match *s {
                Slot::Fixed(m) => Slot::Fixed(m),
                Slot::Dir(t) => other.slots[t],
            })
            .collect();
        let mut constant_bounds = other.constant_bounds.clone();
        for (t, s) in other.slots.iter().enumerate() {
            if let (Slot::Dir(u), Some(b)) = (s, self.constant_bounds[t]) {
                constant_bounds[*u] = Some(constant_bounds[*u].map_or(b, |c| c.min(b)));
            }
        }
        Ok(Reindexing {
            name: format!("{}.{}", other.name, self.name),
            source_arity: self.source_arity,
            output_arity: other.output_arity,
            slots,
            constant_bounds,
        })
    }

    /// Output truncation for a source of truncation `t`.
    pub fn output_truncation(&self, t: Multidegree) -> Result<Multidegree> {
        if t.arity() != self.source_arity {
            return Err(Error::ArityMismatch { expected: self.source_arity, found: t.arity() });
        }
        let mut out = vec![usize::MAX; self.output_arity];
        for (j, s) in self.slots.iter().enumerate() {
            match *s {
                Slot::Dir(u) => out[u] = out[u].min(t.get(j)),
                Slot::Fixed(m) if m > t.get(j) => {
                    return Err(Error::OutOfRange { degree: format!("{m} in direction {j}"), truncation: t.to_string() })
                }
                Slot::Fixed(_) => {}
            }
        }
        for (u, b) in self.constant_bounds.iter().enumerate() {
            if let Some(b) = b {
                out[u] = out[u].min(*b);
            }
            if out[u] == usize::MAX {
                return Err(Error::UnsupportedFunctor(format!(
                    "{}: output direction {u} is constant and has no truncation bound",
                    self.name
                )));
            }
        }
        Multidegree::new(&out)
    }

    fn source_degree(&self, e: Multidegree) -> Multidegree {
        let v: Vec<usize> = self
            .slots
            .iter()
            .map(|s| match *s {
                Slot::Dir(u) => e.get(u),
                Slot::Fixed(m) => m,
            })
            .collect();
        Multidegree::new(&v).expect("source degree")
    }

    fn followers(&self, u: usize) -> Vec<usize> {
        (0..self.source_arity).filter(|&j| self.slots[j] == Slot::Dir(u)).collect()
    }

    /// Reindexes a presheaf.
    pub fn apply(&self, x: &Presheaf) -> Result<Presheaf> {
        let t = self.output_truncation(x.truncation())?;
        Ok(Presheaf::from_fn(
            t,
            |e| (0..x.count(self.source_degree(e)) as CellId).collect(),
            |e, u, i, &c| {
                let mut d = self.source_degree(e);
                let mut cell = c;
                for j in self.followers(u) {
                    cell = x.face(d, j, i, cell);
                    d = d.lowered(j);
                }
                cell
            },
            |e, u, i, &c| {
                let mut d = self.source_degree(e);
                let mut cell = c;
                for j in self.followers(u) {
                    cell = x.degen(d, j, i, cell);
                    d = d.raised(j);
                }
                cell
            },
        )?
        .presheaf)
    }

    /// Reindexes a map.
    pub fn apply_map(&self, f: &PresheafMap) -> Result<PresheafMap> {
        let s = Arc::new(self.apply(f.source())?);
        let t = Arc::new(self.apply(f.target())?);
        let images = s.degrees().into_iter().map(|e| f.images_at(self.source_degree(e)).to_vec()).collect();
        PresheafMap::new_unchecked(s, t, images)
    }
}
