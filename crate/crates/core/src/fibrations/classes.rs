//! Reedy left and right fibrations of trisimplicial sets and the six
//! fibration classes.

use serde::{Deserialize, Serialize};

use super::local::{is_local, LocalityOptions, Localizer, LocalizerSet};
use super::reedy::{is_bireedy_fib, is_left_fib, is_right_fib, lemb_normalize, ReedyMode};
use crate::error::{Error, Result};
use crate::presheaf::{PresheafMap, Reindexing};
use crate::verdict::{Labeled, Verdict};

/// Which vertex the homotopy pullback squares are taken along.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variance {
    /// First vertex: left fibrations.
    Left,
    /// Last vertex: right fibrations.
    Right,
}

/// The fibration classes of trisimplicial maps over an `LEmb` base.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FibrationClass {
    SegalCocart,
    SegalCart,
    Cocart,
    Cart,
    Left,
    Right,
}

impl FibrationClass {
    pub const ALL: [FibrationClass; 6] = [
        FibrationClass::SegalCocart,
        FibrationClass::SegalCart,
        FibrationClass::Cocart,
        FibrationClass::Cart,
        FibrationClass::Left,
        FibrationClass::Right,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FibrationClass::SegalCocart => "segal_cocart",
            FibrationClass::SegalCart => "segal_cart",
            FibrationClass::Cocart => "cocart",
            FibrationClass::Cart => "cart",
            FibrationClass::Left => "left",
            FibrationClass::Right => "right",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s || (s == "left3" && *c == FibrationClass::Left) || (s == "right3" && *c == FibrationClass::Right))
            .ok_or_else(|| Error::InvalidSpec(format!("unknown fibration class {s}")))
    }

    pub fn variance(self) -> Variance {
        match self {
            FibrationClass::SegalCocart | FibrationClass::Cocart | FibrationClass::Left => Variance::Left,
            _ => Variance::Right,
        }
    }

    pub fn localizer(self) -> Localizer {
        match self {
            FibrationClass::SegalCocart | FibrationClass::SegalCart => Localizer::Segal,
            FibrationClass::Cocart | FibrationClass::Cart => Localizer::Css,
            FibrationClass::Left | FibrationClass::Right => Localizer::Kan,
        }
    }

    /// The covariant class checked against a localizer set.
    pub fn covariant_for(s: Localizer) -> Option<Self> {
        match s {
            Localizer::Segal => Some(FibrationClass::SegalCocart),
            Localizer::Css => Some(FibrationClass::Cocart),
            Localizer::Kan => Some(FibrationClass::Left),
            Localizer::Custom => None,
        }
    }
}

/// Sub-verdicts and their meet, with the truncation they were computed at.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibrationReport {
    pub class: String,
    pub truncation: String,
    pub bound: usize,
    pub verdict: Verdict,
    pub parts: Vec<Labeled>,
    pub notes: Vec<String>,
}

impl FibrationReport {
    fn new(class: &str, p: &PresheafMap, bound: usize, parts: Vec<Labeled>, notes: Vec<String>) -> Self {
        FibrationReport {
            class: class.into(),
            truncation: p.source().truncation().to_string(),
            bound,
            verdict: Verdict::all(parts.clone()),
            parts,
            notes,
        }
    }
}

/// The categorical bound used when none is requested.
pub fn default_bound(p: &PresheafMap) -> usize {
    p.source().truncation().get(1)
}

/// biReedy fibration whose every level is a left (or right) fibration.
pub fn is_reedy_variant_fib(p: &PresheafMap, variance: Variance, bound: usize, opts: LocalityOptions) -> Result<FibrationReport> {
    let p = &lemb_normalize(p)?;
    let t = p.source().truncation();
    let mut parts = vec![Labeled::new("biReedy", is_bireedy_fib(p, t.get(0), bound, ReedyMode::Comparison)?)];
    for k in 0..=t.get(0) {
        let level = Reindexing::level(k).apply_map(p)?;
        let v = match variance {
            Variance::Left => is_left_fib(&level, bound, None, opts.effort)?,
            Variance::Right => is_right_fib(&level, bound, None, opts.effort)?,
        };
        parts.push(Labeled::new(format!("level {k}"), v));
    }
    let class = match variance {
        Variance::Left => "reedy_left",
        Variance::Right => "reedy_right",
    };
    Ok(FibrationReport::new(class, p, bound, parts, vec!["levelwise reading: every level is checked separately".into()]))
}

pub fn is_reedy_left_fib(p: &PresheafMap, bound: usize, opts: LocalityOptions) -> Result<FibrationReport> {
    is_reedy_variant_fib(p, Variance::Left, bound, opts)
}

pub fn is_reedy_right_fib(p: &PresheafMap, bound: usize, opts: LocalityOptions) -> Result<FibrationReport> {
    is_reedy_variant_fib(p, Variance::Right, bound, opts)
}

/// The Reedy part for the class's variance, met with locality against the
/// class's localizer.
pub fn check_class(p: &PresheafMap, class: FibrationClass, bound: usize, opts: LocalityOptions) -> Result<FibrationReport> {
    let p = &lemb_normalize(p)?;
    let reedy = is_reedy_variant_fib(p, class.variance(), bound, opts)?;
    let s = LocalizerSet::named(class.localizer(), bound);
    let local = is_local(p, &s, opts)?;
    let mut notes = reedy.notes.clone();
    if opts.vertex_only {
        notes.push("structure maps restricted to those through a single vertex".into());
    }
    let parts = vec![
        Labeled::new(format!("{} fibration", reedy.class), reedy.verdict),
        Labeled::new(format!("local for {}", s.name.name()), local),
    ];
    Ok(FibrationReport::new(class.name(), p, bound, parts, notes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibrations::lemb_map;
    use crate::presheaf::Multidegree;
    use crate::shapes;

    #[test]
    fn identity_over_lemb_is_everything() {
        let x = shapes::f(1, Multidegree::new(&[1, 1]).unwrap()).unwrap();
        let p = lemb_map(&PresheafMap::identity(x), 1).unwrap();
        for c in FibrationClass::ALL {
            let r = check_class(&p, c, 1, LocalityOptions::default()).unwrap();
            assert!(r.verdict.is_holds(), "{}: {}", c.name(), r.verdict.summary());
        }
    }

    #[test]
    fn vertex_maps_split_by_variance() {
        let t = Multidegree::new(&[1, 1]).unwrap();
        let v1 = lemb_map(&shapes::vertex_map(1, 1, t).unwrap(), 1).unwrap();
        let o = LocalityOptions::default();
        assert!(check_class(&v1, FibrationClass::Left, 1, o).unwrap().verdict.is_holds());
        assert!(check_class(&v1, FibrationClass::Right, 1, o).unwrap().verdict.is_fails());
    }

    #[test]
    fn non_lemb_target_is_refused() {
        let t = Multidegree::new(&[1, 1, 1]).unwrap();
        let p = PresheafMap::identity(shapes::f2(1, 0, t).unwrap());
        assert!(check_class(&p, FibrationClass::Left, 1, LocalityOptions::default()).is_err());
    }

    #[test]
    fn product_projection_is_both_cocartesian_and_cartesian() {
        use crate::category::FiniteCategory;
        use crate::grothendieck::{groth, DiagramFunctor};
        use std::sync::Arc;
        let t = Multidegree::new(&[2, 1]).unwrap();
        let f = DiagramFunctor::constant(Arc::new(FiniteCategory::chain(1)), shapes::f(1, t).unwrap()).unwrap();
        let p = groth(&f, 2).unwrap();
        let o = LocalityOptions::default();
        for c in [FibrationClass::SegalCocart, FibrationClass::SegalCart, FibrationClass::Cart] {
            let r = check_class(&p, c, 2, o).unwrap();
            assert!(r.verdict.is_holds(), "{}: {}", c.name(), r.verdict.summary());
        }
    }
}
