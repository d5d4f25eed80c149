//! Cross-check suites over the seeded corpus. Each row runs independent
//! readings of one instance and records whether the decided ones agree.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::coproduct;
use crate::category::FiniteCategory;
use crate::corpus::{categories, fiber_catalog, generate, natural_transformations, CorpusEntry};
use crate::error::{Error, Result};
use crate::fibrations::{
    characterization_crosscheck, check_class, equivalence_criteria, exponentiation_check, level_boundary, localized_equivalence_direct,
    matching_crosscheck, AgreementReport, FibrationClass, Localizer, LocalityOptions, LocalizerSet,
};
use crate::grothendieck::{groth, groth_map, projectively_fibrant_check, recognition_equiv, DiagramFunctor};
use crate::presheaf::{Multidegree, Presheaf, PresheafMap};
use crate::verdict::{Labeled, Status, Verdict};

pub const SUITES: [&str; 6] = ["grothendieck", "characterization", "recognition", "equivalence-criteria", "exponentiation-closure", "matching-object"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub size: usize,
    /// Truncation of the corpus fibers.
    pub fiber_truncation: Multidegree,
    pub base_bound: usize,
    pub opts: LocalityOptions,
}

impl SuiteConfig {
    pub fn new(seed: u64, size: usize) -> Self {
        SuiteConfig { seed, size, fiber_truncation: Multidegree::new(&[2, 1]).expect("degree"), base_bound: 2, opts: LocalityOptions::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteRow {
    pub instance: String,
    pub readings: Vec<(String, Status)>,
    pub agree: bool,
}

impl SuiteRow {
    fn from_report(instance: String, r: &AgreementReport) -> Self {
        SuiteRow { instance, readings: r.readings.iter().map(|l| (l.label.clone(), l.verdict.status())).collect(), agree: r.agree }
    }

    /// A row with a single reading that must not fail.
    fn single(instance: String, label: &str, v: &Verdict) -> Self {
        SuiteRow { instance, readings: vec![(label.into(), v.status())], agree: !v.is_fails() }
    }

    pub fn decided(&self) -> bool {
        self.readings.iter().filter(|(_, s)| *s != Status::Unknown).count() >= 2
            || (self.readings.len() == 1 && self.readings[0].1 != Status::Unknown)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub fiber_truncation: String,
    pub base_bound: usize,
    pub rows: Vec<SuiteRow>,
    pub disagreements: usize,
    pub undecided: usize,
}

impl SuiteReport {
    fn new(suite: &str, cfg: &SuiteConfig, rows: Vec<SuiteRow>) -> Self {
        let disagreements = rows.iter().filter(|r| !r.agree).count();
        let undecided = rows.iter().filter(|r| !r.decided()).count();
        SuiteReport {
            suite: suite.into(),
            seed: cfg.seed,
            fiber_truncation: cfg.fiber_truncation.to_string(),
            base_bound: cfg.base_bound,
            rows,
            disagreements,
            undecided,
        }
    }

    pub fn unknown_rate(&self) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        self.undecided as f64 / self.rows.len() as f64
    }

    pub fn passed(&self) -> bool {
        self.disagreements == 0 && !self.rows.is_empty()
    }

    pub fn verdict(&self) -> Status {
        if self.disagreements > 0 {
            Status::Fails
        } else if self.undecided > 0 {
            Status::Unknown
        } else {
            Status::Holds
        }
    }
}

const LOCALIZERS: [Localizer; 3] = [Localizer::Segal, Localizer::Css, Localizer::Kan];

fn class_for(s: Localizer) -> FibrationClass {
    FibrationClass::covariant_for(s).expect("named localizer")
}

/// Rows in input order; a row whose construction runs out of search budget
/// is recorded as undecided.
fn par_rows<T: Sync>(items: &[T], name: impl Fn(&T) -> String + Sync + Send, f: impl Fn(&T) -> Result<SuiteRow> + Sync + Send) -> Result<Vec<SuiteRow>> {
    items
        .par_iter()
        .map(|x| match f(x) {
            Err(Error::SearchLimit(n)) => {
                Ok(SuiteRow { instance: name(x), readings: vec![(format!("search budget of {n} nodes"), Status::Unknown)], agree: true })
            }
            r => r,
        })
        .collect()
}

fn pairs(corpus: &[CorpusEntry]) -> Vec<(&CorpusEntry, Localizer)> {
    corpus.iter().flat_map(|e| LOCALIZERS.iter().map(move |&s| (e, s))).collect()
}

/// `check_class(∫F)` against objectwise fibrancy of `F`.
pub fn grothendieck_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let corpus = generate(cfg.seed, cfg.size, cfg.fiber_truncation)?;
    let rows = par_rows(&pairs(&corpus), |(e, s)| format!("{} / {}", e.name, s.name()), |(e, s)| {
        let p = groth(&e.diagram, cfg.base_bound)?;
        let class = check_class(&p, class_for(*s), cfg.base_bound, cfg.opts)?.verdict;
        let proj = projectively_fibrant_check(&e.diagram, &LocalizerSet::named(*s, cfg.base_bound), cfg.base_bound, cfg.opts)?;
        let r = AgreementReport::new(vec![Labeled::new(class_for(*s).name(), class), Labeled::new("projective", proj)]);
        Ok(SuiteRow::from_report(format!("{} / {}", e.name, s.name()), &r))
    })?;
    Ok(SuiteReport::new("grothendieck", cfg, rows))
}

pub fn characterization_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let corpus = generate(cfg.seed, cfg.size, cfg.fiber_truncation)?;
    let rows = par_rows(&pairs(&corpus), |(e, s)| format!("{} / {}", e.name, s.name()), |(e, s)| {
        let p = groth(&e.diagram, cfg.base_bound)?;
        let r = characterization_crosscheck(&p, &LocalizerSet::named(*s, cfg.base_bound), cfg.base_bound, cfg.opts)?;
        Ok(SuiteRow::from_report(format!("{} / {}", e.name, s.name()), &r))
    })?;
    Ok(SuiteReport::new("characterization", cfg, rows))
}

pub fn matching_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let corpus = generate(cfg.seed, cfg.size, cfg.fiber_truncation)?;
    let levels: Vec<(&CorpusEntry, usize)> = corpus.iter().flat_map(|e| (0..=cfg.fiber_truncation.get(0)).map(move |k| (e, k))).collect();
    let rows = par_rows(&levels, |(e, k)| format!("{} / level {k}", e.name), |(e, k)| {
        let p = groth(&e.diagram, cfg.base_bound)?;
        let r = matching_crosscheck(&p, *k, cfg.base_bound, cfg.opts.effort)?;
        Ok(SuiteRow::from_report(format!("{} / level {k}", e.name), &r))
    })?;
    Ok(SuiteReport::new("matching-object", cfg, rows))
}

fn two_points(t: Multidegree) -> Result<Arc<Presheaf>> {
    let pt = Arc::new(Presheaf::point(t));
    Ok(coproduct(&pt, &pt)?.object)
}

/// Local fibrant objects sampled for the mapping-space reading.
pub fn fibrant_samples(t: Multidegree) -> Result<Vec<(String, Arc<Presheaf>)>> {
    let mut out = fiber_catalog(t)?;
    out.push(("two".into(), two_points(t)?));
    Ok(out)
}

struct Certified {
    diagram: DiagramFunctor,
    name: String,
    p: PresheafMap,
}

/// A map between two diagrams over one category, induced on elements.
struct Induced {
    name: String,
    g: PresheafMap,
    py: PresheafMap,
    pz: PresheafMap,
    ends_fibrant: bool,
}

fn induced_maps(entries: &[(String, DiagramFunctor, bool)], per_pair: usize, limit: usize, base_bound: usize) -> Result<Vec<Induced>> {
    let mut candidates = Vec::new();
    for (an, a, af) in entries {
        for (bn, b, bf) in entries {
            if !Arc::ptr_eq(&a.category, &b.category) {
                continue;
            }
            for (j, eta) in natural_transformations(a, b, per_pair)?.into_iter().enumerate() {
                candidates.push((format!("{an} -> {bn} #{j}"), a, b, eta, *af && *bf));
            }
        }
    }
    // evenly spaced picks keep the sample from clustering on one source
    let stride = candidates.len().div_ceil(limit.max(1)).max(1);
    candidates
        .into_iter()
        .step_by(stride)
        .map(|(name, a, b, eta, ends_fibrant)| {
            let (g, py, pz) = groth_map(&eta, a, b, base_bound)?;
            Ok(Induced { name, g, py, pz, ends_fibrant })
        })
        .collect()
}

/// Recognition through slices against the direct mapping-space definition,
/// for each localizer, over maps induced by natural transformations.
pub fn recognition_suite(cfg: &SuiteConfig, maps_per_category: usize) -> Result<SuiteReport> {
    let corpus = generate(cfg.seed, cfg.size, cfg.fiber_truncation)?;
    let samples = fibrant_samples(cfg.fiber_truncation)?;
    let mut rows = Vec::new();
    for s in LOCALIZERS {
        let class = class_for(s);
        let certified: Vec<(Certified, bool)> = corpus
            .par_iter()
            .map(|e| {
                let p = groth(&e.diagram, cfg.base_bound)?;
                let ok = check_class(&p, class, cfg.base_bound, cfg.opts)?.verdict.is_holds();
                Ok((Certified { diagram: e.diagram.clone(), name: e.name.clone(), p }, ok))
            })
            .collect::<Result<_>>()?;
        let set = LocalizerSet::named(s, cfg.base_bound);
        for c in categories_in(&corpus) {
            let here: Vec<&(Certified, bool)> = certified.iter().filter(|(x, _)| Arc::ptr_eq(&x.diagram.category, &c)).collect();
            let fibrant: Vec<(String, PresheafMap)> = here.iter().filter(|(_, ok)| *ok).map(|(x, _)| (x.name.clone(), x.p.clone())).collect();
            let entries: Vec<(String, DiagramFunctor, bool)> = here.iter().map(|(x, ok)| (x.name.clone(), x.diagram.clone(), *ok)).collect();
            let maps = induced_maps(&entries, 1, maps_per_category, cfg.base_bound)?;
            let batch = par_rows(&maps, |m| format!("{} / {}", m.name, s.name()), |m| {
                let rec = recognition_equiv(&m.g, &m.py, &m.pz, &c, &set, &samples, cfg.opts)?;
                let direct = localized_equivalence_direct(&m.g, &m.py, &m.pz, &fibrant, m.ends_fibrant, cfg.opts.effort)?;
                let r = AgreementReport::new(vec![Labeled::new("recognition", rec), Labeled::new("direct", direct)]);
                Ok(SuiteRow::from_report(format!("{} / {}", m.name, s.name()), &r))
            })?;
            rows.extend(batch);
        }
    }
    Ok(SuiteReport::new("recognition", cfg, rows))
}

fn categories_in(corpus: &[CorpusEntry]) -> Vec<Arc<FiniteCategory>> {
    let mut out: Vec<Arc<FiniteCategory>> = Vec::new();
    for e in corpus {
        if !out.iter().any(|c| Arc::ptr_eq(c, &e.diagram.category)) {
            out.push(e.diagram.category.clone());
        }
    }
    out
}

/// Diagrams valued in the discrete sets `∅`, `pt` and `two` over `[1]` and
/// `I[1]`, with every functorial choice of maps.
pub fn discrete_diagrams(t: Multidegree) -> Result<Vec<(String, DiagramFunctor)>> {
    let sets = vec![("empty", Arc::new(Presheaf::empty(t))), ("pt", Arc::new(Presheaf::point(t))), ("two", two_points(t)?)];
    let cats = categories();
    let mut out = Vec::new();
    let chain = &cats[0];
    for (an, a) in &sets {
        for (bn, b) in &sets {
            for (j, m) in crate::algebra::hom(a, b)?.into_iter().enumerate() {
                out.push((format!("[1]:{an},{bn}:{j}"), DiagramFunctor::new(chain.clone(), vec![a.clone(), b.clone()], vec![m])?));
            }
        }
    }
    let groupoid = &cats[2];
    for (an, a) in &sets {
        for (j, m) in crate::algebra::hom(a, a)?.into_iter().filter(|m| m.is_iso()).enumerate() {
            let inv = crate::algebra::find_isomorphism(a, a, crate::algebra::DEFAULT_BUDGET)?
                .into_iter()
                .chain(crate::algebra::hom(a, a)?)
                .find(|n| m.then(n).map(|c| c.images() == PresheafMap::identity(a.clone()).images()).unwrap_or(false))
                .ok_or(Error::Mismatch("automorphism without inverse"))?;
            let maps = groupoid.arrows().iter().map(|ar| if ar.source == 0 { m.clone() } else { inv.clone() }).collect();
            if let Ok(d) = DiagramFunctor::new(groupoid.clone(), vec![a.clone(), a.clone()], maps) {
                out.push((format!("I[1]:{an}:{j}"), d));
            }
        }
    }
    Ok(out)
}

/// The three equivalence criteria on maps between certified left
/// fibrations of elements.
pub fn equivalence_suite(cfg: &SuiteConfig, limit: usize) -> Result<SuiteReport> {
    let diagrams = discrete_diagrams(cfg.fiber_truncation)?;
    let certified: Vec<bool> = diagrams
        .par_iter()
        .map(|(_, d)| Ok(check_class(&groth(d, cfg.base_bound)?, FibrationClass::Left, cfg.base_bound, cfg.opts)?.verdict.is_holds()))
        .collect::<Result<_>>()?;
    let entries: Vec<(String, DiagramFunctor, bool)> =
        diagrams.into_iter().zip(certified).filter(|(_, ok)| *ok).map(|((n, d), ok)| (n, d, ok)).collect();
    let maps = induced_maps(&entries, 2, limit, cfg.base_bound)?;
    let rows = par_rows(&maps, |m| m.name.clone(), |m| {
        let r = equivalence_criteria(&m.g, &m.py, &m.pz, cfg.opts.effort)?;
        Ok(SuiteRow::from_report(m.name.clone(), &r))
    })?;
    Ok(SuiteReport::new("equivalence-criteria", cfg, rows))
}

/// Pullback-exponentials of level boundary inclusions against corpus
/// instances certified for `segal_cocart`.
pub fn exponentiation_suite(cfg: &SuiteConfig, limit: usize) -> Result<SuiteReport> {
    let corpus = generate(cfg.seed, cfg.size, cfg.fiber_truncation)?;
    let class = FibrationClass::SegalCocart;
    let certified: Vec<Option<(String, PresheafMap)>> = corpus
        .par_iter()
        .map(|e| {
            let p = groth(&e.diagram, cfg.base_bound)?;
            Ok(check_class(&p, class, cfg.base_bound, cfg.opts)?.verdict.is_holds().then(|| (e.name.clone(), p)))
        })
        .collect::<Result<_>>()?;
    // non-constant diagrams first
    let mut certified: Vec<(String, PresheafMap)> = certified.into_iter().flatten().collect();
    certified.sort_by_key(|(name, _)| name.contains("const"));
    certified.truncate(limit);
    let cases: Vec<(&(String, PresheafMap), usize)> =
        certified.iter().flat_map(|c| (1..=cfg.fiber_truncation.get(0)).map(move |k| (c, k))).collect();
    let rows = par_rows(&cases, |((name, _), k)| format!("{name} / level boundary {k}"), |((name, p), k)| {
        let i = level_boundary(*k, p.source().truncation())?;
        let v = exponentiation_check(&i, p, class, cfg.base_bound, cfg.opts)?;
        Ok(SuiteRow::single(format!("{name} / level boundary {k}"), class.name(), &v))
    })?;
    Ok(SuiteReport::new("exponentiation-closure", cfg, rows))
}

/// Runs a suite by name with the default sizes.
pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<SuiteReport> {
    match name {
        "grothendieck" => grothendieck_suite(cfg),
        "characterization" => characterization_suite(cfg),
        "recognition" => recognition_suite(cfg, 8),
        "equivalence-criteria" => equivalence_suite(cfg, 16),
        "exponentiation-closure" => exponentiation_suite(cfg, 6),
        "matching-object" => matching_suite(cfg),
        other => Err(Error::InvalidSpec(format!("unknown suite {other}"))),
    }
}
