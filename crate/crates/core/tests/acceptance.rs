//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Reports exclude timings so reruns can be compared bytewise.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use simpfib::algebra::{find_isomorphism, pullback_exponential, pushout_product, HomSearch, DEFAULT_BUDGET};
use simpfib::corpus::{fiber_catalog, generate};
use simpfib::fibrations::{condition_check, condition_p_sample, is_left_fib, is_right_fib, Condition, LocalityOptions};
use simpfib::lifting::{problems, rlp, GeneratingFamily, LiftingProblem};
use simpfib::oracles::Effort;
use simpfib::shapes::{self, ShapeSpec};
use simpfib::suites::{run_suite, SuiteConfig, SuiteReport};
use simpfib::verdict::MapRecord;
use simpfib::{Multidegree, Presheaf, PresheafMap, Result, Status, Verdict, Witness};

struct Outcome {
    passed: bool,
    summary: String,
    report: Value,
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Result<Outcome>,
}

fn md(v: &[usize]) -> Multidegree {
    Multidegree::new(v).unwrap()
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Monotone maps `[k] -> [n]`.
fn simplices(n: usize, k: usize) -> usize {
    binom(n + k + 1, k + 1)
}

/// Monotone surjections `[k] -> [n]`.
fn surjections(k: usize, n: usize) -> usize {
    binom(k, n)
}

fn image_set(f: &PresheafMap, d: Multidegree) -> BTreeSet<u32> {
    f.images_at(d).iter().copied().collect()
}

// 1

fn structural() -> Result<Outcome> {
    type Formula = Box<dyn Fn(Multidegree) -> usize>;
    let mut items: Vec<(ShapeSpec, Formula)> = Vec::new();
    for n in 0..=3 {
        items.push((ShapeSpec::Delta { n }, Box::new(move |d| simplices(n, d.get(0)))));
        items.push((ShapeSpec::Boundary { n }, Box::new(move |d| simplices(n, d.get(0)) - surjections(d.get(0), n))));
        items.push((ShapeSpec::F { n }, Box::new(move |d| simplices(n, d.get(0)))));
        items.push((ShapeSpec::PartialF { n }, Box::new(move |d| simplices(n, d.get(0)) - surjections(d.get(0), n))));
        for i in 0..=n {
            if n > 0 {
                items.push((
                    ShapeSpec::Horn { n, i },
                    Box::new(move |d| simplices(n, d.get(0)) - surjections(d.get(0), n) - surjections(d.get(0), n - 1)),
                ));
            }
        }
    }
    for l in 1..=2 {
        items.push((ShapeSpec::J { l }, Box::new(move |d| (l + 1).pow(d.get(0) as u32 + 1))));
    }
    items.push((ShapeSpec::E { n: 1 }, Box::new(|d| 2usize.pow(d.get(0) as u32 + 1))));
    for n in 2..=3 {
        // one copy of F(1) per spine edge, glued at the n - 1 inner vertices
        items.push((ShapeSpec::G { n }, Box::new(move |d| n * (d.get(0) + 1) + 1)));
    }
    for k in 0..=2 {
        for n in 0..=2 {
            items.push((ShapeSpec::F2 { k, n }, Box::new(move |d| simplices(k, d.get(0)) * simplices(n, d.get(1)))));
            items.push((
                ShapeSpec::PartialF2 { k, n },
                Box::new(move |d| simplices(k, d.get(0)) * simplices(n, d.get(1)) - surjections(d.get(0), k) * surjections(d.get(1), n)),
            ));
        }
    }
    let mut rows = Vec::new();
    let mut passed = true;
    for (spec, formula) in &items {
        let t = Multidegree::uniform(spec.arity(), 3);
        let (x, incl) = spec.build(t)?;
        let valid = x.validate();
        let mismatches: Vec<String> =
            x.degrees().into_iter().filter(|&d| x.count(d) != formula(d)).map(|d| format!("{d}: {} vs {}", x.count(d), formula(d))).collect();
        let incl_ok = incl.as_ref().map(|f| f.is_mono() && f.target().validate().is_holds() && f.naturality_violation().is_none());
        let ok = valid.is_holds() && mismatches.is_empty() && incl_ok != Some(false);
        passed &= ok;
        rows.push(json!({ "shape": spec, "cells": x.total_cells(), "validate": valid.status(), "count_mismatches": mismatches, "inclusion_ok": incl_ok }));
    }
    let t = md(&[3, 3, 3]);
    let mut pp_rows = Vec::new();
    for k in 0..=2 {
        for n in 0..=2 {
            let a = shapes::boundary_f2_inclusion(k, 0, t)?;
            let b = shapes::boundary_f2_inclusion(0, n, t)?;
            let pp = pushout_product(&a, &b)?;
            let incl = shapes::boundary_f2_inclusion(k, n, t)?;
            let same = match find_isomorphism(pp.target(), incl.target(), DEFAULT_BUDGET)? {
                Some(phi) => {
                    let moved = pp.then(&phi)?;
                    moved.is_mono()
                        && incl.source().degrees().into_iter().all(|d| pp.source().count(d) == incl.source().count(d) && image_set(&moved, d) == image_set(&incl, d))
                }
                None => false,
            };
            passed &= same;
            pp_rows.push(json!({ "k": k, "n": n, "equal": same }));
        }
    }
    Ok(Outcome {
        passed,
        summary: format!("{} shapes, {} pushout-product comparisons", items.len(), pp_rows.len()),
        report: json!({ "shapes": rows, "pushout_products": pp_rows }),
    })
}

// 2

fn has_llp(i: &PresheafMap, p: &PresheafMap) -> Result<(bool, usize)> {
    let probs = problems(i, p)?;
    let mut all = true;
    for (top, bottom) in &probs {
        let sq = LiftingProblem::new(i.clone(), p.clone(), top.clone(), bottom.clone())?;
        if sq.filler(DEFAULT_BUDGET)?.is_none() {
            all = false;
            break;
        }
    }
    Ok((all, probs.len()))
}

/// The frozen unfillable `Λ[2,0]` problem against `Δ[2] -> pt`: the horn
/// sends its vertices to 0, 1, 0, so a filler would need an edge from 1 back to 0.
fn frozen_horn_witness() -> Value {
    json!({ "assignment": {
        "(0)": [[0, 0], [1, 1], [2, 0]],
        "(1)": [[1, 1], [2, 0]]
    }})
}

fn lifting() -> Result<Outcome> {
    let t = 3;
    let d2 = shapes::delta(2, t)?;
    let to_pt = PresheafMap::to_point(d2.clone());
    let v = rlp(&to_pt, &GeneratingFamily::horns(2))?;
    let (witness_ok, witness) = match &v {
        Verdict::Fails { witness: Witness::Unfillable { member, top, bottom, .. } } => {
            // independent check: no endomorphism of Δ[2] extends the horn
            let horn = shapes::horn_inclusion(2, 0, t)?;
            let extends = HomSearch::new(&d2, &d2).all()?.into_iter().any(|g| MapRecord::of(&horn.then(&g).unwrap()) == *top);
            let frozen = serde_json::to_value(top).unwrap() == frozen_horn_witness();
            let constant = bottom.assignment.values().flatten().all(|[_, image]| *image == 0);
            (member == "horn(2,0)" && !extends && frozen && constant, json!({ "member": member, "top": top, "frozen_match": frozen, "extends": extends }))
        }
        other => (false, json!({ "verdict": other.summary() })),
    };
    let j1 = shapes::j(1, 4)?;
    let kan = rlp(&PresheafMap::to_point(j1), &GeneratingFamily::horns(3))?;

    let n = 2;
    let monos: Vec<(String, PresheafMap)> = vec![
        ("bdry0".into(), shapes::boundary_inclusion(0, n)?),
        ("bdry1".into(), shapes::boundary_inclusion(1, n)?),
        ("bdry2".into(), shapes::boundary_inclusion(2, n)?),
        ("horn10".into(), shapes::horn_inclusion(1, 0, n)?),
        ("horn11".into(), shapes::horn_inclusion(1, 1, n)?),
        ("horn20".into(), shapes::horn_inclusion(2, 0, n)?),
        ("horn21".into(), shapes::horn_inclusion(2, 1, n)?),
    ];
    let pt = Arc::new(Presheaf::point(md(&[n])));
    let maps: Vec<(String, PresheafMap)> = vec![
        ("delta1->pt".into(), PresheafMap::to_point(shapes::delta(1, n)?)),
        ("delta2->pt".into(), PresheafMap::to_point(shapes::delta(2, n)?)),
        ("J1->pt".into(), PresheafMap::to_point(shapes::j(1, n)?)),
        ("bdry1->pt".into(), PresheafMap::to_point(shapes::boundary(1, n)?)),
        ("horn21->pt".into(), PresheafMap::to_point(shapes::horn(2, 1, n)?)),
        ("horn20->delta2".into(), shapes::horn_inclusion(2, 0, n)?),
        ("bdry1->delta1".into(), shapes::boundary_inclusion(1, n)?),
        ("pt".into(), PresheafMap::identity(pt)),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut seen = BTreeSet::new();
    let mut rows = Vec::new();
    let mut agree_all = true;
    while rows.len() < 24 {
        let (a, b, c) = (rng.gen_range(0..monos.len()), rng.gen_range(0..monos.len()), rng.gen_range(0..maps.len()));
        if !seen.insert((a, b, c)) {
            continue;
        }
        let (i, j, p) = (&monos[a].1, &monos[b].1, &maps[c].1);
        let left = has_llp(&pushout_product(i, j)?, p)?;
        let right = has_llp(j, &pullback_exponential(i, p)?.map)?;
        agree_all &= left == right;
        rows.push(json!({ "i": monos[a].0, "j": monos[b].0, "p": maps[c].0, "pp_lifts": left.0, "pexp_lifts": right.0,
            "pp_problems": left.1, "pexp_problems": right.1 }));
    }
    let lifts = rows.iter().filter(|r| r["pp_lifts"] == true).count();
    Ok(Outcome {
        passed: witness_ok && kan.is_holds() && agree_all,
        summary: format!(
            "witness {}, J[1] {}, adjunction {}/{} agree ({} lift, {} do not)",
            if witness_ok { "ok" } else { "wrong" },
            kan.status(),
            if agree_all { rows.len() } else { 0 },
            rows.len(),
            lifts,
            rows.len() - lifts
        ),
        report: json!({ "delta2": witness, "j1": kan.status(), "adjunction": rows }),
    })
}

// 3

fn level_one_failure(v: &Verdict) -> bool {
    matches!(v, Verdict::Fails { witness: Witness::Sub { label, .. } } if label == "n=1")
}

fn dichotomy() -> Result<Outcome> {
    let t = md(&[2, 2]);
    let e = Effort::High;
    let v0 = shapes::vertex_map(1, 0, t)?;
    let v1 = shapes::vertex_map(1, 1, t)?;
    let left1 = is_left_fib(&v1, 2, None, e)?;
    let left0 = is_left_fib(&v0, 2, None, e)?;
    let right0 = is_right_fib(&v0, 2, None, e)?;
    let right1 = is_right_fib(&v1, 2, None, e)?;
    let passed = left1.is_holds() && level_one_failure(&left0) && right0.is_holds() && level_one_failure(&right1);
    Ok(Outcome {
        passed,
        summary: format!("left: <1> {} <0> {}; right: <0> {} <1> {}", left1.status(), left0.status(), right0.status(), right1.status()),
        report: json!({ "left_1": left1, "left_0": left0, "right_0": right0, "right_1": right1 }),
    })
}

// 4 to 9

fn cfg() -> SuiteConfig {
    SuiteConfig::new(7, 30)
}

fn suite_summary(r: &SuiteReport) -> String {
    format!("rows={} disagreements={} undecided={} ({:.1}%)", r.rows.len(), r.disagreements, r.undecided, 100.0 * r.unknown_rate())
}

fn suite_outcome(r: SuiteReport, extra: bool) -> Outcome {
    Outcome { passed: r.passed() && extra, summary: suite_summary(&r), report: serde_json::to_value(&r).unwrap() }
}

fn grothendieck() -> Result<Outcome> {
    let c = cfg();
    let corpus = generate(c.seed, c.size, c.fiber_truncation)?;
    let fibers: Vec<String> = fiber_catalog(c.fiber_truncation)?.into_iter().map(|(n, _)| n).collect();
    let bases: BTreeSet<String> = corpus.iter().map(|e| e.diagram.category.name().to_string()).collect();
    let covered = corpus.len() >= 30 && bases.len() == 3;
    let r = run_suite("grothendieck", &c)?;
    let rate_ok = r.unknown_rate() <= 0.2;
    let mut o = suite_outcome(r, covered && rate_ok);
    o.summary = format!("{} diagrams over {:?}, fibers {:?}; {}", corpus.len(), bases, fibers, o.summary);
    Ok(o)
}

fn characterization() -> Result<Outcome> {
    Ok(suite_outcome(run_suite("characterization", &cfg())?, true))
}

fn recognition() -> Result<Outcome> {
    Ok(suite_outcome(run_suite("recognition", &cfg())?, true))
}

fn equivalence() -> Result<Outcome> {
    let r = run_suite("equivalence-criteria", &cfg())?;
    let enough = r.rows.len() >= 10;
    Ok(suite_outcome(r, enough))
}

fn conditions() -> Result<Outcome> {
    // the diagonal must reach dimension 3 to see G(3) fill in
    let t = md(&[3, 3]);
    let e = Effort::High;
    let maps = vec![
        ("G(2)->F(2)", shapes::spine_inclusion(2, t)?),
        ("G(3)->F(3)", shapes::spine_inclusion(3, t)?),
        ("<0>: F(0)->E(1)", shapes::e_vertex_map(1, 0, t)?),
    ];
    let mut parts = Vec::new();
    let mut passed = true;
    for (name, f) in &maps {
        let v = condition_check(f, Condition::C, e)?;
        passed &= v.is_holds();
        parts.push(json!({ "map": name, "C": v }));
    }
    let ts = md(&[2, 1]);
    let locals = fiber_catalog(ts)?;
    let sample_shapes = vec![("F1".to_string(), shapes::f(1, ts)?), ("E1".to_string(), shapes::e(1, ts)?)];
    let mut samples = Vec::new();
    for (name, f) in [("segal", shapes::spine_inclusion(2, ts)?), ("completeness", shapes::e_vertex_map(1, 0, ts)?)] {
        let v = condition_p_sample(&f, &locals, &sample_shapes, LocalityOptions::default())?;
        passed &= v.is_holds();
        samples.push(json!({ "map": name, "P": v }));
    }
    let statuses: Vec<String> = parts.iter().chain(&samples).map(|p| format!("{}", p.get("C").or(p.get("P")).map(|v| v["status"].clone()).unwrap_or_default())).collect();
    Ok(Outcome { passed, summary: format!("C/P verdicts {}", statuses.join(" ")), report: json!({ "condition_c": parts, "condition_p": samples }) })
}

fn exponentiation() -> Result<Outcome> {
    let r = run_suite("exponentiation-closure", &cfg())?;
    let no_fails = r.rows.iter().all(|row| row.readings.iter().all(|(_, s)| *s != Status::Fails));
    Ok(suite_outcome(r, no_fails))
}

const CRITERIA: [Criterion; 9] = [
    Criterion { id: 1, name: "structural suite", limit: Some(Duration::from_secs(10)), run: structural },
    Criterion { id: 2, name: "lifting suite", limit: Some(Duration::from_secs(60)), run: lifting },
    Criterion { id: 3, name: "fibration dichotomy", limit: Some(Duration::from_secs(5)), run: dichotomy },
    Criterion { id: 4, name: "grothendieck construction", limit: Some(Duration::from_secs(600)), run: grothendieck },
    Criterion { id: 5, name: "characterization agreement", limit: None, run: characterization },
    Criterion { id: 6, name: "recognition principle", limit: None, run: recognition },
    Criterion { id: 7, name: "equivalence criteria", limit: None, run: equivalence },
    Criterion { id: 8, name: "condition certificates", limit: None, run: conditions },
    Criterion { id: 9, name: "exponentiation closure", limit: None, run: exponentiation },
];

/// Serialized reports of criteria 1 to 9, in order; errors are recorded as text.
fn reports(outcomes: &[(u32, std::result::Result<Outcome, String>)]) -> Vec<String> {
    outcomes
        .iter()
        .map(|(id, o)| match o {
            Ok(o) => serde_json::to_string(&json!({ "criterion": id, "passed": o.passed, "report": o.report })).unwrap(),
            Err(e) => format!("{id}: error {e}"),
        })
        .collect()
}

fn run_all(verbose: bool) -> (Vec<(u32, std::result::Result<Outcome, String>)>, bool) {
    let mut out = Vec::new();
    let mut all = true;
    for c in &CRITERIA {
        let start = Instant::now();
        let result = (c.run)().map_err(|e| e.to_string());
        let elapsed = start.elapsed();
        let in_time = c.limit.map_or(true, |l| elapsed < l);
        let passed = matches!(&result, Ok(o) if o.passed) && in_time;
        all &= passed;
        if verbose {
            let detail = match &result {
                Ok(o) => o.summary.clone(),
                Err(e) => format!("error: {e}"),
            };
            let limit = c.limit.map(|l| format!(", limit {}s", l.as_secs())).unwrap_or_default();
            println!(
                "criterion {:>2} {:<28} {} ({:.1}s{limit}) {detail}",
                c.id,
                c.name,
                if passed { "PASS" } else { "FAIL" },
                elapsed.as_secs_f64()
            );
        }
        out.push((c.id, result));
    }
    (out, all)
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

fn main() {
    let (first, mut all) = run_all(true);
    let start = Instant::now();
    let a = reports(&first);
    let b = in_pool(4, || reports(&run_all(false).0));
    let c = in_pool(1, || reports(&run_all(false).0));
    let differing: Vec<usize> = (0..a.len()).filter(|&k| a[k] != b[k] || a[k] != c[k]).map(|k| k + 1).collect();
    let passed = differing.is_empty();
    all &= passed;
    println!(
        "criterion 10 {:<28} {} ({:.1}s) three runs (default, 4 threads, 1 thread); differing criteria: {:?}",
        "determinism",
        if passed { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64(),
        differing
    );
    if !all {
        std::process::exit(1);
    }
}
