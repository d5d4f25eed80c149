use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use simpfib::algebra::{map_space, map_space_over, pullback_exponential, pushout_product};
use simpfib::fibrations::{
    check_class, is_kan_fib, is_left_fib, is_reedy_fib, is_reedy_left_fib, is_reedy_right_fib, is_right_fib, FibrationClass, FibrationReport,
    LocalityOptions, ReedyMode,
};
use simpfib::json::{self, Loader, MapDoc, PresheafDoc};
use simpfib::lifting::{factor, rlp, Family, GeneratingFamily};
use simpfib::oracles::{homology, sound_maxdim, weq, Effort};
use simpfib::shapes::{self, ShapeSpec};
use simpfib::suites::{run_suite, SuiteConfig, SUITES};
use simpfib::{Certificate, Labeled, Multidegree, Presheaf, PresheafMap, Verdict, Witness};

use crate::report::RunReport;
use crate::{Command, CorpusAction, TruncArg, TRUNC_ENV};

pub struct Ctx {
    pub json: bool,
}

fn truncation(arg: &TruncArg) -> Result<Option<Multidegree>> {
    let text = match &arg.trunc {
        Some(t) => t.clone(),
        None => match std::env::var(TRUNC_ENV) {
            Ok(t) if !t.trim().is_empty() => t,
            _ => return Ok(None),
        },
    };
    Ok(Some(Multidegree::parse(&text)?))
}

fn truncation_for(arg: &TruncArg, arity: usize, default: usize) -> Result<Multidegree> {
    match truncation(arg)? {
        Some(t) if t.arity() != arity => bail!("truncation {t} has arity {}, expected {arity}", t.arity()),
        Some(t) => Ok(t),
        None => Ok(Multidegree::uniform(arity, default)),
    }
}

fn load_presheaf(path: &Path, report: &mut RunReport) -> Result<Arc<Presheaf>> {
    let text = report.read_input(path)?;
    let doc: PresheafDoc = serde_json::from_str(&text).with_context(|| path.display().to_string())?;
    let x = json::presheaf_from_doc(&doc)?.presheaf;
    report.truncation(x.truncation());
    Ok(x)
}

fn load_map(path: &Path, report: &mut RunReport) -> Result<PresheafMap> {
    let text = report.read_input(path)?;
    let doc: MapDoc = serde_json::from_str(&text).with_context(|| path.display().to_string())?;
    let f = Loader::beside(path).map(&doc)?;
    report.truncation(f.source().truncation());
    Ok(f)
}

fn emit(report: &mut RunReport, ctx: &Ctx, output: &Option<PathBuf>, text: String) -> Result<()> {
    match output {
        Some(path) => report.write_output(path, &text),
        None if ctx.json => {
            report.data.insert("document".into(), serde_json::from_str(&text)?);
            Ok(())
        }
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn map_valid(f: &PresheafMap) -> Verdict {
    let natural = match f.naturality_violation() {
        None => Verdict::holds(Certificate::Identities { cells_checked: f.source().total_cells() }),
        Some(detail) => Verdict::fails(Witness::Mismatch { detail }),
    };
    Verdict::all(vec![
        Labeled::new("source", f.source().validate()),
        Labeled::new("target", f.target().validate()),
        Labeled::new("naturality", natural),
    ])
}

fn mono(f: &PresheafMap) -> Verdict {
    match f.injectivity_violation() {
        None => Verdict::holds(Certificate::Injective { cells_checked: f.source().total_cells() }),
        Some((d, a, b)) => Verdict::fails(Witness::Collapse { degree: d.to_string(), cells: [a, b], image: f.image(d, a) }),
    }
}

fn family_for(name: &str, max_dim: usize, arity: usize) -> Result<GeneratingFamily> {
    let family = Family::parse(name)?;
    let family = if family.arity() == arity {
        family
    } else if family.arity() == 1 {
        Family::Embedded { family: Box::new(family), arity, dir: arity - 1, bound: None }
    } else {
        bail!("family {name} has arity {}, the map has arity {arity}", family.arity());
    };
    Ok(GeneratingFamily::new(family, max_dim))
}

fn effort(s: &str) -> Result<Effort> {
    Ok(s.parse::<Effort>()?)
}

/// The bound along the categorical direction.
fn categorical_bound(p: &PresheafMap) -> usize {
    let t = p.source().truncation();
    if t.arity() == 3 {
        t.get(1)
    } else {
        t.get(0)
    }
}

fn shape_map(kind: &str, params: &[usize], t: Multidegree) -> Result<Option<PresheafMap>> {
    let (n, i) = match params {
        [n, i] => (*n, *i),
        _ if matches!(kind, "vertex" | "e-vertex") => bail!("{kind} takes 2 parameters"),
        _ => return Ok(None),
    };
    Ok(match kind {
        "vertex" => Some(shapes::vertex_map(n, i, t)?),
        "e-vertex" => Some(shapes::e_vertex_map(n, i, t)?),
        _ => None,
    })
}

fn record_fibration(report: &mut RunReport, label: &str, r: FibrationReport) -> Result<()> {
    report.data.insert("fibration".into(), serde_json::to_value(&r)?);
    report.verdict(Labeled::new(label, r.verdict));
    Ok(())
}

pub fn run(cmd: &Command, report: &mut RunReport, ctx: &Ctx) -> Result<()> {
    match cmd {
        Command::Build { kind, params, trunc, output, inclusion } => {
            if matches!(kind.as_str(), "vertex" | "e-vertex") {
                let t = truncation_for(trunc, 2, 3)?;
                report.truncation(t);
                let f = shape_map(kind, params, t)?.expect("map kind");
                report.verdict(Labeled::new("validate", map_valid(&f)));
                return emit(report, ctx, output, json::to_string(&json::map_to_doc(&f, true)));
            }
            let spec = ShapeSpec::parse(kind, params)?;
            let t = truncation_for(trunc, spec.arity(), 3)?;
            report.truncation(t);
            let (x, incl) = spec.build(t)?;
            if *inclusion {
                let f = incl.ok_or_else(|| anyhow!("{kind} has no canonical inclusion"))?;
                report.verdict(Labeled::new("validate", map_valid(&f)));
                emit(report, ctx, output, json::to_string(&json::map_to_doc(&f, true)))
            } else {
                report.verdict(Labeled::new("validate", x.validate()));
                report.data.insert("cells".into(), x.total_cells().into());
                emit(report, ctx, output, json::to_string(&json::presheaf_to_doc(&x)))
            }
        }
        Command::MapSpace { x, y, over, degree, output } => {
            let m = if *over {
                let q = load_map(x, report)?;
                let p = load_map(y, report)?;
                map_space_over(&q, &p, *degree)?
            } else {
                let xs = load_presheaf(x, report)?;
                let ys = load_presheaf(y, report)?;
                map_space(&xs, &ys, *degree)?
            };
            report.truncation(m.object.truncation());
            report.verdict(Labeled::new("validate", m.object.validate()));
            emit(report, ctx, output, json::to_string(&json::presheaf_to_doc(&m.object)))
        }
        Command::Pp { i, j, output } => {
            let (i, j) = (load_map(i, report)?, load_map(j, report)?);
            let f = pushout_product(&i, &j)?;
            report.verdict(Labeled::new("validate", map_valid(&f)));
            report.verdict(Labeled::new("monomorphism", mono(&f)));
            emit(report, ctx, output, json::to_string(&json::map_to_doc(&f, true)))
        }
        Command::Pexp { i, p, output } => {
            let (i, p) = (load_map(i, report)?, load_map(p, report)?);
            let pe = pullback_exponential(&i, &p)?;
            report.truncation(pe.map.source().truncation());
            report.verdict(Labeled::new("validate", map_valid(&pe.map)));
            emit(report, ctx, output, json::to_string(&json::map_to_doc(&pe.map, true)))
        }
        Command::Rlp { family, max_dim, f } => {
            let f = load_map(f, report)?;
            let fam = family_for(family, *max_dim, f.source().arity())?;
            report.verdict(Labeled::new(format!("rlp {}", fam.family.name()), rlp(&f, &fam)?));
            Ok(())
        }
        Command::Factor { family, max_dim, budget, f, output } => {
            let f = load_map(f, report)?;
            let fam = family_for(family, *max_dim, f.source().arity())?;
            let r = factor(&f, &fam, *budget)?;
            report.data.insert("attached".into(), r.consumed.into());
            report.data.insert("rounds".into(), r.rounds.into());
            let v = if r.exhausted {
                Verdict::unknown(format!("cell budget of {budget} exhausted"))
            } else {
                rlp(&r.right, &fam)?
            };
            report.verdict(Labeled::new("right factor lifts", v));
            emit(report, ctx, output, json::to_string(&json::map_to_doc(&r.left, true)))
        }
        Command::Homology { x, maxdim } => {
            let x = load_presheaf(x, report)?;
            let sound = sound_maxdim(&x);
            let v = match sound {
                Some(s) if s >= *maxdim => {
                    Verdict::holds(Certificate::Derived { rule: format!("truncation determines homology through dimension {s}"), parts: vec![] })
                }
                Some(s) => Verdict::unknown(format!("truncation determines homology only through dimension {s}")),
                None => Verdict::unknown("truncation too small for any homology"),
            };
            if let Some(s) = sound {
                let table = homology(&x, s.min(*maxdim))?;
                let groups: Vec<String> = table.groups.iter().map(|g| g.to_string()).collect();
                report.data.insert("homology".into(), serde_json::to_value(&groups)?);
            }
            report.verdict(Labeled::new("sound", v));
            Ok(())
        }
        Command::Weq { f, effort: e } => {
            let f = load_map(f, report)?;
            report.verdict(Labeled::new("weq", weq(&f, effort(e)?)?));
            Ok(())
        }
        Command::Check { kind, p, bound, trunc, effort: e } => {
            let mut p = load_map(p, report)?;
            if let Some(t) = truncation(trunc)? {
                p = p.truncate(t)?;
                report.truncation(t);
            }
            let bound = bound.unwrap_or_else(|| categorical_bound(&p));
            let opts = LocalityOptions { effort: effort(e)?, ..Default::default() };
            report.data.insert("bound".into(), bound.into());
            match kind.as_str() {
                "kan" => report.verdict(Labeled::new("kan", is_kan_fib(&p, bound)?)),
                "reedy" => report.verdict(Labeled::new("reedy", is_reedy_fib(&p, bound, ReedyMode::Comparison)?)),
                "left" => report.verdict(Labeled::new("left", is_left_fib(&p, bound, None, opts.effort)?)),
                "right" => report.verdict(Labeled::new("right", is_right_fib(&p, bound, None, opts.effort)?)),
                "reedy-left" | "reedy_left" => record_fibration(report, "reedy_left", is_reedy_left_fib(&p, bound, opts)?)?,
                "reedy-right" | "reedy_right" => record_fibration(report, "reedy_right", is_reedy_right_fib(&p, bound, opts)?)?,
                other => {
                    let class = FibrationClass::parse(other)?;
                    record_fibration(report, class.name(), check_class(&p, class, bound, opts)?)?
                }
            }
            Ok(())
        }
        Command::Groth { diagram, base_bound, output } => {
            let text = report.read_input(diagram)?;
            let doc: json::DiagramDoc = serde_json::from_str(&text).with_context(|| diagram.display().to_string())?;
            let f = Loader::beside(diagram).diagram(&doc)?;
            report.truncation(f.truncation());
            let p = simpfib::grothendieck::groth(&f, *base_bound)?;
            report.truncation(p.source().truncation());
            report.verdict(Labeled::new("validate", map_valid(&p)));
            emit(report, ctx, output, json::to_string(&json::map_to_doc(&p, true)))
        }
        Command::Corpus { action: CorpusAction::Generate { seed, size, trunc, output } } => {
            let t = match truncation(trunc)? {
                Some(t) => t,
                None => SuiteConfig::new(*seed, *size).fiber_truncation,
            };
            report.truncation(t);
            report.seed = Some(*seed);
            let corpus = simpfib::corpus::generate(*seed, *size, t)?;
            let names: Vec<String> = corpus.iter().map(|e| e.name.clone()).collect();
            report.data.insert("corpus".into(), serde_json::to_value(&names)?);
            if let Some(dir) = output {
                std::fs::create_dir_all(dir).with_context(|| dir.display().to_string())?;
                for (k, e) in corpus.iter().enumerate() {
                    report.write_output(&dir.join(format!("{k:03}.json")), &json::to_string(&json::diagram_to_doc(&e.diagram)))?;
                }
            }
            Ok(())
        }
        Command::Verify { suite, seed, size, trunc } => {
            let mut cfg = SuiteConfig::new(*seed, *size);
            if let Some(t) = truncation(trunc)? {
                if t.arity() != 2 {
                    bail!("fiber truncation must have arity 2, got {t}");
                }
                cfg.fiber_truncation = t;
            }
            report.seed = Some(*seed);
            report.truncation(format!("fibers {}", cfg.fiber_truncation));
            report.truncation(format!("base {}", cfg.base_bound));
            let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite.as_str()] };
            for name in names {
                report.suites.push(run_suite(name, &cfg)?);
            }
            Ok(())
        }
    }
}

pub fn print_text(report: &RunReport) {
    eprintln!("truncation: {}", if report.truncation.is_empty() { "-".into() } else { report.truncation.join(" ") });
    if let Some(seed) = report.seed {
        eprintln!("seed: {seed}");
    }
    for l in &report.verdicts {
        eprintln!("{}: {}", l.label, l.verdict.summary());
    }
    for (k, v) in &report.data {
        if k != "document" && k != "fibration" {
            eprintln!("{k}: {v}");
        }
    }
    if let Some(serde_json::Value::Object(f)) = report.data.get("fibration") {
        if let Some(serde_json::Value::Array(parts)) = f.get("parts") {
            for part in parts {
                if let Ok(l) = serde_json::from_value::<Labeled>(part.clone()) {
                    eprintln!("  {}: {}", l.label, l.verdict.summary());
                }
            }
        }
    }
    for s in &report.suites {
        eprintln!("{}: rows={} disagreements={} undecided={} -> {}", s.suite, s.rows.len(), s.disagreements, s.undecided, s.verdict());
        for r in s.rows.iter().filter(|r| !r.agree) {
            let readings: Vec<String> = r.readings.iter().map(|(n, st)| format!("{n}={st}")).collect();
            eprintln!("  DISAGREE {}: {}", r.instance, readings.join(" "));
        }
    }
    if let Some(e) = &report.error {
        eprintln!("error: {e}");
    }
}
