//! Three-valued results for semi-decidable questions.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::presheaf::PresheafMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Fails,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Holds => "HOLDS",
            Status::Fails => "FAILS",
            Status::Unknown => "UNKNOWN",
        })
    }
}

/// A map recorded by the images of nondegenerate source cells, keyed by
/// multidegree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapRecord {
    pub assignment: BTreeMap<String, Vec<[u32; 2]>>,
}

impl MapRecord {
    pub fn of(f: &PresheafMap) -> Self {
        let src = f.source();
        let mut assignment = BTreeMap::new();
        for d in src.degrees() {
            let pairs: Vec<[u32; 2]> = src.nondegenerate(d).into_iter().map(|c| [c, f.image(d, c)]).collect();
            if !pairs.is_empty() {
                assignment.insert(d.to_string(), pairs);
            }
        }
        MapRecord { assignment }
    }
}

/// A verdict paired with the name of the check that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labeled {
    pub label: String,
    pub verdict: Verdict,
}

/// Evidence attached to [`Verdict::Holds`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// All simplicial identities were evaluated on every stored cell.
    Identities { cells_checked: usize },
    /// Levelwise injective on every cell.
    Injective { cells_checked: usize },
    /// A diagonal filler of a lifting problem.
    Filler { map: MapRecord },
    /// An explicit isomorphism.
    Isomorphism { map: MapRecord },
    /// Every lifting problem of the family against the map was solved.
    Lifting { family: String, bound: usize, problems: usize },
    /// Derived from other certified facts.
    Derived { rule: String, parts: Vec<Labeled> },
    /// Conjunction of sub-checks, all holding.
    All { checks: Vec<Labeled> },
    /// Nothing to check.
    Vacuous { reason: String },
}

/// Evidence attached to [`Verdict::Fails`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A violated simplicial identity.
    Identity { degree: String, cell: u32, identity: String },
    /// Two cells with the same image.
    Collapse { degree: String, cells: [u32; 2], image: u32 },
    /// A lifting problem with no filler (exhaustive search).
    Unfillable { family: String, member: String, bound: usize, top: MapRecord, bottom: MapRecord },
    /// Components do not correspond.
    Components { source: usize, target: usize, detail: String },
    /// Homology groups differ.
    Homology { dim: usize, source: String, target: String },
    /// A counting invariant differs.
    Count { what: String, expected: usize, found: usize },
    /// A failing sub-check of a conjunction.
    Sub { label: String, verdict: Box<Verdict> },
    /// An invariant mismatch described in words.
    Mismatch { detail: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Holds { certificate: Certificate },
    Fails { witness: Witness },
    Unknown { reason: String },
}

impl Verdict {
    pub fn holds(certificate: Certificate) -> Self {
        Verdict::Holds { certificate }
    }

    pub fn fails(witness: Witness) -> Self {
        Verdict::Fails { witness }
    }

    pub fn unknown(reason: impl Into<String>) -> Self {
        Verdict::Unknown { reason: reason.into() }
    }

    pub fn status(&self) -> Status {
        match self {
            Verdict::Holds { .. } => Status::Holds,
            Verdict::Fails { .. } => Status::Fails,
            Verdict::Unknown { .. } => Status::Unknown,
        }
    }

    pub fn is_holds(&self) -> bool {
        self.status() == Status::Holds
    }

    pub fn is_fails(&self) -> bool {
        self.status() == Status::Fails
    }

    pub fn is_unknown(&self) -> bool {
        self.status() == Status::Unknown
    }

    /// Meet of labeled sub-verdicts: Fails if any fails (the first failure
    /// is the witness), Unknown if any is unknown, Holds otherwise.
    pub fn all(checks: Vec<Labeled>) -> Verdict {
        if let Some(first) = checks.iter().find(|c| c.verdict.is_fails()) {
            return Verdict::fails(Witness::Sub { label: first.label.clone(), verdict: Box::new(first.verdict.clone()) });
        }
        if let Some(first) = checks.iter().find(|c| c.verdict.is_unknown()) {
            let reason = match &first.verdict {
                Verdict::Unknown { reason } => reason.clone(),
                _ => unreachable!(),
            };
            return Verdict::unknown(format!("{}: {}", first.label, reason));
        }
        if checks.is_empty() {
            return Verdict::holds(Certificate::Vacuous { reason: "no sub-checks".into() });
        }
        Verdict::holds(Certificate::All { checks })
    }

    /// Short one-line summary.
    pub fn summary(&self) -> String {
        match self {
            Verdict::Holds { certificate } => format!("HOLDS ({})", certificate_kind(certificate)),
            Verdict::Fails { witness } => format!("FAILS ({})", witness_summary(witness)),
            Verdict::Unknown { reason } => format!("UNKNOWN ({reason})"),
        }
    }
}

impl Labeled {
    pub fn new(label: impl Into<String>, verdict: Verdict) -> Self {
        Labeled { label: label.into(), verdict }
    }
}

fn certificate_kind(c: &Certificate) -> &'static str {
    match c {
        Certificate::Identities { .. } => "identities",
        Certificate::Injective { .. } => "injective",
        Certificate::Filler { .. } => "filler",
        Certificate::Isomorphism { .. } => "isomorphism",
        Certificate::Lifting { .. } => "lifting",
        Certificate::Derived { .. } => "derived",
        Certificate::All { .. } => "all sub-checks",
        Certificate::Vacuous { .. } => "vacuous",
    }
}

fn witness_summary(w: &Witness) -> String {
    match w {
        Witness::Identity { degree, identity, .. } => format!("identity {identity} at {degree}"),
        Witness::Collapse { degree, cells, .. } => format!("cells {} and {} collapse at {degree}", cells[0], cells[1]),
        Witness::Unfillable { member, bound, .. } => format!("unfillable {member} (bound {bound})"),
        Witness::Components { source, target, .. } => format!("components {source} vs {target}"),
        Witness::Homology { dim, source, target } => format!("H{dim}: {source} vs {target}"),
        Witness::Count { what, expected, found } => format!("{what}: {expected} vs {found}"),
        Witness::Sub { label, verdict } => format!("{label}: {}", verdict.summary()),
        Witness::Mismatch { detail } => detail.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn meet_orders_fails_before_unknown() {
        let h = Verdict::holds(Certificate::Vacuous { reason: "x".into() });
        let u = Verdict::unknown("budget");
        let f = Verdict::fails(Witness::Mismatch { detail: "y".into() });
        let all = Verdict::all(vec![Labeled::new("a", h.clone()), Labeled::new("b", u.clone()), Labeled::new("c", f)]);
        assert!(all.is_fails());
        let all = Verdict::all(vec![Labeled::new("a", h.clone()), Labeled::new("b", u)]);
        assert!(all.is_unknown());
        assert!(Verdict::all(vec![Labeled::new("a", h)]).is_holds());
    }
}
