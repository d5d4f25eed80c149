use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use simpfib::suites::SuiteReport;
use simpfib::{Labeled, Status};

/// Everything needed to reproduce one invocation. Deliberately free of
/// timestamps and thread counts so that reruns compare bytewise.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub command: Vec<String>,
    /// Input path to sha256 of its contents.
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub truncation: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub verdicts: Vec<Labeled>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub suites: Vec<SuiteReport>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub data: BTreeMap<String, serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub fn sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunReport {
    pub fn new(command: Vec<String>) -> Self {
        RunReport { tool: "simpfib".into(), version: env!("CARGO_PKG_VERSION").into(), command, ..Default::default() }
    }

    pub fn read_input(&mut self, path: &Path) -> anyhow::Result<String> {
        let text = std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        self.inputs.insert(path.display().to_string(), sha256(text.as_bytes()));
        Ok(text)
    }

    pub fn write_output(&mut self, path: &Path, text: &str) -> anyhow::Result<()> {
        std::fs::write(path, text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        self.outputs.insert(path.display().to_string(), sha256(text.as_bytes()));
        Ok(())
    }

    pub fn truncation(&mut self, t: impl ToString) {
        let t = t.to_string();
        if !self.truncation.contains(&t) {
            self.truncation.push(t);
        }
    }

    pub fn verdict(&mut self, v: Labeled) {
        self.verdicts.push(v);
    }

    pub fn status(&self) -> Status {
        let all = self.verdicts.iter().map(|l| l.verdict.status()).chain(self.suites.iter().map(SuiteReport::verdict));
        all.fold(Status::Holds, |acc, s| match (acc, s) {
            (Status::Fails, _) | (_, Status::Fails) => Status::Fails,
            (Status::Unknown, _) | (_, Status::Unknown) => Status::Unknown,
            _ => Status::Holds,
        })
    }

    pub fn exit_code(&self) -> i32 {
        if self.error.is_some() {
            return 3;
        }
        match self.status() {
            Status::Holds => 0,
            Status::Fails => 1,
            Status::Unknown => 2,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable report")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use simpfib::Verdict;

    #[test]
    fn exit_codes_follow_the_weakest_verdict() {
        let mut r = RunReport::new(vec![]);
        assert_eq!(r.exit_code(), 0);
        r.verdict(Labeled::new("a", Verdict::unknown("x")));
        assert_eq!(r.exit_code(), 2);
        r.verdict(Labeled::new("b", Verdict::fails(simpfib::Witness::Mismatch { detail: "y".into() })));
        assert_eq!(r.exit_code(), 1);
        r.error = Some("bad".into());
        assert_eq!(r.exit_code(), 3);
    }

    #[test]
    fn hashes_are_hex_sha256() {
        assert_eq!(sha256(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
