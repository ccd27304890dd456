//! Machine (JSON) and text renderings of a command's results.

use std::fmt::Write as _;

use npure_core::purity::{Outcome, Verdict, Witness};
use npure_core::scan::Violation;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Machine,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessEntry {
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub submodules: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub ideals: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub ring_elements: Vec<String>,
}

impl From<&Witness> for WitnessEntry {
    fn from(w: &Witness) -> Self {
        Self {
            submodules: w.submodules.iter().map(ToString::to_string).collect(),
            ideals: w.ideals.iter().map(ToString::to_string).collect(),
            ring_elements: w.ring_elements.iter().map(ToString::to_string).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerdictEntry {
    pub check: String,
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<u64>,
    /// Submodules produced by enumerating or maximal-search checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// Paper-suite cases: the expected outcome and whether it was met.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matched: Option<bool>,
}

impl VerdictEntry {
    pub fn new(check: impl Into<String>, outcome: Outcome) -> Self {
        Self {
            check: check.into(),
            outcome: outcome.to_string(),
            witness: None,
            bound: None,
            result: None,
            detail: None,
            expected: None,
            matched: None,
        }
    }

    pub fn from_verdict(check: impl Into<String>, v: &Verdict) -> Self {
        let mut e = Self::new(check, v.outcome());
        e.witness = v.witness().map(WitnessEntry::from);
        e.bound = v.bound();
        e
    }

    fn status(&self) -> Status {
        match self.matched {
            Some(true) => Status::Holds,
            Some(false) => Status::Fails,
            None => match self.outcome.as_str() {
                "holds" => Status::Holds,
                "fails" => Status::Fails,
                _ => Status::Unknown,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ViolationEntry {
    pub claim: String,
    pub module: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
    pub submodules: Vec<String>,
    pub ideals: Vec<String>,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_confirmed: Option<bool>,
}

impl From<&Violation> for ViolationEntry {
    fn from(v: &Violation) -> Self {
        Self {
            claim: v.claim.id().to_string(),
            module: v.module.clone(),
            level: v.level,
            submodules: v.submodules.clone(),
            ideals: v.ideals.clone(),
            detail: v.detail.clone(),
            oracle_confirmed: v.oracle_confirmed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MachineReport {
    pub command: String,
    #[serde(rename = "inputs-digest")]
    pub inputs_digest: String,
    pub verdicts: Vec<VerdictEntry>,
    pub violations: Vec<ViolationEntry>,
    pub timing: Option<Timing>,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Status {
    Holds,
    Unknown,
    Fails,
}

/// Hex SHA-256 of the canonical input text.
pub fn digest(input: &str) -> String {
    hex::encode(Sha256::digest(input.as_bytes()))
}

impl MachineReport {
    pub fn new(command: &str, canonical_input: &str) -> Self {
        Self {
            command: command.to_string(),
            inputs_digest: digest(canonical_input),
            verdicts: Vec::new(),
            violations: Vec::new(),
            timing: None,
        }
    }

    /// 1 if anything fails or mismatches, else 2 if anything is unknown, else 0.
    /// A reported violation counts as a failure unless a suite entry accounts for it.
    pub fn exit_code(&self) -> i32 {
        let mut worst = self
            .verdicts
            .iter()
            .map(VerdictEntry::status)
            .max()
            .unwrap_or(Status::Holds);
        let expected_by_suite = self.verdicts.iter().any(|v| v.matched.is_some());
        if !self.violations.is_empty() && !expected_by_suite {
            worst = Status::Fails;
        }
        match worst {
            Status::Holds => EXIT_HOLDS,
            Status::Unknown => EXIT_UNKNOWN,
            Status::Fails => EXIT_FAILS,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let width = self
            .verdicts
            .iter()
            .map(|v| v.check.chars().count())
            .max()
            .unwrap_or(5)
            .max(5);
        let _ = writeln!(out, "{:<width$}  {:<7}  details", "check", "outcome");
        for v in &self.verdicts {
            let mut details = Vec::new();
            if let Some(e) = &v.expected {
                let mark = if v.matched == Some(true) { "ok" } else { "MISMATCH" };
                details.push(format!("expected {e} [{mark}]"));
            }
            if let Some(w) = &v.witness {
                let mut parts = Vec::new();
                if !w.submodules.is_empty() {
                    parts.push(format!("submodules {}", w.submodules.join(", ")));
                }
                if !w.ideals.is_empty() {
                    parts.push(format!("ideals {}", w.ideals.join(", ")));
                }
                if !w.ring_elements.is_empty() {
                    parts.push(format!("elements {}", w.ring_elements.join(", ")));
                }
                details.push(format!("witness: {}", parts.join("; ")));
            }
            if let Some(b) = v.bound {
                details.push(format!("bound {b}"));
            }
            if let Some(r) = &v.result {
                details.push(format!("[{}]", r.join(", ")));
            }
            if let Some(d) = &v.detail {
                details.push(d.clone());
            }
            let _ = writeln!(out, "{:<width$}  {:<7}  {}", v.check, v.outcome, details.join("  "));
        }
        if !self.violations.is_empty() {
            let _ = writeln!(out, "\nviolations:");
            for v in &self.violations {
                let level = v.level.map(|n| format!(" n={n}")).unwrap_or_default();
                let oracle = match v.oracle_confirmed {
                    Some(true) => " (oracle confirms)",
                    Some(false) => " (oracle disagrees)",
                    None => "",
                };
                let _ = writeln!(
                    out,
                    "  {}{level} in {}: submodules [{}] ideals [{}]: {}{oracle}",
                    v.claim,
                    v.module,
                    v.submodules.join(", "),
                    v.ideals.join(", "),
                    v.detail
                );
            }
        }
        if let Some(t) = &self.timing {
            let _ = writeln!(out, "\nelapsed {:.1} ms", t.elapsed_ms);
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.to_text(),
            Format::Machine => self.to_json(),
        }
    }
}
