//! The JSON problem format read by `check`, `enumerate` and `maximal-pure`.
//!
//! ```json
//! {
//!   "ring": "Z/4",
//!   "ambient_rank": 1,
//!   "relations": [[4]],
//!   "submodules": [{ "name": "N", "generators": [[2]] }],
//!   "checks": [{ "check": "pure", "submodule": "N" }, { "check": "n-pure", "submodule": "N", "level": 2 }]
//! }
//! ```
//!
//! Integers may be written as JSON numbers or as decimal strings; values
//! outside the `i64` range are written back as strings.

use std::fmt;
use std::str::FromStr;

use npure_core::{ExactMatrix, ModulePresentation, QuantificationPolicy, Ring, Submodule};
use num_bigint::BigInt;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::CliError;

/// An arbitrary-precision integer in the input format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Int(pub BigInt);

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(&self.0) {
            Ok(v) => s.serialize_i64(v),
            Err(_) => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct IntVisitor;
        impl Visitor<'_> for IntVisitor {
            type Value = Int;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a decimal string")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Int, E> {
                Ok(Int(v.into()))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Int, E> {
                Ok(Int(v.into()))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Int, E> {
                v.trim()
                    .parse()
                    .map(Int)
                    .map_err(|_| E::custom(format!("`{v}` is not an integer")))
            }
        }
        d.deserialize_any(IntVisitor)
    }
}

impl From<i64> for Int {
    fn from(v: i64) -> Self {
        Int(v.into())
    }
}

/// `"Z"` or `"Z/m"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RingSpec(pub Ring);

impl FromStr for RingSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        if s == "Z" {
            return Ok(RingSpec(Ring::Integers));
        }
        let m = s
            .strip_prefix("Z/")
            .or_else(|| s.strip_prefix("Zmod"))
            .and_then(|m| m.trim().parse::<u64>().ok())
            .ok_or_else(|| CliError::Input(format!("unknown ring `{s}`; expected Z or Z/m")))?;
        Ring::modular(m)
            .map(RingSpec)
            .map_err(|e| CliError::Input(e.to_string()))
    }
}

impl Serialize for RingSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for RingSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// A quantification policy as written by a user; `residue` without an
/// exponent takes the module exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolicySpec {
    Exhaustive,
    Residue(Option<u64>),
    Bounded(u64),
}

impl PolicySpec {
    pub fn resolve(self, m: &ModulePresentation) -> Result<QuantificationPolicy, CliError> {
        Ok(match self {
            PolicySpec::Exhaustive => QuantificationPolicy::Exhaustive,
            PolicySpec::Bounded(limit) => QuantificationPolicy::Bounded { limit },
            PolicySpec::Residue(Some(exponent)) => QuantificationPolicy::ResidueReduced { exponent },
            PolicySpec::Residue(None) => {
                let e = m.exponent();
                let exponent = u64::try_from(&e)
                    .ok()
                    .filter(|&e| e > 0)
                    .ok_or_else(|| CliError::Input("residue policy needs a finite module".into()))?;
                QuantificationPolicy::ResidueReduced { exponent }
            }
        })
    }
}

impl FromStr for PolicySpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = || {
            CliError::Input(format!(
                "unknown policy `{s}`; expected exhaustive, residue[:e] or bounded:B"
            ))
        };
        match s.split_once(':') {
            None if s == "exhaustive" => Ok(PolicySpec::Exhaustive),
            None if s == "residue" => Ok(PolicySpec::Residue(None)),
            Some(("residue", e)) => e.parse().map(|e| PolicySpec::Residue(Some(e))).map_err(|_| bad()),
            Some(("bounded", b)) => b.parse().map(PolicySpec::Bounded).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for PolicySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicySpec::Exhaustive => write!(f, "exhaustive"),
            PolicySpec::Residue(None) => write!(f, "residue"),
            PolicySpec::Residue(Some(e)) => write!(f, "residue:{e}"),
            PolicySpec::Bounded(b) => write!(f, "bounded:{b}"),
        }
    }
}

impl Serialize for PolicySpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PolicySpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Pure,
    RibenboimPure,
    NPure,
    FullyNPure,
    Multiplication,
    FullyCancellation,
    Wsas,
    WsasIdentity,
    PidFactorization,
    CoprimeProduct,
    ProductCharacterization,
    ColonTransfer,
    MaximalNPure,
    MaximalPure,
}

impl CheckKind {
    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Pure => "pure",
            CheckKind::RibenboimPure => "ribenboim-pure",
            CheckKind::NPure => "n-pure",
            CheckKind::FullyNPure => "fully-n-pure",
            CheckKind::Multiplication => "multiplication",
            CheckKind::FullyCancellation => "fully-cancellation",
            CheckKind::Wsas => "wsas",
            CheckKind::WsasIdentity => "wsas-identity",
            CheckKind::PidFactorization => "pid-factorization",
            CheckKind::CoprimeProduct => "coprime-product",
            CheckKind::ProductCharacterization => "product-characterization",
            CheckKind::ColonTransfer => "colon-transfer",
            CheckKind::MaximalNPure => "maximal-n-pure",
            CheckKind::MaximalPure => "maximal-pure",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedSubmodule {
    pub name: String,
    #[serde(default)]
    pub generators: Vec<Vec<Int>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub check: CheckKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Submodule under test; the whole module when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub submodule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<PolicySpec>,
    /// Limit for the bounded policy when the policy is chosen automatically.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prime_powers: Option<Vec<(u64, u32)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<(u64, u64)>,
    /// Maximal pure submodules: include the vacuous candidate `N = K`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub include_self: Option<bool>,
}

impl CheckSpec {
    pub fn new(check: CheckKind) -> Self {
        Self {
            check,
            label: None,
            submodule: None,
            level: None,
            policy: None,
            bound: None,
            prime_powers: None,
            factors: None,
            include_self: None,
        }
    }

    pub fn on(mut self, submodule: &str) -> Self {
        self.submodule = Some(submodule.to_string());
        self
    }

    pub fn at_level(mut self, level: u32) -> Self {
        self.level = Some(level);
        self
    }

    /// `label`, or the check name with its submodule and level.
    pub fn display_name(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        let mut s = self.check.name().to_string();
        if let Some(n) = self.level {
            s = format!("{s}[n={n}]");
        }
        if let Some(sub) = &self.submodule {
            s = format!("{s}({sub})");
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDescription {
    pub ring: RingSpec,
    pub ambient_rank: usize,
    #[serde(default)]
    pub relations: Vec<Vec<Int>>,
    #[serde(default)]
    pub submodules: Vec<NamedSubmodule>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
}

impl ProblemDescription {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed problem: {e}")))
    }

    /// Compact JSON; parsing it gives back an equal description.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("problem serializes")
    }

    fn rows(&self, rows: &[Vec<Int>], what: &str) -> Result<Vec<Vec<BigInt>>, CliError> {
        rows.iter()
            .map(|r| {
                if r.len() != self.ambient_rank {
                    return Err(CliError::Input(format!(
                        "{what} row has {} entries, ambient rank is {}",
                        r.len(),
                        self.ambient_rank
                    )));
                }
                Ok(r.iter().map(|x| x.0.clone()).collect())
            })
            .collect()
    }

    pub fn module(&self) -> Result<ModulePresentation, CliError> {
        let rows = self.rows(&self.relations, "relation")?;
        let matrix = ExactMatrix::from_rows(self.ambient_rank, rows).map_err(|e| CliError::Input(e.to_string()))?;
        ModulePresentation::new(self.ring.0, self.ambient_rank, &matrix).map_err(|e| CliError::Input(e.to_string()))
    }

    /// Named submodules in file order.
    pub fn named_submodules(&self, m: &ModulePresentation) -> Result<Vec<(String, Submodule)>, CliError> {
        let mut out: Vec<(String, Submodule)> = Vec::new();
        for s in &self.submodules {
            if out.iter().any(|(n, _)| n == &s.name) {
                return Err(CliError::Input(format!("submodule `{}` defined twice", s.name)));
            }
            let gens = self.rows(&s.generators, &format!("submodule `{}`", s.name))?;
            let sub = m.span(gens).map_err(|e| CliError::Input(e.to_string()))?;
            out.push((s.name.clone(), sub));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Z4: &str = r#"{"ring":"Z/4","ambient_rank":1,"relations":[[4]],
        "submodules":[{"name":"N","generators":[["2"]]}],
        "checks":[{"check":"pure","submodule":"N"},{"check":"n-pure","submodule":"N","level":2,"policy":"exhaustive"}]}"#;

    #[test]
    fn parses_and_builds() {
        let p = ProblemDescription::parse(Z4).unwrap();
        assert_eq!(p.ring, RingSpec(Ring::modular(4).unwrap()));
        assert_eq!(p.submodules[0].generators, vec![vec![Int::from(2)]]);
        let m = p.module().unwrap();
        let subs = p.named_submodules(&m).unwrap();
        assert_eq!(subs[0].1, m.span([[2]]).unwrap());
        assert_eq!(p.checks[1].display_name(), "n-pure[n=2](N)");
    }

    #[test]
    fn big_integers_survive_as_strings() {
        let text = r#"{"ring":"Z","ambient_rank":1,"relations":[["123456789012345678901234567890"]]}"#;
        let p = ProblemDescription::parse(text).unwrap();
        assert!(p.to_json().contains("\"123456789012345678901234567890\""));
        assert_eq!(ProblemDescription::parse(&p.to_json()).unwrap(), p);
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in [
            r#"{"ring":"Q","ambient_rank":1}"#,
            r#"{"ring":"Z/1","ambient_rank":1}"#,
            r#"{"ring":"Z","ambient_rank":2,"relations":[[1]]}"#,
            r#"{"ring":"Z","ambient_rank":1,"checks":[{"check":"purity"}]}"#,
            r#"{"ring":"Z","ambient_rank":1,"extra":3}"#,
            r#"{"ring":"Z","ambient_rank":1,"relations":[["x"]]}"#,
        ] {
            let parsed = ProblemDescription::parse(bad).and_then(|p| p.module().map(|_| p));
            assert!(parsed.is_err(), "{bad}");
        }
        let dup = r#"{"ring":"Z","ambient_rank":1,"submodules":[{"name":"A"},{"name":"A"}]}"#;
        let p = ProblemDescription::parse(dup).unwrap();
        assert!(p.named_submodules(&p.module().unwrap()).is_err());
    }

    #[test]
    fn policy_strings() {
        for s in ["exhaustive", "residue", "residue:12", "bounded:8"] {
            assert_eq!(s.parse::<PolicySpec>().unwrap().to_string(), s);
        }
        assert!("bounded".parse::<PolicySpec>().is_err());
        assert!("exhaustive:2".parse::<PolicySpec>().is_err());
    }
}
