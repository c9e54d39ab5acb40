use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use skewlat_core::{CheckResult, Error};

#[derive(Debug, Clone, Serialize)]
pub struct Input {
    pub path: String,
    pub kind: String,
    pub sha256: String,
}

impl Input {
    pub fn new(path: &str, kind: &str, bytes: &[u8]) -> Self {
        Input { path: path.to_string(), kind: kind.to_string(), sha256: hex::encode(Sha256::digest(bytes)) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    #[serde(flatten)]
    pub result: CheckResult,
}

impl Verdict {
    pub fn new(name: &str, result: CheckResult) -> Self {
        Verdict { name: name.to_string(), result }
    }

    pub fn flag(name: &str, ok: bool) -> Self {
        Self::new(name, if ok { CheckResult::pass() } else { CheckResult { ok: false, law: Some(name.to_string()), witness: None } })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub command: Vec<String>,
    pub version: &'static str,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    pub inputs: Vec<Input>,
    pub verdicts: Vec<Verdict>,
    pub report: Value,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub emitted: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub timing_ms: f64,
}

impl Certificate {
    pub fn ok(&self) -> bool {
        self.error.is_none() && self.verdicts.iter().all(|v| v.result.ok)
    }
}

/// The name and witness carried by a library error.
pub fn error_verdict(e: &Error) -> Verdict {
    let (law, witness): (&str, Vec<usize>) = match e {
        Error::AxiomViolation { law, witness } | Error::LawViolation { law, witness } | Error::NotMorphism { law, witness } => {
            (law.as_str(), witness.clone())
        }
        Error::NotLeftHanded(w) => ("left_handed", w.clone()),
        Error::CongruenceFailure(w) => ("congruence", w.clone()),
        Error::FunctorialityFailure(w) => ("functoriality", w.clone()),
        Error::GluingFailure { cover, family } => ("gluing", [cover.as_slice(), family.as_slice()].concat()),
        Error::NotSameClass(a, b) => ("same_class", vec![*a, *b]),
        Error::PointMismatch { element } => ("point_support", vec![*element]),
        Error::PointOutsideDomain { point } => ("domain", vec![*point]),
        Error::NotLocalHomeo(g) => ("local_homeomorphism", vec![*g]),
        Error::NoSuchClass { element, class } => ("class_below", vec![*element, *class]),
        Error::NotClosed(a, b) => ("closed_family", vec![*a as usize, *b as usize]),
        Error::NotContinuous(u) => ("continuity", vec![*u as usize]),
        Error::SizeLimit { value, cap, .. } => ("size_limit", vec![*value, *cap]),
        Error::EmptyGlobalSections => ("global_sections", vec![]),
        Error::SheafNotOnFront => ("sheaf_on_front", vec![]),
        Error::NotNcFrame(_) => ("ncframe", vec![]),
        Error::NoBound(_) => ("bound", vec![]),
        Error::IsoFailure(_) => ("isomorphism", vec![]),
        Error::Malformed(_) => ("malformed", vec![]),
    };
    Verdict::new("error", CheckResult::fail(law, witness))
}
