use serde::Serialize;
use thiserror::Error;

/// Errors raised by validators and constructions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("axiom `{law}` fails at {witness:?}")]
    AxiomViolation { law: String, witness: Vec<usize> },
    #[error("missing {0} element")]
    NoBound(&'static str),
    #[error("law `{law}` fails at {witness:?}")]
    LawViolation { law: String, witness: Vec<usize> },
    #[error("instance too large: {what} = {value}, cap {cap}")]
    SizeLimit { what: &'static str, value: usize, cap: usize },
    #[error("Green's D is not a congruence at {0:?}")]
    CongruenceFailure(Vec<usize>),
    #[error("class {class} is not below the class of element {element}")]
    NoSuchClass { element: usize, class: usize },
    #[error("open family not closed: {0:#b} and {1:#b}")]
    NotClosed(u64, u64),
    #[error("restriction maps are not functorial at opens {0:?}")]
    FunctorialityFailure(Vec<usize>),
    #[error("gluing fails for cover {cover:?} with family {family:?}")]
    GluingFailure { cover: Vec<usize>, family: Vec<usize> },
    #[error("point {point} is not in the domain of the section")]
    PointOutsideDomain { point: usize },
    #[error("projection is not a local homeomorphism at germ {0}")]
    NotLocalHomeo(usize),
    #[error("map is not continuous: preimage of open {0:#b} is not open")]
    NotContinuous(u64),
    #[error("sheaf has no global sections")]
    EmptyGlobalSections,
    #[error("sheaf does not live on the front topology of the given space")]
    SheafNotOnFront,
    #[error("not a noncommutative frame: {0}")]
    NotNcFrame(String),
    #[error("skew lattice is not left-handed (witness {0:?})")]
    NotLeftHanded(Vec<usize>),
    #[error("element {element} is not in the point's support")]
    PointMismatch { element: usize },
    #[error("elements {0} and {1} are not distinct members of one D-class")]
    NotSameClass(usize, usize),
    #[error("not a morphism: `{law}` fails at {witness:?}")]
    NotMorphism { law: String, witness: Vec<usize> },
    #[error("isomorphism check failed: {0}")]
    IsoFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Outcome of a universally quantified check, with a witness on failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct CheckResult {
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub law: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Vec<usize>>,
}

impl CheckResult {
    pub fn pass() -> Self {
        CheckResult { ok: true, law: None, witness: None }
    }

    pub fn fail(law: impl Into<String>, witness: Vec<usize>) -> Self {
        CheckResult { ok: false, law: Some(law.into()), witness: Some(witness) }
    }

    pub fn from_option(law: &str, witness: Option<Vec<usize>>) -> Self {
        match witness {
            None => Self::pass(),
            Some(w) => Self::fail(law, w),
        }
    }
}
