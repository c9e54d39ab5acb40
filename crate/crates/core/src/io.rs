//! JSON interchange: lattices, skew lattices, spaces, sheaves, section maps
//! and nuclei, each tagged by a `"kind"` field.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error as ThisError;

use crate::bits;
use crate::duality::GOutput;
use crate::error::Error;
use crate::order::{FiniteLattice, Table};
use crate::sheaf::{FiniteSheaf, Presheaf};
use crate::skew::FiniteSkewLattice;
use crate::topo::FiniteSpace;

/// Input errors are syntactic; validation errors are mathematical.
#[derive(Debug, Clone, PartialEq, Eq, ThisError)]
pub enum IoError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Invalid(Error),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Parse(e.to_string())
    }
}

/// Errors that describe the shape of the input rather than a failed law.
fn classify_error(e: Error) -> IoError {
    match e {
        Error::Malformed(m) => IoError::Parse(m),
        other => IoError::Invalid(other),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    Lattice(FiniteLattice),
    SkewLattice(FiniteSkewLattice),
    Space(FiniteSpace),
    Sheaf(FiniteSheaf),
    /// A (non-sheaf) presheaf, kept when gluing fails.
    Presheaf(Presheaf),
    SectionMap(SectionMap),
    /// A nucleus table, with the frame it acts on when given.
    Nucleus { table: Vec<usize>, frame: Option<FiniteLattice> },
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Lattice(_) => "lattice",
            Document::SkewLattice(_) => "skew_lattice",
            Document::Space(_) => "space",
            Document::Sheaf(_) | Document::Presheaf(_) => "sheaf",
            Document::SectionMap(_) => "section_map",
            Document::Nucleus { .. } => "nucleus",
        }
    }
}

/// `a ↦ (U_a, s_a)` with `U_a` as a point list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionMap {
    pub entries: Vec<(Vec<usize>, usize)>,
}

impl SectionMap {
    pub fn from_g(g: &GOutput) -> Self {
        SectionMap {
            entries: g.section_map.iter().map(|&(u, s)| (bits::to_indices(g.base.opens()[u]), s)).collect(),
        }
    }
}

#[derive(Deserialize)]
struct TablesJson {
    n: Option<usize>,
    meet: Vec<Vec<usize>>,
    join: Vec<Vec<usize>>,
    #[serde(default)]
    zero: Option<usize>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

#[derive(Deserialize)]
struct SpaceJson {
    points: usize,
    opens: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
struct SheafJson {
    space: SpaceJson,
    sections: Vec<Vec<usize>>,
    #[serde(default)]
    restrict: BTreeMap<String, Vec<usize>>,
}

fn tables(t: TablesJson) -> Result<(Table, Table, Option<Vec<String>>), IoError> {
    let meet = Table::from_rows(&t.meet).map_err(classify_error)?;
    let join = Table::from_rows(&t.join).map_err(classify_error)?;
    if let Some(n) = t.n {
        if n != meet.size() || n != join.size() {
            return Err(IoError::Parse(format!("n = {n} does not match the tables")));
        }
    }
    if let Some(l) = &t.labels {
        if l.len() != meet.size() {
            return Err(IoError::Parse("label count does not match the carrier".into()));
        }
    }
    Ok((meet, join, t.labels))
}

fn space(s: SpaceJson) -> Result<FiniteSpace, IoError> {
    for o in &s.opens {
        if let Some(&p) = o.iter().find(|&&p| p >= s.points) {
            return Err(IoError::Parse(format!("point {p} out of range")));
        }
    }
    FiniteSpace::from_index_lists(s.points, &s.opens).map_err(classify_error)
}

fn parse_key(k: &str) -> Result<(usize, usize), IoError> {
    let bad = || IoError::Parse(format!("restriction key `{k}` is not `U,V`"));
    let (u, v) = k.split_once(',').ok_or_else(bad)?;
    Ok((u.trim().parse().map_err(|_| bad())?, v.trim().parse().map_err(|_| bad())?))
}

/// Parses and validates a sheaf file, returning the presheaf when gluing
/// fails so callers can report the failure.
fn sheaf(s: SheafJson) -> Result<Document, IoError> {
    let sp = space(s.space)?;
    if s.sections.len() != sp.opens().len() {
        return Err(IoError::Parse(format!("{} section lists for {} opens", s.sections.len(), sp.opens().len())));
    }
    for (u, ids) in s.sections.iter().enumerate() {
        if ids.iter().enumerate().any(|(i, &id)| i != id) {
            return Err(IoError::Parse(format!("section ids over open {u} are not 0..k")));
        }
    }
    let counts = s.sections.iter().map(Vec::len).collect();
    let mut restrict = BTreeMap::new();
    for (k, v) in s.restrict {
        restrict.insert(parse_key(&k)?, v);
    }
    let pre = Presheaf::new(sp, counts, restrict).map_err(classify_error)?;
    if pre.gluing_failure().is_some() {
        return Ok(Document::Presheaf(pre));
    }
    Ok(Document::Sheaf(FiniteSheaf::from_presheaf(pre).map_err(classify_error)?))
}

pub fn from_value(v: Value) -> Result<Document, IoError> {
    let kind = v.get("kind").and_then(Value::as_str).ok_or_else(|| IoError::Parse("missing `kind`".into()))?.to_string();
    match kind.as_str() {
        "lattice" => {
            let (m, j, labels) = tables(serde_json::from_value(v)?)?;
            let mut l = FiniteLattice::from_tables(m, j).map_err(classify_error)?;
            if let Some(labels) = labels {
                l = l.with_labels(labels);
            }
            Ok(Document::Lattice(l))
        }
        "skew_lattice" => {
            let t: TablesJson = serde_json::from_value(v)?;
            let zero = t.zero;
            if zero.is_some_and(|z| z >= t.meet.len()) {
                return Err(IoError::Parse("zero index out of range".into()));
            }
            let (m, j, labels) = tables(t)?;
            let mut s = FiniteSkewLattice::from_tables(m, j, zero).map_err(classify_error)?;
            if let Some(labels) = labels {
                s = s.with_labels(labels);
            }
            Ok(Document::SkewLattice(s))
        }
        "space" => Ok(Document::Space(space(serde_json::from_value(v)?)?)),
        "sheaf" => sheaf(serde_json::from_value(v)?),
        "section_map" => {
            #[derive(Deserialize)]
            struct J {
                entries: Vec<(Vec<usize>, usize)>,
            }
            let j: J = serde_json::from_value(v)?;
            Ok(Document::SectionMap(SectionMap { entries: j.entries }))
        }
        "nucleus" => {
            let table: Vec<usize> = serde_json::from_value(v.get("table").cloned().ok_or_else(|| IoError::Parse("missing `table`".into()))?)?;
            let frame = match v.get("frame") {
                None | Some(Value::Null) => None,
                Some(f) => match from_value(f.clone())? {
                    Document::Lattice(l) => Some(l),
                    other => return Err(IoError::Parse(format!("nucleus frame has kind `{}`", other.kind()))),
                },
            };
            Ok(Document::Nucleus { table, frame })
        }
        other => Err(IoError::Parse(format!("unknown kind `{other}`"))),
    }
}

pub fn parse(text: &str) -> Result<Document, IoError> {
    from_value(serde_json::from_str(text)?)
}

pub fn lattice_json(l: &FiniteLattice) -> Value {
    let mut v = json!({
        "kind": "lattice",
        "n": l.size(),
        "meet": l.meet_table().rows(),
        "join": l.join_table().rows(),
    });
    if let Some(labels) = l.labels() {
        v["labels"] = json!(labels);
    }
    v
}

pub fn skew_json(s: &FiniteSkewLattice) -> Value {
    let mut v = json!({
        "kind": "skew_lattice",
        "n": s.size(),
        "meet": s.meet_table().rows(),
        "join": s.join_table().rows(),
    });
    if let Some(z) = s.zero() {
        v["zero"] = json!(z);
    }
    if let Some(labels) = s.labels() {
        v["labels"] = json!(labels);
    }
    v
}

pub fn space_json(y: &FiniteSpace) -> Value {
    json!({
        "kind": "space",
        "points": y.points(),
        "opens": y.opens().iter().map(|&u| bits::to_indices(u)).collect::<Vec<_>>(),
    })
}

pub fn presheaf_json(p: &Presheaf) -> Value {
    let restrict: serde_json::Map<String, Value> = p
        .restrictions()
        .iter()
        .filter(|((u, v), _)| u != v)
        .map(|(&(u, v), m)| (format!("{u},{v}"), json!(m)))
        .collect();
    json!({
        "kind": "sheaf",
        "space": space_json(p.space()),
        "sections": p.section_counts().iter().map(|&k| (0..k).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "restrict": restrict,
    })
}

pub fn sheaf_json(e: &FiniteSheaf) -> Value {
    presheaf_json(e.presheaf())
}

pub fn section_map_json(m: &SectionMap) -> Value {
    json!({ "kind": "section_map", "entries": m.entries })
}

pub fn nucleus_json(table: &[usize], frame: Option<&FiniteLattice>) -> Value {
    let mut v = json!({ "kind": "nucleus", "table": table });
    if let Some(l) = frame {
        v["frame"] = lattice_json(l);
    }
    v
}

pub fn to_value(d: &Document) -> Value {
    match d {
        Document::Lattice(l) => lattice_json(l),
        Document::SkewLattice(s) => skew_json(s),
        Document::Space(y) => space_json(y),
        Document::Sheaf(e) => sheaf_json(e),
        Document::Presheaf(p) => presheaf_json(p),
        Document::SectionMap(m) => section_map_json(m),
        Document::Nucleus { table, frame } => nucleus_json(table, frame.as_ref()),
    }
}
