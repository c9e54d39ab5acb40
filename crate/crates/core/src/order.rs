//! Finite lattices, frames, their points and morphisms.
//!
//! Elements are dense indices `0..n`. Operations are stored as row-major
//! `n × n` tables; the order is derived from the meet table.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::bits;
use crate::error::{CheckResult, Error, Result};

/// Largest number of points for which the boolean envelope is materialized.
pub const ENVELOPE_POINT_CAP: usize = 10;
/// Largest lattice handled by the brute-force point oracle.
pub const BRUTE_POINTS_CAP: usize = 16;

/// A square operation table on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Table {
    n: usize,
    cells: Vec<usize>,
}

impl Table {
    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Malformed("empty operation table".into()));
        }
        let mut cells = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Malformed(format!("row {i} has length {}, expected {n}", row.len())));
            }
            for &v in row {
                if v >= n {
                    return Err(Error::Malformed(format!("entry {v} out of range in row {i}")));
                }
                cells.push(v);
            }
        }
        Ok(Table { n, cells })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> usize) -> Self {
        let mut cells = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                cells.push(f(a, b));
            }
        }
        Table { n, cells }
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> usize {
        self.cells[a * self.n + b]
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.cells.chunks(self.n).map(|r| r.to_vec()).collect()
    }
}

/// Checks shared by lattices and skew lattices: idempotence, associativity
/// and the four absorption laws.
pub(crate) fn band_pair_violation(meet: &Table, join: &Table) -> Option<(String, Vec<usize>)> {
    let n = meet.size();
    if join.size() != n {
        return Some(("table_size".into(), vec![n, join.size()]));
    }
    for x in 0..n {
        if meet.get(x, x) != x {
            return Some(("meet_idempotent".into(), vec![x]));
        }
        if join.get(x, x) != x {
            return Some(("join_idempotent".into(), vec![x]));
        }
    }
    for (name, t) in [("meet_associative", meet), ("join_associative", join)] {
        for x in 0..n {
            for y in 0..n {
                let xy = t.get(x, y);
                for z in 0..n {
                    if t.get(xy, z) != t.get(x, t.get(y, z)) {
                        return Some((name.into(), vec![x, y, z]));
                    }
                }
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            if meet.get(x, join.get(x, y)) != x || join.get(x, meet.get(x, y)) != x {
                return Some(("absorption".into(), vec![x, y]));
            }
            if join.get(meet.get(x, y), y) != y || meet.get(join.get(x, y), y) != y {
                return Some(("absorption".into(), vec![x, y]));
            }
        }
    }
    None
}

/// A validated finite lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteLattice {
    meet: Table,
    join: Table,
    bottom: usize,
    top: usize,
    labels: Option<Vec<String>>,
}

impl FiniteLattice {
    /// Validates a pair of operation tables as a lattice.
    pub fn validate(meet: &[Vec<usize>], join: &[Vec<usize>]) -> Result<Self> {
        Self::from_tables(Table::from_rows(meet)?, Table::from_rows(join)?)
    }

    pub fn from_tables(meet: Table, join: Table) -> Result<Self> {
        if meet.size() != join.size() {
            return Err(Error::Malformed("meet and join tables differ in size".into()));
        }
        let n = meet.size();
        if let Some((law, w)) = band_pair_violation(&meet, &join) {
            return Err(Error::AxiomViolation { law, witness: w });
        }
        for x in 0..n {
            for y in 0..n {
                if meet.get(x, y) != meet.get(y, x) {
                    return Err(Error::AxiomViolation { law: "meet_commutative".into(), witness: vec![x, y] });
                }
                if join.get(x, y) != join.get(y, x) {
                    return Err(Error::AxiomViolation { law: "join_commutative".into(), witness: vec![x, y] });
                }
            }
        }
        let bottom = (0..n).find(|&b| (0..n).all(|x| meet.get(b, x) == b)).ok_or(Error::NoBound("bottom"))?;
        let top = (0..n).find(|&t| (0..n).all(|x| meet.get(t, x) == x)).ok_or(Error::NoBound("top"))?;
        Ok(FiniteLattice { meet, join, bottom, top, labels: None })
    }

    /// The lattice of a family of subsets closed under union and intersection,
    /// with elements in the order given.
    pub fn from_set_family(family: &[u64]) -> Result<Self> {
        let index: BTreeMap<u64, usize> = family.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let n = family.len();
        let lookup = |m: u64| index.get(&m).copied();
        for &a in family {
            for &b in family {
                if lookup(a | b).is_none() || lookup(a & b).is_none() {
                    return Err(Error::NotClosed(a, b));
                }
            }
        }
        let meet = Table::from_fn(n, |a, b| index[&(family[a] & family[b])]);
        let join = Table::from_fn(n, |a, b| index[&(family[a] | family[b])]);
        Self::from_tables(meet, join)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        if labels.len() == self.size() {
            self.labels = Some(labels);
        }
        self
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn size(&self) -> usize {
        self.meet.size()
    }

    #[inline]
    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet.get(a, b)
    }

    #[inline]
    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join.get(a, b)
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.meet(a, b) == a
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn meet_table(&self) -> &Table {
        &self.meet
    }

    pub fn join_table(&self) -> &Table {
        &self.join
    }

    /// Elements covering nothing but the bottom via a single lower cover.
    pub fn join_irreducibles(&self) -> Vec<usize> {
        (0..self.size())
            .filter(|&j| j != self.bottom && self.lower_covers(j).len() == 1)
            .collect()
    }

    pub fn lower_covers(&self, a: usize) -> Vec<usize> {
        let n = self.size();
        (0..n)
            .filter(|&b| b != a && self.leq(b, a))
            .filter(|&b| !(0..n).any(|c| c != a && c != b && self.leq(b, c) && self.leq(c, a)))
            .collect()
    }

    pub fn upper_covers(&self, a: usize) -> Vec<usize> {
        let n = self.size();
        (0..n)
            .filter(|&b| b != a && self.leq(a, b))
            .filter(|&b| !(0..n).any(|c| c != a && c != b && self.leq(a, c) && self.leq(c, b)))
            .collect()
    }

    /// The complement of `a`, if it has one.
    pub fn complement(&self, a: usize) -> Option<usize> {
        (0..self.size()).find(|&b| self.meet(a, b) == self.bottom && self.join(a, b) == self.top)
    }

    pub fn distributivity_witness(&self) -> Option<Vec<usize>> {
        let n = self.size();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if self.meet(x, self.join(y, z)) != self.join(self.meet(x, y), self.meet(x, z)) {
                        return Some(vec![x, y, z]);
                    }
                }
            }
        }
        None
    }

    pub fn is_boolean(&self) -> bool {
        self.distributivity_witness().is_none() && (0..self.size()).all(|a| self.complement(a).is_some())
    }
}

/// Finite distributivity check; for finite lattices this is the frame law.
pub fn is_frame(lattice: &FiniteLattice) -> CheckResult {
    CheckResult::from_option("distributive", lattice.distributivity_witness())
}

/// A finite distributive lattice (hence a frame).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteFrame(FiniteLattice);

impl FiniteFrame {
    pub fn new(lattice: FiniteLattice) -> Result<Self> {
        match lattice.distributivity_witness() {
            None => Ok(FiniteFrame(lattice)),
            Some(w) => Err(Error::AxiomViolation { law: "distributive".into(), witness: w }),
        }
    }

    pub fn lattice(&self) -> &FiniteLattice {
        &self.0
    }

    pub fn into_lattice(self) -> FiniteLattice {
        self.0
    }
}

impl std::ops::Deref for FiniteFrame {
    type Target = FiniteLattice;
    fn deref(&self) -> &FiniteLattice {
        &self.0
    }
}

/// A point of a finite frame: a prime filter, equivalently a morphism to 𝟐.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Point {
    members: Vec<usize>,
    #[serde(skip)]
    mask: Vec<bool>,
}

impl Point {
    pub fn from_members(n: usize, members: Vec<usize>) -> Self {
        let mut mask = vec![false; n];
        for &m in &members {
            mask[m] = true;
        }
        Point { members, mask }
    }

    /// The filter as a sorted list of elements.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// The value of the corresponding morphism to 𝟐.
    #[inline]
    pub fn eval(&self, a: usize) -> bool {
        self.mask[a]
    }

    pub fn as_map(&self) -> Vec<usize> {
        self.mask.iter().map(|&b| b as usize).collect()
    }
}

fn is_prime_filter(l: &FiniteLattice, mask: &[bool]) -> bool {
    let n = l.size();
    if !mask[l.top()] || mask[l.bottom()] {
        return false;
    }
    for a in 0..n {
        for b in 0..n {
            if mask[l.meet(a, b)] != (mask[a] && mask[b]) {
                return false;
            }
            if mask[l.join(a, b)] != (mask[a] || mask[b]) {
                return false;
            }
        }
    }
    true
}

/// All points, as principal filters of join-irreducibles, sorted
/// lexicographically by filter.
pub fn points(frame: &FiniteFrame) -> Vec<Point> {
    let n = frame.size();
    let mut pts: Vec<Point> = frame
        .join_irreducibles()
        .into_iter()
        .map(|j| Point::from_members(n, (0..n).filter(|&x| frame.leq(j, x)).collect()))
        .collect();
    pts.sort();
    pts
}

/// All points by exhaustive search over 0/1 labelings.
pub fn points_brute_force(lattice: &FiniteLattice) -> Result<Vec<Point>> {
    let n = lattice.size();
    if n > BRUTE_POINTS_CAP {
        return Err(Error::SizeLimit { what: "lattice size", value: n, cap: BRUTE_POINTS_CAP });
    }
    let mut pts = Vec::new();
    for code in 0u64..(1u64 << n) {
        let mask: Vec<bool> = (0..n).map(|i| bits::contains(code, i)).collect();
        if is_prime_filter(lattice, &mask) {
            pts.push(Point::from_members(n, bits::to_indices(code)));
        }
    }
    pts.sort();
    Ok(pts)
}

/// `max { c : c ∧ a ≤ b }`.
pub fn heyting_implication(frame: &FiniteFrame, a: usize, b: usize) -> usize {
    let candidates: Vec<usize> = (0..frame.size()).filter(|&c| frame.leq(frame.meet(c, a), b)).collect();
    let best = candidates.iter().fold(frame.bottom(), |acc, &c| frame.join(acc, c));
    debug_assert!(candidates.contains(&best));
    best
}

/// Laws a table morphism may be checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    Meet,
    Join,
    Zero,
    One,
    Proper,
    TopClass,
    CommutingJoins,
}

impl Law {
    pub fn name(self) -> &'static str {
        match self {
            Law::Meet => "meet",
            Law::Join => "join",
            Law::Zero => "zero",
            Law::One => "one",
            Law::Proper => "proper",
            Law::TopClass => "top_class",
            Law::CommutingJoins => "commuting_joins",
        }
    }

    pub fn lattice_laws() -> [Law; 4] {
        [Law::Meet, Law::Join, Law::Zero, Law::One]
    }

    pub fn ncframe_laws() -> [Law; 5] {
        [Law::Meet, Law::Join, Law::Zero, Law::TopClass, Law::CommutingJoins]
    }
}

/// An element-indexed map between finite structures with the laws it was
/// verified against.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableMorphism {
    pub source_size: usize,
    pub target_size: usize,
    pub map: Vec<usize>,
    pub checked: BTreeSet<Law>,
}

impl TableMorphism {
    pub(crate) fn unchecked(source_size: usize, target_size: usize, map: Vec<usize>) -> Result<Self> {
        if map.len() != source_size {
            return Err(Error::Malformed(format!("map has {} entries, source has {source_size}", map.len())));
        }
        if let Some(&v) = map.iter().find(|&&v| v >= target_size) {
            return Err(Error::Malformed(format!("image {v} outside target of size {target_size}")));
        }
        Ok(TableMorphism { source_size, target_size, map, checked: BTreeSet::new() })
    }

    #[inline]
    pub fn apply(&self, a: usize) -> usize {
        self.map[a]
    }

    pub fn is_injective(&self) -> bool {
        let set: BTreeSet<usize> = self.map.iter().copied().collect();
        set.len() == self.map.len()
    }

    pub fn is_bijective(&self) -> bool {
        self.is_injective() && self.source_size == self.target_size
    }

    pub fn has(&self, law: Law) -> bool {
        self.checked.contains(&law)
    }
}

/// Verifies a lattice map against the requested laws.
pub fn check_morphism(
    map: &[usize],
    source: &FiniteLattice,
    target: &FiniteLattice,
    laws: &[Law],
) -> Result<TableMorphism> {
    let mut h = TableMorphism::unchecked(source.size(), target.size(), map.to_vec())?;
    let n = source.size();
    let fail = |law: Law, witness: Vec<usize>| Err(Error::LawViolation { law: law.name().into(), witness });
    for &law in laws {
        match law {
            Law::Meet => {
                for a in 0..n {
                    for b in 0..n {
                        if map[source.meet(a, b)] != target.meet(map[a], map[b]) {
                            return fail(law, vec![a, b]);
                        }
                    }
                }
            }
            Law::Join | Law::CommutingJoins => {
                for a in 0..n {
                    for b in 0..n {
                        if map[source.join(a, b)] != target.join(map[a], map[b]) {
                            return fail(law, vec![a, b]);
                        }
                    }
                }
            }
            Law::Zero => {
                if map[source.bottom()] != target.bottom() {
                    return fail(law, vec![source.bottom()]);
                }
            }
            Law::One | Law::TopClass => {
                if map[source.top()] != target.top() {
                    return fail(law, vec![source.top()]);
                }
            }
            Law::Proper => {
                for y in 0..target.size() {
                    if !(0..n).any(|x| target.leq(y, map[x])) {
                        return fail(law, vec![y]);
                    }
                }
            }
        }
        h.checked.insert(law);
    }
    Ok(h)
}

/// The boolean subalgebra of the powerset of points generated by the
/// basic opens, with the embedding `a ↦ â`.
pub fn boolean_envelope(frame: &FiniteFrame) -> Result<(FiniteLattice, TableMorphism)> {
    let pts = points(frame);
    if pts.len() > ENVELOPE_POINT_CAP {
        return Err(Error::SizeLimit { what: "points", value: pts.len(), cap: ENVELOPE_POINT_CAP });
    }
    let universe = bits::full(pts.len());
    let hat = |a: usize| -> u64 {
        pts.iter().enumerate().filter(|(_, p)| p.eval(a)).fold(0, |m, (i, _)| m | 1 << i)
    };
    let gens: Vec<u64> = (0..frame.size()).map(hat).collect();
    let mut family: BTreeSet<u64> = gens.iter().copied().collect();
    family.insert(0);
    family.insert(universe);
    loop {
        let current: Vec<u64> = family.iter().copied().collect();
        let mut grew = false;
        for &a in &current {
            grew |= family.insert(universe & !a);
            for &b in &current {
                grew |= family.insert(a & b);
                grew |= family.insert(a | b);
            }
        }
        if !grew {
            break;
        }
    }
    let family: Vec<u64> = family.into_iter().collect();
    let labels = family.iter().map(|&m| format!("{:?}", bits::to_indices(m))).collect();
    let envelope = FiniteLattice::from_set_family(&family)?.with_labels(labels);
    let map: Vec<usize> = gens.iter().map(|g| family.binary_search(g).expect("generator in family")).collect();
    let embedding = check_morphism(&map, frame, &envelope, &Law::lattice_laws())?;
    Ok((envelope, embedding))
}
