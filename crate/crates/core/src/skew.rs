//! Finite skew lattices as operation tables.
//!
//! Covers the identity catalog (handedness, strong distributivity, symmetry,
//! normality), Green's relation 𝒟 and the commutative shadow, restrictions,
//! intersections, join completeness, and the standard families `P(R,S)` and
//! `P_T`.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::order::{band_pair_violation, FiniteLattice, Law, Table, TableMorphism};

/// Largest carrier accepted by constructors and validators.
pub const MAX_SKEW_SIZE: usize = 256;
/// Carriers up to this size get exhaustive commuting-subset enumeration.
pub const FULL_JOIN_COMPLETE_CAP: usize = 12;
/// Carriers up to this size get the direct infinite-distributivity check.
pub const INFINITE_DISTRIBUTIVITY_CAP: usize = 8;
/// Maximal cliques sampled above [`FULL_JOIN_COMPLETE_CAP`].
pub const SAMPLED_CLIQUES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSkewLattice {
    meet: Table,
    join: Table,
    zero: Option<usize>,
    labels: Option<Vec<String>>,
}

impl FiniteSkewLattice {
    /// Validates tables as a skew lattice. When `zero` is `None` a zero is
    /// detected if one exists.
    pub fn validate(meet: &[Vec<usize>], join: &[Vec<usize>], zero: Option<usize>) -> Result<Self> {
        Self::from_tables(Table::from_rows(meet)?, Table::from_rows(join)?, zero)
    }

    pub fn from_tables(meet: Table, join: Table, zero: Option<usize>) -> Result<Self> {
        let n = meet.size();
        if n > MAX_SKEW_SIZE {
            return Err(Error::SizeLimit { what: "skew lattice size", value: n, cap: MAX_SKEW_SIZE });
        }
        if let Some((law, witness)) = band_pair_violation(&meet, &join) {
            return Err(Error::AxiomViolation { law, witness });
        }
        let is_zero = |z: usize| (0..n).all(|x| join.get(x, z) == x && join.get(z, x) == x);
        let zero = match zero {
            Some(z) if z >= n => return Err(Error::Malformed(format!("zero {z} out of range"))),
            Some(z) => match (0..n).find(|&x| join.get(x, z) != x || join.get(z, x) != x) {
                Some(x) => return Err(Error::AxiomViolation { law: "zero".into(), witness: vec![x, z] }),
                None => Some(z),
            },
            None => (0..n).find(|&z| is_zero(z)),
        };
        Ok(FiniteSkewLattice { meet, join, zero, labels: None })
    }

    pub fn from_lattice(l: &FiniteLattice) -> Self {
        FiniteSkewLattice {
            meet: l.meet_table().clone(),
            join: l.join_table().clone(),
            zero: Some(l.bottom()),
            labels: l.labels().map(|s| s.to_vec()),
        }
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

    pub fn label(&self, a: usize) -> String {
        match &self.labels {
            Some(l) => l[a].clone(),
            None => a.to_string(),
        }
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

    pub fn zero(&self) -> Option<usize> {
        self.zero
    }

    pub fn meet_table(&self) -> &Table {
        &self.meet
    }

    pub fn join_table(&self) -> &Table {
        &self.join
    }

    /// Natural partial order: `a ≤ b` iff `a∧b = b∧a = a`.
    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.meet(a, b) == a && self.meet(b, a) == a
    }

    #[inline]
    pub fn commute(&self, a: usize, b: usize) -> bool {
        self.meet(a, b) == self.meet(b, a) && self.join(a, b) == self.join(b, a)
    }

    #[inline]
    pub fn d_related(&self, a: usize, b: usize) -> bool {
        self.meet(self.meet(a, b), a) == a && self.meet(self.meet(b, a), b) == b
    }

    #[inline]
    fn d_related_by_join(&self, a: usize, b: usize) -> bool {
        self.join(self.join(a, b), a) == a && self.join(self.join(b, a), b) == b
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.size();
        (0..n).all(|a| (a..n).all(|b| self.commute(a, b)))
    }

    /// The mirror image `a ∧' b = b ∧ a`, `a ∨' b = b ∨ a`.
    pub fn mirror(&self) -> Self {
        let n = self.size();
        FiniteSkewLattice {
            meet: Table::from_fn(n, |a, b| self.meet(b, a)),
            join: Table::from_fn(n, |a, b| self.join(b, a)),
            zero: self.zero,
            labels: self.labels.clone(),
        }
    }

    /// Least upper bound of `set` in the natural order.
    pub fn supremum(&self, set: &[usize]) -> Option<usize> {
        let n = self.size();
        let upper: Vec<usize> = (0..n).filter(|&u| set.iter().all(|&c| self.leq(c, u))).collect();
        upper.iter().copied().find(|&u| upper.iter().all(|&v| self.leq(u, v)))
    }

    /// Greatest lower bound of a nonempty set in the natural order.
    pub fn intersection(&self, set: &[usize]) -> Result<usize> {
        if set.is_empty() {
            return Err(Error::Malformed("intersection of an empty set".into()));
        }
        let n = self.size();
        let lower: Vec<usize> = (0..n).filter(|&l| set.iter().all(|&c| self.leq(l, c))).collect();
        lower
            .iter()
            .copied()
            .find(|&g| lower.iter().all(|&l| self.leq(l, g)))
            .ok_or(Error::NoBound("greatest lower bound"))
    }

    /// The down-set of `a` as a commutative sub-structure, if it is a lattice.
    pub fn down_set_lattice(&self, a: usize) -> Result<FiniteLattice> {
        let elems: Vec<usize> = (0..self.size()).filter(|&u| self.leq(u, a)).collect();
        let pos: BTreeMap<usize, usize> = elems.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let lookup = |e: usize| pos.get(&e).copied().ok_or(Error::NotClosed(a as u64, e as u64));
        let k = elems.len();
        let mut meet = vec![vec![0; k]; k];
        let mut join = vec![vec![0; k]; k];
        for (i, &x) in elems.iter().enumerate() {
            for (j, &y) in elems.iter().enumerate() {
                meet[i][j] = lookup(self.meet(x, y))?;
                join[i][j] = lookup(self.join(x, y))?;
            }
        }
        FiniteLattice::validate(&meet, &join)
    }
}

/// The partition into 𝒟-classes with the natural order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DStructure {
    /// Classes sorted by least member.
    pub classes: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
    /// `class_order[c][d]`: some member of `c` lies below some member of `d`.
    pub class_order: Vec<Vec<bool>>,
    #[serde(skip)]
    pub leq: Vec<Vec<bool>>,
    pub top_class: Option<usize>,
}

impl DStructure {
    pub fn class_sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }

    pub fn class_leq(&self, c: usize, d: usize) -> bool {
        self.class_order[c][d]
    }
}

/// Green's relation 𝒟, its congruence check and the natural order.
pub fn green_d(s: &FiniteSkewLattice) -> Result<DStructure> {
    let n = s.size();
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for a in 0..n {
        if class_of[a] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let members: Vec<usize> = (a..n).filter(|&b| s.d_related(a, b)).collect();
        for &b in &members {
            class_of[b] = id;
        }
        classes.push(members);
    }
    for a in 0..n {
        for b in 0..n {
            let by_meet = class_of[a] == class_of[b];
            if by_meet != s.d_related(a, b) || by_meet != s.d_related_by_join(a, b) {
                return Err(Error::CongruenceFailure(vec![a, b]));
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            if class_of[a] != class_of[b] {
                continue;
            }
            for c in 0..n {
                let pairs = [
                    (s.meet(a, c), s.meet(b, c)),
                    (s.meet(c, a), s.meet(c, b)),
                    (s.join(a, c), s.join(b, c)),
                    (s.join(c, a), s.join(c, b)),
                ];
                if pairs.iter().any(|&(x, y)| class_of[x] != class_of[y]) {
                    return Err(Error::CongruenceFailure(vec![a, b, c]));
                }
            }
        }
    }
    let leq: Vec<Vec<bool>> = (0..n).map(|a| (0..n).map(|b| s.leq(a, b)).collect()).collect();
    let k = classes.len();
    let mut class_order = vec![vec![false; k]; k];
    for a in 0..n {
        for b in 0..n {
            if leq[a][b] {
                class_order[class_of[a]][class_of[b]] = true;
            }
        }
    }
    let top_class = (0..k).find(|&c| (0..k).all(|d| class_order[d][c]));
    Ok(DStructure { classes, class_of, class_order, leq, top_class })
}

/// The commutative shadow `S/𝒟` with the projection `a ↦ [a]`.
pub fn shadow(s: &FiniteSkewLattice) -> Result<(FiniteLattice, TableMorphism)> {
    let d = green_d(s)?;
    shadow_from(s, &d)
}

pub fn shadow_from(s: &FiniteSkewLattice, d: &DStructure) -> Result<(FiniteLattice, TableMorphism)> {
    let k = d.classes.len();
    let rep = |c: usize| d.classes[c][0];
    let meet = Table::from_fn(k, |c, e| d.class_of[s.meet(rep(c), rep(e))]);
    let join = Table::from_fn(k, |c, e| d.class_of[s.join(rep(c), rep(e))]);
    let labels = d
        .classes
        .iter()
        .map(|c| format!("[{}]", s.label(c[0])))
        .collect();
    let lattice = FiniteLattice::from_tables(meet, join)?.with_labels(labels);
    let proj = check_skew_to_lattice(s, &lattice, &d.class_of)?;
    Ok((lattice, proj))
}

fn check_skew_to_lattice(s: &FiniteSkewLattice, l: &FiniteLattice, map: &[usize]) -> Result<TableMorphism> {
    let n = s.size();
    let mut h = TableMorphism::unchecked(n, l.size(), map.to_vec())?;
    for a in 0..n {
        for b in 0..n {
            if map[s.meet(a, b)] != l.meet(map[a], map[b]) {
                return Err(Error::LawViolation { law: "meet".into(), witness: vec![a, b] });
            }
            if map[s.join(a, b)] != l.join(map[a], map[b]) {
                return Err(Error::LawViolation { law: "join".into(), witness: vec![a, b] });
            }
        }
    }
    h.checked.insert(Law::Meet);
    h.checked.insert(Law::Join);
    if let Some(z) = s.zero() {
        if map[z] != l.bottom() {
            return Err(Error::LawViolation { law: "zero".into(), witness: vec![z] });
        }
        h.checked.insert(Law::Zero);
    }
    Ok(h)
}

/// The unique `b ≤ a` with `[b] = class`.
pub fn restrict(s: &FiniteSkewLattice, d: &DStructure, a: usize, class: usize) -> Result<usize> {
    let below: Vec<usize> = d.classes[class].iter().copied().filter(|&b| s.leq(b, a)).collect();
    match below.as_slice() {
        [] => Err(Error::NoSuchClass { element: a, class }),
        [b] => Ok(*b),
        _ => panic!("restriction of {a} to class {class} is not unique; input is not strongly distributive"),
    }
}

/// Verdicts for the identity catalog.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub left_handed: bool,
    pub right_handed: bool,
    pub strongly_distributive: bool,
    pub symmetric: bool,
    pub distributive: bool,
    pub normal: bool,
    pub has_zero: bool,
    pub join_complete: bool,
    /// `false` when join completeness was sampled rather than enumerated.
    pub join_complete_exact: bool,
    pub shadow_is_frame: bool,
    pub has_top_class: bool,
    /// `None` when the carrier exceeds the direct-check cap.
    pub infinite_distributive: Option<bool>,
    pub ncframe: bool,
    pub witnesses: BTreeMap<String, Vec<usize>>,
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifyOptions {
    pub seed: u64,
    pub full_cap: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { seed: 0, full_cap: FULL_JOIN_COMPLETE_CAP }
    }
}

fn scan2(n: usize, mut bad: impl FnMut(usize, usize) -> bool) -> Option<Vec<usize>> {
    for x in 0..n {
        for y in 0..n {
            if bad(x, y) {
                return Some(vec![x, y]);
            }
        }
    }
    None
}

fn scan3(n: usize, mut bad: impl FnMut(usize, usize, usize) -> bool) -> Option<Vec<usize>> {
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if bad(x, y, z) {
                    return Some(vec![x, y, z]);
                }
            }
        }
    }
    None
}

pub fn classify(s: &FiniteSkewLattice) -> PropertyReport {
    classify_with(s, ClassifyOptions::default())
}

pub fn classify_with(s: &FiniteSkewLattice, opts: ClassifyOptions) -> PropertyReport {
    let n = s.size();
    let m = |a, b| s.meet(a, b);
    let j = |a, b| s.join(a, b);
    let mut witnesses = BTreeMap::new();
    let mut verdict = |name: &str, w: Option<Vec<usize>>| -> bool {
        match w {
            Some(w) => {
                witnesses.insert(name.to_string(), w);
                false
            }
            None => true,
        }
    };

    let left_handed = verdict("left_handed", scan2(n, |x, y| m(m(x, y), x) != m(x, y)));
    let right_handed = verdict("right_handed", scan2(n, |x, y| m(m(x, y), x) != m(y, x)));
    let strongly_distributive = verdict(
        "strongly_distributive",
        scan3(n, |x, y, z| m(j(x, y), z) != j(m(x, z), m(y, z)) || m(x, j(y, z)) != j(m(x, y), m(x, z))),
    );
    let symmetric = verdict("symmetric", scan2(n, |x, y| (j(x, y) == j(y, x)) != (m(x, y) == m(y, x))));
    let distributive = verdict(
        "distributive",
        scan3(n, |x, y, z| {
            m(m(x, j(y, z)), x) != j(m(m(x, y), x), m(m(x, z), x))
                || j(j(x, m(y, z)), x) != m(j(j(x, y), x), j(j(x, z), x))
        }),
    );
    let normal = verdict("normal", scan3(n, |x, y, z| m(m(m(x, y), z), x) != m(m(m(x, z), y), x)));
    let has_zero = s.zero().is_some();
    if !has_zero {
        witnesses.insert("has_zero".into(), vec![]);
    }

    let cliques = CommutingSubsets::new(s, opts);
    let join_complete_exact = cliques.exact;
    let mut join_complete = true;
    for c in &cliques.sets {
        if s.supremum(c).is_none() {
            witnesses.insert("join_complete".into(), c.clone());
            join_complete = false;
            break;
        }
    }

    let d = green_d(s).expect("validated skew lattices have 𝒟 as a congruence");
    let has_top_class = d.top_class.is_some();
    let (shadow_lattice, _) = shadow_from(s, &d).expect("shadow of a validated skew lattice is a lattice");
    let shadow_is_frame = match shadow_lattice.distributivity_witness() {
        Some(w) => {
            witnesses.insert("shadow_is_frame".into(), w);
            false
        }
        None => true,
    };

    let infinite_distributive = if n <= INFINITE_DISTRIBUTIVITY_CAP && cliques.exact {
        let w = infinite_distributivity_witness(s, &cliques.sets);
        if let Some(w) = &w {
            witnesses.insert("infinite_distributive".into(), w.clone());
        }
        Some(w.is_none())
    } else {
        None
    };

    let mut ncframe =
        has_zero && strongly_distributive && shadow_is_frame && join_complete && infinite_distributive != Some(false);
    if ncframe && !has_top_class {
        // a join-complete skew lattice must have a maximal class
        witnesses.insert("top_class".into(), vec![]);
        ncframe = false;
    }

    PropertyReport {
        left_handed,
        right_handed,
        strongly_distributive,
        symmetric,
        distributive,
        normal,
        has_zero,
        join_complete,
        join_complete_exact,
        shadow_is_frame,
        has_top_class,
        infinite_distributive,
        ncframe,
        witnesses,
    }
}

fn infinite_distributivity_witness(s: &FiniteSkewLattice, sets: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = s.size();
    for c in sets {
        let Some(sup) = s.supremum(c) else { continue };
        for y in 0..n {
            let right: Vec<usize> = c.iter().map(|&x| s.meet(x, y)).collect();
            let left: Vec<usize> = c.iter().map(|&x| s.meet(y, x)).collect();
            if s.supremum(&right) != Some(s.meet(sup, y)) || s.supremum(&left) != Some(s.meet(y, sup)) {
                let mut w = c.clone();
                w.push(y);
                return Some(w);
            }
        }
    }
    None
}

/// Nonempty pairwise-commuting subsets, in lexicographic order.
pub struct CommutingSubsets {
    pub sets: Vec<Vec<usize>>,
    /// `true` when every commuting subset was enumerated.
    pub exact: bool,
}

impl CommutingSubsets {
    pub fn new(s: &FiniteSkewLattice, opts: ClassifyOptions) -> Self {
        let n = s.size();
        let adj: Vec<Vec<bool>> = (0..n).map(|a| (0..n).map(|b| s.commute(a, b)).collect()).collect();
        let mut sets = Vec::new();
        if n <= opts.full_cap {
            let mut stack = Vec::new();
            extend_cliques(&adj, 0, &mut stack, usize::MAX, &mut sets);
            return CommutingSubsets { sets, exact: true };
        }
        let mut stack = Vec::new();
        extend_cliques(&adj, 0, &mut stack, 3, &mut sets);
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut order: Vec<usize> = (0..n).collect();
        for _ in 0..SAMPLED_CLIQUES {
            order.shuffle(&mut rng);
            let mut clique: Vec<usize> = Vec::new();
            for &v in &order {
                if clique.iter().all(|&u| adj[u][v]) {
                    clique.push(v);
                }
            }
            clique.sort_unstable();
            sets.push(clique);
        }
        CommutingSubsets { sets, exact: false }
    }
}

fn extend_cliques(adj: &[Vec<bool>], from: usize, stack: &mut Vec<usize>, max_len: usize, out: &mut Vec<Vec<usize>>) {
    for v in from..adj.len() {
        if stack.iter().all(|&u| adj[u][v]) {
            stack.push(v);
            out.push(stack.clone());
            if stack.len() < max_len {
                extend_cliques(adj, v + 1, stack, max_len, out);
            }
            stack.pop();
        }
    }
}

/// Verifies a map between skew lattices against the requested laws.
pub fn check_skew_morphism(
    map: &[usize],
    source: &FiniteSkewLattice,
    target: &FiniteSkewLattice,
    laws: &[Law],
) -> Result<TableMorphism> {
    let mut h = TableMorphism::unchecked(source.size(), target.size(), map.to_vec())?;
    let n = source.size();
    let fail = |law: Law, witness: Vec<usize>| Err(Error::LawViolation { law: law.name().into(), witness });
    for &law in laws {
        match law {
            Law::Meet => {
                if let Some(w) = scan2(n, |a, b| map[source.meet(a, b)] != target.meet(map[a], map[b])) {
                    return fail(law, w);
                }
            }
            Law::Join => {
                if let Some(w) = scan2(n, |a, b| map[source.join(a, b)] != target.join(map[a], map[b])) {
                    return fail(law, w);
                }
            }
            Law::Zero => match (source.zero(), target.zero()) {
                (Some(z), Some(z2)) if map[z] == z2 => {}
                (Some(z), _) => return fail(law, vec![z]),
                (None, _) => return fail(law, vec![]),
            },
            Law::One | Law::TopClass => {
                let ds = green_d(source)?;
                let dt = green_d(target)?;
                let (Some(ts), Some(tt)) = (ds.top_class, dt.top_class) else {
                    return fail(law, vec![]);
                };
                if let Some(&t) = ds.classes[ts].iter().find(|&&t| dt.class_of[map[t]] != tt) {
                    return fail(law, vec![t]);
                }
            }
            Law::CommutingJoins => {
                let subsets = CommutingSubsets::new(source, ClassifyOptions::default());
                for c in &subsets.sets {
                    let Some(sup) = source.supremum(c) else { continue };
                    let images: Vec<usize> = c.iter().map(|&x| map[x]).collect();
                    if target.supremum(&images) != Some(map[sup]) {
                        return fail(law, c.clone());
                    }
                }
            }
            Law::Proper => {
                if let Some(y) = (0..target.size()).find(|&y| !(0..n).any(|x| target.leq(y, map[x]))) {
                    return fail(law, vec![y]);
                }
            }
        }
        h.checked.insert(law);
    }
    Ok(h)
}

/// Verifies a morphism of noncommutative frames.
pub fn check_ncframe_morphism(
    map: &[usize],
    source: &FiniteSkewLattice,
    target: &FiniteSkewLattice,
) -> Result<TableMorphism> {
    check_skew_morphism(map, source, target, &Law::ncframe_laws())
}

/// A partial function from `0..r` to `0..s`.
pub type PartialFunction = Vec<Option<usize>>;

/// Decodes the carrier index of [`partial_function_skew`].
pub fn decode_partial_function(r: usize, s: usize, mut index: usize) -> PartialFunction {
    let mut f = vec![None; r];
    for slot in f.iter_mut().rev() {
        let digit = index % (s + 1);
        index /= s + 1;
        *slot = digit.checked_sub(1);
    }
    f
}

pub fn encode_partial_function(s: usize, f: &[Option<usize>]) -> usize {
    f.iter().fold(0, |acc, v| acc * (s + 1) + v.map_or(0, |x| x + 1))
}

fn format_partial_function(f: &[Option<usize>]) -> String {
    let parts: Vec<String> = f
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|x| format!("{i}:{x}")))
        .collect();
    format!("{{{}}}", parts.join(","))
}

/// All partial functions `0..r → 0..s` with restriction and overwrite.
pub fn partial_function_skew(r: usize, s: usize) -> Result<FiniteSkewLattice> {
    if s == 0 {
        return Err(Error::Malformed("codomain of P(R,S) must be nonempty".into()));
    }
    let size = (s + 1).checked_pow(r as u32).filter(|&v| v <= MAX_SKEW_SIZE).ok_or(Error::SizeLimit {
        what: "(s+1)^r",
        value: (s + 1).saturating_pow(r as u32),
        cap: MAX_SKEW_SIZE,
    })?;
    let funcs: Vec<PartialFunction> = (0..size).map(|i| decode_partial_function(r, s, i)).collect();
    let meet = Table::from_fn(size, |a, b| {
        let h: PartialFunction = funcs[a].iter().zip(&funcs[b]).map(|(x, y)| y.and(*x)).collect();
        encode_partial_function(s, &h)
    });
    let join = Table::from_fn(size, |a, b| {
        let h: PartialFunction = funcs[a].iter().zip(&funcs[b]).map(|(x, y)| y.or(*x)).collect();
        encode_partial_function(s, &h)
    });
    let labels = funcs.iter().map(|f| format_partial_function(f)).collect();
    Ok(FiniteSkewLattice::from_tables(meet, join, Some(0))?.with_labels(labels))
}

/// The left-handed primitive skew lattice `P_T` on `{0} ∪ T`, `|T| = t`.
pub fn primitive(t: usize) -> Result<FiniteSkewLattice> {
    if t == 0 {
        return Err(Error::Malformed("primitive skew lattice needs at least one top element".into()));
    }
    let n = t + 1;
    let meet = Table::from_fn(n, |a, b| if a == 0 || b == 0 { 0 } else { a });
    let join = Table::from_fn(n, |a, b| if a == 0 { b } else if b == 0 { a } else { b });
    let labels = (0..n).map(|i| if i == 0 { "0".into() } else { format!("1_{i}") }).collect();
    Ok(FiniteSkewLattice::from_tables(meet, join, Some(0))?.with_labels(labels))
}
