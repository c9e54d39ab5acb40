//! Finite topological spaces stored with their full family of opens.

use serde::Serialize;

use crate::bits;
use crate::error::{CheckResult, Error, Result};
use crate::order::{points, FiniteFrame, FiniteLattice, Point};

/// Largest point count accepted for spaces.
pub const MAX_POINTS: usize = 12;

/// A finite space. Opens are bit masks over `0..points`, kept sorted
/// ascending, so `∅` is open `0` and the whole space is the last open.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteSpace {
    points: usize,
    opens: Vec<u64>,
}

impl FiniteSpace {
    pub fn new(points: usize, opens: Vec<u64>) -> Result<Self> {
        if points > MAX_POINTS {
            return Err(Error::SizeLimit { what: "points", value: points, cap: MAX_POINTS });
        }
        let universe = bits::full(points);
        if let Some(&bad) = opens.iter().find(|&&u| !bits::is_subset(u, universe)) {
            return Err(Error::Malformed(format!("open {bad:#b} is not a subset of the points")));
        }
        let mut opens = opens;
        opens.sort_unstable();
        opens.dedup();
        if opens.first() != Some(&0) {
            return Err(Error::NotClosed(0, 0));
        }
        if opens.last() != Some(&universe) {
            return Err(Error::NotClosed(universe, universe));
        }
        for (i, &a) in opens.iter().enumerate() {
            for &b in &opens[i + 1..] {
                if opens.binary_search(&(a | b)).is_err() || opens.binary_search(&(a & b)).is_err() {
                    return Err(Error::NotClosed(a, b));
                }
            }
        }
        Ok(FiniteSpace { points, opens })
    }

    pub fn from_index_lists(points: usize, opens: &[Vec<usize>]) -> Result<Self> {
        if let Some(&p) = opens.iter().flatten().find(|&&p| p >= points) {
            return Err(Error::Malformed(format!("point {p} out of range")));
        }
        Self::new(points, opens.iter().map(|o| bits::from_indices(o)).collect())
    }

    /// The topology generated by `gens` (closure under finite unions and
    /// intersections).
    pub fn generated_by(points: usize, gens: impl IntoIterator<Item = u64>) -> Result<Self> {
        let universe = bits::full(points);
        Self::new(points, bits::lattice_closure(gens, universe))
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn universe(&self) -> u64 {
        bits::full(self.points)
    }

    pub fn opens(&self) -> &[u64] {
        &self.opens
    }

    pub fn open_index(&self, mask: u64) -> Option<usize> {
        self.opens.binary_search(&mask).ok()
    }

    pub fn is_open(&self, mask: u64) -> bool {
        self.open_index(mask).is_some()
    }

    pub fn is_closed(&self, mask: u64) -> bool {
        self.is_open(self.universe() & !mask)
    }

    pub fn closed_sets(&self) -> Vec<u64> {
        let u = self.universe();
        let mut c: Vec<u64> = self.opens.iter().map(|&o| u & !o).collect();
        c.sort_unstable();
        c
    }

    /// Smallest open containing `p`.
    pub fn minimal_open(&self, p: usize) -> u64 {
        self.opens.iter().filter(|&&u| bits::contains(u, p)).fold(self.universe(), |m, &u| m & u)
    }

    /// Largest open contained in `mask`.
    pub fn interior(&self, mask: u64) -> u64 {
        self.opens.iter().filter(|&&u| bits::is_subset(u, mask)).fold(0, |m, &u| m | u)
    }

    pub fn closure(&self, mask: u64) -> u64 {
        let u = self.universe();
        u & !self.interior(u & !mask)
    }

    pub fn is_discrete(&self) -> bool {
        self.opens.len() == 1usize << self.points
    }

    /// The lattice of opens with element `i` the `i`-th open.
    pub fn opens_lattice(&self) -> FiniteFrame {
        let l = FiniteLattice::from_set_family(&self.opens).expect("opens form a lattice");
        let labels = self.opens.iter().map(|&u| format!("{:?}", bits::to_indices(u))).collect();
        FiniteFrame::new(l.with_labels(labels)).expect("opens form a distributive lattice")
    }

    /// Preimage of `mask` under a point map into this space's codomain.
    pub fn preimage(map: &[usize], mask: u64) -> u64 {
        map.iter().enumerate().filter(|(_, &y)| bits::contains(mask, y)).fold(0, |m, (x, _)| m | 1 << x)
    }

    /// Checks that `map: self → target` pulls opens back to opens.
    pub fn check_continuous(&self, map: &[usize], target: &FiniteSpace) -> Result<()> {
        if map.len() != self.points || map.iter().any(|&y| y >= target.points) {
            return Err(Error::Malformed("point map has the wrong shape".into()));
        }
        for &u in target.opens() {
            if !self.is_open(Self::preimage(map, u)) {
                return Err(Error::NotContinuous(u));
            }
        }
        Ok(())
    }

    pub fn subspace_opens(&self, subset: u64) -> Vec<u64> {
        let mut v: Vec<u64> = self.opens.iter().map(|&u| u & subset).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Specialization preorder `x ≤ y ⇔ x ∈ cl{y}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Specialization {
    pub leq: Vec<Vec<bool>>,
    pub t0: bool,
    /// A pair of distinct topologically indistinguishable points.
    pub not_t0_witness: Option<(usize, usize)>,
}

pub fn specialization(y: &FiniteSpace) -> Specialization {
    let n = y.points();
    // x ∈ cl{y} iff every open containing x contains y
    let leq: Vec<Vec<bool>> = (0..n)
        .map(|a| (0..n).map(|b| y.opens().iter().all(|&u| !bits::contains(u, a) || bits::contains(u, b))).collect())
        .collect();
    let mut witness = None;
    'outer: for a in 0..n {
        for b in a + 1..n {
            if leq[a][b] && leq[b][a] {
                witness = Some((a, b));
                break 'outer;
            }
        }
    }
    Specialization { leq, t0: witness.is_none(), not_t0_witness: witness }
}

/// Front topology from the basis of locally closed sets.
pub fn front_topology(y: &FiniteSpace) -> FiniteSpace {
    let mut basis = Vec::new();
    for &u in y.opens() {
        for c in y.closed_sets() {
            basis.push(u & c);
        }
    }
    FiniteSpace::generated_by(y.points(), basis).expect("front topology is a topology")
}

/// Front topology from the subbasis of all opens and all closed sets.
pub fn front_topology_from_subbasis(y: &FiniteSpace) -> FiniteSpace {
    let gens = y.opens().iter().copied().chain(y.closed_sets());
    FiniteSpace::generated_by(y.points(), gens).expect("front topology is a topology")
}

pub fn patch_topology(x: &FiniteSpace) -> FiniteSpace {
    // every open of a finite space is compact
    let gens = x.opens().iter().copied().chain(x.closed_sets());
    FiniteSpace::generated_by(x.points(), gens).expect("patch topology is a topology")
}

fn point_closure(y: &FiniteSpace, p: usize) -> u64 {
    y.closure(1 << p)
}

fn is_irreducible(y: &FiniteSpace, c: u64) -> bool {
    if c == 0 {
        return false;
    }
    let closed = y.closed_sets();
    let proper: Vec<u64> = closed.iter().copied().filter(|&d| bits::is_subset(d, c) && d != c).collect();
    !proper.iter().any(|&a| proper.iter().any(|&b| a | b == c))
}

pub fn is_sober(y: &FiniteSpace) -> CheckResult {
    for c in y.closed_sets() {
        if !is_irreducible(y, c) {
            continue;
        }
        let generic: Vec<usize> = (0..y.points()).filter(|&p| point_closure(y, p) == c).collect();
        if generic.len() != 1 {
            let mut w = bits::to_indices(c);
            w.extend(generic);
            return CheckResult::fail("unique_generic_point", w);
        }
    }
    CheckResult::pass()
}

/// Prime spectrum of a finite distributive lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spectrum {
    pub space: FiniteSpace,
    pub points: Vec<Point>,
    /// Index of the open `â` for each lattice element `a`.
    pub basic_open: Vec<usize>,
}

impl Spectrum {
    pub fn hat(&self, a: usize) -> u64 {
        self.space.opens()[self.basic_open[a]]
    }
}

pub fn spectrum(d: &FiniteFrame) -> Result<Spectrum> {
    let pts = points(d);
    if pts.len() > MAX_POINTS {
        return Err(Error::SizeLimit { what: "points", value: pts.len(), cap: MAX_POINTS });
    }
    let hats: Vec<u64> = (0..d.size())
        .map(|a| pts.iter().enumerate().filter(|(_, p)| p.eval(a)).fold(0, |m, (i, _)| m | 1 << i))
        .collect();
    let space = FiniteSpace::generated_by(pts.len(), hats.iter().copied())?;
    let basic_open = hats.iter().map(|&h| space.open_index(h).expect("basic open")).collect();
    Ok(Spectrum { space, points: pts, basic_open })
}

/// Sobrification `pt(O(Y))` with the canonical map `y ↦ ŷ`.
pub fn sobrify(y: &FiniteSpace) -> (Spectrum, Vec<usize>) {
    let spec = spectrum(&y.opens_lattice()).expect("spectrum of a finite space's opens");
    let map = (0..y.points())
        .map(|p| {
            let filter: Vec<usize> = (0..y.opens().len()).filter(|&i| bits::contains(y.opens()[i], p)).collect();
            spec.points.iter().position(|q| q.members() == filter.as_slice()).expect("ŷ is a prime filter")
        })
        .collect();
    (spec, map)
}

/// A compact ordered space `(X, τ, ≤)` at finite scale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriestleyData {
    pub points: usize,
    pub order: Vec<Vec<bool>>,
    pub patch: FiniteSpace,
}

impl PriestleyData {
    fn up(&self, mask: u64) -> u64 {
        let mut out = 0;
        for x in bits::members(mask) {
            for y in 0..self.points {
                if self.order[x][y] {
                    out |= 1 << y;
                }
            }
        }
        out
    }

    fn down(&self, mask: u64) -> u64 {
        let mut out = 0;
        for x in bits::members(mask) {
            for y in 0..self.points {
                if self.order[y][x] {
                    out |= 1 << y;
                }
            }
        }
        out
    }

    pub fn is_upset(&self, mask: u64) -> bool {
        self.up(mask) == mask
    }

    fn is_clopen(&self, mask: u64) -> bool {
        self.patch.is_open(mask) && self.patch.is_closed(mask)
    }

    pub fn clopen_upsets(&self) -> Vec<u64> {
        self.patch.opens().iter().copied().filter(|&u| self.is_upset(u) && self.is_clopen(u)).collect()
    }

    /// Order separation by disjoint clopen up-set and down-set.
    pub fn separation(&self) -> CheckResult {
        let ups = self.clopen_upsets();
        let universe = self.patch.universe();
        for x in 0..self.points {
            for y in 0..self.points {
                if self.order[x][y] {
                    continue;
                }
                let separated = ups.iter().any(|&u| {
                    bits::contains(u, x) && !bits::contains(u, y) && self.is_clopen(universe & !u)
                });
                if !separated {
                    return CheckResult::fail("priestley_separation", vec![x, y]);
                }
            }
        }
        CheckResult::pass()
    }
}

pub fn priestley_of(d: &FiniteFrame) -> Result<PriestleyData> {
    let spec = spectrum(d)?;
    let order = specialization(&spec.space).leq;
    Ok(PriestleyData { points: spec.space.points(), order, patch: patch_topology(&spec.space) })
}

pub fn is_esakia(p: &PriestleyData) -> bool {
    p.patch
        .opens()
        .iter()
        .filter(|&&u| p.is_clopen(u))
        .all(|&u| p.is_clopen(p.down(u)))
}

pub fn is_ext_ord_disconnected(p: &PriestleyData) -> bool {
    is_esakia(p)
        && p.patch
            .opens()
            .iter()
            .filter(|&&u| p.is_upset(u))
            .all(|&u| p.is_clopen(p.patch.closure(u)))
}
