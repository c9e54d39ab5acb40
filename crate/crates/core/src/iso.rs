//! Isomorphism search for finite algebras with two binary operations, and
//! homeomorphism search for finite spaces.
//!
//! Candidates are pruned by order invariants (down-set and up-set sizes,
//! Hasse degrees, height and 𝒟-class size); the backtracking assigns
//! elements in index order and tries targets in index order, so the first
//! isomorphism found is the lexicographically least.

use crate::bits;
use crate::order::FiniteLattice;
use crate::skew::FiniteSkewLattice;
use crate::topo::FiniteSpace;

pub trait TwoOps {
    fn size(&self) -> usize;
    fn op1(&self, a: usize, b: usize) -> usize;
    fn op2(&self, a: usize, b: usize) -> usize;
}

impl TwoOps for FiniteLattice {
    fn size(&self) -> usize {
        FiniteLattice::size(self)
    }
    fn op1(&self, a: usize, b: usize) -> usize {
        self.meet(a, b)
    }
    fn op2(&self, a: usize, b: usize) -> usize {
        self.join(a, b)
    }
}

impl TwoOps for FiniteSkewLattice {
    fn size(&self) -> usize {
        FiniteSkewLattice::size(self)
    }
    fn op1(&self, a: usize, b: usize) -> usize {
        self.meet(a, b)
    }
    fn op2(&self, a: usize, b: usize) -> usize {
        self.join(a, b)
    }
}

type Invariant = (usize, usize, usize, usize, usize, usize, usize);

fn invariants<A: TwoOps>(a: &A) -> Vec<Invariant> {
    let n = a.size();
    let leq = |x: usize, y: usize| a.op1(x, y) == x && a.op1(y, x) == x;
    let lt = |x: usize, y: usize| x != y && leq(x, y);
    let covers = |x: usize, y: usize| lt(x, y) && !(0..n).any(|z| lt(x, z) && lt(z, y));
    let d_rel = |x: usize, y: usize| a.op1(a.op1(x, y), x) == x && a.op1(a.op1(y, x), y) == y;
    let mut height = vec![0usize; n];
    // elements sorted by down-set size form a linear extension
    let down: Vec<usize> = (0..n).map(|x| (0..n).filter(|&y| leq(y, x)).count()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&x| down[x]);
    for &x in &order {
        height[x] = (0..n).filter(|&y| lt(y, x)).map(|y| height[y] + 1).max().unwrap_or(0);
    }
    (0..n)
        .map(|x| {
            (
                down[x],
                (0..n).filter(|&y| leq(x, y)).count(),
                (0..n).filter(|&y| covers(y, x)).count(),
                (0..n).filter(|&y| covers(x, y)).count(),
                height[x],
                (0..n).filter(|&y| d_rel(x, y)).count(),
                (0..n).filter(|&y| a.op1(x, y) == x).count(),
            )
        })
        .collect()
}

/// A bijection `map` with `map[op(x,y)] = op(map[x], map[y])` for both
/// operations, if one exists.
pub fn isomorphism<A: TwoOps, B: TwoOps>(a: &A, b: &B) -> Option<Vec<usize>> {
    let n = a.size();
    if n != b.size() {
        return None;
    }
    let ia = invariants(a);
    let ib = invariants(b);
    let mut sa = ia.clone();
    let mut sb = ib.clone();
    sa.sort();
    sb.sort();
    if sa != sb {
        return None;
    }
    let candidates: Vec<Vec<usize>> = (0..n).map(|x| (0..n).filter(|&y| ia[x] == ib[y]).collect()).collect();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if extend(a, b, 0, &candidates, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

fn consistent<A: TwoOps, B: TwoOps>(a: &A, b: &B, x: usize, map: &[usize]) -> bool {
    let n = a.size();
    for y in 0..n {
        if map[y] == usize::MAX {
            continue;
        }
        for (p, q) in [(x, y), (y, x)] {
            let (mp, mq) = (map[p], map[q]);
            for (r, target) in [(a.op1(p, q), b.op1(mp, mq)), (a.op2(p, q), b.op2(mp, mq))] {
                if map[r] != usize::MAX && map[r] != target {
                    return false;
                }
            }
        }
    }
    true
}

fn extend<A: TwoOps, B: TwoOps>(
    a: &A,
    b: &B,
    x: usize,
    candidates: &[Vec<usize>],
    map: &mut Vec<usize>,
    used: &mut Vec<bool>,
) -> bool {
    if x == a.size() {
        return true;
    }
    for &y in &candidates[x] {
        if used[y] {
            continue;
        }
        map[x] = y;
        used[y] = true;
        if consistent(a, b, x, map) && extend(a, b, x + 1, candidates, map, used) {
            return true;
        }
        map[x] = usize::MAX;
        used[y] = false;
    }
    false
}

pub fn lattice_isomorphism(a: &FiniteLattice, b: &FiniteLattice) -> Option<Vec<usize>> {
    isomorphism(a, b)
}

pub fn skew_isomorphism(a: &FiniteSkewLattice, b: &FiniteSkewLattice) -> Option<Vec<usize>> {
    isomorphism(a, b)
}

/// A point bijection carrying the opens of `a` exactly onto the opens of `b`.
pub fn homeomorphism(a: &FiniteSpace, b: &FiniteSpace) -> Option<Vec<usize>> {
    let n = a.points();
    if n != b.points() || a.opens().len() != b.opens().len() {
        return None;
    }
    let degree = |s: &FiniteSpace, p: usize| s.opens().iter().filter(|&&u| bits::contains(u, p)).count();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        a: &FiniteSpace,
        b: &FiniteSpace,
        x: usize,
        degree: &dyn Fn(&FiniteSpace, usize) -> usize,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        let n = a.points();
        if x == n {
            return a.opens().iter().all(|&u| {
                let image = bits::members(u).fold(0u64, |m, p| m | 1 << map[p]);
                b.is_open(image)
            });
        }
        for y in 0..n {
            if used[y] || degree(a, x) != degree(b, y) {
                continue;
            }
            map[x] = y;
            used[y] = true;
            if go(a, b, x + 1, degree, map, used) {
                return true;
            }
            used[y] = false;
        }
        false
    }
    if go(a, b, 0, &degree, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}
