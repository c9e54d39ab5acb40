//! Instance generators: exhaustive small skew lattices, lattices up to
//! isomorphism, topologies, sheaves with bounded stalks, and seeded random
//! skew lattices.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits;
use crate::catalog;
use crate::duality::h;
use crate::error::{Error, Result};
use crate::iso::lattice_isomorphism;
use crate::order::{FiniteLattice, Table};
use crate::sheaf::FiniteSheaf;
use crate::skew::{partial_function_skew, primitive, FiniteSkewLattice};
use crate::topo::{front_topology, FiniteSpace};

pub const EXHAUSTIVE_SKEW_CAP: usize = 4;
pub const EXHAUSTIVE_TOPOLOGY_CAP: usize = 4;

const UNSET: usize = usize::MAX;

fn associative_so_far(t: &[usize], n: usize) -> bool {
    for a in 0..n {
        for b in 0..n {
            let ab = t[a * n + b];
            if ab == UNSET {
                continue;
            }
            for c in 0..n {
                let bc = t[b * n + c];
                if bc == UNSET {
                    continue;
                }
                let (l, r) = (t[ab * n + c], t[a * n + bc]);
                if l != UNSET && r != UNSET && l != r {
                    return false;
                }
            }
        }
    }
    true
}

/// Backtracking over idempotent associative tables; `allowed(a, b, c)`
/// restricts the value of cell `(a, b)`.
fn bands_with(n: usize, allowed: &dyn Fn(usize, usize, usize) -> bool, out: &mut Vec<Vec<usize>>) {
    let mut t = vec![UNSET; n * n];
    for a in 0..n {
        t[a * n + a] = a;
    }
    let cells: Vec<usize> = (0..n * n).filter(|&i| i / n != i % n).collect();
    fn go(n: usize, k: usize, cells: &[usize], t: &mut Vec<usize>, allowed: &dyn Fn(usize, usize, usize) -> bool, out: &mut Vec<Vec<usize>>) {
        if k == cells.len() {
            out.push(t.clone());
            return;
        }
        let i = cells[k];
        for c in 0..n {
            if !allowed(i / n, i % n, c) {
                continue;
            }
            t[i] = c;
            if associative_so_far(t, n) {
                go(n, k + 1, cells, t, allowed, out);
            }
        }
        t[i] = UNSET;
    }
    go(n, 0, &cells, &mut t, allowed, out);
}

fn rows(t: &[usize], n: usize) -> Vec<Vec<usize>> {
    t.chunks(n).map(<[usize]>::to_vec).collect()
}

/// Every pair of operation tables on `0..n` that forms a skew lattice
/// (labelled, not up to isomorphism), zero auto-detected.
pub fn all_skew_lattices(n: usize) -> Result<Vec<FiniteSkewLattice>> {
    if n == 0 || n > EXHAUSTIVE_SKEW_CAP {
        return Err(Error::SizeLimit { what: "exhaustive skew lattice size", value: n, cap: EXHAUSTIVE_SKEW_CAP });
    }
    let mut meets = Vec::new();
    bands_with(n, &|_, _, _| true, &mut meets);
    let mut out = Vec::new();
    for m in &meets {
        // x∧(x∨y) = x and (x∨y)∧y = y
        let allowed = |a: usize, b: usize, c: usize| m[a * n + c] == a && m[c * n + b] == b;
        let mut joins = Vec::new();
        bands_with(n, &allowed, &mut joins);
        for j in joins {
            if let Ok(s) = FiniteSkewLattice::validate(&rows(m, n), &rows(&j, n), None) {
                out.push(s);
            }
        }
    }
    Ok(out)
}

/// Skew lattice on the product of the carriers, `(a, b) ↦ a·|B| + b`.
pub fn product(a: &FiniteSkewLattice, b: &FiniteSkewLattice) -> FiniteSkewLattice {
    let nb = b.size();
    let n = a.size() * nb;
    let meet = Table::from_fn(n, |x, y| a.meet(x / nb, y / nb) * nb + b.meet(x % nb, y % nb));
    let join = Table::from_fn(n, |x, y| a.join(x / nb, y / nb) * nb + b.join(x % nb, y % nb));
    let zero = a.zero().zip(b.zero()).map(|(x, y)| x * nb + y);
    FiniteSkewLattice::from_tables(meet, join, zero).expect("products of skew lattices are skew lattices")
}

/// The copy of `s` in which element `x` is renamed `perm[x]`.
pub fn relabel(s: &FiniteSkewLattice, perm: &[usize]) -> FiniteSkewLattice {
    let n = s.size();
    let mut inv = vec![0; n];
    for (x, &p) in perm.iter().enumerate() {
        inv[p] = x;
    }
    let meet = Table::from_fn(n, |x, y| perm[s.meet(inv[x], inv[y])]);
    let join = Table::from_fn(n, |x, y| perm[s.join(inv[x], inv[y])]);
    FiniteSkewLattice::from_tables(meet, join, s.zero().map(|z| perm[z])).expect("relabelling preserves the axioms")
}

/// The subalgebra generated by `gens`, renumbered in ascending order.
pub fn subalgebra(s: &FiniteSkewLattice, gens: &[usize]) -> FiniteSkewLattice {
    let mut inside = vec![false; s.size()];
    let mut elems: Vec<usize> = Vec::new();
    for &g in gens {
        if !std::mem::replace(&mut inside[g], true) {
            elems.push(g);
        }
    }
    let mut changed = true;
    while changed {
        changed = false;
        let snapshot = elems.clone();
        for &x in &snapshot {
            for &y in &snapshot {
                for z in [s.meet(x, y), s.join(x, y)] {
                    if !std::mem::replace(&mut inside[z], true) {
                        elems.push(z);
                        changed = true;
                    }
                }
            }
        }
    }
    elems.sort_unstable();
    let pos = |x: usize| elems.binary_search(&x).expect("closed");
    let n = elems.len();
    let meet = Table::from_fn(n, |i, j| pos(s.meet(elems[i], elems[j])));
    let join = Table::from_fn(n, |i, j| pos(s.join(elems[i], elems[j])));
    FiniteSkewLattice::from_tables(meet, join, None).expect("subalgebras of skew lattices are skew lattices")
}

/// The opposite skew lattice, with meet and join exchanged.
pub fn dual(s: &FiniteSkewLattice) -> FiniteSkewLattice {
    FiniteSkewLattice::from_tables(s.join_table().clone(), s.meet_table().clone(), None).expect("duals of skew lattices are skew lattices")
}

/// Pool of structured skew lattices from which random instances are cut.
fn pool() -> Vec<FiniteSkewLattice> {
    let mut v = vec![catalog::nc5(), catalog::p22(), partial_function_skew(2, 3).expect("valid"), partial_function_skew(3, 2).expect("valid")];
    for t in 1..=4 {
        v.push(primitive(t).expect("valid"));
    }
    for n in 2..=4 {
        v.push(FiniteSkewLattice::from_lattice(&catalog::chain(n)));
    }
    v.push(FiniteSkewLattice::from_lattice(&catalog::diamond_m3()));
    v.push(FiniteSkewLattice::from_lattice(&catalog::pentagon()));
    v.push(FiniteSkewLattice::from_lattice(&catalog::boolean(2)));
    let sier = catalog::sierpinski();
    for stalks in [[2, 1], [2, 2], [3, 1]] {
        let e = FiniteSheaf::product_over_blocks(&front_topology(&sier), &stalks).expect("valid");
        v.push(h(&sier, &e).expect("valid").skew);
    }
    let mirrored: Vec<_> = v.iter().map(FiniteSkewLattice::mirror).collect();
    let duals: Vec<_> = v.iter().map(dual).collect();
    v.extend(mirrored);
    v.extend(duals);
    v
}

/// `count` seeded random skew lattices of size `≤ max_size`: subalgebras
/// of pool members and of their products, randomly relabelled.
pub fn random_skew_lattices(count: usize, max_size: usize, seed: u64) -> Vec<FiniteSkewLattice> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = pool();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a = &base[rng.random_range(0..base.len())];
        let source = if rng.random_bool(0.3) {
            let b = &base[rng.random_range(0..base.len())];
            if a.size() * b.size() <= 64 {
                product(a, b)
            } else {
                a.clone()
            }
        } else {
            a.clone()
        };
        let k = rng.random_range(1..=3);
        let gens: Vec<usize> = (0..k).map(|_| rng.random_range(0..source.size())).collect();
        let sub = subalgebra(&source, &gens);
        if sub.size() > max_size {
            continue;
        }
        let mut perm: Vec<usize> = (0..sub.size()).collect();
        perm.shuffle(&mut rng);
        out.push(relabel(&sub, &perm));
    }
    out
}

/// Every topology on `0..n` (labelled).
pub fn all_topologies(n: usize) -> Result<Vec<FiniteSpace>> {
    if n > EXHAUSTIVE_TOPOLOGY_CAP {
        return Err(Error::SizeLimit { what: "exhaustive topology size", value: n, cap: EXHAUSTIVE_TOPOLOGY_CAP });
    }
    let full = bits::full(n);
    let middle: Vec<u64> = (1..full).collect();
    let mut out = Vec::new();
    for choice in 0u64..(1 << middle.len()) {
        let mut opens = vec![0, full];
        opens.extend(bits::members(choice).map(|i| middle[i]));
        opens.dedup();
        let closed = opens.iter().all(|&u| opens.iter().all(|&v| opens.contains(&(u | v)) && opens.contains(&(u & v))));
        if closed {
            out.push(FiniteSpace::new(n, opens).expect("closed family"));
        }
    }
    Ok(out)
}

/// Lattices of size `n` up to isomorphism, as naturally labelled posets
/// with bottom `0` and top `n-1`.
pub fn lattices_up_to_iso(n: usize) -> Vec<FiniteLattice> {
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![catalog::chain(1)];
    }
    let inner: Vec<(usize, usize)> = (1..n - 1).flat_map(|i| (i + 1..n - 1).map(move |j| (i, j))).collect();
    let mut out: Vec<FiniteLattice> = Vec::new();
    for choice in 0u64..(1 << inner.len()) {
        let mut leq = vec![vec![false; n]; n];
        for i in 0..n {
            leq[i][i] = true;
            leq[0][i] = true;
            leq[i][n - 1] = true;
        }
        for k in bits::members(choice) {
            let (i, j) = inner[k];
            leq[i][j] = true;
        }
        let transitive = (0..n).all(|i| (0..n).all(|j| !leq[i][j] || (0..n).all(|k| !leq[j][k] || leq[i][k])));
        if !transitive {
            continue;
        }
        let bound = |i: usize, j: usize, up: bool| -> Option<usize> {
            let cands: Vec<usize> = (0..n).filter(|&k| if up { leq[i][k] && leq[j][k] } else { leq[k][i] && leq[k][j] }).collect();
            cands.iter().copied().find(|&k| cands.iter().all(|&m| if up { leq[k][m] } else { leq[m][k] }))
        };
        let mut meet = vec![vec![0; n]; n];
        let mut join = vec![vec![0; n]; n];
        let mut ok = true;
        'outer: for i in 0..n {
            for j in 0..n {
                match (bound(i, j, false), bound(i, j, true)) {
                    (Some(m), Some(jn)) => {
                        meet[i][j] = m;
                        join[i][j] = jn;
                    }
                    _ => {
                        ok = false;
                        break 'outer;
                    }
                }
            }
        }
        if !ok {
            continue;
        }
        let l = FiniteLattice::validate(&meet, &join).expect("order lattice");
        if !out.iter().any(|m| lattice_isomorphism(m, &l).is_some()) {
            out.push(l);
        }
    }
    out
}

/// Distributive lattices (finite frames) of size `n` up to isomorphism.
pub fn distributive_lattices_up_to_iso(n: usize) -> Vec<FiniteLattice> {
    lattices_up_to_iso(n).into_iter().filter(|l| l.distributivity_witness().is_none()).collect()
}

/// Every sheaf on `space` whose stalks have sizes in `min..=max`: choices
/// of a set per minimal open and functorial restriction maps between
/// them, with sections the compatible families.
pub fn all_sheaves(space: &FiniteSpace, min: usize, max: usize) -> Result<Vec<FiniteSheaf>> {
    let n = space.points();
    let mut blocks: Vec<u64> = (0..n).map(|p| space.minimal_open(p)).collect();
    blocks.sort_unstable();
    blocks.dedup();
    let class_of: Vec<usize> = (0..n).map(|p| blocks.binary_search(&space.minimal_open(p)).expect("block")).collect();
    let k = blocks.len();
    // strict inclusions U_y ⊊ U_x
    let arrows: Vec<(usize, usize)> =
        (0..k).flat_map(|x| (0..k).map(move |y| (x, y))).filter(|&(x, y)| x != y && bits::is_subset(blocks[y], blocks[x])).collect();
    let mut out = Vec::new();
    let mut sizes = vec![min; k];
    loop {
        let counts: Vec<usize> = arrows.iter().map(|&(x, y)| sizes[y].pow(sizes[x] as u32)).collect();
        let total: usize = counts.iter().product();
        if total > 1_000_000 {
            return Err(Error::SizeLimit { what: "restriction map families", value: total, cap: 1_000_000 });
        }
        for code in 0..total {
            let mut c = code;
            let mut maps = std::collections::HashMap::new();
            for (ai, &(x, y)) in arrows.iter().enumerate() {
                let mut m = Vec::with_capacity(sizes[x]);
                let mut cc = c % counts[ai];
                c /= counts[ai];
                for _ in 0..sizes[x] {
                    m.push(cc % sizes[y].max(1));
                    cc /= sizes[y].max(1);
                }
                maps.insert((x, y), m);
            }
            let functorial = arrows.iter().all(|&(x, y)| {
                arrows.iter().filter(|&&(y2, _)| y2 == y).all(|&(_, z)| {
                    (0..sizes[x]).all(|s| maps[&(y, z)][maps[&(x, y)][s]] == maps[&(x, z)][s])
                })
            });
            if !functorial {
                continue;
            }
            let families = space
                .opens()
                .iter()
                .map(|&u| {
                    let pts: Vec<usize> = bits::members(u).collect();
                    let classes: Vec<usize> = {
                        let mut v: Vec<usize> = pts.iter().map(|&p| class_of[p]).collect();
                        v.sort_unstable();
                        v.dedup();
                        v
                    };
                    let mut fams = Vec::new();
                    let combos: usize = classes.iter().map(|&x| sizes[x]).product();
                    for code in 0..combos {
                        let mut c = code;
                        let mut val = vec![0; k];
                        for &x in &classes {
                            val[x] = c % sizes[x];
                            c /= sizes[x];
                        }
                        let compatible = arrows
                            .iter()
                            .filter(|&&(x, y)| classes.contains(&x) && classes.contains(&y))
                            .all(|&(x, y)| maps[&(x, y)][val[x]] == val[y]);
                        if compatible {
                            fams.push(pts.iter().map(|&p| val[class_of[p]]).collect());
                        }
                    }
                    fams
                })
                .collect();
            out.push(FiniteSheaf::from_germ_families(space.clone(), families)?);
        }
        let mut i = 0;
        while i < k && sizes[i] == max {
            sizes[i] = min;
            i += 1;
        }
        if i == k {
            break;
        }
        sizes[i] += 1;
    }
    Ok(out)
}

/// All `(Y, E)` with `Y` a topology on at most `max_points` points and `E`
/// a sheaf on its front with stalk sizes in `1..=max_stalk`.
pub fn h_instances(max_points: usize, max_stalk: usize) -> Result<Vec<(FiniteSpace, FiniteSheaf)>> {
    let mut out = Vec::new();
    for n in 0..=max_points {
        for y in all_topologies(n)? {
            for e in all_sheaves(&front_topology(&y), 1, max_stalk)? {
                out.push((y.clone(), e));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iso::skew_isomorphism;

    #[test]
    fn counts() {
        // topologies on 0..3 points
        let t: Vec<usize> = (0..=3).map(|n| all_topologies(n).unwrap().len()).collect();
        assert_eq!(t, vec![1, 1, 4, 29]);
        assert_eq!(all_topologies(4).unwrap().len(), 355);
        // lattices and distributive lattices by size
        let l: Vec<usize> = (1..=6).map(|n| lattices_up_to_iso(n).len()).collect();
        assert_eq!(l, vec![1, 1, 1, 2, 5, 15]);
        let d: Vec<usize> = (1..=6).map(|n| distributive_lattices_up_to_iso(n).len()).collect();
        assert_eq!(d, vec![1, 1, 1, 2, 3, 5]);
    }

    #[test]
    fn small_skew_lattices() {
        let one = all_skew_lattices(1).unwrap();
        assert_eq!(one.len(), 1);
        // the 2-element chain in both labellings and the two 2-element rectangular bands
        let two = all_skew_lattices(2).unwrap();
        assert_eq!(two.len(), 4);
        assert!(two.iter().all(|s| s.size() == 2));
    }

    #[test]
    fn random_instances_are_reproducible() {
        let a = random_skew_lattices(20, 8, 7);
        let b = random_skew_lattices(20, 8, 7);
        assert_eq!(a, b);
        assert!(a.iter().all(|s| s.size() <= 8));
        let p = product(&catalog::prim2(), &FiniteSkewLattice::from_lattice(&catalog::chain(2)));
        assert_eq!(p.size(), 6);
        let r = relabel(&catalog::nc5(), &[4, 3, 2, 1, 0]);
        assert!(skew_isomorphism(&r, &catalog::nc5()).is_some());
    }

    #[test]
    fn sheaf_enumeration() {
        let sier = catalog::sierpinski();
        // the front of SIER is discrete: sheaves are stalk vectors
        assert_eq!(all_sheaves(&front_topology(&sier), 1, 2).unwrap().len(), 4);
        // on SIER, sizes (a, b) at (closed, open) admit b^a restriction maps
        assert_eq!(all_sheaves(&sier, 1, 2).unwrap().len(), 8);
        for e in all_sheaves(&catalog::indiscrete(2), 1, 2).unwrap() {
            assert_eq!(e.stalk_sizes()[0], e.stalk_sizes()[1]);
        }
    }
}
