//! Small named structures used throughout the tests, the CLI and the
//! acceptance suite.

use crate::bits;
use crate::duality::h;
use crate::order::{FiniteLattice, Table};
use crate::sheaf::FiniteSheaf;
use crate::skew::{partial_function_skew, primitive, FiniteSkewLattice};
use crate::topo::{front_topology, FiniteSpace};

/// The chain `0 < 1 < … < n-1`.
pub fn chain(n: usize) -> FiniteLattice {
    assert!(n >= 1, "a chain needs at least one element");
    let labels = (0..n).map(|i| i.to_string()).collect();
    FiniteLattice::from_tables(Table::from_fn(n, usize::min), Table::from_fn(n, usize::max))
        .expect("chains are lattices")
        .with_labels(labels)
}

/// The powerset of a `k`-set; element `i` is the subset with mask `i`.
pub fn boolean(k: usize) -> FiniteLattice {
    let family: Vec<u64> = (0..1u64 << k).collect();
    let labels = family.iter().map(|&m| format!("{:?}", bits::to_indices(m))).collect();
    FiniteLattice::from_set_family(&family).expect("powersets are lattices").with_labels(labels)
}

/// `M3`: bottom 0, atoms 1, 2, 3, top 4.
pub fn diamond_m3() -> FiniteLattice {
    let atoms = |x: usize| (1..=3).contains(&x);
    let meet = Table::from_fn(5, |a, b| match (a, b) {
        _ if a == b => a,
        (4, x) | (x, 4) => x,
        _ => 0,
    });
    let join = Table::from_fn(5, |a, b| match (a, b) {
        _ if a == b => a,
        (0, x) | (x, 0) => x,
        (x, y) if atoms(x) && atoms(y) => 4,
        _ => 4,
    });
    FiniteLattice::from_tables(meet, join).expect("M3 is a lattice")
}

/// `N5`: 0 < a < b < 1 with c incomparable; indices 0, 1=a, 2=b, 3=c, 4=1.
pub fn pentagon() -> FiniteLattice {
    let below = |x: usize, y: usize| x == y || x == 0 || y == 4 || (x == 1 && y == 2);
    let n = 5;
    let meet = Table::from_fn(n, |a, b| {
        (0..n).filter(|&z| below(z, a) && below(z, b)).max_by_key(|&z| (0..n).filter(|&w| below(w, z)).count()).unwrap()
    });
    let join = Table::from_fn(n, |a, b| {
        (0..n).filter(|&z| below(a, z) && below(b, z)).min_by_key(|&z| (0..n).filter(|&w| below(w, z)).count()).unwrap()
    });
    FiniteLattice::from_tables(meet, join).expect("N5 is a lattice")
}

/// Sierpiński space: point 1 is open, point 0 is closed.
pub fn sierpinski() -> FiniteSpace {
    FiniteSpace::new(2, vec![0, 0b10, 0b11]).expect("valid")
}

pub fn discrete(n: usize) -> FiniteSpace {
    FiniteSpace::new(n, (0..1u64 << n).collect()).expect("valid")
}

pub fn indiscrete(n: usize) -> FiniteSpace {
    FiniteSpace::new(n, vec![0, bits::full(n)]).expect("valid")
}

pub fn point() -> FiniteSpace {
    discrete(1)
}

/// Opens are the up-sets `{i, …, n-1}` of the chain `0 < … < n-1`.
pub fn chain_space(n: usize) -> FiniteSpace {
    let full = bits::full(n);
    let mut opens: Vec<u64> = (0..=n).map(|i| full & !bits::full(i)).collect();
    opens.push(0);
    FiniteSpace::new(n, opens).expect("valid")
}

/// `H(SIER, E)` with stalk 1 at the closed point and 2 at the open point.
pub fn nc5() -> FiniteSkewLattice {
    let sier = sierpinski();
    let e = FiniteSheaf::product_over_blocks(&front_topology(&sier), &[1, 2]).expect("valid");
    h(&sier, &e).expect("valid").skew
}

pub fn prim2() -> FiniteSkewLattice {
    primitive(2).expect("valid")
}

pub fn p22() -> FiniteSkewLattice {
    partial_function_skew(2, 2).expect("valid")
}

/// Looks a named structure up: lattices, skew lattices and spaces.
pub fn named(name: &str) -> Option<crate::io::Document> {
    use crate::io::Document;
    let upper = name.to_ascii_uppercase();
    let (stem, digits) = upper.split_at(upper.trim_end_matches(|c: char| c.is_ascii_digit()).len());
    let k: Option<usize> = digits.parse().ok();
    Some(match (stem, k) {
        ("NC", Some(5)) => Document::SkewLattice(nc5()),
        ("PRIM", Some(t)) if t <= 6 => Document::SkewLattice(primitive(t).ok()?),
        ("P", Some(22)) => Document::SkewLattice(p22()),
        ("CHAIN", Some(n)) if (1..=12).contains(&n) => Document::Lattice(chain(n)),
        ("BOOL", Some(k)) if k <= 4 => Document::Lattice(boolean(k)),
        ("M", Some(3)) => Document::Lattice(diamond_m3()),
        ("N", Some(5)) => Document::Lattice(pentagon()),
        ("SIER", None) => Document::Space(sierpinski()),
        ("DISC", Some(n)) if n <= 12 => Document::Space(discrete(n)),
        ("INDISC", Some(n)) if (1..=12).contains(&n) => Document::Space(indiscrete(n)),
        _ => return None,
    })
}
