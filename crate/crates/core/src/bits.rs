//! Subsets of small carriers encoded as `u64` bit masks.

use std::collections::BTreeSet;

/// Iterator over the indices of set bits, ascending.
pub fn members(mask: u64) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

pub fn full(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub fn from_indices(indices: &[usize]) -> u64 {
    indices.iter().fold(0, |m, &i| m | (1u64 << i))
}

pub fn to_indices(mask: u64) -> Vec<usize> {
    members(mask).collect()
}

pub fn contains(mask: u64, i: usize) -> bool {
    mask >> i & 1 == 1
}

pub fn is_subset(a: u64, b: u64) -> bool {
    a & !b == 0
}

/// Smallest family containing `gens`, the empty set and `universe` that is
/// closed under pairwise union and intersection. Sorted ascending.
pub fn lattice_closure(gens: impl IntoIterator<Item = u64>, universe: u64) -> Vec<u64> {
    let mut meets: BTreeSet<u64> = gens.into_iter().collect();
    meets.insert(universe);
    // intersections first, then unions; unions of intersections of
    // generators are again closed under intersection by distributivity
    loop {
        let current: Vec<u64> = meets.iter().copied().collect();
        let mut grew = false;
        for (i, &a) in current.iter().enumerate() {
            for &b in &current[i + 1..] {
                grew |= meets.insert(a & b);
            }
        }
        if !grew {
            break;
        }
    }
    let mut joins: BTreeSet<u64> = meets.clone();
    joins.insert(0);
    let basis: Vec<u64> = meets.into_iter().collect();
    loop {
        let current: Vec<u64> = joins.iter().copied().collect();
        let mut grew = false;
        for &a in &current {
            for &b in &basis {
                grew |= joins.insert(a | b);
            }
        }
        if !grew {
            break;
        }
    }
    joins.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn members_roundtrip() {
        assert_eq!(to_indices(0b1011), vec![0, 1, 3]);
        assert_eq!(from_indices(&[0, 1, 3]), 0b1011);
        assert_eq!(full(3), 0b111);
    }

    #[test]
    fn closure_of_two_overlapping_sets() {
        let fam = lattice_closure([0b011, 0b110], 0b111);
        assert_eq!(fam, vec![0, 0b010, 0b011, 0b110, 0b111]);
    }
}
