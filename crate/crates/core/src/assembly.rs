//! Nuclei on finite frames, the frame of nuclei, and the dissolution of a
//! finite space.

use std::collections::HashMap;

use serde::Serialize;

use crate::bits;
use crate::error::{CheckResult, Error, Result};
use crate::iso::{homeomorphism, lattice_isomorphism};
use crate::order::{boolean_envelope, check_morphism, points, FiniteFrame, FiniteLattice, Law, Table, TableMorphism};
use crate::sheaf::Presheaf;
use crate::topo::{front_topology, is_sober, patch_topology, sobrify, spectrum, FiniteSpace};

/// Default largest frame accepted by [`enumerate_nuclei`].
pub const NUCLEUS_CAP: usize = 8;

/// Checks N1 (inflationary), N2 (meet-preserving) and N3 (idempotent).
pub fn is_nucleus(l: &FiniteLattice, table: &[usize]) -> CheckResult {
    let n = l.size();
    if table.len() != n || table.iter().any(|&v| v >= n) {
        return CheckResult::fail("shape", vec![table.len()]);
    }
    if let Some(a) = (0..n).find(|&a| !l.leq(a, table[a])) {
        return CheckResult::fail("N1", vec![a]);
    }
    for a in 0..n {
        for b in 0..n {
            if table[l.meet(a, b)] != l.meet(table[a], table[b]) {
                return CheckResult::fail("N2", vec![a, b]);
            }
        }
    }
    if let Some(a) = (0..n).find(|&a| table[table[a]] != table[a]) {
        return CheckResult::fail("N3", vec![a]);
    }
    CheckResult::pass()
}

/// All nuclei on a finite frame under the pointwise order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assembly {
    /// Nucleus tables, lexicographically sorted.
    pub nuclei: Vec<Vec<usize>>,
    /// The frame on `nuclei` (element `i` is `nuclei[i]`).
    pub frame: FiniteFrame,
}

impl Assembly {
    pub fn index_of(&self, table: &[usize]) -> Option<usize> {
        self.nuclei.binary_search_by(|t| t.as_slice().cmp(table)).ok()
    }

    pub fn len(&self) -> usize {
        self.nuclei.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nuclei.is_empty()
    }
}

pub fn enumerate_nuclei(l: &FiniteFrame) -> Result<Assembly> {
    enumerate_nuclei_with_cap(l, NUCLEUS_CAP)
}

pub fn enumerate_nuclei_with_cap(l: &FiniteFrame, cap: usize) -> Result<Assembly> {
    let n = l.size();
    if n > cap {
        return Err(Error::SizeLimit { what: "frame size", value: n, cap });
    }
    // a linear extension: every meet a∧b is assigned before a and b
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&x| ((0..n).filter(|&y| l.leq(y, x)).count(), x));
    let mut table = vec![usize::MAX; n];
    let mut found = Vec::new();
    search(l, &order, 0, &mut table, &mut found);
    found.sort();
    for t in &found {
        debug_assert!(is_nucleus(l, t).ok);
    }
    let frame = nucleus_frame(l, &found)?;
    Ok(Assembly { nuclei: found, frame })
}

fn search(l: &FiniteLattice, order: &[usize], k: usize, table: &mut Vec<usize>, found: &mut Vec<Vec<usize>>) {
    if k == order.len() {
        if (0..table.len()).all(|a| table[table[a]] == table[a]) {
            found.push(table.clone());
        }
        return;
    }
    let x = order[k];
    for v in 0..l.size() {
        if !l.leq(x, v) {
            continue;
        }
        table[x] = v;
        // N2 against every assigned element; meets are already assigned
        let consistent = order[..k].iter().all(|&y| {
            let m = l.meet(x, y);
            table[m] == l.meet(v, table[y])
        }) && table[l.meet(x, x)] == v;
        // N3 forced where the value is already assigned
        let idempotent_so_far = table[v] == usize::MAX || table[v] == v;
        if consistent && idempotent_so_far {
            search(l, order, k + 1, table, found);
        }
        table[x] = usize::MAX;
    }
}

fn nucleus_frame(l: &FiniteLattice, nuclei: &[Vec<usize>]) -> Result<FiniteFrame> {
    let n = l.size();
    let index: HashMap<&[usize], usize> = nuclei.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();
    let m = nuclei.len();
    let leq = |i: usize, j: usize| (0..n).all(|a| l.leq(nuclei[i][a], nuclei[j][a]));
    let mut meet_rows = vec![vec![0; m]; m];
    let mut join_rows = vec![vec![0; m]; m];
    for i in 0..m {
        for j in 0..m {
            let pointwise: Vec<usize> = (0..n).map(|a| l.meet(nuclei[i][a], nuclei[j][a])).collect();
            meet_rows[i][j] = *index
                .get(pointwise.as_slice())
                .ok_or_else(|| Error::AxiomViolation { law: "pointwise_meet_of_nuclei".into(), witness: vec![i, j] })?;
            let uppers: Vec<usize> = (0..m).filter(|&k| leq(i, k) && leq(j, k)).collect();
            join_rows[i][j] = *uppers
                .iter()
                .find(|&&k| uppers.iter().all(|&u| leq(k, u)))
                .ok_or(Error::NoBound("least upper bound of nuclei"))?;
        }
    }
    let lattice = FiniteLattice::from_tables(Table::from_rows(&meet_rows)?, Table::from_rows(&join_rows)?)?;
    FiniteFrame::new(lattice)
}

/// `ν_S(U) = ⋃{V open : V ∩ S ⊆ U}` as a table over open indices.
pub fn nucleus_of_sublocale(y: &FiniteSpace, s: u64) -> Result<Vec<usize>> {
    let opens = y.opens();
    let table: Vec<usize> = opens
        .iter()
        .map(|&u| {
            let v = opens.iter().filter(|&&v| bits::is_subset(v & s, u)).fold(0, |m, &v| m | v);
            y.open_index(v).expect("union of opens")
        })
        .collect();
    let l = y.opens_lattice();
    let check = is_nucleus(&l, &table);
    if !check.ok {
        return Err(Error::AxiomViolation { law: check.law.unwrap_or_default(), witness: check.witness.unwrap_or_default() });
    }
    Ok(table)
}

/// `a ↦ ν_a` with `ν_a(b) = a ∨ b`, verified as an injective frame map.
pub fn open_nucleus_embedding(l: &FiniteFrame, asm: &Assembly) -> Result<TableMorphism> {
    let n = l.size();
    let map = (0..n)
        .map(|a| {
            let t: Vec<usize> = (0..n).map(|b| l.join(a, b)).collect();
            asm.index_of(&t).ok_or_else(|| Error::AxiomViolation { law: "open_nucleus".into(), witness: vec![a] })
        })
        .collect::<Result<Vec<usize>>>()?;
    let h = check_morphism(&map, l, &asm.frame, &Law::lattice_laws())?;
    if !h.is_injective() {
        return Err(Error::LawViolation { law: "injective".into(), witness: map });
    }
    Ok(h)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DissolutionReport {
    pub count: usize,
    pub boolean: bool,
    pub points: usize,
    pub front_iso: bool,
    pub envelope_iso: bool,
    pub count_matches: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub front_homeomorphism: Option<Vec<usize>>,
}

impl DissolutionReport {
    pub fn ok(&self) -> bool {
        self.boolean && self.front_iso && self.envelope_iso && self.count_matches
    }
}

/// Finite consequences of the dissolution square for the opens of `y`.
pub fn dissolution_checks(y: &FiniteSpace) -> Result<DissolutionReport> {
    let sober = is_sober(y);
    if !sober.ok {
        return Err(Error::Malformed(format!("space is not sober (witness {:?})", sober.witness)));
    }
    let o = y.opens_lattice();
    dissolution_report(&o, &front_topology(y))
}

/// The checks of [`dissolution_checks`] for a frame `l` whose spectrum has
/// front `front`.
pub fn dissolution_report(l: &FiniteFrame, front: &FiniteSpace) -> Result<DissolutionReport> {
    let asm = enumerate_nuclei(l)?;
    let assembly_points = spectrum(&asm.frame)?;
    let front_homeomorphism = homeomorphism(&assembly_points.space, front);
    let (envelope, _) = boolean_envelope(l)?;
    let n_points = points(l).len();
    Ok(DissolutionReport {
        count: asm.len(),
        boolean: asm.frame.is_boolean(),
        points: assembly_points.space.points(),
        front_iso: front_homeomorphism.is_some(),
        envelope_iso: lattice_isomorphism(&asm.frame, &envelope).is_some(),
        count_matches: asm.len() == 1usize << n_points,
        front_homeomorphism,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StableSheafReport {
    /// The stable gluing condition over clopen-trimmed covers.
    pub stable: bool,
    /// Whether the pushforward to `Y` is a sheaf.
    pub pushforward_sheaf: bool,
    /// Whether `G` is a sheaf on the patch space.
    pub patch_sheaf: bool,
    pub global_sections: usize,
    /// `(U, cover…, Z)` for the first stable-condition failure, as masks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stable_witness: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pushforward_witness: Option<Vec<u64>>,
    /// Hypotheses unmet and (a), (b) disagree.
    pub excluded: bool,
    pub verdict: CheckResult,
}

/// Largest open count for which covers are enumerated exhaustively.
pub const STABLE_COVER_CAP: usize = 12;

/// Compares the stable gluing condition with sheafhood of the pushforward.
/// `g` is a presheaf on the patch space of `spectrum(O(Y))`.
pub fn stable_sheaf_check(y: &FiniteSpace, g: &Presheaf) -> Result<StableSheafReport> {
    let (spec, to_spec) = sobrify(y);
    let x = &spec.space;
    let patch = patch_topology(x);
    if g.space() != &patch {
        return Err(Error::Malformed("presheaf does not live on the patch space of the spectrum".into()));
    }
    if x.opens().len() > STABLE_COVER_CAP {
        return Err(Error::SizeLimit { what: "opens", value: x.opens().len(), cap: STABLE_COVER_CAP });
    }
    if to_spec.len() != x.points() {
        return Err(Error::Malformed("space is not sober".into()));
    }
    let clopens: Vec<u64> = {
        let mut z: Vec<u64> = patch.opens().iter().copied().filter(|&z| patch.is_closed(z)).collect();
        // the whole space first, so plain covers are reported before trimmed ones
        z.sort_by_key(|&m| (m != patch.universe(), m));
        z
    };
    let stable_witness = first_cover_failure(g, x.opens(), &clopens);
    let pushforward_witness = first_cover_failure(g, x.opens(), &[patch.universe()]);
    let patch_sheaf = g.gluing_failure().is_none();
    let global_sections = g.global_sections();
    let stable = stable_witness.is_none();
    let pushforward_sheaf = pushforward_witness.is_none();
    let hypotheses = patch_sheaf && global_sections > 0;
    let agree = stable == pushforward_sheaf;
    let verdict = if agree || !hypotheses {
        CheckResult::pass()
    } else {
        CheckResult::fail("stable_iff_pushforward", stable_witness.clone().or(pushforward_witness.clone()).unwrap_or_default().iter().map(|&m| m as usize).collect())
    };
    Ok(StableSheafReport {
        stable,
        pushforward_sheaf,
        patch_sheaf,
        global_sections,
        stable_witness,
        pushforward_witness,
        excluded: !agree && !hypotheses,
        verdict,
    })
}

/// First `(U, cover…, Z)` for which gluing of the trimmed family
/// `{U_i ∩ Z}` over `U ∩ Z` fails. Covers range over all families of opens
/// strictly below `U` with union `U`.
fn first_cover_failure(g: &Presheaf, opens: &[u64], clopens: &[u64]) -> Option<Vec<u64>> {
    let space = g.space();
    for &z in clopens {
        for &u in opens {
            let below: Vec<u64> = opens.iter().copied().filter(|&v| v != u && bits::is_subset(v, u)).collect();
            let families: Vec<Vec<u64>> = if u == 0 {
                vec![vec![]]
            } else {
                (1u64..1 << below.len())
                    .map(|sel| bits::members(sel).map(|i| below[i]).collect::<Vec<u64>>())
                    .filter(|c| c.iter().fold(0, |m, &v| m | v) == u)
                    .collect()
            };
            for cover in families {
                let target = space.open_index(u & z).expect("patch open");
                let trimmed: Vec<usize> = cover.iter().map(|&v| space.open_index(v & z).expect("patch open")).collect();
                if g.cover_gluing_failure(target, &trimmed).is_some() {
                    let mut w = vec![u];
                    w.extend(&cover);
                    w.push(z);
                    return Some(w);
                }
            }
        }
    }
    None
}
