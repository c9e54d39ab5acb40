//! The pair constructions `H(Y,E)` and `star(P,F)`, the relations `∼_p`
//! with their primitive quotients, the étale data `G(A)`, the unit `σ`,
//! the adjunction transpose, separation by primitive quotients, and the
//! dissolution-frame presentation.

use std::collections::HashMap;

use serde::Serialize;

use crate::assembly::{enumerate_nuclei, open_nucleus_embedding};
use crate::bits;
use crate::error::{Error, Result};
use crate::iso::skew_isomorphism;
use crate::order::{points, FiniteFrame, FiniteLattice, Law, Point, Table, TableMorphism};
use crate::sheaf::{pushforward, sheaf_from_etale, EtaleSpace, FiniteSheaf, SheafMorphism};
use crate::skew::{
    check_ncframe_morphism, check_skew_morphism, classify, encode_partial_function, green_d, partial_function_skew,
    primitive, shadow, FiniteSkewLattice,
};
use crate::topo::{front_topology, is_sober, sobrify, spectrum, FiniteSpace, PriestleyData};

/// Default cap on search nodes for hom-set enumeration.
pub const HOM_SEARCH_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Pairs,
    Star,
    Dissolution,
}

/// A skew lattice of pairs `(U, s)`; `labels[i]` is `(open index, section)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NcFramePresentation {
    pub skew: FiniteSkewLattice,
    pub labels: Vec<(usize, usize)>,
    pub provenance: Provenance,
}

impl NcFramePresentation {
    pub fn element(&self, open: usize, section: usize) -> Option<usize> {
        self.labels.binary_search(&(open, section)).ok()
    }

    /// Equal tables and labels, ignoring provenance.
    pub fn same_structure(&self, other: &NcFramePresentation) -> bool {
        self.labels == other.labels
            && self.skew.meet_table() == other.skew.meet_table()
            && self.skew.join_table() == other.skew.join_table()
            && self.skew.zero() == other.skew.zero()
    }
}

fn pair_label(mask: u64, s: usize) -> String {
    format!("({:?},{s})", bits::to_indices(mask))
}

/// Pairs `(U, s)` with `U` from `carrier` (masks, ascending) and
/// `s ∈ E(U)`; meet restricts the left section, join overrides it on the
/// right domain by gluing over `{U − V, V}`.
fn pairs(e: &FiniteSheaf, carrier: &[u64]) -> Result<(FiniteSkewLattice, Vec<(usize, usize)>)> {
    let space = e.space();
    let idx = |m: u64| space.open_index(m).ok_or_else(|| Error::Malformed(format!("{m:#b} is not open in the sheaf's space")));
    let mut elems = Vec::new();
    let mut labels = Vec::new();
    let mut lookup = HashMap::new();
    for (ci, &u) in carrier.iter().enumerate() {
        let fu = idx(u)?;
        for s in 0..e.section_count(fu) {
            lookup.insert((u, s), elems.len());
            elems.push((u, fu, s));
            labels.push((ci, s));
        }
    }
    let n = elems.len();
    let mut meet = vec![vec![0; n]; n];
    let mut join = vec![vec![0; n]; n];
    for (i, &(u, fu, s)) in elems.iter().enumerate() {
        for (j, &(v, fv, t)) in elems.iter().enumerate() {
            let m = u & v;
            let r = e.restrict(fu, idx(m)?, s);
            meet[i][j] = *lookup.get(&(m, r)).ok_or(Error::NotClosed(u, v))?;
            let d = u & !v;
            let fd = idx(d)?;
            let glued = e
                .amalgamate(&[(fd, e.restrict(fu, fd, s)), (fv, t)])
                .ok_or(Error::GluingFailure { cover: vec![fd, fv], family: vec![s, t] })?;
            join[i][j] = *lookup.get(&(u | v, glued)).ok_or(Error::NotClosed(u, v))?;
        }
    }
    let text = elems.iter().map(|&(u, _, s)| pair_label(u, s)).collect();
    let skew = FiniteSkewLattice::from_tables(Table::from_rows(&meet)?, Table::from_rows(&join)?, lookup.get(&(0, 0)).copied())?
        .with_labels(text);
    Ok((skew, labels))
}

/// `H(Y, E)` for a sheaf `E` on the front topology of `Y`.
pub fn h(y: &FiniteSpace, e: &FiniteSheaf) -> Result<NcFramePresentation> {
    if e.space() != &front_topology(y) {
        return Err(Error::SheafNotOnFront);
    }
    if e.global_sections() == 0 {
        return Err(Error::EmptyGlobalSections);
    }
    let (skew, labels) = pairs(e, y.opens())?;
    Ok(NcFramePresentation { skew, labels, provenance: Provenance::Pairs })
}

/// Pairs `(U, s)` with `U` an up-set open in the patch topology.
pub fn star(p: &PriestleyData, f: &FiniteSheaf) -> Result<NcFramePresentation> {
    if f.space() != &p.patch {
        return Err(Error::Malformed("sheaf does not live on the patch space".into()));
    }
    let carrier = upsets(p);
    let (skew, labels) = pairs(f, &carrier)?;
    Ok(NcFramePresentation { skew, labels, provenance: Provenance::Star })
}

/// Up-sets of `P` that are patch-open, ascending.
pub fn upsets(p: &PriestleyData) -> Vec<u64> {
    p.patch.opens().iter().copied().filter(|&u| p.is_upset(u)).collect()
}

/// The lattice of patch-open up-sets.
pub fn upset_lattice(p: &PriestleyData) -> FiniteLattice {
    FiniteLattice::from_set_family(&upsets(p)).expect("up-sets are closed under union and intersection")
}

/// The indicator `a ↦ p([a])` of a point of the shadow.
pub fn point_indicator(a: &FiniteSkewLattice, projection: &TableMorphism, p: &Point) -> Vec<bool> {
    (0..a.size()).map(|x| p.eval(projection.apply(x))).collect()
}

/// `∃ c, d : p(c)=0, p(d)=1, (a∧d)∨c = (b∧d)∨c`.
pub fn agree_in_p(s: &FiniteSkewLattice, ind: &[bool], a: usize, b: usize) -> Result<bool> {
    for x in [a, b] {
        if !ind[x] {
            return Err(Error::PointMismatch { element: x });
        }
    }
    let n = s.size();
    Ok((0..n).filter(|&c| !ind[c]).any(|c| {
        (0..n).filter(|&d| ind[d]).any(|d| s.join(s.meet(a, d), c) == s.join(s.meet(b, d), c))
    }))
}

/// The relation `∼_p` on `{x : p(x)=1}` as a matrix (false off the support),
/// asserted to be an equivalence relation.
pub fn relation(s: &FiniteSkewLattice, ind: &[bool]) -> Vec<Vec<bool>> {
    let n = s.size();
    let mut rel = vec![vec![false; n]; n];
    let support: Vec<usize> = (0..n).filter(|&x| ind[x]).collect();
    let mut buckets: HashMap<usize, Vec<usize>> = HashMap::new();
    for c in (0..n).filter(|&c| !ind[c]) {
        for &d in &support {
            buckets.clear();
            for &x in &support {
                buckets.entry(s.join(s.meet(x, d), c)).or_default().push(x);
            }
            for group in buckets.values() {
                for &x in group {
                    for &y in group {
                        rel[x][y] = true;
                    }
                }
            }
        }
    }
    for &x in &support {
        assert!(rel[x][x], "∼_p is reflexive");
        for &y in &support {
            assert_eq!(rel[x][y], rel[y][x], "∼_p is symmetric");
            if rel[x][y] {
                for &z in &support {
                    assert!(!rel[y][z] || rel[x][z], "∼_p is transitive");
                }
            }
        }
    }
    rel
}

/// Classes of `∼_p`, ordered by least member, and the class of each
/// supported element.
pub fn classes(ind: &[bool], rel: &[Vec<bool>]) -> (Vec<Vec<usize>>, Vec<Option<usize>>) {
    let n = ind.len();
    let mut class_of = vec![None; n];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for x in 0..n {
        if !ind[x] || class_of[x].is_some() {
            continue;
        }
        let members: Vec<usize> = (x..n).filter(|&y| ind[y] && rel[x][y]).collect();
        for &y in &members {
            class_of[y] = Some(out.len());
        }
        out.push(members);
    }
    (out, class_of)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimitiveQuotient {
    pub classes: Vec<Vec<usize>>,
    pub quotient: FiniteSkewLattice,
    /// `a ↦ 0` off the support, `a ↦ 1 + class` on it.
    pub projection: TableMorphism,
}

pub fn primitive_quotient(s: &FiniteSkewLattice, ind: &[bool]) -> Result<PrimitiveQuotient> {
    let n = s.size();
    let rel = relation(s, ind);
    let (cls, class_of) = classes(ind, &rel);
    let proj: Vec<usize> = (0..n).map(|x| class_of[x].map_or(0, |c| c + 1)).collect();
    let m = cls.len() + 1;
    let mut rep = vec![s.zero().ok_or(Error::NotNcFrame("no zero".into()))?; m];
    for (c, members) in cls.iter().enumerate() {
        rep[c + 1] = members[0];
    }
    let meet = Table::from_fn(m, |i, j| proj[s.meet(rep[i], rep[j])]);
    let join = Table::from_fn(m, |i, j| proj[s.join(rep[i], rep[j])]);
    let quotient = FiniteSkewLattice::from_tables(meet, join, Some(0))?;
    let projection = check_skew_morphism(&proj, s, &quotient, &[Law::Meet, Law::Join, Law::Zero])
        .map_err(|e| match e {
            Error::LawViolation { witness, .. } => Error::CongruenceFailure(witness),
            other => other,
        })?;
    if !cls.is_empty() && classify(s).left_handed {
        assert!(
            skew_isomorphism(&quotient, &primitive(cls.len())?).is_some(),
            "quotient by ∼_p is primitive"
        );
    }
    Ok(PrimitiveQuotient { classes: cls, quotient, projection })
}

/// `G(A)`: the spectrum of the shadow, its front, and the étale space of
/// `∼_p`-classes with the recovered sheaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GOutput {
    pub shadow: FiniteLattice,
    pub projection: TableMorphism,
    pub points: Vec<Point>,
    pub base: FiniteSpace,
    pub front: FiniteSpace,
    pub etale: EtaleSpace,
    pub sheaf: FiniteSheaf,
    /// Global germ id of `a` at point `p`, when `p(a) = 1`.
    pub germ_of: Vec<Vec<Option<usize>>>,
    /// Per point, the germ id of its first class.
    pub germ_offset: Vec<usize>,
    /// `a ↦ (U_a, s_a)`: open index in `base`, section id over `U_a`.
    pub section_map: Vec<(usize, usize)>,
}

impl GOutput {
    pub fn stalk_sizes(&self) -> Vec<usize> {
        self.sheaf.stalk_sizes()
    }

    pub fn u_a(&self, a: usize) -> u64 {
        self.base.opens()[self.section_map[a].0]
    }
}

/// Rejects anything but a left-handed noncommutative frame.
pub fn require_left_ncframe(a: &FiniteSkewLattice) -> Result<()> {
    let r = classify(a);
    if !r.left_handed {
        return Err(Error::NotLeftHanded(r.witnesses.get("left_handed").cloned().unwrap_or_default()));
    }
    if !r.ncframe {
        let failing: Vec<&str> = [
            ("has_zero", r.has_zero),
            ("strongly_distributive", r.strongly_distributive),
            ("shadow_is_frame", r.shadow_is_frame),
            ("join_complete", r.join_complete),
            ("has_top_class", r.has_top_class),
            ("infinite_distributive", r.infinite_distributive != Some(false)),
        ]
        .into_iter()
        .filter(|(_, ok)| !ok)
        .map(|(name, _)| name)
        .collect();
        return Err(Error::NotNcFrame(failing.join(", ")));
    }
    Ok(())
}

#[allow(non_snake_case)]
pub fn G(a: &FiniteSkewLattice) -> Result<GOutput> {
    require_left_ncframe(a)?;
    let (sh, projection) = shadow(a)?;
    let frame = FiniteFrame::new(sh.clone())?;
    let spec = spectrum(&frame)?;
    let base = spec.space.clone();
    let front = front_topology(&base);
    let n = a.size();
    let mut germ_of = vec![vec![None; n]; spec.points.len()];
    let mut germ_offset = Vec::with_capacity(spec.points.len());
    let mut proj = Vec::new();
    for (pi, p) in spec.points.iter().enumerate() {
        let ind = point_indicator(a, &projection, p);
        let rel = relation(a, &ind);
        let (cls, class_of) = classes(&ind, &rel);
        germ_offset.push(proj.len());
        for x in 0..n {
            germ_of[pi][x] = class_of[x].map(|c| proj.len() + c);
        }
        proj.extend(std::iter::repeat_n(pi, cls.len()));
    }
    let u_a: Vec<u64> = (0..n).map(|x| spec.hat(projection.apply(x))).collect();
    let locally_closed: Vec<u64> = {
        let mut v: Vec<u64> =
            base.opens().iter().flat_map(|&u| base.closed_sets().into_iter().map(move |c| u & c)).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let mut gens = Vec::new();
    for x in 0..n {
        for &z in locally_closed.iter().filter(|&&z| bits::is_subset(z, u_a[x])) {
            gens.push(bits::members(z).fold(0u64, |m, p| m | 1 << germ_of[p][x].expect("p(a)=1 on U_a")));
        }
    }
    let total = FiniteSpace::generated_by(proj.len(), gens)?;
    let etale = EtaleSpace::new(front.clone(), total, proj)?;
    let sheaf = sheaf_from_etale(&etale)?;
    let section_map = (0..n)
        .map(|x| {
            let ui = base.open_index(u_a[x]).expect("basic open");
            let fi = front.open_index(u_a[x]).expect("opens are front-open");
            let label: Vec<usize> = bits::members(u_a[x]).map(|p| germ_of[p][x].expect("supported")).collect();
            let s = sheaf.section_by_label(fi, &label).expect("s_a is a continuous section");
            (ui, s)
        })
        .collect();
    Ok(GOutput { shadow: sh, projection, points: spec.points, base, front, etale, sheaf, germ_of, germ_offset, section_map })
}

/// `σ : A → H(G(A))`, `a ↦ (U_a, s_a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unit {
    pub g: GOutput,
    pub h: NcFramePresentation,
    pub sigma: TableMorphism,
}

impl Unit {
    pub fn bijective(&self) -> bool {
        self.sigma.is_bijective()
    }
}

pub fn unit_sigma(a: &FiniteSkewLattice) -> Result<Unit> {
    let g = G(a)?;
    unit_sigma_from(a, g)
}

pub fn unit_sigma_from(a: &FiniteSkewLattice, g: GOutput) -> Result<Unit> {
    let hg = h(&g.base, &g.sheaf)?;
    let map = (0..a.size())
        .map(|x| {
            let (u, s) = g.section_map[x];
            hg.element(u, s).expect("σ(a) is a pair")
        })
        .collect::<Vec<_>>();
    let sigma = check_ncframe_morphism(&map, a, &hg.skew)?;
    Ok(Unit { g, h: hg, sigma })
}

/// Target data `(Y, E, H(Y,E))` of the adjunction.
#[derive(Debug, Clone)]
pub struct Target<'a> {
    pub y: &'a FiniteSpace,
    pub e: &'a FiniteSheaf,
    pub h: &'a NcFramePresentation,
}

/// A morphism `(f, λ) : (Y, E) → G(A)`: `f : Y → base` continuous and
/// `λ : E_A → f_*E` natural, with components over the opens of the front.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShMorphism {
    pub f: Vec<usize>,
    pub lambda: SheafMorphism,
}

impl ShMorphism {
    pub fn verify(g: &GOutput, t: &Target, f: Vec<usize>, components: Vec<Vec<usize>>) -> Result<Self> {
        t.y.check_continuous(&f, &g.base)?;
        let pushed = pushforward(&f, t.e, &g.front)?;
        let lambda = SheafMorphism::check(components, &g.sheaf, &pushed)?;
        Ok(ShMorphism { f, lambda })
    }
}

fn not_morphism(e: Error) -> Error {
    match e {
        Error::LawViolation { law, witness } => Error::NotMorphism { law, witness },
        other => other,
    }
}

/// The transpose `(f, λ)` of an ncframe morphism `φ : A → H(Y,E)`.
pub fn transpose(a: &FiniteSkewLattice, g: &GOutput, t: &Target, phi: &[usize]) -> Result<ShMorphism> {
    check_ncframe_morphism(phi, a, &t.h.skew).map_err(not_morphism)?;
    let y = t.y;
    let dom = |x: usize| y.opens()[t.h.labels[phi[x]].0];
    let n = a.size();
    let mut f = Vec::with_capacity(y.points());
    for p in 0..y.points() {
        let mut members: Vec<usize> = Vec::new();
        for c in 0..g.shadow.size() {
            let over: Vec<bool> = (0..n).filter(|&x| g.projection.apply(x) == c).map(|x| bits::contains(dom(x), p)).collect();
            if over.iter().any(|&b| b != over[0]) {
                return Err(Error::NotMorphism { law: "domain_constant_on_classes".into(), witness: vec![c, p] });
            }
            if over[0] {
                members.push(c);
            }
        }
        let q = g
            .points
            .iter()
            .position(|q| q.members() == members.as_slice())
            .ok_or(Error::NotMorphism { law: "point".into(), witness: members })?;
        f.push(q);
    }
    let pushed_pre: Vec<usize> = g
        .front
        .opens()
        .iter()
        .map(|&v| t.e.space().open_index(FiniteSpace::preimage(&f, v)).ok_or(Error::NotContinuous(v)))
        .collect::<Result<_>>()?;
    let e_front = t.e.space();
    let mut components = Vec::with_capacity(g.front.opens().len());
    for (vi, &v) in g.front.opens().iter().enumerate() {
        let w = pushed_pre[vi];
        let mut comp = Vec::with_capacity(g.sheaf.section_count(vi));
        for sec in 0..g.sheaf.section_count(vi) {
            let label = g.sheaf.section_label(vi, sec).expect("G sheaf carries germ labels");
            let germ_at: HashMap<usize, usize> = bits::members(v).zip(label.iter().copied()).collect();
            let mut germs = Vec::new();
            for yp in bits::members(e_front.opens()[w]) {
                let target = germ_at[&f[yp]];
                let mut value = None;
                for x in (0..n).filter(|&x| g.germ_of[f[yp]][x] == Some(target)) {
                    let (u, s) = t.h.labels[phi[x]];
                    let ufront = e_front.open_index(y.opens()[u]).expect("opens are front-open");
                    let gy = t.e.germ(ufront, s, yp)?;
                    match value {
                        None => value = Some(gy),
                        Some(prev) if prev != gy => {
                            return Err(Error::NotMorphism { law: "germ_independent_of_representative".into(), witness: vec![x, yp] })
                        }
                        _ => {}
                    }
                }
                germs.push(value.expect("every germ has a representative"));
            }
            let r = t
                .e
                .section_from_germs(w, &germs)
                .ok_or(Error::NotMorphism { law: "germ_vector_glues".into(), witness: vec![vi, sec] })?;
            comp.push(r);
        }
        components.push(comp);
    }
    ShMorphism::verify(g, t, f, components)
}

/// `φ(a) = (f⁻¹(U_a), λ(s_a))`, verified as an ncframe morphism.
pub fn transpose_inv(a: &FiniteSkewLattice, g: &GOutput, t: &Target, m: &ShMorphism) -> Result<Vec<usize>> {
    let phi = (0..a.size())
        .map(|x| {
            let ua = g.u_a(x);
            let pre = FiniteSpace::preimage(&m.f, ua);
            let y_open = t.y.open_index(pre).ok_or(Error::NotContinuous(ua))?;
            let vi = g.front.open_index(ua).expect("front open");
            let s = m.lambda.components[vi][g.section_map[x].1];
            t.h.element(y_open, s).ok_or(Error::NotMorphism { law: "pair".into(), witness: vec![x] })
        })
        .collect::<Result<Vec<usize>>>()?;
    check_ncframe_morphism(&phi, a, &t.h.skew).map_err(not_morphism)?;
    Ok(phi)
}

/// All ncframe morphisms `A → B`, lexicographically, by backtracking with
/// partial meet/join/zero checks.
pub fn enumerate_ncframe_morphisms(a: &FiniteSkewLattice, b: &FiniteSkewLattice, cap: usize) -> Result<Vec<Vec<usize>>> {
    let mut map = vec![usize::MAX; a.size()];
    let mut out = Vec::new();
    let mut nodes = 0usize;
    fn consistent(a: &FiniteSkewLattice, b: &FiniteSkewLattice, x: usize, map: &[usize]) -> bool {
        for y in 0..map.len() {
            if map[y] == usize::MAX {
                continue;
            }
            for (p, q) in [(x, y), (y, x)] {
                for (r, v) in [(a.meet(p, q), b.meet(map[p], map[q])), (a.join(p, q), b.join(map[p], map[q]))] {
                    if map[r] != usize::MAX && map[r] != v {
                        return false;
                    }
                }
            }
        }
        true
    }
    #[allow(clippy::too_many_arguments)]
    fn go(
        a: &FiniteSkewLattice,
        b: &FiniteSkewLattice,
        x: usize,
        map: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        nodes: &mut usize,
        cap: usize,
    ) -> Result<()> {
        if x == map.len() {
            if check_ncframe_morphism(map, a, b).is_ok() {
                out.push(map.clone());
            }
            return Ok(());
        }
        for v in 0..b.size() {
            *nodes += 1;
            if *nodes > cap {
                return Err(Error::SizeLimit { what: "hom-set search nodes", value: *nodes, cap });
            }
            if Some(x) == a.zero() && Some(v) != b.zero() {
                continue;
            }
            map[x] = v;
            if consistent(a, b, x, map) {
                go(a, b, x + 1, map, out, nodes, cap)?;
            }
            map[x] = usize::MAX;
        }
        Ok(())
    }
    go(a, b, 0, &mut map, &mut out, &mut nodes, cap)?;
    Ok(out)
}

/// All `(f, λ) : (Y, E) → G(A)` when the front of the base of `G(A)` is
/// discrete: `f` ranges over continuous maps and `λ` over families of maps
/// from the stalk at `q` to `E(f⁻¹{q})`.
pub fn enumerate_sh_morphisms(g: &GOutput, t: &Target) -> Result<Vec<ShMorphism>> {
    let y = t.y;
    if !g.front.is_discrete() {
        return Err(Error::Malformed("sheaf morphisms are enumerated over a discrete front only".into()));
    }
    let ny = y.points();
    let nb = g.base.points();
    let total = nb.checked_pow(ny as u32).filter(|&v| v <= HOM_SEARCH_CAP).ok_or(Error::SizeLimit {
        what: "point maps",
        value: nb.saturating_pow(ny as u32),
        cap: HOM_SEARCH_CAP,
    })?;
    let e_space = t.e.space();
    let mut out = Vec::new();
    for code in 0..total {
        let f: Vec<usize> = (0..ny).map(|i| code / nb.pow(i as u32) % nb).collect();
        if y.check_continuous(&f, &g.base).is_err() {
            continue;
        }
        let fibers: Vec<usize> = (0..nb)
            .map(|q| e_space.open_index(FiniteSpace::preimage(&f, 1 << q)).ok_or(Error::NotContinuous(1 << q)))
            .collect::<Result<_>>()?;
        let domains: Vec<usize> = (0..nb).map(|q| g.sheaf.stalk_size(q)).collect();
        let codomains: Vec<usize> = fibers.iter().map(|&w| t.e.section_count(w)).collect();
        let mut count = 1usize;
        for q in 0..nb {
            count = codomains[q]
                .checked_pow(domains[q] as u32)
                .and_then(|c| c.checked_mul(count))
                .filter(|&c| c <= HOM_SEARCH_CAP)
                .ok_or(Error::SizeLimit { what: "stalk map families", value: usize::MAX, cap: HOM_SEARCH_CAP })?;
        }
        for mut c in 0..count {
            let maps: Vec<Vec<usize>> = (0..nb)
                .map(|q| {
                    (0..domains[q])
                        .map(|_| {
                            let v = c % codomains[q];
                            c /= codomains[q];
                            v
                        })
                        .collect()
                })
                .collect();
            let components = g
                .front
                .opens()
                .iter()
                .enumerate()
                .map(|(vi, &v)| {
                    (0..g.sheaf.section_count(vi))
                        .map(|sec| {
                            let label = g.sheaf.section_label(vi, sec).expect("labels");
                            let parts: Vec<(usize, usize)> = bits::members(v)
                                .zip(label.iter())
                                .map(|(q, &gid)| (fibers[q], maps[q][gid - g.germ_offset[q]]))
                                .collect();
                            t.e.amalgamate(&parts).expect("disjoint covers glue")
                        })
                        .collect()
                })
                .collect();
            out.push(ShMorphism::verify(g, t, f.clone(), components)?);
        }
    }
    Ok(out)
}

/// The counit `(f, λ) : (Y, E) → G(H(Y, E))`, the transpose of the identity.
#[derive(Debug, Clone)]
pub struct Counit {
    pub a: NcFramePresentation,
    pub g: GOutput,
    pub morphism: ShMorphism,
    pub homeomorphism: bool,
    pub iso: bool,
}

pub fn counit(y: &FiniteSpace, e: &FiniteSheaf) -> Result<Counit> {
    let a = h(y, e)?;
    let g = G(&a.skew)?;
    let t = Target { y, e, h: &a };
    let id: Vec<usize> = (0..a.skew.size()).collect();
    let m = transpose(&a.skew, &g, &t, &id)?;
    let bijective = {
        let mut seen = vec![false; g.base.points()];
        m.f.len() == g.base.points() && m.f.iter().all(|&q| !std::mem::replace(&mut seen[q], true))
    };
    let homeomorphism = bijective
        && g.base.opens().len() == y.opens().len()
        && g.base.opens().iter().all(|&v| y.is_open(FiniteSpace::preimage(&m.f, v)));
    let iso = homeomorphism && m.lambda.is_iso();
    Ok(Counit { a, g, morphism: m, homeomorphism, iso })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Separation {
    /// Index of the separating point in `points(shadow(A))`.
    pub point: usize,
    pub morphism: TableMorphism,
}

/// A morphism `q : A → P_2` with `q(a) = 1_a`, `q(b) = 1_b`, when some point
/// separates `a` from `b`.
pub fn separate(s: &FiniteSkewLattice, a: usize, b: usize) -> Result<Option<Separation>> {
    let d = green_d(s)?;
    if a == b || a >= s.size() || b >= s.size() || d.class_of[a] != d.class_of[b] {
        return Err(Error::NotSameClass(a, b));
    }
    let (sh, projection) = shadow(s)?;
    let pts = points(&FiniteFrame::new(sh)?);
    let target = primitive(2)?;
    for (pi, p) in pts.iter().enumerate() {
        let ind = point_indicator(s, &projection, p);
        if !ind[a] || agree_in_p(s, &ind, a, b)? {
            continue;
        }
        let rel = relation(s, &ind);
        let (_, class_of) = classes(&ind, &rel);
        let (ca, cb) = (class_of[a], class_of[b]);
        let map: Vec<usize> = (0..s.size())
            .map(|x| match class_of[x] {
                None => 0,
                c if c == cb => 2,
                _ => 1,
            })
            .collect();
        debug_assert!(ca != cb);
        let morphism = check_ncframe_morphism(&map, s, &target)?;
        return Ok(Some(Separation { point: pi, morphism }));
    }
    Ok(None)
}

/// `a ↦` the partial function `p ↦ germ of a at p` into `P(|Y|, k)`, where
/// `Y` is the base of `G(A)` and `k` the largest stalk.
pub fn partial_function_embedding(a: &FiniteSkewLattice, g: &GOutput) -> Result<(FiniteSkewLattice, TableMorphism)> {
    let r = g.base.points();
    let k = g.stalk_sizes().into_iter().max().unwrap_or(0).max(1);
    let target = partial_function_skew(r, k)?;
    let map: Vec<usize> = (0..a.size())
        .map(|x| {
            let f: Vec<Option<usize>> = (0..r).map(|p| g.germ_of[p][x].map(|gid| gid - g.germ_offset[p])).collect();
            encode_partial_function(k, &f)
        })
        .collect();
    let m = check_ncframe_morphism(&map, a, &target)?;
    if !m.is_injective() {
        return Err(Error::LawViolation { law: "injective".into(), witness: map });
    }
    Ok((target, m))
}

/// The pairs `(U, s)` with `s ∈ F(δ⁻¹(U))`, built from the points of the
/// assembly of `O(Y)` and the open nuclei, with joins formed on germ
/// vectors.
pub fn dissolution_frame(y: &FiniteSpace, f: &FiniteSheaf) -> Result<NcFramePresentation> {
    let front = front_topology(y);
    if f.space() != &front {
        return Err(Error::SheafNotOnFront);
    }
    if f.global_sections() == 0 {
        return Err(Error::EmptyGlobalSections);
    }
    let sober = is_sober(y);
    if !sober.ok {
        return Err(Error::Malformed("dissolution frames are built over sober spaces".into()));
    }
    let o = y.opens_lattice();
    let asm = enumerate_nuclei(&o)?;
    let nu = open_nucleus_embedding(&o, &asm)?;
    let asm_points = points(&asm.frame);
    // δ : pt(assembly) → Y through the prime filter P ∘ ν on O(Y)
    let (_, to_spec) = sobrify(y);
    let (spec, _) = sobrify(y);
    let delta: Vec<usize> = asm_points
        .iter()
        .map(|pt| {
            let members: Vec<usize> = (0..o.size()).filter(|&u| pt.eval(nu.apply(u))).collect();
            let q = spec.points.iter().position(|q| q.members() == members.as_slice());
            q.and_then(|q| to_spec.iter().position(|&x| x == q))
                .ok_or(Error::IsoFailure("a point of the assembly does not come from a point of Y".into()))
        })
        .collect::<Result<_>>()?;
    {
        let mut seen = vec![false; y.points()];
        if delta.len() != y.points() || delta.iter().any(|&p| std::mem::replace(&mut seen[p], true)) {
            return Err(Error::IsoFailure("points of the assembly are not in bijection with Y".into()));
        }
    }
    let pre_delta: Vec<u64> = (0..o.size())
        .map(|u| asm_points.iter().zip(&delta).filter(|(pt, _)| pt.eval(nu.apply(u))).fold(0u64, |m, (_, &p)| m | 1 << p))
        .collect();
    let fidx = |m: u64| front.open_index(m).ok_or(Error::Malformed(format!("{m:#b} is not front-open")));
    let mut elems = Vec::new();
    let mut labels = Vec::new();
    let mut lookup = HashMap::new();
    for (u, &d) in pre_delta.iter().enumerate() {
        let fu = fidx(d)?;
        for s in 0..f.section_count(fu) {
            lookup.insert((u, s), elems.len());
            elems.push((u, fu, s));
            labels.push((u, s));
        }
    }
    let n = elems.len();
    let mut meet = vec![vec![0; n]; n];
    let mut join = vec![vec![0; n]; n];
    for (i, &(u, fu, s)) in elems.iter().enumerate() {
        for (j, &(v, fv, t)) in elems.iter().enumerate() {
            let m = o.meet(u, v);
            let fm = fidx(pre_delta[m])?;
            meet[i][j] = lookup[&(m, f.restrict(fu, fm, s))];
            let jn = o.join(u, v);
            let dj = pre_delta[jn];
            let (ds, dt) = (pre_delta[u], pre_delta[v]);
            let gs = f.germ_vector(fu, s);
            let gt = f.germ_vector(fv, t);
            let pos = |mask: u64, p: usize| bits::members(mask).position(|q| q == p).expect("member");
            let germs: Vec<usize> = bits::members(dj)
                .map(|p| if bits::contains(dt, p) { gt[pos(dt, p)] } else { gs[pos(ds, p)] })
                .collect();
            let r = f
                .section_from_germs(fidx(dj)?, &germs)
                .ok_or(Error::GluingFailure { cover: vec![fu, fv], family: vec![s, t] })?;
            join[i][j] = lookup[&(jn, r)];
        }
    }
    let text = elems.iter().map(|&(u, _, s)| pair_label(y.opens()[u], s)).collect();
    let skew = FiniteSkewLattice::from_tables(Table::from_rows(&meet)?, Table::from_rows(&join)?, lookup.get(&(0, 0)).copied())?
        .with_labels(text);
    Ok(NcFramePresentation { skew, labels, provenance: Provenance::Dissolution })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::iso::lattice_isomorphism;
    use crate::skew::classify;
    use crate::topo::priestley_of;

    fn nc5() -> NcFramePresentation {
        let sier = catalog::sierpinski();
        let e = FiniteSheaf::product_over_blocks(&front_topology(&sier), &[1, 2]).unwrap();
        h(&sier, &e).unwrap()
    }

    #[test]
    fn h_examples() {
        let a = nc5();
        assert_eq!(a.skew.size(), 5);
        let r = classify(&a.skew);
        assert!(r.left_handed && r.ncframe);
        let (sh, _) = shadow(&a.skew).unwrap();
        assert!(lattice_isomorphism(&sh, &catalog::chain(3)).is_some());
        let d = green_d(&a.skew).unwrap();
        assert_eq!(d.classes[d.top_class.unwrap()].len(), 2);

        let disc = catalog::discrete(2);
        let e = FiniteSheaf::product_over_blocks(&disc, &[2, 2]).unwrap();
        let p = h(&disc, &e).unwrap();
        assert!(skew_isomorphism(&p.skew, &partial_function_skew(2, 2).unwrap()).is_some());

        let c = FiniteSheaf::constant(&catalog::discrete(2), 1).unwrap();
        let sier = catalog::sierpinski();
        assert!(matches!(h(&sier, &FiniteSheaf::constant(&sier, 1).unwrap()), Err(Error::SheafNotOnFront)));
        let one = h(&sier, &FiniteSheaf::constant(&front_topology(&sier), 1).unwrap()).unwrap();
        assert!(lattice_isomorphism(&sier.opens_lattice(), &catalog::chain(3)).is_some());
        assert!(one.skew.is_commutative());
        let _ = c;
    }

    #[test]
    fn agreement_at_points() {
        let a = nc5();
        let (sh, proj) = shadow(&a.skew).unwrap();
        let pts = points(&FiniteFrame::new(sh).unwrap());
        let d = green_d(&a.skew).unwrap();
        let tops = &d.classes[d.top_class.unwrap()];
        let (t1, t2) = (tops[0], tops[1]);
        let sier = catalog::sierpinski();
        let (spec, to_spec) = sobrify(&sier);
        // the closed point 0 of SIER and the open point 1
        let closed = &spec.points[to_spec[0]];
        let open = &spec.points[to_spec[1]];
        let at = |p: &Point| {
            let q = pts.iter().find(|q| {
                (0..a.skew.size()).all(|x| {
                    let u = sier.opens()[a.labels[x].0];
                    q.eval(proj.apply(x)) == p.eval(u_index(&sier, u))
                })
            });
            point_indicator(&a.skew, &proj, q.unwrap())
        };
        assert!(agree_in_p(&a.skew, &at(closed), t1, t2).unwrap());
        assert!(!agree_in_p(&a.skew, &at(open), t1, t2).unwrap());
        assert!(agree_in_p(&a.skew, &at(open), t1, t1).unwrap());
    }

    fn u_index(y: &FiniteSpace, u: u64) -> usize {
        y.open_index(u).unwrap()
    }

    #[test]
    fn primitive_quotients() {
        let a = nc5();
        let (sh, proj) = shadow(&a.skew).unwrap();
        let pts = points(&FiniteFrame::new(sh).unwrap());
        let sizes: Vec<usize> = pts
            .iter()
            .map(|p| primitive_quotient(&a.skew, &point_indicator(&a.skew, &proj, p)).unwrap().classes.len())
            .collect();
        let mut sorted = sizes.clone();
        sorted.sort();
        assert_eq!(sorted, vec![1, 2]);
        let c = FiniteSkewLattice::from_lattice(&catalog::chain(3));
        let (sh, proj) = shadow(&c).unwrap();
        for p in points(&FiniteFrame::new(sh).unwrap()) {
            let q = primitive_quotient(&c, &point_indicator(&c, &proj, &p)).unwrap();
            assert_eq!(q.quotient.size(), 2);
        }
    }

    #[test]
    fn g_examples() {
        let a = nc5();
        let g = G(&a.skew).unwrap();
        assert!(crate::iso::homeomorphism(&g.base, &catalog::sierpinski()).is_some());
        assert!(g.front.is_discrete());
        let mut stalks = g.stalk_sizes();
        stalks.sort();
        assert_eq!(stalks, vec![1, 2]);
        let o = FiniteSkewLattice::from_lattice(&catalog::sierpinski().opens_lattice());
        assert_eq!(G(&o).unwrap().stalk_sizes(), vec![1, 1]);
        let p = G(&partial_function_skew(2, 2).unwrap()).unwrap();
        assert_eq!(p.base, catalog::discrete(2));
        assert_eq!(p.stalk_sizes(), vec![2, 2]);
        assert!(matches!(G(&primitive(2).unwrap().mirror()), Err(Error::NotLeftHanded(_))));
    }

    #[test]
    fn sigma_examples() {
        let a = nc5();
        let u = unit_sigma(&a.skew).unwrap();
        assert!(u.bijective());
        let z = a.skew.zero().unwrap();
        assert_eq!(u.h.labels[u.sigma.apply(z)], (0, 0));
    }

    #[test]
    fn counit_and_transpose() {
        let sier = catalog::sierpinski();
        let e = FiniteSheaf::product_over_blocks(&front_topology(&sier), &[1, 2]).unwrap();
        let c = counit(&sier, &e).unwrap();
        assert!(c.iso);
        let a = nc5();
        let g = G(&a.skew).unwrap();
        let t = Target { y: &sier, e: &e, h: &a };
        let homs = enumerate_ncframe_morphisms(&a.skew, &a.skew, HOM_SEARCH_CAP).unwrap();
        let sh = enumerate_sh_morphisms(&g, &t).unwrap();
        assert_eq!(homs.len(), sh.len());
        for phi in &homs {
            let m = transpose(&a.skew, &g, &t, phi).unwrap();
            assert_eq!(&transpose_inv(&a.skew, &g, &t, &m).unwrap(), phi);
            assert!(sh.contains(&m));
        }
        // into H(point, stalk 1): one morphism per point of SIER
        let pt = catalog::point();
        let e1 = FiniteSheaf::constant(&front_topology(&pt), 1).unwrap();
        let h1 = h(&pt, &e1).unwrap();
        let t1 = Target { y: &pt, e: &e1, h: &h1 };
        let homs = enumerate_ncframe_morphisms(&a.skew, &h1.skew, HOM_SEARCH_CAP).unwrap();
        assert_eq!(homs.len(), 2);
        let mut images: Vec<usize> = homs.iter().map(|phi| transpose(&a.skew, &g, &t1, phi).unwrap().f[0]).collect();
        images.sort();
        assert_eq!(images, vec![0, 1]);
        assert_eq!(enumerate_sh_morphisms(&g, &t1).unwrap().len(), 2);
    }

    #[test]
    fn separation() {
        let a = nc5();
        let d = green_d(&a.skew).unwrap();
        let tops = d.classes[d.top_class.unwrap()].clone();
        let q = separate(&a.skew, tops[0], tops[1]).unwrap().unwrap();
        assert_eq!(q.morphism.apply(tops[0]), 1);
        assert_eq!(q.morphism.apply(tops[1]), 2);
        assert!(matches!(separate(&a.skew, tops[0], tops[0]), Err(Error::NotSameClass(..))));
        let (_, emb) = partial_function_embedding(&a.skew, &G(&a.skew).unwrap()).unwrap();
        assert!(emb.is_injective());
    }

    #[test]
    fn star_examples() {
        let c3 = FiniteFrame::new(catalog::chain(3)).unwrap();
        let p = priestley_of(&c3).unwrap();
        let one = star(&p, &FiniteSheaf::constant(&p.patch, 1).unwrap()).unwrap();
        assert!(lattice_isomorphism(&catalog::chain(3), &shadow(&one.skew).unwrap().0).is_some());
        assert!(one.skew.is_commutative());
        // the open point of the spectrum of CHAIN3 is point 0
        let f = FiniteSheaf::product_over_blocks(&p.patch, &[2, 1]).unwrap();
        assert!(skew_isomorphism(&star(&p, &f).unwrap().skew, &nc5().skew).is_some());
        let b2 = FiniteFrame::new(catalog::boolean(2)).unwrap();
        let p = priestley_of(&b2).unwrap();
        let f = FiniteSheaf::product_over_blocks(&p.patch, &[2, 2]).unwrap();
        assert!(skew_isomorphism(&star(&p, &f).unwrap().skew, &partial_function_skew(2, 2).unwrap()).is_some());
    }

    #[test]
    fn dissolution_matches_pairs() {
        let sier = catalog::sierpinski();
        for stalks in [[1, 1], [1, 2], [2, 2]] {
            let e = FiniteSheaf::product_over_blocks(&front_topology(&sier), &stalks).unwrap();
            let a = h(&sier, &e).unwrap();
            let d = dissolution_frame(&sier, &e).unwrap();
            assert!(a.same_structure(&d));
            assert_ne!(a.provenance, d.provenance);
        }
        let empty = FiniteSpace::new(0, vec![0]).unwrap();
        let e = FiniteSheaf::constant(&empty, 1).unwrap();
        assert_eq!(dissolution_frame(&empty, &e).unwrap().skew.size(), 1);
    }
}
