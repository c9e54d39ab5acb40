//! Presheaves and sheaves of finite sets on finite spaces, with stalks,
//! germs and étale spaces.
//!
//! Section ids over an open are dense integers. Restrictions are stored for
//! every pair of opens `V ⊆ U`, keyed by open indices `(U, V)`.

use std::collections::{BTreeMap, HashMap};

use crate::bits;
use crate::error::{Error, Result};
use crate::topo::{FiniteSpace, MAX_POINTS};

/// Largest total space accepted for étale spaces.
pub const ETALE_GERM_CAP: usize = MAX_POINTS;
/// Largest section count per open produced by germ-choice enumeration.
pub const SECTION_CAP: usize = 1 << 16;

/// A functorial assignment of finite section sets to opens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presheaf {
    space: FiniteSpace,
    sections: Vec<usize>,
    restrict: BTreeMap<(usize, usize), Vec<usize>>,
}

impl Presheaf {
    /// Validates shape and functoriality. Missing identity restrictions are
    /// filled in.
    pub fn new(space: FiniteSpace, sections: Vec<usize>, mut restrict: BTreeMap<(usize, usize), Vec<usize>>) -> Result<Self> {
        let opens = space.opens().to_vec();
        let m = opens.len();
        if sections.len() != m {
            return Err(Error::Malformed(format!("{} section counts for {m} opens", sections.len())));
        }
        for u in 0..m {
            restrict.entry((u, u)).or_insert_with(|| (0..sections[u]).collect());
        }
        for &(u, v) in restrict.keys() {
            if u >= m || v >= m || !bits::is_subset(opens[v], opens[u]) {
                return Err(Error::Malformed(format!("restriction ({u},{v}) is not between nested opens")));
            }
        }
        for u in 0..m {
            for v in 0..m {
                if !bits::is_subset(opens[v], opens[u]) {
                    continue;
                }
                let table = restrict
                    .get(&(u, v))
                    .ok_or_else(|| Error::Malformed(format!("missing restriction ({u},{v})")))?;
                if table.len() != sections[u] || table.iter().any(|&t| t >= sections[v]) {
                    return Err(Error::Malformed(format!("restriction ({u},{v}) has the wrong shape")));
                }
            }
        }
        let p = Presheaf { space, sections, restrict };
        if let Some(w) = p.functoriality_failure() {
            return Err(Error::FunctorialityFailure(w));
        }
        Ok(p)
    }

    fn functoriality_failure(&self) -> Option<Vec<usize>> {
        let opens = self.space.opens();
        let m = opens.len();
        for u in 0..m {
            if self.restrict[&(u, u)].iter().enumerate().any(|(s, &t)| s != t) {
                return Some(vec![u, u]);
            }
        }
        for u in 0..m {
            for v in 0..m {
                if !bits::is_subset(opens[v], opens[u]) {
                    continue;
                }
                for w in 0..m {
                    if !bits::is_subset(opens[w], opens[v]) {
                        continue;
                    }
                    let direct = &self.restrict[&(u, w)];
                    let uv = &self.restrict[&(u, v)];
                    let vw = &self.restrict[&(v, w)];
                    if (0..self.sections[u]).any(|s| vw[uv[s]] != direct[s]) {
                        return Some(vec![u, v, w]);
                    }
                }
            }
        }
        None
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn section_counts(&self) -> &[usize] {
        &self.sections
    }

    pub fn section_count(&self, u: usize) -> usize {
        self.sections[u]
    }

    pub fn restrictions(&self) -> &BTreeMap<(usize, usize), Vec<usize>> {
        &self.restrict
    }

    /// `s|_V` for `s ∈ E(U)`.
    #[inline]
    pub fn restrict(&self, u: usize, v: usize, s: usize) -> usize {
        self.restrict[&(u, v)][s]
    }

    pub fn global_sections(&self) -> usize {
        self.sections[self.sections.len() - 1]
    }

    /// Gluing for the empty cover and every binary cover `U = V ∪ W`.
    /// Returns the failing cover (open indices) and matching family.
    pub fn gluing_failure(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        self.gluing_failure_where(|_, _| true)
    }

    /// As [`Presheaf::gluing_failure`], restricted to binary covers accepted
    /// by `admit(V, W)`.
    pub fn gluing_failure_where(&self, admit: impl Fn(u64, u64) -> bool) -> Option<(Vec<usize>, Vec<usize>)> {
        if self.sections[0] != 1 {
            return Some((vec![], vec![]));
        }
        let opens = self.space.opens();
        let m = opens.len();
        for v in 0..m {
            for w in v + 1..m {
                if bits::is_subset(opens[v], opens[w]) || bits::is_subset(opens[w], opens[v]) {
                    continue;
                }
                if !admit(opens[v], opens[w]) {
                    continue;
                }
                let u = self.space.open_index(opens[v] | opens[w]).expect("open union");
                let i = self.space.open_index(opens[v] & opens[w]).expect("open intersection");
                let mut hits: HashMap<(usize, usize), usize> = HashMap::new();
                for r in 0..self.sections[u] {
                    *hits.entry((self.restrict(u, v, r), self.restrict(u, w, r))).or_default() += 1;
                }
                for s in 0..self.sections[v] {
                    for t in 0..self.sections[w] {
                        if self.restrict(v, i, s) != self.restrict(w, i, t) {
                            continue;
                        }
                        if hits.get(&(s, t)).copied().unwrap_or(0) != 1 {
                            return Some((vec![v, w], vec![s, t]));
                        }
                    }
                }
            }
        }
        None
    }
}

impl Presheaf {
    /// Gluing for one cover of open `target` by the opens `cover`: every
    /// matching family has exactly one amalgamation. Returns a failing family.
    pub fn cover_gluing_failure(&self, target: usize, cover: &[usize]) -> Option<Vec<usize>> {
        let opens = self.space.opens();
        debug_assert_eq!(cover.iter().fold(0, |m, &v| m | opens[v]), opens[target]);
        let meets: Vec<Vec<usize>> = cover
            .iter()
            .map(|&v| cover.iter().map(|&w| self.space.open_index(opens[v] & opens[w]).expect("open")).collect())
            .collect();
        let mut amalgams: HashMap<Vec<usize>, usize> = HashMap::new();
        for r in 0..self.sections[target] {
            let fam: Vec<usize> = cover.iter().map(|&v| self.restrict(target, v, r)).collect();
            *amalgams.entry(fam).or_default() += 1;
        }
        let mut family = Vec::with_capacity(cover.len());
        self.find_bad_family(cover, &meets, &amalgams, &mut family)
    }

    fn find_bad_family(
        &self,
        cover: &[usize],
        meets: &[Vec<usize>],
        amalgams: &HashMap<Vec<usize>, usize>,
        family: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        let k = family.len();
        if k == cover.len() {
            return (amalgams.get(family.as_slice()).copied().unwrap_or(0) != 1).then(|| family.clone());
        }
        for s in 0..self.sections[cover[k]] {
            let agrees = (0..k).all(|j| {
                let i = meets[k][j];
                self.restrict(cover[k], i, s) == self.restrict(cover[j], i, family[j])
            });
            if !agrees {
                continue;
            }
            family.push(s);
            if let Some(w) = self.find_bad_family(cover, meets, amalgams, family) {
                return Some(w);
            }
            family.pop();
        }
        None
    }
}

/// A presheaf satisfying the gluing condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSheaf {
    inner: Presheaf,
    // germ vectors of every section, per open, and their inverse lookup
    germs: Vec<Vec<Vec<usize>>>,
    by_germs: Vec<HashMap<Vec<usize>, usize>>,
    // germ-label vectors when built from germ families
    labels: Option<Vec<Vec<Vec<usize>>>>,
}

impl std::ops::Deref for FiniteSheaf {
    type Target = Presheaf;
    fn deref(&self) -> &Presheaf {
        &self.inner
    }
}

impl FiniteSheaf {
    pub fn new(space: FiniteSpace, sections: Vec<usize>, restrict: BTreeMap<(usize, usize), Vec<usize>>) -> Result<Self> {
        Self::from_presheaf(Presheaf::new(space, sections, restrict)?)
    }

    pub fn from_presheaf(p: Presheaf) -> Result<Self> {
        if let Some((cover, family)) = p.gluing_failure() {
            return Err(Error::GluingFailure { cover, family });
        }
        let minimal: Vec<usize> = (0..p.space.points())
            .map(|x| p.space.open_index(p.space.minimal_open(x)).expect("minimal open"))
            .collect();
        let germs: Vec<Vec<Vec<usize>>> = p
            .space
            .opens()
            .iter()
            .enumerate()
            .map(|(u, &mask)| {
                (0..p.sections[u]).map(|s| bits::members(mask).map(|x| p.restrict(u, minimal[x], s)).collect()).collect()
            })
            .collect();
        let by_germs = germs
            .iter()
            .map(|per_open| {
                let map: HashMap<Vec<usize>, usize> = per_open.iter().cloned().enumerate().map(|(s, g)| (g, s)).collect();
                assert_eq!(map.len(), per_open.len(), "sections of a sheaf are determined by their germs");
                map
            })
            .collect();
        Ok(FiniteSheaf { inner: p, germs, by_germs, labels: None })
    }

    pub fn presheaf(&self) -> &Presheaf {
        &self.inner
    }

    /// Sheaf whose sections over `U` are the given germ vectors (one
    /// coordinate per point of `U`, ascending; values are germ labels) with
    /// restriction by dropping coordinates. Vectors are sorted before use.
    pub fn from_germ_families(space: FiniteSpace, mut families: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let opens = space.opens().to_vec();
        if families.len() != opens.len() {
            return Err(Error::Malformed("one germ family per open expected".into()));
        }
        for f in &mut families {
            f.sort();
            f.dedup();
        }
        let lookup: Vec<HashMap<&[usize], usize>> = families
            .iter()
            .map(|f| f.iter().enumerate().map(|(i, g)| (g.as_slice(), i)).collect())
            .collect();
        let mut restrict = BTreeMap::new();
        for (u, &mu) in opens.iter().enumerate() {
            let pts: Vec<usize> = bits::members(mu).collect();
            for (v, &mv) in opens.iter().enumerate() {
                if !bits::is_subset(mv, mu) {
                    continue;
                }
                let keep: Vec<usize> = (0..pts.len()).filter(|&i| bits::contains(mv, pts[i])).collect();
                let mut table = Vec::with_capacity(families[u].len());
                for g in &families[u] {
                    let r: Vec<usize> = keep.iter().map(|&i| g[i]).collect();
                    let id = *lookup[v]
                        .get(r.as_slice())
                        .ok_or_else(|| Error::Malformed(format!("restriction of a section over open {u} to open {v} is missing")))?;
                    table.push(id);
                }
                restrict.insert((u, v), table);
            }
        }
        let sections = families.iter().map(Vec::len).collect();
        let mut sheaf = Self::new(space, sections, restrict)?;
        sheaf.labels = Some(families);
        Ok(sheaf)
    }

    /// Germ-label vector of a section, for sheaves built from germ families.
    pub fn section_label(&self, u: usize, s: usize) -> Option<&[usize]> {
        self.labels.as_ref().map(|l| l[u][s].as_slice())
    }

    pub fn section_by_label(&self, u: usize, label: &[usize]) -> Option<usize> {
        let l = self.labels.as_ref()?;
        l[u].binary_search_by(|g| g.as_slice().cmp(label)).ok()
    }

    /// On a space whose opens are unions of pairwise disjoint blocks (the
    /// minimal opens), sections over `U` are all choices of one germ per
    /// block in `U`; `stalks[p]` must agree within each block.
    pub fn product_over_blocks(space: &FiniteSpace, stalks: &[usize]) -> Result<Self> {
        let n = space.points();
        if stalks.len() != n {
            return Err(Error::Malformed(format!("{} stalk sizes for {n} points", stalks.len())));
        }
        let blocks: Vec<u64> = (0..n).map(|p| space.minimal_open(p)).collect();
        for p in 0..n {
            for q in bits::members(blocks[p]) {
                if blocks[q] != blocks[p] || stalks[q] != stalks[p] {
                    return Err(Error::Malformed("opens are not unions of blocks with uniform stalks".into()));
                }
            }
        }
        let families = space
            .opens()
            .iter()
            .map(|&u| {
                let pts: Vec<usize> = bits::members(u).collect();
                let mut out = Vec::new();
                choices(&pts, &|p| (0..stalks[p]).collect(), &mut |g| {
                    let ok = pts.iter().enumerate().all(|(i, &p)| {
                        pts.iter().enumerate().all(|(j, &q)| blocks[p] != blocks[q] || g[i] == g[j])
                    });
                    if ok {
                        out.push(g.to_vec());
                    }
                });
                out
            })
            .collect();
        Self::from_germ_families(space.clone(), families)
    }

    /// The sheaf of locally constant `0..k`-valued functions.
    pub fn constant(space: &FiniteSpace, k: usize) -> Result<Self> {
        let e = EtaleSpace::constant(space, k)?;
        sheaf_from_etale(&e)
    }

    /// Smallest open containing `p`, as an open index.
    pub fn minimal_open_index(&self, p: usize) -> usize {
        self.space().open_index(self.space().minimal_open(p)).expect("minimal open")
    }

    pub fn stalk_size(&self, p: usize) -> usize {
        self.section_count(self.minimal_open_index(p))
    }

    pub fn stalk_sizes(&self) -> Vec<usize> {
        (0..self.space().points()).map(|p| self.stalk_size(p)).collect()
    }

    /// Germ of `s ∈ E(U)` at `p`, as a section id over the minimal open of `p`.
    pub fn germ(&self, u: usize, s: usize, p: usize) -> Result<usize> {
        if !bits::contains(self.space().opens()[u], p) {
            return Err(Error::PointOutsideDomain { point: p });
        }
        Ok(self.restrict(u, self.minimal_open_index(p), s))
    }

    /// Germs of `s ∈ E(U)` at the points of `U`, ascending.
    pub fn germ_vector(&self, u: usize, s: usize) -> &[usize] {
        &self.germs[u][s]
    }

    /// The section over `U` with the given germ vector.
    pub fn section_from_germs(&self, u: usize, germs: &[usize]) -> Option<usize> {
        self.by_germs[u].get(germs).copied()
    }

    /// The unique section over the union of the parts restricting to each
    /// given part, if it exists.
    pub fn amalgamate(&self, parts: &[(usize, usize)]) -> Option<usize> {
        let opens = self.space().opens();
        let union = parts.iter().fold(0, |m, &(v, _)| m | opens[v]);
        let u = self.space().open_index(union)?;
        let hits: Vec<usize> = (0..self.section_count(u))
            .filter(|&r| parts.iter().all(|&(v, s)| self.restrict(u, v, r) == s))
            .collect();
        match hits.as_slice() {
            [r] => Some(*r),
            _ => None,
        }
    }
}

/// Calls `emit` on every tuple choosing one value from `options(p)` per
/// point, lexicographically with the first point most significant.
fn choices(pts: &[usize], options: &dyn Fn(usize) -> Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
    fn go(pts: &[usize], options: &[Vec<usize>], acc: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
        if acc.len() == pts.len() {
            emit(acc);
            return;
        }
        for &o in &options[acc.len()] {
            acc.push(o);
            go(pts, options, acc, emit);
            acc.pop();
        }
    }
    let opts: Vec<Vec<usize>> = pts.iter().map(|&p| options(p)).collect();
    go(pts, &opts, &mut Vec::new(), emit);
}

/// A local homeomorphism `proj : total → base`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaleSpace {
    pub base: FiniteSpace,
    pub total: FiniteSpace,
    pub proj: Vec<usize>,
}

impl EtaleSpace {
    pub fn new(base: FiniteSpace, total: FiniteSpace, proj: Vec<usize>) -> Result<Self> {
        if total.points() > ETALE_GERM_CAP {
            return Err(Error::SizeLimit { what: "germs", value: total.points(), cap: ETALE_GERM_CAP });
        }
        total.check_continuous(&proj, &base)?;
        let image = |w: u64| bits::members(w).fold(0u64, |m, e| m | 1 << proj[e]);
        for e in 0..total.points() {
            let local = total.opens().iter().any(|&w| {
                if !bits::contains(w, e) || !base.is_open(image(w)) {
                    return false;
                }
                let injective = bits::members(w).all(|a| bits::members(w).all(|b| a == b || proj[a] != proj[b]));
                // open onto its image: opens inside w go to opens
                injective
                    && total
                        .opens()
                        .iter()
                        .filter(|&&v| bits::is_subset(v, w))
                        .all(|&v| base.is_open(image(v)))
            });
            if !local {
                return Err(Error::NotLocalHomeo(e));
            }
        }
        Ok(EtaleSpace { base, total, proj })
    }

    /// `base × 0..k` with germ `p*k + j` over `p`.
    pub fn constant(base: &FiniteSpace, k: usize) -> Result<Self> {
        let n = base.points();
        let gens = base.opens().iter().flat_map(|&u| {
            (0..k).map(move |j| bits::members(u).fold(0u64, |m, p| m | 1 << (p * k + j)))
        });
        let npts = n * k;
        if npts > ETALE_GERM_CAP {
            return Err(Error::SizeLimit { what: "germs", value: npts, cap: ETALE_GERM_CAP });
        }
        let total = FiniteSpace::generated_by(npts, gens)?;
        let proj = (0..npts).map(|e| e / k).collect();
        Self::new(base.clone(), total, proj)
    }

    pub fn fiber(&self, p: usize) -> Vec<usize> {
        (0..self.total.points()).filter(|&e| self.proj[e] == p).collect()
    }
}

/// The étale space of `E`: germs are the stalks laid out point by point.
/// Returns the space and, per point, the germ id of the first stalk element.
pub fn etale_space(e: &FiniteSheaf) -> Result<(EtaleSpace, Vec<usize>)> {
    let space = e.space();
    let stalks = e.stalk_sizes();
    let mut offset = Vec::with_capacity(stalks.len());
    let mut total = 0;
    for &k in &stalks {
        offset.push(total);
        total += k;
    }
    if total > ETALE_GERM_CAP {
        return Err(Error::SizeLimit { what: "germs", value: total, cap: ETALE_GERM_CAP });
    }
    let mut gens = Vec::new();
    for (u, &mask) in space.opens().iter().enumerate() {
        for s in 0..e.section_count(u) {
            let g = e.germ_vector(u, s);
            gens.push(bits::members(mask).zip(g).fold(0u64, |m, (p, &x)| m | 1 << (offset[p] + x)));
        }
    }
    let proj = (0..stalks.len()).flat_map(|p| std::iter::repeat_n(p, stalks[p])).collect();
    let total_space = FiniteSpace::generated_by(total, gens)?;
    Ok((EtaleSpace::new(space.clone(), total_space, proj)?, offset))
}

/// The sheaf of continuous sections of `π`. Sections over `U` are germ
/// vectors (global germ ids) in lexicographic order.
pub fn sheaf_from_etale(e: &EtaleSpace) -> Result<FiniteSheaf> {
    let fibers: Vec<Vec<usize>> = (0..e.base.points()).map(|p| e.fiber(p)).collect();
    let mut families = Vec::with_capacity(e.base.opens().len());
    for &u in e.base.opens() {
        let pts: Vec<usize> = bits::members(u).collect();
        let count: usize = pts.iter().map(|&p| fibers[p].len()).product();
        if count > SECTION_CAP {
            return Err(Error::SizeLimit { what: "candidate sections", value: count, cap: SECTION_CAP });
        }
        let mut out = Vec::new();
        choices(&pts, &|p| fibers[p].clone(), &mut |g| {
            let continuous = e.total.opens().iter().all(|&w| {
                let pre = pts.iter().zip(g).filter(|(_, &x)| bits::contains(w, x)).fold(0u64, |m, (&p, _)| m | 1 << p);
                e.base.is_open(pre)
            });
            if continuous {
                out.push(g.to_vec());
            }
        });
        families.push(out);
    }
    FiniteSheaf::from_germ_families(e.base.clone(), families)
}

/// Per-open component maps `E(U) → F(U)` of a natural transformation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheafMorphism {
    pub components: Vec<Vec<usize>>,
}

impl SheafMorphism {
    pub fn check(components: Vec<Vec<usize>>, source: &Presheaf, target: &Presheaf) -> Result<Self> {
        if source.space() != target.space() {
            return Err(Error::Malformed("sheaf morphism between different spaces".into()));
        }
        let opens = source.space().opens();
        if components.len() != opens.len() {
            return Err(Error::Malformed("one component per open expected".into()));
        }
        for (u, c) in components.iter().enumerate() {
            if c.len() != source.section_count(u) || c.iter().any(|&t| t >= target.section_count(u)) {
                return Err(Error::Malformed(format!("component over open {u} has the wrong shape")));
            }
        }
        for &(u, v) in source.restrictions().keys() {
            for s in 0..source.section_count(u) {
                if components[v][source.restrict(u, v, s)] != target.restrict(u, v, components[u][s]) {
                    return Err(Error::NotMorphism { law: "naturality".into(), witness: vec![u, v, s] });
                }
            }
        }
        Ok(SheafMorphism { components })
    }

    pub fn is_iso(&self) -> bool {
        self.components.iter().all(|c| {
            let mut seen = vec![false; c.len()];
            c.iter().all(|&t| t < seen.len() && !std::mem::replace(&mut seen[t], true))
        })
    }
}

/// The natural bijection `E ≅ Γ(etale_space(E))`, verified.
pub fn etale_round_trip(e: &FiniteSheaf) -> Result<SheafMorphism> {
    let (et, offset) = etale_space(e)?;
    let back = sheaf_from_etale(&et)?;
    let opens = e.space().opens();
    let components = (0..opens.len())
        .map(|u| {
            (0..e.section_count(u))
                .map(|s| {
                    let g: Vec<usize> = bits::members(opens[u]).zip(e.germ_vector(u, s)).map(|(p, &x)| offset[p] + x).collect();
                    back.section_by_label(u, &g).ok_or(Error::IsoFailure(format!("section {s} over open {u} has no image")))
                })
                .collect::<Result<Vec<usize>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let m = SheafMorphism::check(components, e, &back)?;
    if !m.is_iso() {
        return Err(Error::IsoFailure("sheaf and sections of its étale space differ".into()));
    }
    Ok(m)
}

/// `(f_*E)(V) = E(f⁻¹V)` for `f : X → Y` given as a point table.
pub fn pushforward(f: &[usize], e: &FiniteSheaf, target: &FiniteSpace) -> Result<FiniteSheaf> {
    let x = e.space();
    x.check_continuous(f, target)?;
    let pre: Vec<usize> = target
        .opens()
        .iter()
        .map(|&v| x.open_index(FiniteSpace::preimage(f, v)).expect("continuous"))
        .collect();
    let sections = pre.iter().map(|&u| e.section_count(u)).collect();
    let mut restrict = BTreeMap::new();
    for (v, &mv) in target.opens().iter().enumerate() {
        for (w, &mw) in target.opens().iter().enumerate() {
            if bits::is_subset(mw, mv) {
                restrict.insert((v, w), e.restrictions()[&(pre[v], pre[w])].clone());
            }
        }
    }
    FiniteSheaf::new(target.clone(), sections, restrict)
}
