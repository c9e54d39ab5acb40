//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use skewlat_core::assembly::{dissolution_checks, enumerate_nuclei, is_nucleus};
use skewlat_core::catalog;
use skewlat_core::duality::{
    agree_in_p, counit, dissolution_frame, enumerate_ncframe_morphisms, enumerate_sh_morphisms, h, partial_function_embedding,
    point_indicator, separate, star, transpose, transpose_inv, unit_sigma, upset_lattice, Target, HOM_SEARCH_CAP, G,
};
use skewlat_core::generate::{all_skew_lattices, distributive_lattices_up_to_iso, h_instances, random_skew_lattices};
use skewlat_core::iso::{lattice_isomorphism, skew_isomorphism};
use skewlat_core::order::{boolean_envelope, points};
use skewlat_core::sheaf::FiniteSheaf;
use skewlat_core::skew::{classify, decode_partial_function, green_d, partial_function_skew, primitive, shadow};
use skewlat_core::topo::{front_topology, is_sober, priestley_of, spectrum};
use skewlat_core::{FiniteFrame, FiniteLattice, FiniteSkewLattice, FiniteSpace};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Option<Duration>, start: Instant) -> Result<(), String> {
    match limit {
        Some(l) if start.elapsed() > l => Err(format!("runtime {:.1?} exceeds {:?}", start.elapsed(), l)),
        _ => Ok(()),
    }
}

/// A second, deliberately naive reading of the identity catalog.
#[derive(Debug, PartialEq, Eq)]
struct Naive {
    left_handed: bool,
    right_handed: bool,
    strongly_distributive: bool,
    symmetric: bool,
    distributive: bool,
    normal: bool,
    has_zero: bool,
    join_complete: bool,
    shadow_is_frame: bool,
    ncframe: bool,
}

fn naive(s: &FiniteSkewLattice) -> Naive {
    let n = s.size();
    let m = |a, b| s.meet(a, b);
    let j = |a, b| s.join(a, b);
    let all2 = |f: &dyn Fn(usize, usize) -> bool| (0..n).all(|x| (0..n).all(|y| f(x, y)));
    let all3 = |f: &dyn Fn(usize, usize, usize) -> bool| (0..n).all(|x| (0..n).all(|y| (0..n).all(|z| f(x, y, z))));
    let left_handed = all2(&|x, y| m(m(x, y), x) == m(x, y));
    let right_handed = all2(&|x, y| m(m(x, y), x) == m(y, x));
    let strongly_distributive = all3(&|x, y, z| m(j(x, y), z) == j(m(x, z), m(y, z)) && m(x, j(y, z)) == j(m(x, y), m(x, z)));
    let symmetric = all2(&|x, y| (j(x, y) == j(y, x)) == (m(x, y) == m(y, x)));
    let distributive = all3(&|x, y, z| {
        m(m(x, j(y, z)), x) == j(m(m(x, y), x), m(m(x, z), x)) && j(j(x, m(y, z)), x) == m(j(j(x, y), x), j(j(x, z), x))
    });
    let normal = all3(&|x, y, z| m(m(m(x, y), z), x) == m(m(m(x, z), y), x));
    let has_zero = (0..n).any(|z| (0..n).all(|x| j(x, z) == x && j(z, x) == x));

    let leq = |a: usize, b: usize| m(a, b) == a && m(b, a) == a;
    let lub = |set: &[usize]| -> Option<usize> {
        let ub: Vec<usize> = (0..n).filter(|&u| set.iter().all(|&c| leq(c, u))).collect();
        ub.iter().copied().find(|&u| ub.iter().all(|&v| leq(u, v)))
    };
    let mut join_complete = true;
    let mut inf_dist = true;
    for mask in 1u32..(1 << n) {
        let set: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let commuting = set.iter().all(|&a| set.iter().all(|&b| m(a, b) == m(b, a) && j(a, b) == j(b, a)));
        if !commuting {
            continue;
        }
        match lub(&set) {
            None => join_complete = false,
            Some(sup) => {
                for y in 0..n {
                    let r: Vec<usize> = set.iter().map(|&x| m(x, y)).collect();
                    let l: Vec<usize> = set.iter().map(|&x| m(y, x)).collect();
                    if lub(&r) != Some(m(sup, y)) || lub(&l) != Some(m(y, sup)) {
                        inf_dist = false;
                    }
                }
            }
        }
    }

    // shadow on classes of a∧b∧a = a, b∧a∧b = b
    let rep: Vec<usize> = (0..n).map(|a| (0..n).find(|&b| m(m(a, b), a) == a && m(m(b, a), b) == b).unwrap()).collect();
    let reps: Vec<usize> = {
        let mut r = rep.clone();
        r.sort();
        r.dedup();
        r
    };
    let qm = |a: usize, b: usize| rep[m(a, b)];
    let qj = |a: usize, b: usize| rep[j(a, b)];
    let shadow_is_frame =
        reps.iter().all(|&x| reps.iter().all(|&y| reps.iter().all(|&z| qm(x, qj(y, z)) == qj(qm(x, y), qm(x, z)))));
    let ncframe = has_zero && strongly_distributive && shadow_is_frame && join_complete && inf_dist;
    Naive { left_handed, right_handed, strongly_distributive, symmetric, distributive, normal, has_zero, join_complete, shadow_is_frame, ncframe }
}

fn generated_instances() -> Vec<FiniteSkewLattice> {
    let mut v = Vec::new();
    for n in 1..=4 {
        v.extend(all_skew_lattices(n).expect("within cap"));
    }
    v.extend(random_skew_lattices(500, 8, 0));
    v
}

fn criterion_1(pool: &[FiniteSkewLattice]) -> Outcome {
    let start = Instant::now();
    let exhaustive = pool.len() - 500;
    let (mut frames, mut left, mut sd) = (0, 0, 0);
    for (i, s) in pool.iter().enumerate() {
        let r = classify(s);
        frames += r.ncframe as usize;
        left += r.left_handed as usize;
        sd += r.strongly_distributive as usize;
        let got = Naive {
            left_handed: r.left_handed,
            right_handed: r.right_handed,
            strongly_distributive: r.strongly_distributive,
            symmetric: r.symmetric,
            distributive: r.distributive,
            normal: r.normal,
            has_zero: r.has_zero,
            join_complete: r.join_complete,
            shadow_is_frame: r.shadow_is_frame,
            ncframe: r.ncframe,
        };
        let want = naive(s);
        ensure(got == want, || format!("instance {i}: classify {got:?} vs oracle {want:?}"))?;
        ensure(r.join_complete_exact, || format!("instance {i}: join completeness was sampled"))?;
    }
    within(Some(Duration::from_secs(60)), start)?;
    Ok(format!(
        "{exhaustive} exhaustive + 500 random instances agree ({left} left-handed, {sd} strongly distributive, {frames} ncframes), limit 60s"
    ))
}

fn criterion_2(pool: &[FiniteSkewLattice]) -> Outcome {
    for (i, s) in pool.iter().enumerate() {
        let (l, proj) = shadow(s).map_err(|e| format!("instance {i}: {e}"))?;
        FiniteLattice::validate(&l.meet_table().rows(), &l.join_table().rows()).map_err(|e| format!("instance {i}: shadow {e}"))?;
        // the projection preserves both operations, checked directly
        for a in 0..s.size() {
            for b in 0..s.size() {
                ensure(proj.apply(s.meet(a, b)) == l.meet(proj.apply(a), proj.apply(b)), || format!("instance {i}: π(a∧b) at {a},{b}"))?;
                ensure(proj.apply(s.join(a, b)) == l.join(proj.apply(a), proj.apply(b)), || format!("instance {i}: π(a∨b) at {a},{b}"))?;
            }
        }
        if let Some(z) = s.zero() {
            ensure(proj.apply(z) == l.bottom(), || format!("instance {i}: π(0)"))?;
        }
        let r = classify(s);
        ensure(!r.strongly_distributive || (r.symmetric && r.distributive && r.normal), || format!("instance {i}: Leech implication"))?;
    }
    Ok(format!("{} instances, zero counterexamples", pool.len()))
}

fn criterion_3() -> Outcome {
    let mut checked = 0;
    for r in 0..=3 {
        for sv in 1..=3 {
            let p = partial_function_skew(r, sv).map_err(|e| e.to_string())?;
            let n = p.size();
            ensure(n == (sv + 1usize).pow(r as u32), || format!("P({r},{sv}) has {n} elements"))?;
            let f: Vec<Vec<Option<usize>>> = (0..n).map(|i| decode_partial_function(r, sv, i)).collect();
            let dom = |g: &[Option<usize>]| -> Vec<bool> { g.iter().map(Option::is_some).collect() };
            let d = green_d(&p).map_err(|e| e.to_string())?;
            for a in 0..n {
                for b in 0..n {
                    let meet: Vec<Option<usize>> = (0..r).map(|k| f[b][k].and(f[a][k])).collect();
                    let join: Vec<Option<usize>> = (0..r).map(|k| f[b][k].or(f[a][k])).collect();
                    ensure(f[p.meet(a, b)] == meet, || format!("P({r},{sv}): f∧g at {a},{b}"))?;
                    ensure(f[p.join(a, b)] == join, || format!("P({r},{sv}): f∨g at {a},{b}"))?;
                    ensure((d.class_of[a] == d.class_of[b]) == (dom(&f[a]) == dom(&f[b])), || format!("P({r},{sv}): 𝒟 at {a},{b}"))?;
                    let restricted: Vec<Option<usize>> = (0..r).map(|k| f[a][k].and(f[b][k])).collect();
                    ensure(p.leq(a, b) == (f[a] == restricted), || format!("P({r},{sv}): ≤ at {a},{b}"))?;
                }
            }
            let (sh, _) = shadow(&p).map_err(|e| e.to_string())?;
            ensure(lattice_isomorphism(&sh, &catalog::boolean(r)).is_some(), || format!("P({r},{sv}): shadow is not the powerset"))?;
            let rep = classify(&p);
            ensure(rep.ncframe && rep.left_handed && rep.strongly_distributive, || format!("P({r},{sv}): {rep:?}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} partial-function skew lattices"))
}

fn criterion_4() -> Outcome {
    let instances = h_instances(3, 2).map_err(|e| e.to_string())?;
    let mut pairs = 0usize;
    for (i, (y, e)) in instances.iter().enumerate() {
        let a = h(y, e).map_err(|err| format!("instance {i}: {err}"))?;
        let s = &a.skew;
        let (sh, proj) = shadow(s).map_err(|err| err.to_string())?;
        let front = e.space();
        for p in points(&FiniteFrame::new(sh).map_err(|err| err.to_string())?) {
            let ind = point_indicator(s, &proj, &p);
            // the points y of Y whose open neighbourhoods are exactly the opens of the supported pairs
            let over: Vec<usize> = (0..y.points())
                .filter(|&q| (0..s.size()).all(|x| ind[x] == (y.opens()[a.labels[x].0] >> q & 1 == 1)))
                .collect();
            ensure(!over.is_empty(), || format!("instance {i}: point without a point of Y"))?;
            for &q in &over {
                for x in (0..s.size()).filter(|&x| ind[x]) {
                    for z in (0..s.size()).filter(|&z| ind[z]) {
                        let germ = |el: usize| {
                            let (u, sec) = a.labels[el];
                            e.germ(front.open_index(y.opens()[u]).unwrap(), sec, q).unwrap()
                        };
                        let agree = agree_in_p(s, &ind, x, z).map_err(|err| err.to_string())?;
                        ensure(agree == (germ(x) == germ(z)), || format!("instance {i}: point {q}, elements {x},{z}"))?;
                        pairs += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{} sheaves, {pairs} (point, pair) checks", instances.len()))
}

struct SpatialInstance {
    name: String,
    skew: FiniteSkewLattice,
}

const INSTANCE_CAP: usize = 200;

fn spatial_instances() -> Vec<SpatialInstance> {
    let mut v = Vec::new();
    for t in 1..=4 {
        v.push(SpatialInstance { name: format!("primitive({t})"), skew: primitive(t).unwrap() });
    }
    for r in 0..=2 {
        for s in 1..=2 {
            v.push(SpatialInstance { name: format!("P({r},{s})"), skew: partial_function_skew(r, s).unwrap() });
        }
    }
    for n in 1..=4 {
        for l in distributive_lattices_up_to_iso(n) {
            let p = priestley_of(&FiniteFrame::new(l).unwrap()).unwrap();
            for stalks in stalk_vectors(p.patch.points(), 2) {
                let f = FiniteSheaf::product_over_blocks(&p.patch, &stalks).unwrap();
                v.push(SpatialInstance { name: format!("star(n={n}, {stalks:?})"), skew: star(&p, &f).unwrap().skew });
            }
        }
    }
    let hs = h_instances(3, 2).unwrap();
    let room = INSTANCE_CAP - v.len();
    let stride = hs.len().div_ceil(room).max(1);
    for (i, (y, e)) in hs.iter().enumerate().step_by(stride) {
        v.push(SpatialInstance { name: format!("H#{i}({:?}, {:?})", y.opens(), e.stalk_sizes()), skew: h(y, e).unwrap().skew });
    }
    v.truncate(INSTANCE_CAP);
    v
}

fn stalk_vectors(k: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out.into_iter().flat_map(|v| (1..=max).map(move |s| [v.clone(), vec![s]].concat())).collect();
    }
    out
}

fn criterion_5(inst: &[SpatialInstance]) -> Outcome {
    for it in inst {
        let u = unit_sigma(&it.skew).map_err(|e| format!("{}: {e}", it.name))?;
        ensure(u.bijective(), || format!("{}: σ is not bijective", it.name))?;
    }
    let mut sober = 0;
    for (i, (y, e)) in h_instances(3, 2).unwrap().iter().enumerate() {
        if !is_sober(y).ok {
            continue;
        }
        let c = counit(y, e).map_err(|err| format!("counit #{i}: {err}"))?;
        ensure(c.iso, || format!("counit #{i} over {:?} is not an isomorphism", y.opens()))?;
        sober += 1;
    }
    Ok(format!("σ bijective on {} instances; counit iso on {sober} sober (Y, E)", inst.len()))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let nc5 = h(&catalog::sierpinski(), &FiniteSheaf::product_over_blocks(&front_topology(&catalog::sierpinski()), &[1, 2]).unwrap())
        .unwrap();
    let g = G(&nc5.skew).map_err(|e| e.to_string())?;
    let (mut targets, mut homs) = (0, 0);
    for (i, (y, e)) in h_instances(3, 2).unwrap().iter().enumerate() {
        let b = h(y, e).unwrap();
        if b.skew.size() > 9 {
            continue;
        }
        let t = Target { y, e, h: &b };
        let phis = enumerate_ncframe_morphisms(&nc5.skew, &b.skew, HOM_SEARCH_CAP).map_err(|err| err.to_string())?;
        let shs = enumerate_sh_morphisms(&g, &t).map_err(|err| format!("target #{i}: {err}"))?;
        ensure(phis.len() == shs.len(), || format!("target #{i}: {} ncframe morphisms vs {} sheaf morphisms", phis.len(), shs.len()))?;
        for phi in &phis {
            let m = transpose(&nc5.skew, &g, &t, phi).map_err(|err| format!("target #{i}: {err}"))?;
            ensure(&transpose_inv(&nc5.skew, &g, &t, &m).map_err(|err| err.to_string())? == phi, || format!("target #{i}: φ ↦ (f,λ) ↦ φ"))?;
        }
        for m in &shs {
            let phi = transpose_inv(&nc5.skew, &g, &t, m).map_err(|err| format!("target #{i}: {err}"))?;
            ensure(&transpose(&nc5.skew, &g, &t, &phi).map_err(|err| err.to_string())? == m, || format!("target #{i}: (f,λ) ↦ φ ↦ (f,λ)"))?;
        }
        targets += 1;
        homs += phis.len();
    }
    within(Some(Duration::from_secs(120)), start)?;
    Ok(format!("{targets} targets, {homs} morphisms, limit 120s"))
}

fn criterion_7(inst: &[SpatialInstance]) -> Outcome {
    let mut pairs = 0;
    for it in inst {
        let s = &it.skew;
        let u = unit_sigma(s).map_err(|e| e.to_string())?;
        let d = green_d(s).map_err(|e| e.to_string())?;
        for class in &d.classes {
            let injective = {
                let mut im: Vec<usize> = class.iter().map(|&x| u.sigma.apply(x)).collect();
                im.sort();
                im.dedup();
                im.len() == class.len()
            };
            for &a in class {
                for &b in class.iter().filter(|&&b| b != a) {
                    let q = separate(s, a, b).map_err(|e| format!("{}: {e}", it.name))?;
                    let verified = q.as_ref().is_some_and(|q| q.morphism.apply(a) == 1 && q.morphism.apply(b) == 2);
                    ensure(injective == verified, || format!("{}: pair {a},{b}", it.name))?;
                    pairs += 1;
                }
            }
        }
        if u.bijective() {
            let (_, emb) = partial_function_embedding(s, &u.g).map_err(|e| format!("{}: {e}", it.name))?;
            ensure(emb.is_injective(), || format!("{}: embedding not injective", it.name))?;
        }
    }
    Ok(format!("{pairs} same-class pairs on {} instances", inst.len()))
}

fn brute_force_nuclei(l: &FiniteLattice) -> Vec<Vec<usize>> {
    let n = l.size();
    let mut out = Vec::new();
    let total = n.pow(n as u32);
    for code in 0..total {
        let t: Vec<usize> = (0..n).map(|i| code / n.pow(i as u32) % n).collect();
        let ok = (0..n).all(|a| l.leq(a, t[a]) && t[t[a]] == t[a] && (0..n).all(|b| t[l.meet(a, b)] == l.meet(t[a], t[b])));
        if ok {
            out.push(t);
        }
    }
    out.sort();
    out
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut frames = 0;
    for n in 1..=6 {
        for l in distributive_lattices_up_to_iso(n) {
            let f = FiniteFrame::new(l.clone()).map_err(|e| e.to_string())?;
            let asm = enumerate_nuclei(&f).map_err(|e| e.to_string())?;
            let oracle = brute_force_nuclei(&l);
            ensure(asm.nuclei == oracle, || format!("|L|={n}: {} nuclei vs {} by brute force", asm.len(), oracle.len()))?;
            ensure(asm.nuclei.iter().all(|t| is_nucleus(&l, t).ok), || format!("|L|={n}: invalid nucleus"))?;
            let k = points(&f).len();
            ensure(asm.len() == 1 << k, || format!("|L|={n}: {} nuclei for {k} points", asm.len()))?;
            ensure(asm.frame.is_boolean(), || format!("|L|={n}: assembly is not boolean"))?;
            let (env, _) = boolean_envelope(&f).map_err(|e| e.to_string())?;
            ensure(lattice_isomorphism(&asm.frame, &env).is_some(), || format!("|L|={n}: assembly ≇ envelope"))?;
            let y = spectrum(&f).map_err(|e| e.to_string())?.space;
            let rep = dissolution_checks(&y).map_err(|e| e.to_string())?;
            ensure(rep.ok(), || format!("|L|={n}: {rep:?}"))?;
            frames += 1;
        }
    }
    within(Some(Duration::from_secs(60)), start)?;
    Ok(format!("{frames} frames, limit 60s"))
}

fn criterion_9(inst: &[SpatialInstance]) -> Outcome {
    let mut count = 0;
    let mut check = |y: &FiniteSpace, e: &FiniteSheaf, name: &str| -> Result<(), String> {
        let a = h(y, e).map_err(|err| format!("{name}: {err}"))?;
        let d = dissolution_frame(y, e).map_err(|err| format!("{name}: {err}"))?;
        ensure(a.same_structure(&d), || format!("{name}: dissolution frame differs from H"))?;
        count += 1;
        Ok(())
    };
    for it in inst {
        let g = G(&it.skew).map_err(|e| e.to_string())?;
        check(&g.base, &g.sheaf, &it.name)?;
    }
    for (i, (y, e)) in h_instances(3, 2).unwrap().iter().enumerate() {
        if is_sober(y).ok {
            check(y, e, &format!("H#{i}"))?;
        }
    }
    Ok(format!("{count} (Y, F) pairs"))
}

fn criterion_10() -> Outcome {
    let nc5 = catalog::nc5();
    let p22 = catalog::p22();
    let mut hits = (0, 0);
    let mut total = 0;
    for (name, lattice) in [("CHAIN3", catalog::chain(3)), ("BOOL2", catalog::boolean(2))] {
        let p = priestley_of(&FiniteFrame::new(lattice).unwrap()).map_err(|e| e.to_string())?;
        for stalks in stalk_vectors(2, 2) {
            let f = FiniteSheaf::product_over_blocks(&p.patch, &stalks).map_err(|e| e.to_string())?;
            let a = star(&p, &f).map_err(|e| format!("{name} {stalks:?}: {e}"))?;
            let (sh, _) = shadow(&a.skew).map_err(|e| e.to_string())?;
            ensure(lattice_isomorphism(&sh, &upset_lattice(&p)).is_some(), || format!("{name} {stalks:?}: shadow ≇ up-sets"))?;
            if skew_isomorphism(&a.skew, &nc5).is_some() {
                hits.0 += 1;
            }
            if skew_isomorphism(&a.skew, &p22).is_some() {
                hits.1 += 1;
            }
            total += 1;
        }
    }
    ensure(hits.0 > 0 && hits.1 > 0, || format!("NC5 reproduced {} times, P22 {} times", hits.0, hits.1))?;
    Ok(format!("{total} instances; NC5 ×{}, P22 ×{}", hits.0, hits.1))
}

fn run(id: usize, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
    });
    match res {
        Ok(detail) => {
            println!("PASS [{id:>2}] {name}: {detail} ({:.2?})", start.elapsed());
            true
        }
        Err(why) => {
            println!("FAIL [{id:>2}] {name}: {why} ({:.2?})", start.elapsed());
            false
        }
    }
}

fn main() {
    let pool = generated_instances();
    let spatial = spatial_instances();
    let results = [
        run(1, "axiom soundness", || criterion_1(&pool)),
        run(2, "shadow and Leech implication", || criterion_2(&pool)),
        run(3, "partial-function conformance", criterion_3),
        run(4, "stalk and ∼_p agreement", criterion_4),
        run(5, "finite spatiality", || criterion_5(&spatial)),
        run(6, "adjunction transpose", criterion_6),
        run(7, "separation and embedding", || criterion_7(&spatial)),
        run(8, "assembly counts", criterion_8),
        run(9, "dissolution collapse", || criterion_9(&spatial)),
        run(10, "Priestley star", criterion_10),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
