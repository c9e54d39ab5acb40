use std::path::Path;
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

use skewlat_core::catalog;
use skewlat_core::duality::h;
use skewlat_core::generate::h_instances;
use skewlat_core::io::{self, Document};
use skewlat_core::iso::{homeomorphism, skew_isomorphism};
use skewlat_core::sheaf::FiniteSheaf;
use skewlat_core::skew::{classify, green_d, primitive};
use skewlat_core::topo::{front_topology, is_sober};
use skewlat_core::FiniteSkewLattice;

struct Run {
    code: i32,
    cert: Value,
}

fn skewlat(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_skewlat")).args(args).arg("--json").output().expect("runs");
    let code = out.status.code().expect("exit code");
    let cert = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    Run { code, cert }
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p.to_str().unwrap().to_string()
}

fn read_doc(path: &Path) -> Document {
    io::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn verdict(cert: &Value, name: &str) -> bool {
    cert["verdicts"].as_array().unwrap().iter().find(|v| v["name"] == name).unwrap_or_else(|| panic!("no verdict {name}"))["ok"]
        .as_bool()
        .unwrap()
}

fn sheaf_file(dir: &Path, name: &str, y: &skewlat_core::FiniteSpace, stalks: &[usize]) -> String {
    let e = FiniteSheaf::product_over_blocks(&front_topology(y), stalks).unwrap();
    write(dir, name, &io::sheaf_json(&e))
}

#[test]
fn validate_exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(skewlat(&["validate", "catalog:CHAIN3"]).code, 0);
    let chain = write(dir.path(), "c3.json", &io::lattice_json(&catalog::chain(3)));
    assert_eq!(skewlat(&["validate", &chain]).code, 0);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"kind\": \"lattice\", ").unwrap();
    assert_eq!(skewlat(&["validate", bad.to_str().unwrap()]).code, 2);

    let broken = serde_json::json!({"kind": "lattice", "n": 2, "meet": [[0, 0], [0, 1]], "join": [[0, 0], [0, 1]]});
    let r = skewlat(&["validate", &write(dir.path(), "abs.json", &broken)]);
    assert_eq!(r.code, 1);
    let v = &r.cert["verdicts"][0];
    assert_eq!(v["law"], "absorption");
    assert!(!v["witness"].as_array().unwrap().is_empty());

    assert_eq!(skewlat(&["validate", "missing.json"]).code, 2);
    assert_eq!(skewlat(&["validate", "catalog:CHAIN3", "--cap", "4"]).code, 2);
}

#[test]
fn validate_sheaves_and_nuclei() {
    let dir = TempDir::new().unwrap();
    let sier = catalog::sierpinski();
    assert_eq!(skewlat(&["validate", &sheaf_file(dir.path(), "e.json", &sier, &[1, 2])]).code, 0);
    // two sections over {0} and {1} with one global section fail to glue
    let pre = serde_json::json!({
        "kind": "sheaf",
        "space": {"kind": "space", "points": 2, "opens": [[], [0], [1], [0, 1]]},
        "sections": [[0], [0], [0, 1], [0]],
        "restrict": {"1,0": [0], "2,0": [0, 0], "3,0": [0], "3,1": [0], "3,2": [0]}
    });
    let r = skewlat(&["validate", &write(dir.path(), "p.json", &pre)]);
    assert_eq!(r.code, 1);
    assert!(!verdict(&r.cert, "gluing"));
    let good = io::nucleus_json(&[1, 1, 2], Some(&catalog::chain(3)));
    assert_eq!(skewlat(&["validate", &write(dir.path(), "n.json", &good)]).code, 0);
    // not inflationary
    let bad = io::nucleus_json(&[0, 0, 2], Some(&catalog::chain(3)));
    assert_eq!(skewlat(&["validate", &write(dir.path(), "m.json", &bad)]).code, 1);
}

#[test]
fn analyze_reports() {
    let r = skewlat(&["analyze", "catalog:P22"]);
    assert_eq!(r.code, 0);
    let mut sizes: Vec<u64> = r.cert["report"]["class_sizes"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    sizes.sort();
    assert_eq!(sizes, vec![1, 2, 2, 4]);

    let r = skewlat(&["analyze", "catalog:PRIM2"]);
    assert_eq!(r.cert["report"]["properties"]["ncframe"], true);

    let r = skewlat(&["analyze", "catalog:CHAIN3"]);
    let rep = &r.cert["report"];
    assert_eq!(rep["commutative"], true);
    assert!(rep["class_sizes"].as_array().unwrap().iter().all(|v| v == 1));
    for law in ["left_handed", "right_handed", "symmetric", "normal", "distributive"] {
        assert_eq!(rep["properties"][law], true, "{law}");
    }
    assert_eq!(rep["shadow"]["n"], 3);

    assert_eq!(skewlat(&["analyze", "catalog:SIER"]).code, 2);
    assert_eq!(skewlat(&["analyze", "catalog:P22", "--cap", "2"]).code, 0);
}

#[test]
fn dualize_nc5() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("g");
    let r = skewlat(&["dualize", "catalog:NC5", "--out", out.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    assert!(verdict(&r.cert, "spatial"));
    assert_eq!(r.cert["report"]["shadow_iso"], true);
    assert_eq!(r.cert["report"]["sigma_bijective"], true);
    let Document::Space(base) = read_doc(&out.join("base.json")) else { panic!("base is a space") };
    let sier = catalog::sierpinski();
    let m = homeomorphism(&base, &sier).expect("base ≅ SIER");
    let stalks: Vec<u64> = r.cert["report"]["stalks"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    // stalk 1 at the closed point, 2 at the open point
    let expected = [1, 2];
    for (p, &s) in stalks.iter().enumerate() {
        assert_eq!(s, expected[m[p]]);
    }
    let Document::Sheaf(e) = read_doc(&out.join("sheaf.json")) else { panic!("sheaf") };
    assert_eq!(e.space(), &front_topology(&base));
    for f in ["base.json", "sheaf.json", "section_map.json", "certificate.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    for f in ["base.json", "sheaf.json", "section_map.json"] {
        assert_eq!(skewlat(&["validate", out.join(f).to_str().unwrap()]).code, 0, "{f} re-validates");
    }
    let cert: Value = serde_json::from_str(&std::fs::read_to_string(out.join("certificate.json")).unwrap()).unwrap();
    assert_eq!(cert["emitted"]["sheaf"], "sheaf.json");
}

#[test]
fn dualize_chain_and_failures() {
    let r = skewlat(&["dualize", "catalog:CHAIN3"]);
    assert_eq!(r.code, 0);
    assert!(verdict(&r.cert, "spatial"));
    let Document::Sheaf(e) = io::from_value(r.cert["emitted"]["sheaf"].clone()).unwrap() else { panic!("sheaf") };
    assert!(e.presheaf().section_counts().iter().all(|&k| k == 1), "constant one-section sheaf");

    let dir = TempDir::new().unwrap();
    let right = catalog::prim2().mirror();
    assert!(classify(&right).right_handed && !classify(&right).left_handed);
    let r = skewlat(&["dualize", &write(dir.path(), "r.json", &io::skew_json(&right))]);
    assert_eq!(r.code, 1);
    assert_eq!(r.cert["verdicts"][0]["law"], "left_handed");
}

#[test]
fn realize_examples() {
    let dir = TempDir::new().unwrap();
    let sier = catalog::sierpinski();
    let y = write(dir.path(), "sier.json", &io::space_json(&sier));
    let e = sheaf_file(dir.path(), "e12.json", &sier, &[1, 2]);
    let out = dir.path().join("nc5");
    let r = skewlat(&["realize", &y, &e, "--out", out.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    let Document::SkewLattice(a) = read_doc(&out.join("ncframe.json")) else { panic!("skew lattice") };
    assert!(skew_isomorphism(&a, &catalog::nc5()).is_some());
    assert!(a.labels().is_some_and(|l| l.iter().all(|s| s.starts_with('('))));
    assert_eq!(skewlat(&["validate", out.join("ncframe.json").to_str().unwrap()]).code, 0);

    let disc = catalog::discrete(2);
    let y2 = write(dir.path(), "disc2.json", &io::space_json(&disc));
    let e22 = sheaf_file(dir.path(), "e22.json", &disc, &[2, 2]);
    let r = skewlat(&["realize", &y2, &e22]);
    assert_eq!(r.code, 0);
    let Document::SkewLattice(b) = io::from_value(r.cert["emitted"]["ncframe"].clone()).unwrap() else { panic!() };
    assert!(skew_isomorphism(&b, &catalog::p22()).is_some());

    // a sheaf over SIER itself rather than its front
    let wrong = write(dir.path(), "wrong.json", &io::sheaf_json(&FiniteSheaf::constant(&sier, 1).unwrap()));
    let r = skewlat(&["realize", &y, &wrong]);
    assert_eq!(r.code, 1);
    assert_eq!(r.cert["verdicts"][0]["law"], "sheaf_on_front");
    assert_eq!(skewlat(&["realize", &e, &y]).code, 2);
}

#[test]
fn roundtrip_examples() {
    let r = skewlat(&["roundtrip", "catalog:NC5"]);
    assert_eq!(r.code, 0);
    assert!(verdict(&r.cert, "sigma_iso"));
    assert_eq!(r.cert["report"]["sigma"].as_array().unwrap().len(), 5);

    let dir = TempDir::new().unwrap();
    let sier = catalog::sierpinski();
    let y = write(dir.path(), "sier.json", &io::space_json(&sier));
    let e = sheaf_file(dir.path(), "e12.json", &sier, &[1, 2]);
    let r = skewlat(&["roundtrip", &y, &e]);
    assert_eq!(r.code, 0);
    assert!(verdict(&r.cert, "counit_iso"));
    assert_eq!(r.cert["report"]["f"].as_array().unwrap().len(), 2);

    let r = skewlat(&["roundtrip", "catalog:CHAIN1"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.cert["report"]["sigma"], serde_json::json!([0]));
}

#[test]
fn roundtrip_non_sober_counit_fails() {
    let dir = TempDir::new().unwrap();
    let y = catalog::indiscrete(2);
    assert!(!is_sober(&y).ok);
    let ys = write(dir.path(), "y.json", &io::space_json(&y));
    let e = sheaf_file(dir.path(), "e.json", &y, &[1, 1]);
    let r = skewlat(&["roundtrip", &ys, &e]);
    assert_eq!(r.code, 1);
    assert_eq!(r.cert["verdicts"][0]["law"], "isomorphism");
}

#[test]
fn nuclei_examples() {
    let r = skewlat(&["nuclei", "catalog:CHAIN3"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.cert["report"]["count"], 4);
    assert_eq!(r.cert["report"]["boolean"], true);
    assert!(verdict(&r.cert, "front_iso"));

    let r = skewlat(&["nuclei", "catalog:SIER"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.cert["report"]["count"], 4);
    assert!(verdict(&r.cert, "front_iso"));

    // the nucleus cap is exceeded by BOOL4
    let r = skewlat(&["nuclei", "catalog:BOOL4", "--cap", "8"]);
    assert_eq!(r.code, 1);
    assert_eq!(r.cert["verdicts"][0]["law"], "size_limit");
    assert_eq!(skewlat(&["nuclei", "catalog:N5"]).code, 1);
    assert_eq!(skewlat(&["nuclei", "catalog:SIER", "--cap", "3"]).code, 2);
}

#[test]
fn separate_nc5_tops() {
    let nc5 = catalog::nc5();
    let d = green_d(&nc5).unwrap();
    let top = &d.classes[d.top_class.unwrap()];
    assert_eq!(top.len(), 2);
    let (a, b) = (top[0].to_string(), top[1].to_string());
    let r = skewlat(&["separate", "catalog:NC5", &a, &b]);
    assert_eq!(r.code, 0);
    let m: Vec<u64> = r.cert["report"]["morphism"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    assert_eq!(m.len(), 5);
    assert_ne!(m[top[0]], m[top[1]]);
    assert!(m[top[0]] > 0 && m[top[1]] > 0);

    // by label
    let la = nc5.label(top[0]);
    let lb = nc5.label(top[1]);
    assert_eq!(skewlat(&["separate", "catalog:NC5", &la, &lb]).code, 0);
    assert_eq!(skewlat(&["separate", "catalog:NC5", &a, &a]).code, 1);
    assert_eq!(skewlat(&["separate", "catalog:NC5", &a, "99"]).code, 2);
}

#[test]
fn spectrum_examples() {
    let r = skewlat(&["spectrum", "catalog:BOOL2"]);
    assert_eq!(r.code, 0);
    let Document::Space(y) = io::from_value(r.cert["emitted"]["spectrum"].clone()).unwrap() else { panic!() };
    assert!(homeomorphism(&y, &catalog::discrete(2)).is_some());

    let r = skewlat(&["spectrum", "catalog:CHAIN3"]);
    let Document::Space(y) = io::from_value(r.cert["emitted"]["spectrum"].clone()).unwrap() else { panic!() };
    assert_eq!(y.points(), 2);
    assert!(!y.is_discrete());

    let r = skewlat(&["spectrum", "catalog:INDISC2"]);
    assert_eq!(r.cert["report"]["space"]["sober"], false);
    let Document::Space(y) = io::from_value(r.cert["emitted"]["spectrum"].clone()).unwrap() else { panic!() };
    assert_eq!(y.points(), 1);
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing_ms");
    v
}

#[test]
fn certificates_are_deterministic() {
    for args in [
        vec!["analyze", "catalog:P22", "--seed", "7"],
        vec!["dualize", "catalog:NC5"],
        vec!["nuclei", "catalog:BOOL2"],
        vec!["separate", "catalog:PRIM3", "1", "2"],
    ] {
        let a = without_timing(skewlat(&args).cert);
        let b = without_timing(skewlat(&args).cert);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a["inputs"][0]["sha256"].as_str().unwrap().len() == 64);
    }
}

/// `realize ∘ dualize` on files, for every spatial input.
#[test]
fn realize_after_dualize_is_isomorphic() {
    let dir = TempDir::new().unwrap();
    let mut inputs: Vec<FiniteSkewLattice> = vec![catalog::nc5(), catalog::prim2(), catalog::p22(), primitive(3).unwrap()];
    inputs.push(FiniteSkewLattice::from_lattice(&catalog::chain(3)));
    for (y, e) in h_instances(2, 2).unwrap().into_iter().step_by(3) {
        inputs.push(h(&y, &e).unwrap().skew);
    }
    for (i, a) in inputs.iter().enumerate() {
        let file = write(dir.path(), &format!("a{i}.json"), &io::skew_json(a));
        let g = dir.path().join(format!("g{i}"));
        let r = skewlat(&["dualize", &file, "--out", g.to_str().unwrap()]);
        assert_eq!(r.code, 0, "input {i}");
        assert!(verdict(&r.cert, "spatial"));
        let hdir = dir.path().join(format!("h{i}"));
        let r = skewlat(&[
            "realize",
            g.join("base.json").to_str().unwrap(),
            g.join("sheaf.json").to_str().unwrap(),
            "--out",
            hdir.to_str().unwrap(),
        ]);
        assert_eq!(r.code, 0, "input {i}");
        let Document::SkewLattice(back) = read_doc(&hdir.join("ncframe.json")) else { panic!() };
        assert!(skew_isomorphism(&back, a).is_some(), "input {i}");
    }
}
