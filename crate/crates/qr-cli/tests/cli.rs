use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use quadrirational::bimoebius::{from_quadratic_phi, from_semilinear_pair, BiMoebiusMap, MapJson};
use quadrirational::catalog::{family, Family};
use quadrirational::consistency::{maps_equal, IdentityTestConfig};
use quadrirational::exactnum::{qf, qi, MPoly, VU, VV, VX, VY};
use quadrirational::projline::Moebius;
use quadrirational::singularity::{edge_data, MapType};

fn qrmap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrmap")).args(args).output().expect("binary runs")
}

fn lines(o: &Output) -> Vec<Value> {
    String::from_utf8(o.stdout.clone()).unwrap().lines().map(|l| serde_json::from_str(l).expect("JSON line")).collect()
}

fn write_json(path: &Path, v: &impl serde::Serialize) {
    std::fs::write(path, serde_json::to_string(v).unwrap()).unwrap();
}

fn read_map(path: &Path) -> BiMoebiusMap {
    let j: MapJson = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    BiMoebiusMap::from_json(&j).unwrap()
}

fn mob(a: i64, b: i64, c: i64, d: i64) -> Moebius<quadrirational::exactnum::Q> {
    Moebius::new(qi(a), qi(b), qi(c), qi(d)).unwrap()
}

fn conjugated_fiv() -> BiMoebiusMap {
    family(Family::FIV, &qi(2), &qi(3)).unwrap().conjugate(&mob(1, 2, 0, 1), &mob(2, -1, 1, 1), &mob(0, 1, 1, 3), &mob(3, 0, 1, 1)).unwrap()
}

#[test]
fn yang_baxter_example_passes() {
    let o = qrmap(&["verify", "yb", "--family", "FV", "--params", "1,2,5"]);
    assert_eq!(o.status.code(), Some(0));
    let r = lines(&o);
    assert_eq!(r.len(), 1);
    assert_eq!(r[0]["verdict"], "pass");
    assert_eq!(r[0]["mode"], "random");
    assert!(r[0].get("counterexample").is_none());
}

#[test]
fn exact_mode_and_other_claims_pass() {
    for args in [
        vec!["verify", "3d", "--family", "FIV", "--params", "1,2,5", "--mode", "exact"],
        vec!["verify", "mixed-cube", "--params", "2,3,5", "--mode", "exact"],
        vec!["verify", "involution", "--family", "FIII", "--alpha", "-1/2", "--beta", "3", "--mode", "exact"],
        vec!["verify", "companion", "--family", "FI", "--alpha", "2", "--beta", "3"],
        vec!["multifield", "verify", "--n", "2", "--seed", "4", "--count", "10"],
        vec!["multifield", "matrix", "--count", "5"],
        vec!["geometry", "incidence", "--type", "I", "--count", "5"],
        vec!["geometry", "incidence", "--type", "V", "--params", "3,1,0", "--count", "5", "--seed", "2"],
    ] {
        let o = qrmap(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(lines(&o).iter().all(|r| r["verdict"] == "pass"), "{args:?}");
    }
}

#[test]
fn reports_are_reproducible() {
    let args = ["verify", "yb", "--family", "FII", "--params", "2,-3,7/2", "--seed", "11"];
    let (a, b) = (qrmap(&args), qrmap(&args));
    assert_eq!(a.stdout, b.stdout);
    let c = qrmap(&["verify", "yb", "--family", "FII", "--params", "2,-3,7/2", "--seed", "12"]);
    assert_ne!(lines(&a)[0]["input"], lines(&c)[0]["input"]);
}

#[test]
fn failing_claim_exits_one_with_counterexample() {
    // Ĝ with its own parameters is not an involution
    let o = qrmap(&["verify", "involution", "--family", "Ghat12", "--alpha", "2", "--beta", "3", "--mode", "exact"]);
    assert_eq!(o.status.code(), Some(1));
    let r = lines(&o);
    assert_eq!(r[0]["verdict"], "fail");
    assert!(r[0]["counterexample"].is_object());
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["verify", "yb", "--family", "FX", "--params", "1,2,5"],
        vec!["verify", "yb", "--family", "FV", "--params", "1,2"],
        vec!["verify", "yb", "--family", "FV", "--params", "1,1,5"],
        vec!["classify", "--map", "/nonexistent.json"],
        vec!["frobnicate"],
    ] {
        assert_eq!(qrmap(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn classify_then_construct_reproduces_the_map() {
    let dir = tempfile::tempdir().unwrap();
    let f = conjugated_fiv();
    let map_path = dir.path().join("fiv.json");
    write_json(&map_path, &f.to_json());
    let o = qrmap(&["classify", "--map", map_path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = &lines(&o)[0];
    assert_eq!(r["result"]["type"], "IV");
    assert_eq!(r["result"]["subclass"], "[2:2]");
    let cls = dir.path().join("classified.json");
    std::fs::write(&cls, String::from_utf8(o.stdout).unwrap()).unwrap();
    let built = dir.path().join("built.json");
    let o = qrmap(&["construct", "--mode", "canonical", "--in", cls.to_str().unwrap(), "--out", built.to_str().unwrap(), "--expect", map_path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(lines(&o)[0]["verdict"], "pass");
    // independent check of the written file
    assert!(maps_equal(&read_map(&built), &f, &IdentityTestConfig::exact()).unwrap().holds);
}

#[test]
fn canonicalize_writes_the_normal_form() {
    let dir = tempfile::tempdir().unwrap();
    let map_path = dir.path().join("fiv.json");
    write_json(&map_path, &conjugated_fiv().to_json());
    let out = dir.path().join("normal.json");
    let o = qrmap(&["canonicalize", "--map", map_path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = &lines(&o)[0]["result"];
    let (a, b) = (r["alpha"].as_str().unwrap(), r["beta"].as_str().unwrap());
    let expect = family(MapType::IV.family(), &a.parse().unwrap(), &b.parse().unwrap()).unwrap();
    assert_eq!(read_map(&out), expect);
}

#[test]
fn construct_from_edge_data_and_polynomials() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name);
    let f = family(Family::FII, &qf(5, 2), &qi(-3)).unwrap();
    let data = edge_data(&f).unwrap();
    let mut args = vec!["construct".to_string(), "--mode".into(), "edge-data".into(), "--in".into()];
    for (i, d) in data.iter().enumerate() {
        let path = p(&format!("d{i}.json"));
        write_json(&path, &d.to_json());
        args.push(path.to_str().unwrap().into());
    }
    let fp = p("f.json");
    write_json(&fp, &f.to_json());
    args.extend(["--expect".into(), fp.to_str().unwrap().into()]);
    let o = qrmap(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    // Φ = xyv + y - v + 2, Φ̂ = uyv + 2y - v + 1
    let (x, y, u, v) = (MPoly::var(VX), MPoly::var(VY), MPoly::var(VU), MPoly::var(VV));
    let phi = x.mul(&y).mul(&v).add(&y).sub(&v).add(&MPoly::constant(qi(2)));
    let hat = u.mul(&y).mul(&v).add(&y.scale(&qi(2))).sub(&v).add(&MPoly::constant(qi(1)));
    write_json(&p("phi.json"), &phi.to_json());
    write_json(&p("hat.json"), &hat.to_json());
    let o = qrmap(&["construct", "--mode", "semilinear", "--in", p("phi.json").to_str().unwrap(), p("hat.json").to_str().unwrap()]);
    let expect = from_semilinear_pair(&phi, &hat).unwrap();
    assert_eq!(o.status.code(), Some(0));
    let got: MapJson = serde_json::from_value(lines(&o)[0]["result"]["map"].clone()).unwrap();
    assert_eq!(BiMoebiusMap::from_json(&got).unwrap(), expect);

    let phi = family(Family::FV, &qi(2), &qi(3)).unwrap().big_phi();
    let m = mob(1, 2, 3, 4);
    write_json(&p("phi2.json"), &phi.to_json());
    write_json(&p("m.json"), &m.to_json());
    let o = qrmap(&["construct", "--mode", "quadratic", "--in", p("phi2.json").to_str().unwrap(), p("m.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let got: MapJson = serde_json::from_value(lines(&o)[0]["result"]["map"].clone()).unwrap();
    assert_eq!(BiMoebiusMap::from_json(&got).unwrap(), from_quadratic_phi(&phi, &m).unwrap());

    let o = qrmap(&["construct", "--mode", "semilinear", "--in", p("phi.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn integer_shorthand_in_map_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    let f = family(Family::FV, &qi(3), &qi(1)).unwrap();
    let j = f.to_json();
    let ints = |v: &Vec<String>| Value::Array(v.iter().map(|s| Value::from(s.parse::<i64>().unwrap())).collect());
    let obj = serde_json::json!({"a": ints(&j.a), "b": ints(&j.b), "c": ints(&j.c), "d": ints(&j.d), "A": ints(&j.big_a), "B": ints(&j.big_b), "C": ints(&j.big_c), "D": ints(&j.big_d)});
    write_json(&path, &obj);
    let o = qrmap(&["classify", "--map", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(lines(&o)[0]["result"]["type"], "V");
}

#[test]
fn blow_down_lists_the_diagonal() {
    let o = qrmap(&["blow", "down", "--family", "FI", "--alpha", "2", "--beta", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let r = &lines(&o)[0];
    let curves = r["result"]["curves"].as_array().unwrap();
    assert_eq!(curves.len(), 4);
    let diag = curves.iter().find(|c| c["curve"] == "x-y=0").expect("diagonal");
    assert_eq!(diag["target"], serde_json::json!(["2", "3"]));
}

#[test]
fn blow_up_along_a_slope() {
    let o = qrmap(&["blow", "up", "--family", "FI", "--alpha", "2", "--beta", "3", "--slope", "1/2", "--point", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let r = &lines(&o)[0]["result"];
    assert_eq!(r["singularity"], serde_json::json!(["0", "0"]));
    assert_eq!(r["limits"][0]["limit"], serde_json::json!(["4/5", "3/5"]));
    // the double point of F_II is reported, not failed
    let o = qrmap(&["blow", "up", "--family", "FII", "--alpha", "2", "--beta", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(lines(&o).iter().any(|r| r["verdict"] == "not-applicable"));
}

#[test]
fn lax_reports() {
    let o = qrmap(&["lax", "verify", "--family", "FV", "--alpha", "3", "--beta", "1", "--samples", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let r = lines(&o);
    assert_eq!(r.len(), 3);
    assert_eq!(r[0]["claim"], "lax/FV/normalized");
    assert_eq!(r[0]["result"]["relation"], "exact");

    // the normalized F_V matrix as a file: [[w, λ - p - w²], [1, -w]]
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lax.json");
    let t = |c: i64, e: [u32; 4]| serde_json::json!({"coeff": c.to_string(), "exp": e});
    let m = serde_json::json!({
        "side": "L",
        "entries": [[[t(1, [1, 0, 0, 0])], [t(1, [0, 0, 1, 0]), t(-1, [0, 1, 0, 0]), t(-1, [2, 0, 0, 0])]],
                    [[t(1, [0, 0, 0, 0])], [t(-1, [1, 0, 0, 0])]]]
    });
    write_json(&path, &m);
    let ok = qrmap(&["lax", "verify", "--family", "FV", "--alpha", "3", "--beta", "1", "--matrix", path.to_str().unwrap(), "--samples", "30"]);
    assert_eq!(ok.status.code(), Some(0));
    // sign of p flipped in the corner entry
    let m = serde_json::json!({
        "side": "L",
        "entries": [[[t(1, [1, 0, 0, 0])], [t(1, [0, 0, 1, 0]), t(1, [0, 1, 0, 0]), t(-1, [2, 0, 0, 0])]],
                    [[t(1, [0, 0, 0, 0])], [t(-1, [1, 0, 0, 0])]]]
    });
    write_json(&path, &m);
    let bad = qrmap(&["lax", "verify", "--family", "FV", "--alpha", "3", "--beta", "1", "--matrix", path.to_str().unwrap(), "--samples", "30"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(lines(&bad)[0]["counterexample"].is_object());
}

#[test]
fn geometry_map_and_svg() {
    let o = qrmap(&["geometry", "map", "--type", "V", "--alpha", "3", "--beta", "1", "--x", "2,7", "--y", "1,2"]);
    assert_eq!(o.status.code(), Some(0));
    let r = &lines(&o)[0]["result"];
    assert_eq!(r["U"], serde_json::json!(["3", "12", "1"]));
    assert_eq!(r["V"], serde_json::json!(["4", "17", "1"]));
    let o = qrmap(&["geometry", "incidence", "--type", "V", "--params", "3,1,0", "--points", "2,7;1,2;0,0"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("demo.svg");
    let o = qrmap(&["geometry", "svg", "--out", svg.to_str().unwrap(), "--type", "V", "--alpha", "3", "--beta", "1", "--x", "2", "--y", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}
