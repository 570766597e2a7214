use std::path::Path;

use serde_json::json;

use quadrirational::bimoebius::{from_quadratic_phi, from_semilinear_pair, BiMoebiusMap};
use quadrirational::catalog::family;
use quadrirational::consistency::{maps_equal, IdentityTestConfig};
use quadrirational::projline::Moebius;
use quadrirational::singularity::{build_map_from_edge_data, canonicalize_map, Canonical, MapType};

use crate::input::{self, rational, Res};
use crate::report::Report;
use crate::{ConstructArgs, ConstructMode};

fn classification(f: &BiMoebiusMap) -> Res<Canonical> {
    canonicalize_map(f).map_err(|e| format!("cannot classify: {e}"))
}

fn classification_json(f: &BiMoebiusMap, c: &Canonical) -> serde_json::Value {
    let mut v = c.to_json();
    v["subclass"] = json!(f.subclass().to_string());
    v
}

pub fn classify(path: &Path) -> Res<Vec<Report>> {
    let (f, text) = input::read_map(path)?;
    let c = classification(&f)?;
    Ok(vec![Report::new("classify", &format!("classify {text}"), "exact", 0).with_result(classification_json(&f, &c))])
}

pub fn canonicalize(path: &Path, out: &Path) -> Res<Vec<Report>> {
    let (f, text) = input::read_map(path)?;
    let c = classification(&f)?;
    let normal = family(c.ty.family(), &c.alpha, &c.beta).map_err(|e| e.to_string())?;
    let body = serde_json::to_string_pretty(&normal.to_json()).expect("plain data");
    input::write(out, &(body + "\n"))?;
    let mut res = classification_json(&f, &c);
    res["out"] = json!(out.display().to_string());
    Ok(vec![Report::new("canonicalize", &format!("canonicalize {text}"), "exact", 0).with_result(res)])
}

fn need(a: &ConstructArgs, n: usize) -> Res<()> {
    if a.inputs.len() != n {
        return Err(format!("this construct mode takes {n} input files, got {}", a.inputs.len()));
    }
    Ok(())
}

fn build(a: &ConstructArgs) -> Res<(BiMoebiusMap, String, &'static str)> {
    let err = |e: &dyn std::fmt::Display| format!("construction failed: {e}");
    match a.mode {
        ConstructMode::Semilinear => {
            need(a, 2)?;
            let (p, t1) = input::read_poly(&a.inputs[0])?;
            let (q, t2) = input::read_poly(&a.inputs[1])?;
            let f = from_semilinear_pair(&p, &q).map_err(|e| err(&e))?;
            Ok((f, format!("{t1}\n{t2}"), "semilinear"))
        }
        ConstructMode::Quadratic => {
            need(a, 2)?;
            let (p, t1) = input::read_poly(&a.inputs[0])?;
            let (m, t2) = input::read_moebius(&a.inputs[1])?;
            let f = from_quadratic_phi(&p, &m).map_err(|e| err(&e))?;
            Ok((f, format!("{t1}\n{t2}"), "quadratic"))
        }
        ConstructMode::Canonical => {
            need(a, 1)?;
            let (c, text) = input::read_canonical(&a.inputs[0])?;
            let ty: MapType = c.ty.parse()?;
            let normal = family(ty.family(), &rational(&c.alpha)?, &rational(&c.beta)?).map_err(|e| err(&e))?;
            let inv = c
                .change
                .iter()
                .map(|m| Moebius::from_json(m).map(|m| m.inverse()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| err(&e))?;
            let f = normal.conjugate(&inv[0], &inv[1], &inv[2], &inv[3]).map_err(|e| err(&e))?;
            Ok((f, text, "canonical"))
        }
        ConstructMode::EdgeData => {
            need(a, 4)?;
            let mut data = Vec::new();
            let mut text = String::new();
            for p in &a.inputs {
                let (d, t) = input::read_singularity_data(p)?;
                data.push(d);
                text.push_str(&t);
                text.push('\n');
            }
            let b = build_map_from_edge_data(&data[0], &data[1], &data[2], &data[3]).map_err(|e| err(&e))?;
            Ok((b.map, text, "edge-data"))
        }
    }
}

pub fn construct(a: &ConstructArgs) -> Res<Vec<Report>> {
    let (f, text, mode) = build(a)?;
    let map = serde_json::to_value(f.to_json()).expect("plain data");
    if let Some(out) = &a.out {
        input::write(out, &(serde_json::to_string_pretty(&map).expect("plain data") + "\n"))?;
    }
    let input = format!("construct {mode} {text}");
    let claim = format!("construct/{mode}");
    let result = json!({ "map": map, "subclass": f.subclass().to_string() });
    let report = match &a.expect {
        Some(p) => {
            let (g, t) = input::read_map(p)?;
            let v = maps_equal(&f, &g, &IdentityTestConfig::exact()).map_err(|e| e.to_string())?;
            Report::from_verdict(claim, &format!("{input}\nexpect {t}"), &v)
        }
        None if f.is_quadrirational() => Report::new(claim, &input, "exact", 0),
        None => Report::new(claim, &input, "exact", 0).fail(json!({ "reason": "the constructed map is not quadrirational" })),
    };
    Ok(vec![report.with_result(result)])
}
