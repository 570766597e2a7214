//! Argument parsers and file readers.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use quadrirational::bimoebius::{BiMoebiusMap, MapJson};
use quadrirational::exactnum::{fmt_q, parse_q, MPoly, TermJson, Q};
use quadrirational::geometry::PlanePoint;
use quadrirational::projline::{Moebius, P1};
use quadrirational::singularity::{SingularityData, SingularityJson};

pub type Res<T> = Result<T, String>;

pub fn rational(s: &str) -> Res<Q> {
    parse_q(s).map_err(|e| e.to_string())
}

pub fn rationals(s: &str) -> Res<Vec<Q>> {
    s.split(',').map(rational).collect()
}

pub fn triple(s: &str) -> Res<[Q; 3]> {
    let v = rationals(s)?;
    v.try_into().map_err(|v: Vec<Q>| format!("expected 3 comma-separated values, got {}", v.len()))
}

/// "w1,w2" as an affine plane point.
pub fn affine_point(s: &str) -> Res<PlanePoint> {
    match rationals(s)?.as_slice() {
        [a, b] => Ok(PlanePoint::affine(a.clone(), b.clone())),
        v => Err(format!("expected 2 comma-separated values, got {}", v.len())),
    }
}

/// "p/q" or "p:q" read as the direction (p, q).
pub fn direction(s: &str) -> Res<(Q, Q)> {
    let (p, q) = s.split_once(['/', ':']).ok_or_else(|| format!("expected p/q, got {s:?}"))?;
    let (p, q) = (rational(p)?, rational(q)?);
    if p == Q::from_integer(0.into()) && q == Q::from_integer(0.into()) {
        return Err("direction (0, 0)".into());
    }
    Ok((p, q))
}

pub fn join(v: &[Q]) -> String {
    v.iter().map(fmt_q).collect::<Vec<_>>().join(",")
}

pub fn p1_json(p: &P1<Q>) -> Value {
    Value::String(p.to_string())
}

fn read_text(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

/// Parsed JSON file together with its raw text (for the input digest).
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Res<(T, String)> {
    let text = read_text(path)?;
    let v = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((v, text))
}

pub fn read_map(path: &Path) -> Res<(BiMoebiusMap, String)> {
    let (j, text): (MapJson, _) = read_json(path)?;
    let f = BiMoebiusMap::from_json(&j).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((f, text))
}

pub fn read_poly(path: &Path) -> Res<(MPoly, String)> {
    let (terms, text): (Vec<TermJson>, _) = read_json(path)?;
    let p = MPoly::from_json(&terms).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((p, text))
}

pub fn read_moebius(path: &Path) -> Res<(Moebius<Q>, String)> {
    let (j, text): ([[String; 2]; 2], _) = read_json(path)?;
    let m = Moebius::from_json(&j).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((m, text))
}

pub fn read_singularity_data(path: &Path) -> Res<(SingularityData, String)> {
    let (j, text): (SingularityJson, _) = read_json(path)?;
    let d = SingularityData::from_json(&j).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((d, text))
}

/// Output of `classify`: either the bare result object or the whole report line.
#[derive(Deserialize)]
pub struct CanonicalJson {
    #[serde(rename = "type")]
    pub ty: String,
    pub alpha: String,
    pub beta: String,
    pub change: [[[String; 2]; 2]; 4],
}

pub fn read_canonical(path: &Path) -> Res<(CanonicalJson, String)> {
    let (v, text): (Value, _) = read_json(path)?;
    let obj = match v.get("result") {
        Some(r) if v.get("claim").is_some() => r.clone(),
        _ => v,
    };
    let c = serde_json::from_value(obj).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((c, text))
}

pub fn write(path: &Path, contents: &str) -> Res<()> {
    std::fs::write(path, contents).map_err(|e| format!("{}: {e}", path.display()))
}
