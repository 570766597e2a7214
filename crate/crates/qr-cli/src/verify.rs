use quadrirational::bimoebius::BiMoebiusMap;
use quadrirational::catalog::{family, make, mixed_cube as mixed_cube_faces, Family};
use quadrirational::consistency::{check_3d_consistent, check_yang_baxter, composition_is_identity, maps_equal, CubeAssignment};
use quadrirational::exactnum::Q;

use crate::input::{join, rational, triple, Res};
use crate::report::Report;
use crate::{FamilyArgs, ModeArgs};

/// F(a1, a2), F(a1, a3), F(a2, a3).
fn edge_maps(fam: Family, a: &[Q; 3]) -> Res<[BiMoebiusMap; 3]> {
    let f = |i: usize, j: usize| -> Res<BiMoebiusMap> {
        if fam.takes_parameters() {
            family(fam, &a[i], &a[j]).map_err(|e| e.to_string())
        } else {
            make(fam, None).map_err(|e| e.to_string())
        }
    };
    Ok([f(0, 1)?, f(0, 2)?, f(1, 2)?])
}

pub fn family_map(fam: &FamilyArgs) -> Res<(BiMoebiusMap, Q, Q)> {
    let (a, b) = (rational(&fam.alpha)?, rational(&fam.beta)?);
    let f = if fam.family.takes_parameters() { family(fam.family, &a, &b) } else { make(fam.family, None) };
    Ok((f.map_err(|e| e.to_string())?, a, b))
}

pub fn describe_family(fam: &FamilyArgs) -> Res<String> {
    Ok(format!("family={} alpha={} beta={}", fam.family, join(&[rational(&fam.alpha)?]), join(&[rational(&fam.beta)?])))
}

pub fn yang_baxter(fam: Family, params: &str, mode: ModeArgs) -> Res<Vec<Report>> {
    let a = triple(params)?;
    let [r12, r13, r23] = edge_maps(fam, &a)?;
    let v = check_yang_baxter(&r12, &r13, &r23, &mode.config()).map_err(|e| e.to_string())?;
    let input = format!("yang-baxter family={fam} params={} {}", join(&a), mode.describe());
    Ok(vec![Report::from_verdict(format!("yang-baxter/{fam}"), &input, &v)])
}

pub fn three_d(fam: Family, params: &str, mode: ModeArgs) -> Res<Vec<Report>> {
    let a = triple(params)?;
    let [f12, f13, f23] = edge_maps(fam, &a)?;
    let v = check_3d_consistent(&CubeAssignment::uniform(f12, f13, f23), &mode.config()).map_err(|e| e.to_string())?;
    let input = format!("3d family={fam} params={} {}", join(&a), mode.describe());
    Ok(vec![Report::from_verdict(format!("3d-consistency/{fam}"), &input, &v)])
}

pub fn mixed_cube(params: &str, mode: ModeArgs) -> Res<Vec<Report>> {
    let a = triple(params)?;
    let cube = mixed_cube_faces(&a[0], &a[1], &a[2]).map_err(|e| e.to_string())?;
    let v = check_3d_consistent(&cube, &mode.config()).map_err(|e| e.to_string())?;
    let input = format!("mixed-cube params={} {}", join(&a), mode.describe());
    Ok(vec![Report::from_verdict("3d-consistency/mixed-cube", &input, &v)])
}

pub fn involution(fam: &FamilyArgs, mode: ModeArgs) -> Res<Vec<Report>> {
    let (f, _, _) = family_map(fam)?;
    let v = composition_is_identity(&f, &f, &mode.config()).map_err(|e| e.to_string())?;
    let input = format!("involution {} {}", describe_family(fam)?, mode.describe());
    Ok(vec![Report::from_verdict(format!("involution/{}", fam.family), &input, &v)])
}

pub fn companion(fam: &FamilyArgs, mode: ModeArgs) -> Res<Vec<Report>> {
    let (f, _, _) = family_map(fam)?;
    let input = format!("companion {} {}", describe_family(fam)?, mode.describe());
    let claim = format!("self-companion/{}", fam.family);
    let c = match f.companion() {
        Ok(c) => c,
        Err(e) => return Ok(vec![Report::new(claim, &input, "exact", 0).fail(serde_json::json!({ "reason": e.to_string() }))]),
    };
    let v = maps_equal(&c, &f, &mode.config()).map_err(|e| e.to_string())?;
    Ok(vec![Report::from_verdict(claim, &input, &v)])
}
