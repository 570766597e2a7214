use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use quadrirational::blow::{blowup_curve_equation, blowup_limit, exceptional_curves, ArcGerm};
use quadrirational::catalog::Family;
use quadrirational::exactnum::{fmt_q, MPoly, TermJson, Q};
use quadrirational::geometry::{
    check_pencil_incidence, conic_map as plane_conic_map, coplanar, cube_check, matrix_map as plane_matrix_map, multifield_map,
    parametrize, random_affine_pencil, random_incidence_case, random_rational, svg_demo, ConicPencil, GeometryError,
    InverseConvention, Matrix, PencilType, PlanePoint,
};
use quadrirational::lax::{check_lax, check_lax_with, LaxFamily, LaxReport, LaxVerdict, Mat, Side};
use quadrirational::projline::P1;
use quadrirational::singularity::singularities_of_map;

use crate::input::{self, affine_point, direction, join, p1_json, rational, triple, Res};
use crate::report::Report;
use crate::verify::{describe_family, family_map};
use crate::{FamilyArgs, PencilArg};

fn pencil_type(t: PencilArg) -> PencilType {
    match t {
        PencilArg::I => PencilType::I,
        PencilArg::V => PencilType::V,
    }
}

// ---- lax

#[derive(Deserialize)]
struct MatrixFile {
    side: String,
    entries: [[Vec<TermJson>; 2]; 2],
}

fn lax_report(claim: String, input: &str, r: &LaxReport, need_exact: bool) -> Report {
    let base = Report::new(claim, input, "random", r.samples);
    let relation = match r.verdict {
        LaxVerdict::Exact => "exact",
        LaxVerdict::Projective => "projective",
        LaxVerdict::Fail => "fail",
    };
    let ok = match r.verdict {
        LaxVerdict::Exact => true,
        LaxVerdict::Projective => !need_exact,
        LaxVerdict::Fail => false,
    };
    if ok {
        return base.with_result(json!({ "relation": relation, "skipped": r.skipped }));
    }
    let bad = r.table.iter().find(|s| match &s.scalar {
        None => true,
        Some(k) => need_exact && k != "1",
    });
    base.fail(json!({ "relation": relation, "sample": bad }))
}

pub fn lax(fam: &FamilyArgs, matrix: Option<&Path>, samples: usize, seed: u64) -> Res<Vec<Report>> {
    let (f, a, b) = family_map(fam)?;
    let desc = format!("{} samples={samples} seed={seed}", describe_family(fam)?);
    let run = |r: Result<LaxReport, _>| r.map_err(|e: quadrirational::lax::InsufficientSamples| e.to_string());
    let mut out = Vec::new();
    if let Some(path) = matrix {
        let (m, text): (MatrixFile, _) = input::read_json(path)?;
        let side = match m.side.as_str() {
            "L" => Side::L,
            "M" => Side::M,
            s => return Err(format!("side must be \"L\" or \"M\", got {s:?}")),
        };
        let entries = m.entries.each_ref().map(|row| row.each_ref().map(|t| MPoly::from_json(t)));
        let mut polys: Vec<MPoly> = Vec::new();
        for row in entries {
            for p in row {
                polys.push(p.map_err(|e| e.to_string())?);
            }
        }
        let eval = |w: &Q, p: &Q, lam: &Q| -> Mat {
            let at = [w.clone(), p.clone(), lam.clone(), Q::from_integer(0.into())];
            let e = |k: usize| polys[k].eval(&at);
            [[e(0), e(1)], [e(2), e(3)]]
        };
        let r = run(check_lax_with(side, eval, &f, &a, &b, samples, seed))?;
        out.push(lax_report(format!("lax/{}/custom", fam.family), &format!("lax {desc} matrix {text}"), &r, true));
        return Ok(out);
    }
    if fam.family == Family::FV {
        let r = run(check_lax(LaxFamily::FvNormalized, &f, &a, &b, samples, seed))?;
        out.push(lax_report("lax/FV/normalized".into(), &format!("lax normalized {desc}"), &r, true));
    }
    for (side, name) in [(Side::L, "L"), (Side::M, "M")] {
        let r = run(check_lax(LaxFamily::Catalog(fam.family, side), &f, &a, &b, samples, seed))?;
        out.push(lax_report(format!("lax/{}/{name}", fam.family), &format!("lax {name} {desc}"), &r, false));
    }
    Ok(out)
}

// ---- geometry

fn incidence_result(ps: &[Q; 3], pts: &[PlanePoint; 3], rep: &quadrirational::geometry::IncidenceReport) -> Value {
    json!({
        "params": ps.iter().map(fmt_q).collect::<Vec<_>>(),
        "points": pts.iter().map(PlanePoint::to_json).collect::<Vec<_>>(),
        "constructed": rep.constructed.iter().map(PlanePoint::to_json).collect::<Vec<_>>(),
        "x23": rep.x23.to_json(),
        "y13": rep.y13.to_json(),
        "z12": rep.z12.to_json(),
    })
}

pub fn incidence(ty: PencilArg, params: Option<&str>, points: Option<&[String]>, count: usize, seed: u64) -> Res<Vec<Report>> {
    let ty = pencil_type(ty);
    let claim = format!("geometry/incidence/{ty:?}");
    let fixed = params.map(triple).transpose()?;
    if let Some(pts) = points {
        let ps = fixed.ok_or("--points needs --params")?;
        if pts.len() != 3 {
            return Err(format!("--points takes 3 points, got {}", pts.len()));
        }
        let pts: [PlanePoint; 3] = [affine_point(&pts[0])?, affine_point(&pts[1])?, affine_point(&pts[2])?];
        let pen = ty.pencil();
        for (a, p) in ps.iter().zip(&pts) {
            if !pen.member(a).contains(p) {
                return Err(format!("point {p} is not on the conic with parameter {}", fmt_q(a)));
            }
        }
        let rep = check_pencil_incidence(&pen, [&ps[0], &ps[1], &ps[2]], &pts[0], &pts[1], &pts[2]).map_err(|e| e.to_string())?;
        let input = format!("incidence type={ty:?} params={} points={}", join(&ps), pts.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(";"));
        let res = incidence_result(&ps, &pts, &rep);
        let r = Report::new(claim, &input, "exact", 1);
        return Ok(vec![if rep.holds { r.with_result(res) } else { r.fail(res) }]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut done, mut tried) = (0, 0);
    let input = format!("incidence type={ty:?} params={} count={count} seed={seed}", fixed.as_ref().map_or("random".into(), |p| join(p)));
    while done < count {
        tried += 1;
        if tried > 50 * count.max(1) {
            return Err(format!("only {done} usable configurations in {tried} draws"));
        }
        let case = match &fixed {
            Some(ps) => {
                let slopes: Vec<P1<Q>> = (0..3).map(|_| P1::finite(random_rational(&mut rng))).collect();
                let pts = ps.iter().zip(&slopes).map(|(a, s)| parametrize(ty, a, s).ok()).collect::<Option<Vec<_>>>();
                pts.map(|p| (ty.pencil(), ps.clone(), [p[0].clone(), p[1].clone(), p[2].clone()]))
            }
            None => random_incidence_case(ty, &mut rng),
        };
        let Some((pen, ps, pts)) = case else { continue };
        let pen: ConicPencil = pen;
        match check_pencil_incidence(&pen, [&ps[0], &ps[1], &ps[2]], &pts[0], &pts[1], &pts[2]) {
            Ok(rep) if rep.holds => done += 1,
            Ok(rep) => {
                let mut ce = incidence_result(&ps, &pts, &rep);
                ce["pencil"] = json!([conic_json(&pen.first), conic_json(&pen.second)]);
                return Ok(vec![Report::new(claim, &input, "random", done + 1).fail(ce)]);
            }
            Err(GeometryError::DegeneratePosition(_)) => {}
            Err(e) => return Err(e.to_string()),
        }
    }
    Ok(vec![Report::new(claim, &input, "random", done).with_result(json!({ "draws": tried }))])
}

fn conic_json(c: &quadrirational::geometry::Conic) -> Value {
    json!(c.matrix().iter().map(|r| r.iter().map(fmt_q).collect::<Vec<_>>()).collect::<Vec<_>>())
}

pub fn conic_map(ty: PencilArg, alpha: &str, beta: &str, x: &str, y: &str) -> Res<Vec<Report>> {
    let ty = pencil_type(ty);
    let (a, b) = (rational(alpha)?, rational(beta)?);
    let (xp, yp) = (affine_point(x)?, affine_point(y)?);
    let pen = ty.pencil();
    let (q1, q2) = (pen.member(&a), pen.member(&b));
    let (u, v) = plane_conic_map(&q1, &q2, &xp, &yp).map_err(|e| e.to_string())?;
    let input = format!("conic-map type={ty:?} alpha={} beta={} x={xp} y={yp}", fmt_q(&a), fmt_q(&b));
    Ok(vec![Report::new(format!("geometry/map/{ty:?}"), &input, "exact", 1).with_result(json!({ "U": u.to_json(), "V": v.to_json() }))])
}

pub fn svg(out: &Path, ty: PencilArg, alpha: &str, beta: &str, x: &str, y: &str) -> Res<Vec<Report>> {
    let ty = pencil_type(ty);
    let (a, b, xv, yv) = (rational(alpha)?, rational(beta)?, rational(x)?, rational(y)?);
    let body = svg_demo(ty, &a, &b, &xv, &yv).map_err(|e| e.to_string())?;
    input::write(out, &body)?;
    let input = format!("svg type={ty:?} alpha={} beta={} x={} y={}", fmt_q(&a), fmt_q(&b), fmt_q(&xv), fmt_q(&yv));
    Ok(vec![Report::new(format!("geometry/svg/{ty:?}"), &input, "exact", 0).with_result(json!({ "out": out.display().to_string() }))])
}

// ---- blow

pub fn blow_down(fam: &FamilyArgs, seed: u64) -> Res<Vec<Report>> {
    let (f, _, _) = family_map(fam)?;
    let curves = exceptional_curves(&f).map_err(|e| e.to_string())?;
    let (_, sing) = singularities_of_map(&f).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut listed = Vec::new();
    let mut samples = 0;
    let input = format!("blow-down {} seed={seed}", describe_family(fam)?);
    let claim = format!("blow-down/{}", fam.family);
    for c in &curves {
        let m = &sing[c.singularity];
        if let Some(xy) = c.curve.x_of_y() {
            let (mut hits, mut tries) = (0, 0);
            while hits < 10 && tries < 200 {
                tries += 1;
                let y = P1::finite(random_rational(&mut rng));
                let x = xy.apply(&y);
                let Ok(img) = f.eval(&x, &y) else { continue };
                if img != c.target {
                    let ce = json!({ "curve": c.curve.to_string(), "x": p1_json(&x), "y": p1_json(&y), "image": [p1_json(&img.0), p1_json(&img.1)], "target": [p1_json(&c.target.0), p1_json(&c.target.1)] });
                    return Ok(vec![Report::new(claim, &input, "random", samples + 1).fail(ce)]);
                }
                hits += 1;
                samples += 1;
            }
        }
        listed.push(json!({
            "singularity": [p1_json(m.x.base()), p1_json(m.y.base())],
            "multiplicity": m.multiplicity,
            "curve": c.curve.to_string(),
            "coefficients": c.curve.to_json(),
            "target": [p1_json(&c.target.0), p1_json(&c.target.1)],
        }));
    }
    Ok(vec![Report::new(claim, &input, "random", samples).with_result(json!({ "curves": listed }))])
}

pub fn blow_up(fam: &FamilyArgs, slope: Option<&str>, point: Option<usize>) -> Res<Vec<Report>> {
    let (f, _, _) = family_map(fam)?;
    let (_, sing) = singularities_of_map(&f).map_err(|e| e.to_string())?;
    let dir = slope.map(direction).transpose()?;
    let indices: Vec<usize> = match point {
        Some(i) if i < sing.len() => vec![i],
        Some(i) => return Err(format!("no singular point {i}; the map has {}", sing.len())),
        None => (0..sing.len()).collect(),
    };
    let dirs: Vec<(Q, Q)> = match &dir {
        Some(d) => vec![d.clone()],
        None => [(1, 0), (0, 1), (1, 1), (1, 2), (2, -3)].iter().map(|&(p, q)| (Q::from_integer(p.into()), Q::from_integer(q.into()))).collect(),
    };
    let desc = describe_family(fam)?;
    let mut out = Vec::new();
    for i in indices {
        let m = &sing[i];
        let at = json!([p1_json(m.x.base()), p1_json(m.y.base())]);
        let input = format!("blow-up {desc} point={i} slope={}", slope.unwrap_or("default"));
        let claim = format!("blow-up/{}/{i}", fam.family);
        if m.multiplicity != 1 {
            out.push(Report::new(claim, &input, "exact", 0).not_applicable(&format!("point {at} has multiplicity {}, the limit depends on a longer germ", m.multiplicity)));
            continue;
        }
        let d = blowup_curve_equation(&f, i).map_err(|e| e.to_string())?;
        let mut limits = Vec::new();
        let mut bad = None;
        for (p, q) in &dirs {
            let gx = ArcGerm::new(m.x.base().clone(), vec![p.clone()]);
            let gy = ArcGerm::new(m.y.base().clone(), vec![q.clone()]);
            let (u, v) = blowup_limit(&f, i, (&gx, &gy)).map_err(|e| e.to_string())?;
            let entry = json!({ "direction": [fmt_q(p), fmt_q(q)], "limit": [p1_json(&u), p1_json(&v)] });
            if !d.contains(&u, &v) && bad.is_none() {
                bad = Some(entry.clone());
            }
            limits.push(entry);
        }
        let res = json!({ "singularity": at, "curve": d.equation("u", "v"), "coefficients": d.to_json(), "limits": limits });
        let r = Report::new(claim, &input, "exact", dirs.len());
        out.push(match bad {
            None => r.with_result(res),
            Some(b) => r.fail(json!({ "off-curve": b, "curve": d.equation("u", "v") })),
        });
    }
    Ok(out)
}

// ---- multifield

fn strings(v: &[Q]) -> Vec<String> {
    v.iter().map(fmt_q).collect()
}

fn matrix_strings(m: &Matrix) -> Vec<Vec<String>> {
    m.iter().map(|r| strings(r)).collect()
}

pub fn multifield(n: usize, seed: u64, count: usize) -> Res<Vec<Report>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let input = format!("multifield n={n} seed={seed} count={count}");
    let claim = format!("multifield/3d/n={n}");
    let (mut done, mut tried) = (0, 0);
    while done < count {
        tried += 1;
        if tried > 50 * count.max(1) {
            return Err(format!("only {done} usable instances in {tried} draws"));
        }
        let p = random_affine_pencil(n, &mut rng);
        let a: [Q; 3] = std::array::from_fn(|_| random_rational(&mut rng));
        let pts: Vec<Vec<Q>> = (0..3).map(|_| (0..n).map(|_| random_rational(&mut rng)).collect()).collect();
        let f = |al: &Q, be: &Q, x: &Vec<Q>, y: &Vec<Q>| multifield_map(&p, al, be, x, y);
        let Ok(c) = cube_check(f, [&a[0], &a[1], &a[2]], &pts[0], &pts[1], &pts[2]) else { continue };
        let derived: Vec<&[Q]> = c.first.iter().chain(&c.x23).chain(&c.y13).chain(&c.z12).map(|v| v.as_slice()).collect();
        let planar = coplanar(&pts[0], &pts[1], &pts[2], &derived);
        if !c.consistent || !planar {
            let ce = json!({
                "S": matrix_strings(&p.s_mat), "T": matrix_strings(&p.t_mat), "s": strings(&p.s), "sigma": fmt_q(&p.sigma),
                "params": strings(&a), "points": pts.iter().map(|v| strings(v)).collect::<Vec<_>>(),
                "consistent": c.consistent, "coplanar": planar,
            });
            return Ok(vec![Report::new(claim, &input, "random", done + 1).fail(ce)]);
        }
        done += 1;
    }
    Ok(vec![Report::new(claim, &input, "random", done).with_result(json!({ "draws": tried }))])
}

pub fn matrix_map(size: usize, seed: u64, count: usize) -> Res<Vec<Report>> {
    if size == 0 {
        return Err("--size must be positive".into());
    }
    let mut out = Vec::new();
    for (conv, name) in [(InverseConvention::Matrix, "matrix-inverse"), (InverseConvention::Vector, "vector-inverse")] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let input = format!("matrix-map size={size} convention={name} seed={seed} count={count}");
        let claim = format!("multifield/matrix/{name}");
        let (mut done, mut tried) = (0, 0);
        let mut failed = None;
        while done < count {
            tried += 1;
            if tried > 50 * count.max(1) {
                return Err(format!("only {done} usable instances in {tried} draws"));
            }
            let mut rm = || -> Matrix { (0..size).map(|_| (0..size).map(|_| random_rational(&mut rng)).collect()).collect() };
            let (x, y, z) = (rm(), rm(), rm());
            let a: [Q; 3] = std::array::from_fn(|_| random_rational(&mut rng));
            let f = |al: &Q, be: &Q, p: &Matrix, q: &Matrix| plane_matrix_map(al, be, p, q, conv);
            let Ok(c) = cube_check(f, [&a[0], &a[1], &a[2]], &x, &y, &z) else { continue };
            if !c.consistent {
                failed = Some(json!({ "params": strings(&a), "X": matrix_strings(&x), "Y": matrix_strings(&y), "Z": matrix_strings(&z) }));
                break;
            }
            done += 1;
        }
        let r = Report::new(claim, &input, "random", done);
        out.push(match failed {
            Some(ce) => r.fail(ce),
            None => r.with_result(json!({ "convention": name, "draws": tried })),
        });
    }
    Ok(out)
}
