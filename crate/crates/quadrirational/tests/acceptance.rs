//! One line per acceptance criterion. Run with `--nocapture` to see the table.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use quadrirational::bimoebius::{BiMoebiusMap, Poly, Subclass};
use quadrirational::blow::{blowup_curve_equation, blowup_limit, exceptional_curves, ArcGerm};
use quadrirational::catalog::{family, make, mixed_cube, Family, F_FAMILIES};
use quadrirational::consistency::{check_3d_consistent, check_yang_baxter, composition_is_identity, maps_equal, CubeAssignment, IdentityTestConfig};
use quadrirational::exactnum::{fmt_q, qf, qi, Q};
use quadrirational::geometry::{
    check_pencil_incidence, conic_map, coplanar, cube_check, matrix_map, multifield_map, pullback_matches_family, random_affine_pencil,
    random_incidence_case, ConicPencil, GeometryError, InverseConvention, Matrix, PencilType, PlanePoint,
};
use quadrirational::lax::{check_lax, mat_mul, LaxFamily, LaxVerdict, Side};
use quadrirational::projline::{Jet, Moebius, P1};
use quadrirational::singularity::{
    canonicalize_map, degeneration_check, invariant_q, parameters_equivalent, singularities_of_map, Degeneration, MapType, SingularityData,
};

type Outcome = Result<String, String>;

fn exact() -> IdentityTestConfig {
    IdentityTestConfig::exact()
}

fn rq(rng: &mut ChaCha8Rng) -> Q {
    Q::new(rng.gen_range(-30i64..=30).into(), rng.gen_range(1i64..=7).into())
}

fn fin(v: Q) -> P1<Q> {
    P1::finite(v)
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_moebius(rng: &mut ChaCha8Rng) -> Moebius<Q> {
    loop {
        let e: [i64; 4] = std::array::from_fn(|_| rng.gen_range(-4..=4));
        if let Ok(m) = Moebius::new(qi(e[0]), qi(e[1]), qi(e[2]), qi(e[3])) {
            return m;
        }
    }
}

/// A random pair (α, β) for which F_T(α, β) is a valid map.
fn random_params(fam: Family, rng: &mut ChaCha8Rng) -> (Q, Q, BiMoebiusMap) {
    loop {
        let (a, b) = (rq(rng), rq(rng));
        if a == b {
            continue;
        }
        if let Ok(f) = family(fam, &a, &b) {
            return (a, b, f);
        }
    }
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut slowest = 0f64;
    for fam in F_FAMILIES {
        let t = Instant::now();
        for _ in 0..5 {
            let (a, b, f) = random_params(fam, &mut rng);
            let at = || format!("{fam}({}, {})", fmt_q(&a), fmt_q(&b));
            check(composition_is_identity(&f, &f, &exact()).map_err(|e| e.to_string())?.holds, || format!("{} is not an involution", at()))?;
            let c = f.companion().map_err(|e| e.to_string())?;
            check(maps_equal(&c, &f, &exact()).map_err(|e| e.to_string())?.holds, || format!("{} is not its own companion", at()))?;
        }
        slowest = slowest.max(t.elapsed().as_secs_f64());
    }
    Ok(format!("5 families x 5 parameter pairs, exact grid; slowest family {slowest:.2}s"))
}

/// (1, 2, 5) and two random triples. F_I is undefined at α = 1 (the parameter
/// coincides with the fixed singular point 1), so for F_I the first triple is
/// replaced by (3, 2, 5).
fn triples(fam: Family, rng: &mut ChaCha8Rng) -> Vec<[Q; 3]> {
    let first = if fam == Family::FI { [qi(3), qi(2), qi(5)] } else { [qi(1), qi(2), qi(5)] };
    let mut out = vec![first];
    while out.len() < 3 {
        let t = [rq(rng), rq(rng), rq(rng)];
        let ok = (0..3).all(|i| (0..i).all(|j| t[i] != t[j])) && [(0, 1), (0, 2), (1, 2)].iter().all(|&(i, j)| family(fam, &t[i], &t[j]).is_ok());
        if ok {
            out.push(t);
        }
    }
    out
}

fn edge_maps(fam: Family, t: &[Q; 3]) -> [BiMoebiusMap; 3] {
    [family(fam, &t[0], &t[1]).unwrap(), family(fam, &t[0], &t[2]).unwrap(), family(fam, &t[1], &t[2]).unwrap()]
}

fn fi_at_one_is_degenerate() -> bool {
    family(Family::FI, &qi(1), &qi(2)).is_err()
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut slowest = 0f64;
    for fam in F_FAMILIES {
        let t0 = Instant::now();
        for t in triples(fam, &mut rng) {
            let [a, b, c] = edge_maps(fam, &t);
            let v = check_yang_baxter(&a, &b, &c, &exact()).map_err(|e| e.to_string())?;
            check(v.holds, || format!("{fam} at {:?}: {:?}", t.iter().map(fmt_q).collect::<Vec<_>>(), v.counterexample))?;
        }
        slowest = slowest.max(t0.elapsed().as_secs_f64());
    }
    check(fi_at_one_is_degenerate(), || "F_I(1, 2) unexpectedly valid".into())?;
    Ok(format!("3 triples per family, exact grid; slowest family {slowest:.2}s; F_I(1, .) is degenerate, F_I uses (3,2,5) in place of (1,2,5)"))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut slowest = 0f64;
    for fam in F_FAMILIES {
        let t0 = Instant::now();
        for t in triples(fam, &mut rng) {
            let [a, b, c] = edge_maps(fam, &t);
            let v = check_3d_consistent(&CubeAssignment::uniform(a, b, c), &exact()).map_err(|e| e.to_string())?;
            check(v.holds, || format!("{fam} at {:?}", t.iter().map(fmt_q).collect::<Vec<_>>()))?;
        }
        slowest = slowest.max(t0.elapsed().as_secs_f64());
    }
    Ok(format!("same triples as criterion 2, exact grid; slowest family {slowest:.2}s"))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut exact_params = 0;
    for fam in F_FAMILIES {
        let (a, b, f) = random_params(fam, &mut rng);
        let direct = canonicalize_map(&f).map_err(|e| format!("{fam}: {e}"))?;
        for _ in 0..3 {
            let ms: [Moebius<Q>; 4] = std::array::from_fn(|_| random_moebius(&mut rng));
            let g = f.conjugate(&ms[0], &ms[1], &ms[2], &ms[3]).map_err(|e| e.to_string())?;
            let c = canonicalize_map(&g).map_err(|e| format!("{fam}: {e}"))?;
            check(c.ty.family() == fam, || format!("{fam}: classified as {}", c.ty))?;
            check(parameters_equivalent(c.ty, (&a, &b), (&c.alpha, &c.beta)), || format!("{fam}: parameters not equivalent"))?;
            check((&c.alpha, &c.beta) == (&direct.alpha, &direct.beta), || format!("{fam}: representative depends on the conjugation"))?;
            exact_params += 1;
            let back = g.conjugate(&c.change[0], &c.change[1], &c.change[2], &c.change[3]).map_err(|e| e.to_string())?;
            let target = family(fam, &c.alpha, &c.beta).map_err(|e| e.to_string())?;
            check(maps_equal(&back, &target, &exact()).map_err(|e| e.to_string())?.holds, || format!("{fam}: change does not normalize"))?;
        }
    }
    Ok(format!(
        "15 conjugated maps: type exact, parameters equal to the class representative of the unconjugated map ({exact_params}/15), normalizing change verified on an exact grid"
    ))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let (a, b, f) = random_params(Family::FV, &mut rng);
        let (ty, ms) = singularities_of_map(&f).map_err(|e| e.to_string())?;
        check(ty == MapType::V && ms.len() == 1, || format!("type {ty}, {} matches", ms.len()))?;
        let m = &ms[0];
        let kappa = qi(4) * (&a - &b);
        check(m.lambda == Some(qi(1)) && m.tau == Some(qi(0)) && m.kappa == Some(kappa.clone()), || {
            format!("F_V({}, {}): λ {:?} τ {:?} κ {:?}", fmt_q(&a), fmt_q(&b), m.lambda, m.tau, m.kappa)
        })?;
    }
    Ok("5 random (α, β): one match, λ = 1, τ = 0, κ = 4(α - β)".into())
}

/// Canonical data with distinct base points; for type I this excludes α ∈ {0, 1}.
fn regular_canonical(ty: MapType, rng: &mut ChaCha8Rng, rejected: &mut usize) -> (Q, SingularityData) {
    loop {
        let a = rq(rng);
        let d = SingularityData::canonical(ty, &a);
        if d.distinct_bases() {
            return (a, d);
        }
        *rejected += 1;
    }
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut rejected = 0;
    for ty in MapType::ALL {
        for _ in 0..10 {
            let (a, d) = regular_canonical(ty, &mut rng, &mut rejected);
            check(invariant_q(&d).map_err(|e| e.to_string())? == a, || format!("q_{ty}(C({})) differs", fmt_q(&a)))?;
        }
        let (_, d) = regular_canonical(ty, &mut rng, &mut rejected);
        let q0 = invariant_q(&d).map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let m = random_moebius(&mut rng);
            check(invariant_q(&d.pushforward(&m)).map_err(|e| e.to_string())? == q0, || format!("q_{ty} changed under {m}"))?;
        }
    }
    Ok(format!("5 types x 10 values of α; 5 x 100 pushforwards; {rejected} draws with coincident base points skipped"))
}

fn jet(b: i64, d: &[i64]) -> Jet {
    Jet::new(fin(qi(b)), d.iter().map(|&v| qi(v)).collect()).unwrap()
}

fn criterion_7() -> Outcome {
    let cases = [
        (Degeneration::IToII, SingularityData::new(MapType::II, vec![jet(0, &[]), jet(1, &[]), jet(2, &[1])]).unwrap()),
        (Degeneration::IIToIII, SingularityData::new(MapType::III, vec![jet(0, &[2]), jet(3, &[1])]).unwrap()),
        (Degeneration::IIToIV, SingularityData::new(MapType::IV, vec![jet(-1, &[]), jet(2, &[3, 5])]).unwrap()),
        (Degeneration::IVToV, SingularityData::new(MapType::V, vec![jet(1, &[2, 3, 7])]).unwrap()),
    ];
    let (e1, e2) = (qf(1, 100), qf(1, 1000));
    let mut notes = Vec::new();
    for (k, d) in cases {
        let v1 = degeneration_check(k, &d, &e1).map_err(|e| e.to_string())?;
        let v2 = degeneration_check(k, &d, &e2).map_err(|e| e.to_string())?;
        let ratio = |a: Q, b: Q| if b == qi(0) { None } else { Some(num_traits::Signed::abs(&(a / b))) };
        let corrected = ratio(v1.lhs.clone() - v1.corrected, v2.lhs.clone() - v2.corrected);
        let stated = ratio(v1.lhs - v1.stated, v2.lhs - v2.stated);
        let f = |r: &Option<Q>| r.as_ref().map_or("exact".to_string(), |r| format!("{:.1}", num_traits::ToPrimitive::to_f64(r).unwrap()));
        // an O(ε²) remainder shrinks by 100 between the two ε; allow a factor 2 for the ε³ term
        check(corrected.as_ref().is_none_or(|r| *r >= qi(50)), || format!("{k:?}: error ratio {}", f(&corrected)))?;
        notes.push(format!("{k:?} ratio {} (stated leading term {})", f(&corrected), f(&stated)));
    }
    Ok(notes.join("; "))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for ty in [PencilType::I, PencilType::V] {
        let mut done = 0;
        while done < 20 {
            let Some((pen, ps, pts)) = random_incidence_case(ty, &mut rng) else { continue };
            match check_pencil_incidence(&pen, [&ps[0], &ps[1], &ps[2]], &pts[0], &pts[1], &pts[2]) {
                Ok(rep) => {
                    check(rep.holds, || format!("{ty:?} incidence fails"))?;
                    done += 1;
                }
                Err(GeometryError::DegeneratePosition(_)) => {}
                Err(e) => return Err(e.to_string()),
            }
        }
    }
    let pen = ConicPencil::type_v();
    let (u, v) = conic_map(&pen.member(&qi(3)), &pen.member(&qi(1)), &PlanePoint::affine(qi(2), qi(7)), &PlanePoint::affine(qi(1), qi(2)))
        .map_err(|e| e.to_string())?;
    check(u == PlanePoint::affine(qi(3), qi(12)) && v == PlanePoint::affine(qi(4), qi(17)), || format!("worked instance gives {u}, {v}"))?;
    Ok("20 + 20 random projective pencils; worked type V instance gives U = (3,12), V = (4,17)".into())
}

fn criterion_9() -> Outcome {
    let pairs = [(qi(2), qi(3)), (qf(-1, 2), qi(5)), (qi(7), qf(3, 4))];
    for ty in [PencilType::I, PencilType::V] {
        for (a, b) in &pairs {
            check(pullback_matches_family(ty, a, b).map_err(|e| e.to_string())?, || format!("{ty:?} at ({}, {})", fmt_q(a), fmt_q(b)))?;
        }
    }
    Ok("types I and V, 3 parameter pairs each, identity proved on a degree-bounded grid".into())
}

fn criterion_10() -> Outcome {
    let (a, b) = (qi(3), qi(1));
    let f = family(Family::FV, &a, &b).unwrap();
    let r = check_lax(LaxFamily::FvNormalized, &f, &a, &b, 200, 10).map_err(|e| e.to_string())?;
    check(r.verdict == LaxVerdict::Exact && r.samples == 200, || format!("F_V matrix: {:?}", r.verdict))?;
    let l = LaxFamily::FvNormalized;
    let lam = qi(0);
    let (u, v) = f.eval(&fin(qi(2)), &fin(qi(1))).map_err(|e| e.to_string())?;
    let lhs = mat_mul(&l.eval(&qi(2), &a, &lam), &l.eval(&qi(1), &b, &lam));
    let rhs = mat_mul(&l.eval(v.value().unwrap(), &b, &lam), &l.eval(u.value().unwrap(), &a, &lam));
    let expect = [[qi(-5), qi(3)], [qi(-1), qi(0)]];
    check(lhs == expect && rhs == expect, || format!("worked instance {lhs:?} vs {rhs:?}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for fam in F_FAMILIES {
        let (a, b, f) = random_params(fam, &mut rng);
        for side in [Side::L, Side::M] {
            let r = check_lax(LaxFamily::Catalog(fam, side), &f, &a, &b, 50, 11).map_err(|e| e.to_string())?;
            check(r.verdict >= LaxVerdict::Projective, || format!("{fam} {side:?} fails"))?;
        }
    }
    Ok("F_V matrix exact at 200 samples and at (2,1,3,1,0); extracted L and M projective for all five families".into())
}

fn criterion_11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [2usize, 3] {
        let mut done = 0;
        while done < 50 {
            let p = random_affine_pencil(n, &mut rng);
            let a = [rq(&mut rng), rq(&mut rng), rq(&mut rng)];
            let pts: Vec<Vec<Q>> = (0..3).map(|_| (0..n).map(|_| rq(&mut rng)).collect()).collect();
            let f = |al: &Q, be: &Q, x: &Vec<Q>, y: &Vec<Q>| multifield_map(&p, al, be, x, y);
            let Ok(c) = cube_check(f, [&a[0], &a[1], &a[2]], &pts[0], &pts[1], &pts[2]) else { continue };
            check(c.consistent, || format!("n = {n} inconsistent"))?;
            let derived: Vec<&[Q]> = c.first.iter().chain(&c.x23).chain(&c.y13).chain(&c.z12).map(|v| v.as_slice()).collect();
            check(coplanar(&pts[0], &pts[1], &pts[2], &derived), || format!("n = {n} not coplanar"))?;
            done += 1;
        }
    }
    let mut passing = Vec::new();
    for conv in [InverseConvention::Matrix, InverseConvention::Vector] {
        let mut done = 0;
        let mut ok = true;
        while done < 20 {
            let mut rm = || -> Matrix { (0..2).map(|_| (0..2).map(|_| rq(&mut rng)).collect()).collect() };
            let (x, y, z) = (rm(), rm(), rm());
            let a = [rq(&mut rng), rq(&mut rng), rq(&mut rng)];
            let f = |al: &Q, be: &Q, p: &Matrix, q: &Matrix| matrix_map(al, be, p, q, conv);
            let Ok(c) = cube_check(f, [&a[0], &a[1], &a[2]], &x, &y, &z) else { continue };
            ok &= c.consistent;
            done += 1;
        }
        if ok {
            passing.push(format!("{conv:?}"));
        }
    }
    check(!passing.is_empty(), || "matrix map fails under both conventions".into())?;
    Ok(format!("free-point map n = 2, 3 (50 each, coplanar); 2x2 matrix map passes under: {}", passing.join(", ")))
}

fn criterion_12() -> Outcome {
    let f = family(Family::FI, &qi(2), &qi(3)).unwrap();
    let curves = exceptional_curves(&f).map_err(|e| e.to_string())?;
    let diag = curves.iter().find(|c| c.curve.to_string() == "x-y=0").ok_or("no diagonal curve")?;
    check(diag.target == (fin(qi(2)), fin(qi(3))), || format!("diagonal target {:?}", diag.target))?;
    let (_, s) = singularities_of_map(&f).map_err(|e| e.to_string())?;
    let i = s.iter().position(|m| m.x.base() == &fin(qi(0)) && m.y.base() == &fin(qi(0))).ok_or("(0,0) is not singular")?;
    let germ = (ArcGerm::new(fin(qi(0)), vec![qi(1)]), ArcGerm::new(fin(qi(0)), vec![qi(2)]));
    let (u, v) = blowup_limit(&f, i, (&germ.0, &germ.1)).map_err(|e| e.to_string())?;
    check((u.clone(), v.clone()) == (fin(qf(4, 5)), fin(qf(3, 5))), || format!("limit ({u}, {v})"))?;
    let d = blowup_curve_equation(&f, i).map_err(|e| e.to_string())?;
    check(d.contains(&u, &v), || format!("limit off the curve {}", d.equation("u", "v")))?;
    let counts: Vec<usize> =
        F_FAMILIES.iter().map(|&fam| exceptional_curves(&family(fam, &qi(2), &qi(3)).unwrap()).map(|c| c.len())).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    check(counts == [4, 3, 2, 2, 1], || format!("counts {counts:?}"))?;
    Ok(format!("x-y=0 -> (2,3); limit along (1,2) at (0,0) is (4/5,3/5) on {}; counts {counts:?}", d.equation("u", "v")))
}

fn criterion_13() -> Outcome {
    let g = family(Family::G12, &qi(2), &qi(3)).unwrap();
    check(g.is_quadrirational() && g.subclass() == Subclass::OneTwo, || format!("G12 subclass {}", g.subclass()))?;
    let one = make(Family::OneOne, None).map_err(|e| e.to_string())?;
    // (x, v) -> (u, y) with u = xv/(1 - x + xv), y = 1 - x + xv
    let p = |c: &[i64]| Poly::new(c.iter().map(|&v| qi(v)).collect());
    let stated = BiMoebiusMap::new([p(&[0, 1]), p(&[]), p(&[-1, 1]), p(&[1])], [p(&[0, 1]), p(&[1, -1]), p(&[]), p(&[1])]).map_err(|e| e.to_string())?;
    let comp = one.companion_inv().map_err(|e| e.to_string())?;
    check(maps_equal(&comp, &stated, &exact()).map_err(|e| e.to_string())?.holds, || "[1:1] companion differs".into())?;
    let cube = mixed_cube(&qi(2), &qi(3), &qi(5)).map_err(|e| e.to_string())?;
    check(check_3d_consistent(&cube, &exact()).map_err(|e| e.to_string())?.holds, || "mixed cube inconsistent".into())?;
    Ok("G12 [1:2] and quadrirational; [1:1] companion equals the stated map; mixed cube at (2,3,5) consistent on an exact grid".into())
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("involutivity and self-companionship", criterion_1),
        ("Yang-Baxter equation", criterion_2),
        ("3D consistency", criterion_3),
        ("classification round trip", criterion_4),
        ("type V singularity parameters", criterion_5),
        ("invariants q_T", criterion_6),
        ("degenerations to first order", criterion_7),
        ("pencil incidence", criterion_8),
        ("conic map equals the normal forms", criterion_9),
        ("Lax representations", criterion_10),
        ("multifield and matrix maps", criterion_11),
        ("blow-down and blow-up", criterion_12),
        ("[1:2] and [1:1] maps, mixed cube", criterion_13),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = f();
        let secs = t.elapsed().as_secs_f64();
        match &r {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                println!("criterion {:>2} FAIL  {name} ({secs:.1}s): {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
