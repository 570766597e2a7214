use quadrirational::bimoebius::{BiMoebiusMap, Subclass};
use quadrirational::catalog::{family, mixed_cube, Family};
use quadrirational::consistency::{check_3d_consistent, CubeAssignment, IdentityTestConfig};
use quadrirational::exactnum::qi;

// 0: as stated, 1: x<->y and u<->v swapped, 2: inverse, 3: swapped inverse
fn variant(f: &BiMoebiusMap, k: usize) -> Option<BiMoebiusMap> {
    match k {
        0 => Some(f.clone()),
        1 => Some(f.transpose()),
        2 => f.inverse().ok(),
        _ => f.inverse().ok().map(|g| g.transpose()),
    }
}

#[test]
fn frozen_assignment_is_consistent() {
    let cube = mixed_cube(&qi(2), &qi(3), &qi(5)).unwrap();
    assert!(check_3d_consistent(&cube, &IdentityTestConfig::exact()).unwrap().holds);
    assert_eq!(cube.f12[0].subclass(), Subclass::OneTwo);
    assert_eq!(cube.f23[0].subclass(), Subclass::TwoTwo);
}

#[test]
fn orientation_search_finds_the_stated_assignment() {
    let (a, b, c) = (qi(2), qi(3), qi(5));
    let g12 = family(Family::Ghat12, &a, &b).unwrap();
    let g13 = family(Family::Ghat12, &a, &c).unwrap();
    let left = family(Family::Fhat22, &b, &c).unwrap();
    let right = family(Family::Fhat22, &(&b / &a), &(&c / &a)).unwrap();
    let mut passing = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                let (Some(p), Some(q), Some(l), Some(r)) = (variant(&g12, i), variant(&g13, j), variant(&left, k), variant(&right, k)) else {
                    continue;
                };
                let cube = CubeAssignment { f12: [p.clone(), p], f13: [q.clone(), q], f23: [l, r] };
                if check_3d_consistent(&cube, &IdentityTestConfig::random(1)).unwrap().holds {
                    passing.push((i, j, k));
                }
            }
        }
    }
    // F̂ is an involution, so its inverse passes as well
    assert_eq!(passing, vec![(0, 0, 0), (0, 0, 2)]);
}

#[test]
fn other_parameters() {
    for (a, b, c) in [(qi(3), qi(-2), qi(7)), (qi(-5), qi(4), qi(6))] {
        let cube = mixed_cube(&a, &b, &c).unwrap();
        assert!(check_3d_consistent(&cube, &IdentityTestConfig::exact()).unwrap().holds);
    }
}
