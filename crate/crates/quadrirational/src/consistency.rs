//! Identity testing for compositions of bi-Möbius maps, and the Yang-Baxter and
//! 3D consistency checkers built on it.
//!
//! Compositions are evaluated homogeneously without any division, so every
//! output coordinate is a polynomial in the affine input coordinates with a
//! per-variable degree we track exactly. Two outputs (n1:d1), (n2:d2) agree as
//! rational maps iff n1 d2 - n2 d1 vanishes identically, and a polynomial of
//! degree <= D_i in variable i vanishing on a product grid of D_i + 1 points
//! per variable is zero. Grid points where an output is (0:0) still count
//! toward the proof; they are reported as singular.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bimoebius::BiMoebiusMap;
use crate::exactnum::{fmt_q, Field, Fp, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Random,
    ExactGrid,
}

#[derive(Debug, Clone)]
pub struct IdentityTestConfig {
    pub mode: Mode,
    /// Nonsingular samples required in random mode.
    pub trials: usize,
    /// Cap on the per-variable degree of the tested identities (exact mode).
    pub max_degree: u32,
    pub seed: u64,
}

impl Default for IdentityTestConfig {
    fn default() -> Self {
        IdentityTestConfig { mode: Mode::Random, trials: 256, max_degree: 100, seed: 0 }
    }
}

impl IdentityTestConfig {
    pub fn exact() -> Self {
        IdentityTestConfig { mode: Mode::ExactGrid, ..Default::default() }
    }

    pub fn random(seed: u64) -> Self {
        IdentityTestConfig { seed, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConsistencyError {
    #[error("only {good} nonsingular samples out of {tried}")]
    InsufficientSamples { good: usize, tried: usize },
    #[error("identity has degree {needed} in one variable, above the configured bound {bound}")]
    DegreeBoundExceeded { needed: u32, bound: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub inputs: Vec<String>,
    pub left: Vec<String>,
    pub right: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    pub mode: Mode,
    pub samples: usize,
    pub singular: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

/// Applies `map` to slots `args`, writing its two outputs to slots `results`.
#[derive(Clone)]
pub struct Step<'a> {
    pub map: &'a BiMoebiusMap,
    pub args: [usize; 2],
    pub results: [usize; 2],
}

/// A straight-line program of bi-Möbius steps over CP1 slots; the first
/// `inputs` slots hold the inputs.
#[derive(Clone)]
pub struct Circuit<'a> {
    pub inputs: usize,
    pub steps: Vec<Step<'a>>,
}

type Hom<F> = (F, F);

impl<'a> Circuit<'a> {
    pub fn new(inputs: usize) -> Self {
        Circuit { inputs, steps: Vec::new() }
    }

    pub fn step(mut self, map: &'a BiMoebiusMap, args: [usize; 2], results: [usize; 2]) -> Self {
        self.steps.push(Step { map, args, results });
        self
    }

    fn slot_count(&self) -> usize {
        self.steps.iter().flat_map(|s| s.results).map(|m| m + 1).max().unwrap_or(0).max(self.inputs)
    }

    pub fn run<F: Field>(&self, input: &[Hom<F>]) -> Vec<Hom<F>> {
        let mut slots: Vec<Hom<F>> = vec![(F::zero(), F::zero()); self.slot_count()];
        slots[..self.inputs].clone_from_slice(input);
        for s in &self.steps {
            let (u, v) = s.map.eval_hom(&slots[s.args[0]], &slots[s.args[1]]);
            slots[s.results[0]] = u;
            slots[s.results[1]] = v;
        }
        slots
    }

    /// Per-slot degree vectors in the input variables.
    pub fn degrees(&self) -> Vec<Vec<u32>> {
        let n = self.inputs;
        let mut deg = vec![vec![0u32; n]; self.slot_count()];
        for (i, d) in deg.iter_mut().enumerate().take(n) {
            d[i] = 1;
        }
        for s in &self.steps {
            let [[ux, uy], [vx, vy]] = s.map.degrees();
            let (a, b) = (deg[s.args[0]].clone(), deg[s.args[1]].clone());
            deg[s.results[0]] = (0..n).map(|i| ux * a[i] + uy * b[i]).collect();
            deg[s.results[1]] = (0..n).map(|i| vx * a[i] + vy * b[i]).collect();
        }
        deg
    }
}

/// Two readouts of (possibly different) circuits over the same inputs, compared slot by slot.
pub struct Comparison<'a> {
    pub left: (&'a Circuit<'a>, Vec<usize>),
    pub right: (&'a Circuit<'a>, Vec<usize>),
}

fn show<F: Field>(p: &Hom<F>) -> String {
    match p.0.div(&p.1) {
        Some(v) => v.to_string(),
        None if p.0.is_zero() => "0/0".into(),
        None => "inf".into(),
    }
}

fn show_q(p: &Hom<Q>) -> String {
    match p.0.div(&p.1) {
        Some(v) => fmt_q(&v),
        None if p.0.is_zero() => "0/0".into(),
        None => "inf".into(),
    }
}

enum Outcome<F> {
    Agree { singular: bool },
    Differ(Vec<Hom<F>>, Vec<Hom<F>>),
}

fn compare_at<F: Field>(c: &Comparison<'_>, input: &[Hom<F>]) -> Outcome<F> {
    let ls = c.left.0.run(input);
    let rs = if std::ptr::eq(c.left.0, c.right.0) { ls.clone() } else { c.right.0.run(input) };
    let l: Vec<Hom<F>> = c.left.1.iter().map(|&i| ls[i].clone()).collect();
    let r: Vec<Hom<F>> = c.right.1.iter().map(|&i| rs[i].clone()).collect();
    let mut singular = false;
    for (a, b) in l.iter().zip(&r) {
        if (a.0.is_zero() && a.1.is_zero()) || (b.0.is_zero() && b.1.is_zero()) {
            singular = true;
            continue;
        }
        if !(a.0.clone() * b.1.clone() - b.0.clone() * a.1.clone()).is_zero() {
            return Outcome::Differ(l, r);
        }
    }
    Outcome::Agree { singular }
}

/// Per-input-variable degree bound of all cross products in the comparison.
pub fn degree_bounds(c: &Comparison<'_>) -> Vec<u32> {
    let ld = c.left.0.degrees();
    let rd = c.right.0.degrees();
    let n = c.left.0.inputs;
    let mut out = vec![0u32; n];
    for (&i, &j) in c.left.1.iter().zip(&c.right.1) {
        for k in 0..n {
            out[k] = out[k].max(ld[i][k] + rd[j][k]);
        }
    }
    out
}

/// Distinct abscissas for grid variable `var`; offsets keep different variables apart.
pub fn grid_value(var: usize, k: usize) -> Q {
    let shift = Q::new((var as i64).into(), 3.into());
    let k = k as i64;
    // 0, 1, -1, 2, -2, ... shifted by 2 so that the first values avoid 0 and 1
    let centered = if k % 2 == 1 { (k + 1) / 2 } else { -(k / 2) };
    Q::from_i64(centered + 2) + shift
}

/// Checks that `eval` vanishes on a product grid with `bounds[i] + 1` points in
/// variable i; with `eval` a polynomial of those degrees this proves it is zero.
/// Returns the first grid point where it does not vanish.
pub fn grid_vanishes(bounds: &[u32], mut eval: impl FnMut(&[Q]) -> Q) -> Result<usize, Vec<Q>> {
    let n = bounds.len();
    let mut idx = vec![0usize; n];
    let mut count = 0;
    loop {
        let pt: Vec<Q> = idx.iter().enumerate().map(|(v, &k)| grid_value(v, k)).collect();
        if !eval(&pt).is_zero() {
            return Err(pt);
        }
        count += 1;
        let mut v = 0;
        loop {
            if v == n {
                return Ok(count);
            }
            idx[v] += 1;
            if idx[v] as u32 > bounds[v] {
                idx[v] = 0;
                v += 1;
            } else {
                break;
            }
        }
    }
}

pub fn compare(c: &Comparison<'_>, cfg: &IdentityTestConfig) -> Result<Verdict, ConsistencyError> {
    match cfg.mode {
        Mode::ExactGrid => compare_exact(c, cfg),
        Mode::Random => compare_random(c, cfg),
    }
}

fn compare_exact(c: &Comparison<'_>, cfg: &IdentityTestConfig) -> Result<Verdict, ConsistencyError> {
    let bounds = degree_bounds(c);
    if let Some(&needed) = bounds.iter().find(|&&b| b > cfg.max_degree) {
        return Err(ConsistencyError::DegreeBoundExceeded { needed, bound: cfg.max_degree });
    }
    let (mut samples, mut singular) = (0usize, 0usize);
    let mut counter = None;
    let res = grid_vanishes(&bounds, |pt| {
        let input: Vec<Hom<Q>> = pt.iter().map(|q| (q.clone(), Q::from_i64(1))).collect();
        samples += 1;
        match compare_at(c, &input) {
            Outcome::Agree { singular: s } => {
                singular += s as usize;
                Q::from_i64(0)
            }
            Outcome::Differ(l, r) => {
                counter = Some(Counterexample {
                    inputs: pt.iter().map(fmt_q).collect(),
                    left: l.iter().map(show_q).collect(),
                    right: r.iter().map(show_q).collect(),
                });
                Q::from_i64(1)
            }
        }
    });
    if res.is_ok() && singular == samples {
        return Err(ConsistencyError::InsufficientSamples { good: 0, tried: samples });
    }
    Ok(Verdict { holds: res.is_ok(), mode: Mode::ExactGrid, samples, singular, counterexample: counter })
}

fn compare_random(c: &Comparison<'_>, cfg: &IdentityTestConfig) -> Result<Verdict, ConsistencyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = c.left.0.inputs;
    let (mut good, mut tried) = (0usize, 0usize);
    let cap = 4 * cfg.trials.max(1);
    while good < cfg.trials.max(1) {
        if tried >= cap {
            return Err(ConsistencyError::InsufficientSamples { good, tried });
        }
        tried += 1;
        let input: Vec<Hom<Fp>> = (0..n).map(|_| (Fp::new(rng.gen()), Fp::one())).collect();
        match compare_at(c, &input) {
            Outcome::Agree { singular: true } => {}
            Outcome::Agree { singular: false } => good += 1,
            Outcome::Differ(l, r) => {
                return Ok(Verdict {
                    holds: false,
                    mode: Mode::Random,
                    samples: tried,
                    singular: tried - good - 1,
                    counterexample: Some(Counterexample {
                        inputs: input.iter().map(show).collect(),
                        left: l.iter().map(show).collect(),
                        right: r.iter().map(show).collect(),
                    }),
                });
            }
        }
    }
    Ok(Verdict { holds: true, mode: Mode::Random, samples: tried, singular: tried - good, counterexample: None })
}

/// Map equality on CP1 x CP1.
pub fn maps_equal(f: &BiMoebiusMap, g: &BiMoebiusMap, cfg: &IdentityTestConfig) -> Result<Verdict, ConsistencyError> {
    let cf = Circuit::new(2).step(f, [0, 1], [2, 3]);
    let cg = Circuit::new(2).step(g, [0, 1], [2, 3]);
    compare(&Comparison { left: (&cf, vec![2, 3]), right: (&cg, vec![2, 3]) }, cfg)
}

/// g after f equals the identity.
pub fn composition_is_identity(f: &BiMoebiusMap, g: &BiMoebiusMap, cfg: &IdentityTestConfig) -> Result<Verdict, ConsistencyError> {
    let c = Circuit::new(2).step(f, [0, 1], [2, 3]).step(g, [2, 3], [4, 5]);
    compare(&Comparison { left: (&c, vec![4, 5]), right: (&c, vec![0, 1]) }, cfg)
}

/// R23 R13 R12 = R12 R13 R23 on (x, y, z).
pub fn check_yang_baxter(
    r12: &BiMoebiusMap,
    r13: &BiMoebiusMap,
    r23: &BiMoebiusMap,
    cfg: &IdentityTestConfig,
) -> Result<Verdict, ConsistencyError> {
    let lhs = Circuit::new(3).step(r12, [0, 1], [0, 1]).step(r13, [0, 2], [0, 2]).step(r23, [1, 2], [1, 2]);
    let rhs = Circuit::new(3).step(r23, [1, 2], [1, 2]).step(r13, [0, 2], [0, 2]).step(r12, [0, 1], [0, 1]);
    compare(&Comparison { left: (&lhs, vec![0, 1, 2]), right: (&rhs, vec![0, 1, 2]) }, cfg)
}

/// Face maps of the cube. Each pair holds the map on the face through the
/// origin and the map on the opposite face (shifted along the third axis).
/// A face map sends its two lower edges (in axis order) to the opposite edges.
#[derive(Clone)]
pub struct CubeAssignment {
    pub f12: [BiMoebiusMap; 2],
    pub f13: [BiMoebiusMap; 2],
    pub f23: [BiMoebiusMap; 2],
}

impl CubeAssignment {
    pub fn uniform(f12: BiMoebiusMap, f13: BiMoebiusMap, f23: BiMoebiusMap) -> Self {
        CubeAssignment { f12: [f12.clone(), f12], f13: [f13.clone(), f13], f23: [f23.clone(), f23] }
    }
}

// slots: x y z | x2 y1 | x3 z1 | y3 z2 | x23 y13 (top) | x23 z12 (back) | y13 z12 (side)
fn cube_circuit(c: &CubeAssignment) -> Circuit<'_> {
    Circuit::new(3)
        .step(&c.f12[0], [0, 1], [3, 4])
        .step(&c.f13[0], [0, 2], [5, 6])
        .step(&c.f23[0], [1, 2], [7, 8])
        .step(&c.f12[1], [5, 7], [9, 10])
        .step(&c.f13[1], [3, 8], [11, 12])
        .step(&c.f23[1], [4, 6], [13, 14])
}

/// Both evaluations of x23, y13 and z12 agree.
pub fn check_3d_consistent(cube: &CubeAssignment, cfg: &IdentityTestConfig) -> Result<Verdict, ConsistencyError> {
    let c = cube_circuit(cube);
    compare(&Comparison { left: (&c, vec![9, 10, 12]), right: (&c, vec![11, 13, 14]) }, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bimoebius::Poly;
    use crate::exactnum::qi;

    fn p(v: &[i64]) -> Poly {
        Poly::new(v.iter().map(|&x| qi(x)).collect())
    }

    // u = y + (a - b)/(x - y), v = x + (a - b)/(x - y)
    fn fv(a: i64, b: i64) -> BiMoebiusMap {
        BiMoebiusMap::new([p(&[0, 1]), p(&[a - b, 0, -1]), p(&[1]), p(&[0, -1])], [p(&[0, -1]), p(&[a - b, 0, 1]), p(&[-1]), p(&[0, 1])])
            .unwrap()
    }

    #[test]
    fn grid_values_distinct() {
        let v: Vec<Q> = (0..10).map(|k| grid_value(0, k)).collect();
        for i in 0..10 {
            for j in 0..i {
                assert_ne!(v[i], v[j]);
            }
        }
    }

    #[test]
    fn grid_vanishing_is_a_proof_for_low_degree() {
        // (x - 2)(x - 3) vanishes on a 2-point grid but has degree 2
        let f = |p: &[Q]| (&p[0] - qi(2)) * (&p[0] - qi(3));
        assert!(grid_vanishes(&[1], f).is_ok());
        assert!(grid_vanishes(&[2], f).is_err());
    }

    #[test]
    fn fv_checks() {
        let (a, b, c) = (fv(1, 2), fv(1, 5), fv(2, 5));
        for cfg in [IdentityTestConfig::exact(), IdentityTestConfig::random(7)] {
            assert!(maps_equal(&a, &a, &cfg).unwrap().holds);
            assert!(!maps_equal(&a, &b, &cfg).unwrap().holds);
            assert!(composition_is_identity(&a, &a, &cfg).unwrap().holds);
            assert!(check_yang_baxter(&a, &b, &c, &cfg).unwrap().holds);
            assert!(check_3d_consistent(&CubeAssignment::uniform(a.clone(), b.clone(), c.clone()), &cfg).unwrap().holds);
        }
    }

    #[test]
    fn degree_cap_enforced() {
        let a = fv(1, 2);
        let cfg = IdentityTestConfig { max_degree: 2, ..IdentityTestConfig::exact() };
        assert!(matches!(composition_is_identity(&a, &a, &cfg), Err(ConsistencyError::DegreeBoundExceeded { .. })));
    }
}
