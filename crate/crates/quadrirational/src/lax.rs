//! Lax matrices of bi-Möbius maps and verification of the Lax relations
//!
//! ```text
//! L(x,α,λ) L(y,β,λ) = L(v,β,λ) L(u,α,λ)
//! M(y,β,λ) M(x,α,λ) = M(u,α,λ) M(v,β,λ)
//! ```
//!
//! for a parametrized map (x, y) -> (u, v) with u = M(y,β,α)[x], v = L(x,α,β)[y].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bimoebius::{BiMoebiusMap, Poly};
use crate::catalog::{coefficients, Family};
use crate::exactnum::{fmt_q, qi, Field, Q};
use crate::projline::P1;

/// 2×2 matrix of polynomials in one field variable.
#[derive(Debug, Clone, PartialEq)]
pub struct LaxMatrix {
    pub entries: [[Poly; 2]; 2],
}

pub type Mat = [[Q; 2]; 2];

impl LaxMatrix {
    pub fn at(&self, t: &Q) -> Mat {
        self.entries.clone().map(|row| row.map(|p| p.eval(t)))
    }

    pub fn det(&self) -> Poly {
        let e = &self.entries;
        e[0][0].mul(&e[1][1]).sub(&e[0][1].mul(&e[1][0]))
    }

    /// Entries as coefficient lists, low degree first.
    pub fn to_json(&self) -> Vec<Vec<Vec<String>>> {
        self.entries.iter().map(|row| row.iter().map(|p| p.coeffs().iter().map(fmt_q).collect()).collect()).collect()
    }
}

/// (L, M): L(x) acts on y giving v, M(y) acts on x giving u.
pub fn lax_from_map(f: &BiMoebiusMap) -> (LaxMatrix, LaxMatrix) {
    let q = |s: &[Poly; 4]| LaxMatrix { entries: [[s[0].clone(), s[1].clone()], [s[2].clone(), s[3].clone()]] };
    (q(f.l()), q(f.m()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    L,
    M,
}

/// A matrix-valued function (field value, edge parameter, spectral parameter).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaxFamily {
    /// Read off a catalog family: L(w, p, λ) is the A..D matrix of the family at
    /// parameters (p, λ), M(w, p, λ) the a..d matrix at (λ, p).
    Catalog(Family, Side),
    /// [[x, λ - α - x²], [1, -x]] for F_V.
    FvNormalized,
}

impl LaxFamily {
    pub fn side(self) -> Side {
        match self {
            LaxFamily::Catalog(_, s) => s,
            LaxFamily::FvNormalized => Side::L,
        }
    }

    pub fn eval(self, w: &Q, p: &Q, lam: &Q) -> Mat {
        match self {
            LaxFamily::Catalog(fam, Side::L) => LaxMatrix { entries: quad_matrix(&coefficients(fam, p, lam).1) }.at(w),
            LaxFamily::Catalog(fam, Side::M) => LaxMatrix { entries: quad_matrix(&coefficients(fam, lam, p).0) }.at(w),
            LaxFamily::FvNormalized => [[w.clone(), lam.clone() - p.clone() - w.clone() * w.clone()], [qi(1), -w.clone()]],
        }
    }
}

fn quad_matrix(s: &[Poly; 4]) -> [[Poly; 2]; 2] {
    [[s[0].clone(), s[1].clone()], [s[2].clone(), s[3].clone()]]
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][0].clone() * b[0][j].clone() + a[i][1].clone() * b[1][j].clone()))
}

fn is_zero_mat(a: &Mat) -> bool {
    a.iter().flatten().all(Field::is_zero)
}

/// `Some(s)` with lhs = s · rhs, if the matrices are proportional and nonzero.
fn proportionality(lhs: &Mat, rhs: &Mat) -> Option<Q> {
    let (l, r): (Vec<&Q>, Vec<&Q>) = (lhs.iter().flatten().collect(), rhs.iter().flatten().collect());
    let k = r.iter().position(|v| !Field::is_zero(*v))?;
    let s = l[k].clone() / r[k].clone();
    if Field::is_zero(&s) {
        return None;
    }
    l.iter().zip(&r).all(|(a, b)| **a == s.clone() * (*b).clone()).then_some(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LaxVerdict {
    Fail,
    Projective,
    Exact,
}

#[derive(Debug, Clone, Serialize)]
pub struct LaxSample {
    pub x: String,
    pub y: String,
    pub lambda: String,
    /// lhs = scalar · rhs
    pub scalar: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LaxReport {
    pub verdict: LaxVerdict,
    pub samples: usize,
    pub skipped: usize,
    pub table: Vec<LaxSample>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("only {good} usable samples out of {tried} attempts")]
pub struct InsufficientSamples {
    pub good: usize,
    pub tried: usize,
}

fn random_q(rng: &mut ChaCha8Rng) -> Q {
    Q::new(rng.gen_range(-40i64..=40).into(), rng.gen_range(1i64..=9).into())
}

/// Checks the Lax relation of `fam` for `map` = R(α, β) at `samples` random
/// rational (x, y, λ). Samples with a singular value or a degenerate matrix are skipped.
pub fn check_lax(fam: LaxFamily, map: &BiMoebiusMap, alpha: &Q, beta: &Q, samples: usize, seed: u64) -> Result<LaxReport, InsufficientSamples> {
    check_lax_with(fam.side(), |w, p, lam| fam.eval(w, p, lam), map, alpha, beta, samples, seed)
}

/// `check_lax` for an arbitrary matrix function `mat(w, p, λ)` acting on `side`.
pub fn check_lax_with(
    side: Side,
    mat: impl Fn(&Q, &Q, &Q) -> Mat,
    map: &BiMoebiusMap,
    alpha: &Q,
    beta: &Q,
    samples: usize,
    seed: u64,
) -> Result<LaxReport, InsufficientSamples> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = Vec::new();
    let mut verdict = LaxVerdict::Exact;
    let (mut tried, mut skipped) = (0, 0);
    while table.len() < samples {
        if tried >= 20 * samples.max(1) {
            return Err(InsufficientSamples { good: table.len(), tried });
        }
        tried += 1;
        let (x, y, lam) = (random_q(&mut rng), random_q(&mut rng), random_q(&mut rng));
        let Ok((u, v)) = map.eval(&P1::finite(x.clone()), &P1::finite(y.clone())) else {
            skipped += 1;
            continue;
        };
        let (Some(u), Some(v)) = (u.value().cloned(), v.value().cloned()) else {
            skipped += 1;
            continue;
        };
        let m = |w: &Q, p: &Q| mat(w, p, &lam);
        let (lhs, rhs) = match side {
            Side::L => (mat_mul(&m(&x, alpha), &m(&y, beta)), mat_mul(&m(&v, beta), &m(&u, alpha))),
            Side::M => (mat_mul(&m(&y, beta), &m(&x, alpha)), mat_mul(&m(&u, alpha), &m(&v, beta))),
        };
        if is_zero_mat(&lhs) || is_zero_mat(&rhs) {
            skipped += 1;
            continue;
        }
        let scalar = proportionality(&lhs, &rhs);
        match &scalar {
            None => verdict = LaxVerdict::Fail,
            Some(s) if *s != qi(1) => verdict = verdict.min(LaxVerdict::Projective),
            _ => {}
        }
        table.push(LaxSample { x: fmt_q(&x), y: fmt_q(&y), lambda: fmt_q(&lam), scalar: scalar.as_ref().map(fmt_q) });
    }
    Ok(LaxReport { verdict, samples: table.len(), skipped, table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::family;

    #[test]
    fn worked_sample() {
        let f = LaxFamily::FvNormalized;
        let (a, b, l) = (qi(3), qi(1), qi(0));
        let lhs = mat_mul(&f.eval(&qi(2), &a, &l), &f.eval(&qi(1), &b, &l));
        let fv = family(Family::FV, &a, &b).unwrap();
        let (u, v) = fv.eval(&P1::finite(qi(2)), &P1::finite(qi(1))).unwrap();
        assert_eq!((u.clone(), v.clone()), (P1::finite(qi(3)), P1::finite(qi(4))));
        let rhs = mat_mul(&f.eval(v.value().unwrap(), &b, &l), &f.eval(u.value().unwrap(), &a, &l));
        let expect = [[qi(-5), qi(3)], [qi(-1), qi(0)]];
        assert_eq!(lhs, expect);
        assert_eq!(rhs, expect);
    }

    #[test]
    fn proportional_detection() {
        let a = [[qi(1), qi(2)], [qi(3), qi(4)]];
        let b = [[qi(2), qi(4)], [qi(6), qi(8)]];
        assert_eq!(proportionality(&b, &a), Some(qi(2)));
        let c = [[qi(2), qi(4)], [qi(6), qi(9)]];
        assert_eq!(proportionality(&c, &a), None);
    }
}
