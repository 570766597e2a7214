//! Named maps: the five canonical [2:2] families, their forms before the final
//! variable inversion, the [1:2] maps G, Ĝ, F̂, the [1:1] map and the transposition.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::bimoebius::{BiMoebiusMap, MapError, Poly, Quad};
use crate::consistency::{maps_equal, CubeAssignment, IdentityTestConfig};
use crate::exactnum::{qf, qi, Field, Q};
use crate::projline::{Moebius, P1};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    FI,
    FII,
    FIII,
    FIV,
    FV,
    TypeIICanonical,
    TypeIIICanonical,
    TypeIVCanonical,
    TypeVCanonical,
    G12,
    Ghat12,
    Fhat22,
    OneOne,
    Transposition,
}

pub const F_FAMILIES: [Family; 5] = [Family::FI, Family::FII, Family::FIII, Family::FIV, Family::FV];

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::FI => "FI",
            Family::FII => "FII",
            Family::FIII => "FIII",
            Family::FIV => "FIV",
            Family::FV => "FV",
            Family::TypeIICanonical => "typeII-canonical",
            Family::TypeIIICanonical => "typeIII-canonical",
            Family::TypeIVCanonical => "typeIV-canonical",
            Family::TypeVCanonical => "typeV-canonical",
            Family::G12 => "G12",
            Family::Ghat12 => "Ghat12",
            Family::Fhat22 => "Fhat22",
            Family::OneOne => "one-one",
            Family::Transposition => "transposition",
        }
    }

    pub fn takes_parameters(self) -> bool {
        !matches!(self, Family::OneOne | Family::Transposition)
    }

    /// The F_T and their pre-inversion forms degenerate at α = β.
    pub fn needs_distinct_parameters(self) -> bool {
        matches!(
            self,
            Family::FI
                | Family::FII
                | Family::FIII
                | Family::FIV
                | Family::FV
                | Family::TypeIICanonical
                | Family::TypeIIICanonical
                | Family::TypeIVCanonical
                | Family::TypeVCanonical
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        use Family::*;
        let all = [FI, FII, FIII, FIV, FV, TypeIICanonical, TypeIIICanonical, TypeIVCanonical, TypeVCanonical, G12, Ghat12, Fhat22, OneOne, Transposition];
        all.into_iter().find(|f| f.name() == s).ok_or_else(|| format!("unknown family {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CatalogError {
    #[error("{0} needs alpha != beta")]
    EqualParameters(Family),
    #[error("{0} takes no parameters")]
    UnexpectedParameters(Family),
    #[error("{0} needs parameters alpha, beta")]
    MissingParameters(Family),
    #[error("parameter makes the map degenerate: {0}")]
    Map(#[from] MapError),
}

fn p(c: &[Q]) -> Poly {
    Poly::new(c.to_vec())
}

fn z() -> Q {
    qi(0)
}

fn o() -> Q {
    qi(1)
}

/// Coefficient quadruples (a..d in y, A..D in x), transcribed from the standard
/// formulas; no validation, so parameter values that degenerate the map are allowed.
pub fn coefficients(fam: Family, al: &Q, be: &Q) -> (Quad, Quad) {
    let (a, b) = (al.clone(), be.clone());
    match fam {
        // u = αyP, v = βxP
        Family::FI => (
            [
                p(&[z(), &a * (o() - &b)]),
                p(&[z(), &a * (&b - &a), &a * (&a - o())]),
                p(&[&b * (o() - &a), &a - &b]),
                p(&[z(), &a * (&b - o())]),
            ],
            [
                p(&[z(), &b * (&a - o())]),
                p(&[z(), &b * (&b - &a), &b * (o() - &b)]),
                p(&[&a * (&b - o()), &a - &b]),
                p(&[z(), &b * (o() - &a)]),
            ],
        ),
        Family::FII => (
            [p(&[z(), a.clone()]), p(&[z(), &b - &a, -b.clone()]), p(&[a.clone()]), p(&[z(), -a.clone()])],
            [p(&[z(), -b.clone()]), p(&[z(), &b - &a, a.clone()]), p(&[-b.clone()]), p(&[z(), b.clone()])],
        ),
        Family::FIII => (
            [p(&[z(), a.clone()]), p(&[z(), z(), -b.clone()]), p(&[a.clone()]), p(&[z(), -a.clone()])],
            [p(&[z(), -b.clone()]), p(&[z(), z(), a.clone()]), p(&[-b.clone()]), p(&[z(), b.clone()])],
        ),
        Family::FIV => (
            [p(&[z(), o()]), p(&[z(), &b - &a, -o()]), p(&[o()]), p(&[z(), -o()])],
            [p(&[z(), -o()]), p(&[z(), &b - &a, o()]), p(&[-o()]), p(&[z(), o()])],
        ),
        Family::FV => (
            [p(&[z(), o()]), p(&[&a - &b, z(), -o()]), p(&[o()]), p(&[z(), -o()])],
            [p(&[z(), -o()]), p(&[&a - &b, z(), o()]), p(&[-o()]), p(&[z(), o()])],
        ),
        // u = αy(x-y)/(βx(1-y) - αy(1-x)), v = βx(x-y)/(same)
        Family::TypeIICanonical => (
            [p(&[z(), a.clone()]), p(&[z(), z(), -a.clone()]), p(&[b.clone(), &a - &b]), p(&[z(), -a.clone()])],
            [p(&[z(), -b.clone()]), p(&[z(), z(), b.clone()]), p(&[-a.clone(), &a - &b]), p(&[z(), b.clone()])],
        ),
        // u = αy(x-y)/(βx - αy + (β-α)(y²-2y)x), v = βx(x-y)/(βx - αy + (β-α)(x²-2x)y)
        Family::TypeIIICanonical => (
            [
                p(&[z(), a.clone()]),
                p(&[z(), z(), -a.clone()]),
                p(&[b.clone(), qi(-2) * (&b - &a), &b - &a]),
                p(&[z(), -a.clone()]),
            ],
            [
                p(&[z(), -b.clone()]),
                p(&[z(), z(), b.clone()]),
                p(&[-a.clone(), qi(-2) * (&b - &a), &b - &a]),
                p(&[z(), b.clone()]),
            ],
        ),
        // u = y(x-y)/(x - y + (α-β)xy), v = x(x-y)/(same)
        Family::TypeIVCanonical => (
            [p(&[z(), o()]), p(&[z(), z(), -o()]), p(&[o(), &a - &b]), p(&[z(), -o()])],
            [p(&[z(), -o()]), p(&[z(), z(), o()]), p(&[-o(), &a - &b]), p(&[z(), o()])],
        ),
        // u = y(x-y)/(x - y + (β-α)xy²), v = x(x-y)/(x - y + (β-α)x²y)
        Family::TypeVCanonical => (
            [p(&[z(), o()]), p(&[z(), z(), -o()]), p(&[o(), z(), &b - &a]), p(&[z(), -o()])],
            [p(&[z(), -o()]), p(&[z(), z(), o()]), p(&[-o(), z(), &b - &a]), p(&[z(), o()])],
        ),
        // u = (αx - y)(y-1)/((x-y)(y-β)), v = (αx - y)/(x-y)
        Family::G12 => (
            [p(&[-a.clone(), a.clone()]), p(&[z(), o(), -o()]), p(&[-b.clone(), o()]), p(&[z(), b.clone(), -o()])],
            [p(&[-o()]), p(&[z(), a.clone()]), p(&[-o()]), p(&[z(), o()])],
        ),
        // u = (βx - αy)(y-1)/((x-y)(y-β)), v = (βx - αy)/(α(x-y))
        Family::Ghat12 => (
            [p(&[-b.clone(), b.clone()]), p(&[z(), a.clone(), -a.clone()]), p(&[-b.clone(), o()]), p(&[z(), b.clone(), -o()])],
            [p(&[-a.clone()]), p(&[z(), b.clone()]), p(&[-a.clone()]), p(&[z(), a.clone()])],
        ),
        // u as in Ĝ, v = (βx - αy)(x-1)/((x-y)(x-α))
        Family::Fhat22 => (
            [p(&[-b.clone(), b.clone()]), p(&[z(), a.clone(), -a.clone()]), p(&[-b.clone(), o()]), p(&[z(), b.clone(), -o()])],
            [p(&[a.clone(), -a.clone()]), p(&[z(), -b.clone(), b.clone()]), p(&[a.clone(), -o()]), p(&[z(), -a.clone(), o()])],
        ),
        // u = (x+y-1)/y, v = (x+y-1)/x
        Family::OneOne => (
            [p(&[o()]), p(&[-o(), o()]), p(&[]), p(&[z(), o()])],
            [p(&[o()]), p(&[-o(), o()]), p(&[]), p(&[z(), o()])],
        ),
        // u = y, v = x
        Family::Transposition => ([p(&[]), p(&[z(), o()]), p(&[]), p(&[o()])], [p(&[]), p(&[z(), o()]), p(&[]), p(&[o()])]),
    }
}

/// Builds a named map. Families without parameters reject `Some(..)`.
pub fn make(fam: Family, params: Option<(Q, Q)>) -> Result<BiMoebiusMap, CatalogError> {
    let (a, b) = match (fam.takes_parameters(), params) {
        (true, Some(ab)) => ab,
        (true, None) => return Err(CatalogError::MissingParameters(fam)),
        (false, Some(_)) => return Err(CatalogError::UnexpectedParameters(fam)),
        (false, None) => (z(), z()),
    };
    if fam.needs_distinct_parameters() && a == b {
        return Err(CatalogError::EqualParameters(fam));
    }
    let (m, l) = coefficients(fam, &a, &b);
    if fam == Family::Transposition {
        return Ok(BiMoebiusMap::new_unchecked(m, l)?);
    }
    Ok(BiMoebiusMap::new(m, l)?)
}

/// `make` for parametrized families.
pub fn family(fam: Family, alpha: &Q, beta: &Q) -> Result<BiMoebiusMap, CatalogError> {
    make(fam, Some((alpha.clone(), beta.clone())))
}

/// Cube mixing the two subclasses: Ĝ(α,β) on both xy faces, Ĝ(α,γ) on both
/// xz faces, F̂(β,γ) on the yz face through the origin and F̂(β/α,γ/α) on the
/// opposite one. Every face map is used as stated, inputs on the lower edges
/// in axis order; this was the assignment found by the orientation search.
pub fn mixed_cube(alpha: &Q, beta: &Q, gamma: &Q) -> Result<CubeAssignment, CatalogError> {
    if alpha.is_zero() {
        return Err(CatalogError::Map(MapError::Degenerate));
    }
    let g12 = family(Family::Ghat12, alpha, beta)?;
    let g13 = family(Family::Ghat12, alpha, gamma)?;
    let left = family(Family::Fhat22, beta, gamma)?;
    let right = family(Family::Fhat22, &(beta / alpha), &(gamma / alpha))?;
    Ok(CubeAssignment { f12: [g12.clone(), g12], f13: [g13.clone(), g13], f23: [left, right] })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// x,y,u,v -> 1/x,.. turns the type II form into F_II
    InvertTypeII,
    /// x = 1/(1-x') on all variables turns the type III form into F_III
    /// (x = 1/(x'-1) does not; see `shift_invert_type_iii`)
    ShiftInvertTypeIII,
    InvertTypeIV,
    InvertTypeV,
    /// F_I(εα, εβ) tends to the type II form as ε -> 0
    LimitFIToTypeII,
    /// F_II with all variables scaled by T tends to F_III as T -> ∞
    LimitFIIToFIII,
    /// Ĝ_{α,β} is G_{β/α,β} with u scaled by α
    GhatIsScaledG,
    /// F̂_{α,β} is F_I(α,β) after u -> α(u-1)/(u-α), v -> β(v-1)/(v-β)
    FhatIsConjugatedFI,
    /// F̂_{1,β} equals G_{β,β}
    FhatDegeneratesToG,
    TranspositionSelfInverse,
}

pub const RELATIONS: [Relation; 10] = [
    Relation::InvertTypeII,
    Relation::ShiftInvertTypeIII,
    Relation::InvertTypeIV,
    Relation::InvertTypeV,
    Relation::LimitFIToTypeII,
    Relation::LimitFIIToFIII,
    Relation::GhatIsScaledG,
    Relation::FhatIsConjugatedFI,
    Relation::FhatDegeneratesToG,
    Relation::TranspositionSelfInverse,
];

#[derive(Debug, Clone, Serialize)]
pub struct RelationReport {
    pub relation: Relation,
    pub alpha: String,
    pub beta: String,
    pub holds: bool,
    pub detail: String,
}

fn equal(f: &BiMoebiusMap, g: &BiMoebiusMap) -> bool {
    maps_equal(f, g, &IdentityTestConfig::exact()).map(|v| v.holds).unwrap_or(false)
}

fn all_four(m: &Moebius<Q>) -> [Moebius<Q>; 4] {
    [m.clone(), m.clone(), m.clone(), m.clone()]
}

// First-order convergence of `approx(ε)` to `limit` at a fixed point: the error
// must shrink by a factor in [1.9, 4.1] when ε halves.
fn first_order(approx: impl Fn(&Q) -> (P1<Q>, P1<Q>), limit: (P1<Q>, P1<Q>), eps: &Q) -> (bool, String) {
    let err = |e: &Q| -> Option<Q> {
        let (u, v) = approx(e);
        let du = u.value()?.clone() - limit.0.value()?.clone();
        let dv = v.value()?.clone() - limit.1.value()?.clone();
        Some(if Field::is_zero(&du) { dv } else { du })
    };
    let half = eps * qf(1, 2);
    match (err(eps), err(&half)) {
        (Some(e1), Some(e2)) if Field::is_zero(&e1) && Field::is_zero(&e2) => (true, "exact at both scales".into()),
        (Some(e1), Some(e2)) if !Field::is_zero(&e2) => {
            let ratio = &e1 / &e2;
            let ok = ratio >= qf(19, 10) && ratio <= qf(41, 10);
            (ok, format!("error ratio {}", crate::exactnum::fmt_q(&ratio)))
        }
        _ => (false, "limit point not finite".into()),
    }
}

/// The type III form after x' = (x + sign)/x on all four variables; sign = -1
/// is x = 1/(1-x'), sign = +1 is x = 1/(x'-1).
pub fn shift_invert_type_iii(a: &Q, b: &Q, sign: i64) -> Result<BiMoebiusMap, CatalogError> {
    let m = Moebius::new(qi(1), qi(sign), qi(1), qi(0))?;
    let [mx, my, mu, mv] = all_four(&m);
    Ok(family(Family::TypeIIICanonical, a, b)?.conjugate(&mx, &my, &mu, &mv)?)
}

/// Checks one stated relation between catalog maps at parameters (α, β).
pub fn family_relation_check(rel: Relation, alpha: &Q, beta: &Q) -> RelationReport {
    let (holds, detail) = relation_inner(rel, alpha, beta).unwrap_or_else(|e| (false, e.to_string()));
    RelationReport { relation: rel, alpha: crate::exactnum::fmt_q(alpha), beta: crate::exactnum::fmt_q(beta), holds, detail }
}

fn relation_inner(rel: Relation, a: &Q, b: &Q) -> Result<(bool, String), CatalogError> {
    let inv = Moebius::inversion();
    let pt = (P1::finite(qf(7, 3)), P1::finite(qf(-5, 2)));
    Ok(match rel {
        Relation::InvertTypeII | Relation::InvertTypeIV | Relation::InvertTypeV => {
            let (pre, fin) = match rel {
                Relation::InvertTypeII => (Family::TypeIICanonical, Family::FII),
                Relation::InvertTypeIV => (Family::TypeIVCanonical, Family::FIV),
                _ => (Family::TypeVCanonical, Family::FV),
            };
            let [mx, my, mu, mv] = all_four(&inv);
            let g = family(pre, a, b)?.conjugate(&mx, &my, &mu, &mv)?;
            (equal(&g, &family(fin, a, b)?), "grid equality".into())
        }
        Relation::ShiftInvertTypeIII => {
            let g = shift_invert_type_iii(a, b, -1)?;
            (equal(&g, &family(Family::FIII, a, b)?), "grid equality under x' = (x-1)/x".into())
        }
        Relation::LimitFIToTypeII => {
            let lim = family(Family::TypeIICanonical, a, b)?.eval(&pt.0, &pt.1)?;
            first_order(
                |e| family(Family::FI, &(e * a), &(e * b)).expect("valid").eval(&pt.0, &pt.1).expect("regular"),
                lim,
                &qf(1, 10000),
            )
        }
        Relation::LimitFIIToFIII => {
            let lim = family(Family::FIII, a, b)?.eval(&pt.0, &pt.1)?;
            let f2 = family(Family::FII, a, b)?;
            first_order(
                |e| {
                    // T = 1/ε: u' = u(Tx, Ty)/T
                    let s = Moebius::new(e.clone(), qi(0), qi(0), qi(1)).expect("invertible");
                    let [mx, my, mu, mv] = all_four(&s);
                    f2.conjugate(&mx, &my, &mu, &mv).expect("valid").eval(&pt.0, &pt.1).expect("regular")
                },
                lim,
                &qf(1, 10000),
            )
        }
        Relation::GhatIsScaledG => {
            let g = family(Family::G12, &(b / a), b)?;
            let id = Moebius::identity();
            let su = Moebius::new(a.clone(), qi(0), qi(0), qi(1)).expect("a nonzero");
            let g = g.conjugate(&id, &id, &su, &id)?;
            (equal(&g, &family(Family::Ghat12, a, b)?), "grid equality".into())
        }
        Relation::FhatIsConjugatedFI => {
            let id = Moebius::identity();
            let mu = Moebius::new(a.clone(), -a.clone(), qi(1), -a.clone())?;
            let mv = Moebius::new(b.clone(), -b.clone(), qi(1), -b.clone())?;
            let g = family(Family::FI, a, b)?.conjugate(&id, &id, &mu, &mv)?;
            (equal(&g, &family(Family::Fhat22, a, b)?), "grid equality".into())
        }
        Relation::FhatDegeneratesToG => {
            let f = family(Family::Fhat22, &qi(1), b)?;
            (equal(&f, &family(Family::G12, b, b)?), "grid equality at alpha = 1".into())
        }
        Relation::TranspositionSelfInverse => {
            let t = make(Family::Transposition, None)?;
            (equal(&t.inverse()?, &t), "grid equality".into())
        }
    })
}

impl From<crate::projline::ProjError> for CatalogError {
    fn from(_: crate::projline::ProjError) -> Self {
        CatalogError::Map(MapError::Degenerate)
    }
}
