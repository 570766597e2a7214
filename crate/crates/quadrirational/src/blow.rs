//! Exceptional curves blown down to singular values, and limits of the map
//! along arcs through its singular points.

use std::fmt;

use crate::bimoebius::{BiMoebiusMap, MapError, Poly};
use crate::exactnum::{fmt_q, qi, Field, Q, UPoly};
use crate::projline::{Jet, Moebius, P1};
use crate::singularity::{singularities_of_map, MatchedSingularity, SingularityError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BlowError {
    #[error("not quadrirational: {0}")]
    NotQuadrirational(String),
    #[error("internal inconsistency: {0}")]
    CurveMismatch(String),
    #[error("germ of order {given} cannot resolve a singularity of multiplicity {needed}")]
    IndeterminateGerm { given: usize, needed: usize },
    #[error("germ is not based at the singular point")]
    GermNotAtSingularity,
    #[error("singularity has multiplicity {0}, expected a simple one")]
    WrongMultiplicity(usize),
    #[error("no singularity with index {0}")]
    NoSuchSingularity(usize),
    #[error(transparent)]
    Singularity(#[from] SingularityError),
    #[error(transparent)]
    Map(#[from] MapError),
}

pub type Result<T> = std::result::Result<T, BlowError>;

/// p·xy + q·x + r·y + s = 0, with x = x0/x1 and y = y0/y1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BidegreeCurve {
    pub p: Q,
    pub q: Q,
    pub r: Q,
    pub s: Q,
}

impl BidegreeCurve {
    pub fn new(p: Q, q: Q, r: Q, s: Q) -> Option<Self> {
        let c = BidegreeCurve { p, q, r, s };
        (!c.coeffs().iter().all(|v| v.is_zero())).then_some(c)
    }

    pub fn coeffs(&self) -> [&Q; 4] {
        [&self.p, &self.q, &self.r, &self.s]
    }

    pub fn eval_hom<F: Field>(&self, x: &(F, F), y: &(F, F)) -> Option<F> {
        let k = |v: &Q| F::from_q(v);
        Some(
            k(&self.p)? * x.0.clone() * y.0.clone()
                + k(&self.q)? * x.0.clone() * y.1.clone()
                + k(&self.r)? * x.1.clone() * y.0.clone()
                + k(&self.s)? * x.1.clone() * y.1.clone(),
        )
    }

    pub fn contains(&self, x: &P1<Q>, y: &P1<Q>) -> bool {
        self.eval_hom(&x.hom(), &y.hom()).is_some_and(|v| v.is_zero())
    }

    /// Scaled so that the first nonzero coefficient is 1.
    pub fn normalized(&self) -> Self {
        let k = self.coeffs().into_iter().find(|v| !v.is_zero()).cloned().expect("nonzero curve");
        BidegreeCurve { p: &self.p / &k, q: &self.q / &k, r: &self.r / &k, s: &self.s / &k }
    }

    pub fn proportional(&self, o: &Self) -> bool {
        self.normalized() == o.normalized()
    }

    /// x as a Möbius function of y on the curve: x = −(r·y + s)/(p·y + q).
    pub fn x_of_y(&self) -> Option<Moebius<Q>> {
        Moebius::new(-self.r.clone(), -self.s.clone(), self.p.clone(), self.q.clone()).ok()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.coeffs().iter().map(|v| fmt_q(v).into()).collect())
    }

    /// Equation with the given variable names, e.g. "x-y=0".
    pub fn equation(&self, x: &str, y: &str) -> String {
        let n = self.normalized();
        let xy = format!("{x}{y}");
        let mut out = String::new();
        for (c, var) in [(&n.p, xy.as_str()), (&n.q, x), (&n.r, y), (&n.s, "")] {
            if c.is_zero() {
                continue;
            }
            let neg = *c < qi(0);
            let a = if neg { -c.clone() } else { c.clone() };
            if neg {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            if var.is_empty() || a != qi(1) {
                out.push_str(&fmt_q(&a));
            }
            out.push_str(var);
        }
        out + "=0"
    }
}

impl fmt::Display for BidegreeCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.equation("x", "y"))
    }
}

#[derive(Clone, Debug)]
pub struct ExceptionalCurve {
    /// Index into the matched singularities (sorted by multiplicity).
    pub singularity: usize,
    pub curve: BidegreeCurve,
    pub target: (P1<Q>, P1<Q>),
}

// Homogeneous value of a degree-k polynomial at (y0 : y1), over series in t.
fn hom_series(p: &Poly, k: usize, y: &(UPoly<Q>, UPoly<Q>)) -> UPoly<Q> {
    let mut acc = UPoly::zero();
    for j in 0..=k {
        let c = p.coeff(j);
        if c.is_zero() {
            continue;
        }
        acc = acc.add(&y.0.pow(j as u32).mul(&y.1.pow((k - j) as u32)).scale(&c));
    }
    acc
}

// Image point of a rank-one 2x2 matrix given by its columns.
fn image_point(a: Q, b: Q, c: Q, d: Q) -> Result<P1<Q>> {
    P1::from_hom(a, c)
        .or_else(|_| P1::from_hom(b, d))
        .map_err(|_| BlowError::NotQuadrirational("matrix vanishes identically at a singular point".into()))
}

// Divides a degree-k form by the linear form vanishing at `root`; returns coefficients of the degree-(k−1) quotient.
fn divide_root(p: &Poly, k: usize, root: &P1<Q>) -> Result<Vec<Q>> {
    let out = match root.value() {
        Some(r) => {
            let (quo, rem) = p.divrem(&UPoly::linear_root(r.clone())).expect("nonzero divisor");
            if !rem.is_zero() {
                return Err(BlowError::CurveMismatch("φ is not divisible by the root factor".into()));
            }
            quo
        }
        None => {
            if p.deg().is_some_and(|d| d >= k) {
                return Err(BlowError::CurveMismatch("φ is not divisible at infinity".into()));
            }
            p.clone()
        }
    };
    Ok(out.padded(k))
}

fn matrix_values(q: &[Poly; 4], k: usize, at: &P1<Q>) -> [Q; 4] {
    let h = at.hom();
    let one = (UPoly::constant(h.0), UPoly::constant(h.1));
    std::array::from_fn(|i| hom_series(&q[i], k, &one).coeff(0))
}

/// Bidegree (1,1) curves contracted by f, one per matched singularity, with
/// γ_i (from φ) cross-checked against Γ_i (from Φ) and the contact
/// conditions with the singular germs verified.
pub fn exceptional_curves(f: &BiMoebiusMap) -> Result<Vec<ExceptionalCurve>> {
    if f.deg_m() != 2 || f.deg_l() != 2 {
        return Err(BlowError::NotQuadrirational("exceptional curves need degree 2 in both variables".into()));
    }
    let (_, sings) = singularities_of_map(f)?;
    let mut out = Vec::new();
    for (i, s) in sings.iter().enumerate() {
        let (xi, yi) = (s.x.base(), s.y.base());
        let [a, b, c, d] = matrix_values(f.m(), 2, yi);
        let [aa, bb, cc, dd] = matrix_values(f.l(), 2, xi);
        let u = image_point(a, b, c, d)?;
        let v = image_point(aa, bb, cc, dd)?;
        let (u0, u1) = u.hom();
        let (v0, v1) = v.hom();
        let m = f.m();
        let l = f.l();
        // φ = (c u0 − a u1) x0 + (d u0 − b u1) x1
        let pp = divide_root(&m[2].scale(&u0).sub(&m[0].scale(&u1)), 2, yi)?;
        let qq = divide_root(&m[3].scale(&u0).sub(&m[1].scale(&u1)), 2, yi)?;
        let gamma = BidegreeCurve::new(pp[1].clone(), pp[0].clone(), qq[1].clone(), qq[0].clone())
            .ok_or_else(|| BlowError::CurveMismatch("γ vanishes identically".into()))?;
        // Φ = (C v0 − A v1) y0 + (D v0 − B v1) y1
        let pp = divide_root(&l[2].scale(&v0).sub(&l[0].scale(&v1)), 2, xi)?;
        let qq = divide_root(&l[3].scale(&v0).sub(&l[1].scale(&v1)), 2, xi)?;
        let big_gamma = BidegreeCurve::new(pp[1].clone(), qq[1].clone(), pp[0].clone(), qq[0].clone())
            .ok_or_else(|| BlowError::CurveMismatch("Γ vanishes identically".into()))?;
        if !gamma.proportional(&big_gamma) {
            return Err(BlowError::CurveMismatch(format!("γ = {gamma} and Γ = {big_gamma} differ at singularity {i}")));
        }
        for (j, t) in sings.iter().enumerate() {
            let need = if i == j { t.multiplicity as i64 - 2 } else { t.multiplicity as i64 - 1 };
            if need >= 0 && contact_order(&gamma, &t.x, &t.y) < need as usize {
                return Err(BlowError::CurveMismatch(format!("curve {i} lacks contact of order {need} at singularity {j}")));
            }
        }
        out.push(ExceptionalCurve { singularity: i, curve: gamma, target: (u, v) });
    }
    Ok(out)
}

/// Germ of a curve through a point of CP1 with any number of derivatives, taken
/// in the chart of the base (x itself, or 1/x at infinity) like `Jet`.
#[derive(Clone, PartialEq, Debug)]
pub struct ArcGerm {
    pub base: P1<Q>,
    pub derivs: Vec<Q>,
}

impl ArcGerm {
    pub fn new(base: P1<Q>, derivs: Vec<Q>) -> Self {
        ArcGerm { base, derivs }
    }

    pub fn order(&self) -> usize {
        self.derivs.len()
    }

    /// Appends further derivatives.
    pub fn extended(&self, more: &[Q]) -> Self {
        ArcGerm { base: self.base.clone(), derivs: self.derivs.iter().chain(more).cloned().collect() }
    }
}

impl From<&Jet> for ArcGerm {
    fn from(j: &Jet) -> Self {
        ArcGerm { base: j.base().clone(), derivs: j.derivs().to_vec() }
    }
}

// Polynomial arc in homogeneous coordinates.
fn arc(j: &ArcGerm) -> (UPoly<Q>, UPoly<Q>) {
    let mut c = vec![j.base.value().cloned().unwrap_or_else(|| qi(0))];
    let mut fact = qi(1);
    for (k, d) in j.derivs.iter().enumerate() {
        fact *= qi(k as i64 + 1);
        c.push(d / &fact);
    }
    let w = UPoly::new(c);
    if j.base.is_infinite() {
        (UPoly::constant(qi(1)), w)
    } else {
        (w, UPoly::constant(qi(1)))
    }
}

fn valuation(p: &UPoly<Q>) -> Option<usize> {
    p.coeffs().iter().position(|c| !c.is_zero())
}

/// Order of vanishing of the curve along the arc defined by a pair of jets,
/// counted only up to the order the jets determine.
pub fn contact_order(curve: &BidegreeCurve, x: &Jet, y: &Jet) -> usize {
    let cap = x.order().min(y.order()) + 1;
    let (ax, ay) = (arc(&x.into()), arc(&y.into()));
    let k = |v: &Q| UPoly::constant(v.clone());
    let val = k(&curve.p)
        .mul(&ax.0)
        .mul(&ay.0)
        .add(&k(&curve.q).mul(&ax.0).mul(&ay.1))
        .add(&k(&curve.r).mul(&ax.1).mul(&ay.0))
        .add(&k(&curve.s).mul(&ax.1).mul(&ay.1));
    valuation(&val).unwrap_or(cap).min(cap)
}

fn singularity(f: &BiMoebiusMap, i: usize) -> Result<MatchedSingularity> {
    let (_, sings) = singularities_of_map(f)?;
    sings.into_iter().nth(i).ok_or(BlowError::NoSuchSingularity(i))
}

fn limit_of(num: UPoly<Q>, den: UPoly<Q>, given: usize, needed: usize) -> Result<P1<Q>> {
    let v = match (valuation(&num), valuation(&den)) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => return Err(BlowError::IndeterminateGerm { given, needed }),
    };
    Ok(P1::from_hom(num.coeff(v), den.coeff(v)).expect("one coefficient is nonzero"))
}

/// Limit of f along the polynomial arc with the given jets through singular
/// point `i`, computed by cancelling the common power of t.
pub fn blowup_limit(f: &BiMoebiusMap, i: usize, germ: (&ArcGerm, &ArcGerm)) -> Result<(P1<Q>, P1<Q>)> {
    let s = singularity(f, i)?;
    if germ.0.base != *s.x.base() || germ.1.base != *s.y.base() {
        return Err(BlowError::GermNotAtSingularity);
    }
    let given = germ.0.order().min(germ.1.order());
    if given < s.multiplicity {
        return Err(BlowError::IndeterminateGerm { given, needed: s.multiplicity });
    }
    let (x, y) = (arc(germ.0), arc(germ.1));
    let (m, l) = (f.m(), f.l());
    let mm: Vec<UPoly<Q>> = m.iter().map(|p| hom_series(p, f.deg_m(), &y)).collect();
    let ll: Vec<UPoly<Q>> = l.iter().map(|p| hom_series(p, f.deg_l(), &x)).collect();
    let u = limit_of(mm[0].mul(&x.0).add(&mm[1].mul(&x.1)), mm[2].mul(&x.0).add(&mm[3].mul(&x.1)), given, s.multiplicity)?;
    let v = limit_of(ll[0].mul(&y.0).add(&ll[1].mul(&y.1)), ll[2].mul(&y.0).add(&ll[3].mul(&y.1)), given, s.multiplicity)?;
    Ok((u, v))
}

/// Curve of limit points in (u, v) at a simple singular point:
/// (c u − a)(C v − A) = ((c′x + d′)u − (a′x + b′))((C′y + D′)v − (A′y + B′)),
/// coefficients taken at (x_i, y_i). Infinite bases are moved to 0 first.
pub fn blowup_curve_equation(f: &BiMoebiusMap, i: usize) -> Result<BidegreeCurve> {
    let s = singularity(f, i)?;
    if s.multiplicity != 1 {
        return Err(BlowError::WrongMultiplicity(s.multiplicity));
    }
    let chart = |p: &P1<Q>| if p.is_infinite() { Moebius::inversion() } else { Moebius::identity() };
    let (mx, my) = (chart(s.x.base()), chart(s.y.base()));
    let id = Moebius::identity();
    let g = f.conjugate(&mx, &my, &id, &id)?;
    let x = mx.apply(s.x.base()).value().cloned().expect("finite after chart");
    let y = my.apply(s.y.base()).value().cloned().expect("finite after chart");
    let (m, l) = (g.m(), g.l());
    let at = |p: &Poly, k: usize, z: &Q| p.deriv_at(k, z);
    let (a, b, c, d) = (&m[0], &m[1], &m[2], &m[3]);
    let (aa, bb, cc, dd) = (&l[0], &l[1], &l[2], &l[3]);
    let (c0, a0) = (at(c, 0, &y), at(a, 0, &y));
    let (cc0, aa0) = (at(cc, 0, &x), at(aa, 0, &x));
    let pu = at(c, 1, &y) * &x + at(d, 1, &y);
    let qu = at(a, 1, &y) * &x + at(b, 1, &y);
    let pv = at(cc, 1, &x) * &y + at(dd, 1, &x);
    let qv = at(aa, 1, &x) * &y + at(bb, 1, &x);
    BidegreeCurve::new(
        &c0 * &cc0 - &pu * &pv,
        -(&c0 * &aa0) + &pu * &qv,
        -(&a0 * &cc0) + &qu * &pv,
        &a0 * &aa0 - &qu * &qv,
    )
    .ok_or_else(|| BlowError::CurveMismatch("blow-up curve vanishes identically".into()))
}
