//! The projective line: homogeneous points, Möbius transformations, the
//! cross-ratio, and jets of parametrized curves.
//!
//! A jet based at infinity stores the derivatives of the chart coordinate w = 1/x.

use std::fmt;

use crate::exactnum::{fmt_q, Field, Q};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProjError {
    #[error("point (0:0) is not on the projective line")]
    ZeroPoint,
    #[error("degenerate Möbius matrix")]
    Degenerate,
    #[error("cross-ratio indeterminate: three or more points coincide")]
    Indeterminate,
    #[error("triple contains a repeated point")]
    RepeatedPoint,
    #[error("time scale gamma1 is zero")]
    ZeroTimeScale,
    #[error("jet has zero velocity")]
    ZeroVelocity,
    #[error("jet of order {carried} cannot supply order {requested}")]
    OrderTooHigh { carried: usize, requested: usize },
}

/// Point of CP^1 as a normalized homogeneous pair: (x : 1) or (1 : 0).
#[derive(Clone, PartialEq, Debug)]
pub struct P1<F: Field> {
    num: F,
    den: F,
}

impl<F: Field> P1<F> {
    pub fn from_hom(num: F, den: F) -> Result<Self, ProjError> {
        if den.is_zero() {
            if num.is_zero() {
                return Err(ProjError::ZeroPoint);
            }
            return Ok(Self::infinity());
        }
        let n = num.div(&den).expect("nonzero denominator");
        Ok(P1 { num: n, den: F::one() })
    }

    pub fn finite(x: F) -> Self {
        P1 { num: x, den: F::one() }
    }

    pub fn infinity() -> Self {
        P1 { num: F::one(), den: F::zero() }
    }

    pub fn is_infinite(&self) -> bool {
        self.den.is_zero()
    }

    /// Affine value, `None` at infinity.
    pub fn value(&self) -> Option<&F> {
        if self.is_infinite() {
            None
        } else {
            Some(&self.num)
        }
    }

    pub fn hom(&self) -> (F, F) {
        (self.num.clone(), self.den.clone())
    }
}

impl fmt::Display for P1<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{}", fmt_q(v)),
            None => write!(f, "inf"),
        }
    }
}

/// [p, q] = p.num q.den - q.num p.den, the homogeneous version of p - q.
pub fn bracket<F: Field>(p: &(F, F), q: &(F, F)) -> F {
    p.0.clone() * q.1.clone() - q.0.clone() * p.1.clone()
}

/// 2x2 matrix acting by x -> (m00 x + m01)/(m10 x + m11).
#[derive(Clone, PartialEq, Debug)]
pub struct Moebius<F: Field> {
    pub m: [[F; 2]; 2],
}

impl<F: Field> Moebius<F> {
    pub fn new(a: F, b: F, c: F, d: F) -> Result<Self, ProjError> {
        let m = Moebius { m: [[a, b], [c, d]] };
        if m.det().is_zero() {
            return Err(ProjError::Degenerate);
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        Moebius { m: [[F::one(), F::zero()], [F::zero(), F::one()]] }
    }

    /// x -> 1/x
    pub fn inversion() -> Self {
        Moebius { m: [[F::zero(), F::one()], [F::one(), F::zero()]] }
    }

    pub fn det(&self) -> F {
        self.m[0][0].clone() * self.m[1][1].clone() - self.m[0][1].clone() * self.m[1][0].clone()
    }

    pub fn apply_hom(&self, p: &(F, F)) -> (F, F) {
        (
            self.m[0][0].clone() * p.0.clone() + self.m[0][1].clone() * p.1.clone(),
            self.m[1][0].clone() * p.0.clone() + self.m[1][1].clone() * p.1.clone(),
        )
    }

    pub fn apply(&self, x: &P1<F>) -> P1<F> {
        let (n, d) = self.apply_hom(&x.hom());
        P1::from_hom(n, d).expect("nondegenerate matrix maps points to points")
    }

    /// Matrix product self * o, i.e. the action of self after o.
    pub fn compose(&self, o: &Self) -> Self {
        let a = &self.m;
        let b = &o.m;
        let e = |i: usize, j: usize| a[i][0].clone() * b[0][j].clone() + a[i][1].clone() * b[1][j].clone();
        Moebius { m: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]] }
    }

    /// Adjugate, which acts as the inverse.
    pub fn inverse(&self) -> Self {
        let m = &self.m;
        Moebius { m: [[m[1][1].clone(), -m[0][1].clone()], [-m[1][0].clone(), m[0][0].clone()]] }
    }

    pub fn scaled(&self, k: &F) -> Self {
        Moebius { m: self.m.clone().map(|r| r.map(|x| x * k.clone())) }
    }

    /// Projective equality of matrices.
    pub fn proj_eq(&self, o: &Self) -> bool {
        let a: Vec<F> = self.m.iter().flatten().cloned().collect();
        let b: Vec<F> = o.m.iter().flatten().cloned().collect();
        (0..4).all(|i| (0..4).all(|j| (a[i].clone() * b[j].clone() - a[j].clone() * b[i].clone()).is_zero()))
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Moebius<G> {
        Moebius { m: [[f(&self.m[0][0]), f(&self.m[0][1])], [f(&self.m[1][0]), f(&self.m[1][1])]] }
    }

    // Sends z1 -> 0, z2 -> 1, z3 -> inf.
    fn to_standard(z: [&P1<F>; 3]) -> Result<Self, ProjError> {
        let h: Vec<(F, F)> = z.iter().map(|p| p.hom()).collect();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            if bracket(&h[i], &h[j]).is_zero() {
                return Err(ProjError::RepeatedPoint);
            }
        }
        let k1 = bracket(&h[1], &h[2]);
        let k2 = bracket(&h[1], &h[0]);
        Ok(Moebius {
            m: [
                [k1.clone() * h[0].1.clone(), -(k1 * h[0].0.clone())],
                [k2.clone() * h[2].1.clone(), -(k2 * h[2].0.clone())],
            ],
        })
    }

    /// The unique Möbius class sending src_i to dst_i.
    pub fn from_triple(src: [&P1<F>; 3], dst: [&P1<F>; 3]) -> Result<Self, ProjError> {
        let s = Self::to_standard(src)?;
        let d = Self::to_standard(dst)?;
        Ok(d.inverse().compose(&s))
    }
}

impl Moebius<Q> {
    /// [[a, b], [c, d]] as rational strings.
    pub fn to_json(&self) -> [[String; 2]; 2] {
        self.m.clone().map(|r| r.map(|v| fmt_q(&v)))
    }

    pub fn from_json(j: &[[String; 2]; 2]) -> Result<Self, ProjError> {
        let q = |s: &String| crate::exactnum::parse_q(s).map_err(|_| ProjError::Degenerate);
        Moebius::new(q(&j[0][0])?, q(&j[0][1])?, q(&j[1][0])?, q(&j[1][1])?)
    }
}

impl fmt::Display for Moebius<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.m;
        write!(f, "[[{}, {}], [{}, {}]]", fmt_q(&m[0][0]), fmt_q(&m[0][1]), fmt_q(&m[1][0]), fmt_q(&m[1][1]))
    }
}

pub fn moebius_apply<F: Field>(m: &Moebius<F>, x: &P1<F>) -> P1<F> {
    m.apply(x)
}

/// Cross-ratio (x1-x2)(x3-x4)/((x2-x3)(x4-x1)), as a point of CP^1.
pub fn cross_ratio<F: Field>(x: [&P1<F>; 4]) -> Result<P1<F>, ProjError> {
    let h: Vec<(F, F)> = x.iter().map(|p| p.hom()).collect();
    let num = bracket(&h[0], &h[1]) * bracket(&h[2], &h[3]);
    let den = bracket(&h[1], &h[2]) * bracket(&h[3], &h[0]);
    P1::from_hom(num, den).map_err(|_| ProjError::Indeterminate)
}

/// Point of CP^1 with up to three derivatives of a regular parametrized curve.
#[derive(Clone, PartialEq, Debug)]
pub struct Jet {
    base: P1<Q>,
    d: Vec<Q>,
}

impl Jet {
    pub fn new(base: P1<Q>, derivs: Vec<Q>) -> Result<Self, ProjError> {
        assert!(derivs.len() <= 3, "jets carry at most three derivatives");
        if derivs.first().is_some_and(|v| v.is_zero()) {
            return Err(ProjError::ZeroVelocity);
        }
        Ok(Jet { base, d: derivs })
    }

    pub fn point(base: P1<Q>) -> Self {
        Jet { base, d: vec![] }
    }

    pub fn base(&self) -> &P1<Q> {
        &self.base
    }

    pub fn order(&self) -> usize {
        self.d.len()
    }

    pub fn derivs(&self) -> &[Q] {
        &self.d
    }

    /// k-th derivative, k >= 1.
    pub fn deriv(&self, k: usize) -> Result<&Q, ProjError> {
        self.d.get(k - 1).ok_or(ProjError::OrderTooHigh { carried: self.d.len(), requested: k })
    }

    /// Coordinate of the base in its chart (x itself, or w = 1/x = 0 at infinity).
    pub fn chart_value(&self) -> Q {
        self.base.value().cloned().unwrap_or_else(Q::zero)
    }

    pub fn truncate(&self, order: usize) -> Result<Jet, ProjError> {
        if order > self.d.len() {
            return Err(ProjError::OrderTooHigh { carried: self.d.len(), requested: order });
        }
        Ok(Jet { base: self.base.clone(), d: self.d[..order].to_vec() })
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.base)?;
        for v in &self.d {
            write!(f, ", {}", fmt_q(v))?;
        }
        write!(f, ")")
    }
}

fn chart_of(p: &P1<Q>) -> Moebius<Q> {
    if p.is_infinite() {
        Moebius::inversion()
    } else {
        Moebius::identity()
    }
}

/// Chain-rule image of a jet under a Möbius transformation.
pub fn jet_pushforward(m: &Moebius<Q>, j: &Jet) -> Jet {
    let image = m.apply(&j.base);
    // g expresses the target chart coordinate as a function of the source one.
    let g = chart_of(&image).compose(m).compose(&chart_of(&j.base));
    let t0 = j.chart_value();
    let (c, d) = (g.m[1][0].clone(), g.m[1][1].clone());
    let delta = g.det();
    let e = c.clone() * t0 + d;
    debug_assert!(!e.is_zero());
    let e2 = e.clone() * e.clone();
    let g1 = delta.clone() / e2.clone();
    let g2 = -(Q::from_i64(2) * c.clone() * delta.clone()) / (e2.clone() * e.clone());
    let g3 = Q::from_i64(6) * c.clone() * c * delta / (e2.clone() * e2);
    let mut out = Vec::with_capacity(j.d.len());
    if let Some(x1) = j.d.first() {
        out.push(g1.clone() * x1.clone());
    }
    if let Some(x2) = j.d.get(1) {
        let x1 = &j.d[0];
        out.push(g2.clone() * x1 * x1 + g1.clone() * x2);
    }
    if let Some(x3) = j.d.get(2) {
        let (x1, x2) = (&j.d[0], &j.d[1]);
        out.push(g3 * x1 * x1 * x1 + Q::from_i64(3) * g2 * x1 * x2 + g1 * x3);
    }
    Jet { base: image, d: out }
}

/// Time change t = t(s) with t' = g1, t'' = g2, t''' = g3 applied to the carried derivatives.
pub fn jet_reparametrize(j: &Jet, g1: &Q, g2: &Q, g3: &Q) -> Result<Jet, ProjError> {
    if g1.is_zero() {
        return Err(ProjError::ZeroTimeScale);
    }
    let mut out = Vec::with_capacity(j.d.len());
    if let Some(x1) = j.d.first() {
        out.push(x1 * g1);
    }
    if let Some(x2) = j.d.get(1) {
        out.push(x2 * g1 * g1 + &j.d[0] * g2);
    }
    if let Some(x3) = j.d.get(2) {
        out.push(x3 * g1 * g1 * g1 + Q::from_i64(3) * &j.d[1] * g2 * g1 + &j.d[0] * g3);
    }
    Ok(Jet { base: j.base.clone(), d: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{qf, qi};

    fn p(n: i64) -> P1<Q> {
        P1::finite(qi(n))
    }

    #[test]
    fn apply_examples() {
        assert_eq!(Moebius::<Q>::identity().apply(&p(5)), p(5));
        assert_eq!(Moebius::<Q>::inversion().apply(&p(2)), P1::finite(qf(1, 2)));
        let t = Moebius::new(qi(1), qi(1), qi(0), qi(1)).unwrap();
        assert_eq!(t.apply(&P1::infinity()), P1::infinity());
        assert_eq!(Moebius::new(qi(1), qi(2), qi(2), qi(4)), Err(ProjError::Degenerate));
    }

    #[test]
    fn pushforward_examples() {
        let j = Jet::new(p(2), vec![qi(1)]).unwrap();
        assert_eq!(jet_pushforward(&Moebius::identity(), &j), j);
        let inv = jet_pushforward(&Moebius::inversion(), &j);
        assert_eq!(inv.base(), &P1::finite(qf(1, 2)));
        assert_eq!(inv.derivs(), &[qf(-1, 4)]);
        let shift = Moebius::new(qi(1), qi(7), qi(0), qi(1)).unwrap();
        let j3 = Jet::new(p(2), vec![qi(1), qi(3), qi(-2)]).unwrap();
        assert_eq!(jet_pushforward(&shift, &j3).derivs(), j3.derivs());
    }

    #[test]
    fn pushforward_through_infinity_uses_chart() {
        // x -> 1/x sends 0 to infinity; the chart coordinate there is w = 1/(1/x) = x
        let j = Jet::new(p(0), vec![qi(3), qi(5), qi(7)]).unwrap();
        let k = jet_pushforward(&Moebius::inversion(), &j);
        assert!(k.base().is_infinite());
        assert_eq!(k.derivs(), j.derivs());
        assert_eq!(jet_pushforward(&Moebius::inversion(), &k), j);
    }

    #[test]
    fn reparametrize_examples() {
        let j = Jet::new(p(0), vec![qi(2), qi(4)]).unwrap();
        let r = jet_reparametrize(&j, &qf(1, 2), &qi(0), &qi(0)).unwrap();
        assert_eq!(r.derivs(), &[qi(1), qi(1)]);
        assert_eq!(jet_reparametrize(&j, &qi(1), &qi(0), &qi(0)).unwrap(), j);
        assert_eq!(jet_reparametrize(&j, &qi(0), &qi(1), &qi(0)), Err(ProjError::ZeroTimeScale));
        assert_eq!(j.truncate(3), Err(ProjError::OrderTooHigh { carried: 2, requested: 3 }));
    }

    #[test]
    fn cross_ratio_examples() {
        let a = qi(5);
        assert_eq!(cross_ratio([&P1::infinity(), &p(1), &p(0), &P1::finite(a.clone())]).unwrap(), P1::finite(a));
        assert_eq!(cross_ratio([&p(0), &p(1), &p(2), &p(3)]).unwrap(), P1::finite(qf(-1, 3)));
        assert_eq!(cross_ratio([&p(1), &p(1), &p(1), &p(3)]), Err(ProjError::Indeterminate));
    }

    #[test]
    fn triple_examples() {
        let src = [p(0), p(1), p(2)];
        let dst = [P1::infinity(), p(1), p(0)];
        let m = Moebius::from_triple([&src[0], &src[1], &src[2]], [&dst[0], &dst[1], &dst[2]]).unwrap();
        for i in 0..3 {
            assert_eq!(m.apply(&src[i]), dst[i]);
        }
        assert_eq!(m.apply(&p(3)), P1::finite(qf(-1, 3)));
        let id = Moebius::from_triple([&p(0), &p(1), &P1::infinity()], [&p(0), &p(1), &P1::infinity()]).unwrap();
        assert!(id.proj_eq(&Moebius::identity()));
        assert_eq!(
            Moebius::from_triple([&p(0), &p(0), &p(2)], [&dst[0], &dst[1], &dst[2]]),
            Err(ProjError::RepeatedPoint)
        );
    }
}
