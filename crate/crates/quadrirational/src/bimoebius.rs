//! Bi-Möbius maps u = M(y)[x], v = L(x)[y] with M = (a b; c d) polynomial in y
//! and L = (A B; C D) polynomial in x, each of degree at most 2.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exactnum::{de_rational_strings, fmt_q, parse_q, Field, MPoly, UPoly, Q, VU, VV, VX, VY};
use crate::projline::{Moebius, P1};

pub type Poly = UPoly<Q>;

/// Coefficients a, b, c, d (or A, B, C, D) of a polynomial 2x2 matrix.
pub type Quad = [Poly; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Nondegeneracy {
    /// u_x v_y - u_y v_x is not identically zero
    Jacobian,
    /// r(y) = ad - bc and R(x) = AD - BC are not identically zero
    Determinants,
    /// u depends on y and v depends on x
    CrossDependence,
}

impl fmt::Display for Nondegeneracy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Nondegeneracy::Jacobian => "(i) u_x v_y - u_y v_x vanishes identically",
            Nondegeneracy::Determinants => "(ii) r(y) or R(x) vanishes identically",
            Nondegeneracy::CrossDependence => "(iii) u_y or v_x vanishes identically",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MapError {
    #[error("coefficient polynomial of degree {0} exceeds 2")]
    DegreeTooHigh(usize),
    #[error("nondegeneracy condition violated: {0}")]
    Violates(Nondegeneracy),
    #[error("input is a singular point of the map")]
    SingularInput,
    #[error("map is not quadrirational: {0}")]
    NotQuadrirational(String),
    #[error("construction degenerates: the relation loses its y-dependence")]
    Degenerate,
    #[error("expected x-degree 2, found {0}")]
    DegreeMismatch(u32),
    #[error("bad map JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subclass {
    OneOne,
    OneTwo,
    TwoTwo,
}

impl fmt::Display for Subclass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Subclass::OneOne => "[1:1]",
            Subclass::OneTwo => "[1:2]",
            Subclass::TwoTwo => "[2:2]",
        })
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct BiMoebiusMap {
    m: Quad,
    l: Quad,
}

fn max_deg(q: &Quad) -> usize {
    q.iter().map(|p| p.deg0()).max().unwrap()
}

// Divides out a nonconstant common factor; the map is unchanged projectively.
fn reduce(q: Quad) -> Quad {
    let g = q.iter().fold(Poly::zero(), |g, p| g.gcd(p));
    if g.deg0() == 0 {
        return q;
    }
    q.map(|p| p.div_exact(&g).expect("gcd divides"))
}

fn adjugate(q: &Quad) -> Quad {
    [q[3].clone(), q[1].neg(), q[2].neg(), q[0].clone()]
}

fn det(q: &Quad) -> Poly {
    q[0].mul(&q[3]).sub(&q[1].mul(&q[2]))
}

fn lift(p: &Poly, var: usize) -> MPoly {
    MPoly::from_upoly(p, var)
}

/// sum p_i t1^i t0^(k-i)
fn hom_subst(p: &Poly, k: usize, t1: &MPoly, t0: &MPoly) -> MPoly {
    let mut acc = MPoly::zero();
    for (i, c) in p.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        acc = acc.add(&t1.pow(i as u32).mul(&t0.pow((k - i) as u32)).scale(c));
    }
    acc
}

// Numerator of d/dy (a(y)x + b(y))/(c(y)x + d(y)), with x in `xv` and y in `yv`.
fn cross_derivative(q: &Quad, xv: usize, yv: usize) -> MPoly {
    let x = MPoly::var(xv);
    let num = x.mul(&lift(&q[0], yv)).add(&lift(&q[1], yv));
    let den = x.mul(&lift(&q[2], yv)).add(&lift(&q[3], yv));
    num.derivative(yv).mul(&den).sub(&num.mul(&den.derivative(yv)))
}

/// Coefficients of the second component of the companion map (u, y) -> (x, v),
/// as polynomials in u: the Â, B̂, Ĉ, D̂ with v = (Â(u)y + B̂(u))/(Ĉ(u)y + D̂(u)).
/// The common y-factor of p(y,u), q(y,u) is removed by a gcd over Q[y].
fn hat_second(m: &Quad, l: &Quad) -> Result<Quad, MapError> {
    let k = max_deg(l);
    let u = MPoly::var(VU);
    let my = |i: usize| lift(&m[i], VY);
    let t1 = u.mul(&my(3)).sub(&my(1));
    let t0 = my(0).sub(&u.mul(&my(2)));
    let y = MPoly::var(VY);
    let h: Vec<MPoly> = l.iter().map(|p| hom_subst(p, k, &t1, &t0)).collect();
    let p = h[0].mul(&y).add(&h[1]);
    let q = h[2].mul(&y).add(&h[3]);
    let du = p.deg_in(VU).max(q.deg_in(VU));
    let mut parts: Vec<(Poly, Poly)> = Vec::new();
    for j in 0..=du {
        let pj = p.coeff_of(VU, j).to_upoly(VY).expect("y only");
        let qj = q.coeff_of(VU, j).to_upoly(VY).expect("y only");
        parts.push((pj, qj));
    }
    let g = parts.iter().fold(Poly::zero(), |g, (a, b)| g.gcd(a).gcd(b));
    if g.is_zero() {
        return Err(MapError::NotQuadrirational("companion numerator and denominator vanish".into()));
    }
    let mut out: Quad = std::array::from_fn(|_| Poly::zero());
    for (j, (pj, qj)) in parts.iter().enumerate() {
        let pj = pj.div_exact(&g).expect("gcd divides");
        let qj = qj.div_exact(&g).expect("gcd divides");
        if pj.deg0() > 1 || qj.deg0() > 1 {
            return Err(MapError::NotQuadrirational(format!(
                "companion component has degree {} in y",
                pj.deg0().max(qj.deg0())
            )));
        }
        let mono = |c: Q| {
            let mut v = vec![Q::zero(); j + 1];
            v[j] = c;
            Poly::new(v)
        };
        out[0] = out[0].add(&mono(pj.coeff(1)));
        out[1] = out[1].add(&mono(pj.coeff(0)));
        out[2] = out[2].add(&mono(qj.coeff(1)));
        out[3] = out[3].add(&mono(qj.coeff(0)));
    }
    Ok(out)
}

fn poly_eval_hom<F: Field>(p: &Poly, k: usize, t: &(F, F)) -> F {
    p.map(|c| F::from_q(c).expect("coefficient denominators are invertible")).eval_hom(k, &t.0, &t.1)
}

impl BiMoebiusMap {
    /// Validated constructor: rejects coefficient degree > 2 and any violated
    /// nondegeneracy condition.
    pub fn new(m: Quad, l: Quad) -> Result<Self, MapError> {
        let f = Self::new_unchecked(m, l)?;
        f.check_nondegenerate()?;
        Ok(f)
    }

    /// Skips the nondegeneracy checks; used for the degenerate transposition.
    pub fn new_unchecked(m: Quad, l: Quad) -> Result<Self, MapError> {
        for p in m.iter().chain(l.iter()) {
            if p.deg0() > 2 {
                return Err(MapError::DegreeTooHigh(p.deg0()));
            }
        }
        Ok(BiMoebiusMap { m: reduce(m), l: reduce(l) })
    }

    /// Convenience constructor from integer/rational coefficient lists, low degree first.
    pub fn from_coeffs(m: [&[Q]; 4], l: [&[Q]; 4]) -> Result<Self, MapError> {
        Self::new(m.map(|c| Poly::new(c.to_vec())), l.map(|c| Poly::new(c.to_vec())))
    }

    /// a(y), b(y), c(y), d(y)
    pub fn m(&self) -> &Quad {
        &self.m
    }

    /// A(x), B(x), C(x), D(x)
    pub fn l(&self) -> &Quad {
        &self.l
    }

    /// r(y) = ad - bc
    pub fn r(&self) -> Poly {
        det(&self.m)
    }

    /// R(x) = AD - BC
    pub fn big_r(&self) -> Poly {
        det(&self.l)
    }

    pub fn deg_m(&self) -> usize {
        max_deg(&self.m)
    }

    pub fn deg_l(&self) -> usize {
        max_deg(&self.l)
    }

    pub fn check_nondegenerate(&self) -> Result<(), MapError> {
        if self.r().is_zero() || self.big_r().is_zero() {
            return Err(MapError::Violates(Nondegeneracy::Determinants));
        }
        let uy = cross_derivative(&self.m, VX, VY);
        let vx = cross_derivative(&self.l, VY, VX);
        if uy.is_zero() || vx.is_zero() {
            return Err(MapError::Violates(Nondegeneracy::CrossDependence));
        }
        // u_x v_y - u_y v_x with the squared denominators cleared
        let jac = lift(&self.r(), VY).mul(&lift(&self.big_r(), VX)).sub(&uy.mul(&vx));
        if jac.is_zero() {
            return Err(MapError::Violates(Nondegeneracy::Jacobian));
        }
        Ok(())
    }

    /// Homogeneous evaluation with no division; a component may come out (0, 0)
    /// at a singular point. Each output coordinate is a polynomial in the inputs.
    pub fn eval_hom<F: Field>(&self, x: &(F, F), y: &(F, F)) -> ((F, F), (F, F)) {
        let (km, kl) = (self.deg_m(), self.deg_l());
        let mm: Vec<F> = self.m.iter().map(|p| poly_eval_hom(p, km, y)).collect();
        let ll: Vec<F> = self.l.iter().map(|p| poly_eval_hom(p, kl, x)).collect();
        let u = (
            mm[0].clone() * x.0.clone() + mm[1].clone() * x.1.clone(),
            mm[2].clone() * x.0.clone() + mm[3].clone() * x.1.clone(),
        );
        let v = (
            ll[0].clone() * y.0.clone() + ll[1].clone() * y.1.clone(),
            ll[2].clone() * y.0.clone() + ll[3].clone() * y.1.clone(),
        );
        (u, v)
    }

    /// Output degrees: `[[deg_x u, deg_y u], [deg_x v, deg_y v]]` of the homogeneous components.
    pub fn degrees(&self) -> [[u32; 2]; 2] {
        [[1, self.deg_m() as u32], [self.deg_l() as u32, 1]]
    }

    pub fn eval_field<F: Field>(&self, x: &P1<F>, y: &P1<F>) -> Result<(P1<F>, P1<F>), MapError> {
        let (u, v) = self.eval_hom(&x.hom(), &y.hom());
        let u = P1::from_hom(u.0, u.1).map_err(|_| MapError::SingularInput)?;
        let v = P1::from_hom(v.0, v.1).map_err(|_| MapError::SingularInput)?;
        Ok((u, v))
    }

    pub fn eval(&self, x: &P1<Q>, y: &P1<Q>) -> Result<(P1<Q>, P1<Q>), MapError> {
        self.eval_field(x, y)
    }

    /// The M(y) matrix evaluated at a finite y.
    pub fn m_at(&self, y: &Q) -> Moebius<Q> {
        let e: Vec<Q> = self.m.iter().map(|p| p.eval(y)).collect();
        Moebius { m: [[e[0].clone(), e[1].clone()], [e[2].clone(), e[3].clone()]] }
    }

    /// The L(x) matrix evaluated at a finite x.
    pub fn l_at(&self, x: &Q) -> Moebius<Q> {
        let e: Vec<Q> = self.l.iter().map(|p| p.eval(x)).collect();
        Moebius { m: [[e[0].clone(), e[1].clone()], [e[2].clone(), e[3].clone()]] }
    }

    /// φ(x, y, u) = c(y)xu + d(y)u - a(y)x - b(y)
    pub fn phi(&self) -> MPoly {
        let (x, u) = (MPoly::var(VX), MPoly::var(VU));
        let m = |i: usize| lift(&self.m[i], VY);
        x.mul(&u).mul(&m(2)).add(&u.mul(&m(3))).sub(&x.mul(&m(0))).sub(&m(1))
    }

    /// Φ(y, x, v) = C(x)yv + D(x)v - A(x)y - B(x)
    pub fn big_phi(&self) -> MPoly {
        let (y, v) = (MPoly::var(VY), MPoly::var(VV));
        let l = |i: usize| lift(&self.l[i], VX);
        y.mul(&v).mul(&l(2)).add(&v.mul(&l(3))).sub(&y.mul(&l(0))).sub(&l(1))
    }

    pub fn subclass(&self) -> Subclass {
        match (self.deg_m(), self.deg_l()) {
            (2, 2) => Subclass::TwoTwo,
            (1, 1) => Subclass::OneOne,
            _ => Subclass::OneTwo,
        }
    }

    /// Swap of the roles x <-> y, u <-> v.
    pub fn transpose(&self) -> Self {
        BiMoebiusMap { m: self.l.clone(), l: self.m.clone() }
    }

    /// The companion map (u, y) -> (x, v), returned with u in the first input slot.
    pub fn companion(&self) -> Result<Self, MapError> {
        let l = hat_second(&self.m, &self.l)?;
        Self::new(adjugate(&self.m), l).map_err(|e| MapError::NotQuadrirational(e.to_string()))
    }

    /// The companion map (x, v) -> (u, y), returned with outputs ordered (u, y).
    pub fn companion_inv(&self) -> Result<Self, MapError> {
        Ok(self.transpose().companion()?.transpose())
    }

    pub fn inverse(&self) -> Result<Self, MapError> {
        if let Some((g, h)) = self.swap_parts() {
            // u = g(y), v = h(x)  =>  x = h^-1(v), y = g^-1(u)
            let hi = h.inverse();
            let gi = g.inverse();
            let m = [Poly::zero(), Poly::new(vec![hi.m[0][1].clone(), hi.m[0][0].clone()]), Poly::zero(), Poly::new(vec![hi.m[1][1].clone(), hi.m[1][0].clone()])];
            let l = [Poly::zero(), Poly::new(vec![gi.m[0][1].clone(), gi.m[0][0].clone()]), Poly::zero(), Poly::new(vec![gi.m[1][1].clone(), gi.m[1][0].clone()])];
            return Self::new_unchecked(m, l);
        }
        let hat_l = hat_second(&self.m, &self.l)?;
        let hat_m = hat_second(&self.l, &self.m)?;
        Self::new(adjugate(&hat_m), adjugate(&hat_l)).map_err(|e| MapError::NotQuadrirational(e.to_string()))
    }

    /// For maps of the form u = g(y), v = h(x) with g, h Möbius, returns (g, h).
    pub fn swap_parts(&self) -> Option<(Moebius<Q>, Moebius<Q>)> {
        let part = |q: &Quad| -> Option<Moebius<Q>> {
            if !(q[0].is_zero() && q[2].is_zero()) || q[1].deg0() > 1 || q[3].deg0() > 1 {
                return None;
            }
            Moebius::new(q[1].coeff(1), q[1].coeff(0), q[3].coeff(1), q[3].coeff(0)).ok()
        };
        Some((part(&self.m)?, part(&self.l)?))
    }

    pub fn is_quadrirational(&self) -> bool {
        self.check_nondegenerate().is_ok() && self.companion().is_ok() && self.companion_inv().is_ok()
    }

    /// Change of variables x' = mx(x), y' = my(y), u' = mu(u), v' = mv(v).
    pub fn conjugate(&self, mx: &Moebius<Q>, my: &Moebius<Q>, mu: &Moebius<Q>, mv: &Moebius<Q>) -> Result<Self, MapError> {
        let m = conj_quad(&self.m, self.deg_m(), &my.inverse(), mu, &mx.inverse());
        let l = conj_quad(&self.l, self.deg_l(), &mx.inverse(), mv, &my.inverse());
        Self::new(m, l)
    }

    pub fn to_json(&self) -> MapJson {
        let s = |p: &Poly| p.coeffs().iter().map(fmt_q).collect::<Vec<_>>();
        MapJson {
            a: s(&self.m[0]),
            b: s(&self.m[1]),
            c: s(&self.m[2]),
            d: s(&self.m[3]),
            big_a: s(&self.l[0]),
            big_b: s(&self.l[1]),
            big_c: s(&self.l[2]),
            big_d: s(&self.l[3]),
        }
    }

    /// Parses and validates; degenerate maps are accepted only through `from_json_unchecked`.
    pub fn from_json(j: &MapJson) -> Result<Self, MapError> {
        let (m, l) = j.quads()?;
        Self::new(m, l)
    }

    pub fn from_json_unchecked(j: &MapJson) -> Result<Self, MapError> {
        let (m, l) = j.quads()?;
        Self::new_unchecked(m, l)
    }
}

// Coefficient matrix of outer * M(inner_subst(t)) * right, with the substitution
// done homogeneously at degree k.
/// M'(y') = outer · M(subst(y')) · right, with the substitution done at homogeneous degree k.
pub fn conj_quad(q: &Quad, k: usize, subst: &Moebius<Q>, outer: &Moebius<Q>, right: &Moebius<Q>) -> Quad {
    let s = &subst.m;
    let sub: Vec<Poly> = q.iter().map(|p| p.moebius_substitute(k, [&s[0][0], &s[0][1], &s[1][0], &s[1][1]])).collect();
    let mat = [[sub[0].clone(), sub[1].clone()], [sub[2].clone(), sub[3].clone()]];
    let c = |x: &Q| Poly::constant(x.clone());
    let mul = |a: [[Poly; 2]; 2], b: [[Poly; 2]; 2]| -> [[Poly; 2]; 2] {
        std::array::from_fn(|i| std::array::from_fn(|j| a[i][0].mul(&b[0][j]).add(&a[i][1].mul(&b[1][j]))))
    };
    let o = [[c(&outer.m[0][0]), c(&outer.m[0][1])], [c(&outer.m[1][0]), c(&outer.m[1][1])]];
    let r = [[c(&right.m[0][0]), c(&right.m[0][1])], [c(&right.m[1][0]), c(&right.m[1][1])]];
    let res = mul(mul(o, mat), r);
    let [[a, b], [cc, d]] = res;
    [a, b, cc, d]
}

/// Wire format: eight coefficient lists of rational strings, low degree first.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct MapJson {
    #[serde(deserialize_with = "de_rational_strings")]
    pub a: Vec<String>,
    #[serde(deserialize_with = "de_rational_strings")]
    pub b: Vec<String>,
    #[serde(deserialize_with = "de_rational_strings")]
    pub c: Vec<String>,
    #[serde(deserialize_with = "de_rational_strings")]
    pub d: Vec<String>,
    #[serde(rename = "A", deserialize_with = "de_rational_strings")]
    pub big_a: Vec<String>,
    #[serde(rename = "B", deserialize_with = "de_rational_strings")]
    pub big_b: Vec<String>,
    #[serde(rename = "C", deserialize_with = "de_rational_strings")]
    pub big_c: Vec<String>,
    #[serde(rename = "D", deserialize_with = "de_rational_strings")]
    pub big_d: Vec<String>,
}

impl MapJson {
    fn quads(&self) -> Result<(Quad, Quad), MapError> {
        let p = |v: &Vec<String>| -> Result<Poly, MapError> {
            if v.len() > 3 {
                return Err(MapError::Json(format!("{} coefficients, at most 3 allowed", v.len())));
            }
            let c = v.iter().map(|s| parse_q(s).map_err(|e| MapError::Json(e.to_string()))).collect::<Result<Vec<_>, _>>()?;
            Ok(Poly::new(c))
        };
        Ok((
            [p(&self.a)?, p(&self.b)?, p(&self.c)?, p(&self.d)?],
            [p(&self.big_a)?, p(&self.big_b)?, p(&self.big_c)?, p(&self.big_d)?],
        ))
    }
}

impl fmt::Display for BiMoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.m;
        let l = &self.l;
        write!(
            f,
            "u = (({})x + {})/(({})x + {}), v = (({})y + {})/(({})y + {})",
            m[0], m[1], m[2], m[3], l[0], l[1], l[2], l[3]
        )
    }
}

fn content_y(p: &MPoly, vars: [usize; 2]) -> Poly {
    let mut g = Poly::zero();
    for i in 0..=p.deg_in(vars[0]) {
        let pi = p.coeff_of(vars[0], i);
        for j in 0..=pi.deg_in(vars[1]) {
            let c = pi.coeff_of(vars[1], j).to_upoly(VY).expect("remaining variable is y");
            g = g.gcd(&c);
        }
    }
    g
}

// Reads a..d off φ = c xu + d u - a x - b, after removing its y-content.
fn quad_from_phi(phi: &MPoly) -> Result<Quad, MapError> {
    let g = content_y(phi, [VX, VU]);
    if g.is_zero() {
        return Err(MapError::Degenerate);
    }
    let phi = phi.div_exact(&MPoly::from_upoly(&g, VY)).expect("content divides");
    if !phi.depends_on(VY) {
        return Err(MapError::Degenerate);
    }
    let part = |i: u32, j: u32| phi.coeff_of(VX, i).coeff_of(VU, j).to_upoly(VY).expect("y only");
    Ok([part(1, 0).neg(), part(0, 0).neg(), part(1, 1), part(0, 1)])
}

// Reads A..D off Φ = C yv + D v - A y - B (polynomials in x).
fn quad_from_big_phi(big_phi: &MPoly) -> Quad {
    let part = |i: u32, j: u32| big_phi.coeff_of(VY, i).coeff_of(VV, j).to_upoly(VX).expect("x only");
    [part(1, 0).neg(), part(0, 0).neg(), part(1, 1), part(0, 1)]
}

/// Map defined by Φ(y, x, v) and Φ̂(y, u, v), both linear in each variable
/// (Φ in variables y, x, v; Φ̂ in y, u, v).
pub fn from_semilinear_pair(big_phi: &MPoly, big_phi_hat: &MPoly) -> Result<BiMoebiusMap, MapError> {
    if big_phi.is_zero() || big_phi_hat.is_zero() {
        return Err(MapError::Degenerate);
    }
    let e = big_phi.mul(&big_phi_hat.derivative(VV)).sub(&big_phi.derivative(VV).mul(big_phi_hat));
    let m = quad_from_phi(&e)?;
    let l = quad_from_big_phi(big_phi);
    BiMoebiusMap::new(m, l).map_err(|_| MapError::Degenerate)
}

/// Map defined by Φ(y, x, v) (quadratic in x) and Φ̂(y,u,v) = (γu+δ)^2 Φ(y, (αu+β)/(γu+δ), v).
pub fn from_quadratic_phi(big_phi: &MPoly, mob: &Moebius<Q>) -> Result<BiMoebiusMap, MapError> {
    let dx = big_phi.deg_in(VX);
    if dx != 2 {
        return Err(MapError::DegreeMismatch(dx));
    }
    let [[al, be], [ga, de]] = mob.m.clone();
    let u = MPoly::var(VU);
    let t1 = u.scale(&al).add(&MPoly::constant(be.clone()));
    let t0 = u.scale(&ga).add(&MPoly::constant(de.clone()));
    let mut hat = MPoly::zero();
    for i in 0..=2u32 {
        let ci = big_phi.coeff_of(VX, i);
        hat = hat.add(&ci.mul(&t1.pow(i)).mul(&t0.pow(2 - i)));
    }
    let e = big_phi.mul(&hat.derivative(VV)).sub(&big_phi.derivative(VV).mul(&hat));
    let x = MPoly::var(VX);
    let mu = x.mul(&u).scale(&ga).add(&x.scale(&de)).sub(&u.scale(&al)).sub(&MPoly::constant(be));
    let phi = e.div_exact(&mu).ok_or_else(|| MapError::NotQuadrirational("x-u factor missing".into()))?;
    let m = quad_from_phi(&phi)?;
    BiMoebiusMap::new(m, quad_from_big_phi(big_phi))
}
