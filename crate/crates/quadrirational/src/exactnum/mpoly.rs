use std::collections::BTreeMap;
use std::fmt;


use super::field::{de_rational_string, fmt_q, parse_q, Field, ParseRationalError, Q};
use super::upoly::UPoly;

/// Number of variables carried by every `MPoly`: x, y, u, v.
pub const NV: usize = 4;
pub const VX: usize = 0;
pub const VY: usize = 1;
pub const VU: usize = 2;
pub const VV: usize = 3;
const NAMES: [&str; NV] = ["x", "y", "u", "v"];

pub type Exp = [u32; NV];

/// Polynomial in x, y, u, v over the rationals, indexed by exponent tuple.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct MPoly {
    terms: BTreeMap<Exp, Q>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly::default()
    }

    pub fn constant(c: Q) -> Self {
        Self::monomial(c, [0; NV])
    }

    pub fn var(i: usize) -> Self {
        let mut e = [0; NV];
        e[i] = 1;
        Self::monomial(Q::from_i64(1), e)
    }

    pub fn monomial(c: Q, e: Exp) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        MPoly { terms }
    }

    /// Lifts a univariate polynomial into variable `var`.
    pub fn from_upoly(p: &UPoly<Q>, var: usize) -> Self {
        let mut r = MPoly::zero();
        for (i, c) in p.coeffs().iter().enumerate() {
            let mut e = [0; NV];
            e[var] = i as u32;
            r.add_term(e, c.clone());
        }
        r
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exp, &Q)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, e: Exp, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, o: &MPoly) -> MPoly {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(*e, c.clone());
        }
        r
    }

    pub fn sub(&self, o: &MPoly) -> MPoly {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(*e, -c.clone());
        }
        r
    }

    pub fn scale(&self, k: &Q) -> MPoly {
        let mut r = MPoly::zero();
        for (e, c) in &self.terms {
            r.add_term(*e, c * k);
        }
        r
    }

    pub fn mul(&self, o: &MPoly) -> MPoly {
        let mut r = MPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let mut e = [0; NV];
                for i in 0..NV {
                    e[i] = e1[i] + e2[i];
                }
                r.add_term(e, c1 * c2);
            }
        }
        r
    }

    pub fn pow(&self, n: u32) -> MPoly {
        let mut r = MPoly::constant(Q::from_i64(1));
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }

    pub fn deg_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn depends_on(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e[var] > 0)
    }

    pub fn derivative(&self, var: usize) -> MPoly {
        let mut r = MPoly::zero();
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut f = *e;
            f[var] -= 1;
            r.add_term(f, c * Q::from_i64(e[var] as i64));
        }
        r
    }

    /// Coefficient of var^k, as a polynomial in the remaining variables.
    pub fn coeff_of(&self, var: usize, k: u32) -> MPoly {
        let mut r = MPoly::zero();
        for (e, c) in &self.terms {
            if e[var] == k {
                let mut f = *e;
                f[var] = 0;
                r.add_term(f, c.clone());
            }
        }
        r
    }

    /// Views a polynomial depending only on `var` as univariate.
    pub fn to_upoly(&self, var: usize) -> Option<UPoly<Q>> {
        let n = self.deg_in(var) as usize;
        let mut c = vec![Q::zero(); n + 1];
        for (e, k) in &self.terms {
            if (0..NV).any(|i| i != var && e[i] != 0) {
                return None;
            }
            c[e[var] as usize] = k.clone();
        }
        Some(UPoly::new(c))
    }

    /// Evaluates with all variables bound.
    pub fn eval(&self, at: &[Q; NV]) -> Q {
        let mut acc = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for i in 0..NV {
                if e[i] > 0 {
                    t *= Field::pow(&at[i], e[i]);
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitutes a univariate polynomial (in the same variable set) for `var`.
    pub fn substitute(&self, var: usize, val: &MPoly) -> MPoly {
        let mut r = MPoly::zero();
        let n = self.deg_in(var);
        for k in 0..=n {
            let ck = self.coeff_of(var, k);
            if !ck.is_zero() {
                r = r.add(&ck.mul(&val.pow(k)));
            }
        }
        r
    }

    fn lead(&self) -> Option<(&Exp, &Q)> {
        self.terms.iter().next_back()
    }

    /// Exact multivariate division under lex order x > y > u > v;
    /// `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &MPoly) -> Option<MPoly> {
        let (de, dc) = d.lead()?;
        let (de, dc) = (*de, dc.clone());
        let mut rem = self.clone();
        let mut q = MPoly::zero();
        while let Some((re, rc)) = rem.lead() {
            let (re, rc) = (*re, rc.clone());
            if (0..NV).any(|i| re[i] < de[i]) {
                return None;
            }
            let mut e = [0; NV];
            for i in 0..NV {
                e[i] = re[i] - de[i];
            }
            let t = MPoly::monomial(rc / &dc, e);
            rem = rem.sub(&t.mul(d));
            q = q.add(&t);
        }
        Some(q)
    }
}

/// One term of the wire format: coefficient and exponents of (x, y, u, v).
#[derive(serde::Serialize, serde::Deserialize, Debug, Clone, PartialEq)]
pub struct TermJson {
    #[serde(deserialize_with = "de_rational_string")]
    pub coeff: String,
    pub exp: Exp,
}

impl MPoly {
    /// Terms in increasing exponent order.
    pub fn to_json(&self) -> Vec<TermJson> {
        self.terms.iter().map(|(e, c)| TermJson { coeff: fmt_q(c), exp: *e }).collect()
    }

    /// Repeated exponents are summed.
    pub fn from_json(terms: &[TermJson]) -> Result<Self, ParseRationalError> {
        let mut r = MPoly::zero();
        for t in terms {
            r.add_term(t.exp, parse_q(&t.coeff)?);
        }
        Ok(r)
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", fmt_q(c))?;
            for i in 0..NV {
                match e[i] {
                    0 => {}
                    1 => write!(f, "{}", NAMES[i])?,
                    k => write!(f, "{}^{}", NAMES[i], k)?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::field::qi;

    #[test]
    fn exact_division_recovers_factor() {
        let x = MPoly::var(VX);
        let u = MPoly::var(VU);
        let y = MPoly::var(VY);
        let mu = x.sub(&u);
        let other = x.mul(&y).add(&u.mul(&u)).add(&MPoly::constant(qi(3)));
        let prod = mu.mul(&other);
        assert_eq!(prod.div_exact(&mu), Some(other.clone()));
        assert_eq!(prod.add(&MPoly::constant(qi(1))).div_exact(&mu), None);
    }

    #[test]
    fn substitution_and_coefficients() {
        let x = MPoly::var(VX);
        let y = MPoly::var(VY);
        let p = x.mul(&x).add(&y);
        let s = p.substitute(VX, &y.add(&MPoly::constant(qi(1))));
        assert_eq!(s.eval(&[qi(0), qi(2), qi(0), qi(0)]), qi(11));
        assert_eq!(p.coeff_of(VX, 2), MPoly::constant(qi(1)));
        assert_eq!(p.deg_in(VX), 2);
    }
}
