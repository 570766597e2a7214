use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use super::field::{fmt_q, Field, Q};
use super::ExactError;

/// Dense univariate polynomial, coefficients low degree first, no trailing zeros.
#[derive(Clone, PartialEq, Debug)]
pub struct UPoly<F: Field> {
    c: Vec<F>,
}

impl<F: Field> UPoly<F> {
    pub fn new(mut c: Vec<F>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        UPoly { c }
    }

    pub fn zero() -> Self {
        UPoly { c: vec![] }
    }

    pub fn constant(k: F) -> Self {
        Self::new(vec![k])
    }

    /// The monomial t.
    pub fn t() -> Self {
        Self::new(vec![F::zero(), F::one()])
    }

    /// t - r
    pub fn linear_root(r: F) -> Self {
        Self::new(vec![-r, F::one()])
    }

    pub fn coeffs(&self) -> &[F] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0 (used for degree bounds).
    pub fn deg0(&self) -> usize {
        self.deg().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> F {
        self.c.get(i).cloned().unwrap_or_else(F::zero)
    }

    pub fn lead(&self) -> F {
        self.c.last().cloned().unwrap_or_else(F::zero)
    }

    pub fn eval(&self, x: &F) -> F {
        let mut acc = F::zero();
        for k in self.c.iter().rev() {
            acc = acc * x.clone() + k.clone();
        }
        acc
    }

    /// Value of the degree-`k` homogenization at (t1 : t0), i.e. sum c_i t1^i t0^(k-i).
    pub fn eval_hom(&self, k: usize, t1: &F, t0: &F) -> F {
        debug_assert!(self.c.len() <= k + 1, "homogenization degree below actual degree");
        let mut acc = F::zero();
        let mut p1 = F::one();
        let mut pw0: Vec<F> = Vec::with_capacity(k + 1);
        let mut p = F::one();
        for _ in 0..=k {
            pw0.push(p.clone());
            p = p * t0.clone();
        }
        for (i, ci) in self.c.iter().enumerate() {
            acc = acc + ci.clone() * p1.clone() * pw0[k - i].clone();
            p1 = p1 * t1.clone();
        }
        acc
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.c.iter().map(|x| -x.clone()).collect())
    }

    pub fn scale(&self, k: &F) -> Self {
        Self::new(self.c.iter().map(|x| x.clone() * k.clone()).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut r = vec![F::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                r[i + j] = r[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(r)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(F::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, x)| x.clone() * F::from_i64(i as i64))
                .collect(),
        )
    }

    /// k-th derivative evaluated at x.
    pub fn deriv_at(&self, k: usize, x: &F) -> F {
        let mut p = self.clone();
        for _ in 0..k {
            p = p.derivative();
        }
        p.eval(x)
    }

    pub fn divrem(&self, d: &Self) -> Result<(Self, Self), ExactError> {
        if d.is_zero() {
            return Err(ExactError::ZeroPolynomial);
        }
        let dl = d.lead().inv().expect("nonzero leading coefficient");
        let dd = d.deg().unwrap();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut q = vec![F::zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            let coef = r[i].clone() * dl.clone();
            if coef.is_zero() {
                continue;
            }
            q[i - dd] = coef.clone();
            for (j, dj) in d.c.iter().enumerate() {
                r[i - dd + j] = r[i - dd + j].clone() - coef.clone() * dj.clone();
            }
        }
        r.truncate(dd);
        Ok((Self::new(q), Self::new(r)))
    }

    /// Quotient if `d` divides `self` exactly.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        match self.divrem(d) {
            Ok((q, r)) if r.is_zero() => Some(q),
            _ => None,
        }
    }

    pub fn monic(&self) -> Self {
        match self.lead().inv() {
            Some(i) => self.scale(&i),
            None => Self::zero(),
        }
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> UPoly<G> {
        UPoly::new(self.c.iter().map(f).collect())
    }

    /// Coefficients padded with zeros to length `n`.
    pub fn padded(&self, n: usize) -> Vec<F> {
        (0..n).map(|i| self.coeff(i)).collect()
    }

    /// Degree-`k` reversal t^k p(1/t).
    pub fn reversed(&self, k: usize) -> Self {
        debug_assert!(self.c.len() <= k + 1);
        Self::new((0..=k).map(|i| self.coeff(k - i)).collect())
    }

    /// Homogeneous substitution t -> (p t + q)/(r t + s) at degree k:
    /// returns sum c_i (p t + q)^i (r t + s)^(k-i).
    pub fn moebius_substitute(&self, k: usize, m: [&F; 4]) -> Self {
        let num = Self::new(vec![m[1].clone(), m[0].clone()]);
        let den = Self::new(vec![m[3].clone(), m[2].clone()]);
        let mut acc = Self::zero();
        for (i, ci) in self.c.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            let term = num.pow(i as u32).mul(&den.pow((k - i) as u32)).scale(ci);
            acc = acc.add(&term);
        }
        acc
    }
}

impl UPoly<Q> {
    /// Squarefree decomposition (Yun). Returns pairwise coprime monic squarefree
    /// factors with multiplicities; the product equals `self` up to a unit.
    pub fn squarefree(&self) -> Result<Vec<(UPoly<Q>, usize)>, ExactError> {
        if self.is_zero() {
            return Err(ExactError::ZeroPolynomial);
        }
        let mut out = Vec::new();
        if self.deg() == Some(0) {
            return Ok(out);
        }
        let f = self.monic();
        let df = f.derivative();
        let a = f.gcd(&df);
        let mut b = f.div_exact(&a).expect("gcd divides");
        let mut c = df.div_exact(&a).expect("gcd divides");
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        loop {
            let g = b.gcd(&d);
            if g.deg().unwrap_or(0) > 0 {
                out.push((g.clone(), i));
            }
            b = b.div_exact(&g).expect("gcd divides");
            if b.deg().unwrap_or(0) == 0 {
                break;
            }
            c = d.div_exact(&g).expect("gcd divides");
            d = c.sub(&b.derivative());
            i += 1;
        }
        Ok(out)
    }

    /// All rational roots of a squarefree-or-not polynomial (without multiplicity),
    /// found by testing p/q with p | constant term and q | leading coefficient.
    pub fn rational_roots(&self) -> Vec<Q> {
        let mut roots = Vec::new();
        if self.is_zero() {
            return roots;
        }
        let mut p = self.clone();
        // strip roots at zero
        if p.coeff(0).is_zero() {
            roots.push(Q::zero());
            while p.coeff(0).is_zero() && !p.is_zero() {
                p = UPoly::new(p.c[1..].to_vec());
            }
        }
        if p.deg().unwrap_or(0) == 0 {
            return roots;
        }
        let ints = integer_coeffs(&p);
        let a0 = ints[0].abs();
        let an = ints.last().unwrap().abs();
        let nums = divisors(&a0);
        let dens = divisors(&an);
        let mut cands: Vec<Q> = Vec::new();
        for n in &nums {
            for d in &dens {
                let r = Q::new(n.clone(), d.clone());
                cands.push(r.clone());
                cands.push(-r);
            }
        }
        cands.sort();
        cands.dedup();
        for r in cands {
            if p.eval(&r).is_zero() {
                roots.push(r);
            }
        }
        roots
    }

    /// Multiplicity of the root r.
    pub fn root_multiplicity(&self, r: &Q) -> usize {
        let lin = UPoly::linear_root(r.clone());
        let mut p = self.clone();
        let mut m = 0;
        while !p.is_zero() {
            match p.div_exact(&lin) {
                Some(q) => {
                    p = q;
                    m += 1;
                }
                None => break,
            }
        }
        m
    }
}

/// Scales by the lcm of denominators and returns integer coefficients.
pub fn integer_coeffs(p: &UPoly<Q>) -> Vec<BigInt> {
    let mut l = BigInt::one();
    for c in p.coeffs() {
        l = l.lcm(c.denom());
    }
    p.coeffs()
        .iter()
        .map(|c| (c * Q::from_integer(l.clone())).to_integer())
        .collect()
}

/// Positive divisors of |n| (n != 0), by trial division.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if num_traits::Zero::is_zero(&(&n % &d)) {
            small.push(d.clone());
            let e = &n / &d;
            if e != d {
                large.push(e);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

impl fmt::Display for UPoly<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.c.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", fmt_q(c))?,
                1 => write!(f, "({})t", fmt_q(c))?,
                _ => write!(f, "({})t^{}", fmt_q(c), i)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::field::{qf, qi};

    fn p(v: &[i64]) -> UPoly<Q> {
        UPoly::new(v.iter().map(|&x| qi(x)).collect())
    }

    #[test]
    fn divrem_reassembles() {
        let a = p(&[1, 2, 3, 4]);
        let b = p(&[1, 1]);
        let (q, r) = a.divrem(&b).unwrap();
        assert_eq!(q.mul(&b).add(&r), a);
    }

    #[test]
    fn squarefree_examples() {
        // y^4
        let sf = p(&[0, 0, 0, 0, 1]).squarefree().unwrap();
        assert_eq!(sf, vec![(p(&[0, 1]), 4)]);
        // (y-1)^2 (y-2)^2 = y^4 - 6y^3 + 13y^2 - 12y + 4
        let sf = p(&[4, -12, 13, -6, 1]).squarefree().unwrap();
        assert_eq!(sf, vec![(p(&[2, -3, 1]), 2)]);
        // y^2 + 1
        let sf = p(&[1, 0, 1]).squarefree().unwrap();
        assert_eq!(sf, vec![(p(&[1, 0, 1]), 1)]);
        assert_eq!(UPoly::<Q>::zero().squarefree(), Err(ExactError::ZeroPolynomial));
    }

    #[test]
    fn rational_roots_found() {
        // (2t - 1)(t + 3)(t^2 + 1)
        let f = p(&[-1, 2]).mul(&p(&[3, 1])).mul(&p(&[1, 0, 1]));
        let mut r = f.rational_roots();
        r.sort();
        assert_eq!(r, vec![qi(-3), qf(1, 2)]);
    }

    #[test]
    fn homogeneous_eval_matches_affine() {
        let f = p(&[3, -1, 2]);
        let x = qf(5, 7);
        assert_eq!(f.eval_hom(2, &x, &qi(1)), f.eval(&x));
        // at infinity the degree-2 form picks the leading coefficient
        assert_eq!(f.eval_hom(2, &qi(1), &qi(0)), qi(2));
        assert_eq!(f.eval_hom(3, &qi(1), &qi(0)), qi(0));
    }

    #[test]
    fn moebius_substitution_is_homogeneous_composition() {
        let f = p(&[1, 2, 3]);
        let m = [qi(2), qi(1), qi(1), qi(3)];
        let g = f.moebius_substitute(2, [&m[0], &m[1], &m[2], &m[3]]);
        let t = qf(2, 5);
        let den = &m[2] * &t + &m[3];
        let arg = (&m[0] * &t + &m[1]) / &den;
        assert_eq!(g.eval(&t), f.eval(&arg) * &den * &den);
    }
}
