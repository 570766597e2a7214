use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Exact rational scalar. `BigRational` keeps itself reduced with a positive denominator.
pub type Q = BigRational;

/// Default prime for randomized identity testing.
pub const MERSENNE_61: u64 = (1u64 << 61) - 1;

/// Minimal field interface shared by the exact rationals and the prime field.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn inv(&self) -> Option<Self>;
    fn from_i64(n: i64) -> Self;
    /// Image of a rational; `None` when the denominator vanishes in this field.
    fn from_q(q: &Q) -> Option<Self>;

    fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.clone() * i)
    }

    fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }
}

impl Field for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn from_i64(n: i64) -> Self {
        Q::from_integer(BigInt::from(n))
    }
    fn from_q(q: &Q) -> Option<Self> {
        Some(q.clone())
    }
}

/// Residue modulo 2^61 - 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Fp(u64);

impl Fp {
    pub fn new(v: u64) -> Self {
        Fp(v % MERSENNE_61)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn reduce128(x: u128) -> u64 {
        let p = MERSENNE_61 as u128;
        let lo = x & p;
        let hi = x >> 61;
        let mut s = lo + hi;
        while s >= p {
            s -= p;
        }
        s as u64
    }

    fn from_bigint(n: &BigInt) -> Fp {
        let p = BigInt::from(MERSENNE_61);
        let r = n.mod_floor(&p);
        Fp(r.to_u64().expect("residue fits in u64"))
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod 2^61-1)", self.0)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, o: Fp) -> Fp {
        let s = self.0 + o.0;
        Fp(if s >= MERSENNE_61 { s - MERSENNE_61 } else { s })
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, o: Fp) -> Fp {
        if self.0 >= o.0 {
            Fp(self.0 - o.0)
        } else {
            Fp(self.0 + MERSENNE_61 - o.0)
        }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, o: Fp) -> Fp {
        Fp(Fp::reduce128(self.0 as u128 * o.0 as u128))
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        if self.0 == 0 {
            self
        } else {
            Fp(MERSENNE_61 - self.0)
        }
    }
}

impl Field for Fp {
    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn inv(&self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(pow_u64(*self, MERSENNE_61 - 2))
        }
    }
    fn from_i64(n: i64) -> Self {
        if n >= 0 {
            Fp::new(n as u64)
        } else {
            -Fp::new(n.unsigned_abs())
        }
    }
    fn from_q(q: &Q) -> Option<Self> {
        let n = Fp::from_bigint(q.numer());
        let d = Fp::from_bigint(q.denom());
        d.inv().map(|di| n * di)
    }
}

fn pow_u64(mut base: Fp, mut e: u64) -> Fp {
    let mut acc = Fp(1);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        e >>= 1;
    }
    acc
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse rational {0:?}")]
pub struct ParseRationalError(pub String);

/// Parses "p/q" or an integer string.
pub fn parse_q(s: &str) -> Result<Q, ParseRationalError> {
    let t = s.trim();
    let err = || ParseRationalError(s.to_string());
    match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| err())?;
            let d: BigInt = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(Q::new(n, d))
        }
        None => t.parse::<BigInt>().map(Q::from_integer).map_err(|_| err()),
    }
}

#[derive(serde::Deserialize)]
#[serde(untagged)]
enum StrOrInt {
    S(String),
    I(i64),
}

impl StrOrInt {
    fn into_string(self) -> String {
        match self {
            StrOrInt::S(s) => s,
            StrOrInt::I(i) => i.to_string(),
        }
    }
}

/// Serde helper for a list of rational strings where plain JSON integers are
/// accepted as shorthand.
pub fn de_rational_strings<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<String>, D::Error> {
    let v: Vec<StrOrInt> = serde::Deserialize::deserialize(d)?;
    Ok(v.into_iter().map(StrOrInt::into_string).collect())
}

/// Serde helper for one rational string (integers accepted).
pub fn de_rational_string<'de, D: serde::Deserializer<'de>>(d: D) -> Result<String, D::Error> {
    let v: StrOrInt = serde::Deserialize::deserialize(d)?;
    Ok(v.into_string())
}

/// Canonical string: integer when the denominator is 1, else "p/q".
pub fn fmt_q(q: &Q) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fp_inverse_roundtrip() {
        for v in [1u64, 2, 3, 12345, MERSENNE_61 - 1] {
            let a = Fp::new(v);
            assert_eq!(a * a.inv().unwrap(), Fp::one());
        }
        assert!(Fp::zero().inv().is_none());
    }

    #[test]
    fn fp_from_rational_matches_division() {
        let a = Fp::from_q(&qf(-7, 3)).unwrap();
        assert_eq!(a * Fp::from_i64(3), Fp::from_i64(-7));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("6/4").unwrap(), qf(3, 2));
        assert_eq!(parse_q("-5").unwrap(), qi(-5));
        assert_eq!(fmt_q(&qf(4, 2)), "2");
        assert_eq!(fmt_q(&qf(-1, 3)), "-1/3");
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }
}
