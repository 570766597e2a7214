//! Exact arithmetic kernel: rationals, the prime field 2^61-1, dense univariate
//! and small multivariate polynomials, squarefree decomposition, and roots of
//! binary quartics on the projective line.

pub mod field;
pub mod linalg;
pub mod mpoly;
pub mod upoly;

pub use field::{de_rational_string, de_rational_strings, fmt_q, parse_q, qf, qi, Field, Fp, Q, MERSENNE_61};
pub use mpoly::{MPoly, TermJson, VU, VV, VX, VY};
pub use upoly::UPoly;
pub use linalg::{nullspace, rref};

use num_traits::ToPrimitive;

use crate::projline::P1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("polynomial does not split into linear factors over the rationals")]
    NotSplit,
}

/// Binary form of degree 4: sum c_i x^i w^(4-i).
#[derive(Clone, PartialEq, Debug)]
pub struct BinaryQuartic {
    pub c: [Q; 5],
}

impl BinaryQuartic {
    /// Degree-4 homogenization of a univariate polynomial of degree <= 4.
    pub fn homogenize(p: &UPoly<Q>) -> Self {
        assert!(p.deg0() <= 4, "degree exceeds 4");
        BinaryQuartic {
            c: std::array::from_fn(|i| p.coeff(i)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn dehomogenized(&self) -> UPoly<Q> {
        UPoly::new(self.c.to_vec())
    }

    /// Multiplicity of the root at infinity.
    pub fn infinite_multiplicity(&self) -> usize {
        4 - self.dehomogenized().deg0()
    }

    /// Pattern of root multiplicities over the algebraic closure, sorted ascending.
    /// Works without splitting: a squarefree factor of degree d and multiplicity k
    /// contributes d roots of multiplicity k.
    pub fn multiplicity_pattern(&self) -> Result<Vec<usize>, ExactError> {
        if self.is_zero() {
            return Err(ExactError::ZeroPolynomial);
        }
        let mut pat = Vec::new();
        let inf = self.infinite_multiplicity();
        if inf > 0 {
            pat.push(inf);
        }
        for (f, k) in self.dehomogenized().squarefree()? {
            for _ in 0..f.deg0() {
                pat.push(k);
            }
        }
        pat.sort();
        Ok(pat)
    }
}

/// Roots of a binary quartic on CP^1 with multiplicities summing to 4.
pub fn p1_roots(b: &BinaryQuartic) -> Result<Vec<(P1<Q>, usize)>, ExactError> {
    if b.is_zero() {
        return Err(ExactError::ZeroPolynomial);
    }
    let mut out = Vec::new();
    for (f, k) in b.dehomogenized().squarefree()? {
        let rs = f.rational_roots();
        if rs.len() < f.deg0() {
            return Err(ExactError::NotSplit);
        }
        for r in rs {
            out.push((P1::finite(r), k));
        }
    }
    let inf = b.infinite_multiplicity();
    if inf > 0 {
        out.push((P1::infinity(), inf));
    }
    Ok(out)
}

pub fn squarefree_decompose(p: &UPoly<Q>) -> Result<Vec<(UPoly<Q>, usize)>, ExactError> {
    p.squarefree()
}

/// Numeric fallback: complex roots of a binary quartic in binary64 with
/// multiplicities, clustering roots closer than `rel_tol` (relative).
/// Infinity is reported as `None`.
pub fn p1_roots_numeric(b: &BinaryQuartic, rel_tol: f64) -> Result<Vec<(Option<(f64, f64)>, usize)>, ExactError> {
    if b.is_zero() {
        return Err(ExactError::ZeroPolynomial);
    }
    let p = b.dehomogenized();
    let coeffs: Vec<f64> = p.coeffs().iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
    let n = coeffs.len() - 1;
    let mut out: Vec<(Option<(f64, f64)>, usize)> = Vec::new();
    if n > 0 {
        for r in durand_kerner(&coeffs) {
            let scale = 1.0f64.max((r.0 * r.0 + r.1 * r.1).sqrt());
            let hit = out.iter_mut().find(|(z, _)| {
                let z = z.unwrap();
                ((z.0 - r.0).powi(2) + (z.1 - r.1).powi(2)).sqrt() <= rel_tol.sqrt() * scale
            });
            match hit {
                Some(e) => e.1 += 1,
                None => out.push((Some(r), 1)),
            }
        }
    }
    if n < 4 {
        out.push((None, 4 - n));
    }
    Ok(out)
}

// Simultaneous iteration for all roots; multiple roots converge slowly, hence the
// loose clustering radius sqrt(tol) above.
fn durand_kerner(c: &[f64]) -> Vec<(f64, f64)> {
    let n = c.len() - 1;
    let lead = c[n];
    let monic: Vec<f64> = c.iter().map(|x| x / lead).collect();
    let eval = |z: (f64, f64)| {
        let mut acc = (0.0, 0.0);
        for k in monic.iter().rev() {
            acc = (acc.0 * z.0 - acc.1 * z.1 + k, acc.0 * z.1 + acc.1 * z.0);
        }
        acc
    };
    let mut z: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let a = 0.4f64 + 0.9 * k as f64;
            (a.cos() * 0.9f64.powi(k as i32), a.sin() * 0.9f64.powi(k as i32))
        })
        .collect();
    for _ in 0..2000 {
        let prev = z.clone();
        for i in 0..n {
            let num = eval(z[i]);
            let mut den = (1.0, 0.0);
            for j in 0..n {
                if i != j {
                    let d = (z[i].0 - z[j].0, z[i].1 - z[j].1);
                    den = (den.0 * d.0 - den.1 * d.1, den.0 * d.1 + den.1 * d.0);
                }
            }
            let m = den.0 * den.0 + den.1 * den.1;
            if m == 0.0 {
                continue;
            }
            let q = ((num.0 * den.0 + num.1 * den.1) / m, (num.1 * den.0 - num.0 * den.1) / m);
            z[i] = (z[i].0 - q.0, z[i].1 - q.1);
        }
        let moved: f64 = z.iter().zip(&prev).map(|(a, b)| (a.0 - b.0).abs() + (a.1 - b.1).abs()).sum();
        if moved < 1e-15 {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quartic(v: &[i64]) -> BinaryQuartic {
        BinaryQuartic::homogenize(&UPoly::new(v.iter().map(|&x| qi(x)).collect()))
    }

    #[test]
    fn roots_of_x_times_x_minus_one() {
        let r = p1_roots(&quartic(&[0, -1, 1])).unwrap();
        assert_eq!(r.len(), 3);
        assert!(r.contains(&(P1::finite(qi(0)), 1)));
        assert!(r.contains(&(P1::finite(qi(1)), 1)));
        assert!(r.contains(&(P1::infinity(), 2)));
    }

    #[test]
    fn roots_of_fourth_power_and_irreducible() {
        assert_eq!(p1_roots(&quartic(&[0, 0, 0, 0, 1])).unwrap(), vec![(P1::finite(qi(0)), 4)]);
        assert_eq!(p1_roots(&quartic(&[1, 0, 1])), Err(ExactError::NotSplit));
        assert_eq!(p1_roots(&quartic(&[])), Err(ExactError::ZeroPolynomial));
        assert_eq!(quartic(&[1, 0, 1]).multiplicity_pattern().unwrap(), vec![1, 1, 2]);
    }

    #[test]
    fn numeric_roots_cluster_multiplicities() {
        let r = p1_roots_numeric(&quartic(&[1, 0, 1]), 1e-9).unwrap();
        let mut mult: Vec<usize> = r.iter().map(|x| x.1).collect();
        mult.sort();
        assert_eq!(mult, vec![1, 1, 2]);
        assert!(r.iter().any(|x| x.0.is_none() && x.1 == 2));
    }
}
