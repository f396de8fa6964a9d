use std::collections::HashSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::Rational;
use crate::error::{Error, Result};

/// Dense univariate polynomial over the rationals; `coeffs[k]` multiplies `d^k`.
#[derive(Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(from = "Vec<Rational>", into = "Vec<Rational>")]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        UniPoly::new(coeffs.iter().map(|&c| Rational::from(c)).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        UniPoly::new(vec![c])
    }

    /// The monic linear polynomial `d - root`.
    pub fn linear_root(root: Rational) -> Self {
        UniPoly::new(vec![-root, Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    /// Index of the highest nonzero coefficient; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        UniPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(UniPoly::constant(Rational::one()), |acc, _| &acc * self)
    }
}

impl From<Vec<Rational>> for UniPoly {
    fn from(v: Vec<Rational>) -> Self {
        UniPoly::new(v)
    }
}

impl From<UniPoly> for Vec<Rational> {
    fn from(p: UniPoly) -> Self {
        p.coeffs
    }
}

impl Add<&UniPoly> for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub<&UniPoly> for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul<&UniPoly> for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let body = format!("{abs:?}");
            match (k, abs.is_one()) {
                (0, _) => write!(f, "{body}")?,
                (1, true) => write!(f, "d")?,
                (1, false) => write!(f, "{body}*d")?,
                (_, true) => write!(f, "d^{k}")?,
                (_, false) => write!(f, "{body}*d^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniPoly({self})")
    }
}

/// Exact interpolation through `samples`; the result has degree below the
/// number of samples. Uses Newton divided differences.
pub fn lagrange_interpolate(samples: &[(Rational, Rational)]) -> Result<UniPoly> {
    let mut seen = HashSet::new();
    for (x, _) in samples {
        if !seen.insert(x.clone()) {
            return Err(Error::DegenerateSamples(x.to_string()));
        }
    }
    let n = samples.len();
    let xs: Vec<&Rational> = samples.iter().map(|(x, _)| x).collect();
    let mut table: Vec<Rational> = samples.iter().map(|(_, y)| y.clone()).collect();
    for level in 1..n {
        for k in (level..n).rev() {
            table[k] = (&table[k] - &table[k - 1]) / (xs[k] - xs[k - level]);
        }
    }
    // Horner on the Newton form.
    let mut poly = UniPoly::zero();
    for k in (0..n).rev() {
        poly = &(&poly * &UniPoly::linear_root(xs[k].clone())) + &UniPoly::constant(table[k].clone());
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    #[test]
    fn trims_and_degree() {
        let p = UniPoly::from_i64(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(UniPoly::from_i64(&[0, 0]).degree(), None);
    }

    #[test]
    fn interpolates_square() {
        let s = [(q(0), q(0)), (q(1), q(1)), (q(2), q(4))];
        assert_eq!(lagrange_interpolate(&s).unwrap(), UniPoly::from_i64(&[0, 0, 1]));
    }

    #[test]
    fn duplicate_abscissa_rejected() {
        let s = [(q(1), q(0)), (q(1), q(3))];
        assert!(matches!(lagrange_interpolate(&s), Err(Error::DegenerateSamples(_))));
    }

    #[test]
    fn display() {
        let p = UniPoly::new(vec![q(3), q(-6), q(3)]);
        assert_eq!(p.to_string(), "3*d^2 - 6*d + 3");
        assert_eq!(UniPoly::new(vec![Rational::new(-1, 2), q(1)]).to_string(), "d - 1/2");
    }

    #[test]
    fn json_shape() {
        let p = UniPoly::new(vec![Rational::new(1, 3), q(0), q(2)]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"["1/3","0/1","2/1"]"#);
        assert_eq!(serde_json::from_str::<UniPoly>(&s).unwrap(), p);
    }

    proptest! {
        #[test]
        fn sample_then_interpolate_is_identity(
            coeffs in proptest::collection::vec((-50i64..50, 1i64..9), 1..9),
            start in -5i64..5,
        ) {
            let p = UniPoly::new(coeffs.iter().map(|&(a, b)| Rational::new(a, b)).collect());
            let samples: Vec<_> = (0..coeffs.len() as i64 + 1)
                .map(|k| { let x = q(start + 2 * k); let y = p.eval(&x); (x, y) })
                .collect();
            prop_assert_eq!(lagrange_interpolate(&samples).unwrap(), p);
        }
    }
}
