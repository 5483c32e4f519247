use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncated Taylor expansion `c_0 + c_1 z + ... + c_{N-1} z^{N-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct CoeffSeries {
    coeffs: Vec<Complex64>,
}

impl TryFrom<Vec<Complex64>> for CoeffSeries {
    type Error = Error;

    fn try_from(v: Vec<Complex64>) -> Result<Self> {
        CoeffSeries::new(v)
    }
}

impl From<CoeffSeries> for Vec<Complex64> {
    fn from(s: CoeffSeries) -> Self {
        s.coeffs
    }
}

impl CoeffSeries {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter(
                "a series needs at least one coefficient".into(),
            ));
        }
        Ok(CoeffSeries { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        CoeffSeries {
            coeffs: vec![Complex64::new(0.0, 0.0); n.max(1)],
        }
    }

    pub fn constant(c: Complex64, n: usize) -> Self {
        let mut s = Self::zeros(n);
        s.coeffs[0] = c;
        s
    }

    pub fn one(n: usize) -> Self {
        Self::constant(Complex64::new(1.0, 0.0), n)
    }

    /// `z^k` stored with `n` coefficients (`n > k`).
    pub fn monomial(k: usize, n: usize) -> Self {
        let mut s = Self::zeros(n.max(k + 1));
        s.coeffs[k] = Complex64::new(1.0, 0.0);
        s
    }

    /// Coefficients `ratio^n`, i.e. `1 / (1 - ratio z)` truncated.
    pub fn geometric(ratio: Complex64, n: usize) -> Self {
        let mut c = Vec::with_capacity(n.max(1));
        let mut p = Complex64::new(1.0, 0.0);
        for _ in 0..n.max(1) {
            c.push(p);
            p *= ratio;
        }
        CoeffSeries { coeffs: c }
    }

    /// Reproducing kernel of H^2 at `beta`: `1 / (1 - conj(beta) z)`.
    pub fn szego_kernel(beta: Complex64, n: usize) -> Self {
        Self::geometric(beta.conj(), n)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn truncation_order(&self) -> usize {
        self.coeffs.len()
    }

    /// Index of the last coefficient with modulus above `tol`, if any.
    pub fn degree(&self, tol: f64) -> Option<usize> {
        self.coeffs.iter().rposition(|c| c.norm() > tol)
    }

    pub fn truncated(&self, n: usize) -> Self {
        let mut c: Vec<_> = self.coeffs.iter().copied().take(n.max(1)).collect();
        c.resize(n.max(1), Complex64::new(0.0, 0.0));
        CoeffSeries { coeffs: c }
    }

    /// Evaluates at a point of the open disc.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() >= 1.0 {
            return Err(Error::OutsideDisc(z));
        }
        Ok(self.eval_poly(z))
    }

    /// Horner evaluation of the stored polynomial anywhere in the plane.
    pub fn eval_poly(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// Cauchy product truncated to the longer of the two orders.
    pub fn multiply(&self, other: &CoeffSeries) -> CoeffSeries {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        CoeffSeries { coeffs: out }
    }

    pub fn scale(&self, s: Complex64) -> CoeffSeries {
        CoeffSeries {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &CoeffSeries) -> CoeffSeries {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        let coeffs = (0..n)
            .map(|k| {
                self.coeffs.get(k).copied().unwrap_or(zero)
                    + other.coeffs.get(k).copied().unwrap_or(zero)
            })
            .collect();
        CoeffSeries { coeffs }
    }

    /// Term-by-term derivative; keeps the truncation order.
    pub fn derivative(&self) -> CoeffSeries {
        let n = self.coeffs.len();
        let mut c: Vec<_> = (1..n).map(|k| self.coeffs[k] * k as f64).collect();
        c.push(Complex64::new(0.0, 0.0));
        CoeffSeries { coeffs: c }
    }

    /// Coefficients of `f(lambda z)`.
    pub fn rotate(&self, lambda: Complex64) -> CoeffSeries {
        let mut p = Complex64::new(1.0, 0.0);
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let v = c * p;
                p *= lambda;
                v
            })
            .collect();
        CoeffSeries { coeffs }
    }

    /// Sum of coefficient moduli; bounds `sup |f|` on the closed disc.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    pub fn h2_norm(&self) -> f64 {
        inner_product_h2(self, self).re.sqrt()
    }
}

/// `sum_n c_n(f) conj(c_n(g))`.
pub fn inner_product_h2(f: &CoeffSeries, g: &CoeffSeries) -> Complex64 {
    f.coeffs
        .iter()
        .zip(&g.coeffs)
        .map(|(a, b)| a * b.conj())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn evaluate_examples() {
        let one = CoeffSeries::one(8);
        assert_eq!(one.evaluate(Complex64::new(0.3, 0.1)).unwrap(), c(1.0));
        let id = CoeffSeries::from_real(&[0.0, 1.0]).unwrap();
        assert_eq!(id.evaluate(c(0.5)).unwrap(), c(0.5));
        let geo = CoeffSeries::geometric(c(0.5), 64);
        assert!((geo.evaluate(c(0.5)).unwrap() - c(4.0 / 3.0)).norm() < 1e-15);
    }

    #[test]
    fn evaluate_rejects_outside() {
        let f = CoeffSeries::one(2);
        assert!(matches!(f.evaluate(c(1.0)), Err(Error::OutsideDisc(_))));
        assert!(f.evaluate(Complex64::new(0.8, 0.7)).is_err());
    }

    #[test]
    fn evaluation_at_origin_is_constant_term() {
        let f = CoeffSeries::new(vec![Complex64::new(0.25, -3.0), c(7.0), c(-2.0)]).unwrap();
        assert_eq!(f.evaluate(c(0.0)).unwrap(), Complex64::new(0.25, -3.0));
    }

    #[test]
    fn multiply_examples() {
        let a = CoeffSeries::from_real(&[1.0, 1.0, 0.0]).unwrap();
        let b = CoeffSeries::from_real(&[1.0, -1.0]).unwrap();
        assert_eq!(a.multiply(&b).coeffs(), &[c(1.0), c(0.0), c(-1.0)]);

        let f = CoeffSeries::from_real(&[2.0, -1.0, 0.5]).unwrap();
        assert_eq!(f.multiply(&CoeffSeries::one(3)), f);

        let p = CoeffSeries::from_real(&[1.0, 0.5, 0.0]).unwrap();
        let q = CoeffSeries::from_real(&[1.0, 0.25]).unwrap();
        assert_eq!(p.multiply(&q).coeffs(), &[c(1.0), c(0.75), c(0.125)]);
    }

    #[test]
    fn inner_product_examples() {
        let one = CoeffSeries::one(4);
        let z = CoeffSeries::monomial(1, 4);
        assert_eq!(inner_product_h2(&one, &z), c(0.0));
        assert_eq!(inner_product_h2(&z, &z), c(1.0));
        let k = CoeffSeries::szego_kernel(c(0.5), 64);
        assert!((inner_product_h2(&k, &k) - c(4.0 / 3.0)).norm() < 1e-12);
    }

    #[test]
    fn derivative_and_rotate() {
        let f = CoeffSeries::from_real(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(f.derivative().coeffs(), &[c(2.0), c(6.0), c(0.0)]);
        let g = f.rotate(Complex64::new(0.0, 1.0));
        assert_eq!(g.coeffs()[2], c(-3.0));
    }
}
