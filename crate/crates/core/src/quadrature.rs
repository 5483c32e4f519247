//! Product rules for the normalised area measure on the disc.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Nodes and weights for `dA_alpha = (alpha+1)(1-|z|^2)^alpha dm`.
///
/// Gauss-Jacobi in `s = r^2` with weight `(1-s)^alpha` times the uniform
/// rule in the angle, so `int z^j conj(z)^k dA_alpha` is exact for
/// `j, k <= degree_exact`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscQuadrature {
    pub nodes: Vec<Complex64>,
    pub weights: Vec<f64>,
    pub degree_exact: usize,
    pub alpha: f64,
    pub radial_nodes: usize,
    pub angular_nodes: usize,
}

pub const DEFAULT_RADIAL_NODES: usize = 48;
pub const DEFAULT_ANGULAR_NODES: usize = 128;

impl DiscQuadrature {
    pub fn lebesgue(radial: usize, angular: usize) -> Result<Self> {
        Self::gauss_jacobi(radial, angular, 0.0)
    }

    pub fn gauss_jacobi(radial: usize, angular: usize, alpha: f64) -> Result<Self> {
        if radial == 0 || angular == 0 {
            return Err(Error::InvalidParameter("quadrature needs positive node counts".into()));
        }
        if !(alpha > -1.0) {
            return Err(Error::InvalidParameter(format!("alpha must exceed -1, got {alpha}")));
        }
        let (s, w) = gauss_jacobi_unit(radial, alpha);
        let mut nodes = Vec::with_capacity(radial * angular);
        let mut weights = Vec::with_capacity(radial * angular);
        let h = 2.0 * PI / angular as f64;
        for (si, wi) in s.iter().zip(&w) {
            let r = si.sqrt();
            for l in 0..angular {
                nodes.push(Complex64::from_polar(r, l as f64 * h));
                weights.push(wi * (alpha + 1.0) / angular as f64);
            }
        }
        Ok(DiscQuadrature {
            nodes,
            weights,
            degree_exact: (2 * radial - 1).min(angular - 1),
            alpha,
            radial_nodes: radial,
            angular_nodes: angular,
        })
    }

    pub fn integrate<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(z, w)| f(*z) * *w).sum()
    }

    pub fn integrate_real<F: Fn(Complex64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(z, w)| f(*z) * w).sum()
    }
}

/// Gauss rule on `[0, 1]` for the weight `(1-s)^alpha` (Golub-Welsch on
/// the Jacobi matrix, mapped from `[-1, 1]`).
fn gauss_jacobi_unit(n: usize, alpha: f64) -> (Vec<f64>, Vec<f64>) {
    let (a, b) = (alpha, 0.0f64);
    let ab = a + b;
    let diag = |k: usize| -> f64 {
        let k = k as f64;
        if k == 0.0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * k + ab) * (2.0 * k + ab + 2.0))
        }
    };
    let off = |k: usize| -> f64 {
        // k >= 1
        let k = k as f64;
        let t = 2.0 * k + ab;
        (4.0 * k * (k + a) * (k + b) * (k + ab) / (t * t * (t + 1.0) * (t - 1.0))).sqrt()
    };
    let j = DMatrix::from_fn(n, n, |i, c| {
        if i == c {
            diag(i)
        } else if c == i + 1 {
            off(i + 1)
        } else if i == c + 1 {
            off(c + 1)
        } else {
            0.0
        }
    });
    let eig = j.symmetric_eigen();
    // int_{-1}^{1} (1-x)^a dx = 2^{a+1} / (a+1); mapped to [0,1] it is 1/(a+1).
    let mu0 = 1.0 / (a + 1.0);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let x = eig.eigenvalues[i];
            let v0 = eig.eigenvectors[(0, i)];
            ((1.0 + x) / 2.0, mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    pairs.into_iter().unzip()
}
