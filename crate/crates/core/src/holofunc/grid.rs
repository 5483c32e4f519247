//! Sampling on scaled roots of unity and Fourier recovery of Taylor
//! coefficients.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::holofunc::CoeffSeries;

/// Default sampling radius at the default truncation order.
pub const DEFAULT_RADIUS: f64 = 0.9;
/// Default number of boundary samples.
pub const DEFAULT_GRID: usize = 1024;
/// Default truncation order.
pub const DEFAULT_TRUNC: usize = 128;

/// Grid size and sampling radius used for coefficient recovery.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub size: usize,
    pub radius: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            size: DEFAULT_GRID,
            radius: DEFAULT_RADIUS,
        }
    }
}

impl GridSpec {
    pub fn new(size: usize, radius: f64) -> Result<Self> {
        if size == 0 || !size.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "grid size must be a power of two, got {size}"
            )));
        }
        if !(radius > 0.0 && radius <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "sampling radius must lie in (0, 1], got {radius}"
            )));
        }
        Ok(GridSpec { size, radius })
    }

    /// Grid suited to recovering `trunc` coefficients.
    ///
    /// The radius keeps `r^trunc` at its value for the default pair
    /// (r = 0.9, N = 128) so the `r^-n` rescale amplifies rounding by the same
    /// factor at every truncation; it never drops below 0.9.
    pub fn for_trunc(trunc: usize) -> Self {
        let trunc = trunc.max(1);
        let radius = DEFAULT_RADIUS
            .powf(DEFAULT_TRUNC as f64 / trunc as f64)
            .max(DEFAULT_RADIUS);
        let size = (4 * trunc).next_power_of_two().max(DEFAULT_GRID);
        GridSpec { size, radius }
    }

    /// Sample points `r * exp(2 pi i m / M)`.
    pub fn nodes(&self) -> Vec<Complex64> {
        unit_roots(self.size)
            .into_iter()
            .map(|u| u * self.radius)
            .collect()
    }

    /// Checks the spec is usable for compositions (radius strictly inside).
    pub fn require_interior(&self) -> Result<()> {
        if self.radius >= 1.0 {
            return Err(Error::InvalidParameter(
                "composition needs a sampling radius r < 1".into(),
            ));
        }
        Ok(())
    }
}

/// The `m`-th roots of unity in grid order.
pub fn unit_roots(m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64))
        .collect()
}

/// Values of a function on a circle of radius `radius`.
#[derive(Debug, Clone)]
pub struct BoundaryGrid {
    pub radius: f64,
    pub samples: Vec<Complex64>,
}

impl BoundaryGrid {
    pub fn sample<F: Fn(Complex64) -> Complex64>(spec: GridSpec, f: F) -> Self {
        let samples = spec.nodes().into_iter().map(f).collect();
        BoundaryGrid {
            radius: spec.radius,
            samples,
        }
    }

    pub fn from_samples(radius: f64, samples: Vec<Complex64>) -> Result<Self> {
        if samples.is_empty() || !samples.len().is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "sample count must be a power of two, got {}",
                samples.len()
            )));
        }
        Ok(BoundaryGrid { radius, samples })
    }

    pub fn grid_size(&self) -> usize {
        self.samples.len()
    }

    /// First `n` Taylor coefficients recovered by a forward FFT and the
    /// `r^-k` rescale.
    pub fn coefficients(&self, n: usize) -> Result<CoeffSeries> {
        let m = self.grid_size();
        if n > m {
            return Err(Error::LengthMismatch {
                what: "grid size for coefficient recovery",
                expected: n,
                got: m,
            });
        }
        let mut buf = self.samples.clone();
        FftPlanner::new().plan_fft_forward(m).process(&mut buf);
        let inv_m = 1.0 / m as f64;
        let mut scale = inv_m;
        let inv_r = 1.0 / self.radius;
        let coeffs = buf
            .into_iter()
            .take(n)
            .map(|c| {
                let v = c * scale;
                scale *= inv_r;
                v
            })
            .collect();
        CoeffSeries::new(coeffs)
    }

    /// Mean of `|f|^2` over the grid.
    pub fn mean_square(&self) -> f64 {
        self.samples.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.grid_size() as f64
    }

    pub fn max_modulus(&self) -> (usize, f64) {
        self.samples
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, v)| {
                let a = v.norm();
                if a > bv {
                    (i, a)
                } else {
                    (bi, bv)
                }
            })
    }
}

/// Coefficient recovery for many columns sharing one grid: reuses the FFT
/// plan across calls.
pub(crate) struct Recoverer {
    fft: std::sync::Arc<dyn rustfft::Fft<f64>>,
    size: usize,
    scales: Vec<f64>,
}

impl Recoverer {
    pub fn new(spec: GridSpec, n: usize) -> Result<Self> {
        if n > spec.size {
            return Err(Error::LengthMismatch {
                what: "grid size for coefficient recovery",
                expected: n,
                got: spec.size,
            });
        }
        let fft = FftPlanner::new().plan_fft_forward(spec.size);
        let inv_r = 1.0 / spec.radius;
        let mut s = 1.0 / spec.size as f64;
        let scales = (0..n)
            .map(|_| {
                let v = s;
                s *= inv_r;
                v
            })
            .collect();
        Ok(Recoverer {
            fft,
            size: spec.size,
            scales,
        })
    }

    pub fn recover(&self, samples: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(samples.len(), self.size);
        let mut buf = samples.to_vec();
        self.fft.process(&mut buf);
        buf.iter()
            .zip(&self.scales)
            .map(|(c, s)| c * *s)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_power_of_two() {
        assert!(GridSpec::new(1000, 0.9).is_err());
        assert!(GridSpec::new(1024, 1.5).is_err());
        assert!(GridSpec::new(1024, 0.9).is_ok());
    }

    #[test]
    fn recovers_polynomial_coefficients() {
        let spec = GridSpec::new(64, 0.9).unwrap();
        let g = BoundaryGrid::sample(spec, |z| 1.0 + 2.0 * z - z * z * z);
        let c = g.coefficients(5).unwrap();
        let want = [1.0, 2.0, 0.0, -1.0, 0.0];
        for (got, w) in c.coeffs().iter().zip(want) {
            assert!((got - w).norm() < 1e-13);
        }
    }

    #[test]
    fn for_trunc_keeps_radius_at_least_default() {
        assert_eq!(GridSpec::for_trunc(128).radius, 0.9);
        assert_eq!(GridSpec::for_trunc(16).radius, 0.9);
        let g = GridSpec::for_trunc(256);
        assert!((g.radius.powi(256) - 0.9f64.powi(128)).abs() < 1e-12);
        assert_eq!(g.size, 1024);
        assert_eq!(GridSpec::for_trunc(512).size, 2048);
    }
}
