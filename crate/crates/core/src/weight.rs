//! Weights `w` of a weighted composition operator.

use num_complex::Complex64;

use crate::discmap::{Callable, DiscMap, Moebius};
use crate::error::{Error, Result};
use crate::holofunc::{BoundaryGrid, CoeffSeries, GridSpec};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A holomorphic weight on the disc.
#[derive(Debug, Clone)]
pub enum Weight {
    Series(CoeffSeries),
    /// `(a z + b) / (c z + d)` with the pole off the closed disc; `a d - b c`
    /// may vanish (constants).
    Rational(Moebius),
    /// A bounded holomorphic function given as a disc map (an inner factor).
    Map(DiscMap),
    Callable(Callable),
    /// `theta (phi - center) scale` for an inner `phi` and optional inner
    /// `theta`.
    InnerShift {
        map: DiscMap,
        theta: Option<DiscMap>,
        center: Complex64,
        scale: f64,
    },
    Product(Vec<Weight>),
    Scaled(Complex64, Box<Weight>),
    /// `outer o inner`.
    Composed {
        outer: Box<Weight>,
        inner: DiscMap,
    },
}

impl Weight {
    pub fn one() -> Self {
        Weight::constant(ONE)
    }

    pub fn constant(c: Complex64) -> Self {
        Weight::Series(CoeffSeries::constant(c, 1))
    }

    pub fn series(s: CoeffSeries) -> Self {
        Weight::Series(s)
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Ok(Weight::Series(CoeffSeries::from_real(coeffs)?))
    }

    /// `(a z + b) / (c z + d)`; rejects a pole in the closed disc.
    pub fn rational(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        if c.norm() >= d.norm() {
            return Err(Error::InvalidParameter(
                "rational weight has a pole in the closed disc".into(),
            ));
        }
        Ok(Weight::Rational(Moebius { a, b, c, d }))
    }

    /// `sqrt(1 - |beta|^2) / (1 - conj(beta) z)`, the normalised kernel.
    pub fn normalized_kernel(beta: Complex64) -> Result<Self> {
        if beta.norm() >= 1.0 {
            return Err(Error::OutsideDisc(beta));
        }
        Weight::rational(
            Complex64::new(0.0, 0.0),
            Complex64::new((1.0 - beta.norm_sqr()).sqrt(), 0.0),
            -beta.conj(),
            ONE,
        )
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            Weight::Series(s) => s.eval_poly(z),
            Weight::Rational(m) => (m.a * z + m.b) / (m.c * z + m.d),
            Weight::Map(m) => m.eval(z),
            Weight::Callable(c) => c.call(z),
            Weight::InnerShift {
                map,
                theta,
                center,
                scale,
            } => {
                let t = theta.as_ref().map(|t| t.eval(z)).unwrap_or(ONE);
                t * (map.eval(z) - center) * *scale
            }
            Weight::Product(ws) => ws.iter().fold(ONE, |acc, w| acc * w.eval(z)),
            Weight::Scaled(c, w) => c * w.eval(z),
            Weight::Composed { outer, inner } => outer.eval(inner.eval(z)),
        }
    }

    /// Whether boundary samples at radius one are accurate.
    pub fn regular_on_circle(&self) -> bool {
        match self {
            Weight::Series(_) | Weight::Rational(_) => true,
            Weight::Map(m) => m.regular_on_circle(),
            Weight::Callable(c) => c.regular_on_circle,
            Weight::InnerShift { map, theta, .. } => {
                map.regular_on_circle() && theta.as_ref().map_or(true, |t| t.regular_on_circle())
            }
            Weight::Product(ws) => ws.iter().all(|w| w.regular_on_circle()),
            Weight::Scaled(_, w) => w.regular_on_circle(),
            Weight::Composed { outer, inner } => outer.regular_on_circle() && inner.regular_on_circle(),
        }
    }

    /// Polynomial degree when the weight is a stored polynomial.
    pub fn polynomial_degree(&self) -> Option<usize> {
        match self {
            Weight::Series(s) => Some(s.degree(0.0).unwrap_or(0)),
            Weight::Scaled(_, w) => w.polynomial_degree(),
            _ => None,
        }
    }

    /// The weight as a constant, when it is one.
    pub fn as_constant(&self) -> Option<Complex64> {
        match self {
            Weight::Series(s) if s.degree(0.0).unwrap_or(0) == 0 => Some(s.coeffs()[0]),
            Weight::Rational(m) if m.a * m.d - m.b * m.c == Complex64::new(0.0, 0.0) => {
                Some(self.eval(Complex64::new(0.0, 0.0)))
            }
            Weight::Scaled(c, w) => w.as_constant().map(|v| c * v),
            _ => None,
        }
    }

    /// First `n` Taylor coefficients; stored series are returned exactly,
    /// anything else is sampled on `grid`.
    pub fn coefficients(&self, n: usize, grid: GridSpec) -> Result<CoeffSeries> {
        if let Weight::Series(s) = self {
            return Ok(s.truncated(n));
        }
        grid.require_interior()?;
        BoundaryGrid::sample(grid, |z| self.eval(z)).coefficients(n)
    }

    /// For weights with `|w|^2 = G(phi)` almost everywhere on the circle,
    /// returns `(s, c)` with `G(u) = s |u - c|^2`. Only `theta (phi - c) s`
    /// weights built over the same inner `phi` qualify.
    pub fn boundary_modulus_through(&self, phi: &DiscMap) -> Option<(f64, Complex64)> {
        match self {
            Weight::InnerShift {
                map, center, scale, ..
            } if map.same_as(phi) => Some((scale * scale, *center)),
            Weight::Scaled(c, w) => w
                .boundary_modulus_through(phi)
                .map(|(s, center)| (s * c.norm_sqr(), center)),
            _ => None,
        }
    }
}

impl From<CoeffSeries> for Weight {
    fn from(s: CoeffSeries) -> Self {
        Weight::Series(s)
    }
}
