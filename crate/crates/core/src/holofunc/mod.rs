//! Holomorphic functions on the unit disc: truncated Taylor series, boundary
//! sampling, and the norms used throughout (H^2, H^2(d), sup-norm estimates).

mod grid;
mod series;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::discmap::DiscMap;
use crate::error::{Error, Result};

pub use grid::{unit_roots, BoundaryGrid, GridSpec, DEFAULT_GRID, DEFAULT_RADIUS, DEFAULT_TRUNC};
pub(crate) use grid::Recoverer;
pub use series::{inner_product_h2, CoeffSeries};

/// Taylor coefficients of `f o phi`, truncated to the order of `f`.
///
/// `f(phi(.))` is sampled on the circle of radius `grid.radius` and the
/// coefficients are recovered by FFT. Fails when a sampled value of `phi`
/// leaves the open disc.
pub fn compose(f: &CoeffSeries, phi: &DiscMap, grid: GridSpec) -> Result<CoeffSeries> {
    grid.require_interior()?;
    let nodes = grid.nodes();
    let mut max_mod: f64 = 0.0;
    let samples: Vec<Complex64> = nodes
        .iter()
        .map(|&z| {
            let u = phi.eval(z);
            max_mod = max_mod.max(u.norm());
            f.eval_poly(u)
        })
        .collect();
    if max_mod >= 1.0 || !max_mod.is_finite() {
        return Err(Error::NotSelfMap {
            max_modulus: max_mod,
        });
    }
    BoundaryGrid {
        radius: grid.radius,
        samples,
    }
    .coefficients(f.truncation_order())
}

/// Positive weights `d_n` defining `||f||^2 = sum |c_n|^2 d_n^2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightSequence {
    d: Vec<f64>,
    pub label: String,
}

impl WeightSequence {
    pub fn new(d: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if d.is_empty() {
            return Err(Error::InvalidParameter("empty weight sequence".into()));
        }
        if let Some(bad) = d.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "weights must be positive, found {bad}"
            )));
        }
        Ok(WeightSequence {
            d,
            label: label.into(),
        })
    }

    /// A non-increasing sequence, as required by the H^2(d) transfer results.
    pub fn decreasing(d: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if d.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidParameter(
                "weight sequence must be non-increasing".into(),
            ));
        }
        Self::new(d, label)
    }

    pub fn ones(n: usize) -> Self {
        WeightSequence {
            d: vec![1.0; n.max(1)],
            label: "h2".into(),
        }
    }

    /// Exact monomial norms of the standard weighted Bergman space:
    /// `d_n^2 = n! Gamma(alpha + 2) / Gamma(n + alpha + 2)`, so
    /// `d_n ~ (n+1)^{-(alpha+1)/2}`.
    pub fn bergman(alpha: f64, n: usize) -> Result<Self> {
        if !(alpha > -1.0) {
            return Err(Error::InvalidParameter(format!(
                "weighted Bergman parameter must exceed -1, got {alpha}"
            )));
        }
        Ok(WeightSequence {
            d: bergman_moments(alpha, n.max(1))
                .into_iter()
                .map(f64::sqrt)
                .collect(),
            label: format!("bergman:{alpha}"),
        })
    }

    /// The power law `d_n = (n+1)^{-alpha-1}`.
    pub fn power_law(alpha: f64, n: usize) -> Result<Self> {
        if !(alpha > -1.0) {
            return Err(Error::InvalidParameter(format!(
                "power-law parameter must exceed -1, got {alpha}"
            )));
        }
        Ok(WeightSequence {
            d: (0..n.max(1))
                .map(|k| ((k + 1) as f64).powf(-alpha - 1.0))
                .collect(),
            label: format!("power:{alpha}"),
        })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.d
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn is_non_increasing(&self) -> bool {
        self.d.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn truncated(&self, n: usize) -> Result<Vec<f64>> {
        if self.d.len() < n {
            return Err(Error::LengthMismatch {
                what: "weight sequence",
                expected: n,
                got: self.d.len(),
            });
        }
        Ok(self.d[..n].to_vec())
    }
}

/// `int |z|^{2j} dA_alpha = j! Gamma(alpha+2) / Gamma(j+alpha+2)` for
/// `j < n`, with `dA_alpha = (alpha+1)(1-|z|^2)^alpha dm`.
pub fn bergman_moments(alpha: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut m = 1.0;
    for j in 0..n {
        if j > 0 {
            m *= j as f64 / (alpha + 1.0 + j as f64);
        }
        out.push(m);
    }
    out
}

/// `(sum |c_n|^2 d_n^2)^{1/2}`.
pub fn norm_h2d(f: &CoeffSeries, d: &WeightSequence) -> Result<f64> {
    let n = f.truncation_order();
    if d.len() < n {
        return Err(Error::LengthMismatch {
            what: "weight sequence",
            expected: n,
            got: d.len(),
        });
    }
    Ok(f.coeffs()
        .iter()
        .zip(d.as_slice())
        .map(|(c, w)| c.norm_sqr() * w * w)
        .sum::<f64>()
        .sqrt())
}

/// One level of a boundary refinement schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefineLevel {
    pub radius: f64,
    pub grid: usize,
}

/// Schedule ending on the unit circle; valid for functions that extend
/// continuously to the closed disc (polynomials in particular).
pub fn default_hinf_schedule() -> Vec<RefineLevel> {
    vec![
        RefineLevel {
            radius: 0.9,
            grid: 256,
        },
        RefineLevel {
            radius: 0.99,
            grid: 1024,
        },
        RefineLevel {
            radius: 1.0,
            grid: 4096,
        },
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HinfEstimate {
    pub value: f64,
    /// Change between the last two refinement levels.
    pub delta: f64,
    /// Point where the final maximum was found.
    pub argmax: Complex64,
}

/// Max of `|f|` on circles approaching the boundary.
///
/// The final level is polished by a golden-section search in the angle
/// around the best grid point.
pub fn norm_hinf_estimate<F: Fn(Complex64) -> Complex64>(
    f: F,
    schedule: &[RefineLevel],
) -> Result<HinfEstimate> {
    if schedule.is_empty() {
        return Err(Error::InvalidParameter("empty refinement schedule".into()));
    }
    let mut prev = f64::NAN;
    let mut best = (0.0, Complex64::new(0.0, 0.0));
    let mut delta = 0.0;
    for (lvl_idx, lvl) in schedule.iter().enumerate() {
        if !(lvl.radius > 0.0 && lvl.radius <= 1.0) || lvl.grid == 0 {
            return Err(Error::InvalidParameter(format!(
                "bad refinement level {lvl:?}"
            )));
        }
        let h = 2.0 * PI / lvl.grid as f64;
        let (mut bi, mut bv) = (0usize, f64::NEG_INFINITY);
        for k in 0..lvl.grid {
            let v = f(Complex64::from_polar(lvl.radius, k as f64 * h)).norm();
            if v > bv {
                bi = k;
                bv = v;
            }
        }
        let mut theta = bi as f64 * h;
        if lvl_idx + 1 == schedule.len() {
            let g = |t: f64| f(Complex64::from_polar(lvl.radius, t)).norm();
            let (t, v) = golden_max(g, theta - h, theta + h, 60);
            if v > bv {
                bv = v;
                theta = t;
            }
        }
        if prev.is_finite() {
            delta = (bv - prev).abs();
        }
        prev = bv;
        best = (bv, Complex64::from_polar(lvl.radius, theta));
    }
    Ok(HinfEstimate {
        value: best.0,
        delta,
        argmax: best.1,
    })
}

fn golden_max<G: Fn(f64) -> f64>(g: G, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..iters {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    if gc > gd {
        (c, gc)
    } else {
        (d, gd)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerVerdict {
    Inner,
    NotInner,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionPath {
    /// Decided from the structure of the map (Blaschke, monomial, ...).
    Structured,
    /// Decided from boundary samples.
    GridProbe,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InnerProbe {
    pub verdict: InnerVerdict,
    pub path: DecisionPath,
    /// `(radius, max over the grid of |1 - |f||)`.
    pub deviation_profile: Vec<(f64, f64)>,
    pub tol: f64,
}

impl InnerProbe {
    pub fn is_inner(&self) -> bool {
        self.verdict == InnerVerdict::Inner
    }
}

pub fn default_inner_radii() -> Vec<f64> {
    vec![0.99, 0.999, 1.0]
}

/// Decides whether `phi` has unimodular boundary values.
///
/// Structured maps are decided exactly. Other maps are probed on grids at
/// the given radii; the last radius decides: deviation within `tol` is
/// inner, beyond `10 tol` is not, anything between is inconclusive.
pub fn is_inner_probe(phi: &DiscMap, radii: &[f64], tol: f64) -> Result<InnerProbe> {
    if let Some(inner) = phi.structured_inner() {
        return Ok(InnerProbe {
            verdict: if inner {
                InnerVerdict::Inner
            } else {
                InnerVerdict::NotInner
            },
            path: DecisionPath::Structured,
            deviation_profile: Vec::new(),
            tol,
        });
    }
    if radii.is_empty() {
        return Err(Error::InvalidParameter("no probe radii".into()));
    }
    let roots = unit_roots(2048);
    let mut profile = Vec::with_capacity(radii.len());
    for &r in radii {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::InvalidParameter(format!("bad probe radius {r}")));
        }
        let dev = roots
            .iter()
            .map(|u| (1.0 - phi.eval(u * r).norm()).abs())
            .fold(0.0, f64::max);
        profile.push((r, dev));
    }
    let last = profile.last().map(|p| p.1).unwrap_or(f64::INFINITY);
    let verdict = if last <= tol {
        InnerVerdict::Inner
    } else if last > 10.0 * tol {
        InnerVerdict::NotInner
    } else {
        InnerVerdict::Inconclusive
    };
    Ok(InnerProbe {
        verdict,
        path: DecisionPath::GridProbe,
        deviation_profile: profile,
        tol,
    })
}
