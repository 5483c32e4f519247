//! The weighted composition operator `T f = w (f o phi)`: finite sections,
//! iterates by two independent paths, norms and spectral-radius estimates.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::discmap::DiscMap;
use crate::error::{Error, Result};
use crate::holofunc::{CoeffSeries, GridSpec, Recoverer, WeightSequence};
use crate::linalg::{cmul, leading_block, matrix_power, similarity_diag, spectral_norm, CMatrix};
use crate::report::Refined;
use crate::weight::Weight;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Pointwise iterate products above this modulus are reported as divergent.
pub const DIVERGENCE_GUARD: f64 = 1e12;

/// Target Hilbert space; norms are taken in the orthonormal basis
/// `e_n = z^n / d_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Space {
    H2,
    H2d { d: WeightSequence },
    A2Alpha { alpha: f64 },
}

impl Space {
    /// Basis scaling `d_0..d_{n-1}`; `None` for H^2.
    pub fn basis_weights(&self, n: usize) -> Result<Option<Vec<f64>>> {
        match self {
            Space::H2 => Ok(None),
            Space::H2d { d } => d.truncated(n).map(Some),
            Space::A2Alpha { alpha } => Ok(Some(WeightSequence::bergman(*alpha, n)?.as_slice().to_vec())),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Space::H2 => "h2".into(),
            Space::H2d { d } => format!("h2d:{}", d.label),
            Space::A2Alpha { alpha } => format!("a2alpha:{alpha}"),
        }
    }

    /// Space norm of a coefficient vector.
    pub fn norm(&self, f: &CoeffSeries) -> Result<f64> {
        let d = self.basis_weights(f.truncation_order())?;
        Ok(match d {
            None => f.h2_norm(),
            Some(d) => f
                .coeffs()
                .iter()
                .zip(&d)
                .map(|(c, w)| c.norm_sqr() * w * w)
                .sum::<f64>()
                .sqrt(),
        })
    }
}

/// `T_{w,phi}` on a space of analytic functions, with its truncation order.
#[derive(Debug, Clone)]
pub struct WeightedCompositionOp {
    pub w: Weight,
    pub phi: DiscMap,
    pub space: Space,
    pub trunc: usize,
    /// Grid used at truncation `trunc`; defaults to [`GridSpec::for_trunc`].
    pub grid: Option<GridSpec>,
}

impl WeightedCompositionOp {
    pub fn new(w: Weight, phi: DiscMap, space: Space, trunc: usize) -> Result<Self> {
        if trunc == 0 {
            return Err(Error::InvalidParameter("truncation order must be >= 1".into()));
        }
        Ok(WeightedCompositionOp {
            w,
            phi,
            space,
            trunc,
            grid: None,
        })
    }

    pub fn h2(w: Weight, phi: DiscMap, trunc: usize) -> Result<Self> {
        Self::new(w, phi, Space::H2, trunc)
    }

    pub fn with_grid(mut self, grid: GridSpec) -> Result<Self> {
        grid.require_interior()?;
        if grid.size < self.trunc {
            return Err(Error::LengthMismatch {
                what: "grid size",
                expected: self.trunc,
                got: grid.size,
            });
        }
        self.grid = Some(grid);
        Ok(self)
    }

    pub fn with_space(mut self, space: Space) -> Self {
        self.space = space;
        self
    }

    pub fn with_trunc(mut self, trunc: usize) -> Self {
        self.trunc = trunc.max(1);
        self
    }

    /// Grid for recovering `n` coefficients. A user grid is rescaled so that
    /// `r^n` matches its value at the configured truncation.
    pub fn grid_for(&self, n: usize) -> GridSpec {
        match self.grid {
            Some(g) if n == self.trunc => g,
            Some(g) => GridSpec {
                size: g.size.max((4 * n).next_power_of_two()),
                radius: g.radius.powf(self.trunc as f64 / n as f64).min(1.0 - 1e-12),
            },
            None => GridSpec::for_trunc(n),
        }
    }

    /// Samples `phi` and `w` on `grid`, checking the self-map property.
    fn sample(&self, grid: GridSpec) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        grid.require_interior()?;
        let nodes = grid.nodes();
        let phis: Vec<Complex64> = nodes.iter().map(|&z| self.phi.eval(z)).collect();
        let max_mod = phis.iter().map(|p| p.norm()).fold(0.0, f64::max);
        if !(max_mod < 1.0) {
            return Err(Error::NotSelfMap {
                max_modulus: max_mod,
            });
        }
        let ws = nodes.iter().map(|&z| self.w.eval(z)).collect();
        Ok((phis, ws))
    }

    pub fn w_at(&self, z: Complex64) -> Complex64 {
        self.w.eval(z)
    }
}

/// A finite section in the orthonormal basis of its space.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub entries: CMatrix,
    /// Basis scaling `d_n`; `None` for the monomial basis of H^2.
    pub basis: Option<Vec<f64>>,
    pub space: String,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn norm(&self) -> f64 {
        spectral_norm(&self.entries)
    }

    pub fn power(&self, n: usize) -> OperatorMatrix {
        OperatorMatrix {
            entries: matrix_power(&self.entries, n),
            basis: self.basis.clone(),
            space: self.space.clone(),
        }
    }

    /// Applies the section to Taylor coefficients (truncated or padded to
    /// the section size).
    pub fn apply_series(&self, f: &CoeffSeries) -> CoeffSeries {
        let n = self.dim();
        let f = f.truncated(n);
        let x: Vec<Complex64> = match &self.basis {
            None => f.coeffs().to_vec(),
            Some(d) => f.coeffs().iter().zip(d).map(|(c, w)| c * *w).collect(),
        };
        let y = &self.entries * nalgebra::DVector::from_vec(x);
        let out = match &self.basis {
            None => y.iter().copied().collect(),
            Some(d) => y.iter().zip(d).map(|(c, w)| c / *w).collect(),
        };
        CoeffSeries::new(out).expect("section has positive size")
    }

    /// Row-major CSV with one quoted `re,im` cell per entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.entries.nrows() {
            let row: Vec<String> = (0..self.entries.ncols())
                .map(|j| {
                    let v = self.entries[(i, j)];
                    format!("\"{:e},{:e}\"", v.re, v.im)
                })
                .collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

/// Finite section of size `n` in the orthonormal basis.
pub fn section(op: &WeightedCompositionOp, n: usize) -> Result<CMatrix> {
    let grid = op.grid_for(n);
    let (phis, ws) = op.sample(grid)?;
    let rec = Recoverer::new(grid, n)?;
    let mut a = CMatrix::zeros(n, n);
    let mut col: Vec<Complex64> = ws;
    for j in 0..n {
        let coeffs = rec.recover(&col);
        for (i, c) in coeffs.into_iter().enumerate() {
            a[(i, j)] = c;
        }
        if j + 1 < n {
            for (v, p) in col.iter_mut().zip(&phis) {
                *v *= p;
            }
        }
    }
    Ok(match op.space.basis_weights(n)? {
        None => a,
        Some(d) => similarity_diag(&a, &d),
    })
}

/// Column `j` holds the coefficients of `w phi^j`, expressed in the
/// orthonormal basis of the operator's space.
pub fn build_matrix(op: &WeightedCompositionOp) -> Result<OperatorMatrix> {
    Ok(OperatorMatrix {
        entries: section(op, op.trunc)?,
        basis: op.space.basis_weights(op.trunc)?,
        space: op.space.label(),
    })
}

/// `w (f o phi)` by sampling, truncated to the operator's order.
pub fn apply(op: &WeightedCompositionOp, f: &CoeffSeries) -> Result<CoeffSeries> {
    let n = op.trunc;
    let grid = op.grid_for(n);
    let (phis, ws) = op.sample(grid)?;
    let samples: Vec<Complex64> = phis.iter().zip(&ws).map(|(p, w)| w * f.eval_poly(*p)).collect();
    CoeffSeries::new(Recoverer::new(grid, n)?.recover(&samples))
}

/// `T^n f = w (w o phi) ... (w o phi_{n-1}) f(phi_n)`, accumulated pointwise
/// on the sampling grid with a single coefficient recovery.
pub fn iterate_direct(op: &WeightedCompositionOp, n: usize, f: &CoeffSeries) -> Result<CoeffSeries> {
    if n == 0 {
        return Err(Error::InvalidParameter("iterate count must be >= 1".into()));
    }
    let grid = op.grid_for(op.trunc);
    grid.require_interior()?;
    let mut samples = Vec::with_capacity(grid.size);
    for z0 in grid.nodes() {
        let (mut z, mut prod) = (z0, ONE);
        for _ in 0..n {
            prod *= op.w.eval(z);
            z = op.phi.eval(z);
            if !(z.norm() < 1.0) {
                return Err(Error::NotSelfMap { max_modulus: z.norm() });
            }
        }
        let v = prod * f.eval_poly(z);
        if !(v.norm() <= DIVERGENCE_GUARD) {
            return Err(Error::Divergence(v.norm()));
        }
        samples.push(v);
    }
    CoeffSeries::new(Recoverer::new(grid, op.trunc)?.recover(&samples))
}

/// The `n`-th power of the finite section.
pub fn iterate_matrix(op: &WeightedCompositionOp, n: usize) -> Result<OperatorMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("iterate count must be >= 1".into()));
    }
    Ok(build_matrix(op)?.power(n))
}

/// `C_{psi_a} T C_{psi_a}`: weight `w o psi_a`, map `psi_a o phi o psi_a`,
/// which fixes the origin when `a` is fixed by `phi`.
pub fn conjugate_to_origin(op: &WeightedCompositionOp, a: Complex64, tol: f64) -> Result<WeightedCompositionOp> {
    if a.norm() >= 1.0 {
        return Err(Error::OutsideDisc(a));
    }
    let miss = (op.phi.eval(a) - a).norm();
    if miss > tol {
        return Err(Error::NotFixedPoint(miss));
    }
    let psi = DiscMap::psi_involution(a)?;
    let phi = psi.then(&op.phi).then(&psi);
    let w = match &op.w {
        Weight::Series(s) if a == Complex64::new(0.0, 0.0) => Weight::Series(s.rotate(-ONE)),
        w => Weight::Composed {
            outer: Box::new(w.clone()),
            inner: psi,
        },
    };
    Ok(WeightedCompositionOp { w, phi, ..op.clone() })
}

/// Largest singular value of the sections at `N` and `2N`.
///
/// The `N` value is taken from the leading block of the `2N` section, so
/// the two are compressions of one matrix and `value <= at_2n`.
pub fn norm_estimate(op: &WeightedCompositionOp) -> Result<Refined> {
    let big = section(op, 2 * op.trunc)?;
    let small = leading_block(&big, op.trunc);
    Ok(Refined::new(spectral_norm(&small), spectral_norm(&big)))
}

/// Probe points for the kernel bound: rings approaching the circle plus
/// boundary fixed points pulled inward.
fn kernel_probe_points(phi: &DiscMap) -> Vec<Complex64> {
    let mut pts = vec![Complex64::new(0.0, 0.0)];
    let radii = [0.5, 0.9, 0.99, 0.999, 1.0 - 1e-4, 1.0 - 1e-5, 1.0 - 1e-6];
    let angles = crate::holofunc::unit_roots(256);
    for r in radii {
        pts.extend(angles.iter().map(|u| u * r));
    }
    if let Some(m) = phi.as_moebius() {
        for p in m.fixed_points() {
            if p.norm() > 0.0 && p.norm() <= 1.0 + 1e-9 {
                let u = p / p.norm();
                for k in 1..=8 {
                    pts.push(u * (1.0 - 10f64.powi(-k)));
                }
            }
        }
    }
    pts
}

/// Lower bounds for `||T^n||`, `n = 1..=nmax`, on H^2 from reproducing
/// kernels: `T*^n k_z = conj(w(z) ... w(phi_{n-1}(z))) k_{phi_n(z)}`, so
/// `||T^n|| >= |prod w(phi_k(z))| ((1-|z|^2)/(1-|phi_n(z)|^2))^{1/2}`.
///
/// Finite sections cannot see this growth once it is carried by functions
/// concentrated near the boundary; the bound can. Returns zeros for spaces
/// other than H^2.
pub fn kernel_lower_bounds(op: &WeightedCompositionOp, nmax: usize) -> Vec<f64> {
    let mut best = vec![0.0f64; nmax];
    if op.space != Space::H2 {
        return best;
    }
    for z0 in kernel_probe_points(&op.phi) {
        let u0 = 1.0 - z0.norm_sqr();
        let (mut z, mut u) = (z0, u0);
        let mut logw = 0.0;
        for slot in best.iter_mut() {
            let wz = op.w.eval(z).norm();
            if wz == 0.0 || !wz.is_finite() {
                break;
            }
            logw += wz.ln();
            match op.phi.pick_step(z, u) {
                Some((nz, nu)) => {
                    z = nz;
                    u = nu;
                }
                None => break,
            }
            let v = (logw + 0.5 * (u0 / u).ln()).exp();
            if v > *slot {
                *slot = v;
            }
        }
    }
    best
}

/// `||T^n||^{1/n}` over a schedule of powers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GelfandReport {
    pub schedule: Vec<usize>,
    /// From the `N` section.
    pub section: Vec<f64>,
    /// From the `2N` section.
    pub section_2n: Vec<f64>,
    /// From the H^2 kernel bound (zeros elsewhere).
    pub kernel: Vec<f64>,
    /// Pointwise max of the `2N` section and kernel values.
    pub values: Vec<f64>,
    pub estimate: f64,
    /// `|section_2n - section|` at the last power.
    pub delta: f64,
    pub diverged: bool,
}

pub fn default_gelfand_schedule() -> Vec<usize> {
    vec![4, 8, 16, 32, 64]
}

/// Norms `||A^n||` for an increasing schedule, reusing earlier powers.
fn power_norms(a: &CMatrix, schedule: &[usize]) -> Vec<f64> {
    let mut out = Vec::with_capacity(schedule.len());
    let mut cur: Option<(usize, CMatrix)> = None;
    for &n in schedule {
        let p = match &cur {
            Some((m, p)) if *m <= n => {
                if *m == n {
                    p.clone()
                } else if n == 2 * m {
                    cmul(p, p)
                } else {
                    cmul(p, &matrix_power(a, n - m))
                }
            }
            _ => matrix_power(a, n),
        };
        out.push(spectral_norm(&p));
        cur = Some((n, p));
    }
    out
}

pub fn gelfand_radius(op: &WeightedCompositionOp, schedule: &[usize]) -> Result<GelfandReport> {
    if schedule.is_empty() || schedule.contains(&0) {
        return Err(Error::InvalidParameter("schedule needs positive powers".into()));
    }
    let mut sched = schedule.to_vec();
    sched.sort_unstable();
    sched.dedup();
    let big = section(op, 2 * op.trunc)?;
    let small = leading_block(&big, op.trunc);
    let root = |v: f64, n: usize| v.powf(1.0 / n as f64);
    let section: Vec<f64> = power_norms(&small, &sched).into_iter().zip(&sched).map(|(v, &n)| root(v, n)).collect();
    let section_2n: Vec<f64> = power_norms(&big, &sched).into_iter().zip(&sched).map(|(v, &n)| root(v, n)).collect();
    let nmax = *sched.last().unwrap();
    let kb = kernel_lower_bounds(op, nmax);
    let kernel: Vec<f64> = sched.iter().map(|&n| root(kb[n - 1], n)).collect();
    let values: Vec<f64> = section_2n.iter().zip(&kernel).map(|(a, b)| a.max(*b)).collect();
    let diverged = values.iter().any(|v| !v.is_finite() || *v > 1e6);
    Ok(GelfandReport {
        estimate: *values.last().unwrap(),
        delta: (section_2n.last().unwrap() - section.last().unwrap()).abs(),
        schedule: sched,
        section,
        section_2n,
        kernel,
        values,
        diverged,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PowerBound {
    Bounded { sup: f64 },
    Unbounded { growth: Vec<f64> },
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerBoundReport {
    pub verdict: PowerBound,
    /// `||T^n||`, `n = 1..=horizon`, lower estimates at `N` (section and
    /// kernel bound combined).
    pub trace: Vec<f64>,
    /// The same at `2N`.
    pub trace_2n: Vec<f64>,
    pub horizon: usize,
}

pub const UNBOUNDED_THRESHOLD: f64 = 1e3;

fn norm_trace(a: &CMatrix, horizon: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(horizon);
    let mut p = a.clone();
    for n in 1..=horizon {
        if n > 1 {
            p = cmul(&p, a);
        }
        out.push(spectral_norm(&p));
    }
    out
}

/// `||T^n||` for `n <= horizon` at two truncations.
///
/// Growth past 1e3 that peaks in the last quarter of the horizon is
/// unbounded; sups agreeing within 5% (and below 1e3) are bounded.
pub fn power_bounded_probe(op: &WeightedCompositionOp, horizon: usize) -> Result<PowerBoundReport> {
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be >= 1".into()));
    }
    let big = section(op, 2 * op.trunc)?;
    let small = leading_block(&big, op.trunc);
    let kb = kernel_lower_bounds(op, horizon);
    let combine = |t: Vec<f64>| -> Vec<f64> { t.into_iter().zip(&kb).map(|(a, b)| a.max(*b)).collect() };
    let trace = combine(norm_trace(&small, horizon));
    let trace_2n = combine(norm_trace(&big, horizon));
    let sup = |t: &[f64]| t.iter().copied().fold(0.0, f64::max);
    let (s1, s2) = (sup(&trace), sup(&trace_2n));
    let argmax = trace_2n
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) })
        .0;
    let verdict = if !s2.is_finite() || (s2 > UNBOUNDED_THRESHOLD && 4 * (argmax + 1) > 3 * horizon) {
        PowerBound::Unbounded {
            growth: trace_2n.clone(),
        }
    } else if s2 < UNBOUNDED_THRESHOLD && (s2 - s1).abs() <= 0.05 * s2 {
        PowerBound::Bounded { sup: s2 }
    } else {
        PowerBound::Inconclusive
    };
    Ok(PowerBoundReport {
        verdict,
        trace,
        trace_2n,
        horizon,
    })
}

/// `(||T^n||, ||T^n - P||)` for `n = 1..=horizon` on the `N` section.
pub fn iterate_norm_trace(op: &WeightedCompositionOp, horizon: usize, p: Option<&CMatrix>) -> Result<Vec<(f64, f64)>> {
    let a = section(op, op.trunc)?;
    let mut out = Vec::with_capacity(horizon);
    let mut pow = a.clone();
    for n in 1..=horizon {
        if n > 1 {
            pow = cmul(&pow, &a);
        }
        let norm = spectral_norm(&pow);
        let diff = match p {
            Some(p) => spectral_norm(&(&pow - p)),
            None => norm,
        };
        out.push((norm, diff));
    }
    Ok(out)
}
