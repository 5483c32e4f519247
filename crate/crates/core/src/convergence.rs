//! Asymptotics of the iterates `T^n`: uniform, strong or weak convergence,
//! the limit projection, and the spectra of automorphic operators.

use num_complex::Complex64;
use serde::Serialize;

use crate::discmap::{classify_automorphism, denjoy_wolff, AutomorphismClass, DiscMap, FixedPointLocation, MapKind, DEFAULT_ORDER_BOUND};
use crate::error::{Error, Result};
use crate::holofunc::{default_hinf_schedule, norm_hinf_estimate, unit_roots, CoeffSeries, Recoverer};
use crate::linalg::{similarity_diag, CMatrix};
use crate::wco::{iterate_direct, iterate_norm_trace, power_bounded_probe, PowerBound, WeightedCompositionOp};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Uniform,
    StrongNotUniform,
    WeakNotStrong,
    /// Weak convergence holds; no certificate decides between strong and
    /// uniform.
    Weak,
    None,
    Inconclusive,
}

impl Mode {
    pub fn converges(self) -> bool {
        matches!(self, Mode::Uniform | Mode::StrongNotUniform | Mode::WeakNotStrong | Mode::Weak)
    }
}

/// The limit `P = lim T^n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LimitProjection {
    Zero,
    /// `P f = w_tilde f(alpha)`.
    RankOne {
        w_tilde: CoeffSeries,
        alpha: Complex64,
        /// Factors multiplied before the product settled.
        factors: usize,
    },
}

impl LimitProjection {
    /// `P` as an `n x n` matrix in the basis `e_k = z^k / d_k`.
    pub fn matrix(&self, n: usize, basis: Option<&[f64]>) -> CMatrix {
        match self {
            LimitProjection::Zero => CMatrix::zeros(n, n),
            LimitProjection::RankOne { w_tilde, alpha, .. } => {
                let wt = w_tilde.truncated(n);
                let mut pow = vec![ONE; n];
                for j in 1..n {
                    pow[j] = pow[j - 1] * alpha;
                }
                let p = CMatrix::from_fn(n, n, |i, j| wt.coeffs()[i] * pow[j]);
                match basis {
                    None => p,
                    Some(d) => similarity_diag(&p, d),
                }
            }
        }
    }
}

/// One row of an iterate trace, as written to `trace.csv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub n: usize,
    pub norm: f64,
    pub norm_minus_p: f64,
    /// Case-specific pointwise witness, e.g. `|T^n 1 (alpha)|`.
    pub witness: Option<f64>,
}

/// Inputs that decided the classification.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Rationale {
    pub theorem: String,
    pub alpha: Option<Complex64>,
    pub w_alpha: Option<Complex64>,
    pub v_sup: Option<f64>,
    pub re_certificate: Option<String>,
    pub power_bound: Option<String>,
    pub tol: f64,
    pub theta_frac: Option<f64>,
    pub boundary_fraction: Option<f64>,
    pub witness_point: Option<Complex64>,
    pub witness_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub mode: Mode,
    pub rationale: Rationale,
    pub evidence: Vec<TraceRow>,
    /// `||v^m||_2`, `m = 1, 2, ...` (elliptic finite-order case).
    pub v_power_l2: Vec<f64>,
    pub limit: Option<LimitProjection>,
    pub caveats: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifyOptions {
    pub tol: f64,
    pub horizon: usize,
    /// User assertion that the essential spectral radius is below one.
    pub assert_re_below_one: bool,
    pub theta_frac: f64,
    /// Powers of `v` tracked in the elliptic finite-order case.
    pub v_powers: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            tol: 1e-8,
            horizon: 50,
            assert_re_below_one: false,
            theta_frac: 0.05,
            v_powers: 50,
        }
    }
}

/// `w_tilde = lim w (w o phi) ... (w o phi_{n-1})` on the sampling grid.
///
/// Requires `phi(alpha) = alpha` and `w(alpha) = 1`. The product stops once
/// every factor is within `tol * 1e-2` of one.
pub fn limit_projection(op: &WeightedCompositionOp, alpha: Complex64, tol: f64, max_factors: usize) -> Result<LimitProjection> {
    if alpha.norm() >= 1.0 {
        return Err(Error::OutsideDisc(alpha));
    }
    let miss = (op.phi.eval(alpha) - alpha).norm();
    if miss > 1e-10 {
        return Err(Error::NotFixedPoint(miss));
    }
    let wa = op.w.eval(alpha);
    if (wa - ONE).norm() > tol {
        return Err(Error::Precondition(format!("w(alpha) = {wa} is not 1")));
    }
    let grid = op.grid_for(op.trunc);
    grid.require_interior()?;
    let mut zs = grid.nodes();
    let mut prod = vec![ONE; zs.len()];
    for k in 0..max_factors {
        let mut dev: f64 = 0.0;
        for (z, p) in zs.iter_mut().zip(prod.iter_mut()) {
            let f = op.w.eval(*z);
            dev = dev.max((f - ONE).norm());
            *p *= f;
            *z = op.phi.eval(*z);
        }
        if dev < tol * 1e-2 {
            return Ok(LimitProjection::RankOne {
                w_tilde: CoeffSeries::new(Recoverer::new(grid, op.trunc)?.recover(&prod))?,
                alpha,
                factors: k + 1,
            });
        }
    }
    Err(Error::Precondition(format!("infinite product did not settle within {max_factors} factors")))
}

fn trace_rows(op: &WeightedCompositionOp, horizon: usize, p: Option<&CMatrix>, witness: impl Fn(usize) -> Option<f64>) -> Result<Vec<TraceRow>> {
    Ok(iterate_norm_trace(op, horizon, p)?
        .into_iter()
        .enumerate()
        .map(|(i, (norm, diff))| TraceRow {
            n: i + 1,
            norm,
            norm_minus_p: diff,
            witness: witness(i + 1),
        })
        .collect())
}

/// Classification for maps with an interior Denjoy-Wolff point.
///
/// Convergence needs `|w(alpha)| < 1` or `w(alpha) = 1` and power
/// boundedness; then the iterates converge weakly, and uniformly once the
/// essential spectral radius is certified below one (`||phi||_inf < 1`
/// makes the operator compact, or the user asserts it).
pub fn classify_interior_dw(op: &WeightedCompositionOp, opts: &ClassifyOptions) -> Result<ConvergenceReport> {
    let dw = denjoy_wolff(&op.phi, 1e-13, 200_000)?;
    if dw.location != FixedPointLocation::Interior {
        return Err(Error::Precondition("Denjoy-Wolff point is on the boundary".into()));
    }
    let alpha = dw.dw_point;
    let wa = op.w.eval(alpha);
    let mut rationale = Rationale {
        alpha: Some(alpha),
        w_alpha: Some(wa),
        tol: opts.tol,
        ..Rationale::default()
    };
    let to_zero = wa.norm() < 1.0 - opts.tol;
    let to_rank_one = (wa - ONE).norm() < opts.tol;
    let one = CoeffSeries::one(1);
    let witness = |n: usize| -> Option<f64> {
        iterate_direct(op, n, &one)
            .ok()
            .and_then(|s| s.evaluate(alpha).ok())
            .map(|v| v.norm())
    };

    if !to_zero && !to_rank_one {
        rationale.theorem = "convergence requires |w(alpha)| < 1 or w(alpha) = 1".into();
        return Ok(ConvergenceReport {
            mode: Mode::None,
            rationale,
            evidence: trace_rows(op, opts.horizon, None, witness)?,
            v_power_l2: Vec::new(),
            limit: None,
            caveats: Vec::new(),
        });
    }

    let probe = power_bounded_probe(op, opts.horizon)?;
    rationale.power_bound = Some(match &probe.verdict {
        PowerBound::Bounded { sup } => format!("bounded, sup {sup:e}"),
        PowerBound::Unbounded { .. } => "unbounded".into(),
        PowerBound::Inconclusive => "inconclusive".into(),
    });
    let mut caveats = vec!["resolvent-pole condition assumed via theorem logic".to_string()];
    match probe.verdict {
        PowerBound::Unbounded { .. } => {
            rationale.theorem = "convergence requires sup ||T^n|| < infinity".into();
            return Ok(ConvergenceReport {
                mode: Mode::None,
                rationale,
                evidence: trace_rows(op, opts.horizon, None, witness)?,
                v_power_l2: Vec::new(),
                limit: None,
                caveats,
            });
        }
        PowerBound::Inconclusive => {
            rationale.theorem = "power boundedness undecided".into();
            return Ok(ConvergenceReport {
                mode: Mode::Inconclusive,
                rationale,
                evidence: trace_rows(op, opts.horizon, None, witness)?,
                v_power_l2: Vec::new(),
                limit: None,
                caveats,
            });
        }
        PowerBound::Bounded { .. } => {}
    }

    let limit = if to_zero {
        LimitProjection::Zero
    } else {
        match limit_projection(op, alpha, opts.tol, 100_000) {
            Ok(p) => p,
            Err(e) => {
                caveats.push(format!("limit projection: {e}"));
                rationale.theorem = "weak convergence; limit product did not settle".into();
                return Ok(ConvergenceReport {
                    mode: Mode::Inconclusive,
                    rationale,
                    evidence: trace_rows(op, opts.horizon, None, witness)?,
                    v_power_l2: Vec::new(),
                    limit: None,
                    caveats,
                });
            }
        }
    };
    let basis = op.space.basis_weights(op.trunc)?;
    let pm = limit.matrix(op.trunc, basis.as_deref());
    let evidence = trace_rows(op, opts.horizon, Some(&pm), witness)?;

    rationale.re_certificate = match op.phi.certified_sup() {
        Some(s) if s < 1.0 => Some(format!("||phi||_inf <= {s} < 1: compact, r_e = 0")),
        _ if opts.assert_re_below_one => Some("user assertion r_e < 1".into()),
        _ => None,
    };
    let mut mode = if rationale.re_certificate.is_some() { Mode::Uniform } else { Mode::Weak };
    if mode == Mode::Uniform && !evidence.iter().any(|r| r.norm_minus_p < opts.tol) {
        caveats.push(format!("certified uniform, but ||T^n - P|| stayed above {} within the horizon", opts.tol));
        mode = Mode::Weak;
    }
    rationale.theorem = match mode {
        Mode::Uniform => "uniform convergence iff r_e(T) < 1 (with |w(alpha)| < 1 or w(alpha) = 1 and power boundedness)".into(),
        _ => "weak convergence: |w(alpha)| < 1 or w(alpha) = 1, and power bounded".into(),
    };
    Ok(ConvergenceReport {
        mode,
        rationale,
        evidence,
        v_power_l2: Vec::new(),
        limit: Some(limit),
        caveats,
    })
}

/// The rotation multiplier of `phi` when it is `z -> lambda z`.
pub fn rotation_multiplier(phi: &DiscMap) -> Option<Complex64> {
    if let MapKind::Rotation(l) = phi.kind() {
        return Some(*l);
    }
    let m = phi.as_moebius()?.normalized();
    let zero = Complex64::new(0.0, 0.0);
    (m.b.norm() < 1e-14 && m.c.norm() < 1e-14 && (m.a.norm() - 1.0).abs() < 1e-12 && m.d != zero).then(|| m.a / m.d)
}

const BOUNDARY_GRID: usize = 4096;

/// Elliptic finite-order case `phi(z) = lambda z`, `lambda^k = 1`, decided
/// by `v = w(z) w(lambda z) ... w(lambda^{k-1} z)`.
pub fn classify_elliptic_finite(op: &WeightedCompositionOp, opts: &ClassifyOptions) -> Result<ConvergenceReport> {
    let lambda = rotation_multiplier(&op.phi).ok_or_else(|| Error::Precondition("map is not a rotation z -> lambda z".into()))?;
    let k = match classify_automorphism(&op.phi, DEFAULT_ORDER_BOUND) {
        AutomorphismClass::Elliptic { order: Some(k), .. } => k as usize,
        _ => return Err(Error::Precondition("rotation is not of finite order".into())),
    };
    if !op.w.regular_on_circle() {
        return Err(Error::Precondition("weight must extend continuously to the circle".into()));
    }
    let w = &op.w;
    let v = |z: Complex64| -> Complex64 {
        let mut p = ONE;
        let mut u = z;
        for _ in 0..k {
            p *= w.eval(u);
            u *= lambda;
        }
        p
    };
    let sup = norm_hinf_estimate(v, &default_hinf_schedule())?;
    let roots = unit_roots(BOUNDARY_GRID);
    let boundary: Vec<Complex64> = roots.iter().map(|&u| v(u)).collect();
    let v_power_l2: Vec<f64> = (1..=opts.v_powers)
        .map(|m| {
            (boundary.iter().map(|x| x.norm_sqr().powi(m as i32)).sum::<f64>() / BOUNDARY_GRID as f64).sqrt()
        })
        .collect();
    let v0 = v(Complex64::new(0.0, 0.0));
    let constant = boundary.iter().all(|x| (x - v0).norm() < 1e-12);
    let mut caveats = Vec::new();
    if constant {
        caveats.push("v is constant: the trichotomy assumes a non-constant v; reported by the value of |v|".into());
    }
    let mut rationale = Rationale {
        theorem: String::new(),
        alpha: Some(Complex64::new(0.0, 0.0)),
        w_alpha: Some(w.eval(Complex64::new(0.0, 0.0))),
        v_sup: Some(sup.value),
        tol: opts.tol,
        ..Rationale::default()
    };
    let horizon_m = (opts.horizon / k).max(1);
    let km_rows = |rows: Vec<TraceRow>| -> Vec<TraceRow> { rows.into_iter().filter(|r| r.n % k == 0).collect() };

    let mode;
    let mut limit = Some(LimitProjection::Zero);
    if sup.value < 1.0 - opts.tol {
        mode = Mode::Uniform;
        rationale.theorem = "||v||_inf < 1: ||T^n|| -> 0".into();
    } else if sup.value > 1.0 + opts.tol {
        mode = Mode::None;
        limit = None;
        rationale.theorem = "||v||_inf > 1: no convergence".into();
        let dir = sup.argmax / sup.argmax.norm();
        let mut z0 = dir * 0.95;
        let mut r = 0.95;
        while v(z0).norm() <= 1.0 && r < 0.9999 {
            r = 1.0 - (1.0 - r) / 2.0;
            z0 = dir * r;
        }
        rationale.witness_point = Some(z0);
        rationale.witness_value = Some(v(z0).norm());
        if v(z0).norm() <= 1.0 {
            caveats.push("no interior witness with |v(z0)| > 1 found".into());
        }
    } else {
        let close = boundary.iter().filter(|x| 1.0 - x.norm() < opts.tol).count();
        let frac = close as f64 / BOUNDARY_GRID as f64;
        rationale.theta_frac = Some(opts.theta_frac);
        rationale.boundary_fraction = Some(frac);
        if frac >= opts.theta_frac {
            mode = Mode::WeakNotStrong;
            rationale.theorem = "||v||_inf = 1 and |v| = 1 on a set of positive measure: weak, not strong (||v^n||_2 does not tend to 0)".into();
        } else {
            mode = Mode::StrongNotUniform;
            rationale.theorem = "||v||_inf = 1 and |v| < 1 a.e.: strong, not uniform".into();
        }
    }
    let one = CoeffSeries::one(1);
    let evidence = km_rows(trace_rows(op, horizon_m * k, None, |n| {
        if n % k == 0 {
            iterate_direct(op, n, &one).ok().map(|s| s.h2_norm())
        } else {
            None
        }
    })?);
    if mode == Mode::Uniform && !evidence.iter().any(|r| r.norm < opts.tol) {
        caveats.push(format!("||T^n|| stayed above {} within the horizon", opts.tol));
    }
    Ok(ConvergenceReport {
        mode,
        rationale,
        evidence,
        v_power_l2,
        limit,
        caveats,
    })
}

/// Spectrum of `T_{w,phi}` for an automorphism `phi` and a weight that is
/// continuous on the closed disc and bounded away from zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum SpectrumSet {
    Circle { radius: f64 },
    Annulus { r_in: f64, r_out: f64 },
}

impl SpectrumSet {
    /// Whether a spectral radius estimate `r` is compatible with the set.
    pub fn contains_radius(&self, r: f64, tol: f64) -> bool {
        match *self {
            SpectrumSet::Circle { radius } => (r - radius).abs() <= tol,
            SpectrumSet::Annulus { r_in, r_out } => r >= r_in - tol && r <= r_out + tol,
        }
    }

    pub fn spectral_radius(&self) -> f64 {
        match *self {
            SpectrumSet::Circle { radius } => radius,
            SpectrumSet::Annulus { r_out, .. } => r_out,
        }
    }
}

pub const DEFAULT_WEIGHT_FLOOR: f64 = 1e-6;

fn boundary_min_modulus(op: &WeightedCompositionOp) -> Result<f64> {
    if !op.w.regular_on_circle() {
        return Err(Error::Precondition("weight must extend continuously to the circle".into()));
    }
    Ok(unit_roots(BOUNDARY_GRID).iter().map(|&u| op.w.eval(u).norm()).fold(f64::INFINITY, f64::min))
}

pub fn spectrum_automorphism(op: &WeightedCompositionOp, class: &AutomorphismClass, floor: f64) -> Result<SpectrumSet> {
    let m = boundary_min_modulus(op)?;
    if m < floor {
        return Err(Error::Precondition(format!("min |w| on the circle is {m:e}, below the floor {floor:e}")));
    }
    match *class {
        AutomorphismClass::Elliptic { order: None, fixed_point, .. } => Ok(SpectrumSet::Circle {
            radius: op.w.eval(fixed_point).norm(),
        }),
        AutomorphismClass::Elliptic { order: Some(k), .. } => Err(Error::Precondition(format!(
            "elliptic of finite order {k}: use the finite-order classification"
        ))),
        AutomorphismClass::Parabolic { fixed_point } => Ok(SpectrumSet::Circle {
            radius: op.w.eval(fixed_point).norm(),
        }),
        AutomorphismClass::Hyperbolic {
            attractive,
            repulsive,
            deriv_attractive,
            deriv_repulsive,
        } => Ok(SpectrumSet::Annulus {
            r_in: op.w.eval(repulsive).norm() / deriv_repulsive.sqrt(),
            r_out: op.w.eval(attractive).norm() / deriv_attractive.sqrt(),
        }),
        AutomorphismClass::NotAutomorphism => Err(Error::Precondition("map is not a disc automorphism".into())),
    }
}

/// Elliptic automorphism of infinite order: the iterates converge
/// uniformly iff `|w(alpha)| < 1`.
pub fn corollary_elliptic_infinite(op: &WeightedCompositionOp, opts: &ClassifyOptions) -> Result<ConvergenceReport> {
    let alpha = match classify_automorphism(&op.phi, DEFAULT_ORDER_BOUND) {
        AutomorphismClass::Elliptic { order: None, fixed_point, .. } => fixed_point,
        _ => return Err(Error::Precondition("map is not an elliptic automorphism of infinite order".into())),
    };
    let m = boundary_min_modulus(op)?;
    if m < DEFAULT_WEIGHT_FLOOR {
        return Err(Error::Precondition(format!("min |w| on the circle is {m:e}")));
    }
    let wa = op.w.eval(alpha);
    let mut rationale = Rationale {
        theorem: "uniform convergence iff |w(alpha)| < 1".into(),
        alpha: Some(alpha),
        w_alpha: Some(wa),
        tol: opts.tol,
        ..Rationale::default()
    };
    let mut caveats = Vec::new();
    let evidence = trace_rows(op, opts.horizon, None, |_| None)?;
    let report = |mode, rationale, caveats, limit| ConvergenceReport {
        mode,
        rationale,
        evidence: evidence.clone(),
        v_power_l2: Vec::new(),
        limit,
        caveats,
    };
    if wa.norm() < 1.0 - opts.tol {
        return Ok(report(Mode::Uniform, rationale, caveats, Some(LimitProjection::Zero)));
    }
    if wa.norm() > 1.0 + opts.tol {
        rationale.theorem.push_str("; spectral radius |w(alpha)| > 1");
        return Ok(report(Mode::None, rationale, caveats, None));
    }
    if let Some(c) = op.w.as_constant() {
        rationale.theorem.push_str("; w is a unimodular constant, so T is a multiple of an isometry");
        caveats.push(format!("T = {c} C_phi never converges for an irrational rotation"));
        return Ok(report(Mode::None, rationale, caveats, None));
    }
    let probe = power_bounded_probe(op, opts.horizon)?;
    rationale.power_bound = Some(format!("{:?}", probe.verdict));
    caveats.push("|w(alpha)| = 1: not uniform by the corollary; strong/weak behaviour undecided".into());
    if (wa - ONE).norm() < opts.tol {
        caveats.push("edge case w(alpha) = 1".into());
    }
    let mode = match probe.verdict {
        PowerBound::Unbounded { .. } => Mode::None,
        _ => Mode::Inconclusive,
    };
    Ok(report(mode, rationale, caveats, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discmap::Moebius;
    use crate::weight::Weight;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn half() -> DiscMap {
        DiscMap::series(CoeffSeries::from_real(&[0.0, 0.5]).unwrap())
    }

    fn opts() -> ClassifyOptions {
        ClassifyOptions::default()
    }

    #[test]
    fn limit_projection_examples() {
        let op = WeightedCompositionOp::h2(Weight::one(), half(), 32).unwrap();
        match limit_projection(&op, c(0.0), 1e-10, 1000).unwrap() {
            LimitProjection::RankOne { w_tilde, .. } => {
                assert!((w_tilde.coeffs()[0] - ONE).norm() < 1e-14);
                assert!(w_tilde.coeffs()[1..].iter().all(|x| x.norm() < 1e-14));
            }
            p => panic!("{p:?}"),
        }
        let op = WeightedCompositionOp::h2(Weight::from_real(&[1.0, 0.5]).unwrap(), half(), 32).unwrap();
        let p = limit_projection(&op, c(0.0), 1e-10, 1000).unwrap();
        let LimitProjection::RankOne { w_tilde, .. } = &p else { panic!() };
        let z = Complex64::new(0.3, 0.4);
        let want: Complex64 = (1..60).map(|k| 1.0 + z / 2f64.powi(k)).product();
        assert!((w_tilde.eval_poly(z) - want).norm() < 1e-9);
        let again = crate::wco::apply(&op, w_tilde).unwrap();
        let diff = again.coeffs().iter().zip(w_tilde.coeffs()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-8);
        let pm = p.matrix(32, None);
        assert!((&pm * &pm - &pm).norm() < 1e-8);
    }

    #[test]
    fn interior_examples() {
        let op = WeightedCompositionOp::h2(Weight::from_real(&[0.5, 0.5]).unwrap(), half(), 64).unwrap();
        let r = classify_interior_dw(&op, &opts()).unwrap();
        assert_eq!(r.mode, Mode::Uniform);
        assert_eq!(r.limit, Some(LimitProjection::Zero));
        assert!(r.evidence.last().unwrap().norm < 1e-8);

        let op = WeightedCompositionOp::h2(Weight::one(), half(), 64).unwrap();
        let r = classify_interior_dw(&op, &opts()).unwrap();
        assert_eq!(r.mode, Mode::Uniform);
        assert!(matches!(r.limit, Some(LimitProjection::RankOne { .. })));
        assert!(r.evidence[39].norm_minus_p < 1e-6);

        let op = WeightedCompositionOp::h2(Weight::constant(c(2.0)), half(), 64).unwrap();
        let r = classify_interior_dw(&op, &opts()).unwrap();
        assert_eq!(r.mode, Mode::None);
        for row in r.evidence.iter().take(30) {
            let want = 2f64.powi(row.n as i32);
            assert!((row.witness.unwrap() - want).abs() <= 1e-10 * want);
        }
    }

    #[test]
    fn interior_needs_interior_point() {
        let m = Moebius::new(c(2.0), c(1.0), c(1.0), c(2.0)).unwrap();
        let op = WeightedCompositionOp::h2(Weight::one(), DiscMap::moebius(m).unwrap(), 16).unwrap();
        assert!(matches!(classify_interior_dw(&op, &opts()), Err(Error::Precondition(_))));
    }

    #[test]
    fn elliptic_trichotomy() {
        let flip = DiscMap::rotation(c(-1.0)).unwrap();
        let op = WeightedCompositionOp::h2(Weight::from_real(&[0.5, 0.5]).unwrap(), flip.clone(), 64).unwrap();
        let r = classify_elliptic_finite(&op, &opts()).unwrap();
        assert_eq!(r.mode, Mode::Uniform);
        assert!((r.rationale.v_sup.unwrap() - 0.5).abs() < 1e-12);

        let op = WeightedCompositionOp::h2(Weight::from_real(&[0.0, 1.0]).unwrap(), flip.clone(), 64).unwrap();
        let r = classify_elliptic_finite(&op, &opts()).unwrap();
        assert_eq!(r.mode, Mode::WeakNotStrong);
        assert!(r.v_power_l2.iter().all(|x| (x - 1.0).abs() < 1e-12));

        let op = WeightedCompositionOp::h2(Weight::from_real(&[1.0, 1.0]).unwrap(), flip, 64).unwrap();
        let r = classify_elliptic_finite(&op, &opts()).unwrap();
        assert_eq!(r.mode, Mode::None);
        let z0 = r.rationale.witness_point.unwrap();
        assert!((z0.norm() - 0.95).abs() < 1e-9 && z0.re.abs() < 1e-6);
        assert!((r.rationale.witness_value.unwrap() - 1.9025).abs() < 1e-9);
    }

    #[test]
    fn elliptic_strong_not_uniform() {
        let op = WeightedCompositionOp::h2(Weight::from_real(&[0.5, 0.5]).unwrap(), DiscMap::identity(), 32).unwrap();
        let r = classify_elliptic_finite(&op, &opts()).unwrap();
        assert_eq!(r.mode, Mode::StrongNotUniform);
        assert!(r.v_power_l2.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn weak_modes_converge_pointwise() {
        // v = -z^2: T^{2m} f = (-1)^m z^{2m} f tends to 0 inside the disc.
        let flip = DiscMap::rotation(c(-1.0)).unwrap();
        let op = WeightedCompositionOp::h2(Weight::from_real(&[0.0, 1.0]).unwrap(), flip, 64).unwrap();
        let f = CoeffSeries::from_real(&[1.0, -0.3, 0.2]).unwrap();
        let z = Complex64::new(0.3, -0.5);
        let a = iterate_direct(&op, 10, &f).unwrap().evaluate(z).unwrap().norm();
        let b = iterate_direct(&op, 40, &f).unwrap().evaluate(z).unwrap().norm();
        assert!(b < a && b < 1e-5);
    }

    #[test]
    fn spectrum_examples() {
        let m = Moebius::new(c(2.0), c(1.0), c(1.0), c(2.0)).unwrap();
        let phi = DiscMap::moebius(m).unwrap();
        let op = WeightedCompositionOp::h2(Weight::one(), phi.clone(), 16).unwrap();
        let s = spectrum_automorphism(&op, &classify_automorphism(&phi, 64), DEFAULT_WEIGHT_FLOOR).unwrap();
        match s {
            SpectrumSet::Annulus { r_in, r_out } => {
                assert!((r_in - 1.0 / 3f64.sqrt()).abs() < 1e-12);
                assert!((r_out - 3f64.sqrt()).abs() < 1e-12);
            }
            s => panic!("{s:?}"),
        }
        let rot = DiscMap::rotation(Complex64::from_polar(1.0, 1.0)).unwrap();
        let op = WeightedCompositionOp::h2(Weight::from_real(&[0.5, 0.25]).unwrap(), rot.clone(), 16).unwrap();
        let s = spectrum_automorphism(&op, &classify_automorphism(&rot, 64), DEFAULT_WEIGHT_FLOOR).unwrap();
        assert_eq!(s, SpectrumSet::Circle { radius: 0.5 });
        let op = WeightedCompositionOp::h2(Weight::from_real(&[0.5, 0.5]).unwrap(), rot.clone(), 16).unwrap();
        assert!(spectrum_automorphism(&op, &classify_automorphism(&rot, 64), DEFAULT_WEIGHT_FLOOR).is_err());
    }

    #[test]
    fn corollary_examples() {
        let rot = DiscMap::rotation(Complex64::from_polar(1.0, 1.0)).unwrap();
        let o = ClassifyOptions { horizon: 30, ..opts() };
        let op = WeightedCompositionOp::h2(Weight::from_real(&[0.5, 0.25]).unwrap(), rot.clone(), 32).unwrap();
        let r = corollary_elliptic_infinite(&op, &o).unwrap();
        assert_eq!(r.mode, Mode::Uniform);
        assert!(r.evidence.last().unwrap().norm < 1e-6);
        let op = WeightedCompositionOp::h2(Weight::from_real(&[1.0, 1.0 / 3.0]).unwrap(), rot.clone(), 32).unwrap();
        let r = corollary_elliptic_infinite(&op, &o).unwrap();
        assert_ne!(r.mode, Mode::Uniform);
        assert!(r.caveats.iter().any(|c| c.contains("w(alpha) = 1")));
        let op = WeightedCompositionOp::h2(Weight::one(), rot, 32).unwrap();
        assert_eq!(corollary_elliptic_infinite(&op, &o).unwrap().mode, Mode::None);
    }
}
