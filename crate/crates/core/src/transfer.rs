//! Moving operators between spaces: composition operators on the right
//! half-plane, Hardy-Smirnoff spaces of simply connected domains, and the
//! weighted Hardy spaces H^2(d).

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::discmap::{angular_derivative, denjoy_wolff, neville_at_zero, Callable, DiscMap, FixedPointLocation, Moebius};
use crate::error::{Error, Result};
use crate::holofunc::{unit_roots, CoeffSeries, WeightSequence};
use crate::linalg::{cmul, spectral_norm, CMatrix};
use crate::report::{Refined, Tagged};
use crate::wco::{kernel_lower_bounds, norm_estimate, power_bounded_probe, section, Space, WeightedCompositionOp, UNBOUNDED_THRESHOLD};
use crate::weight::Weight;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

type Fun = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// A holomorphic self-map of the right half-plane fixing infinity.
#[derive(Clone)]
pub enum HalfPlaneKind {
    /// `a s + b` with `a > 0`, `Re b >= 0`.
    Affine { a: f64, b: Complex64 },
    Callable { f: Fun, label: String },
}

#[derive(Clone)]
pub struct HalfPlaneMap {
    pub kind: HalfPlaneKind,
    /// `Phi'(inf) = lim s / Phi(s)` as `s -> inf` non-tangentially.
    pub ang_deriv_inf: f64,
}

impl std::fmt::Debug for HalfPlaneMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "HalfPlaneMap({}, ang_deriv_inf = {})", self.label(), self.ang_deriv_inf)
    }
}

/// Sample points of the right half-plane: Cayley images of disc rings.
fn halfplane_samples() -> Vec<Complex64> {
    let m = Moebius::cayley();
    let mut out = vec![ONE];
    for r in [0.5, 0.9, 0.99, 0.999] {
        out.extend(unit_roots(64).into_iter().map(|u| m.eval(u * r)));
    }
    out
}

impl HalfPlaneMap {
    pub fn affine(a: f64, b: Complex64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) || b.re < 0.0 || !b.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "a s + b maps the half-plane into itself only for a > 0 and Re b >= 0 (a = {a}, b = {b})"
            )));
        }
        Ok(HalfPlaneMap {
            kind: HalfPlaneKind::Affine { a, b },
            ang_deriv_inf: 1.0 / a,
        })
    }

    pub fn identity() -> Self {
        HalfPlaneMap::affine(1.0, ZERO).unwrap()
    }

    /// A general map; the self-map property is probed on a sample grid and
    /// `Phi'(inf)` is extrapolated from `x / Phi(x)` at large real `x`.
    pub fn callable<F>(label: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        let f: Fun = Arc::new(f);
        for s in halfplane_samples() {
            let v = f(s);
            if !v.is_finite() || v.re < -1e-12 {
                return Err(Error::NotSelfMap { max_modulus: v.norm() });
            }
        }
        let hs = [1e-2, 1e-3, 1e-4];
        let qs: Vec<f64> = hs.iter().map(|h| (1.0 / h / f(Complex64::new(1.0 / h, 0.0))).re).collect();
        let ang = neville_at_zero(&hs, &qs);
        if !(ang > 1e-12 && ang.is_finite()) {
            return Err(Error::Precondition(format!("map does not fix infinity with a positive angular derivative (estimate {ang})")));
        }
        Ok(HalfPlaneMap {
            kind: HalfPlaneKind::Callable { f, label: label.into() },
            ang_deriv_inf: ang,
        })
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        match &self.kind {
            HalfPlaneKind::Affine { a, b } => s * *a + b,
            HalfPlaneKind::Callable { f, .. } => f(s),
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            HalfPlaneKind::Affine { a, b } => format!("affine:{a},{b}"),
            HalfPlaneKind::Callable { label, .. } => label.clone(),
        }
    }

    /// The disc map `M o Phi o M` when it is Moebius.
    pub fn disc_moebius(&self) -> Option<Moebius> {
        match &self.kind {
            HalfPlaneKind::Affine { a, b } => {
                let a = Complex64::new(*a, 0.0);
                Some(Moebius {
                    a: a + ONE - b,
                    b: ONE - a - b,
                    c: b + ONE - a,
                    d: a + b + ONE,
                })
            }
            HalfPlaneKind::Callable { .. } => None,
        }
    }
}

/// `T_{w,phi}` on H^2 unitarily equivalent to `C_Phi` on H^2 of the
/// half-plane: `phi = M o Phi o M`, `w = (1 + phi) / (1 + z)` with
/// `M(z) = (1 - z) / (1 + z)`.
pub fn halfplane_to_disc(phi_h: &HalfPlaneMap, trunc: usize) -> Result<WeightedCompositionOp> {
    if let Some(m) = phi_h.disc_moebius() {
        // phi(-1) = -1 makes 1 + phi = (a + c)(1 + z) / (c z + d).
        let phi = DiscMap::moebius(m)?;
        let w = Weight::rational(ZERO, m.a + m.c, m.c, m.d)?;
        return WeightedCompositionOp::h2(w, phi, trunc);
    }
    let cay = Moebius::cayley();
    let h = phi_h.clone();
    // M(-1) is infinity, which Phi fixes.
    let map = move |z: Complex64| if z == -ONE { -ONE } else { cay.eval(h.eval(cay.eval(z))) };
    let ang = phi_h.ang_deriv_inf;
    let phi_fn = map.clone();
    let phi = DiscMap::callable(Callable::new(format!("M o {} o M", phi_h.label()), false, phi_fn));
    let w = Weight::Callable(Callable::new("(1 + phi) / (1 + z)", false, move |z| {
        if (ONE + z).norm() < 1e-7 {
            Complex64::new(ang, 0.0)
        } else {
            (ONE + map(z)) / (ONE + z)
        }
    }));
    let op = WeightedCompositionOp::h2(w, phi, trunc)?;
    let max_mod = unit_roots(256)
        .into_iter()
        .map(|u| op.phi.eval(u * 0.99).norm())
        .fold(0.0, f64::max);
    if !(max_mod < 1.0) {
        return Err(Error::NotSelfMap { max_modulus: max_mod });
    }
    Ok(op)
}

/// Norm of `T`: section norms at `N` and `2N`, each raised to the kernel
/// lower bound where that is larger.
pub fn operator_norm_evidence(op: &WeightedCompositionOp) -> Result<Refined> {
    let r = norm_estimate(op)?;
    let k = kernel_lower_bounds(op, 1)[0];
    Ok(Refined::new(r.value.max(k), r.at_2n.max(k)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalfPlaneNormCheck {
    pub label: String,
    pub ang_deriv_inf: f64,
    /// `phi'(-1)` from radial quotients of the disc map.
    pub radial_derivative: f64,
    pub formula: Tagged,
    pub estimate: Tagged,
    pub difference: f64,
}

/// `Phi'(inf)^{1/2}` against the norm of the transferred operator.
pub fn halfplane_norm_check(phi_h: &HalfPlaneMap, trunc: usize) -> Result<HalfPlaneNormCheck> {
    let op = halfplane_to_disc(phi_h, trunc)?;
    let formula = phi_h.ang_deriv_inf.sqrt();
    let est = operator_norm_evidence(&op)?;
    Ok(HalfPlaneNormCheck {
        label: phi_h.label(),
        ang_deriv_inf: phi_h.ang_deriv_inf,
        radial_derivative: angular_derivative(&op.phi, -ONE),
        formula: Tagged::certified(formula, "Phi'(inf)^(1/2)"),
        estimate: est.into(),
        difference: (est.at_2n - formula).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormDecay {
    /// `||T^n||` decays geometrically.
    Uniform,
    /// `||T^n|| >= 1` along the whole trace.
    NotUniform,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub label: String,
    pub ang_deriv_inf: f64,
    /// `|Phi_n(1)|` for the test point `s = 1`.
    pub orbit_modulus: Vec<f64>,
    /// Denjoy-Wolff point of the disc map; `-1` corresponds to infinity.
    pub disc_dw_point: Complex64,
    pub dw_at_infinity: bool,
    /// Condition (ii): DW at infinity and `Phi'(inf) < 1`.
    pub predicts_uniform: bool,
    /// `||T^n||` lower estimates at `N` and `2N`.
    pub trace: Vec<f64>,
    pub trace_2n: Vec<f64>,
    /// `Phi'(inf)^{n/2}`, the norm of `C_{Phi_n}` for affine maps.
    pub formula_trace: Vec<f64>,
    pub observed: NormDecay,
    pub consistent: bool,
}

/// Condition (ii) against the observed decay of `||T^n||`, for maps with
/// `Phi'(inf) != 1`.
pub fn halfplane_equivalence_suite(phi_h: &HalfPlaneMap, trunc: usize, horizon: usize, tol: f64) -> Result<EquivalenceReport> {
    if (phi_h.ang_deriv_inf - 1.0).abs() <= tol {
        return Err(Error::Precondition(format!(
            "the equivalence needs Phi'(inf) != 1, got {}",
            phi_h.ang_deriv_inf
        )));
    }
    let mut s = ONE;
    let mut orbit_modulus = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        s = phi_h.eval(s);
        orbit_modulus.push(s.norm());
    }
    let op = halfplane_to_disc(phi_h, trunc)?;
    let dw = denjoy_wolff(&op.phi, 1e-12, 100_000)?;
    let dw_at_infinity = dw.location == FixedPointLocation::Boundary && (dw.dw_point + ONE).norm() < 1e-6;
    let predicts_uniform = dw_at_infinity && phi_h.ang_deriv_inf < 1.0;
    let probe = power_bounded_probe(&op, horizon)?;
    let formula_trace: Vec<f64> = (1..=horizon).map(|n| phi_h.ang_deriv_inf.powf(n as f64 / 2.0)).collect();
    let t = &probe.trace_2n;
    let rate = t.last().copied().unwrap_or(1.0).powf(1.0 / horizon.max(1) as f64);
    let observed = if rate < 1.0 - 1e-3 && t.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)) {
        NormDecay::Uniform
    } else if t.iter().all(|v| *v >= 1.0 - tol) {
        NormDecay::NotUniform
    } else {
        NormDecay::Inconclusive
    };
    let consistent = match observed {
        NormDecay::Uniform => predicts_uniform,
        NormDecay::NotUniform => !predicts_uniform,
        NormDecay::Inconclusive => false,
    };
    Ok(EquivalenceReport {
        label: phi_h.label(),
        ang_deriv_inf: phi_h.ang_deriv_inf,
        orbit_modulus,
        disc_dw_point: dw.dw_point,
        dw_at_infinity,
        predicts_uniform,
        trace: probe.trace,
        trace_2n: probe.trace_2n,
        formula_trace,
        observed,
        consistent,
    })
}

/// A holomorphic function on the disc given by coefficients or pointwise.
#[derive(Debug, Clone)]
pub enum Holo {
    Series(CoeffSeries),
    Callable(Callable),
}

impl Holo {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            Holo::Series(s) => s.eval_poly(z),
            Holo::Callable(c) => c.call(z),
        }
    }
}

/// A conformal map `beta` of the disc onto a domain, with its derivative,
/// and a seed grid for inverting it.
#[derive(Debug, Clone)]
pub struct SmirnoffDomainSpec {
    pub beta: Holo,
    pub beta_prime: Holo,
    seeds: Arc<Vec<(Complex64, Complex64)>>,
}

const NEWTON_ITERS: usize = 100;

impl SmirnoffDomainSpec {
    /// `beta` from Taylor coefficients; the derivative is taken termwise.
    pub fn from_series(beta: CoeffSeries) -> Result<Self> {
        let d = beta.derivative();
        Self::new(Holo::Series(beta), Holo::Series(d))
    }

    pub fn new(beta: Holo, beta_prime: Holo) -> Result<Self> {
        // Zeros of beta' inside |z| < 0.999 from the winding number.
        let ring: Vec<Complex64> = unit_roots(4096).into_iter().map(|u| beta_prime.eval(u * 0.999)).collect();
        let winding: f64 = (0..ring.len()).map(|k| (ring[(k + 1) % ring.len()] / ring[k]).arg()).sum::<f64>() / std::f64::consts::TAU;
        if !winding.is_finite() || winding.round() != 0.0 {
            return Err(Error::InvalidParameter(format!("beta' has {} zeros in the disc: not conformal", winding.round())));
        }
        let mut seeds = Vec::new();
        for k in 0..=32 {
            let r = 0.999 * k as f64 / 32.0;
            let ring = if k == 0 { vec![ONE] } else { unit_roots(128) };
            for u in ring {
                let z = u * r;
                let (b, db) = (beta.eval(z), beta_prime.eval(z));
                if !b.is_finite() || !(db.norm() > 1e-12) {
                    return Err(Error::InvalidParameter(format!("beta' vanishes or blows up near {z}: not conformal")));
                }
                seeds.push((z, b));
            }
        }
        Ok(SmirnoffDomainSpec {
            beta,
            beta_prime,
            seeds: Arc::new(seeds),
        })
    }

    /// `beta^{-1}(zeta)` by damped Newton from the nearest seed.
    pub fn invert(&self, zeta: Complex64) -> Result<Complex64> {
        let seed = self
            .seeds
            .iter()
            .min_by(|a, b| (a.1 - zeta).norm().partial_cmp(&(b.1 - zeta).norm()).unwrap())
            .ok_or(Error::NewtonFailure(zeta))?;
        let mut z = seed.0;
        let mut res = self.beta.eval(z) - zeta;
        let tol = 1e-14 * (1.0 + zeta.norm());
        for _ in 0..NEWTON_ITERS {
            if res.norm() <= tol {
                break;
            }
            let step = res / self.beta_prime.eval(z);
            let mut t = 1.0;
            loop {
                let cand = z - step * t;
                let r = self.beta.eval(cand) - zeta;
                if cand.norm() < 1.0 && r.norm() < res.norm() {
                    z = cand;
                    res = r;
                    break;
                }
                t *= 0.5;
                if t < 1e-10 {
                    return if res.norm() <= 1e3 * tol { Ok(z) } else { Err(Error::NewtonFailure(zeta)) };
                }
            }
        }
        if res.norm() <= 1e3 * tol {
            Ok(z)
        } else {
            Err(Error::NewtonFailure(zeta))
        }
    }
}

fn validation_grid() -> Vec<Complex64> {
    let mut out = vec![ZERO];
    for r in [0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99] {
        out.extend(unit_roots(128).into_iter().map(|u| u * r));
    }
    out
}

/// Square root of `ratio(z)` continued along the segment from 0 to `z`,
/// starting from the principal root.
fn radial_sqrt(ratio: &(dyn Fn(Complex64) -> Complex64 + Send + Sync), z: Complex64) -> Complex64 {
    const STEPS: usize = 64;
    let mut prev = ratio(ZERO).sqrt();
    for k in 1..=STEPS {
        let r = ratio(z * (k as f64 / STEPS as f64)).sqrt();
        prev = if (r - prev).norm() <= (r + prev).norm() { r } else { -r };
    }
    prev
}

/// `T_{w,phi}` on H^2 equivalent to `C_Phi` on the Hardy-Smirnoff space of
/// `beta(D)`: `phi = beta^{-1} o Phi o beta` and
/// `w = (beta' / beta'(phi))^{1/2}`.
pub fn smirnoff_weight<F>(spec: &SmirnoffDomainSpec, phi_domain: F, trunc: usize) -> Result<WeightedCompositionOp>
where
    F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
{
    let grid = validation_grid();
    let phi_domain: Fun = Arc::new(phi_domain);
    let mut max_mod: f64 = 0.0;
    for &z in &grid {
        let p = spec.invert(phi_domain(spec.beta.eval(z)))?;
        max_mod = max_mod.max(p.norm());
    }
    if max_mod >= 1.0 {
        return Err(Error::NotSelfMap { max_modulus: max_mod });
    }
    let (sp, pd) = (spec.clone(), phi_domain.clone());
    let phi_fn = move |z: Complex64| sp.invert(pd(sp.beta.eval(z))).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
    let phi = DiscMap::callable(Callable::new("beta^-1 o Phi o beta", false, phi_fn.clone()));
    let sp = spec.clone();
    let ratio: Fun = Arc::new(move |z| sp.beta_prime.eval(z) / sp.beta_prime.eval(phi_fn(z)));

    // Principal root unless the ratio comes near the cut.
    let near_cut = grid.iter().any(|&z| {
        let q = ratio(z);
        q.re < 0.0 && q.im.abs() < 0.05 * q.norm()
    });
    let w = if !near_cut {
        let r = ratio.clone();
        Callable::new("(beta' / beta'(phi))^(1/2)", false, move |z| r(z).sqrt())
    } else {
        for r in [0.5, 0.9, 0.99] {
            let ring: Vec<Complex64> = unit_roots(128).into_iter().map(|u| radial_sqrt(ratio.as_ref(), u * r)).collect();
            for (k, v) in ring.iter().enumerate() {
                let next = ring[(k + 1) % ring.len()];
                if (next - v).norm() > 0.5 * (next.norm() + v.norm()) {
                    return Err(Error::BranchDiscontinuity(unit_roots(128)[k] * r));
                }
            }
        }
        let r = ratio.clone();
        Callable::new("(beta' / beta'(phi))^(1/2), radial branch", false, move |z| radial_sqrt(r.as_ref(), z))
    };
    WeightedCompositionOp::h2(Weight::Callable(w), phi, trunc)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelGrowthReport {
    pub w0: Complex64,
    /// `||T*^n k_{w0}||` for `n = 0..=horizon` from
    /// `T*^n k_{w0} = conj(prod w(phi_k(w0))) k_{phi_n(w0)}`.
    pub trace: Vec<f64>,
    /// The same from the adjoint section applied to the truncated kernel,
    /// while the orbit stays where the truncation is accurate.
    pub matrix_trace: Vec<Option<f64>>,
    pub orbit: Vec<Complex64>,
    pub threshold: f64,
    pub fired: bool,
    pub first_exceed: Option<usize>,
}

/// Growth of `||T*^n k_{w0}||`; fires once it passes 1e3.
pub fn kernel_growth_probe(op: &WeightedCompositionOp, w0: Complex64, horizon: usize) -> Result<KernelGrowthReport> {
    if op.space != Space::H2 {
        return Err(Error::Precondition("the kernel probe works on H^2".into()));
    }
    if w0.norm() >= 1.0 {
        return Err(Error::OutsideDisc(w0));
    }
    let (mut z, mut u) = (w0, 1.0 - w0.norm_sqr());
    let mut logw = 0.0;
    let mut trace = vec![u.powf(-0.5)];
    let mut orbit = vec![z];
    for _ in 0..horizon {
        logw += op.w.eval(z).norm().ln();
        match op.phi.pick_step(z, u) {
            Some((nz, nu)) => {
                z = nz;
                u = nu;
            }
            None => break,
        }
        orbit.push(z);
        trace.push((logw - 0.5 * u.ln()).exp());
    }

    let n = op.trunc;
    let a: CMatrix = section(op, n)?.adjoint();
    let mut v = CMatrix::from_fn(n, 1, |k, _| w0.conj().powu(k as u32));
    let mut matrix_trace = vec![Some(spectral_norm(&v))];
    let mut valid = w0.norm().powi(n as i32) < 1e-8;
    for p in orbit.iter().skip(1) {
        v = cmul(&a, &v);
        valid &= p.norm().powi(n as i32) < 1e-8;
        matrix_trace.push(valid.then(|| v.norm()));
    }
    if !valid {
        matrix_trace[0] = if w0.norm().powi(n as i32) < 1e-8 { matrix_trace[0] } else { None };
    }

    let first_exceed = trace.iter().position(|t| *t > UNBOUNDED_THRESHOLD);
    Ok(KernelGrowthReport {
        w0,
        trace,
        matrix_trace,
        orbit,
        threshold: UNBOUNDED_THRESHOLD,
        fired: first_exceed.is_some(),
        first_exceed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct H2dBound {
    pub a: Complex64,
    pub lambda: f64,
    /// `||T||_{H^2(d)}`.
    pub lhs: Tagged,
    pub t_h2: Tagged,
    /// `((1+|a|)/(1-|a|))^{1/2}`.
    pub psi_h2: Tagged,
    /// `((1+|a|)/(1-|a|))^{Lambda/2}`.
    pub psi_h2d: Tagged,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    pub diagnostic: Option<String>,
}

fn h2d_space(d: &WeightSequence, n: usize) -> Result<Space> {
    if !d.is_non_increasing() {
        return Err(Error::Precondition("d must be non-increasing".into()));
    }
    if d.len() < n {
        return Err(Error::LengthMismatch {
            what: "weight sequence",
            expected: n,
            got: d.len(),
        });
    }
    Ok(Space::H2d { d: d.clone() })
}

/// `||T||_{H^2(d)}` against `||C_{psi_a}||_{H^2} ||C_{psi_a}||_{H^2(d)} ||T||_{H^2}`
/// with `a = phi(0)`.
pub fn h2d_transfer_bound(op: &WeightedCompositionOp, d: &WeightSequence, lambda: f64, tol: f64) -> Result<H2dBound> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("Lambda must be a non-negative number, got {lambda}")));
    }
    let space = h2d_space(d, 2 * op.trunc)?;
    let a = op.phi.eval(ZERO);
    let q = (1.0 + a.norm()) / (1.0 - a.norm());
    let h2 = op.clone().with_space(Space::H2);
    let t_h2 = operator_norm_evidence(&h2)?;
    let lhs = norm_estimate(&op.clone().with_space(space))?;
    let psi_h2 = q.sqrt();
    let psi_h2d = q.powf(lambda / 2.0);
    let rhs = psi_h2 * psi_h2d * t_h2.at_2n;
    let worst = lhs.value.max(lhs.at_2n);
    let holds = worst <= rhs + tol;
    Ok(H2dBound {
        a,
        lambda,
        lhs: lhs.into(),
        t_h2: t_h2.into(),
        psi_h2: Tagged::certified(psi_h2, "((1+|a|)/(1-|a|))^(1/2)"),
        psi_h2d: Tagged::certified(psi_h2d, "((1+|a|)/(1-|a|))^(Lambda/2)"),
        rhs,
        slack: rhs - worst,
        holds,
        diagnostic: (!holds).then(|| {
            format!("lhs exceeds rhs by {:.3e}: Lambda = {lambda} may be too small for this d, or the truncation too coarse", worst - rhs)
        }),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TransferStatus {
    /// The H^2 trace decayed below tol; the H^2(d) conclusion was checked.
    Triggered,
    /// The H^2 trace stays away from zero, so the hypothesis does not hold.
    NotTriggered,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionTrace {
    pub label: String,
    pub h2: Vec<f64>,
    pub h2d: Vec<f64>,
    /// `||T^n f||_{H^2(d)} <= ||T^n f||_{H^2}` along the trace.
    pub dominated: bool,
    pub h2_decays: bool,
    pub h2d_decays: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct H2dIterateReport {
    pub status: TransferStatus,
    pub h2_trace: Vec<f64>,
    pub h2d_trace: Vec<f64>,
    /// Set when triggered: whether the H^2(d) trace also fell below tol.
    pub confirmed: Option<bool>,
    pub functions: Vec<FunctionTrace>,
    pub tol: f64,
    pub notes: Vec<String>,
}

fn section_power_trace(a: &CMatrix, horizon: usize) -> Vec<f64> {
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

fn decays(t: &[f64], tol: f64) -> bool {
    t.last().is_some_and(|v| *v < tol)
}

/// `||T^n||` in H^2 and H^2(d), plus `||T^n f||` on polynomial test
/// functions, for maps with an interior Denjoy-Wolff point.
pub fn h2d_iterate_transfer(op: &WeightedCompositionOp, d: &WeightSequence, horizon: usize, tol: f64) -> Result<H2dIterateReport> {
    let n = op.trunc;
    let space = h2d_space(d, n)?;
    let dw = denjoy_wolff(&op.phi, 1e-12, 10_000)?;
    if dw.location != FixedPointLocation::Interior {
        return Err(Error::Precondition("the H^2(d) iterate transfer needs an interior Denjoy-Wolff point".into()));
    }
    let h2_op = op.clone().with_space(Space::H2);
    let hd_op = op.clone().with_space(space.clone());
    let a2 = section(&h2_op, n)?;
    let ad = section(&hd_op, n)?;
    let h2_trace = section_power_trace(&a2, horizon);
    let h2d_trace = section_power_trace(&ad, horizon);

    let mut notes = Vec::new();
    let flat = horizon >= 2 && h2_trace[horizon - 1] >= 0.9 * h2_trace[horizon / 2 - usize::from(horizon / 2 > 0)];
    let (status, confirmed) = if decays(&h2_trace, tol) {
        (TransferStatus::Triggered, Some(decays(&h2d_trace, tol)))
    } else if flat {
        notes.push("H^2 norms do not tend to zero: hypothesis (i) not triggered".into());
        (TransferStatus::NotTriggered, None)
    } else {
        notes.push(format!("H^2 trace has not decayed below {tol:e} within {horizon} steps"));
        (TransferStatus::Inconclusive, None)
    };

    let mut tests: Vec<(String, CoeffSeries)> = (0..=5).map(|k| (format!("z^{k}"), CoeffSeries::monomial(k, n))).collect();
    tests.push(("1 + z".into(), CoeffSeries::from_real(&[1.0, 1.0]).unwrap().truncated(n)));
    let dvec = d.truncated(n)?;
    let d0 = dvec[0];
    let mut functions = Vec::new();
    for (label, f) in tests {
        let mut v = CMatrix::from_fn(n, 1, |k, _| f.coeffs()[k]);
        let (mut h2, mut h2d) = (Vec::new(), Vec::new());
        for _ in 0..horizon {
            v = cmul(&a2, &v);
            h2.push(v.norm());
            h2d.push(v.iter().zip(&dvec).map(|(c, w)| c.norm_sqr() * (w / d0).powi(2)).sum::<f64>().sqrt());
        }
        functions.push(FunctionTrace {
            dominated: h2.iter().zip(&h2d).all(|(a, b)| *b <= *a * (1.0 + 1e-12)),
            h2_decays: decays(&h2, tol),
            h2d_decays: decays(&h2d, tol),
            label,
            h2,
            h2d,
        });
    }
    if (d0 - 1.0).abs() > 1e-15 {
        notes.push(format!("f-wise H^2(d) norms use d / d_0 (d_0 = {d0})"));
    }
    Ok(H2dIterateReport {
        status,
        h2_trace,
        h2d_trace,
        confirmed,
        functions,
        tol,
        notes,
    })
}
