//! Holomorphic self-maps of the unit disc: structured builders, iteration,
//! Denjoy-Wolff points, automorphism classification and boundary
//! derivatives.

mod moebius;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::holofunc::CoeffSeries;

pub use moebius::Moebius;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Default bound on the order search for roots of unity.
pub const DEFAULT_ORDER_BOUND: u32 = 64;

/// A pointwise-evaluated holomorphic function.
#[derive(Clone)]
pub struct Callable {
    f: Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>,
    pub label: String,
    /// Whether the function extends holomorphically across the unit circle,
    /// so boundary grids at radius one are accurate.
    pub regular_on_circle: bool,
}

impl Callable {
    pub fn new<F>(label: impl Into<String>, regular_on_circle: bool, f: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        Callable {
            f: Arc::new(f),
            label: label.into(),
            regular_on_circle,
        }
    }

    pub fn call(&self, z: Complex64) -> Complex64 {
        (self.f)(z)
    }

    pub fn same_as(&self, other: &Callable) -> bool {
        Arc::ptr_eq(&self.f, &other.f)
    }
}

impl fmt::Debug for Callable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Callable({})", self.label)
    }
}

#[derive(Debug, Clone)]
pub enum MapKind {
    Moebius(Moebius),
    Blaschke {
        zeros: Vec<Complex64>,
        phase: Complex64,
    },
    Rotation(Complex64),
    Monomial(u32),
    Series(CoeffSeries),
    /// `exp(-mass (atom + z) / (atom - z))`; only ever evaluated pointwise.
    SingularInner {
        atom: Complex64,
        mass: f64,
    },
    Callable(Callable),
    Iterate {
        base: Box<DiscMap>,
        times: usize,
    },
    /// Applied left to right: `maps[0]` first.
    Chain(Vec<DiscMap>),
}

/// A holomorphic self-map of the unit disc.
#[derive(Debug, Clone)]
pub struct DiscMap {
    kind: MapKind,
}

impl DiscMap {
    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    /// A Moebius self-map; rejects maps with a pole in the closed disc or an
    /// image leaving it.
    pub fn moebius(m: Moebius) -> Result<Self> {
        Moebius::new(m.a, m.b, m.c, m.d)?;
        match m.sup_on_disc() {
            Some(s) if s <= 1.0 + 1e-12 => Ok(DiscMap {
                kind: MapKind::Moebius(m),
            }),
            Some(s) => Err(Error::NotSelfMap { max_modulus: s }),
            None => Err(Error::InvalidParameter(
                "Moebius map has a pole in the closed disc".into(),
            )),
        }
    }

    /// `psi_a(z) = (a - z) / (1 - conj(a) z)`.
    pub fn psi_involution(a: Complex64) -> Result<Self> {
        if a.norm() >= 1.0 {
            return Err(Error::OutsideDisc(a));
        }
        Ok(DiscMap {
            kind: MapKind::Moebius(Moebius::involution(a)),
        })
    }

    pub fn rotation(lambda: Complex64) -> Result<Self> {
        if (lambda.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "rotation needs |lambda| = 1, got {}",
                lambda.norm()
            )));
        }
        Ok(DiscMap {
            kind: MapKind::Rotation(lambda / lambda.norm()),
        })
    }

    pub fn blaschke(zeros: Vec<Complex64>, phase: Complex64) -> Result<Self> {
        if let Some(z) = zeros.iter().find(|z| z.norm() >= 1.0) {
            return Err(Error::OutsideDisc(*z));
        }
        if zeros.is_empty() {
            return Err(Error::InvalidParameter(
                "a Blaschke product needs at least one zero".into(),
            ));
        }
        if (phase.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter("Blaschke phase must be unimodular".into()));
        }
        Ok(DiscMap {
            kind: MapKind::Blaschke {
                zeros,
                phase: phase / phase.norm(),
            },
        })
    }

    pub fn monomial(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("monomial degree must be >= 1".into()));
        }
        Ok(DiscMap {
            kind: MapKind::Monomial(n),
        })
    }

    pub fn identity() -> Self {
        DiscMap {
            kind: MapKind::Monomial(1),
        }
    }

    /// A general series map. Self-map status is checked where the map is
    /// sampled, not here.
    pub fn series(s: CoeffSeries) -> Self {
        DiscMap {
            kind: MapKind::Series(s),
        }
    }

    pub fn singular_inner(atom: Complex64, mass: f64) -> Result<Self> {
        if (atom.norm() - 1.0).abs() > 1e-12 || !(mass > 0.0) {
            return Err(Error::InvalidParameter(
                "singular inner function needs a unimodular atom and positive mass".into(),
            ));
        }
        Ok(DiscMap {
            kind: MapKind::SingularInner {
                atom: atom / atom.norm(),
                mass,
            },
        })
    }

    /// The atomic singular inner function `exp((z + 1) / (z - 1))`.
    pub fn atomic_singular_inner() -> Self {
        DiscMap {
            kind: MapKind::SingularInner {
                atom: ONE,
                mass: 1.0,
            },
        }
    }

    pub fn callable(c: Callable) -> Self {
        DiscMap {
            kind: MapKind::Callable(c),
        }
    }

    /// `next o self`.
    pub fn then(&self, next: &DiscMap) -> DiscMap {
        if let (Some(a), Some(b)) = (self.as_moebius(), next.as_moebius()) {
            if let Ok(m) = DiscMap::moebius(b.compose(&a)) {
                return m;
            }
        }
        let mut maps = match &self.kind {
            MapKind::Chain(v) => v.clone(),
            _ => vec![self.clone()],
        };
        match &next.kind {
            MapKind::Chain(v) => maps.extend(v.iter().cloned()),
            _ => maps.push(next.clone()),
        }
        DiscMap {
            kind: MapKind::Chain(maps),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        match &self.kind {
            MapKind::Moebius(m) => m.eval(z),
            MapKind::Blaschke { zeros, phase } => zeros
                .iter()
                .fold(*phase, |acc, a| acc * blaschke_factor(*a, z)),
            MapKind::Rotation(l) => l * z,
            MapKind::Monomial(n) => z.powu(*n),
            MapKind::Series(s) => s.eval_poly(z),
            MapKind::SingularInner { atom, mass } => {
                let den = atom - z;
                if den.norm() == 0.0 {
                    return ZERO;
                }
                (-(*mass) * (atom + z) / den).exp()
            }
            MapKind::Callable(c) => c.call(z),
            MapKind::Iterate { base, times } => {
                let mut w = z;
                for _ in 0..*times {
                    w = base.eval(w);
                }
                w
            }
            MapKind::Chain(maps) => maps.iter().fold(z, |w, m| m.eval(w)),
        }
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        match &self.kind {
            MapKind::Moebius(m) => m.derivative(z),
            MapKind::Blaschke { zeros, phase } => {
                let factors: Vec<Complex64> = zeros.iter().map(|a| blaschke_factor(*a, z)).collect();
                let mut total = ZERO;
                for (k, a) in zeros.iter().enumerate() {
                    let den = ONE - a.conj() * z;
                    let dk = (1.0 - a.norm_sqr()) / (den * den);
                    let rest: Complex64 = factors
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != k)
                        .map(|(_, f)| *f)
                        .product();
                    total += dk * rest;
                }
                phase * total
            }
            MapKind::Rotation(l) => *l,
            MapKind::Monomial(n) => {
                if *n == 1 {
                    ONE
                } else {
                    z.powu(n - 1) * *n as f64
                }
            }
            MapKind::Series(s) => s.derivative().eval_poly(z),
            MapKind::SingularInner { atom, mass } => {
                let den = atom - z;
                if den.norm() == 0.0 {
                    return ZERO;
                }
                self.eval(z) * (-2.0 * mass * atom / (den * den))
            }
            MapKind::Callable(c) => five_point_derivative(|w| c.call(w), z),
            MapKind::Iterate { base, times } => {
                let mut w = z;
                let mut d = ONE;
                for _ in 0..*times {
                    d *= base.derivative(w);
                    w = base.eval(w);
                }
                d
            }
            MapKind::Chain(maps) => {
                let mut w = z;
                let mut d = ONE;
                for m in maps {
                    d *= m.derivative(w);
                    w = m.eval(w);
                }
                d
            }
        }
    }

    /// The map as a single Moebius transformation, when it is one.
    pub fn as_moebius(&self) -> Option<Moebius> {
        match &self.kind {
            MapKind::Moebius(m) => Some(*m),
            MapKind::Rotation(l) => Some(Moebius {
                a: *l,
                b: ZERO,
                c: ZERO,
                d: ONE,
            }),
            MapKind::Monomial(1) => Some(Moebius::identity()),
            MapKind::Series(s) if s.degree(0.0).unwrap_or(0) <= 1 => {
                let c = s.truncated(2);
                Some(Moebius {
                    a: c.coeffs()[1],
                    b: c.coeffs()[0],
                    c: ZERO,
                    d: ONE,
                })
            }
            MapKind::Blaschke { zeros, phase } if zeros.len() == 1 => {
                let p = zeros[0];
                Some(Moebius {
                    a: *phase,
                    b: -phase * p,
                    c: -p.conj(),
                    d: ONE,
                })
            }
            MapKind::Iterate { base, times } => base
                .as_moebius()
                .map(|m| m.power(u32::try_from(*times).unwrap_or(u32::MAX))),
            MapKind::Chain(maps) => {
                let mut acc = Moebius::identity();
                for m in maps {
                    acc = m.as_moebius()?.compose(&acc);
                }
                Some(acc)
            }
            _ => None,
        }
    }

    pub fn is_automorphism(&self) -> bool {
        self.as_moebius()
            .map(|m| m.is_disc_automorphism(1e-12))
            .unwrap_or(false)
    }

    /// Inner-ness decided from structure alone; `None` for series and
    /// callables.
    pub fn structured_inner(&self) -> Option<bool> {
        match &self.kind {
            MapKind::Moebius(m) => Some(m.is_disc_automorphism(1e-12)),
            MapKind::Blaschke { .. }
            | MapKind::Rotation(_)
            | MapKind::Monomial(_)
            | MapKind::SingularInner { .. } => Some(true),
            MapKind::Series(_) | MapKind::Callable(_) => None,
            MapKind::Iterate { base, .. } => match base.structured_inner() {
                Some(true) => Some(true),
                _ => None,
            },
            MapKind::Chain(maps) => {
                if maps.iter().all(|m| m.structured_inner() == Some(true)) {
                    Some(true)
                } else {
                    None
                }
            }
        }
    }

    /// Whether the map extends holomorphically across the unit circle.
    pub fn regular_on_circle(&self) -> bool {
        match &self.kind {
            MapKind::Moebius(_)
            | MapKind::Blaschke { .. }
            | MapKind::Rotation(_)
            | MapKind::Monomial(_)
            | MapKind::Series(_) => true,
            MapKind::SingularInner { .. } => false,
            MapKind::Callable(c) => c.regular_on_circle,
            MapKind::Iterate { base, .. } => base.regular_on_circle(),
            MapKind::Chain(maps) => maps.iter().all(|m| m.regular_on_circle()),
        }
    }

    /// A certified upper bound for `sup |phi|` over the disc, when one is
    /// available from structure.
    pub fn certified_sup(&self) -> Option<f64> {
        match &self.kind {
            MapKind::Moebius(m) => m.sup_on_disc(),
            MapKind::Series(s) => Some(s.l1_norm()),
            MapKind::Blaschke { .. }
            | MapKind::Rotation(_)
            | MapKind::Monomial(_)
            | MapKind::SingularInner { .. } => Some(1.0),
            MapKind::Callable(_) => None,
            MapKind::Iterate { base, .. } => base.certified_sup(),
            MapKind::Chain(maps) => maps.last().and_then(|m| m.certified_sup()),
        }
    }

    /// Structural equality; callables compare by identity.
    pub fn same_as(&self, other: &DiscMap) -> bool {
        match (&self.kind, &other.kind) {
            (MapKind::Moebius(a), MapKind::Moebius(b)) => a == b,
            (
                MapKind::Blaschke { zeros: z1, phase: p1 },
                MapKind::Blaschke { zeros: z2, phase: p2 },
            ) => z1 == z2 && p1 == p2,
            (MapKind::Rotation(a), MapKind::Rotation(b)) => a == b,
            (MapKind::Monomial(a), MapKind::Monomial(b)) => a == b,
            (MapKind::Series(a), MapKind::Series(b)) => a == b,
            (
                MapKind::SingularInner { atom: a1, mass: m1 },
                MapKind::SingularInner { atom: a2, mass: m2 },
            ) => a1 == a2 && m1 == m2,
            (MapKind::Callable(a), MapKind::Callable(b)) => a.same_as(b),
            (MapKind::Iterate { base: b1, times: t1 }, MapKind::Iterate { base: b2, times: t2 }) => {
                t1 == t2 && b1.same_as(b2)
            }
            (MapKind::Chain(a), MapKind::Chain(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same_as(y))
            }
            _ => false,
        }
    }

    /// Degree when the map is a polynomial.
    pub fn polynomial_degree(&self) -> Option<usize> {
        match &self.kind {
            MapKind::Monomial(n) => Some(*n as usize),
            MapKind::Rotation(_) => Some(1),
            MapKind::Series(s) => Some(s.degree(0.0).unwrap_or(0)),
            MapKind::Moebius(m) if m.c == ZERO => Some(1),
            _ => None,
        }
    }

    /// Degree of a finite Blaschke product (monomials and disc
    /// automorphisms included).
    pub fn blaschke_degree(&self) -> Option<u32> {
        match &self.kind {
            MapKind::Blaschke { zeros, .. } => Some(zeros.len() as u32),
            MapKind::Monomial(n) => Some(*n),
            MapKind::Rotation(_) => Some(1),
            MapKind::Moebius(m) if m.is_disc_automorphism(1e-12) => Some(1),
            _ => None,
        }
    }

    /// Zeros of the map inside the disc, when known from structure.
    pub fn known_zeros(&self) -> Option<Vec<Complex64>> {
        match &self.kind {
            MapKind::Blaschke { zeros, .. } => Some(zeros.clone()),
            MapKind::Monomial(_) | MapKind::Rotation(_) => Some(vec![ZERO]),
            MapKind::Moebius(m) => {
                let z = -m.b / m.a;
                if m.a.norm() > 0.0 && z.norm() < 1.0 {
                    Some(vec![z])
                } else {
                    Some(Vec::new())
                }
            }
            MapKind::SingularInner { .. } => Some(Vec::new()),
            _ => None,
        }
    }

    /// One step of `z -> phi(z)` that also carries `u = 1 - |z|^2`.
    ///
    /// For automorphisms `1 - |phi(z)|^2 = |phi'(z)| (1 - |z|^2)` keeps `u`
    /// accurate as orbits approach the circle; other maps recompute it and
    /// return `None` once it is lost to rounding.
    pub fn pick_step(&self, z: Complex64, u: f64) -> Option<(Complex64, f64)> {
        let w = self.eval(z);
        if self.is_automorphism() {
            let next = u * self.derivative(z).norm();
            return (next > 0.0 && next.is_finite()).then_some((w, next));
        }
        let next = 1.0 - w.norm_sqr();
        (next > 1e-14 && w.is_finite()).then_some((w, next))
    }
}

fn blaschke_factor(a: Complex64, z: Complex64) -> Complex64 {
    if a == ZERO {
        z
    } else {
        (z - a) / (ONE - a.conj() * z)
    }
}

/// Fourth-order central difference; the step shrinks near the boundary so
/// samples stay inside the disc.
pub(crate) fn five_point_derivative<F: Fn(Complex64) -> Complex64>(f: F, z: Complex64) -> Complex64 {
    let room = (1.0 - z.norm()).max(0.0);
    let h = if room > 0.0 { (room / 4.0).min(1e-3) } else { 1e-3 };
    (-f(z + 2.0 * h) + 8.0 * f(z + h) - 8.0 * f(z - h) + f(z - 2.0 * h)) / (12.0 * h)
}

/// `phi_k`, the k-th iterate.
///
/// Rotations, monomials and Moebius maps stay structured; everything else
/// becomes a composition chain.
pub fn iterate_map(phi: &DiscMap, k: usize) -> Result<DiscMap> {
    if k == 0 {
        return Err(Error::InvalidParameter("iterate count must be >= 1".into()));
    }
    let kk = u32::try_from(k).ok();
    match (&phi.kind, kk) {
        (MapKind::Rotation(l), Some(kk)) => {
            let p = l.powu(kk);
            DiscMap::rotation(p / p.norm())
        }
        (MapKind::Monomial(n), Some(kk)) => match n.checked_pow(kk) {
            Some(deg) => DiscMap::monomial(deg),
            None => Ok(DiscMap {
                kind: MapKind::Iterate {
                    base: Box::new(phi.clone()),
                    times: k,
                },
            }),
        },
        (MapKind::Moebius(m), Some(kk)) => Ok(DiscMap {
            kind: MapKind::Moebius(m.power(kk)),
        }),
        _ => Ok(DiscMap {
            kind: MapKind::Iterate {
                base: Box::new(phi.clone()),
                times: k,
            },
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AutomorphismClass {
    Elliptic {
        fixed_point: Complex64,
        multiplier: Complex64,
        /// `None` when no `k <= bound` has `multiplier^k = 1`.
        order: Option<u32>,
    },
    Parabolic {
        fixed_point: Complex64,
    },
    Hyperbolic {
        attractive: Complex64,
        repulsive: Complex64,
        deriv_attractive: f64,
        deriv_repulsive: f64,
    },
    NotAutomorphism,
}

impl AutomorphismClass {
    pub fn is_elliptic(&self) -> bool {
        matches!(self, AutomorphismClass::Elliptic { .. })
    }
}

fn root_of_unity_order(lambda: Complex64, bound: u32) -> Option<u32> {
    let mut p = ONE;
    for k in 1..=bound {
        p *= lambda;
        if (p - ONE).norm() < 1e-10 {
            return Some(k);
        }
    }
    None
}

/// Classifies a disc automorphism by its fixed-point configuration.
pub fn classify_automorphism(phi: &DiscMap, order_bound: u32) -> AutomorphismClass {
    if let MapKind::Rotation(l) = &phi.kind {
        return AutomorphismClass::Elliptic {
            fixed_point: ZERO,
            multiplier: *l,
            order: root_of_unity_order(*l, order_bound),
        };
    }
    let m = match phi.as_moebius() {
        Some(m) if m.is_disc_automorphism(1e-12) => m,
        _ => return AutomorphismClass::NotAutomorphism,
    };
    if m.is_identity(1e-14) {
        return AutomorphismClass::Elliptic {
            fixed_point: ZERO,
            multiplier: ONE,
            order: Some(1),
        };
    }
    let tau = m.trace_invariant().re;
    let fps = m.fixed_points();
    if tau < 4.0 - 1e-9 {
        let p = fps
            .iter()
            .copied()
            .min_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
            .unwrap_or(ZERO);
        let mult = m.derivative(p);
        return AutomorphismClass::Elliptic {
            fixed_point: p,
            multiplier: mult,
            order: root_of_unity_order(mult / mult.norm(), order_bound),
        };
    }
    if tau <= 4.0 + 1e-9 || fps.len() < 2 {
        let p = fps.iter().copied().sum::<Complex64>() / fps.len().max(1) as f64;
        return AutomorphismClass::Parabolic {
            fixed_point: p / p.norm(),
        };
    }
    let (p, q) = (fps[0] / fps[0].norm(), fps[1] / fps[1].norm());
    let (dp, dq) = (m.derivative(p).norm(), m.derivative(q).norm());
    if dp < dq {
        AutomorphismClass::Hyperbolic {
            attractive: p,
            repulsive: q,
            deriv_attractive: dp,
            deriv_repulsive: dq,
        }
    } else {
        AutomorphismClass::Hyperbolic {
            attractive: q,
            repulsive: p,
            deriv_attractive: dq,
            deriv_repulsive: dp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointLocation {
    Interior,
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DwStatus {
    Converged,
    /// The orbit did not settle within the iteration budget.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointReport {
    pub dw_point: Complex64,
    pub location: FixedPointLocation,
    /// `phi'` at an interior point; the angular derivative at a boundary
    /// point.
    pub derivative: Complex64,
    pub order_if_elliptic_root_of_unity: Option<u32>,
    /// `phi_n(0)`, capped at [`TRACE_CAP`] entries.
    pub iterates_trace: Vec<Complex64>,
    pub iterations: usize,
    pub status: DwStatus,
    /// True when the point came from solving the fixed-point equation of a
    /// Moebius map exactly.
    pub exact: bool,
}

pub const TRACE_CAP: usize = 4096;

/// Denjoy-Wolff point by iterating from the origin.
///
/// Moebius maps have their fixed point pinned down exactly; other maps are
/// decided from the orbit, with a Newton polish for interior candidates.
pub fn denjoy_wolff(phi: &DiscMap, tol: f64, max_iter: usize) -> Result<FixedPointReport> {
    if classify_automorphism(phi, DEFAULT_ORDER_BOUND).is_elliptic() {
        return Err(Error::EllipticAutomorphism);
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidParameter(format!("tolerance must lie in (0,1), got {tol}")));
    }
    let mut z = ZERO;
    let mut trace = vec![z];
    let mut converged = false;
    let mut iterations = 0;
    for i in 0..max_iter {
        let next = phi.eval(z);
        iterations = i + 1;
        if trace.len() < TRACE_CAP {
            trace.push(next);
        }
        let step = (next - z).norm();
        z = next;
        if step < tol {
            converged = true;
            break;
        }
    }
    if !z.is_finite() {
        return Err(Error::NotSelfMap {
            max_modulus: f64::INFINITY,
        });
    }

    if let Some(m) = phi.as_moebius() {
        if let Some((p, loc)) = moebius_dw(&m, z) {
            let derivative = match loc {
                FixedPointLocation::Interior => m.derivative(p),
                FixedPointLocation::Boundary => Complex64::new(m.derivative(p).norm(), 0.0),
            };
            return Ok(FixedPointReport {
                dw_point: p,
                location: loc,
                derivative,
                order_if_elliptic_root_of_unity: None,
                iterates_trace: trace,
                iterations,
                status: DwStatus::Converged,
                exact: true,
            });
        }
    }

    let status = if converged {
        DwStatus::Converged
    } else {
        DwStatus::Inconclusive
    };
    let interior = if z.norm() < 1.0 - 10.0 * tol {
        newton_fixed_point(phi, z).filter(|p| {
            p.norm() < 1.0 - 10.0 * tol && phi.derivative(*p).norm() < 1.0
        })
    } else {
        None
    };
    let (point, location, derivative) = match interior {
        Some(p) => (p, FixedPointLocation::Interior, phi.derivative(p)),
        None => {
            let omega = if z.norm() > 0.0 { z / z.norm() } else { ONE };
            let ad = angular_derivative(phi, omega);
            (omega, FixedPointLocation::Boundary, Complex64::new(ad, 0.0))
        }
    };
    let order = if location == FixedPointLocation::Interior && (derivative.norm() - 1.0).abs() < 1e-10 {
        root_of_unity_order(derivative, DEFAULT_ORDER_BOUND)
    } else {
        None
    };
    Ok(FixedPointReport {
        dw_point: point,
        location,
        derivative,
        order_if_elliptic_root_of_unity: order,
        iterates_trace: trace,
        iterations,
        status,
        exact: false,
    })
}

fn moebius_dw(m: &Moebius, orbit_end: Complex64) -> Option<(Complex64, FixedPointLocation)> {
    let fps = m.fixed_points();
    if fps.is_empty() {
        return None;
    }
    if let Some(p) = fps.iter().find(|p| p.norm() < 1.0 - 1e-9) {
        return Some((*p, FixedPointLocation::Interior));
    }
    // Boundary candidates: the attracting one has angular derivative <= 1.
    let on_circle: Vec<Complex64> = fps
        .iter()
        .filter(|p| (p.norm() - 1.0).abs() < 1e-6)
        .map(|p| p / p.norm())
        .collect();
    on_circle
        .into_iter()
        .filter(|p| m.derivative(*p).norm() <= 1.0 + 1e-9)
        .min_by(|a, b| (a - orbit_end).norm().partial_cmp(&(b - orbit_end).norm()).unwrap())
        .map(|p| (p, FixedPointLocation::Boundary))
}

fn newton_fixed_point(phi: &DiscMap, start: Complex64) -> Option<Complex64> {
    let mut p = start;
    for _ in 0..100 {
        let g = phi.eval(p) - p;
        if g.norm() < 1e-15 {
            return Some(p);
        }
        let dg = phi.derivative(p) - ONE;
        if dg.norm() < 1e-300 {
            return None;
        }
        p -= g / dg;
        if !p.is_finite() || p.norm() >= 1.0 {
            return None;
        }
    }
    ((phi.eval(p) - p).norm() < 1e-12).then_some(p)
}

/// Angular derivative `lim (1 - |phi(r omega)|) / (1 - r)` at a boundary
/// point, from quotients at `r = 0.9, 0.99, 0.999, 0.9999` and Richardson
/// extrapolation to `r = 1`.
pub fn angular_derivative(phi: &DiscMap, omega: Complex64) -> f64 {
    let hs = [1e-1, 1e-2, 1e-3, 1e-4];
    let qs: Vec<f64> = hs
        .iter()
        .map(|h| (1.0 - phi.eval(omega * (1.0 - h)).norm()) / h)
        .collect();
    neville_at_zero(&hs, &qs)
}

/// Value at 0 of the interpolating polynomial through `(x_i, y_i)`.
pub(crate) fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for k in 1..n {
        for i in 0..n - k {
            p[i] = (xs[i + k] * p[i] - xs[i] * p[i + 1]) / (xs[i + k] - xs[i]);
        }
    }
    p[0]
}
