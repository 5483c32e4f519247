//! Isometric weighted composition operators on H^2 and the weighted
//! Bergman spaces: tests and constructions.

use num_complex::Complex64;
use serde::Serialize;

use crate::discmap::{classify_automorphism, AutomorphismClass, Callable, DiscMap, MapKind, DEFAULT_ORDER_BOUND};
use crate::error::{Error, Result};
use crate::holofunc::{bergman_moments, default_inner_radii, is_inner_probe, unit_roots, CoeffSeries, InnerProbe, InnerVerdict};
use crate::quadrature::DiscQuadrature;
use crate::wco::{Space, WeightedCompositionOp};
use crate::weight::Weight;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Default number of `<w, w phi^n>` checks.
pub const DEFAULT_HORIZON: usize = 50;

const CIRCLE_GRID: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IsometryVerdict {
    Isometry,
    NotIsometry,
    Inconclusive,
}

/// How boundary integrals were evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegralPath {
    /// Samples of `w` and `phi` on the unit circle.
    Circle,
    /// `|w|^2 = G(phi)` on the circle and the image of arc length under an
    /// inner `phi` is harmonic measure at `phi(0)`, so integrals of
    /// `G(phi) h(phi)` become Poisson integrals of smooth functions.
    Pushforward,
    /// Samples on a circle of radius below one (biased for weights with
    /// boundary singularities).
    InteriorCircle,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsometryReport {
    pub verdict: IsometryVerdict,
    pub w_norm: Option<f64>,
    pub inner: Option<InnerProbe>,
    /// `max_{1 <= n <= H} |<w, w phi^n>|`.
    pub max_cross: Option<f64>,
    /// `max_{j,k} |M_jk - delta_jk m_j|` for the Bergman moment test.
    pub moment_deviation: Option<f64>,
    pub moments: Vec<Vec<Complex64>>,
    pub tested_horizon: usize,
    pub tol: f64,
    pub path: IntegralPath,
    pub caveats: Vec<String>,
}

/// Boundary sampler for integrals `int_T |w|^2 h(phi) dm`.
struct BoundaryMeasure {
    points: Vec<Complex64>,
    /// `|w|^2` times the quadrature weight at each point.
    density: Vec<f64>,
    /// The point fed to `h`: `phi(zeta)`, or `zeta` itself on the pushforward
    /// path.
    path: IntegralPath,
}

impl BoundaryMeasure {
    fn new(op: &WeightedCompositionOp) -> Self {
        if let Some((s, c)) = op.w.boundary_modulus_through(&op.phi) {
            if op.phi.structured_inner() == Some(true) || is_inner_probe(&op.phi, &default_inner_radii(), 1e-9).map(|p| p.is_inner()).unwrap_or(false) {
                let a = op.phi.eval(Complex64::new(0.0, 0.0));
                let roots = unit_roots(CIRCLE_GRID);
                let density = roots
                    .iter()
                    .map(|u| s * (u - c).norm_sqr() * (1.0 - a.norm_sqr()) / (u - a).norm_sqr() / CIRCLE_GRID as f64)
                    .collect();
                return BoundaryMeasure {
                    points: roots,
                    density,
                    path: IntegralPath::Pushforward,
                };
            }
        }
        let (radius, m, path) = if op.w.regular_on_circle() && op.phi.regular_on_circle() {
            (1.0, CIRCLE_GRID, IntegralPath::Circle)
        } else {
            (1.0 - 1e-4, 1 << 18, IntegralPath::InteriorCircle)
        };
        let zs: Vec<Complex64> = unit_roots(m).into_iter().map(|u| u * radius).collect();
        let ws: Vec<Complex64> = zs.iter().map(|&z| op.w.eval(z)).collect();
        BoundaryMeasure {
            points: zs.iter().map(|&z| op.phi.eval(z)).collect(),
            density: ws.iter().map(|w| w.norm_sqr() / m as f64).collect(),
            path,
        }
    }

    fn integrate<H: Fn(Complex64) -> Complex64>(&self, h: H) -> Complex64 {
        self.points.iter().zip(&self.density).map(|(p, d)| h(*p) * *d).sum()
    }
}

/// Checks `phi` inner, `||w||_2 = 1` and `<w, w phi^n> = 0` for
/// `1 <= n <= horizon`. The verdict is "isometry up to the tested horizon".
pub fn h2_isometry_test(op: &WeightedCompositionOp, horizon: usize, tol: f64) -> Result<IsometryReport> {
    if op.space != Space::H2 {
        return Err(Error::Precondition("the H^2 isometry test needs the H^2 space".into()));
    }
    let inner = is_inner_probe(&op.phi, &default_inner_radii(), tol)?;
    let bm = BoundaryMeasure::new(op);
    let w_norm = bm.integrate(|_| ONE).re.sqrt();
    let mut max_cross: f64 = 0.0;
    for n in 1..=horizon {
        max_cross = max_cross.max(bm.integrate(|p| p.conj().powu(n as u32)).norm());
    }
    let mut caveats = Vec::new();
    if bm.path == IntegralPath::InteriorCircle {
        caveats.push("weight or map singular on the circle: integrals taken at r = 1 - 1e-4 and biased".into());
    }
    let verdict = match inner.verdict {
        InnerVerdict::Inconclusive => IsometryVerdict::Inconclusive,
        InnerVerdict::NotInner => IsometryVerdict::NotIsometry,
        InnerVerdict::Inner if (w_norm - 1.0).abs() < tol && max_cross < tol => IsometryVerdict::Isometry,
        InnerVerdict::Inner => IsometryVerdict::NotIsometry,
    };
    Ok(IsometryReport {
        verdict,
        w_norm: Some(w_norm),
        inner: Some(inner),
        max_cross: Some(max_cross),
        moment_deviation: None,
        moments: Vec::new(),
        tested_horizon: horizon,
        tol,
        path: bm.path,
        caveats,
    })
}

/// `||T f||_{H^2} = ||w (f o phi)||_2` from boundary values.
pub fn h2_image_norm(op: &WeightedCompositionOp, f: &CoeffSeries) -> f64 {
    let bm = BoundaryMeasure::new(op);
    bm.integrate(|p| Complex64::new(f.eval_poly(p).norm_sqr(), 0.0)).re.sqrt()
}

/// Weight making `T_{w,phi}` an isometry of H^2 for an inner `phi`.
///
/// `phi(0) = 0`: `theta` itself. `phi` with a known zero `beta`:
/// `theta k_beta / ||k_beta||`. Otherwise
/// `theta (phi - phi(0)) / (1 - |phi(0)|^2)^{1/2}`.
pub fn construct_h2_weight(phi: &DiscMap, theta: Option<&DiscMap>) -> Result<Weight> {
    let probe = is_inner_probe(phi, &default_inner_radii(), 1e-9)?;
    if !probe.is_inner() {
        return Err(Error::NotInner(format!("map failed the inner probe ({:?})", probe.verdict)));
    }
    if let Some(t) = theta {
        if !is_inner_probe(t, &default_inner_radii(), 1e-9)?.is_inner() {
            return Err(Error::NotInner("theta is not inner".into()));
        }
    }
    let with_theta = |w: Weight| match theta {
        Some(t) => Weight::Product(vec![Weight::Map(t.clone()), w]),
        None => w,
    };
    let a = phi.eval(Complex64::new(0.0, 0.0));
    if a.norm() < 1e-14 {
        return Ok(theta.map(|t| Weight::Map(t.clone())).unwrap_or_else(Weight::one));
    }
    if let Some(beta) = phi.known_zeros().and_then(|z| z.first().copied()) {
        return Ok(with_theta(Weight::normalized_kernel(beta)?));
    }
    Ok(Weight::InnerShift {
        map: phi.clone(),
        theta: theta.cloned(),
        center: a,
        scale: 1.0 / (1.0 - a.norm_sqr()).sqrt(),
    })
}

/// Quadrature degree needed for the moment test with powers up to `j_max`,
/// when `w` and `phi` are polynomials.
pub fn moment_degree_needed(op: &WeightedCompositionOp, j_max: usize) -> Option<usize> {
    Some(j_max * op.phi.polynomial_degree()? + op.w.polynomial_degree()?)
}

/// Compares `M_jk = int phi^j conj(phi)^k |w|^2 dA_alpha` with the
/// moments of `dA_alpha` itself for `j, k <= j_max`.
pub fn bergman_moment_test(op: &WeightedCompositionOp, quad: &DiscQuadrature, j_max: usize, tol: f64) -> Result<IsometryReport> {
    match op.space {
        Space::A2Alpha { alpha } if (alpha - quad.alpha).abs() < 1e-15 => {}
        _ => return Err(Error::Precondition("moment test needs an A^2_alpha space matching the quadrature".into())),
    }
    let mut caveats = Vec::new();
    match moment_degree_needed(op, j_max) {
        Some(need) if need > quad.degree_exact => {
            return Err(Error::QuadratureDegree {
                needed: need,
                available: quad.degree_exact,
            })
        }
        Some(_) => {}
        None => caveats.push("non-polynomial integrand: moments are quadrature approximations".into()),
    }
    let target = bergman_moments(quad.alpha, j_max + 1);
    let samples: Vec<(Complex64, f64)> = quad
        .nodes
        .iter()
        .zip(&quad.weights)
        .map(|(&z, &q)| (op.phi.eval(z), op.w.eval(z).norm_sqr() * q))
        .collect();
    let mut moments = vec![vec![Complex64::new(0.0, 0.0); j_max + 1]; j_max + 1];
    let mut dev: f64 = 0.0;
    for (j, row) in moments.iter_mut().enumerate() {
        for (k, m) in row.iter_mut().enumerate() {
            *m = samples.iter().map(|(p, d)| p.powu(j as u32) * p.conj().powu(k as u32) * *d).sum();
            let want = if j == k { target[j] } else { 0.0 };
            dev = dev.max((*m - want).norm());
        }
    }
    Ok(IsometryReport {
        verdict: if dev < tol { IsometryVerdict::Isometry } else { IsometryVerdict::NotIsometry },
        w_norm: None,
        inner: None,
        max_cross: None,
        moment_deviation: Some(dev),
        moments,
        tested_horizon: j_max,
        tol,
        path: IntegralPath::Quadrature,
        caveats,
    })
}

/// `||f||` in A^2_alpha from Taylor coefficients.
pub fn bergman_norm(f: &CoeffSeries, alpha: f64) -> f64 {
    let m = bergman_moments(alpha, f.truncation_order());
    f.coeffs().iter().zip(&m).map(|(c, w)| c.norm_sqr() * w).sum::<f64>().sqrt()
}

/// `||T f||` in A^2_alpha by quadrature.
pub fn bergman_image_norm(op: &WeightedCompositionOp, f: &CoeffSeries, quad: &DiscQuadrature) -> f64 {
    quad.integrate_real(|z| (op.w.eval(z) * f.eval_poly(op.phi.eval(z))).norm_sqr()).sqrt()
}

fn check_unimodular(c: Complex64) -> Result<()> {
    if (c.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("|c| must be 1, got {}", c.norm())));
    }
    Ok(())
}

/// `w = c phi' / sqrt(N)` for a map covering the disc `N` times (the
/// covering property is the caller's assertion).
pub fn nfold_cover_weight(phi: &DiscMap, n: u32, c: Complex64) -> Result<Weight> {
    check_unimodular(c)?;
    if n == 0 {
        return Err(Error::InvalidParameter("cover multiplicity must be >= 1".into()));
    }
    let s = c / (n as f64).sqrt();
    match phi.kind() {
        MapKind::Monomial(k) => {
            let mut coeffs = vec![Complex64::new(0.0, 0.0); *k as usize];
            coeffs[*k as usize - 1] = s * *k as f64;
            Ok(Weight::Series(CoeffSeries::new(coeffs)?))
        }
        MapKind::Series(p) => Ok(Weight::Series(p.derivative().scale(s))),
        _ => {
            let map = phi.clone();
            Ok(Weight::Callable(Callable::new("c phi' / sqrt(N)", phi.regular_on_circle(), move |z| s * map.derivative(z))))
        }
    }
}

/// `w = c phi'(psi(z)) / sqrt(N)` for a degree-`N` Blaschke product with
/// `phi o psi = phi` and `psi` elliptic of order `N`.
pub fn symmetric_blaschke_weight(phi: &DiscMap, psi: &DiscMap, c: Complex64) -> Result<Weight> {
    check_unimodular(c)?;
    let n = phi
        .blaschke_degree()
        .ok_or_else(|| Error::Precondition("phi must be a finite Blaschke product".into()))?;
    match classify_automorphism(psi, DEFAULT_ORDER_BOUND) {
        AutomorphismClass::Elliptic { order: Some(k), .. } if k == n => {}
        other => {
            return Err(Error::Precondition(format!("psi must be elliptic of order {n}, got {other:?}")));
        }
    }
    let dev = unit_roots(64)
        .into_iter()
        .map(|u| (phi.eval(psi.eval(u)) - phi.eval(u)).norm())
        .fold(0.0, f64::max);
    if dev > 1e-10 {
        return Err(Error::SymmetryViolation(dev));
    }
    let s = c / (n as f64).sqrt();
    if let (MapKind::Monomial(k), MapKind::Rotation(l)) = (phi.kind(), psi.kind()) {
        let k = *k as usize;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k];
        coeffs[k - 1] = s * k as f64 * l.powu(k as u32 - 1);
        return Ok(Weight::Series(CoeffSeries::new(coeffs)?));
    }
    let (map, sym) = (phi.clone(), psi.clone());
    Ok(Weight::Callable(Callable::new("c phi'(psi) / sqrt(N)", true, move |z| s * map.derivative(sym.eval(z)))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn h2(w: Weight, phi: DiscMap) -> WeightedCompositionOp {
        WeightedCompositionOp::h2(w, phi, 64).unwrap()
    }

    fn a2(w: Weight, phi: DiscMap) -> WeightedCompositionOp {
        WeightedCompositionOp::new(w, phi, Space::A2Alpha { alpha: 0.0 }, 64).unwrap()
    }

    #[test]
    fn h2_test_examples() {
        let sq = DiscMap::monomial(2).unwrap();
        let r = h2_isometry_test(&h2(Weight::one(), sq.clone()), 50, 1e-9).unwrap();
        assert_eq!(r.verdict, IsometryVerdict::Isometry);
        let r = h2_isometry_test(&h2(Weight::from_real(&[0.0, 1.0]).unwrap(), sq), 50, 1e-9).unwrap();
        assert_eq!(r.verdict, IsometryVerdict::Isometry);
        let half = DiscMap::series(CoeffSeries::from_real(&[0.0, 0.5]).unwrap());
        let r = h2_isometry_test(&h2(Weight::one(), half), 50, 1e-9).unwrap();
        assert_eq!(r.verdict, IsometryVerdict::NotIsometry);
    }

    #[test]
    fn constructions_pass() {
        let psi = DiscMap::psi_involution(c(0.5)).unwrap();
        let w = construct_h2_weight(&psi, None).unwrap();
        let z = Complex64::new(0.1, 0.2);
        assert!((w.eval(z) - (3f64.sqrt() / 2.0) / (1.0 - z / 2.0)).norm() < 1e-15);
        let r = h2_isometry_test(&h2(w, psi), 50, 1e-9).unwrap();
        assert_eq!(r.verdict, IsometryVerdict::Isometry, "{r:?}");

        let sq = DiscMap::monomial(2).unwrap();
        let theta = DiscMap::monomial(1).unwrap();
        let w = construct_h2_weight(&sq, Some(&theta)).unwrap();
        assert!((w.eval(z) - z).norm() < 1e-15);

        let s = DiscMap::atomic_singular_inner();
        let w = construct_h2_weight(&s, None).unwrap();
        let op = h2(w, s);
        let r = h2_isometry_test(&op, 50, 1e-9).unwrap();
        assert_eq!(r.path, IntegralPath::Pushforward);
        assert!((r.w_norm.unwrap() - 1.0).abs() < 1e-6);
        assert_eq!(r.verdict, IsometryVerdict::Isometry);
        let f = CoeffSeries::from_real(&[0.3, -1.0, 0.25, 0.5]).unwrap();
        assert!((h2_image_norm(&op, &f) - f.h2_norm()).abs() < 1e-7);
    }

    #[test]
    fn construct_rejects_non_inner() {
        let half = DiscMap::series(CoeffSeries::from_real(&[0.0, 0.5]).unwrap());
        assert!(matches!(construct_h2_weight(&half, None), Err(Error::NotInner(_))));
    }

    #[test]
    fn moment_examples() {
        let q = DiscQuadrature::lebesgue(32, 64).unwrap();
        let sq = DiscMap::monomial(2).unwrap();
        let w = nfold_cover_weight(&sq, 2, ONE).unwrap();
        let r = bergman_moment_test(&a2(w, sq.clone()), &q, 10, 1e-10).unwrap();
        assert_eq!(r.verdict, IsometryVerdict::Isometry);

        let r = bergman_moment_test(&a2(Weight::one(), sq), &q, 10, 1e-10).unwrap();
        assert_eq!(r.verdict, IsometryVerdict::NotIsometry);
        assert!((r.moments[1][1].re - 1.0 / 3.0).abs() < 1e-12);

        let r = bergman_moment_test(&a2(Weight::one(), DiscMap::identity()), &q, 10, 1e-13).unwrap();
        assert_eq!(r.verdict, IsometryVerdict::Isometry);
    }

    #[test]
    fn moment_test_reports_degree_shortfall() {
        let q = DiscQuadrature::lebesgue(4, 8).unwrap();
        let sq = DiscMap::monomial(2).unwrap();
        assert!(matches!(
            bergman_moment_test(&a2(Weight::one(), sq), &q, 10, 1e-10),
            Err(Error::QuadratureDegree { .. })
        ));
    }

    #[test]
    fn nfold_cubic_preserves_monomial_norms() {
        let cube = DiscMap::monomial(3).unwrap();
        let w = nfold_cover_weight(&cube, 3, ONE).unwrap();
        assert!((w.eval(c(0.5)) - 3f64.sqrt() * 0.25).norm() < 1e-15);
        let op = a2(w, cube);
        let q = DiscQuadrature::lebesgue(32, 64).unwrap();
        for m in 0..=5 {
            let f = CoeffSeries::monomial(m, m + 1);
            let got = bergman_image_norm(&op, &f, &q);
            assert!((got * got - 1.0 / (m as f64 + 1.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn nfold_blaschke_passes() {
        let b = DiscMap::blaschke(vec![c(0.0), c(0.5)], ONE).unwrap();
        let w = nfold_cover_weight(&b, 2, ONE).unwrap();
        let q = DiscQuadrature::lebesgue(64, 128).unwrap();
        let r = bergman_moment_test(&a2(w, b), &q, 6, 1e-8).unwrap();
        assert_eq!(r.verdict, IsometryVerdict::Isometry, "{:?}", r.moment_deviation);
    }

    #[test]
    fn symmetric_examples() {
        let sq = DiscMap::monomial(2).unwrap();
        let flip = DiscMap::rotation(c(-1.0)).unwrap();
        let w = symmetric_blaschke_weight(&sq, &flip, ONE).unwrap();
        let z = Complex64::new(0.3, 0.1);
        assert!((w.eval(z) + 2f64.sqrt() * z).norm() < 1e-15);
        let q = DiscQuadrature::lebesgue(32, 64).unwrap();
        assert_eq!(bergman_moment_test(&a2(w, sq.clone()), &q, 10, 1e-10).unwrap().verdict, IsometryVerdict::Isometry);

        let cube = DiscMap::monomial(3).unwrap();
        let l = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        let w = symmetric_blaschke_weight(&cube, &DiscMap::rotation(l).unwrap(), ONE).unwrap();
        let want = 3f64.sqrt() * Complex64::from_polar(1.0, 4.0 * PI / 3.0) * z * z;
        assert!((w.eval(z) - want).norm() < 1e-14);

        let quarter = DiscMap::rotation(Complex64::new(0.0, 1.0)).unwrap();
        assert!(symmetric_blaschke_weight(&sq, &quarter, ONE).is_err());
    }

    #[test]
    fn symmetry_violation_is_reported() {
        // psi of the right order but the wrong symmetry.
        let b = DiscMap::blaschke(vec![c(0.5), c(-0.5)], ONE).unwrap();
        let flip = DiscMap::rotation(c(-1.0)).unwrap();
        assert!(symmetric_blaschke_weight(&b, &flip, ONE).is_ok());
        let b = DiscMap::blaschke(vec![c(0.5), c(0.2)], ONE).unwrap();
        assert!(matches!(symmetric_blaschke_weight(&b, &flip, ONE), Err(Error::SymmetryViolation(_))));
    }
}
