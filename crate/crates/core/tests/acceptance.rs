//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wco_core::convergence::{classify_elliptic_finite, classify_interior_dw, ClassifyOptions, LimitProjection, Mode};
use wco_core::discmap::{angular_derivative, iterate_map, DiscMap, Moebius};
use wco_core::holofunc::{bergman_moments, CoeffSeries, GridSpec, WeightSequence};
use wco_core::isometry::{
    bergman_image_norm, bergman_moment_test, bergman_norm, construct_h2_weight, h2_image_norm, h2_isometry_test, nfold_cover_weight,
    symmetric_blaschke_weight, IsometryVerdict,
};
use wco_core::linalg::{spectral_norm, CMatrix};
use wco_core::quadrature::DiscQuadrature;
use wco_core::transfer::{
    h2d_iterate_transfer, h2d_transfer_bound, halfplane_norm_check, halfplane_to_disc, kernel_growth_probe, smirnoff_weight, HalfPlaneMap,
    SmirnoffDomainSpec, TransferStatus,
};
use wco_core::wco::{apply, gelfand_radius, iterate_direct, iterate_matrix, section, Space, WeightedCompositionOp};
use wco_core::weight::Weight;

type Outcome = Result<String, String>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<E: std::fmt::Debug>(err: E) -> String {
    format!("{err:?}")
}

fn rand_c(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn rand_poly(rng: &mut ChaCha8Rng, max_deg: usize) -> Vec<Complex64> {
    let deg = rng.gen_range(0..=max_deg);
    (0..=deg).map(|_| rand_c(rng)).collect()
}

/// Coefficients rescaled to a given l1 norm.
fn with_l1(v: Vec<Complex64>, target: f64) -> CoeffSeries {
    let l1: f64 = v.iter().map(|z| z.norm()).sum();
    CoeffSeries::new(v.iter().map(|z| z * (target / l1.max(1e-300))).collect()).unwrap()
}

fn half() -> DiscMap {
    DiscMap::series(CoeffSeries::from_real(&[0.0, 0.5]).unwrap())
}

fn hyperbolic() -> DiscMap {
    DiscMap::moebius(Moebius::new(c(2.0), c(1.0), c(1.0), c(2.0)).unwrap()).unwrap()
}

fn dual_path() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let w = with_l1(rand_poly(&mut rng, 6), rng.gen_range(0.5..1.5));
        let mut pv = rand_poly(&mut rng, 6);
        if pv.len() < 2 {
            pv.push(rand_c(&mut rng));
        }
        let phi = DiscMap::series(with_l1(pv, rng.gen_range(0.1..0.95)));
        ensure(phi.certified_sup().is_some_and(|s| s < 1.0), "self-map not certified")?;
        let f = CoeffSeries::new(rand_poly(&mut rng, 6)).unwrap();
        let op = WeightedCompositionOp::h2(Weight::Series(w), phi, 128).map_err(e)?;
        for n in 1..=10 {
            let d = iterate_direct(&op, n, &f).map_err(e)?;
            let m = iterate_matrix(&op, n).map_err(e)?.apply_series(&f.truncated(128));
            worst = worst.max(d.add(&m.scale(c(-1.0))).h2_norm());
        }
    }
    ensure(worst < 1e-6, format!("max difference {worst:e}"))?;
    Ok(format!("50 triples, n <= 10: max ||direct - matrix f|| = {worst:.2e}"))
}

fn interior_dw() -> Outcome {
    let opts = ClassifyOptions::default();
    let op = WeightedCompositionOp::h2(Weight::from_real(&[0.5, 0.5]).unwrap(), half(), 64).map_err(e)?;
    let r = classify_interior_dw(&op, &opts).map_err(e)?;
    ensure(r.mode == Mode::Uniform && r.limit == Some(LimitProjection::Zero), format!("w(0)=1/2: {:?}", r.mode))?;

    let op = WeightedCompositionOp::h2(Weight::one(), half(), 64).map_err(e)?;
    let r = classify_interior_dw(&op, &opts).map_err(e)?;
    ensure(r.mode == Mode::Uniform && matches!(r.limit, Some(LimitProjection::RankOne { .. })), format!("w=1: {:?}", r.mode))?;
    let at40 = r.evidence.iter().find(|row| row.n == 40).ok_or("no row 40")?.norm_minus_p;
    ensure(at40 < 1e-6, format!("||T^40 - P|| = {at40:e}"))?;

    let op = WeightedCompositionOp::h2(Weight::from_real(&[2.0]).unwrap(), half(), 64).map_err(e)?;
    let r = classify_interior_dw(&op, &opts).map_err(e)?;
    ensure(r.mode == Mode::None, format!("w=2: {:?}", r.mode))?;
    let mut rel: f64 = 0.0;
    for n in 1..=30 {
        let v = iterate_direct(&op, n, &CoeffSeries::one(64)).map_err(e)?.evaluate(c(0.0)).map_err(e)?;
        rel = rel.max((v - 2f64.powi(n as i32)).norm() / 2f64.powi(n as i32));
    }
    ensure(rel < 1e-10, format!("T^n(1)(0) relative error {rel:e}"))?;
    Ok(format!("uniform/P=0, uniform/rank-one (||T^40-P|| = {at40:.1e}), none (2^n rel err {rel:.1e})"))
}

fn elliptic() -> Outcome {
    let opts = ClassifyOptions::default();
    let flip = DiscMap::rotation(c(-1.0)).unwrap();
    let modes: Vec<_> = [[0.5, 0.5], [0.0, 1.0], [1.0, 1.0]]
        .iter()
        .map(|w| {
            let op = WeightedCompositionOp::h2(Weight::from_real(w).unwrap(), flip.clone(), 64).unwrap();
            classify_elliptic_finite(&op, &opts)
        })
        .collect::<Result<_, _>>()
        .map_err(e)?;
    ensure(modes[0].mode == Mode::Uniform, format!("||v|| = 1/2: {:?}", modes[0].mode))?;
    ensure(modes[1].mode == Mode::WeakNotStrong, format!("|v| = 1: {:?}", modes[1].mode))?;
    ensure(modes[2].mode == Mode::None, format!("||v|| = 2: {:?}", modes[2].mode))?;
    let l2 = &modes[1].v_power_l2;
    ensure(l2.len() >= 50 && l2.iter().take(50).all(|x| (x - 1.0).abs() < 1e-12), "||v^m||_2 != 1")?;
    let wv = modes[2].rationale.witness_value.ok_or("no witness")?;
    let z0 = modes[2].rationale.witness_point.ok_or("no witness point")?;
    let direct = (1.0 - z0 * z0).norm();
    ensure((wv - 1.9025).abs() < 1e-9 && (direct - 1.9025).abs() < 1e-9, format!("witness {wv}"))?;
    Ok(format!("uniform / weak_not_strong / none; |v(z0)| = {wv:.4} at z0 = {:.2}i", z0.im))
}

fn spectra() -> Outcome {
    let t = Instant::now();
    let op = WeightedCompositionOp::h2(Weight::one(), hyperbolic(), 256).map_err(e)?;
    let g = gelfand_radius(&op, &[4, 8, 16, 32, 64]).map_err(e)?;
    let s3 = 3f64.sqrt();
    ensure((g.estimate - s3).abs() <= 0.1, format!("hyperbolic estimate {}", g.estimate))?;
    let rot = DiscMap::rotation(Complex64::from_polar(1.0, 1.0)).unwrap();
    let op = WeightedCompositionOp::h2(Weight::from_real(&[0.5, 0.25]).unwrap(), rot, 256).map_err(e)?;
    let g2 = gelfand_radius(&op, &[4, 8, 16, 32, 64]).map_err(e)?;
    ensure((g2.estimate - 0.5).abs() <= 0.05, format!("rotation estimate {}", g2.estimate))?;
    Ok(format!(
        "hyperbolic {:.5} (sqrt 3 = {s3:.5}), rotation {:.5} (1/2), {:.1}s",
        g.estimate,
        g2.estimate,
        t.elapsed().as_secs_f64()
    ))
}

fn norm_preserved<F: Fn(&CoeffSeries) -> (f64, f64)>(rng: &mut ChaCha8Rng, norms: F) -> f64 {
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let f = CoeffSeries::new(rand_poly(rng, 10)).unwrap();
        let (tf, nf) = norms(&f);
        worst = worst.max((tf - nf).abs());
    }
    worst
}

fn isometries() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut notes = Vec::new();

    // theta-only: phi(0) = 0, w = theta.
    let sq = DiscMap::monomial(2).unwrap();
    let w = construct_h2_weight(&sq, Some(&DiscMap::identity())).map_err(e)?;
    let op = WeightedCompositionOp::h2(w, sq.clone(), 64).map_err(e)?;
    let r = h2_isometry_test(&op, 50, 1e-9).map_err(e)?;
    ensure(r.verdict == IsometryVerdict::Isometry, "theta construction failed the test")?;
    let d = norm_preserved(&mut rng, |f| (apply(&op, f).unwrap().h2_norm(), f.h2_norm()));
    ensure(d < 1e-7, format!("theta: norm defect {d:e}"))?;
    notes.push(format!("theta {d:.0e}"));

    // k_beta with phi = psi_{1/2}.
    let psi = DiscMap::psi_involution(c(0.5)).unwrap();
    let w = construct_h2_weight(&psi, None).map_err(e)?;
    let op = WeightedCompositionOp::h2(w, psi, 128).map_err(e)?;
    let r = h2_isometry_test(&op, 50, 1e-9).map_err(e)?;
    ensure(r.verdict == IsometryVerdict::Isometry, "k_beta construction failed the test")?;
    let d = norm_preserved(&mut rng, |f| (apply(&op, f).unwrap().h2_norm(), f.h2_norm()));
    ensure(d < 1e-7, format!("k_beta: norm defect {d:e}"))?;
    notes.push(format!("k_beta {d:.0e}"));

    // Singular inner.
    let s = DiscMap::atomic_singular_inner();
    let w = construct_h2_weight(&s, None).map_err(e)?;
    let op = WeightedCompositionOp::h2(w, s, 64).map_err(e)?;
    let r = h2_isometry_test(&op, 50, 1e-9).map_err(e)?;
    let wn = r.w_norm.unwrap_or(f64::NAN);
    ensure(r.verdict == IsometryVerdict::Isometry && (wn - 1.0).abs() < 1e-6, format!("singular inner: {:?}, ||w|| = {wn}", r.verdict))?;
    let d = norm_preserved(&mut rng, |f| (h2_image_norm(&op, f), f.h2_norm()));
    ensure(d < 1e-7, format!("singular inner: norm defect {d:e}"))?;
    notes.push(format!("singular {d:.0e}"));

    // A^2: sqrt(2) z with z^2, and the symmetric-Blaschke weight.
    let q = DiscQuadrature::lebesgue(48, 128).map_err(e)?;
    let nfold = nfold_cover_weight(&sq, 2, c(1.0)).map_err(e)?;
    let sym = symmetric_blaschke_weight(&sq, &DiscMap::rotation(c(-1.0)).unwrap(), c(1.0)).map_err(e)?;
    for (name, w) in [("nfold", nfold), ("symmetric", sym)] {
        let op = WeightedCompositionOp::new(w, sq.clone(), Space::A2Alpha { alpha: 0.0 }, 64).map_err(e)?;
        let r = bergman_moment_test(&op, &q, 10, 1e-10).map_err(e)?;
        ensure(r.verdict == IsometryVerdict::Isometry, format!("{name}: moment deviation {:?}", r.moment_deviation))?;
        let d = norm_preserved(&mut rng, |f| (bergman_image_norm(&op, f, &q), bergman_norm(f, 0.0)));
        ensure(d < 1e-7, format!("{name}: norm defect {d:e}"))?;
        notes.push(format!("{name} {d:.0e}"));
    }
    Ok(format!("all five pass; max | ||Tf|| - ||f|| |: {}", notes.join(", ")))
}

fn moment_necessity() -> Outcome {
    let q = DiscQuadrature::lebesgue(48, 128).map_err(e)?;
    let op = WeightedCompositionOp::new(Weight::one(), DiscMap::monomial(2).unwrap(), Space::A2Alpha { alpha: 0.0 }, 16).map_err(e)?;
    let r = bergman_moment_test(&op, &q, 4, 1e-10).map_err(e)?;
    let m11 = r.moments[1][1].re;
    let target = bergman_moments(0.0, 2)[1];
    ensure((m11 - 1.0 / 3.0).abs() < 1e-12, format!("M11 = {m11}"))?;
    ensure(target == 0.5 && r.verdict == IsometryVerdict::NotIsometry, "verdict")?;
    Ok(format!("M11 = {m11:.15} vs target {target}; not_isometry"))
}

fn halfplane() -> Outcome {
    let op = halfplane_to_disc(&HalfPlaneMap::affine(1.0, c(1.0)).map_err(e)?, 16).map_err(e)?;
    let phi = op.phi.as_moebius().ok_or("phi not Moebius")?;
    let dphi = phi.distance(&Moebius { a: c(1.0), b: c(-1.0), c: c(1.0), d: c(3.0) });
    let dw = match &op.w {
        Weight::Rational(m) => m.distance(&Moebius { a: c(0.0), b: c(2.0), c: c(1.0), d: c(3.0) }),
        _ => f64::INFINITY,
    };
    ensure(dphi < 1e-14 && dw < 1e-14, format!("coefficient distance {dphi:e}, {dw:e}"))?;

    let dil = HalfPlaneMap::affine(2.0, c(0.0)).map_err(e)?;
    let op = halfplane_to_disc(&dil, 16).map_err(e)?;
    let fixed = (op.phi.eval(c(-1.0)) + 1.0).norm();
    let radial = angular_derivative(&op.phi, c(-1.0));
    ensure(fixed < 1e-15 && (radial - 0.5).abs() < 1e-6, format!("phi(-1) off by {fixed:e}, phi'(-1) = {radial}"))?;

    let mut diffs = Vec::new();
    for h in [dil, HalfPlaneMap::affine(1.0, c(1.0)).map_err(e)?] {
        let chk = halfplane_norm_check(&h, 256).map_err(e)?;
        ensure(chk.difference < 5e-2, format!("{}: formula {} vs {:?}", chk.label, chk.formula.value(), chk.estimate))?;
        diffs.push(chk.difference);
    }
    Ok(format!(
        "coefficients exact ({dphi:.0e}); phi'(-1) = {radial:.9}; |formula - estimate| = {:.1e}, {:.1e}",
        diffs[0], diffs[1]
    ))
}

fn smirnoff_probe() -> Outcome {
    let spec = SmirnoffDomainSpec::from_series(CoeffSeries::from_real(&[0.0, 1.0, 0.25]).unwrap()).map_err(e)?;
    let h = Moebius::new(c(2.0), c(1.0), c(1.0), c(2.0)).unwrap();
    let sp = spec.clone();
    let op = smirnoff_weight(&spec, move |zeta| sp.beta.eval(h.eval(sp.invert(zeta).unwrap())), 64).map_err(e)?;
    let r = kernel_growth_probe(&op, c(0.0), 60).map_err(e)?;
    ensure(r.fired && r.first_exceed.is_some_and(|n| n <= 60), "weighted probe did not fire")?;

    let op = WeightedCompositionOp::h2(Weight::one(), hyperbolic(), 64).map_err(e)?;
    let u = kernel_growth_probe(&op, c(0.0), 60).map_err(e)?;
    let mut rel: f64 = 0.0;
    for (n, t) in u.trace.iter().enumerate() {
        // phi_n(0) = (3^n - 1) / (3^n + 1).
        let x = 3f64.powi(n as i32);
        let closed = ((x + 2.0 + 1.0 / x) / 4.0).sqrt();
        rel = rel.max((t / closed - 1.0).abs());
    }
    ensure(rel < 1e-6, format!("unweighted relative error {rel:e}"))?;
    Ok(format!("weighted trace passes 1e3 at n = {}; unweighted closed form rel err {rel:.1e}", r.first_exceed.unwrap()))
}

fn h2d() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let d = WeightSequence::power_law(-0.5, 512).map_err(e)?;
    let mut min_slack = f64::INFINITY;
    for i in 0..20 {
        let w = with_l1(rand_poly(&mut rng, 3), rng.gen_range(0.5..2.0));
        let mut pv = rand_poly(&mut rng, 3);
        pv.resize(pv.len().max(2), c(0.0));
        let phi = DiscMap::series(with_l1(pv, rng.gen_range(0.2..0.9)));
        let op = WeightedCompositionOp::h2(Weight::Series(w), phi, 64).map_err(e)?;
        let b = h2d_transfer_bound(&op, &d, 1.0, 1e-10).map_err(e)?;
        ensure(b.holds, format!("instance {i}: lhs {} > rhs {} ({:?})", b.lhs.value(), b.rhs, b.diagnostic))?;
        min_slack = min_slack.min(b.slack);
    }
    let mut confirmed = 0;
    for i in 0..10 {
        let mut w = rand_poly(&mut rng, 3);
        w[0] = Complex64::from_polar(rng.gen_range(0.0..0.5), rng.gen_range(0.0..2.0 * PI));
        let mut pv = rand_poly(&mut rng, 3);
        pv.resize(pv.len().max(2), c(0.0));
        let phi = DiscMap::series(with_l1(pv, rng.gen_range(0.2..0.8)));
        let op = WeightedCompositionOp::h2(Weight::Series(CoeffSeries::new(w).unwrap()), phi, 48).map_err(e)?;
        let r = h2d_iterate_transfer(&op, &d, 80, 1e-6).map_err(e)?;
        if r.status == TransferStatus::Triggered {
            ensure(r.confirmed == Some(true), format!("instance {i}: H^2 decays but H^2(d) does not"))?;
            confirmed += 1;
        }
    }
    ensure(confirmed == 10, format!("only {confirmed} of 10 instances decayed in H^2"))?;
    Ok(format!("20/20 bounds hold (Lambda = 1, min slack {min_slack:.3}); 10/10 iterate transfers confirmed"))
}

fn structural() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut inv: f64 = 0.0;
    for _ in 0..10_000 {
        let a = Complex64::from_polar(rng.gen_range(0.0..0.99), rng.gen_range(0.0..2.0 * PI));
        let z = Complex64::from_polar(rng.gen_range(0.0..0.999), rng.gen_range(0.0..2.0 * PI));
        let p = DiscMap::psi_involution(a).unwrap();
        inv = inv.max((p.eval(p.eval(z)) - z).norm());
    }
    ensure(inv < 1e-12, format!("involution error {inv:e}"))?;

    for _ in 0..5 {
        let g = with_l1(rand_poly(&mut rng, 4), 0.9);
        let phi = DiscMap::series(CoeffSeries::monomial(1, 2).multiply(&g));
        let r = 0.8;
        let ring = GridSpec::new(1 << 16, r).unwrap().nodes();
        let delta = ring.iter().map(|z| phi.eval(*z).norm() / r).fold(0.0, f64::max);
        ensure(delta < 1.0, "delta >= 1")?;
        for k in 1..=20 {
            let pk = iterate_map(&phi, k).map_err(e)?;
            let m = ring.iter().step_by(512).map(|z| pk.eval(*z).norm()).fold(0.0, f64::max);
            ensure(m <= delta.powi(k as i32) * r + 1e-9, format!("Schwarz trace fails at k = {k}"))?;
        }
    }

    let mut quad: f64 = 0.0;
    for (kr, kt, alpha) in [(48, 128, 0.0), (16, 33, 1.5), (7, 20, 0.5)] {
        let q = DiscQuadrature::gauss_jacobi(kr, kt, alpha).map_err(e)?;
        let m = bergman_moments(alpha, q.degree_exact + 1);
        for j in 0..=q.degree_exact {
            for k in 0..=q.degree_exact {
                let got = q.integrate(|z| z.powu(j as u32) * z.conj().powu(k as u32));
                quad = quad.max((got - if j == k { m[j] } else { 0.0 }).norm());
            }
        }
    }
    ensure(quad < 1e-13, format!("quadrature error {quad:e}"))?;

    let mut proj: f64 = 0.0;
    for w in [Weight::one(), Weight::from_real(&[1.0, 0.5]).unwrap()] {
        let op = WeightedCompositionOp::h2(w, half(), 64).map_err(e)?;
        let r = classify_interior_dw(&op, &ClassifyOptions::default()).map_err(e)?;
        let p = r.limit.ok_or("no limit")?.matrix(64, None);
        let t: CMatrix = section(&op, 64).map_err(e)?;
        proj = proj.max(spectral_norm(&(&p * &p - &p))).max(spectral_norm(&(&t * &p - &p)));
    }
    ensure(proj < 1e-8, format!("projection identities {proj:e}"))?;

    let report = || {
        let op = WeightedCompositionOp::h2(Weight::one(), half(), 32).unwrap();
        serde_json::to_vec(&classify_interior_dw(&op, &ClassifyOptions::default()).unwrap()).unwrap()
    };
    ensure(report() == report(), "reports differ between runs")?;
    Ok(format!("involution {inv:.0e}; Schwarz ok; quadrature {quad:.0e}; projections {proj:.0e}; reports identical"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("dual-path iterate oracle", dual_path),
        ("interior Denjoy-Wolff classification", interior_dw),
        ("elliptic trichotomy", elliptic),
        ("spectra formulas", spectra),
        ("isometry suite", isometries),
        ("Bergman moment necessity", moment_necessity),
        ("half-plane transfer", halfplane),
        ("Smirnoff kernel growth probe", smirnoff_probe),
        ("H2(d) transfer", h2d),
        ("structural invariants", structural),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("PASS [{:>2}] {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{:>2}] {name}: {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
