use std::fmt::Write as _;
use std::fs;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use wco_core::convergence::{
    classify_elliptic_finite, classify_interior_dw, corollary_elliptic_infinite, ClassifyOptions, ConvergenceReport, Mode, Rationale, TraceRow,
    DEFAULT_WEIGHT_FLOOR,
};
use wco_core::discmap::{classify_automorphism, denjoy_wolff, AutomorphismClass, DiscMap, FixedPointLocation, DEFAULT_ORDER_BOUND};
use wco_core::holofunc::{CoeffSeries, GridSpec};
use wco_core::io::{map_json, parse_halfplane, parse_map, parse_pair, parse_space, weight_json, Cplx};
use wco_core::isometry::{
    bergman_moment_test, construct_h2_weight, h2_isometry_test, nfold_cover_weight, symmetric_blaschke_weight, IsometryReport, IsometryVerdict,
};
use wco_core::quadrature::DiscQuadrature;
use wco_core::report::Tagged;
use wco_core::transfer::{
    halfplane_equivalence_suite, halfplane_norm_check, h2d_iterate_transfer, h2d_transfer_bound, kernel_growth_probe, smirnoff_weight, NormDecay,
    SmirnoffDomainSpec, TransferStatus,
};
use wco_core::wco::{build_matrix, conjugate_to_origin, gelfand_radius, default_gelfand_schedule, iterate_direct, power_bounded_probe, PowerBound, Space, WeightedCompositionOp};
use wco_core::weight::Weight;
use wco_core::{Error, Result};

use crate::{Common, OperatorArgs};

/// What a command produced.
pub struct Outcome {
    pub report: Value,
    pub csv: Option<String>,
    /// Additional files for the output directory.
    pub files: Vec<(String, String)>,
    pub summary: String,
    pub inconclusive: bool,
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn check(common: &Common) -> Result<()> {
    if common.trunc == 0 || common.horizon == 0 {
        return Err(Error::InvalidParameter("--trunc and --horizon must be positive".into()));
    }
    if !(common.tol > 0.0 && common.tol < 1.0) {
        return Err(Error::InvalidParameter(format!("--tol must lie in (0, 1), got {}", common.tol)));
    }
    if !(common.lambda_cap > 0.0) {
        return Err(Error::InvalidParameter("--lambda-cap must be positive".into()));
    }
    Ok(())
}

fn parse_cplx(text: &str, what: &str) -> Result<Complex64> {
    serde_json::from_str::<Cplx>(text)
        .map(Complex64::from)
        .map_err(|e| Error::Parse(format!("{what}: {e}")))
}

fn parse_coeffs(text: &str, what: &str) -> Result<CoeffSeries> {
    let v: Vec<Cplx> = serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))?;
    CoeffSeries::new(v.into_iter().map(Complex64::from).collect())
}

fn with_grid(op: WeightedCompositionOp, common: &Common) -> Result<WeightedCompositionOp> {
    if common.grid.is_none() && common.radius.is_none() {
        return Ok(op);
    }
    let def = GridSpec::for_trunc(op.trunc);
    let grid = GridSpec::new(common.grid.unwrap_or(def.size), common.radius.unwrap_or(def.radius))?;
    op.with_grid(grid)
}

fn build_op(args: &OperatorArgs, common: &Common) -> Result<WeightedCompositionOp> {
    check(common)?;
    let w = wco_core::io::parse_weight(&args.weight)?;
    let phi = parse_map(&args.map)?;
    let space = parse_space(&args.space, 4 * common.trunc)?;
    with_grid(WeightedCompositionOp::new(w, phi, space, common.trunc)?, common)
}

fn operator_json(op: &WeightedCompositionOp) -> Value {
    let grid = op.grid_for(op.trunc);
    json!({
        "weight": weight_json(&op.w),
        "map": map_json(&op.phi),
        "space": op.space.label(),
        "trunc": op.trunc,
        "grid": {"size": grid.size, "radius": grid.radius},
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `n,norm,norm_minus_P,witness` rows.
fn csv_rows(rows: impl IntoIterator<Item = (usize, f64, Option<f64>, Option<f64>)>) -> String {
    let mut s = String::from("n,norm,norm_minus_P,witness\n");
    for (n, norm, diff, wit) in rows {
        let _ = writeln!(s, "{n},{norm},{},{}", fmt_opt(diff), fmt_opt(wit));
    }
    s
}

fn trace_csv(rows: &[TraceRow]) -> String {
    csv_rows(rows.iter().map(|r| (r.n, r.norm, Some(r.norm_minus_p), r.witness)))
}

pub fn classify(args: &OperatorArgs, assert_re: bool, common: &Common) -> Result<Outcome> {
    let op = build_op(args, common)?;
    let opts = ClassifyOptions {
        tol: common.tol,
        horizon: common.horizon,
        assert_re_below_one: assert_re,
        ..ClassifyOptions::default()
    };
    let class = classify_automorphism(&op.phi, DEFAULT_ORDER_BOUND);
    let (route, report) = match class {
        AutomorphismClass::Elliptic { order: Some(_), fixed_point, .. } => {
            let op = if fixed_point.norm() > 1e-14 { conjugate_to_origin(&op, fixed_point, 1e-10)? } else { op.clone() };
            ("elliptic_finite_order", classify_elliptic_finite(&op, &opts)?)
        }
        AutomorphismClass::Elliptic { order: None, .. } => ("elliptic_infinite_order", corollary_elliptic_infinite(&op, &opts)?),
        _ => {
            let dw = denjoy_wolff(&op.phi, 1e-13, 200_000)?;
            match dw.location {
                FixedPointLocation::Interior => ("interior_denjoy_wolff", classify_interior_dw(&op, &opts)?),
                FixedPointLocation::Boundary => ("boundary_denjoy_wolff", boundary_classify(&op, &opts, dw.dw_point)?),
            }
        }
    };
    let summary = format!("mode: {}", to_value(&report.mode)?.as_str().unwrap_or("?"));
    Ok(Outcome {
        report: json!({
            "command": "classify",
            "operator": operator_json(&op),
            "automorphism_class": to_value(&class)?,
            "route": route,
            "result": to_value(&report)?,
        }),
        csv: Some(trace_csv(&report.evidence)),
        files: Vec::new(),
        summary,
        inconclusive: report.mode == Mode::Inconclusive,
    })
}

/// Boundary Denjoy-Wolff point: unbounded powers rule out convergence of
/// any kind; otherwise the case is left open.
fn boundary_classify(op: &WeightedCompositionOp, opts: &ClassifyOptions, dw: Complex64) -> Result<ConvergenceReport> {
    let probe = power_bounded_probe(op, opts.horizon)?;
    let (mode, note) = match &probe.verdict {
        PowerBound::Unbounded { .. } => (Mode::None, "powers unbounded in norm"),
        PowerBound::Bounded { .. } => (Mode::Inconclusive, "powers bounded; no classification for a boundary Denjoy-Wolff point"),
        PowerBound::Inconclusive => (Mode::Inconclusive, "power-boundedness undecided"),
    };
    Ok(ConvergenceReport {
        mode,
        rationale: Rationale {
            theorem: "bounded iterates are necessary for weak convergence".into(),
            alpha: Some(dw),
            power_bound: Some(note.into()),
            tol: opts.tol,
            ..Rationale::default()
        },
        evidence: probe
            .trace_2n
            .iter()
            .enumerate()
            .map(|(i, &v)| TraceRow {
                n: i + 1,
                norm: v,
                norm_minus_p: v,
                witness: None,
            })
            .collect(),
        v_power_l2: Vec::new(),
        limit: None,
        caveats: vec!["norms are lower estimates: finite sections combined with the reproducing-kernel bound".into()],
    })
}

pub fn iterate(args: &OperatorArgs, f: &str, steps: usize, common: &Common) -> Result<Outcome> {
    let op = build_op(args, common)?;
    if steps == 0 {
        return Err(Error::InvalidParameter("-n must be >= 1".into()));
    }
    let f = parse_coeffs(f, "f")?.truncated(op.trunc);
    let m = build_matrix(&op)?;
    let mut via_matrix = f.clone();
    let mut rows = Vec::new();
    let mut last = (f.clone(), f.clone());
    for n in 1..=steps {
        via_matrix = m.apply_series(&via_matrix);
        let direct = iterate_direct(&op, n, &f)?;
        let diff = op.space.norm(&direct.add(&via_matrix.scale(Complex64::new(-1.0, 0.0))))?;
        let norm = op.space.norm(&direct)?;
        rows.push((n, norm, Some(diff), Some(direct.coeffs()[0].norm())));
        last = (direct, via_matrix.clone());
    }
    let max_diff = rows.iter().filter_map(|r| r.2).fold(0.0, f64::max);
    Ok(Outcome {
        report: json!({
            "command": "iterate",
            "operator": operator_json(&op),
            "steps": steps,
            "direct": last.0.coeffs(),
            "matrix": last.1.coeffs(),
            "norms": rows.iter().map(|r| r.1).collect::<Vec<_>>(),
            "path_difference": rows.iter().map(|r| r.2).collect::<Vec<_>>(),
            "max_path_difference": max_diff,
        }),
        csv: Some(csv_rows(rows)),
        files: Vec::new(),
        summary: format!("max |direct - matrix| over {steps} steps: {max_diff:e}"),
        inconclusive: false,
    })
}

fn quadrature(common: &Common, alpha: f64) -> Result<DiscQuadrature> {
    let (kr, kt) = parse_pair(&common.quad_nodes)?;
    DiscQuadrature::gauss_jacobi(kr, kt, alpha)
}

fn run_isometry_test(op: &WeightedCompositionOp, moments: usize, common: &Common) -> Result<IsometryReport> {
    match op.space {
        Space::H2 => h2_isometry_test(op, common.horizon, common.tol),
        Space::A2Alpha { alpha } => bergman_moment_test(op, &quadrature(common, alpha)?, moments, common.tol),
        Space::H2d { .. } => Err(Error::InvalidParameter("isometry tests cover h2 and a2 spaces".into())),
    }
}

fn verdict_str(v: IsometryVerdict) -> &'static str {
    match v {
        IsometryVerdict::Isometry => "isometry",
        IsometryVerdict::NotIsometry => "not_isometry",
        IsometryVerdict::Inconclusive => "inconclusive",
    }
}

fn isometry_csv(r: &IsometryReport) -> Option<String> {
    (!r.moments.is_empty()).then(|| {
        csv_rows(r.moments.iter().enumerate().map(|(j, row)| (j, row[j].re, None, None)))
    })
}

pub fn isometry_test(args: &OperatorArgs, moments: usize, common: &Common) -> Result<Outcome> {
    let op = build_op(args, common)?;
    let r = run_isometry_test(&op, moments, common)?;
    Ok(Outcome {
        report: json!({
            "command": "isometry_test",
            "operator": operator_json(&op),
            "result": to_value(&r)?,
        }),
        csv: isometry_csv(&r),
        files: Vec::new(),
        summary: format!("verdict: {}", verdict_str(r.verdict)),
        inconclusive: r.verdict == IsometryVerdict::Inconclusive,
    })
}

pub struct ConstructArgs {
    pub map: String,
    pub kind: String,
    pub theta: Option<String>,
    pub cover: Option<u32>,
    pub psi: Option<String>,
    pub c: String,
    pub moments: usize,
}

pub fn isometry_construct(args: &ConstructArgs, common: &Common) -> Result<Outcome> {
    check(common)?;
    let phi = parse_map(&args.map)?;
    let c = parse_cplx(&args.c, "c")?;
    let (w, space): (Weight, Space) = match args.kind.as_str() {
        "h2" => {
            let theta = args.theta.as_deref().map(parse_map).transpose()?;
            (construct_h2_weight(&phi, theta.as_ref())?, Space::H2)
        }
        "nfold" => {
            let n = args.cover.ok_or_else(|| Error::InvalidParameter("nfold needs --cover".into()))?;
            (nfold_cover_weight(&phi, n, c)?, Space::A2Alpha { alpha: 0.0 })
        }
        "symmetric" => {
            let psi = parse_map(args.psi.as_deref().ok_or_else(|| Error::InvalidParameter("symmetric needs --psi".into()))?)?;
            (symmetric_blaschke_weight(&phi, &psi, c)?, Space::A2Alpha { alpha: 0.0 })
        }
        other => return Err(Error::InvalidParameter(format!("unknown construction '{other}' (h2, nfold, symmetric)"))),
    };
    let op = with_grid(WeightedCompositionOp::new(w, phi, space, common.trunc)?, common)?;
    let r = run_isometry_test(&op, args.moments, common)?;
    let weight = weight_json(&op.w);
    Ok(Outcome {
        report: json!({
            "command": "isometry_construct",
            "construction": args.kind,
            "operator": operator_json(&op),
            "weight": weight.clone(),
            "test": to_value(&r)?,
        }),
        csv: isometry_csv(&r),
        files: vec![("weight.json".into(), pretty(&weight)?)],
        summary: format!("constructed weight; test verdict: {}", verdict_str(r.verdict)),
        inconclusive: r.verdict == IsometryVerdict::Inconclusive,
    })
}

pub fn spectrum(args: &OperatorArgs, common: &Common) -> Result<Outcome> {
    let op = build_op(args, common)?;
    let class = classify_automorphism(&op.phi, DEFAULT_ORDER_BOUND);
    let formula = if class == AutomorphismClass::NotAutomorphism || op.space != Space::H2 {
        json!(null)
    } else {
        match wco_core::convergence::spectrum_automorphism(&op, &class, DEFAULT_WEIGHT_FLOOR) {
            Ok(set) => json!({
                "set": to_value(&set)?,
                "spectral_radius": to_value(&Tagged::certified(set.spectral_radius(), "spectrum of a weighted automorphism"))?,
            }),
            Err(e) => json!({"unavailable": e.to_string()}),
        }
    };
    let g = gelfand_radius(&op, &default_gelfand_schedule())?;
    let estimate = Tagged::FiniteSection {
        value: g.estimate,
        at_2n: g.section_2n.last().copied().unwrap_or(f64::NAN),
        delta: g.delta,
    };
    let rows = g.schedule.iter().enumerate().map(|(i, &n)| (n, g.values[i], None, Some(g.kernel[i])));
    Ok(Outcome {
        report: json!({
            "command": "spectrum",
            "operator": operator_json(&op),
            "automorphism_class": to_value(&class)?,
            "formula": formula,
            "gelfand": to_value(&g)?,
            "spectral_radius_estimate": to_value(&estimate)?,
        }),
        csv: Some(csv_rows(rows.collect::<Vec<_>>())),
        files: Vec::new(),
        summary: format!("spectral radius estimate: {}", g.estimate),
        inconclusive: g.diverged,
    })
}

pub fn transfer_halfplane(phi: &str, common: &Common) -> Result<Outcome> {
    check(common)?;
    let h = parse_halfplane(phi)?;
    let norm = halfplane_norm_check(&h, common.trunc)?;
    let op = wco_core::transfer::halfplane_to_disc(&h, common.trunc)?;
    let (suite, csv, inconclusive) = if (h.ang_deriv_inf - 1.0).abs() > common.tol {
        let s = halfplane_equivalence_suite(&h, common.trunc, common.horizon, common.tol)?;
        let rows = s.trace_2n.iter().enumerate().map(|(i, &v)| (i + 1, v, None, Some(s.formula_trace[i]))).collect::<Vec<_>>();
        let inc = s.observed == NormDecay::Inconclusive;
        (to_value(&s)?, Some(csv_rows(rows)), inc)
    } else {
        (json!({"skipped": "equivalence theorem needs Phi'(inf) != 1"}), None, false)
    };
    Ok(Outcome {
        report: json!({
            "command": "transfer_halfplane",
            "phi": h.label(),
            "operator": operator_json(&op),
            "norm_check": to_value(&norm)?,
            "equivalence": suite,
        }),
        csv,
        files: Vec::new(),
        summary: format!("norm: formula {} vs estimate {}", norm.formula.value(), norm.estimate.value()),
        inconclusive,
    })
}

pub fn transfer_smirnoff(beta: &str, conjugate: &str, w0: &str, common: &Common) -> Result<Outcome> {
    check(common)?;
    let spec = SmirnoffDomainSpec::from_series(parse_coeffs(beta, "beta")?)?;
    let psi: DiscMap = parse_map(conjugate)?;
    let w0 = parse_cplx(w0, "w0")?;
    let sp = spec.clone();
    let domain_map = move |zeta: Complex64| match sp.invert(zeta) {
        Ok(z) => sp.beta.eval(psi.eval(z)),
        Err(_) => Complex64::new(f64::NAN, f64::NAN),
    };
    let op = smirnoff_weight(&spec, domain_map, common.trunc)?;
    let r = kernel_growth_probe(&op, w0, common.horizon)?;
    let rows = r
        .trace
        .iter()
        .enumerate()
        .map(|(n, &t)| (n, t, r.matrix_trace[n], Some(r.orbit[n].norm())))
        .collect::<Vec<_>>();
    Ok(Outcome {
        report: json!({
            "command": "transfer_smirnoff",
            "beta": parse_coeffs(beta, "beta")?.coeffs(),
            "conjugate": conjugate_json(conjugate)?,
            "operator": operator_json(&op),
            "kernel_probe": to_value(&r)?,
        }),
        csv: Some(csv_rows(rows)),
        files: Vec::new(),
        summary: match r.first_exceed {
            Some(n) => format!("kernel growth probe fired at n = {n}"),
            None => format!("kernel growth probe did not fire within {} steps", common.horizon),
        },
        inconclusive: false,
    })
}

fn conjugate_json(text: &str) -> Result<Value> {
    Ok(map_json(&parse_map(text)?))
}

pub fn transfer_weighted(args: &OperatorArgs, d: &str, common: &Common) -> Result<Outcome> {
    let op = build_op(args, common)?.with_space(Space::H2);
    let d = match parse_space(d, 4 * common.trunc)? {
        Space::H2d { d } => d,
        _ => return Err(Error::InvalidParameter("--d must be an h2d space".into())),
    };
    let bound = h2d_transfer_bound(&op, &d, common.lambda_cap, common.tol)?;
    let dw = denjoy_wolff(&op.phi, 1e-12, 10_000).ok();
    let iterate = match dw.map(|r| r.location) {
        Some(FixedPointLocation::Interior) => Some(h2d_iterate_transfer(&op, &d, common.horizon, common.tol)?),
        _ => None,
    };
    let csv = iterate.as_ref().map(|it| {
        csv_rows(it.h2_trace.iter().enumerate().map(|(i, &v)| (i + 1, v, None, Some(it.h2d_trace[i]))).collect::<Vec<_>>())
    });
    let inconclusive = iterate.as_ref().is_some_and(|it| it.status == TransferStatus::Inconclusive);
    Ok(Outcome {
        report: json!({
            "command": "transfer_weighted",
            "operator": operator_json(&op),
            "d": d.label,
            "bound": to_value(&bound)?,
            "iterate": match &iterate {
                Some(it) => to_value(it)?,
                None => json!({"skipped": "needs an interior Denjoy-Wolff point"}),
            },
        }),
        csv,
        files: Vec::new(),
        summary: format!("lhs {} <= rhs {}: {} (Lambda = {})", bound.lhs.value(), bound.rhs, bound.holds, bound.lambda),
        inconclusive,
    })
}

pub fn probe(args: &OperatorArgs, w0: &str, common: &Common) -> Result<Outcome> {
    let op = build_op(args, common)?;
    let w0 = parse_cplx(w0, "w0")?;
    let p = power_bounded_probe(&op, common.horizon)?;
    let kernel = if op.space == Space::H2 { Some(kernel_growth_probe(&op, w0, common.horizon)?) } else { None };
    let rows = p
        .trace_2n
        .iter()
        .enumerate()
        .map(|(i, &v)| (i + 1, v, None, kernel.as_ref().and_then(|k| k.trace.get(i + 1).copied())))
        .collect::<Vec<_>>();
    let verdict = to_value(&p.verdict)?;
    Ok(Outcome {
        summary: format!("power bound: {}", verdict["verdict"].as_str().unwrap_or("?")),
        report: json!({
            "command": "probe",
            "operator": operator_json(&op),
            "power_bound": to_value(&p)?,
            "kernel_probe": match &kernel {
                Some(k) => to_value(k)?,
                None => json!(null),
            },
        }),
        csv: Some(csv_rows(rows)),
        files: Vec::new(),
        inconclusive: p.verdict == PowerBound::Inconclusive,
    })
}

fn pretty(v: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn write(path: &std::path::Path, body: &str) -> Result<()> {
    fs::write(path, body).map_err(|e| Error::InvalidParameter(format!("cannot write {}: {e}", path.display())))
}

pub fn emit(out: &Outcome, common: &Common) -> Result<()> {
    let report = pretty(&out.report)?;
    if let Some(dir) = &common.out {
        fs::create_dir_all(dir).map_err(|e| Error::InvalidParameter(format!("cannot create {}: {e}", dir.display())))?;
        write(&dir.join("report.json"), &report)?;
        if common.csv {
            if let Some(csv) = &out.csv {
                write(&dir.join("trace.csv"), csv)?;
            }
        }
        for (name, body) in &out.files {
            write(&dir.join(name), body)?;
        }
    }
    if common.json {
        print!("{report}");
    } else if common.csv && common.out.is_none() {
        print!("{}", out.csv.as_deref().unwrap_or(""));
    } else {
        println!("{}", out.summary);
    }
    Ok(())
}
