//! Text formats for maps, weights and spaces.
//!
//! Complex numbers are written as a bare number or a `[re, im]` pair.

use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::discmap::{DiscMap, MapKind, Moebius};
use crate::error::{Error, Result};
use crate::holofunc::{CoeffSeries, WeightSequence};
use crate::transfer::HalfPlaneMap;
use crate::wco::Space;
use crate::weight::Weight;

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Cplx {
    Real(f64),
    Pair([f64; 2]),
}

impl From<Cplx> for Complex64 {
    fn from(c: Cplx) -> Self {
        match c {
            Cplx::Real(x) => Complex64::new(x, 0.0),
            Cplx::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

fn cvec(v: &[Cplx]) -> Vec<Complex64> {
    v.iter().map(|&c| c.into()).collect()
}

fn one() -> Cplx {
    Cplx::Real(1.0)
}

fn unit_mass() -> f64 {
    1.0
}

/// JSON description of a self-map of the disc.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    /// `(num[0] z + num[1]) / (den[0] z + den[1])`.
    Moebius { num: [Cplx; 2], den: [Cplx; 2] },
    Rotation {
        #[serde(default)]
        lambda: Option<Cplx>,
        /// Alternative to `lambda`: `exp(i angle)`.
        #[serde(default)]
        angle: Option<f64>,
    },
    Blaschke {
        zeros: Vec<Cplx>,
        #[serde(default = "one")]
        phase: Cplx,
    },
    Series { coeffs: Vec<Cplx> },
    Monomial { n: u32 },
    Identity,
    SingularInner {
        #[serde(default = "one")]
        atom: Cplx,
        #[serde(default = "unit_mass")]
        mass: f64,
    },
    /// `psi_a(z) = (a - z) / (1 - conj(a) z)`.
    Psi { a: Cplx },
}

impl MapSpec {
    pub fn build(&self) -> Result<DiscMap> {
        match self {
            MapSpec::Moebius { num, den } => {
                DiscMap::moebius(Moebius::new(num[0].into(), num[1].into(), den[0].into(), den[1].into())?)
            }
            MapSpec::Rotation { lambda, angle } => match (lambda, angle) {
                (Some(l), None) => DiscMap::rotation((*l).into()),
                (None, Some(t)) => DiscMap::rotation(Complex64::from_polar(1.0, *t)),
                _ => Err(Error::Parse("rotation needs exactly one of lambda and angle".into())),
            },
            MapSpec::Blaschke { zeros, phase } => DiscMap::blaschke(cvec(zeros), (*phase).into()),
            MapSpec::Series { coeffs } => Ok(DiscMap::series(CoeffSeries::new(cvec(coeffs))?)),
            MapSpec::Monomial { n } => DiscMap::monomial(*n),
            MapSpec::Identity => Ok(DiscMap::identity()),
            MapSpec::SingularInner { atom, mass } => DiscMap::singular_inner((*atom).into(), *mass),
            MapSpec::Psi { a } => DiscMap::psi_involution((*a).into()),
        }
    }
}

pub fn parse_map(text: &str) -> Result<DiscMap> {
    let spec: MapSpec = serde_json::from_str(text).map_err(|e| Error::Parse(format!("map spec: {e}")))?;
    spec.build()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum WeightObject {
    Series { coeffs: Vec<Cplx> },
    Constant { value: Cplx },
    /// `(num[0] z + num[1]) / (den[0] z + den[1])`.
    Rational { num: [Cplx; 2], den: [Cplx; 2] },
    /// `(1 - |beta|^2)^{1/2} / (1 - conj(beta) z)`.
    Kernel { beta: Cplx },
    /// An inner factor given as a map spec.
    Map { map: MapSpec },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum WeightSpec {
    Coeffs(Vec<Cplx>),
    Object(WeightObject),
}

/// A weight: a coefficient array or a tagged object.
pub fn parse_weight(text: &str) -> Result<Weight> {
    let spec: WeightSpec = serde_json::from_str(text).map_err(|e| Error::Parse(format!("weight spec: {e}")))?;
    match spec {
        WeightSpec::Coeffs(c) => Ok(Weight::Series(CoeffSeries::new(cvec(&c))?)),
        WeightSpec::Object(o) => match o {
            WeightObject::Series { coeffs } => Ok(Weight::Series(CoeffSeries::new(cvec(&coeffs))?)),
            WeightObject::Constant { value } => Ok(Weight::constant(value.into())),
            WeightObject::Rational { num, den } => Weight::rational(num[0].into(), num[1].into(), den[0].into(), den[1].into()),
            WeightObject::Kernel { beta } => Weight::normalized_kernel(beta.into()),
            WeightObject::Map { map } => Ok(Weight::Map(map.build()?)),
        },
    }
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("{what}: cannot read '{s}' as a number")))
}

/// `h2`, `a2`, `a2alpha:<alpha>`, `h2d:bergman:<alpha>`,
/// `h2d:power:<alpha>` or `h2d:ones`; `len` is the number of `d_n` to
/// generate.
pub fn parse_space(text: &str, len: usize) -> Result<Space> {
    let parts: Vec<&str> = text.trim().split(':').collect();
    match parts.as_slice() {
        ["h2"] => Ok(Space::H2),
        ["a2"] => Ok(Space::A2Alpha { alpha: 0.0 }),
        ["a2alpha", a] => {
            let alpha = parse_f64(a, "a2alpha")?;
            if !(alpha > -1.0) {
                return Err(Error::InvalidParameter(format!("alpha must exceed -1, got {alpha}")));
            }
            Ok(Space::A2Alpha { alpha })
        }
        ["h2d", "bergman", a] => Ok(Space::H2d {
            d: WeightSequence::bergman(parse_f64(a, "h2d:bergman")?, len)?,
        }),
        ["h2d", "power", a] => Ok(Space::H2d {
            d: WeightSequence::power_law(parse_f64(a, "h2d:power")?, len)?,
        }),
        ["h2d", "ones"] => Ok(Space::H2d { d: WeightSequence::ones(len) }),
        _ => Err(Error::Parse(format!("unknown space '{text}'"))),
    }
}

/// `affine:a,b` (`b` real or `re,im`) or `id`.
pub fn parse_halfplane(text: &str) -> Result<HalfPlaneMap> {
    let t = text.trim();
    if t == "id" {
        return Ok(HalfPlaneMap::identity());
    }
    let body = t
        .strip_prefix("affine:")
        .ok_or_else(|| Error::Parse(format!("unknown half-plane map '{t}'")))?;
    let nums = body.split(',').map(|s| parse_f64(s, "affine")).collect::<Result<Vec<f64>>>()?;
    match nums.as_slice() {
        [a, b] => HalfPlaneMap::affine(*a, Complex64::new(*b, 0.0)),
        [a, br, bi] => HalfPlaneMap::affine(*a, Complex64::new(*br, *bi)),
        _ => Err(Error::Parse(format!("affine map needs 'a,b' or 'a,re,im', got '{body}'"))),
    }
}

/// `Kr,Ktheta`.
pub fn parse_pair(text: &str) -> Result<(usize, usize)> {
    let nums: Vec<&str> = text.split(',').collect();
    match nums.as_slice() {
        [a, b] => {
            let p = |s: &str| s.trim().parse::<usize>().map_err(|_| Error::Parse(format!("'{s}' is not a count")));
            Ok((p(a)?, p(b)?))
        }
        _ => Err(Error::Parse(format!("expected 'Kr,Ktheta', got '{text}'"))),
    }
}

fn cjson(c: Complex64) -> Value {
    json!([c.re, c.im])
}

fn series_json(s: &CoeffSeries) -> Value {
    Value::Array(s.coeffs().iter().map(|&c| cjson(c)).collect())
}

/// Structured description of a map, in the input format where one exists.
pub fn map_json(phi: &DiscMap) -> Value {
    match phi.kind() {
        MapKind::Moebius(m) => json!({"kind": "moebius", "num": [cjson(m.a), cjson(m.b)], "den": [cjson(m.c), cjson(m.d)]}),
        MapKind::Blaschke { zeros, phase } => json!({
            "kind": "blaschke",
            "zeros": zeros.iter().map(|&z| cjson(z)).collect::<Vec<_>>(),
            "phase": cjson(*phase),
        }),
        MapKind::Rotation(l) => json!({"kind": "rotation", "lambda": cjson(*l)}),
        MapKind::Monomial(n) => json!({"kind": "monomial", "n": n}),
        MapKind::Series(s) => json!({"kind": "series", "coeffs": series_json(s)}),
        MapKind::SingularInner { atom, mass } => json!({"kind": "singular_inner", "atom": cjson(*atom), "mass": mass}),
        MapKind::Callable(c) => json!({"kind": "callable", "label": c.label}),
        MapKind::Iterate { base, times } => json!({"kind": "iterate", "base": map_json(base), "times": times}),
        MapKind::Chain(maps) => json!({"kind": "chain", "maps": maps.iter().map(map_json).collect::<Vec<_>>()}),
    }
}

/// Structured description of a weight; series and rational weights round
/// trip through [`parse_weight`].
pub fn weight_json(w: &Weight) -> Value {
    match w {
        Weight::Series(s) => json!({"kind": "series", "coeffs": series_json(s)}),
        Weight::Rational(m) => json!({"kind": "rational", "num": [cjson(m.a), cjson(m.b)], "den": [cjson(m.c), cjson(m.d)]}),
        Weight::Map(phi) => json!({"kind": "map", "map": map_json(phi)}),
        Weight::Callable(c) => json!({"kind": "callable", "label": c.label}),
        Weight::InnerShift { map, theta, center, scale } => json!({
            "kind": "inner_shift",
            "map": map_json(map),
            "theta": theta.as_ref().map(map_json),
            "center": cjson(*center),
            "scale": scale,
        }),
        Weight::Product(ws) => json!({"kind": "product", "factors": ws.iter().map(weight_json).collect::<Vec<_>>()}),
        Weight::Scaled(c, w) => json!({"kind": "scaled", "factor": cjson(*c), "weight": weight_json(w)}),
        Weight::Composed { outer, inner } => json!({"kind": "composed", "outer": weight_json(outer), "inner": map_json(inner)}),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_specs() {
        let m = parse_map(r#"{"kind":"series","coeffs":[0,0.5]}"#).unwrap();
        assert!((m.eval(Complex64::new(0.4, 0.0)) - 0.2).norm() < 1e-16);
        let b = parse_map(r#"{"kind":"blaschke","zeros":[[0.5,0]]}"#).unwrap();
        assert_eq!(b.blaschke_degree(), Some(1));
        let h = parse_map(r#"{"kind":"moebius","num":[2,1],"den":[1,2]}"#).unwrap();
        assert!(h.is_automorphism());
        assert!(parse_map(r#"{"kind":"moebius","num":[2,0],"den":[0,1]}"#).is_err());
        assert!(parse_map(r#"{"kind":"rotation","angle":1}"#).is_ok());
        assert!(parse_map(r#"{"kind":"nope"}"#).is_err());
        assert!(parse_map(r#"{"kind":"psi","a":[0.5,0.1]}"#).unwrap().is_automorphism());
    }

    #[test]
    fn weight_specs_round_trip() {
        let w = parse_weight("[0.5, 0.5]").unwrap();
        assert!((w.eval(Complex64::new(1.0, 0.0)) - 1.0).norm() < 1e-16);
        let r = parse_weight(r#"{"kind":"rational","num":[0,2],"den":[1,3]}"#).unwrap();
        let back = parse_weight(&weight_json(&r).to_string()).unwrap();
        let z = Complex64::new(0.3, -0.2);
        assert_eq!(r.eval(z), back.eval(z));
        let k = parse_weight(r#"{"kind":"kernel","beta":[0.5,0]}"#).unwrap();
        assert!((k.eval(Complex64::new(0.0, 0.0)) - 0.75f64.sqrt()).norm() < 1e-15);
    }

    #[test]
    fn spaces_and_halfplane() {
        assert_eq!(parse_space("h2", 8).unwrap(), Space::H2);
        assert!(matches!(parse_space("a2alpha:1.5", 8).unwrap(), Space::A2Alpha { alpha } if alpha == 1.5));
        assert!(matches!(parse_space("h2d:power:-0.5", 8).unwrap(), Space::H2d { .. }));
        assert!(parse_space("l2", 8).is_err());
        let h = parse_halfplane("affine:2,0").unwrap();
        assert_eq!(h.ang_deriv_inf, 0.5);
        assert!(parse_halfplane("affine:-2,0").is_err());
        assert_eq!(parse_pair("48,128").unwrap(), (48, 128));
    }
}
