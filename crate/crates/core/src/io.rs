//! JSON inputs: curves, Hermitian forms, divisors and quadrature settings.

use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;
use serde_json::Value;

use crate::calculus::QuadratureSpec;
use crate::curve::{Curve, SurfacePoint};
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::metric::HermitianForm;

fn invalid(what: &str, e: impl std::fmt::Display) -> Error {
    Error::Invalid(format!("{what}: {e}"))
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| invalid(&path.display().to_string(), e))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveJson {
    #[serde(default)]
    roots: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    preset: Option<String>,
    #[serde(default)]
    tolerance: Option<f64>,
}

/// `{"roots": [[re, im], …]}` or `{"preset": "unity6"}`.
pub fn parse_curve(text: &str) -> Result<Curve> {
    let spec: CurveJson = serde_json::from_str(text).map_err(|e| invalid("curve", e))?;
    match (spec.roots, spec.preset) {
        (Some(roots), None) => {
            Curve::with_tolerance(roots.iter().map(|r| Complex64::new(r[0], r[1])).collect(), spec.tolerance)
        }
        (None, Some(name)) => Curve::preset(&name),
        _ => Err(invalid("curve", "exactly one of \"roots\" and \"preset\" is required")),
    }
}

fn complex(v: &Value, what: &str) -> Result<Complex64> {
    let pair: [f64; 2] = serde_json::from_value(v.clone()).map_err(|e| invalid(what, e))?;
    Ok(Complex64::new(pair[0], pair[1]))
}

/// `{"C": [[[re, im], …], …]}` or `{"C": "identity"}`.
pub fn parse_hermitian(text: &str, genus: usize) -> Result<HermitianForm> {
    let v: Value = serde_json::from_str(text).map_err(|e| invalid("hermitian", e))?;
    let c = v.get("C").ok_or_else(|| invalid("hermitian", "missing \"C\""))?;
    if c.as_str() == Some("identity") {
        return Ok(HermitianForm::identity(genus));
    }
    let rows = c.as_array().ok_or_else(|| invalid("hermitian", "\"C\" must be \"identity\" or a matrix"))?;
    let rows = rows
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| invalid("hermitian", "rows must be arrays"))?
                .iter()
                .map(|e| complex(e, "hermitian entry"))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let form = HermitianForm::from_rows(&rows)?;
    if form.dim() != genus {
        return Err(Error::DimensionMismatch { expected: genus, actual: form.dim() });
    }
    Ok(form)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PointJson {
    #[serde(default)]
    x: Option<[f64; 2]>,
    #[serde(default)]
    sheet: Option<String>,
    #[serde(default)]
    inf: Option<String>,
    #[serde(default = "one")]
    weight: i64,
}

fn one() -> i64 {
    1
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DivisorJson {
    points: Vec<PointJson>,
}

fn sign(s: Option<&str>, what: &str) -> Result<bool> {
    match s {
        Some("+") | None => Ok(true),
        Some("-") => Ok(false),
        Some(other) => Err(invalid(what, format!("expected \"+\" or \"-\", got {other:?}"))),
    }
}

/// `{"points": [{"x": [re, im], "sheet": "+", "weight": n}, {"inf": "+", "weight": n}]}`.
/// Sheet `"+"` is `y = +√f(x)` with the principal root.
pub fn parse_divisor(text: &str, curve: &Curve) -> Result<Divisor> {
    let spec: DivisorJson = serde_json::from_str(text).map_err(|e| invalid("divisor", e))?;
    let mut d = Divisor::zero();
    for p in spec.points {
        let point = match (p.x, p.inf.as_deref()) {
            (Some(x), None) => {
                let (plus, minus) = curve.lift_x(Complex64::new(x[0], x[1]));
                if sign(p.sheet.as_deref(), "sheet")? {
                    plus
                } else {
                    minus
                }
            }
            (None, Some(s)) => {
                if p.sheet.is_some() {
                    return Err(invalid("divisor", "\"sheet\" does not apply to a point at infinity"));
                }
                if sign(Some(s), "inf")? {
                    SurfacePoint::InfinityPlus
                } else {
                    SurfacePoint::InfinityMinus
                }
            }
            _ => return Err(invalid("divisor", "each point needs exactly one of \"x\" and \"inf\"")),
        };
        d.add_point(point, p.weight);
    }
    Ok(d)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QuadratureJson {
    #[serde(rename = "R")]
    r_far: Option<f64>,
    inner_nodes: Option<usize>,
    refine_depth: Option<usize>,
    eps0: Option<f64>,
}

/// `{"R": …, "inner_nodes": …, "refine_depth": …, "eps0": …}`; omitted
/// fields take the curve defaults.
pub fn parse_quadrature(text: &str, curve: &Curve) -> Result<QuadratureSpec> {
    let q: QuadratureJson = serde_json::from_str(text).map_err(|e| invalid("quadrature", e))?;
    let mut spec = QuadratureSpec::for_curve(curve);
    if let Some(r) = q.r_far {
        spec.r_far = r;
    }
    if let Some(n) = q.inner_nodes {
        spec.inner_nodes = n;
    }
    if let Some(d) = q.refine_depth {
        spec.refine_depth = d;
    }
    if let Some(e) = q.eps0 {
        spec.eps0 = e;
    }
    spec.validate(curve)?;
    Ok(spec)
}
