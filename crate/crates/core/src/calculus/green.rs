//! Bump test functions, ε-excised Green pairings and ε → 0 extrapolation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quad::{self, Disk, Excision, Integral, PlaneDensity, QuadratureSpec};
use crate::curve::{Curve, SurfacePoint};
use crate::error::{Error, Result};

/// Smooth radial bump `b(|x − center|/radius)` with
/// `b(t) = exp(1 − 1/(1 − t²))`, pulled back through `x`.
///
/// With `sheet = Some(anchor)` the bump lives on the sheet through `anchor`
/// only; this needs the disk to avoid every root.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub center: Complex64,
    pub radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sheet: Option<SurfacePoint>,
}

impl TestFunction {
    pub fn new(center: Complex64, radius: f64) -> Self {
        TestFunction { center, radius, sheet: None }
    }

    pub fn on_sheet(anchor: SurfacePoint, center: Complex64, radius: f64) -> Self {
        TestFunction { center, radius, sheet: Some(anchor) }
    }

    pub fn profile(t: f64) -> f64 {
        if t.abs() >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - t * t)).exp()
        }
    }

    pub fn value_x(&self, x: Complex64) -> f64 {
        Self::profile((x - self.center).norm() / self.radius)
    }

    /// Closed-form `∂²/∂x∂x̄` of [`Self::value_x`].
    pub fn ddbar_x(&self, x: Complex64) -> f64 {
        let t = (x - self.center).norm() / self.radius;
        if t >= 1.0 {
            return 0.0;
        }
        let q = 1.0 - t * t;
        let b = Self::profile(t);
        b / (self.radius * self.radius) * (t * t / q.powi(4) - 1.0 / (q * q) - 2.0 * t * t / q.powi(3))
    }

    /// Number of sheets the bump lives on.
    pub fn sheets(&self) -> f64 {
        if self.sheet.is_some() {
            1.0
        } else {
            2.0
        }
    }

    pub fn support(&self) -> Disk {
        Disk { center: self.center, radius: self.radius }
    }

    pub fn validate(&self, curve: &Curve) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::Invalid(format!("bump radius {} must be positive", self.radius)));
        }
        if self.center.norm() + self.radius >= curve.r_far() {
            return Err(Error::Invalid("bump support leaves the x-chart".into()));
        }
        if let Some(anchor) = &self.sheet {
            let xa = anchor
                .x()
                .ok_or_else(|| Error::Invalid("sheet anchor must be an affine point".into()))?;
            if !self.support().contains(xa) {
                return Err(Error::Invalid("sheet anchor must lie inside the bump support".into()));
            }
            if curve.roots().iter().any(|e| (e - self.center).norm() <= self.radius) {
                return Err(Error::Invalid("a sheet-local bump must avoid the branch points".into()));
            }
        }
        Ok(())
    }

    fn on_anchor_sheet(&self, curve: &Curve, x: Complex64, y: Complex64) -> bool {
        let Some(SurfacePoint::Affine { x: xa, y: ya }) = self.sheet else {
            return true;
        };
        let s = curve
            .roots()
            .iter()
            .fold(ya, |acc, e| acc * ((x - e) / (xa - e)).sqrt());
        (y - s).norm() <= (y + s).norm()
    }

    /// `φ(q)` on the curve.
    pub fn value(&self, curve: &Curve, q: &SurfacePoint) -> f64 {
        match *q {
            SurfacePoint::Affine { x, y } => {
                let v = self.value_x(x);
                if v == 0.0 || self.on_anchor_sheet(curve, x, y) {
                    v
                } else {
                    0.0
                }
            }
            _ => 0.0,
        }
    }
}

/// A log-type singularity of an [`XField`], located by its x-coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularCenter {
    pub x: Complex64,
    /// Branch-point singularities are excised with x-radius `ε²`, since
    /// `|ζ| ≤ ε` there.
    pub weierstrass: bool,
}

/// A real field on the curve that depends on `x` only.
pub trait XField: Sync {
    fn at_x(&self, x: Complex64) -> f64;

    fn singular_centers(&self) -> Vec<SingularCenter> {
        Vec::new()
    }
}

impl<F> XField for F
where
    F: Fn(Complex64) -> f64 + Sync,
{
    fn at_x(&self, x: Complex64) -> f64 {
        self(x)
    }
}

struct Integrand<'a, F: ?Sized> {
    field: &'a F,
    phi: &'a TestFunction,
    laplacian: bool,
}

impl<F: XField + ?Sized> PlaneDensity for Integrand<'_, F> {
    fn at_x(&self, x: Complex64) -> f64 {
        let weight = if self.laplacian { 4.0 * self.phi.ddbar_x(x) } else { self.phi.value_x(x) };
        if weight == 0.0 {
            0.0
        } else {
            weight * self.field.at_x(x)
        }
    }

    fn support(&self) -> Option<Disk> {
        Some(self.phi.support())
    }
}

fn pairing_spec<F: XField + ?Sized>(field: &F, phi: &TestFunction, eps: Option<f64>, spec: &QuadratureSpec) -> QuadratureSpec {
    let mut s = spec.clone();
    let support = phi.support();
    let centers = field.singular_centers();
    s.singular_centers = centers.iter().map(|c| c.x).collect();
    s.excisions = match eps {
        Some(eps) => centers
            .iter()
            .filter(|c| support.contains(c.x))
            .map(|c| Excision { center: c.x, radius: excision_radius(eps, c.weierstrass) })
            .collect(),
        None => Vec::new(),
    };
    s
}

fn excision_radius(eps: f64, weierstrass: bool) -> f64 {
    if weierstrass {
        eps * eps
    } else {
        eps
    }
}

/// `∫_{X ∖ ⋃ D_ε} u Δφ dν`, which reduces to
/// `sheets · ∫ u · 4∂∂̄φ dA` over the excised x-plane.
pub fn green_pairing<F: XField + ?Sized>(
    curve: &Curve,
    field: &F,
    phi: &TestFunction,
    eps: f64,
    spec: &QuadratureSpec,
) -> Result<Integral> {
    phi.validate(curve)?;
    if !(eps > 0.0 && eps < curve.r_branch()) {
        return Err(Error::BadExcision(format!("ε = {eps} must lie in (0, r_branch)")));
    }
    let s = pairing_spec(field, phi, Some(eps), spec);
    let plane = quad::integrate_plane(curve, &Integrand { field, phi, laplacian: true }, &s)?;
    Ok(scale(plane, phi.sheets()))
}

/// `∫_X h φ dν` for a ν-density `h·ρ` given as an x-field.
pub fn integrate_against<F: XField + ?Sized>(
    curve: &Curve,
    density_nu: &F,
    phi: &TestFunction,
    spec: &QuadratureSpec,
) -> Result<Integral> {
    phi.validate(curve)?;
    let s = pairing_spec(density_nu, phi, None, spec);
    let plane = quad::integrate_plane(curve, &Integrand { field: density_nu, phi, laplacian: false }, &s)?;
    Ok(scale(plane, phi.sheets()))
}

fn scale(i: Integral, s: f64) -> Integral {
    Integral { value: i.value * s, abs_value: i.abs_value * s, error: i.error * s }
}

/// Error model for the ε-dependence of an excised pairing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtrapolationModel {
    /// `v(ε) = L + a ε log ε + b ε`.
    EpsLogEps,
    /// `v(r) = L + a r² log r + b r²`, with `r` the x-radius of the
    /// excised disks.
    AreaExcision,
}

impl ExtrapolationModel {
    fn basis(self, e: f64) -> (f64, f64) {
        match self {
            ExtrapolationModel::EpsLogEps => (e * e.ln(), e),
            ExtrapolationModel::AreaExcision => (e * e * e.ln(), e * e),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extrapolated {
    pub limit: f64,
    pub error: f64,
}

fn solve3(m: [[f64; 3]; 3], rhs: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut out = [0.0; 3];
    for (col, slot) in out.iter_mut().enumerate() {
        let mut mc = m;
        for row in 0..3 {
            mc[row][col] = rhs[row];
        }
        *slot = det(mc) / d;
    }
    Some(out)
}

/// Fits `model` through three `(ε, value)` samples with decreasing `ε` and
/// returns the `ε → 0` limit.
pub fn extrapolate(samples: &[(f64, f64); 3], model: ExtrapolationModel) -> Result<Extrapolated> {
    let v = samples.map(|s| s.1);
    if samples.iter().any(|&(e, v)| !(e > 0.0) || !v.is_finite()) {
        return Err(Error::NonConvergent(format!("invalid samples {samples:?}")));
    }
    let (d1, d2) = (v[1] - v[0], v[2] - v[1]);
    let tiny = 1e-12 * (1.0 + v[2].abs());
    if d2.abs() > 1.5 * d1.abs() + tiny {
        return Err(Error::NonConvergent(format!("sequence {v:?} is not settling")));
    }
    if d1.abs() <= tiny && d2.abs() <= tiny {
        return Ok(Extrapolated { limit: v[2], error: d2.abs() });
    }
    let rows = samples.map(|(e, _)| {
        let (a, b) = model.basis(e);
        [1.0, a, b]
    });
    let fit = solve3(rows, v).ok_or_else(|| Error::NonConvergent("degenerate ε ladder".into()))?;
    // two-point fit on the leading term alone, as an error proxy
    let (g1, _) = model.basis(samples[1].0);
    let (g2, _) = model.basis(samples[2].0);
    let a = (v[2] - v[1]) / (g2 - g1);
    let two_point = v[2] - a * g2;
    Ok(Extrapolated { limit: fit[0], error: (fit[0] - two_point).abs() })
}

/// [`extrapolate`] under the `ε log ε` boundary model at `ε₀, ε₀/2, ε₀/4`.
pub fn extrapolate_pairing(eps0: f64, values: [f64; 3]) -> Result<Extrapolated> {
    let samples = [(eps0, values[0]), (eps0 / 2.0, values[1]), (eps0 / 4.0, values[2])];
    extrapolate(&samples, ExtrapolationModel::EpsLogEps)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairingLimit {
    pub limit: f64,
    pub error: f64,
    pub eps: [f64; 3],
    pub values: [f64; 3],
}

/// Largest ε₀ used for a bump of radius `r`, as a multiple of `r`.
pub const EPS_PER_BUMP_RADIUS: f64 = 1.0 / 16.0;

/// Green pairing at `ε₀, ε₀/2, ε₀/4`, extrapolated to `ε → 0`, where
/// `ε₀ = min(spec.eps0, radius/16)`.
pub fn pairing_limit<F: XField + ?Sized>(
    curve: &Curve,
    field: &F,
    phi: &TestFunction,
    spec: &QuadratureSpec,
) -> Result<PairingLimit> {
    let eps0 = spec.eps0.min(EPS_PER_BUMP_RADIUS * phi.radius);
    let eps = [eps0, eps0 / 2.0, eps0 / 4.0];
    let mut values = [0.0; 3];
    for (slot, &e) in values.iter_mut().zip(&eps) {
        *slot = green_pairing(curve, field, phi, e, spec)?.value;
    }
    let inside: Vec<bool> = field
        .singular_centers()
        .iter()
        .filter(|c| phi.support().contains(c.x))
        .map(|c| c.weierstrass)
        .collect();
    if inside.is_empty() {
        return Ok(PairingLimit { limit: values[2], error: (values[2] - values[1]).abs(), eps, values });
    }
    if inside.iter().any(|&w| w != inside[0]) {
        // branch-point remainders are O(ε⁴ log ε), below the model's order
        let samples = [(eps[0], values[0]), (eps[1], values[1]), (eps[2], values[2])];
        let e = extrapolate(&samples, ExtrapolationModel::AreaExcision)?;
        return Ok(PairingLimit { limit: e.limit, error: e.error, eps, values });
    }
    let r = eps.map(|e| excision_radius(e, inside[0]));
    let samples = [(r[0], values[0]), (r[1], values[1]), (r[2], values[2])];
    let e = extrapolate(&samples, ExtrapolationModel::AreaExcision)?;
    Ok(PairingLimit { limit: e.limit, error: e.error, eps, values })
}
