//! Mean field equation residuals and distributional certificates.
//!
//! Pointwise residuals use [`laplacian_fd`]; atomic content is measured with
//! ε-extrapolated Green pairings against bump functions.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calculus::{
    integrate_against, laplacian_fd, pairing_limit, QuadratureSpec, ScalarField, SingularCenter, TestFunction, XField,
};
use crate::curve::{ChartKind, ChartRef, Curve, SurfacePoint};
use crate::divisor::{self, Divisor, DistributionValue};
use crate::error::{Error, Result};
use crate::metric::{self, HermitianForm};

pub const SCHEMA_VERSION: u32 = 1;
/// Bound on pointwise residuals.
pub const RESIDUAL_TOL: f64 = 1e-4;
/// Relative bound on pairing discrepancies.
pub const ATOM_REL_TOL: f64 = 1e-2;
/// Absolute bound on the smooth part of a degree-0 pairing.
pub const DEGREE_ZERO_SMOOTH_TOL: f64 = 1e-3;
pub const SAMPLE_COUNT: usize = 20;
/// Sample points keep this x-distance from roots and divisor points.
pub const SAMPLE_CLEARANCE: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Equation {
    E3,
    Eqb,
    P2,
    Mfe3,
    Mfe4,
    Curvature,
    GaussBonnet,
    Effalg,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveDescriptor {
    pub genus: usize,
    pub roots: Vec<Complex64>,
}

impl CurveDescriptor {
    pub fn of(curve: &Curve) -> Self {
        CurveDescriptor { genus: curve.genus(), roots: curve.roots().to_vec() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleResidual {
    pub point: SurfacePoint,
    pub residual: f64,
}

/// One pairing: `measured = pairing − smooth` against the predicted atoms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomCheck {
    pub label: String,
    pub point: SurfacePoint,
    pub test_function: TestFunction,
    pub expected: f64,
    pub measured: f64,
    pub pairing: f64,
    pub smooth: f64,
    pub extrapolation_error: f64,
    pub discrepancy: f64,
    pub bound: f64,
    pub pass: bool,
}

/// A scalar comparison that is neither a residual nor an atom.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub relative: bool,
    pub pass: bool,
}

impl Check {
    pub fn absolute(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        let pass = (value - expected).abs() < tolerance;
        Check { name: name.into(), value, expected, tolerance, relative: false, pass }
    }

    pub fn relative(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        let pass = (value - expected).abs() < tolerance * expected.abs();
        Check { name: name.into(), value, expected, tolerance, relative: true, pass }
    }

    pub fn flag(name: impl Into<String>, pass: bool) -> Self {
        let v = if pass { 1.0 } else { 0.0 };
        Check { name: name.into(), value: v, expected: 1.0, tolerance: 0.0, relative: false, pass }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MfeReport {
    pub schema: u32,
    pub equation: Equation,
    pub curve: CurveDescriptor,
    pub hermitian: Vec<Vec<Complex64>>,
    pub samples: Vec<SampleResidual>,
    pub atoms: Vec<AtomCheck>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub pass: bool,
}

impl MfeReport {
    pub fn new(equation: Equation, curve: &Curve, c: &HermitianForm) -> Self {
        MfeReport {
            schema: SCHEMA_VERSION,
            equation,
            curve: CurveDescriptor::of(curve),
            hermitian: c.rows(),
            samples: Vec::new(),
            atoms: Vec::new(),
            checks: Vec::new(),
            tolerances: BTreeMap::new(),
            error: None,
            pass: false,
        }
    }

    /// Recomputes `pass` from the recorded entries.
    pub fn finish(mut self) -> Self {
        let residual_tol = self.tolerances.get("residual").copied().unwrap_or(RESIDUAL_TOL);
        self.pass = self.error.is_none()
            && self.samples.iter().all(|s| s.residual.abs() < residual_tol)
            && self.atoms.iter().all(|a| a.pass)
            && self.checks.iter().all(|c| c.pass);
        self
    }
}

/// `u = log(−K)`, singular at the Weierstrass points.
pub struct LogNegK<'a> {
    pub curve: &'a Curve,
    pub form: &'a HermitianForm,
}

impl ScalarField for LogNegK<'_> {
    fn value(&self, p: &SurfacePoint) -> Result<f64> {
        metric::u_log_neg_k(self.curve, self.form, p)
    }

    fn singular_points(&self) -> Vec<SurfacePoint> {
        self.curve.weierstrass_points()
    }
}

/// `u_D = log F_D` as a field on the curve.
pub struct UDivisor<'a> {
    pub curve: &'a Curve,
    pub divisor: Divisor,
}

impl ScalarField for UDivisor<'_> {
    fn value(&self, p: &SurfacePoint) -> Result<f64> {
        divisor::u_divisor(self.curve, &self.divisor, p)
    }

    fn singular_points(&self) -> Vec<SurfacePoint> {
        self.divisor.alpha().support()
    }
}

impl XField for UDivisor<'_> {
    fn at_x(&self, x: Complex64) -> f64 {
        self.divisor
            .entries()
            .map(|(p, n)| n as f64 * divisor::f_point_at_x(self.curve, &p, Some(x)).ln())
            .sum()
    }

    fn singular_centers(&self) -> Vec<SingularCenter> {
        singular_centers_of(self.curve, &self.divisor)
    }
}

fn singular_centers_of(curve: &Curve, d: &Divisor) -> Vec<SingularCenter> {
    let mut out: Vec<SingularCenter> = Vec::new();
    for p in d.support() {
        if let Some(x) = p.x() {
            if !out.iter().any(|c| (c.x - x).norm() < divisor::POINT_QUANTUM) {
                out.push(SingularCenter { x, weierstrass: curve.is_weierstrass(&p) });
            }
        }
    }
    out
}

/// An x-density with declared centers that need a polar patch.
pub struct Centered<F> {
    pub density: F,
    pub centers: Vec<SingularCenter>,
}

impl<F: Fn(Complex64) -> f64 + Sync> XField for Centered<F> {
    fn at_x(&self, x: Complex64) -> f64 {
        (self.density)(x)
    }

    fn singular_centers(&self) -> Vec<SingularCenter> {
        self.centers.clone()
    }
}

fn x_chart(x: Complex64) -> ChartRef {
    ChartRef { kind: ChartKind::X, coord: x }
}

/// `K·ρ = −2 S(𝔣)/⟨𝔣,𝔣⟩²` at `x`.
pub fn k_rho(curve: &Curve, c: &HermitianForm, x: Complex64) -> f64 {
    let chart = x_chart(x);
    let v = metric::moment_vector(curve, &chart);
    let dv = metric::moment_derivative(curve, &chart);
    let n = c.norm_sq(&v);
    -2.0 * metric::s_form(c, &v, &dv) / (n * n)
}

/// `F_W·ρ = ⟨𝔣,𝔣⟩ / (σ_g(|x|²)(1 + |x|²)²)` at `x`.
pub fn f_w_rho(curve: &Curve, c: &HermitianForm, x: Complex64) -> f64 {
    let t = x.norm_sqr();
    c.norm_sq(&metric::moment_vector(curve, &x_chart(x))) / (metric::sigma(curve.genus(), t) * (1.0 + t).powi(2))
}

/// `ρ` in the x-chart.
pub fn rho_x(curve: &Curve, c: &HermitianForm, x: Complex64) -> f64 {
    c.norm_sq(&metric::moment_vector(curve, &x_chart(x))) / curve.f(x).norm()
}

fn require_genus(curve: &Curve, g: usize) -> Result<()> {
    if curve.genus() != g {
        return Err(Error::WrongGenus { expected: g, actual: curve.genus() });
    }
    Ok(())
}

fn check_dim(curve: &Curve, c: &HermitianForm) -> Result<()> {
    if c.dim() != curve.genus() {
        return Err(Error::DimensionMismatch { expected: curve.genus(), actual: c.dim() });
    }
    Ok(())
}

/// `Δu + 6eᵘ` for `u = log(−K)` on a genus-2 curve.
pub fn residual_e3(curve: &Curve, c: &HermitianForm, p: &SurfacePoint) -> Result<f64> {
    require_genus(curve, 2)?;
    check_dim(curve, c)?;
    let u = LogNegK { curve, form: c };
    let lap = laplacian_fd(curve, c, &u, p)?;
    let k = metric::curvature(curve, c, p)?;
    Ok(lap - 6.0 * k)
}

fn check_mfe_divisor(curve: &Curve, d: &Divisor) -> Result<()> {
    if !d.is_effective() {
        return Err(Error::NotEffective);
    }
    if d.hits_weierstrass(curve) {
        return Err(Error::DivisorHitsWeierstrass);
    }
    Ok(())
}

/// `Δv + 4ρ(D) F_D eᵛ − ρ(D) K` for `v = u_{W−D}`.
pub fn residual_mfe3(curve: &Curve, c: &HermitianForm, d: &Divisor, p: &SurfacePoint) -> Result<f64> {
    check_dim(curve, c)?;
    check_mfe_divisor(curve, d)?;
    let rho_d = divisor::rho_of_d(curve, d);
    let rho_d = *rho_d.numer() as f64 / *rho_d.denom() as f64;
    let v = UDivisor { curve, divisor: Divisor::weierstrass(curve) - d.clone() };
    let lap = laplacian_fd(curve, c, &v, p)?;
    let f_d = divisor::f_divisor(curve, d, p)?;
    let k = metric::curvature(curve, c, p)?;
    Ok(lap + 4.0 * rho_d * f_d * v.value(p)?.exp() - rho_d * k)
}

/// `Δv + 2 deg(W−D) F_D eᵛ` for `v = u_{W−D}` on a genus-2 curve.
pub fn residual_mfe4(curve: &Curve, c: &HermitianForm, d: &Divisor, p: &SurfacePoint) -> Result<f64> {
    require_genus(curve, 2)?;
    check_dim(curve, c)?;
    check_mfe_divisor(curve, d)?;
    let w_minus_d = Divisor::weierstrass(curve) - d.clone();
    let deg = w_minus_d.degree() as f64;
    let v = UDivisor { curve, divisor: w_minus_d };
    let lap = laplacian_fd(curve, c, &v, p)?;
    let f_d = divisor::f_divisor(curve, d, p)?;
    Ok(lap + 2.0 * deg * f_d * v.value(p)?.exp())
}

/// Bumps used by the certificates, with a label and the point they probe.
#[derive(Clone, Debug, PartialEq)]
pub struct Probe {
    pub label: String,
    pub point: SurfacePoint,
    pub phi: TestFunction,
}

/// Distance from `x` to the roots, `others` and the chart edge, ignoring
/// `x` itself when `skip_self`.
fn clearance(curve: &Curve, x: Complex64, others: &[Complex64], skip_self: bool) -> f64 {
    let to_points = curve
        .roots()
        .iter()
        .chain(others)
        .map(|e| (x - e).norm())
        .filter(|&d| !skip_self || d > divisor::POINT_QUANTUM)
        .fold(f64::INFINITY, f64::min);
    to_points.min(curve.r_far() - x.norm())
}

/// Default probes for the points of `supp α(D)`: a sheet-local bump at
/// each of `P` and `ι(P)` for ordinary points, one bump at each
/// Weierstrass point, and a control bump away from everything. Radii are
/// half the distance to the nearest other special point or the chart
/// edge.
pub fn default_probes(curve: &Curve, points: &[SurfacePoint]) -> Vec<Probe> {
    let xs: Vec<Complex64> = points.iter().filter_map(|p| p.x()).collect();
    let mut probes = Vec::new();
    let mut seen: Vec<divisor::PointKey> = Vec::new();
    for p in points {
        let Some(x) = p.x() else { continue };
        let key = divisor::PointKey::of(&divisor::canonical_point(p), divisor::POINT_QUANTUM);
        if seen.contains(&key) {
            continue;
        }
        seen.push(key);
        let radius = 0.5 * clearance(curve, x, &xs, true);
        if curve.is_weierstrass(p) {
            let k = curve.weierstrass_index(p).expect("weierstrass");
            let w = curve.weierstrass_points()[k];
            probes.push(Probe { label: format!("W{k}"), point: w, phi: TestFunction::new(curve.roots()[k], radius) });
        } else {
            let (a, b) = (divisor::canonical_point(p), divisor::canonical_point(p).involution());
            let n = probes.len();
            probes.push(Probe { label: format!("P{n}"), point: a, phi: TestFunction::on_sheet(a, x, radius) });
            probes.push(Probe { label: format!("iota(P{n})"), point: b, phi: TestFunction::on_sheet(b, x, radius) });
        }
    }
    let control = control_center(curve, &xs);
    let radius = 0.5 * clearance(curve, control, &xs, false);
    let point = curve.lift_x(control).0;
    probes.push(Probe { label: "control".into(), point, phi: TestFunction::new(control, radius) });
    probes
}

/// The grid point of `|x| ≤ r_far/2` farthest from the roots and `avoid`.
pub fn control_center(curve: &Curve, avoid: &[Complex64]) -> Complex64 {
    let half = 0.5 * curve.r_far();
    let n = 24;
    let mut best = (Complex64::new(0.0, 0.0), f64::NEG_INFINITY);
    for i in 0..=n {
        for j in 0..=n {
            let x = Complex64::new(-half + 2.0 * half * i as f64 / n as f64, -half + 2.0 * half * j as f64 / n as f64);
            if x.norm() > half {
                continue;
            }
            let d = clearance(curve, x, avoid, false);
            if d > best.1 + 1e-12 {
                best = (x, d);
            }
        }
    }
    best.0
}

/// Pairs `field` against each probe and compares
/// `pairing − ∫ smooth·φ dν` with `atoms(φ)`.
///
/// `bound(prediction)` gives the allowed discrepancy.
pub fn certify_pairings<F, S>(
    curve: &Curve,
    field: &F,
    smooth_nu: Option<&S>,
    atoms: &DistributionValue,
    probes: &[Probe],
    spec: &QuadratureSpec,
    bound: impl Fn(f64) -> f64 + Sync,
) -> Result<Vec<AtomCheck>>
where
    F: XField + ?Sized,
    S: XField + ?Sized,
{
    probes
        .par_iter()
        .map(|probe| {
            let phi = &probe.phi;
            let lim = pairing_limit(curve, field, phi, spec)?;
            let smooth = match smooth_nu {
                Some(s) => integrate_against(curve, s, phi, spec)?.value,
                None => 0.0,
            };
            let expected = atoms.atomic_part(|q| phi.value(curve, q));
            let measured = lim.limit - smooth;
            let discrepancy = (measured - expected).abs();
            let bound = bound(smooth + expected);
            Ok(AtomCheck {
                label: probe.label.clone(),
                point: probe.point,
                test_function: *phi,
                expected,
                measured,
                pairing: lim.limit,
                smooth,
                extrapolation_error: lim.error,
                discrepancy,
                bound,
                pass: discrepancy <= bound,
            })
        })
        .collect()
}

/// Relative bound `ATOM_REL_TOL·max(|prediction|, 2π)`: a pairing whose
/// prediction is small is held to one percent of a unit atom.
pub fn relative_bound(prediction: f64) -> f64 {
    ATOM_REL_TOL * prediction.abs().max(2.0 * PI)
}

fn with_pairing_tolerances(mut report: MfeReport, spec: &QuadratureSpec) -> MfeReport {
    report.tolerances.insert("atom_relative".into(), ATOM_REL_TOL);
    report.tolerances.insert("eps0".into(), spec.eps0);
    report
}

fn smooth_density<'a>(
    curve: &'a Curve,
    c: &'a HermitianForm,
    scale: f64,
) -> Centered<impl Fn(Complex64) -> f64 + Sync + 'a> {
    Centered {
        density: move |x: Complex64| scale * (k_rho(curve, c, x) - 4.0 * f_w_rho(curve, c, x)),
        centers: Vec::new(),
    }
}

/// `Δu_P = K/(g+1) − 4F_W/(g+1) + 2π(δ_P + δ_{ι(P)})` in weak form.
pub fn certify_eqb(
    curve: &Curve,
    c: &HermitianForm,
    p: &SurfacePoint,
    probes: &[Probe],
    spec: &QuadratureSpec,
) -> Result<MfeReport> {
    check_dim(curve, c)?;
    let d = Divisor::point(*p);
    let field = UDivisor { curve, divisor: d.clone() };
    let smooth = smooth_density(curve, c, 1.0 / (curve.genus() + 1) as f64);
    let atoms = DistributionValue::dirac(&d.alpha(), 2.0 * PI);
    let mut report = with_pairing_tolerances(MfeReport::new(Equation::Eqb, curve, c), spec);
    report.atoms = certify_pairings(curve, &field, Some(&smooth), &atoms, probes, spec, relative_bound)?;
    Ok(report.finish())
}

/// `Δu_D = deg D·(K − 4F_W)/(g+1) + 2π δ_{α(D)}` in weak form; for
/// `deg D = 0` the smooth part must vanish to [`DEGREE_ZERO_SMOOTH_TOL`].
pub fn certify_p2(
    curve: &Curve,
    c: &HermitianForm,
    d: &Divisor,
    probes: &[Probe],
    spec: &QuadratureSpec,
) -> Result<MfeReport> {
    check_dim(curve, c)?;
    let field = UDivisor { curve, divisor: d.clone() };
    let atoms = DistributionValue::dirac(&d.alpha(), 2.0 * PI);
    let mut report = with_pairing_tolerances(MfeReport::new(Equation::P2, curve, c), spec);
    if d.degree() == 0 {
        report.tolerances.insert("degree_zero_smooth".into(), DEGREE_ZERO_SMOOTH_TOL);
        let none: Option<&Centered<fn(Complex64) -> f64>> = None;
        report.atoms =
            certify_pairings(curve, &field, none, &atoms, probes, spec, |_| DEGREE_ZERO_SMOOTH_TOL)?;
    } else {
        let smooth = smooth_density(curve, c, d.degree() as f64 / (curve.genus() + 1) as f64);
        report.atoms = certify_pairings(curve, &field, Some(&smooth), &atoms, probes, spec, relative_bound)?;
    }
    Ok(report.finish())
}

/// Weak form of `Δv + 2 deg(W−D) F_D eᵛ = 2π δ_{α(W−D)}` with
/// `v = u_{W−D}` on a genus-2 curve.
pub fn certify_thmeff(
    curve: &Curve,
    c: &HermitianForm,
    d: &Divisor,
    probes: &[Probe],
    spec: &QuadratureSpec,
) -> Result<MfeReport> {
    require_genus(curve, 2)?;
    check_dim(curve, c)?;
    check_mfe_divisor(curve, d)?;
    let w_minus_d = Divisor::weierstrass(curve) - d.clone();
    let field = UDivisor { curve, divisor: w_minus_d.clone() };
    let deg = w_minus_d.degree() as f64;
    let centers = singular_centers_of(curve, &w_minus_d);
    let smooth = Centered {
        density: |x: Complex64| {
            let q = Some(x);
            let f_d: f64 = d.entries().map(|(p, n)| divisor::f_point_at_x(curve, &p, q).powi(n as i32)).product();
            -2.0 * deg * f_d * field.at_x(x).exp() * rho_x(curve, c, x)
        },
        centers,
    };
    let atoms = DistributionValue::dirac(&w_minus_d.alpha(), 2.0 * PI);
    let mut report = with_pairing_tolerances(MfeReport::new(Equation::Mfe4, curve, c), spec);
    report.atoms = certify_pairings(curve, &field, Some(&smooth), &atoms, probes, spec, relative_bound)?;
    Ok(report.finish())
}

fn root_seed(curve: &Curve) -> u64 {
    curve.roots().iter().fold(0x243F_6A88_85A3_08D3u64, |h, e| {
        let h = (h ^ e.re.to_bits()).wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(29);
        (h ^ e.im.to_bits()).wrapping_mul(0xBF58_476D_1CE4_E5B9).rotate_left(31)
    })
}

/// `count` quasi-random points with `|x| < r_far`, alternating sheets,
/// at least [`SAMPLE_CLEARANCE`] from the roots and from `avoid`.
/// Deterministic in the roots and `seed`.
pub fn sample_points(curve: &Curve, count: usize, avoid: &[Complex64], seed: u64) -> Vec<SurfacePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(root_seed(curve) ^ seed);
    let offset: (f64, f64) = (rng.gen(), rng.gen());
    const A1: f64 = 0.754_877_666_246_692_7;
    const A2: f64 = 0.569_840_290_998_053_2;
    let radius = curve.r_far();
    let mut out = Vec::with_capacity(count);
    let mut n = 0u64;
    while out.len() < count && n < 100_000 {
        n += 1;
        let u1 = (offset.0 + n as f64 * A1).fract();
        let u2 = (offset.1 + n as f64 * A2).fract();
        let x = Complex64::from_polar(radius * u1.sqrt(), 2.0 * PI * u2);
        let near = curve.roots().iter().chain(avoid).any(|e| (x - e).norm() < SAMPLE_CLEARANCE);
        if near || x.norm() >= radius {
            continue;
        }
        let (a, b) = curve.lift_x(x);
        out.push(if out.len() % 2 == 0 { a } else { b });
    }
    out
}

/// Residuals at the default sample points, in sample order.
pub fn sample_residuals<R>(
    curve: &Curve,
    avoid: &[Complex64],
    seed: u64,
    residual: R,
) -> Result<Vec<SampleResidual>>
where
    R: Fn(&SurfacePoint) -> Result<f64> + Sync,
{
    sample_points(curve, SAMPLE_COUNT, avoid, seed)
        .par_iter()
        .map(|p| Ok(SampleResidual { point: *p, residual: residual(p)? }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn e3_residual_at_origin() {
        let curve = Curve::preset("unity6").unwrap();
        let id = HermitianForm::identity(2);
        let p = curve.lift_x(c(0., 0.)).0;
        assert!(residual_e3(&curve, &id, &p).unwrap().abs() < 1e-4);
    }

    #[test]
    fn e3_residual_random_form() {
        let curve = Curve::preset("unity6").unwrap();
        let form = HermitianForm::random(2, &mut ChaCha8Rng::seed_from_u64(7));
        for p in sample_points(&curve, 5, &[], 3) {
            assert!(residual_e3(&curve, &form, &p).unwrap().abs() < 1e-4);
        }
    }

    #[test]
    fn e3_requires_genus_two() {
        let curve = Curve::preset("unity8").unwrap();
        let id = HermitianForm::identity(3);
        let p = curve.lift_x(c(0.1, 0.1)).0;
        assert_eq!(residual_e3(&curve, &id, &p), Err(Error::WrongGenus { expected: 2, actual: 3 }));
    }

    #[test]
    fn mfe3_residual_genus_two_and_three() {
        let curve = Curve::preset("unity6").unwrap();
        let id = HermitianForm::identity(2);
        let q = curve.point(c(0., 0.), c(0., 1.)).unwrap();
        let d = Divisor::point(q);
        for p in sample_points(&curve, 4, &[c(0., 0.)], 0) {
            assert!(residual_mfe3(&curve, &id, &d, &p).unwrap().abs() < 1e-4);
        }
        let octic = Curve::preset("unity8").unwrap();
        let id3 = HermitianForm::identity(3);
        let q = octic.lift_x(c(0.2, 0.3)).0;
        let p = octic.lift_x(c(-0.4, 0.5)).1;
        assert!(residual_mfe3(&octic, &id3, &Divisor::point(q), &p).unwrap().abs() < 1e-4);
    }

    #[test]
    fn mfe3_guards() {
        let curve = Curve::preset("unity6").unwrap();
        let id = HermitianForm::identity(2);
        let p = curve.lift_x(c(0.3, 0.3)).0;
        let w = curve.point(c(1., 0.), c(0., 0.)).unwrap();
        assert_eq!(residual_mfe3(&curve, &id, &Divisor::point(w), &p), Err(Error::DivisorHitsWeierstrass));
        let q = curve.lift_x(c(0.1, 0.0)).0;
        assert_eq!(residual_mfe3(&curve, &id, &Divisor::point(q).negate(), &p), Err(Error::NotEffective));
    }

    #[test]
    fn samples_are_deterministic_and_clear() {
        let curve = Curve::preset("unity6").unwrap();
        let a = sample_points(&curve, SAMPLE_COUNT, &[c(0., 0.)], 0);
        assert_eq!(a, sample_points(&curve, SAMPLE_COUNT, &[c(0., 0.)], 0));
        assert_eq!(a.len(), SAMPLE_COUNT);
        for p in &a {
            let x = p.x().unwrap();
            assert!(x.norm() >= SAMPLE_CLEARANCE);
            assert!(curve.roots().iter().all(|e| (x - e).norm() >= SAMPLE_CLEARANCE));
        }
        assert_ne!(a, sample_points(&curve, SAMPLE_COUNT, &[c(0., 0.)], 1));
    }

    #[test]
    fn thmeff_coefficient() {
        let curve = Curve::preset("unity6").unwrap();
        let q = curve.lift_x(c(0.2, 0.3)).0;
        let d = Divisor::from_points([(q, 2)]);
        let w_minus_d = Divisor::weierstrass(&curve) - d.clone();
        assert_eq!(2 * w_minus_d.degree(), 2 * (6 - d.degree()));
    }
}
