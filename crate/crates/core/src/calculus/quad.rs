//! Quadrature over the x-plane and over the curve as a two-sheeted cover.
//!
//! The plane is split by a smooth partition of unity:
//!
//! * a polar patch around every special center (roots of `f`, declared
//!   singular points, excised disks), integrated in `(r, θ)` with
//!   geometrically graded Gauss–Legendre panels in `r` and the trapezoid
//!   rule in `θ`;
//! * a far patch `|x| ≥ R`, integrated in `z = 1/x` the same way;
//! * the smooth remainder on a bounding box, integrated by adaptive tensor
//!   Gauss–Legendre cubature.
//!
//! Every integral is computed at two refinement levels; the levels must
//! agree to [`CONVERGENCE_RTOL`] relative to `∫|h|`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::metric::{self, HermitianForm};

/// Two refinement levels must agree to this relative tolerance.
pub const CONVERGENCE_RTOL: f64 = 1e-4;

const CENTER_MERGE: f64 = 1e-12;
const BASE_GRID: usize = 16;
const MAX_CELL_DEPTH: usize = 12;
const RAMP_PANELS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Complex64,
    pub radius: f64,
}

impl Disk {
    pub fn contains(&self, x: Complex64) -> bool {
        (x - self.center).norm() < self.radius
    }
}

/// A disk `|x − center| ≤ radius` removed from the domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Excision {
    pub center: Complex64,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Far-field cutoff `R`; the region `|x| > R` is handled in `z = 1/x`.
    #[serde(rename = "R")]
    pub r_far: f64,
    /// Angular node count of the polar patches at the coarse level.
    pub inner_nodes: usize,
    /// Number of geometric radial panels towards each patch center.
    pub refine_depth: usize,
    /// Default initial excision radius for Green pairings.
    pub eps0: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub excisions: Vec<Excision>,
    /// Extra points that get a polar patch without being excised.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub singular_centers: Vec<Complex64>,
}

impl QuadratureSpec {
    /// Defaults derived from the curve: `R = r_far`, `ε₀ = r_branch / 8`.
    pub fn for_curve(curve: &Curve) -> Self {
        QuadratureSpec {
            r_far: curve.r_far(),
            inner_nodes: 64,
            refine_depth: 24,
            eps0: curve.r_branch() / 8.0,
            excisions: Vec::new(),
            singular_centers: Vec::new(),
        }
    }

    pub fn validate(&self, curve: &Curve) -> Result<()> {
        let max_root = curve.roots().iter().map(|e| e.norm()).fold(0.0, f64::max);
        if !(self.r_far > max_root) {
            return Err(Error::Invalid(format!("R = {} must exceed max|e_k| = {max_root}", self.r_far)));
        }
        if self.inner_nodes < 8 || self.refine_depth == 0 {
            return Err(Error::Invalid("inner_nodes must be >= 8 and refine_depth >= 1".into()));
        }
        if !(self.eps0 > 0.0 && self.eps0 < curve.r_branch()) {
            return Err(Error::Invalid(format!("eps0 must lie in (0, r_branch = {})", curve.r_branch())));
        }
        Ok(())
    }
}

/// Result of a plane or surface integral.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: f64,
    /// `∫|h|` at the fine level, the scale for relative errors.
    pub abs_value: f64,
    /// Difference between the two refinement levels.
    pub error: f64,
}

impl Integral {
    fn scaled(self, s: f64) -> Self {
        Integral { value: self.value * s, abs_value: self.abs_value * s.abs(), error: self.error * s.abs() }
    }
}

/// A real density on the x-plane (per sheet).
pub trait PlaneDensity: Sync {
    fn at_x(&self, x: Complex64) -> f64;

    /// The density pulled back to `z = 1/x`, including `|dx/dz|² = |z|⁻⁴`.
    fn at_z(&self, z: Complex64) -> f64 {
        self.at_x(z.inv()) / z.norm_sqr().powi(2)
    }

    /// A disk outside of which the density vanishes.
    fn support(&self) -> Option<Disk> {
        None
    }
}

impl<F> PlaneDensity for F
where
    F: Fn(Complex64) -> f64 + Sync,
{
    fn at_x(&self, x: Complex64) -> f64 {
        self(x)
    }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    (nodes, weights)
}

/// Smooth cutoff: 1 on `t ≤ ½`, 0 on `t ≥ 1`.
fn cutoff(t: f64) -> f64 {
    if t <= 0.5 {
        return 1.0;
    }
    if t >= 1.0 {
        return 0.0;
    }
    let s = 2.0 * t - 1.0;
    let psi = |u: f64| (-1.0 / u).exp();
    let a = psi(1.0 - s);
    a / (a + psi(s))
}

#[derive(Clone, Copy, Debug)]
struct Center {
    x: Complex64,
    eps: f64,
    patch: f64,
}

struct Layout {
    centers: Vec<Center>,
    support: Option<Disk>,
    r_eff: f64,
}

impl Layout {
    fn weight_centers(&self, x: Complex64) -> f64 {
        self.centers.iter().map(|c| cutoff((x - c.x).norm() / c.patch)).sum()
    }

    fn far_weight(&self, x: Complex64) -> f64 {
        if self.support.is_some() {
            0.0
        } else {
            1.0 - cutoff(x.norm() / (2.0 * self.r_eff))
        }
    }
}

fn layout(curve: &Curve, spec: &QuadratureSpec, support: Option<Disk>) -> Result<Layout> {
    let mut raw: Vec<(Complex64, f64)> = curve.roots().iter().map(|&e| (e, 0.0)).collect();
    raw.extend(spec.singular_centers.iter().map(|&c| (c, 0.0)));
    for ex in &spec.excisions {
        if !(ex.radius > 0.0) || !ex.radius.is_finite() {
            return Err(Error::BadExcision(format!("radius {} at {}", ex.radius, ex.center)));
        }
        raw.push((ex.center, ex.radius));
    }
    let mut merged: Vec<(Complex64, f64)> = Vec::new();
    for (x, eps) in raw {
        match merged.iter_mut().find(|(y, _)| (x - *y).norm() <= CENTER_MERGE) {
            Some(entry) => entry.1 = entry.1.max(eps),
            None => merged.push((x, eps)),
        }
    }
    for (i, a) in spec.excisions.iter().enumerate() {
        for b in &spec.excisions[i + 1..] {
            let d = (a.center - b.center).norm();
            if d > CENTER_MERGE && d <= a.radius + b.radius {
                return Err(Error::BadExcision(format!("disks at {} and {} overlap", a.center, b.center)));
            }
        }
    }
    if let Some(s) = support {
        merged.retain(|(x, _)| s.contains(*x));
    }
    let mut centers = Vec::with_capacity(merged.len());
    for (i, &(x, eps)) in merged.iter().enumerate() {
        let nearest = merged
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, (y, _))| (x - y).norm())
            .fold(f64::INFINITY, f64::min);
        // off-center patches stay clear of the support edge
        let cap = match support {
            Some(s) if (x - s.center).norm() <= CENTER_MERGE => s.radius,
            Some(s) => (0.5 * (s.radius - (x - s.center).norm())).max(2.0 * eps),
            None => 0.5 * spec.r_far,
        };
        let patch = (0.5 * nearest).min(cap);
        if eps > 0.5 * patch {
            return Err(Error::BadExcision(format!(
                "radius {eps} at {x} exceeds half the patch radius {patch}"
            )));
        }
        centers.push(Center { x, eps, patch });
    }
    let r_eff = centers.iter().map(|c| c.x.norm() + c.patch).fold(spec.r_far, f64::max);
    Ok(Layout { centers, support, r_eff })
}

struct Rules {
    radial: (Vec<f64>, Vec<f64>),
    cell: (Vec<f64>, Vec<f64>),
    angular: usize,
    depth: usize,
    cell_rtol: f64,
}

impl Rules {
    fn level(spec: &QuadratureSpec, level: usize) -> Self {
        Rules {
            radial: gauss_legendre(8 * level),
            cell: gauss_legendre(4 + 2 * level),
            angular: spec.inner_nodes * level,
            depth: spec.refine_depth,
            cell_rtol: 1e-9 * 0.01f64.powi(level as i32 - 1),
        }
    }
}

#[derive(Clone, Copy, Default)]
struct Acc {
    value: f64,
    abs: f64,
}

impl std::ops::Add for Acc {
    type Output = Acc;
    fn add(self, o: Acc) -> Acc {
        Acc { value: self.value + o.value, abs: self.abs + o.abs }
    }
}

fn check(v: f64, at: Complex64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonConvergent(format!("non-finite integrand at {at}")))
    }
}

/// `∫_{inner ≤ |w − center| ≤ outer} h(w) dA` in polar coordinates.
fn polar<H>(center: Complex64, inner: f64, outer: f64, rules: &Rules, h: H) -> Result<Acc>
where
    H: Fn(Complex64) -> f64,
{
    let mut bounds: Vec<f64> = (0..=rules.depth)
        .rev()
        .map(|m| outer * 0.5f64.powi(m as i32))
        .filter(|&b| b > inner * (1.0 + 1e-12))
        .collect();
    bounds.insert(0, inner);
    // the cutoff ramp lives on the outermost octave
    let n = bounds.len();
    if n >= 2 {
        let a = bounds[n - 2];
        let b = bounds[n - 1];
        bounds.pop();
        bounds.extend((1..=RAMP_PANELS).map(|i| a + (b - a) * i as f64 / RAMP_PANELS as f64));
    }
    let (nodes, weights) = &rules.radial;
    let dtheta = 2.0 * PI / rules.angular as f64;
    let mut acc = Acc::default();
    for pair in bounds.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let half = 0.5 * (b - a);
        for (t, w) in nodes.iter().zip(weights) {
            let r = a + half * (t + 1.0);
            let mut ring = Acc::default();
            for m in 0..rules.angular {
                let at = center + Complex64::from_polar(r, dtheta * m as f64);
                let v = check(h(at), at)?;
                ring.value += v;
                ring.abs += v.abs();
            }
            let scale = w * half * r * dtheta;
            acc.value += ring.value * scale;
            acc.abs += ring.abs * scale;
        }
    }
    Ok(acc)
}

fn cell_rule<H>(h: &H, x0: f64, x1: f64, y0: f64, y1: f64, rule: &(Vec<f64>, Vec<f64>)) -> Result<Acc>
where
    H: Fn(Complex64) -> f64,
{
    let (nodes, weights) = rule;
    let (hx, hy) = (0.5 * (x1 - x0), 0.5 * (y1 - y0));
    let mut acc = Acc::default();
    for (s, ws) in nodes.iter().zip(weights) {
        for (t, wt) in nodes.iter().zip(weights) {
            let at = Complex64::new(x0 + hx * (s + 1.0), y0 + hy * (t + 1.0));
            let v = check(h(at), at)?;
            let w = ws * wt * hx * hy;
            acc.value += v * w;
            acc.abs += v.abs() * w;
        }
    }
    Ok(acc)
}

fn adaptive_cell<H>(
    h: &H,
    (x0, x1, y0, y1): (f64, f64, f64, f64),
    whole: Acc,
    tol: f64,
    depth: usize,
    rule: &(Vec<f64>, Vec<f64>),
) -> Result<Acc>
where
    H: Fn(Complex64) -> f64,
{
    let (xm, ym) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
    let quads = [(x0, xm, y0, ym), (xm, x1, y0, ym), (x0, xm, ym, y1), (xm, x1, ym, y1)];
    let mut parts = [Acc::default(); 4];
    for (slot, q) in parts.iter_mut().zip(quads) {
        *slot = cell_rule(h, q.0, q.1, q.2, q.3, rule)?;
    }
    let refined = parts.iter().fold(Acc::default(), |a, &b| a + b);
    if (refined.value - whole.value).abs() <= tol || depth >= MAX_CELL_DEPTH {
        return Ok(refined);
    }
    let mut acc = Acc::default();
    for (part, q) in parts.into_iter().zip(quads) {
        acc = acc + adaptive_cell(h, q, part, 0.25 * tol, depth + 1, rule)?;
    }
    Ok(acc)
}

fn box_integral<H>(h: &H, bounds: (f64, f64, f64, f64), rules: &Rules) -> Result<Acc>
where
    H: Fn(Complex64) -> f64 + Sync,
{
    let (x0, x1, y0, y1) = bounds;
    let (dx, dy) = ((x1 - x0) / BASE_GRID as f64, (y1 - y0) / BASE_GRID as f64);
    let cells: Vec<(f64, f64, f64, f64)> = (0..BASE_GRID * BASE_GRID)
        .map(|idx| {
            let (i, j) = (idx % BASE_GRID, idx / BASE_GRID);
            (x0 + dx * i as f64, x0 + dx * (i + 1) as f64, y0 + dy * j as f64, y0 + dy * (j + 1) as f64)
        })
        .collect();
    let coarse: Vec<Acc> = cells
        .par_iter()
        .map(|c| cell_rule(h, c.0, c.1, c.2, c.3, &rules.cell))
        .collect::<Result<_>>()?;
    let scale = coarse.iter().map(|a| a.abs).sum::<f64>().max(f64::MIN_POSITIVE);
    let tol = rules.cell_rtol * scale / cells.len() as f64;
    let parts: Vec<Acc> = cells
        .par_iter()
        .zip(coarse.par_iter())
        .map(|(c, whole)| adaptive_cell(h, *c, *whole, tol, 0, &rules.cell))
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().fold(Acc::default(), |a, b| a + b))
}

fn integrate_level<D: PlaneDensity + ?Sized>(density: &D, lay: &Layout, rules: &Rules) -> Result<Acc> {
    let patches: Vec<Acc> = lay
        .centers
        .par_iter()
        .map(|c| {
            polar(c.x, c.eps, c.patch, rules, |x| {
                let w = cutoff((x - c.x).norm() / c.patch);
                if w == 0.0 {
                    0.0
                } else {
                    w * density.at_x(x)
                }
            })
        })
        .collect::<Result<_>>()?;
    let remainder_h = |x: Complex64| {
        let w = 1.0 - lay.weight_centers(x) - lay.far_weight(x);
        if w <= 0.0 {
            0.0
        } else {
            w * density.at_x(x)
        }
    };
    let bounds = match lay.support {
        Some(s) => (s.center.re - s.radius, s.center.re + s.radius, s.center.im - s.radius, s.center.im + s.radius),
        None => {
            let b = 2.0 * lay.r_eff;
            (-b, b, -b, b)
        }
    };
    let mut acc = patches.into_iter().fold(Acc::default(), |a, b| a + b);
    acc = acc + box_integral(&remainder_h, bounds, rules)?;
    if lay.support.is_none() {
        let zr = 1.0 / lay.r_eff;
        acc = acc
            + polar(Complex64::new(0.0, 0.0), 0.0, zr, rules, |z| {
                let w = lay.far_weight(z.inv());
                if w == 0.0 {
                    0.0
                } else {
                    w * density.at_z(z)
                }
            })?;
    }
    Ok(acc)
}

/// `∫_ℂ density dA` minus the excised disks, with two-level convergence
/// check.
pub fn integrate_plane<D: PlaneDensity + ?Sized>(curve: &Curve, density: &D, spec: &QuadratureSpec) -> Result<Integral> {
    let lay = layout(curve, spec, density.support())?;
    let coarse = integrate_level(density, &lay, &Rules::level(spec, 1))?;
    let fine = integrate_level(density, &lay, &Rules::level(spec, 2))?;
    let error = (fine.value - coarse.value).abs();
    if error > CONVERGENCE_RTOL * fine.abs.max(f64::MIN_POSITIVE) {
        return Err(Error::NonConvergent(format!(
            "refinement levels differ: {} vs {} (scale {})",
            coarse.value, fine.value, fine.abs
        )));
    }
    Ok(Integral { value: fine.value, abs_value: fine.abs, error })
}

/// `∫_X density dν` for a density that factors through `x`: twice the
/// plane integral, one copy per sheet.
pub fn integrate_x_density<D: PlaneDensity + ?Sized>(
    curve: &Curve,
    density: &D,
    spec: &QuadratureSpec,
) -> Result<Integral> {
    Ok(integrate_plane(curve, density, spec)?.scaled(2.0))
}

/// Curvature density `K·ρ = −2 S/⟨·,·⟩_C²` in the x- and z-charts.
pub struct CurvatureDensity<'a> {
    pub curve: &'a Curve,
    pub form: &'a HermitianForm,
}

impl CurvatureDensity<'_> {
    fn eval(&self, kind: crate::curve::ChartKind, w: Complex64) -> f64 {
        let chart = crate::curve::ChartRef { kind, coord: w };
        let v = metric::moment_vector(self.curve, &chart);
        let dv = metric::moment_derivative(self.curve, &chart);
        let n = self.form.norm_sq(&v);
        -2.0 * metric::s_form(self.form, &v, &dv) / (n * n)
    }
}

impl PlaneDensity for CurvatureDensity<'_> {
    fn at_x(&self, x: Complex64) -> f64 {
        self.eval(crate::curve::ChartKind::X, x)
    }

    fn at_z(&self, z: Complex64) -> f64 {
        self.eval(crate::curve::ChartKind::Z, z)
    }
}

/// Total curvature `∫_X K dν`; equals `4π(1 − g)` by Gauss–Bonnet.
pub fn gauss_bonnet(curve: &Curve, c: &HermitianForm, spec: &QuadratureSpec) -> Result<Integral> {
    if c.dim() != curve.genus() {
        return Err(Error::DimensionMismatch { expected: curve.genus(), actual: c.dim() });
    }
    spec.validate(curve)?;
    integrate_x_density(curve, &CurvatureDensity { curve, form: c }, spec)
}
