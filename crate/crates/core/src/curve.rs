//! The curve model: roots of `f`, points of the compactified curve, the
//! hyperelliptic involution and the three chart families of the atlas.
//!
//! The curve is `y² = f(x)` with `f(x) = Π (x − e_k)` monic of degree
//! `2g + 2`. Its compactification glues the affine curve to
//! `w² = g(z) = Π (1 − e_k z)` along `(x, y) ↦ (1/x, y/x^{g+1})`; the two
//! points over `z = 0` are `∞± = (0, ±1)`.
//!
//! Charts:
//!
//! * [`ChartKind::X`]: the coordinate `x`, valid on affine points off the
//!   branch points.
//! * [`ChartKind::Z`]: the coordinate `z = 1/x`, valid near the infinities.
//! * [`ChartKind::Branch`]: `ζ` with `x = ζ² + e_k` around the Weierstrass
//!   point `(e_k, 0)`.
//!
//! Sheets over the x-line are labelled with the principal square root of
//! `f(x)`. Every quantity in this crate depends on a point only through `x`
//! and `|f(x)|` or is invariant under the involution, so the labelling is
//! never observable in results. Inside a branch chart `y = ζ·s_k(x)` with
//! `s_k` a continuous square root of `f_k(x) = Π_{j≠k}(x − e_j)` on the disk.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radius in the branch coordinate `ζ` below which a point is treated as the
/// Weierstrass point itself.
pub const WEIERSTRASS_ZERO_RADIUS: f64 = 1e-8;

/// Relative tolerance for `|y² − f(x)|` when validating affine points.
pub const ON_CURVE_TOL: f64 = 1e-8;

/// A point of the compactified curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfacePoint {
    Affine { x: Complex64, y: Complex64 },
    InfinityPlus,
    InfinityMinus,
}

impl SurfacePoint {
    pub fn affine(x: Complex64, y: Complex64) -> Self {
        SurfacePoint::Affine { x, y }
    }

    pub fn is_infinity(&self) -> bool {
        !matches!(self, SurfacePoint::Affine { .. })
    }

    /// The x-coordinate, `None` at the infinities.
    pub fn x(&self) -> Option<Complex64> {
        match self {
            SurfacePoint::Affine { x, .. } => Some(*x),
            _ => None,
        }
    }

    /// The hyperelliptic involution `(x, y) ↦ (x, −y)`, swapping `∞±`.
    pub fn involution(&self) -> SurfacePoint {
        match *self {
            SurfacePoint::Affine { x, y } => SurfacePoint::Affine { x, y: -y },
            SurfacePoint::InfinityPlus => SurfacePoint::InfinityMinus,
            SurfacePoint::InfinityMinus => SurfacePoint::InfinityPlus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChartKind {
    X,
    Z,
    /// Branch chart around the Weierstrass point over root `k` (0-based).
    Branch(usize),
}

impl ChartKind {
    pub fn name(&self) -> &'static str {
        match self {
            ChartKind::X => "x",
            ChartKind::Z => "z",
            ChartKind::Branch(_) => "branch",
        }
    }
}

/// A chart together with the local coordinate of a point in it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartRef {
    pub kind: ChartKind,
    pub coord: Complex64,
}

#[derive(Clone, Debug)]
pub struct Curve {
    roots: Vec<Complex64>,
    genus: usize,
    tolerance: f64,
    r_branch: f64,
    r_far: f64,
    branch_scale: Vec<Complex64>,
}

impl Curve {
    /// Builds the curve with the default root-distinctness tolerance
    /// `1e−9·(1 + max|e_k|)`.
    pub fn new(roots: Vec<Complex64>) -> Result<Self> {
        Self::with_tolerance(roots, None)
    }

    pub fn with_tolerance(roots: Vec<Complex64>, tolerance: Option<f64>) -> Result<Self> {
        let n = roots.len();
        if n % 2 == 1 || n < 6 {
            return Err(Error::BadDegree(n));
        }
        if let Some(i) = roots.iter().position(|e| !e.re.is_finite() || !e.im.is_finite()) {
            return Err(Error::NonFiniteRoot(i));
        }
        let max_abs = roots.iter().map(|e| e.norm()).fold(0.0, f64::max);
        let tolerance = tolerance.unwrap_or(1e-9 * (1.0 + max_abs));
        if !(tolerance >= 0.0) {
            return Err(Error::Invalid(format!("negative root tolerance {tolerance}")));
        }
        let mut min_dist = f64::INFINITY;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = (roots[i] - roots[j]).norm();
                if d <= tolerance {
                    return Err(Error::RepeatedRoots(i, j));
                }
                min_dist = min_dist.min(d);
            }
        }
        let branch_scale = (0..n)
            .map(|k| {
                let fk: Complex64 = roots
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, e)| roots[k] - e)
                    .product();
                fk.sqrt()
            })
            .collect();
        Ok(Curve {
            genus: (n - 2) / 2,
            tolerance,
            r_branch: 0.5 * min_dist,
            r_far: 2.0 * max_abs + 1.0,
            roots,
            branch_scale,
        })
    }

    /// The curve whose roots are the `n`-th roots of unity, `f = xⁿ − 1`.
    pub fn roots_of_unity(n: usize) -> Result<Self> {
        Self::new(
            (0..n)
                .map(|k| {
                    let e = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
                    let snap = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
                    Complex64::new(snap(e.re), snap(e.im))
                })
                .collect(),
        )
    }

    /// Named presets: `unity6` (genus 2) and `unity8` (genus 3).
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "unity6" => Self::roots_of_unity(6),
            "unity8" => Self::roots_of_unity(8),
            other => Err(Error::Invalid(format!("unknown preset '{other}'"))),
        }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Branch-chart selection radius: half the minimal root separation.
    pub fn r_branch(&self) -> f64 {
        self.r_branch
    }

    /// Beyond `|x| > r_far` points are read in the z-chart.
    pub fn r_far(&self) -> f64 {
        self.r_far
    }

    /// `f(x) = Π (x − e_k)`.
    pub fn f(&self, x: Complex64) -> Complex64 {
        self.roots.iter().map(|e| x - e).product()
    }

    /// `g(z) = Π (1 − e_k z) = z^{2g+2} f(1/z)`.
    pub fn g_poly(&self, z: Complex64) -> Complex64 {
        self.roots.iter().map(|e| Complex64::new(1.0, 0.0) - e * z).product()
    }

    /// `f_k(x) = Π_{j≠k} (x − e_j)`, so that `f(x) = (x − e_k) f_k(x)`.
    pub fn f_k(&self, k: usize, x: Complex64) -> Complex64 {
        self.roots
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(_, e)| x - e)
            .product()
    }

    /// Monomial coefficients of `f`, lowest degree first.
    pub fn coefficients(&self) -> Vec<Complex64> {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for e in &self.roots {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (i, ci) in c.iter().enumerate() {
                next[i + 1] += ci;
                next[i] -= ci * e;
            }
            c = next;
        }
        c
    }

    /// Continuous square root of `f_k` on the branch disk of root `k`.
    pub fn branch_sqrt(&self, k: usize, x: Complex64) -> Complex64 {
        let ek = self.roots[k];
        self.roots
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .fold(self.branch_scale[k], |acc, (_, ej)| {
                acc * ((x - ej) / (ek - ej)).sqrt()
            })
    }

    pub fn contains(&self, p: &SurfacePoint) -> bool {
        match p {
            SurfacePoint::Affine { x, y } => {
                let fx = self.f(*x);
                (y * y - fx).norm() <= ON_CURVE_TOL * (1.0 + fx.norm())
            }
            _ => true,
        }
    }

    /// Validated affine point.
    pub fn point(&self, x: Complex64, y: Complex64) -> Result<SurfacePoint> {
        let fx = self.f(x);
        let defect = (y * y - fx).norm();
        if defect <= ON_CURVE_TOL * (1.0 + fx.norm()) {
            Ok(SurfacePoint::Affine { x, y })
        } else {
            Err(Error::NotOnCurve(defect))
        }
    }

    pub fn involution(&self, p: &SurfacePoint) -> SurfacePoint {
        p.involution()
    }

    /// The `2g + 2` points `(e_k, 0)`, in root order.
    pub fn weierstrass_points(&self) -> Vec<SurfacePoint> {
        self.roots
            .iter()
            .map(|&x| SurfacePoint::Affine { x, y: Complex64::new(0.0, 0.0) })
            .collect()
    }

    /// Index of the nearest root and its distance.
    pub fn nearest_root(&self, x: Complex64) -> (usize, f64) {
        self.roots
            .iter()
            .enumerate()
            .map(|(k, e)| (k, (x - e).norm()))
            .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
    }

    /// Index of the Weierstrass point `p` numerically coincides with, if any.
    pub fn weierstrass_index(&self, p: &SurfacePoint) -> Option<usize> {
        let x = p.x()?;
        let (k, d) = self.nearest_root(x);
        (d.sqrt() < WEIERSTRASS_ZERO_RADIUS).then_some(k)
    }

    pub fn is_weierstrass(&self, p: &SurfacePoint) -> bool {
        self.weierstrass_index(p).is_some()
    }

    /// Chart-selection policy: the branch chart of the nearest root within
    /// `r_branch`, else the z-chart at the infinities or beyond `r_far`,
    /// else the x-chart.
    pub fn chart_at(&self, p: &SurfacePoint) -> ChartRef {
        let x = match p {
            SurfacePoint::Affine { x, .. } => *x,
            _ => {
                return ChartRef { kind: ChartKind::Z, coord: Complex64::new(0.0, 0.0) };
            }
        };
        let (k, d) = self.nearest_root(x);
        let kind = if d < self.r_branch {
            ChartKind::Branch(k)
        } else if x.norm() > self.r_far {
            ChartKind::Z
        } else {
            ChartKind::X
        };
        let coord = self
            .coordinate_in(kind, p)
            .expect("selected chart covers the point");
        ChartRef { kind, coord }
    }

    /// Local coordinate of `p` in the chart `kind`, or `None` if the chart
    /// does not cover `p`.
    pub fn coordinate_in(&self, kind: ChartKind, p: &SurfacePoint) -> Option<Complex64> {
        match (kind, p) {
            (ChartKind::X, SurfacePoint::Affine { x, .. }) => {
                (self.f(*x) != Complex64::new(0.0, 0.0)).then_some(*x)
            }
            (ChartKind::X, _) => None,
            (ChartKind::Z, SurfacePoint::Affine { x, .. }) => {
                if *x == Complex64::new(0.0, 0.0) {
                    return None;
                }
                let z = x.inv();
                (self.g_poly(z) != Complex64::new(0.0, 0.0)).then_some(z)
            }
            (ChartKind::Z, _) => Some(Complex64::new(0.0, 0.0)),
            (ChartKind::Branch(k), SurfacePoint::Affine { x, y }) => {
                if k >= self.roots.len() || (x - self.roots[k]).norm() >= 2.0 * self.r_branch {
                    return None;
                }
                let zeta = (x - self.roots[k]).sqrt();
                let y0 = zeta * self.branch_sqrt(k, *x);
                Some(if (y - y0).norm() <= (y + y0).norm() { zeta } else { -zeta })
            }
            (ChartKind::Branch(_), _) => None,
        }
    }

    /// Inverse of [`Curve::coordinate_in`]. Sheet ambiguities in the x- and
    /// z-charts are resolved towards `reference`, which should be a nearby
    /// point; branch-chart coordinates determine the point uniquely.
    pub fn point_from_chart(
        &self,
        kind: ChartKind,
        coord: Complex64,
        reference: &SurfacePoint,
    ) -> SurfacePoint {
        let nearest = |s: Complex64, target: Option<Complex64>| match target {
            Some(t) if (t + s).norm() < (t - s).norm() => -s,
            _ => s,
        };
        match kind {
            ChartKind::X => {
                let y_ref = match reference {
                    SurfacePoint::Affine { y, .. } => Some(*y),
                    _ => None,
                };
                let y = nearest(self.f(coord).sqrt(), y_ref);
                SurfacePoint::Affine { x: coord, y }
            }
            ChartKind::Z => {
                let w_ref = match reference {
                    SurfacePoint::Affine { x, y } => Some(y * x.inv().powu(self.genus as u32 + 1)),
                    SurfacePoint::InfinityPlus => Some(Complex64::new(1.0, 0.0)),
                    SurfacePoint::InfinityMinus => Some(Complex64::new(-1.0, 0.0)),
                };
                let w = nearest(self.g_poly(coord).sqrt(), w_ref);
                if coord == Complex64::new(0.0, 0.0) {
                    if w.re >= 0.0 {
                        SurfacePoint::InfinityPlus
                    } else {
                        SurfacePoint::InfinityMinus
                    }
                } else {
                    let x = coord.inv();
                    SurfacePoint::Affine { x, y: w * x.powu(self.genus as u32 + 1) }
                }
            }
            ChartKind::Branch(k) => {
                let x = coord * coord + self.roots[k];
                SurfacePoint::Affine { x, y: coord * self.branch_sqrt(k, x) }
            }
        }
    }

    /// The two points over `x`, `(x, +√f(x))` and `(x, −√f(x))` with the
    /// principal square root.
    pub fn lift_x(&self, x: Complex64) -> (SurfacePoint, SurfacePoint) {
        let y = self.f(x).sqrt();
        (SurfacePoint::Affine { x, y }, SurfacePoint::Affine { x, y: -y })
    }
}
