//! Numerical kernels: chart Laplacians, plane quadrature over the x-line and
//! ε-excised Green pairings.

pub mod fd;
pub mod green;
pub mod quad;

use num_complex::Complex64;

use crate::curve::{Curve, SurfacePoint};
use crate::error::{Error, Result};
use crate::metric::{self, HermitianForm};

pub use green::{
    extrapolate, extrapolate_pairing, green_pairing, integrate_against, pairing_limit, ExtrapolationModel,
    Extrapolated, PairingLimit, SingularCenter, TestFunction, XField,
};
pub use quad::{gauss_bonnet, integrate_plane, CurvatureDensity, integrate_x_density, Disk, Excision, Integral, PlaneDensity, QuadratureSpec};

/// Radius in chart coordinates inside which a point counts as sitting on a
/// declared singular point.
pub const SINGULAR_RADIUS: f64 = 1e-8;

/// A real function on the curve, possibly singular at finitely many points.
pub trait ScalarField {
    fn value(&self, p: &SurfacePoint) -> Result<f64>;

    fn singular_points(&self) -> Vec<SurfacePoint> {
        Vec::new()
    }
}

impl<F> ScalarField for F
where
    F: Fn(&SurfacePoint) -> Result<f64>,
{
    fn value(&self, p: &SurfacePoint) -> Result<f64> {
        self(p)
    }
}

fn near(curve: &Curve, p: &SurfacePoint, s: &SurfacePoint) -> bool {
    if let Some(k) = curve.weierstrass_index(s) {
        return curve.weierstrass_index(p) == Some(k);
    }
    match (p, s) {
        (SurfacePoint::Affine { x, y }, SurfacePoint::Affine { x: xs, y: ys }) => {
            (x - xs).norm() < SINGULAR_RADIUS && (y - ys).norm() <= (y + ys).norm()
        }
        _ => p == s,
    }
}

/// Laplace–Beltrami operator `(4/ρ) ∂²/∂w∂w̄` of `field` at `p`, evaluated
/// in the chart [`Curve::chart_at`] selects.
pub fn laplacian_fd<F: ScalarField + ?Sized>(
    curve: &Curve,
    c: &HermitianForm,
    field: &F,
    p: &SurfacePoint,
) -> Result<f64> {
    if field.singular_points().iter().any(|s| near(curve, p, s)) {
        return Err(Error::AtSingularSupport);
    }
    let chart = curve.chart_at(p);
    let rho = metric::conformal_factor(curve, c, &chart)?;
    let ddbar = fd::ddbar(|w: Complex64| field.value(&curve.point_from_chart(chart.kind, w, p)), chart.coord)?;
    Ok(4.0 * ddbar / rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn harmonic_log_has_zero_laplacian() {
        let curve = Curve::preset("unity6").unwrap();
        let id = HermitianForm::identity(2);
        let a = c(0.4, -1.3);
        let field = |q: &SurfacePoint| Ok((q.x().unwrap() - a).norm().ln());
        for x in [c(0., 0.), c(1.8, 0.3), c(-0.5, 0.2)] {
            let p = curve.lift_x(x).0;
            assert!(laplacian_fd(&curve, &id, &field, &p).unwrap().abs() < 1e-6);
        }
    }

    #[test]
    fn laplacian_of_u_at_origin() {
        let curve = Curve::preset("unity6").unwrap();
        let id = HermitianForm::identity(2);
        let p = curve.point(c(0., 0.), c(0., 1.)).unwrap();
        let u = |q: &SurfacePoint| metric::u_log_neg_k(&curve, &id, q);
        let lap = laplacian_fd(&curve, &id, &u, &p).unwrap();
        assert!((lap + 12.0).abs() < 1e-6, "{lap}");
    }

    #[test]
    fn quadratic_field_gives_four_over_rho() {
        let curve = Curve::preset("unity6").unwrap();
        let id = HermitianForm::identity(2);
        let p = curve.lift_x(c(0., 0.)).0;
        let field = |q: &SurfacePoint| Ok(q.x().unwrap().norm_sqr());
        let rho = metric::conformal_factor(&curve, &id, &curve.chart_at(&p)).unwrap();
        let lap = laplacian_fd(&curve, &id, &field, &p).unwrap();
        assert!((lap - 4.0 / rho).abs() < 1e-8);
    }

    struct Singular(SurfacePoint);

    impl ScalarField for Singular {
        fn value(&self, _: &SurfacePoint) -> Result<f64> {
            Ok(0.0)
        }
        fn singular_points(&self) -> Vec<SurfacePoint> {
            vec![self.0]
        }
    }

    #[test]
    fn declared_singular_point_is_rejected() {
        let curve = Curve::preset("unity6").unwrap();
        let id = HermitianForm::identity(2);
        let w = curve.weierstrass_points()[3];
        assert_eq!(laplacian_fd(&curve, &id, &Singular(w), &w), Err(Error::AtSingularSupport));
        let p = curve.lift_x(c(0.2, 0.1)).0;
        assert_eq!(laplacian_fd(&curve, &id, &Singular(p), &p), Err(Error::AtSingularSupport));
        // the other sheet is a different point
        assert!(laplacian_fd(&curve, &id, &Singular(p), &p.involution()).is_ok());
    }
}
