//! Divisors on the curve and the divisor-indexed functions `F_P`, `F_D`,
//! `u_D = log F_D`.

use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::curve::{Curve, SurfacePoint, WEIERSTRASS_ZERO_RADIUS};
use crate::error::{Error, Result};
use crate::metric;

/// Default rounding quantum for point keys, per real component.
pub const POINT_QUANTUM: f64 = 1e-12;

/// Exclusion radius around `supp α(D)` for `u_D`, in the local chart.
pub const EXCLUSION_RADIUS: f64 = WEIERSTRASS_ZERO_RADIUS;

/// Map key of a point: its coordinates rounded to a quantum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PointKey {
    Affine([i64; 4]),
    InfinityPlus,
    InfinityMinus,
}

impl PointKey {
    pub fn of(p: &SurfacePoint, quantum: f64) -> Self {
        let q = |v: f64| {
            let r = (v / quantum).round() as i64;
            if r == 0 {
                0
            } else {
                r
            }
        };
        match p {
            SurfacePoint::Affine { x, y } => PointKey::Affine([q(x.re), q(x.im), q(y.re), q(y.im)]),
            SurfacePoint::InfinityPlus => PointKey::InfinityPlus,
            SurfacePoint::InfinityMinus => PointKey::InfinityMinus,
        }
    }
}

/// A finite integer combination of points.
#[derive(Clone, Debug)]
pub struct Divisor {
    quantum: f64,
    entries: BTreeMap<PointKey, (SurfacePoint, i64)>,
}

impl Default for Divisor {
    fn default() -> Self {
        Divisor::zero()
    }
}

impl PartialEq for Divisor {
    fn eq(&self, other: &Self) -> bool {
        self.entries.len() == other.entries.len()
            && self.entries.iter().zip(&other.entries).all(|((ka, (_, na)), (kb, (_, nb)))| ka == kb && na == nb)
    }
}

impl Divisor {
    pub fn zero() -> Self {
        Divisor::with_quantum(POINT_QUANTUM)
    }

    pub fn with_quantum(quantum: f64) -> Self {
        Divisor { quantum, entries: BTreeMap::new() }
    }

    pub fn point(p: SurfacePoint) -> Self {
        Divisor::from_points([(p, 1)])
    }

    pub fn from_points<I: IntoIterator<Item = (SurfacePoint, i64)>>(points: I) -> Self {
        let mut d = Divisor::zero();
        for (p, n) in points {
            d.add_point(p, n);
        }
        d
    }

    /// `W`, the sum of the `2g + 2` Weierstrass points.
    pub fn weierstrass(curve: &Curve) -> Self {
        Divisor::from_points(curve.weierstrass_points().into_iter().map(|p| (p, 1)))
    }

    pub fn quantum(&self) -> f64 {
        self.quantum
    }

    pub fn add_point(&mut self, p: SurfacePoint, n: i64) {
        if n == 0 {
            return;
        }
        let key = PointKey::of(&p, self.quantum);
        let entry = self.entries.entry(key).or_insert((p, 0));
        entry.1 += n;
        if entry.1 == 0 {
            self.entries.remove(&key);
        }
    }

    pub fn weight(&self, p: &SurfacePoint) -> i64 {
        self.entries.get(&PointKey::of(p, self.quantum)).map_or(0, |e| e.1)
    }

    /// `(point, weight)` pairs in key order.
    pub fn entries(&self) -> impl Iterator<Item = (SurfacePoint, i64)> + '_ {
        self.entries.values().copied()
    }

    pub fn keys(&self) -> impl Iterator<Item = (PointKey, i64)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, v.1))
    }

    pub fn degree(&self) -> i64 {
        self.entries.values().map(|e| e.1).sum()
    }

    pub fn support(&self) -> Vec<SurfacePoint> {
        self.entries.values().map(|e| e.0).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_effective(&self) -> bool {
        self.entries.values().all(|e| e.1 > 0)
    }

    pub fn negate(&self) -> Self {
        self.map_points(|p| *p, -1)
    }

    pub fn iota(&self) -> Self {
        self.map_points(|p| p.involution(), 1)
    }

    /// `α(Σ n_P P) = Σ n_P (P + ι(P))`.
    pub fn alpha(&self) -> Self {
        self.clone() + self.iota()
    }

    /// Every point replaced by the representative of `{P, ι(P)}` with
    /// `Im y ≥ 0` (ties: `Re y ≥ 0`); both infinities map to `∞+`.
    pub fn iota_canonical(&self) -> Self {
        self.map_points(canonical_point, 1)
    }

    fn map_points(&self, f: impl Fn(&SurfacePoint) -> SurfacePoint, sign: i64) -> Self {
        let mut d = Divisor::with_quantum(self.quantum);
        for (p, n) in self.entries.values() {
            d.add_point(f(p), sign * n);
        }
        d
    }

    /// `δ_D(φ) = Σ n_P φ(P)`.
    pub fn delta_eval(&self, phi: impl Fn(&SurfacePoint) -> f64) -> f64 {
        self.entries.values().map(|(p, n)| *n as f64 * phi(p)).sum()
    }

    /// True if some support point is a Weierstrass point.
    pub fn hits_weierstrass(&self, curve: &Curve) -> bool {
        self.entries.values().any(|(p, _)| curve.is_weierstrass(p))
    }
}

impl Add for Divisor {
    type Output = Divisor;
    fn add(mut self, rhs: Divisor) -> Divisor {
        for (p, n) in rhs.entries.into_values() {
            self.add_point(p, n);
        }
        self
    }
}

impl Neg for Divisor {
    type Output = Divisor;
    fn neg(self) -> Divisor {
        self.negate()
    }
}

impl Sub for Divisor {
    type Output = Divisor;
    fn sub(self, rhs: Divisor) -> Divisor {
        self + rhs.negate()
    }
}

pub fn canonical_point(p: &SurfacePoint) -> SurfacePoint {
    match *p {
        SurfacePoint::Affine { x, y } => {
            let flip = y.im < 0.0 || (y.im == 0.0 && y.re < 0.0);
            SurfacePoint::Affine { x, y: if flip { -y } else { y } }
        }
        _ => SurfacePoint::InfinityPlus,
    }
}

/// `ρ(D) = deg(W − D)/(g + 1)`.
pub fn rho_of_d(curve: &Curve, d: &Divisor) -> Rational64 {
    let g = curve.genus() as i64;
    Rational64::new(2 * g + 2 - d.degree(), g + 1)
}

fn normalizer(genus: usize, w: Complex64) -> f64 {
    let t = w.norm_sqr();
    (metric::sigma(genus, t) * (1.0 + t).powi(2)).powf(1.0 / (2 * genus + 2) as f64)
}

/// `F_P(Q)`: the x-chart expression for `|x(Q)| ≤ 1`, the z-chart one
/// beyond. Depends on `Q` only through `x(Q)`.
pub fn f_point(curve: &Curve, p: &SurfacePoint, q: &SurfacePoint) -> f64 {
    f_point_at_x(curve, p, q.x())
}

/// [`f_point`] at the point(s) over `x`, with `None` for the infinities.
pub fn f_point_at_x(curve: &Curve, p: &SurfacePoint, x: Option<Complex64>) -> f64 {
    let g = curve.genus();
    match x {
        Some(x) if x.norm() <= 1.0 => {
            let num = match p.x() {
                Some(a) => (x - a).norm(),
                None => 1.0,
            };
            num / normalizer(g, x)
        }
        other => {
            let z = other.map_or(Complex64::new(0.0, 0.0), |x| x.inv());
            // |1 − z a| = |x − a| / |x|, exact zero at x = a
            let num = match (p.x(), other) {
                (Some(a), Some(x)) => (x - a).norm() / x.norm(),
                (Some(_), None) => 1.0,
                (None, _) => z.norm(),
            };
            num / normalizer(g, z)
        }
    }
}

/// `F_D(Q) = Π F_P(Q)^{n_P}`.
pub fn f_divisor(curve: &Curve, d: &Divisor, q: &SurfacePoint) -> Result<f64> {
    let mut value = 1.0;
    for (p, n) in d.entries() {
        let f = f_point(curve, &p, q);
        if n < 0 && f == 0.0 {
            return Err(Error::PoleAtPoint);
        }
        value *= f.powi(n as i32);
    }
    Ok(value)
}

/// True if `q` lies within [`EXCLUSION_RADIUS`] of `p` or `ι(p)`, measured
/// in the chart covering `p`.
pub fn near_orbit(curve: &Curve, p: &SurfacePoint, q: &SurfacePoint) -> bool {
    match (p.x(), q.x()) {
        (None, None) => true,
        (None, Some(x)) => x.norm() > 1.0 / EXCLUSION_RADIUS,
        (Some(_), None) => false,
        (Some(a), Some(x)) => match curve.weierstrass_index(p) {
            Some(k) => (x - curve.roots()[k]).norm().sqrt() < EXCLUSION_RADIUS,
            None => (x - a).norm() < EXCLUSION_RADIUS,
        },
    }
}

/// `u_D(Q) = log F_D(Q)` off `supp α(D)`.
pub fn u_divisor(curve: &Curve, d: &Divisor, q: &SurfacePoint) -> Result<f64> {
    let mut sum = 0.0;
    for (p, n) in d.entries() {
        if near_orbit(curve, &p, q) {
            return Err(Error::AtSingularSupport);
        }
        sum += n as f64 * f_point(curve, &p, q).ln();
    }
    Ok(sum)
}

/// A distribution `smooth + Σ c_P δ_P`, recorded as numbers.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DistributionValue {
    pub smooth: f64,
    pub atoms: Vec<Atom>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub point: SurfacePoint,
    pub coefficient: f64,
}

impl DistributionValue {
    /// `scale · δ_D` with no smooth part.
    pub fn dirac(d: &Divisor, scale: f64) -> Self {
        DistributionValue {
            smooth: 0.0,
            atoms: d.entries().map(|(point, n)| Atom { point, coefficient: scale * n as f64 }).collect(),
        }
    }

    /// The pairing `smooth + Σ c_P φ(P)`.
    pub fn apply(&self, phi: impl Fn(&SurfacePoint) -> f64) -> f64 {
        self.smooth + self.atomic_part(phi)
    }

    pub fn atomic_part(&self, phi: impl Fn(&SurfacePoint) -> f64) -> f64 {
        self.atoms.iter().map(|a| a.coefficient * phi(&a.point)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unity6() -> Curve {
        Curve::preset("unity6").unwrap()
    }

    #[test]
    fn alpha_of_a_generic_point() {
        let curve = unity6();
        let p = curve.lift_x(c(0.3, 0.2)).0;
        let a = Divisor::point(p).alpha();
        assert_eq!(a.degree(), 2);
        assert_eq!(a, Divisor::from_points([(p, 1), (p.involution(), 1)]));
    }

    #[test]
    fn alpha_of_w_is_two_w() {
        let curve = unity6();
        let w = Divisor::weierstrass(&curve);
        assert_eq!(w.alpha(), w.clone() + w.clone());
        assert_eq!(w.alpha().degree(), 12);
    }

    #[test]
    fn degree_of_w_minus_three_q() {
        let curve = unity6();
        let q = curve.lift_x(c(0.1, 0.4)).0;
        let d = Divisor::weierstrass(&curve) - Divisor::from_points([(q, 3)]);
        assert_eq!(d.degree(), 3);
    }

    #[test]
    fn zero_weights_are_dropped() {
        let curve = unity6();
        let p = curve.lift_x(c(0.1, 0.4)).0;
        let d = Divisor::point(p) - Divisor::point(p);
        assert!(d.is_zero());
        assert_eq!(d.delta_eval(|_| 1.0), 0.0);
    }

    #[test]
    fn f_point_example() {
        let curve = unity6();
        let p = curve.point(c(0., 0.), c(0., 1.)).unwrap();
        let q = curve.point(c(1., 0.), c(0., 0.)).unwrap();
        // 1 / (σ₂(1)·2²)^{1/6} = 8^{−1/6}
        let oracle = 1.0 / 8f64.powf(1.0 / 6.0);
        assert!((f_point(&curve, &p, &q) - oracle).abs() < 1e-15);
        assert!((oracle - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(f_point(&curve, &p, &p), 0.0);
        let inf = SurfacePoint::InfinityPlus;
        assert_eq!(f_point(&curve, &inf, &SurfacePoint::InfinityMinus), 0.0);
        assert_eq!(f_point(&curve, &inf, &inf), 0.0);
    }

    #[test]
    fn chart_overlap_continuity() {
        let curve = unity6();
        let p = curve.lift_x(c(0.4, -0.7)).0;
        for theta in [0.1, 1.3, 2.9, 4.4] {
            let x = Complex64::from_polar(1.0, theta);
            let z = x.inv();
            let g = curve.genus();
            let xs = (x - p.x().unwrap()).norm() / normalizer(g, x);
            let zs = (1.0 - z * p.x().unwrap()).norm() / normalizer(g, z);
            assert!((xs - zs).abs() < 1e-10 * xs);
        }
    }

    #[test]
    fn u_w_is_log_minus_k_minus_log_two() {
        let curve = unity6();
        let id = metric::HermitianForm::identity(2);
        let w = Divisor::weierstrass(&curve);
        for x in [c(0.0, 0.0), c(0.3, 0.7), c(-1.7, 0.4), c(3.0, -2.0)] {
            let q = curve.lift_x(x).0;
            let lhs = metric::u_log_neg_k(&curve, &id, &q).unwrap() - u_divisor(&curve, &w, &q).unwrap();
            assert!((lhs - 2f64.ln()).abs() < 1e-9, "{lhs}");
        }
    }

    #[test]
    fn u_divisor_guards_the_support() {
        let curve = unity6();
        let p = curve.lift_x(c(0.2, 0.2)).0;
        let d = Divisor::point(p);
        assert_eq!(u_divisor(&curve, &d, &p.involution()), Err(Error::AtSingularSupport));
        let w = curve.weierstrass_points()[0];
        assert_eq!(u_divisor(&curve, &Divisor::point(w), &w), Err(Error::AtSingularSupport));
        assert_eq!(u_divisor(&curve, &Divisor::point(SurfacePoint::InfinityPlus), &SurfacePoint::InfinityMinus), Err(Error::AtSingularSupport));
    }

    #[test]
    fn negative_weights_report_poles() {
        let curve = unity6();
        let p = curve.lift_x(c(0.2, 0.2)).0;
        assert_eq!(f_divisor(&curve, &Divisor::point(p).negate(), &p), Err(Error::PoleAtPoint));
        assert_eq!(f_divisor(&curve, &Divisor::zero(), &p), Ok(1.0));
    }

    #[test]
    fn rho_examples() {
        let curve = unity6();
        let q = curve.lift_x(c(0.1, 0.1)).0;
        assert_eq!(rho_of_d(&curve, &Divisor::zero()), Rational64::from_integer(2));
        assert_eq!(rho_of_d(&curve, &Divisor::point(q)), Rational64::new(5, 3));
        assert_eq!(rho_of_d(&curve, &Divisor::from_points([(q, 6)])), Rational64::from_integer(0));
    }

    #[test]
    fn delta_of_w_counts_points() {
        let curve = unity6();
        assert_eq!(Divisor::weierstrass(&curve).delta_eval(|_| 1.0), 6.0);
    }

    #[test]
    fn canonical_form_merges_orbits() {
        let curve = unity6();
        let p = curve.lift_x(c(0.1, 0.4)).0;
        let d = Divisor::point(p).iota_canonical();
        assert_eq!(d, Divisor::point(p.involution()).iota_canonical());
        let inf = Divisor::point(SurfacePoint::InfinityMinus).iota_canonical();
        assert_eq!(inf, Divisor::point(SurfacePoint::InfinityPlus));
    }
}
