//! Verification suites behind `mfe-lab verify`. Each suite yields one
//! [`MfeReport`]; identical inputs give identical reports.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::calculus::{self, QuadratureSpec};
use crate::curve::{Curve, SurfacePoint};
use crate::divisor::{self, Divisor};
use crate::effalg::{self, EffElement, Separation};
use crate::error::{Error, Result};
use crate::metric::{self, HermitianForm};
use crate::mfe::{self, Check, Equation, MfeReport, SampleResidual};

/// Relative bound for the curvature oracle.
pub const ORACLE_TOL: f64 = 1e-6;
pub const ORACLE_POINTS: usize = 50;
/// `|K|` bound at the Weierstrass points.
pub const WEIERSTRASS_K_TOL: f64 = 1e-10;
pub const GAUSS_BONNET_TOL: f64 = 1e-3;
pub const SHEET_INTEGRAL_TOL: f64 = 1e-4;
pub const ALGEBRA_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    CurvatureOracle,
    GaussBonnet,
    E3,
    Eqb,
    P2,
    Mfe3,
    Mfe4,
    EffalgSelftest,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::CurvatureOracle,
        Suite::GaussBonnet,
        Suite::E3,
        Suite::Eqb,
        Suite::P2,
        Suite::Mfe3,
        Suite::Mfe4,
        Suite::EffalgSelftest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::CurvatureOracle => "curvature-oracle",
            Suite::GaussBonnet => "gauss-bonnet",
            Suite::E3 => "e3",
            Suite::Eqb => "eqb",
            Suite::P2 => "p2",
            Suite::Mfe3 => "mfe3",
            Suite::Mfe4 => "mfe4",
            Suite::EffalgSelftest => "effalg-selftest",
        }
    }

    /// Genus the suite is restricted to, if any.
    pub fn required_genus(self) -> Option<usize> {
        match self {
            Suite::E3 | Suite::Mfe4 => Some(2),
            _ => None,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub curve: Curve,
    pub form: HermitianForm,
    pub quadrature: QuadratureSpec,
    /// Divisor for the divisor-driven suites; defaults are used when absent.
    pub divisor: Option<Divisor>,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(curve: Curve) -> Self {
        let form = HermitianForm::identity(curve.genus());
        let quadrature = QuadratureSpec::for_curve(&curve);
        RunConfig { curve, form, quadrature, divisor: None, seed: 0 }
    }
}

/// A non-Weierstrass point over `x = 0`, or over the point farthest from
/// the roots when `0` is too close to one.
pub fn default_point(curve: &Curve) -> SurfacePoint {
    let origin = Complex64::new(0.0, 0.0);
    let x = if curve.nearest_root(origin).1 >= 0.25 { origin } else { mfe::control_center(curve, &[]) };
    curve.lift_x(x).0
}

pub fn run_suite(suite: Suite, cfg: &RunConfig) -> MfeReport {
    let equation = match suite {
        Suite::CurvatureOracle => Equation::Curvature,
        Suite::GaussBonnet => Equation::GaussBonnet,
        Suite::E3 => Equation::E3,
        Suite::Eqb => Equation::Eqb,
        Suite::P2 => Equation::P2,
        Suite::Mfe3 => Equation::Mfe3,
        Suite::Mfe4 => Equation::Mfe4,
        Suite::EffalgSelftest => Equation::Effalg,
    };
    let result = match suite {
        Suite::CurvatureOracle => curvature_oracle(cfg),
        Suite::GaussBonnet => gauss_bonnet(cfg),
        Suite::E3 => e3(cfg),
        Suite::Eqb => eqb(cfg),
        Suite::P2 => p2(cfg),
        Suite::Mfe3 => mfe3(cfg),
        Suite::Mfe4 => mfe4(cfg),
        Suite::EffalgSelftest => effalg_selftest(cfg),
    };
    match result {
        Ok(r) => r,
        Err(e) => {
            let mut r = MfeReport::new(equation, &cfg.curve, &cfg.form);
            r.error = Some(e.to_string());
            r.finish()
        }
    }
}

fn curvature_oracle(cfg: &RunConfig) -> Result<MfeReport> {
    let (curve, c) = (&cfg.curve, &cfg.form);
    let mut r = MfeReport::new(Equation::Curvature, curve, c);
    r.tolerances.insert("residual".into(), ORACLE_TOL);
    r.tolerances.insert("weierstrass_k".into(), WEIERSTRASS_K_TOL);
    r.samples = mfe::sample_points(curve, ORACLE_POINTS, &[], cfg.seed)
        .par_iter()
        .map(|p| {
            let k = metric::curvature(curve, c, p)?;
            let oracle = metric::curvature_fd(curve, c, p)?;
            Ok(SampleResidual { point: *p, residual: (k - oracle) / k.abs() })
        })
        .collect::<Result<_>>()?;
    for (k, w) in curve.weierstrass_points().iter().enumerate() {
        r.checks.push(Check::absolute(format!("K(W{k})"), metric::curvature(curve, c, w)?, 0.0, WEIERSTRASS_K_TOL));
    }
    Ok(r.finish())
}

/// `∫_ℂ S/σ² dA`, which equals `π(g − 1)`.
pub fn sheet_integral(curve: &Curve, c: &HermitianForm, spec: &QuadratureSpec) -> Result<f64> {
    let density = calculus::quad::CurvatureDensity { curve, form: c };
    struct Half<'a>(calculus::quad::CurvatureDensity<'a>);
    impl calculus::PlaneDensity for Half<'_> {
        fn at_x(&self, x: Complex64) -> f64 {
            -0.5 * self.0.at_x(x)
        }
        fn at_z(&self, z: Complex64) -> f64 {
            -0.5 * self.0.at_z(z)
        }
    }
    Ok(calculus::integrate_plane(curve, &Half(density), spec)?.value)
}

fn gauss_bonnet(cfg: &RunConfig) -> Result<MfeReport> {
    let (curve, c) = (&cfg.curve, &cfg.form);
    let mut r = MfeReport::new(Equation::GaussBonnet, curve, c);
    r.tolerances.insert("total_relative".into(), GAUSS_BONNET_TOL);
    r.tolerances.insert("sheet_relative".into(), SHEET_INTEGRAL_TOL);
    let g = curve.genus() as f64;
    let total = calculus::gauss_bonnet(curve, c, &cfg.quadrature)?;
    r.checks.push(Check::relative("total_curvature", total.value, 4.0 * PI * (1.0 - g), GAUSS_BONNET_TOL));
    let sheet = sheet_integral(curve, c, &cfg.quadrature)?;
    r.checks.push(Check::relative("sheet_S_over_sigma2", sheet, PI * (g - 1.0), SHEET_INTEGRAL_TOL));
    Ok(r.finish())
}

fn e3(cfg: &RunConfig) -> Result<MfeReport> {
    let (curve, c) = (&cfg.curve, &cfg.form);
    let mut r = MfeReport::new(Equation::E3, curve, c);
    r.tolerances.insert("residual".into(), mfe::RESIDUAL_TOL);
    r.samples = mfe::sample_residuals(curve, &[], cfg.seed, |p| mfe::residual_e3(curve, c, p))?;
    Ok(r.finish())
}

fn prefixed(mut report: MfeReport, prefix: &str) -> MfeReport {
    for a in &mut report.atoms {
        a.label = format!("{prefix}:{}", a.label);
    }
    report
}

fn merge(mut into: MfeReport, other: MfeReport) -> MfeReport {
    into.atoms.extend(other.atoms);
    into.samples.extend(other.samples);
    into.checks.extend(other.checks);
    into.tolerances.extend(other.tolerances);
    into
}

fn eqb(cfg: &RunConfig) -> Result<MfeReport> {
    let (curve, c, spec) = (&cfg.curve, &cfg.form, &cfg.quadrature);
    let points = match &cfg.divisor {
        Some(d) => d.support(),
        None => vec![curve.weierstrass_points()[0], default_point(curve)],
    };
    let mut report = MfeReport::new(Equation::Eqb, curve, c);
    for (i, p) in points.iter().enumerate() {
        let probes = mfe::default_probes(curve, &[*p]);
        let tag = if curve.is_weierstrass(p) { format!("weierstrass{i}") } else { format!("point{i}") };
        report = merge(report, prefixed(mfe::certify_eqb(curve, c, p, &probes, spec)?, &tag));
    }
    Ok(report.finish())
}

fn second_point(curve: &Curve, p: &SurfacePoint) -> SurfacePoint {
    let x = mfe::control_center(curve, &[p.x().expect("affine")]);
    curve.lift_x(x).1
}

fn p2(cfg: &RunConfig) -> Result<MfeReport> {
    let (curve, c, spec) = (&cfg.curve, &cfg.form, &cfg.quadrature);
    let cases: Vec<(String, Divisor)> = match &cfg.divisor {
        Some(d) => vec![("D".into(), d.clone())],
        None => {
            let p = default_point(curve);
            let q = second_point(curve, &p);
            vec![("W".into(), Divisor::weierstrass(curve)), ("P-Q".into(), Divisor::point(p) - Divisor::point(q))]
        }
    };
    let mut report = MfeReport::new(Equation::P2, curve, c);
    for (tag, d) in cases {
        let probes = mfe::default_probes(curve, &d.support());
        report = merge(report, prefixed(mfe::certify_p2(curve, c, &d, &probes, spec)?, &tag));
    }
    Ok(report.finish())
}

fn mfe_divisor(cfg: &RunConfig) -> Divisor {
    cfg.divisor.clone().unwrap_or_else(|| Divisor::point(default_point(&cfg.curve)))
}

fn divisor_xs(d: &Divisor) -> Vec<Complex64> {
    d.support().iter().filter_map(|p| p.x()).collect()
}

fn mfe3(cfg: &RunConfig) -> Result<MfeReport> {
    let (curve, c) = (&cfg.curve, &cfg.form);
    let d = mfe_divisor(cfg);
    let mut r = MfeReport::new(Equation::Mfe3, curve, c);
    r.tolerances.insert("residual".into(), mfe::RESIDUAL_TOL);
    r.samples = mfe::sample_residuals(curve, &divisor_xs(&d), cfg.seed, |p| mfe::residual_mfe3(curve, c, &d, p))?;
    Ok(r.finish())
}

fn mfe4(cfg: &RunConfig) -> Result<MfeReport> {
    let (curve, c, spec) = (&cfg.curve, &cfg.form, &cfg.quadrature);
    let d = mfe_divisor(cfg);
    let mut points = d.support();
    points.extend(curve.weierstrass_points());
    let probes = mfe::default_probes(curve, &points);
    let mut r = mfe::certify_thmeff(curve, c, &d, &probes, spec)?;
    r.tolerances.insert("residual".into(), mfe::RESIDUAL_TOL);
    r.samples = mfe::sample_residuals(curve, &divisor_xs(&d), cfg.seed, |p| mfe::residual_mfe4(curve, c, &d, p))?;
    Ok(r.finish())
}

/// A random point with `|x| < 2`, on a random sheet.
pub fn random_point<R: Rng + ?Sized>(curve: &Curve, rng: &mut R) -> SurfacePoint {
    let x = Complex64::from_polar(2.0 * rng.gen::<f64>().sqrt(), 2.0 * PI * rng.gen::<f64>());
    let (a, b) = curve.lift_x(x);
    if rng.gen::<bool>() {
        a
    } else {
        b
    }
}

/// A random effective divisor of degree `1..=max_degree`.
pub fn random_effective<R: Rng + ?Sized>(curve: &Curve, rng: &mut R, max_degree: i64) -> Divisor {
    let degree = rng.gen_range(1..=max_degree);
    let mut d = Divisor::zero();
    let mut left = degree;
    while left > 0 {
        let n = rng.gen_range(1..=left);
        let p = if rng.gen_ratio(1, 8) { SurfacePoint::InfinityPlus } else { random_point(curve, rng) };
        d.add_point(p, n);
        left -= n;
    }
    d
}

/// A random element with up to three terms of degree `≤ max_degree`.
pub fn random_element<R: Rng + ?Sized>(curve: &Curve, rng: &mut R, max_degree: i64) -> EffElement {
    let mut c = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let mut e = EffElement::constant(c());
    let terms = rng.gen_range(0..=3);
    for _ in 0..terms {
        let a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let d = random_effective(curve, rng, max_degree);
        e = e.add(&EffElement::term(a, &d).expect("effective"));
    }
    e
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= ALGEBRA_TOL * (1.0 + a.norm().max(b.norm()))
}

fn effalg_selftest(cfg: &RunConfig) -> Result<MfeReport> {
    let curve = &cfg.curve;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5EED_EFFA);
    let mut r = MfeReport::new(Equation::Effalg, curve, &cfg.form);
    r.tolerances.insert("algebra".into(), ALGEBRA_TOL);

    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (d, e) = (random_effective(curve, &mut rng, 3), random_effective(curve, &mut rng, 3));
        let q = random_point(curve, &mut rng);
        let lhs = divisor::f_divisor(curve, &(d.clone() + e.clone()), &q)?;
        let rhs = divisor::f_divisor(curve, &d, &q)? * divisor::f_divisor(curve, &e, &q)?;
        worst = worst.max((lhs - rhs).abs() / (1.0 + rhs.abs()));
    }
    r.checks.push(Check::absolute("multiplicativity", worst, 0.0, ALGEBRA_TOL));

    let mut bitwise = true;
    for _ in 0..100 {
        let g = EffElement::generator(&random_effective(curve, &mut rng, 4))?;
        let q = random_point(curve, &mut rng);
        bitwise &= g.eval(curve, &q) == g.eval(curve, &q.involution());
    }
    r.checks.push(Check::flag("iota_invariance_bitwise", bitwise));

    let (mut filtration, mut single_term_equality) = (true, true);
    let (mut laws, mut homomorphism, mut star) = (true, true, true);
    for _ in 0..50 {
        let a = random_element(curve, &mut rng, 4);
        let b = random_element(curve, &mut rng, 4);
        let c = random_element(curve, &mut rng, 4);
        let ab = a.mul(&b);
        filtration &= ab.degree() <= a.degree() + b.degree();
        let (ga, gb) = (
            EffElement::generator(&random_effective(curve, &mut rng, 4))?,
            EffElement::generator(&random_effective(curve, &mut rng, 4))?,
        );
        single_term_equality &= ga.mul(&gb).degree() == ga.degree() + gb.degree();
        laws &= ab == b.mul(&a);
        let q = random_point(curve, &mut rng);
        let ev = |e: &EffElement| e.eval(curve, &q);
        laws &= close(ev(&ab.mul(&c)), ev(&a.mul(&b.mul(&c))));
        laws &= close(ev(&a.mul(&b.add(&c))), ev(&ab.add(&a.mul(&c))));
        laws &= a.mul(&EffElement::one()) == a;
        homomorphism &= close(ev(&ab), ev(&a) * ev(&b));
        star &= a.star().star() == a && close(ev(&a.star()), ev(&a).conj());
    }
    r.checks.push(Check::flag("filtration", filtration));
    r.checks.push(Check::flag("single_term_degree_additive", single_term_equality));
    r.checks.push(Check::flag("algebra_laws", laws));
    r.checks.push(Check::flag("evaluation_homomorphism", homomorphism));
    r.checks.push(Check::flag("star", star));

    let mut separated = 0;
    for _ in 0..20 {
        let q1 = random_point(curve, &mut rng);
        let q2 = random_point(curve, &mut rng);
        if let Separation::Witness { values, .. } = effalg::separates(curve, &q1, &q2) {
            if values.0 == 0.0 && values.1 > 0.0 {
                separated += 1;
            }
        }
    }
    r.checks.push(Check::absolute("separation_witnesses", separated as f64, 20.0, 0.5));
    let q = random_point(curve, &mut rng);
    r.checks.push(Check::flag(
        "same_orbit_not_separated",
        effalg::separates(curve, &q, &q.involution()) == Separation::NoSeparation,
    ));
    Ok(r.finish())
}
