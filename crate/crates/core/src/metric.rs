//! The canonical metric `ds² = ρ dx⊗dx̄` in each chart, its Gaussian
//! curvature and the smooth part `Φ` of `Δu + 6eᵘ` for `u = log(−K)`.
//!
//! In the x-chart `ρ = ⟨𝔣, 𝔣⟩_C / |f(x)|` with `𝔣(x) = (1, x, …, x^{g−1})`,
//! and `K = −2|f| S(𝔣) / ⟨𝔣, 𝔣⟩_C³` where `S` is the Cauchy–Schwarz
//! defect of `(𝔣, 𝔣′)`. The z-chart uses `𝔤(z) = (z^{g−1}, …, 1)` and
//! `g(z)`; the branch chart uses `𝔣_k = 2𝔣` and `f_k`, where `𝔣_k′ = 4ζ𝔤_k`
//! gives `S(𝔣_k) = 16|ζ|² S̃`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::calculus::fd;
use crate::curve::{ChartKind, ChartRef, Curve, SurfacePoint};
use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;

/// Relative threshold under which a negative Cauchy–Schwarz defect is
/// treated as roundoff and clamped to zero.
pub const S_FORM_CLAMP: f64 = 1e-14;

/// A `g × g` positive-definite Hermitian matrix `C`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermitianForm {
    dim: usize,
    entries: Vec<Complex64>,
}

impl HermitianForm {
    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        HermitianForm { dim, entries }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::BadHermitian("empty matrix".into()));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::BadHermitian(format!("row of length {} in {dim}x{dim}", row.len())));
            }
            entries.extend_from_slice(row);
        }
        let form = HermitianForm { dim, entries };
        form.validate()?;
        Ok(form)
    }

    /// `A A* + I/2` with `A` uniform in the unit square entrywise.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let a: Vec<Complex64> = (0..dim * dim)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..dim {
                    s += a[i * dim + k] * a[j * dim + k].conj();
                }
                if i == j {
                    s = Complex64::new(s.re + 0.5, 0.0);
                }
                entries[i * dim + j] = s;
            }
        }
        HermitianForm { dim, entries }
    }

    fn validate(&self) -> Result<()> {
        let scale = 1.0 + self.entries.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for i in 0..self.dim {
            for j in 0..self.dim {
                if (self.get(i, j) - self.get(j, i).conj()).norm() > HERMITIAN_TOL * scale {
                    return Err(Error::BadHermitian(format!("entry ({i},{j}) breaks symmetry")));
                }
            }
        }
        for k in 1..=self.dim {
            let m = self.leading_minor(k);
            if !(m > 0.0) {
                return Err(Error::BadHermitian(format!("leading minor {k} is {m:e}, not positive")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        HermitianForm { dim: self.dim, entries: self.entries.iter().map(|c| c * lambda).collect() }
    }

    /// `⟨v, w⟩_C = Σ c_ij v_i conj(w_j)`.
    pub fn inner(&self, v: &[Complex64], w: &[Complex64]) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..self.dim {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..self.dim {
                row += self.entries[i * self.dim + j] * w[j].conj();
            }
            s += v[i] * row;
        }
        s
    }

    pub fn norm_sq(&self, v: &[Complex64]) -> f64 {
        self.inner(v, v).re
    }

    /// `det C_k` of the leading `k × k` block (Gaussian elimination with
    /// partial pivoting).
    pub fn leading_minor(&self, k: usize) -> f64 {
        let mut a: Vec<Complex64> = (0..k * k).map(|idx| self.get(idx / k, idx % k)).collect();
        let mut det = Complex64::new(1.0, 0.0);
        for col in 0..k {
            let pivot = (col..k)
                .max_by(|&r, &s| a[r * k + col].norm().total_cmp(&a[s * k + col].norm()))
                .unwrap();
            if a[pivot * k + col].norm() == 0.0 {
                return 0.0;
            }
            if pivot != col {
                for j in 0..k {
                    a.swap(pivot * k + j, col * k + j);
                }
                det = -det;
            }
            let p = a[col * k + col];
            det *= p;
            for r in (col + 1)..k {
                let factor = a[r * k + col] / p;
                for j in col..k {
                    let v = a[col * k + j];
                    a[r * k + j] -= factor * v;
                }
            }
        }
        det.re
    }
}

/// `σ_g(t) = 1 + t + … + t^{g−1}`.
pub fn sigma(genus: usize, t: f64) -> f64 {
    (0..genus).rev().fold(0.0, |acc, _| acc * t + 1.0)
}

/// The chart's holomorphic moment vector: `𝔣(x)`, `𝔤(z)` or
/// `𝔣_k(ζ) = 2𝔣(ζ² + e_k)`.
pub fn moment_vector(curve: &Curve, chart: &ChartRef) -> Vec<Complex64> {
    let g = curve.genus();
    match chart.kind {
        ChartKind::X => powers(chart.coord, g),
        ChartKind::Z => {
            let mut v = powers(chart.coord, g);
            v.reverse();
            v
        }
        ChartKind::Branch(k) => {
            let x = chart.coord * chart.coord + curve.roots()[k];
            powers(x, g).into_iter().map(|c| c * 2.0).collect()
        }
    }
}

/// Companion vector of [`moment_vector`]: `𝔣′(x)`, `𝔤′(z)`, or in a branch
/// chart the reduced derivative `𝔤_k` with `𝔣_k′(ζ) = 4ζ 𝔤_k(ζ)`.
pub fn moment_derivative(curve: &Curve, chart: &ChartRef) -> Vec<Complex64> {
    let g = curve.genus();
    match chart.kind {
        ChartKind::X => derivative_of_powers(chart.coord, g),
        ChartKind::Z => {
            let mut v = derivative_of_powers(chart.coord, g);
            v.reverse();
            // d/dz z^{g-1-i}: reversed list holds (g-1-i) z^{g-2-i} at slot i
            v
        }
        ChartKind::Branch(k) => {
            derivative_of_powers(chart.coord * chart.coord + curve.roots()[k], g)
        }
    }
}

fn powers(x: Complex64, n: usize) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(n);
    let mut p = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        v.push(p);
        p *= x;
    }
    v
}

fn derivative_of_powers(x: Complex64, n: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    let mut p = Complex64::new(1.0, 0.0);
    for (i, slot) in v.iter_mut().enumerate().skip(1) {
        *slot = p * i as f64;
        p *= x;
    }
    v
}

/// `⟨dv, dv⟩⟨v, v⟩ − |⟨v, dv⟩|²`, nonnegative by Cauchy–Schwarz.
pub fn s_form(c: &HermitianForm, v: &[Complex64], dv: &[Complex64]) -> f64 {
    let a = c.norm_sq(dv) * c.norm_sq(v);
    let value = a - c.inner(v, dv).norm_sqr();
    if value < 0.0 && value.abs() < S_FORM_CLAMP * a.max(f64::MIN_POSITIVE) {
        0.0
    } else {
        value
    }
}

fn check_dim(curve: &Curve, c: &HermitianForm) -> Result<()> {
    if c.dim() != curve.genus() {
        return Err(Error::DimensionMismatch { expected: curve.genus(), actual: c.dim() });
    }
    Ok(())
}

/// Absolute value of the chart's denominator: `|f(x)|`, `|g(z)|` or
/// `|f_k(ζ)|`, after checking the coordinate lies in the chart.
fn chart_denominator(curve: &Curve, chart: &ChartRef) -> Result<f64> {
    let out = || Error::OutOfChart(format!("{}", chart.coord), chart.kind.name());
    let d = match chart.kind {
        ChartKind::X => curve.f(chart.coord).norm(),
        ChartKind::Z => curve.g_poly(chart.coord).norm(),
        ChartKind::Branch(k) => {
            if k >= curve.degree() || chart.coord.norm_sqr() >= 2.0 * curve.r_branch() {
                return Err(out());
            }
            branch_fk(curve, k, chart.coord).norm()
        }
    };
    if d == 0.0 || !d.is_finite() {
        return Err(out());
    }
    Ok(d)
}

/// `f_k(ζ) = Π_{j≠k} (ζ² + e_k − e_j)`.
fn branch_fk(curve: &Curve, k: usize, zeta: Complex64) -> Complex64 {
    let ek = curve.roots()[k];
    let z2 = zeta * zeta;
    curve
        .roots()
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != k)
        .map(|(_, ej)| z2 + ek - ej)
        .product()
}

/// Conformal factor `ρ` of the canonical metric in the given chart.
pub fn conformal_factor(curve: &Curve, c: &HermitianForm, chart: &ChartRef) -> Result<f64> {
    check_dim(curve, c)?;
    let denom = chart_denominator(curve, chart)?;
    Ok(c.norm_sq(&moment_vector(curve, chart)) / denom)
}

/// Gaussian curvature evaluated with the chart's own closed form.
pub fn curvature_in_chart(curve: &Curve, c: &HermitianForm, chart: &ChartRef) -> Result<f64> {
    check_dim(curve, c)?;
    let denom = chart_denominator(curve, chart)?;
    let v = moment_vector(curve, chart);
    let dv = moment_derivative(curve, chart);
    let norm = c.norm_sq(&v);
    let s = s_form(c, &v, &dv);
    Ok(match chart.kind {
        ChartKind::X | ChartKind::Z => -2.0 * denom * s / norm.powi(3),
        // S(𝔣_k) = 16|ζ|² S̃
        ChartKind::Branch(_) => -32.0 * chart.coord.norm_sqr() * denom * s / norm.powi(3),
    })
}

/// Gaussian curvature `K(p) ≤ 0` in the chart chosen by [`Curve::chart_at`].
pub fn curvature(curve: &Curve, c: &HermitianForm, p: &SurfacePoint) -> Result<f64> {
    curvature_in_chart(curve, c, &curve.chart_at(p))
}

/// `u = log(−K)`, defined off the Weierstrass points.
pub fn u_log_neg_k(curve: &Curve, c: &HermitianForm, p: &SurfacePoint) -> Result<f64> {
    if curve.is_weierstrass(p) {
        return Err(Error::AtSingularSupport);
    }
    let k = curvature(curve, c, p)?;
    if !(k < 0.0) {
        return Err(Error::AtSingularSupport);
    }
    Ok((-k).ln())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSample {
    pub chart: ChartRef,
    pub rho: f64,
    pub k: f64,
}

pub fn sample(curve: &Curve, c: &HermitianForm, p: &SurfacePoint) -> Result<MetricSample> {
    let chart = curve.chart_at(p);
    Ok(MetricSample {
        chart,
        rho: conformal_factor(curve, c, &chart)?,
        k: curvature_in_chart(curve, c, &chart)?,
    })
}

/// Finite-difference curvature `−(2/ρ) ∂∂̄ log ρ` in `p`'s chart.
pub fn curvature_fd(curve: &Curve, c: &HermitianForm, p: &SurfacePoint) -> Result<f64> {
    check_dim(curve, c)?;
    let chart = curve.chart_at(p);
    let rho = conformal_factor(curve, c, &chart)?;
    let ddbar = fd::ddbar(
        |w| Ok(conformal_factor(curve, c, &ChartRef { kind: chart.kind, coord: w })?.ln()),
        chart.coord,
    )?;
    Ok(-2.0 * ddbar / rho)
}

/// `log φ` in a chart, with `φ = ρ_{xx̄}ρ − ρ_xρ_x̄ = ρ² ∂∂̄ log ρ`, which
/// reduces to `S/|h|²` for the chart's moment vector and denominator `h`.
pub fn log_phi_in_chart(curve: &Curve, c: &HermitianForm, chart: &ChartRef) -> Result<f64> {
    let denom = chart_denominator(curve, chart)?;
    let v = moment_vector(curve, chart);
    let dv = moment_derivative(curve, chart);
    let mut s = s_form(c, &v, &dv);
    if let ChartKind::Branch(_) = chart.kind {
        s *= 16.0 * chart.coord.norm_sqr();
    }
    if !(s > 0.0) {
        return Err(Error::AtSingularSupport);
    }
    Ok(s.ln() - 2.0 * denom.ln())
}

/// `Φ = Δ log φ = (4/ρ) ∂∂̄ log φ`, the smooth part of `Δu + 6eᵘ`.
///
/// `φ` is taken in closed form; only the outer `∂∂̄` is a finite difference.
pub fn phi(curve: &Curve, c: &HermitianForm, p: &SurfacePoint) -> Result<f64> {
    check_dim(curve, c)?;
    if curve.is_weierstrass(p) {
        return Err(Error::AtSingularSupport);
    }
    let chart = curve.chart_at(p);
    let rho = conformal_factor(curve, c, &chart)?;
    let ddbar = fd::ddbar(
        |w| log_phi_in_chart(curve, c, &ChartRef { kind: chart.kind, coord: w }),
        chart.coord,
    )?;
    Ok(4.0 * ddbar / rho)
}

/// Value of `Φ` over `x = 0` for genus `g ≥ 3`:
/// `16 |f(0)| det C₃ / (det C₂)²`.
pub fn phi_over_origin(curve: &Curve, c: &HermitianForm) -> Result<f64> {
    check_dim(curve, c)?;
    if curve.genus() < 3 {
        return Ok(0.0);
    }
    let d2 = c.leading_minor(2);
    Ok(16.0 * curve.f(Complex64::new(0.0, 0.0)).norm() * c.leading_minor(3) / (d2 * d2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(2, 0.0), 1.0);
        assert_eq!(sigma(2, 1.0), 2.0);
        assert_eq!(sigma(3, 2.0), 7.0);
    }

    #[test]
    fn moment_vector_examples() {
        let curve = Curve::preset("unity6").unwrap();
        let v = moment_vector(&curve, &ChartRef { kind: ChartKind::X, coord: c(3., 0.) });
        assert_eq!(v, vec![c(1., 0.), c(3., 0.)]);
        let v = moment_vector(&curve, &ChartRef { kind: ChartKind::Z, coord: c(0., 0.) });
        assert_eq!(v, vec![c(0., 0.), c(1., 0.)]);
        let e = curve.roots()[2];
        let v = moment_vector(&curve, &ChartRef { kind: ChartKind::Branch(2), coord: c(0., 0.) });
        assert_eq!(v, vec![c(2., 0.), e * 2.0]);
    }

    #[test]
    fn z_chart_derivative_matches_difference_quotient() {
        let curve = Curve::preset("unity8").unwrap();
        let z = c(0.2, -0.1);
        let h = 1e-6;
        let chart = ChartRef { kind: ChartKind::Z, coord: z };
        let d = moment_derivative(&curve, &chart);
        let plus = moment_vector(&curve, &ChartRef { kind: ChartKind::Z, coord: z + h });
        let minus = moment_vector(&curve, &ChartRef { kind: ChartKind::Z, coord: z - h });
        for i in 0..3 {
            let q = (plus[i] - minus[i]) / (2.0 * h);
            assert!((q - d[i]).norm() < 1e-8, "slot {i}: {q} vs {}", d[i]);
        }
    }

    #[test]
    fn s_form_examples() {
        let id = HermitianForm::identity(2);
        let v = [c(1., 2.), c(-0.5, 0.25)];
        let par = [v[0] * c(0.3, -1.1), v[1] * c(0.3, -1.1)];
        assert_eq!(s_form(&id, &v, &par), 0.0);
        assert_eq!(s_form(&id, &[c(1., 0.), c(0., 0.)], &[c(0., 0.), c(1., 0.)]), 1.0);
        for x in [c(0., 0.), c(2., -1.), c(-0.3, 0.7)] {
            let s = s_form(&id, &[c(1., 0.), x], &[c(0., 0.), c(1., 0.)]);
            assert!((s - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn conformal_factor_examples() {
        let curve = Curve::preset("unity6").unwrap();
        let id = HermitianForm::identity(2);
        let rho0 = conformal_factor(&curve, &id, &ChartRef { kind: ChartKind::X, coord: c(0., 0.) }).unwrap();
        assert!((rho0 - 1.0).abs() < 1e-15);
        let rhoz = conformal_factor(&curve, &id, &ChartRef { kind: ChartKind::Z, coord: c(0., 0.) }).unwrap();
        assert!((rhoz - 1.0).abs() < 1e-15);
        let x = c(2., 0.);
        let rx = conformal_factor(&curve, &id, &ChartRef { kind: ChartKind::X, coord: x }).unwrap();
        let rz = conformal_factor(&curve, &id, &ChartRef { kind: ChartKind::Z, coord: x.inv() }).unwrap();
        assert!((rx - rz * x.inv().powu(2).norm_sqr()).abs() < 1e-10 * rx);
    }

    #[test]
    fn conformal_factor_out_of_chart() {
        let curve = Curve::preset("unity6").unwrap();
        let id = HermitianForm::identity(2);
        let at_root = ChartRef { kind: ChartKind::X, coord: c(1., 0.) };
        assert!(matches!(conformal_factor(&curve, &id, &at_root), Err(Error::OutOfChart(..))));
        let far = ChartRef { kind: ChartKind::Branch(0), coord: c(2., 0.) };
        assert!(matches!(conformal_factor(&curve, &id, &far), Err(Error::OutOfChart(..))));
    }

    #[test]
    fn curvature_examples() {
        let curve = Curve::preset("unity6").unwrap();
        let id = HermitianForm::identity(2);
        let p = curve.point(c(0., 0.), c(0., 1.)).unwrap();
        assert!((curvature(&curve, &id, &p).unwrap() + 2.0).abs() < 1e-14);
        assert!((curvature(&curve, &id, &SurfacePoint::InfinityPlus).unwrap() + 2.0).abs() < 1e-14);
        for w in curve.weierstrass_points() {
            assert_eq!(curvature(&curve, &id, &w).unwrap(), 0.0);
        }
        let u = u_log_neg_k(&curve, &id, &p).unwrap();
        assert!((u - 2f64.ln()).abs() < 1e-14);
        assert_eq!(u_log_neg_k(&curve, &id, &curve.weierstrass_points()[0]), Err(Error::AtSingularSupport));
    }

    #[test]
    fn closed_form_matches_fd_oracle_in_every_chart() {
        let curve = Curve::preset("unity6").unwrap();
        let id = HermitianForm::identity(2);
        let e = curve.roots()[1];
        for x in [c(0.3, 0.4), e + c(0.05, 0.02), c(4.0, 1.0)] {
            let p = curve.lift_x(x).0;
            let k = curvature(&curve, &id, &p).unwrap();
            let oracle = curvature_fd(&curve, &id, &p).unwrap();
            assert!((k - oracle).abs() < 1e-6 * k.abs(), "{x}: {k} vs {oracle}");
        }
    }

    #[test]
    fn genus_two_curvature_matches_determinant_form() {
        // K = −2|f| det C / σ³ in genus two.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let curve = Curve::preset("unity6").unwrap();
        let form = HermitianForm::random(2, &mut rng);
        let det = form.leading_minor(2);
        for x in [c(0.3, 0.2), c(-1.7, 0.4), c(0.1, -2.2)] {
            let p = curve.lift_x(x).0;
            let chart = ChartRef { kind: ChartKind::X, coord: x };
            let sig = form.norm_sq(&moment_vector(&curve, &chart));
            let expected = -2.0 * curve.f(x).norm() * det / sig.powi(3);
            let k = curvature_in_chart(&curve, &form, &chart).unwrap();
            assert!((k - expected).abs() < 1e-12 * expected.abs());
            assert!((curvature(&curve, &form, &p).unwrap() - expected).abs() < 1e-10 * expected.abs());
        }
    }

    #[test]
    fn leading_minors_and_validation() {
        let id = HermitianForm::identity(3);
        assert_eq!(id.leading_minor(3), 1.0);
        let bad = HermitianForm::from_rows(&[vec![c(1., 0.), c(2., 0.)], vec![c(2., 0.), c(1., 0.)]]);
        assert!(matches!(bad, Err(Error::BadHermitian(_))));
        let skew = HermitianForm::from_rows(&[vec![c(1., 0.), c(0., 1.)], vec![c(0., 1.), c(3., 0.)]]);
        assert!(matches!(skew, Err(Error::BadHermitian(_))));
        let ok = HermitianForm::from_rows(&[vec![c(2., 0.), c(0., 1.)], vec![c(0., -1.), c(3., 0.)]]).unwrap();
        assert!((ok.leading_minor(2) - 5.0).abs() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = HermitianForm::random(4, &mut rng);
        assert!(HermitianForm::from_rows(&r.rows()).is_ok());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let curve = Curve::preset("unity8").unwrap();
        let p = curve.lift_x(c(0.2, 0.)).0;
        assert!(matches!(
            curvature(&curve, &HermitianForm::identity(2), &p),
            Err(Error::DimensionMismatch { expected: 3, actual: 2 })
        ));
    }

    #[test]
    fn phi_vanishes_in_genus_two() {
        let curve = Curve::preset("unity6").unwrap();
        let id = HermitianForm::identity(2);
        let p = curve.point(c(0., 0.), c(0., 1.)).unwrap();
        assert!(phi(&curve, &id, &p).unwrap().abs() < 1e-6);
    }

    #[test]
    fn phi_over_origin_identity_octic() {
        let curve = Curve::preset("unity8").unwrap();
        let id = HermitianForm::identity(3);
        let p = curve.lift_x(c(0., 0.)).0;
        let value = phi(&curve, &id, &p).unwrap();
        assert!((value - 16.0).abs() < 1e-5 * 16.0, "Phi = {value}");
        assert_eq!(phi_over_origin(&curve, &id).unwrap(), 16.0);
    }
}
