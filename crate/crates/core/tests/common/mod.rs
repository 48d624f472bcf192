//! Independent oracles shared by the integration tests. Nothing here calls
//! into the metric, divisor or calculus modules.

#![allow(dead_code)]

use mfe_lab::{Complex64, Curve, HermitianForm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unity(n: usize) -> Curve {
    Curve::preset(if n == 6 { "unity6" } else { "unity8" }).unwrap()
}

/// Coefficients of `Π (x − e_k)`, constant term first, by repeated
/// multiplication with linear factors.
pub fn expand(roots: &[Complex64]) -> Vec<Complex64> {
    let mut poly = vec![c(1.0, 0.0)];
    for &e in roots {
        let mut next = vec![c(0.0, 0.0); poly.len() + 1];
        for (i, &a) in poly.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * e;
        }
        poly = next;
    }
    poly
}

pub fn horner(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(c(0.0, 0.0), |acc, &a| acc * x + a)
}

/// Six roots spread over the disk of radius 1.5, pairwise at least 0.3 apart.
pub fn random_sextic(seed: u64) -> Curve {
    let mut r = rng(seed);
    let mut roots: Vec<Complex64> = Vec::new();
    while roots.len() < 6 {
        let z = c(r.gen_range(-1.5..1.5), r.gen_range(-1.5..1.5));
        if z.norm() < 1.5 && roots.iter().all(|e| (e - z).norm() > 0.3) {
            roots.push(z);
        }
    }
    Curve::new(roots).unwrap()
}

/// `A·A^H + dim·I` for a random complex `A`: Hermitian and positive definite.
pub fn random_form(dim: usize, seed: u64) -> HermitianForm {
    let mut r = rng(seed);
    let a: Vec<Vec<Complex64>> =
        (0..dim).map(|_| (0..dim).map(|_| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect()).collect();
    let rows: Vec<Vec<Complex64>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    let s: Complex64 = (0..dim).map(|k| a[i][k] * a[j][k].conj()).sum();
                    s + if i == j { c(dim as f64, 0.0) } else { c(0.0, 0.0) }
                })
                .collect()
        })
        .collect();
    HermitianForm::from_rows(&rows).unwrap()
}

/// `Σ c_ij v_i conj(v_j)` from the raw rows.
pub fn quad_form(rows: &[Vec<Complex64>], v: &[Complex64]) -> f64 {
    let mut s = c(0.0, 0.0);
    for (i, row) in rows.iter().enumerate() {
        for (j, cij) in row.iter().enumerate() {
            s += cij * v[i] * v[j].conj();
        }
    }
    s.re
}

/// Leading principal minor by cofactor expansion.
pub fn minor(rows: &[Vec<Complex64>], k: usize) -> f64 {
    fn det(m: &[Vec<Complex64>]) -> Complex64 {
        if m.len() == 1 {
            return m[0][0];
        }
        (0..m.len())
            .map(|j| {
                let sub: Vec<Vec<Complex64>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &v)| v).collect()).collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                m[0][j] * det(&sub) * sign
            })
            .sum()
    }
    let sub: Vec<Vec<Complex64>> = rows[..k].iter().map(|r| r[..k].to_vec()).collect();
    det(&sub).re
}

/// `ρ(x) = ⟨(1, x, …, x^{g−1}), ·⟩_C / |f(x)|` from first principles.
pub fn rho_oracle(roots: &[Complex64], rows: &[Vec<Complex64>], x: Complex64) -> f64 {
    let g = rows.len();
    let v: Vec<Complex64> = (0..g).map(|i| x.powu(i as u32)).collect();
    let f: Complex64 = roots.iter().map(|e| x - e).product();
    quad_form(rows, &v) / f.norm()
}

/// `∂²h/∂x∂x̄ = ¼(h_aa + h_bb)` by the five-point stencil at steps `h` and
/// `h/2`, Richardson-combined.
pub fn ddbar_oracle(h: impl Fn(Complex64) -> f64, x: Complex64, step: f64) -> f64 {
    let lap = |s: f64| {
        (h(x + c(s, 0.0)) + h(x - c(s, 0.0)) + h(x + c(0.0, s)) + h(x - c(0.0, s)) - 4.0 * h(x)) / (4.0 * s * s)
    };
    let (coarse, fine) = (lap(step), lap(step / 2.0));
    fine + (fine - coarse) / 3.0
}

/// `K = −(2/ρ) ∂∂̄ log ρ` in the x-chart.
pub fn curvature_oracle(roots: &[Complex64], rows: &[Vec<Complex64>], x: Complex64) -> f64 {
    let d = roots.iter().map(|e| (x - e).norm()).fold(f64::INFINITY, f64::min);
    let step = 2e-3 * d.min(1.0);
    let rho = |w: Complex64| rho_oracle(roots, rows, w);
    -2.0 / rho(x) * ddbar_oracle(|w| rho(w).ln(), x, step)
}

/// `σ_g(t)` as an explicit sum of powers.
pub fn sigma_oracle(g: usize, t: f64) -> f64 {
    (0..g).map(|i| t.powi(i as i32)).sum()
}

/// `F_P(Q)` for affine `P` and `Q`, straight from the x-chart formula.
pub fn f_point_oracle(g: usize, xp: Complex64, xq: Complex64) -> f64 {
    let t = xq.norm_sqr();
    (xq - xp).norm() / (sigma_oracle(g, t) * (1.0 + t).powi(2)).powf(1.0 / (2 * g + 2) as f64)
}

/// Points with `|x| < 2`, at least `clear` from every root.
pub fn sample_xs(curve: &Curve, n: usize, clear: f64, seed: u64) -> Vec<Complex64> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    while out.len() < n {
        let x = c(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
        if x.norm() < 2.0 && curve.roots().iter().all(|e| (x - e).norm() > clear) {
            out.push(x);
        }
    }
    out
}
