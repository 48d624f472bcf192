//! Second-derivative stencils in a complex coordinate.
//!
//! `∂²/∂w∂w̄ = ¼(∂²_aa + ∂²_bb)` for `w = a + ib`, approximated by the
//! five-point Laplacian stencil at steps `h` and `h/2` and combined by one
//! Richardson step, which cancels the `O(h²)` term.

use num_complex::Complex64;

use crate::error::Result;

/// Step for the extrapolated stencil: `ε^{1/6}·(1 + |w|)`.
pub fn step(at: Complex64) -> f64 {
    f64::EPSILON.powf(1.0 / 6.0) * (1.0 + at.norm())
}

fn stencil<F>(f: &F, at: Complex64, center: f64, h: f64) -> Result<f64>
where
    F: Fn(Complex64) -> Result<f64>,
{
    let i = Complex64::new(0.0, 1.0);
    let sum = f(at + h)? + f(at - h)? + f(at + i * h)? + f(at - i * h)?;
    Ok((sum - 4.0 * center) / (4.0 * h * h))
}

/// Richardson-extrapolated `∂²f/∂w∂w̄` at `at`.
pub fn ddbar<F>(f: F, at: Complex64) -> Result<f64>
where
    F: Fn(Complex64) -> Result<f64>,
{
    ddbar_with_step(f, at, step(at))
}

pub fn ddbar_with_step<F>(f: F, at: Complex64, h: f64) -> Result<f64>
where
    F: Fn(Complex64) -> Result<f64>,
{
    let center = f(at)?;
    let coarse = stencil(&f, at, center, h)?;
    let fine = stencil(&f, at, center, 0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}
