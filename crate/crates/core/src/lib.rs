//! Canonical-metric geometry of complex hyperelliptic curves `y² = f(x)`.
//!
//! The crate evaluates the conformal factor and Gaussian curvature of the
//! canonical metric in every chart of the compactified curve, builds the
//! divisor functions `F_D` and the algebra they span, and certifies the
//! associated mean field equations numerically: pointwise through
//! finite-difference Laplacians and distributionally through ε-excised
//! Green pairings against bump test functions.
//!
//! Module map:
//!
//! * [`curve`]: roots, points, involution, chart atlas.
//! * [`metric`]: Hermitian forms, conformal factors, curvature, `Φ`.
//! * [`divisor`]: divisors, `α`, `δ_D`, `F_P`, `F_D`, `u_D`.
//! * [`effalg`]: the filtered *-algebra spanned by `1` and the `F_D`.
//! * [`calculus`]: finite differences, plane quadrature, Green pairings.
//! * [`mfe`]: residual evaluators and distributional certificates.
//! * [`suites`], [`io`], [`field`]: the verification driver behind the CLI.

pub mod calculus;
pub mod curve;
pub mod divisor;
pub mod effalg;
pub mod error;
pub mod field;
pub mod io;
pub mod metric;
pub mod mfe;
pub mod suites;

pub use num_complex::Complex64;

pub use crate::curve::{ChartKind, ChartRef, Curve, SurfacePoint};
pub use crate::divisor::Divisor;
pub use crate::effalg::EffElement;
pub use crate::error::{Error, Result};
pub use crate::metric::HermitianForm;
