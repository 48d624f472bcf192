//! Sampled fields over an x-plane grid, written as CSV.

use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::calculus::laplacian_fd;
use crate::curve::Curve;
use crate::divisor::{self, Divisor};
use crate::error::{Error, Result};
use crate::metric::{self, HermitianForm};
use crate::mfe::LogNegK;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    /// Gaussian curvature.
    K,
    /// `log(−K)`.
    U,
    /// `F_D` for the configured divisor.
    FD,
    /// `Δu + 6eᵘ` with `u = log(−K)`.
    Residual,
}

impl FromStr for FieldKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "K" => Ok(FieldKind::K),
            "u" => Ok(FieldKind::U),
            "F_D" => Ok(FieldKind::FD),
            "residual" => Ok(FieldKind::Residual),
            other => Err(Error::Invalid(format!("unknown field {other:?} (expected K, u, F_D or residual)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
    /// Nodes per axis.
    pub n: usize,
}

impl FromStr for Grid {
    type Err = Error;
    /// `"xmin,xmax,ymin,ymax,n"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || Error::Invalid(format!("grid {s:?}: expected \"xmin,xmax,ymin,ymax,n\""));
        if parts.len() != 5 {
            return Err(bad());
        }
        let num = |i: usize| parts[i].parse::<f64>().map_err(|_| bad());
        let grid = Grid {
            xmin: num(0)?,
            xmax: num(1)?,
            ymin: num(2)?,
            ymax: num(3)?,
            n: parts[4].parse().map_err(|_| bad())?,
        };
        if grid.n < 2 || !(grid.xmax > grid.xmin) || !(grid.ymax > grid.ymin) {
            return Err(bad());
        }
        Ok(grid)
    }
}

impl Grid {
    /// Node `(i, j)`; `i` runs along the real axis.
    pub fn node(&self, i: usize, j: usize) -> Complex64 {
        let step = |a: f64, b: f64, k: usize| a + (b - a) * k as f64 / (self.n - 1) as f64;
        Complex64::new(step(self.xmin, self.xmax, i), step(self.ymin, self.ymax, j))
    }
}

/// Value of `kind` over `x` on the `+` sheet; `None` marks a masked cell.
pub fn field_value(curve: &Curve, c: &HermitianForm, kind: FieldKind, d: &Divisor, x: Complex64) -> Option<f64> {
    let p = curve.lift_x(x).0;
    let v = match kind {
        FieldKind::K => metric::curvature(curve, c, &p),
        FieldKind::U => metric::u_log_neg_k(curve, c, &p),
        FieldKind::FD => divisor::f_divisor(curve, d, &p),
        FieldKind::Residual => {
            let u = LogNegK { curve, form: c };
            laplacian_fd(curve, c, &u, &p).and_then(|lap| Ok(lap - 6.0 * metric::curvature(curve, c, &p)?))
        }
    };
    v.ok().filter(|v| v.is_finite())
}

/// CSV with header `x_re,x_im,value`, rows ordered by `x_im` then `x_re`.
pub fn field_csv(curve: &Curve, c: &HermitianForm, kind: FieldKind, d: &Divisor, grid: &Grid) -> String {
    let rows: Vec<String> = (0..grid.n)
        .into_par_iter()
        .map(|j| {
            let mut block = String::new();
            for i in 0..grid.n {
                let x = grid.node(i, j);
                let value = field_value(curve, c, kind, d, x).map(|v| v.to_string()).unwrap_or_default();
                writeln!(block, "{},{},{}", x.re, x.im, value).expect("write to string");
            }
            block
        })
        .collect();
    let mut out = String::from("x_re,x_im,value\n");
    for r in rows {
        out.push_str(&r);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: Grid = "-2,2,-2,2,101".parse().unwrap();
        assert_eq!(g.n, 101);
        assert_eq!(g.node(50, 50), Complex64::new(0.0, 0.0));
        assert!("1,2,3".parse::<Grid>().is_err());
        assert!("2,1,0,1,5".parse::<Grid>().is_err());
        assert!("nope".parse::<FieldKind>().is_err());
    }

    #[test]
    fn constant_f_d_for_empty_divisor() {
        let curve = Curve::preset("unity6").unwrap();
        let id = HermitianForm::identity(2);
        let csv = field_csv(&curve, &id, FieldKind::FD, &Divisor::zero(), &"-1,1,-1,1,5".parse().unwrap());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x_re,x_im,value");
        assert_eq!(lines.len(), 26);
        assert!(lines[1..].iter().all(|l| l.ends_with(",1")));
    }

    #[test]
    fn u_is_masked_at_a_weierstrass_point() {
        let curve = Curve::preset("unity6").unwrap();
        let id = HermitianForm::identity(2);
        let csv = field_csv(&curve, &id, FieldKind::U, &Divisor::zero(), &"-1,1,-1,1,3".parse().unwrap());
        assert!(csv.lines().any(|l| l == "1,0,"));
    }
}
