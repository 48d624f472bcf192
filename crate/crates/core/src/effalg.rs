//! The algebra `Eff(X)`: formal combinations `a₀ + Σ a_D F_D` over
//! ι-canonical effective divisors, filtered by degree.

use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use num_complex::Complex64;

use crate::curve::{Curve, SurfacePoint};
use crate::divisor::{self, Divisor, PointKey};
use crate::error::{Error, Result};

type TermKey = Vec<(PointKey, i64)>;

#[derive(Clone, Debug, PartialEq)]
pub struct EffElement {
    constant: Complex64,
    terms: BTreeMap<TermKey, (Divisor, Complex64)>,
}

impl Default for EffElement {
    fn default() -> Self {
        EffElement::constant(Complex64::new(0.0, 0.0))
    }
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl EffElement {
    pub fn constant(a: Complex64) -> Self {
        EffElement { constant: a, terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        EffElement::constant(Complex64::new(1.0, 0.0))
    }

    /// `a·F_D` for an effective divisor of positive degree.
    pub fn term(a: Complex64, d: &Divisor) -> Result<Self> {
        if !d.is_effective() || d.is_zero() {
            return Err(Error::NotEffective);
        }
        let mut e = EffElement::constant(zero());
        e.push(d.iota_canonical(), a);
        Ok(e)
    }

    pub fn generator(d: &Divisor) -> Result<Self> {
        EffElement::term(Complex64::new(1.0, 0.0), d)
    }

    fn push(&mut self, canonical: Divisor, a: Complex64) {
        if a == zero() {
            return;
        }
        let key: TermKey = canonical.keys().collect();
        let slot = self.terms.entry(key.clone()).or_insert((canonical, zero()));
        slot.1 += a;
        if slot.1 == zero() {
            self.terms.remove(&key);
        }
    }

    pub fn constant_term(&self) -> Complex64 {
        self.constant
    }

    /// `(divisor, coefficient)` pairs in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Divisor, Complex64)> {
        self.terms.values().map(|(d, a)| (d, *a))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Largest term degree, 0 for constants.
    pub fn degree(&self) -> i64 {
        self.terms.values().map(|(d, _)| d.degree()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &EffElement) -> EffElement {
        let mut out = self.clone();
        out.constant += other.constant;
        for (d, a) in other.terms.values() {
            out.push(d.clone(), *a);
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> EffElement {
        let mut out = EffElement::constant(self.constant * s);
        for (d, a) in self.terms.values() {
            out.push(d.clone(), a * s);
        }
        out
    }

    pub fn mul(&self, other: &EffElement) -> EffElement {
        let mut out = EffElement::constant(self.constant * other.constant);
        for (d, a) in other.terms.values() {
            out.push(d.clone(), self.constant * a);
        }
        for (d, a) in self.terms.values() {
            out.push(d.clone(), a * other.constant);
            for (e, b) in other.terms.values() {
                out.push((d.clone() + e.clone()).iota_canonical(), a * b);
            }
        }
        out
    }

    /// Coefficientwise conjugation; each `F_D` is real.
    pub fn star(&self) -> EffElement {
        let mut out = EffElement::constant(self.constant.conj());
        for (d, a) in self.terms.values() {
            out.push(d.clone(), a.conj());
        }
        out
    }

    pub fn eval(&self, curve: &Curve, q: &SurfacePoint) -> Complex64 {
        self.terms.values().fold(self.constant, |acc, (d, a)| {
            let f = divisor::f_divisor(curve, d, q).expect("effective divisors have no poles");
            acc + a * f
        })
    }
}

impl Add for &EffElement {
    type Output = EffElement;
    fn add(self, rhs: &EffElement) -> EffElement {
        EffElement::add(self, rhs)
    }
}

impl Mul for &EffElement {
    type Output = EffElement;
    fn mul(self, rhs: &EffElement) -> EffElement {
        EffElement::mul(self, rhs)
    }
}

/// Outcome of [`separates`].
#[derive(Clone, Debug, PartialEq)]
pub enum Separation {
    Witness { element: EffElement, values: (f64, f64) },
    NoSeparation,
}

fn orbit_key(p: &SurfacePoint) -> PointKey {
    PointKey::of(&divisor::canonical_point(p), divisor::POINT_QUANTUM)
}

/// A generator vanishing at `q1` but not at `q2`, unless the two points lie
/// in the same ι-orbit.
pub fn separates(curve: &Curve, q1: &SurfacePoint, q2: &SurfacePoint) -> Separation {
    if orbit_key(q1) == orbit_key(q2) {
        return Separation::NoSeparation;
    }
    let element = EffElement::generator(&Divisor::point(*q1)).expect("a point is effective");
    let v1 = element.eval(curve, q1).norm();
    let v2 = element.eval(curve, q2).norm();
    if v2 == 0.0 {
        return Separation::NoSeparation;
    }
    Separation::Witness { element, values: (v1, v2) }
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
    fn product_of_generators_is_one_term() {
        let curve = unity6();
        let p = curve.lift_x(c(0.2, 0.1)).0;
        let q = curve.lift_x(c(-0.5, 0.3)).1;
        let (d, e) = (Divisor::point(p), Divisor::from_points([(q, 2)]));
        let prod = EffElement::generator(&d).unwrap().mul(&EffElement::generator(&e).unwrap());
        assert_eq!(prod, EffElement::generator(&(d + e)).unwrap());
        assert_eq!(prod.num_terms(), 1);
        assert_eq!(prod.degree(), 3);
    }

    #[test]
    fn unit_and_star() {
        let curve = unity6();
        let p = curve.lift_x(c(0.2, 0.1)).0;
        let e = EffElement::term(c(0.0, 1.0), &Divisor::point(p)).unwrap().add(&EffElement::constant(c(2.0, -1.0)));
        assert_eq!(e.mul(&EffElement::one()), e);
        assert_eq!(e.star().star(), e);
        let t = EffElement::term(c(0.0, 1.0), &Divisor::point(p)).unwrap();
        assert_eq!(t.star(), EffElement::term(c(0.0, -1.0), &Divisor::point(p)).unwrap());
    }

    #[test]
    fn canonical_keys_merge_sheets() {
        let curve = unity6();
        let (p, ip) = curve.lift_x(c(0.2, 0.1));
        let sum = EffElement::generator(&Divisor::point(p)).unwrap().add(&EffElement::generator(&Divisor::point(ip)).unwrap());
        assert_eq!(sum.num_terms(), 1);
        assert_eq!(sum.terms().next().unwrap().1, c(2.0, 0.0));
    }

    #[test]
    fn rejects_non_effective_terms() {
        let curve = unity6();
        let p = curve.lift_x(c(0.2, 0.1)).0;
        assert_eq!(EffElement::generator(&Divisor::point(p).negate()), Err(Error::NotEffective));
        assert_eq!(EffElement::generator(&Divisor::zero()), Err(Error::NotEffective));
    }

    #[test]
    fn separation_examples() {
        let curve = unity6();
        let q1 = curve.point(c(0., 0.), c(0., 1.)).unwrap();
        let q2 = curve.point(c(1., 0.), c(0., 0.)).unwrap();
        match separates(&curve, &q1, &q2) {
            Separation::Witness { values, .. } => {
                assert_eq!(values.0, 0.0);
                assert!((values.1 - 0.5f64.sqrt()).abs() < 1e-15);
            }
            Separation::NoSeparation => panic!("expected a witness"),
        }
        assert_eq!(separates(&curve, &q1, &q1.involution()), Separation::NoSeparation);
        match separates(&curve, &SurfacePoint::InfinityPlus, &q1) {
            Separation::Witness { values, .. } => {
                assert_eq!(values.0, 0.0);
                assert!((values.1 - 1.0).abs() < 1e-15);
            }
            Separation::NoSeparation => panic!("expected a witness"),
        }
    }
}
