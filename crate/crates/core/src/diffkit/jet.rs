//! Forward-mode jets.
//!
//! [`Jet1`] carries a value and one directional derivative, [`Jet2`] carries
//! two independent seed directions together with the mixed second partial.
//! Both implement [`Scalar`], as does plain `f64`, so every map in the crate
//! can be written once and evaluated at any differentiation order.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Real-like scalar over which the algebra and the loop maps are generic.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Constant lift (all derivative parts zero).
    fn from_f64(v: f64) -> Self;

    /// The primal value.
    fn value(&self) -> f64;

    /// Square root; the argument's value must be strictly positive.
    fn sqrt_checked(self) -> Result<Self>;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn scale(self, k: f64) -> Self {
        self * Self::from_f64(k)
    }
}

fn sqrt_domain(v: f64) -> Result<()> {
    if v > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("sqrt of non-positive value {v:e}")))
    }
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }

    fn value(&self) -> f64 {
        *self
    }

    fn sqrt_checked(self) -> Result<Self> {
        sqrt_domain(self)?;
        Ok(self.sqrt())
    }
}

/// Value plus one directional derivative.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Jet1 {
    pub value: f64,
    pub deriv: f64,
}

impl Jet1 {
    pub fn new(value: f64, deriv: f64) -> Self {
        Self { value, deriv }
    }

    pub fn constant(value: f64) -> Self {
        Self { value, deriv: 0.0 }
    }
}

impl Add for Jet1 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.value + o.value, self.deriv + o.deriv)
    }
}

impl Sub for Jet1 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.value - o.value, self.deriv - o.deriv)
    }
}

impl Mul for Jet1 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.value * o.value,
            self.value * o.deriv + self.deriv * o.value,
        )
    }
}

impl Div for Jet1 {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = 1.0 / o.value;
        Self::new(
            self.value * inv,
            (self.deriv * o.value - self.value * o.deriv) * inv * inv,
        )
    }
}

impl Neg for Jet1 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.value, -self.deriv)
    }
}

impl Scalar for Jet1 {
    fn from_f64(v: f64) -> Self {
        Self::constant(v)
    }

    fn value(&self) -> f64 {
        self.value
    }

    fn sqrt_checked(self) -> Result<Self> {
        sqrt_domain(self.value)?;
        let s = self.value.sqrt();
        Ok(Self::new(s, self.deriv / (2.0 * s)))
    }
}

/// Value, two first-order directional derivatives `du`, `dv`, and the mixed
/// second derivative `dudv`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Jet2 {
    pub value: f64,
    pub du: f64,
    pub dv: f64,
    pub dudv: f64,
}

impl Jet2 {
    pub fn new(value: f64, du: f64, dv: f64, dudv: f64) -> Self {
        Self { value, du, dv, dudv }
    }

    pub fn constant(value: f64) -> Self {
        Self::new(value, 0.0, 0.0, 0.0)
    }

    /// Restriction to the `u` direction.
    pub fn along_u(&self) -> Jet1 {
        Jet1::new(self.value, self.du)
    }

    /// Restriction to the `v` direction.
    pub fn along_v(&self) -> Jet1 {
        Jet1::new(self.value, self.dv)
    }

    fn recip(self) -> Self {
        let inv = 1.0 / self.value;
        let inv2 = inv * inv;
        Self::new(
            inv,
            -self.du * inv2,
            -self.dv * inv2,
            2.0 * self.du * self.dv * inv2 * inv - self.dudv * inv2,
        )
    }
}

impl Add for Jet2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(
            self.value + o.value,
            self.du + o.du,
            self.dv + o.dv,
            self.dudv + o.dudv,
        )
    }
}

impl Sub for Jet2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(
            self.value - o.value,
            self.du - o.du,
            self.dv - o.dv,
            self.dudv - o.dudv,
        )
    }
}

impl Mul for Jet2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.value * o.value,
            self.value * o.du + self.du * o.value,
            self.value * o.dv + self.dv * o.value,
            self.value * o.dudv + self.du * o.dv + self.dv * o.du + self.dudv * o.value,
        )
    }
}

impl Div for Jet2 {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl Neg for Jet2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.value, -self.du, -self.dv, -self.dudv)
    }
}

impl Scalar for Jet2 {
    fn from_f64(v: f64) -> Self {
        Self::constant(v)
    }

    fn value(&self) -> f64 {
        self.value
    }

    fn sqrt_checked(self) -> Result<Self> {
        sqrt_domain(self.value)?;
        let s = self.value.sqrt();
        let half_inv = 0.5 / s;
        Ok(Self::new(
            s,
            self.du * half_inv,
            self.dv * half_inv,
            self.dudv * half_inv - self.du * self.dv * half_inv / (2.0 * self.value),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule() {
        let a = Jet1::new(3.0, 0.5);
        let b = Jet1::new(-2.0, 4.0);
        assert_eq!((a * b).deriv, 3.0 * 4.0 + 0.5 * -2.0);
    }

    #[test]
    fn sqrt_rejects_non_positive() {
        assert!(Jet1::new(0.0, 1.0).sqrt_checked().is_err());
        assert!(Jet2::constant(-1.0).sqrt_checked().is_err());
        assert!((-1.0f64).sqrt_checked().is_err());
    }

    #[test]
    fn jet2_restricts_to_jet1() {
        let a = Jet2::new(1.5, 0.3, -0.7, 0.2);
        let b = Jet2::new(-0.4, 1.1, 0.9, -0.5);
        for (j2, j1) in [
            (a * b, a.along_u() * b.along_u()),
            (a / b, a.along_u() / b.along_u()),
            (a - b, a.along_u() - b.along_u()),
        ] {
            assert!((j2.value - j1.value).abs() < 1e-15);
            assert!((j2.du - j1.deriv).abs() < 1e-14);
        }
        let s2 = a.sqrt_checked().unwrap();
        let s1 = a.along_v().sqrt_checked().unwrap();
        assert!((s2.dv - s1.deriv).abs() < 1e-15);
    }

    #[test]
    fn sqrt_second_derivative() {
        // d2/dt2 sqrt(t) at t = 4 is -1/(4 t^{3/2}) = -1/32
        let t = Jet2::new(4.0, 1.0, 1.0, 0.0);
        let s = t.sqrt_checked().unwrap();
        assert!((s.dudv + 1.0 / 32.0).abs() < 1e-15);
    }
}
