//! Analytic Moufang loops as unit spheres of Cayley-Dickson algebras.
//!
//! A loop element near the identity is coordinatized by the imaginary part of
//! its unit representative: `x ↦ sqrt(1 - |x|²) e_0 + Σ x^i e_i`. The identity
//! sits at the origin and inversion is negation.

use serde::{Deserialize, Serialize};

use crate::algebra::CdElement;
use crate::diffkit::{Scalar, VectorMap};
use crate::error::{check_dim, Error, Result};

/// Tolerance on `|norm² - 1|` accepted by [`project`].
pub const UNIT_TOL: f64 = 1e-9;
pub const DEFAULT_RADIUS: f64 = 0.5;
/// Radius used by checks that compose three or more products.
pub const TIGHT_RADIUS: f64 = 0.35;

/// Coordinates of a loop element; the identity is the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LoopPoint(pub Vec<f64>);

impl LoopPoint {
    pub fn origin(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &LoopPoint) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

impl From<Vec<f64>> for LoopPoint {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Bracketings of the unparenthesized commutator `g h g⁻¹ h⁻¹`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Bracketing {
    /// `((g h) g⁻¹) h⁻¹`
    #[default]
    LeftToRight,
    /// `(g h)(g⁻¹ h⁻¹)`
    Paired,
    /// `g (h (g⁻¹ h⁻¹))`
    RightNested,
}

pub fn embed<S: Scalar>(level: u32, x: &[S]) -> Result<CdElement<S>> {
    check_dim((1usize << level) - 1, x.len())?;
    let n2 = x.iter().fold(S::zero(), |acc, v| acc + *v * *v);
    if n2.value() >= 1.0 {
        return Err(Error::ChartDomain(format!(
            "|x|^2 = {} is outside the unit ball",
            n2.value()
        )));
    }
    let real = (S::one() - n2).sqrt_checked()?;
    let mut coeffs = Vec::with_capacity(x.len() + 1);
    coeffs.push(real);
    coeffs.extend_from_slice(x);
    CdElement::new(level, coeffs)
}

pub fn project<S: Scalar>(u: &CdElement<S>) -> Result<Vec<S>> {
    let dev = (u.norm2().value() - 1.0).abs();
    if dev > UNIT_TOL {
        return Err(Error::NotUnit(dev));
    }
    if u.real().value() <= 0.0 {
        return Err(Error::ChartDomain(format!(
            "real part {} is not positive",
            u.real().value()
        )));
    }
    Ok(u.coeffs()[1..].to_vec())
}

pub fn mul_coords<S: Scalar>(level: u32, x: &[S], y: &[S]) -> Result<Vec<S>> {
    project(&embed(level, x)?.mul(&embed(level, y)?)?)
}

pub fn inv_coords<S: Scalar>(x: &[S]) -> Vec<S> {
    x.iter().map(|v| -*v).collect()
}

pub fn commutator_coords<S: Scalar>(
    level: u32,
    g: &[S],
    h: &[S],
    bracketing: Bracketing,
) -> Result<Vec<S>> {
    let (gi, hi) = (inv_coords(g), inv_coords(h));
    let m = |a: &[S], b: &[S]| mul_coords(level, a, b);
    match bracketing {
        Bracketing::LeftToRight => m(&m(&m(g, h)?, &gi)?, &hi),
        Bracketing::Paired => m(&m(g, h)?, &m(&gi, &hi)?),
        Bracketing::RightNested => m(g, &m(h, &m(&gi, &hi)?)?),
    }
}

/// A coordinatized unit-sphere loop of a Cayley-Dickson algebra.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoopChart {
    level: u32,
    radius: f64,
}

impl LoopChart {
    /// Levels 1 (circle), 2 (unit quaternions) and 3 (unit octonions).
    pub fn new(level: u32) -> Result<Self> {
        if !(1..=3).contains(&level) {
            return Err(Error::UnsupportedLevel(level));
        }
        Ok(Self {
            level,
            radius: DEFAULT_RADIUS,
        })
    }

    pub fn with_radius(mut self, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::Config(format!("sampling radius {radius} not in (0, 1)")));
        }
        self.radius = radius;
        Ok(self)
    }

    pub fn circle() -> Self {
        Self::new(1).expect("level 1")
    }

    pub fn quaternion() -> Self {
        Self::new(2).expect("level 2")
    }

    pub fn octonion() -> Self {
        Self::new(3).expect("level 3")
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Loop dimension `r = 2^k - 1`.
    pub fn dim(&self) -> usize {
        (1 << self.level) - 1
    }

    /// Dimension of the ambient algebra.
    pub fn ambient_dim(&self) -> usize {
        1 << self.level
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn identity(&self) -> LoopPoint {
        LoopPoint::origin(self.dim())
    }

    pub fn embed(&self, x: &LoopPoint) -> Result<CdElement<f64>> {
        embed(self.level, x.coords())
    }

    pub fn project(&self, u: &CdElement<f64>) -> Result<LoopPoint> {
        if u.level() != self.level {
            return Err(Error::LevelMismatch(u.level(), self.level));
        }
        project(u).map(LoopPoint)
    }

    pub fn mul(&self, x: &LoopPoint, y: &LoopPoint) -> Result<LoopPoint> {
        mul_coords(self.level, x.coords(), y.coords()).map(LoopPoint)
    }

    pub fn inv(&self, x: &LoopPoint) -> LoopPoint {
        LoopPoint(inv_coords(x.coords()))
    }

    /// `|(ag)(ha) - (a(gh))a|`
    pub fn moufang_residual(&self, a: &LoopPoint, g: &LoopPoint, h: &LoopPoint) -> Result<f64> {
        let lhs = self.mul(&self.mul(a, g)?, &self.mul(h, a)?)?;
        let gh = self.mul(g, h)?;
        let rhs = self.mul(&self.mul(a, &gh)?, a)?;
        Ok(lhs.distance(&rhs))
    }

    /// `|(ab)a - a(ba)|`; the two readings of `a(gh)a` use `b = gh`.
    pub fn flexibility_residual(&self, a: &LoopPoint, b: &LoopPoint) -> Result<f64> {
        let lhs = self.mul(&self.mul(a, b)?, a)?;
        let rhs = self.mul(a, &self.mul(b, a)?)?;
        Ok(lhs.distance(&rhs))
    }

    /// `|(xy)z - x(yz)|`
    pub fn associator_norm(&self, x: &LoopPoint, y: &LoopPoint, z: &LoopPoint) -> Result<f64> {
        let lhs = self.mul(&self.mul(x, y)?, z)?;
        let rhs = self.mul(x, &self.mul(y, z)?)?;
        Ok(lhs.distance(&rhs))
    }

    /// `|a(a⁻¹b) - b|`
    pub fn left_inverse_residual(&self, a: &LoopPoint, b: &LoopPoint) -> Result<f64> {
        Ok(self.mul(a, &self.mul(&self.inv(a), b)?)?.distance(b))
    }

    pub fn commutator_map(&self, g: &LoopPoint, h: &LoopPoint) -> Result<LoopPoint> {
        commutator_coords(self.level, g.coords(), h.coords(), Bracketing::default()).map(LoopPoint)
    }

    /// `(g, h) ↦ gh` on the concatenated coordinates `(g, h) ∈ R^{2r}`.
    pub fn product_map(&self) -> ProductMap {
        ProductMap { level: self.level }
    }

    /// `(g, h) ↦ g h g⁻¹ h⁻¹` on concatenated coordinates.
    pub fn commutator_map_fn(&self, bracketing: Bracketing) -> CommutatorMap {
        CommutatorMap {
            level: self.level,
            bracketing,
        }
    }
}

fn split_pair<S: Scalar>(level: u32, gh: &[S]) -> Result<(&[S], &[S])> {
    let r = (1usize << level) - 1;
    check_dim(2 * r, gh.len())?;
    Ok(gh.split_at(r))
}

#[derive(Clone, Copy, Debug)]
pub struct ProductMap {
    level: u32,
}

impl VectorMap for ProductMap {
    fn eval<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        let (g, h) = split_pair(self.level, x)?;
        mul_coords(self.level, g, h)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CommutatorMap {
    level: u32,
    bracketing: Bracketing,
}

impl VectorMap for CommutatorMap {
    fn eval<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        let (g, h) = split_pair(self.level, x)?;
        commutator_coords(self.level, g, h, self.bracketing)
    }
}
