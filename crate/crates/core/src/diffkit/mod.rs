//! Differentiation and dense linear algebra substrate.

mod jet;
mod linalg;

pub use jet::{Jet1, Jet2, Scalar};
pub use linalg::{
    commutator, frobenius_norm, independent_columns, mat_inv, mat_mul, numeric_rank,
    solve_linear, Lu, Matrix, DEFAULT_RANK_TOL,
};

use crate::error::{check_dim, Result};

/// A map `R^m -> R^p` that can be evaluated over any [`Scalar`].
pub trait VectorMap {
    fn eval<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>>;
}

impl<M: VectorMap + ?Sized> VectorMap for &M {
    fn eval<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        (**self).eval(x)
    }
}

/// Value and directional derivative `Df(x)·u`.
pub fn jet1_eval<M: VectorMap>(f: &M, x: &[f64], u: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    check_dim(x.len(), u.len())?;
    let seeded: Vec<Jet1> = x.iter().zip(u).map(|(&a, &b)| Jet1::new(a, b)).collect();
    let out = f.eval(&seeded)?;
    Ok(out.iter().map(|j| (j.value, j.deriv)).unzip())
}

/// Output of [`jet2_eval`].
#[derive(Clone, Debug, PartialEq)]
pub struct SecondOrder {
    pub value: Vec<f64>,
    pub du: Vec<f64>,
    pub dv: Vec<f64>,
    pub dudv: Vec<f64>,
}

/// Value, both directional derivatives and the mixed second derivative
/// `D²f(x)[u, v]`.
pub fn jet2_eval<M: VectorMap>(f: &M, x: &[f64], u: &[f64], v: &[f64]) -> Result<SecondOrder> {
    check_dim(x.len(), u.len())?;
    check_dim(x.len(), v.len())?;
    let seeded: Vec<Jet2> = (0..x.len())
        .map(|i| Jet2::new(x[i], u[i], v[i], 0.0))
        .collect();
    let out = f.eval(&seeded)?;
    Ok(SecondOrder {
        value: out.iter().map(|j| j.value).collect(),
        du: out.iter().map(|j| j.du).collect(),
        dv: out.iter().map(|j| j.dv).collect(),
        dudv: out.iter().map(|j| j.dudv).collect(),
    })
}

fn offset(x: &[f64], dirs: &[(f64, &[f64])]) -> Vec<f64> {
    let mut p = x.to_vec();
    for (k, d) in dirs {
        for (pi, di) in p.iter_mut().zip(d.iter()) {
            *pi += k * di;
        }
    }
    p
}

/// Central difference `(f(x+hu) - f(x-hu)) / 2h`.
pub fn fd_directional<F>(f: F, x: &[f64], u: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    check_dim(x.len(), u.len())?;
    assert!(h > 0.0, "finite-difference step must be positive");
    let plus = f(&offset(x, &[(h, u)]))?;
    let minus = f(&offset(x, &[(-h, u)]))?;
    Ok(plus
        .iter()
        .zip(&minus)
        .map(|(p, m)| (p - m) / (2.0 * h))
        .collect())
}

/// Nested central difference for the mixed derivative `D²f(x)[u, v]`.
pub fn fd_mixed<F>(f: F, x: &[f64], u: &[f64], v: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    check_dim(x.len(), u.len())?;
    check_dim(x.len(), v.len())?;
    assert!(h > 0.0, "finite-difference step must be positive");
    let pp = f(&offset(x, &[(h, u), (h, v)]))?;
    let pm = f(&offset(x, &[(h, u), (-h, v)]))?;
    let mp = f(&offset(x, &[(-h, u), (h, v)]))?;
    let mm = f(&offset(x, &[(-h, u), (-h, v)]))?;
    Ok((0..pp.len())
        .map(|i| (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * h * h))
        .collect())
}

/// Step used for first-order central differences.
pub const FD_STEP: f64 = 1e-5;
/// Step used for nested (mixed second-order) central differences.
pub const FD_MIXED_STEP: f64 = 1e-4;

/// How derivative assemblies are computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Differentiation {
    /// Forward-mode jets; exact up to rounding.
    #[default]
    Jet,
    /// Central differences with [`FD_STEP`] / [`FD_MIXED_STEP`].
    CentralDifference,
}

impl Differentiation {
    pub fn directional<M: VectorMap>(&self, f: &M, x: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        match self {
            Self::Jet => Ok(jet1_eval(f, x, u)?.1),
            Self::CentralDifference => fd_directional(|p| f.eval(p), x, u, FD_STEP),
        }
    }

    pub fn mixed<M: VectorMap>(&self, f: &M, x: &[f64], u: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        match self {
            Self::Jet => Ok(jet2_eval(f, x, u, v)?.dudv),
            Self::CentralDifference => fd_mixed(|p| f.eval(p), x, u, v, FD_MIXED_STEP),
        }
    }
}

/// The `i`-th standard basis vector of `R^n`.
pub fn basis_vector(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}
