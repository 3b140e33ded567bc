use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Default relative tolerance for [`numeric_rank`].
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

const PIVOT_REL_TOL: f64 = 1e-12;

/// Dense row-major real matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_dim(rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            check_dim(cols, row.len())?;
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols.max(1)).map(<[f64]>::to_vec).collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * k).collect(),
        }
    }

    /// `self += k * other`
    pub fn add_scaled(&mut self, k: f64, other: &Matrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += k * b;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len());
        self.data
            .chunks(self.cols)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Linear combination `sum_k coeffs[k] * mats[k]`.
    pub fn combination(coeffs: &[f64], mats: &[Matrix]) -> Matrix {
        assert_eq!(coeffs.len(), mats.len());
        assert!(!mats.is_empty(), "empty combination");
        let mut out = Matrix::zeros(mats[0].rows, mats[0].cols);
        for (c, m) in coeffs.iter().zip(mats) {
            if *c != 0.0 {
                out.add_scaled(*c, m);
            }
        }
        out
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for row in self.to_rows() {
            writeln!(f, "  {row:?}")?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        mat_mul(self, rhs)
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        let mut out = self.clone();
        out.add_scaled(1.0, rhs);
        out
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        let mut out = self.clone();
        out.add_scaled(-1.0, rhs);
        out
    }
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    assert_eq!(a.cols, b.rows, "inner dimensions differ");
    let mut out = Matrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a[(i, k)];
            if aik == 0.0 {
                continue;
            }
            for j in 0..b.cols {
                out.data[i * b.cols + j] += aik * b.data[k * b.cols + j];
            }
        }
    }
    out
}

/// `AB - BA`
pub fn commutator(a: &Matrix, b: &Matrix) -> Matrix {
    &mat_mul(a, b) - &mat_mul(b, a)
}

pub fn frobenius_norm(a: &Matrix) -> f64 {
    a.frobenius_norm()
}

/// Partially pivoted LU factorization `PA = LU`, reusable across right-hand
/// sides.
#[derive(Clone, Debug)]
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    pub fn factor(a: &Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension {
                expected: a.rows,
                got: a.cols,
            });
        }
        let n = a.rows;
        let threshold = PIVOT_REL_TOL * a.frobenius_norm();
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu[i * n + k].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= threshold || pivot == 0.0 {
                return Err(Error::SingularMatrix { pivot, threshold });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let d = lu[k * n + k];
            for i in (k + 1)..n {
                let f = lu[i * n + k] / d;
                lu[i * n + k] = f;
                if f != 0.0 {
                    for j in (k + 1)..n {
                        lu[i * n + j] -= f * lu[k * n + j];
                    }
                }
            }
        }
        Ok(Self { n, lu, perm, swaps })
    }

    pub fn determinant(&self) -> f64 {
        let sign = if self.swaps % 2 == 0 { 1.0 } else { -1.0 };
        sign * (0..self.n).map(|i| self.lu[i * self.n + i]).product::<f64>()
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n, b.len())?;
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = ((i + 1)..n).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Matrix {
        let n = self.n;
        let mut inv = Matrix::zeros(n, n);
        for j in 0..n {
            let col = self
                .solve(&super::basis_vector(n, j))
                .expect("dimension checked");
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}

pub fn solve_linear(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    Lu::factor(a)?.solve(b)
}

pub fn mat_inv(a: &Matrix) -> Result<Matrix> {
    Ok(Lu::factor(a)?.inverse())
}

/// Column-pivoted Gram-Schmidt over `vectors`; returns the indices of the
/// pivot vectors in selection order. A pivot is accepted while its residual
/// norm exceeds `tol` times the largest initial norm.
pub fn independent_columns(vectors: &[Vec<f64>], tol: f64) -> Vec<usize> {
    assert!(tol > 0.0, "rank tolerance must be positive");
    let Some(dim) = vectors.first().map(Vec::len) else {
        return Vec::new();
    };
    assert!(
        vectors.iter().all(|v| v.len() == dim),
        "vectors must share one dimension"
    );
    let mut work: Vec<Vec<f64>> = vectors.to_vec();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let scale = work.iter().map(|v| norm(v)).fold(0.0, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let mut remaining: Vec<usize> = (0..work.len()).collect();
    let mut pivots = Vec::new();
    while !remaining.is_empty() {
        let (pos, best) = remaining
            .iter()
            .enumerate()
            .map(|(pos, &idx)| (pos, norm(&work[idx])))
            .fold((0, -1.0), |b, c| if c.1 > b.1 { c } else { b });
        if best <= tol * scale {
            break;
        }
        let p = remaining.swap_remove(pos);
        let q: Vec<f64> = work[p].iter().map(|x| x / best).collect();
        for &idx in &remaining {
            let dot: f64 = work[idx].iter().zip(&q).map(|(a, b)| a * b).sum();
            for (w, qi) in work[idx].iter_mut().zip(&q) {
                *w -= dot * qi;
            }
        }
        pivots.push(p);
    }
    pivots
}

/// Number of linearly independent vectors at relative tolerance `tol`.
pub fn numeric_rank(vectors: &[Vec<f64>], tol: f64) -> usize {
    independent_columns(vectors, tol).len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, seed: u64) -> Matrix {
        let mut rng = crate::rng::Xorshift::new(seed);
        let data = (0..n * n).map(|_| rng.uniform(-1.0, 1.0)).collect();
        Matrix::from_vec(n, n, data).unwrap()
    }

    #[test]
    fn solve_identity_and_scaled() {
        let b = vec![1.0, -2.0, 3.5];
        assert_eq!(solve_linear(&Matrix::identity(3), &b).unwrap(), b);
        let x = solve_linear(&Matrix::identity(3).scaled(2.0), &b).unwrap();
        assert_eq!(x, vec![0.5, -1.0, 1.75]);
    }

    #[test]
    fn solve_random_residual() {
        for seed in 0..20 {
            let mut a = sample(6, seed);
            for i in 0..6 {
                a[(i, i)] += 4.0;
            }
            let b: Vec<f64> = (0..6).map(|i| i as f64 - 2.5).collect();
            let x = solve_linear(&a, &b).unwrap();
            let r: f64 = a
                .mul_vec(&x)
                .iter()
                .zip(&b)
                .map(|(p, q)| (p - q).powi(2))
                .sum::<f64>()
                .sqrt();
            let bn = b.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(r <= 1e-10 * (1.0 + bn), "residual {r}");
        }
    }

    #[test]
    fn singular_detected() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(
            solve_linear(&a, &[1.0, 1.0]),
            Err(Error::SingularMatrix { .. })
        ));
        assert!(mat_inv(&a).is_err());
    }

    #[test]
    fn inverse_round_trip() {
        let mut a = sample(5, 7);
        for i in 0..5 {
            a[(i, i)] += 3.0;
        }
        let inv = mat_inv(&a).unwrap();
        let p = Matrix::from_rows(&[vec![0.0, 2.0], vec![3.0, 1.0]]).unwrap();
        assert!((Lu::factor(&p).unwrap().determinant() + 6.0).abs() < 1e-15);
        assert!((&(&a * &inv) - &Matrix::identity(5)).max_abs() < 1e-12);
    }

    #[test]
    fn commutator_basics() {
        let a = sample(4, 1);
        let b = sample(4, 2);
        assert_eq!(commutator(&a, &a).max_abs(), 0.0);
        assert_eq!(commutator(&Matrix::identity(4), &b).max_abs(), 0.0);
        assert_eq!((&commutator(&a, &b) + &commutator(&b, &a)).frobenius_norm(), 0.0);
    }

    #[test]
    fn rank_small_cases() {
        assert_eq!(numeric_rank(&[vec![1.0, 0.0], vec![0.0, 1.0]], 1e-8), 2);
        assert_eq!(numeric_rank(&[vec![1.0, 0.0], vec![2.0, 0.0]], 1e-8), 1);
        assert_eq!(numeric_rank(&[], 1e-8), 0);
        assert_eq!(numeric_rank(&[vec![0.0, 0.0]], 1e-8), 0);
    }
}
