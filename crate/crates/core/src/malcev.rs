//! Tangent algebra of a loop chart.
//!
//! Structure constants are the mixed second derivatives of the commutator map
//! at the identity; structure functions `c(g)` solve the generalized
//! Maurer-Cartan equations
//!
//! ```text
//! v_j^n(g) ∂_n v_k^i(g) - v_k^n(g) ∂_n v_j^i(g) = c^n_jk(g) v_n^i(g)
//! ```
//!
//! where `v_j^n(g) = ∂(gh)^n/∂h^j` at `h = e`. No factor ½ is inserted, so the
//! octonion bracket is twice the ambient commutator's imaginary part per unit
//! (`[e_1, e_2] = 2 e_3`).

use serde::{Deserialize, Serialize};

use crate::algebra::basis_table;
use crate::chart::{Bracketing, LoopChart, LoopPoint};
use crate::diffkit::{basis_vector, Differentiation, Lu, Matrix};
use crate::error::Result;

/// Rank-3 tensor `t[i][j][k]` over `r` coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    r: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(r: usize) -> Self {
        Self {
            r,
            data: vec![0.0; r * r * r],
        }
    }

    pub fn dim(&self) -> usize {
        self.r
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.r + j) * self.r + k]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        self.data[(i * self.r + j) * self.r + k] = v;
    }

    /// The vector `t[·][j][k]`.
    pub fn slice(&self, j: usize, k: usize) -> Vec<f64> {
        (0..self.r).map(|i| self.get(i, j, k)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Tensor3) -> f64 {
        assert_eq!(self.r, other.r);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `max |t[i][j][k] + t[i][k][j]|`
    pub fn asymmetry(&self) -> f64 {
        let r = self.r;
        let mut worst: f64 = 0.0;
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    worst = worst.max((self.get(i, j, k) + self.get(i, k, j)).abs());
                }
            }
        }
        worst
    }

    /// Replace the tensor by its antisymmetric part in the lower indices.
    pub fn antisymmetrized(&self) -> Self {
        let r = self.r;
        let mut out = Self::zeros(r);
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    out.set(i, j, k, 0.5 * (self.get(i, j, k) - self.get(i, k, j)));
                }
            }
        }
        out
    }

    pub fn export(&self) -> TensorExport {
        let r = self.r;
        let mut entries = Vec::new();
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    let value = self.get(i, j, k);
                    if value.abs() >= EXPORT_ZERO {
                        entries.push(TensorEntry {
                            i: i + 1,
                            j: j + 1,
                            k: k + 1,
                            value,
                        });
                    }
                }
            }
        }
        TensorExport { r, entries }
    }

    pub fn from_export(export: &TensorExport) -> Self {
        let mut t = Self::zeros(export.r);
        for e in &export.entries {
            t.set(e.i - 1, e.j - 1, e.k - 1, e.value);
        }
        t
    }
}

/// Entries smaller than this in magnitude are omitted from exports.
pub const EXPORT_ZERO: f64 = 1e-12;

/// One nonzero tensor entry; indices are 1-based and match the basis units
/// `e_1..e_r` of the ambient algebra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorExport {
    pub r: usize,
    pub entries: Vec<TensorEntry>,
}

/// Anything that carries a bracket tensor `c^i_jk`.
pub trait BracketTensor {
    fn tensor(&self) -> &Tensor3;
}

impl BracketTensor for Tensor3 {
    fn tensor(&self) -> &Tensor3 {
        self
    }
}

/// Structure constants of the tangent algebra at the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants {
    pub tensor: Tensor3,
    /// `max |c_ijk + c_ikj|` before antisymmetrization.
    pub raw_asymmetry: f64,
}

impl BracketTensor for StructureConstants {
    fn tensor(&self) -> &Tensor3 {
        &self.tensor
    }
}

/// Structure functions `c^n_jk(g)` of the derivative algebra at `base`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureFunctions {
    pub base: LoopPoint,
    pub tensor: Tensor3,
    pub raw_asymmetry: f64,
}

impl BracketTensor for StructureFunctions {
    fn tensor(&self) -> &Tensor3 {
        &self.tensor
    }
}

/// `V[n][j] = v_j^n(g)`, the Jacobian of `h ↦ gh` at `h = e`.
#[derive(Clone, Debug, PartialEq)]
pub struct AuxiliaryMatrix {
    pub base: LoopPoint,
    pub matrix: Matrix,
}

impl AuxiliaryMatrix {
    /// Column `j`: the vector `v_j(g)`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.matrix.column(j)
    }
}

fn pair(first: &[f64], second: &[f64]) -> Vec<f64> {
    let mut v = first.to_vec();
    v.extend_from_slice(second);
    v
}

pub fn structure_constants(chart: &LoopChart) -> Result<StructureConstants> {
    structure_constants_with(chart, Differentiation::Jet, Bracketing::LeftToRight)
}

pub fn structure_constants_with(
    chart: &LoopChart,
    diff: Differentiation,
    bracketing: Bracketing,
) -> Result<StructureConstants> {
    let r = chart.dim();
    let map = chart.commutator_map_fn(bracketing);
    let origin = vec![0.0; 2 * r];
    let zero = vec![0.0; r];
    let mut raw = Tensor3::zeros(r);
    for j in 0..r {
        let u = pair(&basis_vector(r, j), &zero);
        for k in 0..r {
            let v = pair(&zero, &basis_vector(r, k));
            let d = diff.mixed(&map, &origin, &u, &v)?;
            for (i, val) in d.into_iter().enumerate() {
                raw.set(i, j, k, val);
            }
        }
    }
    Ok(StructureConstants {
        raw_asymmetry: raw.asymmetry(),
        tensor: raw.antisymmetrized(),
    })
}

/// Bracket tensor read off the basis table: `c^m_ij` is the `e_m` coefficient
/// of `e_i e_j - e_j e_i`. Independent of the chart and of differentiation.
pub fn ambient_commutator_tensor(level: u32) -> Result<Tensor3> {
    let table = basis_table(level)?;
    let r = table.dim() - 1;
    let mut c = Tensor3::zeros(r);
    for i in 1..=r {
        for j in 1..=r {
            for ((sign, m), k) in [(table.product(i, j), 1.0), (table.product(j, i), -1.0)] {
                if m >= 1 {
                    let cur = c.get(m - 1, i - 1, j - 1);
                    c.set(m - 1, i - 1, j - 1, cur + k * f64::from(sign));
                }
            }
        }
    }
    Ok(c)
}

/// `[x, y]^i = c^i_jk x^j y^k`
pub fn bracket<C: BracketTensor + ?Sized>(c: &C, x: &[f64], y: &[f64]) -> Vec<f64> {
    let t = c.tensor();
    let r = t.dim();
    assert_eq!(x.len(), r, "tangent vector dimension");
    assert_eq!(y.len(), r, "tangent vector dimension");
    let mut out = vec![0.0; r];
    for (i, o) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for j in 0..r {
            if x[j] == 0.0 {
                continue;
            }
            for k in 0..r {
                s += t.get(i, j, k) * x[j] * y[k];
            }
        }
        *o = s;
    }
    out
}

fn add3(a: &[f64], b: &[f64], c: &[f64]) -> Vec<f64> {
    (0..a.len()).map(|i| a[i] + b[i] + c[i]).collect()
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `[x,[y,z]] + [y,[z,x]] + [z,[x,y]]`
pub fn jacobiator<C: BracketTensor + ?Sized>(c: &C, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
    add3(
        &bracket(c, x, &bracket(c, y, z)),
        &bracket(c, y, &bracket(c, z, x)),
        &bracket(c, z, &bracket(c, x, y)),
    )
}

/// `|[J(x,y,z), x] - J(x, y, [x,z])|`
pub fn malcev_residual<C: BracketTensor + ?Sized>(c: &C, x: &[f64], y: &[f64], z: &[f64]) -> f64 {
    let lhs = bracket(c, &jacobiator(c, x, y, z), x);
    let rhs = jacobiator(c, x, y, &bracket(c, x, z));
    norm(&lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect::<Vec<_>>())
}

pub fn auxiliary_functions(chart: &LoopChart, g: &LoopPoint) -> Result<AuxiliaryMatrix> {
    auxiliary_functions_with(chart, g, Differentiation::Jet)
}

pub fn auxiliary_functions_with(
    chart: &LoopChart,
    g: &LoopPoint,
    diff: Differentiation,
) -> Result<AuxiliaryMatrix> {
    let r = chart.dim();
    crate::error::check_dim(r, g.dim())?;
    let map = chart.product_map();
    let at = pair(g.coords(), &vec![0.0; r]);
    let zero = vec![0.0; r];
    let mut matrix = Matrix::zeros(r, r);
    for j in 0..r {
        let col = diff.directional(&map, &at, &pair(&zero, &basis_vector(r, j)))?;
        for (n, v) in col.into_iter().enumerate() {
            matrix[(n, j)] = v;
        }
    }
    Ok(AuxiliaryMatrix {
        base: g.clone(),
        matrix,
    })
}

pub fn structure_functions(chart: &LoopChart, g: &LoopPoint) -> Result<StructureFunctions> {
    structure_functions_with(chart, g, Differentiation::Jet)
}

/// Solves the Maurer-Cartan system for every `(j, k)` with one factorization
/// of `V(g)`. The left side's term `v_j^n ∂_n v_k` is the mixed derivative of
/// `(g, h) ↦ gh` along `(v_j(g), 0)` and `(0, e_k)`.
pub fn structure_functions_with(
    chart: &LoopChart,
    g: &LoopPoint,
    diff: Differentiation,
) -> Result<StructureFunctions> {
    let r = chart.dim();
    let aux = auxiliary_functions_with(chart, g, diff)?;
    let lu = Lu::factor(&aux.matrix)?;
    let map = chart.product_map();
    let at = pair(g.coords(), &vec![0.0; r]);
    let zero = vec![0.0; r];
    // transported[j][k] = v_j^n ∂_n v_k
    let mut transported = vec![vec![Vec::new(); r]; r];
    for (j, row) in transported.iter_mut().enumerate() {
        let u = pair(&aux.column(j), &zero);
        for (k, slot) in row.iter_mut().enumerate() {
            *slot = diff.mixed(&map, &at, &u, &pair(&zero, &basis_vector(r, k)))?;
        }
    }
    let mut raw = Tensor3::zeros(r);
    for j in 0..r {
        for k in 0..r {
            let lhs: Vec<f64> = (0..r)
                .map(|i| transported[j][k][i] - transported[k][j][i])
                .collect();
            for (n, v) in lu.solve(&lhs)?.into_iter().enumerate() {
                raw.set(n, j, k, v);
            }
        }
    }
    Ok(StructureFunctions {
        base: g.clone(),
        raw_asymmetry: raw.asymmetry(),
        tensor: raw.antisymmetrized(),
    })
}
