//! Yamagutian, Yamaguti brackets and the closed commutation relations of the
//! derivative generators.
//!
//! ```text
//! 3 Y_g(x;y) = [S_x(g),S_y(g)] + [S_x(g),T_y(g)] + [T_x(g),T_y(g)]
//! [x,y,z]_g  = [x,[y,z]_g]_g - [y,[x,z]_g]_g + [[x,y]_g,z]_g
//!
//! SS:  [S_x,S_y] =  2Y(x;y) + ⅓ S_[x,y] + ⅔ T_[x,y]
//! ST:  [S_x,T_y] =  -Y(x;y) + ⅓ S_[x,y] - ⅓ T_[x,y]
//! TT:  [T_x,T_y] =  2Y(x;y) - ⅔ S_[x,y] - ⅓ T_[x,y]
//! YS:  6[Y(x;y), S_z] = S_[x,y,z]
//! YT:  6[Y(x;y), T_z] = T_[x,y,z]
//! YY:  6[Y(x;y), Y(z;w)] = Y([x,y,z];w) + Y(z;[x,y,w])
//! ```
//!
//! All operators and brackets are taken at the base point `g`.

use crate::birep::Birepresentation;
use crate::chart::LoopPoint;
use crate::diffkit::{basis_vector, commutator, independent_columns, Matrix, DEFAULT_RANK_TOL};
use crate::error::Result;
use crate::liecartan::{derivative_generators, DerivativeGeneratorSet, GeneratorSet};
use crate::malcev::{bracket, jacobiator, norm, structure_functions, BracketTensor, StructureFunctions};

/// Derivative generators and structure functions at one base point.
#[derive(Clone, Debug)]
pub struct YamagutiContext {
    pub dgen: DerivativeGeneratorSet,
    pub cg: StructureFunctions,
}

impl YamagutiContext {
    pub fn new<B: Birepresentation>(b: &B, gen: &GeneratorSet, g: &LoopPoint) -> Result<Self> {
        Ok(Self {
            dgen: derivative_generators(b, gen, g)?,
            cg: structure_functions(b.chart(), g)?,
        })
    }

    pub fn base(&self) -> &LoopPoint {
        &self.dgen.base
    }

    pub fn dim(&self) -> usize {
        self.dgen.s.len()
    }

    /// `S_x(g) = x^j S_j(g)`
    pub fn s_x(&self, x: &[f64]) -> Matrix {
        Matrix::combination(x, &self.dgen.s)
    }

    /// `T_x(g) = x^j T_j(g)`
    pub fn t_x(&self, x: &[f64]) -> Matrix {
        Matrix::combination(x, &self.dgen.t)
    }

    /// `[x, y]_g`
    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        bracket(&self.cg, x, y)
    }
}

pub fn yamagutian(ctx: &YamagutiContext, x: &[f64], y: &[f64]) -> Matrix {
    let (sx, sy, tx, ty) = (ctx.s_x(x), ctx.s_x(y), ctx.t_x(x), ctx.t_x(y));
    let sum = &(&commutator(&sx, &sy) + &commutator(&sx, &ty)) + &commutator(&tx, &ty);
    sum.scaled(1.0 / 3.0)
}

/// `(|Y(x;y) + Y(y;x)|, |Y([x,y];z) + Y([y,z];x) + Y([z,x];y)|)`
pub fn yamagutian_constraints_residual(
    ctx: &YamagutiContext,
    x: &[f64],
    y: &[f64],
    z: &[f64],
) -> (f64, f64) {
    let anti = &yamagutian(ctx, x, y) + &yamagutian(ctx, y, x);
    let cyclic = &(&yamagutian(ctx, &ctx.bracket(x, y), z) + &yamagutian(ctx, &ctx.bracket(y, z), x))
        + &yamagutian(ctx, &ctx.bracket(z, x), y);
    (anti.frobenius_norm(), cyclic.frobenius_norm())
}

/// Both displayed forms of `[x,y,z]_g`: the nested-bracket definition and
/// `J_g(x,y,z) + 2[[x,y]_g,z]_g`.
pub fn yamaguti_bracket_forms<C: BracketTensor + ?Sized>(
    c: &C,
    x: &[f64],
    y: &[f64],
    z: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let a = bracket(c, x, &bracket(c, y, z));
    let b = bracket(c, y, &bracket(c, x, z));
    let xy = bracket(c, x, y);
    let d = bracket(c, &xy, z);
    let nested = (0..a.len()).map(|i| a[i] - b[i] + d[i]).collect();
    let j = jacobiator(c, x, y, z);
    let via_jacobiator = (0..j.len()).map(|i| j[i] + 2.0 * d[i]).collect();
    (nested, via_jacobiator)
}

pub fn yamaguti_bracket<C: BracketTensor + ?Sized>(c: &C, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
    yamaguti_bracket_forms(c, x, y, z).0
}

/// `|first form - second form|`
pub fn yamaguti_forms_gap<C: BracketTensor + ?Sized>(c: &C, x: &[f64], y: &[f64], z: &[f64]) -> f64 {
    let (a, b) = yamaguti_bracket_forms(c, x, y, z);
    norm(&a.iter().zip(&b).map(|(p, q)| p - q).collect::<Vec<_>>())
}

/// Frobenius residuals of the SS, ST and TT relations.
pub fn closure_relations_residual(ctx: &YamagutiContext, x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let (sx, sy, tx, ty) = (ctx.s_x(x), ctx.s_x(y), ctx.t_x(x), ctx.t_x(y));
    let xy = ctx.bracket(x, y);
    let (s_xy, t_xy) = (ctx.s_x(&xy), ctx.t_x(&xy));
    let yam = yamagutian(ctx, x, y);
    let rhs = |ky: f64, ks: f64, kt: f64| {
        let mut m = yam.scaled(ky);
        m.add_scaled(ks, &s_xy);
        m.add_scaled(kt, &t_xy);
        m
    };
    let r1 = &commutator(&sx, &sy) - &rhs(2.0, 1.0 / 3.0, 2.0 / 3.0);
    let r2 = &commutator(&sx, &ty) - &rhs(-1.0, 1.0 / 3.0, -1.0 / 3.0);
    let r3 = &commutator(&tx, &ty) - &rhs(2.0, -2.0 / 3.0, -1.0 / 3.0);
    (r1.frobenius_norm(), r2.frobenius_norm(), r3.frobenius_norm())
}

/// Frobenius residuals of the reductivity relations YS, YT.
pub fn reductivity_residual(ctx: &YamagutiContext, x: &[f64], y: &[f64], z: &[f64]) -> (f64, f64) {
    let yam = yamagutian(ctx, x, y);
    let xyz = yamaguti_bracket(&ctx.cg, x, y, z);
    let r4 = &commutator(&yam, &ctx.s_x(z)).scaled(6.0) - &ctx.s_x(&xyz);
    let r5 = &commutator(&yam, &ctx.t_x(z)).scaled(6.0) - &ctx.t_x(&xyz);
    (r4.frobenius_norm(), r5.frobenius_norm())
}

/// Frobenius residual of the YY relation.
pub fn yamagutian_lie_residual(ctx: &YamagutiContext, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> f64 {
    let lhs = commutator(&yamagutian(ctx, x, y), &yamagutian(ctx, z, w)).scaled(6.0);
    let xyz = yamaguti_bracket(&ctx.cg, x, y, z);
    let xyw = yamaguti_bracket(&ctx.cg, x, y, w);
    let rhs = &yamagutian(ctx, &xyz, w) + &yamagutian(ctx, z, &xyw);
    (&lhs - &rhs).frobenius_norm()
}

/// `2r + r(r-1)/2`
pub fn dimension_bound(r: usize) -> usize {
    2 * r + r * (r.saturating_sub(1)) / 2
}

/// `{S_j(g)} ∪ {T_j(g)} ∪ {Y_g(e_a;e_b) : a < b}`
pub fn closure_operators(ctx: &YamagutiContext) -> Vec<Matrix> {
    let r = ctx.dim();
    let mut ops: Vec<Matrix> = ctx.dgen.s.iter().chain(&ctx.dgen.t).cloned().collect();
    for a in 0..r {
        for b in (a + 1)..r {
            ops.push(yamagutian(ctx, &basis_vector(r, a), &basis_vector(r, b)));
        }
    }
    ops
}

fn flatten(ops: &[Matrix]) -> Vec<Vec<f64>> {
    ops.iter().map(|m| m.as_slice().to_vec()).collect()
}

pub fn closure_dimension(ctx: &YamagutiContext) -> usize {
    closure_dimension_with_tol(ctx, DEFAULT_RANK_TOL)
}

pub fn closure_dimension_with_tol(ctx: &YamagutiContext, tol: f64) -> usize {
    independent_columns(&flatten(&closure_operators(ctx)), tol).len()
}

/// Largest distance of a pairwise commutator `[A, B]` from the span of
/// `ops`. The span is reduced to an independent subset first, then each
/// commutator is projected by least squares through the normal equations.
pub fn commutator_closure_remainder(ops: &[Matrix], tol: f64) -> Result<f64> {
    let flat = flatten(ops);
    let basis: Vec<&Vec<f64>> = independent_columns(&flat, tol)
        .into_iter()
        .map(|i| &flat[i])
        .collect();
    let k = basis.len();
    if k == 0 {
        return Ok(0.0);
    }
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    let mut gram = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            gram[(i, j)] = dot(basis[i], basis[j]);
        }
    }
    let lu = crate::diffkit::Lu::factor(&gram)?;
    let mut worst: f64 = 0.0;
    for (ia, a) in ops.iter().enumerate() {
        for b in &ops[ia + 1..] {
            let v = commutator(a, b);
            let v = v.as_slice();
            let rhs: Vec<f64> = basis.iter().map(|q| dot(q, v)).collect();
            let coeffs = lu.solve(&rhs)?;
            let mut rem = v.to_vec();
            for (c, q) in coeffs.iter().zip(&basis) {
                for (r, qi) in rem.iter_mut().zip(q.iter()) {
                    *r -= c * qi;
                }
            }
            worst = worst.max(norm(&rem));
        }
    }
    Ok(worst)
}

/// `max |[A,[B,C]] + [B,[C,A]] + [C,[A,B]]|` over triples of distinct
/// members of `ops` (the expression is alternating, so `i < j < k` suffices).
pub fn matrix_jacobi_defect(ops: &[Matrix]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in ops.iter().enumerate() {
        for (j, b) in ops.iter().enumerate().skip(i + 1) {
            let ab = commutator(a, b);
            for c in &ops[j + 1..] {
                let jac = &(&commutator(a, &commutator(b, c)) + &commutator(b, &commutator(c, a)))
                    + &commutator(c, &ab);
                worst = worst.max(jac.frobenius_norm());
            }
        }
    }
    worst
}
