//! Generators, derivative generators and the generalized Lie equations.
//!
//! With `S_j(g) = T_g S_j T_g⁻¹` and `T_j(g) = S_g⁻¹ T_j S_g`:
//!
//! ```text
//! v_j^n(g) ∂_n S_g = S_g S_j(g) = S_g S_j + [S_g, T_j]
//! v_j^n(g) ∂_n T_g = T_j(g) T_g = T_j T_g + [S_j, T_g]
//! [S_j(g), S_k(g)] =  c^n_jk(g) S_n(g) - 2 [S_j(g), T_k(g)]
//! [T_j(g), T_k(g)] = -c^n_jk(g) T_n(g) - 2 [T_j(g), S_k(g)]
//! ```

use crate::birep::{Birepresentation, SMap, TMap};
use crate::chart::LoopPoint;
use crate::diffkit::{basis_vector, commutator, mat_inv, Differentiation, Matrix, VectorMap};
use crate::error::Result;
use crate::malcev::{auxiliary_functions_with, structure_functions, BracketTensor};

/// `S_j = ∂S_g/∂g^j`, `T_j = ∂T_g/∂g^j` at the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSet {
    pub s: Vec<Matrix>,
    pub t: Vec<Matrix>,
}

impl GeneratorSet {
    pub fn dim(&self) -> usize {
        self.s.len()
    }
}

/// `S_j(g)`, `T_j(g)` at `base`.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeGeneratorSet {
    pub base: LoopPoint,
    pub s: Vec<Matrix>,
    pub t: Vec<Matrix>,
}

impl DerivativeGeneratorSet {
    /// `max_j |S_j(g) + T_j(g) - S_j - T_j|`
    pub fn sum_identity_residual(&self, gen: &GeneratorSet) -> f64 {
        (0..self.s.len())
            .map(|j| {
                let lhs = &self.s[j] + &self.t[j];
                let rhs = &gen.s[j] + &gen.t[j];
                (&lhs - &rhs).frobenius_norm()
            })
            .fold(0.0, f64::max)
    }
}

fn matrix_derivative<M: VectorMap>(
    map: &M,
    n: usize,
    at: &[f64],
    dir: &[f64],
    diff: Differentiation,
) -> Result<Matrix> {
    Matrix::from_vec(n, n, diff.directional(map, at, dir)?)
}

pub fn generators<B: Birepresentation>(b: &B) -> Result<GeneratorSet> {
    generators_with(b, Differentiation::Jet)
}

pub fn generators_with<B: Birepresentation>(b: &B, diff: Differentiation) -> Result<GeneratorSet> {
    let r = b.chart().dim();
    let n = b.size();
    let origin = vec![0.0; r];
    let mut s = Vec::with_capacity(r);
    let mut t = Vec::with_capacity(r);
    for j in 0..r {
        let e = basis_vector(r, j);
        s.push(matrix_derivative(&SMap(b), n, &origin, &e, diff)?);
        t.push(matrix_derivative(&TMap(b), n, &origin, &e, diff)?);
    }
    Ok(GeneratorSet { s, t })
}

pub fn derivative_generators<B: Birepresentation>(
    b: &B,
    gen: &GeneratorSet,
    g: &LoopPoint,
) -> Result<DerivativeGeneratorSet> {
    let (sg, tg) = (b.s(g)?, b.t(g)?);
    let (sg_inv, tg_inv) = (mat_inv(&sg)?, mat_inv(&tg)?);
    Ok(DerivativeGeneratorSet {
        base: g.clone(),
        s: gen.s.iter().map(|sj| &(&tg * sj) * &tg_inv).collect(),
        t: gen.t.iter().map(|tj| &(&sg_inv * tj) * &sg).collect(),
    })
}

/// Max-over-`j` Frobenius residuals of both generalized Lie equations, each
/// in both of its right-hand-side forms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GleResiduals {
    /// `|v_j^n ∂_n S_g - S_g S_j(g)|`
    pub s_conjugated: f64,
    /// `|v_j^n ∂_n S_g - S_g S_j - [S_g, T_j]|`
    pub s_associator: f64,
    /// `|v_j^n ∂_n T_g - T_j(g) T_g|`
    pub t_conjugated: f64,
    /// `|v_j^n ∂_n T_g - T_j T_g - [S_j, T_g]|`
    pub t_associator: f64,
}

impl GleResiduals {
    pub fn max(&self) -> f64 {
        self.s_conjugated
            .max(self.s_associator)
            .max(self.t_conjugated)
            .max(self.t_associator)
    }
}

pub fn gle_residual<B: Birepresentation>(
    b: &B,
    gen: &GeneratorSet,
    g: &LoopPoint,
) -> Result<GleResiduals> {
    gle_residual_with(b, gen, g, Differentiation::Jet)
}

/// Left sides are directional derivatives of `S_g`, `T_g` along the
/// columns `v_j(g)` of the auxiliary matrix.
pub fn gle_residual_with<B: Birepresentation>(
    b: &B,
    gen: &GeneratorSet,
    g: &LoopPoint,
    diff: Differentiation,
) -> Result<GleResiduals> {
    let n = b.size();
    let aux = auxiliary_functions_with(b.chart(), g, diff)?;
    let dgen = derivative_generators(b, gen, g)?;
    let (sg, tg) = (b.s(g)?, b.t(g)?);
    let mut out = GleResiduals {
        s_conjugated: 0.0,
        s_associator: 0.0,
        t_conjugated: 0.0,
        t_associator: 0.0,
    };
    for j in 0..gen.dim() {
        let vj = aux.column(j);
        let ds = matrix_derivative(&SMap(b), n, g.coords(), &vj, diff)?;
        let dt = matrix_derivative(&TMap(b), n, g.coords(), &vj, diff)?;
        let s_conj = &sg * &dgen.s[j];
        let s_assoc = &(&sg * &gen.s[j]) + &commutator(&sg, &gen.t[j]);
        let t_conj = &dgen.t[j] * &tg;
        let t_assoc = &(&gen.t[j] * &tg) + &commutator(&gen.s[j], &tg);
        out.s_conjugated = out.s_conjugated.max((&ds - &s_conj).frobenius_norm());
        out.s_associator = out.s_associator.max((&ds - &s_assoc).frobenius_norm());
        out.t_conjugated = out.t_conjugated.max((&dt - &t_conj).frobenius_norm());
        out.t_associator = out.t_associator.max((&dt - &t_assoc).frobenius_norm());
    }
    Ok(out)
}

/// Agreement of the two right-hand sides, no derivatives involved:
/// `max_j max(|S_g S_j(g) - S_g S_j - [S_g,T_j]|, |T_j(g) T_g - T_j T_g - [S_j,T_g]|)`.
pub fn gle_forms_agreement<B: Birepresentation>(
    b: &B,
    gen: &GeneratorSet,
    g: &LoopPoint,
) -> Result<f64> {
    let dgen = derivative_generators(b, gen, g)?;
    let (sg, tg) = (b.s(g)?, b.t(g)?);
    let mut worst: f64 = 0.0;
    for j in 0..gen.dim() {
        let s = &(&sg * &dgen.s[j]) - &(&(&sg * &gen.s[j]) + &commutator(&sg, &gen.t[j]));
        let t = &(&dgen.t[j] * &tg) - &(&(&gen.t[j] * &tg) + &commutator(&gen.s[j], &tg));
        worst = worst.max(s.frobenius_norm()).max(t.frobenius_norm());
    }
    Ok(worst)
}

/// `max_j |[S_g, T_j]|`, the term that vanishes for associative
/// birepresentations.
pub fn associator_term<B: Birepresentation>(b: &B, gen: &GeneratorSet, g: &LoopPoint) -> Result<f64> {
    let sg = b.s(g)?;
    Ok(gen
        .t
        .iter()
        .map(|tj| commutator(&sg, tj).frobenius_norm())
        .fold(0.0, f64::max))
}

fn contract(coeffs: &[f64], mats: &[Matrix]) -> Matrix {
    Matrix::combination(coeffs, mats)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LieCartanResiduals {
    /// `max |[S_j(g),S_k(g)] - c^n_jk(g) S_n(g) + 2[S_j(g),T_k(g)]|`
    pub s: f64,
    /// `max |[T_j(g),T_k(g)] + c^n_jk(g) T_n(g) + 2[T_j(g),S_k(g)]|`
    pub t: f64,
}

impl LieCartanResiduals {
    pub fn max(&self) -> f64 {
        self.s.max(self.t)
    }
}

/// Generalized Lie-Cartan residuals from precomputed derivative generators and structure
/// functions at the same base point.
pub fn lie_cartan_from<C: BracketTensor + ?Sized>(
    dgen: &DerivativeGeneratorSet,
    cg: &C,
) -> LieCartanResiduals {
    let r = dgen.s.len();
    let t3 = cg.tensor();
    let mut out = LieCartanResiduals { s: 0.0, t: 0.0 };
    for j in 0..r {
        for k in 0..r {
            let c = t3.slice(j, k);
            let s_rel = &(&commutator(&dgen.s[j], &dgen.s[k]) - &contract(&c, &dgen.s))
                + &commutator(&dgen.s[j], &dgen.t[k]).scaled(2.0);
            let t_rel = &(&commutator(&dgen.t[j], &dgen.t[k]) + &contract(&c, &dgen.t))
                + &commutator(&dgen.t[j], &dgen.s[k]).scaled(2.0);
            out.s = out.s.max(s_rel.frobenius_norm());
            out.t = out.t.max(t_rel.frobenius_norm());
        }
    }
    out
}

/// Generalized Lie-Cartan residuals at `g`, with `c(g)` recomputed from the
/// Maurer-Cartan equations.
pub fn lie_cartan_residual<B: Birepresentation>(
    b: &B,
    gen: &GeneratorSet,
    g: &LoopPoint,
) -> Result<LieCartanResiduals> {
    let dgen = derivative_generators(b, gen, g)?;
    let cg = structure_functions(b.chart(), g)?;
    Ok(lie_cartan_from(&dgen, &cg))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorollaryResiduals {
    /// `max |[S_j,S_k] - c^n_jk S_n|`
    pub ss: f64,
    /// `max |[T_j,T_k] + c^n_jk T_n|`
    pub tt: f64,
    /// `max |[S_j,T_k]|`
    pub st: f64,
}

impl CorollaryResiduals {
    pub fn max(&self) -> f64 {
        self.ss.max(self.tt).max(self.st)
    }
}

/// Classical Lie-Cartan relations at the identity.
pub fn corollary_residual<C: BracketTensor + ?Sized>(gen: &GeneratorSet, c: &C) -> CorollaryResiduals {
    let r = gen.dim();
    let t3 = c.tensor();
    let mut out = CorollaryResiduals {
        ss: 0.0,
        tt: 0.0,
        st: 0.0,
    };
    for j in 0..r {
        for k in 0..r {
            let cjk = t3.slice(j, k);
            out.ss = out
                .ss
                .max((&commutator(&gen.s[j], &gen.s[k]) - &contract(&cjk, &gen.s)).frobenius_norm());
            out.tt = out
                .tt
                .max((&commutator(&gen.t[j], &gen.t[k]) + &contract(&cjk, &gen.t)).frobenius_norm());
            out.st = out.st.max(commutator(&gen.s[j], &gen.t[k]).frobenius_norm());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::CdElement;
    use crate::birep::canonical_lr;
    use crate::malcev::structure_constants;
    use crate::rng::Xorshift;

    #[test]
    fn quaternion_generators_are_unit_multiplications() {
        let b = canonical_lr(2).unwrap();
        let gen = generators(&b).unwrap();
        for j in 0..3 {
            let ej = CdElement::<f64>::basis(2, j + 1).unwrap();
            for m in 0..4 {
                let col = ej.mul(&CdElement::basis(2, m).unwrap()).unwrap();
                for i in 0..4 {
                    assert_eq!(gen.s[j][(i, m)], col.coeffs()[i]);
                }
            }
        }
    }

    #[test]
    fn circle_generators() {
        let gen = generators(&canonical_lr(1).unwrap()).unwrap();
        let rot = Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(gen.s[0], rot);
        assert_eq!(gen.t[0], rot);
    }

    #[test]
    fn generators_match_fd() {
        for level in 1..=3 {
            let b = canonical_lr(level).unwrap();
            let jet = generators(&b).unwrap();
            let fd = generators_with(&b, Differentiation::CentralDifference).unwrap();
            for j in 0..jet.dim() {
                assert!((&jet.s[j] - &fd.s[j]).max_abs() <= 1e-5);
                assert!((&jet.t[j] - &fd.t[j]).max_abs() <= 1e-5);
            }
        }
    }

    #[test]
    fn derivative_generators_at_identity() {
        let b = canonical_lr(3).unwrap();
        let gen = generators(&b).unwrap();
        let d = derivative_generators(&b, &gen, &b.chart().identity()).unwrap();
        assert_eq!(d.s, gen.s);
        assert_eq!(d.t, gen.t);
    }

    #[test]
    fn quaternion_derivative_generators_constant() {
        let b = canonical_lr(2).unwrap();
        let gen = generators(&b).unwrap();
        let mut rng = Xorshift::new(19);
        for _ in 0..10 {
            let g = LoopPoint(rng.ball(3, 0.5));
            let d = derivative_generators(&b, &gen, &g).unwrap();
            for j in 0..3 {
                assert!((&d.s[j] - &gen.s[j]).max_abs() <= 1e-12);
            }
            assert!(associator_term(&b, &gen, &g).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn gle_at_identity_is_exact() {
        let b = canonical_lr(3).unwrap();
        let gen = generators(&b).unwrap();
        let r = gle_residual(&b, &gen, &b.chart().identity()).unwrap();
        assert_eq!(r.s_conjugated, 0.0);
        assert_eq!(r.t_conjugated, 0.0);
    }

    #[test]
    fn circle_lie_cartan_vanishes() {
        let b = canonical_lr(1).unwrap();
        let gen = generators(&b).unwrap();
        let r = lie_cartan_residual(&b, &gen, &LoopPoint(vec![0.3])).unwrap();
        assert!(r.max() <= 1e-12);
    }

    #[test]
    fn corollary_by_level() {
        for level in 1..=2 {
            let chart = crate::chart::LoopChart::new(level).unwrap();
            let gen = generators(&canonical_lr(level).unwrap()).unwrap();
            let c = structure_constants(&chart).unwrap();
            assert!(corollary_residual(&gen, &c).max() <= 1e-10);
        }
        let gen = generators(&canonical_lr(3).unwrap()).unwrap();
        let c = structure_constants(&crate::chart::LoopChart::octonion()).unwrap();
        assert!(corollary_residual(&gen, &c).st >= 0.5);
    }

    #[test]
    fn lie_cartan_at_identity_matches_generators() {
        // S_j(e) = S_j and c(e) = c, so the two residual paths coincide
        let b = canonical_lr(2).unwrap();
        let gen = generators(&b).unwrap();
        let at_e = lie_cartan_residual(&b, &gen, &b.chart().identity()).unwrap();
        assert!(at_e.max() <= 1e-12);
    }
}
