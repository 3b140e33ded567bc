//! Birepresentations `g ↦ (S_g, T_g)` of a loop into `GL_n`.
//!
//! Axioms checked here:
//!
//! ```text
//! S_e = T_e = 1,   T_g S_g S_h = S_{gh} T_g,   S_g T_g T_h = T_{hg} S_g
//! ```
//!
//! and the stronger associative relations `S_g S_h = S_{gh}`,
//! `T_g T_h = T_{hg}`, `S_g T_h = T_h S_g`.

use serde::{Deserialize, Serialize};

use crate::algebra::{basis_table, BasisTable};
use crate::chart::{embed, LoopChart, LoopPoint};
use crate::diffkit::{Matrix, Scalar, VectorMap};
use crate::error::{check_dim, Error, Result};

/// Classification threshold for [`is_associative`].
pub const ASSOCIATIVITY_TOL: f64 = 1e-9;

/// A jet-capable birepresentation. `s_entries`/`t_entries` return the
/// row-major entries of `S_g`/`T_g` and must be analytic in the coordinates.
pub trait Birepresentation {
    fn chart(&self) -> &LoopChart;

    /// Matrix size `n`.
    fn size(&self) -> usize;

    fn label(&self) -> &str;

    fn s_entries<S: Scalar>(&self, g: &[S]) -> Result<Vec<S>>;

    fn t_entries<S: Scalar>(&self, g: &[S]) -> Result<Vec<S>>;

    fn s(&self, g: &LoopPoint) -> Result<Matrix> {
        Matrix::from_vec(self.size(), self.size(), self.s_entries(g.coords())?)
    }

    fn t(&self, g: &LoopPoint) -> Result<Matrix> {
        Matrix::from_vec(self.size(), self.size(), self.t_entries(g.coords())?)
    }
}

/// `g ↦ S_g` as a [`VectorMap`].
pub struct SMap<'a, B: ?Sized>(pub &'a B);
/// `g ↦ T_g` as a [`VectorMap`].
pub struct TMap<'a, B: ?Sized>(pub &'a B);

impl<B: Birepresentation> VectorMap for SMap<'_, B> {
    fn eval<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        self.0.s_entries(x)
    }
}

impl<B: Birepresentation> VectorMap for TMap<'_, B> {
    fn eval<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        self.0.t_entries(x)
    }
}

/// Left and right multiplications on the ambient Cayley-Dickson algebra:
/// `S_g u = g u`, `T_g u = u g`.
#[derive(Clone, Debug)]
pub struct CanonicalLr {
    chart: LoopChart,
    table: BasisTable,
    label: String,
}

impl CanonicalLr {
    pub fn new(chart: LoopChart) -> Self {
        let table = basis_table(chart.level()).expect("chart levels are 1..=3");
        Self {
            label: format!("canonical-lr(level {})", chart.level()),
            chart,
            table,
        }
    }

    fn multiplication_matrix<S: Scalar>(&self, g: &[S], left: bool) -> Result<Vec<S>> {
        let u = embed(self.chart.level(), g)?;
        let n = self.size();
        let mut out = vec![S::zero(); n * n];
        // column m is u e_m (left) or e_m u (right)
        for m in 0..n {
            for (i, ui) in u.coeffs().iter().enumerate() {
                let (sign, row) = if left {
                    self.table.product(i, m)
                } else {
                    self.table.product(m, i)
                };
                let term = if sign > 0 { *ui } else { -*ui };
                out[row * n + m] = out[row * n + m] + term;
            }
        }
        Ok(out)
    }
}

pub fn canonical_lr(level: u32) -> Result<CanonicalLr> {
    Ok(CanonicalLr::new(LoopChart::new(level)?))
}

impl Birepresentation for CanonicalLr {
    fn chart(&self) -> &LoopChart {
        &self.chart
    }

    fn size(&self) -> usize {
        self.chart.ambient_dim()
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn s_entries<S: Scalar>(&self, g: &[S]) -> Result<Vec<S>> {
        self.multiplication_matrix(g, true)
    }

    fn t_entries<S: Scalar>(&self, g: &[S]) -> Result<Vec<S>> {
        self.multiplication_matrix(g, false)
    }
}

/// `inner` with a constant offset added to one entry of `T_g`; used to check
/// that the axiom residuals detect corruption.
#[derive(Clone, Debug)]
pub struct Perturbed<B> {
    pub inner: B,
    pub row: usize,
    pub col: usize,
    pub delta: f64,
}

impl<B: Birepresentation> Birepresentation for Perturbed<B> {
    fn chart(&self) -> &LoopChart {
        self.inner.chart()
    }

    fn size(&self) -> usize {
        self.inner.size()
    }

    fn label(&self) -> &str {
        "perturbed"
    }

    fn s_entries<S: Scalar>(&self, g: &[S]) -> Result<Vec<S>> {
        self.inner.s_entries(g)
    }

    fn t_entries<S: Scalar>(&self, g: &[S]) -> Result<Vec<S>> {
        let mut t = self.inner.t_entries(g)?;
        let idx = self.row * self.size() + self.col;
        t[idx] = t[idx] + S::from_f64(self.delta);
        Ok(t)
    }
}

/// Frobenius residuals of the birepresentation axioms at `(g, h)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BirepResiduals {
    /// `|T_g S_g S_h - S_{gh} T_g|`
    pub left: f64,
    /// `|S_g T_g T_h - T_{hg} S_g|`
    pub right: f64,
    /// `max(|S_e - 1|, |T_e - 1|)`
    pub unit: f64,
}

impl BirepResiduals {
    pub fn max(&self) -> f64 {
        self.left.max(self.right).max(self.unit)
    }
}

/// Frobenius residuals of the associative relations at `(g, h)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AssociativityResiduals {
    /// `|S_g S_h - S_{gh}|`
    pub left: f64,
    /// `|T_g T_h - T_{hg}|`
    pub right: f64,
    /// `|S_g T_h - T_h S_g|`
    pub commute: f64,
}

impl AssociativityResiduals {
    pub fn max(&self) -> f64 {
        self.left.max(self.right).max(self.commute)
    }
}

fn unit_residual<B: Birepresentation + ?Sized>(b: &B) -> Result<f64> {
    let e = b.chart().identity();
    let id = Matrix::identity(b.size());
    Ok((&b.s(&e)? - &id)
        .frobenius_norm()
        .max((&b.t(&e)? - &id).frobenius_norm()))
}

pub fn birep_residuals<B: Birepresentation + ?Sized>(
    b: &B,
    g: &LoopPoint,
    h: &LoopPoint,
) -> Result<BirepResiduals> {
    let chart = b.chart();
    let (gh, hg) = (chart.mul(g, h)?, chart.mul(h, g)?);
    let (sg, tg) = (b.s(g)?, b.t(g)?);
    let left = &(&(&tg * &sg) * &b.s(h)?) - &(&b.s(&gh)? * &tg);
    let right = &(&(&sg * &tg) * &b.t(h)?) - &(&b.t(&hg)? * &sg);
    Ok(BirepResiduals {
        left: left.frobenius_norm(),
        right: right.frobenius_norm(),
        unit: unit_residual(b)?,
    })
}

pub fn associativity_residuals<B: Birepresentation + ?Sized>(
    b: &B,
    g: &LoopPoint,
    h: &LoopPoint,
) -> Result<AssociativityResiduals> {
    let chart = b.chart();
    let (gh, hg) = (chart.mul(g, h)?, chart.mul(h, g)?);
    let (sg, sh, tg, th) = (b.s(g)?, b.s(h)?, b.t(g)?, b.t(h)?);
    Ok(AssociativityResiduals {
        left: (&(&sg * &sh) - &b.s(&gh)?).frobenius_norm(),
        right: (&(&tg * &th) - &b.t(&hg)?).frobenius_norm(),
        commute: (&(&sg * &th) - &(&th * &sg)).frobenius_norm(),
    })
}

/// Associative when every residual over the sample stays within
/// [`ASSOCIATIVITY_TOL`].
pub fn is_associative<B: Birepresentation + ?Sized>(
    b: &B,
    pairs: &[(LoopPoint, LoopPoint)],
) -> Result<bool> {
    for (g, h) in pairs {
        if associativity_residuals(b, g, h)?.max() > ASSOCIATIVITY_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One row of a user-supplied birepresentation table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BirepSample {
    pub g: Vec<f64>,
    #[serde(rename = "S")]
    pub s: Vec<Vec<f64>>,
    #[serde(rename = "T")]
    pub t: Vec<Vec<f64>>,
}

/// Sample-table birepresentation `{r, n, samples: [{g, S, T}]}`. Usable for
/// axiom checks only; there is nothing to differentiate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BirepSamples {
    pub r: usize,
    pub n: usize,
    pub samples: Vec<BirepSample>,
}

/// Coordinate distance under which two sample points are the same element.
pub const SAMPLE_MATCH_TOL: f64 = 1e-9;

/// Outcome of [`check_sampled`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampledCheck {
    /// Pairs `(g, h)` for which `gh` and `hg` were both present.
    pub pairs_checked: usize,
    pub max_left: f64,
    pub max_right: f64,
    /// `None` when the identity is absent from the table.
    pub unit: Option<f64>,
}

impl BirepSamples {
    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: Self =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("birepresentation table: {e}")))?;
        parsed.validate()?;
        Ok(parsed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    fn validate(&self) -> Result<()> {
        for s in &self.samples {
            check_dim(self.r, s.g.len())?;
            check_dim(self.n, s.s.len())?;
            check_dim(self.n, s.t.len())?;
            for row in s.s.iter().chain(&s.t) {
                check_dim(self.n, row.len())?;
            }
        }
        Ok(())
    }

    /// Tabulate a jet-capable birepresentation at the given points.
    pub fn tabulate<B: Birepresentation + ?Sized>(b: &B, points: &[LoopPoint]) -> Result<Self> {
        let samples = points
            .iter()
            .map(|p| {
                Ok(BirepSample {
                    g: p.0.clone(),
                    s: b.s(p)?.to_rows(),
                    t: b.t(p)?.to_rows(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            r: b.chart().dim(),
            n: b.size(),
            samples,
        })
    }

    fn find(&self, p: &LoopPoint) -> Option<&BirepSample> {
        self.samples
            .iter()
            .find(|s| LoopPoint(s.g.clone()).distance(p) <= SAMPLE_MATCH_TOL)
    }
}

/// Axiom residuals over every sample pair whose products are tabulated.
pub fn check_sampled(chart: &LoopChart, table: &BirepSamples) -> Result<SampledCheck> {
    check_dim(chart.dim(), table.r)?;
    let mat = |rows: &Vec<Vec<f64>>| Matrix::from_rows(rows);
    let mut out = SampledCheck {
        pairs_checked: 0,
        max_left: 0.0,
        max_right: 0.0,
        unit: None,
    };
    if let Some(e) = table.find(&chart.identity()) {
        let id = Matrix::identity(table.n);
        out.unit = Some(
            (&mat(&e.s)? - &id)
                .frobenius_norm()
                .max((&mat(&e.t)? - &id).frobenius_norm()),
        );
    }
    for a in &table.samples {
        for b in &table.samples {
            let (g, h) = (LoopPoint(a.g.clone()), LoopPoint(b.g.clone()));
            let (Ok(gh), Ok(hg)) = (chart.mul(&g, &h), chart.mul(&h, &g)) else {
                continue;
            };
            let (Some(sgh), Some(shg)) = (table.find(&gh), table.find(&hg)) else {
                continue;
            };
            let (sg, tg) = (mat(&a.s)?, mat(&a.t)?);
            let left = &(&(&tg * &sg) * &mat(&b.s)?) - &(&mat(&sgh.s)? * &tg);
            let right = &(&(&sg * &tg) * &mat(&b.t)?) - &(&mat(&shg.t)? * &sg);
            out.pairs_checked += 1;
            out.max_left = out.max_left.max(left.frobenius_norm());
            out.max_right = out.max_right.max(right.frobenius_norm());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffkit::{jet1_eval, Lu};
    use crate::rng::Xorshift;

    fn pt(rng: &mut Xorshift, r: usize, radius: f64) -> LoopPoint {
        LoopPoint(rng.ball(r, radius))
    }

    #[test]
    fn identity_at_unit() {
        for level in 1..=3 {
            let b = canonical_lr(level).unwrap();
            let e = b.chart().identity();
            let id = Matrix::identity(b.size());
            assert_eq!(b.s(&e).unwrap(), id);
            assert_eq!(b.t(&e).unwrap(), id);
        }
    }

    #[test]
    fn matrices_act_as_multiplication() {
        let b = canonical_lr(3).unwrap();
        let mut rng = Xorshift::new(2);
        let g = pt(&mut rng, 7, 0.5);
        let u: Vec<f64> = (0..8).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let gu = b.chart().embed(&g).unwrap();
        let w = crate::algebra::CdElement::new(3, u.clone()).unwrap();
        let left = gu.mul(&w).unwrap();
        let right = w.mul(&gu).unwrap();
        let sl = b.s(&g).unwrap().mul_vec(&u);
        let tr = b.t(&g).unwrap().mul_vec(&u);
        for i in 0..8 {
            assert!((sl[i] - left.coeffs()[i]).abs() < 1e-15);
            assert!((tr[i] - right.coeffs()[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn quaternion_left_right_commute() {
        let b = canonical_lr(2).unwrap();
        let mut rng = Xorshift::new(6);
        for _ in 0..30 {
            let (g, h) = (pt(&mut rng, 3, 0.5), pt(&mut rng, 3, 0.5));
            let c = crate::diffkit::commutator(&b.s(&g).unwrap(), &b.t(&h).unwrap());
            assert!(c.frobenius_norm() <= 1e-12);
        }
    }

    #[test]
    fn unit_argument_gives_zero() {
        let b = canonical_lr(3).unwrap();
        let mut rng = Xorshift::new(10);
        let g = pt(&mut rng, 7, 0.5);
        let e = b.chart().identity();
        let r = birep_residuals(&b, &e, &g).unwrap();
        assert_eq!(r.max(), 0.0);
        let a = associativity_residuals(&b, &g, &e).unwrap();
        assert_eq!(a.left, 0.0);
        assert_eq!(a.right, 0.0);
        assert_eq!(a.commute, 0.0);
    }

    #[test]
    fn determinant_margin() {
        let mut rng = Xorshift::new(12);
        for level in 1..=3 {
            let b = canonical_lr(level).unwrap();
            for _ in 0..20 {
                let g = pt(&mut rng, b.chart().dim(), 0.5);
                for m in [b.s(&g).unwrap(), b.t(&g).unwrap()] {
                    let d = Lu::factor(&m).unwrap().determinant();
                    assert!((0.5..=2.0).contains(&d), "det {d}");
                }
            }
        }
    }

    #[test]
    fn jet_values_match_plain() {
        let b = canonical_lr(3).unwrap();
        let mut rng = Xorshift::new(14);
        let g = pt(&mut rng, 7, 0.5);
        let u = rng.ball(7, 1.0);
        let (vals, _) = jet1_eval(&SMap(&b), g.coords(), &u).unwrap();
        assert_eq!(vals, b.s(&g).unwrap().as_slice());
    }

    #[test]
    fn sampled_table_round_trip() {
        let b = canonical_lr(3).unwrap();
        let c = *b.chart();
        let mut rng = Xorshift::new(15);
        let (g, h) = (pt(&mut rng, 7, 0.4), pt(&mut rng, 7, 0.4));
        let points = vec![
            c.identity(),
            g.clone(),
            h.clone(),
            c.mul(&g, &h).unwrap(),
            c.mul(&h, &g).unwrap(),
        ];
        let table = BirepSamples::tabulate(&b, &points).unwrap();
        let parsed = BirepSamples::from_json(&table.to_json()).unwrap();
        let check = check_sampled(&c, &parsed).unwrap();
        // (e,x), (x,e) for all five points, plus (g,h) and (h,g)
        assert!(check.pairs_checked >= 11, "{check:?}");
        assert!(check.max_left <= 1e-12 && check.max_right <= 1e-12);
        assert_eq!(check.unit, Some(0.0));
    }

    #[test]
    fn malformed_table_rejected() {
        let bad = r#"{"r":3,"n":4,"samples":[{"g":[0.1,0.2],"S":[],"T":[]}]}"#;
        assert!(BirepSamples::from_json(bad).is_err());
        assert!(BirepSamples::from_json("not json").is_err());
    }
}
