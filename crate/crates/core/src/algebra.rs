//! Cayley-Dickson algebras over a generic scalar.
//!
//! Level `k` has dimension `2^k`: reals (0), complexes (1), quaternions (2),
//! octonions (3) and sedenions (4). Multiplication uses the doubling rule
//!
//! ```text
//! (a, b)(c, d) = (ac - conj(d) b,  d a + b conj(c))
//! ```
//!
//! Every sign table in this crate is relative to that rule.

use serde::{Deserialize, Serialize};

use crate::diffkit::Scalar;
use crate::error::{Error, Result};

pub const MAX_LEVEL: u32 = 4;

/// Element of the level-`k` Cayley-Dickson algebra; `coeffs[0]` is the real
/// part.
#[derive(Clone, Debug, PartialEq)]
pub struct CdElement<S> {
    level: u32,
    coeffs: Vec<S>,
}

fn check_level(level: u32) -> Result<()> {
    if level <= MAX_LEVEL {
        Ok(())
    } else {
        Err(Error::UnsupportedLevel(level))
    }
}

fn conj_slice<S: Scalar>(a: &[S]) -> Vec<S> {
    let mut out = a.to_vec();
    for c in out.iter_mut().skip(1) {
        *c = -*c;
    }
    out
}

fn mul_slices<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    let n = a.len();
    if n == 1 {
        return vec![a[0] * b[0]];
    }
    let h = n / 2;
    let (p, q) = a.split_at(h);
    let (r, s) = b.split_at(h);
    let pr = mul_slices(p, r);
    let sq = mul_slices(&conj_slice(s), q);
    let sp = mul_slices(s, p);
    let qr = mul_slices(q, &conj_slice(r));
    let mut out = Vec::with_capacity(n);
    out.extend(pr.iter().zip(&sq).map(|(x, y)| *x - *y));
    out.extend(sp.iter().zip(&qr).map(|(x, y)| *x + *y));
    out
}

impl<S: Scalar> CdElement<S> {
    pub fn new(level: u32, coeffs: Vec<S>) -> Result<Self> {
        check_level(level)?;
        let dim = 1usize << level;
        if coeffs.len() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: coeffs.len(),
            });
        }
        Ok(Self { level, coeffs })
    }

    pub fn zero(level: u32) -> Result<Self> {
        Self::new(level, vec![S::zero(); 1 << level])
    }

    /// The basis unit `e_i` (`e_0` is the multiplicative unit).
    pub fn basis(level: u32, i: usize) -> Result<Self> {
        let mut e = Self::zero(level)?;
        let dim = e.coeffs.len();
        *e.coeffs.get_mut(i).ok_or(Error::Dimension { expected: dim, got: i })? = S::one();
        Ok(e)
    }

    pub fn unit(level: u32) -> Result<Self> {
        Self::basis(level, 0)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    pub fn real(&self) -> S {
        self.coeffs[0]
    }

    fn same_level(&self, other: &Self) -> Result<()> {
        if self.level == other.level {
            Ok(())
        } else {
            Err(Error::LevelMismatch(self.level, other.level))
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_level(other)?;
        Ok(Self {
            level: self.level,
            coeffs: mul_slices(&self.coeffs, &other.coeffs),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_level(other)?;
        Ok(Self {
            level: self.level,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| *a + *b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_level(other)?;
        Ok(Self {
            level: self.level,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| *a - *b).collect(),
        })
    }

    pub fn scale(&self, k: S) -> Self {
        Self {
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| *c * k).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            level: self.level,
            coeffs: conj_slice(&self.coeffs),
        }
    }

    pub fn norm2(&self) -> S {
        self.coeffs.iter().fold(S::zero(), |acc, c| acc + *c * *c)
    }

    pub fn inv(&self) -> Result<Self> {
        let n2 = self.norm2();
        if n2.value() == 0.0 {
            return Err(Error::ZeroDivisor);
        }
        let conj = self.conj();
        Ok(Self {
            level: self.level,
            coeffs: conj.coeffs.into_iter().map(|c| c / n2).collect(),
        })
    }

    /// Primal values of the coefficients.
    pub fn values(&self) -> CdElement<f64> {
        CdElement {
            level: self.level,
            coeffs: self.coeffs.iter().map(Scalar::value).collect(),
        }
    }
}

impl CdElement<f64> {
    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.norm2().sqrt()
    }
}

pub fn cd_mul<S: Scalar>(a: &CdElement<S>, b: &CdElement<S>) -> Result<CdElement<S>> {
    a.mul(b)
}

pub fn cd_conj<S: Scalar>(a: &CdElement<S>) -> CdElement<S> {
    a.conj()
}

pub fn cd_norm2<S: Scalar>(a: &CdElement<S>) -> S {
    a.norm2()
}

pub fn cd_inv<S: Scalar>(a: &CdElement<S>) -> Result<CdElement<S>> {
    a.inv()
}

/// `max(|(aa)b - a(ab)|, |(ab)b - a(bb)|)`
pub fn alternativity_residual(a: &CdElement<f64>, b: &CdElement<f64>) -> Result<f64> {
    let left = a.mul(a)?.mul(b)?.sub(&a.mul(&a.mul(b)?)?)?;
    let right = a.mul(b)?.mul(b)?.sub(&a.mul(&b.mul(b)?)?)?;
    Ok(left.norm().max(right.norm()))
}

/// Largest alternativity defect found by [`alternativity_scan`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlternativityWitness {
    pub residual: f64,
    /// `a = e_i + e_j` (`i == j` means `a = e_i`)
    pub a_units: (usize, usize),
    /// `b = e_k`
    pub b_unit: usize,
}

/// Exhaustive scan over `a = e_i + e_j` (`i <= j`, `i == j` meaning the single
/// unit) and `b = e_k`. Pairs of single units always generate an associative
/// subalgebra, so a defect can only appear for two-unit sums.
pub fn alternativity_scan(level: u32) -> Result<AlternativityWitness> {
    check_level(level)?;
    let dim = 1usize << level;
    let mut best = AlternativityWitness {
        residual: 0.0,
        a_units: (0, 0),
        b_unit: 0,
    };
    for i in 0..dim {
        for j in i..dim {
            let a = if i == j {
                CdElement::<f64>::basis(level, i)?
            } else {
                CdElement::basis(level, i)?.add(&CdElement::basis(level, j)?)?
            };
            for k in 0..dim {
                let residual = alternativity_residual(&a, &CdElement::basis(level, k)?)?;
                if residual > best.residual {
                    best = AlternativityWitness {
                        residual,
                        a_units: (i, j),
                        b_unit: k,
                    };
                }
            }
        }
    }
    Ok(best)
}

/// `e_i e_j = sign * e_m`
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub i: usize,
    pub j: usize,
    pub sign: i8,
    pub m: usize,
}

/// Signed multiplication table of the basis units at one level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisTable {
    pub level: u32,
    pub entries: Vec<TableEntry>,
}

impl BasisTable {
    pub fn dim(&self) -> usize {
        1 << self.level
    }

    /// `(sign, m)` with `e_i e_j = sign * e_m`.
    pub fn product(&self, i: usize, j: usize) -> (i8, usize) {
        let e = self.entries[i * self.dim() + j];
        (e.sign, e.m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }
}

pub fn basis_table(level: u32) -> Result<BasisTable> {
    if level == 0 {
        return Err(Error::UnsupportedLevel(level));
    }
    check_level(level)?;
    let dim = 1usize << level;
    let mut entries = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        let ei = CdElement::<f64>::basis(level, i)?;
        for j in 0..dim {
            let p = ei.mul(&CdElement::basis(level, j)?)?;
            let (m, v) = p
                .coeffs()
                .iter()
                .enumerate()
                .find(|(_, v)| **v != 0.0)
                .map(|(m, v)| (m, *v))
                .expect("basis products are signed basis units");
            entries.push(TableEntry {
                i,
                j,
                sign: if v > 0.0 { 1 } else { -1 },
                m,
            });
        }
    }
    Ok(BasisTable { level, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffkit::Jet1;
    use crate::rng::Xorshift;

    fn random(level: u32, rng: &mut Xorshift) -> CdElement<f64> {
        CdElement::new(level, (0..1 << level).map(|_| rng.uniform(-1.0, 1.0)).collect()).unwrap()
    }

    fn e(level: u32, i: usize) -> CdElement<f64> {
        CdElement::basis(level, i).unwrap()
    }

    #[test]
    fn unit_is_neutral() {
        let mut rng = Xorshift::new(3);
        for level in 0..=4 {
            let x = random(level, &mut rng);
            assert_eq!(e(level, 0).mul(&x).unwrap(), x);
            assert_eq!(x.mul(&e(level, 0)).unwrap(), x);
        }
    }

    #[test]
    fn quaternion_e1_e2_is_e3() {
        assert_eq!(e(2, 1).mul(&e(2, 2)).unwrap(), e(2, 3));
    }

    #[test]
    fn octonion_associator_of_units() {
        let lhs = e(3, 1).mul(&e(3, 2)).unwrap().mul(&e(3, 4)).unwrap();
        let rhs = e(3, 1).mul(&e(3, 2).mul(&e(3, 4)).unwrap()).unwrap();
        assert!((lhs.sub(&rhs).unwrap().norm() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_cases() {
        assert_eq!(e(3, 0).inv().unwrap(), e(3, 0));
        let mut rng = Xorshift::new(11);
        for _ in 0..20 {
            let a = random(3, &mut rng);
            let n = a.norm();
            let u = a.scale(1.0 / n);
            let diff = u.inv().unwrap().sub(&u.conj()).unwrap();
            assert!(diff.norm() < 1e-15);
            let one = a.mul(&a.inv().unwrap()).unwrap().sub(&e(3, 0)).unwrap();
            assert!(one.norm() <= 1e-12);
        }
        assert_eq!(CdElement::<f64>::zero(2).unwrap().inv(), Err(Error::ZeroDivisor));
    }

    #[test]
    fn level_mismatch_rejected() {
        assert_eq!(e(2, 1).mul(&e(3, 1)), Err(Error::LevelMismatch(2, 3)));
        assert!(CdElement::<f64>::new(5, vec![0.0; 32]).is_err());
    }

    #[test]
    fn tables() {
        let t1 = basis_table(1).unwrap();
        assert_eq!(t1.product(1, 1), (-1, 0));
        let t2 = basis_table(2).unwrap();
        for i in 1..4 {
            for j in 1..4 {
                if i != j {
                    let (s1, m1) = t2.product(i, j);
                    let (s2, m2) = t2.product(j, i);
                    assert_eq!(m1, m2);
                    assert_eq!(s1, -s2);
                }
            }
        }
        for level in 1..=4 {
            let t = basis_table(level).unwrap();
            let dim = t.dim();
            for i in 0..dim {
                let mut row: Vec<usize> = (0..dim).map(|j| t.product(i, j).1).collect();
                let mut col: Vec<usize> = (0..dim).map(|j| t.product(j, i).1).collect();
                row.sort_unstable();
                col.sort_unstable();
                assert_eq!(row, (0..dim).collect::<Vec<_>>());
                assert_eq!(col, (0..dim).collect::<Vec<_>>());
                assert_eq!(t.product(0, i), (1, i));
                assert_eq!(t.product(i, 0), (1, i));
                if i > 0 {
                    assert_eq!(t.product(i, i), (-1, 0));
                }
            }
        }
    }

    #[test]
    fn alternativity() {
        let mut rng = Xorshift::new(5);
        for level in 1..=3 {
            for _ in 0..50 {
                let (a, b) = (random(level, &mut rng), random(level, &mut rng));
                assert!(alternativity_residual(&a, &b).unwrap() <= 1e-12);
            }
        }
        assert_eq!(alternativity_residual(&random(3, &mut rng), &e(3, 0)).unwrap(), 0.0);
    }

    #[test]
    fn sedenions_fail_alternativity_and_composition() {
        let mut worst_alt: f64 = 0.0;
        let mut worst_comp: f64 = 0.0;
        for i in 0..16 {
            for j in 0..16 {
                worst_alt = worst_alt.max(alternativity_residual(&e(4, i), &e(4, j)).unwrap());
            }
        }
        // Basis products are signed units, so composition failure needs sums.
        for i in 1..16 {
            for j in 1..16 {
                for k in 1..16 {
                    for l in 1..16 {
                        let a = e(4, i).add(&e(4, j)).unwrap();
                        let b = e(4, k).add(&e(4, l)).unwrap();
                        let lhs = a.mul(&b).unwrap().norm2();
                        worst_comp = worst_comp.max((lhs - a.norm2() * b.norm2()).abs());
                    }
                }
            }
        }
        // any two units span a quaternion subalgebra
        assert_eq!(worst_alt, 0.0);
        let w = alternativity_scan(4).unwrap();
        assert!(w.residual >= 1.0, "sedenion alternativity defect {w:?}");
        let (i, j) = w.a_units;
        assert_ne!(i, j);
        assert!(worst_comp >= 0.1, "sedenion composition defect {worst_comp}");
    }

    #[test]
    fn scan_clean_up_to_octonions() {
        for level in 1..=3 {
            assert!(alternativity_scan(level).unwrap().residual <= 1e-12);
        }
    }

    #[test]
    fn composition_levels_1_to_3() {
        let mut rng = Xorshift::new(9);
        for level in 1..=3 {
            for _ in 0..100 {
                let (a, b) = (random(level, &mut rng), random(level, &mut rng));
                let lhs = a.mul(&b).unwrap().norm2();
                let rhs = a.norm2() * b.norm2();
                assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
            }
        }
    }

    #[test]
    fn jet_scalars_agree_with_plain() {
        let mut rng = Xorshift::new(13);
        let a = random(3, &mut rng);
        let b = random(3, &mut rng);
        let lift = |x: &CdElement<f64>| {
            CdElement::new(3, x.coeffs().iter().map(|v| Jet1::new(*v, 0.25)).collect()).unwrap()
        };
        let j = lift(&a).mul(&lift(&b)).unwrap().values();
        assert_eq!(j, a.mul(&b).unwrap());
    }

    #[test]
    fn table_json_shape() {
        let v: serde_json::Value = serde_json::from_str(&basis_table(3).unwrap().to_json()).unwrap();
        assert_eq!(v["level"], 3);
        assert_eq!(v["entries"].as_array().unwrap().len(), 64);
        assert_eq!(v["entries"][9], serde_json::json!({"i":1,"j":1,"sign":-1,"m":0}));
    }
}
