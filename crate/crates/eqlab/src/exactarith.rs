//! Exact scalars of the form `a + b·√D` with rational `a`, `b`, `D ≥ 0`,
//! together with exact vectors and matrices over them.
//!
//! Everything downstream (Gram matrices, angle certificates, design counts,
//! root-system censuses) is computed in this arithmetic; there is no floating
//! point anywhere in the crate. Rank and determinant use fraction-free
//! Bareiss elimination so certificates like "these 36 vectors span a
//! 15-dimensional space" are exact statements.

use num_bigint::BigInt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rat = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("radicand mismatch: {0} vs {1}")]
    RadicandMismatch(String, String),
    #[error("negative radicand: {0}")]
    NegativeRadicand(String),
    #[error("vector length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("division by zero")]
    DivisionByZero,
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
}

/// `n` as a rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `n/d` as a rational.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses "p/q" or "p" (decimal strings, optional sign).
pub fn parse_rat(s: &str) -> Option<Rat> {
    let mut it = s.splitn(2, '/');
    let num: BigInt = it.next()?.trim().parse().ok()?;
    match it.next() {
        Some(den) => {
            let den: BigInt = den.trim().parse().ok()?;
            if den.is_zero() {
                return None;
            }
            Some(Rat::new(num, den))
        }
        None => Some(Rat::from_integer(num)),
    }
}

/// Canonical "p/q" rendering (always includes the denominator).
pub fn fmt_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn is_integer(r: &Rat) -> bool {
    r.denom().is_one()
}

/// Exact square root of a non-negative rational, if it is a perfect square.
pub fn rational_sqrt(r: &Rat) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    let ns = r.numer().sqrt();
    let ds = r.denom().sqrt();
    if &(&ns * &ns) == r.numer() && &(&ds * &ds) == r.denom() {
        Some(Rat::new(ns, ds))
    } else {
        None
    }
}

/// Floor of the integer square root of a non-negative integer.
pub fn integer_sqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "integer_sqrt of negative value");
    n.sqrt()
}

/// An element `rat + coeff·√radicand` of the real quadratic extension Q(√D).
///
/// Values are normalized: when the radicand is a perfect square of a rational
/// (including 0) the surd part is folded into the rational part, so the exact
/// zero test is simply `rat = coeff = 0`. Arithmetic between two values
/// requires equal radicands unless one side is pure rational.
#[derive(Clone)]
pub struct QuadScalar {
    rat: Rat,
    coeff: Rat,
    radicand: Rat,
}

impl PartialEq for QuadScalar {
    fn eq(&self, other: &Self) -> bool {
        // the stored radicand is irrelevant for pure rationals
        self.rat == other.rat
            && self.coeff == other.coeff
            && (self.coeff.is_zero() || self.radicand == other.radicand)
    }
}

impl Eq for QuadScalar {}

impl QuadScalar {
    pub fn rational(r: Rat) -> Self {
        QuadScalar { rat: r, coeff: Rat::zero(), radicand: Rat::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(rat(n))
    }

    pub fn with_radicand(rat_part: Rat, coeff: Rat, radicand: Rat) -> Result<Self, ArithError> {
        if radicand.is_negative() {
            return Err(ArithError::NegativeRadicand(fmt_rat(&radicand)));
        }
        Ok(QuadScalar { rat: rat_part, coeff, radicand }.normalized())
    }

    /// `√radicand` as a scalar.
    pub fn sqrt_of(radicand: Rat) -> Result<Self, ArithError> {
        Self::with_radicand(Rat::zero(), Rat::one(), radicand)
    }

    fn normalized(mut self) -> Self {
        if self.coeff.is_zero() {
            return self;
        }
        if let Some(s) = rational_sqrt(&self.radicand) {
            self.rat += &self.coeff * s;
            self.coeff = Rat::zero();
        }
        self
    }

    pub fn rat_part(&self) -> &Rat {
        &self.rat
    }

    pub fn coeff_part(&self) -> &Rat {
        &self.coeff
    }

    pub fn radicand(&self) -> &Rat {
        &self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.coeff.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        if self.coeff.is_zero() {
            Some(&self.rat)
        } else {
            None
        }
    }

    /// Exact sign: -1, 0 or +1.
    pub fn sign(&self) -> i8 {
        let sr = sign_of(&self.rat);
        let sc = sign_of(&self.coeff);
        if sc == 0 {
            return sr;
        }
        if sr == 0 {
            return sc;
        }
        if sr == sc {
            return sr;
        }
        // a and b√D have opposite signs: compare a² against b²·D
        let a2 = &self.rat * &self.rat;
        let b2d = &self.coeff * &self.coeff * &self.radicand;
        match a2.cmp(&b2d) {
            std::cmp::Ordering::Greater => sr,
            std::cmp::Ordering::Less => sc,
            std::cmp::Ordering::Equal => 0,
        }
    }

    fn joint_radicand(&self, other: &Self) -> Result<Rat, ArithError> {
        if self.coeff.is_zero() {
            Ok(other.radicand.clone())
        } else if other.coeff.is_zero() || self.radicand == other.radicand {
            Ok(self.radicand.clone())
        } else {
            Err(ArithError::RadicandMismatch(
                fmt_rat(&self.radicand),
                fmt_rat(&other.radicand),
            ))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, ArithError> {
        let d = self.joint_radicand(other)?;
        Ok(QuadScalar {
            rat: &self.rat + &other.rat,
            coeff: &self.coeff + &other.coeff,
            radicand: d,
        }
        .normalized())
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, ArithError> {
        self.try_add(&other.clone().neg())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, ArithError> {
        let d = self.joint_radicand(other)?;
        Ok(QuadScalar {
            rat: &self.rat * &other.rat + &self.coeff * &other.coeff * &d,
            coeff: &self.rat * &other.coeff + &self.coeff * &other.rat,
            radicand: d,
        }
        .normalized())
    }

    pub fn scale(&self, r: &Rat) -> Self {
        QuadScalar {
            rat: &self.rat * r,
            coeff: &self.coeff * r,
            radicand: self.radicand.clone(),
        }
    }

    /// Multiplicative inverse via the conjugate.
    pub fn inv(&self) -> Result<Self, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        let norm = &self.rat * &self.rat - &self.coeff * &self.coeff * &self.radicand;
        // norm ≠ 0: the radicand of a non-rational value is never a perfect square
        Ok(QuadScalar {
            rat: &self.rat / &norm,
            coeff: -(&self.coeff / &norm),
            radicand: self.radicand.clone(),
        })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, ArithError> {
        self.try_mul(&other.inv()?)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = QuadScalar::rational(Rat::one());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.try_mul(&base).expect("same radicand");
            }
            base = base.try_mul(&base.clone()).expect("same radicand");
            e >>= 1;
        }
        acc
    }

    pub fn cmp_exact(&self, other: &Self) -> Result<std::cmp::Ordering, ArithError> {
        let diff = self.try_sub(other)?;
        Ok(match diff.sign() {
            1 => std::cmp::Ordering::Greater,
            -1 => std::cmp::Ordering::Less,
            _ => std::cmp::Ordering::Equal,
        })
    }
}

fn sign_of(r: &Rat) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_negative() {
        -1
    } else {
        1
    }
}

impl fmt::Debug for QuadScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff.is_zero() {
            write!(f, "{}", self.rat)
        } else {
            write!(f, "{} + {}*sqrt({})", self.rat, self.coeff, self.radicand)
        }
    }
}

impl fmt::Display for QuadScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for &QuadScalar {
            type Output = QuadScalar;
            fn $method(self, rhs: &QuadScalar) -> QuadScalar {
                self.$checked(rhs).expect("quadratic scalars share one radicand")
            }
        }
        impl $trait for QuadScalar {
            type Output = QuadScalar;
            fn $method(self, rhs: QuadScalar) -> QuadScalar {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for QuadScalar {
    type Output = QuadScalar;
    fn neg(self) -> QuadScalar {
        QuadScalar { rat: -self.rat, coeff: -self.coeff, radicand: self.radicand }
    }
}

impl Neg for &QuadScalar {
    type Output = QuadScalar;
    fn neg(self) -> QuadScalar {
        self.clone().neg()
    }
}

/// Exact inner product Σ uᵢ·vᵢ.
pub fn inner_product(u: &[QuadScalar], v: &[QuadScalar]) -> Result<QuadScalar, ArithError> {
    if u.len() != v.len() {
        return Err(ArithError::LengthMismatch(u.len(), v.len()));
    }
    let mut acc = QuadScalar::rational(Rat::zero());
    for (a, b) in u.iter().zip(v) {
        acc = acc.try_add(&a.try_mul(b)?)?;
    }
    Ok(acc)
}

/// Dense matrix over `QuadScalar`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<QuadScalar>,
}

impl ExactMatrix {
    pub fn from_rows(rows: Vec<Vec<QuadScalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        ExactMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_rat_rows(rows: Vec<Vec<Rat>>) -> Self {
        Self::from_rows(
            rows.into_iter()
                .map(|row| row.into_iter().map(QuadScalar::rational).collect())
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        let mut rows = vec![vec![QuadScalar::rational(Rat::zero()); n]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = QuadScalar::rational(Rat::one());
        }
        Self::from_rows(rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &QuadScalar {
        &self.data[i * self.cols + j]
    }

    pub fn transpose(&self) -> Self {
        let mut rows = Vec::with_capacity(self.cols);
        for j in 0..self.cols {
            rows.push((0..self.rows).map(|i| self.get(i, j).clone()).collect());
        }
        Self::from_rows(rows)
    }

    /// Exact rank by fraction-free (Bareiss) elimination.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<QuadScalar>> = (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect();
        let mut prev = QuadScalar::rational(Rat::one());
        let mut rank = 0;
        let mut col = 0;
        while rank < self.rows && col < self.cols {
            let pivot = (rank..self.rows).find(|&i| !m[i][col].is_zero());
            let Some(p) = pivot else {
                col += 1;
                continue;
            };
            m.swap(rank, p);
            for i in rank + 1..self.rows {
                for j in col + 1..self.cols {
                    let t = &(&m[rank][col] * &m[i][j]) - &(&m[i][col] * &m[rank][j]);
                    m[i][j] = t.try_div(&prev).expect("bareiss division is exact");
                }
                m[i][col] = QuadScalar::rational(Rat::zero());
            }
            prev = m[rank][col].clone();
            rank += 1;
            col += 1;
        }
        rank
    }

    /// Exact determinant (Bareiss: the last pivot, with row-swap sign).
    pub fn det(&self) -> Result<QuadScalar, ArithError> {
        if self.rows != self.cols {
            return Err(ArithError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(QuadScalar::rational(Rat::one()));
        }
        let mut m: Vec<Vec<QuadScalar>> =
            (0..n).map(|i| self.data[i * n..(i + 1) * n].to_vec()).collect();
        let mut prev = QuadScalar::rational(Rat::one());
        let mut sign = 1i8;
        for k in 0..n {
            if m[k][k].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                    return Ok(QuadScalar::rational(Rat::zero()));
                };
                m.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                    m[i][j] = t.try_div(&prev).expect("bareiss division is exact");
                }
                m[i][k] = QuadScalar::rational(Rat::zero());
            }
            prev = m[k][k].clone();
        }
        let d = m[n - 1][n - 1].clone();
        Ok(if sign < 0 { -d } else { d })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(r: i64, c: i64, d: i64) -> QuadScalar {
        QuadScalar::with_radicand(rat(r), rat(c), rat(d)).unwrap()
    }

    #[test]
    fn conjugate_product() {
        // (1+√3)(1−√3) = −2
        let p = q(1, 1, 3).try_mul(&q(1, -1, 3)).unwrap();
        assert_eq!(p, QuadScalar::from_int(-2));
    }

    #[test]
    fn sqrt_squared() {
        let s = QuadScalar::sqrt_of(rat(3)).unwrap();
        assert_eq!(s.try_mul(&s).unwrap(), QuadScalar::from_int(3));
    }

    #[test]
    fn rational_case() {
        let p = q(2, 0, 3).try_mul(&q(5, 0, 3)).unwrap();
        assert_eq!(p, QuadScalar::from_int(10));
    }

    #[test]
    fn radicand_mismatch_is_an_error() {
        let a = QuadScalar::sqrt_of(rat(2)).unwrap();
        let b = QuadScalar::sqrt_of(rat(3)).unwrap();
        assert!(a.try_mul(&b).is_err());
        // pure rationals are radicand-agnostic
        let r = q(7, 0, 2).try_mul(&b).unwrap();
        assert_eq!(r, q(0, 7, 3));
    }

    #[test]
    fn perfect_square_radicand_normalizes() {
        // 1 + 2·√(9/4) = 4, so the value is pure rational and zero testing is exact
        let v = QuadScalar::with_radicand(rat(1), rat(2), ratio(9, 4)).unwrap();
        assert_eq!(v, QuadScalar::from_int(4));
        let z = QuadScalar::with_radicand(rat(-3), rat(2), ratio(9, 4)).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn sign_of_mixed_terms() {
        // 7 − 4√3 > 0 (49 > 48), 2 − 2√3 < 0
        assert_eq!(q(7, -4, 3).sign(), 1);
        assert_eq!(q(2, -2, 3).sign(), -1);
        assert_eq!(q(0, 0, 3).sign(), 0);
    }

    #[test]
    fn inner_product_unit() {
        let e0: Vec<QuadScalar> =
            (0..5).map(|i| QuadScalar::from_int((i == 0) as i64)).collect();
        assert_eq!(inner_product(&e0, &e0).unwrap(), QuadScalar::from_int(1));
        assert!(inner_product(&e0, &e0[..3]).is_err());
    }

    #[test]
    fn identity_rank_and_det() {
        let id = ExactMatrix::identity(5);
        assert_eq!(id.rank(), 5);
        assert_eq!(id.det().unwrap(), QuadScalar::from_int(1));
    }

    #[test]
    fn rank_of_rank_deficient_quad_matrix() {
        // rows 2 and 3 are multiples of row 1 by √2 and 2
        let s2 = QuadScalar::sqrt_of(rat(2)).unwrap();
        let row: Vec<QuadScalar> = vec![q(1, 1, 2), q(3, 0, 2), q(0, 2, 2)];
        let row2: Vec<QuadScalar> = row.iter().map(|x| x.try_mul(&s2).unwrap()).collect();
        let row3: Vec<QuadScalar> = row.iter().map(|x| x.scale(&rat(2))).collect();
        let m = ExactMatrix::from_rows(vec![row, row2, row3]);
        assert_eq!(m.rank(), 1);
        assert!(m.det().unwrap().is_zero());
        assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn det_with_surds() {
        // det [[√2, 1], [1, √2]] = 2 − 1 = 1
        let s2 = QuadScalar::sqrt_of(rat(2)).unwrap();
        let one = QuadScalar::from_int(1);
        let m = ExactMatrix::from_rows(vec![
            vec![s2.clone(), one.clone()],
            vec![one, s2],
        ]);
        assert_eq!(m.det().unwrap(), QuadScalar::from_int(1));
    }

    #[test]
    fn rational_sqrt_detection() {
        assert_eq!(rational_sqrt(&ratio(9, 4)), Some(ratio(3, 2)));
        assert_eq!(rational_sqrt(&rat(81)), Some(rat(9)));
        assert_eq!(rational_sqrt(&rat(34)), None);
        assert_eq!(rational_sqrt(&ratio(3, 2)), None);
        assert_eq!(rational_sqrt(&rat(0)), Some(rat(0)));
    }
}
