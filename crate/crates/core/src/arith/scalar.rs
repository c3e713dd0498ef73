use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use super::field::{rational_sign, FieldElement, NumberField};
use super::poly::{Monomial, Polynomial};
use super::Rational;
use crate::error::{Error, Result};

/// An exact scalar. Rationals combine freely with the other two modes;
/// field elements and symbolic polynomials never mix.
#[derive(Debug, Clone)]
pub enum Scalar {
    Rational(Rational),
    Field(FieldElement),
    Poly(Polynomial),
}

#[derive(Debug, Clone)]
pub enum Mode {
    Rational,
    Field(Arc<NumberField>),
    Symbolic,
}

impl Mode {
    pub fn is_symbolic(&self) -> bool {
        matches!(self, Mode::Symbolic)
    }

    /// Least common mode of two, or `None` when they cannot be mixed.
    pub fn join(&self, other: &Mode) -> Option<Mode> {
        match (self, other) {
            (Mode::Rational, m) | (m, Mode::Rational) => Some(m.clone()),
            (Mode::Symbolic, Mode::Symbolic) => Some(Mode::Symbolic),
            (Mode::Field(a), Mode::Field(b)) => {
                if Arc::ptr_eq(a, b) || a.same_as(b) {
                    Some(Mode::Field(a.clone()))
                } else {
                    None
                }
            }
            _ => None,
        }
    }
}

impl PartialEq for Mode {
    fn eq(&self, other: &Mode) -> bool {
        match (self, other) {
            (Mode::Rational, Mode::Rational) | (Mode::Symbolic, Mode::Symbolic) => true,
            (Mode::Field(a), Mode::Field(b)) => Arc::ptr_eq(a, b) || a.same_as(b),
            _ => false,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Rational => write!(f, "rational"),
            Mode::Field(k) => write!(f, "field {k}"),
            Mode::Symbolic => write!(f, "symbolic"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// A canonical ℚ-basis of the scalar space a value lives in.
#[derive(Debug, Clone)]
pub enum Basis {
    /// The single label 1.
    Rational,
    /// Power basis 1, α, …, α^{d−1}.
    Power(Arc<NumberField>),
    /// Distinct monomials in ascending graded order.
    Monomials(Vec<Monomial>),
}

impl Basis {
    pub fn len(&self) -> usize {
        match self {
            Basis::Rational => 1,
            Basis::Power(k) => k.degree(),
            Basis::Monomials(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn labels(&self) -> Vec<String> {
        match self {
            Basis::Rational => vec!["1".into()],
            Basis::Power(k) => (0..k.degree())
                .map(|i| match i {
                    0 => "1".to_string(),
                    1 => "a".to_string(),
                    _ => format!("a^{i}"),
                })
                .collect(),
            Basis::Monomials(ms) => ms.iter().map(|m| m.to_string()).collect(),
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Basis::Rational => Mode::Rational,
            Basis::Power(k) => Mode::Field(k.clone()),
            Basis::Monomials(_) => Mode::Symbolic,
        }
    }

    /// The scalar with the given coordinates.
    pub fn scalar(&self, coords: &[Rational]) -> Scalar {
        match self {
            Basis::Rational => Scalar::Rational(coords[0].clone()),
            Basis::Power(k) => Scalar::Field(FieldElement::new(k.clone(), coords.to_vec())),
            Basis::Monomials(ms) => Scalar::Poly(Polynomial::from_terms(
                ms.iter().cloned().zip(coords.iter().cloned()),
            )),
        }
    }
}

impl PartialEq for Basis {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Basis::Rational, Basis::Rational) => true,
            (Basis::Power(a), Basis::Power(b)) => Arc::ptr_eq(a, b) || a.same_as(b),
            (Basis::Monomials(a), Basis::Monomials(b)) => a == b,
            _ => false,
        }
    }
}

/// Exact coordinates of a scalar in a canonical ℚ-basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QBasisCoordinates {
    pub basis: Basis,
    pub coords: Vec<Rational>,
}

impl QBasisCoordinates {
    pub fn to_scalar(&self) -> Scalar {
        self.basis.scalar(&self.coords)
    }
}

pub(crate) fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rational(Rational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rational(Rational::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::Rational(rat(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::Rational(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Scalar::Rational(Rational::from_integer(n))
    }

    /// The indeterminate θ_{ij}, i < j.
    pub fn var(i: usize, j: usize) -> Self {
        Scalar::Poly(Polynomial::var(i, j))
    }

    pub fn field(k: &Arc<NumberField>, coeffs: &[Rational]) -> Self {
        Scalar::Field(FieldElement::new(k.clone(), coeffs.to_vec()))
    }

    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Rational(_) => Mode::Rational,
            Scalar::Field(e) => Mode::Field(e.field().clone()),
            Scalar::Poly(_) => Mode::Symbolic,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Field(e) => e.is_zero(),
            Scalar::Poly(p) => p.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().map_or(false, |r| r.is_one())
    }

    /// `Some(r)` when the scalar is a rational number (in any mode).
    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            Scalar::Rational(r) => Some(r.clone()),
            Scalar::Field(e) => e.as_rational(),
            Scalar::Poly(p) => p.as_constant(),
        }
    }

    /// `Some(n)` when the scalar is an integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational().filter(|r| r.is_integer()).map(|r| r.to_integer())
    }

    /// Re-express `self` in `mode`; rationals lift into every mode.
    pub fn lift(&self, mode: &Mode) -> Result<Scalar> {
        match (self, mode) {
            (Scalar::Rational(r), Mode::Field(k)) => {
                Ok(Scalar::Field(FieldElement::from_rational(k.clone(), r.clone())))
            }
            (Scalar::Rational(r), Mode::Symbolic) => Ok(Scalar::Poly(Polynomial::constant(r.clone()))),
            _ => match self.mode().join(mode) {
                Some(_) => Ok(self.clone()),
                None => Err(Error::ModeMismatch(format!("{} vs {}", self.mode(), mode))),
            },
        }
    }

    fn aligned(&self, other: &Scalar) -> Result<(Scalar, Scalar)> {
        let mode = self
            .mode()
            .join(&other.mode())
            .ok_or_else(|| Error::ModeMismatch(format!("{} vs {}", self.mode(), other.mode())))?;
        Ok((self.lift(&mode)?, other.lift(&mode)?))
    }

    /// Exact ring operation with mode checking.
    pub fn arith(&self, other: &Scalar, op: ArithOp) -> Result<Scalar> {
        let (a, b) = self.aligned(other)?;
        Ok(match (a, b) {
            (Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(match op {
                ArithOp::Add => x + y,
                ArithOp::Sub => x - y,
                ArithOp::Mul => x * y,
            }),
            (Scalar::Field(x), Scalar::Field(y)) => Scalar::Field(match op {
                ArithOp::Add => x.add(&y),
                ArithOp::Sub => x.sub(&y),
                ArithOp::Mul => x.mul(&y),
            }),
            (Scalar::Poly(x), Scalar::Poly(y)) => Scalar::Poly(match op {
                ArithOp::Add => x.add(&y),
                ArithOp::Sub => x.sub(&y),
                ArithOp::Mul => x.mul(&y),
            }),
            _ => unreachable!("aligned scalars share a mode"),
        })
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar> {
        self.arith(other, ArithOp::Add)
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.arith(other, ArithOp::Sub)
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar> {
        self.arith(other, ArithOp::Mul)
    }

    pub fn scale(&self, r: &Rational) -> Scalar {
        match self {
            Scalar::Rational(x) => Scalar::Rational(x * r),
            Scalar::Field(e) => Scalar::Field(e.scale(r)),
            Scalar::Poly(p) => Scalar::Poly(p.scale(r)),
        }
    }

    pub fn invert(&self) -> Result<Scalar> {
        match self {
            Scalar::Rational(r) => {
                if r.is_zero() {
                    Err(Error::DivisionByZero)
                } else {
                    Ok(Scalar::Rational(r.recip()))
                }
            }
            Scalar::Field(e) => Ok(Scalar::Field(e.invert()?)),
            Scalar::Poly(p) => match p.as_constant() {
                // a nonzero constant is still invertible
                Some(c) if !c.is_zero() => Ok(Scalar::Poly(Polynomial::constant(c.recip()))),
                Some(_) => Err(Error::DivisionByZero),
                None => Err(Error::UnsupportedInSymbolicMode("inversion")),
            },
        }
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar> {
        self.checked_mul(&other.invert()?)
    }

    /// Sign under the real embedding; symbolic scalars have none.
    pub fn sign(&self) -> Result<i8> {
        match self {
            Scalar::Rational(r) => Ok(rational_sign(r)),
            Scalar::Field(e) => e.sign(),
            Scalar::Poly(_) => Err(Error::UnsupportedInSymbolicMode("sign")),
        }
    }

    pub fn to_f64(&self) -> Result<f64> {
        match self {
            Scalar::Rational(r) => Ok(r.to_f64().unwrap_or(f64::NAN)),
            Scalar::Field(e) => Ok(e.to_f64()),
            Scalar::Poly(p) => match p.as_constant() {
                Some(c) => Ok(c.to_f64().unwrap_or(f64::NAN)),
                None => Err(Error::UnsupportedInSymbolicMode("numeric evaluation")),
            },
        }
    }

    /// Natural basis of this scalar alone: `[1]`, the power basis, or the
    /// monomial support.
    pub fn natural_basis(&self) -> Basis {
        match self {
            Scalar::Rational(_) => Basis::Rational,
            Scalar::Field(e) => Basis::Power(e.field().clone()),
            Scalar::Poly(p) => Basis::Monomials(p.terms().map(|(m, _)| m.clone()).collect()),
        }
    }

    pub fn coordinates(&self) -> QBasisCoordinates {
        let basis = self.natural_basis();
        let coords = self
            .coords_in(&basis)
            .expect("a scalar always has coordinates in its own basis");
        QBasisCoordinates { basis, coords }
    }

    /// Coordinates in a given basis; fails when the scalar does not lie in
    /// its span.
    pub fn coords_in(&self, basis: &Basis) -> Result<Vec<Rational>> {
        let lifted = self.lift(&basis.mode())?;
        match (&lifted, basis) {
            (Scalar::Rational(r), Basis::Rational) => Ok(vec![r.clone()]),
            (Scalar::Field(e), Basis::Power(_)) => Ok(e.coeffs().to_vec()),
            (Scalar::Poly(p), Basis::Monomials(ms)) => {
                let coords: Vec<Rational> = ms.iter().map(|m| p.coeff(m)).collect();
                if p.terms().count() != coords.iter().filter(|c| !c.is_zero()).count() {
                    return Err(Error::LabelMismatch(format!(
                        "{p} has monomials outside the basis"
                    )));
                }
                Ok(coords)
            }
            _ => Err(Error::LabelMismatch(format!("{} is not in {:?}", self, basis.labels()))),
        }
    }
}

/// Common mode of a collection of scalars.
pub fn common_mode<'a, I: IntoIterator<Item = &'a Scalar>>(items: I) -> Result<Mode> {
    let mut mode = Mode::Rational;
    for s in items {
        mode = mode
            .join(&s.mode())
            .ok_or_else(|| Error::ModeMismatch(format!("{} vs {}", mode, s.mode())))?;
    }
    Ok(mode)
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match self.aligned(other) {
            Ok((Scalar::Rational(a), Scalar::Rational(b))) => a == b,
            Ok((Scalar::Field(a), Scalar::Field(b))) => a.coeffs() == b.coeffs(),
            Ok((Scalar::Poly(a), Scalar::Poly(b))) => a == b,
            _ => false,
        }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Rational(r)
    }
}

impl From<BigInt> for Scalar {
    fn from(n: BigInt) -> Self {
        Scalar::from_bigint(n)
    }
}

// Operator forms panic on a mode mismatch; callers validate modes at
// construction (see `SkewMatrix::new`). Use `arith` for checked arithmetic.
macro_rules! scalar_binop {
    ($tr:ident, $method:ident, $op:expr) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.arith(rhs, $op).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add, ArithOp::Add);
scalar_binop!(Sub, sub, ArithOp::Sub);
scalar_binop!(Mul, mul, ArithOp::Mul);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Field(e) => Scalar::Field(e.neg()),
            Scalar::Poly(p) => Scalar::Poly(p.neg()),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{r}"),
            Scalar::Poly(p) => write!(f, "{p}"),
            Scalar::Field(e) => {
                let mut first = true;
                for (i, c) in e.coeffs().iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    if !first {
                        write!(f, " + ")?;
                    }
                    first = false;
                    match i {
                        0 => write!(f, "{c}")?,
                        1 => write!(f, "{c}*a")?,
                        _ => write!(f, "{c}*a^{i}")?,
                    }
                }
                if first {
                    write!(f, "0")?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt2() -> Arc<NumberField> {
        NumberField::quadratic(2).unwrap()
    }

    #[test]
    fn rational_sum() {
        let s = Scalar::ratio(1, 3).arith(&Scalar::ratio(1, 6), ArithOp::Add).unwrap();
        assert_eq!(s, Scalar::ratio(1, 2));
    }

    #[test]
    fn field_square_reduces() {
        let k = sqrt2();
        let a = Scalar::field(&k, &[rat(0), rat(1)]);
        let sq = a.arith(&a, ArithOp::Mul).unwrap();
        assert_eq!(sq, Scalar::int(2));
        assert_eq!(sq.coordinates().coords, vec![rat(2), rat(0)]);
    }

    #[test]
    fn symbolic_product() {
        let p = Scalar::var(1, 2).arith(&Scalar::var(3, 4), ArithOp::Mul).unwrap();
        let c = p.coordinates();
        assert_eq!(c.basis.labels(), vec!["t1_2*t3_4"]);
        assert_eq!(c.coords, vec![rat(1)]);
    }

    #[test]
    fn inversion_cases() {
        assert_eq!(Scalar::ratio(2, 3).invert().unwrap(), Scalar::ratio(3, 2));
        let k = sqrt2();
        let a = Scalar::field(&k, &[rat(0), rat(1)]);
        assert_eq!(a.invert().unwrap(), Scalar::field(&k, &[rat(0), Rational::new(1.into(), 2.into())]));
        assert_eq!(
            Scalar::var(1, 2).invert(),
            Err(Error::UnsupportedInSymbolicMode("inversion"))
        );
        assert_eq!(Scalar::zero().invert(), Err(Error::DivisionByZero));
    }

    #[test]
    fn signs() {
        assert_eq!(Scalar::ratio(-5, 7).sign().unwrap(), -1);
        let k = sqrt2();
        assert_eq!(Scalar::field(&k, &[rat(-1), rat(1)]).sign().unwrap(), 1);
        assert_eq!(Scalar::field(&k, &[]).sign().unwrap(), 0);
        assert!(Scalar::var(1, 2).sign().is_err());
    }

    #[test]
    fn coordinates_examples() {
        let c = Scalar::ratio(3, 4).coordinates();
        assert_eq!(c.basis.labels(), vec!["1"]);
        assert_eq!(c.coords, vec![Rational::new(3.into(), 4.into())]);

        let k = sqrt2();
        let c = Scalar::field(&k, &[rat(1), rat(2)]).coordinates();
        assert_eq!(c.coords, vec![rat(1), rat(2)]);

        let p = Scalar::int(5) - Scalar::var(1, 2) * Scalar::var(3, 4);
        let c = p.coordinates();
        assert_eq!(c.basis.labels(), vec!["1", "t1_2*t3_4"]);
        assert_eq!(c.coords, vec![rat(5), rat(-1)]);
        assert_eq!(c.to_scalar(), p);
    }

    #[test]
    fn mode_mismatch() {
        let k = sqrt2();
        let a = Scalar::field(&k, &[rat(0), rat(1)]);
        assert!(matches!(a.arith(&Scalar::var(1, 2), ArithOp::Add), Err(Error::ModeMismatch(_))));
        let k3 = NumberField::quadratic(3).unwrap();
        let b = Scalar::field(&k3, &[rat(0), rat(1)]);
        assert!(matches!(a.arith(&b, ArithOp::Mul), Err(Error::ModeMismatch(_))));
    }
}
