//! Real number fields ℚ(α) given by a monic minimal polynomial and an
//! isolating interval selecting one real embedding.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::upoly;
use super::Rational;
use crate::error::{Error, Result};

/// Bisection steps before a failed sign determination is blamed on the
/// field specification.
const MAX_REFINEMENTS: usize = 4096;

#[derive(Debug, Clone)]
pub struct NumberField {
    minpoly: Vec<Rational>,
    lo: Rational,
    hi: Rational,
    // Pre-refined isolating interval, used as the starting point for sign
    // determination. Always contained in (lo, hi).
    tight_lo: Rational,
    tight_hi: Rational,
    // For x² + c₁x + c₀: the sign s with α = (−c₁ + s√D)/2.
    quadratic_branch: Option<i8>,
}

impl NumberField {
    /// `minpoly` lists coefficients from the constant term up and must be monic.
    pub fn new(minpoly: Vec<Rational>, lo: Rational, hi: Rational) -> Result<Arc<Self>> {
        let mut minpoly = minpoly;
        upoly::trim(&mut minpoly);
        let d = upoly::degree(&minpoly)
            .filter(|d| *d >= 1)
            .ok_or_else(|| Error::InvalidFieldSpec("degree must be at least 1".into()))?;
        if !minpoly[d].is_one() {
            return Err(Error::InvalidFieldSpec("minimal polynomial must be monic".into()));
        }
        if lo >= hi {
            return Err(Error::InvalidFieldSpec("interval must satisfy lo < hi".into()));
        }
        let plo = upoly::eval(&minpoly, &lo);
        let phi = upoly::eval(&minpoly, &hi);
        if plo.is_zero() || phi.is_zero() || plo.signum() == phi.signum() {
            return Err(Error::InvalidFieldSpec(
                "minimal polynomial must change sign strictly inside the interval".into(),
            ));
        }
        let g = upoly::gcd(&minpoly, &upoly::derivative(&minpoly));
        if upoly::degree(&g).unwrap_or(0) > 0 {
            return Err(Error::ReducibleFieldSpec("polynomial is not square-free".into()));
        }
        if upoly::sturm_count(&minpoly, &lo, &hi) != 1 {
            return Err(Error::InvalidFieldSpec(
                "interval must isolate exactly one root".into(),
            ));
        }
        if (2..=3).contains(&d) {
            if let Some(roots) = upoly::rational_roots(&minpoly) {
                if let Some(r) = roots.first() {
                    return Err(Error::ReducibleFieldSpec(format!("rational root {r}")));
                }
            }
        }
        let mut field = NumberField {
            minpoly,
            tight_lo: lo.clone(),
            tight_hi: hi.clone(),
            lo,
            hi,
            quadratic_branch: None,
        };
        let (tl, th) = field.refine(64);
        field.tight_lo = tl;
        field.tight_hi = th;
        if d == 2 {
            // 2α + c₁ keeps one sign on the isolating interval
            let at = |x: &Rational| x * int(2) + &field.minpoly[1];
            let (a, b) = (at(&field.tight_lo), at(&field.tight_hi));
            if a.signum() == b.signum() && !a.is_zero() {
                field.quadratic_branch = Some(rational_sign(&a));
            }
        }
        Ok(Arc::new(field))
    }

    /// ℚ(√d) with the positive square root, for a non-square positive integer `d`.
    pub fn quadratic(d: i64) -> Result<Arc<Self>> {
        let root = (d as f64).sqrt().floor() as i64;
        NumberField::new(
            vec![int(-d), int(0), int(1)],
            int(root),
            int(root + 1),
        )
    }

    pub fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }

    pub fn minpoly(&self) -> &[Rational] {
        &self.minpoly
    }

    pub fn interval(&self) -> (&Rational, &Rational) {
        (&self.lo, &self.hi)
    }

    /// Same polynomial and the two intervals isolate the same root.
    pub fn same_as(&self, other: &NumberField) -> bool {
        if self.minpoly != other.minpoly {
            return false;
        }
        let lo = std::cmp::max(&self.lo, &other.lo);
        let hi = std::cmp::min(&self.hi, &other.hi);
        lo < hi && upoly::sturm_count(&self.minpoly, lo, hi) == 1
    }

    // k bisection steps from the user interval
    fn refine(&self, steps: usize) -> (Rational, Rational) {
        let mut lo = self.tight_lo.clone();
        let mut hi = self.tight_hi.clone();
        let lo_sign = upoly::eval(&self.minpoly, &lo).signum();
        let two = int(2);
        for _ in 0..steps {
            let mid = (&lo + &hi) / &two;
            let pm = upoly::eval(&self.minpoly, &mid);
            if pm.is_zero() {
                // rational root: collapse to a tiny interval around it
                return (mid.clone(), mid);
            }
            if pm.signum() == lo_sign {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, hi)
    }

    fn reduce(&self, mut p: Vec<Rational>) -> Vec<Rational> {
        upoly::trim(&mut p);
        if p.len() > self.degree() {
            p = upoly::rem(&p, &self.minpoly);
        }
        p.resize(self.degree(), Rational::zero());
        p
    }
}

impl fmt::Display for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q[x]/(")?;
        let mut first = true;
        for (i, c) in self.minpoly.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*x")?,
                _ => write!(f, "{c}*x^{i}")?,
            }
        }
        write!(f, "), root in ({}, {})", self.lo, self.hi)
    }
}

fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Element of a [`NumberField`] in the power basis 1, α, …, α^{d−1}.
#[derive(Debug, Clone)]
pub struct FieldElement {
    field: Arc<NumberField>,
    coeffs: Vec<Rational>,
}

impl FieldElement {
    pub fn new(field: Arc<NumberField>, coeffs: Vec<Rational>) -> Self {
        let coeffs = field.reduce(coeffs);
        FieldElement { field, coeffs }
    }

    pub fn from_rational(field: Arc<NumberField>, r: Rational) -> Self {
        FieldElement::new(field, vec![r])
    }

    /// The generator α.
    pub fn generator(field: Arc<NumberField>) -> Self {
        FieldElement::new(field, vec![Rational::zero(), Rational::one()])
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// `Some(r)` when the element lies in ℚ.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub(crate) fn same_field(&self, other: &FieldElement) -> bool {
        Arc::ptr_eq(&self.field, &other.field) || self.field.same_as(&other.field)
    }

    pub fn add(&self, other: &FieldElement) -> FieldElement {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        FieldElement { field: self.field.clone(), coeffs }
    }

    pub fn sub(&self, other: &FieldElement) -> FieldElement {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        FieldElement { field: self.field.clone(), coeffs }
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &FieldElement) -> FieldElement {
        let prod = upoly::mul(&self.coeffs, &other.coeffs);
        FieldElement::new(self.field.clone(), prod)
    }

    pub fn scale(&self, r: &Rational) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    pub fn invert(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.field.degree() == 2 {
            // (a + bα)(a − bc₁ − bα) = a² − abc₁ + b²c₀
            let m = &self.field.minpoly;
            let (a, b) = (&self.coeffs[0], &self.coeffs[1]);
            let norm = a * a - a * b * &m[1] + b * b * &m[0];
            return Ok(FieldElement::new(self.field.clone(), vec![(a - b * &m[1]) / &norm, -b / &norm]));
        }
        let (g, s) = upoly::ext_gcd_mod(&self.coeffs, &self.field.minpoly);
        if upoly::degree(&g).unwrap_or(0) > 0 {
            return Err(Error::ReducibleFieldSpec(format!(
                "nontrivial common factor of degree {}",
                g.len() - 1
            )));
        }
        Ok(FieldElement::new(self.field.clone(), s))
    }

    /// Sign under the embedding fixed by the isolating interval.
    pub fn sign(&self) -> Result<i8> {
        let mut a = self.coeffs.clone();
        upoly::trim(&mut a);
        match upoly::degree(&a) {
            None => return Ok(0),
            Some(0) => return Ok(rational_sign(&a[0])),
            _ => {}
        }
        let field = &self.field;
        if let Some(branch) = field.quadratic_branch {
            return Ok(quadratic_sign(&a, &field.minpoly, branch));
        }
        let mut lo = field.tight_lo.clone();
        let mut hi = field.tight_hi.clone();
        let lo_sign = upoly::eval(&field.minpoly, &lo).signum();
        let two = int(2);
        for _ in 0..MAX_REFINEMENTS {
            if lo == hi {
                let v = upoly::eval(&a, &lo);
                if v.is_zero() {
                    return Err(Error::ReducibleFieldSpec(
                        "nonzero element vanishes at the root".into(),
                    ));
                }
                return Ok(rational_sign(&v));
            }
            let (vlo, vhi) = interval_eval(&a, &lo, &hi);
            if vlo.is_positive() {
                return Ok(1);
            }
            if vhi.is_negative() {
                return Ok(-1);
            }
            let mid = (&lo + &hi) / &two;
            let pm = upoly::eval(&field.minpoly, &mid);
            if pm.is_zero() {
                lo = mid.clone();
                hi = mid;
            } else if pm.signum() == lo_sign {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let g = upoly::gcd(&a, &field.minpoly);
        if upoly::degree(&g).unwrap_or(0) > 0 {
            return Err(Error::ReducibleFieldSpec(
                "element shares a factor with the minimal polynomial".into(),
            ));
        }
        Err(Error::InvariantViolation("sign refinement did not terminate".into()))
    }

    /// Floating-point value under the selected embedding.
    pub fn to_f64(&self) -> f64 {
        if let (Some(branch), 2) = (self.field.quadratic_branch, self.coeffs.len()) {
            let m = &self.field.minpoly;
            let f = |r: &Rational| r.to_f64().unwrap_or(f64::NAN);
            let disc = f(&(&m[1] * &m[1] - &m[0] * int(4)));
            return f(&self.coeffs[0]) + f(&self.coeffs[1]) * (-f(&m[1]) + branch as f64 * disc.sqrt()) / 2.0;
        }
        let mid = (&self.field.tight_lo + &self.field.tight_hi) / int(2);
        upoly::eval(&self.coeffs, &mid).to_f64().unwrap_or(f64::NAN)
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.same_field(other) && self.coeffs == other.coeffs
    }
}

// a₀ + a₁α = u + v√D with u = a₀ − a₁c₁/2, v = s·a₁/2, D = c₁² − 4c₀ not a square.
fn quadratic_sign(a: &[Rational], minpoly: &[Rational], branch: i8) -> i8 {
    let two = int(2);
    let u = &a[0] - &a[1] * &minpoly[1] / &two;
    let v = &a[1] * int(branch as i64) / &two;
    let disc = &minpoly[1] * &minpoly[1] - &minpoly[0] * int(4);
    let (su, sv) = (rational_sign(&u), rational_sign(&v));
    if sv == 0 || su == sv {
        return su;
    }
    if su == 0 {
        return sv;
    }
    if &u * &u > &v * &v * disc {
        su
    } else {
        sv
    }
}

pub(crate) fn rational_sign(r: &Rational) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

// Horner's rule in exact interval arithmetic.
fn interval_eval(p: &[Rational], lo: &Rational, hi: &Rational) -> (Rational, Rational) {
    let mut acc_lo = Rational::zero();
    let mut acc_hi = Rational::zero();
    for c in p.iter().rev() {
        let cands = [&acc_lo * lo, &acc_lo * hi, &acc_hi * lo, &acc_hi * hi];
        let mn = cands.iter().min().unwrap().clone();
        let mx = cands.iter().max().unwrap().clone();
        acc_lo = mn + c;
        acc_hi = mx + c;
    }
    (acc_lo, acc_hi)
}
