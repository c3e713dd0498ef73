//! GL(2,ℤ)-equivalence of real numbers via continued fractions.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{FromPrimitive, One};

use crate::arith::{FieldElement, Rational, Scalar};
use crate::error::{Error, Result};

pub const DEFAULT_ORBIT_ITERATIONS: usize = 10_000;

/// ⌊x⌋, located from a float estimate and corrected by exact signs.
pub fn floor(x: &Scalar) -> Result<BigInt> {
    if let Some(r) = x.as_rational() {
        return Ok(r.floor().to_integer());
    }
    let est = x.to_f64()?.floor();
    let mut a = BigInt::from_f64(est).ok_or_else(|| Error::InvariantViolation(format!("cannot estimate ⌊{x}⌋")))?;
    while x.checked_sub(&Scalar::from(a.clone()))?.sign()? < 0 {
        a -= 1;
    }
    while x.checked_sub(&Scalar::from(&a + BigInt::one()))?.sign()? >= 0 {
        a += 1;
    }
    Ok(a)
}

/// The periodic cycle of complete quotients of a quadratic irrational, as
/// coefficient vectors; `None` if no repeat appears within `cap` steps.
pub fn periodic_quotients(x: &FieldElement, cap: usize) -> Result<Option<Vec<Vec<Rational>>>> {
    let mut seen: HashMap<Vec<Rational>, usize> = HashMap::new();
    let mut trail: Vec<Vec<Rational>> = Vec::new();
    let mut cur = Scalar::Field(x.clone());
    for step in 0..cap {
        let key = match &cur {
            Scalar::Field(e) => e.coeffs().to_vec(),
            _ => return Err(Error::InvariantViolation("complete quotient left the field".into())),
        };
        if let Some(&start) = seen.get(&key) {
            return Ok(Some(trail.split_off(start)));
        }
        seen.insert(key.clone(), step);
        trail.push(key);
        let a = floor(&cur)?;
        cur = cur.checked_sub(&Scalar::from(a))?.invert()?;
    }
    Ok(None)
}

/// Whether θ₂ = (aθ₁ + b)/(cθ₁ + d) for some matrix in GL(2,ℤ).
///
/// Both rational: always true. Quadratic irrationals are equivalent exactly
/// when their continued fractions share a tail, i.e. when their periodic
/// cycles of complete quotients meet. `None` means no period was found
/// within `cap` steps.
pub fn gl2_orbit_equal(theta1: &Scalar, theta2: &Scalar, cap: usize) -> Result<Option<bool>> {
    if theta1.mode().is_symbolic() || theta2.mode().is_symbolic() {
        return Err(Error::UnsupportedInSymbolicMode("continued fractions"));
    }
    for t in [theta1, theta2] {
        if let Scalar::Field(e) = t {
            if e.field().degree() != 2 && t.as_rational().is_none() {
                return Err(Error::NotQuadratic(e.field().degree()));
            }
        }
    }
    match (theta1.as_rational(), theta2.as_rational()) {
        (Some(_), Some(_)) => return Ok(Some(true)),
        (Some(_), None) | (None, Some(_)) => {
            return Err(Error::MixedKinds("a rational and an irrational".into()));
        }
        (None, None) => {}
    }
    let (Scalar::Field(a), Scalar::Field(b)) = (theta1, theta2) else {
        unreachable!("irrational numeric scalars are field elements");
    };
    if !(std::sync::Arc::ptr_eq(a.field(), b.field()) || a.field().same_as(b.field())) {
        return Err(Error::MixedKinds(format!("{} and {}", a.field(), b.field())));
    }
    let (Some(ca), Some(cb)) = (periodic_quotients(a, cap)?, periodic_quotients(b, cap)?) else {
        return Ok(None);
    };
    Ok(Some(ca.iter().any(|q| cb.contains(q))))
}
