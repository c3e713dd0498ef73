//! Exact scalars: big rationals, elements of real number fields with
//! decidable sign, and symbolic polynomials in the entries θ_{ij}.

mod field;
mod poly;
mod scalar;
pub(crate) mod upoly;

pub use field::{FieldElement, NumberField};
pub use poly::{Monomial, Polynomial, Var};
pub use scalar::{common_mode, ArithOp, Basis, Mode, QBasisCoordinates, Scalar};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Parses `"p/q"`, `"p"` or a plain integer string.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("2/4").unwrap(), Rational::new(1.into(), 2.into()));
        assert_eq!(parse_rational("-7").unwrap(), Rational::from_integer((-7).into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
