//! Finitely generated ℤ-submodules of the scalar space in canonical form,
//! and the trace ranges built from them.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::action::CyclicAction;
use crate::arith::{common_mode, Basis, Mode, Monomial, Rational, Scalar};
use crate::error::{Error, Result};
use crate::hnf::{hermite_normal_form, lattice_contains};
use crate::skew::{all_pfaffian_minors, IndexTuple, SkewMatrix};
use crate::so_nn::extension_condition;

/// The ℤ-module (1/D)·L where L is an integer lattice in HNF, expressed in
/// a fixed ℚ-basis. D is the least positive integer with D·R integral.
#[derive(Debug, Clone, PartialEq)]
pub struct ZModuleRange {
    basis: Basis,
    denominator: BigInt,
    lattice: Vec<Vec<BigInt>>,
}

impl ZModuleRange {
    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn labels(&self) -> Vec<String> {
        self.basis.labels()
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    /// HNF rows of D·R.
    pub fn lattice(&self) -> &[Vec<BigInt>] {
        &self.lattice
    }

    pub fn rank(&self) -> usize {
        self.lattice.len()
    }

    pub fn mode(&self) -> Mode {
        self.basis.mode()
    }

    /// The basis elements row/D as scalars.
    pub fn generators(&self) -> Vec<Scalar> {
        self.lattice
            .iter()
            .map(|row| {
                let coords: Vec<Rational> =
                    row.iter().map(|x| Rational::new(x.clone(), self.denominator.clone())).collect();
                self.basis.scalar(&coords)
            })
            .collect()
    }

    /// Whether `x` lies in the module.
    pub fn contains(&self, x: &Scalar) -> Result<bool> {
        let coords = match &self.basis {
            Basis::Rational => match x.as_rational() {
                Some(r) => vec![r],
                None => return Ok(false),
            },
            basis => match x.coords_in(basis) {
                Ok(c) => c,
                // monomials outside the support
                Err(Error::LabelMismatch(_)) if self.mode().is_symbolic() => return Ok(false),
                Err(e) => return Err(e),
            },
        };
        let mut v = Vec::with_capacity(coords.len());
        for c in coords {
            let scaled = c * Rational::from_integer(self.denominator.clone());
            if !scaled.is_integer() {
                return Ok(false);
            }
            v.push(scaled.to_integer());
        }
        Ok(lattice_contains(&self.lattice, &v))
    }

    /// Whether every element of `self` lies in `other`.
    pub fn is_submodule_of(&self, other: &ZModuleRange) -> Result<bool> {
        check_comparable(&self.basis, &other.basis)?;
        for g in self.generators() {
            if !other.contains(&g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for ZModuleRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generators().iter().map(|g| g.to_string()).collect();
        write!(f, "span{{{}}}", gens.join(", "))
    }
}

fn lcm_of_denominators<'a, I: IntoIterator<Item = &'a Rational>>(items: I) -> BigInt {
    items.into_iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// Basis for the common mode of `gens`. Symbolic ranges use the sorted union
/// of monomial supports, so the labels are canonical.
fn basis_for(gens: &[Scalar]) -> Result<Basis> {
    Ok(match common_mode(gens)? {
        Mode::Rational => Basis::Rational,
        Mode::Field(k) => Basis::Power(k),
        Mode::Symbolic => {
            let mut ms: Vec<Monomial> = gens
                .iter()
                .filter_map(|g| match g {
                    Scalar::Poly(p) => Some(p.terms().map(|(m, _)| m.clone()).collect::<Vec<_>>()),
                    Scalar::Rational(r) if !r.is_zero() => Some(vec![Monomial::one()]),
                    _ => None,
                })
                .flatten()
                .collect();
            ms.sort();
            ms.dedup();
            Basis::Monomials(ms)
        }
    })
}

/// The ℤ-span of `generators` in canonical form.
pub fn span(generators: &[Scalar]) -> Result<ZModuleRange> {
    let basis = basis_for(generators)?;
    span_in(generators, basis)
}

fn span_in(generators: &[Scalar], basis: Basis) -> Result<ZModuleRange> {
    let coords: Vec<Vec<Rational>> = generators.iter().map(|g| g.coords_in(&basis)).collect::<Result<_>>()?;
    let d = lcm_of_denominators(coords.iter().flatten());
    let dr = Rational::from_integer(d.clone());
    let rows: Vec<Vec<BigInt>> =
        coords.iter().map(|c| c.iter().map(|x| (x * &dr).to_integer()).collect()).collect();
    let lattice = if rows.is_empty() || basis.is_empty() { Vec::new() } else { hermite_normal_form(&rows) };
    Ok(normalize(basis, d, lattice))
}

// Reduce D to its least value and, in symbolic mode, drop unused labels.
fn normalize(basis: Basis, d: BigInt, mut lattice: Vec<Vec<BigInt>>) -> ZModuleRange {
    let content = lattice.iter().flatten().fold(BigInt::zero(), |g, x| g.gcd(x));
    let e = d.gcd(&content);
    let (d, lattice) = if e > BigInt::one() {
        for x in lattice.iter_mut().flatten() {
            *x = &*x / &e;
        }
        (&d / &e, lattice)
    } else {
        (d, lattice)
    };
    if let Basis::Monomials(ms) = &basis {
        let used: Vec<usize> = (0..ms.len()).filter(|&j| lattice.iter().any(|r| !r[j].is_zero())).collect();
        if used.len() != ms.len() {
            let ms = used.iter().map(|&j| ms[j].clone()).collect();
            let lattice = lattice.iter().map(|r| used.iter().map(|&j| r[j].clone()).collect()).collect();
            return ZModuleRange { basis: Basis::Monomials(ms), denominator: d, lattice };
        }
    }
    ZModuleRange { basis, denominator: d, lattice }
}

fn check_comparable(a: &Basis, b: &Basis) -> Result<()> {
    let ok = matches!(
        (a, b),
        (Basis::Rational, _) | (_, Basis::Rational) | (Basis::Monomials(_), Basis::Monomials(_))
    ) || a == b;
    if ok {
        Ok(())
    } else {
        Err(Error::LabelMismatch(format!("{:?} vs {:?}", a.labels(), b.labels())))
    }
}

/// Equality of ℤ-modules. Rational-mode ranges compare against any mode;
/// field ranges over different fields, or field against symbolic, are
/// `LabelMismatch`.
pub fn range_equal(r1: &ZModuleRange, r2: &ZModuleRange) -> Result<bool> {
    check_comparable(&r1.basis, &r2.basis)?;
    if r1.basis == r2.basis {
        return Ok(r1.denominator == r2.denominator && r1.lattice == r2.lattice);
    }
    // different supports or a rational range against a richer one
    Ok(r1.is_submodule_of(r2)? && r2.is_submodule_of(r1)?)
}

/// λ·R. Rational λ works in every mode; field λ needs a field range.
pub fn scale_range(r: &ZModuleRange, lambda: &Scalar) -> Result<ZModuleRange> {
    if lambda.is_zero() {
        return Err(Error::ZeroScale);
    }
    if lambda.mode().is_symbolic() && lambda.as_rational().is_none() {
        return Err(Error::UnsupportedInSymbolicMode("scaling by a non-constant"));
    }
    if let Some(q) = lambda.as_rational() {
        let d = r.denominator.clone() * q.denom();
        let lattice: Vec<Vec<BigInt>> = r.lattice.iter().map(|row| row.iter().map(|x| x * q.numer()).collect()).collect();
        let lattice = hermite_normal_form(&lattice);
        return Ok(normalize(r.basis.clone(), d, lattice));
    }
    let gens: Vec<Scalar> = r.generators().iter().map(|g| g.checked_mul(lambda)).collect::<Result<_>>()?;
    let basis = match &r.basis {
        Basis::Rational => Basis::Power(match lambda.mode() {
            Mode::Field(k) => k,
            _ => unreachable!("non-rational numeric scalar is a field element"),
        }),
        b => b.clone(),
    };
    span_in(&gens, basis)
}

/// ℤ + Σ_I pf(M_I)ℤ over all even index tuples.
pub fn torus_range(theta: &SkewMatrix) -> Result<ZModuleRange> {
    let mut gens = vec![Scalar::one()];
    gens.extend(all_pfaffian_minors(theta).into_values());
    span(&gens)
}

/// Lower and upper bounds for the trace range of the crossed product by ⟨W⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbifoldRangeReport {
    pub lower: ZModuleRange,
    pub upper: ZModuleRange,
    pub decided: bool,
    pub admitted_minors: Vec<IndexTuple>,
    pub order: usize,
}

/// lower = span{1/N, pf(M_I)/N : I admitted}, upper = (1/N)·torus range.
pub fn orbifold_range_bounds(theta: &SkewMatrix, act: &CyclicAction) -> Result<OrbifoldRangeReport> {
    if act.theta() != theta {
        return Err(Error::InvariantViolation("the action is defined for a different θ".into()));
    }
    let n = act.order();
    let inv_n = Rational::new(BigInt::one(), BigInt::from(n));
    let minors = all_pfaffian_minors(theta);
    let mut lower_gens = vec![Scalar::Rational(inv_n.clone())];
    let mut all_gens = vec![Scalar::one()];
    let mut admitted = Vec::new();
    for (idx, pf) in minors {
        if extension_condition(act.w(), &idx)? {
            lower_gens.push(pf.scale(&inv_n));
            admitted.push(idx);
        }
        all_gens.push(pf);
    }
    let upper = scale_range(&span(&all_gens)?, &Scalar::Rational(inv_n))?;
    // lower sits inside upper's basis so the comparison is label-for-label
    let lower = span(&lower_gens)?;
    let decided = range_equal(&lower, &upper)?;
    Ok(OrbifoldRangeReport { lower, upper, decided, admitted_minors: admitted, order: n })
}

#[derive(Debug, Clone, PartialEq)]
pub enum MoritaOutcome {
    Found(Scalar),
    NotFound,
    /// The bounded search ended without a verified λ.
    Unknown { coeff_bound: u32 },
}

/// Searches λ > 0 with R1 = λ·R2 among λ = (Σ cᵢ b1ᵢ)/b2₁, |cᵢ| ≤ `coeff_bound`,
/// enumerated by increasing max-norm of c. Each candidate is verified exactly.
pub fn morita_lambda_search(r1: &ZModuleRange, r2: &ZModuleRange, coeff_bound: u32) -> Result<MoritaOutcome> {
    if r1.mode().is_symbolic() || r2.mode().is_symbolic() {
        return Err(Error::UnsupportedInSymbolicMode("λ-search needs signs"));
    }
    if let (Basis::Power(a), Basis::Power(b)) = (&r1.basis, &r2.basis) {
        if !(std::sync::Arc::ptr_eq(a, b) || a.same_as(b)) {
            return Err(Error::ModeMismatch(format!("ranges over {a} and {b}")));
        }
    }
    if r1.rank() != r2.rank() {
        return Ok(MoritaOutcome::NotFound);
    }
    let r = r1.rank();
    if r == 0 {
        return Ok(MoritaOutcome::Found(Scalar::one()));
    }
    let b1 = r1.generators();
    let b2_first_inv = r2.generators()[0].invert()?;
    let bound = coeff_bound as i64;
    for norm in 1..=bound {
        for c in shell(r, norm) {
            if let Some(lambda) = candidate(&b1, &c, &b2_first_inv)? {
                if range_equal(r1, &scale_range(r2, &lambda)?)? {
                    return Ok(MoritaOutcome::Found(lambda));
                }
            }
        }
    }
    Ok(MoritaOutcome::Unknown { coeff_bound })
}

fn candidate(b1: &[Scalar], c: &[i64], b2_first_inv: &Scalar) -> Result<Option<Scalar>> {
    let mut num = Scalar::zero();
    for (g, &k) in b1.iter().zip(c) {
        if k != 0 {
            num = num.checked_add(&g.checked_mul(&Scalar::int(k))?)?;
        }
    }
    if num.is_zero() {
        return Ok(None);
    }
    let lambda = num.checked_mul(b2_first_inv)?;
    Ok((lambda.sign()? > 0).then_some(lambda))
}

// Vectors of max-norm exactly m, ordered by L1 norm then lexicographically.
fn shell(r: usize, m: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut c = vec![-m; r];
    loop {
        if c.iter().any(|x| x.abs() == m) {
            out.push(c.clone());
        }
        // odometer over [−m, m]^r
        let Some(k) = (0..r).rev().find(|&k| c[k] < m) else {
            break;
        };
        c[k] += 1;
        for x in &mut c[k + 1..] {
            *x = -m;
        }
    }
    out.sort_by_key(|c| (c.iter().map(|x| x.abs()).sum::<i64>(), c.clone()));
    out
}
