//! Dense univariate polynomials over the rationals, coefficients stored from
//! the constant term upward. Only what the number-field code needs.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rational;

pub(crate) fn trim(p: &mut Vec<Rational>) {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

pub(crate) fn degree(p: &[Rational]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub(crate) fn eval(p: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

pub(crate) fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let len = a.len().max(b.len());
    let mut out: Vec<Rational> = (0..len)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(Rational::zero);
            let y = b.get(i).cloned().unwrap_or_else(Rational::zero);
            x - y
        })
        .collect();
    trim(&mut out);
    out
}

pub(crate) fn mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

pub(crate) fn derivative(p: &[Rational]) -> Vec<Rational> {
    let mut out: Vec<Rational> = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
        .collect();
    trim(&mut out);
    out
}

/// Quotient and remainder of `a` by a nonzero `b`.
pub(crate) fn div_rem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let db = degree(b).expect("division by the zero polynomial");
    let lead = b[db].clone();
    let mut rem: Vec<Rational> = a.to_vec();
    trim(&mut rem);
    if rem.len() <= db {
        return (Vec::new(), rem);
    }
    let mut quot = vec![Rational::zero(); rem.len() - db];
    while let Some(dr) = degree(&rem) {
        if dr < db {
            break;
        }
        let coeff = &rem[dr] / &lead;
        let shift = dr - db;
        for (i, c) in b.iter().enumerate().take(db + 1) {
            rem[i + shift] -= &coeff * c;
        }
        quot[shift] = coeff;
        trim(&mut rem);
    }
    trim(&mut quot);
    (quot, rem)
}

pub(crate) fn rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    div_rem(a, b).1
}

fn make_monic(mut p: Vec<Rational>) -> Vec<Rational> {
    if let Some(d) = degree(&p) {
        let lead = p[d].clone();
        for c in p.iter_mut() {
            *c = &*c / &lead;
        }
    }
    p
}

/// Monic gcd.
pub(crate) fn gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y);
        x = y;
        y = r;
    }
    make_monic(x)
}

/// Extended Euclid: returns `(g, s)` with `s*a ≡ g (mod m)`, `g` monic.
pub(crate) fn ext_gcd_mod(a: &[Rational], m: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut r0 = m.to_vec();
    let mut r1 = a.to_vec();
    trim(&mut r0);
    trim(&mut r1);
    let mut s0: Vec<Rational> = Vec::new();
    let mut s1: Vec<Rational> = vec![Rational::one()];
    while !r1.is_empty() {
        let (q, r) = div_rem(&r0, &r1);
        let s2 = sub(&s0, &mul(&q, &s1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
    }
    // r0 = s0 * a (mod m)
    let d = degree(&r0).map(|d| r0[d].clone()).unwrap_or_else(Rational::one);
    let g: Vec<Rational> = r0.iter().map(|c| c / &d).collect();
    let s: Vec<Rational> = s0.iter().map(|c| c / &d).collect();
    (g, s)
}

fn sign_of(x: &Rational) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Number of distinct real roots of a square-free `p` in the half-open
/// interval `(lo, hi]`, by Sturm's theorem.
pub(crate) fn sturm_count(p: &[Rational], lo: &Rational, hi: &Rational) -> usize {
    let mut seq: Vec<Vec<Rational>> = vec![p.to_vec(), derivative(p)];
    loop {
        let n = seq.len();
        if seq[n - 1].is_empty() {
            seq.pop();
            break;
        }
        let r = rem(&seq[n - 2], &seq[n - 1]);
        if r.is_empty() {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    let variations = |x: &Rational| -> usize {
        let signs: Vec<i32> = seq
            .iter()
            .map(|q| sign_of(&eval(q, x)))
            .filter(|s| *s != 0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    };
    variations(lo).saturating_sub(variations(hi))
}

/// Rational roots of `p` (rational root theorem). Returns `None` when the
/// integer coefficients are too large for trial-division factoring.
pub(crate) fn rational_roots(p: &[Rational]) -> Option<Vec<Rational>> {
    let mut p = p.to_vec();
    trim(&mut p);
    if p.is_empty() {
        return Some(Vec::new());
    }
    let mut roots = Vec::new();
    // strip zero roots
    if p[0].is_zero() {
        roots.push(Rational::zero());
        let k = p.iter().position(|c| !c.is_zero()).unwrap_or(0);
        p.drain(..k);
    }
    if p.len() <= 1 {
        return Some(roots);
    }
    let denom_lcm = p
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p
        .iter()
        .map(|c| (c * Rational::from_integer(denom_lcm.clone())).to_integer())
        .collect();
    let a0 = ints[0].abs();
    let ad = ints.last().unwrap().abs();
    let limit = BigInt::from(1_000_000_000_000u64);
    if a0 > limit || ad > limit {
        return None;
    }
    let divisors = |n: &BigInt| -> Vec<BigInt> {
        let n: u64 = n.try_into().unwrap_or(0);
        let mut out = Vec::new();
        let mut i = 1u64;
        while i * i <= n {
            if n % i == 0 {
                out.push(BigInt::from(i));
                if i * i != n {
                    out.push(BigInt::from(n / i));
                }
            }
            i += 1;
        }
        out
    };
    for num in divisors(&a0) {
        for den in divisors(&ad) {
            for s in [1, -1] {
                let cand = Rational::new(BigInt::from(s) * &num, den.clone());
                if eval(&p, &cand).is_zero() && !roots.contains(&cand) {
                    roots.push(cand);
                }
            }
        }
    }
    Some(roots)
}
