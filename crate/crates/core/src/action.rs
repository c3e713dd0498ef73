//! Finite-order θ-symplectic matrices, the induced automorphism of the
//! torus on monomials, and the twisting cocycles.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::Scalar;
use crate::error::{Error, Result};
use crate::linalg::{IntMatrix, ScalarMatrix};
use crate::skew::SkewMatrix;

pub const DEFAULT_MAX_ORDER: usize = 24;

/// A θ-symplectic W of finite order N, generating F = ⟨W⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicAction {
    w: IntMatrix,
    theta: SkewMatrix,
    order: usize,
}

impl CyclicAction {
    /// Validates WᵗθW = θ and computes the order up to `max_order`.
    pub fn new(w: IntMatrix, theta: SkewMatrix, max_order: usize) -> Result<Self> {
        if !check_theta_symplectic(&w, &theta)? {
            return Err(Error::NotSymplectic);
        }
        let order = order_of(&w, max_order)?.ok_or(Error::InfiniteOrder(max_order))?;
        Ok(CyclicAction { w, theta, order })
    }

    /// As [`CyclicAction::new`] but checks a declared order.
    pub fn with_order(w: IntMatrix, theta: SkewMatrix, order: usize) -> Result<Self> {
        let act = CyclicAction::new(w, theta, order.max(1))?;
        if act.order != order {
            return Err(Error::InvariantViolation(format!("declared order {order}, actual {}", act.order)));
        }
        Ok(act)
    }

    pub fn w(&self) -> &IntMatrix {
        &self.w
    }

    pub fn theta(&self) -> &SkewMatrix {
        &self.theta
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n(&self) -> usize {
        self.w.rows()
    }

    /// Wᵏ for any integer k (negative powers via W^{N−1}).
    pub fn power(&self, k: i64) -> IntMatrix {
        self.w.pow(k.rem_euclid(self.order as i64) as usize)
    }
}

/// The four order-r generators of finite cyclic subgroups of SL(2,ℤ).
pub fn standard_w(r: usize) -> Option<IntMatrix> {
    let rows: &[&[i64]] = match r {
        2 => &[&[-1, 0], &[0, -1]],
        3 => &[&[-1, -1], &[1, 0]],
        4 => &[&[0, -1], &[1, 0]],
        6 => &[&[0, -1], &[1, 1]],
        _ => return None,
    };
    Some(IntMatrix::from_i64(rows))
}

/// Exact test of WᵗθW = θ.
pub fn check_theta_symplectic(w: &IntMatrix, theta: &SkewMatrix) -> Result<bool> {
    if !w.is_square() || w.rows() != theta.n() {
        return Err(Error::DimensionMismatch(format!(
            "W is {}×{}, θ is {}×{}",
            w.rows(),
            w.cols(),
            theta.n(),
            theta.n()
        )));
    }
    let ws = ScalarMatrix::from_int(w);
    let lhs = ws.transpose().mul(theta.as_matrix())?.mul(&ws)?;
    Ok(&lhs == theta.as_matrix())
}

/// Least N ≤ `max_order` with Wᴺ = id, or `None`.
pub fn order_of(w: &IntMatrix, max_order: usize) -> Result<Option<usize>> {
    if !w.is_square() {
        return Err(Error::DimensionMismatch("order of a non-square matrix".into()));
    }
    let det = w.det();
    if det.abs() != BigInt::one() {
        return Err(Error::NotUnimodular(det.to_string()));
    }
    let mut power = w.clone();
    for k in 1..=max_order {
        if power.is_identity() {
            return Ok(Some(k));
        }
        power = power.mul(w)?;
    }
    Ok(None)
}

/// No nonzero integer vector is fixed by Wᵏ for 0 < k < N.
pub fn free_outside_origin(w: &IntMatrix, order: usize) -> Result<bool> {
    let id = IntMatrix::identity(w.rows());
    let mut power = w.clone();
    for _ in 1..order {
        if power.sub(&id)?.det().is_zero() {
            return Ok(false);
        }
        power = power.mul(w)?;
    }
    Ok(true)
}

/// An element e(phase)·U₁^{v₁}⋯U_n^{v_n}, with the phase kept as an exact exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasedMonomial {
    pub phase: Scalar,
    pub exponents: Vec<BigInt>,
}

impl PhasedMonomial {
    pub fn generator(n: usize, i: usize) -> Self {
        let mut exponents = vec![BigInt::zero(); n];
        exponents[i - 1] = BigInt::one();
        PhasedMonomial { phase: Scalar::zero(), exponents }
    }

    pub fn identity(n: usize) -> Self {
        PhasedMonomial { phase: Scalar::zero(), exponents: vec![BigInt::zero(); n] }
    }

    pub fn is_scalar(&self) -> bool {
        self.exponents.iter().all(|x| x.is_zero())
    }

    /// Product in A_θ, using U_k U_j = e(θ_jk) U_j U_k:
    /// U^v U^w = e(Σ_{a<b} v_b w_a θ_ab) U^{v+w}.
    pub fn mul(&self, other: &PhasedMonomial, theta: &SkewMatrix) -> Result<PhasedMonomial> {
        let v = &self.exponents;
        let w = &other.exponents;
        let mut phase = self.phase.checked_add(&other.phase)?;
        for b in 0..v.len() {
            for a in 0..b {
                let c = &v[b] * &w[a];
                if !c.is_zero() {
                    phase = phase.checked_add(&(theta.get(a, b) * &Scalar::from(c)))?;
                }
            }
        }
        let exponents = v.iter().zip(w).map(|(x, y)| x + y).collect();
        Ok(PhasedMonomial { phase, exponents })
    }

    /// The m-th power, m ∈ ℤ: (U^a)^m = e(m(m−1)/2 · Σ_{s<t} a_t a_s θ_st) U^{ma}.
    pub fn pow(&self, m: &BigInt, theta: &SkewMatrix) -> Result<PhasedMonomial> {
        let a = &self.exponents;
        let mut quad = Scalar::zero();
        for t in 0..a.len() {
            for s in 0..t {
                let c = &a[t] * &a[s];
                if !c.is_zero() {
                    quad = quad.checked_add(&(theta.get(s, t) * &Scalar::from(c)))?;
                }
            }
        }
        let tri = m * (m - BigInt::one()) / BigInt::from(2);
        let phase = self
            .phase
            .checked_mul(&Scalar::from(m.clone()))?
            .checked_add(&quad.checked_mul(&Scalar::from(tri))?)?;
        Ok(PhasedMonomial { phase, exponents: a.iter().map(|x| x * m).collect() })
    }
}

/// α(U_i) = e(Σ_{k=2}^n Σ_{j<k} a_{ki} a_{ji} θ_{jk}) U^{(column i of W)}.
pub fn alpha_phase_exponent(act: &CyclicAction, i: usize) -> Result<(Scalar, Vec<BigInt>)> {
    let n = act.n();
    if i < 1 || i > n {
        return Err(Error::InvalidIndexTuple(format!("generator index {i} for n = {n}")));
    }
    let col = act.w.column(i - 1);
    let mut phase = Scalar::zero();
    for k in 1..n {
        for j in 0..k {
            let c = &col[k] * &col[j];
            if !c.is_zero() {
                phase = phase.checked_add(&(act.theta.get(j, k) * &Scalar::from(c)))?;
            }
        }
    }
    Ok((phase, col))
}

/// α applied to a phased monomial: α(e(c)U₁^{v₁}⋯U_n^{v_n}) = e(c)·α(U₁)^{v₁}⋯α(U_n)^{v_n}.
pub fn alpha_apply(act: &CyclicAction, x: &PhasedMonomial) -> Result<PhasedMonomial> {
    let n = act.n();
    let mut out = PhasedMonomial { phase: x.phase.clone(), exponents: vec![BigInt::zero(); n] };
    for i in 1..=n {
        let e = &x.exponents[i - 1];
        if e.is_zero() {
            continue;
        }
        let (phase, exponents) = alpha_phase_exponent(act, i)?;
        let image = PhasedMonomial { phase, exponents }.pow(e, &act.theta)?;
        out = out.mul(&image, &act.theta)?;
    }
    Ok(out)
}

/// Whether two exponents agree modulo 1. Symbolic exponents must differ by
/// an integer constant.
pub fn phase_equal_mod_one(a: &Scalar, b: &Scalar) -> Result<bool> {
    let d = a.checked_sub(b)?;
    Ok(d.as_rational().is_some_and(|r| r.is_integer()))
}

fn dot_theta(theta: &SkewMatrix, x: &[BigInt], y: &[BigInt]) -> Result<Scalar> {
    let n = theta.n();
    if x.len() != n || y.len() != n {
        return Err(Error::DimensionMismatch(format!("vectors of length {} and {} for n = {n}", x.len(), y.len())));
    }
    // ⟨−θx, y⟩ = −Σ_i y_i Σ_j θ_ij x_j
    let mut acc = Scalar::zero();
    for i in 0..n {
        if y[i].is_zero() {
            continue;
        }
        for j in 0..n {
            let c = &y[i] * &x[j];
            if !c.is_zero() {
                acc = acc.checked_sub(&(theta.get(i, j) * &Scalar::from(c)))?;
            }
        }
    }
    Ok(acc)
}

/// Exponent of ω_θ(x, y) = e(⟨−θx, y⟩).
pub fn cocycle_omega(theta: &SkewMatrix, x: &[BigInt], y: &[BigInt]) -> Result<Scalar> {
    dot_theta(theta, x, y)
}

/// Exponent of the half-normalized cocycle e(⟨−θx, y⟩/2).
pub fn cocycle_omega_half(theta: &SkewMatrix, x: &[BigInt], y: &[BigInt]) -> Result<Scalar> {
    Ok(dot_theta(theta, x, y)?.scale(&crate::arith::Rational::new(1.into(), 2.into())))
}

/// Exponent of ω′((x, s), (y, t)) = ω_θ(x, Wˢy) on ℤⁿ ⋊ ⟨W⟩.
pub fn cocycle_omega_prime(
    theta: &SkewMatrix,
    w: &IntMatrix,
    x: &[BigInt],
    s: usize,
    y: &[BigInt],
    _t: usize,
) -> Result<Scalar> {
    dot_theta(theta, x, &w.pow(s).mul_vec(y))
}

/// The four block relations of WᵗθW = θ for W = diag(W₁, W₄), W₁ of size 2p.
pub fn compatibility_check(w: &IntMatrix, theta: &SkewMatrix, p: usize) -> Result<bool> {
    let n = w.rows();
    if !w.is_square() || n != theta.n() {
        return Err(Error::DimensionMismatch(format!("W is {}×{}, θ is {n}×{n}", w.rows(), w.cols())));
    }
    let k = 2 * p;
    if k > n {
        return Err(Error::BadP { n, p });
    }
    if !w.block(0, k, k, n).is_zero() || !w.block(k, n, 0, k).is_zero() {
        return Err(Error::NotBlockDiagonal(k));
    }
    let w1 = ScalarMatrix::from_int(&w.block(0, k, 0, k));
    let w4 = ScalarMatrix::from_int(&w.block(k, n, k, n));
    let blocks = [
        (&w1, 0, k, 0, k, &w1),
        (&w1, 0, k, k, n, &w4),
        (&w4, k, n, 0, k, &w1),
        (&w4, k, n, k, n, &w4),
    ];
    for (left, r0, r1, c0, c1, right) in blocks {
        let t = theta.block(r0, r1, c0, c1);
        if left.transpose().mul(&t)?.mul(right)? != t {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn theta2() -> SkewMatrix {
        SkewMatrix::generic(2)
    }

    fn diag_theta() -> SkewMatrix {
        SkewMatrix::from_upper(4, [((1, 2), Scalar::var(1, 2)), ((3, 4), Scalar::var(3, 4))]).unwrap()
    }

    #[test]
    fn symplectic_examples() {
        let flip = IntMatrix::identity(4).neg();
        assert!(check_theta_symplectic(&flip, &SkewMatrix::generic(4)).unwrap());
        assert!(check_theta_symplectic(&standard_w(4).unwrap(), &theta2()).unwrap());
        let shear = IntMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        let one = SkewMatrix::from_upper(2, [((1, 2), Scalar::int(1))]).unwrap();
        assert!(check_theta_symplectic(&shear, &one).unwrap());
        let padded = IntMatrix::block_diag(&shear, &IntMatrix::identity(2));
        let mixed = SkewMatrix::from_upper(4, [((1, 2), Scalar::int(1)), ((1, 3), Scalar::int(1)), ((3, 4), Scalar::int(2))])
            .unwrap();
        assert!(!check_theta_symplectic(&padded, &mixed).unwrap());
        assert!(check_theta_symplectic(&shear, &SkewMatrix::generic(3)).is_err());
    }

    #[test]
    fn orders() {
        for r in [2, 3, 4, 6] {
            assert_eq!(order_of(&standard_w(r).unwrap(), 24).unwrap(), Some(r));
        }
        assert_eq!(order_of(&IntMatrix::identity(3).neg(), 24).unwrap(), Some(2));
        assert_eq!(order_of(&IntMatrix::from_i64(&[&[1, 1], &[0, 1]]), 24).unwrap(), None);
        assert!(matches!(order_of(&IntMatrix::diagonal(&[2, 1]), 24), Err(Error::NotUnimodular(_))));
    }

    #[test]
    fn freeness() {
        let w3 = standard_w(3).unwrap();
        assert_eq!(w3.sub(&IntMatrix::identity(2)).unwrap().det(), BigInt::from(3));
        assert!(free_outside_origin(&w3, 3).unwrap());
        assert!(free_outside_origin(&IntMatrix::identity(3).neg(), 2).unwrap());
        assert!(!free_outside_origin(&IntMatrix::diagonal(&[-1, -1, 1]), 2).unwrap());
    }

    #[test]
    fn alpha_examples() {
        let flip = CyclicAction::new(IntMatrix::identity(3).neg(), SkewMatrix::generic(3), 24).unwrap();
        let (phase, vec) = alpha_phase_exponent(&flip, 2).unwrap();
        assert!(phase.is_zero());
        assert_eq!(vec, v(&[0, -1, 0]));
        let rot = CyclicAction::new(standard_w(4).unwrap(), theta2(), 24).unwrap();
        let (phase, vec) = alpha_phase_exponent(&rot, 1).unwrap();
        assert!(phase.is_zero());
        assert_eq!(vec, v(&[0, 1]));
        let id = CyclicAction::new(IntMatrix::identity(2), theta2(), 24).unwrap();
        assert_eq!(alpha_phase_exponent(&id, 1).unwrap(), (Scalar::zero(), v(&[1, 0])));
    }

    #[test]
    fn alpha_to_the_order_is_identity() {
        let mut cases: Vec<CyclicAction> = [2, 3, 4, 6]
            .iter()
            .map(|&r| CyclicAction::new(standard_w(r).unwrap(), theta2(), 24).unwrap())
            .collect();
        for n in 2..=4 {
            cases.push(CyclicAction::new(IntMatrix::identity(n).neg(), SkewMatrix::generic(n), 24).unwrap());
        }
        for act in &cases {
            for i in 1..=act.n() {
                let start = PhasedMonomial::generator(act.n(), i);
                let mut x = start.clone();
                for _ in 0..act.order() {
                    x = alpha_apply(act, &x).unwrap();
                }
                assert_eq!(x.exponents, start.exponents);
                assert!(phase_equal_mod_one(&x.phase, &Scalar::zero()).unwrap(), "phase {}", x.phase);
            }
        }
    }

    #[test]
    fn monomial_commutation() {
        let th = theta2();
        let u1 = PhasedMonomial::generator(2, 1);
        let u2 = PhasedMonomial::generator(2, 2);
        let a = u2.mul(&u1, &th).unwrap();
        let b = u1.mul(&u2, &th).unwrap();
        assert_eq!(a.exponents, b.exponents);
        assert_eq!(a.phase.checked_sub(&b.phase).unwrap(), Scalar::var(1, 2));
        let inv = u1.mul(&u2, &th).unwrap().pow(&BigInt::from(-1), &th).unwrap();
        assert!(u1.mul(&u2, &th).unwrap().mul(&inv, &th).unwrap().phase.is_zero());
    }

    #[test]
    fn cocycles() {
        let th = theta2();
        assert!(cocycle_omega(&th, &v(&[0, 0]), &v(&[3, -1])).unwrap().is_zero());
        let a = cocycle_omega(&th, &v(&[1, 0]), &v(&[0, 1])).unwrap();
        let b = cocycle_omega(&th, &v(&[0, 1]), &v(&[1, 0])).unwrap();
        assert_eq!(a, Scalar::var(1, 2));
        assert_eq!(a.checked_sub(&b).unwrap(), Scalar::var(1, 2) * Scalar::int(2));
        assert_eq!(
            cocycle_omega_half(&th, &v(&[1, 0]), &v(&[0, 1])).unwrap(),
            Scalar::var(1, 2).scale(&crate::arith::Rational::new(1.into(), 2.into()))
        );
        let w = standard_w(3).unwrap();
        assert_eq!(
            cocycle_omega_prime(&th, &w, &v(&[2, 1]), 0, &v(&[1, 5]), 2).unwrap(),
            cocycle_omega(&th, &v(&[2, 1]), &v(&[1, 5])).unwrap()
        );
    }

    #[test]
    fn compatibility_examples() {
        let th = diag_theta();
        let flip = IntMatrix::identity(4).neg();
        assert!(compatibility_check(&flip, &SkewMatrix::generic(4), 1).unwrap());
        let w = IntMatrix::block_diag(&standard_w(4).unwrap(), &standard_w(6).unwrap());
        assert!(compatibility_check(&w, &th, 1).unwrap());
        let coupled = SkewMatrix::from_upper(
            4,
            [((1, 2), Scalar::var(1, 2)), ((1, 3), Scalar::var(1, 3)), ((3, 4), Scalar::var(3, 4))],
        )
        .unwrap();
        let w = IntMatrix::block_diag(&standard_w(4).unwrap(), &IntMatrix::identity(2));
        assert!(!compatibility_check(&w, &coupled, 1).unwrap());
        let full = IntMatrix::from_i64(&[&[1, 0, 1, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]);
        assert_eq!(compatibility_check(&full, &th, 1), Err(Error::NotBlockDiagonal(2)));
    }

    #[test]
    fn cyclic_action_validation() {
        let th = diag_theta();
        let w = IntMatrix::block_diag(&standard_w(4).unwrap(), &standard_w(6).unwrap());
        assert_eq!(CyclicAction::new(w, th.clone(), 24).unwrap().order(), 12);
        let bad = IntMatrix::from_i64(&[&[0, 1, 0, 0], &[0, 0, 1, 0], &[1, 0, 0, 0], &[0, 0, 0, 1]]);
        assert_eq!(CyclicAction::new(bad, th, 24), Err(Error::NotSymplectic));
    }
}
