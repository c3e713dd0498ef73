//! Exact data of the Heisenberg module attached to the upper-left 2p block
//! of θ: the matrices T, S, J and J′.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{Rational, Scalar};
use crate::error::{Error, Result};
use crate::linalg::{IntMatrix, ScalarMatrix};
use crate::skew::{pfaffian, SkewMatrix};

/// J₀ = (0 id_p; −id_p 0).
pub fn j0(p: usize) -> IntMatrix {
    let mut j = IntMatrix::zeros(2 * p, 2 * p);
    for i in 0..p {
        j[(i, p + i)] = BigInt::one();
        j[(p + i, i)] = -BigInt::one();
    }
    j
}

#[derive(Debug, Clone)]
pub struct ModuleGeometry {
    n: usize,
    p: usize,
    q: usize,
    theta: SkewMatrix,
    t11: ScalarMatrix,
    t: ScalarMatrix,
    s: ScalarMatrix,
    j: IntMatrix,
    j_prime: IntMatrix,
}

impl ModuleGeometry {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn theta(&self) -> &SkewMatrix {
        &self.theta
    }

    pub fn t11(&self) -> &ScalarMatrix {
        &self.t11
    }

    /// The (2p+2q)×n matrix with rows (T₁₁ 0; 0 id_q; θ₂₁ θ₂₂/2).
    pub fn t(&self) -> &ScalarMatrix {
        &self.t
    }

    pub fn s(&self) -> &ScalarMatrix {
        &self.s
    }

    pub fn j(&self) -> &IntMatrix {
        &self.j
    }

    pub fn j_prime(&self) -> &IntMatrix {
        &self.j_prime
    }

    /// T(l) exactly.
    pub fn t_of(&self, l: &[i64]) -> Result<Vec<Scalar>> {
        if l.len() != self.n {
            return Err(Error::DimensionMismatch(format!("l has length {}, n = {}", l.len(), self.n)));
        }
        let v: Vec<Scalar> = l.iter().map(|&x| Scalar::int(x)).collect();
        self.t.mul_vec(&v)
    }

    /// Uses a caller-supplied T₁₁, checked exactly against T₁₁ᵗJ₀T₁₁ = θ₁₁.
    pub fn with_t11(theta: &SkewMatrix, p: usize, t11: ScalarMatrix) -> Result<Self> {
        let n = theta.n();
        if p < 1 || 2 * p > n {
            return Err(Error::BadP { n, p });
        }
        if theta.mode().is_symbolic() {
            return Err(Error::UnsupportedInSymbolicMode("module geometry"));
        }
        if t11.rows() != 2 * p || t11.cols() != 2 * p {
            return Err(Error::DimensionMismatch(format!("T11 must be {0}×{0}", 2 * p)));
        }
        let q = n - 2 * p;
        let k = 2 * p;
        let theta11 = theta.block(0, k, 0, k);
        let j0s = ScalarMatrix::from_int(&j0(p));
        if t11.transpose().mul(&j0s)?.mul(&t11)? != theta11 {
            return Err(Error::InvariantViolation("T11ᵗJ₀T11 ≠ θ₁₁".into()));
        }
        let pf = pfaffian(&SkewMatrix::new(theta11)?)?;
        if pf.is_zero() {
            return Err(Error::SingularBlock);
        }
        // pf(T11ᵗJ₀T11) = det(T11)·pf(J₀), and pf(J₀) = ±1
        let det = t11.det()?;
        if det != pf && det != -&pf {
            return Err(Error::InvariantViolation(format!("|det T11| = |{det}| but pf(θ₁₁) = {pf}")));
        }

        let half = Rational::new(BigInt::one(), BigInt::from(2));
        let theta21 = theta.block(k, n, 0, k);
        let theta22 = theta.block(k, n, k, n);
        let t32 = theta22.scale(&half);

        let mut t = ScalarMatrix::zeros(k + 2 * q, n);
        t.set_block(0, 0, &t11);
        t.set_block(k, k, &ScalarMatrix::identity(q));
        t.set_block(k + q, 0, &theta21);
        t.set_block(k + q, k, &t32);

        let j0_t11_inv_t = j0s.mul(&t11.transpose().inverse()?)?;
        let mut s = ScalarMatrix::zeros(k + 2 * q, n);
        s.set_block(0, 0, &j0_t11_inv_t);
        s.set_block(0, k, &j0_t11_inv_t.mul(&theta21.transpose())?.neg());
        s.set_block(k, k, &ScalarMatrix::identity(q));
        s.set_block(k + q, k, &t32.transpose());

        let mut j = IntMatrix::zeros(k + 2 * q, k + 2 * q);
        for a in 0..k {
            for b in 0..k {
                j[(a, b)] = j0(p)[(a, b)].clone();
            }
        }
        for i in 0..q {
            j[(k + i, k + q + i)] = BigInt::one();
            j[(k + q + i, k + i)] = -BigInt::one();
        }
        let mut j_prime = j.clone();
        let dim = j_prime.rows();
        for a in 0..dim {
            for b in 0..dim {
                if j_prime[(a, b)] < BigInt::zero() {
                    j_prime[(a, b)] = BigInt::zero();
                }
            }
        }

        let geom = ModuleGeometry { n, p, q, theta: theta.clone(), t11, t, s, j, j_prime };
        // the full T is θ-symplectic for J: TᵗJT = θ
        let tjt = geom.t.transpose().mul(&ScalarMatrix::from_int(&geom.j))?.mul(&geom.t)?;
        if &tjt != theta.as_matrix() {
            return Err(Error::InvariantViolation("TᵗJT ≠ θ".into()));
        }
        Ok(geom)
    }
}

/// Builds T₁₁ = P⁻¹ where P is a symplectic basis of θ₁₁ found by
/// Gram–Schmidt, so that PᵗθP = J₀.
pub fn build_geometry(theta: &SkewMatrix, p: usize) -> Result<ModuleGeometry> {
    let n = theta.n();
    if p < 1 || 2 * p > n {
        return Err(Error::BadP { n, p });
    }
    if theta.mode().is_symbolic() {
        return Err(Error::UnsupportedInSymbolicMode("module geometry"));
    }
    let k = 2 * p;
    let theta11 = theta.block(0, k, 0, k);
    let omega = |u: &[Scalar], v: &[Scalar]| -> Result<Scalar> {
        let tv = theta11.mul_vec(v)?;
        let mut acc = Scalar::zero();
        for (a, b) in u.iter().zip(&tv) {
            acc = acc.checked_add(&a.checked_mul(b)?)?;
        }
        Ok(acc)
    };
    let mut pool: Vec<Vec<Scalar>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect())
        .collect();
    let mut es = Vec::with_capacity(p);
    let mut fs = Vec::with_capacity(p);
    while !pool.is_empty() {
        let v = pool.remove(0);
        let mut found = None;
        for (idx, u) in pool.iter().enumerate() {
            let w = omega(&v, u)?;
            if !w.is_zero() {
                found = Some((idx, w));
                break;
            }
        }
        let Some((idx, w)) = found else {
            if v.iter().all(|x| x.is_zero()) {
                continue;
            }
            return Err(Error::SingularBlock);
        };
        let f = pool.remove(idx);
        let winv = w.invert()?;
        let e: Vec<Scalar> = v.iter().map(|x| x.checked_mul(&winv)).collect::<Result<_>>()?;
        // u ← u − ω(u,f)e + ω(u,e)f keeps the rest ω-orthogonal to e and f
        for u in pool.iter_mut() {
            let a = omega(u, &f)?;
            let b = omega(u, &e)?;
            for i in 0..k {
                u[i] = u[i].checked_sub(&a.checked_mul(&e[i])?)?.checked_add(&b.checked_mul(&f[i])?)?;
            }
        }
        es.push(e);
        fs.push(f);
    }
    if es.len() != p {
        return Err(Error::SingularBlock);
    }
    let mut pm = ScalarMatrix::zeros(k, k);
    for (c, col) in es.iter().chain(&fs).enumerate() {
        for r in 0..k {
            pm[(r, c)] = col[r].clone();
        }
    }
    let t11 = pm.inverse().map_err(|_| Error::SingularBlock)?;
    ModuleGeometry::with_t11(theta, p, t11)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta2(num: i64, den: i64) -> SkewMatrix {
        SkewMatrix::from_upper(2, [((1, 2), Scalar::ratio(num, den))]).unwrap()
    }

    #[test]
    fn two_dim_example() {
        let g = build_geometry(&theta2(1, 3), 1).unwrap();
        let expected = ScalarMatrix::from_rows(vec![
            vec![Scalar::ratio(1, 3), Scalar::zero()],
            vec![Scalar::zero(), Scalar::one()],
        ])
        .unwrap();
        assert_eq!(g.t11(), &expected);
        assert_eq!(g.t11().det().unwrap(), Scalar::ratio(1, 3));
    }

    #[test]
    fn standard_form_gives_identity() {
        let g = build_geometry(&SkewMatrix::from_int(&j0(2)).unwrap(), 2).unwrap();
        assert_eq!(g.t11(), &ScalarMatrix::identity(4));
    }

    #[test]
    fn three_dim_layout() {
        let theta = SkewMatrix::from_upper(
            3,
            [((1, 2), Scalar::ratio(1, 4)), ((1, 3), Scalar::ratio(1, 3)), ((2, 3), Scalar::ratio(-2, 5))],
        )
        .unwrap();
        let g = build_geometry(&theta, 1).unwrap();
        let t = g.t();
        assert_eq!((t.rows(), t.cols()), (4, 3));
        assert_eq!(t.block(2, 3, 0, 3), ScalarMatrix::from_rows(vec![vec![Scalar::zero(), Scalar::zero(), Scalar::one()]]).unwrap());
        assert_eq!(t[(3, 0)], Scalar::ratio(-1, 3));
        assert_eq!(t[(3, 1)], Scalar::ratio(2, 5));
        assert!(t[(3, 2)].is_zero());
        assert_eq!(g.j_prime().to_i64_rows(), vec![vec![0, 1, 0, 0], vec![0, 0, 0, 0], vec![0, 0, 0, 1], vec![0, 0, 0, 0]]);
    }

    #[test]
    fn singular_block_rejected() {
        let theta = SkewMatrix::from_upper(3, [((1, 3), Scalar::one())]).unwrap();
        assert!(matches!(build_geometry(&theta, 1), Err(Error::SingularBlock)));
    }

    #[test]
    fn supplied_t11_is_checked() {
        let half = ScalarMatrix::identity(2).scale(&Rational::new(1.into(), 2.into()));
        assert!(ModuleGeometry::with_t11(&theta2(1, 4), 1, half.clone()).is_ok());
        assert!(ModuleGeometry::with_t11(&theta2(1, 3), 1, half).is_err());
    }
}
