#![allow(dead_code)]

use nctorus::linalg::IntMatrix;
use nctorus::skew::SkewMatrix;
use nctorus::{Rational, Scalar};
use num_bigint::BigInt;
use rand::Rng;

pub fn random_int_skew<R: Rng>(rng: &mut R, n: usize, bound: i64) -> SkewMatrix {
    let entries: Vec<_> = (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .map(|ij| (ij, Scalar::int(rng.gen_range(-bound..=bound))))
        .collect();
    SkewMatrix::from_upper(n, entries).unwrap()
}

pub fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    Rational::new(BigInt::from(rng.gen_range(-9..=9)), BigInt::from(rng.gen_range(1..=7)))
}

pub fn random_rational_skew<R: Rng>(rng: &mut R, n: usize) -> SkewMatrix {
    let entries: Vec<_> = (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .map(|ij| (ij, Scalar::Rational(random_rational(rng))))
        .collect();
    SkewMatrix::from_upper(n, entries).unwrap()
}

/// A random element of SL(2,ℤ) as a product of elementary shears.
pub fn random_sl2<R: Rng>(rng: &mut R) -> IntMatrix {
    let mut m = IntMatrix::identity(2);
    for step in 0..rng.gen_range(1..=4) {
        let k = rng.gen_range(-2..=2);
        let e = if step % 2 == 0 { IntMatrix::from_i64(&[&[1, k], &[0, 1]]) } else { IntMatrix::from_i64(&[&[1, 0], &[k, 1]]) };
        m = m.mul(&e).unwrap();
    }
    if rng.gen_bool(0.5) {
        m = m.neg();
    }
    m
}

/// Exact WᵗθW with plain rational arithmetic, independent of the library's matrix code.
pub fn congruence_oracle(w: &[Vec<i64>], theta: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = w.len();
    let mut out = vec![vec![Rational::from_integer(0.into()); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Rational::from_integer(0.into());
            for a in 0..n {
                for b in 0..n {
                    acc += Rational::from_integer((w[a][i] * w[b][j]).into()) * &theta[a][b];
                }
            }
            out[i][j] = acc;
        }
    }
    out
}

pub fn rational_rows(theta: &SkewMatrix) -> Vec<Vec<Rational>> {
    (0..theta.n()).map(|i| (0..theta.n()).map(|j| theta.get(i, j).as_rational().unwrap()).collect()).collect()
}

/// Brute-force search for a nonzero v in [−r, r]ⁿ with Wᵏv = v for some 0 < k < N.
pub fn box_fixed_vector(w: &IntMatrix, order: usize, r: i64) -> bool {
    let n = w.rows();
    let powers: Vec<Vec<Vec<i64>>> = (1..order).map(|k| w.pow(k).to_i64_rows()).collect();
    let side = (2 * r + 1) as usize;
    let total = side.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let v: Vec<i64> = (0..n)
            .map(|_| {
                let x = (c % side) as i64 - r;
                c /= side;
                x
            })
            .collect();
        if v.iter().all(|&x| x == 0) {
            continue;
        }
        for p in &powers {
            if (0..n).all(|i| (0..n).map(|j| p[i][j] * v[j]).sum::<i64>() == v[i]) {
                return true;
            }
        }
    }
    false
}
