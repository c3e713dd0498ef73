//! The group SO(n,n|ℤ) in 2×2 block form, its standard generators, and the
//! fractional-linear action θ ↦ (Aθ + B)(Cθ + D)⁻¹ on skew matrices.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::linalg::{IntMatrix, ScalarMatrix};
use crate::skew::{IndexTuple, SkewMatrix};

/// The 2n×2n integer matrix (A B; C D).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockElement {
    n: usize,
    a: IntMatrix,
    b: IntMatrix,
    c: IntMatrix,
    d: IntMatrix,
}

impl BlockElement {
    /// Validates AᵗC + CᵗA = 0, BᵗD + DᵗB = 0, AᵗD + CᵗB = id and det = 1.
    pub fn new(a: IntMatrix, b: IntMatrix, c: IntMatrix, d: IntMatrix) -> Result<Self> {
        let n = a.rows();
        for (name, m) in [("A", &a), ("B", &b), ("C", &c), ("D", &d)] {
            if m.rows() != n || m.cols() != n {
                return Err(Error::DimensionMismatch(format!("block {name} is not {n}×{n}")));
            }
        }
        let g = BlockElement { n, a, b, c, d };
        g.check_invariants()?;
        Ok(g)
    }

    /// Splits a 2n×2n matrix into blocks.
    pub fn from_full(m: &IntMatrix) -> Result<Self> {
        if !m.is_square() || m.rows() % 2 != 0 {
            return Err(Error::DimensionMismatch(format!("{}×{} is not 2n×2n", m.rows(), m.cols())));
        }
        let n = m.rows() / 2;
        BlockElement::new(m.block(0, n, 0, n), m.block(0, n, n, 2 * n), m.block(n, 2 * n, 0, n), m.block(n, 2 * n, n, 2 * n))
    }

    fn check_invariants(&self) -> Result<()> {
        let (at, bt, ct) = (self.a.transpose(), self.b.transpose(), self.c.transpose());
        if !at.mul(&self.c)?.add(&ct.mul(&self.a)?)?.is_zero() {
            return Err(Error::InvariantViolation("AᵗC + CᵗA ≠ 0".into()));
        }
        if !bt.mul(&self.d)?.add(&self.d.transpose().mul(&self.b)?)?.is_zero() {
            return Err(Error::InvariantViolation("BᵗD + DᵗB ≠ 0".into()));
        }
        if !at.mul(&self.d)?.add(&ct.mul(&self.b)?)?.is_identity() {
            return Err(Error::InvariantViolation("AᵗD + CᵗB ≠ id".into()));
        }
        let det = self.full().det();
        if !det.is_one() {
            return Err(Error::InvariantViolation(format!("determinant {det} ≠ 1")));
        }
        Ok(())
    }

    pub fn identity(n: usize) -> Self {
        BlockElement {
            n,
            a: IntMatrix::identity(n),
            b: IntMatrix::zeros(n, n),
            c: IntMatrix::zeros(n, n),
            d: IntMatrix::identity(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &IntMatrix {
        &self.a
    }

    pub fn b(&self) -> &IntMatrix {
        &self.b
    }

    pub fn c(&self) -> &IntMatrix {
        &self.c
    }

    pub fn d(&self) -> &IntMatrix {
        &self.d
    }

    pub fn full(&self) -> IntMatrix {
        let n = self.n;
        let mut m = IntMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.a[(i, j)].clone();
                m[(i, j + n)] = self.b[(i, j)].clone();
                m[(i + n, j)] = self.c[(i, j)].clone();
                m[(i + n, j + n)] = self.d[(i, j)].clone();
            }
        }
        m
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_identity() && self.b.is_zero() && self.c.is_zero() && self.d.is_identity()
    }
}

impl fmt::Display for BlockElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.full())
    }
}

/// A permutation Σ of {1, …, n}, stored by its images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &k in &images {
            if k < 1 || k > n || seen[k - 1] {
                return Err(Error::InvalidIndexTuple(format!("{images:?} is not a permutation")));
            }
            seen[k - 1] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((1..=n).collect())
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// Σ(k), 1-based.
    pub fn apply(&self, k: usize) -> usize {
        self.0[k - 1]
    }

    /// The matrix R with R_{k,Σ(k)} = 1, so that (RθRᵗ)_{ab} = θ_{Σ(a)Σ(b)}.
    pub fn matrix(&self) -> IntMatrix {
        let n = self.n();
        let mut r = IntMatrix::zeros(n, n);
        for k in 0..n {
            r[(k, self.0[k] - 1)] = BigInt::one();
        }
        r
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn check_unimodular(r: &IntMatrix) -> Result<()> {
    if !r.is_square() {
        return Err(Error::DimensionMismatch(format!("{}×{} matrix is not square", r.rows(), r.cols())));
    }
    let det = r.det();
    if det.abs() != BigInt::one() {
        return Err(Error::NotUnimodular(det.to_string()));
    }
    Ok(())
}

/// ρ(R) = (R 0; 0 (R⁻¹)ᵗ).
pub fn make_rho(r: &IntMatrix) -> Result<BlockElement> {
    check_unimodular(r)?;
    let n = r.rows();
    let d = r.inverse_unimodular()?.transpose();
    BlockElement::new(r.clone(), IntMatrix::zeros(n, n), IntMatrix::zeros(n, n), d)
}

/// μ(N) = (id N; 0 id) for an integral skew matrix N.
pub fn make_mu(n_mat: &SkewMatrix) -> Result<BlockElement> {
    make_mu_int(&skew_to_int(n_mat)?)
}

pub fn make_mu_int(n_mat: &IntMatrix) -> Result<BlockElement> {
    if !n_mat.is_square() || !n_mat.is_skew() {
        return Err(Error::NotSkewIntegral);
    }
    let n = n_mat.rows();
    BlockElement::new(IntMatrix::identity(n), n_mat.clone(), IntMatrix::zeros(n, n), IntMatrix::identity(n))
}

/// Integer entries of a skew matrix, or `NotSkewIntegral`.
pub fn skew_to_int(m: &SkewMatrix) -> Result<IntMatrix> {
    let n = m.n();
    let mut out = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = m.get(i, j).as_integer().ok_or(Error::NotSkewIntegral)?;
        }
    }
    Ok(out)
}

/// σ₂ₚ: A = diag(0₂ₚ, id_q), B = C = diag(id₂ₚ, 0_q), D = diag(0₂ₚ, id_q).
pub fn make_sigma(n: usize, p: usize) -> Result<BlockElement> {
    if p < 1 || 2 * p > n {
        return Err(Error::BadP { n, p });
    }
    let mut a = IntMatrix::zeros(n, n);
    let mut b = IntMatrix::zeros(n, n);
    for k in 0..n {
        if k < 2 * p {
            b[(k, k)] = BigInt::one();
        } else {
            a[(k, k)] = BigInt::one();
        }
    }
    BlockElement::new(a.clone(), b.clone(), b, a)
}

/// The product g·h, re-verified.
pub fn compose(g: &BlockElement, h: &BlockElement) -> Result<BlockElement> {
    if g.n != h.n {
        return Err(Error::DimensionMismatch(format!("composing n = {} with n = {}", g.n, h.n)));
    }
    BlockElement::from_full(&g.full().mul(&h.full())?)
}

/// gθ = (Aθ + B)(Cθ + D)⁻¹.
pub fn act_on_theta(g: &BlockElement, theta: &SkewMatrix) -> Result<SkewMatrix> {
    if theta.mode().is_symbolic() {
        return Err(Error::UnsupportedInSymbolicMode("fractional-linear action"));
    }
    if g.n != theta.n() {
        return Err(Error::DimensionMismatch(format!("element of size {} acting on θ of size {}", g.n, theta.n())));
    }
    let th = theta.as_matrix();
    let num = ScalarMatrix::from_int(&g.a).mul(th)?.add(&ScalarMatrix::from_int(&g.b))?;
    let den = ScalarMatrix::from_int(&g.c).mul(th)?.add(&ScalarMatrix::from_int(&g.d))?;
    let inv = den.inverse().map_err(|e| match e {
        Error::DivisionByZero | Error::SingularBlock => Error::ActionUndefined,
        other => other,
    })?;
    SkewMatrix::new(num.mul(&inv)?).map_err(|e| match e {
        Error::NotSkew(s) => Error::InvariantViolation(format!("action produced a non-skew matrix: {s}")),
        other => other,
    })
}

/// Σ with Σ(k) = i_k for k ≤ 2p, then the complement of I in increasing order.
pub fn canonical_sigma_permutation(idx: &IndexTuple, n: usize) -> Result<Permutation> {
    let idx = IndexTuple::new(idx.indices().to_vec(), n)?;
    let mut images = idx.indices().to_vec();
    images.extend((1..=n).filter(|k| !idx.indices().contains(k)));
    Permutation::new(images)
}

/// g_{I,Σ} = σ₂ₚ ρ(R_I^Σ) for the canonical Σ.
pub fn make_g_i_sigma(idx: &IndexTuple, n: usize) -> Result<BlockElement> {
    let sigma = canonical_sigma_permutation(idx, n)?;
    compose(&make_sigma(n, idx.half())?, &make_rho(&sigma.matrix())?)
}

/// Whether R Wᵗ R⁻¹ is block diagonal with blocks of sizes 2p and q, where
/// R is the matrix of the canonical Σ for I.
pub fn extension_condition(w: &IntMatrix, idx: &IndexTuple) -> Result<bool> {
    let sigma = canonical_sigma_permutation(idx, w.rows())?;
    extension_condition_with(w, idx, &sigma)
}

/// As [`extension_condition`] with a caller-chosen Σ mapping {1..2p} onto I.
pub fn extension_condition_with(w: &IntMatrix, idx: &IndexTuple, sigma: &Permutation) -> Result<bool> {
    check_unimodular(w)?;
    let n = w.rows();
    if sigma.n() != n {
        return Err(Error::DimensionMismatch(format!("permutation of {} for n = {n}", sigma.n())));
    }
    let k = idx.len();
    let mut head: Vec<usize> = sigma.images()[..k].to_vec();
    head.sort_unstable();
    if head != idx.indices() {
        return Err(Error::InvalidIndexTuple(format!("{sigma} does not map the first {k} slots onto {idx}")));
    }
    let r = sigma.matrix();
    let v = r.mul(&w.transpose())?.mul(&r.transpose())?;
    Ok(v.block(0, k, k, n).is_zero() && v.block(k, n, 0, k).is_zero())
}
