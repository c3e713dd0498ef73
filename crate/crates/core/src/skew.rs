//! Skew-symmetric matrices over [`Scalar`], pfaffians and pfaffian minors.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::arith::{Mode, Scalar};
use crate::error::{Error, Result};
use crate::linalg::{IntMatrix, ScalarMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix {
    m: ScalarMatrix,
    mode: Mode,
}

impl SkewMatrix {
    pub fn new(m: ScalarMatrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::DimensionMismatch("skew matrix must be square".into()));
        }
        let mode = m.mode()?;
        let n = m.rows();
        for i in 0..n {
            if !m[(i, i)].is_zero() {
                return Err(Error::NotSkew(format!("diagonal entry ({}, {}) is nonzero", i + 1, i + 1)));
            }
            for j in i + 1..n {
                if m[(i, j)] != -&m[(j, i)] {
                    return Err(Error::NotSkew(format!("entries ({}, {}) and ({}, {})", i + 1, j + 1, j + 1, i + 1)));
                }
            }
        }
        Ok(SkewMatrix { m, mode })
    }

    /// Builds the matrix from its strictly upper entries `(i, j) -> value`
    /// (1-based, i < j); omitted entries are zero.
    pub fn from_upper<I>(n: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((usize, usize), Scalar)>,
    {
        let mut m = ScalarMatrix::zeros(n, n);
        for ((i, j), v) in entries {
            if !(1 <= i && i < j && j <= n) {
                return Err(Error::InvalidIndexTuple(format!("entry ({i}, {j}) for n = {n}")));
            }
            m[(j - 1, i - 1)] = -&v;
            m[(i - 1, j - 1)] = v;
        }
        SkewMatrix::new(m)
    }

    /// The generic matrix with independent indeterminates θ_{ij} above the diagonal.
    pub fn generic(n: usize) -> Self {
        let entries = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| ((i, j), Scalar::var(i, j))));
        SkewMatrix::from_upper(n, entries).expect("generic matrix is skew")
    }

    pub fn zero(n: usize) -> Self {
        SkewMatrix { m: ScalarMatrix::zeros(n, n), mode: Mode::Rational }
    }

    pub fn from_int(m: &IntMatrix) -> Result<Self> {
        SkewMatrix::new(ScalarMatrix::from_int(m))
    }

    /// Block-diagonal skew matrix diag(a, b).
    pub fn block_diag(a: &SkewMatrix, b: &SkewMatrix) -> Result<Self> {
        let n = a.n() + b.n();
        let mut m = ScalarMatrix::zeros(n, n);
        m.set_block(0, 0, &a.m);
        m.set_block(a.n(), a.n(), &b.m);
        SkewMatrix::new(m)
    }

    pub fn n(&self) -> usize {
        self.m.rows()
    }

    pub fn mode(&self) -> &Mode {
        &self.mode
    }

    /// 0-based entry.
    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.m[(i, j)]
    }

    pub fn as_matrix(&self) -> &ScalarMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> ScalarMatrix {
        self.m
    }

    /// Strictly upper entries as `((i, j), value)`, 1-based, zero entries skipped.
    pub fn upper_entries(&self) -> Vec<((usize, usize), Scalar)> {
        let n = self.n();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !self.m[(i, j)].is_zero())
            .map(|(i, j)| ((i + 1, j + 1), self.m[(i, j)].clone()))
            .collect()
    }

    pub fn add(&self, other: &SkewMatrix) -> Result<SkewMatrix> {
        SkewMatrix::new(self.m.add(&other.m)?)
    }

    pub fn add_int(&self, other: &IntMatrix) -> Result<SkewMatrix> {
        SkewMatrix::new(self.m.add(&ScalarMatrix::from_int(other))?)
    }

    /// PᵗAP.
    pub fn congruence(&self, p: &IntMatrix) -> Result<SkewMatrix> {
        let p = ScalarMatrix::from_int(p);
        SkewMatrix::new(p.transpose().mul(&self.m)?.mul(&p)?)
    }

    /// The principal submatrix M_I on the rows and columns of `idx`.
    pub fn principal(&self, idx: &IndexTuple) -> SkewMatrix {
        let k = idx.len();
        let mut m = ScalarMatrix::zeros(k, k);
        for (a, &i) in idx.indices().iter().enumerate() {
            for (b, &j) in idx.indices().iter().enumerate() {
                m[(a, b)] = self.m[(i - 1, j - 1)].clone();
            }
        }
        SkewMatrix { m, mode: self.mode.clone() }
    }

    /// Block of rows `[r0, r1)` and columns `[c0, c1)`, 0-based.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> ScalarMatrix {
        self.m.block(r0, r1, c0, c1)
    }
}

impl fmt::Display for SkewMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.n() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.m[(i, j)])?;
            }
        }
        write!(f, "]")
    }
}

/// A strictly increasing, even-length list of 1-based indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexTuple(Vec<usize>);

impl IndexTuple {
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        if indices.is_empty() || indices.len() % 2 != 0 {
            return Err(Error::InvalidIndexTuple(format!("{indices:?} must have positive even length")));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidIndexTuple(format!("{indices:?} is not strictly increasing")));
        }
        if indices[0] < 1 || *indices.last().unwrap() > n {
            return Err(Error::InvalidIndexTuple(format!("{indices:?} out of range for n = {n}")));
        }
        Ok(IndexTuple(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Half the size: the `p` of a 2p-minor.
    pub fn half(&self) -> usize {
        self.0.len() / 2
    }

    /// Bitmask over 0-based positions.
    fn mask(&self) -> u64 {
        self.0.iter().fold(0u64, |m, &i| m | (1 << (i - 1)))
    }

    /// All tuples for dimension `n`, ordered by size then lexicographically.
    pub fn all(n: usize) -> Vec<IndexTuple> {
        let mut out = Vec::new();
        for size in (2..=n).step_by(2) {
            let mut combo: Vec<usize> = (1..=size).collect();
            loop {
                out.push(IndexTuple(combo.clone()));
                // next combination in lexicographic order
                let mut k = size;
                while k > 0 && combo[k - 1] == n - size + k {
                    k -= 1;
                }
                if k == 0 {
                    break;
                }
                combo[k - 1] += 1;
                for t in k..size {
                    combo[t] = combo[t - 1] + 1;
                }
            }
        }
        out
    }
}

impl Ord for IndexTuple {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for IndexTuple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for IndexTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for IndexTuple {
    type Err = Error;

    /// Parses `"1,2,3,4"`; the range is checked later against `n`.
    fn from_str(s: &str) -> Result<Self> {
        let idx = s
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| Error::InvalidIndexTuple(s.to_string())))
            .collect::<Result<Vec<_>>>()?;
        IndexTuple::new(idx, usize::MAX)
    }
}

/// Pfaffian as the signed sum over perfect matchings.
///
/// Each matching {(a₁,b₁), …, (a_m,b_m)} with aₖ < bₖ contributes
/// sgn(a₁ b₁ … a_m b_m) · Π θ_{aₖ bₖ}; the sign is the parity of the
/// inversion count of that word.
pub fn pfaffian_matching_sum(a: &SkewMatrix) -> Result<Scalar> {
    let n = a.n();
    if n % 2 != 0 {
        return Err(Error::OddDimension(n));
    }
    let mut total = Scalar::zero();
    let mut word = Vec::with_capacity(n);
    let mut used = vec![false; n];
    matchings(n, &mut used, &mut word, &mut |w: &[usize]| {
        let inversions = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| w[i] > w[j])
            .count();
        let mut term = Scalar::one();
        for pair in w.chunks(2) {
            term = &term * a.get(pair[0], pair[1]);
            if term.is_zero() {
                return Ok(());
            }
        }
        total = if inversions % 2 == 0 { &total + &term } else { &total - &term };
        Ok(())
    })?;
    Ok(total)
}

fn matchings(
    n: usize,
    used: &mut Vec<bool>,
    word: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    let Some(first) = (0..n).find(|&i| !used[i]) else {
        return visit(word);
    };
    used[first] = true;
    for partner in first + 1..n {
        if used[partner] {
            continue;
        }
        used[partner] = true;
        word.push(first);
        word.push(partner);
        matchings(n, used, word, visit)?;
        word.pop();
        word.pop();
        used[partner] = false;
    }
    used[first] = false;
    Ok(())
}

/// Memoized first-row expansion over index subsets of a fixed matrix.
struct ExpansionCache<'a> {
    a: &'a SkewMatrix,
    memo: HashMap<u64, Scalar>,
}

impl<'a> ExpansionCache<'a> {
    fn new(a: &'a SkewMatrix) -> Self {
        assert!(a.n() <= 64, "expansion supports n ≤ 64");
        ExpansionCache { a, memo: HashMap::new() }
    }

    // pf(S) = Σ_{j ∈ S, j > i} (−1)^k a_{ij} pf(S ∖ {i, j}), i = min S,
    // k = number of elements of S strictly between i and j.
    fn pf(&mut self, mask: u64) -> Scalar {
        if mask == 0 {
            return Scalar::one();
        }
        if mask.count_ones() % 2 == 1 {
            return Scalar::zero();
        }
        if let Some(v) = self.memo.get(&mask) {
            return v.clone();
        }
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut total = Scalar::zero();
        let mut between = 0usize;
        let mut bits = rest;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let aij = self.a.get(i, j);
            if !aij.is_zero() {
                let sub = self.pf(rest & !(1 << j));
                if !sub.is_zero() {
                    let term = aij * &sub;
                    total = if between % 2 == 0 { &total + &term } else { &total - &term };
                }
            }
            between += 1;
        }
        self.memo.insert(mask, total.clone());
        total
    }
}

/// Pfaffian by memoized expansion along the first row. The empty matrix has
/// pfaffian 1.
pub fn pfaffian(a: &SkewMatrix) -> Result<Scalar> {
    let n = a.n();
    if n % 2 != 0 {
        return Err(Error::OddDimension(n));
    }
    if n == 0 {
        return Ok(Scalar::one());
    }
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    Ok(ExpansionCache::new(a).pf(mask))
}

/// pf(M_I).
pub fn pfaffian_minor(a: &SkewMatrix, idx: &IndexTuple) -> Result<Scalar> {
    IndexTuple::new(idx.indices().to_vec(), a.n())?;
    Ok(ExpansionCache::new(a).pf(idx.mask()))
}

/// Every pfaffian minor, keyed by index tuple; `2^{n−1} − 1` entries.
pub fn all_pfaffian_minors(a: &SkewMatrix) -> BTreeMap<IndexTuple, Scalar> {
    let mut cache = ExpansionCache::new(a);
    IndexTuple::all(a.n())
        .into_iter()
        .map(|idx| {
            let v = cache.pf(idx.mask());
            (idx, v)
        })
        .collect()
}

/// The skew matrix with every entry above the diagonal equal to 1.
pub fn standard_z_int(n: usize) -> IntMatrix {
    let mut z = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            z[(i, j)] = 1.into();
            z[(j, i)] = (-1).into();
        }
    }
    z
}

pub fn standard_z(n: usize) -> SkewMatrix {
    SkewMatrix::from_int(&standard_z_int(n)).expect("Z is skew")
}

/// Least `t` in `[1, t_max]` such that every pfaffian minor of θ + tZ is
/// strictly positive; `None` if the scan is exhausted.
pub fn find_positive_t(theta: &SkewMatrix, t_max: u64) -> Result<Option<u64>> {
    if theta.mode().is_symbolic() {
        return Err(Error::UnsupportedInSymbolicMode("sign of pfaffian minors"));
    }
    let z = standard_z_int(theta.n());
    for t in 1..=t_max {
        let tz = IntMatrix::from_rows(
            &z.to_rows().into_iter().map(|r| r.into_iter().map(|x| x * t).collect()).collect::<Vec<_>>(),
        )?;
        let shifted = theta.add_int(&tz)?;
        if all_minors_positive(&shifted)? {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// Every pfaffian minor strictly positive.
pub fn all_minors_positive(theta: &SkewMatrix) -> Result<bool> {
    for (_, v) in all_pfaffian_minors(theta) {
        if v.sign()? <= 0 {
            return Ok(false);
        }
    }
    Ok(true)
}
