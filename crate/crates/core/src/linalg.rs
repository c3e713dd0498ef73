//! Dense integer and scalar matrices, just large enough for the desk-scale
//! sizes used here (n ≤ 12 or so).

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{common_mode, Mode, Rational, Scalar};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data = rows.iter().flat_map(|row| row.iter().cloned().map(Into::into)).collect();
        Ok(IntMatrix { rows: r, cols: c, data })
    }

    /// Panicking convenience constructor for literals.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let v: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
        IntMatrix::from_rows(&v).expect("rectangular literal")
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let n = entries.len();
        let mut m = IntMatrix::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = BigInt::from(*e);
        }
        m
    }

    /// Block-diagonal matrix diag(a, b).
    pub fn block_diag(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
        let n = a.rows + b.rows;
        let m = a.cols + b.cols;
        let mut out = IntMatrix::zeros(n, m);
        for i in 0..a.rows {
            for j in 0..a.cols {
                out[(i, j)] = a[(i, j)].clone();
            }
        }
        for i in 0..b.rows {
            for j in 0..b.cols {
                out[(a.rows + i, a.cols + j)] = b[(i, j)].clone();
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * &other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &IntMatrix) -> Result<IntMatrix> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &IntMatrix) -> Result<IntMatrix> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &IntMatrix, f: impl Fn(&BigInt, &BigInt) -> BigInt) -> Result<IntMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("shapes differ".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect();
        Ok(IntMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x).collect() }
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn pow(&self, k: usize) -> IntMatrix {
        let mut result = IntMatrix::identity(self.rows);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base).expect("square");
            }
            base = base.mul(&base).expect("square");
            k >>= 1;
        }
        result
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == IntMatrix::identity(self.rows)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_skew(&self) -> bool {
        self.is_square() && self.transpose() == self.neg()
    }

    /// Sub-block `[r0, r1) × [c0, c1)`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> IntMatrix {
        let mut out = IntMatrix::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                out[(i - r0, j - c0)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Exact determinant by Bareiss fraction-free elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }

    /// Inverse of a unimodular matrix (det = ±1), exact over ℤ.
    pub fn inverse_unimodular(&self) -> Result<IntMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let d = self.det();
        if d.abs() != BigInt::one() {
            return Err(Error::NotUnimodular(d.to_string()));
        }
        let inv = ScalarMatrix::from_int(self).inverse()?;
        let mut out = IntMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = inv[(i, j)]
                    .as_integer()
                    .ok_or_else(|| Error::InvariantViolation("non-integral inverse".into()))?;
            }
        }
        Ok(out)
    }

    pub fn to_i64_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| i64::try_from(x).unwrap_or(i64::MAX)).collect())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Dense matrix over [`Scalar`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl ScalarMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ScalarMatrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ScalarMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let m = ScalarMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() };
        m.mode()?;
        Ok(m)
    }

    pub fn from_int(m: &IntMatrix) -> Self {
        ScalarMatrix {
            rows: m.rows,
            cols: m.cols,
            data: m.data.iter().map(|x| Scalar::from_bigint(x.clone())).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn mode(&self) -> Result<Mode> {
        common_mode(self.data.iter())
    }

    pub fn transpose(&self) -> ScalarMatrix {
        let mut out = ScalarMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &ScalarMatrix) -> Result<ScalarMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = ScalarMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Scalar::zero();
                for k in 0..self.cols {
                    let a = &self[(i, k)];
                    let b = &other[(k, j)];
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = acc.checked_add(&a.checked_mul(b)?)?;
                }
                out[(i, j)] = acc;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &ScalarMatrix) -> Result<ScalarMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("shapes differ".into()));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.checked_add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(ScalarMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn neg(&self) -> ScalarMatrix {
        ScalarMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x).collect() }
    }

    pub fn scale(&self, r: &Rational) -> ScalarMatrix {
        ScalarMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.scale(r)).collect() }
    }

    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> ScalarMatrix {
        let mut out = ScalarMatrix::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                out[(i - r0, j - c0)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Writes `b` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, b: &ScalarMatrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)].clone();
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = &self[(i, j)];
                    if !a.is_zero() && !x.is_zero() {
                        acc = acc.checked_add(&a.checked_mul(x)?)?;
                    }
                }
                Ok(acc)
            })
            .collect()
    }

    /// Gauss–Jordan inverse over the scalar field. Symbolic matrices are
    /// refused unless every entry is constant.
    pub fn inverse(&self) -> Result<ScalarMatrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = ScalarMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a[(r, col)].is_zero())
                .ok_or(Error::DivisionByZero)?;
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let p = a[(col, col)].invert()?;
            for j in 0..n {
                a[(col, j)] = a[(col, j)].checked_mul(&p)?;
                inv[(col, j)] = inv[(col, j)].checked_mul(&p)?;
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let factor = a[(r, col)].clone();
                for j in 0..n {
                    let t = a[(col, j)].checked_mul(&factor)?;
                    a[(r, j)] = a[(r, j)].checked_sub(&t)?;
                    let t = inv[(col, j)].checked_mul(&factor)?;
                    inv[(r, j)] = inv[(r, j)].checked_sub(&t)?;
                }
            }
        }
        Ok(inv)
    }

    /// Determinant by Gaussian elimination over the scalar field.
    pub fn det(&self) -> Result<Scalar> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Scalar::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a[(r, col)].is_zero()) else {
                return Ok(Scalar::zero());
            };
            if pivot != col {
                a.swap_rows(pivot, col);
                det = -det;
            }
            let p = a[(col, col)].clone();
            det = det.checked_mul(&p)?;
            let pinv = p.invert()?;
            for r in col + 1..n {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let factor = a[(r, col)].checked_mul(&pinv)?;
                for j in col..n {
                    let t = a[(col, j)].checked_mul(&factor)?;
                    a[(r, j)] = a[(r, j)].checked_sub(&t)?;
                }
            }
        }
        Ok(det)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for ScalarMatrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ScalarMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bareiss_matches_known_determinants() {
        let m = IntMatrix::from_i64(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 2]]);
        assert_eq!(m.det(), BigInt::from(6));
        let m = IntMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(m.det(), BigInt::from(-1));
        let m = IntMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert_eq!(m.det(), BigInt::from(0));
    }

    #[test]
    fn unimodular_inverse() {
        let m = IntMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        let inv = m.inverse_unimodular().unwrap();
        assert_eq!(inv, IntMatrix::from_i64(&[&[1, -1], &[0, 1]]));
        assert!(IntMatrix::from_i64(&[&[2, 0], &[0, 1]]).inverse_unimodular().is_err());
    }

    #[test]
    fn scalar_inverse_roundtrip() {
        let m = ScalarMatrix::from_rows(vec![
            vec![Scalar::ratio(1, 2), Scalar::int(3)],
            vec![Scalar::int(-1), Scalar::ratio(2, 3)],
        ])
        .unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), ScalarMatrix::identity(2));
        assert_eq!(m.det().unwrap(), Scalar::ratio(1, 3) + Scalar::int(3));
    }

    #[test]
    fn powers() {
        let w = IntMatrix::from_i64(&[&[0, -1], &[1, 1]]);
        assert!(w.pow(6).is_identity());
        assert!(!w.pow(3).is_identity());
    }
}
