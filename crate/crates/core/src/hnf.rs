//! Row Hermite normal form of integer lattices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Row-style HNF of the lattice spanned by `rows` (all of equal length).
///
/// The output rows form a basis of the same lattice; pivot columns are
/// strictly increasing, pivots positive, entries above a pivot reduced to
/// `[0, pivot)`. Zero rows are dropped, so the result is unique for a lattice.
pub fn hermite_normal_form(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let Some(width) = rows.first().map(|r| r.len()) else {
        return Vec::new();
    };
    let mut a: Vec<Vec<BigInt>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..width {
        if pivot_row >= a.len() {
            break;
        }
        // gcd-combine every row below into the pivot row
        for r in pivot_row + 1..a.len() {
            if a[r][col].is_zero() {
                continue;
            }
            let x = a[pivot_row][col].clone();
            let y = a[r][col].clone();
            let eg = x.extended_gcd(&y);
            let (g, s, t) = (eg.gcd, eg.x, eg.y);
            let (u, v) = (&x / &g, &y / &g);
            // [s t; -v u] has determinant s*u + t*v = 1
            for j in col..width {
                let p = a[pivot_row][j].clone();
                let q = a[r][j].clone();
                a[pivot_row][j] = &s * &p + &t * &q;
                a[r][j] = &u * &q - &v * &p;
            }
        }
        if a[pivot_row][col].is_zero() {
            // search for a nonzero entry in this column among later rows
            match (pivot_row + 1..a.len()).find(|&r| !a[r][col].is_zero()) {
                Some(r) => a.swap(pivot_row, r),
                None => continue,
            }
        }
        if a[pivot_row][col].is_negative() {
            for x in a[pivot_row].iter_mut() {
                *x = -&*x;
            }
        }
        let pivot = a[pivot_row][col].clone();
        for r in 0..pivot_row {
            let q = a[r][col].div_floor(&pivot);
            if !q.is_zero() {
                for j in col..width {
                    let d = &q * &a[pivot_row][j];
                    a[r][j] -= d;
                }
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    a.truncate(pivot_row);
    debug_assert!(a.iter().zip(&pivots).all(|(row, &c)| row[c].is_positive()));
    a
}

/// Whether the integer vector `v` lies in the lattice with HNF basis `basis`.
pub fn lattice_contains(basis: &[Vec<BigInt>], v: &[BigInt]) -> bool {
    let mut rest = v.to_vec();
    for row in basis {
        let Some(pc) = row.iter().position(|x| !x.is_zero()) else {
            continue;
        };
        if let Some(first) = rest.iter().position(|x| !x.is_zero()) {
            if first < pc {
                return false;
            }
        } else {
            return true;
        }
        let (q, r) = rest[pc].div_rem(&row[pc]);
        if !r.is_zero() {
            return false;
        }
        for (x, b) in rest.iter_mut().zip(row) {
            *x -= &q * b;
        }
    }
    rest.iter().all(|x| x.is_zero())
}

/// Lattice index check helper: product of pivots (the covolume when full rank).
pub fn pivot_product(basis: &[Vec<BigInt>]) -> BigInt {
    basis
        .iter()
        .filter_map(|row| row.iter().find(|x| !x.is_zero()).cloned())
        .fold(BigInt::one(), |acc, p| acc * p)
}
