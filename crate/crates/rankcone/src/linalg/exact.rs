//! Exact algorithms over the rationals.
//!
//! Rows are scaled to integers first; Bareiss elimination then runs in
//! `BigInt` with exact divisions only.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::{subsets, Dense, SymMatrix};
use crate::scalar::{denominator_lcm, Rational};

/// Order up to which PSD is decided by all principal minors.
pub const MINOR_PSD_MAX_ORDER: usize = 12;

/// Rows multiplied by the LCM of their denominators, with the multipliers.
pub fn integer_rows(m: &Dense<Rational>) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
    let mut rows = Vec::with_capacity(m.rows());
    let mut scales = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        let row = m.row(i);
        let l = denominator_lcm(row);
        rows.push(
            row.iter()
                .map(|q| q.numer() * (&l / q.denom()))
                .collect(),
        );
        scales.push(l);
    }
    (rows, scales)
}

/// Rank by fraction-free row echelon reduction.
pub fn bareiss_rank(mut a: Vec<Vec<BigInt>>) -> usize {
    let rows = a.len();
    let cols = a.first().map(Vec::len).unwrap_or(0);
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let (top, rest) = a.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in rest.iter_mut() {
            for j in c + 1..cols {
                let v = &row[j] * &pivot_row[c] - &row[c] * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
    }
    rank
}

/// Determinant of a square integer matrix by Bareiss elimination.
pub fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            a.swap(k, p);
            negate = !negate;
        }
        let (top, rest) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in rest.iter_mut() {
            for j in k + 1..n {
                let v = &row[j] * &pivot_row[k] - &row[k] * &pivot_row[j];
                row[j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

pub fn rank(m: &Dense<Rational>) -> usize {
    bareiss_rank(integer_rows(m).0)
}

pub fn det(m: &Dense<Rational>) -> Rational {
    let (rows, scales) = integer_rows(m);
    let d = bareiss_det(rows);
    let s = scales.iter().fold(BigInt::one(), |acc, x| acc * x);
    Rational::new(d, s)
}

fn principal_rows(rows: &[Vec<BigInt>], idx: &[usize]) -> Vec<Vec<BigInt>> {
    idx.iter()
        .map(|&i| idx.iter().map(|&j| rows[i][j].clone()).collect())
        .collect()
}

/// PSD test choosing the principal-minor criterion for small orders and
/// pivoted LDLᵀ beyond [`MINOR_PSD_MAX_ORDER`].
pub fn is_psd(m: &SymMatrix<Rational>) -> bool {
    if m.n() <= MINOR_PSD_MAX_ORDER {
        is_psd_by_minors(m)
    } else {
        is_psd_by_ldlt(m)
    }
}

/// True iff every principal minor (all index subsets) is nonnegative.
///
/// Row scaling multiplies each principal minor by a positive factor, so the
/// signs can be read off the integer matrix directly.
pub fn is_psd_by_minors(m: &SymMatrix<Rational>) -> bool {
    let n = m.n();
    let (rows, _) = integer_rows(&m.to_dense());
    if rows.iter().enumerate().any(|(i, r)| r[i].is_negative()) {
        return false;
    }
    for size in 2..=n {
        for idx in subsets(n, size) {
            if bareiss_det(principal_rows(&rows, &idx)).is_negative() {
                return false;
            }
        }
    }
    true
}

/// Exact LDLᵀ with symmetric pivoting on the largest remaining diagonal.
pub fn is_psd_by_ldlt(m: &SymMatrix<Rational>) -> bool {
    let mut s = m.rows();
    let mut active: Vec<usize> = (0..m.n()).collect();
    while !active.is_empty() {
        let mut best = active[0];
        for &i in &active {
            if s[i][i] > s[best][best] {
                best = i;
            }
        }
        let pivot = s[best][best].clone();
        if pivot.is_negative() {
            return false;
        }
        if pivot.is_zero() {
            return active
                .iter()
                .all(|&i| active.iter().all(|&j| s[i][j].is_zero()));
        }
        active.retain(|&i| i != best);
        for &i in &active {
            let factor = &s[i][best] / &pivot;
            if factor.is_zero() {
                continue;
            }
            for &j in &active {
                let delta = &factor * &s[best][j];
                s[i][j] -= delta;
            }
        }
    }
    true
}

/// Rank test through vanishing minors.
///
/// `principal_only = false`: every `(r+1)`-minor vanishes.
/// `principal_only = true`: every `(r+1)`- and `(r+2)`-principal minor vanishes.
pub fn minors_vanish(m: &SymMatrix<Rational>, r: usize, principal_only: bool) -> Result<bool> {
    let n = m.n();
    if r == 0 || r > n {
        return Err(Error::Invalid(format!("rank bound {r} outside 1..={n}")));
    }
    let (rows, _) = integer_rows(&m.to_dense());
    if principal_only {
        for size in [r + 1, r + 2] {
            for idx in subsets(n, size) {
                if !bareiss_det(principal_rows(&rows, &idx)).is_zero() {
                    return Ok(false);
                }
            }
        }
        return Ok(true);
    }
    let sets = subsets(n, r + 1);
    for ri in &sets {
        for ci in &sets {
            let sub: Vec<Vec<BigInt>> = ri
                .iter()
                .map(|&i| ci.iter().map(|&j| rows[i][j].clone()).collect())
                .collect();
            if !bareiss_det(sub).is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
