//! Reference computations shared by the integration tests. They are kept
//! deliberately naive (Gaussian elimination over ℚ, Horner evaluation) so
//! they do not share code paths with the library.

#![allow(dead_code)]

use num_traits::{One, Signed, Zero};
use rankcone::{ExactMatrix, PowerSum, Rational};

pub fn q(p: i64, d: i64) -> Rational {
    Rational::new(p.into(), d.into())
}

fn rows_of(m: &ExactMatrix) -> Vec<Vec<Rational>> {
    (0..m.n()).map(|i| (0..m.n()).map(|j| m.get(i, j).clone()).collect()).collect()
}

/// Row-echelon rank of a rectangular rational matrix.
pub fn rank_rows(mut a: Vec<Vec<Rational>>) -> usize {
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, p);
        for r in rank + 1..a.len() {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &a[rank][c];
            let (top, rest) = a.split_at_mut(r);
            for (x, p) in rest[0][c..].iter_mut().zip(&top[rank][c..]) {
                *x -= &f * p;
            }
        }
        rank += 1;
    }
    rank
}

pub fn rank(m: &ExactMatrix) -> usize {
    rank_rows(rows_of(m))
}

pub fn det_rows(mut a: Vec<Vec<Rational>>) -> Rational {
    let n = a.len();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else { return Rational::zero() };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c].clone();
        for r in c + 1..n {
            let f = &a[r][c] / &a[c][c];
            let (top, rest) = a.split_at_mut(r);
            for (x, p) in rest[0][c..].iter_mut().zip(&top[c][c..]) {
                *x -= &f * p;
            }
        }
    }
    det
}

pub fn submatrix(a: &[Vec<Rational>], rows: &[usize], cols: &[usize]) -> Vec<Vec<Rational>> {
    rows.iter().map(|&i| cols.iter().map(|&j| a[i][j].clone()).collect()).collect()
}

/// Index subsets of `0..n` with `size` elements, in lexicographic order.
pub fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, size, &mut Vec::new(), &mut out);
    out
}

/// All principal minors nonnegative.
pub fn is_psd(m: &ExactMatrix) -> bool {
    let a = rows_of(m);
    (1..=m.n()).all(|s| subsets(m.n(), s).iter().all(|idx| !det_rows(submatrix(&a, idx, idx)).is_negative()))
}

/// Horner evaluation from the coefficient list.
pub fn horner(f: &PowerSum, x: &Rational) -> Rational {
    let deg = f.degree().unwrap_or(0);
    (0..=deg).rev().fold(Rational::zero(), |acc, m| acc * x + f.coefficient(m))
}

pub fn binom(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}
