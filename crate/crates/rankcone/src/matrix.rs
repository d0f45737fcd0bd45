//! Dense symmetric and general matrices over a [`Scalar`] backend.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{Flavor, Rational, Scalar};
use crate::tol::Tolerances;

/// Symmetric matrix of order `n >= 1`, stored once per unordered index pair
/// so symmetry holds by construction.
#[derive(Clone, PartialEq)]
pub struct SymMatrix<T> {
    n: usize,
    packed: Vec<T>,
}

#[inline]
fn slot(i: usize, j: usize) -> usize {
    let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
    hi * (hi + 1) / 2 + lo
}

impl<T: Scalar> SymMatrix<T> {
    /// Builds from a full grid, rejecting non-square or asymmetric input.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Shape("matrix order must be at least 1".into()));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::Shape(format!(
                "row {bad} has {} entries, expected {n}",
                rows[bad].len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if let Some(j) = (0..i).find(|&j| row[j] != rows[j][i]) {
                return Err(Error::Asymmetric(i, j));
            }
        }
        let mut packed = Vec::with_capacity(n * (n + 1) / 2);
        for (i, row) in rows.into_iter().enumerate() {
            packed.extend(row.into_iter().take(i + 1));
        }
        Ok(SymMatrix { n, packed })
    }

    /// Builds from `f(i, j)`, evaluated only for `i >= j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        assert!(n >= 1, "matrix order must be at least 1");
        let mut packed = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in 0..=i {
                packed.push(f(i, j));
            }
        }
        SymMatrix { n, packed }
    }

    pub fn try_from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Result<T>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Shape("matrix order must be at least 1".into()));
        }
        let mut packed = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in 0..=i {
                packed.push(f(i, j)?);
            }
        }
        Ok(SymMatrix { n, packed })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| T::from_int(v)).collect())
                .collect(),
        )
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_, _| T::zero())
    }

    /// The all-ones matrix `1_{n×n}`.
    pub fn ones(n: usize) -> Self {
        Self::from_fn(n, |_, _| T::one())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    /// `u uᵀ`.
    pub fn outer(u: &[T]) -> Self {
        Self::from_fn(u.len(), |i, j| u[i].clone() * u[j].clone())
    }

    /// `Σ uⱼ uⱼᵀ` over equal-length vectors.
    pub fn gram(vectors: &[Vec<T>]) -> Result<Self> {
        let n = vectors.first().map(Vec::len).unwrap_or(0);
        if vectors.iter().any(|v| v.len() != n) {
            return Err(Error::Shape("Gram vectors differ in length".into()));
        }
        if n == 0 {
            return Err(Error::Shape("Gram construction needs nonempty vectors".into()));
        }
        Ok(Self::from_fn(n, |i, j| {
            vectors
                .iter()
                .fold(T::zero(), |acc, v| acc + v[i].clone() * v[j].clone())
        }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        assert!(i < self.n && j < self.n, "index ({i}, {j}) out of range");
        &self.packed[slot(i, j)]
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).clone()).collect())
            .collect()
    }

    /// Each unordered entry once.
    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.packed.iter()
    }

    pub fn map<U: Scalar>(&self, mut f: impl FnMut(&T) -> U) -> SymMatrix<U> {
        SymMatrix {
            n: self.n,
            packed: self.packed.iter().map(&mut f).collect(),
        }
    }

    pub fn try_map<U: Scalar>(&self, mut f: impl FnMut(&T) -> Result<U>) -> Result<SymMatrix<U>> {
        Ok(SymMatrix {
            n: self.n,
            packed: self.packed.iter().map(&mut f).collect::<Result<_>>()?,
        })
    }

    fn zip(&self, other: &Self, op: &str, f: impl Fn(&T, &T) -> T) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Shape(format!(
                "{op} of orders {} and {}",
                self.n, other.n
            )));
        }
        Ok(SymMatrix {
            n: self.n,
            packed: self
                .packed
                .iter()
                .zip(&other.packed)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    /// Entrywise product `A ∘ B`.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        self.zip(other, "Hadamard product", |a, b| a.clone() * b.clone())
    }

    /// Entrywise flavored power. Exact backends accept only integer exponents.
    pub fn hadamard_power(&self, alpha: &Rational, flavor: Flavor) -> Result<Self> {
        self.try_map(|x| x.flavored_pow(alpha, flavor))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, "sum", |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, "difference", |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -x.clone())
    }

    /// `A + c·1`.
    pub fn shift(&self, c: &T) -> Self {
        self.map(|x| x.clone() + c.clone())
    }

    /// Principal submatrix on the given (distinct, in-range) indices.
    pub fn principal(&self, idx: &[usize]) -> Result<Self> {
        if idx.is_empty() {
            return Err(Error::Shape("empty principal index set".into()));
        }
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.n) {
            return Err(Error::Shape(format!("index {bad} out of range {}", self.n)));
        }
        Ok(Self::from_fn(idx.len(), |i, j| self.get(idx[i], idx[j]).clone()))
    }

    /// Leading `m × m` principal submatrix.
    pub fn leading(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.n {
            return Err(Error::Shape(format!("leading block {m} of order {}", self.n)));
        }
        Ok(Self::from_fn(m, |i, j| self.get(i, j).clone()))
    }

    /// `A ⊕ 0_{extra}`.
    pub fn pad(&self, extra: usize) -> Self {
        let n = self.n;
        Self::from_fn(n + extra, |i, j| {
            if i < n && j < n {
                self.get(i, j).clone()
            } else {
                T::zero()
            }
        })
    }

    pub fn to_dense(&self) -> Dense<T> {
        Dense::from_fn(self.n, self.n, |i, j| self.get(i, j).clone())
    }

    pub fn rank(&self) -> usize {
        self.rank_with(&Tolerances::default())
    }

    pub fn rank_with(&self, tol: &Tolerances) -> usize {
        T::sym_rank(self, tol)
    }

    pub fn is_psd(&self) -> bool {
        self.is_psd_with(&Tolerances::default())
    }

    pub fn is_psd_with(&self, tol: &Tolerances) -> bool {
        T::sym_is_psd(self, tol)
    }

    pub fn det(&self) -> T {
        T::det(&self.to_dense())
    }

    pub fn max_abs(&self) -> T {
        self.packed
            .iter()
            .map(|x| x.abs())
            .fold(T::zero(), |m, x| if x > m { x } else { m })
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.packed.iter().all(|x| x.is_zero())
    }
}

impl SymMatrix<Rational> {
    pub fn to_float<F: Scalar>(&self) -> SymMatrix<F> {
        self.map(F::from_rational)
    }

    /// Rank `<= r` through vanishing minors: all `(r+1)`-minors, or with
    /// `principal_only` all `(r+1)`- and `(r+2)`-principal minors.
    pub fn minors_rank_test(&self, r: usize, principal_only: bool) -> Result<bool> {
        crate::linalg::exact::minors_vanish(self, r, principal_only)
    }
}

impl<T: Scalar> fmt::Debug for SymMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl<T: Scalar> fmt::Display for SymMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// `A₁ ⊕ … ⊕ A_m`.
pub fn block_diag<T: Scalar>(blocks: &[SymMatrix<T>]) -> Result<SymMatrix<T>> {
    if blocks.is_empty() {
        return Err(Error::Shape("block_diag of an empty list".into()));
    }
    let mut owner = Vec::new();
    for (b, block) in blocks.iter().enumerate() {
        let start = owner.len();
        owner.extend((0..block.n()).map(|i| (b, start, i)));
    }
    Ok(SymMatrix::from_fn(owner.len(), |i, j| {
        let (bi, si, _) = owner[i];
        let (bj, _, _) = owner[j];
        if bi == bj {
            blocks[bi].get(i - si, j - si).clone()
        } else {
            T::zero()
        }
    }))
}

/// Assembles a symmetric matrix from a 2×2 grid of blocks `[[P, Q], [Qᵀ, S]]`
/// where `Q` is given as a general matrix.
pub fn bordered<T: Scalar>(p: &SymMatrix<T>, q: &Dense<T>, s: &SymMatrix<T>) -> Result<SymMatrix<T>> {
    if q.rows() != p.n() || q.cols() != s.n() {
        return Err(Error::Shape(format!(
            "off-diagonal block {}x{} does not fit blocks {} and {}",
            q.rows(),
            q.cols(),
            p.n(),
            s.n()
        )));
    }
    let a = p.n();
    Ok(SymMatrix::from_fn(a + s.n(), |i, j| match (i < a, j < a) {
        (true, true) => p.get(i, j).clone(),
        (false, false) => s.get(i - a, j - a).clone(),
        (false, true) => q.get(j, i - a).clone(),
        (true, false) => unreachable!("from_fn visits i >= j only"),
    }))
}

/// General dense row-major matrix, used for minors and rectangular factors.
#[derive(Clone, PartialEq)]
pub struct Dense<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Dense<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Dense { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(Dense {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Dense::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn transpose(&self) -> Self {
        Dense::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn rank(&self) -> usize {
        T::dense_rank(self, &Tolerances::default())
    }

    pub fn rank_with(&self, tol: &Tolerances) -> usize {
        T::dense_rank(self, tol)
    }

    /// Determinant of a square matrix; the empty matrix has determinant 1.
    pub fn det(&self) -> T {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        if self.rows == 0 {
            return T::one();
        }
        T::det(self)
    }
}

impl<T: Scalar> fmt::Debug for Dense<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.rows).map(|i| self.row(i).to_vec()))
            .finish()
    }
}

/// All `size`-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if size > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..size).collect();
    loop {
        out.push(cur.clone());
        let mut i = size;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - size {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..size {
            cur[j] = cur[j - 1] + 1;
        }
    }
}
