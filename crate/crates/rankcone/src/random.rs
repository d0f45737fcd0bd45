//! Seeded generators for exact test matrices.
//!
//! Every stream is a ChaCha8 generator keyed by a master seed; trial `t`
//! uses stream `t`, so trials are reproducible independently of order.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cone::Interval;
use crate::error::Result;
use crate::matrix::SymMatrix;
use crate::scalar::{int, Rational};
use crate::ExactMatrix;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for trial `trial` under `master`.
pub fn trial_rng(master: u64, trial: u64) -> Rng8 {
    let mut r = ChaCha8Rng::seed_from_u64(master);
    r.set_stream(trial);
    r
}

/// `p/q` with `|p/q| <= bound`, `q` drawn from `1..=max_den`.
pub fn rational(rng: &mut Rng8, bound: i64, max_den: i64) -> Rational {
    let q = rng.random_range(1..=max_den);
    let p = rng.random_range(-bound * q..=bound * q);
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Like [`rational`] but in `[0, bound]`.
pub fn nonneg_rational(rng: &mut Rng8, bound: i64, max_den: i64) -> Rational {
    let q = rng.random_range(1..=max_den);
    let p = rng.random_range(0..=bound * q);
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Strictly positive rational in `(0, bound]`.
pub fn positive_rational(rng: &mut Rng8, bound: i64, max_den: i64) -> Rational {
    let q = rng.random_range(1..=max_den);
    let p = rng.random_range(1..=bound * q);
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn vector(rng: &mut Rng8, n: usize, bound: i64, max_den: i64, nonneg: bool) -> Vec<Rational> {
    (0..n)
        .map(|_| {
            if nonneg {
                nonneg_rational(rng, bound, max_den)
            } else {
                rational(rng, bound, max_den)
            }
        })
        .collect()
}

/// Symmetric matrix with independent entries in `[-bound, bound] ∩ ℚ`.
pub fn symmetric(rng: &mut Rng8, n: usize, bound: i64, max_den: i64) -> ExactMatrix {
    SymMatrix::from_fn(n, |_, _| rational(rng, bound, max_den))
}

/// Symmetric matrix of rank at most `r`: `Σ sⱼ uⱼuⱼᵀ` with signs `sⱼ = ±1`.
pub fn low_rank_symmetric(rng: &mut Rng8, n: usize, r: usize, bound: i64) -> ExactMatrix {
    let mut acc = ExactMatrix::zeros(n);
    for _ in 0..r {
        let u = vector(rng, n, bound, 3, false);
        let sign = if rng.random_bool(0.5) { int(1) } else { int(-1) };
        acc = acc.add(&ExactMatrix::outer(&u).scale(&sign)).expect("same order");
    }
    acc
}

/// A draw from `𝒫ₙˡ(I)`: the Gram matrix of `l` rational vectors, rescaled
/// into `I`. On `[0,R)` the vectors are entrywise nonnegative.
#[derive(Clone, Debug)]
pub struct GramDraw {
    pub vectors: Vec<Vec<Rational>>,
    pub divisor: Rational,
    pub matrix: ExactMatrix,
}

pub fn gram_in(rng: &mut Rng8, n: usize, l: usize, interval: &Interval) -> Result<GramDraw> {
    let nonneg = !interval.is_symmetric();
    let vectors: Vec<Vec<Rational>> = (0..l).map(|_| vector(rng, n, 3, 4, nonneg)).collect();
    gram_from(vectors, interval)
}

pub fn gram_from(vectors: Vec<Vec<Rational>>, interval: &Interval) -> Result<GramDraw> {
    let g = ExactMatrix::gram(&vectors)?;
    let (matrix, divisor) = interval.fit(&g);
    Ok(GramDraw { vectors, divisor, matrix })
}

/// Random PSD matrix of order `n` and rank at most `r` with small entries.
pub fn psd(rng: &mut Rng8, n: usize, r: usize) -> ExactMatrix {
    let vectors: Vec<Vec<Rational>> = (0..r).map(|_| vector(rng, n, 3, 3, false)).collect();
    ExactMatrix::gram(&vectors).expect("nonempty vectors")
}

/// `k` distinct positive rationals in increasing order.
pub fn increasing_positive(rng: &mut Rng8, k: usize, bound: i64, max_den: i64) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::with_capacity(k);
    while out.len() < k {
        let x = positive_rational(rng, bound, max_den);
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out.sort();
    out
}

/// A polynomial with `terms` nonzero coefficients at distinct exponents in `0..=max_exp`.
pub fn polynomial(
    rng: &mut Rng8,
    terms: usize,
    max_exp: u32,
    positive: bool,
    zero_constant: bool,
) -> crate::PowerSum {
    let lo = u32::from(zero_constant);
    let mut exps: Vec<u32> = Vec::new();
    while exps.len() < terms.min((max_exp + 1 - lo) as usize) {
        let e = rng.random_range(lo..=max_exp);
        if !exps.contains(&e) {
            exps.push(e);
        }
    }
    let mut coeffs = vec![Rational::from_integer(0.into()); max_exp as usize + 1];
    for e in exps {
        coeffs[e as usize] = loop {
            let c = if positive {
                positive_rational(rng, 5, 4)
            } else {
                rational(rng, 5, 4)
            };
            if c != Rational::from_integer(0.into()) {
                break c;
            }
        };
    }
    crate::PowerSum::polynomial(&coeffs)
}
