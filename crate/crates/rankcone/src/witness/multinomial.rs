use std::collections::HashSet;

use num_traits::{Signed, ToPrimitive};

use super::{assemble, Claim, Construction, RankRelation, WitnessBundle};
use crate::cone::Interval;
use crate::error::{Error, Result};
use crate::funcalg::PowerSum;
use crate::io::{qs, Q};
use crate::scalar::{binomial, int, Rational};
use crate::tol::Tolerances;
use crate::ExactMatrix;

/// Distinct exponent vectors `m₁, …, m_N ∈ ℤ≥0^l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiIndexSet {
    l: usize,
    indices: Vec<Vec<u32>>,
}

impl MultiIndexSet {
    pub fn new(l: usize, indices: Vec<Vec<u32>>) -> Result<Self> {
        if l == 0 {
            return Err(Error::Invalid("multi-indices need l >= 1".into()));
        }
        if indices.is_empty() {
            return Err(Error::Invalid("empty multi-index set".into()));
        }
        let mut seen = HashSet::new();
        for m in &indices {
            if m.len() != l {
                return Err(Error::Shape(format!("multi-index of length {} in dimension {l}", m.len())));
            }
            if !seen.insert(m.clone()) {
                return Err(Error::Invalid(format!("repeated multi-index {m:?}")));
            }
        }
        Ok(MultiIndexSet { l, indices })
    }

    /// All `m` with `|m| = degree`, in reverse lexicographic order.
    pub fn homogeneous(l: usize, degree: u32) -> Result<Self> {
        let mut out = Vec::new();
        compositions(l, degree, &mut Vec::new(), &mut out);
        Self::new(l, out)
    }

    /// The union of the homogeneous sets for each distinct degree in `degrees`.
    pub fn for_degrees(l: usize, degrees: &[u32]) -> Result<Self> {
        let mut ds = degrees.to_vec();
        ds.sort_unstable();
        ds.dedup();
        let mut out = Vec::new();
        for d in ds {
            compositions(l, d, &mut Vec::new(), &mut out);
        }
        Self::new(l, out)
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[Vec<u32>] {
        &self.indices
    }
}

fn compositions(l: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() + 1 == l {
        prefix.push(d);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=d).rev() {
        prefix.push(first);
        compositions(l, d - first, prefix, out);
        prefix.pop();
    }
}

/// `α` together with the dot products `αᵀmᵢ`, in the order of the set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PgvmAlpha {
    pub alpha: Vec<u64>,
    pub dots: Vec<u64>,
}

const DEFAULT_MAX_CAP: u64 = 1 << 16;

/// Lexicographically first `α ∈ [1, C]^l` with `α_{i+1} > rᵢ αᵢ` and pairwise
/// distinct `αᵀmᵢ`, for `C = 2, 4, 8, …`.
pub fn pgvm_alpha(mset: &MultiIndexSet, r: &[u64]) -> Result<PgvmAlpha> {
    pgvm_alpha_capped(mset, r, DEFAULT_MAX_CAP)
}

pub fn pgvm_alpha_capped(mset: &MultiIndexSet, r: &[u64], max_cap: u64) -> Result<PgvmAlpha> {
    let l = mset.l();
    if r.len() + 1 != l {
        return Err(Error::Shape(format!("growth vector has length {}, expected {}", r.len(), l - 1)));
    }
    let mut cap = 2u64;
    loop {
        let capped = cap.min(max_cap);
        let mut alpha = Vec::with_capacity(l);
        if let Some(found) = descend(mset, r, capped, &mut alpha) {
            return Ok(found);
        }
        if capped >= max_cap {
            return Err(Error::Capacity(format!("no admissible alpha within cap {max_cap}")));
        }
        cap *= 2;
    }
}

fn descend(mset: &MultiIndexSet, r: &[u64], cap: u64, alpha: &mut Vec<u64>) -> Option<PgvmAlpha> {
    let i = alpha.len();
    if i == mset.l() {
        let dots: Vec<u64> = mset
            .indices()
            .iter()
            .map(|m| m.iter().zip(alpha.iter()).map(|(&mj, &aj)| u64::from(mj) * aj).sum())
            .collect();
        let distinct: HashSet<u64> = dots.iter().copied().collect();
        return (distinct.len() == dots.len()).then(|| PgvmAlpha { alpha: alpha.clone(), dots });
    }
    let lo = if i == 0 { 1 } else { r[i - 1].checked_mul(alpha[i - 1])?.checked_add(1)? };
    for a in lo..=cap {
        alpha.push(a);
        let found = descend(mset, r, cap, alpha);
        alpha.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

/// `Σₜ C(iₜ + l − 1, l − 1)` over the exponents of `f`, the constant included.
pub fn target_rank(f: &PowerSum, l: usize) -> Result<u64> {
    if l == 0 {
        return Err(Error::Invalid("l must be at least 1".into()));
    }
    let mut total = 0u64;
    for e in f.integer_exponents()? {
        let c = binomial(u64::from(e) + l as u64 - 1, l as u64 - 1);
        total = c
            .to_u64()
            .and_then(|c| total.checked_add(c))
            .ok_or_else(|| Error::Capacity("binomial bound overflows u64".into()))?;
    }
    Ok(total)
}

/// Rank-`l` witness on nodes `1, …, n` attaining `target_rank(f, l)`.
pub fn multinomial_witness(f: &PowerSum, l: usize, n: usize, interval: &Interval, tol: &Tolerances) -> Result<WitnessBundle> {
    let v: Vec<Rational> = (1..=n as i64).map(int).collect();
    multinomial_with_nodes(f, l, &v, interval, tol)
}

pub fn multinomial_with_nodes(
    f: &PowerSum,
    l: usize,
    v: &[Rational],
    interval: &Interval,
    tol: &Tolerances,
) -> Result<WitnessBundle> {
    if !f.is_polynomial() {
        return Err(Error::Invalid("multinomial witnesses need a polynomial".into()));
    }
    let n = v.len();
    let target = target_rank(f, l)?;
    if target > n as u64 {
        return Err(Error::Invalid(format!("target rank {target} exceeds n = {n}")));
    }
    if v.iter().any(|x| !x.is_positive()) {
        return Err(Error::Invalid("nodes must be positive".into()));
    }
    let degrees = f.integer_exponents()?;
    let mset = if degrees.is_empty() {
        MultiIndexSet::homogeneous(l, 0)?
    } else {
        MultiIndexSet::for_degrees(l, &degrees)?
    };
    let found = pgvm_alpha(&mset, &vec![1; l - 1])?;
    let u: Vec<Vec<Rational>> = found
        .alpha
        .iter()
        .map(|&a| v.iter().map(|x| num_traits::pow(x.clone(), a as usize)).collect())
        .collect();
    let (a, divisor) = interval.fit(&ExactMatrix::gram(&u)?);
    let construction = Construction::Multinomial {
        l,
        alpha: found.alpha.clone(),
        dots: found.dots.clone(),
        v: qs(v),
        u: u.iter().map(|x| qs(x)).collect(),
        divisor: Q(divisor),
    };
    let target = usize::try_from(target).expect("bounded by n");
    assemble(
        a.into(),
        Some(f.clone().into()),
        Some(interval.clone()),
        construction,
        vec![Claim::new("target_rank", target)],
        Some((target, RankRelation::Exactly)),
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn alpha_examples() {
        let one = MultiIndexSet::new(1, vec![vec![0], vec![3], vec![5]]).unwrap();
        assert_eq!(pgvm_alpha(&one, &[]).unwrap().alpha, vec![1]);

        let quad = MultiIndexSet::for_degrees(2, &[0, 1, 2]).unwrap();
        assert_eq!(quad.len(), 6);
        let set = MultiIndexSet::new(
            2,
            vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]],
        )
        .unwrap();
        let found = pgvm_alpha(&set, &[1]).unwrap();
        assert_eq!(found.alpha, vec![1, 3]);
        assert_eq!(found.dots, vec![0, 1, 3, 2, 4, 6]);

        let single = MultiIndexSet::new(3, vec![vec![1, 2, 3]]).unwrap();
        assert_eq!(pgvm_alpha(&single, &[1, 1]).unwrap().alpha, vec![1, 2, 3]);
    }

    #[test]
    fn tiny_cap_is_a_capacity_error() {
        let set = MultiIndexSet::for_degrees(2, &[0, 1, 2]).unwrap();
        assert!(matches!(pgvm_alpha_capped(&set, &[1], 2), Err(Error::Capacity(_))));
    }

    #[test]
    fn sets_reject_duplicates_and_ragged_vectors() {
        assert!(MultiIndexSet::new(2, vec![vec![1, 0], vec![1, 0]]).is_err());
        assert!(MultiIndexSet::new(2, vec![vec![1]]).is_err());
    }

    #[test]
    fn witness_examples() {
        let iv = Interval::nonneg();
        let x = PowerSum::monomial(int(1), 1);
        assert_eq!(multinomial_witness(&x, 2, 3, &iv, &tol()).unwrap().claimed_rank, 2);
        let one = PowerSum::constant(int(1));
        assert_eq!(multinomial_witness(&one, 3, 3, &iv, &tol()).unwrap().claimed_rank, 1);
        let sq = PowerSum::monomial(int(1), 2);
        let w = multinomial_witness(&sq, 2, 4, &iv, &tol()).unwrap();
        assert_eq!(w.claimed_rank, 3);
        assert_eq!(w.matrix.rank(&tol()), 2);
    }

    #[test]
    fn bound_counts() {
        assert_eq!(target_rank(&PowerSum::from_i64_poly(&[1, 1]), 2).unwrap(), 3);
        assert_eq!(target_rank(&PowerSum::monomial(int(1), 5), 1).unwrap(), 1);
        assert_eq!(target_rank(&PowerSum::from_i64_poly(&[1, 1, 1]), 3).unwrap(), 10);
        assert!(multinomial_witness(&PowerSum::from_i64_poly(&[1, 1, 1]), 3, 8, &Interval::nonneg(), &tol()).is_err());
    }
}
