use num_traits::{Signed, Zero};

use super::{assemble, Claim, Construction, RankRelation, WitnessBundle};
use crate::cone::Interval;
use crate::error::{Error, Result};
use crate::funcalg::PowerSum;
use crate::io::{qs, Q};
use crate::matrix::Dense;
use crate::scalar::{int, Flavor, Rational, Scalar};
use crate::tol::Tolerances;
use crate::ExactMatrix;

/// `A = vvᵀ` with `v = (1, 2, …, n)` scaled into `interval`; `f[A]` has
/// rank equal to the number of terms of `f` on `(0, ∞)`.
pub fn vandermonde_rank1_witness(f: &PowerSum, n: usize, interval: &Interval, tol: &Tolerances) -> Result<WitnessBundle> {
    let v: Vec<Rational> = (1..=n as i64).map(int).collect();
    vandermonde_with_nodes(f, &v, interval, tol)
}

pub fn vandermonde_with_nodes(f: &PowerSum, v: &[Rational], interval: &Interval, tol: &Tolerances) -> Result<WitnessBundle> {
    let n = v.len();
    if n == 0 {
        return Err(Error::Invalid("no nodes".into()));
    }
    if v.iter().any(|x| !x.is_positive()) {
        return Err(Error::Invalid("nodes must be positive".into()));
    }
    let mut sorted = v.to_vec();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != n {
        return Err(Error::Invalid("nodes must be distinct".into()));
    }
    let g = f.restrict_positive();
    let k = g.num_terms();
    if k > n {
        return Err(Error::Invalid(format!("{k} terms exceed n = {n}")));
    }

    // columns v^{∘e} for every exponent present on (0, ∞)
    let mut exps: Vec<Rational> = Vec::new();
    if !g.constant_term().is_zero() {
        exps.push(Rational::zero());
    }
    exps.extend(g.terms().iter().map(|t| t.exponent.clone()));
    let independent = if g.has_integer_exponents() {
        let w = Dense::from_fn(n, k, |t, i| v[t].flavored_pow(&exps[i], Flavor::Plain).expect("integer exponent"));
        w.rank() == k
    } else {
        let w = Dense::from_fn(n, k, |t, i| {
            f64::from_rational(&v[t]).flavored_pow(&exps[i], Flavor::Plain).expect("positive node")
        });
        w.rank_with(tol) == k
    };
    super::require(independent, || "power vectors of the nodes are dependent".into())?;

    let (a, divisor) = interval.fit(&ExactMatrix::outer(v));
    let construction = Construction::Vandermonde { v: qs(v), divisor: Q(divisor) };
    assemble(
        a.into(),
        Some(f.clone().into()),
        Some(interval.clone()),
        construction,
        vec![Claim::new("terms", k), Claim::new("independent_columns", true)],
        Some((k, RankRelation::Exactly)),
        tol,
    )
}
