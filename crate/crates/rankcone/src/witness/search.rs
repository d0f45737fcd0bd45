use num_bigint::BigInt;
use num_traits::Signed;
use rand::Rng;

use super::{assemble, Claim, Construction, RankRelation, WitnessBundle};
use crate::cone::Interval;
use crate::error::{Error, Result};
use crate::funcalg::PowerSum;
use crate::io::{qs, Q};
use crate::random::{trial_rng, Rng8};
use crate::scalar::{rat, Rational};
use crate::tol::Tolerances;
use crate::AnyMatrix;

const GRID_BITS: u32 = 16;

/// Parameters of a seeded search for `u` with `f[a·1 + uuᵀ]` nonsingular.
#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub function: PowerSum,
    pub a: Rational,
    pub n: usize,
    pub eps: Rational,
    pub seed: u64,
    pub max_trials: u64,
    pub interval: Interval,
    pub tol: Tolerances,
}

impl SearchConfig {
    pub fn new(function: PowerSum, a: Rational, n: usize, eps: Rational, seed: u64) -> Self {
        SearchConfig {
            function,
            a,
            n,
            eps,
            seed,
            max_trials: 1000,
            interval: Interval::nonneg(),
            tol: Tolerances::default(),
        }
    }
}

/// What a search ended with: the witness, if any, and the largest rank seen.
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub witness: Option<WitnessBundle>,
    pub trials: u64,
    pub max_rank: usize,
    pub eps: Rational,
}

fn draw(rng: &mut Rng8, n: usize, eps: &Rational) -> Vec<Rational> {
    let half = 1i64 << GRID_BITS;
    (0..n)
        .map(|_| eps * Rational::new(BigInt::from(rng.random_range(1 - half..half)), BigInt::from(half)))
        .collect()
}

fn check_range(a: &Rational, eps: &Rational, interval: &Interval) -> Result<()> {
    if !eps.is_positive() {
        return Err(Error::Invalid("eps must be positive".into()));
    }
    let e2 = eps * eps;
    for x in [a - &e2, a + &e2] {
        if !interval.contains(&x) {
            return Err(Error::Domain(format!("a ± eps² = {x} leaves {interval}")));
        }
    }
    Ok(())
}

/// `|det| > det_rtol · max|entry|ⁿ`, the float nonsingularity criterion.
fn clearly_nonsingular(m: &AnyMatrix, tol: &Tolerances) -> bool {
    match m {
        AnyMatrix::Exact(_) => true,
        AnyMatrix::Float(f) => {
            let scale = f.max_abs().powi(f.n() as i32);
            f.det().abs() > tol.det_rtol * scale
        }
    }
}

enum Draw {
    Full(Box<WitnessBundle>),
    NearSingular(usize),
    Deficient(usize),
}

#[allow(clippy::too_many_arguments)]
fn evaluate(
    f: &PowerSum,
    a: &Rational,
    n: usize,
    eps: &Rational,
    seed: u64,
    trial: u64,
    interval: &Interval,
    tol: &Tolerances,
) -> Result<Draw> {
    let u = draw(&mut trial_rng(seed, trial), n, eps);
    let m = super::special_rank2_matrix(a, &u);
    let image = f.apply_any(&m)?;
    let r = image.rank(tol);
    if r < n {
        return Ok(Draw::Deficient(r));
    }
    if !clearly_nonsingular(&image, tol) {
        return Ok(Draw::NearSingular(r));
    }
    let construction = Construction::Search { a: Q(a.clone()), eps: Q(eps.clone()), seed, trial, u: qs(&u) };
    let claims = vec![Claim::new("nonsingular", true)];
    let w = assemble(
        m.into(),
        Some(f.clone().into()),
        Some(interval.clone()),
        construction,
        claims,
        Some((n, RankRelation::Exactly)),
        tol,
    )?;
    Ok(Draw::Full(Box::new(w)))
}

/// The draw of trial `trial`, if it is a full-rank witness.
#[allow(clippy::too_many_arguments)]
pub fn search_candidate(
    f: &PowerSum,
    a: &Rational,
    n: usize,
    eps: &Rational,
    seed: u64,
    trial: u64,
    interval: &Interval,
    tol: &Tolerances,
) -> Result<Option<WitnessBundle>> {
    check_range(a, eps, interval)?;
    match evaluate(f, a, n, eps, seed, trial, interval, tol)? {
        Draw::Full(w) => Ok(Some(*w)),
        _ => Ok(None),
    }
}

/// Samples `u ∈ (−eps, eps)ⁿ` on a dyadic grid until `f[a·1 + uuᵀ]` has
/// rank `n`. On the float backend, if most draws were full rank but failed
/// the determinant threshold, the search reruns once with `eps / 2`.
pub fn full_rank_search(cfg: &SearchConfig) -> Result<SearchOutcome> {
    if cfg.n == 0 {
        return Err(Error::Invalid("n must be positive".into()));
    }
    let mut eps = cfg.eps.clone();
    let mut max_rank = 0;
    let mut total = 0;
    for pass in 0..2 {
        check_range(&cfg.a, &eps, &cfg.interval)?;
        let mut near = 0u64;
        for trial in 0..cfg.max_trials {
            total += 1;
            match evaluate(&cfg.function, &cfg.a, cfg.n, &eps, cfg.seed, trial, &cfg.interval, &cfg.tol)? {
                Draw::Full(w) => {
                    return Ok(SearchOutcome { witness: Some(*w), trials: total, max_rank: cfg.n, eps });
                }
                Draw::NearSingular(r) => {
                    near += 1;
                    max_rank = max_rank.max(r);
                }
                Draw::Deficient(r) => max_rank = max_rank.max(r),
            }
        }
        if pass == 1 || 2 * near <= cfg.max_trials {
            break;
        }
        eps = &eps * rat(1, 2);
    }
    Ok(SearchOutcome { witness: None, trials: total, max_rank, eps })
}

impl SearchOutcome {
    pub fn found(&self) -> bool {
        self.witness.is_some()
    }
}
