//! Seeded verification sweeps. Trial `t` draws everything from stream `t`
//! of the master seed, so any row can be replayed on its own.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::classify::{classify, ClassifyOptions, Outcome};
use crate::cone::{cone_member, ConeSpec, Role};
use crate::error::{Error, Result};
use crate::funcalg::Function;
use crate::io::{AnyMatrix, Q};
use crate::random::{self, trial_rng, Rng8};
use crate::scalar::Rational;
use crate::tol::Tolerances;
use crate::witness::{canned, Canned};
use crate::{ExactMatrix, FloatMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepCheck {
    /// Draws from the source cone land in the target cone for a `Preserves` verdict.
    Soundness,
    /// `Violates` verdicts carry a witness that re-verifies.
    Sharpness,
    Schur,
    Eboyd,
    BlockSum,
    RankMinors,
    FloatExact,
    RankOneDivision,
}

impl SweepCheck {
    pub const ALL: [SweepCheck; 8] = [
        SweepCheck::Soundness,
        SweepCheck::Sharpness,
        SweepCheck::Schur,
        SweepCheck::Eboyd,
        SweepCheck::BlockSum,
        SweepCheck::RankMinors,
        SweepCheck::FloatExact,
        SweepCheck::RankOneDivision,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepCheck::Soundness => "soundness",
            SweepCheck::Sharpness => "sharpness",
            SweepCheck::Schur => "schur",
            SweepCheck::Eboyd => "eboyd",
            SweepCheck::BlockSum => "block-sum",
            SweepCheck::RankMinors => "rank-minors",
            SweepCheck::FloatExact => "float-exact",
            SweepCheck::RankOneDivision => "rank-one-division",
        }
    }

    /// Whether the check needs a function and a cone spec.
    pub fn needs_spec(self) -> bool {
        matches!(self, SweepCheck::Soundness | SweepCheck::Sharpness)
    }
}

impl fmt::Display for SweepCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepCheck {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepCheck::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown sweep check {s:?}")))
    }
}

/// One CSV row: `trial, seed, check, pass, detail`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub trial: u64,
    pub seed: u64,
    pub check: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub check: SweepCheck,
    pub trials: u64,
    pub seed: u64,
    /// Matrix order for the matrix-only checks.
    pub n: usize,
    pub function: Option<Function>,
    pub spec: Option<ConeSpec>,
    pub tol: Tolerances,
}

impl SweepConfig {
    pub fn new(check: SweepCheck, trials: u64, seed: u64) -> Self {
        SweepConfig { check, trials, seed, n: 5, function: None, spec: None, tol: Tolerances::default() }
    }
}

pub fn all_pass(rows: &[SweepRow]) -> bool {
    rows.iter().all(|r| r.pass)
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    if cfg.trials == 0 {
        return Err(Error::Invalid("a sweep needs at least one trial".into()));
    }
    if cfg.n == 0 {
        return Err(Error::Invalid("matrix order must be positive".into()));
    }
    let mut rows = Vec::with_capacity(cfg.trials as usize);
    match cfg.check {
        SweepCheck::Soundness | SweepCheck::Sharpness => {
            let (f, spec) = match (&cfg.function, &cfg.spec) {
                (Some(f), Some(s)) => (f, s),
                _ => return Err(Error::Invalid(format!("the {} sweep needs a function and a cone", cfg.check))),
            };
            let opts = ClassifyOptions { tol: cfg.tol, seed: cfg.seed, ..ClassifyOptions::default() };
            let verdict = classify(f, spec, &opts)?;
            for trial in 0..cfg.trials {
                let mut rng = trial_rng(cfg.seed, trial);
                let (pass, detail) = if cfg.check == SweepCheck::Soundness {
                    soundness_trial(&mut rng, f, spec, verdict.outcome, &cfg.tol)?
                } else {
                    sharpness_trial(trial, f, spec, &opts)?
                };
                rows.push(row(cfg, trial, pass, detail));
            }
        }
        _ => {
            for trial in 0..cfg.trials {
                let mut rng = trial_rng(cfg.seed, trial);
                let (pass, detail) = matrix_trial(cfg.check, &mut rng, cfg.n, &cfg.tol)?;
                rows.push(row(cfg, trial, pass, detail));
            }
        }
    }
    Ok(rows)
}

fn row(cfg: &SweepConfig, trial: u64, pass: bool, detail: String) -> SweepRow {
    SweepRow { trial, seed: cfg.seed, check: cfg.check.name().into(), pass, detail }
}

fn soundness_trial(
    rng: &mut Rng8,
    f: &Function,
    spec: &ConeSpec,
    outcome: Outcome,
    tol: &Tolerances,
) -> Result<(bool, String)> {
    if outcome != Outcome::Preserves {
        return Err(Error::Invalid(format!("soundness needs a preserves verdict, got {outcome:?}")));
    }
    let draw = random::gram_in(rng, spec.n, spec.l, &spec.interval)?;
    let m = match f.apply_any(&draw.matrix)? {
        AnyMatrix::Exact(a) => cone_member(&a, spec, Role::Target, tol),
        AnyMatrix::Float(a) => cone_member(&a, spec, Role::Target, tol),
    };
    let detail = if m.member { format!("divisor {}", draw.divisor) } else { m.detail };
    Ok((m.member, detail))
}

fn sharpness_trial(trial: u64, f: &Function, spec: &ConeSpec, opts: &ClassifyOptions) -> Result<(bool, String)> {
    // each trial reruns the witness search from its own stream
    let opts = ClassifyOptions { seed: opts.seed.wrapping_add(trial), ..opts.clone() };
    let v = classify(f, spec, &opts)?;
    if v.outcome != Outcome::Violates {
        return Err(Error::Invalid(format!("sharpness needs a violates verdict, got {:?}", v.outcome)));
    }
    let w = v.witness.as_ref().ok_or_else(|| Error::Verification("violates verdict without witness".into()))?;
    let ok = w.verify(&opts.tol).is_ok() && w.violates(spec, &opts.tol)?.is_some();
    Ok((ok, format!("{} witness, rank {}", w.construction.kind(), w.subject().rank(&opts.tol))))
}

fn order(rng: &mut Rng8, max: usize) -> usize {
    rng.random_range(1..=max)
}

fn matrix_trial(check: SweepCheck, rng: &mut Rng8, n: usize, tol: &Tolerances) -> Result<(bool, String)> {
    Ok(match check {
        SweepCheck::Schur => {
            let (ra, rb) = (order(rng, n), order(rng, n));
            let a = random::psd(rng, n, ra);
            let b = random::psd(rng, n, rb);
            let psd = a.hadamard(&b)?.is_psd();
            (psd, format!("ranks {} and {}", a.rank(), b.rank()))
        }
        SweepCheck::Eboyd => {
            let size = order(rng, n.min(4));
            let r = order(rng, size);
            let b = random::psd(rng, size, r);
            let c = random::rational(rng, 3, 4);
            let extra = order(rng, 2);
            let bundle = canned(&Canned::Bordered { b: rows_q(&b), c: Q(c.clone()), m: extra }, tol);
            let detail = match &bundle {
                Ok(w) => format!("c = {c}, criterion {}", w.claim("schur_criterion").cloned().unwrap_or_default()),
                Err(e) => e.to_string(),
            };
            (bundle.is_ok(), detail)
        }
        SweepCheck::BlockSum => {
            let size = order(rng, n.min(3));
            let blocks: Vec<ExactMatrix> = (0..3)
                .map(|_| {
                    let r = order(rng, size);
                    random::psd(rng, size, r)
                })
                .collect();
            let c = Canned::BlockSum { a: rows_q(&blocks[0]), b: rows_q(&blocks[1]), c: rows_q(&blocks[2]) };
            let bundle = canned(&c, tol);
            let detail = match &bundle {
                Ok(w) => format!("rank {}", w.claimed_rank),
                Err(e) => e.to_string(),
            };
            (bundle.is_ok(), detail)
        }
        SweepCheck::RankMinors => {
            let size = order(rng, n.min(6));
            let r = order(rng, size);
            let a = if rng.random_bool(0.5) {
                random::symmetric(rng, size, 5, 3)
            } else {
                random::low_rank_symmetric(rng, size, r, 2)
            };
            let rank = a.rank();
            let mut ok = true;
            for r in 1..=size {
                let full = a.minors_rank_test(r, false)?;
                let principal = a.minors_rank_test(r, true)?;
                ok &= full == principal && full == (rank <= r);
            }
            (ok, format!("order {size}, rank {rank}"))
        }
        SweepCheck::FloatExact => {
            let size = order(rng, n.min(8));
            let r = order(rng, size);
            let a = if rng.random_bool(0.5) {
                random::symmetric(rng, size, 10, 4)
            } else {
                random::low_rank_symmetric(rng, size, r, 3)
            };
            let fl: FloatMatrix = a.to_float();
            let (re, rf) = (a.rank(), fl.rank_with(tol));
            (re == rf, format!("exact rank {re}, float rank {rf}"))
        }
        SweepCheck::RankOneDivision => {
            let size = order(rng, n.min(6));
            let r = order(rng, size);
            let a = random::low_rank_symmetric(rng, size, r, 3);
            let v: Vec<Rational> = (0..size)
                .map(|_| loop {
                    let x = random::rational(rng, 4, 3);
                    if !x.is_zero() {
                        break x;
                    }
                })
                .collect();
            let prod = a.hadamard(&ExactMatrix::outer(&v))?;
            let (ra, rp) = (a.rank(), prod.rank());
            (ra == rp, format!("rank {ra} before, {rp} after"))
        }
        SweepCheck::Soundness | SweepCheck::Sharpness => unreachable!("handled by run_sweep"),
    })
}

fn rows_q(m: &ExactMatrix) -> Vec<Vec<Q>> {
    m.rows().into_iter().map(|r| r.into_iter().map(Q).collect()).collect()
}

/// CSV schema version written in the header row.
pub const CSV_SCHEMA: &str = "v1";

/// The fixed column order of sweep CSV files.
pub const CSV_COLUMNS: [&str; 6] = ["schema", "trial", "seed", "check", "pass", "detail"];
