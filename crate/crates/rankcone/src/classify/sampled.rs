//! Necessary-condition tests on sampled functions.
//!
//! Sample points are always rational so that grid structure (uniform steps,
//! lattice points, exact geometric midpoints) is decided exactly; values
//! carry the scalar backend of the function.

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::Failure;
use crate::cone::Interval;
use crate::error::{Error, Result};
use crate::funcalg::{Function, PowerSum};
use crate::random::trial_rng;
use crate::scalar::{binomial, int, rational_to_f64, Backend, Rational, Scalar};
use crate::tol::Tolerances;
use crate::witness::continuity_limit_matrix;
use crate::SymMatrix;

/// `(x, f(x))` pairs with strictly increasing rational `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction<T> {
    xs: Vec<Rational>,
    ys: Vec<T>,
}

impl<T: Scalar> SampledFunction<T> {
    pub fn new(xs: Vec<Rational>, ys: Vec<T>, interval: Option<&Interval>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::Shape(format!("{} points but {} values", xs.len(), ys.len())));
        }
        if xs.is_empty() {
            return Err(Error::Invalid("empty sample".into()));
        }
        if xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("sample points must increase strictly".into()));
        }
        if let Some(iv) = interval {
            if let Some(x) = xs.iter().find(|x| !iv.contains(*x)) {
                return Err(Error::Domain(format!("sample point {x} outside {iv}")));
            }
        }
        Ok(SampledFunction { xs, ys })
    }

    /// Evaluates `f` at every point.
    pub fn sample(f: &Function, xs: Vec<Rational>, interval: Option<&Interval>) -> Result<Self> {
        let ys = xs.iter().map(|x| f.eval(&T::from_rational(x))).collect::<Result<Vec<_>>>()?;
        Self::new(xs, ys, interval)
    }

    pub fn xs(&self) -> &[Rational] {
        &self.xs
    }

    pub fn ys(&self) -> &[T] {
        &self.ys
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    fn position(&self, x: &Rational) -> Option<usize> {
        self.xs.binary_search(x).ok()
    }

    /// The common step of a uniform grid.
    fn step(&self) -> Result<Rational> {
        if self.len() < 2 {
            return Err(Error::Invalid("a uniform grid needs two points".into()));
        }
        let d = &self.xs[1] - &self.xs[0];
        if self.xs.windows(2).any(|w| w[1].clone() - &w[0] != d) {
            return Err(Error::Invalid("grid is not uniform".into()));
        }
        Ok(d)
    }
}

/// `lo + i·(hi − lo)/points` for `i = 0, …, points − 1`.
pub fn uniform_grid(lo: &Rational, hi: &Rational, points: usize) -> Vec<Rational> {
    let step = (hi - lo) / int(points as i64);
    (0..points).map(|i| lo + &step * int(i as i64)).collect()
}

/// `step·m` for `m = m0, …, m1`.
pub fn lattice_grid(step: &Rational, m0: i64, m1: i64) -> Vec<Rational> {
    (m0..=m1).map(|m| step * int(m)).collect()
}

/// `top·ρⁱ` for `i = 1, …, points`, in increasing order. For `0 < ρ < 1`
/// every pair with even index sum has its geometric mean on the grid.
pub fn geometric_grid(top: &Rational, rho: &Rational, points: usize) -> Vec<Rational> {
    let mut out: Vec<Rational> = (1..=points).map(|i| top * num_traits::pow(rho.clone(), i)).collect();
    out.sort();
    out
}

/// Outcome of a sampling test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub name: String,
    pub pass: bool,
    pub checks: u64,
    pub failures: Vec<Failure>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl TestReport {
    fn new(name: &str) -> Self {
        TestReport { name: name.into(), pass: true, checks: 0, failures: Vec::new(), notes: Vec::new() }
    }

    fn fail(&mut self, f: Failure) {
        self.pass = false;
        if self.failures.iter().filter(|x| x.check == f.check).count() < MAX_FAILURES {
            self.failures.push(f);
        }
    }

    fn absorb(&mut self, other: TestReport) {
        self.pass &= other.pass;
        self.checks += other.checks;
        self.failures.extend(other.failures);
        self.notes.extend(other.notes);
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            2
        }
    }
}

/// Failures kept per check name.
const MAX_FAILURES: usize = 10;

fn value_json<T: Scalar>(x: &T) -> Value {
    match T::BACKEND {
        Backend::Exact => json!(x.to_string()),
        Backend::Float => json!(x.to_f64()),
    }
}

/// `Δ^m_h f(x_i)` with `h = j·step`, from the samples.
fn difference<T: Scalar>(ys: &[T], i: usize, j: usize, m: u32) -> T {
    let mut acc = T::zero();
    for t in 0..=m {
        let c = T::from_rational(&Rational::from_integer(binomial(u64::from(m), u64::from(t))));
        let y = ys[i + (m - t) as usize * j].clone() * c;
        acc = if t % 2 == 0 { acc + y } else { acc - y };
    }
    acc
}

fn differences<T: Scalar>(f: &SampledFunction<T>, max_order: u32, tol: &Tolerances, skip_zero: bool) -> Result<TestReport> {
    let step = f.step()?;
    let start = usize::from(skip_zero && f.xs[0].is_zero());
    let mut report = TestReport::new("abs_monotone");
    let n = f.len();
    for m in 0..=max_order {
        let hs = if m == 0 { 1..2 } else { 1..n };
        for j in hs {
            for i in start..n {
                if i + m as usize * j >= n {
                    break;
                }
                report.checks += 1;
                let d = difference(&f.ys, i, j, m);
                if d.below_tolerance(tol.sample_atol) {
                    report.fail(Failure {
                        check: "forward_difference".into(),
                        params: json!({
                            "m": m,
                            "x": f.xs[i].to_string(),
                            "h": (&step * int(j as i64)).to_string(),
                        }),
                        value: value_json(&d),
                    });
                    return Ok(report);
                }
            }
        }
    }
    Ok(report)
}

/// `Δ^m_h f(x) ≥ 0` (up to `sample_atol` on floats) for all `m ≤ max_order`
/// and every grid triple with `x + m·h` on the grid. The grid must be
/// uniform and inside `[0, ∞)`; the first failure is reported.
pub fn abs_monotone_test<T: Scalar>(f: &SampledFunction<T>, max_order: u32, tol: &Tolerances) -> Result<TestReport> {
    if f.xs[0].is_negative() {
        return Err(Error::Domain("grid must lie in [0, R)".into()));
    }
    differences(f, max_order, tol, false)
}

/// [`abs_monotone_test`] on samples of a power sum: exact for integer
/// exponents, `f64` otherwise.
pub fn abs_monotone_power_sum(f: &PowerSum, max_order: u32, grid: &[Rational], tol: &Tolerances) -> Result<TestReport> {
    let func: Function = f.clone().into();
    if f.has_integer_exponents() {
        abs_monotone_test(&SampledFunction::<Rational>::sample(&func, grid.to_vec(), None)?, max_order, tol)
    } else {
        abs_monotone_test(&SampledFunction::<f64>::sample(&func, grid.to_vec(), None)?, max_order, tol)
    }
}

/// Exact square root of a nonnegative rational, when it exists.
fn rational_sqrt(q: &Rational) -> Option<Rational> {
    let (n, d) = (q.numer(), q.denom());
    if n.is_negative() {
        return None;
    }
    let (rn, rd): (BigInt, BigInt) = (n.sqrt(), d.sqrt());
    (&rn * &rn == *n && &rd * &rd == *d).then(|| Rational::new(rn, rd))
}

/// The two 2×2 necessary conditions on grid pairs: `f(√(xy))² ≤ f(x)f(y)`
/// for positive `x, y`, and `|f(x)| ≤ f(y)` whenever `|x| ≤ y`.
///
/// A geometric mean that is not itself a grid point is snapped to the
/// nearest one; such pairs are counted and the largest snap distance is
/// reported, but only exact midpoints are judged. Points outside
/// `interval` are ignored.
pub fn two_by_two_test<T: Scalar>(f: &SampledFunction<T>, interval: &Interval, tol: &Tolerances) -> TestReport {
    let mut report = TestReport::new("two_by_two");
    let idx: Vec<usize> = (0..f.len()).filter(|&i| interval.contains(&f.xs[i])).collect();
    if idx.len() < f.len() {
        report.notes.push(format!("{} points outside {interval} ignored", f.len() - idx.len()));
    }
    let positive: Vec<usize> = idx.iter().copied().filter(|&i| f.xs[i].is_positive()).collect();
    let (mut snapped, mut max_snap) = (0u64, 0f64);
    for (a, &i) in positive.iter().enumerate() {
        for &j in &positive[a + 1..] {
            let prod = &f.xs[i] * &f.xs[j];
            let mid = rational_sqrt(&prod).and_then(|m| f.position(&m));
            let Some(k) = mid else {
                let target = rational_to_f64(&prod).sqrt();
                let dist = f.xs.iter().map(|x| (rational_to_f64(x) - target).abs()).fold(f64::INFINITY, f64::min);
                snapped += 1;
                max_snap = max_snap.max(dist);
                continue;
            };
            report.checks += 1;
            let lhs = f.ys[k].clone() * f.ys[k].clone();
            let gap = f.ys[i].clone() * f.ys[j].clone() - lhs;
            if gap.below_tolerance(tol.sample_atol) {
                report.fail(Failure {
                    check: "midpoint_log_convexity".into(),
                    params: json!({ "x": f.xs[i].to_string(), "y": f.xs[j].to_string(), "mid": f.xs[k].to_string() }),
                    value: value_json(&gap),
                });
            }
        }
    }
    if snapped > 0 {
        report.notes.push(format!("{snapped} pairs without an exact grid midpoint; max snap distance {max_snap:e}"));
    }
    for &i in &idx {
        for &j in &idx {
            if f.xs[i].abs() > f.xs[j] {
                continue;
            }
            report.checks += 1;
            let gap = f.ys[j].clone() - f.ys[i].abs();
            if gap.below_tolerance(tol.sample_atol) {
                report.fail(Failure {
                    check: "monotone_domination".into(),
                    params: json!({ "x": f.xs[i].to_string(), "y": f.xs[j].to_string() }),
                    value: value_json(&gap),
                });
            }
        }
    }
    report
}

/// Draws for [`special_rank2_spot_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpotCheck {
    pub trials: u64,
    pub seed: u64,
}

impl Default for SpotCheck {
    fn default() -> Self {
        SpotCheck { trials: 200, seed: 0 }
    }
}

/// Lattice `δ·{m0, …, m1}` underlying the samples.
fn lattice<T: Scalar>(f: &SampledFunction<T>) -> Result<(Rational, i64)> {
    let step = f.step()?;
    let m0 = &f.xs[0] / &step;
    if !m0.is_integer() || m0.is_negative() {
        return Err(Error::Invalid("grid is not a lattice δ·{m0, …, m1} with m0 >= 0".into()));
    }
    let m0 = i64::try_from(m0.to_integer()).map_err(|_| Error::Capacity("lattice offset too large".into()))?;
    Ok((step, m0))
}

/// Applies the samples to special rank-2 matrices `a·1 + uuᵀ` of order `n`
/// whose entries are lattice points: `a = δp`, `u = √δ·t` with integers
/// `p ≥ m0` and `t ≥ 0`, so `aᵢⱼ = δ(p + tᵢtⱼ)`. Each image must be PSD.
pub fn special_rank2_spot_check<T: Scalar>(
    f: &SampledFunction<T>,
    n: usize,
    cfg: &SpotCheck,
    tol: &Tolerances,
) -> Result<TestReport> {
    let (step, m0) = lattice(f)?;
    let m1 = m0 + f.len() as i64 - 1;
    let mut report = TestReport::new("special_rank2_psd");
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, trial);
        let p = rng.random_range(m0..=m1);
        let tmax = (m1 - p).sqrt();
        let t: Vec<i64> = (0..n).map(|_| rng.random_range(0..=tmax)).collect();
        let image = SymMatrix::from_fn(n, |i, j| f.ys[(p + t[i] * t[j] - m0) as usize].clone());
        report.checks += 1;
        if !image.is_psd_with(tol) {
            report.fail(Failure {
                check: "special_rank2_psd".into(),
                params: json!({
                    "trial": trial,
                    "a": (&step * int(p)).to_string(),
                    "sqrt_step": step.to_string(),
                    "t": t,
                }),
                value: json!(false),
            });
            return Ok(report);
        }
    }
    Ok(report)
}

/// [`special_rank2_spot_check`], then forward differences of orders `0..n`
/// on the positive grid points.
pub fn loewner_necessary_test<T: Scalar>(
    f: &SampledFunction<T>,
    n: usize,
    cfg: &SpotCheck,
    tol: &Tolerances,
) -> Result<TestReport> {
    if n == 0 {
        return Err(Error::Invalid("n must be positive".into()));
    }
    let mut report = TestReport::new("loewner_necessary");
    report.absorb(special_rank2_spot_check(f, n, cfg, tol)?);
    report.absorb(differences(f, n as u32 - 1, tol, true)?);
    Ok(report)
}

/// PSD test of the 3×3 limit matrix built from `p = f(0⁺)` and `q = f(0)`,
/// whose determinant is `−p(p − q)²`.
pub fn continuity_limit_test(f: &PowerSum) -> TestReport {
    let p = f.right_limit_at_zero();
    let q = f.value_at_zero().clone();
    let m = continuity_limit_matrix(&p, &q);
    let mut report = TestReport::new("continuity_limit");
    report.checks = 1;
    if !m.is_psd() {
        report.fail(Failure {
            check: "continuity_limit_psd".into(),
            params: json!({ "right_limit": p.to_string(), "value": q.to_string() }),
            value: json!(m.det().to_string()),
        });
    }
    report
}
