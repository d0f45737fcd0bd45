//! Deciders for whether `f[−]` maps `𝒫ₙˡ(I)` into `ℛₙᵏ` or `𝒫ₙᵏ`.
//!
//! A verdict is `Violates` only with a re-verified witness attached and
//! `Preserves` only when a sufficient condition is met exactly; everything
//! else is `Undetermined`, naming the regime that blocked a decision.

mod sampled;

pub use sampled::{
    abs_monotone_power_sum, abs_monotone_test, continuity_limit_test, geometric_grid, lattice_grid,
    loewner_necessary_test, special_rank2_spot_check, two_by_two_test, uniform_grid, SampledFunction,
    SpotCheck, TestReport,
};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cone::{cone_member, ConeSpec, Interval, MembershipCheck, Role};
use crate::error::{Error, Result};
use crate::funcalg::{Function, Piecewise, PowerSum};
use crate::random::{gram_in, trial_rng};
use crate::scalar::{int, rat, Rational};
use crate::tol::Tolerances;
use crate::witness::{
    canned_with, full_rank_search, gram_witness, multinomial_witness, target_rank, vandermonde_rank1_witness,
    Canned, SearchConfig, WitnessBundle,
};
use crate::AnyMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Preserves,
    Violates,
    Undetermined,
}

impl Outcome {
    /// 0, 2 and 3 respectively.
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Preserves => 0,
            Outcome::Violates => 2,
            Outcome::Undetermined => 3,
        }
    }
}

/// One failed check: what was tested, with which parameters, and what came out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub check: String,
    pub params: Value,
    pub value: Value,
}

/// Serializes as the report `{verdict, clause, witness?, failures, notes}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    #[serde(rename = "verdict")]
    pub outcome: Outcome,
    pub clause: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessBundle>,
    #[serde(default)]
    pub failures: Vec<Failure>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl Verdict {
    fn preserves(clause: &str, note: String) -> Self {
        Verdict { outcome: Outcome::Preserves, clause: clause.into(), witness: None, failures: vec![], notes: vec![note] }
    }

    fn undetermined(clause: &str, note: String) -> Self {
        Verdict { outcome: Outcome::Undetermined, clause: clause.into(), witness: None, failures: vec![], notes: vec![note] }
    }

    fn violates(clause: &str, found: Found) -> Self {
        Verdict {
            outcome: Outcome::Violates,
            clause: clause.into(),
            witness: Some(found.witness),
            failures: vec![found.failure],
            notes: vec![format!("witness from {}", found.source)],
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.outcome.exit_code()
    }

    pub fn report(&self) -> Value {
        serde_json::to_value(self).expect("verdicts serialize")
    }

    fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }
}

/// Knobs for the witness searches behind `Violates` verdicts.
#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    pub tol: Tolerances,
    pub seed: u64,
    /// Random Gram draws from the source cone.
    pub gram_trials: u64,
    /// Draws of the special rank-2 full-rank search.
    pub search_trials: u64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { tol: Tolerances::default(), seed: 0, gram_trials: 64, search_trials: 300 }
    }
}

/// `Σₜ C(iₜ + l − 1, l − 1)` over the exponents of a polynomial.
pub fn min_guaranteed_rank(f: &PowerSum, l: usize) -> Result<u64> {
    target_rank(f, l)
}

struct Found {
    witness: WitnessBundle,
    failure: Failure,
    source: &'static str,
}

/// Re-verifies `w` and keeps it when its image leaves the target cone.
fn confirm(w: WitnessBundle, spec: &ConeSpec, tol: &Tolerances, source: &'static str) -> Option<Found> {
    if w.matrix.n() != spec.n || w.verify(tol).is_err() {
        return None;
    }
    let image = w.image.as_ref()?;
    let m = match image {
        AnyMatrix::Exact(a) => cone_member(a, spec, Role::Target, tol),
        AnyMatrix::Float(a) => cone_member(a, spec, Role::Target, tol),
    };
    w.violates(spec, tol).ok()??;
    let check = match m.failed? {
        MembershipCheck::Rank => "target_rank",
        MembershipCheck::Psd => "target_psd",
        MembershipCheck::Order => "target_order",
        MembershipCheck::Entries => "target_entries",
    };
    let failure = Failure {
        check: check.into(),
        params: json!({ "n": spec.n, "k": spec.k, "positive": spec.positive }),
        value: json!({ "rank": image.rank(tol), "psd": image.is_psd(tol), "detail": m.detail }),
    };
    Some(Found { witness: w, failure, source })
}

fn attempt(
    built: Result<WitnessBundle>,
    spec: &ConeSpec,
    tol: &Tolerances,
    source: &'static str,
) -> Option<Found> {
    built.ok().and_then(|w| confirm(w, spec, tol, source))
}

/// Node vectors for rank-one Gram candidates.
fn node_sets(n: usize, symmetric: bool) -> Vec<Vec<Rational>> {
    let pos: Vec<Rational> = (1..=n as i64).map(int).collect();
    let signed: Vec<Rational> = (1..=n as i64).map(|i| if i % 2 == 1 { int((i + 1) / 2) } else { int(-(i / 2)) }).collect();
    let with_zero = |v: &[Rational]| std::iter::once(Rational::zero()).chain(v[..n - 1].iter().cloned()).collect();
    let mut out = vec![pos.clone(), with_zero(&pos)];
    if symmetric {
        out.push(signed.clone());
        out.push(with_zero(&signed));
    }
    out
}

fn rank_one_candidates(f: &Function, spec: &ConeSpec, tol: &Tolerances) -> Option<Found> {
    if let Function::Power(p) = f {
        if !spec.interval.is_symmetric() && !p.has_zero_exponent_flavors() {
            let w = vandermonde_rank1_witness(p, spec.n, &spec.interval, tol);
            if let Some(x) = attempt(w, spec, tol, "vandermonde rank-one matrix") {
                return Some(x);
            }
        }
    }
    node_sets(spec.n, spec.interval.is_symmetric()).into_iter().find_map(|v| {
        attempt(gram_witness(&[v], Some(f.clone()), &spec.interval, tol), spec, tol, "rank-one Gram matrix")
    })
}

fn random_gram(f: &Function, spec: &ConeSpec, opts: &ClassifyOptions) -> Option<Found> {
    (0..opts.gram_trials).find_map(|t| {
        let draw = gram_in(&mut trial_rng(opts.seed, t), spec.n, spec.l, &spec.interval).ok()?;
        attempt(gram_witness(&draw.vectors, Some(f.clone()), &spec.interval, &opts.tol), spec, &opts.tol, "random Gram draw")
    })
}

/// Canned matrices with negative entries, usable on `(−R, R)` only.
fn two_sided_canned(f: &Function, spec: &ConeSpec, tol: &Tolerances) -> Option<(Found, &'static str)> {
    if !spec.interval.is_symmetric() || spec.l < 2 {
        return None;
    }
    let iv = Some(&spec.interval);
    let mut tries: Vec<(Canned, &'static str, &'static str)> = Vec::new();
    if spec.l < spec.n {
        tries.push((Canned::Padding { l: spec.l, n: spec.n }, "phi1-rank-doubling", "A4/A6 padding"));
    }
    if spec.n >= 4 {
        tries.push((Canned::Cosine { n: spec.n }, "cosine-psi2", "cosine matrix B4"));
    }
    if spec.n >= 3 {
        let x0 = spec.interval.finite_radius().map_or(rat(-1, 4), |r| -r / int(4));
        tries.push((Canned::BX0 { x0: crate::io::Q(x0), n: spec.n }, "two-sided-rank-two", "B(x0)"));
    }
    tries.into_iter().find_map(|(c, clause, source)| {
        attempt(canned_with(&c, Some(f.clone()), iv, tol), spec, tol, source).map(|x| (x, clause))
    })
}

fn special_search(f: &PowerSum, spec: &ConeSpec, opts: &ClassifyOptions) -> Option<Found> {
    if spec.l < 2 || spec.k >= spec.n {
        return None;
    }
    let a = spec.interval.finite_radius().map_or(int(1), |r| r / int(2));
    let mut eps = Rational::one();
    while &eps * &eps * int(2) > a {
        eps /= int(2);
    }
    let mut cfg = SearchConfig::new(f.clone(), a, spec.n, eps, opts.seed);
    cfg.max_trials = opts.search_trials;
    cfg.interval = spec.interval.clone();
    cfg.tol = opts.tol;
    let out = full_rank_search(&cfg).ok()?;
    out.witness.and_then(|w| confirm(w, spec, &opts.tol, "special rank-two search"))
}

fn effective(f: &PowerSum, interval: &Interval) -> PowerSum {
    if interval.is_symmetric() {
        f.clone()
    } else {
        f.restrict_nonneg()
    }
}

fn check_domain(f: &PowerSum, interval: &Interval) -> Result<()> {
    if interval.is_symmetric() && f.has_plain_fractional() {
        return Err(Error::Domain(format!("plain non-integer powers are undefined on {interval}")));
    }
    Ok(())
}

/// Decides a power sum or piecewise function against `spec`.
pub fn classify(f: &Function, spec: &ConeSpec, opts: &ClassifyOptions) -> Result<Verdict> {
    match f {
        Function::Power(p) => classify_power(p, spec, opts),
        Function::Piecewise(pw) => classify_piecewise(pw, spec, opts),
    }
}

fn classify_power(f: &PowerSum, spec: &ConeSpec, opts: &ClassifyOptions) -> Result<Verdict> {
    check_domain(f, &spec.interval)?;
    let g = effective(f, &spec.interval);
    if g.is_zero() {
        return Ok(Verdict::preserves("zero-map", format!("f vanishes on {}", spec.interval)));
    }
    if spec.k == spec.n {
        return full_target(f, &g, spec, opts);
    }
    if spec.l == 1 {
        classify_rank1(f, spec, opts)
    } else {
        classify_general(f, spec, opts)
    }
}

/// `k = n`: the rank bound is vacuous and only positivity can fail.
fn full_target(f: &PowerSum, g: &PowerSum, spec: &ConeSpec, opts: &ClassifyOptions) -> Result<Verdict> {
    if !spec.positive {
        return Ok(Verdict::preserves("full-target", format!("every symmetric {0}x{0} matrix has rank <= {0}", spec.n)));
    }
    if g.coefficients_nonneg() {
        if spec.l == 1 {
            return Ok(Verdict::preserves("rank-one-power-sum", "each nonnegative term maps vvᵀ to a PSD rank-one matrix".into()));
        }
        if g.is_polynomial() {
            return Ok(Verdict::preserves("schur-product", "polynomial with nonnegative coefficients".into()));
        }
    }
    let func: Function = f.clone().into();
    if let Some(x) = rank_one_candidates(&func, spec, &opts.tol) {
        return Ok(Verdict::violates("full-target-positivity", x));
    }
    if let Some((x, _)) = two_sided_canned(&func, spec, &opts.tol) {
        return Ok(Verdict::violates("full-target-positivity", x));
    }
    if let Some(x) = random_gram(&func, spec, opts) {
        return Ok(Verdict::violates("full-target-positivity", x));
    }
    Ok(Verdict::undetermined("full-target-positivity", "no positivity witness found".into()))
}

/// Rank-one sources: `f[vvᵀ]` is a sum of one rank-one matrix per term.
pub fn classify_rank1(f: &PowerSum, spec: &ConeSpec, opts: &ClassifyOptions) -> Result<Verdict> {
    if spec.l != 1 {
        return Err(Error::Invalid(format!("classify_rank1 needs l = 1, got {}", spec.l)));
    }
    if spec.k >= spec.n {
        return Err(Error::Invalid(format!("classify_rank1 needs k < n, got k = {} and n = {}", spec.k, spec.n)));
    }
    check_domain(f, &spec.interval)?;
    let g = effective(f, &spec.interval);
    let terms = g.num_terms();
    let signs_ok = !spec.positive || g.coefficients_nonneg();
    if terms <= spec.k && signs_ok {
        return Ok(Verdict::preserves("rank-one-power-sum", format!("{terms} terms on {}, at most k = {}", spec.interval, spec.k)));
    }
    let why = if terms > spec.k {
        format!("{terms} terms exceed k = {}", spec.k)
    } else {
        "a coefficient is negative".to_string()
    };
    let func: Function = f.clone().into();
    if let Some(x) = rank_one_candidates(&func, spec, &opts.tol) {
        return Ok(Verdict::violates("rank-one-power-sum", x).note(why));
    }
    Ok(Verdict::undetermined("rank-one-power-sum", format!("{why}, but no witness was found at n = {}", spec.n)))
}

/// Sources of rank `l ≥ 2`.
pub fn classify_general(f: &PowerSum, spec: &ConeSpec, opts: &ClassifyOptions) -> Result<Verdict> {
    if spec.l < 2 {
        return Err(Error::Invalid("rank-one sources go through classify_rank1".into()));
    }
    check_domain(f, &spec.interval)?;
    let g = effective(f, &spec.interval);
    let func: Function = f.clone().into();
    let tol = &opts.tol;

    if g.is_polynomial() {
        let bound = target_rank(&g, spec.l)?;
        let signs_ok = !spec.positive || g.coefficients_nonneg();
        if bound <= spec.k as u64 && signs_ok {
            return Ok(Verdict::preserves(
                "binomial-rank-bound",
                format!("sum of C(i+l-1, l-1) over exponents is {bound}, at most k = {}", spec.k),
            ));
        }
        if bound > spec.k as u64 && bound <= spec.n as u64 {
            let w = multinomial_witness(&g, spec.l, spec.n, &spec.interval, tol);
            if let Some(x) = attempt(w, spec, tol, "multinomial Gram matrix") {
                return Ok(Verdict::violates("binomial-rank-bound", x).note(format!("bound {bound} exceeds k = {}", spec.k)));
            }
        }
    }
    if let Some(x) = rank_one_candidates(&func, spec, tol) {
        return Ok(Verdict::violates(regime_clause(spec), x));
    }
    if let Some((x, clause)) = two_sided_canned(&func, spec, tol) {
        return Ok(Verdict::violates(clause, x));
    }
    if !g.is_polynomial() {
        if let Some(x) = special_search(f, spec, opts) {
            return Ok(Verdict::violates("special-rank-two-full-rank", x));
        }
    }
    if let Some(x) = random_gram(&func, spec, opts) {
        return Ok(Verdict::violates(regime_clause(spec), x));
    }

    if g.has_zero_exponent_flavors() {
        return Ok(Verdict::undetermined("discontinuous-at-origin", "a zero-exponent flavor jumps at 0".into()));
    }
    let mut v = Verdict::undetermined(regime_clause(spec), format!("no witness found at n = {}", spec.n));
    if spec.interval.is_symmetric() {
        let rough = g.terms().iter().any(|t| t.flavor != crate::Flavor::Plain && t.exponent < int(spec.k as i64));
        if rough {
            v = v.note(format!("a flavored exponent below k = {} leaves the smoothness hypothesis unmet", spec.k));
        }
    }
    Ok(v)
}

fn regime_clause(spec: &ConeSpec) -> &'static str {
    if spec.k < spec.l {
        "constant-only"
    } else if spec.k < 2 * spec.l {
        "affine-only"
    } else {
        "binomial-rank-bound"
    }
}

/// Pieces of `f` whose domain meets `interval`.
fn pieces_on<'a>(f: &'a Piecewise, interval: &Interval) -> Vec<&'a PowerSum> {
    let lo = if interval.is_symmetric() { interval.finite_radius().map(|r| -r) } else { Some(Rational::zero()) };
    let hi = interval.finite_radius().cloned();
    let ps = f.pieces();
    ps.iter()
        .enumerate()
        .filter(|(i, p)| {
            let end = ps.get(i + 1).and_then(|q| q.from.clone());
            let starts_before = match (&p.from, &hi) {
                (Some(s), Some(h)) => s < h,
                _ => true,
            };
            let ends_after = match (end, &lo) {
                (Some(e), Some(l)) => e > *l,
                _ => true,
            };
            starts_before && ends_after
        })
        .map(|(_, p)| &p.function)
        .collect()
}

fn classify_piecewise(f: &Piecewise, spec: &ConeSpec, opts: &ClassifyOptions) -> Result<Verdict> {
    let live = pieces_on(f, &spec.interval);
    if live.iter().all(|p| p.is_zero()) {
        return Ok(Verdict::preserves("zero-map", format!("f vanishes on {}", spec.interval)));
    }
    if live.len() == 1 {
        return classify_power(live[0], spec, opts).map(|v| v.note("f agrees with a single power sum on the interval"));
    }
    if spec.interval.is_symmetric() && spec.l == 2 && spec.k + 1 == spec.n && spec.k % 2 == 0 {
        if let Some(r) = spec.interval.finite_radius() {
            if f.vanishes_on(&(-r / int(2)), Some(r)) {
                return Ok(Verdict::undetermined(
                    "two-sided-even-corank-one-gap",
                    format!("f vanishes on [-R/2, R); only n = 3 is settled and here n = {}", spec.n),
                ));
            }
        }
    }
    let func = Function::Piecewise(f.clone());
    if spec.k == spec.n && !spec.positive {
        return Ok(Verdict::preserves("full-target", format!("every symmetric {0}x{0} matrix has rank <= {0}", spec.n)));
    }
    if let Some(x) = rank_one_candidates(&func, spec, &opts.tol) {
        return Ok(Verdict::violates(regime_clause(spec), x));
    }
    if let Some((x, clause)) = two_sided_canned(&func, spec, &opts.tol) {
        return Ok(Verdict::violates(clause, x));
    }
    if let Some(x) = random_gram(&func, spec, opts) {
        return Ok(Verdict::violates(regime_clause(spec), x));
    }
    Ok(Verdict::undetermined("non-power-sum", "several pieces meet the interval and no witness was found".into()))
}
