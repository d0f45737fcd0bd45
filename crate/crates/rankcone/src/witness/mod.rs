//! Explicit matrices certifying that a rank bound is attained or broken.
//!
//! Every [`WitnessBundle`] records the construction that produced it.
//! Verification rebuilds the bundle from that record and compares field by
//! field, so claims read from disk are never trusted.

mod canned;
mod embed;
mod multinomial;
mod search;
mod special;
mod vandermonde;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use canned::{
    a4, a6, akl_det_sides, akl_matrix, bx0_det_sides, bx0_matrix, canned, canned_in, canned_with,
    continuity_limit_det, continuity_limit_matrix, cosine_b4, padding_matrix, Canned,
};
pub use embed::embed_2x2;
pub use multinomial::{
    multinomial_witness, multinomial_with_nodes, pgvm_alpha, pgvm_alpha_capped, target_rank,
    MultiIndexSet, PgvmAlpha,
};
pub use search::{full_rank_search, search_candidate, SearchConfig, SearchOutcome};
pub use special::{special_coefficients, special_rank2, special_rank2_matrix};
pub use vandermonde::{vandermonde_rank1_witness, vandermonde_with_nodes};

use crate::cone::{cone_member, ConeSpec, Interval, Role};
use crate::error::{Error, Result};
use crate::funcalg::Function;
use crate::io::{qs, unq, AnyMatrix, Q};
use crate::scalar::Rational;
use crate::tol::Tolerances;
use crate::ExactMatrix;

/// How the recorded rank relates to the verified one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankRelation {
    Exactly,
    AtMost,
}

impl RankRelation {
    pub fn holds(self, actual: usize, claimed: usize) -> bool {
        match self {
            RankRelation::Exactly => actual == claimed,
            RankRelation::AtMost => actual <= claimed,
        }
    }
}

/// A named property recorded at construction time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub name: String,
    pub value: Value,
}

impl Claim {
    pub fn new(name: &str, value: impl Into<Value>) -> Self {
        Claim { name: name.to_string(), value: value.into() }
    }
}

/// The recipe behind a witness matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Construction {
    /// `A = vvᵀ / divisor`.
    Vandermonde { v: Vec<Q>, divisor: Q },
    /// `A = Σⱼ uⱼuⱼᵀ / divisor` with `uⱼ = v^{∘αⱼ}`.
    Multinomial {
        l: usize,
        alpha: Vec<u64>,
        dots: Vec<u64>,
        v: Vec<Q>,
        u: Vec<Vec<Q>>,
        divisor: Q,
    },
    /// `A = a·1 + uuᵀ` with `f[A] = Σ d_l u^{∘l} (u^{∘l})ᵀ`.
    SpecialRank2 { a: Q, u: Vec<Q>, d: Vec<Q> },
    /// `a′·1 + uuᵀ` whose leading 2×2 block is `[[a, b], [b, c]]`.
    Embed {
        a: Q,
        b: Q,
        c: Q,
        n: usize,
        a_prime: Q,
        u_squared: Vec<Q>,
        sign: i8,
    },
    Canned { canned: Canned, divisor: Q },
    /// `A = a·1 + uuᵀ` with `u` drawn from stream `trial` of `seed`.
    Search { a: Q, eps: Q, seed: u64, trial: u64, u: Vec<Q> },
    Gram { vectors: Vec<Vec<Q>>, divisor: Q },
}

impl Construction {
    pub fn kind(&self) -> &'static str {
        match self {
            Construction::Vandermonde { .. } => "vandermonde",
            Construction::Multinomial { .. } => "multinomial",
            Construction::SpecialRank2 { .. } => "special_rank2",
            Construction::Embed { .. } => "embed",
            Construction::Canned { .. } => "canned",
            Construction::Search { .. } => "search",
            Construction::Gram { .. } => "gram",
        }
    }
}

/// A matrix, optionally a function applied to it, and the rank the image
/// (or the matrix itself, without a function) is claimed to have.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessBundle {
    pub matrix: AnyMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<Function>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<AnyMatrix>,
    pub claimed_rank: usize,
    pub relation: RankRelation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<Interval>,
    pub construction: Construction,
    pub claims: Vec<Claim>,
}

/// Outcome of [`WitnessBundle::verify`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verified {
    pub claimed: usize,
    pub actual: usize,
    pub relation: RankRelation,
}

fn apply_to(f: &Function, m: &AnyMatrix) -> Result<AnyMatrix> {
    match m {
        AnyMatrix::Exact(a) => f.apply_any(a),
        AnyMatrix::Float(a) => Ok(AnyMatrix::Float(f.apply(a)?)),
    }
}

fn entries_in(m: &AnyMatrix, interval: &Interval) -> bool {
    match m {
        AnyMatrix::Exact(a) => a.entries().all(|x| interval.contains(x)),
        AnyMatrix::Float(a) => a.entries().all(|x| interval.contains(x)),
    }
}

pub(crate) fn require(cond: bool, what: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Verification(what()))
    }
}

/// Builds a bundle with the standard rank and PSD claims. With `expected`
/// set, the verified rank of the subject must satisfy it.
pub(crate) fn assemble(
    matrix: AnyMatrix,
    function: Option<Function>,
    interval: Option<Interval>,
    construction: Construction,
    extra: Vec<Claim>,
    expected: Option<(usize, RankRelation)>,
    tol: &Tolerances,
) -> Result<WitnessBundle> {
    if let Some(iv) = &interval {
        if !entries_in(&matrix, iv) {
            return Err(Error::Domain(format!("witness entries leave {iv}")));
        }
    }
    let mut claims = vec![
        Claim::new("matrix_rank", matrix.rank(tol)),
        Claim::new("matrix_psd", matrix.is_psd(tol)),
    ];
    claims.extend(extra);
    let bundle = WitnessBundle {
        matrix,
        function: None,
        image: None,
        claimed_rank: 0,
        relation: RankRelation::Exactly,
        interval,
        construction,
        claims,
    };
    let mut bundle = match function {
        Some(f) => bundle.attach(f, tol)?,
        None => {
            let r = bundle.matrix.rank(tol);
            WitnessBundle { claimed_rank: r, ..bundle }
        }
    };
    if let Some((k, relation)) = expected {
        let actual = bundle.claimed_rank;
        require(relation.holds(actual, k), || {
            format!("{} witness has rank {actual}, expected {relation:?} {k}", bundle.construction.kind())
        })?;
        bundle.claimed_rank = k;
        bundle.relation = relation;
    }
    Ok(bundle)
}

impl WitnessBundle {
    fn attach(mut self, f: Function, tol: &Tolerances) -> Result<Self> {
        let image = apply_to(&f, &self.matrix)?;
        let r = image.rank(tol);
        self.claims.push(Claim::new("image_rank", r));
        self.claims.push(Claim::new("image_psd", image.is_psd(tol)));
        self.function = Some(f);
        self.image = Some(image);
        self.claimed_rank = r;
        self.relation = RankRelation::Exactly;
        Ok(self)
    }

    /// Applies `f` to a bundle built without one; the claim becomes the
    /// exact rank of `f[A]`.
    pub fn with_function(self, f: Function, tol: &Tolerances) -> Result<Self> {
        if self.function.is_some() {
            return Err(Error::Invalid("witness already carries a function".into()));
        }
        self.attach(f, tol)
    }

    /// The matrix the claimed rank refers to.
    pub fn subject(&self) -> &AnyMatrix {
        self.image.as_ref().unwrap_or(&self.matrix)
    }

    pub fn claim(&self, name: &str) -> Option<&Value> {
        self.claims.iter().find(|c| c.name == name).map(|c| &c.value)
    }

    fn power_sum(&self) -> Result<&crate::PowerSum> {
        self.function
            .as_ref()
            .and_then(Function::as_power_sum)
            .ok_or_else(|| Error::Verification(format!("{} witness needs a power sum", self.construction.kind())))
    }

    /// Reruns the recorded construction.
    pub fn rebuild(&self, tol: &Tolerances) -> Result<WitnessBundle> {
        let iv = self.interval.as_ref();
        let rebuilt = match &self.construction {
            Construction::Vandermonde { v, .. } => {
                vandermonde_with_nodes(self.power_sum()?, &unq(v.clone()), iv.ok_or_else(no_interval)?, tol)?
            }
            Construction::Multinomial { l, v, .. } => {
                multinomial_with_nodes(self.power_sum()?, *l, &unq(v.clone()), iv.ok_or_else(no_interval)?, tol)?
            }
            Construction::SpecialRank2 { a, u, .. } => {
                special_rank2(&a.0, &unq(u.clone()), self.power_sum()?, iv, tol)?
            }
            Construction::Search { a, eps, seed, trial, .. } => {
                let f = self.power_sum()?;
                let interval = iv.ok_or_else(no_interval)?;
                search_candidate(f, &a.0, self.matrix.n(), &eps.0, *seed, *trial, interval, tol)?
                    .ok_or_else(|| Error::Verification("recorded search draw is not full rank".into()))?
            }
            Construction::Embed { a, b, c, n, .. } => {
                let bm = ExactMatrix::from_rows(vec![vec![a.0.clone(), b.0.clone()], vec![b.0.clone(), c.0.clone()]])?;
                let base = embed_2x2(&bm, *n, iv.ok_or_else(no_interval)?, tol)?;
                self.reattach(base, tol)?
            }
            Construction::Canned { canned: c, .. } => canned_with(c, self.function.clone(), iv, tol)?,
            Construction::Gram { vectors, .. } => {
                let vs: Vec<Vec<Rational>> = vectors.iter().cloned().map(unq).collect();
                let base = gram_witness(&vs, None, iv.ok_or_else(no_interval)?, tol)?;
                self.reattach(base, tol)?
            }
        };
        Ok(rebuilt)
    }

    fn reattach(&self, base: WitnessBundle, tol: &Tolerances) -> Result<WitnessBundle> {
        match (&self.function, &base.function) {
            (Some(f), None) => base.attach(f.clone(), tol),
            _ => Ok(base),
        }
    }

    /// Rebuilds the bundle and checks that every recorded field matches.
    pub fn verify(&self, tol: &Tolerances) -> Result<Verified> {
        let fresh = self.rebuild(tol)?;
        let mismatch = |what: &str| Err(Error::Verification(format!("recorded {what} does not match its construction")));
        if fresh.construction != self.construction {
            return mismatch("construction");
        }
        if fresh.matrix != self.matrix {
            return mismatch("matrix");
        }
        if fresh.function != self.function {
            return mismatch("function");
        }
        if fresh.image != self.image {
            return mismatch("image");
        }
        if fresh.claimed_rank != self.claimed_rank || fresh.relation != self.relation {
            return mismatch("rank claim");
        }
        if fresh.claims != self.claims {
            return mismatch("claims");
        }
        let actual = self.subject().rank(tol);
        require(self.relation.holds(actual, self.claimed_rank), || {
            format!("verified rank {actual} contradicts claim {:?} {}", self.relation, self.claimed_rank)
        })?;
        Ok(Verified { claimed: self.claimed_rank, actual, relation: self.relation })
    }

    /// `Some(reason)` when the matrix lies in the source cone of `spec` but
    /// its image misses the target cone.
    pub fn violates(&self, spec: &ConeSpec, tol: &Tolerances) -> Result<Option<String>> {
        let image = self
            .image
            .as_ref()
            .ok_or_else(|| Error::Verification("witness has no image to test".into()))?;
        let source = match &self.matrix {
            AnyMatrix::Exact(a) => cone_member(a, spec, Role::Source, tol),
            AnyMatrix::Float(a) => cone_member(a, spec, Role::Source, tol),
        };
        if !source.member {
            return Err(Error::Verification(format!("witness is outside the source cone: {}", source.detail)));
        }
        let target = match image {
            AnyMatrix::Exact(a) => cone_member(a, spec, Role::Target, tol),
            AnyMatrix::Float(a) => cone_member(a, spec, Role::Target, tol),
        };
        Ok((!target.member).then_some(target.detail))
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("bundles serialize")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundles serialize")
    }

    /// Parses and verifies a bundle.
    pub fn from_json_str(s: &str, tol: &Tolerances) -> Result<(Self, Verified)> {
        let bundle: WitnessBundle = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let verified = bundle.verify(tol)?;
        Ok((bundle, verified))
    }
}

fn no_interval() -> Error {
    Error::Verification("construction requires an interval".into())
}

/// `Σⱼ vⱼvⱼᵀ` rescaled into `interval`, optionally with `f` applied.
pub fn gram_witness(
    vectors: &[Vec<Rational>],
    function: Option<Function>,
    interval: &Interval,
    tol: &Tolerances,
) -> Result<WitnessBundle> {
    let (a, divisor) = interval.fit(&ExactMatrix::gram(vectors)?);
    let construction = Construction::Gram {
        vectors: vectors.iter().map(|v| qs(v)).collect(),
        divisor: Q(divisor),
    };
    assemble(a.into(), function, Some(interval.clone()), construction, Vec::new(), None, tol)
}
