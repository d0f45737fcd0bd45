//! Intervals, cone specifications and cone membership.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::{parse_rational, rat, Rational, Scalar};
use crate::matrix::SymMatrix;
use crate::tol::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalKind {
    /// `[0, R)`
    HalfOpenNonneg,
    /// `(-R, R)`
    SymmetricOpen,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Radius {
    Finite(Rational),
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    kind: IntervalKind,
    radius: Radius,
}

impl Interval {
    pub fn new(kind: IntervalKind, radius: Radius) -> Result<Self> {
        if let Radius::Finite(r) = &radius {
            if !r.is_positive() {
                return invalid(format!("interval radius {r} must be positive"));
            }
        }
        Ok(Interval { kind, radius })
    }

    /// `[0, ∞)`.
    pub fn nonneg() -> Self {
        Interval { kind: IntervalKind::HalfOpenNonneg, radius: Radius::Infinite }
    }

    /// `ℝ`.
    pub fn real_line() -> Self {
        Interval { kind: IntervalKind::SymmetricOpen, radius: Radius::Infinite }
    }

    pub fn half_open(r: Rational) -> Result<Self> {
        Self::new(IntervalKind::HalfOpenNonneg, Radius::Finite(r))
    }

    pub fn symmetric(r: Rational) -> Result<Self> {
        Self::new(IntervalKind::SymmetricOpen, Radius::Finite(r))
    }

    pub fn kind(&self) -> IntervalKind {
        self.kind
    }

    pub fn radius(&self) -> &Radius {
        &self.radius
    }

    pub fn is_symmetric(&self) -> bool {
        self.kind == IntervalKind::SymmetricOpen
    }

    pub fn finite_radius(&self) -> Option<&Rational> {
        match &self.radius {
            Radius::Finite(r) => Some(r),
            Radius::Infinite => None,
        }
    }

    pub fn contains<T: Scalar>(&self, x: &T) -> bool {
        let below_top = match &self.radius {
            Radius::Infinite => true,
            Radius::Finite(r) => x.abs() < T::from_rational(r),
        };
        let lower_ok = match self.kind {
            IntervalKind::HalfOpenNonneg => !x.is_negative(),
            IntervalKind::SymmetricOpen => true,
        };
        below_top && lower_ok
    }

    /// Smallest `2^j` (`j >= 0`) with `max_abs / 2^j < R(1 - 2⁻⁸)`.
    pub fn fitting_divisor(&self, max_abs: &Rational) -> Rational {
        let Radius::Finite(r) = &self.radius else {
            return Rational::one();
        };
        let cap = r * (Rational::one() - rat(1, 256));
        let mut d = Rational::one();
        let two = Rational::from_integer(BigInt::from(2));
        while max_abs / &d >= cap {
            d *= &two;
        }
        d
    }

    /// Divides an exact matrix by a power of two so its entries fit in the interval.
    pub fn fit(&self, m: &SymMatrix<Rational>) -> (SymMatrix<Rational>, Rational) {
        let d = self.fitting_divisor(&m.max_abs());
        if d.is_one() {
            return (m.clone(), d);
        }
        let inv = d.recip();
        (m.scale(&inv), d)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = match &self.radius {
            Radius::Finite(r) => r.to_string(),
            Radius::Infinite => "inf".to_string(),
        };
        match self.kind {
            IntervalKind::HalfOpenNonneg => write!(f, "[0,{r})"),
            IntervalKind::SymmetricOpen => write!(f, "(-{r},{r})"),
        }
    }
}

impl std::str::FromStr for Interval {
    type Err = Error;

    /// Parses `<kind>:<R|inf>` where kind is `0` (or `nonneg`) for `[0,R)` and
    /// `sym` (or `pm`) for `(-R,R)`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, r) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("interval {s:?} is not <kind>:<R|inf>")))?;
        let kind = match kind.trim() {
            "0" | "nonneg" | "half" => IntervalKind::HalfOpenNonneg,
            "sym" | "pm" | "symmetric" => IntervalKind::SymmetricOpen,
            other => return Err(Error::Parse(format!("unknown interval kind {other:?}"))),
        };
        let radius = match r.trim() {
            "inf" | "infinity" => Radius::Infinite,
            v => Radius::Finite(parse_rational(v)?),
        };
        Interval::new(kind, radius)
    }
}

impl Serialize for Interval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let kind = match self.kind {
            IntervalKind::HalfOpenNonneg => "0",
            IntervalKind::SymmetricOpen => "sym",
        };
        let r = match &self.radius {
            Radius::Finite(r) => r.to_string(),
            Radius::Infinite => "inf".into(),
        };
        s.serialize_str(&format!("{kind}:{r}"))
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `(n, l, k, I, positive)`: maps `𝒫ₙˡ(I)` into `𝒫ₙᵏ` (positive) or `ℛₙᵏ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub n: usize,
    pub l: usize,
    pub k: usize,
    pub interval: Interval,
    pub positive: bool,
}

impl ConeSpec {
    pub fn new(n: usize, l: usize, k: usize, interval: Interval, positive: bool) -> Result<Self> {
        if n == 0 {
            return invalid("n must be at least 1");
        }
        if l == 0 || l > n {
            return invalid(format!("source rank l = {l} outside 1..={n}"));
        }
        if k == 0 || k > n {
            return invalid(format!("target rank k = {k} outside 1..={n}"));
        }
        Ok(ConeSpec { n, l, k, interval, positive })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Source,
    Target,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MembershipCheck {
    Order,
    Entries,
    Rank,
    Psd,
}

/// Outcome of a cone-membership query, carrying the first failed check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub member: bool,
    pub failed: Option<MembershipCheck>,
    pub detail: String,
}

impl Membership {
    fn pass() -> Self {
        Membership { member: true, failed: None, detail: String::new() }
    }

    fn fail(check: MembershipCheck, detail: String) -> Self {
        Membership { member: false, failed: Some(check), detail }
    }
}

/// Source role: entries in `I`, rank `<= l`, PSD. Target role: rank `<= k`,
/// and PSD when the spec is positive.
pub fn cone_member<T: Scalar>(
    a: &SymMatrix<T>,
    spec: &ConeSpec,
    role: Role,
    tol: &Tolerances,
) -> Membership {
    if a.n() != spec.n {
        return Membership::fail(
            MembershipCheck::Order,
            format!("order {} differs from n = {}", a.n(), spec.n),
        );
    }
    if role == Role::Source {
        if let Some(x) = a.entries().find(|x| !spec.interval.contains(*x)) {
            return Membership::fail(
                MembershipCheck::Entries,
                format!("entry {x} outside {}", spec.interval),
            );
        }
    }
    let bound = match role {
        Role::Source => spec.l,
        Role::Target => spec.k,
    };
    let r = a.rank_with(tol);
    if r > bound {
        return Membership::fail(MembershipCheck::Rank, format!("rank {r} exceeds {bound}"));
    }
    let need_psd = role == Role::Source || spec.positive;
    if need_psd && !a.is_psd_with(tol) {
        return Membership::fail(MembershipCheck::Psd, "not positive semidefinite".into());
    }
    Membership::pass()
}
