//! Scalar backends.
//!
//! Every algorithm in the crate is written against [`Scalar`]. Exact work
//! uses [`Rational`]; `f64` and `f32` are the float backends.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::{Dense, SymMatrix};
use crate::tol::Tolerances;

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Exact => "exact",
            Backend::Float => "float",
        })
    }
}

/// How a power is extended to negative arguments.
///
/// `Plain` is `x^α` (defined for `x < 0` only at integer `α`), `Phi` is
/// `|x|^α` and `Psi` is `sgn(x)|x|^α`. `Phi` and `Psi` vanish at zero for
/// every exponent, including zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Plain,
    Phi,
    Psi,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Plain => "plain",
            Flavor::Phi => "phi",
            Flavor::Psi => "psi",
        })
    }
}

/// A field backend. Exact and float implementations pick their own
/// rank, determinant and PSD algorithms.
pub trait Scalar:
    Clone + PartialOrd + fmt::Debug + fmt::Display + Num + Signed + Send + Sync + 'static
{
    const BACKEND: Backend;

    fn from_rational(q: &Rational) -> Self;

    fn from_int(v: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(v)))
    }

    fn to_f64(&self) -> f64;

    /// `g(self)` where `g` is the flavored power with the given exponent.
    fn flavored_pow(&self, exponent: &Rational, flavor: Flavor) -> Result<Self>;

    /// True when `self < -tol` on float backends, `self < 0` on exact ones.
    fn below_tolerance(&self, tol: f64) -> bool;

    /// True when `|self| <= tol` on float backends, `self == 0` on exact ones.
    fn negligible(&self, tol: f64) -> bool;

    fn sym_rank(m: &SymMatrix<Self>, tol: &Tolerances) -> usize;

    fn dense_rank(m: &Dense<Self>, tol: &Tolerances) -> usize;

    fn det(m: &Dense<Self>) -> Self;

    fn sym_is_psd(m: &SymMatrix<Self>, tol: &Tolerances) -> bool;
}

fn check_exponent(exponent: &Rational) -> Result<()> {
    if exponent.is_negative() {
        return Err(Error::Domain(format!("negative exponent {exponent}")));
    }
    Ok(())
}

impl Scalar for Rational {
    const BACKEND: Backend = Backend::Exact;

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn flavored_pow(&self, exponent: &Rational, flavor: Flavor) -> Result<Self> {
        check_exponent(exponent)?;
        if !exponent.is_integer() {
            return Err(Error::Inexact(format!(
                "non-integer exponent {exponent} on the exact backend"
            )));
        }
        let m = exponent
            .to_integer()
            .to_i32()
            .ok_or_else(|| Error::Domain(format!("exponent {exponent} too large")))?;
        if flavor != Flavor::Plain && self.is_zero() {
            return Ok(Rational::zero());
        }
        let base = match flavor {
            Flavor::Plain => self.clone(),
            Flavor::Phi | Flavor::Psi => self.abs(),
        };
        let p = base.pow(m);
        Ok(if flavor == Flavor::Psi && self.is_negative() { -p } else { p })
    }

    fn below_tolerance(&self, _tol: f64) -> bool {
        self.is_negative()
    }

    fn negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn sym_rank(m: &SymMatrix<Self>, _tol: &Tolerances) -> usize {
        linalg::exact::rank(&m.to_dense())
    }

    fn dense_rank(m: &Dense<Self>, _tol: &Tolerances) -> usize {
        linalg::exact::rank(m)
    }

    fn det(m: &Dense<Self>) -> Self {
        linalg::exact::det(m)
    }

    fn sym_is_psd(m: &SymMatrix<Self>, _tol: &Tolerances) -> bool {
        linalg::exact::is_psd(m)
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const BACKEND: Backend = Backend::Float;

            fn from_rational(q: &Rational) -> Self {
                rational_to_f64(q) as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn flavored_pow(&self, exponent: &Rational, flavor: Flavor) -> Result<Self> {
                check_exponent(exponent)?;
                let x = *self;
                let integral = exponent.is_integer();
                let a = rational_to_f64(exponent) as $t;
                match flavor {
                    Flavor::Plain => {
                        if integral {
                            let m = exponent.to_integer().to_i32().ok_or_else(|| {
                                Error::Domain(format!("exponent {exponent} too large"))
                            })?;
                            Ok(x.powi(m))
                        } else if x < 0.0 {
                            Err(Error::Domain(format!(
                                "plain power {exponent} of negative entry {x}"
                            )))
                        } else {
                            Ok(x.powf(a))
                        }
                    }
                    _ if x == 0.0 => Ok(0.0),
                    Flavor::Phi => Ok(x.abs().powf(a)),
                    Flavor::Psi => Ok(x.signum() * x.abs().powf(a)),
                }
            }

            fn below_tolerance(&self, tol: f64) -> bool {
                (*self as f64) < -tol
            }

            fn negligible(&self, tol: f64) -> bool {
                (*self as f64).abs() <= tol
            }

            fn sym_rank(m: &SymMatrix<Self>, tol: &Tolerances) -> usize {
                linalg::float::sym_rank(m, tol.rank_rtol)
            }

            fn dense_rank(m: &Dense<Self>, tol: &Tolerances) -> usize {
                linalg::float::dense_rank(m, tol.rank_rtol)
            }

            fn det(m: &Dense<Self>) -> Self {
                linalg::float::det(m)
            }

            fn sym_is_psd(m: &SymMatrix<Self>, tol: &Tolerances) -> bool {
                linalg::float::is_psd(m, tol.psd_atol)
            }
        }
    };
}

float_scalar!(f64);
float_scalar!(f32);

/// Nearest `f64` to a rational, robust to huge numerators and denominators.
pub fn rational_to_f64(q: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift = nb - db - 60;
    let (n, d) = if shift > 0 {
        (q.numer().clone(), q.denom().clone() << shift as usize)
    } else {
        (q.numer().clone() << (-shift) as usize, q.denom().clone())
    };
    let head = (n / d).to_f64().unwrap_or(0.0);
    head * 2f64.powi(shift as i32)
}

/// Exact rational from a finite `f64`.
pub fn rational_from_f64(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::Domain(format!("non-finite value {x}")))
}

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Parses `p`, `p/q`, or a decimal literal such as `-2.5` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p = parse_int(p).ok_or_else(bad)?;
        let q = parse_int(q).ok_or_else(bad)?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !whole_digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{whole_digits}{frac}");
        let mut n = BigInt::from_str_radix(&digits, 10).map_err(|_| bad())?;
        if negative {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(n, d));
    }
    parse_int(t).map(Rational::from_integer).ok_or_else(bad)
}

fn parse_int(s: &str) -> Option<BigInt> {
    let s = s.trim();
    let body = s.strip_prefix('+').unwrap_or(s);
    let digits = body.strip_prefix('-').unwrap_or(body);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str_radix(body, 10).ok()
}

/// Binomial coefficient in arbitrary precision.
pub fn binomial(m: u64, i: u64) -> BigInt {
    if i > m {
        return BigInt::zero();
    }
    let i = i.min(m - i);
    let mut acc = BigInt::one();
    for j in 0..i {
        acc *= BigInt::from(m - j);
        acc /= BigInt::from(j + 1);
    }
    acc
}

/// Least common multiple of the denominators.
pub fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}
