//! Formal power sums `c₀ + Σ cⱼ gⱼ(x)` with flavored powers `gⱼ`.

mod deflation;
mod format;
mod piecewise;

use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::io::AnyMatrix;
use crate::matrix::SymMatrix;
use crate::scalar::{binomial, int, Flavor, Rational, Scalar};
use crate::ExactMatrix;

pub use deflation::{deflate, deflation_sequence, DeflationStep};
pub use format::{parse_literal, FunctionFile, PieceFile, PowerSumFile, TermFile};
pub use piecewise::{Function, Piece, Piecewise};

/// One term `coeff · g(x)` with `g` the flavored power of `exponent`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PowerTerm {
    pub coeff: Rational,
    pub exponent: Rational,
    pub flavor: Flavor,
}

impl PowerTerm {
    pub fn new(coeff: Rational, exponent: Rational, flavor: Flavor) -> Self {
        PowerTerm { coeff, exponent, flavor }
    }

    /// The exponent as an integer, if it is one.
    pub fn integer_exponent(&self) -> Option<u32> {
        if self.exponent.is_integer() {
            self.exponent.to_integer().to_u32()
        } else {
            None
        }
    }

    pub fn eval<T: Scalar>(&self, x: &T) -> Result<T> {
        Ok(T::from_rational(&self.coeff) * x.flavored_pow(&self.exponent, self.flavor)?)
    }
}

/// Normal form: no zero coefficients, plain `x⁰` folded into the constant,
/// `(exponent, flavor)` pairs distinct and sorted. At integer exponents
/// `φ_m` with `m` even and `ψ_m` with `m` odd are stored as plain `x^m`,
/// since they are the same function.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PowerSum {
    constant: Rational,
    terms: Vec<PowerTerm>,
}

fn canonical_flavor(exponent: &Rational, flavor: Flavor) -> Flavor {
    if flavor == Flavor::Plain || !exponent.is_integer() || exponent.is_zero() {
        return flavor;
    }
    let odd = exponent.to_integer().is_odd_big();
    match (flavor, odd) {
        (Flavor::Phi, false) | (Flavor::Psi, true) => Flavor::Plain,
        (f, _) => f,
    }
}

trait OddBig {
    fn is_odd_big(&self) -> bool;
}

impl OddBig for num_bigint::BigInt {
    fn is_odd_big(&self) -> bool {
        num_integer::Integer::is_odd(self)
    }
}

impl PowerSum {
    pub fn new(constant: Rational, terms: Vec<PowerTerm>) -> Result<Self> {
        let mut constant = constant;
        let mut merged: Vec<PowerTerm> = Vec::new();
        for t in terms {
            if t.exponent.is_negative() {
                return Err(Error::Domain(format!("negative exponent {}", t.exponent)));
            }
            let flavor = canonical_flavor(&t.exponent, t.flavor);
            if flavor == Flavor::Plain && t.exponent.is_zero() {
                constant += t.coeff;
                continue;
            }
            match merged
                .iter_mut()
                .find(|m| m.exponent == t.exponent && m.flavor == flavor)
            {
                Some(m) => m.coeff += t.coeff,
                None => merged.push(PowerTerm::new(t.coeff, t.exponent, flavor)),
            }
        }
        merged.retain(|t| !t.coeff.is_zero());
        merged.sort_by(|a, b| (&a.exponent, a.flavor).cmp(&(&b.exponent, b.flavor)));
        Ok(PowerSum { constant, terms: merged })
    }

    pub fn zero() -> Self {
        PowerSum { constant: Rational::zero(), terms: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        PowerSum { constant: c, terms: Vec::new() }
    }

    pub fn term(coeff: Rational, exponent: Rational, flavor: Flavor) -> Result<Self> {
        Self::new(Rational::zero(), vec![PowerTerm::new(coeff, exponent, flavor)])
    }

    /// `coeff · x^m`.
    pub fn monomial(coeff: Rational, m: u32) -> Self {
        Self::term(coeff, int(m as i64), Flavor::Plain).expect("nonnegative exponent")
    }

    pub fn plain(alpha: Rational) -> Result<Self> {
        Self::term(Rational::one(), alpha, Flavor::Plain)
    }

    pub fn phi(alpha: Rational) -> Result<Self> {
        Self::term(Rational::one(), alpha, Flavor::Phi)
    }

    pub fn psi(alpha: Rational) -> Result<Self> {
        Self::term(Rational::one(), alpha, Flavor::Psi)
    }

    /// `Σ coeffs[i] xⁱ`.
    pub fn polynomial(coeffs: &[Rational]) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| PowerTerm::new(c.clone(), int(i as i64), Flavor::Plain))
            .collect();
        let c0 = coeffs.first().cloned().unwrap_or_else(Rational::zero);
        Self::new(c0, terms).expect("nonnegative exponents")
    }

    pub fn from_i64_poly(coeffs: &[i64]) -> Self {
        Self::polynomial(&coeffs.iter().map(|&c| int(c)).collect::<Vec<_>>())
    }

    pub fn constant_term(&self) -> &Rational {
        &self.constant
    }

    pub fn terms(&self) -> &[PowerTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of nonzero terms, counting a nonzero constant.
    pub fn num_terms(&self) -> usize {
        self.terms.len() + usize::from(!self.constant.is_zero())
    }

    /// Plain flavors and nonnegative integer exponents only.
    pub fn is_polynomial(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.flavor == Flavor::Plain && t.integer_exponent().is_some())
    }

    pub fn has_integer_exponents(&self) -> bool {
        self.terms.iter().all(|t| t.integer_exponent().is_some())
    }

    /// Any φ or ψ term left after normalization.
    pub fn has_flavors(&self) -> bool {
        self.terms.iter().any(|t| t.flavor != Flavor::Plain)
    }

    /// `φ₀` or `ψ₀` terms, which jump at the origin.
    pub fn has_zero_exponent_flavors(&self) -> bool {
        self.terms.iter().any(|t| t.exponent.is_zero())
    }

    /// Plain non-integer powers, undefined for negative arguments.
    pub fn has_plain_fractional(&self) -> bool {
        self.terms
            .iter()
            .any(|t| t.flavor == Flavor::Plain && !t.exponent.is_integer())
    }

    pub fn degree(&self) -> Option<u32> {
        if !self.is_polynomial() {
            return None;
        }
        Some(self.terms.last().and_then(PowerTerm::integer_exponent).unwrap_or(0))
    }

    /// Coefficient of plain `x^m`.
    pub fn coefficient(&self, m: u32) -> Rational {
        if m == 0 {
            return self.constant.clone();
        }
        let e = int(m as i64);
        self.terms
            .iter()
            .find(|t| t.flavor == Flavor::Plain && t.exponent == e)
            .map(|t| t.coeff.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// Exponents of nonzero terms, with `0` for a nonzero constant.
    pub fn integer_exponents(&self) -> Result<Vec<u32>> {
        let mut out = Vec::new();
        if !self.constant.is_zero() {
            out.push(0);
        }
        for t in &self.terms {
            out.push(t.integer_exponent().ok_or_else(|| {
                Error::Invalid(format!("non-integer exponent {}", t.exponent))
            })?);
        }
        Ok(out)
    }

    pub fn coefficients_nonneg(&self) -> bool {
        !self.constant.is_negative() && self.terms.iter().all(|t| t.coeff.is_positive())
    }

    /// The same function restricted to `[0, ∞)`, where every flavor agrees
    /// with the plain power (`ψ₀` agrees with `φ₀`).
    pub fn restrict_nonneg(&self) -> PowerSum {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let flavor = if t.exponent.is_zero() { Flavor::Phi } else { Flavor::Plain };
                PowerTerm::new(t.coeff.clone(), t.exponent.clone(), flavor)
            })
            .collect();
        PowerSum::new(self.constant.clone(), terms).expect("exponents already validated")
    }

    /// The same function on `(0, ∞)`, where every flavor is the plain power.
    pub fn restrict_positive(&self) -> PowerSum {
        let terms = self
            .terms
            .iter()
            .map(|t| PowerTerm::new(t.coeff.clone(), t.exponent.clone(), Flavor::Plain))
            .collect();
        PowerSum::new(self.constant.clone(), terms).expect("exponents already validated")
    }

    pub fn scale(&self, c: &Rational) -> PowerSum {
        let terms = self
            .terms
            .iter()
            .map(|t| PowerTerm::new(&t.coeff * c, t.exponent.clone(), t.flavor))
            .collect();
        PowerSum::new(&self.constant * c, terms).expect("exponents already validated")
    }

    pub fn add(&self, other: &PowerSum) -> PowerSum {
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        PowerSum::new(&self.constant + &other.constant, terms).expect("exponents already validated")
    }

    pub fn sub(&self, other: &PowerSum) -> PowerSum {
        self.add(&other.scale(&-Rational::one()))
    }

    /// `f(0)`.
    pub fn value_at_zero(&self) -> &Rational {
        &self.constant
    }

    /// `f(0⁺) = lim_{x↓0} f(x)`.
    pub fn right_limit_at_zero(&self) -> Rational {
        self.terms
            .iter()
            .filter(|t| t.exponent.is_zero())
            .fold(self.constant.clone(), |acc, t| acc + &t.coeff)
    }

    pub fn eval<T: Scalar>(&self, x: &T) -> Result<T> {
        let mut acc = T::from_rational(&self.constant);
        for t in &self.terms {
            acc = acc + t.eval(x)?;
        }
        Ok(acc)
    }

    /// `f[A]`, entrywise.
    pub fn apply<T: Scalar>(&self, a: &SymMatrix<T>) -> Result<SymMatrix<T>> {
        a.try_map(|x| self.eval(x))
    }

    /// `f[A]` on the exact backend when every exponent is an integer,
    /// otherwise on the float backend.
    pub fn apply_any(&self, a: &ExactMatrix) -> Result<AnyMatrix> {
        if self.has_integer_exponents() {
            Ok(AnyMatrix::Exact(self.apply(a)?))
        } else {
            Ok(AnyMatrix::Float(self.apply(&a.to_float::<f64>())?))
        }
    }

    /// Termwise derivative, valid away from the origin.
    pub fn formal_derivative(&self) -> Result<PowerSum> {
        let mut terms = Vec::new();
        for t in &self.terms {
            if t.exponent.is_zero() {
                continue;
            }
            if t.exponent < Rational::one() {
                return Err(Error::Domain(format!(
                    "derivative of a power with exponent {} is unbounded at 0",
                    t.exponent
                )));
            }
            let flavor = match t.flavor {
                Flavor::Plain => Flavor::Plain,
                Flavor::Phi => Flavor::Psi,
                Flavor::Psi => Flavor::Phi,
            };
            terms.push(PowerTerm::new(
                &t.coeff * &t.exponent,
                &t.exponent - Rational::one(),
                flavor,
            ));
        }
        PowerSum::new(Rational::zero(), terms)
    }

    /// One-sided Taylor data at the origin: the first `count` orders whose
    /// coefficient is nonzero on at least one side.
    pub fn taylor_at_zero(&self, count: usize) -> Result<Vec<TaylorCoefficient>> {
        let mut out: Vec<TaylorCoefficient> = Vec::new();
        let mut push = |order: u32, plus: Rational, minus: Rational| {
            match out.iter_mut().find(|c| c.order == order) {
                Some(c) => {
                    c.plus += plus;
                    c.minus += minus;
                }
                None => out.push(TaylorCoefficient { order, plus, minus }),
            }
        };
        push(0, self.constant.clone(), self.constant.clone());
        for t in &self.terms {
            let m = t.integer_exponent().ok_or_else(|| {
                Error::Invalid(format!("Taylor data needs integer exponents, found {}", t.exponent))
            })?;
            let c = t.coeff.clone();
            let even = m % 2 == 0;
            let minus = match t.flavor {
                Flavor::Plain => c.clone(),
                Flavor::Phi if even => c.clone(),
                Flavor::Psi if !even => c.clone(),
                _ => -c.clone(),
            };
            push(m, c, minus);
        }
        out.retain(|c| !(c.plus.is_zero() && c.minus.is_zero()));
        out.sort_by_key(|c| c.order);
        out.truncate(count);
        Ok(out)
    }

    /// Lowest exponent among nonzero terms (the constant counts as 0).
    pub fn lowest_exponent(&self) -> Option<Rational> {
        if !self.constant.is_zero() {
            return Some(Rational::zero());
        }
        self.terms.first().map(|t| t.exponent.clone())
    }

    /// `Σ_{i=0}^m (-1)^i C(m,i) f(x + (m-i)h)`.
    pub fn forward_difference<T: Scalar>(&self, x: &T, h: &T, m: u32) -> Result<T> {
        let mut acc = T::zero();
        for i in 0..=m {
            let c = T::from_rational(&Rational::from_integer(binomial(m as u64, i as u64)));
            let point = x.clone() + T::from_int((m - i) as i64) * h.clone();
            let v = c * self.eval(&point)?;
            acc = if i % 2 == 0 { acc + v } else { acc - v };
        }
        Ok(acc)
    }
}

/// `(f^{(m)}(0⁺)/m!, f^{(m)}(0⁻)/m!)` for order `m`: the coefficients of
/// `x^m` in the expansions valid for `x > 0` and `x < 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaylorCoefficient {
    pub order: u32,
    pub plus: Rational,
    pub minus: Rational,
}

impl TaylorCoefficient {
    pub fn matched(&self) -> bool {
        self.plus == self.minus
    }

    pub fn negated(&self) -> bool {
        self.plus == -self.minus.clone()
    }
}

impl fmt::Display for PowerSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut parts = Vec::new();
        if !self.constant.is_zero() {
            parts.push(self.constant.to_string());
        }
        for t in &self.terms {
            let base = match t.flavor {
                Flavor::Plain if t.exponent.is_one() => "x".to_string(),
                Flavor::Plain => format!("x^{}", t.exponent),
                Flavor::Phi => format!("phi_{}(x)", t.exponent),
                Flavor::Psi => format!("psi_{}(x)", t.exponent),
            };
            parts.push(if t.coeff.is_one() {
                base
            } else {
                format!("{}*{base}", t.coeff)
            });
        }
        f.write_str(&parts.join(" + "))
    }
}
