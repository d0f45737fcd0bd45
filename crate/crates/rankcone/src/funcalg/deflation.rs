//! The peeling operators `T_r h = (h − c_r g_r) / g_r`.

use num_traits::Zero;

use super::{PowerSum, PowerTerm};
use crate::error::{Error, Result};
use crate::scalar::{int, Flavor, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeflationStep {
    /// `r`, the gap between consecutive nonzero orders.
    pub order: u32,
    /// The coefficient removed at order `r`.
    pub extracted: Rational,
    /// Flavor of the divisor `g_r`.
    pub divisor: Flavor,
    /// `T_r` applied to the input.
    pub result: PowerSum,
}

impl DeflationStep {
    /// `g_r` as a function.
    pub fn divisor_fn(&self) -> PowerSum {
        PowerSum::term(Rational::from_integer(1.into()), int(self.order as i64), self.divisor)
            .expect("nonnegative exponent")
    }
}

/// Sign parity for `x < 0`: `g(x) = sgn(x)^parity |g(x)|`.
fn parity(flavor: Flavor, exponent: &Rational) -> Option<bool> {
    match flavor {
        Flavor::Phi => Some(false),
        Flavor::Psi => Some(true),
        Flavor::Plain if exponent.is_integer() => {
            Some(num_integer::Integer::is_odd(&exponent.to_integer()))
        }
        Flavor::Plain => None,
    }
}

/// Flavor of `g_a / g_b` away from the origin: φ/φ and ψ/ψ give φ, the mixed
/// pairs give ψ. Plain fractional powers live on `x ≥ 0` and stay plain.
fn quotient_flavor(term: Flavor, a: &Rational, divisor: Flavor, b: &Rational) -> Flavor {
    match (parity(term, a), parity(divisor, b)) {
        (None, _) | (_, None) => Flavor::Plain,
        (Some(p), Some(q)) if p == q => Flavor::Phi,
        _ => Flavor::Psi,
    }
}

/// One application of `T_r`.
pub fn deflate(f: &PowerSum, r: u32) -> Result<DeflationStep> {
    let r_q = int(r as i64);
    if let Some(low) = f.lowest_exponent() {
        if low < r_q {
            return Err(Error::Invalid(format!(
                "order {r} exceeds the lowest exponent {low} of {f}"
            )));
        }
    }
    let mut at_r: Vec<(Rational, Flavor)> = Vec::new();
    if r == 0 && !f.constant.is_zero() {
        at_r.push((f.constant.clone(), Flavor::Plain));
    }
    at_r.extend(
        f.terms
            .iter()
            .filter(|t| t.exponent == r_q)
            .map(|t| (t.coeff.clone(), t.flavor)),
    );
    if at_r.len() > 1 {
        return Err(Error::Invalid(format!(
            "{f} mixes flavors at order {r}; its one-sided derivatives differ in size"
        )));
    }
    let (extracted, divisor) = at_r
        .pop()
        .unwrap_or_else(|| (Rational::zero(), Flavor::Plain));
    let terms = f
        .terms
        .iter()
        .filter(|t| t.exponent != r_q)
        .map(|t| {
            PowerTerm::new(
                t.coeff.clone(),
                &t.exponent - &r_q,
                quotient_flavor(t.flavor, &t.exponent, divisor, &r_q),
            )
        })
        .collect();
    let result = PowerSum::new(Rational::zero(), terms)?;
    Ok(DeflationStep { order: r, extracted, divisor, result })
}

/// Peels the first `k` nonzero orders `m₁ < … < m_k`, step `i` applying
/// `T_{mᵢ − mᵢ₋₁}` (with `m₀ = 0`) to the previous result.
pub fn deflation_sequence(f: &PowerSum, k: usize) -> Result<Vec<DeflationStep>> {
    let orders = f.taylor_at_zero(k)?;
    if orders.len() < k {
        return Err(Error::Invalid(format!(
            "{f} has only {} nonzero orders at 0, {k} requested",
            orders.len()
        )));
    }
    let mut steps = Vec::with_capacity(k);
    let mut current = f.clone();
    let mut prev = 0;
    for coeff in orders {
        let step = deflate(&current, coeff.order - prev)?;
        prev = coeff.order;
        current = step.result.clone();
        steps.push(step);
    }
    Ok(steps)
}
