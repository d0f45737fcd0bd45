use num_traits::{One, Zero};

use super::{assemble, require, Claim, Construction, RankRelation, WitnessBundle};
use crate::cone::Interval;
use crate::error::{Error, Result};
use crate::funcalg::PowerSum;
use crate::io::{qs, Q};
use crate::scalar::{binomial, Rational};
use crate::tol::Tolerances;
use crate::ExactMatrix;

/// `a·1ₙₓₙ + uuᵀ`.
pub fn special_rank2_matrix(a: &Rational, u: &[Rational]) -> ExactMatrix {
    ExactMatrix::outer(u).shift(a)
}

/// `d_l = Σ_{m ≥ l} c_m C(m, l) a^{m−l}` for `l = 0, …, deg f`.
pub fn special_coefficients(f: &PowerSum, a: &Rational) -> Result<Vec<Rational>> {
    if !f.is_polynomial() {
        return Err(Error::Invalid("special rank-2 decomposition needs a polynomial".into()));
    }
    let deg = f.degree().unwrap_or(0);
    let d = (0..=deg)
        .map(|l| {
            (l..=deg).fold(Rational::zero(), |acc, m| {
                let c = f.coefficient(m);
                if c.is_zero() {
                    return acc;
                }
                let b = Rational::from_integer(binomial(u64::from(m), u64::from(l)));
                acc + c * b * num_traits::pow(a.clone(), (m - l) as usize)
            })
        })
        .collect();
    Ok(d)
}

/// `A = a·1 + uuᵀ` together with the exact identity
/// `f[A] = Σ_l d_l u^{∘l}(u^{∘l})ᵀ`, so `rank f[A]` is at most the number of
/// nonzero `d_l`.
pub fn special_rank2(
    a: &Rational,
    u: &[Rational],
    f: &PowerSum,
    interval: Option<&Interval>,
    tol: &Tolerances,
) -> Result<WitnessBundle> {
    if u.is_empty() {
        return Err(Error::Invalid("empty vector".into()));
    }
    let d = special_coefficients(f, a)?;
    let m = special_rank2_matrix(a, u);
    if let Some(iv) = interval {
        if let Some(x) = m.entries().find(|x| !iv.contains(*x)) {
            return Err(Error::Domain(format!("entry {x} outside {iv}")));
        }
    }
    let image = f.apply(&m)?;
    let mut sum = ExactMatrix::zeros(u.len());
    let mut power: Vec<Rational> = vec![Rational::one(); u.len()];
    for dl in &d {
        if !dl.is_zero() {
            sum = sum.add(&ExactMatrix::outer(&power).scale(dl))?;
        }
        for (p, x) in power.iter_mut().zip(u) {
            *p *= x;
        }
    }
    require(sum == image, || "special rank-2 decomposition does not reproduce f[A]".into())?;
    let nonzero = d.iter().filter(|x| !x.is_zero()).count();
    let construction = Construction::SpecialRank2 { a: Q(a.clone()), u: qs(u), d: qs(&d) };
    let claims = vec![Claim::new("nonzero_d", nonzero), Claim::new("identity_exact", true)];
    assemble(
        m.into(),
        Some(f.clone().into()),
        interval.cloned(),
        construction,
        claims,
        Some((nonzero, RankRelation::AtMost)),
        tol,
    )
}
