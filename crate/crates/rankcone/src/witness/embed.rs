use num_traits::{Signed, Zero};

use super::{assemble, require, Claim, Construction, RankRelation, WitnessBundle};
use crate::cone::Interval;
use crate::error::{Error, Result};
use crate::io::{qs, Q};
use crate::scalar::Rational;
use crate::tol::Tolerances;
use crate::ExactMatrix;

/// Embeds a PSD `B = [[a, b], [b, c]]` as the leading 2×2 block of a special
/// rank-2 matrix `a′·1ₙₓₙ + uuᵀ`.
///
/// Index 1 carries `±√(c − a′)` and every other index `√(a − a′)`, with the
/// sign of `b − a′`. The products `uᵢuⱼ` are rational, so the result is exact.
pub fn embed_2x2(b: &ExactMatrix, n: usize, interval: &Interval, tol: &Tolerances) -> Result<WitnessBundle> {
    if b.n() != 2 {
        return Err(Error::Shape(format!("expected a 2x2 matrix, got order {}", b.n())));
    }
    if n < 2 {
        return Err(Error::Invalid("embedding needs n >= 2".into()));
    }
    if let Some(x) = b.entries().find(|x| !interval.contains(*x)) {
        return Err(Error::Domain(format!("entry {x} outside {interval}")));
    }
    if !b.is_psd() {
        return Err(Error::Domain("matrix is not positive semidefinite".into()));
    }
    let (a, bb, c) = (b.get(0, 0).clone(), b.get(0, 1).clone(), b.get(1, 1).clone());
    let denom = &a + &c - &bb - &bb;

    let (a_prime, cross, sign) = if !denom.is_positive() {
        // PSD with a + c <= 2b forces a = b = c
        (a.clone(), Rational::zero(), 0i8)
    } else {
        let ap = (&a * &c - &bb * &bb) / &denom;
        let cross = &bb - &ap;
        let sign = if cross.is_positive() { 1 } else if cross.is_negative() { -1 } else { 0 };
        (ap, cross, sign)
    };
    let ua2 = &a - &a_prime;
    let uc2 = &c - &a_prime;
    require(!a_prime.is_negative() && ua2 >= Rational::zero() && uc2 >= Rational::zero(), || {
        format!("a' = {a_prime} is not in [0, min(a, c)]")
    })?;
    require(&cross * &cross == &ua2 * &uc2, || "cross term is not the product of the square roots".into())?;

    let m = ExactMatrix::from_fn(n, |i, j| match (i == 1, j == 1) {
        (true, true) => c.clone(),
        (false, false) => a.clone(),
        _ => bb.clone(),
    });
    require(m.leading(2)? == *b, || "leading block differs from B".into())?;
    require(m.is_psd(), || "embedding is not PSD".into())?;
    let rank = m.rank();
    require(rank <= 2, || format!("embedding has rank {rank}"))?;

    let construction = Construction::Embed {
        a: Q(a),
        b: Q(bb),
        c: Q(c),
        n,
        a_prime: Q(a_prime),
        u_squared: qs(&[ua2, uc2]),
        sign,
    };
    assemble(
        m.into(),
        None,
        Some(interval.clone()),
        construction,
        vec![Claim::new("leading_block_equals_b", true)],
        Some((2, RankRelation::AtMost)),
        tol,
    )
}
