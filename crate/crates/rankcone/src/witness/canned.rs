use std::f64::consts::PI;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{assemble, require, Claim, Construction, RankRelation, WitnessBundle};
use crate::cone::Interval;
use crate::error::{Error, Result};
use crate::funcalg::{Function, PowerSum};
use crate::io::{AnyMatrix, Q};
use crate::matrix::block_diag;
use crate::scalar::{int, rational_from_f64, rational_to_f64, Rational};
use crate::tol::Tolerances;
use crate::{ExactMatrix, FloatMatrix};

/// Named matrices with known rank and positivity properties.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Canned {
    A4,
    A6,
    /// Copies of `A₄` (and one `A₆` for odd `l`) padded with zeros or
    /// truncated to order `n`, paired with `φ₁`.
    Padding { l: usize, n: usize },
    /// `C_{k−l+1} ⊕ c·Id_{2l−k−1} ⊕ 0`, with `C_j` the `j`-fold sum of `(a, b)(a, b)ᵀ`.
    Akl { k: usize, l: usize, n: usize, a: Q, b: Q, c: Q },
    /// `(cos((i − j)π/4))` padded to order `n`, paired with `ψ₂`.
    Cosine { n: usize },
    /// `x₀·1₃ₓ₃ − 3x₀·Id₃` padded to order `n`.
    #[serde(rename = "b_x0")]
    BX0 { x0: Q, n: usize },
    Continuity,
    /// The limit of `f[tA]` as `t → 0⁺` for the continuity matrix, with
    /// `p = f(0⁺)` and `q = f(0)`.
    ContinuityLimit { p: Q, q: Q },
    /// `[[A⊕B⊕C, A⊕−B⊕C], [A⊕−B⊕C, A⊕B⊕C]]`.
    BlockSum { a: Vec<Vec<Q>>, b: Vec<Vec<Q>>, c: Vec<Vec<Q>> },
    /// `[[B, c·1], [c·1, c·1]]` with an `m × m` lower-right block.
    Bordered { b: Vec<Vec<Q>>, c: Q, m: usize },
}

impl Canned {
    pub fn name(&self) -> &'static str {
        match self {
            Canned::A4 => "a4",
            Canned::A6 => "a6",
            Canned::Padding { .. } => "padding",
            Canned::Akl { .. } => "akl",
            Canned::Cosine { .. } => "cosine",
            Canned::BX0 { .. } => "b_x0",
            Canned::Continuity => "continuity",
            Canned::ContinuityLimit { .. } => "continuity_limit",
            Canned::BlockSum { .. } => "block_sum",
            Canned::Bordered { .. } => "bordered",
        }
    }
}

pub fn a4() -> ExactMatrix {
    ExactMatrix::from_i64_rows(&[&[8, 4, -2, 6], &[4, 4, 2, 4], &[-2, 2, 5, 0], &[6, 4, 0, 5]]).expect("symmetric")
}

pub fn a6() -> ExactMatrix {
    ExactMatrix::from_i64_rows(&[
        &[9, 7, 7, 1, 1, -3],
        &[7, 6, 5, 3, 2, -2],
        &[7, 5, 6, -1, 0, -2],
        &[1, 3, -1, 9, 5, 1],
        &[1, 2, 0, 5, 3, 1],
        &[-3, -2, -2, 1, 1, 3],
    ])
    .expect("symmetric")
}

fn phi1() -> PowerSum {
    PowerSum::phi(Rational::one()).expect("valid exponent")
}

/// `B ⊕ 0` for `n >= 2l`, else the leading `n × n` block of `B`, where `B`
/// is `l/2` copies of `A₄`, or `(l−3)/2` copies of `A₄` followed by `A₆`.
pub fn padding_matrix(l: usize, n: usize) -> Result<ExactMatrix> {
    if l < 2 || n <= l {
        return Err(Error::Invalid(format!("padding needs 2 <= l < n, got l = {l}, n = {n}")));
    }
    let mut blocks = vec![a4(); if l % 2 == 0 { l / 2 } else { (l - 3) / 2 }];
    if l % 2 == 1 {
        blocks.push(a6());
    }
    let b = block_diag(&blocks)?;
    if n >= b.n() {
        Ok(b.pad(n - b.n()))
    } else {
        b.leading(n)
    }
}

pub fn akl_matrix(k: usize, l: usize, n: usize, a: &Rational, b: &Rational, c: &Rational) -> Result<ExactMatrix> {
    if l == 0 || k < l || k + 1 > 2 * l || n < k + 1 {
        return Err(Error::Invalid(format!("A_(k,l) needs 1 <= l <= k < 2l and n > k, got k = {k}, l = {l}, n = {n}")));
    }
    let uu = ExactMatrix::outer(&[a.clone(), b.clone()]);
    let mut blocks = vec![uu; k - l + 1];
    if 2 * l - k - 1 > 0 {
        blocks.push(ExactMatrix::identity(2 * l - k - 1).scale(c));
    }
    let m = block_diag(&blocks)?;
    Ok(m.pad(n - m.n()))
}

/// `(det of the leading (k+1)×(k+1) block of f[A_{k,l}], f(c)^{2l−k−1}(f(a²)f(b²) − f(ab)²)^{k−l+1})`.
pub fn akl_det_sides(
    f: &PowerSum,
    k: usize,
    l: usize,
    a: &Rational,
    b: &Rational,
    c: &Rational,
) -> Result<(Rational, Rational)> {
    let m = akl_matrix(k, l, k + 1, a, b, c)?;
    let lhs = f.apply(&m)?.det();
    let fc = f.eval(c)?;
    let core = f.eval(&(a * a))? * f.eval(&(b * b))? - num_traits::pow(f.eval(&(a * b))?, 2);
    let rhs = num_traits::pow(fc, 2 * l - k - 1) * num_traits::pow(core, k - l + 1);
    Ok((lhs, rhs))
}

pub fn cosine_b4() -> FloatMatrix {
    FloatMatrix::from_fn(4, |i, j| ((i as f64 - j as f64) * PI / 4.0).cos())
}

pub fn bx0_matrix(x0: &Rational) -> ExactMatrix {
    ExactMatrix::ones(3).scale(x0).sub(&ExactMatrix::identity(3).scale(&(x0 * int(3)))).expect("same order")
}

/// `(det f[B(x₀)], (f(−2x₀) + 2f(x₀))(f(−2x₀) − f(x₀))²)`.
pub fn bx0_det_sides(f: &Function, x0: &Rational) -> Result<(Rational, Rational)> {
    let lhs = f.apply(&bx0_matrix(x0))?.det();
    let p = f.eval(&(x0 * int(-2)))?;
    let q = f.eval(x0)?;
    let rhs = (&p + &q * int(2)) * num_traits::pow(p - q, 2);
    Ok((lhs, rhs))
}

pub fn continuity_limit_matrix(p: &Rational, q: &Rational) -> ExactMatrix {
    ExactMatrix::from_fn(3, |i, j| if (i, j) == (2, 1) { q.clone() } else { p.clone() })
}

/// `(det, −p(p − q)²)` for the continuity limit matrix.
pub fn continuity_limit_det(p: &Rational, q: &Rational) -> (Rational, Rational) {
    let det = continuity_limit_matrix(p, q).det();
    (det, -(p * num_traits::pow(p - q, 2)))
}

fn exact_rows(rows: &[Vec<Q>]) -> Result<ExactMatrix> {
    ExactMatrix::from_rows(rows.iter().map(|r| r.iter().map(|x| x.0.clone()).collect()).collect())
}

fn block_sum_matrix(a: &ExactMatrix, b: &ExactMatrix, c: &ExactMatrix) -> Result<ExactMatrix> {
    let plus = block_diag(&[a.clone(), b.clone(), c.clone()])?;
    let minus = block_diag(&[a.clone(), b.neg(), c.clone()])?;
    let h = plus.n();
    Ok(ExactMatrix::from_fn(2 * h, |i, j| {
        let block = if (i < h) == (j < h) { &plus } else { &minus };
        block.get(i % h, j % h).clone()
    }))
}

fn bordered_matrix(b: &ExactMatrix, c: &Rational, m: usize) -> ExactMatrix {
    let n1 = b.n();
    ExactMatrix::from_fn(n1 + m, |i, j| if i < n1 && j < n1 { b.get(i, j).clone() } else { c.clone() })
}

/// Builds the named matrix and re-verifies its recorded properties.
pub fn canned(c: &Canned, tol: &Tolerances) -> Result<WitnessBundle> {
    canned_with(c, None, None, tol)
}

pub fn canned_in(c: &Canned, interval: Option<&Interval>, tol: &Tolerances) -> Result<WitnessBundle> {
    canned_with(c, None, interval, tol)
}

/// Like [`canned`] with an optional function applied and, when an interval
/// is given, a power-of-two rescaling into it. Only families whose
/// properties survive positive scaling are rescaled. Padding defaults to
/// `φ₁` and the cosine matrix to `ψ₂`; with those functions the image rank
/// is part of the claim.
pub fn canned_with(
    c: &Canned,
    function: Option<Function>,
    interval: Option<&Interval>,
    tol: &Tolerances,
) -> Result<WitnessBundle> {
    let mut claims = Vec::new();
    let mut function = function;
    let mut expected = None;
    let mut scalable = false;
    let matrix: AnyMatrix = match c {
        Canned::A4 | Canned::A6 => {
            let (m, r) = if matches!(c, Canned::A4) { (a4(), 2) } else { (a6(), 3) };
            require(m.rank() == r && m.is_psd(), || format!("{} is not PSD of rank {r}", c.name()))?;
            let image = phi1().apply(&m)?;
            let minors_nonzero = (1..=m.n()).all(|s| !image.leading(s).expect("in range").det().is_zero());
            require(minors_nonzero, || format!("a leading minor of phi_1[{}] vanishes", c.name()))?;
            claims.push(Claim::new("phi1_leading_minors_nonzero", true));
            expected = Some((r, RankRelation::Exactly));
            scalable = true;
            m.into()
        }
        Canned::Padding { l, n } => {
            let m = padding_matrix(*l, *n)?;
            require(m.rank() <= *l && m.is_psd(), || format!("padded matrix is not in P^{l}"))?;
            let f = function.take().unwrap_or_else(|| phi1().into());
            if f == Function::from(phi1()) {
                expected = Some(((*n).min(2 * l), RankRelation::Exactly));
            }
            function = Some(f);
            scalable = true;
            m.into()
        }
        Canned::Akl { k, l, n, a, b, c: cc } => {
            let m = akl_matrix(*k, *l, *n, &a.0, &b.0, &cc.0)?;
            require(m.rank() <= *l, || "A_(k,l) exceeds rank l".into())?;
            require(m.is_psd() == !cc.0.is_negative(), || "A_(k,l) positivity does not follow the sign of c".into())?;
            expected = Some((*l, RankRelation::AtMost));
            m.into()
        }
        Canned::Cosine { n } => {
            if *n < 4 {
                return Err(Error::Invalid("cosine matrix needs n >= 4".into()));
            }
            let m = cosine_b4().pad(n - 4);
            require(m.rank_with(tol) == 2 && m.is_psd_with(tol), || "B_4 is not PSD of rank 2".into())?;
            let psi2: Function = PowerSum::psi(int(2))?.into();
            let f = function.take().unwrap_or_else(|| psi2.clone());
            if f == psi2 {
                let det = f.apply(&m)?.leading(4)?.det().abs();
                require(det > 1e-6, || format!("psi_2[B_4] has determinant {det:e}"))?;
                claims.push(Claim::new("psi2_leading_det_above", 1e-6));
                expected = Some((4, RankRelation::Exactly));
            }
            function = Some(f);
            scalable = true;
            m.into()
        }
        Canned::BX0 { x0, n } => {
            if *n < 3 {
                return Err(Error::Invalid("B(x0) needs n >= 3".into()));
            }
            let m = bx0_matrix(&x0.0).pad(n - 3);
            let psd = !x0.0.is_positive();
            require(m.is_psd() == psd, || "B(x0) positivity does not follow the sign of x0".into())?;
            require(m.rank() <= 2, || "B(x0) exceeds rank 2".into())?;
            expected = Some((2, RankRelation::AtMost));
            m.into()
        }
        Canned::Continuity => {
            let m = ExactMatrix::from_i64_rows(&[&[2, 1, 1], &[1, 2, 0], &[1, 0, 2]])?;
            require(m.is_psd() && m.rank() == 3, || "continuity matrix is not positive definite".into())?;
            expected = Some((3, RankRelation::Exactly));
            scalable = true;
            m.into()
        }
        Canned::ContinuityLimit { p, q } => {
            let m = continuity_limit_matrix(&p.0, &q.0);
            let (det, formula) = continuity_limit_det(&p.0, &q.0);
            require(det == formula, || "continuity limit determinant differs from -p(p-q)^2".into())?;
            claims.push(Claim::new("determinant", det.to_string()));
            m.into()
        }
        Canned::BlockSum { a, b, c: cc } => {
            let (a, b, cc) = (exact_rows(a)?, exact_rows(b)?, exact_rows(cc)?);
            for (name, x) in [("A", &a), ("B", &b), ("C", &cc)] {
                if !x.is_psd() {
                    return Err(Error::Invalid(format!("block {name} is not PSD")));
                }
            }
            let m = block_sum_matrix(&a, &b, &cc)?;
            let sum = a.rank() + b.rank() + cc.rank();
            require(m.is_psd(), || "block sum is not PSD".into())?;
            claims.push(Claim::new("rank_sum", sum));
            expected = Some((sum, RankRelation::Exactly));
            m.into()
        }
        Canned::Bordered { b, c: cc, m: extra } => {
            let b = exact_rows(b)?;
            if *extra == 0 {
                return Err(Error::Invalid("bordered matrix needs m >= 1".into()));
            }
            let m = bordered_matrix(&b, &cc.0, *extra);
            let rhs = !cc.0.is_negative() && b.shift(&-cc.0.clone()).is_psd();
            require(m.is_psd() == rhs, || "bordered positivity differs from its Schur criterion".into())?;
            claims.push(Claim::new("schur_criterion", rhs));
            m.into()
        }
    };
    let matrix_expected = !matches!(c, Canned::Padding { .. } | Canned::Cosine { .. });
    if matrix_expected && function.is_some() {
        expected = None;
    }
    let (matrix, divisor) = match (interval, matrix) {
        (Some(iv), AnyMatrix::Exact(m)) if scalable => {
            let (m, d) = iv.fit(&m);
            (AnyMatrix::Exact(m), d)
        }
        (Some(iv), AnyMatrix::Float(m)) if scalable => {
            let d = iv.fitting_divisor(&rational_from_f64(m.max_abs())?);
            let inv = 1.0 / rational_to_f64(&d);
            (AnyMatrix::Float(m.scale(&inv)), d)
        }
        (_, m) => (m, Rational::one()),
    };
    let construction = Construction::Canned { canned: c.clone(), divisor: Q(divisor) };
    assemble(matrix, function, interval.cloned(), construction, claims, expected, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn phi1_rank(m: &ExactMatrix) -> usize {
        phi1().apply(m).unwrap().rank()
    }

    #[test]
    fn a4_and_a6() {
        let w = canned(&Canned::A4, &tol()).unwrap();
        assert_eq!(w.claimed_rank, 2);
        assert_eq!(w.claim("matrix_psd"), Some(&true.into()));
        assert_eq!(a4().rows()[0], vec![int(8), int(4), int(-2), int(6)]);
        assert_eq!(phi1_rank(&a4()), 4);
        assert_eq!(canned(&Canned::A6, &tol()).unwrap().claimed_rank, 3);
        assert_eq!(phi1_rank(&a6()), 6);
    }

    #[test]
    fn padding_ranks() {
        for (l, n) in [(4, 8), (3, 5), (2, 7), (5, 12), (5, 7)] {
            let w = canned(&Canned::Padding { l, n }, &tol()).unwrap();
            assert_eq!(w.claimed_rank, n.min(2 * l), "l={l} n={n}");
            assert!(w.matrix.rank(&tol()) <= l);
        }
        assert!(padding_matrix(1, 4).is_err());
    }

    #[test]
    fn bx0_example() {
        let w = canned(&Canned::BX0 { x0: Q(rat(-1, 4)), n: 3 }, &tol()).unwrap();
        let m = w.matrix.as_exact().unwrap();
        assert_eq!(m.get(0, 0), &rat(1, 2));
        assert_eq!(m.get(0, 1), &rat(-1, 4));
        assert_eq!(m.rank(), 2);
        assert!(m.is_psd());
    }

    #[test]
    fn cosine_is_float_and_full_rank() {
        let w = canned(&Canned::Cosine { n: 4 }, &tol()).unwrap();
        assert_eq!(w.subject().backend(), crate::Backend::Float);
        assert_eq!(w.subject().rank(&tol()), 4);
    }

    #[test]
    fn determinant_identities() {
        let f = PowerSum::from_i64_poly(&[0, 2, -1, 3]);
        for (k, l) in [(3, 2), (4, 3)] {
            let (lhs, rhs) = akl_det_sides(&f, k, l, &rat(1, 2), &rat(-2, 3), &rat(3, 5)).unwrap();
            assert_eq!(lhs, rhs);
        }
        let g: Function = PowerSum::from_i64_poly(&[1, -2, 0, 1]).into();
        let (lhs, rhs) = bx0_det_sides(&g, &rat(-1, 3)).unwrap();
        assert_eq!(lhs, rhs);
        let (det, formula) = continuity_limit_det(&int(3), &int(1));
        assert_eq!(det, formula);
        assert_eq!(det, int(-12));
    }

    #[test]
    fn block_sum_and_bordered_claims() {
        let q = |rows: &[&[i64]]| rows.iter().map(|r| r.iter().map(|&x| Q(int(x))).collect()).collect::<Vec<Vec<Q>>>();
        let w = canned(
            &Canned::BlockSum { a: q(&[&[1, 1], &[1, 1]]), b: q(&[&[2]]), c: q(&[&[0]]) },
            &tol(),
        )
        .unwrap();
        assert_eq!(w.claimed_rank, 2);
        let w = canned(&Canned::Bordered { b: q(&[&[3, 1], &[1, 3]]), c: Q(int(1)), m: 2 }, &tol()).unwrap();
        assert_eq!(w.claim("schur_criterion"), Some(&true.into()));
    }

    #[test]
    fn interval_scaling_for_a4() {
        let iv = Interval::symmetric(int(1)).unwrap();
        let w = canned_in(&Canned::A4, Some(&iv), &tol()).unwrap();
        let w = w.with_function(phi1().into(), &tol()).unwrap();
        assert_eq!(w.claimed_rank, 4);
        w.verify(&tol()).unwrap();
    }
}
