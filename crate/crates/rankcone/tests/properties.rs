mod common;

use common::{binom, horner, q};
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rankcone::classify::{
    abs_monotone_power_sum, classify, classify_rank1, continuity_limit_test, lattice_grid, min_guaranteed_rank,
    special_rank2_spot_check, uniform_grid, ClassifyOptions, Outcome, SampledFunction, SpotCheck,
};
use rankcone::funcalg::{deflation_sequence, Function};
use rankcone::io::qs;
use rankcone::matrix::bordered;
use rankcone::witness::{
    akl_det_sides, bx0_det_sides, canned, continuity_limit_det, embed_2x2, multinomial_witness, pgvm_alpha,
    special_rank2, target_rank, vandermonde_with_nodes, Canned, MultiIndexSet,
};
use rankcone::{
    block_diag, ConeSpec, Dense, ExactMatrix, Flavor, FloatMatrix, Interval, PowerSum, Rational, SymMatrix, Tolerances,
};

fn tol() -> Tolerances {
    Tolerances::default()
}

fn rational(bound: i64, den: i64) -> impl Strategy<Value = Rational> {
    (-bound * den..=bound * den, 1..=den).prop_map(|(p, d)| q(p, d))
}

fn nonzero_rational(bound: i64, den: i64) -> impl Strategy<Value = Rational> {
    rational(bound, den).prop_filter("nonzero", |x| !x.is_zero())
}

fn positive_rational(bound: i64, den: i64) -> impl Strategy<Value = Rational> {
    (1..=bound * den, 1..=den).prop_map(|(p, d)| q(p, d))
}

fn symmetric(n: usize, bound: i64) -> impl Strategy<Value = ExactMatrix> {
    proptest::collection::vec(rational(bound, 3), n * n).prop_map(move |v| SymMatrix::from_fn(n, |i, j| v[i * n + j].clone()))
}

/// `Σ ±uⱼuⱼᵀ` with `r` small integer vectors.
fn low_rank(n: usize, r: usize, bound: i64) -> impl Strategy<Value = ExactMatrix> {
    proptest::collection::vec((proptest::collection::vec(-bound..=bound, n), any::<bool>()), r).prop_map(move |us| {
        us.iter().fold(ExactMatrix::zeros(n), |acc, (u, sign)| {
            let u: Vec<Rational> = u.iter().map(|&x| q(x, 1)).collect();
            let s = if *sign { q(1, 1) } else { q(-1, 1) };
            acc.add(&ExactMatrix::outer(&u).scale(&s)).unwrap()
        })
    })
}

fn any_symmetric(max_n: usize) -> impl Strategy<Value = ExactMatrix> {
    (1..=max_n, 1..=max_n, any::<bool>()).prop_flat_map(|(n, r, dense)| {
        if dense {
            symmetric(n, 5).boxed()
        } else {
            low_rank(n, r.min(n), 2).boxed()
        }
    })
}

fn psd(n: usize) -> impl Strategy<Value = ExactMatrix> {
    (1..=n).prop_flat_map(move |r| {
        proptest::collection::vec(proptest::collection::vec(rational(3, 2), n), r)
            .prop_map(|vs| ExactMatrix::gram(&vs).unwrap())
    })
}

/// Polynomial from `(exponent, coeff)` pairs; repeated exponents add up.
fn poly_from(pairs: &[(u32, Rational)]) -> PowerSum {
    let deg = pairs.iter().map(|p| p.0).max().unwrap_or(0) as usize;
    let mut c = vec![Rational::zero(); deg + 1];
    for (e, x) in pairs {
        c[*e as usize] += x;
    }
    PowerSum::polynomial(&c)
}

fn polynomial(max_terms: usize, max_exp: u32, positive: bool) -> impl Strategy<Value = PowerSum> {
    let coeff = if positive { positive_rational(5, 4).boxed() } else { nonzero_rational(5, 4).boxed() };
    proptest::collection::vec((0..=max_exp, coeff), 1..=max_terms)
        .prop_map(|p| poly_from(&p))
        .prop_filter("nonzero", |f| !f.is_zero())
}

fn distinct_positive(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::btree_set((1i64..=40, 1i64..=4).prop_map(|(p, d)| q(p, d)), n)
        .prop_map(|s| s.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn minor_tests_agree_with_rank(a in any_symmetric(5)) {
        let r0 = common::rank(&a);
        prop_assert_eq!(a.rank(), r0);
        for r in 1..=a.n() {
            let full = a.minors_rank_test(r, false).unwrap();
            let principal = a.minors_rank_test(r, true).unwrap();
            prop_assert_eq!(full, r0 <= r);
            prop_assert_eq!(principal, r0 <= r);
        }
    }

    #[test]
    fn schur_product_is_psd((a, b) in (1usize..=6).prop_flat_map(|n| (psd(n), psd(n)))) {
        let h = a.hadamard(&b).unwrap();
        prop_assert!(h.is_psd());
        if h.n() <= 5 {
            prop_assert!(common::is_psd(&h));
        }
    }

    #[test]
    fn rank_one_division_keeps_rank(
        (a, v) in (1usize..=6, 1usize..=3).prop_flat_map(|(n, r)| (
            prop_oneof![symmetric(n, 5), low_rank(n, r.min(n), 2)],
            proptest::collection::vec(nonzero_rational(4, 3), n),
        ))
    ) {
        let prod = a.hadamard(&ExactMatrix::outer(&v)).unwrap();
        prop_assert_eq!(prod.rank(), common::rank(&a));
    }

    #[test]
    fn bordered_criterion((b, c, m) in (psd(4).prop_union(psd(2)), rational(3, 4), 1usize..=2)) {
        let n1 = b.n();
        let q_block = Dense::from_fn(n1, m, |_, _| c.clone());
        let full = bordered(&b, &q_block, &SymMatrix::from_fn(m, |_, _| c.clone())).unwrap();
        let criterion = !c.is_negative() && b.shift(&-c.clone()).is_psd();
        prop_assert_eq!(common::is_psd(&full), criterion);
        prop_assert_eq!(full.is_psd(), criterion);
        let rows = b.rows().into_iter().map(|r| qs(&r)).collect();
        let w = canned(&Canned::Bordered { b: rows, c: rankcone::io::Q(c.clone()), m }, &tol()).unwrap();
        prop_assert!(w.verify(&tol()).is_ok());
    }

    #[test]
    fn block_sum_rank_adds((a, b, c) in (1usize..=3).prop_flat_map(|n| (psd(n), psd(n), psd(n)))) {
        let plus = block_diag(&[a.clone(), b.clone(), c.clone()]).unwrap();
        let minus = block_diag(&[a.clone(), b.neg(), c.clone()]).unwrap();
        let h = plus.n();
        let mut rows = plus.rows();
        for (i, r) in rows.iter_mut().enumerate() {
            r.extend(minus.rows()[i].iter().cloned());
        }
        for i in 0..h {
            let mut r = minus.rows()[i].clone();
            r.extend(plus.rows()[i].iter().cloned());
            rows.push(r);
        }
        let m = SymMatrix::from_rows(rows).unwrap();
        prop_assert!(m.is_psd());
        prop_assert_eq!(common::rank(&m), common::rank(&a) + common::rank(&b) + common::rank(&c));
        let as_q = |x: &ExactMatrix| x.rows().into_iter().map(|r| qs(&r)).collect();
        let w = canned(&Canned::BlockSum { a: as_q(&a), b: as_q(&b), c: as_q(&c) }, &tol()).unwrap();
        prop_assert_eq!(w.claimed_rank, m.rank());
    }

    #[test]
    fn float_rank_matches_exact(a in (1usize..=8, 1usize..=2, any::<bool>()).prop_flat_map(|(n, r, dense)| {
        if dense { symmetric(n, 10).boxed() } else { low_rank(n, r, 2).boxed() }
    })) {
        let f: FloatMatrix = a.to_float();
        prop_assert_eq!(f.rank_with(&tol()), common::rank(&a));
    }

    #[test]
    fn deflation_identity(f in polynomial(5, 8, false), xs in proptest::collection::vec(nonzero_rational(3, 5), 8)) {
        let k = f.num_terms();
        let steps = deflation_sequence(&f, k).unwrap();
        prop_assert_eq!(steps.len(), k);
        for x in &xs {
            let mut prev = horner(&f, x);
            for s in &steps {
                prop_assert_eq!(s.divisor, Flavor::Plain);
                let xr = num_traits::pow(x.clone(), s.order as usize);
                let next = s.result.eval(x).unwrap();
                prop_assert_eq!(&next, &((&prev - &s.extracted * &xr) / &xr));
                prev = next;
            }
            prop_assert!(prev.is_zero());
        }
    }

    #[test]
    fn high_differences_of_polynomials_vanish(
        f in polynomial(4, 5, false), x in rational(3, 4), h in nonzero_rational(2, 4), extra in 1u32..=3,
    ) {
        let d = f.degree().unwrap_or(0);
        let v = f.forward_difference(&x, &h, d + extra).unwrap();
        prop_assert!(v.is_zero());
    }

    #[test]
    fn flavors_have_parity(num in 0i64..=40, den in 1i64..=4, x in -8.0f64..8.0, xq in rational(4, 4)) {
        let alpha = q(num, den);
        let phi = PowerSum::phi(alpha.clone()).unwrap();
        let psi = PowerSum::psi(alpha.clone()).unwrap();
        prop_assert_eq!(phi.eval(&x).unwrap(), phi.eval(&-x).unwrap());
        prop_assert_eq!(psi.eval(&-x).unwrap(), -psi.eval(&x).unwrap());
        if alpha.is_integer() {
            prop_assert_eq!(phi.eval(&xq).unwrap(), phi.eval(&-xq.clone()).unwrap());
            prop_assert_eq!(psi.eval(&-xq.clone()).unwrap(), -psi.eval(&xq).unwrap());
        }
    }

    #[test]
    fn apply_commutes_with_principal_submatrix(
        f in polynomial(4, 4, false), a in symmetric(5, 3), idx in proptest::collection::btree_set(0usize..5, 1..=5),
    ) {
        let idx: Vec<usize> = idx.into_iter().collect();
        let lhs = f.apply(&a.principal(&idx).unwrap()).unwrap();
        let rhs = f.apply(&a).unwrap().principal(&idx).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rank_one_verdict_matches_minimum_rank(f in polynomial(6, 6, false), k in 1usize..=5) {
        let spec = ConeSpec::new(6, 1, k, Interval::nonneg(), false).unwrap();
        let v = classify_rank1(&f, &spec, &ClassifyOptions::default()).unwrap();
        let bound = min_guaranteed_rank(&f, 1).unwrap();
        prop_assert_eq!(v.outcome == Outcome::Preserves, bound <= k as u64);
        if v.outcome == Outcome::Violates {
            let w = v.witness.unwrap();
            prop_assert!(w.verify(&tol()).is_ok());
            prop_assert!(w.violates(&spec, &tol()).unwrap().is_some());
        }
    }

    #[test]
    fn positive_scaling_keeps_the_outcome(
        f in polynomial(3, 4, false),
        c in positive_rational(4, 3),
        (n, l, k) in (2usize..=5).prop_flat_map(|n| (Just(n), 1..=n.min(2), 1..=n)),
        symmetric_interval in any::<bool>(),
        positive in any::<bool>(),
    ) {
        let iv = if symmetric_interval { Interval::symmetric(q(1, 1)).unwrap() } else { Interval::nonneg() };
        let spec = ConeSpec::new(n, l, k, iv, positive).unwrap();
        let opts = ClassifyOptions { gram_trials: 16, search_trials: 50, ..ClassifyOptions::default() };
        let a = classify(&Function::from(f.clone()), &spec, &opts).unwrap();
        let b = classify(&Function::from(f.scale(&c)), &spec, &opts).unwrap();
        prop_assert_eq!(a.outcome, b.outcome);
    }

    #[test]
    fn nonnegative_coefficients_pass_the_surrogates(f in polynomial(4, 7, true), n in 2usize..=8) {
        let grid = uniform_grid(&q(0, 1), &q(1, 1), 24);
        prop_assert!(abs_monotone_power_sum(&f, 8, &grid, &tol()).unwrap().pass);
        let s = SampledFunction::<Rational>::sample(&f.clone().into(), lattice_grid(&q(1, 64), 0, 63), None).unwrap();
        let cfg = SpotCheck { trials: 12, seed: n as u64 };
        prop_assert!(special_rank2_spot_check(&s, n, &cfg, &tol()).unwrap().pass);
    }

    #[test]
    fn a_negative_coefficient_is_caught(f in polynomial(5, 7, false)) {
        prop_assume!(!f.coefficients_nonneg());
        // on a fine grid at the origin the lowest negative order dominates Δ^m
        let grid = uniform_grid(&q(0, 1), &q(1, 1 << 16), 16);
        let report = abs_monotone_power_sum(&f, 8, &grid, &tol()).unwrap();
        prop_assert!(!report.pass);
    }

    #[test]
    fn jump_at_origin_passes_special_checks_but_not_continuity(
        p in positive_rational(4, 4), frac in 1i64..=15, g in polynomial(3, 4, true), n in 2usize..=6,
    ) {
        let value = &p * q(frac, 16);
        let f = PowerSum::constant(value.clone())
            .add(&PowerSum::phi(q(0, 1)).unwrap().scale(&(&p - &value)))
            .add(&g.sub(&PowerSum::constant(g.constant_term().clone())));
        prop_assert_eq!(f.value_at_zero(), &value);
        prop_assert_eq!(f.right_limit_at_zero(), p.clone());
        let s = SampledFunction::<Rational>::sample(&f.clone().into(), lattice_grid(&q(1, 32), 0, 31), None).unwrap();
        let cfg = SpotCheck { trials: 12, seed: 1 };
        prop_assert!(special_rank2_spot_check(&s, n, &cfg, &tol()).unwrap().pass);
        // any jump at the origin is caught from order 3 on
        prop_assert!(!continuity_limit_test(&f).pass);
        let continuous = f.add(&PowerSum::constant(&p - &value)).sub(&PowerSum::phi(q(0, 1)).unwrap().scale(&(&p - &value)));
        prop_assert!(continuity_limit_test(&continuous).pass);

        let over = PowerSum::constant(&p + &value).add(&PowerSum::phi(q(0, 1)).unwrap().scale(&-value.clone()));
        prop_assert!(!continuity_limit_test(&over).pass);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn vandermonde_attains_term_count(f in polynomial(6, 6, false), v in distinct_positive(6)) {
        let w = vandermonde_with_nodes(&f, &v, &Interval::nonneg(), &tol()).unwrap();
        prop_assert_eq!(w.claimed_rank, f.num_terms());
        prop_assert_eq!(w.verify(&tol()).unwrap().actual, f.num_terms());
    }

    #[test]
    fn multinomial_attains_binomial_bound(f in polynomial(3, 3, true), l in 1usize..=3) {
        let bound = target_rank(&f, l).unwrap();
        let expected: u64 = f.integer_exponents().unwrap().iter().map(|&i| binom(u64::from(i) + l as u64 - 1, l as u64 - 1)).sum();
        prop_assert_eq!(bound, expected);
        prop_assume!(bound <= 8);
        let w = multinomial_witness(&f, l, 8, &Interval::nonneg(), &tol()).unwrap();
        prop_assert_eq!(w.claimed_rank as u64, bound);
        prop_assert!(w.matrix.rank(&tol()) <= l);
        prop_assert!(w.verify(&tol()).is_ok());
    }

    #[test]
    fn special_rank_two_identity(f in polynomial(4, 5, false), a in rational(2, 3), u in proptest::collection::vec(rational(2, 3), 2..=6)) {
        let w = special_rank2(&a, &u, &f, None, &tol()).unwrap();
        let nonzero = w.claim("nonzero_d").and_then(|v| v.as_u64()).unwrap() as usize;
        prop_assert!(w.subject().rank(&tol()) <= nonzero);
        prop_assert!(nonzero <= f.degree().unwrap_or(0) as usize + 1);
    }

    #[test]
    fn embedding_keeps_the_block(x in positive_rational(3, 4), y in positive_rational(3, 4), t in -8i64..=8, n in 2usize..=6) {
        // |b| <= min(a, c) <= √(ac)
        let b = (&x).min(&y) * q(t, 8);
        let m = SymMatrix::from_rows(vec![vec![x.clone(), b.clone()], vec![b, y.clone()]]).unwrap();
        let iv = if t < 0 { Interval::real_line() } else { Interval::nonneg() };
        let w = embed_2x2(&m, n, &iv, &tol()).unwrap();
        let a = w.matrix.as_exact().unwrap();
        prop_assert!(common::is_psd(a));
        prop_assert!(common::rank(a) <= 2);
        prop_assert_eq!(a.leading(2).unwrap(), m);
    }

    #[test]
    fn pgvm_exponents_separate(degrees in proptest::collection::btree_set(0u32..=4, 1..=3), l in 2usize..=3) {
        let degrees: Vec<u32> = degrees.into_iter().collect();
        let mset = MultiIndexSet::for_degrees(l, &degrees).unwrap();
        let found = pgvm_alpha(&mset, &vec![1; l - 1]).unwrap();
        for w in found.alpha.windows(2) {
            prop_assert!(w[1] > w[0]);
        }
        let mut dots = found.dots.clone();
        dots.sort_unstable();
        dots.dedup();
        prop_assert_eq!(dots.len(), mset.len());
        let nodes: Vec<Rational> = (1..=mset.len() as i64).map(|i| q(i, 1)).collect();
        let gv: Vec<Vec<Rational>> = nodes.iter().map(|x| found.dots.iter().map(|&d| num_traits::pow(x.clone(), d as usize)).collect()).collect();
        prop_assert!(!common::det_rows(gv).is_zero());
    }

    #[test]
    fn akl_determinant_factors(
        (k, l) in prop_oneof![Just((3usize, 2usize)), Just((4, 3)), Just((2, 2)), Just((5, 3))],
        a in rational(2, 3), b in rational(2, 3), c in rational(2, 3),
        f in polynomial(3, 4, false),
    ) {
        let f = f.sub(&PowerSum::constant(f.constant_term().clone()));
        let (lhs, rhs) = akl_det_sides(&f, k, l, &a, &b, &c).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bx0_determinant_factors(x0 in nonzero_rational(2, 4), f in polynomial(4, 5, false)) {
        let (lhs, rhs) = bx0_det_sides(&f.into(), &x0).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn continuity_determinant_factors(p in rational(5, 4), v in rational(5, 4)) {
        let (det, formula) = continuity_limit_det(&p, &v);
        let m = rankcone::witness::continuity_limit_matrix(&p, &v);
        prop_assert_eq!(&det, &common::det_rows(m.rows()));
        prop_assert_eq!(det, formula);
    }
}
