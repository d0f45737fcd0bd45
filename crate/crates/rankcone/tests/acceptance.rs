//! One line per acceptance criterion: `PASS` or `FAIL`, the elapsed time
//! and its budget. Exits nonzero if any criterion fails or overruns.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{binom, det_rows, horner, q, rank, subsets, submatrix};
use num_traits::{Signed, Zero};
use rand::Rng;
use rankcone::classify::{abs_monotone_power_sum, uniform_grid};
use rankcone::funcalg::deflation_sequence;
use rankcone::io::{qs, Q};
use rankcone::random::{self, trial_rng};
use rankcone::witness::{
    a4, a6, akl_det_sides, bx0_det_sides, canned, continuity_limit_det, continuity_limit_matrix, full_rank_search,
    multinomial_witness, padding_matrix, target_rank, vandermonde_rank1_witness, Canned, SearchConfig,
};
use rankcone::{
    block_diag, cone_member, AnyMatrix, ConeSpec, ExactMatrix, Interval, PowerSum, Rational, Role, SymMatrix, Tolerances,
};

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, what: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn tol() -> Tolerances {
    Tolerances::default()
}

fn rows(m: &ExactMatrix) -> Vec<Vec<Rational>> {
    m.rows()
}

fn rank_minors() -> Check {
    let mut checked = 0;
    for trial in 0..200 {
        let mut rng = trial_rng(1, trial);
        let n = rng.random_range(1..=6);
        let r = rng.random_range(1..=n);
        // entries stay in [-5, 5]: dense draws directly, low-rank ones as ±Σuuᵀ with |u| <= 1 and r <= 5
        let a = if r == 6 || rng.random_bool(0.5) {
            random::symmetric(&mut rng, n, 5, 3)
        } else {
            random::low_rank_symmetric(&mut rng, n, r, 1)
        };
        ensure(a.entries().all(|x| x.abs() <= q(5, 1)), || format!("trial {trial}: entry out of range"))?;
        let r0 = rank(&a);
        for r in 1..=n {
            let full = a.minors_rank_test(r, false).map_err(|e| e.to_string())?;
            let principal = a.minors_rank_test(r, true).map_err(|e| e.to_string())?;
            ensure(full == (r0 <= r) && principal == (r0 <= r), || {
                format!("trial {trial}: rank {r0}, r = {r}, full {full}, principal {principal}")
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (matrix, r) pairs"))
}

fn rank_one_round_trip() -> Check {
    let spec_for = |k| ConeSpec::new(6, 1, k, Interval::nonneg(), true).unwrap();
    let mut polys = 0;
    for k in 1..=3 {
        for exps in subsets(7, k) {
            let mut rng = trial_rng(2, polys);
            let mut c = vec![Rational::zero(); 7];
            for &e in &exps {
                c[e] = random::positive_rational(&mut rng, 5, 4);
            }
            let f = PowerSum::polynomial(&c);
            let spec = spec_for(k);
            for draw in 0..500 {
                let g = random::gram_in(&mut trial_rng(1000 + polys, draw), 6, 1, &spec.interval).map_err(|e| e.to_string())?;
                let image = f.apply(&g.matrix).map_err(|e| e.to_string())?;
                let m = cone_member(&image, &spec, Role::Target, &tol());
                ensure(m.member, || format!("{f}, draw {draw}: {}", m.detail))?;
            }
            let w = vandermonde_rank1_witness(&f, 6, &Interval::nonneg(), &tol()).map_err(|e| e.to_string())?;
            let exact = w.subject().as_exact().ok_or("vandermonde image is not exact")?;
            ensure(rank(exact) == k && w.claimed_rank == k, || format!("{f}: vandermonde rank {}", rank(exact)))?;
            polys += 1;
        }
    }
    Ok(format!("{polys} polynomials x 500 draws"))
}

fn binomial_bound() -> Check {
    let cases: [&[i64]; 5] = [&[1], &[0, 1], &[0, 0, 1], &[1, 1], &[0, 1, 1]];
    let mut done = 0;
    for l in [2usize, 3] {
        for (ci, coeffs) in cases.iter().enumerate() {
            let f = PowerSum::from_i64_poly(coeffs);
            let bound: u64 = f.integer_exponents().unwrap().iter().map(|&i| binom(i as u64 + l as u64 - 1, l as u64 - 1)).sum();
            ensure(target_rank(&f, l).unwrap() == bound, || format!("{f}, l = {l}: bound mismatch"))?;
            if bound > 8 {
                continue;
            }
            for draw in 0..200 {
                let g = random::gram_in(&mut trial_rng(30 + ci as u64 + 10 * l as u64, draw), 8, l, &Interval::nonneg())
                    .map_err(|e| e.to_string())?;
                let r = rank(&f.apply(&g.matrix).unwrap());
                ensure(r as u64 <= bound, || format!("{f}, l = {l}, draw {draw}: rank {r} > {bound}"))?;
            }
            let w = multinomial_witness(&f, l, 8, &Interval::nonneg(), &tol()).map_err(|e| e.to_string())?;
            let r = rank(w.subject().as_exact().ok_or("multinomial image is not exact")?);
            ensure(r as u64 == bound, || format!("{f}, l = {l}: witness rank {r}, bound {bound}"))?;
            done += 1;
        }
    }
    Ok(format!("{done} (f, l) cases"))
}

fn rank_doubling() -> Check {
    let phi1 = PowerSum::phi(q(1, 1)).unwrap();
    let image_rank = |m: &ExactMatrix| rank(&phi1.apply(m).unwrap());
    let (m4, m6) = (a4(), a6());
    ensure(rank(&m4) == 2 && image_rank(&m4) == 4, || "A4 ranks".into())?;
    ensure(rank(&m6) == 3 && image_rank(&m6) == 6, || "A6 ranks".into())?;
    ensure(common::is_psd(&m4) && common::is_psd(&m6), || "A4 or A6 not PSD".into())?;
    for (n, l) in [(8usize, 4usize), (5, 3)] {
        let p = padding_matrix(l, n).map_err(|e| e.to_string())?;
        let (r, ri) = (rank(&p), image_rank(&p));
        ensure(p.n() == n && r <= l && ri == n.min(2 * l), || format!("padding ({n},{l}): ranks {r} and {ri}"))?;
        let w = canned(&Canned::Padding { l, n }, &tol()).map_err(|e| e.to_string())?;
        ensure(w.claimed_rank == ri, || format!("padding ({n},{l}): claimed {}", w.claimed_rank))?;
    }
    Ok("A4, A6, (8,4), (5,3)".into())
}

fn determinant_identities() -> Check {
    let mut count = 0;
    for (k, l) in [(3usize, 2usize), (4, 3)] {
        for t in 0..100 {
            let mut rng = trial_rng(50 + k as u64, t);
            let (a, b, c) = (random::rational(&mut rng, 3, 4), random::rational(&mut rng, 3, 4), random::rational(&mut rng, 3, 4));
            let terms = rng.random_range(1..=4);
            let f = random::polynomial(&mut rng, terms, 5, false, true);
            let (lhs, rhs) = akl_det_sides(&f, k, l, &a, &b, &c).map_err(|e| e.to_string())?;
            let m = rankcone::witness::akl_matrix(k, l, k + 1, &a, &b, &c).unwrap();
            ensure(lhs == rhs && lhs == det_rows(rows(&f.apply(&m).unwrap())), || {
                format!("A_({k},{l}) with f = {f}, (a,b,c) = ({a},{b},{c})")
            })?;
            count += 1;
        }
    }
    for t in 0..100 {
        let mut rng = trial_rng(60, t);
        let x0 = random::rational(&mut rng, 2, 4);
        let terms = rng.random_range(1..=4);
        let f = random::polynomial(&mut rng, terms, 5, false, false);
        let (lhs, rhs) = bx0_det_sides(&f.clone().into(), &x0).map_err(|e| e.to_string())?;
        ensure(lhs == rhs, || format!("B(x0) with x0 = {x0}, f = {f}"))?;
        let (p, v) = (random::rational(&mut rng, 5, 6), random::rational(&mut rng, 5, 6));
        let (det, formula) = continuity_limit_det(&p, &v);
        let oracle = det_rows(rows(&continuity_limit_matrix(&p, &v)));
        ensure(det == formula && det == oracle, || format!("continuity limit at (p, q) = ({p}, {v})"))?;
        count += 2;
    }
    Ok(format!("{count} identities"))
}

fn bordered_and_block_sum() -> Check {
    for t in 0..200 {
        let mut rng = trial_rng(70, t);
        let size = rng.random_range(1..=4);
        let r = rng.random_range(1..=size);
        let b = random::psd(&mut rng, size, r);
        let c = random::rational(&mut rng, 3, 4);
        let m = rng.random_range(1..=2);
        let full = SymMatrix::from_fn(size + m, |i, j| if i < size && j < size { b.get(i, j).clone() } else { c.clone() });
        let criterion = !c.is_negative() && common::is_psd(&b.shift(&-c.clone()));
        ensure(common::is_psd(&full) == criterion, || format!("trial {t}: bordered criterion at c = {c}"))?;
        let bundle = canned(&Canned::Bordered { b: b.rows().iter().map(|r| qs(r)).collect(), c: Q(c.clone()), m }, &tol());
        ensure(bundle.is_ok(), || format!("trial {t}: {}", bundle.unwrap_err()))?;
    }
    for t in 0..200 {
        let mut rng = trial_rng(71, t);
        let size = rng.random_range(1..=3);
        let blocks: Vec<ExactMatrix> = (0..3)
            .map(|_| {
                let r = rng.random_range(1..=size);
                random::psd(&mut rng, size, r)
            })
            .collect();
        let plus = block_diag(&blocks).unwrap();
        let minus = block_diag(&[blocks[0].clone(), blocks[1].neg(), blocks[2].clone()]).unwrap();
        let h = plus.n();
        let m = SymMatrix::from_fn(2 * h, |i, j| if (i < h) == (j < h) { plus.get(i % h, j % h) } else { minus.get(i % h, j % h) }.clone());
        let want: usize = blocks.iter().map(rank).sum();
        ensure(m.is_psd() && rank(&m) == want, || format!("trial {t}: block sum rank {} vs {want}", rank(&m)))?;
    }
    Ok("200 bordered, 200 block sums".into())
}

fn non_integer_dichotomy() -> Check {
    let n = 4;
    let square = PowerSum::monomial(q(1, 1), 2);
    let mut worst = 0;
    for seed in 0..200 {
        let out = full_rank_search(&SearchConfig::new(square.clone(), q(1, 1), n, q(1, 2), seed)).map_err(|e| e.to_string())?;
        ensure(!out.found() && out.max_rank <= 3, || format!("x^2, seed {seed}: rank {}", out.max_rank))?;
        worst = worst.max(out.max_rank);
    }
    let mut found = Vec::new();
    for alpha in [q(5, 2), q(3, 1)] {
        let f = PowerSum::plain(alpha.clone()).unwrap();
        let out = full_rank_search(&SearchConfig::new(f, q(1, 1), n, q(1, 2), 0)).map_err(|e| e.to_string())?;
        let w = out.witness.ok_or_else(|| format!("alpha = {alpha}: no full-rank draw in {} trials", out.trials))?;
        ensure(out.trials <= 1000, || format!("alpha = {alpha}: {} trials", out.trials))?;
        match w.subject() {
            AnyMatrix::Float(m) => {
                let scale = m.max_abs().powi(n as i32);
                ensure(m.rank_with(&tol()) == n && m.det().abs() > 1e-6 * scale, || format!("alpha = {alpha}: det {}", m.det()))?;
            }
            AnyMatrix::Exact(m) => ensure(rank(m) == n, || format!("alpha = {alpha}: exact rank {}", rank(m)))?,
        }
        found.push(format!("{alpha} after {}", out.trials));
    }
    Ok(format!("x^2 max rank {worst}; found {}", found.join(", ")))
}

fn absolute_monotonicity() -> Check {
    let mut c = vec![Rational::zero(); 7];
    let mut fact = 1i64;
    for (j, x) in c.iter_mut().enumerate() {
        fact *= (j as i64).max(1);
        *x = q(1, fact);
    }
    let exp6 = PowerSum::polynomial(&c);
    let grid = uniform_grid(&q(0, 1), &q(1, 1), 64);
    let r = abs_monotone_power_sum(&exp6, 6, &grid, &tol()).map_err(|e| e.to_string())?;
    ensure(r.pass && r.checks > 0, || "truncated exponential failed".into())?;
    let cubic = PowerSum::from_i64_poly(&[0, 1, 0, -1]);
    let r = abs_monotone_power_sum(&cubic, 6, &grid, &tol()).map_err(|e| e.to_string())?;
    let fail = r.failures.first().ok_or("x - x^3 passed")?;
    let p = &fail.params;
    ensure(!r.pass && p.get("m").is_some() && p.get("x").is_some() && p.get("h").is_some(), || "no triple reported".into())?;
    let w = canned(&Canned::Cosine { n: 4 }, &tol()).map_err(|e| e.to_string())?;
    ensure(w.claimed_rank == 4 && w.subject().rank(&tol()) == 4, || "psi_2[B_4] is singular".into())?;
    Ok(format!("x - x^3 fails at (m, x, h) = ({}, {}, {})", p["m"], p["x"], p["h"]))
}

fn total_positivity() -> Check {
    let mut minors = 0;
    for t in 0..50 {
        let mut rng = trial_rng(90, t);
        let x = random::increasing_positive(&mut rng, 4, 4, 4);
        let mut alpha: Vec<usize> = Vec::new();
        while alpha.len() < 4 {
            let a = rng.random_range(0..=9);
            if !alpha.contains(&a) {
                alpha.push(a);
            }
        }
        alpha.sort_unstable();
        let gv: Vec<Vec<Rational>> = x.iter().map(|xi| alpha.iter().map(|&a| num_traits::pow(xi.clone(), a)).collect()).collect();
        for s in 1..=4 {
            for ri in subsets(4, s) {
                for ci in subsets(4, s) {
                    let d = det_rows(submatrix(&gv, &ri, &ci));
                    ensure(d.is_positive(), || format!("x = {x:?}, alpha = {alpha:?}: minor {ri:?} x {ci:?} = {d}"))?;
                    minors += 1;
                }
            }
        }
    }
    Ok(format!("{minors} minors"))
}

fn deflation() -> Check {
    let mut evals = 0;
    for t in 0..50 {
        let mut rng = trial_rng(100, t);
        let terms = rng.random_range(1..=5);
        let f = random::polynomial(&mut rng, terms, 8, false, false);
        let steps = deflation_sequence(&f, f.num_terms()).map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let x = loop {
                let x = random::rational(&mut rng, 3, 7);
                if !x.is_zero() {
                    break x;
                }
            };
            let mut prev = horner(&f, &x);
            for s in &steps {
                let xr = num_traits::pow(x.clone(), s.order as usize);
                let next = s.result.eval(&x).map_err(|e| e.to_string())?;
                ensure(next == (&prev - &s.extracted * &xr) / &xr, || format!("{f} at {x}, order {}", s.order))?;
                prev = next;
                evals += 1;
            }
        }
    }
    Ok(format!("{evals} step identities"))
}

struct Criterion {
    name: &'static str,
    budget: u64,
    run: fn() -> Check,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { name: "rank-minor equivalence", budget: 30, run: rank_minors },
        Criterion { name: "rank-one power-sum round trip", budget: 60, run: rank_one_round_trip },
        Criterion { name: "binomial rank bound and sharpness", budget: 120, run: binomial_bound },
        Criterion { name: "phi1 rank doubling and padding", budget: 5, run: rank_doubling },
        Criterion { name: "determinant factorizations", budget: 30, run: determinant_identities },
        Criterion { name: "bordered criterion and block-sum rank", budget: 30, run: bordered_and_block_sum },
        Criterion { name: "non-integer power dichotomy at n=4", budget: 60, run: non_integer_dichotomy },
        Criterion { name: "absolute monotonicity surrogate", budget: 10, run: absolute_monotonicity },
        Criterion { name: "generalized Vandermonde total positivity", budget: 30, run: total_positivity },
        Criterion { name: "deflation identity", budget: 30, run: deflation },
    ];
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(c.budget);
        let (status, detail) = match (&result, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("over budget; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} {:>2} {:<42} {:>7.2}s / {:>3}s  {detail}", i + 1, c.name, elapsed.as_secs_f64(), c.budget);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
