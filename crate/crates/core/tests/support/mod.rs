//! Seeded property suites shared by the `properties` and `acceptance` targets.
//!
//! Each suite drives a proptest runner from a fixed seed and returns the
//! first counterexample as text.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use ibig::IBig;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use torsionlab::arith::mersenne_exponent;
use torsionlab::decomp::{check_certificate, is_strongly_totaro_decomposable, is_totaro_decomposable};
use torsionlab::generators::{GeneratorLabel, GeneratorSet};
use torsionlab::sublattice::{min_valuation_scan, top_degree_gcd, OracleOptions, ScanOptions};
use torsionlab::verify::{run_suite, Suite, VerifyOptions, DEFAULT_SEED};
use torsionlab::{Monomial, RingContext, RingElement};

pub type Outcome = Result<(), String>;

pub fn runner(seed: u64, cases: u32) -> TestRunner {
    let mut bytes = [0u8; 32];
    for (k, chunk) in bytes.chunks_mut(8).enumerate() {
        chunk.copy_from_slice(&seed.wrapping_add(k as u64).to_le_bytes());
    }
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &bytes))
}

/// `(mask, tpow, coeff)` triples; `mask` ranges over subsets of `[1, n-1]`.
fn arb_terms(n: usize, max_terms: usize) -> impl Strategy<Value = Vec<(u64, u32, i64)>> {
    let masks = 1u64 << (n - 1);
    prop::collection::vec((0..masks, 0..n as u32, -9i64..=9), 0..=max_terms)
}

fn build(ctx: &Arc<RingContext>, terms: &[(u64, u32, i64)]) -> RingElement {
    let terms = terms.iter().map(|&(mask, tpow, k)| {
        let indices: Vec<usize> = (1..ctx.n()).filter(|i| mask >> (i - 1) & 1 == 1).collect();
        (Monomial::new(&indices, tpow), IBig::from(k))
    });
    RingElement::from_terms(ctx, terms).expect("basis terms")
}

fn context(n: usize) -> Arc<RingContext> {
    RingContext::new(n).expect("valid rank")
}

/// Commutativity, associativity, distributivity and the unit.
pub fn ring_axioms(seed: u64) -> Outcome {
    let strat = (3usize..=7).prop_flat_map(|n| (Just(n), arb_terms(n, 4), arb_terms(n, 4), arb_terms(n, 4)));
    runner(seed, 96)
        .run(&strat, |(n, a, b, c)| {
            let ctx = context(n);
            let (a, b, c) = (build(&ctx, &a), build(&ctx, &b), build(&ctx, &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &RingElement::one(&ctx), a.clone());
            prop_assert!(a.try_sub(&a).unwrap().is_zero());
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Products of homogeneous elements are homogeneous of the summed degree, and
/// vanish above the top degree.
pub fn grading(seed: u64) -> Outcome {
    let strat = (3usize..=7).prop_flat_map(|n| (Just(n), arb_terms(n, 3), arb_terms(n, 3)));
    runner(seed ^ 1, 96)
        .run(&strat, |(n, a, b)| {
            let ctx = context(n);
            let (a, b) = (build(&ctx, &a), build(&ctx, &b));
            for da in 0..=ctx.dim_x() {
                let pa = a.homogeneous_part(da);
                for db in 0..=ctx.dim_x() {
                    let p = &pa * &b.homogeneous_part(db);
                    if p.is_zero() {
                        continue;
                    }
                    prop_assert!(p.is_homogeneous());
                    prop_assert_eq!(p.degree(), Some(da + db));
                    prop_assert!(da + db <= ctx.dim_x());
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// A word in the generators reduces to the same normal form in any order.
pub fn reduction_confluence(seed: u64) -> Outcome {
    let strat = (3usize..=8).prop_flat_map(|n| {
        (Just(n), prop::collection::vec(0..n, 2..9).prop_flat_map(|w| (Just(w.clone()), Just(w).prop_shuffle())))
    });
    runner(seed ^ 2, 128)
        .run(&strat, |(n, (word, shuffled))| {
            let ctx = context(n);
            let gen = |i: usize| if i == 0 { RingElement::gen_t(&ctx) } else { RingElement::gen_e(&ctx, i).unwrap() };
            let left = word.iter().fold(RingElement::one(&ctx), |acc, &i| &acc * &gen(i));
            let right = shuffled.iter().rev().fold(RingElement::one(&ctx), |acc, &i| &gen(i) * &acc);
            prop_assert_eq!(&left, &right);
            let es: Vec<usize> = word.iter().copied().filter(|&i| i > 0).collect();
            let tpow = word.iter().filter(|&&i| i == 0).count() as u32;
            let direct = es.iter().try_fold(RingElement::one(&ctx), |acc, &i| acc.mul_e(i)).unwrap();
            let direct = (0..tpow).fold(direct, |acc, _| acc.mul_t());
            prop_assert_eq!(&left, &direct);
            prop_assert_eq!(RingElement::parse(&ctx, &left.to_canonical_text()).unwrap(), left);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Exhaustive search over partitions into powers of 2 and pairs summing to one.
pub fn brute_force_decomposable(j: &BTreeSet<u64>) -> bool {
    fn split(items: &[u64]) -> bool {
        let Some((&first, rest)) = items.split_first() else { return true };
        if first.is_power_of_two() && split(rest) {
            return true;
        }
        (0..rest.len()).any(|k| {
            (first + rest[k]).is_power_of_two() && {
                let mut left = rest.to_vec();
                left.remove(k);
                split(&left)
            }
        })
    }
    let deg: u64 = j.iter().sum();
    matches!(mersenne_exponent(deg), Some(a) if a >= 1) && split(&j.iter().copied().collect::<Vec<_>>())
}

/// Every subset of `[1, 9]` against brute force, plus the strong variant for
/// even `n <= 10` on subsets of `[1, n-1]`.
pub fn decomposability_vs_brute_force() -> Outcome {
    for mask in 0u32..(1 << 9) {
        let j: BTreeSet<u64> = (1..=9).filter(|x| mask >> (x - 1) & 1 == 1).collect();
        let (ok, cert) = is_totaro_decomposable(&j);
        if ok != brute_force_decomposable(&j) {
            return Err(format!("decision differs from brute force on {j:?}"));
        }
        if let Some(c) = cert {
            if !check_certificate(&j, &c) {
                return Err(format!("invalid certificate for {j:?}"));
            }
        }
        for n in [2u64, 4, 6, 8, 10] {
            if j.iter().any(|&x| x >= n) {
                continue;
            }
            let strong = is_strongly_totaro_decomposable(&j, n).map_err(|e| e.to_string())?;
            let b = 1u64 << n.trailing_zeros();
            let trace: BTreeSet<u64> = j.iter().copied().filter(|&x| x <= b).collect();
            let want: BTreeSet<u64> = (0..=n.trailing_zeros()).map(|i| 1u64 << i).filter(|&x| x < n).collect();
            if strong != (ok && trace == want) {
                return Err(format!("strong decision wrong for {j:?} at n = {n}"));
            }
        }
    }
    Ok(())
}

/// The oracle, the valuation scan and a verify suite give the same answers
/// sequentially, in parallel, and under different pool sizes.
pub fn parallel_determinism() -> Outcome {
    for n in [4usize, 5, 6] {
        let ctx = context(n);
        for label in
            [GeneratorLabel::RTildeSpin, GeneratorLabel::RPrimeSo, GeneratorLabel::RBarPgo, GeneratorLabel::RHspin]
        {
            if label == GeneratorLabel::RHspin && n % 2 == 1 {
                continue;
            }
            let gens = GeneratorSet::standard(&ctx, label).map_err(|e| e.to_string())?;
            let seq = top_degree_gcd(&gens, OracleOptions { parallel: false, ..OracleOptions::default() })
                .map_err(|e| e.to_string())?;
            let par = top_degree_gcd(&gens, OracleOptions::default()).map_err(|e| e.to_string())?;
            if seq != par {
                return Err(format!("oracle differs for {label:?} at n = {n}"));
            }
            let d = ctx.dim_x() - 2;
            let s1 = min_valuation_scan(&gens, d, ScanOptions { parallel: false, ..ScanOptions::default() })
                .map_err(|e| e.to_string())?;
            let s2 = min_valuation_scan(&gens, d, ScanOptions::default()).map_err(|e| e.to_string())?;
            if (s1.min, &s1.witness) != (s2.min, &s2.witness) {
                return Err(format!("scan differs for {label:?} at n = {n}"));
            }
        }
    }
    let opts = VerifyOptions { n: Some(6), seed: DEFAULT_SEED, ..VerifyOptions::default() };
    let strip = |rs: Vec<torsionlab::verify::CheckResult>| {
        rs.into_iter().map(|r| (r.check_id, r.passed, r.witness)).collect::<Vec<_>>()
    };
    let mut outputs = Vec::new();
    for threads in [1usize, 3] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| e.to_string())?;
        let rs = pool.install(|| run_suite(Suite::Lemma32, &opts)).map_err(|e| e.to_string())?;
        outputs.push(strip(rs));
    }
    if outputs[0] != outputs[1] {
        return Err("lemma suite output depends on the thread count".into());
    }
    Ok(())
}

/// All five suites under `seed`, by name.
pub fn all(seed: u64) -> Vec<(&'static str, Outcome)> {
    vec![
        ("ring_axioms", ring_axioms(seed)),
        ("grading", grading(seed)),
        ("reduction_confluence", reduction_confluence(seed)),
        ("decomposability_vs_brute_force", decomposability_vs_brute_force()),
        ("parallel_determinism", parallel_determinism()),
    ]
}
