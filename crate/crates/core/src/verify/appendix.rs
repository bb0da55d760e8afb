//! The n = 8 congruences behind `τ_2(HSpin(16)) = 6`, and the n = 6 example.

use std::sync::Arc;

use ibig::IBig;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::{congruence, sum, term, valuation_json, Check, CheckResult, Mode};
use crate::arith::{digit_sum_2, Valuation};
use crate::chowring::{RingContext, RingElement};
use crate::error::Result;
use crate::generators::{chern_d, e_of, x0, GeneratorLabel, GeneratorSet};
use crate::sublattice::{
    describe_exponents, exponent_vectors, for_each_monomial, min_valuation_scan, monomial_product, torsion_oracle_with,
    OracleOptions, ScanOptions,
};
use crate::torsion::hspin_bounds;

/// Fraction of the degree-35 monomials recomputed exactly after a truncated
/// scan.
pub const DEGREE35_SUBSAMPLE_RATE: f64 = 0.01;

/// Bits kept by the truncated degree-35 scan: one above the threshold 2^6.
const SCAN_BITS: u32 = 7;

/// Products for congruences mod `2^k`, optionally reduced mod `2^(k+1)` after
/// every step.
struct Products {
    ctx: Arc<RingContext>,
    truncate: bool,
}

impl Products {
    fn of(&self, factors: &[&RingElement], k: u64) -> RingElement {
        let bits = k as u32 + 1;
        let mut acc = RingElement::one(&self.ctx);
        for f in factors {
            acc = &acc * *f;
            if self.truncate {
                acc = acc.truncate_mod_2k(bits);
            }
        }
        acc
    }
}

fn e1_pow(ctx: &Arc<RingContext>, k: u64) -> Result<RingElement> {
    Ok(RingElement::gen_e(ctx, 1)?.pow(k))
}

/// Every named congruence for n = 8, the n = 4 and n = 8 instances of the
/// power-of-two square lemma, and the full degree-35 scan.
pub fn check_appendix_n8(mode: Mode, seed: u64) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for n in [4usize, 8] {
        out.extend(power_of_two_squares(n, mode == Mode::Truncated)?);
    }
    out.extend(named_congruences(mode == Mode::Truncated)?);
    out.extend(degree35(mode, seed)?);
    Ok(out)
}

/// `d_i ≡ 0 mod 2` and `d_(n-i)^2 ≡ 0 mod 2^3` for `n = 2^s`.
fn power_of_two_squares(n: usize, truncate: bool) -> Result<Vec<CheckResult>> {
    let ctx = RingContext::new(n)?;
    let pr = Products { ctx: ctx.clone(), truncate };
    let zero = RingElement::zero(&ctx);
    let mut out = Vec::new();
    for i in 1..n {
        let d = chern_d(&ctx, i)?;
        let check = Check::new(format!("appendix8/ntwosdnisquare/n={n:02}/d{i}_even"), "lem:ntwosdnisquare")
            .param("n", n)
            .param("i", i);
        out.push(congruence(check, &pr.of(&[&d], 1), &zero, 1)?);
    }
    for i in 1..n / 2 {
        let d = chern_d(&ctx, n - i)?;
        let check = Check::new(format!("appendix8/ntwosdnisquare/n={n:02}/d{}_squared", n - i), "lem:ntwosdnisquare")
            .param("n", n)
            .param("i", i);
        out.push(congruence(check, &pr.of(&[&d, &d], 3), &zero, 3)?);
    }
    Ok(out)
}

fn named_congruences(truncate: bool) -> Result<Vec<CheckResult>> {
    let ctx = RingContext::new(8)?;
    let c = &ctx;
    let pr = Products { ctx: ctx.clone(), truncate };
    let d: Vec<RingElement> =
        (0..8).map(|i| if i == 0 { Ok(RingElement::one(c)) } else { chern_d(c, i) }).collect::<Result<_>>()?;
    let e: Vec<RingElement> = (0..8)
        .map(|i| if i == 0 { Ok(RingElement::one(c)) } else { RingElement::gen_e(c, i) })
        .collect::<Result<_>>()?;
    let e1 = |k: u64| e1_pow(c, k);
    let zero = RingElement::zero(c);
    let full = |lo: usize, hi: usize| (lo..=hi).collect::<Vec<_>>();

    let d7_mod4 = sum(c, [term(c, 2, &[1], 6), term(c, 2, &[3], 4), term(c, 2, &[5], 2), term(c, 2, &[7], 0)])?;
    let d6_mod4 = sum(c, [term(c, 2, &[1], 5), term(c, 2, &[2], 4), term(c, 2, &[5], 1), term(c, 2, &[6], 0)])?;
    let d5_mod4 = sum(c, [term(c, 2, &[1], 4), term(c, 2, &[5], 0)])?;
    let d2_mod4 = sum(c, [term(c, 14, &[1], 1), term(c, 2, &[2], 0)])?;
    let d3_mod4 = sum(c, [term(c, 42, &[1], 2), term(c, 12, &[2], 1), term(c, 2, &[3], 0)])?;
    let d76_mod8 = sum(
        c,
        [
            term(c, 4, &[1, 6], 6),
            term(c, 4, &[2, 5], 6),
            term(c, 4, &[1, 7], 5),
            term(c, 4, &[3, 5], 5),
            term(c, 4, &[3, 6], 4),
            term(c, 4, &[2, 7], 4),
            term(c, 4, &[5, 6], 2),
            term(c, 4, &[5, 7], 1),
            term(c, 4, &[6, 7], 0),
        ],
    )?;
    let d75_mod8 = sum(c, [term(c, 4, &[1, 7], 4), term(c, 4, &[3, 5], 4), term(c, 4, &[5, 7], 0)])?;
    // b = e(1,6,7) + e(2,5,7) + e(3,5,6)
    let b_t4 = sum(
        c,
        [term(c, 1, &[1, 6, 7], 4), term(c, 1, &[2, 5, 7], 4), term(c, 1, &[3, 5, 6], 4), term(c, 1, &[5, 6, 7], 0)],
    )?;
    let d765_mod16 = b_t4.scale(&IBig::from(8));
    let d77_mod16 = sum(
        c,
        [
            term(c, 4, &[1, 1], 12),
            term(c, 4, &[3, 3], 8),
            term(c, 4, &[5, 5], 4),
            term(c, 8, &[1, 7], 6),
            term(c, 8, &[3, 5], 6),
            term(c, 8, &[3, 7], 4),
            term(c, 8, &[5, 7], 2),
        ],
    )?;
    let e15_mod4 = term(c, 2, &full(1, 5), 0)?;
    let e14_mod4 = sum(c, [term(c, 2, &[2, 3, 4, 5], 0), term(c, 2, &[1, 2, 4, 7], 0)])?;
    let e13_mod4 = sum(c, [term(c, 2, &[1, 3, 4, 5], 0), term(c, 2, &[1, 2, 4, 6], 0), term(c, 2, &[2, 4, 7], 0)])?;
    let e15_d76_mod16 = term(c, 8, &full(1, 7), 0)?;
    let e14_d76_mod16 = sum(
        c,
        [
            term(c, 8, &full(1, 6), 6),
            term(c, 8, &[1, 2, 3, 4, 6, 7], 4),
            term(c, 8, &[1, 2, 4, 5, 6, 7], 2),
            term(c, 8, &full(2, 7), 0),
        ],
    )?;
    let d7652_mod32 = &b_t4.scale(&IBig::from(16)) * &sum(c, [term(c, 7, &[1], 1), term(c, 1, &[2], 0)])?;
    let e_1to5 = e_of(c, &full(1, 5))?;

    let (e13, e14, e15) = (e1(13)?, e1(14)?, e1(15)?);
    let n8 = |id: &str, cite: &'static str| Check::new(format!("appendix8/{id}"), cite).param("n", 8);
    let mut out = vec![
        congruence(n8("dsevendsixmodfour/d7", "eq:dsevendsixmodfour"), &pr.of(&[&d[7]], 2), &d7_mod4, 2)?,
        congruence(n8("dsevendsixmodfour/d6", "eq:dsevendsixmodfour"), &pr.of(&[&d[6]], 2), &d6_mod4, 2)?,
        congruence(n8("dsevensixfivecon/d5_mod4", "lem:dsevensixfivecon"), &pr.of(&[&d[5]], 2), &d5_mod4, 2)?,
        congruence(n8("d7652/d2_mod4", "eq:d7652"), &pr.of(&[&d[2]], 2), &d2_mod4, 2)?,
        congruence(n8("lowerbdneight/d3_mod4", "cor:lowerbdneight"), &pr.of(&[&d[3]], 2), &d3_mod4, 2)?,
        congruence(n8("dsevensix/d7d6", "eq:dsevensix"), &pr.of(&[&d[7], &d[6]], 3), &d76_mod8, 3)?,
        congruence(n8("dsevensixfivecon/d7d5", "lem:dsevensixfivecon"), &pr.of(&[&d[7], &d[5]], 3), &d75_mod8, 3)?,
        congruence(n8("dsevensixfive/d7d6d5", "eq:dsevensixfive"), &pr.of(&[&d[7], &d[6], &d[5]], 4), &d765_mod16, 4)?,
        congruence(n8("dsevensquaremod/d7d7", "eq:dsevensquaremod"), &pr.of(&[&d[7], &d[7]], 4), &d77_mod16, 4)?,
        congruence(n8("eonefifteenfourteen/e1^15", "eq:eonefifteenfourteen"), &pr.of(&[&e15], 2), &e15_mod4, 2)?,
        congruence(n8("eonefifteenfourteen/e1^14", "eq:eonefifteenfourteen"), &pr.of(&[&e14], 2), &e14_mod4, 2)?,
        congruence(n8("neightupperbd/e1^13", "cor:neightupperbd"), &pr.of(&[&e13], 2), &e13_mod4, 2)?,
        congruence(n8("eoneeightmod2/e1^8", "eq:eoneeightmod2"), &pr.of(&[&e1(8)?], 1), &zero, 1)?,
        congruence(n8("eoneeightmod2/e1^16", "eq:eoneeightmod2"), &pr.of(&[&e1(16)?], 3), &zero, 3)?,
        congruence(
            n8("eonefiffourtwosix/e1^15d7d7d6", "cor:eonefiffourtwosix"),
            &pr.of(&[&e15, &d[7], &d[7], &d[6]], 6),
            &zero,
            6,
        )?,
        congruence(
            n8("eonefiffourtwosix/e1^14d7d7d7", "cor:eonefiffourtwosix"),
            &pr.of(&[&e14, &d[7], &d[7], &d[7]], 6),
            &zero,
            6,
        )?,
        congruence(
            n8("eonefifteendsevendfive/e1^15d7d5", "cor:eonefifteendsevendfive"),
            &pr.of(&[&e15, &d[7], &d[5]], 4),
            &zero,
            4,
        )?,
        congruence(
            n8("eonefifteendsevendfive/e1^15d7d6", "cor:eonefifteendsevendfive"),
            &pr.of(&[&e15, &d[7], &d[6]], 4),
            &e15_d76_mod16,
            4,
        )?,
        congruence(
            n8("eonefifteendsevendfive/e1^15d7d5d4d4", "cor:eonefifteendsevendfive"),
            &pr.of(&[&e15, &d[7], &d[5], &d[4], &d[4]], 6),
            &zero,
            6,
        )?,
        congruence(
            n8("eonefifteendsevendfive/e1^15d7d6d4d3", "cor:eonefifteendsevendfive"),
            &pr.of(&[&e15, &d[7], &d[6], &d[4], &d[3]], 6),
            &zero,
            6,
        )?,
        congruence(
            n8("donefourteendsevensix/e1^14d7d6", "eq:donefourteendsevensix"),
            &pr.of(&[&e14, &d[7], &d[6]], 4),
            &e14_d76_mod16,
            4,
        )?,
        congruence(
            n8("eonefifteendsevendfiveprime/e1^14d7d6d4d4", "cor:eonefifteendsevendfiveprime"),
            &pr.of(&[&e14, &d[7], &d[6], &d[4], &d[4]], 6),
            &zero,
            6,
        )?,
        congruence(
            n8("neightupperbd/e1^13d7d6d5d4", "cor:neightupperbd"),
            &pr.of(&[&e13, &d[7], &d[6], &d[5], &d[4]], 6),
            &zero,
            6,
        )?,
        congruence(n8("d7652/d7d6d5d2", "eq:d7652"), &pr.of(&[&d[7], &d[6], &d[5], &d[2]], 5), &d7652_mod32, 5)?,
        congruence(
            n8("lowerbdneight/e1^15d7d6d5d2", "cor:lowerbdneight"),
            &pr.of(&[&e15, &d[7], &d[6], &d[5], &d[2]], 6),
            &zero,
            6,
        )?,
        congruence(
            n8("lowerbdneight/e1^14d7d6d5d3", "cor:lowerbdneight"),
            &pr.of(&[&e14, &d[7], &d[6], &d[5], &d[3]], 6),
            &zero,
            6,
        )?,
        congruence(n8("lowerbdneight/e1^28d7", "cor:lowerbdneight"), &pr.of(&[&e1(28)?, &d[7]], 6), &zero, 6)?,
        congruence(n8("lowerbdneight/e1^22d7d6", "cor:lowerbdneight"), &pr.of(&[&e1(22)?, &d[7], &d[6]], 6), &zero, 6)?,
        congruence(n8("lowerbdneight/e1^23d7d5", "cor:lowerbdneight"), &pr.of(&[&e1(23)?, &d[7], &d[5]], 6), &zero, 6)?,
        congruence(
            n8("lowerbdneight/e1^7d7^4", "cor:lowerbdneight"),
            &pr.of(&[&e1(7)?, &d[7], &d[7], &d[7], &d[7]], 6),
            &zero,
            6,
        )?,
    ];
    for idx in [1usize, 2, 4, 5] {
        out.push(congruence(
            n8(&format!("eonefiveE/e{idx}"), "eq:eonefiveE"),
            &pr.of(&[&e_1to5, &e[idx]], 1),
            &zero,
            1,
        )?);
    }
    Ok(out)
}

/// Every degree-35 monomial in `2t, d_1..d_7, e_1` has `v̂_2 >= 6`, the
/// minimum is exactly 6, and it agrees with the oracle.
fn degree35(mode: Mode, seed: u64) -> Result<Vec<CheckResult>> {
    let ctx = RingContext::new(8)?;
    let gens = GeneratorSet::standard(&ctx, GeneratorLabel::RHspin)?;
    let truncated_scan = mode != Mode::Exact;
    let bits = truncated_scan.then_some(SCAN_BITS);
    let mut out = Vec::new();

    let check = Check::new("appendix8/lowerbdneight/degree35_scan", "cor:lowerbdneight")
        .param("n", 8)
        .param("mode", if truncated_scan { "truncated" } else { "exact" })
        .param("modulus_bits", bits);
    let scan = min_valuation_scan(
        &gens,
        ctx.dim_x(),
        ScanOptions { parallel: true, floor: Some(SCAN_BITS as u64), modulus_bits: bits },
    )?;
    let passed = scan.min_is_exact && scan.min == Valuation::Finite(6);
    out.push(check.finish(passed, serde_json::to_value(&scan).expect("scan serializes")));

    if truncated_scan {
        out.push(exact_subsample(&gens, seed)?);
    }

    let check = Check::new("appendix8/lowerbdneight/oracle_consistency", "cor:lowerbdneight").param("n", 8);
    let report = torsion_oracle_with(
        &ctx,
        GeneratorLabel::RHspin,
        OracleOptions { modulus_bits: bits, ..OracleOptions::default() },
    )?;
    let passed = report.tau2 == 6 && scan.min == Valuation::Finite(report.tau2);
    out.push(check.finish(passed, json!({ "oracle_tau2": report.tau2, "oracle_tau": report.tau.to_string(), "scan_min": valuation_json(scan.min) })));
    Ok(out)
}

/// Recomputes a seeded sample of the degree-35 monomials exactly and compares
/// with the step-wise truncated product.
fn exact_subsample(gens: &GeneratorSet, seed: u64) -> Result<CheckResult> {
    let all = exponent_vectors(gens, gens.context().dim_x());
    let amount = ((all.len() as f64) * DEGREE35_SUBSAMPLE_RATE).ceil() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks = rand::seq::index::sample(&mut rng, all.len(), amount).into_vec();
    picks.sort_unstable();
    let check = Check::new("appendix8/lowerbdneight/exact_subsample", "cor:lowerbdneight")
        .param("n", 8)
        .param("seed", seed)
        .param("sample_size", amount)
        .param("population", all.len());
    let results: Vec<Result<Option<serde_json::Value>>> = picks
        .par_iter()
        .map(|&i| {
            let exps = &all[i];
            let exact = monomial_product(gens, exps)?;
            let truncated = truncated_product(gens, exps, SCAN_BITS);
            let ok = exact.truncate_mod_2k(SCAN_BITS) == truncated && exact.valuation_hat().at_least(6);
            Ok((!ok).then(|| {
                json!({
                    "monomial": describe_exponents(gens, exps),
                    "exact_valuation": valuation_json(exact.valuation_hat()),
                    "truncated_valuation": valuation_json(truncated.valuation_hat()),
                })
            }))
        })
        .collect();
    let mut failures = Vec::new();
    for r in results {
        if let Some(f) = r? {
            failures.push(f);
        }
    }
    let passed = failures.is_empty();
    failures.truncate(16);
    Ok(check.finish(passed, json!({ "checked": amount, "mismatches": failures })))
}

fn truncated_product(gens: &GeneratorSet, exps: &[u32], bits: u32) -> RingElement {
    let mut acc = RingElement::one(gens.context());
    for (g, &e) in gens.gens().iter().zip(exps) {
        for _ in 0..e {
            acc = (&acc * &g.element).truncate_mod_2k(bits);
        }
    }
    acc
}

/// The n = 6 example: the oracle value, `2^3 x ∈ R'` for every top-degree
/// monomial `x` of R, the scaled powers of `e_1`, and the `R'` divisibility of
/// the top degree.
pub fn check_example_hspin12() -> Result<Vec<CheckResult>> {
    let ctx = RingContext::new(6)?;
    let gens = GeneratorSet::standard(&ctx, GeneratorLabel::RHspin)?;
    let mut out = Vec::new();
    let n6 = |id: &str, cite: &'static str| Check::new(format!("hspin12/{id}"), cite).param("n", 6);

    let report = torsion_oracle_with(&ctx, GeneratorLabel::RHspin, OracleOptions::default())?;
    out.push(
        n6("oracle", "ex:hspintwelve")
            .finish(report.tau == ibig::UBig::from(4u8), serde_json::to_value(&report).expect("report serializes")),
    );

    let eight = IBig::from(8);
    let mut count = 0u64;
    let mut failures = Vec::new();
    for_each_monomial(&gens, ctx.dim_x(), &mut |m, el| {
        count += 1;
        if !el.scale(&eight).in_rprime() && failures.len() < 16 {
            failures.push(json!({ "monomial": m, "element": el.to_canonical_text() }));
        }
    });
    out.push(
        n6("top_degree_times_8_in_rprime", "ex:hspintwelve")
            .finish(failures.is_empty(), json!({ "monomials": count, "failures": failures })),
    );

    let e1 = RingElement::gen_e(&ctx, 1)?;
    let mut bad = Vec::new();
    let mut p = RingElement::one(&ctx);
    for k in 0..=15u64 {
        let s2 = digit_sum_2(k as u128);
        if !p.scale(&(IBig::from(1u8) << s2 as usize)).in_rprime() {
            bad.push(json!({ "power": k, "scale_exponent": s2 }));
        }
        if k < 15 && !p.scale(&eight).in_rprime() {
            bad.push(json!({ "power": k, "scale_exponent": 3 }));
        }
        p = &p * &e1;
    }
    out.push(n6("scaled_e1_powers_in_rprime", "rmk:generalJ").finish(bad.is_empty(), json!({ "failures": bad })));

    let x = x0(&ctx);
    let v = x.scale(&IBig::from(32)).in_rprime() && !x.scale(&IBig::from(16)).in_rprime();
    out.push(n6("rprime_top_degree_divisibility", "ex:hspintwelve").finish(v, json!({ "x0_rprime_exponent": 5 })));

    // 2^3 x ∈ R' and R' meets the top degree in 2^5 Z x0, so τ_2 >= 2; the
    // closed-form upper bound closes the gap.
    let bound = hspin_bounds(6)?;
    let lower_from_example = 5 - 3;
    let passed = report.tau2 >= lower_from_example && bound.upper == report.tau2;
    out.push(n6("closed_form_agreement", "thm:main").finish(
        passed,
        json!({ "example_lower_bound": lower_from_example, "closed_form_upper": bound.upper, "oracle_tau2": report.tau2 }),
    ));
    Ok(out)
}
