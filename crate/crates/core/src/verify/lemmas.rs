//! The decomposability lemma, its all-`J` divisibility bound, and the
//! certificate proposition.

use std::collections::BTreeSet;
use std::sync::Arc;

use ibig::IBig;
use rayon::prelude::*;
use serde_json::json;

use super::{valuation_json, Check, CheckResult};
use crate::arith::{digit_sum_2, mersenne_exponent};
use crate::chowring::{RingContext, RingElement};
use crate::decomp::is_totaro_decomposable;
use crate::error::Result;
use crate::generators::c_of;
use crate::torsion::certificate_bound;

/// `(n, m, J)` instances run by the certificate suite.
pub const PROP_CASES: [(u64, u64, &[u64]); 3] = [(6, 2, &[1, 2, 4]), (8, 2, &[1, 2, 4]), (12, 4, &[1, 2, 4, 8])];

fn label(j: &[usize]) -> String {
    format!("{{{}}}", super::set_label(j))
}

/// All subsets of `[1, n-1]` as (J, I = complement), in mask order.
fn splits(n: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    (0u64..1 << (n - 1))
        .map(|mask| {
            let j: Vec<usize> = (1..n).filter(|i| mask >> (i - 1) & 1 == 1).collect();
            let i: Vec<usize> = (1..n).filter(|i| mask >> (i - 1) & 1 == 0).collect();
            (j, i)
        })
        .collect()
}

/// `e_1^deg J · c(I) · t^(n-1)`.
fn reference_element(
    ctx: &Arc<RingContext>,
    e1_powers: &[RingElement],
    j: &[usize],
    i: &[usize],
) -> Result<RingElement> {
    let deg: usize = j.iter().sum();
    let t = RingElement::gen_t(ctx).pow(ctx.n() as u64 - 1);
    Ok(&(&e1_powers[deg] * &c_of(ctx, i)?) * &t)
}

fn e1_powers(ctx: &Arc<RingContext>) -> Result<Vec<RingElement>> {
    let e1 = RingElement::gen_e(ctx, 1)?;
    let max = ctx.n() * (ctx.n() - 1) / 2;
    let mut out = vec![RingElement::one(ctx)];
    for k in 1..=max {
        out.push(&out[k - 1] * &e1);
    }
    Ok(out)
}

/// For every `J ⊆ [1, n-1]` with `deg J = 2^a - 1`, `a >= 1`: the reference
/// element has `v̂_2 = n - a - 1` when `J` is decomposable and `>= n - a`
/// otherwise.
pub fn check_lemma_totarodecomp(n: usize) -> Result<Vec<CheckResult>> {
    let ctx = RingContext::new(n)?;
    let powers = e1_powers(&ctx)?;
    let cases: Vec<_> = splits(n)
        .into_iter()
        .filter(|(j, _)| mersenne_exponent(j.iter().sum::<usize>() as u64).is_some_and(|a| a >= 1))
        .collect();
    cases
        .par_iter()
        .map(|(j, i)| {
            let deg: usize = j.iter().sum();
            let a = mersenne_exponent(deg as u64).expect("filtered") as u64;
            let check = Check::new(format!("lemma32/n={n:02}/J={}", label(j)), "lem:totarodecomp")
                .param("n", n)
                .param("J", j)
                .param("deg_J", deg)
                .param("a", a);
            let x = reference_element(&ctx, &powers, j, i)?;
            let v = x.valuation_hat();
            let set: BTreeSet<u64> = j.iter().map(|&x| x as u64).collect();
            let (decomposable, cert) = is_totaro_decomposable(&set);
            let bound = n as u64 - a - 1;
            let passed = if decomposable { v.finite() == Some(bound) } else { v.at_least(bound + 1) };
            Ok(check.finish(
                passed,
                json!({
                    "valuation": valuation_json(v),
                    "decomposable": decomposable,
                    "certificate": cert,
                    "expected": if decomposable { format!("= {bound}") } else { format!(">= {}", bound + 1) },
                }),
            ))
        })
        .collect()
}

/// For every `J ⊆ [1, n-1]`: `v̂_2(e_1^deg J c(I) t^(n-1)) >= n - 1 - S_2(deg J)`
/// and `2^S_2(deg J) e_1^deg J ∈ R'`.
pub fn check_remark_generalj(n: usize) -> Result<Vec<CheckResult>> {
    let ctx = RingContext::new(n)?;
    let powers = e1_powers(&ctx)?;
    splits(n)
        .par_iter()
        .map(|(j, i)| {
            let deg: usize = j.iter().sum();
            let s2 = digit_sum_2(deg as u128) as u64;
            let check = Check::new(format!("lemma32/n={n:02}/generalJ/J={}", label(j)), "rmk:generalJ")
                .param("n", n)
                .param("J", j)
                .param("deg_J", deg);
            let x = reference_element(&ctx, &powers, j, i)?;
            let v = x.valuation_hat();
            let bound = (n as u64 - 1).saturating_sub(s2);
            let in_rprime = powers[deg].scale(&(IBig::from(1u8) << s2 as usize)).in_rprime();
            let passed = v.at_least(bound) && in_rprime;
            Ok(check.finish(
                passed,
                json!({ "valuation": valuation_json(v), "bound": bound, "scaled_e1_power_in_rprime": in_rprime }),
            ))
        })
        .collect()
}

/// Both divisibility equalities of the certificate proposition, by exact
/// computation.
pub fn check_prop_totaro2divisible(n: u64, m: u64, j: &BTreeSet<u64>) -> Result<CheckResult> {
    let js: Vec<u64> = j.iter().copied().collect();
    let check = Check::new(
        format!("prop37/n={n:02}/m={m}/J={{{}}}", js.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")),
        "prop:totaro2divisible",
    )
    .param("n", n)
    .param("m", m)
    .param("J", &js);
    let cert = certificate_bound(n, m, j)?;
    let passed = cert.verified;
    Ok(check.finish(passed, serde_json::to_value(&cert).expect("certificate serializes")))
}
