//! Identities in R' and R-bar: the vanishing of `t^(2n-1)`, the `d_i`
//! relation for `t^n`, the `S_{k,j}` expansion of large powers of `t`, the
//! squares `d_i^2` and the multiples `C(2n,i) t^i`.

use std::sync::Arc;

use ibig::IBig;
use rayon::prelude::*;
use serde_json::json;

use super::{valuation_json, Check, CheckResult};
use crate::arith::binomial;
use crate::chowring::{RingContext, RingElement};
use crate::error::Result;
use crate::generators::{chern_c, chern_d, GeneratorLabel, GeneratorSet};
use crate::sublattice::degree_lattice;

fn ctx_for(n: usize) -> Result<Arc<RingContext>> {
    RingContext::new(n)
}

/// `t^(2n-1) = 0` (with `t^(2n-2) != 0`) and, for even `n`,
/// `Σ_{j<n} (-1)^j d_j t^(n-j) = 0`.
pub fn check_t_identities(n: usize) -> Result<Vec<CheckResult>> {
    let ctx = ctx_for(n)?;
    let t = RingElement::gen_t(&ctx);
    let mut out = Vec::new();

    let check = Check::new(format!("skj/n={n:02}/t2nminusone"), "eq:t2nminusone").param("n", n);
    let top = t.pow(2 * n as u64 - 1);
    let below = t.pow(2 * n as u64 - 2);
    let passed = top.is_zero() && !below.is_zero();
    out.push(
        check.finish(
            passed,
            json!({ "t_pow_2n_minus_1": top.to_canonical_text(), "t_pow_2n_minus_2_terms": below.len() }),
        ),
    );

    if n.is_multiple_of(2) {
        let check = Check::new(format!("skj/n={n:02}/tnconeprime"), "eq:tnconeprime").param("n", n);
        let mut acc = t.pow(n as u64);
        for j in 1..n {
            let term = &chern_d(&ctx, j)? * &t.pow((n - j) as u64);
            acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        out.push(check.finish(acc.is_zero(), json!({ "residual": acc.to_canonical_text() })));
    }
    Ok(out)
}

/// `S_{k,j} = Σ c_{i_1} ⋯ c_{i_s}` over compositions of `k` with first part
/// `i_1 >= j`, tabulated through the composition sums `F(m) = S_{m,1}`.
pub struct SkjTable {
    c: Vec<RingElement>,
    f: Vec<RingElement>,
}

impl SkjTable {
    /// `S_{k,j}` for `k <= max_k` given at construction.
    pub fn s(&self, k: usize, j: usize) -> RingElement {
        let ctx = self.f[0].context();
        let mut acc = RingElement::zero(ctx);
        for i in j.max(1)..=k.min(self.c.len() - 1) {
            acc = &acc + &(&self.c[i] * &self.f[k - i]);
        }
        acc
    }
}

/// Builds the table for `k <= max_k`. `F(0) = 1`, `F(m) = Σ_i c_i F(m-i)`,
/// and `c_i = 0` for `i >= n`.
pub fn s_kj_table(ctx: &Arc<RingContext>, max_k: usize) -> Result<SkjTable> {
    let n = ctx.n();
    let mut c = vec![RingElement::one(ctx)];
    for i in 1..n {
        c.push(chern_c(ctx, i)?);
    }
    let mut f = vec![RingElement::one(ctx)];
    for m in 1..=max_k {
        let mut acc = RingElement::zero(ctx);
        for i in 1..=m.min(n - 1) {
            acc = &acc + &(&c[i] * &f[m - i]);
        }
        f.push(acc);
    }
    Ok(SkjTable { c, f })
}

/// For `1 <= k <= n-1`: the expansion
/// `t^(n-1+k) ≡ Σ_{j=1}^{n-1} t^(n-j) S_{k+j-1,j} (mod 2R')`,
/// its leading coefficient `S_{k,1} ≡ c_k (mod 2R')`, and `S_{k,k} = c_k`.
pub fn check_skj_expansion(n: usize) -> Result<Vec<CheckResult>> {
    let ctx = ctx_for(n)?;
    let table = s_kj_table(&ctx, 2 * n - 3)?;
    let t = RingElement::gen_t(&ctx);
    let mut out = Vec::new();
    for k in 1..n {
        let check =
            Check::new(format!("skj/n={n:02}/k={k:02}/expansion"), "eq:formofpoweroft").param("n", n).param("k", k);
        let lhs = t.pow((n - 1 + k) as u64);
        let mut rhs = RingElement::zero(&ctx);
        for j in 1..n {
            rhs = &rhs + &(&t.pow((n - j) as u64) * &table.s(k + j - 1, j));
        }
        let diff = &lhs - &rhs;
        out.push(rprime_check(check, &diff));

        let ck = chern_c(&ctx, k)?;
        let check =
            Check::new(format!("skj/n={n:02}/k={k:02}/leading"), "lem:expandtlarge2").param("n", n).param("k", k);
        out.push(rprime_check(check, &(&table.s(k, 1) - &ck)));

        let check =
            Check::new(format!("skj/n={n:02}/k={k:02}/diagonal"), "lem:expandtlarge2").param("n", n).param("k", k);
        let diag = &table.s(k, k) - &ck;
        out.push(check.finish(diag.is_zero(), json!({ "residual": diag.to_canonical_text() })));
    }
    Ok(out)
}

/// `diff ∈ 2R'`, reporting the R'-valuation of `diff`.
fn rprime_check(check: Check, diff: &RingElement) -> CheckResult {
    let passed = diff.in_2k_rprime(1);
    let v = diff.valuation_rprime().ok().map(valuation_json);
    let mut witness = json!({ "rprime_valuation": v });
    if !passed {
        let bad: Vec<_> =
            diff.rprime_coordinates().into_iter().filter(|c| c.slack.is_none_or(|s| s < 1)).take(16).collect();
        witness["offending"] = json!(bad);
    }
    check.finish(passed, witness)
}

/// `d_i^2 ≡ C(n,i) t^(2i) (mod 2R')` for `1 <= i <= n-1`, and
/// `C(2n,i) t^i` in the degree-`i` lattice of `<2t, d_i>` for `1 <= i <= 2n-2`.
pub fn check_dsquared_and_twoni(n: usize) -> Result<Vec<CheckResult>> {
    let ctx = ctx_for(n)?;
    let t = RingElement::gen_t(&ctx);
    let mut out = Vec::new();
    for i in 1..n {
        let check =
            Check::new(format!("dsquared/n={n:02}/disquared/i={i:02}"), "eq:disquared").param("n", n).param("i", i);
        let d = chern_d(&ctx, i)?;
        let rhs = t.pow(2 * i as u64).scale(&binomial(n as u64, i as u64)?);
        out.push(rprime_check(check, &(&(&d * &d) - &rhs)));
    }
    let rbar = GeneratorSet::standard(&ctx, GeneratorLabel::RBarPgo)?;
    let parts: Vec<Result<CheckResult>> = (1..=2 * n - 2)
        .into_par_iter()
        .map(|i| {
            let check =
                Check::new(format!("dsquared/n={n:02}/twoniti/i={i:02}"), "eq:twoniti").param("n", n).param("i", i);
            let coeff: IBig = binomial(2 * n as u64, i as u64)?;
            let x = t.pow(i as u64).scale(&coeff);
            let lattice = degree_lattice(&rbar, i)?;
            let member = lattice.contains(&x)?;
            Ok(check.finish(
                member,
                json!({
                    "element": x.to_canonical_text(),
                    "lattice_rank": lattice.basis_matrix.rank(),
                    "lattice_width": lattice.columns.len(),
                }),
            ))
        })
        .collect();
    for p in parts {
        out.push(p?);
    }
    Ok(out)
}
