//! Executable reproductions of ring identities, lemma instances and the
//! n = 8 appendix computations. Every check yields a [`CheckResult`] whose
//! `citation` is a label from the bundled anchor manifest.

mod appendix;
mod identities;
mod lemmas;

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use ibig::IBig;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::v2_abs;
use crate::chowring::{RingContext, RingElement};
use crate::error::{Error, Result};
use crate::generators::e_of;

pub use appendix::{check_appendix_n8, check_example_hspin12, DEGREE35_SUBSAMPLE_RATE};
pub use identities::{check_dsquared_and_twoni, check_skj_expansion, check_t_identities, s_kj_table};
pub use lemmas::{check_lemma_totarodecomp, check_prop_totaro2divisible, check_remark_generalj, PROP_CASES};

/// Largest `n` for which the exhaustive suites run by default.
pub const DEFAULT_EXACT_CAP: usize = 9;

/// Default seed for the randomized exact subsample.
pub const DEFAULT_SEED: u64 = 0x7061_7065_7273;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub check_id: String,
    pub parameters: BTreeMap<String, Value>,
    pub passed: bool,
    pub witness: Value,
    pub citation: String,
    pub elapsed_ms: u64,
}

impl CheckResult {
    pub fn n(&self) -> Option<u64> {
        self.parameters.get("n").and_then(Value::as_u64)
    }
}

/// Builder used by the suites; records the elapsed time on `finish`.
pub(crate) struct Check {
    id: String,
    citation: &'static str,
    parameters: BTreeMap<String, Value>,
    start: Instant,
}

impl Check {
    pub(crate) fn new(id: impl Into<String>, citation: &'static str) -> Check {
        Check { id: id.into(), citation, parameters: BTreeMap::new(), start: Instant::now() }
    }

    pub(crate) fn param(mut self, key: &str, value: impl Serialize) -> Check {
        self.parameters.insert(key.to_string(), serde_json::to_value(value).expect("parameters serialize"));
        self
    }

    pub(crate) fn finish(self, passed: bool, witness: Value) -> CheckResult {
        // A failed check without a counterexample would be useless.
        let witness = if !passed && witness.is_null() { json!({ "note": "no witness recorded" }) } else { witness };
        CheckResult {
            check_id: self.id,
            parameters: self.parameters,
            passed,
            witness,
            citation: self.citation.to_string(),
            elapsed_ms: self.start.elapsed().as_millis() as u64,
        }
    }
}

/// How products are formed in the suites that allow truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Congruences exact; the degree-35 scan runs mod 2^7 with an exact
    /// subsample.
    #[default]
    Auto,
    Exact,
    Truncated,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Auto => "auto",
            Mode::Exact => "exact",
            Mode::Truncated => "truncated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Lemma32,
    Skj,
    Dsquared,
    Appendix8,
    Hspin12,
    Prop37,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::Lemma32, Suite::Skj, Suite::Dsquared, Suite::Appendix8, Suite::Hspin12, Suite::Prop37];

    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::Lemma32 => "lemma32",
            Suite::Skj => "skj",
            Suite::Dsquared => "dsquared",
            Suite::Appendix8 => "appendix8",
            Suite::Hspin12 => "hspin12",
            Suite::Prop37 => "prop37",
        }
    }

    /// The values of `n` a suite covers when none is given.
    pub fn default_ns(&self) -> Vec<usize> {
        match self {
            Suite::Lemma32 | Suite::Skj | Suite::Dsquared => vec![4, 6, 8],
            Suite::Appendix8 => vec![8],
            Suite::Hspin12 => vec![6],
            Suite::Prop37 => PROP_CASES.iter().map(|c| c.0 as usize).collect(),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Restrict to one `n`; `None` runs the suite's default list.
    pub n: Option<usize>,
    pub mode: Mode,
    pub seed: u64,
    pub exact_cap: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { n: None, mode: Mode::Auto, seed: DEFAULT_SEED, exact_cap: DEFAULT_EXACT_CAP }
    }
}

fn budget(suite: Suite, n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::OverBudget(format!("suite {suite} at n = {n} exceeds the exact cap {cap}")));
    }
    Ok(())
}

fn fixed(suite: Suite, n: Option<usize>, only: usize) -> Result<()> {
    match n {
        Some(x) if x != only => Err(Error::InvalidArgument(format!("suite {suite} is defined for n = {only} only"))),
        _ => Ok(()),
    }
}

/// Runs one suite. Results are sorted by `check_id`; every citation is
/// resolved against the manifest.
pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let ns = opts.n.map(|n| vec![n]).unwrap_or_else(|| suite.default_ns());
    let mut out = Vec::new();
    match suite {
        Suite::Lemma32 => {
            for &n in &ns {
                if n < 3 {
                    return Err(Error::Precondition(format!("suite lemma32 needs n >= 3, got {n}")));
                }
                budget(suite, n, opts.exact_cap)?;
            }
            let parts: Vec<Result<Vec<CheckResult>>> = ns
                .par_iter()
                .map(|&n| {
                    let mut v = check_lemma_totarodecomp(n)?;
                    v.extend(check_remark_generalj(n)?);
                    Ok(v)
                })
                .collect();
            for p in parts {
                out.extend(p?);
            }
        }
        Suite::Skj | Suite::Dsquared => {
            for &n in &ns {
                if n < 4 || n % 2 == 1 {
                    return Err(Error::Precondition(format!("suite {suite} needs even n >= 4, got {n}")));
                }
                budget(suite, n, opts.exact_cap)?;
            }
            let parts: Vec<Result<Vec<CheckResult>>> = ns
                .par_iter()
                .map(|&n| match suite {
                    Suite::Skj => {
                        let mut v = check_t_identities(n)?;
                        v.extend(check_skj_expansion(n)?);
                        Ok(v)
                    }
                    _ => check_dsquared_and_twoni(n),
                })
                .collect();
            for p in parts {
                out.extend(p?);
            }
        }
        Suite::Appendix8 => {
            fixed(suite, opts.n, 8)?;
            out = check_appendix_n8(opts.mode, opts.seed)?;
        }
        Suite::Hspin12 => {
            fixed(suite, opts.n, 6)?;
            out = check_example_hspin12()?;
        }
        Suite::Prop37 => {
            let cases: Vec<_> = PROP_CASES.iter().filter(|c| opts.n.is_none_or(|n| c.0 == n as u64)).collect();
            if cases.is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "suite prop37 has cases for n in {:?} only",
                    PROP_CASES.iter().map(|c| c.0).collect::<Vec<_>>()
                )));
            }
            let parts: Vec<Result<CheckResult>> = cases
                .par_iter()
                .map(|c| check_prop_totaro2divisible(c.0, c.1, &c.2.iter().copied().collect()))
                .collect();
            for p in parts {
                out.push(p?);
            }
        }
    }
    finalize(out)
}

/// Runs every suite at its default parameters (the `mode` and `seed` of
/// `opts` still apply).
pub fn run_all(opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for suite in Suite::ALL {
        let o = VerifyOptions { n: None, ..opts.clone() };
        out.extend(run_suite(suite, &o)?);
    }
    finalize(out)
}

fn finalize(mut out: Vec<CheckResult>) -> Result<Vec<CheckResult>> {
    out.sort_by(|a, b| a.check_id.cmp(&b.check_id));
    for w in out.windows(2) {
        if w[0].check_id == w[1].check_id {
            return Err(Error::InvalidArgument(format!("duplicate check id {}", w[0].check_id)));
        }
    }
    validate_citations(&out)?;
    Ok(out)
}

/// Label -> statement summary, parsed once from the bundled manifest.
pub fn anchors() -> &'static BTreeMap<String, String> {
    static ANCHORS: OnceLock<BTreeMap<String, String>> = OnceLock::new();
    ANCHORS.get_or_init(|| serde_json::from_str(include_str!("anchors.json")).expect("anchor manifest is valid JSON"))
}

pub fn validate_citations(results: &[CheckResult]) -> Result<()> {
    let known = anchors();
    match results.iter().find(|r| !known.contains_key(&r.citation)) {
        Some(r) => Err(Error::InvalidArgument(format!("check {} cites unknown anchor {:?}", r.check_id, r.citation))),
        None => Ok(()),
    }
}

pub fn write_jsonl(results: &[CheckResult], mut w: impl Write) -> std::io::Result<()> {
    for r in results {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Summary table with header `check_id,n,passed,elapsed_ms`.
pub fn write_summary_csv(results: &[CheckResult], w: impl Write) -> std::result::Result<(), csv::Error> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["check_id", "n", "passed", "elapsed_ms"])?;
    for r in results {
        let n = r.n().map(|n| n.to_string()).unwrap_or_default();
        wr.write_record([r.check_id.as_str(), &n, if r.passed { "true" } else { "false" }, &r.elapsed_ms.to_string()])?;
    }
    wr.flush()?;
    Ok(())
}

// ---- shared helpers for the suites ----

/// `coeff · e_{i_1} ⋯ e_{i_r} · t^tpow`; repeated indices are multiplied out.
pub(crate) fn term(ctx: &Arc<RingContext>, coeff: i64, e: &[usize], tpow: u64) -> Result<RingElement> {
    Ok((&e_of(ctx, e)? * &RingElement::gen_t(ctx).pow(tpow)).scale(&IBig::from(coeff)))
}

pub(crate) fn sum(ctx: &Arc<RingContext>, parts: impl IntoIterator<Item = Result<RingElement>>) -> Result<RingElement> {
    let mut acc = RingElement::zero(ctx);
    for p in parts {
        acc = &acc + &p?;
    }
    Ok(acc)
}

/// Terms of `x` whose 2-adic valuation is below `k`, at most `limit` of them,
/// as canonical text.
pub(crate) fn offending_terms(x: &RingElement, k: u64, limit: usize) -> Value {
    let ctx = x.context();
    let bad: Vec<String> = x
        .terms()
        .iter()
        .filter(|(_, c)| !v2_abs(c).at_least(k))
        .take(limit)
        .map(|(m, c)| RingElement::monomial(ctx, *m, c.clone()).to_canonical_text())
        .collect();
    json!(bad)
}

/// `lhs ≡ rhs (mod 2^k CH(X))`, with the valuation of the difference as
/// witness and offending terms on failure.
pub(crate) fn congruence(check: Check, lhs: &RingElement, rhs: &RingElement, k: u64) -> Result<CheckResult> {
    let diff = lhs.try_sub(rhs)?;
    let v = diff.valuation_hat();
    let passed = v.at_least(k);
    let mut witness = json!({ "modulus_exponent": k, "difference_valuation": valuation_json(v) });
    if !passed {
        witness["offending_terms"] = offending_terms(&diff, k, 16);
    }
    Ok(check.param("modulus_exponent", k).finish(passed, witness))
}

pub(crate) fn valuation_json(v: crate::arith::Valuation) -> Value {
    serde_json::to_value(v).expect("valuations serialize")
}

pub(crate) fn set_label(set: &[usize]) -> String {
    set.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}
