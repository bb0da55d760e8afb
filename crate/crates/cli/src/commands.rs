use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use serde_json::{json, Value};
use torsionlab::chowring::CacheSnapshot;
use torsionlab::decomp::{is_strongly_totaro_decomposable, is_totaro_decomposable, parse_set};
use torsionlab::generators::Family;
use torsionlab::sublattice::{torsion_oracle_with, OracleOptions};
use torsionlab::torsion::{
    certificate_bound, hspin_bounds, hspin_elementary_bound, m0_of, n0_of, tau2_pgo, tau2_so, tau2_spin, TAU2_HSPIN4,
};
use torsionlab::verify::{self, CheckResult, Mode, Suite, VerifyOptions};
use torsionlab::{Error, Result, RingContext};

use crate::envelope::OutputEnvelope;
use crate::{Cli, Command, DecompArgs, Format, Method, SuiteArg, TableArgs, TauArgs, VerifyArgs, DEFAULT_MAX_ORACLE_N};

/// What a command prints, and whether every check it ran passed.
pub struct Output {
    pub stdout: String,
    pub all_passed: bool,
}

impl Output {
    fn ok(stdout: String) -> Output {
        Output { stdout, all_passed: true }
    }
}

pub fn run(cli: &Cli) -> Result<Output> {
    if cli.max_oracle_n > DEFAULT_MAX_ORACLE_N {
        eprintln!(
            "warning: --max-oracle-n {} exceeds {DEFAULT_MAX_ORACLE_N}; the oracle may take hours and large amounts of memory",
            cli.max_oracle_n
        );
    }
    match &cli.command {
        Command::Table(a) => table(a),
        Command::Tau(a) => tau(cli, a),
        Command::Verify(a) => verify_cmd(cli, a),
        Command::Decomp(a) => decomp(a),
    }
}

fn table(a: &TableArgs) -> Result<Output> {
    let start = Instant::now();
    if !(2 <= a.s_min && a.s_min <= a.s_max && a.s_max <= 64) {
        return Err(Error::InvalidArgument(format!(
            "need 2 <= s-min <= s-max <= 64, got s-min = {}, s-max = {}",
            a.s_min, a.s_max
        )));
    }
    let rows = (a.s_min..=a.s_max).map(|s| Ok((s, n0_of(s), m0_of(s)?))).collect::<Result<Vec<_>>>()?;
    match a.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["s", "n0", "m0"]).map_err(csv_err)?;
            for (s, n0, m0) in &rows {
                w.write_record([s.to_string(), n0.to_string(), m0.to_string()]).map_err(csv_err)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
            Ok(Output::ok(String::from_utf8(bytes).expect("csv output is utf-8")))
        }
        Format::Json => {
            // n0 can exceed u64 near s = 64; emit it as a string there.
            let results: Vec<Value> = rows
                .iter()
                .map(|&(s, n0, m0)| {
                    let n0 = u64::try_from(n0).map(Value::from).unwrap_or_else(|_| Value::from(n0.to_string()));
                    json!({ "s": s, "n0": n0, "m0": m0 })
                })
                .collect();
            let params = json!({ "s_min": a.s_min, "s_max": a.s_max });
            Ok(Output::ok(OutputEnvelope::new("table", params, Value::Array(results), start).render()))
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidArgument(format!("csv: {e}"))
}

fn tau(cli: &Cli, a: &TauArgs) -> Result<Output> {
    let start = Instant::now();
    let mut params = json!({ "family": a.family.as_str(), "n": a.n, "method": a.method.as_str() });
    if a.truncated_bits.is_some() && a.method != Method::Oracle {
        return Err(Error::InvalidArgument("--truncated-bits only applies to --method oracle".into()));
    }
    let (results, line) = match a.method {
        Method::Closed => tau_closed(a)?,
        Method::Elementary => {
            if a.family != Family::Hspin {
                return Err(Error::InvalidArgument("the elementary bound is for hspin only".into()));
            }
            let upper = hspin_elementary_bound(a.n)?;
            (
                json!({ "family": "hspin", "n": a.n, "method": "elementary", "bound": upper }),
                format!("hspin n={} elementary: tau2 <= {upper}", a.n),
            )
        }
        Method::Certificate => {
            if a.family != Family::Hspin {
                return Err(Error::InvalidArgument("the certificate bound is for hspin only".into()));
            }
            let (Some(m), Some(j)) = (a.m, a.j.as_deref()) else {
                return Err(Error::InvalidArgument("--method certificate needs --m and --J".into()));
            };
            let set = parse_set(j)?;
            params["m"] = json!(m);
            params["J"] = json!(set);
            let cert = certificate_bound(a.n, m, &set)?;
            let line = if cert.bounds_hspin {
                format!("hspin n={} certificate m={m} J={j}: tau2 <= {} (verified: {})", a.n, cert.p, cert.verified)
            } else {
                format!(
                    "hspin n={} certificate m={m} J={j}: p = {} (no HSpin bound for this m; verified: {})",
                    a.n, cert.p, cert.verified
                )
            };
            (serde_json::to_value(&cert).expect("certificate serializes"), line)
        }
        Method::Oracle => {
            if a.n as usize > cli.max_oracle_n {
                return Err(Error::OverBudget(format!(
                    "oracle n = {} is above --max-oracle-n {}",
                    a.n, cli.max_oracle_n
                )));
            }
            if let Some(k) = a.truncated_bits {
                params["truncated_bits"] = json!(k);
            }
            let report = oracle(a)?;
            let line = format!("{} n={} oracle: tau = {} (tau2 = {})", a.family, a.n, report.tau, report.tau2);
            (serde_json::to_value(&report).expect("report serializes"), line)
        }
    };
    let stdout = if a.json { OutputEnvelope::new("tau", params, results, start).render() } else { format!("{line}\n") };
    Ok(Output::ok(stdout))
}

fn tau_closed(a: &TauArgs) -> Result<(Value, String)> {
    let n = a.n;
    let simple = |tau2: u64| {
        (
            json!({ "family": a.family.as_str(), "n": n, "method": "closed", "tau2": tau2 }),
            format!("{} n={n} closed: tau2 = {tau2}", a.family),
        )
    };
    Ok(match a.family {
        Family::Spin => simple(tau2_spin(n)?),
        Family::So => simple(tau2_so(n)?),
        Family::Pgo => simple(tau2_pgo(n)?),
        Family::Hspin if n == 2 => simple(TAU2_HSPIN4),
        Family::Hspin => {
            let b = hspin_bounds(n)?;
            let line = if b.lower == b.upper {
                format!("hspin n={n} closed: tau2 = {}", b.upper)
            } else {
                format!("hspin n={n} closed: {} <= tau2 <= {} (equality known: {})", b.lower, b.upper, b.equality_known)
            };
            let mut v = serde_json::to_value(&b).expect("bound serializes");
            v["family"] = json!("hspin");
            v["method"] = json!("closed");
            (v, line)
        }
    })
}

fn cache_path(n: u64) -> Option<PathBuf> {
    std::env::var_os("TORSIONLAB_CACHE_DIR").map(|d| PathBuf::from(d).join(format!("products-n{n:02}.json")))
}

fn oracle(a: &TauArgs) -> Result<torsionlab::sublattice::TorsionReport> {
    let ctx = RingContext::new(a.n as usize)?;
    let path = cache_path(a.n);
    if let Some(p) = path.as_ref().filter(|p| p.exists()) {
        let loaded = fs::read_to_string(p)
            .map_err(|e| e.to_string())
            .and_then(|s| serde_json::from_str::<CacheSnapshot>(&s).map_err(|e| e.to_string()));
        match loaded {
            Ok(snap) => {
                ctx.import_cache(&snap)?;
            }
            Err(e) => eprintln!("warning: ignoring unreadable cache {}: {e}", p.display()),
        }
    }
    let opts = OracleOptions { modulus_bits: a.truncated_bits, ..OracleOptions::default() };
    let report = torsion_oracle_with(&ctx, a.family.label(), opts)?;
    if let Some(p) = path {
        let text = serde_json::to_string(&ctx.export_cache()).expect("cache serializes");
        let written = p.parent().map_or(Ok(()), fs::create_dir_all).and_then(|_| fs::write(&p, text));
        if let Err(e) = written {
            eprintln!("warning: could not write cache {}: {e}", p.display());
        }
    }
    Ok(report)
}

fn verify_cmd(cli: &Cli, a: &VerifyArgs) -> Result<Output> {
    let start = Instant::now();
    let mode = if a.exact {
        Mode::Exact
    } else if a.truncated {
        Mode::Truncated
    } else {
        Mode::Auto
    };
    let opts = VerifyOptions { n: a.n, mode, seed: cli.seed, ..VerifyOptions::default() };
    let suite = match a.suite {
        SuiteArg::Lemma32 => Some(Suite::Lemma32),
        SuiteArg::Skj => Some(Suite::Skj),
        SuiteArg::Dsquared => Some(Suite::Dsquared),
        SuiteArg::Appendix8 => Some(Suite::Appendix8),
        SuiteArg::Hspin12 => Some(Suite::Hspin12),
        SuiteArg::Prop37 => Some(Suite::Prop37),
        SuiteArg::All => None,
    };
    let results: Vec<CheckResult> = match suite {
        Some(s) => verify::run_suite(s, &opts)?,
        None => verify::run_all(&opts)?,
    };
    if let Some(path) = &a.summary_csv {
        let file = fs::File::create(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot create {}: {e}", path.display())))?;
        verify::write_summary_csv(&results, file).map_err(csv_err)?;
    }
    let passed = results.iter().filter(|r| r.passed).count();
    let all_passed = passed == results.len();
    let stdout = if a.json {
        let params = json!({
            "suite": suite.map_or("all", |s| s.as_str()),
            "n": a.n,
            "mode": mode.as_str(),
            "seed": cli.seed,
        });
        let body = json!({
            "checks": results,
            "summary": { "total": results.len(), "passed": passed, "failed": results.len() - passed },
        });
        OutputEnvelope::new("verify", params, body, start).render()
    } else {
        let mut buf = Vec::new();
        verify::write_jsonl(&results, &mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("jsonl is utf-8")
    };
    Ok(Output { stdout, all_passed })
}

fn decomp(a: &DecompArgs) -> Result<Output> {
    let start = Instant::now();
    let set: BTreeSet<u64> = parse_set(&a.set)?;
    let mut params = json!({ "set": set });
    let (decomposable, certificate) = is_totaro_decomposable(&set);
    let mut results = json!({ "decomposable": decomposable, "certificate": certificate });
    if let Some(n) = a.n {
        params["n"] = json!(n);
    }
    if a.strong {
        let Some(n) = a.n else {
            return Err(Error::InvalidArgument("--strong needs --n".into()));
        };
        results["strongly_decomposable"] = json!(is_strongly_totaro_decomposable(&set, n)?);
    }
    Ok(Output::ok(OutputEnvelope::new("decomp", params, results, start).render()))
}
