//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use serde_json::Value;
use torsionlab::generators::Family;
use torsionlab::sublattice::{torsion_oracle, torsion_oracle_with, OracleOptions};
use torsionlab::torsion::{hspin_bounds, m0_of, tau2_spin};
use torsionlab::verify::{check_prop_totaro2divisible, run_suite, CheckResult, Suite, VerifyOptions, DEFAULT_SEED};
use torsionlab::RingContext;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn suite(s: Suite, n: usize) -> Result<Vec<CheckResult>, String> {
    let opts = VerifyOptions { n: Some(n), seed: DEFAULT_SEED, ..VerifyOptions::default() };
    run_suite(s, &opts).map_err(|e| format!("{s} n={n}: {e}"))
}

fn all_pass(rs: &[CheckResult]) -> Result<(), String> {
    match rs.iter().find(|r| !r.passed) {
        None => Ok(()),
        Some(r) => Err(format!("{} failed: {}", r.check_id, r.witness)),
    }
}

fn n0_direct(s: u32) -> u64 {
    let target = 1u64 << (2 * s);
    (2..).find(|&n: &u64| n * (n - 1) / 2 + 1 >= target).unwrap()
}

fn c1_table() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_torsionlab"))
        .args(["table", "--s-min", "2", "--s-max", "10", "--format", "csv"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("exit status {:?}", out.status.code()))?;
    let text = String::from_utf8_lossy(&out.stdout);
    let quoted = "s,n0,m0\n2,6,0\n3,12,1\n4,24,1\n5,46,2\n6,91,2\n7,182,3\n8,363,4\n9,725,4\n10,1449,5\n";
    ensure(text == quoted, || format!("table differs:\n{text}"))?;
    for s in 2..=10 {
        ensure(text.lines().any(|l| l.starts_with(&format!("{s},{},", n0_direct(s)))), || {
            format!("n0({s}) disagrees with direct search")
        })?;
    }
    Ok("9 rows match".into())
}

fn c2_spin_closed_form() -> Outcome {
    for (n, want) in [(4u64, 1u64), (6, 1), (12, 5)] {
        let got = tau2_spin(n).map_err(|e| e.to_string())?;
        ensure(got == want, || format!("tau2(Spin({})) = {got}, want {want}", 2 * n))?;
    }
    let mut checked = 0;
    for s in 2u32..=10 {
        let (n0, m0) = (n0_direct(s), m0_of(s).map_err(|e| e.to_string())?);
        let base = 1u64 << s;
        for n in base + 1..=(2 * base).min(2048) {
            let want = if n <= base + m0 {
                n + 1 - 2 * s as u64
            } else if n < n0 {
                n - 2 * s as u64
            } else {
                n - 2 * s as u64 - 1
            };
            let got = tau2_spin(n).map_err(|e| e.to_string())?;
            ensure(got == want, || format!("n = {n}: got {got}, three-clause shape gives {want}"))?;
            checked += 1;
        }
    }
    Ok(format!("quoted values match; shape holds for {checked} values of n in [5, 2048]"))
}

fn oracle_tau2(family: Family, n: usize) -> Result<u64, String> {
    let ctx = RingContext::new(n).map_err(|e| e.to_string())?;
    let r = torsion_oracle(&ctx, family.label()).map_err(|e| format!("{family} n={n}: {e}"))?;
    ensure(r.tau == ibig::UBig::from(1u8) << r.tau2 as usize, || format!("{family} n={n}: odd part in {}", r.tau))?;
    Ok(r.tau2)
}

fn c3_oracle() -> Outcome {
    for n in 3..=7 {
        let t = oracle_tau2(Family::So, n)?;
        ensure(t == n as u64 - 1, || format!("tau2(SO({})) = {t}", 2 * n))?;
    }
    let cases = [
        (Family::Spin, 6, 1),
        (Family::Spin, 8, 3),
        (Family::Hspin, 4, 3),
        (Family::Hspin, 6, 2),
        (Family::Hspin, 8, 6),
    ];
    for (f, n, want) in cases {
        let t = oracle_tau2(f, n)?;
        ensure(t == want, || format!("tau2({f}({})) = {t}, want {want}", 2 * n))?;
    }
    let ctx = RingContext::new(8).map_err(|e| e.to_string())?;
    let truncated = torsion_oracle_with(
        &ctx,
        Family::Hspin.label(),
        OracleOptions { modulus_bits: Some(7), ..OracleOptions::default() },
    )
    .map_err(|e| e.to_string())?;
    ensure(truncated.tau2 == 6, || format!("mod 2^7 run gives tau2 = {}", truncated.tau2))?;
    Ok("SO(6..14), Spin(12), Spin(16), HSpin(8), HSpin(12), HSpin(16) exact, odd part 1".into())
}

fn c4_lemma() -> Outcome {
    let mut counted = 0;
    for n in [4usize, 6, 8] {
        let rs = suite(Suite::Lemma32, n)?;
        all_pass(&rs)?;
        let main: Vec<&CheckResult> = rs.iter().filter(|r| !r.check_id.contains("generalJ")).collect();
        let expected = (0u64..1 << (n - 1))
            .filter(|mask| {
                let deg: u64 = (1..n as u64).filter(|i| mask >> (i - 1) & 1 == 1).sum();
                deg >= 1 && (deg + 1).is_power_of_two()
            })
            .count();
        ensure(main.len() == expected, || format!("n={n}: {} checks for {expected} Mersenne-degree sets", main.len()))?;
        for r in main {
            let j: BTreeSet<u64> = serde_json::from_value(r.parameters["J"].clone()).map_err(|e| e.to_string())?;
            let a = r.parameters["a"].as_u64().unwrap();
            let v = r.witness["valuation"].as_u64();
            let brute = support::brute_force_decomposable(&j);
            let ok = if brute { v == Some(n as u64 - a - 1) } else { v.is_none_or(|v| v >= n as u64 - a) };
            ensure(ok, || format!("{}: valuation {v:?} vs brute-force decomposable = {brute}", r.check_id))?;
            counted += 1;
        }
    }
    Ok(format!("{counted} sets J, decomposability cross-checked by brute force"))
}

fn c5_certificates() -> Outcome {
    for (n, m, j, p) in [(6u64, 2u64, vec![1u64, 2, 4], 2u64), (12, 4, vec![1, 2, 4, 8], 7)] {
        let r = check_prop_totaro2divisible(n, m, &j.iter().copied().collect()).map_err(|e| e.to_string())?;
        ensure(r.passed, || format!("{} failed: {}", r.check_id, r.witness))?;
        let got = r.witness["p"].as_u64();
        ensure(got == Some(p), || format!("{}: p = {got:?}, want {p}", r.check_id))?;
        ensure(r.witness["bounds_hspin"] == Value::Bool(true), || format!("{}: no HSpin bound", r.check_id))?;
    }
    Ok("(6,2,{1,2,4}) p=2 and (12,4,{1,2,4,8}) p=7".into())
}

fn c6_identities() -> Outcome {
    let mut total = 0;
    for n in [4usize, 6, 8] {
        let mut rs = suite(Suite::Skj, n)?;
        rs.extend(suite(Suite::Dsquared, n)?);
        all_pass(&rs)?;
        let count = |needle: &str| rs.iter().filter(|r| r.check_id.contains(needle)).count();
        ensure(count("/t2nminusone") == 1 && count("/tnconeprime") == 1, || format!("n={n}: missing t identities"))?;
        ensure(count("/disquared/") == n - 1, || format!("n={n}: {} d_i^2 checks", count("/disquared/")))?;
        ensure(count("/twoniti/") == 2 * n - 2, || format!("n={n}: {} 2^n t^i checks", count("/twoniti/")))?;
        ensure(count("/expansion") == n - 1, || format!("n={n}: {} expansion checks", count("/expansion")))?;
        total += rs.len();
    }
    Ok(format!("{total} checks across n = 4, 6, 8"))
}

fn c7_appendix() -> Outcome {
    let rs = suite(Suite::Appendix8, 8)?;
    all_pass(&rs)?;
    let scan = rs.iter().find(|r| r.check_id.ends_with("degree35_scan")).ok_or("no degree-35 scan")?;
    ensure(scan.witness["min"].as_u64() == Some(6) && scan.witness["min_is_exact"] == Value::Bool(true), || {
        format!("scan witness {}", scan.witness)
    })?;
    Ok(format!("{} checks; degree-35 minimum valuation 6", rs.len()))
}

fn c8_bounds() -> Outcome {
    for n in (4..=128u64).step_by(2) {
        let b = hspin_bounds(n).map_err(|e| e.to_string())?;
        ensure(b.lower <= b.upper, || format!("n={n}: lower {} > upper {}", b.lower, b.upper))?;
        ensure(!b.equality_known || b.lower == b.upper, || {
            format!("n={n}: equality flagged but {} < {}", b.lower, b.upper)
        })?;
    }
    for n in [4usize, 6, 8] {
        let upper = hspin_bounds(n as u64).map_err(|e| e.to_string())?.upper;
        let t = oracle_tau2(Family::Hspin, n)?;
        ensure(upper == t, || format!("n={n}: closed-form upper {upper}, oracle {t}"))?;
    }
    Ok("lower <= upper on [4, 128]; upper = oracle at n = 4, 6, 8".into())
}

fn c9_properties() -> Outcome {
    let results = support::all(DEFAULT_SEED);
    for (name, r) in &results {
        r.as_ref().map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(results.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("n0/m0 table", Duration::from_secs(1), c1_table),
        ("closed-form Spin values", Duration::from_secs(5), c2_spin_closed_form),
        ("oracle torsion indexes", Duration::from_secs(15 * 60), c3_oracle),
        ("decomposability lemma, exhaustive", Duration::from_secs(120), c4_lemma),
        ("certificate proposition", Duration::from_secs(30 * 60), c5_certificates),
        ("identity suite", Duration::from_secs(300), c6_identities),
        ("n = 8 congruences and degree-35 scan", Duration::from_secs(15 * 60), c7_appendix),
        ("HSpin bounds consistency", Duration::from_secs(15 * 60), c8_bounds),
        ("property suites", Duration::from_secs(120), c9_properties),
    ];
    let mut failed = 0;
    for (k, (name, budget, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let took = start.elapsed();
        let outcome =
            outcome
                .and_then(|d| if took <= *budget { Ok(d) } else { Err(format!("took {took:?}, budget {budget:?}")) });
        match outcome {
            Ok(detail) => println!("criterion {} PASS {name} ({} ms): {detail}", k + 1, took.as_millis()),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL {name} ({} ms): {why}", k + 1, took.as_millis());
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
