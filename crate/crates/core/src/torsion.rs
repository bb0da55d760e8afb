//! Closed-form torsion indexes.
//!
//! * Spin(2n): Totaro's recursion in terms of the thresholds `n0(s)`, `m0(s)`.
//! * SO(2n) and PGO(2n): `n - 1`, plus one for PGO when `n` is a power of 2.
//! * HSpin(2n): lower bound `τ2(Spin(2n))`, upper bounds from the case
//!   analysis in [`hspin_bounds`] and the elementary bound, and
//!   certificate-based bounds in [`certificate_bound`].
//!
//! All values are 2-adic valuations.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use ibig::UBig;
use serde::Serialize;

use crate::arith::{digit_sum_2, dyadic_band, is_power_of_two, v2_u64, Valuation};
use crate::chowring::{RingContext, RingElement};
use crate::decomp::{is_strongly_totaro_decomposable, is_totaro_decomposable};
use crate::error::{Error, Result};
use crate::generators::{c_of, chern_d};

/// Smallest `n` with `C(n, 2) + 1 >= 2^(2s)`.
pub fn n0_of(s: u32) -> u128 {
    let target = UBig::from(1u8) << (2 * s as usize);
    let ok = |n: u128| {
        let c2 = UBig::from(n) * UBig::from(n.saturating_sub(1)) / UBig::from(2u8);
        c2 + UBig::from(1u8) >= target
    };
    // C(n,2) + 1 >= 4^s holds at n = 2^(s+1).
    let (mut lo, mut hi) = (0u128, 1u128 << (s + 1));
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

fn m0_table() -> &'static Mutex<HashMap<u32, u64>> {
    static TABLE: OnceLock<Mutex<HashMap<u32, u64>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Smallest `m >= 0` with `2m - τ2(Spin(2m + 2)) > s - 3`, for `s >= 2`.
pub fn m0_of(s: u32) -> Result<u64> {
    if s < 2 {
        return Err(Error::InvalidArgument(format!("m0 is defined for s >= 2, got {s}")));
    }
    if let Some(&m) = m0_table().lock().expect("m0 table poisoned").get(&s) {
        return Ok(m);
    }
    let mut m = 0u64;
    // τ2(Spin(2m+2)) <= m, so the loop ends by m = s - 2.
    loop {
        let lhs = 2 * m as i64 - tau2_spin(m + 1)? as i64;
        if lhs > s as i64 - 3 {
            break;
        }
        m += 1;
    }
    m0_table().lock().expect("m0 table poisoned").insert(s, m);
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpinParameters {
    pub n: u64,
    pub s: u32,
    pub n0: u128,
    pub m0: u64,
}

/// Band data for `n >= 5`, i.e. `n ∈ (2^s, 2^(s+1)]` with `s >= 2`.
pub fn spin_parameters(n: u64) -> Result<SpinParameters> {
    if n < 5 {
        return Err(Error::InvalidArgument(format!("band parameters need n >= 5, got {n}")));
    }
    let s = dyadic_band(n);
    Ok(SpinParameters { n, s, n0: n0_of(s), m0: m0_of(s)? })
}

/// `τ2(Spin(2n))`.
pub fn tau2_spin(n: u64) -> Result<u64> {
    match n {
        0 => Err(Error::InvalidArgument("n must be positive".into())),
        1..=3 => Ok(0),
        4 => Ok(1),
        _ => {
            let p = spin_parameters(n)?;
            let (s, base) = (p.s as u64, 1u64 << p.s);
            Ok(if n <= base + p.m0 {
                n - 2 * s + 1
            } else if (n as u128) < p.n0 {
                n - 2 * s
            } else {
                n - 2 * s - 1
            })
        }
    }
}

/// `τ2(SO(2n)) = n - 1`.
pub fn tau2_so(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    Ok(n - 1)
}

/// `τ2(PGO(2n)) = n - 1`, plus 1 when `n` is a power of 2.
pub fn tau2_pgo(n: u64) -> Result<u64> {
    Ok(tau2_so(n)? + is_power_of_two(n) as u64)
}

/// `τ(HSpin(4)) = 2`, via `HSpin(4) = Spin(3) × SO(3)`; outside the D_n model.
pub const TAU2_HSPIN4: u64 = 1;

fn check_even(n: u64) -> Result<()> {
    if n < 4 || n % 2 == 1 {
        return Err(Error::InvalidArgument(format!("HSpin(2n) bounds need even n >= 4, got {n}")));
    }
    Ok(())
}

/// `n - S2(C(n,2))`, plus 1 when `4 | n`.
pub fn hspin_elementary_bound(n: u64) -> Result<u64> {
    check_even(n)?;
    let c2 = n as u128 * (n as u128 - 1) / 2;
    Ok(n - digit_sum_2(c2) as u64 + (v2_u64(n) >= 2) as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    #[serde(rename = "generic_2x")]
    Generic2x,
    #[serde(rename = "n4_or_n12_4x")]
    N4OrN12x4,
    #[serde(rename = "pow2_or_3pow2_8x")]
    Pow2Or3Pow2x8,
}

impl CaseTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseTag::Generic2x => "generic_2x",
            CaseTag::N4OrN12x4 => "n4_or_n12_4x",
            CaseTag::Pow2Or3Pow2x8 => "pow2_or_3pow2_8x",
        }
    }

    pub fn increment(&self) -> u64 {
        match self {
            CaseTag::Generic2x => 1,
            CaseTag::N4OrN12x4 => 2,
            CaseTag::Pow2Or3Pow2x8 => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HSpinBound {
    pub n: u64,
    pub lower: u64,
    pub upper: u64,
    pub equality_known: bool,
    pub case_tag: CaseTag,
    pub provenance: Vec<String>,
}

fn case_of(n: u64) -> CaseTag {
    let s = dyadic_band(n);
    if n == 6 {
        CaseTag::Generic2x
    } else if n == 4 || n == 12 {
        CaseTag::N4OrN12x4
    } else if (n == 1 << (s + 1) && s >= 2) || (s >= 4 && n == 3 << (s - 1)) {
        CaseTag::Pow2Or3Pow2x8
    } else {
        CaseTag::Generic2x
    }
}

/// Which equality clause applies, if any.
fn equality_clause(n: u64) -> Result<Option<&'static str>> {
    if n < 9 {
        return Ok(None);
    }
    let p = spin_parameters(n)?;
    if p.s < 3 {
        return Ok(None);
    }
    let (b, m0, n0) = (1u128 << p.s, p.m0 as u128, p.n0);
    let x = n as u128;
    let open = |lo: u128, hi: u128| lo < x && x < hi;
    if (b < x && x <= b + m0) || open(b + (b >> 3), b + (b >> 2)) || open(b + (b >> 2), n0) || open(b + (b >> 1), 2 * b)
    {
        return Ok(Some("interval"));
    }
    if v2_u64(n) == 1 && (open(b + m0 + 1, n0) || open(n0, 2 * b)) {
        return Ok(Some("v2_one"));
    }
    Ok(None)
}

pub fn hspin_bounds(n: u64) -> Result<HSpinBound> {
    check_even(n)?;
    let lower = tau2_spin(n)?;
    let case_tag = case_of(n);
    let theorem = lower + case_tag.increment();
    let elementary = hspin_elementary_bound(n)?;
    let mut provenance = vec![format!("lower: thm:totaromain gives tau2(Spin(2n)) = {lower}")];
    provenance.push(format!("case {}: thm:main gives upper {theorem}", case_tag.as_str()));
    provenance.push(format!("lem:s22mchoose2 gives upper {elementary}"));
    let mut upper = theorem.min(elementary);
    let clause = equality_clause(n)?;
    match clause {
        Some("interval") => provenance.push("equality: cor:intervalupperbd".into()),
        Some(_) => provenance.push(
            "equality: cor:3powerthreeupp (v2(n) = 1, n in (2^s+m0+1, n0) ∪ (n0, 2^(s+1))); \
             thm:main states the narrower (2^s+m0+1, 2^s+2^(s-3)) ∪ (n0, 2^s+2^(s-1)); \
             relies on decomposable sets constructed in the cited Spin computation"
                .into(),
        ),
        None => {}
    }
    let equality_known = clause.is_some();
    if equality_known {
        upper = lower;
    }
    Ok(HSpinBound { n, lower, upper, equality_known, case_tag, provenance })
}

/// Output of [`certificate_bound`].
#[derive(Debug, Clone, Serialize)]
pub struct CertificateBound {
    pub n: u64,
    pub m: u64,
    pub j: BTreeSet<u64>,
    pub a: u32,
    /// `n - a - 1`.
    pub p: u64,
    /// `v̂2(e_1^deg J · c(I) · t^(n-1))`.
    pub reference_valuation: Valuation,
    /// `v̂2(e_1^deg J · d(I \ {n-m+1}) · t^(2n-m))`.
    pub t_variant_valuation: Valuation,
    /// `v̂2(e_1^deg J · d(I \ {n-m+1}) · d_m^((2n-m)/m))`, only for `m = 2^v2(n)`.
    pub d_variant_valuation: Option<Valuation>,
    pub verified: bool,
    /// True when the `d_m`-power element exists; it lies in the HSpin subring and
    /// bounds `τ2(HSpin(2n))` by `p`.
    pub bounds_hspin: bool,
}

/// Checks every precondition for the divisibility statement and returns
/// `(a, I)`.
fn certificate_preconditions(n: u64, m: u64, j: &BTreeSet<u64>) -> Result<(u32, BTreeSet<u64>)> {
    if n < 4 || n % 2 == 1 {
        return Err(Error::Precondition(format!("n must be even and >= 4, got {n}")));
    }
    let v = v2_u64(n);
    if !is_power_of_two(m) || m > 1 << v {
        return Err(Error::Precondition(format!("m = {m} must divide 2^v2(n) = {}", 1u64 << v)));
    }
    if m < 2 || m > n / 2 {
        return Err(Error::Precondition(format!("m = {m} must satisfy 2 <= m <= n/2 = {}", n / 2)));
    }
    if !is_strongly_totaro_decomposable(j, n)? {
        return Err(Error::Precondition(format!("J = {j:?} is not strongly decomposable for n = {n}")));
    }
    let i: BTreeSet<u64> = (1..n).filter(|x| !j.contains(x)).collect();
    if let Some(x) = (n - m + 1..n).find(|x| !i.contains(x)) {
        return Err(Error::Precondition(format!("I = [1, n-1] \\ J must contain [n-m+1, n-1]; {x} is in J")));
    }
    let cert = is_totaro_decomposable(j).1.expect("strongly decomposable sets are decomposable");
    let a = cert.a().expect("decomposable sets have Mersenne degree");
    Ok((a, i))
}

pub fn certificate_bound(n: u64, m: u64, j: &BTreeSet<u64>) -> Result<CertificateBound> {
    let (a, i) = certificate_preconditions(n, m, j)?;
    let ctx = RingContext::new(n as usize)?;
    let p = n - a as u64 - 1;
    let deg_j: u64 = j.iter().sum();
    let e1_power = RingElement::gen_e(&ctx, 1)?.pow(deg_j);
    let t = RingElement::gen_t(&ctx);
    let idx = |set: &BTreeSet<u64>| set.iter().map(|&x| x as usize).collect::<Vec<_>>();

    let reference = &(&e1_power * &c_of(&ctx, &idx(&i))?) * &t.pow(n - 1);
    let mut rest = i.clone();
    rest.remove(&(n - m + 1));
    let base = mul_chain(&ctx, &e1_power, &idx(&rest))?;
    let t_variant = &base * &t.pow(2 * n - m);
    let d_variant = if m == 1 << v2_u64(n) {
        let dm = chern_d(&ctx, m as usize)?;
        Some((&base * &dm.pow((2 * n - m) / m)).valuation_hat())
    } else {
        None
    };
    let reference_valuation = reference.valuation_hat();
    let t_variant_valuation = t_variant.valuation_hat();
    let target = Valuation::Finite(p);
    let verified =
        reference_valuation == target && t_variant_valuation == target && d_variant.is_none_or(|v| v == target);
    Ok(CertificateBound {
        n,
        m,
        j: j.clone(),
        a,
        p,
        reference_valuation,
        t_variant_valuation,
        d_variant_valuation: d_variant,
        verified,
        bounds_hspin: d_variant.is_some(),
    })
}

// `start · d(set)`, multiplying one factor at a time so intermediate products
// stay small.
fn mul_chain(ctx: &Arc<RingContext>, start: &RingElement, set: &[usize]) -> Result<RingElement> {
    let mut acc = start.clone();
    for &k in set.iter().rev() {
        acc = &acc * &chern_d(ctx, k)?;
        if acc.is_zero() {
            break;
        }
    }
    Ok(acc)
}
