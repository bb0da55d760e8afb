//! Totaro-decomposable subsets.
//!
//! A finite set `J` of positive integers with `Σ J = 2^a - 1` (`a >= 1`) is
//! decomposable when it splits into powers of 2 and pairs whose sum is a
//! power of 2.
//!
//! The split is forced by the largest element `x`: a power of 2 cannot pair
//! with a smaller element (the sum would lie strictly between `x` and `2x`),
//! and any other `x` can only pair with `2^⌈log2 x⌉ - x`. So the decision
//! procedure below never backtracks.

use std::collections::BTreeSet;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::arith::{is_power_of_two, mersenne_exponent, v2_u64};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DecompositionCertificate {
    pub singletons: Vec<u64>,
    pub pairs: Vec<(u64, u64)>,
}

impl DecompositionCertificate {
    pub fn elements(&self) -> BTreeSet<u64> {
        self.singletons.iter().copied().chain(self.pairs.iter().flat_map(|&(a, b)| [a, b])).collect()
    }

    pub fn degree(&self) -> u64 {
        self.elements().iter().sum()
    }

    /// `a` with `degree = 2^a - 1`, if the degree has that shape.
    pub fn a(&self) -> Option<u32> {
        mersenne_exponent(self.degree())
    }
}

impl Serialize for DecompositionCertificate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("DecompositionCertificate", 4)?;
        st.serialize_field("singletons", &self.singletons)?;
        st.serialize_field("pairs", &self.pairs.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>())?;
        st.serialize_field("degree", &self.degree())?;
        st.serialize_field("a", &self.a())?;
        st.end()
    }
}

fn set_degree(j: &BTreeSet<u64>) -> u64 {
    j.iter().sum()
}

/// True iff `cert` partitions `j` into valid parts and `Σ J = 2^a - 1`, `a >= 1`.
pub fn check_certificate(j: &BTreeSet<u64>, cert: &DecompositionCertificate) -> bool {
    let mut seen = BTreeSet::new();
    for &x in &cert.singletons {
        if !is_power_of_two(x) || !seen.insert(x) {
            return false;
        }
    }
    for &(a, b) in &cert.pairs {
        if a == b || !is_power_of_two(a + b) || !seen.insert(a) || !seen.insert(b) {
            return false;
        }
    }
    seen == *j && matches!(mersenne_exponent(set_degree(j)), Some(a) if a >= 1)
}

/// Decides decomposability and returns the (unique) certificate when it holds.
pub fn is_totaro_decomposable(j: &BTreeSet<u64>) -> (bool, Option<DecompositionCertificate>) {
    if j.contains(&0) || !matches!(mersenne_exponent(set_degree(j)), Some(a) if a >= 1) {
        return (false, None);
    }
    let mut rest = j.clone();
    let mut cert = DecompositionCertificate::default();
    while let Some(x) = rest.pop_last() {
        if is_power_of_two(x) {
            cert.singletons.push(x);
            continue;
        }
        let y = x.next_power_of_two() - x;
        if !rest.remove(&y) {
            return (false, None);
        }
        cert.pairs.push((y, x));
    }
    cert.singletons.reverse();
    cert.pairs.reverse();
    debug_assert!(check_certificate(j, &cert));
    (true, Some(cert))
}

/// `{2^i : 0 <= i <= v2(n)} ∩ [1, n-1]`, the required trace of a strongly
/// decomposable set on `[1, 2^v2(n)]`.
fn strong_trace(n: u64) -> BTreeSet<u64> {
    (0..=v2_u64(n)).map(|i| 1u64 << i).filter(|&x| x < n).collect()
}

fn check_even_subset(j: &BTreeSet<u64>, n: u64) -> Result<()> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::InvalidArgument(format!("n must be even and positive, got {n}")));
    }
    if let Some(x) = j.iter().find(|&&x| x == 0 || x >= n) {
        return Err(Error::InvalidArgument(format!("element {x} outside [1, {}]", n - 1)));
    }
    Ok(())
}

/// Decomposable and `J ∩ [1, 2^v2(n)] = {2^i : 0 <= i <= v2(n)} ∩ [1, n-1]`.
pub fn is_strongly_totaro_decomposable(j: &BTreeSet<u64>, n: u64) -> Result<bool> {
    check_even_subset(j, n)?;
    let bound = 1u64 << v2_u64(n);
    let trace: BTreeSet<u64> = j.range(1..=bound).copied().collect();
    Ok(trace == strong_trace(n) && is_totaro_decomposable(j).0)
}

/// `J_s = {2^(s-1) ± k : 1 <= k <= 2^(s-2) - 1} ∪ {2^i : 0 <= i <= s-1}`, of
/// degree `2^(2s-2) - 1`.
pub fn construct_js(s: u32) -> Result<BTreeSet<u64>> {
    if !(2..=32).contains(&s) {
        return Err(Error::InvalidArgument(format!("J_s needs 2 <= s <= 32, got {s}")));
    }
    let mid = 1u64 << (s - 1);
    let mut j: BTreeSet<u64> = (0..s).map(|i| 1u64 << i).collect();
    for k in 1..(1u64 << (s - 2)) {
        j.insert(mid + k);
        j.insert(mid - k);
    }
    Ok(j)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SearchOutcome {
    Found { set: BTreeSet<u64>, nodes: u64 },
    ProvenAbsent { nodes: u64 },
    BudgetExhausted { nodes: u64 },
}

pub const DEFAULT_SEARCH_BUDGET: u64 = 10_000_000;

/// Looks for a strongly decomposable `J ⊆ [1, n-1]` of the given degree that
/// avoids `must_exclude`.
///
/// Elements are decided from `n-1` downwards; including a non-power of 2
/// also commits its forced partner. Exhausting the tree proves absence;
/// running out of `budget` nodes is reported separately.
pub fn search_strongly_decomposable(
    n: u64,
    target_degree: u64,
    must_exclude: &BTreeSet<u64>,
    budget: u64,
) -> Result<SearchOutcome> {
    if n < 2 || n % 2 == 1 {
        return Err(Error::InvalidArgument(format!("n must be even, got {n}")));
    }
    if !matches!(mersenne_exponent(target_degree), Some(a) if a >= 1) {
        return Err(Error::InvalidArgument(format!("degree {target_degree} is not of the form 2^a - 1")));
    }
    if target_degree > n.saturating_mul(n - 1) / 2 {
        return Err(Error::InvalidArgument(format!("degree {target_degree} exceeds n(n-1)/2")));
    }
    let bound = 1u64 << v2_u64(n);
    let required = strong_trace(n);
    if required.iter().any(|x| must_exclude.contains(x)) {
        return Ok(SearchOutcome::ProvenAbsent { nodes: 0 });
    }
    // Within [1, 2^v2(n)] membership is dictated by the strong condition.
    let allowed: Vec<bool> =
        (0..n).map(|x| x >= 1 && !must_exclude.contains(&x) && (x > bound || required.contains(&x))).collect();
    let mut st = Search { allowed, required, budget, nodes: 0, used: vec![false; n as usize], chosen: Vec::new() };
    let found = st.go(n - 1, target_degree);
    let nodes = st.nodes;
    match found {
        Some(true) => {
            let set: BTreeSet<u64> = st.chosen.iter().copied().collect();
            // Independent re-check of the witness.
            if !is_strongly_totaro_decomposable(&set, n)?
                || set_degree(&set) != target_degree
                || set.iter().any(|x| must_exclude.contains(x))
            {
                return Err(Error::Precondition(format!("search produced an invalid witness {set:?}")));
            }
            Ok(SearchOutcome::Found { set, nodes })
        }
        Some(false) => Ok(SearchOutcome::ProvenAbsent { nodes }),
        None => Ok(SearchOutcome::BudgetExhausted { nodes }),
    }
}

struct Search {
    allowed: Vec<bool>,
    required: BTreeSet<u64>,
    budget: u64,
    nodes: u64,
    used: Vec<bool>,
    chosen: Vec<u64>,
}

impl Search {
    // Some(true): found; Some(false): subtree empty; None: budget exhausted.
    fn go(&mut self, x: u64, need: u64) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        let required_left: u64 = self.required.iter().filter(|&&r| r <= x && !self.used[r as usize]).sum();
        if need < required_left {
            return Some(false);
        }
        if x == 0 {
            return Some(need == 0);
        }
        let avail: u64 = (1..=x).filter(|&y| self.allowed[y as usize] && !self.used[y as usize]).sum();
        if avail < need {
            return Some(false);
        }
        if self.used[x as usize] {
            return self.go(x - 1, need);
        }
        let mut exhausted = false;
        if self.allowed[x as usize] && x <= need {
            let partner = if is_power_of_two(x) { None } else { Some(x.next_power_of_two() - x) };
            let ok = match partner {
                None => true,
                Some(y) => self.allowed[y as usize] && !self.used[y as usize] && x + y <= need,
            };
            if ok {
                let take = x + partner.unwrap_or(0);
                self.used[x as usize] = true;
                self.chosen.push(x);
                if let Some(y) = partner {
                    self.used[y as usize] = true;
                    self.chosen.push(y);
                }
                match self.go(x - 1, need - take) {
                    Some(true) => return Some(true),
                    Some(false) => {}
                    None => exhausted = true,
                }
                self.used[x as usize] = false;
                self.chosen.pop();
                if let Some(y) = partner {
                    self.used[y as usize] = false;
                    self.chosen.pop();
                }
            }
        }
        if !exhausted && !self.required.contains(&x) {
            match self.go(x - 1, need) {
                Some(true) => return Some(true),
                Some(false) => {}
                None => exhausted = true,
            }
        }
        if exhausted {
            None
        } else {
            Some(false)
        }
    }
}

pub fn parse_set(text: &str) -> Result<BTreeSet<u64>> {
    let mut out = BTreeSet::new();
    for tok in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let x: u64 = tok.parse().map_err(|_| Error::Parse(format!("not a positive integer: {tok:?}")))?;
        if x == 0 || !out.insert(x) {
            return Err(Error::Parse(format!("set elements must be positive and distinct: {tok:?}")));
        }
    }
    Ok(out)
}
