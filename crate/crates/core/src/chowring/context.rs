use std::sync::Arc;

use dashmap::DashMap;
use ibig::IBig;
use serde::{Deserialize, Serialize};

use super::Monomial;
use crate::error::{Error, Result};

/// Sparse expansion of a product of `e_i` in the square-free basis of CH(Y),
/// as `(mask, coefficient)` pairs sorted by mask.
pub type EExpansion = Arc<[(u64, IBig)]>;

/// Largest supported rank; e-subsets are stored in a `u64` bitmask.
pub const MAX_RANK: usize = 64;

/// Fixed rank `n` of the D_n flag variety together with the memo tables used
/// by multiplication.
///
/// The basis of CH(X) is `{ e(I) t^j : I ⊆ [1, n-1], 0 <= j <= n-1 }`. Bit `i`
/// of a mask stands for `e_i`; bit 0 is never set.
#[derive(Debug)]
pub struct RingContext {
    n: usize,
    dim_x: usize,
    dim_y: usize,
    full_mask: u64,
    // e_i * e(M) for i ∈ M, keyed by (i, M).
    square_cache: DashMap<(u32, u64), EExpansion>,
    // e(A) * e(B) keyed by (A ∪ B, A ∩ B).
    pair_cache: DashMap<(u64, u64), EExpansion>,
}

impl RingContext {
    pub fn new(n: usize) -> Result<Arc<RingContext>> {
        if !(2..=MAX_RANK).contains(&n) {
            return Err(Error::InvalidArgument(format!("rank n must lie in [2, {MAX_RANK}], got {n}")));
        }
        let full_mask = if n == MAX_RANK { u64::MAX - 1 } else { ((1u64 << n) - 1) & !1 };
        Ok(Arc::new(RingContext {
            n,
            dim_x: (n - 1) * (n + 2) / 2,
            dim_y: n * (n - 1) / 2,
            full_mask,
            square_cache: DashMap::new(),
            pair_cache: DashMap::new(),
        }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension of X, the degree of the top component.
    pub fn dim_x(&self) -> usize {
        self.dim_x
    }

    /// Dimension of Y; e-monomials of larger degree vanish.
    pub fn dim_y(&self) -> usize {
        self.dim_y
    }

    /// Mask of `{1, ..., n-1}`.
    pub fn full_mask(&self) -> u64 {
        self.full_mask
    }

    pub fn basis_len(&self) -> usize {
        self.n << (self.n - 1)
    }

    pub fn cache_sizes(&self) -> (usize, usize) {
        (self.square_cache.len(), self.pair_cache.len())
    }

    /// Multiplies two sorted term lists and returns the reduced product, sorted.
    pub(crate) fn mul_terms(&self, a: &[(Monomial, IBig)], b: &[(Monomial, IBig)]) -> Vec<(Monomial, IBig)> {
        let n = self.n;
        let mut buckets: Vec<Vec<(u64, IBig)>> = vec![Vec::new(); 2 * n - 1];
        for (ma, ca) in a {
            for (mb, cb) in b {
                let k = (ma.tpow + mb.tpow) as usize;
                let c = ca * cb;
                if ma.eset & mb.eset == 0 {
                    buckets[k].push((ma.eset | mb.eset, c));
                } else {
                    for (m, pc) in self.e_product(ma.eset, mb.eset).iter() {
                        buckets[k].push((*m, &c * pc));
                    }
                }
            }
        }
        self.reduce_buckets(buckets)
    }

    /// Folds t-powers `>= n` down using `t^n = Σ_{i=1}^{n-1} (-1)^(i+1) 2 e_i t^(n-i)`,
    /// one power at a time from the top, then collects the result.
    pub(crate) fn reduce_buckets(&self, mut buckets: Vec<Vec<(u64, IBig)>>) -> Vec<(Monomial, IBig)> {
        let n = self.n;
        for k in (n..buckets.len()).rev() {
            let bucket = combine(std::mem::take(&mut buckets[k]));
            for (mask, coef) in bucket {
                let two = &coef * IBig::from(2u8);
                let neg_two = -&two;
                for i in 1..n {
                    let c = if i % 2 == 1 { &two } else { &neg_two };
                    self.push_e_times(i, mask, c, &mut buckets[k - i]);
                }
            }
        }
        let mut out = Vec::new();
        for (k, bucket) in buckets.into_iter().enumerate().take(n) {
            for (mask, c) in combine(bucket) {
                out.push((Monomial { eset: mask, tpow: k as u32 }, c));
            }
        }
        out.sort_unstable_by_key(|(m, _)| *m);
        out
    }

    /// Appends `coef * e_j * e(mask)` to `out`.
    pub(crate) fn push_e_times(&self, j: usize, mask: u64, coef: &IBig, out: &mut Vec<(u64, IBig)>) {
        if j >= self.n {
            return;
        }
        let bit = 1u64 << j;
        if mask & bit == 0 {
            out.push((mask | bit, coef.clone()));
        } else {
            for (m, c) in self.e_square_times(j as u32, mask).iter() {
                out.push((*m, coef * c));
            }
        }
    }

    /// `e_i * e(mask)` with `i ∈ mask`, via
    /// `e_i^2 = Σ_{k=1}^{i-1} (-1)^(k+1) 2 e_{i-k} e_{i+k} + (-1)^(i+1) e_{2i}`
    /// (indices `>= n` vanish).
    ///
    /// Termination: every rewrite keeps the degree and replaces `{i, i}` by
    /// `{i-k, i+k}` or `{2i}`, strictly raising the sum of squared indices of
    /// the e-multiset. That sum is bounded in a fixed degree, and the inner
    /// call `e_{i+k} e(M \ {i})` has strictly smaller degree.
    fn e_square_times(&self, i: u32, mask: u64) -> EExpansion {
        if let Some(hit) = self.square_cache.get(&(i, mask)).map(|r| r.clone()) {
            return hit;
        }
        let n = self.n as u32;
        let rest = mask & !(1u64 << i);
        let mut acc: Vec<(u64, IBig)> = Vec::new();
        for k in 1..i {
            if i + k >= n {
                break;
            }
            let c = if k % 2 == 1 { IBig::from(2u8) } else { IBig::from(-2) };
            let mut inner = Vec::new();
            self.push_e_times((i + k) as usize, rest, &c, &mut inner);
            for (m, ic) in combine(inner) {
                self.push_e_times((i - k) as usize, m, &ic, &mut acc);
            }
        }
        if 2 * i < n {
            let c = if i % 2 == 1 { IBig::from(1u8) } else { IBig::from(-1) };
            self.push_e_times((2 * i) as usize, rest, &c, &mut acc);
        }
        let result: EExpansion = combine(acc).into();
        self.square_cache.insert((i, mask), result.clone());
        result
    }

    /// `e(a) * e(b)` in the square-free basis.
    pub(crate) fn e_product(&self, a: u64, b: u64) -> EExpansion {
        let union = a | b;
        let common = a & b;
        if common == 0 {
            return Arc::from(vec![(union, IBig::from(1u8))]);
        }
        if let Some(hit) = self.pair_cache.get(&(union, common)).map(|r| r.clone()) {
            return hit;
        }
        let mut cur = vec![(union, IBig::from(1u8))];
        let mut bits = common;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let mut next = Vec::new();
            for (m, c) in &cur {
                self.push_e_times(j, *m, c, &mut next);
            }
            cur = combine(next);
            if cur.is_empty() {
                break;
            }
        }
        let result: EExpansion = cur.into();
        self.pair_cache.insert((union, common), result.clone());
        result
    }

    /// Snapshot of the `e_i * e(M)` memo table, for spilling to disk.
    pub fn export_cache(&self) -> CacheSnapshot {
        let mut entries: Vec<CacheEntry> = self
            .square_cache
            .iter()
            .map(|e| CacheEntry {
                index: e.key().0,
                mask: e.key().1,
                terms: e.value().iter().map(|(m, c)| (*m, c.to_string())).collect(),
            })
            .collect();
        entries.sort_by_key(|e| (e.index, e.mask));
        CacheSnapshot { n: self.n, entries }
    }

    /// Seeds the memo table from a snapshot taken for the same rank.
    pub fn import_cache(&self, snapshot: &CacheSnapshot) -> Result<usize> {
        if snapshot.n != self.n {
            return Err(Error::ContextMismatch { left: self.n, right: snapshot.n });
        }
        for entry in &snapshot.entries {
            let terms = entry
                .terms
                .iter()
                .map(|(m, c)| {
                    c.parse::<IBig>()
                        .map(|c| (*m, c))
                        .map_err(|e| Error::Parse(format!("cache coefficient {c:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            self.square_cache.insert((entry.index, entry.mask), terms.into());
        }
        Ok(snapshot.entries.len())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CacheSnapshot {
    pub n: usize,
    pub entries: Vec<CacheEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CacheEntry {
    pub index: u32,
    pub mask: u64,
    pub terms: Vec<(u64, String)>,
}

/// Sorts by mask, sums equal masks and drops zeros.
pub(crate) fn combine(mut v: Vec<(u64, IBig)>) -> Vec<(u64, IBig)> {
    if v.len() <= 1 {
        v.retain(|(_, c)| *c != IBig::from(0u8));
        return v;
    }
    v.sort_unstable_by_key(|(m, _)| *m);
    let zero = IBig::from(0u8);
    let mut out: Vec<(u64, IBig)> = Vec::with_capacity(v.len());
    for (m, c) in v {
        match out.last_mut() {
            Some((lm, lc)) if *lm == m => *lc += c,
            _ => {
                if let Some((_, lc)) = out.last() {
                    if *lc == zero {
                        out.pop();
                    }
                }
                out.push((m, c));
            }
        }
    }
    if let Some((_, lc)) = out.last() {
        if *lc == zero {
            out.pop();
        }
    }
    out
}
