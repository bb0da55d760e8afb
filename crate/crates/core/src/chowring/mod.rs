//! Exact arithmetic in CH(X) = Z[t, e_1, ..., e_{n-1}] / I for the two-step
//! flag variety X of type D_n.
//!
//! Elements are kept in the free basis `e(I) t^j` (`I` square-free,
//! `j <= n-1`) and every product is reduced eagerly:
//!
//! * `e_i^2 = 2 e_{i-1} e_{i+1} - 2 e_{i-2} e_{i+2} + ... + (-1)^(i+1) e_{2i}`,
//!   with `e_m = 0` for `m >= n`;
//! * `t^n = Σ_{i=1}^{n-1} (-1)^(i+1) 2 e_i t^(n-i)`, i.e. the projective
//!   bundle relation with `c_i = (-1)^i 2 e_i` and `c_n = 0`.
//!
//! Because the basis is free, 2-divisibility in CH(X) is a coefficient scan,
//! and membership in `R' = <t, 2e_i>` is a divisibility test per coordinate.
//!
//! [`RingElement::truncate_mod_2k`] is the only lossy operation and is never
//! applied implicitly.

mod context;
mod element;
mod text;

pub use context::{CacheEntry, CacheSnapshot, EExpansion, RingContext, MAX_RANK};
pub use element::{mask_degree, mask_indices, mask_of, Monomial, RPrimeCoordinate, RingElement};

/// All basis monomials of degree `d`, sorted.
pub fn basis_of_degree(ctx: &RingContext, d: usize) -> Vec<Monomial> {
    let n = ctx.n();
    let mut out = Vec::new();
    for tpow in 0..n.min(d + 1) {
        let target = d - tpow;
        if target > ctx.dim_y() {
            continue;
        }
        subsets_with_sum(n - 1, target, 0, &mut |mask| out.push(Monomial { eset: mask, tpow: tpow as u32 }));
    }
    out.sort_unstable();
    out
}

// Subsets of {1..=max} with the given index sum, in no particular order.
fn subsets_with_sum(max: usize, target: usize, mask: u64, emit: &mut dyn FnMut(u64)) {
    if target == 0 {
        emit(mask);
        return;
    }
    if max == 0 || max * (max + 1) / 2 < target {
        return;
    }
    if max <= target {
        subsets_with_sum(max - 1, target - max, mask | (1u64 << max), emit);
    }
    subsets_with_sum(max - 1, target, mask, emit);
}
