use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use ibig::ops::{RemEuclid, UnsignedAbs};
use ibig::{IBig, UBig};
use serde::Serialize;

use super::context::{combine, RingContext};
use crate::arith::{v2_abs, Valuation};
use crate::error::{Error, Result};

/// Basis monomial `e(I) t^j`, with `I` stored as a bitmask (bit `i` is `e_i`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Monomial {
    pub eset: u64,
    pub tpow: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { eset: 0, tpow: 0 };

    pub fn new(indices: &[usize], tpow: u32) -> Monomial {
        Monomial { eset: mask_of(indices), tpow }
    }

    pub fn degree(&self) -> usize {
        mask_degree(self.eset) + self.tpow as usize
    }

    /// `|I|`.
    pub fn e_count(&self) -> u32 {
        self.eset.count_ones()
    }

    pub fn indices(&self) -> Vec<usize> {
        mask_indices(self.eset)
    }
}

pub fn mask_of(indices: &[usize]) -> u64 {
    indices.iter().fold(0u64, |m, &i| m | (1u64 << i))
}

pub fn mask_indices(mut mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        out.push(mask.trailing_zeros() as usize);
        mask &= mask - 1;
    }
    out
}

/// Sum of the indices in a mask, i.e. the degree of `e(I)`.
pub fn mask_degree(mut mask: u64) -> usize {
    let mut d = 0;
    while mask != 0 {
        d += mask.trailing_zeros() as usize;
        mask &= mask - 1;
    }
    d
}

/// An element of CH(X) in canonical form: terms sorted by monomial, no zero
/// coefficients.
#[derive(Clone)]
pub struct RingElement {
    ctx: Arc<RingContext>,
    terms: Vec<(Monomial, IBig)>,
}

/// One basis coordinate of an element, read against the Z-basis
/// `c(I) t^j = ±2^|I| e(I) t^j` of `R' = <t, 2e_i>`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RPrimeCoordinate {
    pub monomial: Monomial,
    pub coeff: String,
    /// `|I|`: the power of 2 the coefficient needs for membership in R'.
    pub required: u32,
    pub divisible: bool,
    /// `v2(coeff) - |I|`, or `None` when negative.
    pub slack: Option<u64>,
}

impl RingElement {
    pub fn zero(ctx: &Arc<RingContext>) -> RingElement {
        RingElement { ctx: ctx.clone(), terms: Vec::new() }
    }

    pub fn one(ctx: &Arc<RingContext>) -> RingElement {
        Self::monomial(ctx, Monomial::ONE, IBig::from(1u8))
    }

    pub fn gen_t(ctx: &Arc<RingContext>) -> RingElement {
        // t is a basis element only when n >= 2, which the context guarantees.
        Self::monomial(ctx, Monomial { eset: 0, tpow: 1 }, IBig::from(1u8))
    }

    pub fn gen_e(ctx: &Arc<RingContext>, i: usize) -> Result<RingElement> {
        if i == 0 || i >= ctx.n() {
            return Err(Error::InvalidArgument(format!("e_{i} is not a generator for n = {}", ctx.n())));
        }
        Ok(Self::monomial(ctx, Monomial { eset: 1 << i, tpow: 0 }, IBig::from(1u8)))
    }

    pub fn monomial(ctx: &Arc<RingContext>, m: Monomial, coeff: IBig) -> RingElement {
        let terms = if coeff == IBig::from(0u8) { Vec::new() } else { vec![(m, coeff)] };
        RingElement { ctx: ctx.clone(), terms }
    }

    /// Builds an element from basis terms, summing repeats. Every monomial must
    /// already be a basis monomial for this rank.
    pub fn from_terms(
        ctx: &Arc<RingContext>,
        terms: impl IntoIterator<Item = (Monomial, IBig)>,
    ) -> Result<RingElement> {
        let mut v: Vec<(Monomial, IBig)> = Vec::new();
        for (m, c) in terms {
            if m.eset & !ctx.full_mask() != 0 || m.tpow as usize >= ctx.n() {
                return Err(Error::InvalidArgument(format!(
                    "e{:?} t^{} is not a basis monomial for n = {}",
                    m.indices(),
                    m.tpow,
                    ctx.n()
                )));
            }
            v.push((m, c));
        }
        Ok(RingElement { ctx: ctx.clone(), terms: normalize(v) })
    }

    /// `e(I) t^j` reduced into the basis, for an arbitrary `t` exponent.
    pub fn e_t_power(ctx: &Arc<RingContext>, indices: &[usize], tpow: u32) -> Result<RingElement> {
        let mut e = Self::one(ctx);
        for &i in indices {
            e = e.try_mul(&Self::gen_e(ctx, i)?)?;
        }
        e.try_mul(&Self::gen_t(ctx).pow(tpow as u64))
    }

    pub fn context(&self) -> &Arc<RingContext> {
        &self.ctx
    }

    pub fn terms(&self) -> &[(Monomial, IBig)] {
        &self.terms
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: Monomial) -> IBig {
        match self.terms.binary_search_by_key(&m, |(mm, _)| *mm) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => IBig::from(0u8),
        }
    }

    /// The degree of a nonzero homogeneous element; `None` for zero or mixed degree.
    pub fn degree(&self) -> Option<usize> {
        let first = self.terms.first()?.0.degree();
        self.terms.iter().all(|(m, _)| m.degree() == first).then_some(first)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    /// The part of degree `d`.
    pub fn homogeneous_part(&self, d: usize) -> RingElement {
        RingElement {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().filter(|(m, _)| m.degree() == d).cloned().collect(),
        }
    }

    fn check_ctx(&self, other: &RingElement) -> Result<()> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx.n() == other.ctx.n() {
            Ok(())
        } else {
            Err(Error::ContextMismatch { left: self.ctx.n(), right: other.ctx.n() })
        }
    }

    pub fn try_add(&self, other: &RingElement) -> Result<RingElement> {
        self.check_ctx(other)?;
        Ok(self.merge_with(other, false))
    }

    pub fn try_sub(&self, other: &RingElement) -> Result<RingElement> {
        self.check_ctx(other)?;
        Ok(self.merge_with(other, true))
    }

    fn merge_with(&self, other: &RingElement, negate: bool) -> RingElement {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some((ma, _)), Some((mb, _))) => ma.cmp(mb),
                (Some(_), None) => std::cmp::Ordering::Less,
                _ => std::cmp::Ordering::Greater,
            };
            match ord {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    let (m, c) = &b[j];
                    out.push((*m, if negate { -c } else { c.clone() }));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if c != IBig::from(0u8) {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        RingElement { ctx: self.ctx.clone(), terms: out }
    }

    pub fn try_mul(&self, other: &RingElement) -> Result<RingElement> {
        self.check_ctx(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&self.ctx));
        }
        Ok(RingElement { ctx: self.ctx.clone(), terms: self.ctx.mul_terms(&self.terms, &other.terms) })
    }

    pub fn scale(&self, k: &IBig) -> RingElement {
        if *k == IBig::from(0u8) {
            return Self::zero(&self.ctx);
        }
        RingElement { ctx: self.ctx.clone(), terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect() }
    }

    /// Multiplication by `t`, the primitive used for t-overflow.
    pub fn mul_t(&self) -> RingElement {
        let n = self.ctx.n();
        let mut buckets: Vec<Vec<(u64, IBig)>> = vec![Vec::new(); n + 1];
        for (m, c) in &self.terms {
            buckets[m.tpow as usize + 1].push((m.eset, c.clone()));
        }
        RingElement { ctx: self.ctx.clone(), terms: self.ctx.reduce_buckets(buckets) }
    }

    /// Multiplication by `e_i` for `1 <= i <= n-1`.
    pub fn mul_e(&self, i: usize) -> Result<RingElement> {
        if i == 0 || i >= self.ctx.n() {
            return Err(Error::InvalidArgument(format!("e_{i} is not a generator for n = {}", self.ctx.n())));
        }
        let mut by_t: Vec<Vec<(u64, IBig)>> = vec![Vec::new(); self.ctx.n()];
        for (m, c) in &self.terms {
            self.ctx.push_e_times(i, m.eset, c, &mut by_t[m.tpow as usize]);
        }
        let mut terms = Vec::new();
        for (k, bucket) in by_t.into_iter().enumerate() {
            terms.extend(combine(bucket).into_iter().map(|(e, c)| (Monomial { eset: e, tpow: k as u32 }, c)));
        }
        terms.sort_unstable_by_key(|(m, _)| *m);
        Ok(RingElement { ctx: self.ctx.clone(), terms })
    }

    /// Square-and-multiply power; `pow(0)` is one.
    pub fn pow(&self, mut k: u64) -> RingElement {
        let mut result = Self::one(&self.ctx);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
            if base.is_zero() && k > 0 {
                return Self::zero(&self.ctx);
            }
        }
        result
    }

    /// The integer `c` with `a = c x0`, for `a` zero or homogeneous of degree dim X.
    pub fn x0_coefficient(&self) -> Result<IBig> {
        if self.is_zero() {
            return Ok(IBig::from(0u8));
        }
        match self.degree() {
            Some(d) if d == self.ctx.dim_x() => {
                // The top component has the single basis monomial x0.
                debug_assert_eq!(self.terms.len(), 1);
                Ok(self.terms[0].1.clone())
            }
            Some(d) => Err(Error::DegreeMismatch { expected: self.ctx.dim_x(), found: d.to_string() }),
            None => Err(Error::DegreeMismatch { expected: self.ctx.dim_x(), found: "mixed".into() }),
        }
    }

    /// Largest `k` with `self ∈ 2^k CH(X)`: the minimum 2-adic valuation of the
    /// coordinates, since CH(X) is free on the basis.
    pub fn valuation_hat(&self) -> Valuation {
        self.terms.iter().map(|(_, c)| v2_abs(c)).min().unwrap_or(Valuation::Infinity)
    }

    /// gcd of the coordinates (zero for the zero element).
    pub fn content(&self) -> UBig {
        let mut g = UBig::from(0u8);
        for (_, c) in &self.terms {
            g = g.gcd(&c.unsigned_abs());
            if g == UBig::from(1u8) {
                break;
            }
        }
        g
    }

    pub fn rprime_coordinates(&self) -> Vec<RPrimeCoordinate> {
        self.terms
            .iter()
            .map(|(m, c)| {
                let required = m.e_count();
                let v = v2_abs(c).finite().expect("stored coefficients are nonzero");
                RPrimeCoordinate {
                    monomial: *m,
                    coeff: c.to_string(),
                    required,
                    divisible: v >= required as u64,
                    slack: v.checked_sub(required as u64),
                }
            })
            .collect()
    }

    pub fn in_rprime(&self) -> bool {
        self.in_2k_rprime(0)
    }

    /// Whether `self ∈ 2^k R'`.
    pub fn in_2k_rprime(&self, k: u64) -> bool {
        self.terms.iter().all(|(m, c)| v2_abs(c).at_least(k + m.e_count() as u64))
    }

    /// Largest `k` with `self ∈ 2^k R'`; errors when `self ∉ R'`.
    pub fn valuation_rprime(&self) -> Result<Valuation> {
        let mut best = Valuation::Infinity;
        for (m, c) in &self.terms {
            let v = v2_abs(c).finite().expect("stored coefficients are nonzero");
            let slack = v.checked_sub(m.e_count() as u64).ok_or(Error::NotInRPrime)?;
            best = best.min(Valuation::Finite(slack));
        }
        Ok(best)
    }

    /// Reduces every coefficient to its least nonnegative residue mod `2^k`.
    /// Only sound for congruence claims modulo `2^j`, `j <= k`.
    pub fn truncate_mod_2k(&self, k: u32) -> RingElement {
        let modulus = IBig::from(1u8) << k as usize;
        let zero = IBig::from(0u8);
        let terms = self
            .terms
            .iter()
            .filter_map(|(m, c)| {
                let r = c.rem_euclid(&modulus);
                (r != zero).then_some((*m, r))
            })
            .collect();
        RingElement { ctx: self.ctx.clone(), terms }
    }

    /// `self ≡ other (mod 2^k CH(X))`.
    pub fn congruent_mod_2k(&self, other: &RingElement, k: u64) -> Result<bool> {
        Ok(self.try_sub(other)?.valuation_hat().at_least(k))
    }
}

fn normalize(v: Vec<(Monomial, IBig)>) -> Vec<(Monomial, IBig)> {
    let mut v = v;
    v.sort_unstable_by_key(|(m, _)| *m);
    let zero = IBig::from(0u8);
    let mut out: Vec<(Monomial, IBig)> = Vec::with_capacity(v.len());
    for (m, c) in v {
        match out.last_mut() {
            Some((lm, lc)) if *lm == m => *lc += c,
            _ => out.push((m, c)),
        }
    }
    out.retain(|(_, c)| *c != zero);
    out
}

impl PartialEq for RingElement {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.n() == other.ctx.n() && self.terms == other.terms
    }
}

impl Eq for RingElement {}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingElement(n={}, {})", self.ctx.n(), self)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $try:ident) => {
        impl $tr<&RingElement> for &RingElement {
            type Output = RingElement;

            /// Panics if the operands belong to rings of different rank.
            fn $method(self, rhs: &RingElement) -> RingElement {
                self.$try(rhs).expect("ring context mismatch")
            }
        }

        impl $tr<RingElement> for RingElement {
            type Output = RingElement;

            fn $method(self, rhs: RingElement) -> RingElement {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &RingElement {
    type Output = RingElement;

    fn neg(self) -> RingElement {
        RingElement { ctx: self.ctx.clone(), terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }
}

impl Neg for RingElement {
    type Output = RingElement;

    fn neg(self) -> RingElement {
        -&self
    }
}

impl Mul<&RingElement> for i64 {
    type Output = RingElement;

    fn mul(self, rhs: &RingElement) -> RingElement {
        rhs.scale(&IBig::from(self))
    }
}
