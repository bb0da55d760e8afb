//! The distinguished elements of CH(X) and the four generator sets
//!
//! ```text
//!   R  = <2t, d_i, e_1>     image for HSpin(2n)
//!   R~ = <t, 2e_i, e_1>     image for Spin(2n)
//!   R' = <t, 2e_i>          image for SO(2n)
//!   R- = <2t, d_i>          image for PGO(2n)
//! ```
//!
//! where `c_i = (-1)^i 2 e_i` and `d_i = c_i(E ⊗ L)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use ibig::IBig;
use serde::{Deserialize, Serialize};

use crate::arith::binomial;
use crate::chowring::{RingContext, RingElement};
use crate::error::{Error, Result};

/// `c_i = (-1)^i 2 e_i`; zero for `i >= n`.
pub fn chern_c(ctx: &Arc<RingContext>, i: usize) -> Result<RingElement> {
    if i == 0 {
        return Err(Error::InvalidArgument("c_i needs i >= 1".into()));
    }
    if i >= ctx.n() {
        return Ok(RingElement::zero(ctx));
    }
    let sign: i64 = if i.is_multiple_of(2) { 2 } else { -2 };
    Ok(sign * &RingElement::gen_e(ctx, i)?)
}

/// `d_i = Σ_{k=0}^{i} C(n-k, i-k) t^(i-k) c_k` with `c_0 = 1`.
pub fn chern_d(ctx: &Arc<RingContext>, i: usize) -> Result<RingElement> {
    let n = ctx.n();
    if i == 0 || i >= n {
        return Err(Error::InvalidArgument(format!("d_i needs 1 <= i <= {}, got {i}", n - 1)));
    }
    let t = RingElement::gen_t(ctx);
    let mut acc = RingElement::zero(ctx);
    for k in 0..=i {
        let ck = if k == 0 { RingElement::one(ctx) } else { chern_c(ctx, k)? };
        let b = binomial((n - k) as u64, (i - k) as u64)?;
        acc = &acc + &(&ck * &t.pow((i - k) as u64)).scale(&b);
    }
    Ok(acc)
}

fn check_indices(ctx: &RingContext, set: &[usize]) -> Result<()> {
    match set.iter().find(|&&i| i == 0 || i >= ctx.n()) {
        Some(i) => Err(Error::InvalidArgument(format!("index {i} outside [1, {}]", ctx.n() - 1))),
        None => Ok(()),
    }
}

fn product(ctx: &Arc<RingContext>, set: &[usize], f: impl Fn(usize) -> Result<RingElement>) -> Result<RingElement> {
    check_indices(ctx, set)?;
    let mut acc = RingElement::one(ctx);
    for &i in set {
        acc = &acc * &f(i)?;
    }
    Ok(acc)
}

/// `e(I) = Π_{i∈I} e_i`.
pub fn e_of(ctx: &Arc<RingContext>, set: &[usize]) -> Result<RingElement> {
    product(ctx, set, |i| RingElement::gen_e(ctx, i))
}

/// `c(I) = Π_{i∈I} c_i`.
pub fn c_of(ctx: &Arc<RingContext>, set: &[usize]) -> Result<RingElement> {
    product(ctx, set, |i| chern_c(ctx, i))
}

/// `d(I) = Π_{i∈I} d_i`.
pub fn d_of(ctx: &Arc<RingContext>, set: &[usize]) -> Result<RingElement> {
    product(ctx, set, |i| chern_d(ctx, i))
}

/// The class of a point, `x_0 = t^(n-1) e_1 ... e_{n-1}`.
pub fn x0(ctx: &Arc<RingContext>) -> RingElement {
    RingElement::monomial(
        ctx,
        crate::chowring::Monomial { eset: ctx.full_mask(), tpow: ctx.n() as u32 - 1 },
        IBig::from(1u8),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GeneratorLabel {
    #[serde(rename = "R_hspin")]
    RHspin,
    #[serde(rename = "R_tilde_spin")]
    RTildeSpin,
    #[serde(rename = "R_prime_so")]
    RPrimeSo,
    #[serde(rename = "R_bar_pgo")]
    RBarPgo,
    #[serde(rename = "custom")]
    Custom,
}

impl GeneratorLabel {
    pub const STANDARD: [GeneratorLabel; 4] =
        [GeneratorLabel::RHspin, GeneratorLabel::RTildeSpin, GeneratorLabel::RPrimeSo, GeneratorLabel::RBarPgo];

    pub fn as_str(&self) -> &'static str {
        match self {
            GeneratorLabel::RHspin => "R_hspin",
            GeneratorLabel::RTildeSpin => "R_tilde_spin",
            GeneratorLabel::RPrimeSo => "R_prime_so",
            GeneratorLabel::RBarPgo => "R_bar_pgo",
            GeneratorLabel::Custom => "custom",
        }
    }
}

impl fmt::Display for GeneratorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GeneratorLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "R_hspin" => Ok(GeneratorLabel::RHspin),
            "R_tilde_spin" => Ok(GeneratorLabel::RTildeSpin),
            "R_prime_so" => Ok(GeneratorLabel::RPrimeSo),
            "R_bar_pgo" => Ok(GeneratorLabel::RBarPgo),
            "custom" => Ok(GeneratorLabel::Custom),
            _ => Err(Error::InvalidArgument(format!("unknown generator set {s:?}"))),
        }
    }
}

/// Group families whose torsion index is computed from one of the subrings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Spin,
    So,
    Pgo,
    Hspin,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Spin, Family::So, Family::Pgo, Family::Hspin];

    pub fn label(&self) -> GeneratorLabel {
        match self {
            Family::Spin => GeneratorLabel::RTildeSpin,
            Family::So => GeneratorLabel::RPrimeSo,
            Family::Pgo => GeneratorLabel::RBarPgo,
            Family::Hspin => GeneratorLabel::RHspin,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Spin => "spin",
            Family::So => "so",
            Family::Pgo => "pgo",
            Family::Hspin => "hspin",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spin" => Ok(Family::Spin),
            "so" => Ok(Family::So),
            "pgo" => Ok(Family::Pgo),
            "hspin" => Ok(Family::Hspin),
            _ => Err(Error::InvalidArgument(format!("unknown family {s:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Generator {
    pub name: String,
    pub element: RingElement,
    pub degree: usize,
}

/// A named list of homogeneous generators, kept in descending degree order.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    label: GeneratorLabel,
    ctx: Arc<RingContext>,
    gens: Vec<Generator>,
}

impl GeneratorSet {
    pub fn standard(ctx: &Arc<RingContext>, label: GeneratorLabel) -> Result<GeneratorSet> {
        let n = ctx.n();
        let t = RingElement::gen_t(ctx);
        let two_t = 2 * &t;
        let mut list: Vec<(String, RingElement)> = Vec::new();
        let with_d = matches!(label, GeneratorLabel::RHspin | GeneratorLabel::RBarPgo);
        match label {
            GeneratorLabel::Custom => {
                return Err(Error::InvalidArgument("custom generator sets are built with GeneratorSet::custom".into()))
            }
            GeneratorLabel::RHspin | GeneratorLabel::RBarPgo => list.push(("2t".into(), two_t)),
            GeneratorLabel::RTildeSpin | GeneratorLabel::RPrimeSo => list.push(("t".into(), t)),
        }
        for i in 1..n {
            if with_d {
                list.push((format!("d{i}"), chern_d(ctx, i)?));
            } else {
                list.push((format!("2e{i}"), 2 * &RingElement::gen_e(ctx, i)?));
            }
        }
        if matches!(label, GeneratorLabel::RHspin | GeneratorLabel::RTildeSpin) {
            list.push(("e1".into(), RingElement::gen_e(ctx, 1)?));
        }
        Self::build(ctx, label, list)
    }

    pub fn for_family(ctx: &Arc<RingContext>, family: Family) -> Result<GeneratorSet> {
        Self::standard(ctx, family.label())
    }

    pub fn custom(ctx: &Arc<RingContext>, gens: Vec<(String, RingElement)>) -> Result<GeneratorSet> {
        Self::build(ctx, GeneratorLabel::Custom, gens)
    }

    fn build(ctx: &Arc<RingContext>, label: GeneratorLabel, list: Vec<(String, RingElement)>) -> Result<GeneratorSet> {
        let mut gens = Vec::with_capacity(list.len());
        for (name, element) in list {
            if element.context().n() != ctx.n() {
                return Err(Error::ContextMismatch { left: ctx.n(), right: element.context().n() });
            }
            let degree = match element.degree() {
                Some(d) if d > 0 => d,
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "generator {name} must be nonzero, homogeneous and of positive degree"
                    )))
                }
            };
            gens.push(Generator { name, element, degree });
        }
        // Stable: ties keep the given order.
        gens.sort_by_key(|g| std::cmp::Reverse(g.degree));
        Ok(GeneratorSet { label, ctx: ctx.clone(), gens })
    }

    pub fn label(&self) -> GeneratorLabel {
        self.label
    }

    pub fn context(&self) -> &Arc<RingContext> {
        &self.ctx
    }

    pub fn gens(&self) -> &[Generator] {
        &self.gens
    }

    pub fn names(&self) -> Vec<&str> {
        self.gens.iter().map(|g| g.name.as_str()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&Generator> {
        self.gens.iter().find(|g| g.name == name)
    }

    /// The same generators in another order (for order-independence checks).
    pub fn reordered(&self, order: &[usize]) -> Result<GeneratorSet> {
        let mut seen = vec![false; self.gens.len()];
        if order.len() != self.gens.len()
            || order.iter().any(|&i| i >= seen.len() || std::mem::replace(&mut seen[i], true))
        {
            return Err(Error::InvalidArgument("reordering must be a permutation".into()));
        }
        let gens = order.iter().map(|&i| self.gens[i].clone()).collect();
        Ok(GeneratorSet { label: self.label, ctx: self.ctx.clone(), gens })
    }
}
