//! Canonical text form of ring elements.
//!
//! An element is written as terms `coeff*e{i,j,...}*t^k` joined by ` + `,
//! ordered by the index list of `e{...}` (lexicographic, ascending) and then
//! by the `t` exponent. The zero element is `0`.

use std::fmt;
use std::sync::Arc;

use ibig::IBig;

use super::{mask_of, Monomial, RingContext, RingElement};
use crate::error::{Error, Result};

impl RingElement {
    pub fn to_canonical_text(&self) -> String {
        self.to_string()
    }

    pub fn parse(ctx: &Arc<RingContext>, text: &str) -> Result<RingElement> {
        let text = text.trim();
        if text == "0" {
            return Ok(RingElement::zero(ctx));
        }
        let mut terms = Vec::new();
        for raw in text.split(" + ") {
            terms.push(parse_term(raw.trim())?);
        }
        RingElement::from_terms(ctx, terms)
    }
}

fn parse_term(raw: &str) -> Result<(Monomial, IBig)> {
    let bad = || Error::Parse(format!("malformed term {raw:?}"));
    let mut parts = raw.splitn(3, '*');
    let coeff: IBig = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let eset = parts.next().ok_or_else(bad)?;
    let tpart = parts.next().ok_or_else(bad)?;
    let inner = eset.strip_prefix("e{").and_then(|s| s.strip_suffix('}')).ok_or_else(bad)?;
    let mut indices = Vec::new();
    if !inner.is_empty() {
        for tok in inner.split(',') {
            let i: usize = tok.trim().parse().map_err(|_| bad())?;
            if i == 0 || i >= 64 || indices.contains(&i) {
                return Err(bad());
            }
            indices.push(i);
        }
    }
    let tpow: u32 = tpart.strip_prefix("t^").ok_or_else(bad)?.parse().map_err(|_| bad())?;
    Ok((Monomial { eset: mask_of(&indices), tpow }, coeff))
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut keyed: Vec<(Vec<usize>, u32, &IBig)> =
            self.terms().iter().map(|(m, c)| (m.indices(), m.tpow, c)).collect();
        keyed.sort_by(|a, b| (&a.0, a.1).cmp(&(&b.0, b.1)));
        for (k, (idx, tpow, c)) in keyed.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            let list: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
            write!(f, "{c}*e{{{}}}*t^{tpow}", list.join(","))?;
        }
        Ok(())
    }
}
