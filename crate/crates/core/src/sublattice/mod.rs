//! Graded pieces of the subring generated by a [`GeneratorSet`], as integer
//! lattices in the basis of CH(X), and the top-degree torsion-index oracle.
//!
//! In the top degree CH(X) is `Z·x_0`, so the index of the subring there is
//! the gcd of the `x_0`-coefficients of all generator monomials of degree
//! `dim X`. Other degrees go through [`Hnf`].

mod hnf;

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use ibig::ops::UnsignedAbs;
use ibig::{IBig, UBig};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::arith::{v2_abs, Valuation};
use crate::chowring::{basis_of_degree, Monomial, RingContext, RingElement};
use crate::error::{Error, Result};
use crate::generators::{Family, GeneratorLabel, GeneratorSet};

pub use hnf::Hnf;

/// Exponent vector of a generator monomial. Zero exponents are omitted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonomialExponent {
    pub exponents: BTreeMap<String, u32>,
    pub degree: usize,
}

impl MonomialExponent {
    fn from_slice(gens: &GeneratorSet, exps: &[u32]) -> MonomialExponent {
        let mut exponents = BTreeMap::new();
        let mut degree = 0;
        for (g, &e) in gens.gens().iter().zip(exps) {
            if e > 0 {
                exponents.insert(g.name.clone(), e);
                degree += g.degree * e as usize;
            }
        }
        MonomialExponent { exponents, degree }
    }
}

/// Upper bounds on generator exponents that follow from ring identities:
/// `t^(2n-1) = 0` and `e_1^(dim Y + 1) = 0`. Anything else relies on the
/// zero test alone.
fn exponent_caps(gens: &GeneratorSet) -> Vec<u32> {
    let ctx = gens.context();
    let t_cap = 2 * ctx.n() as u32 - 2;
    gens.gens()
        .iter()
        .map(|g| match g.element.terms() {
            [(m, _)] if m.eset == 0 && m.tpow == 1 => t_cap,
            [(m, _)] if m.eset == 0b10 && m.tpow == 0 => ctx.dim_y() as u32,
            _ => u32::MAX,
        })
        .collect()
}

/// Depth-first enumeration over exponent vectors with prefix-product reuse.
struct Walker<'a> {
    gens: &'a GeneratorSet,
    caps: Vec<u32>,
    // reachable[k][r]: degree r is a sum of degrees of gens[k..].
    reachable: Vec<Vec<bool>>,
    modulus_bits: Option<u32>,
}

/// A subtree root: generators `0..k` already have exponents.
#[derive(Clone)]
struct Node {
    k: usize,
    remaining: usize,
    prefix: RingElement,
    exps: Vec<u32>,
}

impl<'a> Walker<'a> {
    fn new(gens: &'a GeneratorSet, degree: usize, modulus_bits: Option<u32>) -> Walker<'a> {
        let len = gens.gens().len();
        let mut reachable = vec![vec![false; degree + 1]; len + 1];
        reachable[len][0] = true;
        for k in (0..len).rev() {
            let g = gens.gens()[k].degree;
            for r in 0..=degree {
                reachable[k][r] = reachable[k + 1][r] || (r >= g && reachable[k][r - g]);
            }
        }
        Walker { gens, caps: exponent_caps(gens), reachable, modulus_bits }
    }

    fn root(&self, degree: usize) -> Node {
        let ctx = self.gens.context();
        Node { k: 0, remaining: degree, prefix: RingElement::one(ctx), exps: vec![0; self.gens.gens().len()] }
    }

    fn mul(&self, a: &RingElement, b: &RingElement) -> RingElement {
        let p = a * b;
        match self.modulus_bits {
            Some(k) => p.truncate_mod_2k(k),
            None => p,
        }
    }

    /// Children of a node: one per admissible exponent of generator `k`.
    fn children(&self, node: &Node) -> Vec<Node> {
        let mut out = Vec::new();
        let g = &self.gens.gens()[node.k];
        let max_e = (node.remaining / g.degree).min(self.caps[node.k] as usize);
        let mut cur = node.prefix.clone();
        for e in 0..=max_e {
            if e > 0 {
                cur = self.mul(&cur, &g.element);
                if cur.is_zero() {
                    break;
                }
            }
            let rem = node.remaining - e * g.degree;
            if !self.reachable[node.k + 1][rem] {
                continue;
            }
            let mut exps = node.exps.clone();
            exps[node.k] = e as u32;
            out.push(Node { k: node.k + 1, remaining: rem, prefix: cur.clone(), exps });
        }
        out
    }

    /// Visits every nonzero leaf below `node`.
    fn walk(&self, node: Node, visit: &mut dyn FnMut(&[u32], &RingElement)) {
        if node.remaining == 0 {
            visit(&node.exps, &node.prefix);
            return;
        }
        if node.k == self.gens.gens().len() {
            return;
        }
        for child in self.children(&node) {
            self.walk(child, visit);
        }
    }

    /// Expands the tree breadth-first until there are at least `want` roots
    /// (or no interior nodes remain). Leaves found on the way are kept.
    fn frontier(&self, degree: usize, want: usize) -> Vec<Node> {
        let mut level = vec![self.root(degree)];
        loop {
            if level.len() >= want || level.iter().all(|n| n.remaining == 0 || n.k == self.gens.gens().len()) {
                return level;
            }
            let mut next = Vec::new();
            for node in level {
                if node.remaining == 0 || node.k == self.gens.gens().len() {
                    next.push(node);
                } else {
                    next.extend(self.children(&node));
                }
            }
            level = next;
        }
    }
}

/// Calls `f` on every generator monomial of the given degree whose product is
/// nonzero, in a fixed order.
pub fn for_each_monomial(gens: &GeneratorSet, degree: usize, f: &mut dyn FnMut(MonomialExponent, &RingElement)) {
    let w = Walker::new(gens, degree, None);
    w.walk(w.root(degree), &mut |exps, el| f(MonomialExponent::from_slice(gens, exps), el));
}

/// Every generator monomial of the given degree with its reduced product.
/// Monomials whose product vanishes are skipped.
pub fn enumerate_monomials(gens: &GeneratorSet, degree: usize) -> Vec<(MonomialExponent, RingElement)> {
    let mut out = Vec::new();
    for_each_monomial(gens, degree, &mut |m, el| out.push((m, el.clone())));
    out
}

/// The degree-`d` component of the subring generated by a set, as a lattice
/// in the basis monomials of degree `d`.
#[derive(Debug, Clone, Serialize)]
pub struct DegreeLattice {
    pub degree: usize,
    pub columns: Vec<Monomial>,
    pub basis_matrix: Hnf,
}

impl DegreeLattice {
    pub fn coordinates(&self, a: &RingElement) -> Result<Vec<IBig>> {
        if !a.is_zero() && a.degree() != Some(self.degree) {
            return Err(Error::DegreeMismatch { expected: self.degree, found: format!("{:?}", a.degree()) });
        }
        Ok(self.columns.iter().map(|m| a.coeff(*m)).collect())
    }

    pub fn contains(&self, a: &RingElement) -> Result<bool> {
        Ok(self.basis_matrix.contains(&self.coordinates(a)?))
    }

    /// Index in the full degree-`d` group, when of full rank.
    pub fn index(&self) -> Option<IBig> {
        self.basis_matrix.index()
    }
}

pub fn degree_lattice(gens: &GeneratorSet, degree: usize) -> Result<DegreeLattice> {
    let ctx = gens.context();
    if degree > ctx.dim_x() {
        return Err(Error::InvalidArgument(format!("degree {degree} exceeds dim X = {}", ctx.dim_x())));
    }
    let columns = basis_of_degree(ctx, degree);
    let mut lattice = DegreeLattice { degree, columns, basis_matrix: Hnf::new(0) };
    lattice.basis_matrix = Hnf::new(lattice.columns.len());
    let mut rows = Vec::new();
    for_each_monomial(gens, degree, &mut |_, el| rows.push(el.clone()));
    for el in rows {
        let v = lattice.coordinates(&el)?;
        lattice.basis_matrix.insert(v);
    }
    Ok(lattice)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOptions {
    pub parallel: bool,
    /// Skip a subtree once the running gcd divides the content of its prefix.
    pub content_pruning: bool,
    /// Reduce every product modulo `2^k`. Only 2-adic information below `k`
    /// survives; the odd-part check is skipped.
    pub modulus_bits: Option<u32>,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { parallel: true, content_pruning: true, modulus_bits: None }
    }
}

/// Gcd of the `x_0`-coefficients of all top-degree generator monomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopDegreeGcd {
    pub gcd: UBig,
    pub monomials_considered: u64,
}

pub fn top_degree_gcd(gens: &GeneratorSet, opts: OracleOptions) -> Result<TopDegreeGcd> {
    let ctx = gens.context();
    let degree = ctx.dim_x();
    let w = Walker::new(gens, degree, opts.modulus_bits);
    let roots = w.frontier(degree, 256);

    let run = |node: Node| -> Result<(UBig, u64)> {
        let mut acc = GcdWalk { g: UBig::from(0u8), count: 0, failure: None };
        acc.walk(&w, node, opts.content_pruning, opts.modulus_bits.is_some());
        match acc.failure {
            Some(e) => Err(e),
            None => Ok((acc.g, acc.count)),
        }
    };

    let parts: Vec<Result<(UBig, u64)>> =
        if opts.parallel { roots.into_par_iter().map(run).collect() } else { roots.into_iter().map(run).collect() };
    let mut gcd = UBig::from(0u8);
    let mut monomials_considered = 0;
    for part in parts {
        let (g, c) = part?;
        monomials_considered += c;
        if g != UBig::from(0u8) {
            gcd = if gcd == UBig::from(0u8) { g } else { gcd.gcd(&g) };
        }
    }
    if let Some(k) = opts.modulus_bits {
        // Coefficients are only known modulo 2^k.
        let m = UBig::from(1u8) << k as usize;
        gcd = if gcd == UBig::from(0u8) { m } else { gcd.gcd(&m) };
    }
    Ok(TopDegreeGcd { gcd, monomials_considered })
}

struct GcdWalk {
    g: UBig,
    count: u64,
    failure: Option<Error>,
}

impl GcdWalk {
    fn walk(&mut self, w: &Walker<'_>, node: Node, prune: bool, truncated: bool) {
        if self.failure.is_some() {
            return;
        }
        if node.remaining == 0 {
            self.count += 1;
            match node.prefix.x0_coefficient() {
                Ok(c) => {
                    let c = c.unsigned_abs();
                    if c != UBig::from(0u8) {
                        self.g = if self.g == UBig::from(0u8) { c } else { self.g.gcd(&c) };
                    }
                }
                Err(e) => self.failure = Some(e),
            }
            return;
        }
        if node.k == w.gens.gens().len() {
            return;
        }
        for child in w.children(&node) {
            if prune && child.remaining > 0 && self.g != UBig::from(0u8) {
                // Every completion is an integer combination of the prefix's
                // coefficients, so the subtree cannot lower the gcd.
                let content = child.prefix.content();
                let divisible = if content == UBig::from(0u8) {
                    true
                } else if truncated {
                    // Modulo 2^k only the 2-part of the content is meaningful.
                    content.trailing_zeros() >= self.g.trailing_zeros()
                } else {
                    &content % &self.g == UBig::from(0u8)
                };
                if divisible {
                    continue;
                }
            }
            self.walk(w, child, prune, truncated);
        }
    }
}

/// Options for [`min_valuation_scan`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanOptions {
    pub parallel: bool,
    /// Subtrees whose prefix already has `v̂_2 >= floor` are skipped: every
    /// completion inherits the bound. `None` scans without a floor.
    pub floor: Option<u64>,
    /// Reduce products modulo `2^k`; valuations are then known below `k` only.
    pub modulus_bits: Option<u32>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { parallel: true, floor: None, modulus_bits: None }
    }
}

/// Minimum of `v̂_2` over the generator monomials of one degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValuationScan {
    pub degree: usize,
    /// The minimum, or the floor when nothing below it exists.
    pub min: Valuation,
    /// False when `min` is only a lower bound (floor or truncation reached).
    pub min_is_exact: bool,
    /// First monomial (in enumeration order) attaining an exact minimum.
    pub witness: Option<MonomialExponent>,
    pub leaves_visited: u64,
}

struct MinWalk {
    best: Valuation,
    witness: Option<Vec<u32>>,
    count: u64,
}

impl MinWalk {
    fn walk(&mut self, w: &Walker<'_>, node: Node, cut: Valuation) {
        if node.remaining == 0 {
            self.count += 1;
            let v = node.prefix.valuation_hat();
            if v < self.best {
                self.best = v;
                self.witness = Some(node.exps.clone());
            }
            return;
        }
        if node.k == w.gens.gens().len() {
            return;
        }
        for child in w.children(&node) {
            // Multiplying never lowers v̂_2.
            if child.prefix.valuation_hat() >= self.best.min(cut) {
                continue;
            }
            self.walk(w, child, cut);
        }
    }
}

/// Scans every nonzero generator monomial of `degree` for its 2-adic
/// valuation in CH(X). Task-local pruning keeps the result independent of
/// scheduling.
pub fn min_valuation_scan(gens: &GeneratorSet, degree: usize, opts: ScanOptions) -> Result<ValuationScan> {
    let ctx = gens.context();
    if degree > ctx.dim_x() {
        return Err(Error::InvalidArgument(format!("degree {degree} exceeds dim X = {}", ctx.dim_x())));
    }
    let mut cut = Valuation::Infinity;
    if let Some(f) = opts.floor {
        cut = cut.min(Valuation::Finite(f));
    }
    if let Some(k) = opts.modulus_bits {
        cut = cut.min(Valuation::Finite(k as u64));
    }
    let w = Walker::new(gens, degree, opts.modulus_bits);
    let roots = w.frontier(degree, 256);
    let run = |node: Node| {
        let mut acc = MinWalk { best: Valuation::Infinity, witness: None, count: 0 };
        if node.prefix.valuation_hat() < cut || node.remaining == 0 {
            acc.walk(&w, node, cut);
        }
        acc
    };
    let parts: Vec<MinWalk> =
        if opts.parallel { roots.into_par_iter().map(run).collect() } else { roots.into_iter().map(run).collect() };
    let mut best = Valuation::Infinity;
    let mut witness = None;
    let mut leaves_visited = 0;
    for part in parts {
        leaves_visited += part.count;
        if part.best < best {
            best = part.best;
            witness = part.witness;
        }
    }
    let min_is_exact = best < cut;
    let min = if min_is_exact { best } else { cut };
    Ok(ValuationScan {
        degree,
        min,
        min_is_exact,
        witness: if min_is_exact { witness.map(|e| MonomialExponent::from_slice(gens, &e)) } else { None },
        leaves_visited,
    })
}

/// Every exponent vector of the given degree within the identity caps, in
/// enumeration order, without forming products.
pub fn exponent_vectors(gens: &GeneratorSet, degree: usize) -> Vec<Vec<u32>> {
    let caps = exponent_caps(gens);
    let degs: Vec<usize> = gens.gens().iter().map(|g| g.degree).collect();
    let mut out = Vec::new();
    let mut cur = vec![0u32; degs.len()];
    fn rec(k: usize, rem: usize, degs: &[usize], caps: &[u32], cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == degs.len() {
            if rem == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let max_e = (rem / degs[k]).min(caps[k] as usize);
        for e in 0..=max_e {
            cur[k] = e as u32;
            rec(k + 1, rem - e * degs[k], degs, caps, cur, out);
        }
        cur[k] = 0;
    }
    rec(0, degree, &degs, &caps, &mut cur, &mut out);
    out
}

/// The exact product `∏ g_k^{exps[k]}`.
pub fn monomial_product(gens: &GeneratorSet, exps: &[u32]) -> Result<RingElement> {
    if exps.len() != gens.gens().len() {
        return Err(Error::InvalidArgument(format!("expected {} exponents, got {}", gens.gens().len(), exps.len())));
    }
    let mut acc = RingElement::one(gens.context());
    for (g, &e) in gens.gens().iter().zip(exps) {
        if e > 0 {
            acc = &acc * &g.element.pow(e as u64);
        }
    }
    Ok(acc)
}

/// Exponent vector with names, as reported in witnesses.
pub fn describe_exponents(gens: &GeneratorSet, exps: &[u32]) -> MonomialExponent {
    MonomialExponent::from_slice(gens, exps)
}

fn serialize_big<S: Serializer>(v: &UBig, s: S) -> std::result::Result<S::Ok, S::Error> {
    match u64::try_from(v) {
        Ok(x) => s.serialize_u64(x),
        Err(_) => s.serialize_str(&v.to_string()),
    }
}

/// Result of a brute-force torsion-index computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TorsionReport {
    pub family: String,
    pub n: usize,
    pub method: &'static str,
    #[serde(serialize_with = "serialize_big")]
    pub tau: UBig,
    pub tau2: u64,
    pub monomials_considered: u64,
    pub elapsed_ms: u64,
}

/// The torsion index `τ` for the group whose characteristic-class image is
/// the subring `label`, as `[Z x_0 : (subring) ∩ Z x_0]`.
pub fn torsion_oracle(ctx: &Arc<RingContext>, label: GeneratorLabel) -> Result<TorsionReport> {
    torsion_oracle_with(ctx, label, OracleOptions::default())
}

pub fn torsion_oracle_with(
    ctx: &Arc<RingContext>,
    label: GeneratorLabel,
    opts: OracleOptions,
) -> Result<TorsionReport> {
    let n = ctx.n();
    if n < 3 {
        return Err(Error::Precondition(format!("the oracle needs n >= 3, got {n}")));
    }
    if label == GeneratorLabel::RHspin && n % 2 == 1 {
        return Err(Error::Precondition(format!("HSpin(2n) needs n even, got {n}")));
    }
    let start = Instant::now();
    let gens = GeneratorSet::standard(ctx, label)?;
    let res = top_degree_gcd(&gens, opts)?;
    let g = res.gcd;
    if g == UBig::from(0u8) {
        return Err(Error::Precondition("every top-degree generator monomial vanishes".into()));
    }
    let tau2 = match v2_abs(&IBig::from(g.clone())) {
        Valuation::Finite(k) => k,
        Valuation::Infinity => unreachable!("gcd is nonzero"),
    };
    let odd = &g >> tau2 as usize;
    if opts.modulus_bits.is_none() && odd != UBig::from(1u8) {
        return Err(Error::OddTorsion { gcd: g.to_string(), odd: odd.to_string() });
    }
    let family = family_name(label);
    Ok(TorsionReport {
        family,
        n,
        method: "oracle",
        tau: g,
        tau2,
        monomials_considered: res.monomials_considered,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

fn family_name(label: GeneratorLabel) -> String {
    Family::ALL.iter().find(|f| f.label() == label).map(|f| f.as_str().to_string()).unwrap_or_else(|| label.to_string())
}
