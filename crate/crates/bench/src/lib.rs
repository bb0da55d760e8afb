//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use torsionlab::generators::{chern_d, GeneratorLabel, GeneratorSet};
use torsionlab::{RingContext, RingElement};

pub fn context(n: usize) -> Arc<RingContext> {
    RingContext::new(n).expect("valid rank")
}

pub fn hspin_generators(n: usize) -> GeneratorSet {
    GeneratorSet::standard(&context(n), GeneratorLabel::RHspin).expect("even rank")
}

/// `d_1 d_2 ... d_(n-1)`, a dense element of middle degree.
pub fn product_of_ds(ctx: &Arc<RingContext>) -> RingElement {
    (1..ctx.n()).fold(RingElement::one(ctx), |acc, i| &acc * &chern_d(ctx, i).expect("index in range"))
}
