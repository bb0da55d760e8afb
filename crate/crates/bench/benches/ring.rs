use criterion::{black_box, criterion_group, criterion_main, Criterion};
use torsionlab::generators::chern_d;
use torsionlab::RingElement;
use torsionlab_bench::{context, product_of_ds};

fn multiplication(c: &mut Criterion) {
    for n in [6usize, 8] {
        let ctx = context(n);
        let a = product_of_ds(&ctx);
        let b = chern_d(&ctx, n - 1).unwrap();
        c.bench_function(&format!("mul d-product by d_(n-1), n={n}"), |bch| bch.iter(|| black_box(&a * &b)));
        let e1 = RingElement::gen_e(&ctx, 1).unwrap();
        c.bench_function(&format!("e1 power 15, n={n}"), |bch| bch.iter(|| black_box(e1.pow(15))));
    }
}

fn decomposition(c: &mut Criterion) {
    let j = torsionlab::decomp::construct_js(12).unwrap();
    c.bench_function("decompose J_12", |bch| bch.iter(|| black_box(torsionlab::decomp::is_totaro_decomposable(&j))));
}

criterion_group!(benches, multiplication, decomposition);
criterion_main!(benches);
