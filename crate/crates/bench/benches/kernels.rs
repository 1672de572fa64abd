use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use flimits_core::grigorchuk::random_word;
use flimits_core::limits::relations_up_to;
use flimits_core::thompson::random_element;
use flimits_core::words::law_lwc2m;
use flimits_core::{generator_x, iota, Dyadic, Group, MarkedTuple};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn compose(c: &mut Criterion) {
    let f = random_element(1, 20);
    let g = random_element(2, 20);
    c.bench_function("compose length-20 elements", |b| b.iter(|| black_box(&f).compose(black_box(&g))));
    c.bench_function("invert length-20 element", |b| b.iter(|| black_box(&f).invert()));
}

fn law(c: &mut Criterion) {
    let d = |s: &str| s.parse::<Dyadic>().unwrap();
    let h1 = iota(&d("0"), &d("1/4"), &generator_x(0)).unwrap();
    let h2 = iota(&d("1/2"), &d("3/4"), &generator_x(0)).unwrap();
    let w = law_lwc2m((&d("0"), &d("1/4")), (&d("1/2"), &d("3/4")), &h1, &h2).unwrap();
    let args = [random_element(3, 20)];
    c.bench_function("evaluate the two-interval law", |b| {
        b.iter(|| w.evaluate(black_box(&args)).unwrap())
    });
}

fn relations(c: &mut Criterion) {
    let m = MarkedTuple::new(vec![generator_x(0), generator_x(1)]).unwrap();
    let mut g = c.benchmark_group("relations ball");
    g.sample_size(10);
    g.bench_function("F with x0, x1, radius 8", |b| b.iter(|| relations_up_to(black_box(&m), 8)));
    g.finish();
}

fn grigorchuk(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let words: Vec<_> = (0..64).map(|_| random_word(&mut rng, 200)).collect();
    c.bench_function("Grigorchuk word problem, 64 words of length 200", |b| {
        b.iter(|| words.iter().filter(|w| w.is_identity()).count())
    });
    let w = random_word(&mut rng, 40);
    c.bench_function("Grigorchuk depth-12 portrait", |b| b.iter(|| black_box(&w).portrait(12)));
}

criterion_group!(benches, compose, law, relations, grigorchuk);
criterion_main!(benches);
