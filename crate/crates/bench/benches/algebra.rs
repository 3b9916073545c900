use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use logdrw::overconv::gauss_norm;
use logdrw::DrwElement;
use num_rational::Rational64;
use logdrw_bench::{elements, model};

fn products(c: &mut Criterion) {
    let mut group = c.benchmark_group("multiply");
    for desc in ["poly:p=2,n=2,e=1,f=1", "semistable:p=3,n=3,e=3,f=0,d=2"] {
        let m = model(desc);
        for level in [1, 3] {
            let xs = elements(&m, level, 32, 1);
            group.bench_with_input(BenchmarkId::new(desc, level), &xs, |b, xs| {
                b.iter(|| {
                    for w in xs.windows(2) {
                        black_box(w[0].multiply(&w[1]).unwrap());
                    }
                })
            });
        }
    }
    group.finish();
}

fn operators(c: &mut Criterion) {
    let m = model("semistable:p=2,n=2,e=2,f=0,d=2");
    let xs = elements(&m, 3, 32, 2);
    c.bench_function("differential", |b| {
        b.iter(|| xs.iter().map(|x| x.differential().unwrap().len()).sum::<usize>())
    });
    c.bench_function("frobenius_after_verschiebung", |b| {
        b.iter(|| xs.iter().map(|x| x.verschiebung().unwrap().frobenius().unwrap().len()).sum::<usize>())
    });
    let words: Vec<_> = xs.iter().flat_map(|x| x.to_words().unwrap()).collect();
    c.bench_function("normalize_word", |b| {
        b.iter(|| {
            for w in &words {
                black_box(DrwElement::normalize_word(&m, 3, w).unwrap());
            }
        })
    });
}

fn gauss(c: &mut Criterion) {
    let m = model("poly:p=3,n=2,e=2,f=0");
    let xs = elements(&m, 3, 32, 3);
    let eps = Rational64::new(1, 2);
    c.bench_function("gauss_norm", |b| {
        b.iter(|| {
            for x in &xs {
                black_box(gauss_norm(x, eps).unwrap());
            }
        })
    });
}

criterion_group!(benches, products, operators, gauss);
criterion_main!(benches);
