use criterion::{criterion_group, criterion_main, Criterion};
use logdrw::filtration_ss::{e1_page, Steenbrink};
use logdrw::homology::{homology_of, weight_subcomplex, Variant};
use logdrw::weights::{plus_weight_grid, weight_grid};
use logdrw_bench::model;

fn comparison(c: &mut Criterion) {
    let m = model("semistable:p=2,n=2,e=2,f=0,d=2");
    let grid = weight_grid(&m, 4, 0);
    c.bench_function("compare_lift_grid", |b| {
        b.iter(|| {
            grid.iter()
                .filter(|k| {
                    let drw = weight_subcomplex(&m, 2, k, Variant::Absolute).and_then(|c| homology_of(&c));
                    let lift = weight_subcomplex(&m, 2, k, Variant::Lift).and_then(|c| homology_of(&c));
                    drw.unwrap().same_groups(&lift.unwrap())
                })
                .count()
        })
    });
}

fn weight_spectral_sequence(c: &mut Criterion) {
    let m = model("semistable:p=3,n=2,e=2,f=0,d=2");
    c.bench_function("e1_page", |b| b.iter(|| e1_page(&m, 2, 2, 1).unwrap()));
    let classes = plus_weight_grid(&m, 2, 1);
    c.bench_function("steenbrink_total", |b| {
        b.iter(|| {
            for k in &classes {
                let st = Steenbrink::new(&m, 2, k).unwrap();
                homology_of(&st.total().unwrap().0).unwrap();
            }
        })
    });
}

criterion_group!(benches, comparison, weight_spectral_sequence);
criterion_main!(benches);
