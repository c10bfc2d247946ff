use criterion::{black_box, criterion_group, criterion_main, Criterion};
use hypact_bench::{TREE_DEPTH, WORD_BOUND};
use hypact_core::action::BoundaryAction;
use hypact_core::annulus::{Annulus, AnnulusSystem};
use hypact_core::graph::SampleMode;
use hypact_core::{gen, ClopenSet, FreeWord};

fn bench_metric(c: &mut Criterion) {
    c.bench_function("tree_build", |b| {
        b.iter(|| gen::f2_tree(black_box(TREE_DEPTH)))
    });
    let cycle = gen::cycle(8);
    c.bench_function("delta_exhaustive_c8", |b| {
        b.iter(|| cycle.measure_delta(SampleMode::Exhaustive))
    });
    let tree = gen::f2_tree(TREE_DEPTH);
    c.bench_function("delta_sampled_tree", |b| {
        b.iter(|| {
            tree.measure_delta(SampleMode::Sampled {
                samples: 2000,
                seed: 7,
            })
        })
    });
}

fn bench_clopen(c: &mut Criterion) {
    let g = FreeWord::parse_f2("abAbb").unwrap();
    let set = ClopenSet::cylinder(FreeWord::parse_f2("BaB").unwrap())
        .union(&ClopenSet::cylinder(FreeWord::parse_f2("ab").unwrap()));
    c.bench_function("clopen_translate", |b| {
        b.iter(|| black_box(&set).translate(black_box(&g)))
    });
    c.bench_function("clopen_complement", |b| {
        b.iter(|| black_box(&set).complement())
    });
}

fn bench_crossratio(c: &mut Criterion) {
    let base = Annulus::new(
        ClopenSet::cylinder(FreeWord::parse_f2("A").unwrap()),
        ClopenSet::cylinder(FreeWord::parse_f2("a").unwrap()),
    )
    .unwrap();
    let action = BoundaryAction::standard_f2();
    c.bench_function("annulus_system_build", |b| {
        b.iter(|| AnnulusSystem::build(base.clone(), &action, WORD_BOUND))
    });
    let system = AnnulusSystem::build(base, &action, WORD_BOUND);
    let k = ClopenSet::cylinder(FreeWord::parse_f2("AA").unwrap())
        .union(&ClopenSet::cylinder(FreeWord::parse_f2("bb").unwrap()));
    let l = ClopenSet::cylinder(FreeWord::parse_f2("aa").unwrap());
    c.bench_function("crossratio_query", |b| {
        b.iter(|| system.crossratio(black_box(&k), black_box(&l)))
    });
}

criterion_group!(benches, bench_metric, bench_clopen, bench_crossratio);
criterion_main!(benches);
