use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use resgen_bench::{build_case, standard_cases};
use resgen_core::netlist::Simulator;
use resgen_core::verify::{run_sweep, SplitMix64, SweepPlan};
use resgen_core::Family;

fn bench_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("build");
    for spec in standard_cases() {
        group.bench_function(format!("{}_p{}_n{}", spec.family, spec.p, spec.n), |b| {
            b.iter(|| build_case(black_box(&spec)))
        });
    }
    group.finish();
}

fn bench_evaluate(c: &mut Criterion) {
    let mut group = c.benchmark_group("evaluate");
    for spec in standard_cases() {
        let generated = build_case(&spec);
        let mut sim = Simulator::new(&generated.netlist);
        let mut rng = SplitMix64(1);
        group.bench_function(format!("{}_p{}_n{}", spec.family, spec.p, spec.n), |b| {
            b.iter(|| {
                sim.run_value(black_box(rng.next_bits(spec.p))).unwrap();
                black_box(sim.port_values())
            })
        });
    }
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    c.bench_function("sweep/universal_d1_p12_n2_exhaustive", |b| {
        let plan = SweepPlan::exhaustive(Family::UniversalD1, 12, 2);
        b.iter(|| {
            let v = run_sweep(black_box(&plan)).unwrap();
            assert!(v.passed);
            v.evaluated
        })
    });
}

criterion_group!(benches, bench_build, bench_evaluate, bench_sweep);
criterion_main!(benches);
