use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use fusionlat::percolation::{analyze, critical_values, UnionFind};
use fusionlat::rng::TrialStreams;
use fusionlat::sampling::sample_fusion;
use fusionlat::stabilizer::{fuse, labeled_star, FusionMode, StabilizerTableau};
use fusionlat::{Boundary, CentralQubit, Family, FusionModelParams, Lattice, PercolationModel};

fn lattice_build(c: &mut Criterion) {
    let mut g = c.benchmark_group("lattice_build");
    g.bench_function("hc3_L32", |b| {
        b.iter(|| {
            Lattice::from_family(Family::Hypercubic, 3, black_box(32), Boundary::Open).unwrap()
        })
    });
    g.bench_function("diamond3_L32", |b| {
        b.iter(|| Lattice::from_family(Family::Diamond, 3, black_box(32), Boundary::Open).unwrap())
    });
    g.bench_function("fcc_hc4_L12_periodic", |b| {
        b.iter(|| {
            Lattice::from_family(Family::FccHc, 4, black_box(12), Boundary::Periodic).unwrap()
        })
    });
    g.finish();
}

fn sampling(c: &mut Criterion) {
    let lattice = Lattice::from_family(Family::Hypercubic, 3, 32, Boundary::Open).unwrap();
    let streams = TrialStreams::new(1);
    let mut g = c.benchmark_group("sampling_hc3_L32");
    for center in [CentralQubit::Spin, CentralQubit::Photon] {
        let params = FusionModelParams::new(0.95, 0.5, center, 1).unwrap();
        let mut t = 0;
        g.bench_function(center.name(), |b| {
            b.iter(|| {
                t += 1;
                sample_fusion(&lattice, &params, &mut streams.trial(t))
            })
        });
    }
    let params = FusionModelParams::new(0.95, 0.5, CentralQubit::Spin, 1).unwrap();
    g.bench_function("sample_and_analyze", |b| {
        let mut t = 0;
        b.iter(|| {
            t += 1;
            let outcome = sample_fusion(&lattice, &params, &mut streams.trial(t));
            analyze(&outcome, &lattice).unwrap().largest_size
        })
    });
    g.finish();
}

fn coupled_trials(c: &mut Criterion) {
    let lattice = Lattice::from_family(Family::Hypercubic, 3, 16, Boundary::Open).unwrap();
    let mut g = c.benchmark_group("critical_values_hc3_L16");
    g.sample_size(10);
    for (name, model) in [
        ("spin", PercolationModel::spin()),
        ("bond", PercolationModel::Bond),
    ] {
        g.bench_function(name, |b| {
            b.iter(|| critical_values(&lattice, &model, 100, TrialStreams::new(3), 0))
        });
    }
    g.finish();
}

fn union_find(c: &mut Criterion) {
    let lattice = Lattice::from_family(Family::Hypercubic, 3, 32, Boundary::Open).unwrap();
    c.bench_function("union_find_all_edges_hc3_L32", |b| {
        let mut uf = UnionFind::new(lattice.node_count());
        b.iter(|| {
            uf.reset(lattice.node_count());
            for e in lattice.edges() {
                uf.union(e.a, e.b);
            }
            uf.set_size(0)
        })
    });
}

fn tableau(c: &mut Criterion) {
    let a = labeled_star("a", &["a1", "a2", "a3", "a4", "a5", "a6", "A"]).unwrap();
    let b = labeled_star("b", &["b1", "b2", "b3", "b4", "b5", "b6", "B"]).unwrap();
    let mut g = c.benchmark_group("stabilizer");
    g.bench_function("rotated_fusion_success_2x7", |bench| {
        bench.iter(|| fuse(&a, "A", &b, "B", FusionMode::Success).unwrap())
    });
    g.bench_function("canonical_16", |bench| {
        bench.iter_batched(
            || a.tensor(&b).unwrap(),
            |t: StabilizerTableau| t.canonical(),
            BatchSize::SmallInput,
        )
    });
    g.finish();
}

criterion_group!(
    benches,
    lattice_build,
    sampling,
    coupled_trials,
    union_find,
    tableau
);
criterion_main!(benches);
