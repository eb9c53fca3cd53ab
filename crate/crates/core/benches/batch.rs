use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use flatchain::batch::{coarea_reports, flat_norms, top_lifts, Exec};
use flatchain::coarea::GridFunction;
use flatchain::generate::{circle_top_chain, grid_chain, grid_function, rng};
use flatchain::grid::kuhn_complex;
use flatchain::{GroupTag, PolyChain};

const EXECS: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn lifts(c: &mut Criterion) {
    let g = kuhn_complex(2, 6).unwrap();
    let mut r = rng(1);
    let tops: Vec<PolyChain> = (0..64).map(|_| circle_top_chain(&mut r, &g).unwrap()).collect();
    let mut group = c.benchmark_group("top_lifts");
    group.throughput(Throughput::Elements(tops.len() as u64));
    for (name, exec) in EXECS {
        group.bench_with_input(BenchmarkId::from_parameter(name), &tops, |b, t| {
            b.iter(|| top_lifts(exec, t).unwrap())
        });
    }
    group.finish();
}

fn coarea(c: &mut Criterion) {
    let mut r = rng(2);
    let fs: Vec<GridFunction> = (0..64)
        .map(|_| grid_function(&mut r, 2, 8, false).unwrap())
        .collect();
    let mut group = c.benchmark_group("coarea_reports");
    group.throughput(Throughput::Elements(fs.len() as u64));
    for (name, exec) in EXECS {
        group.bench_with_input(BenchmarkId::from_parameter(name), &fs, |b, f| {
            b.iter(|| coarea_reports(exec, f).unwrap())
        });
    }
    group.finish();
}

fn flat(c: &mut Criterion) {
    let g = kuhn_complex(2, 2).unwrap();
    let mut r = rng(3);
    let chains: Vec<PolyChain> = (0..16)
        .map(|_| grid_chain(&mut r, &g, GroupTag::Real, 1, 0.3).unwrap())
        .collect();
    let mut group = c.benchmark_group("flat_norms");
    group.throughput(Throughput::Elements(chains.len() as u64));
    for (name, exec) in EXECS {
        group.bench_with_input(BenchmarkId::from_parameter(name), &chains, |b, ch| {
            b.iter(|| flat_norms(exec, ch, &g).unwrap())
        });
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10).warm_up_time(Duration::from_secs(1));
    targets = lifts, coarea, flat
}
criterion_main!(benches);
