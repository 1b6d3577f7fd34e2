//! Parallel against sequential graph extraction on fresh pipelines.

use criterion::{criterion_group, criterion_main, Criterion};
use hecke_core::chars::CharTables;
use hecke_core::curve::{CurveSpec, EllipticCurve};
use hecke_core::ehall::EngineOptions;
use hecke_core::heckegraph::{Execution, HeckePipeline};

fn full_graph(c: &mut Criterion) {
    let mut group = c.benchmark_group("rank2_window");
    group.sample_size(10);
    for name in ["f2-one-point", "f3-one-point", "f2-five-points"] {
        let curve = EllipticCurve::new(CurveSpec::preset(name).unwrap()).unwrap();
        let tables = CharTables::new(&curve, 2).unwrap();
        let x = curve.rational_closed(0);
        for (label, exec) in [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)] {
            group.bench_function(format!("{name}/{label}"), |b| {
                b.iter(|| {
                    // a fresh pipeline so the product cache starts empty
                    let p = HeckePipeline::new(&curve, &tables, EngineOptions::default());
                    p.full_graph(x, 1, 2, (-2, 2), exec).unwrap()
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, full_graph);
criterion_main!(benches);
