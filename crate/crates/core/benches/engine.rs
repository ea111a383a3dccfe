use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use semifb::adapters::{expectations_fb, expectations_npass, trellis_to_cg, Trellis};
use semifb::algebra::{Bc, Real};
use semifb::engine::CheckpointPolicy;
use semifb::gen::layered_graph;
use semifb::par::{forward_batch, Execution};

const EXECS: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn batch_real(c: &mut Criterion) {
    let mut rng = StdRng::seed_from_u64(1);
    let g = layered_graph(&mut rng, 64, 32, 3);
    let n = g.sources().len();
    let mut group = c.benchmark_group("forward_batch/real");
    for batch in [8usize, 64] {
        let xis: Vec<Vec<f64>> = (0..batch)
            .map(|_| (0..n).map(|_| rng.gen_range(0.5..1.0)).collect())
            .collect();
        group.throughput(Throughput::Elements(batch as u64));
        for (name, exec) in EXECS {
            group.bench_with_input(BenchmarkId::new(name, batch), &xis, |b, xis| {
                b.iter(|| forward_batch(&g, &Real, xis, CheckpointPolicy::NodesOnly, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn batch_bc(c: &mut Criterion) {
    let mut rng = StdRng::seed_from_u64(2);
    let g = layered_graph(&mut rng, 32, 16, 3);
    let n = g.sources().len();
    let s = Bc::new(Real, 4).unwrap();
    let xis: Vec<Vec<Vec<f64>>> = (0..32)
        .map(|_| {
            (0..n)
                .map(|_| (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect()
        })
        .collect();
    let mut group = c.benchmark_group("forward_batch/bc4");
    for (name, exec) in EXECS {
        group.bench_function(name, |b| {
            b.iter(|| forward_batch(&g, &s, &xis, CheckpointPolicy::AllElements, exec).unwrap())
        });
    }
    group.finish();
}

fn expectation_routes(c: &mut Criterion) {
    let mut rng = StdRng::seed_from_u64(3);
    let t = Trellis::random(&mut rng, 8, 40, 6);
    let b = trellis_to_cg(&t).unwrap();
    let n = b.built.xi.len();
    let features: Vec<Vec<f64>> = (0..16)
        .map(|_| (0..n).map(|_| rng.gen_range(0.0..1.0)).collect())
        .collect();
    let g = &b.built.graph;
    let mut group = c.benchmark_group("expectations");
    group.bench_function("forward-backward", |bch| {
        bch.iter(|| {
            expectations_fb(g, &b.built.xi, &features, CheckpointPolicy::AllElements).unwrap()
        })
    });
    for (name, exec) in EXECS {
        group.bench_function(format!("npass/{name}"), |bch| {
            bch.iter(|| {
                expectations_npass(
                    g,
                    &b.built.xi,
                    &features,
                    CheckpointPolicy::AllElements,
                    exec,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, batch_real, batch_bc, expectation_routes);
criterion_main!(benches);
