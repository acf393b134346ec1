//! Row-parallel vs sequential rasterization on a quintic with many
//! components: the lattice fill dominates, so this measures the rayon
//! split against the plain loop at two grid sizes.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use loceq_core::locus::{plane_registry, ImplicitCurve};
use loceq_core::render::{rasterize, rasterize_seq, Viewport};
use loceq_core::text::parse_poly;

fn string_art_quintic() -> ImplicitCurve {
    let p = parse_poly(
        "x^4y - 40x^3y - 2x^2y^3 + 600x^2y - 120xy^3 - 4000xy + y^5 - 200y^3 + 10000y",
        plane_registry(),
    )
    .unwrap();
    ImplicitCurve::new(p).unwrap()
}

fn bench_rasterize(c: &mut Criterion) {
    let curve = string_art_quintic();
    let mut group = c.benchmark_group("rasterize");
    for grid in [256u32, 1024] {
        let vp = Viewport::square(12, grid).unwrap();
        group.bench_with_input(BenchmarkId::new("parallel", grid), &vp, |b, vp| {
            b.iter(|| rasterize(&curve, vp))
        });
        group.bench_with_input(BenchmarkId::new("sequential", grid), &vp, |b, vp| {
            b.iter(|| rasterize_seq(&curve, vp))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_rasterize);
criterion_main!(benches);
