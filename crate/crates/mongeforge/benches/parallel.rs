use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mongeforge::analyze::pde_residual;
use mongeforge::exec::{self, Mode};
use mongeforge::plane::Point2;
use mongeforge::randgen::{generate, scene_rng, Family};
use mongeforge::shell::sample_grid;

fn modes() -> Vec<(&'static str, Mode)> {
    vec![
        ("sequential", Mode::Sequential),
        ("parallel", Mode::Parallel),
    ]
}

fn bench_sample_grid(c: &mut Criterion) {
    let scene = generate(Family::Polyhedral, &mut scene_rng(42));
    let s = scene.scale();
    let mut group = c.benchmark_group("sample_grid_257");
    for (name, mode) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| {
                sample_grid(
                    &scene,
                    (-2.0 * s, 2.0 * s, -2.0 * s, 2.0 * s),
                    257,
                    257,
                    mode,
                )
            })
        });
    }
    group.finish();
}

fn bench_residual_scan(c: &mut Criterion) {
    let scene = generate(Family::TwoSingularSectors, &mut scene_rng(42));
    let s = scene.scale();
    let n = 40_000usize;
    let pts: Vec<Point2> = (0..n)
        .map(|k| {
            let t = k as f64 / n as f64;
            Point2::new(
                -3.0 * s + 6.0 * s * t,
                -3.0 * s + 6.0 * s * ((k * 7919) % n) as f64 / n as f64,
            )
        })
        .collect();
    let mut group = c.benchmark_group("residual_scan_40k");
    for (name, mode) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| {
                exec::max_f64(
                    pts.len(),
                    |i| pde_residual(&scene, pts[i]).map_or(0.0, f64::abs),
                    mode,
                )
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_sample_grid, bench_residual_scan);
criterion_main!(benches);
