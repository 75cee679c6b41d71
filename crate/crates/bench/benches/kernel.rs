use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use mcmullen_bench::{bodies, circle, point_cloud};
use mcmullen_core::derivative::{rank_trace, DerivativeConfig, Engine};
use mcmullen_core::game::{play_match, GoodCopyPlayer, MatchConfig, RankReducer};
use mcmullen_core::{generators, Homothet, Vector};

fn kernel(c: &mut Criterion) {
    let mut g = c.benchmark_group("kernel");
    for (name, body) in bodies() {
        let d = body.dim();
        let u = Vector::from_fn(d, |k, _| 1.0 + k as f64 * 0.3).normalize();
        let pts = point_cloud(d);
        g.bench_with_input(BenchmarkId::new("support", name), &body, |b, p| {
            b.iter(|| p.support_value(black_box(&u)))
        });
        g.bench_with_input(BenchmarkId::new("max_chord", name), &body, |b, p| {
            b.iter(|| p.max_chord(black_box(&u)))
        });
        g.bench_with_input(BenchmarkId::new("min_enclosing", name), &body, |b, p| {
            b.iter(|| p.min_enclosing_homothet(black_box(&pts)))
        });
    }
    g.finish();
}

fn delta(c: &mut Criterion) {
    let sq = generators::square();
    let x = Vector::from_vec(vec![-1.0, 0.3]);
    c.bench_function("delta_at/square-edge", |b| b.iter(|| sq.delta_at(black_box(&x))));
}

fn derivative(c: &mut Criterion) {
    let disk = generators::disk();
    let t = circle();
    let engine = Engine::new(&disk, &t, DerivativeConfig::default()).expect("engine");
    let alive = engine.all_alive();
    let q = Homothet::new(Vector::from_vec(vec![0.8, 0.0]), 0.5);
    c.bench_function("derivative/good_copy/circle-200", |b| {
        b.iter(|| engine.is_good_copy(black_box(&q), &alive))
    });
    c.bench_function("derivative/step/circle-200", |b| b.iter(|| engine.step(&alive)));
    let deco = generators::circle_decorated(200);
    c.bench_function("derivative/rank/circle-decorated-200", |b| {
        b.iter(|| rank_trace(&disk, &deco, 1e-6, 4))
    });
}

fn game(c: &mut Criterion) {
    let disk = generators::disk();
    let t = circle();
    let si = GoodCopyPlayer::new(&disk, &t).expect("good-copy player");
    let sii = RankReducer::new(&disk, &t).expect("rank reducer");
    let mut g = c.benchmark_group("game");
    g.sample_size(10);
    g.bench_function("goodcopy-vs-rank/circle-200/h10", |b| {
        b.iter(|| play_match(&si, &sii, &disk, &t, MatchConfig { horizon: 10, seed: 1 }))
    });
    g.finish();
}

criterion_group!(benches, kernel, delta, derivative, game);
criterion_main!(benches);
