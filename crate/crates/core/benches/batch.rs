use std::hint::black_box;

use armforge::batch;
use armforge::control_sim::{desk_scene, run_cycle, SimConfig};
use armforge::kinematics::{forward_kinematics, inverse_kinematics, IkOptions, JointState, Pose};
use armforge::presets::desk_arm;
use armforge::sensors::{detection_rate, UltrasonicSpec};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ik_targets(n: usize) -> Vec<Pose> {
    let arm = desk_arm();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    (0..n)
        .map(|_| {
            let q = arm.joints.iter().map(|j| rng.random_range(j.limits[0]..=j.limits[1])).collect();
            forward_kinematics(&arm, &JointState { angles: q }).unwrap()
        })
        .collect()
}

fn bench_ik(c: &mut Criterion) {
    let arm = desk_arm();
    let seed = JointState::mid_range(&arm);
    let opts = IkOptions::default();
    let targets = ik_targets(256);
    let solve = |t: &Pose| inverse_kinematics(&arm, t, &seed, &opts).map(|s| s.residual).ok();
    let mut g = c.benchmark_group("batch_ik");
    g.bench_function(BenchmarkId::new("sequential", targets.len()), |b| {
        b.iter(|| batch::map_sequential(black_box(&targets), solve))
    });
    #[cfg(feature = "parallel")]
    g.bench_function(BenchmarkId::new("parallel", targets.len()), |b| {
        b.iter(|| batch::map_parallel(black_box(&targets), solve))
    });
    g.finish();
}

fn bench_detection(c: &mut Criterion) {
    let spec = UltrasonicSpec::default();
    let distances: Vec<f64> = (1..=64).map(|k| k as f64 * 0.06).collect();
    let rate = |d: &f64| detection_rate(&spec, *d, "plastic", 2000, 9).unwrap();
    let mut g = c.benchmark_group("detection_monte_carlo");
    g.bench_function("sequential", |b| b.iter(|| batch::map_sequential(black_box(&distances), rate)));
    #[cfg(feature = "parallel")]
    g.bench_function("parallel", |b| b.iter(|| batch::map_parallel(black_box(&distances), rate)));
    g.finish();
}

fn bench_sim_sweep(c: &mut Criterion) {
    let arm = desk_arm();
    let scene = desk_scene();
    let seeds: Vec<u64> = (0..8).collect();
    let cycle = |s: &u64| run_cycle(&arm, &scene, &SimConfig { seed: *s, ..SimConfig::default() }).unwrap().cycle_time;
    let mut g = c.benchmark_group("sim_seed_sweep");
    g.sample_size(10);
    g.bench_function("sequential", |b| b.iter(|| batch::map_sequential(black_box(&seeds), cycle)));
    #[cfg(feature = "parallel")]
    g.bench_function("parallel", |b| b.iter(|| batch::map_parallel(black_box(&seeds), cycle)));
    g.finish();
}

criterion_group!(benches, bench_ik, bench_detection, bench_sim_sweep);
criterion_main!(benches);
