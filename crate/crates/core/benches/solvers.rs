//! Parallel against sequential execution of the μ sweep and the Monte-Carlo
//! estimator. Build with `--no-default-features` for the rayon-free path.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cograte::matrix::real_matrix;
use cograte::optimizer::log_space;
use cograte::{
    mc_mutual_info, trace_boundary, CognitiveChannel, PsdMatrix, SignalMode, SolverSettings,
};

fn sweep() -> f64 {
    let ch = CognitiveChannel::reference_example();
    let b = trace_boundary(&ch, &log_space(0.1, 10.0, 8), &SolverSettings::default()).unwrap();
    b.max_r_p()
}

fn monte_carlo() -> f64 {
    let h = real_matrix(&[&[0.8, -0.3], &[0.2, 1.1]]);
    let sigma = PsdMatrix::from_real_rows(&[&[2.0, 0.4], &[0.4, 1.0]]).unwrap();
    mc_mutual_info(
        &h,
        &sigma,
        &PsdMatrix::identity(2),
        200_000,
        1,
        SignalMode::Real,
    )
    .unwrap()
}

fn run(c: &mut Criterion, name: &str, f: fn() -> f64) {
    let mut group = c.benchmark_group(name);
    group.sample_size(10);
    #[cfg(feature = "parallel")]
    {
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        group.bench_function(BenchmarkId::new("sequential", 1), |b| {
            b.iter(|| single.install(f))
        });
        let n = cograte::workers();
        group.bench_function(BenchmarkId::new("parallel", n), |b| b.iter(f));
    }
    #[cfg(not(feature = "parallel"))]
    group.bench_function(BenchmarkId::new("sequential", 1), |b| b.iter(f));
    group.finish();
}

fn benches(c: &mut Criterion) {
    run(c, "mu_sweep", sweep);
    run(c, "monte_carlo", monte_carlo);
}

criterion_group!(solvers, benches);
criterion_main!(solvers);
