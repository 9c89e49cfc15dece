use cograte::matrix::real_matrix;
use cograte::optimizer::{grid_oracle, lagrangian_g, log_space, OracleMode};
use cograte::{
    dpc_rates, log_det_id_plus, mc_mutual_info, mu_sum_achievable, normalized, trace_boundary,
    CognitiveChannel, DpcAllocation, HermitianMatrix, PsdMatrix, SignalMode, SolverSettings,
};

fn channels() -> Vec<CognitiveChannel> {
    vec![
        CognitiveChannel::reference_example(),
        CognitiveChannel::real(
            &[&[0.9]],
            &[&[0.4], &[-0.2]],
            &[&[1.1]],
            &[&[0.5], &[0.7]],
            2.0,
            3.0,
        )
        .unwrap(),
        CognitiveChannel::real(
            &[&[-0.6]],
            &[&[1.0], &[0.3]],
            &[&[0.3]],
            &[&[-1.2], &[0.1]],
            6.0,
            1.0,
        )
        .unwrap(),
    ]
}

#[test]
fn more_cognitive_power_never_hurts() {
    let opts = SolverSettings::default();
    for ch in channels() {
        for mu in [0.5, 1.0, 3.0] {
            let mut last = f64::NEG_INFINITY;
            for scale in [0.5, 1.0, 2.0] {
                let bigger = ch.with_powers(ch.p_p(), ch.p_c() * scale).unwrap();
                let v = mu_sum_achievable(&bigger, mu, &opts).unwrap().value;
                assert!(v >= last - 1e-8, "mu {mu}: {v} < {last}");
                last = v;
            }
        }
    }
}

#[test]
fn solver_matches_grid_search() {
    let opts = SolverSettings::default();
    for ch in channels() {
        for mu in [0.0, 0.5, 1.0, 2.0, 10.0] {
            let solver = mu_sum_achievable(&ch, mu, &opts).unwrap().value;
            let oracle = grid_oracle(&ch, mu, 200, OracleMode::Achievable).unwrap();
            assert!(
                normalized((solver - oracle).abs(), mu) <= 1e-2,
                "mu {mu}: {solver} vs {oracle}"
            );
        }
    }
}

/// Maximizing the dual function over allocations gives the primal value.
#[test]
fn dual_function_at_optimum_is_primal_value() {
    let ch = CognitiveChannel::reference_example();
    let opts = SolverSettings::default();
    for mu in [0.0, 0.5, 1.0, 2.0, 1e3] {
        let sol = mu_sum_achievable(&ch, mu, &opts).unwrap();
        let g = lagrangian_g(&ch, mu, &sol.witness, &sol.rate)
            .finite()
            .expect("witness is feasible");
        assert!((g - sol.value).abs() <= 1e-9 * sol.value.max(1.0));
        let oracle = grid_oracle(&ch, mu, 200, OracleMode::Achievable).unwrap();
        assert!(normalized((g - oracle).abs(), mu) <= 1e-3, "mu {mu}");
    }
}

#[test]
fn cognitive_rate_matches_monte_carlo() {
    let ch = CognitiveChannel::reference_example();
    let a = DpcAllocation::scalar(2.0, 1.0, 3.5, 0.5).unwrap();
    let r = dpc_rates(&ch, &a).unwrap();
    let est = mc_mutual_info(
        ch.h_cc(),
        &a.sigma_cc,
        &PsdMatrix::identity(2),
        1_000_000,
        11,
        SignalMode::Real,
    )
    .unwrap();
    assert!((est - r.r_c).abs() <= 0.02, "{est} vs {}", r.r_c);
}

#[test]
fn monte_carlo_error_shrinks_with_samples() {
    let h = real_matrix(&[&[0.8, -0.3], &[0.2, 1.1]]);
    let sigma = PsdMatrix::from_real_rows(&[&[2.0, 0.4], &[0.4, 1.0]]).unwrap();
    let exact = 0.5
        * log_det_id_plus(&HermitianMatrix::new(&h * sigma.as_matrix() * h.adjoint()).unwrap())
            .unwrap();
    let mean_err = |n: usize| {
        (0..10u64)
            .map(|seed| {
                let est = mc_mutual_info(
                    &h,
                    &sigma,
                    &PsdMatrix::identity(2),
                    n,
                    seed,
                    SignalMode::Real,
                )
                .unwrap();
                (est - exact).abs()
            })
            .sum::<f64>()
            / 10.0
    };
    let (coarse, fine) = (mean_err(20_000), mean_err(40_000));
    assert!(fine < coarse, "{fine} >= {coarse}");
}

#[test]
fn monte_carlo_is_seed_deterministic() {
    let h = real_matrix(&[&[1.0, 0.5]]);
    let sigma = PsdMatrix::identity(2);
    let run = || {
        mc_mutual_info(
            &h,
            &sigma,
            &PsdMatrix::identity(1),
            50_000,
            3,
            SignalMode::Complex,
        )
        .unwrap()
    };
    assert_eq!(run().to_bits(), run().to_bits());
}

#[test]
fn boundary_is_pareto_ordered() {
    let ch = CognitiveChannel::reference_example();
    let b = trace_boundary(&ch, &log_space(0.01, 100.0, 25), &SolverSettings::default()).unwrap();
    assert_eq!(b.points.len(), 25);
    assert!(b.is_pareto_ordered(1e-6));
    assert!(b.points.windows(2).all(|w| w[0].mu > w[1].mu));
}

#[test]
fn vanishing_power_collapses_boundary() {
    let ch = CognitiveChannel::reference_example()
        .with_powers(1e-12, 1e-12)
        .unwrap();
    let b = trace_boundary(&ch, &[0.1, 1.0, 10.0], &SolverSettings::default()).unwrap();
    for p in &b.points {
        assert!(p.rate.r_p.abs() < 1e-10 && p.rate.r_c.abs() < 1e-10);
    }
}

#[test]
fn same_seed_same_boundary() {
    let ch = channels().remove(1);
    let opts = SolverSettings {
        seed: 9,
        ..SolverSettings::default()
    };
    let mus = [0.2, 1.0, 5.0];
    let a = trace_boundary(&ch, &mus, &opts).unwrap().to_csv();
    let b = trace_boundary(&ch, &mus, &opts).unwrap().to_csv();
    assert_eq!(a, b);
}
