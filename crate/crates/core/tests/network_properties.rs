use fusionsim_core::fusion::expected_mse;
use fusionsim_core::network::{integrate_epsilon, replication_stream, run_episode, Episode, EpisodeConfig, StreamPurpose};
use fusionsim_core::{DelayDistribution, EpochState, RandomStream, SamplerPolicy, SchedulerPolicy};

fn episode(cfg: &EpisodeConfig, delay: &DelayDistribution, sampler: &SamplerPolicy, seed: u64, rep: u64) -> Episode {
    let mut delay_rng = replication_stream(seed, rep, StreamPurpose::Delay);
    let mut path_rng = replication_stream(seed, rep, StreamPurpose::Path);
    let path = cfg.empirical_dt.map(|_| &mut path_rng);
    run_episode(cfg, delay, &mut SchedulerPolicy::Maf, sampler, &mut delay_rng, path).unwrap()
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn aoi_bounds_mse_at_every_horizon() {
    let delay = DelayDistribution::binary(0.95, 20.0).unwrap();
    let samplers = [
        SamplerPolicy::ZeroWait,
        SamplerPolicy::constant(1.5).unwrap(),
        SamplerPolicy::water_filling(3.6).unwrap(),
    ];
    for rho in [0.3, 0.9, 1.0] {
        for (k, sampler) in samplers.iter().enumerate() {
            let mut cfg = EpisodeConfig::new(rho, 20_000);
            cfg.checkpoints = (0..=43).map(|e| (10.0_f64.powf(e as f64 / 10.0)) as usize).collect();
            let ep = episode(&cfg, &delay, sampler, 11, k as u64);
            assert!(!ep.metrics.checkpoints.is_empty());
            for c in &ep.metrics.checkpoints {
                assert!(c.avg_aoi() >= c.avg_mse(), "rho {rho} sampler {k} at {}: {c:?}", c.epochs);
                assert!(c.avg_mse() >= 0.0);
            }
        }
    }
}

#[test]
fn zero_correlation_mse_equals_aoi() {
    let delay = DelayDistribution::new(&[0.5, 3.0], &[0.7, 0.3]).unwrap();
    let ep = episode(&EpisodeConfig::new(0.0, 5_000), &delay, &SamplerPolicy::water_filling(2.0).unwrap(), 4, 0);
    let m = &ep.metrics;
    assert!((m.avg_aoi - m.avg_mse_analytic).abs() <= 1e-12 * m.avg_aoi);
}

/// Per-replication analytic and empirical time averages.
fn empirical_runs(dt: f64, reps: u64, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let delay = DelayDistribution::new(&[0.5, 3.0], &[0.8, 0.2]).unwrap();
    let sampler = SamplerPolicy::water_filling(2.0).unwrap();
    let mut cfg = EpisodeConfig::new(0.9, 400);
    cfg.empirical_dt = Some(dt);
    (0..reps)
        .map(|rep| {
            let m = episode(&cfg, &delay, &sampler, seed, rep).metrics;
            (m.avg_mse_analytic, m.avg_mse_empirical.unwrap())
        })
        .unzip()
}

#[test]
fn empirical_mse_matches_analytic() {
    let (analytic, empirical) = empirical_runs(0.05, 200, 21);
    let (ma, sa) = mean_and_se(&analytic);
    let (me, se) = mean_and_se(&empirical);
    let combined = (sa * sa + se * se).sqrt();
    assert!((ma - me).abs() <= 3.0 * combined, "analytic {ma} ± {sa}, empirical {me} ± {se}");
}

#[test]
fn empirical_mse_stable_under_grid_refinement() {
    let (_, coarse) = empirical_runs(0.1, 200, 22);
    let (_, fine) = empirical_runs(0.05, 200, 22);
    let (mc, _) = mean_and_se(&coarse);
    let (mf, sf) = mean_and_se(&fine);
    assert!((mc - mf).abs() < sf, "dt 0.1: {mc}, dt 0.05: {mf} ± {sf}");
}

#[test]
fn interval_integral_matches_midpoint_quadrature() {
    let mut rng = RandomStream::new(77, 0);
    for _ in 0..200 {
        let rho = rng.uniform();
        let s1 = rng.uniform_in(0.0, 50.0);
        let s2 = rng.uniform_in(0.0, 50.0);
        let y = rng.uniform_in(0.0, 10.0);
        let len = rng.uniform_in(0.01, 30.0);
        let state = EpochState::from_samples(s1, s2, y);
        let exact = integrate_epsilon(&state, len, rho);
        let start = state.m + y;
        let n = 10_000;
        let h = len / n as f64;
        let quad: f64 = (0..n)
            .map(|k| {
                let t = start + (k as f64 + 0.5) * h;
                expected_mse(t, rho, t - s1, t - s2).unwrap()
            })
            .sum::<f64>()
            * h;
        assert!((exact - quad).abs() <= 1e-6 * exact.abs(), "{exact} vs {quad}");
    }
}

#[test]
fn water_filling_at_zero_threshold_is_zero_wait() {
    let delay = DelayDistribution::new(&[0.0, 1.0, 6.0], &[0.2, 0.6, 0.2]).unwrap();
    let mut cfg = EpisodeConfig::new(0.9, 2_000);
    cfg.keep_trace = true;
    let wf = episode(&cfg, &delay, &SamplerPolicy::water_filling(0.0).unwrap(), 3, 0);
    let zw = episode(&cfg, &delay, &SamplerPolicy::ZeroWait, 3, 0);
    assert_eq!(wf.records, zw.records);
    assert_eq!(wf.metrics, zw.metrics);
}

#[test]
fn certain_delay_gives_deterministic_cycle() {
    // p = 1 leaves only the zero delay. Zero-wait then never advances time.
    let delay = DelayDistribution::binary(1.0, 20.0).unwrap();
    let ep = episode(&EpisodeConfig::new(0.9, 1_000), &delay, &SamplerPolicy::ZeroWait, 0, 0);
    assert_eq!(ep.metrics.horizon, 0.0);
    assert_eq!((ep.metrics.avg_aoi, ep.metrics.avg_mse_analytic), (0.0, 0.0));

    // A unit wait makes MAF alternate sources with Γ = 1 after the first
    // epoch: the first unit interval accrues ∫2u du = 1, each later one
    // ∫(1 + 2u) du = 2.
    let mut cfg = EpisodeConfig::new(0.0, 10_000);
    cfg.keep_trace = true;
    let ep = episode(&cfg, &delay, &SamplerPolicy::constant(1.0).unwrap(), 0, 0);
    assert!(ep.records.iter().all(|r| r.delay == 0.0 && r.wait == 1.0));
    assert!(ep.states.iter().skip(1).all(|s| s.gamma == 1.0));
    let h = ep.metrics.horizon;
    assert!(h == h.round() && h > 9_000.0, "{h}");
    let expected = (2.0 * h - 1.0) / h;
    assert!((ep.metrics.avg_aoi - expected).abs() < 1e-9, "{} vs {expected}", ep.metrics.avg_aoi);
}

#[test]
fn time_averages_settle_at_high_correlation() {
    let delay = DelayDistribution::binary(0.95, 20.0).unwrap();
    let mut cfg = EpisodeConfig::new(0.9, 100_000);
    cfg.checkpoints = vec![10_000, 100_000];
    let ep = episode(&cfg, &delay, &SamplerPolicy::water_filling(3.6).unwrap(), 1, 0);
    let [a, b] = [ep.metrics.checkpoints[0], ep.metrics.checkpoints[1]];
    let mse_change = (b.avg_mse() - a.avg_mse()).abs() / b.avg_mse();
    let aoi_change = (b.avg_aoi() - a.avg_aoi()).abs() / b.avg_aoi();
    assert!(mse_change < 0.01 && aoi_change < 0.01, "mse {mse_change}, aoi {aoi_change}");
}

#[test]
fn runs_are_reproducible() {
    let delay = DelayDistribution::binary(0.9, 5.0).unwrap();
    let mut cfg = EpisodeConfig::new(0.5, 300);
    cfg.empirical_dt = Some(0.05);
    let sampler = SamplerPolicy::water_filling(1.0).unwrap();
    assert_eq!(episode(&cfg, &delay, &sampler, 9, 2), episode(&cfg, &delay, &sampler, 9, 2));
    assert_ne!(episode(&cfg, &delay, &sampler, 9, 2).metrics, episode(&cfg, &delay, &sampler, 9, 3).metrics);
}
