use std::sync::Arc;

use fusionsim_core::mdp::{
    cost_mdp3, dinkelbach_solve, dinkelbach_solve_with, evaluate_policy, h_rho, rvi_solve, DinkelbachOptions, GridOptions,
    MdpGrid,
};
use fusionsim_core::network::{replication_stream, run_episode, EpisodeConfig, StreamPurpose};
use fusionsim_core::policies::tabular_wait;
use fusionsim_core::{DelayDistribution, SamplerPolicy, SchedulerPolicy};
use proptest::prelude::*;

fn binary_grid() -> MdpGrid {
    MdpGrid::default_for(&DelayDistribution::binary(0.95, 20.0).unwrap(), GridOptions::default()).unwrap()
}

#[test]
fn h_strictly_increasing_in_gap() {
    for rho in [0.3, 0.9, 0.99] {
        for mi in 1..=100 {
            let m = mi as f64 * 0.5;
            let mut prev = h_rho(0.0, m, rho).unwrap();
            for gi in 1..=100 {
                let g = m * gi as f64 / 100.0;
                let h = h_rho(g, m, rho).unwrap();
                assert!(h > prev, "rho {rho}, M {m}, Γ {g}: {h} <= {prev}");
                prev = h;
            }
        }
    }
}

proptest! {
    #[test]
    fn h_never_exceeds_gap(m in 0.0_f64..1e3, frac in 0.0_f64..=1.0, rho in 0.0_f64..=1.0) {
        let g = m * frac;
        let h = h_rho(g, m, rho).unwrap();
        prop_assert!(h >= 0.0 && h <= g);
        if rho == 0.0 || g == 0.0 {
            prop_assert_eq!(h, g);
        } else {
            prop_assert!(h < g);
        }
    }
}

#[test]
fn gain_slope_is_minus_epoch_length() {
    let grid = binary_grid();
    for lambda in [0.0, 8.0, 12.0, 20.0] {
        let sol = rvi_solve(&grid, lambda, 1e-10, 100_000).unwrap();
        let length = evaluate_policy(&grid, &sol.policy).unwrap().length;
        let delta = 1e-3;
        let up = rvi_solve(&grid, lambda + delta, 1e-10, 100_000).unwrap().gain;
        let down = rvi_solve(&grid, lambda - delta, 1e-10, 100_000).unwrap().gain;
        let slope = (up - down) / (2.0 * delta);
        assert!((slope + length).abs() <= 1e-3 * length, "λ {lambda}: slope {slope}, length {length}");
    }
}

#[test]
fn gain_nonincreasing_and_sign_bracketed() {
    let grid = binary_grid();
    let outcome = dinkelbach_solve(&grid, 1e-6, 1e-9).unwrap();
    let star = outcome.solution.lambda;
    let mut prev = f64::INFINITY;
    for k in 0..=20 {
        let lambda = star * k as f64 / 10.0;
        let gain = rvi_solve(&grid, lambda, 1e-9, 100_000).unwrap().gain;
        assert!(gain <= prev + 1e-7, "λ {lambda}: {gain} > {prev}");
        prev = gain;
    }
    assert!(rvi_solve(&grid, star - 0.5, 1e-9, 100_000).unwrap().gain > 0.0);
    assert!(rvi_solve(&grid, star + 0.5, 1e-9, 100_000).unwrap().gain < 0.0);
    assert!(outcome.solution.gain.abs() <= 1e-4 * star);
}

#[test]
fn multiplier_is_a_fixed_point() {
    let grid = binary_grid();
    let opts = DinkelbachOptions::default();
    let from_zero = dinkelbach_solve_with(&grid, 0.0, &opts).unwrap().solution.lambda;
    let from_above = dinkelbach_solve_with(&grid, 2.0 * from_zero, &opts).unwrap();
    assert!(
        (from_above.solution.lambda - from_zero).abs() <= opts.tol_lambda,
        "{from_zero} vs {} (trace {:?})",
        from_above.solution.lambda,
        from_above.trace
    );
}

#[test]
fn multiplier_matches_simulated_error_rate() {
    // With independent sources the error is the AoI sum, which is exactly
    // what the reduced cost accounts for.
    let delay = DelayDistribution::binary(0.95, 20.0).unwrap();
    let grid = binary_grid();
    let sol = dinkelbach_solve(&grid, 1e-6, 1e-9).unwrap().solution;
    let table = Arc::new(sol.policy_table().unwrap());
    let cfg = EpisodeConfig::new(0.0, 1_000_000);
    let ep = run_episode(
        &cfg,
        &delay,
        &mut SchedulerPolicy::Maf,
        &SamplerPolicy::Tabular(table.clone()),
        &mut replication_stream(5, 0, StreamPurpose::Delay),
        None,
    )
    .unwrap();
    let simulated = ep.metrics.avg_mse_analytic;
    assert!((simulated - sol.lambda).abs() <= 0.01 * sol.lambda, "λ* {} vs simulated {simulated}", sol.lambda);
    assert_eq!(table.clamp_count(), 0);
}

#[test]
fn clamped_transitions_are_counted() {
    let delay = DelayDistribution::new(&[0.0, 2.0], &[0.5, 0.5]).unwrap();
    let wide = MdpGrid::new(vec![0.0, 1.0, 2.0, 3.0], delay.clone(), vec![0.0, 1.0]).unwrap();
    assert_eq!(wide.clamped_transitions(), 0);
    let narrow = MdpGrid::new(vec![0.0, 1.0, 2.0], delay.clone(), vec![0.0, 1.0]).unwrap();
    // Only Y + Z = 3 overshoots the top node.
    assert_eq!(narrow.clamped_transitions(), 1);
    assert_eq!(narrow.next_gamma_index(1, 1), 2);
    assert_eq!(binary_grid().clamped_transitions(), 0);

    let sol = rvi_solve(&narrow, 1.0, 1e-10, 10_000).unwrap();
    let table = sol.policy_table().unwrap();
    tabular_wait(1.0, 2.0, &table);
    assert_eq!(table.clamp_count(), 0);
    tabular_wait(7.0, 2.0, &table);
    tabular_wait(1.0, 9.0, &table);
    assert_eq!(table.clamp_count(), 2);
}

#[test]
fn zero_wait_cost_at_empty_state() {
    let m = DelayDistribution::binary(0.95, 20.0).unwrap().moments();
    let c = cost_mdp3(0.0, 0.0, 0.0, 3.0, m).unwrap();
    assert!((c - (m.sigma_y - 3.0 * m.mu_y)).abs() < 1e-12);
}
