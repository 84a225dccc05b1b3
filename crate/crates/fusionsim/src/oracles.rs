//! Reference computations that reach the same quantities as the core
//! library by a different route: Monte-Carlo over simulated paths and
//! delays, brute-force policy enumeration with dense matrix powers.

#![allow(clippy::needless_range_loop, clippy::too_many_arguments)]

use fusionsim_core::fusion::{expected_mse, gaussian_conditioning_oracle, mmse_estimate};
use fusionsim_core::mdp::cost_mdp3;
use fusionsim_core::network::DelayDistribution;
use fusionsim_core::process::simulate_path;
use fusionsim_core::{FusionState, ProcessParams, RandomStream, Source};

use crate::error::Result;
use crate::experiments::Stat;

/// Random estimator input: `t ≤ 100`, `ρ ∈ [0, 1]`, sample times in
/// `[0, t]` and standard-normal sample values scaled by `√t`.
pub fn random_fusion_state(rng: &mut RandomStream) -> FusionState {
    let t = rng.uniform_in(1e-3, 100.0);
    let rho = rng.uniform();
    let s1 = rng.uniform_in(0.0, t);
    let s2 = rng.uniform_in(0.0, t);
    FusionState {
        t,
        s1,
        v1: rng.standard_normal() * s1.sqrt(),
        s2,
        v2: rng.standard_normal() * s2.sqrt(),
        rho,
    }
}

/// Largest componentwise relative error between the closed-form estimator
/// and the direct Gaussian-conditioning solve over `n` random inputs.
pub fn estimator_oracle_max_error(n: usize, rng: &mut RandomStream) -> Result<f64> {
    let mut worst = 0.0_f64;
    for _ in 0..n {
        let st = random_fusion_state(rng);
        let est = mmse_estimate(&st)?;
        for (k, target) in [Source::One, Source::Two].into_iter().enumerate() {
            let reference = gaussian_conditioning_oracle(st.t, st.rho, st.s1, st.s2, st.v1, st.v2, target)?;
            let err = (est[k] - reference).abs() / reference.abs().max(f64::MIN_POSITIVE);
            worst = worst.max(if est[k] == reference { 0.0 } else { err });
        }
    }
    Ok(worst)
}

/// Squared estimation error at `t` with samples taken at `s1`, `s2`,
/// averaged over simulated paths; also returns the per-component bias.
#[derive(Clone, Copy, Debug)]
pub struct EmpiricalMse {
    pub mse: Stat,
    pub bias: [Stat; 2],
}

pub fn empirical_mse(t: f64, rho: f64, s1: f64, s2: f64, paths: usize, rng: &mut RandomStream) -> Result<EmpiricalMse> {
    let mut grid = vec![0.0, s1, s2, t];
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let params = ProcessParams::new(rho)?;
    let mut sq = Vec::with_capacity(paths);
    let mut e1 = Vec::with_capacity(paths);
    let mut e2 = Vec::with_capacity(paths);
    for _ in 0..paths {
        let path = simulate_path(params, &grid, rng)?;
        let w = path.value_at(t)?;
        let state = FusionState {
            t,
            s1,
            v1: path.value_at(s1)?[0],
            s2,
            v2: path.value_at(s2)?[1],
            rho,
        };
        let est = mmse_estimate(&state)?;
        let (d1, d2) = (w[0] - est[0], w[1] - est[1]);
        sq.push(d1 * d1 + d2 * d2);
        e1.push(d1);
        e2.push(d2);
    }
    Ok(EmpiricalMse {
        mse: Stat::of(&sq),
        bias: [Stat::of(&e1), Stat::of(&e2)],
    })
}

/// Expected error accumulated between the delivery of the freshest sample
/// (delay `y`) and the next delivery after waiting `z`, averaged over `draws`
/// next-delay samples. The error is affine on the interval, so each draw is
/// integrated exactly from its endpoint values.
pub fn interval_integral_mc(
    s1: f64,
    s2: f64,
    y: f64,
    z: f64,
    rho: f64,
    delay: &DelayDistribution,
    draws: usize,
    rng: &mut RandomStream,
) -> Result<Stat> {
    let start = s1.max(s2) + y;
    let err_at = |t: f64| expected_mse(t, rho, t - s1, t - s2);
    let e0 = err_at(start)?;
    let mut samples = Vec::with_capacity(draws);
    for _ in 0..draws {
        let len = z + delay.sample(rng);
        let e1 = err_at(start + len)?;
        samples.push(0.5 * len * (e0 + e1));
    }
    Ok(Stat::of(&samples))
}

/// Midpoint rule for `∫ expected_mse` over `[from, from + len]`.
pub fn midpoint_integral(s1: f64, s2: f64, rho: f64, from: f64, len: f64, points: usize) -> Result<f64> {
    let h = len / points as f64;
    let mut acc = 0.0;
    for k in 0..points {
        let t = from + (k as f64 + 0.5) * h;
        acc += expected_mse(t, rho, t - s1, t - s2)?;
    }
    Ok(acc * h)
}

/// Small average-cost instance: `Γ'` is `Y + Z` moved to the nearest node
/// (ties to the smaller node, clamped at the top).
#[derive(Clone, Debug)]
pub struct SmallInstance {
    pub gammas: Vec<f64>,
    pub delay: DelayDistribution,
    pub actions: Vec<f64>,
    pub lambda: f64,
}

impl SmallInstance {
    fn snap(&self, x: f64) -> usize {
        let mut best = 0;
        for (i, g) in self.gammas.iter().enumerate() {
            if (g - x).abs() < (self.gammas[best] - x).abs() {
                best = i;
            }
        }
        best
    }

    /// Average cost of every stationary deterministic policy started from
    /// `(0, smallest Y)`, minimized. Each policy's limiting distribution is
    /// the first row of a high power of its lazy transition matrix.
    pub fn exhaustive_min_gain(&self) -> Result<f64> {
        let (ng, ny, na) = (self.gammas.len(), self.delay.values().len(), self.actions.len());
        let ns = ng * ny;
        let probs = self.delay.probs();
        let m = self.delay.moments();
        let mut cost = vec![vec![0.0; na]; ns];
        for gi in 0..ng {
            for yi in 0..ny {
                for ai in 0..na {
                    cost[gi * ny + yi][ai] =
                        cost_mdp3(self.gammas[gi], self.delay.values()[yi], self.actions[ai], self.lambda, m)?;
                }
            }
        }
        let total = na.pow(ns as u32);
        let mut best = f64::INFINITY;
        let mut policy = vec![0usize; ns];
        for code in 0..total {
            let mut c = code;
            for a in policy.iter_mut() {
                *a = c % na;
                c /= na;
            }
            let mut p = vec![vec![0.0; ns]; ns];
            for gi in 0..ng {
                for yi in 0..ny {
                    let s = gi * ny + yi;
                    p[s][s] += 0.5;
                    let g_next = self.snap(self.delay.values()[yi] + self.actions[policy[s]]);
                    for (y_next, pr) in probs.iter().enumerate() {
                        p[s][g_next * ny + y_next] += 0.5 * pr;
                    }
                }
            }
            // 2^48 steps; rows are renormalized so round-off cannot compound.
            for _ in 0..48 {
                p = mat_square(&p);
                for row in p.iter_mut() {
                    let total: f64 = row.iter().sum();
                    row.iter_mut().for_each(|x| *x /= total);
                }
            }
            let gain: f64 = (0..ns).map(|s| p[0][s] * cost[s][policy[s]]).sum();
            best = best.min(gain);
        }
        Ok(best)
    }
}

fn mat_square(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * a[k][j];
            }
        }
    }
    out
}

/// Every combination of a few Γ-node sets (up to 3 nodes), delay laws (up
/// to 2 atoms), action sets (up to 3 actions) and multipliers.
pub fn small_instances() -> Vec<SmallInstance> {
    let gamma_sets: [&[f64]; 4] = [&[0.0], &[0.0, 1.0], &[0.0, 1.0, 3.0], &[0.0, 2.0, 2.5]];
    let delays: [(&[f64], &[f64]); 4] = [
        (&[1.0], &[1.0]),
        (&[0.5], &[1.0]),
        (&[0.0, 2.0], &[0.7, 0.3]),
        (&[1.0, 3.0], &[0.5, 0.5]),
    ];
    let action_sets: [&[f64]; 4] = [&[0.0], &[0.0, 1.0], &[0.0, 0.5, 2.0], &[0.0, 1.5, 3.0]];
    let mut out = Vec::new();
    for g in gamma_sets {
        for (v, p) in delays {
            for a in action_sets {
                for lambda in [0.0, 1.5, 4.0] {
                    out.push(SmallInstance {
                        gammas: g.to_vec(),
                        delay: DelayDistribution::new(v, p).expect("valid delay"),
                        actions: a.to_vec(),
                        lambda,
                    });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapping_ties_go_down() {
        let inst = SmallInstance {
            gammas: vec![0.0, 2.0, 2.5],
            delay: DelayDistribution::deterministic(1.0).unwrap(),
            actions: vec![0.0],
            lambda: 0.0,
        };
        assert_eq!(inst.snap(1.0), 0);
        assert_eq!(inst.snap(2.25), 1);
        assert_eq!(inst.snap(9.0), 2);
    }

    #[test]
    fn one_state_instance() {
        // Single node Γ = 0, Y ≡ 1, Z = 0: cost is E[Y²] + (μ)(2·1 + 0 + 0) − λμ.
        let inst = SmallInstance {
            gammas: vec![0.0],
            delay: DelayDistribution::deterministic(1.0).unwrap(),
            actions: vec![0.0],
            lambda: 0.5,
        };
        assert!((inst.exhaustive_min_gain().unwrap() - (1.0 + 2.0 - 0.5)).abs() < 1e-12);
    }
}
