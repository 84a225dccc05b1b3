use alloc::vec;
use alloc::vec::Vec;

use super::cost::cost_mdp3;
use super::grid::MdpGrid;
use crate::error::{domain, Error, Result};
use crate::policies::PolicyTable;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RviOptions {
    /// Stop when the span of `T h − h` drops to this value.
    pub tol: f64,
    pub max_iter: usize,
    /// Weight `τ ∈ (0, 1]` of the aperiodicity transform
    /// `P̃ = τP + (1 − τ)I`; it keeps RVI convergent on periodic policies
    /// without changing gains or optimal actions.
    pub aperiodicity: f64,
}

impl Default for RviOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 100_000,
            aperiodicity: 0.5,
        }
    }
}

/// Output of relative value iteration on a grid, for one multiplier `λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct MdpSolution {
    pub grid: MdpGrid,
    /// Average cost per epoch, `Θ(λ)`.
    pub gain: f64,
    /// Indexed like the grid states, zero at `(0, smallest Y)`.
    pub relative_values: Vec<f64>,
    /// Optimal action index per state.
    pub policy: Vec<usize>,
    pub lambda: f64,
    pub iterations: usize,
    /// Span of the last `T h − h`.
    pub residual: f64,
}

impl MdpSolution {
    pub fn wait(&self, gi: usize, yi: usize) -> f64 {
        self.grid.actions()[self.policy[self.grid.state_index(gi, yi)]]
    }

    pub fn waits(&self) -> Vec<f64> {
        self.policy.iter().map(|&a| self.grid.actions()[a]).collect()
    }

    pub fn policy_table(&self) -> Result<PolicyTable> {
        PolicyTable::new(
            self.grid.gammas().to_vec(),
            self.grid.ys().to_vec(),
            self.waits(),
            self.relative_values.clone(),
        )
    }
}

pub fn rvi_solve(grid: &MdpGrid, lambda: f64, tol: f64, max_iter: usize) -> Result<MdpSolution> {
    rvi_solve_with(
        grid,
        lambda,
        &RviOptions {
            tol,
            max_iter,
            ..RviOptions::default()
        },
    )
}

pub fn rvi_solve_with(grid: &MdpGrid, lambda: f64, opts: &RviOptions) -> Result<MdpSolution> {
    if !(opts.tol > 0.0) {
        return Err(domain!("RVI tolerance must be positive"));
    }
    let tau = opts.aperiodicity;
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(domain!("aperiodicity weight {tau} outside (0, 1]"));
    }
    let moments = grid.delay().moments();
    let probs = grid.delay().probs();
    let (ng, ny, na) = (grid.gammas().len(), grid.ys().len(), grid.actions().len());
    let ns = ng * ny;

    let mut cost = vec![0.0; ns * na];
    for (gi, &g) in grid.gammas().iter().enumerate() {
        for (yi, &y) in grid.ys().iter().enumerate() {
            let s = grid.state_index(gi, yi);
            for (ai, &z) in grid.actions().iter().enumerate() {
                cost[s * na + ai] = cost_mdp3(g, y, z, lambda, moments)?;
            }
        }
    }

    let mut h = vec![0.0; ns];
    let mut th = vec![0.0; ns];
    let mut policy = vec![0usize; ns];
    let mut expected_next = vec![0.0; ng];
    let mut residual = f64::INFINITY;
    let mut gain = 0.0;

    for iter in 1..=opts.max_iter {
        for (gi, e) in expected_next.iter_mut().enumerate() {
            *e = probs.iter().enumerate().map(|(yi, p)| p * h[gi * ny + yi]).sum();
        }
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for gi in 0..ng {
            for yi in 0..ny {
                let s = gi * ny + yi;
                let row = &cost[s * na..(s + 1) * na];
                let mut best = f64::INFINITY;
                let mut best_a = 0;
                for (ai, c) in row.iter().enumerate() {
                    let q = c + expected_next[grid.next_gamma_index(yi, ai)];
                    if q < best {
                        best = q;
                        best_a = ai;
                    }
                }
                policy[s] = best_a;
                th[s] = best;
                let d = best - h[s];
                lo = lo.min(d);
                hi = hi.max(d);
            }
        }
        residual = hi - lo;
        gain = 0.5 * (hi + lo);
        if residual <= opts.tol {
            // h already satisfies the optimality equation to within tol.
            let reference = th[0];
            let relative_values = th.iter().map(|v| v - reference).collect();
            return Ok(MdpSolution {
                grid: grid.clone(),
                gain,
                relative_values,
                policy,
                lambda,
                iterations: iter,
                residual,
            });
        }
        let reference = tau * th[0] + (1.0 - tau) * h[0];
        for (hs, ts) in h.iter_mut().zip(&th) {
            *hs = tau * ts + (1.0 - tau) * *hs - reference;
        }
    }
    let _ = gain;
    Err(Error::IterationLimit {
        iterations: opts.max_iter,
        residual,
    })
}

/// Long-run per-epoch averages of a fixed stationary policy.
#[derive(Clone, Debug, PartialEq)]
pub struct PolicyEvaluation {
    /// Average `ψ₀` (accumulated error per epoch).
    pub numerator: f64,
    /// Average epoch length `E[Y] + Z`.
    pub length: f64,
    pub distribution: Vec<f64>,
    pub iterations: usize,
}

impl PolicyEvaluation {
    pub fn ratio(&self) -> f64 {
        self.numerator / self.length
    }

    /// Average `ψ_λ` per epoch.
    pub fn gain_at(&self, lambda: f64) -> f64 {
        self.numerator - lambda * self.length
    }
}

/// Stationary distribution of the grid chain under `policy` (started from
/// `(0, smallest Y)`, lazy power iteration to 1e-12 in L1) and the two
/// per-epoch averages that form the ratio objective.
pub fn evaluate_policy(grid: &MdpGrid, policy: &[usize]) -> Result<PolicyEvaluation> {
    let (ng, ny, na) = (grid.gammas().len(), grid.ys().len(), grid.actions().len());
    let ns = ng * ny;
    if policy.len() != ns || policy.iter().any(|&a| a >= na) {
        return Err(domain!("policy does not match the grid"));
    }
    let probs = grid.delay().probs();
    let mut dist = vec![0.0; ns];
    dist[0] = 1.0;
    let mut next = vec![0.0; ns];
    const MAX_ITER: usize = 1_000_000;
    let mut iterations = 0;
    loop {
        iterations += 1;
        for (n, d) in next.iter_mut().zip(&dist) {
            *n = 0.5 * d;
        }
        for gi in 0..ng {
            for yi in 0..ny {
                let mass = dist[gi * ny + yi];
                if mass == 0.0 {
                    continue;
                }
                let g_next = grid.next_gamma_index(yi, policy[gi * ny + yi]);
                for (y_next, p) in probs.iter().enumerate() {
                    next[g_next * ny + y_next] += 0.5 * mass * p;
                }
            }
        }
        let change: f64 = next.iter().zip(&dist).map(|(a, b)| (a - b).abs()).sum();
        core::mem::swap(&mut dist, &mut next);
        if change <= 1e-12 {
            break;
        }
        if iterations >= MAX_ITER {
            return Err(Error::IterationLimit {
                iterations,
                residual: change,
            });
        }
    }
    let moments = grid.delay().moments();
    let mut numerator = 0.0;
    let mut length = 0.0;
    for (gi, &g) in grid.gammas().iter().enumerate() {
        for (yi, &y) in grid.ys().iter().enumerate() {
            let s = gi * ny + yi;
            if dist[s] == 0.0 {
                continue;
            }
            let z = grid.actions()[policy[s]];
            numerator += dist[s] * cost_mdp3(g, y, z, 0.0, moments)?;
            length += dist[s] * (moments.mu_y + z);
        }
    }
    Ok(PolicyEvaluation {
        numerator,
        length,
        distribution: dist,
        iterations,
    })
}
