use alloc::vec::Vec;

use super::grid::MdpGrid;
use super::rvi::{evaluate_policy, rvi_solve_with, MdpSolution, RviOptions};
use crate::error::{domain, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DinkelbachOptions {
    /// Stop once `|Θ(λ_k)| ≤ tol_lambda`.
    pub tol_lambda: f64,
    pub rvi: RviOptions,
    pub max_iter: usize,
}

impl Default for DinkelbachOptions {
    fn default() -> Self {
        Self {
            tol_lambda: 1e-6,
            rvi: RviOptions::default(),
            max_iter: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DinkelbachOutcome {
    /// Solution of the last inner problem; its `lambda` is `λ*`.
    pub solution: MdpSolution,
    /// `λ_0, λ_1, …` in visiting order.
    pub trace: Vec<f64>,
}

pub fn dinkelbach_solve(grid: &MdpGrid, tol_lambda: f64, tol_rvi: f64) -> Result<DinkelbachOutcome> {
    let opts = DinkelbachOptions {
        tol_lambda,
        rvi: RviOptions {
            tol: tol_rvi,
            ..RviOptions::default()
        },
        ..DinkelbachOptions::default()
    };
    dinkelbach_solve_with(grid, 0.0, &opts)
}

/// Dinkelbach's parametric iteration for the error-per-time ratio: each
/// inner average-cost problem is solved at `λ_k`, then `λ_{k+1}` is the
/// exact stationary ratio of the resulting policy.
pub fn dinkelbach_solve_with(grid: &MdpGrid, lambda0: f64, opts: &DinkelbachOptions) -> Result<DinkelbachOutcome> {
    if !(opts.tol_lambda > 0.0) {
        return Err(domain!("tol_lambda must be positive"));
    }
    if !lambda0.is_finite() {
        return Err(domain!("initial multiplier must be finite"));
    }
    let mut lambda = lambda0;
    let mut trace = Vec::new();
    for _ in 0..opts.max_iter {
        trace.push(lambda);
        let solution = rvi_solve_with(grid, lambda, &opts.rvi)?;
        if solution.gain.abs() <= opts.tol_lambda {
            return Ok(DinkelbachOutcome { solution, trace });
        }
        let eval = evaluate_policy(grid, &solution.policy)?;
        if !(eval.length > 0.0) {
            return Err(Error::Singularity("policy has zero mean epoch length".into()));
        }
        lambda = eval.ratio();
    }
    Err(Error::Oscillation { trace })
}
