//! Average-cost MDP machinery for the sampling problem.
//!
//! Under maximum-age-first scheduling the per-epoch state reduces to the age
//! gap and the delay of the packet just delivered, `x = (Γ, Y)`, with the
//! waiting time `Z` as action and `Γ' = Y + Z`. The ratio objective (error
//! per unit time) is handled by Dinkelbach's parametric method; each inner
//! problem is solved by relative value iteration on a finite grid.

mod cost;
mod dinkelbach;
mod equivalence;
mod golden;
mod grid;
mod rvi;

pub use cost::{cost_mdp2, cost_mdp3, h_rho};
pub use dinkelbach::{dinkelbach_solve, dinkelbach_solve_with, DinkelbachOptions, DinkelbachOutcome};
pub use equivalence::{equivalence_gap, GapAccumulator};
pub use golden::{
    golden_section_minimize, golden_section_threshold, tune_threshold, wf_renewal_cost, ThresholdTuning,
};
pub use grid::{GridOptions, MdpGrid};
pub use rvi::{evaluate_policy, rvi_solve, rvi_solve_with, MdpSolution, PolicyEvaluation, RviOptions};
