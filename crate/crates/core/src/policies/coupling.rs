//! Single-interchange coupling behind the optimality of maximum-age-first.
//!
//! Two systems share delays `{Y_k}` and waits `{Z_k}` and take the same
//! age-role decision at every epoch except one, where the reference system
//! serves the fresher source and the perturbed system the staler one. The
//! perturbed system's age gap never exceeds the reference one, so its
//! per-epoch cost is never larger.

use alloc::vec::Vec;

use crate::error::{contract, Result};
use crate::fusion::DelayMoments;
use crate::mdp::cost_mdp2;

/// Which source to serve, stated relative to the current ages.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AgeRole {
    /// The staler source (maximum age); the MAF choice.
    MaxAge,
    /// The fresher source (minimum age).
    MinAge,
}

/// Per-epoch `(Γ_k, M_k)` and one-step costs of a role sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct RoleTrajectory {
    pub gamma: Vec<f64>,
    pub envelope: Vec<f64>,
    /// `costs[k][j]` is the epoch-`k` cost at `lambdas[j]`.
    pub costs: Vec<Vec<f64>>,
}

/// Runs the `(S₁, S₂)` sample-time recursion for a role sequence.
pub fn role_trajectory(
    delays: &[f64],
    waits: &[f64],
    roles: &[AgeRole],
    rho: f64,
    moments: DelayMoments,
    lambdas: &[f64],
) -> Result<RoleTrajectory> {
    let n = delays.len();
    if waits.len() != n || roles.len() != n {
        return Err(contract!("delays, waits and roles must have equal length"));
    }
    let mut s = [0.0_f64, 0.0_f64];
    let mut out = RoleTrajectory {
        gamma: Vec::with_capacity(n),
        envelope: Vec::with_capacity(n),
        costs: Vec::with_capacity(n),
    };
    for k in 0..n {
        let gamma = (s[0] - s[1]).abs();
        let m = s[0].max(s[1]);
        let costs = lambdas
            .iter()
            .map(|&l| cost_mdp2(gamma, m, delays[k], waits[k], l, rho, moments))
            .collect::<Result<Vec<_>>>()?;
        out.gamma.push(gamma);
        out.envelope.push(m);
        out.costs.push(costs);

        // Older sample = larger age; ties go to source 1 for MaxAge.
        let older = if s[1] < s[0] { 1 } else { 0 };
        let served = match roles[k] {
            AgeRole::MaxAge => older,
            AgeRole::MinAge => 1 - older,
        };
        s[served] = m + delays[k] + waits[k];
    }
    Ok(out)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct InterchangeReport {
    pub epochs: usize,
    pub gamma_violations: usize,
    pub cost_violations: usize,
    pub envelope_mismatches: usize,
}

impl InterchangeReport {
    pub fn is_clean(&self) -> bool {
        self.gamma_violations == 0 && self.cost_violations == 0 && self.envelope_mismatches == 0
    }
}

/// Flips the decision at `flip_at` from the fresher to the staler source and
/// counts epochs where the perturbed system is worse than the reference.
pub fn interchange_experiment(
    delays: &[f64],
    waits: &[f64],
    roles: &[AgeRole],
    flip_at: usize,
    rho: f64,
    moments: DelayMoments,
    lambdas: &[f64],
) -> Result<InterchangeReport> {
    if flip_at >= roles.len() || roles[flip_at] != AgeRole::MinAge {
        return Err(contract!("the flipped epoch must serve the fresher source"));
    }
    let mut flipped = roles.to_vec();
    flipped[flip_at] = AgeRole::MaxAge;
    let base = role_trajectory(delays, waits, roles, rho, moments, lambdas)?;
    let alt = role_trajectory(delays, waits, &flipped, rho, moments, lambdas)?;

    let mut report = InterchangeReport {
        epochs: roles.len(),
        ..Default::default()
    };
    for k in 0..roles.len() {
        let tol = 1e-9 * base.envelope[k].max(1.0);
        if alt.gamma[k] > base.gamma[k] + tol {
            report.gamma_violations += 1;
        }
        if (alt.envelope[k] - base.envelope[k]).abs() > tol {
            report.envelope_mismatches += 1;
        }
        for (c_alt, c_base) in alt.costs[k].iter().zip(&base.costs[k]) {
            if *c_alt > *c_base + 1e-9 * c_base.abs().max(1.0) {
                report.cost_violations += 1;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn maf_roles_give_gap_recursion() {
        let m = DelayMoments::new(1.0, 2.0).unwrap();
        let delays = [1.0, 0.5, 2.0, 0.0, 1.5];
        let waits = [0.0, 1.0, 0.25, 3.0, 0.0];
        let roles = [AgeRole::MaxAge; 5];
        let tr = role_trajectory(&delays, &waits, &roles, 0.9, m, &[0.0]).unwrap();
        assert_eq!(tr.gamma[0], 0.0);
        for k in 1..5 {
            assert!((tr.gamma[k] - (delays[k - 1] + waits[k - 1])).abs() < 1e-12);
        }
    }

    #[test]
    fn flip_never_hurts_on_fixed_sequence() {
        let m = DelayMoments::new(1.0, 2.0).unwrap();
        let delays = [1.0, 0.5, 2.0, 0.0, 1.5, 1.0];
        let waits = [0.0, 1.0, 0.25, 3.0, 0.0, 0.5];
        let roles = vec![
            AgeRole::MaxAge,
            AgeRole::MinAge,
            AgeRole::MinAge,
            AgeRole::MaxAge,
            AgeRole::MinAge,
            AgeRole::MaxAge,
        ];
        for flip in [1, 2, 4] {
            let r = interchange_experiment(&delays, &waits, &roles, flip, 0.9, m, &[0.0, 1.0, 10.0]).unwrap();
            assert!(r.is_clean(), "{r:?}");
        }
        assert!(interchange_experiment(&delays, &waits, &roles, 0, 0.9, m, &[0.0]).is_err());
    }
}
