use alloc::vec::Vec;

use super::cost::{cost_mdp2, cost_mdp3};
use crate::error::{contract, domain, Result};
use crate::fusion::DelayMoments;
use crate::network::{EpochRecord, EpochState};

/// Streaming running mean of per-epoch gaps.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GapAccumulator {
    sum: f64,
    count: u64,
}

impl GapAccumulator {
    pub fn push(&mut self, gap: f64) -> f64 {
        self.sum += gap;
        self.count += 1;
        self.mean()
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.sum / self.count as f64
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }
}

/// Running mean, for `n = 1..N`, of `ψ_λ(Γ_i, Y_i, Z_i) − c_λ^ρ(Γ_i, M_i, Y_i, Z_i)`
/// along a maximum-age-first trace. Rejects traces whose age gaps do not
/// follow `Γ_{i+1} = Y_i + Z_i`.
pub fn equivalence_gap(
    records: &[EpochRecord],
    states: &[EpochState],
    rho: f64,
    lambda: f64,
    moments: DelayMoments,
) -> Result<Vec<f64>> {
    if records.len() != states.len() {
        return Err(domain!("{} records but {} states", records.len(), states.len()));
    }
    let mut acc = GapAccumulator::default();
    let mut out = Vec::with_capacity(records.len());
    for (i, (rec, st)) in records.iter().zip(states).enumerate() {
        if let Some(next) = states.get(i + 1) {
            let expected = rec.delay + rec.wait;
            if (next.gamma - expected).abs() > 1e-9 * rec.delivery.max(1.0) {
                return Err(contract!(
                    "epoch {}: age gap {} differs from Y + Z = {expected}; trace is not maximum-age-first",
                    i + 1,
                    next.gamma
                ));
            }
        }
        let gap = cost_mdp3(st.gamma, st.y, rec.wait, lambda, moments)?
            - cost_mdp2(st.gamma, st.m, st.y, rec.wait, lambda, rho, moments)?;
        out.push(acc.push(gap));
    }
    Ok(out)
}
