use alloc::vec::Vec;

use crate::error::{domain, Result};
use crate::math;
use crate::network::DelayDistribution;
use crate::policies::nearest_node;

/// Default grid construction: uniform `step` spacing for both Γ and Z, with
/// `Z` up to `2E[Y] + 3·std(Y) + headroom`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridOptions {
    pub step: f64,
    pub headroom: f64,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            step: 0.25,
            headroom: 5.0,
        }
    }
}

/// Finite state/action grid: states `(Γ, Y)` over `gammas × delay support`,
/// actions `Z ∈ actions`. `Γ' = Y + Z` is snapped to the nearest Γ node and
/// clamped to the top node.
#[derive(Clone, Debug, PartialEq)]
pub struct MdpGrid {
    gammas: Vec<f64>,
    delay: DelayDistribution,
    actions: Vec<f64>,
    /// `next_gamma[yi * actions.len() + ai]`
    next_gamma: Vec<usize>,
    clamped_transitions: usize,
}

fn uniform_axis(top: f64, step: f64) -> Vec<f64> {
    let n = math::round(top / step) as usize;
    (0..=n).map(|k| k as f64 * step).collect()
}

impl MdpGrid {
    pub fn new(gammas: Vec<f64>, delay: DelayDistribution, actions: Vec<f64>) -> Result<Self> {
        if gammas.first() != Some(&0.0) {
            return Err(domain!("Γ grid must start at 0"));
        }
        if actions.is_empty() || !(actions[0] >= 0.0) {
            return Err(domain!("action grid must be non-empty and non-negative"));
        }
        let increasing = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]) && v.iter().all(|x| x.is_finite());
        if !increasing(&gammas) || !increasing(&actions) {
            return Err(domain!("grid axes must be strictly increasing and finite"));
        }
        let mut next_gamma = Vec::with_capacity(delay.values().len() * actions.len());
        let mut clamped_transitions = 0;
        for &y in delay.values() {
            for &z in &actions {
                let (gi, outside) = nearest_node(&gammas, y + z);
                clamped_transitions += outside as usize;
                next_gamma.push(gi);
            }
        }
        Ok(Self {
            gammas,
            delay,
            actions,
            next_gamma,
            clamped_transitions,
        })
    }

    pub fn default_for(delay: &DelayDistribution, opts: GridOptions) -> Result<Self> {
        if !(opts.step > 0.0) || !(opts.headroom >= 0.0) {
            return Err(domain!("grid step must be positive and headroom non-negative"));
        }
        let m = delay.moments();
        let z_top = math::ceil((2.0 * m.mu_y + 3.0 * delay.std_dev() + opts.headroom) / opts.step) * opts.step;
        let actions = uniform_axis(z_top, opts.step);
        let gamma_top = math::ceil(delay.max_value() + z_top);
        Self::new(uniform_axis(gamma_top, opts.step), delay.clone(), actions)
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn ys(&self) -> &[f64] {
        self.delay.values()
    }

    pub fn delay(&self) -> &DelayDistribution {
        &self.delay
    }

    pub fn actions(&self) -> &[f64] {
        &self.actions
    }

    pub fn n_states(&self) -> usize {
        self.gammas.len() * self.ys().len()
    }

    pub fn state_index(&self, gi: usize, yi: usize) -> usize {
        gi * self.ys().len() + yi
    }

    pub fn next_gamma_index(&self, yi: usize, ai: usize) -> usize {
        self.next_gamma[yi * self.actions.len() + ai]
    }

    /// Number of `(Y, Z)` pairs whose `Y + Z` lies above the top Γ node.
    pub fn clamped_transitions(&self) -> usize {
        self.clamped_transitions
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_covers_reachable_gaps() {
        let d = DelayDistribution::binary(0.95, 20.0).unwrap();
        let g = MdpGrid::default_for(&d, GridOptions::default()).unwrap();
        assert_eq!(g.gammas()[0], 0.0);
        assert_eq!(g.actions()[0], 0.0);
        assert_eq!(g.clamped_transitions(), 0);
        let zmax = *g.actions().last().unwrap();
        assert!(zmax >= 2.0 + 3.0 * 19f64.sqrt() + 5.0);
        assert!(*g.gammas().last().unwrap() >= 20.0 + zmax);
        // Γ' = y + z lands exactly on a node.
        for (yi, &y) in g.ys().iter().enumerate() {
            for (ai, &z) in g.actions().iter().enumerate() {
                assert_eq!(g.gammas()[g.next_gamma_index(yi, ai)], y + z);
            }
        }
    }

    #[test]
    fn small_grid_clamps() {
        let d = DelayDistribution::new(&[0.0, 2.0], &[0.5, 0.5]).unwrap();
        let g = MdpGrid::new(alloc::vec![0.0, 1.0], d, alloc::vec![0.0, 1.0]).unwrap();
        assert_eq!(g.clamped_transitions(), 2);
        assert_eq!(g.next_gamma_index(1, 1), 1);
    }

    #[test]
    fn grid_validation() {
        let d = DelayDistribution::deterministic(1.0).unwrap();
        assert!(MdpGrid::new(alloc::vec![0.5, 1.0], d.clone(), alloc::vec![0.0]).is_err());
        assert!(MdpGrid::new(alloc::vec![0.0, 1.0], d.clone(), alloc::vec![]).is_err());
        assert!(MdpGrid::new(alloc::vec![0.0, 1.0], d, alloc::vec![1.0, 0.5]).is_err());
    }
}
