//! Scheduling and sampling policies.
//!
//! Every decision is taken at a delivery instant `D_i` and sees only the
//! [`DecisionContext`] built from samples already delivered.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicU64, Ordering};

use crate::error::{domain, Result};
use crate::rng::RandomStream;

pub mod coupling;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Source {
    One,
    Two,
}

impl Source {
    pub fn index(self) -> usize {
        match self {
            Source::One => 1,
            Source::Two => 2,
        }
    }

    pub fn other(self) -> Source {
        match self {
            Source::One => Source::Two,
            Source::Two => Source::One,
        }
    }

    pub fn from_index(i: usize) -> Option<Source> {
        match i {
            1 => Some(Source::One),
            2 => Some(Source::Two),
            _ => None,
        }
    }
}

/// Causal summary handed to policies at a delivery instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecisionContext {
    /// Delivery time `D_i`.
    pub time: f64,
    pub delta1: f64,
    pub delta2: f64,
    /// Age gap `Γ_i = |s₁ − s₂|`.
    pub gamma: f64,
    /// Envelope `M_i = max(s₁, s₂)`.
    pub m: f64,
    /// Delay of the packet just delivered.
    pub y: f64,
}

pub trait Scheduler {
    fn schedule(&mut self, ctx: &DecisionContext) -> Source;
}

pub trait Sampler {
    /// Waiting time before the next sample is taken.
    fn wait(&self, ctx: &DecisionContext) -> f64;
}

/// Maximum-age-first; ties go to source 1.
pub fn maf_schedule(delta1: f64, delta2: f64) -> Source {
    if delta2 > delta1 {
        Source::Two
    } else {
        Source::One
    }
}

pub fn rand_schedule(rng: &mut RandomStream) -> Source {
    if rng.next_u64() >> 63 == 0 {
        Source::One
    } else {
        Source::Two
    }
}

/// Threshold water-filling wait `max(0, T − (Δ₁ + Δ₂)/2)`.
pub fn wf_wait(delta1: f64, delta2: f64, threshold: f64) -> f64 {
    (threshold - 0.5 * (delta1 + delta2)).max(0.0)
}

pub fn zero_wait() -> f64 {
    0.0
}

pub fn constant_wait(d: f64) -> Result<f64> {
    if !(d >= 0.0) || !d.is_finite() {
        return Err(domain!("constant wait d = {d} must be finite and non-negative"));
    }
    Ok(d)
}

#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug)]
pub enum SchedulerPolicy {
    Maf,
    Rand(RandomStream),
}

impl Scheduler for SchedulerPolicy {
    fn schedule(&mut self, ctx: &DecisionContext) -> Source {
        match self {
            SchedulerPolicy::Maf => maf_schedule(ctx.delta1, ctx.delta2),
            SchedulerPolicy::Rand(rng) => rand_schedule(rng),
        }
    }
}

#[derive(Clone, Debug)]
pub enum SamplerPolicy {
    ZeroWait,
    ConstantWait(f64),
    WaterFilling(f64),
    Tabular(Arc<PolicyTable>),
}

impl SamplerPolicy {
    pub fn constant(d: f64) -> Result<Self> {
        constant_wait(d).map(SamplerPolicy::ConstantWait)
    }

    pub fn water_filling(threshold: f64) -> Result<Self> {
        if !(threshold >= 0.0) || !threshold.is_finite() {
            return Err(domain!("threshold T = {threshold} must be finite and non-negative"));
        }
        Ok(SamplerPolicy::WaterFilling(threshold))
    }
}

impl Sampler for SamplerPolicy {
    fn wait(&self, ctx: &DecisionContext) -> f64 {
        match self {
            SamplerPolicy::ZeroWait => zero_wait(),
            SamplerPolicy::ConstantWait(d) => *d,
            SamplerPolicy::WaterFilling(t) => wf_wait(ctx.delta1, ctx.delta2, *t),
            SamplerPolicy::Tabular(table) => tabular_wait(ctx.gamma, ctx.y, table),
        }
    }
}

/// Stationary waiting policy on a `(Γ, Y)` grid.
///
/// Row-major in Γ: node `(gi, yi)` is at `gi * ys.len() + yi`.
#[derive(Debug)]
pub struct PolicyTable {
    gammas: Vec<f64>,
    ys: Vec<f64>,
    actions: Vec<f64>,
    relative_values: Vec<f64>,
    clamped: AtomicU64,
}

impl Clone for PolicyTable {
    fn clone(&self) -> Self {
        Self {
            gammas: self.gammas.clone(),
            ys: self.ys.clone(),
            actions: self.actions.clone(),
            relative_values: self.relative_values.clone(),
            clamped: AtomicU64::new(self.clamped.load(Ordering::Relaxed)),
        }
    }
}

impl PartialEq for PolicyTable {
    fn eq(&self, other: &Self) -> bool {
        self.gammas == other.gammas
            && self.ys == other.ys
            && self.actions == other.actions
            && self.relative_values == other.relative_values
    }
}

impl PolicyTable {
    pub fn new(gammas: Vec<f64>, ys: Vec<f64>, actions: Vec<f64>, relative_values: Vec<f64>) -> Result<Self> {
        if gammas.is_empty() || ys.is_empty() {
            return Err(domain!("policy table needs at least one Γ node and one delay value"));
        }
        let increasing = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&gammas) || !increasing(&ys) {
            return Err(domain!("policy table axes must be strictly increasing"));
        }
        let n = gammas.len() * ys.len();
        if actions.len() != n || relative_values.len() != n {
            return Err(domain!(
                "policy table has {} actions / {} values for {n} nodes",
                actions.len(),
                relative_values.len()
            ));
        }
        if actions.iter().any(|z| !(*z >= 0.0) || !z.is_finite()) {
            return Err(domain!("policy table contains a negative or non-finite wait"));
        }
        Ok(Self {
            gammas,
            ys,
            actions,
            relative_values,
            clamped: AtomicU64::new(0),
        })
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn actions(&self) -> &[f64] {
        &self.actions
    }

    pub fn relative_values(&self) -> &[f64] {
        &self.relative_values
    }

    /// Number of lookups that fell outside the grid envelope and were clamped.
    pub fn clamp_count(&self) -> u64 {
        self.clamped.load(Ordering::Relaxed)
    }

    pub fn action_at(&self, gi: usize, yi: usize) -> f64 {
        self.actions[gi * self.ys.len() + yi]
    }
}

/// Nearest node of an increasing axis (ties toward the smaller node), and
/// whether `x` lay outside the axis range.
pub(crate) fn nearest_node(axis: &[f64], x: f64) -> (usize, bool) {
    let last = axis.len() - 1;
    let slack = 1e-9 * axis[last].abs().max(1.0);
    if x <= axis[0] {
        return (0, x < axis[0] - slack);
    }
    if x >= axis[last] {
        return (last, x > axis[last] + slack);
    }
    let hi = axis.partition_point(|&a| a < x);
    let lo = hi - 1;
    if x - axis[lo] <= axis[hi] - x {
        (lo, false)
    } else {
        (hi, false)
    }
}

/// Nearest-node lookup of a tabulated policy. States outside the grid are
/// clamped to the boundary and counted.
pub fn tabular_wait(gamma: f64, y: f64, table: &PolicyTable) -> f64 {
    let (gi, g_out) = nearest_node(&table.gammas, gamma);
    let (yi, y_out) = nearest_node(&table.ys, y);
    if g_out || y_out {
        table.clamped.fetch_add(1, Ordering::Relaxed);
    }
    table.action_at(gi, yi)
}
