//! Exact simulation of the correlated bivariate Wiener process
//!
//! `W¹ = B¹`, `W² = ρ B¹ + √(1−ρ²) B²` with `B¹, B²` independent standard
//! Brownian motions. Increments are Gaussian transitions over arbitrary
//! gaps, so paths carry no discretization bias at grid points.

use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::math;
use crate::rng::RandomStream;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProcessParams {
    rho: f64,
}

impl ProcessParams {
    pub fn new(rho: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(domain!("correlation rho = {rho} outside [0, 1]"));
        }
        Ok(Self { rho })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

/// A trajectory observed on a strictly increasing time grid starting at 0.
#[derive(Clone, Debug, PartialEq)]
pub struct ProcessPath {
    times: Vec<f64>,
    values: Vec<[f64; 2]>,
}

impl ProcessPath {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[[f64; 2]] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Stored value at grid time `t`. There is no interpolation: `t` must be
    /// bitwise equal to a grid point.
    pub fn value_at(&self, t: f64) -> Result<[f64; 2]> {
        match self.times.binary_search_by(|probe| probe.total_cmp(&t)) {
            Ok(i) => Ok(self.values[i]),
            Err(_) => Err(Error::Lookup(t)),
        }
    }
}

/// One increment `(δ₁, δ₂)` of the process over a gap of length `dt`.
pub fn sample_increment(params: ProcessParams, dt: f64, rng: &mut RandomStream) -> Result<[f64; 2]> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(domain!("increment length dt = {dt} must be positive"));
    }
    Ok(increment_unchecked(params.rho, dt, rng))
}

#[inline]
pub(crate) fn increment_unchecked(rho: f64, dt: f64, rng: &mut RandomStream) -> [f64; 2] {
    let scale = math::sqrt(dt);
    let g1 = rng.standard_normal();
    let g2 = rng.standard_normal();
    let d1 = scale * g1;
    // Written so that rho = 1 gives d2 == d1 bit for bit.
    let d2 = if rho == 1.0 {
        d1
    } else {
        rho * d1 + math::sqrt(1.0 - rho * rho) * scale * g2
    };
    [d1, d2]
}

pub fn simulate_path(params: ProcessParams, grid: &[f64], rng: &mut RandomStream) -> Result<ProcessPath> {
    if grid.first() != Some(&0.0) {
        return Err(domain!("grid must start at 0"));
    }
    for pair in grid.windows(2) {
        if !(pair[1] > pair[0]) {
            return Err(domain!("grid not strictly increasing at {} -> {}", pair[0], pair[1]));
        }
    }
    let mut values = Vec::with_capacity(grid.len());
    let mut w = [0.0, 0.0];
    values.push(w);
    for pair in grid.windows(2) {
        let d = increment_unchecked(params.rho, pair[1] - pair[0], rng);
        w[0] += d[0];
        w[1] += d[1];
        values.push(w);
    }
    Ok(ProcessPath {
        times: grid.to_vec(),
        values,
    })
}

/// Forward-only path generator used by the episode engine: the path is
/// produced on the fly at whatever times the caller visits.
#[derive(Clone, Debug)]
pub(crate) struct PathCursor {
    rho: f64,
    t: f64,
    w: [f64; 2],
}

impl PathCursor {
    pub(crate) fn new(rho: f64) -> Self {
        Self {
            rho,
            t: 0.0,
            w: [0.0, 0.0],
        }
    }

    /// Advances to `t` (must not be earlier than the current time).
    pub(crate) fn advance_to(&mut self, t: f64, rng: &mut RandomStream) -> [f64; 2] {
        debug_assert!(t >= self.t);
        if t > self.t {
            let d = increment_unchecked(self.rho, t - self.t, rng);
            self.w[0] += d[0];
            self.w[1] += d[1];
            self.t = t;
        }
        self.w
    }
}
