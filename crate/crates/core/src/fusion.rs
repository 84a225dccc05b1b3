//! MMSE fusion estimation and the closed-form error costs built on it.
//!
//! With the latest delivered samples `(s₁, v₁)` and `(s₂, v₂)`, the estimate
//! of the fresher source is its own sample; the staler one is a weighted sum
//! of its own sample and the other source's fresher sample. The expected
//! squared error given the history is affine in `t` between deliveries,
//! which is what makes the per-interval costs below exact.

use crate::error::{contract, domain, Error, Result};
use crate::policies::Source;

/// Receiver's sufficient statistic at time `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FusionState {
    pub t: f64,
    pub s1: f64,
    pub v1: f64,
    pub s2: f64,
    pub v2: f64,
    pub rho: f64,
}

impl FusionState {
    /// Both sources "sampled" at time 0 with value 0.
    pub fn initial(rho: f64) -> Self {
        Self {
            t: 0.0,
            s1: 0.0,
            v1: 0.0,
            s2: 0.0,
            v2: 0.0,
            rho,
        }
    }

    pub fn ages(&self) -> (f64, f64) {
        (self.t - self.s1, self.t - self.s2)
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(domain!("rho = {} outside [0, 1]", self.rho));
        }
        if !(0.0 <= self.s1 && self.s1 <= self.t && 0.0 <= self.s2 && self.s2 <= self.t) {
            return Err(domain!(
                "sample times ({}, {}) must lie in [0, t = {}]",
                self.s1,
                self.s2,
                self.t
            ));
        }
        Ok(())
    }
}

/// Weights `(g, q)` applied to the stale own sample and the fresher sample of
/// the other source.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FusionWeights {
    pub g: f64,
    pub q: f64,
}

/// First and raw second moment of the channel delay: `E[Y]` and `E[Y²]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DelayMoments {
    pub mu_y: f64,
    pub sigma_y: f64,
}

impl DelayMoments {
    pub fn new(mu_y: f64, sigma_y: f64) -> Result<Self> {
        if !(mu_y >= 0.0) || !mu_y.is_finite() {
            return Err(domain!("mean delay {mu_y} must be finite and non-negative"));
        }
        if !(sigma_y >= mu_y * mu_y * (1.0 - 1e-12)) || !sigma_y.is_finite() {
            return Err(domain!("second moment {sigma_y} below squared mean {}", mu_y * mu_y));
        }
        Ok(Self { mu_y, sigma_y })
    }

    pub fn variance(&self) -> f64 {
        (self.sigma_y - self.mu_y * self.mu_y).max(0.0)
    }
}

/// Fusion weights for a source whose AoI `delta_own` exceeds `delta_other`.
pub fn fusion_weights(t: f64, rho: f64, delta_own: f64, delta_other: f64) -> Result<FusionWeights> {
    if !(delta_own > delta_other) {
        return Err(contract!(
            "fusion weights need delta_own > delta_other, got {delta_own} <= {delta_other}"
        ));
    }
    if !(delta_other >= 0.0 && t >= delta_own) {
        return Err(domain!("need 0 <= delta_other < delta_own <= t"));
    }
    let fresh_time = t - delta_other;
    let stale_time = t - delta_own;
    let rho2 = rho * rho;
    let denom = fresh_time - rho2 * stale_time;
    if !(denom > 0.0) {
        return Err(Error::Singularity(alloc::format!(
            "fusion weight denominator {denom} at t = {t}"
        )));
    }
    Ok(FusionWeights {
        g: (1.0 - rho2) * fresh_time / denom,
        q: rho * (delta_own - delta_other) / denom,
    })
}

/// Conditional-mean estimate `(Ŵ¹, Ŵ²)` given the receiver state.
///
/// Ties `Δ₁ = Δ₂` return each source's own latest sample.
pub fn mmse_estimate(state: &FusionState) -> Result<[f64; 2]> {
    state.validate()?;
    let (d1, d2) = state.ages();
    let w1 = if d1 <= d2 {
        state.v1
    } else {
        let w = fusion_weights(state.t, state.rho, d1, d2)?;
        w.g * state.v1 + w.q * state.v2
    };
    let w2 = if d2 <= d1 {
        state.v2
    } else {
        let w = fusion_weights(state.t, state.rho, d2, d1)?;
        w.g * state.v2 + w.q * state.v1
    };
    Ok([w1, w2])
}

/// `E[W_t^{target} | W¹_{t1} = y1, W²_{t2} = y2]` by conditioning the joint
/// Gaussian directly (explicit 2×2 solve, pseudo-solve when rank deficient).
pub fn gaussian_conditioning_oracle(
    t: f64,
    rho: f64,
    t1: f64,
    t2: f64,
    y1: f64,
    y2: f64,
    target: Source,
) -> Result<f64> {
    if !(0.0 <= t1 && t1 <= t && 0.0 <= t2 && t2 <= t) {
        return Err(domain!("observation times ({t1}, {t2}) must lie in [0, {t}]"));
    }
    let t_min = t1.min(t2);
    let cross = rho * t_min;
    let x = solve_symmetric_2x2(t1, cross, t2, [y1, y2])?;
    let cov_target = match target {
        Source::One => [t1, rho * t2],
        Source::Two => [rho * t1, t2],
    };
    Ok(cov_target[0] * x[0] + cov_target[1] * x[1])
}

/// Solves `[[a, b], [b, c]] x = y` for a symmetric positive semidefinite
/// matrix, using the pseudo-inverse when it is singular. An observation
/// outside the matrix range is reported as a singularity.
fn solve_symmetric_2x2(a: f64, b: f64, c: f64, y: [f64; 2]) -> Result<[f64; 2]> {
    let scale = a.abs().max(c.abs());
    let y_norm = y[0].abs().max(y[1].abs());
    if scale == 0.0 {
        if y_norm == 0.0 {
            return Ok([0.0, 0.0]);
        }
        return Err(Error::Singularity(alloc::format!(
            "zero covariance with observation {y:?}"
        )));
    }
    let det = a * c - b * b;
    if det > 1e-13 * scale * scale {
        // Gaussian elimination, pivoting on the larger diagonal entry.
        return Ok(if a >= c {
            let l = b / a;
            let x1 = (y[1] - l * y[0]) / (c - l * b);
            [(y[0] - b * x1) / a, x1]
        } else {
            let l = b / c;
            let x0 = (y[0] - l * y[1]) / (a - l * b);
            [x0, (y[1] - b * x0) / c]
        });
    }
    // Rank one: A = λ e eᵀ with λ = trace.
    let lambda = a + c;
    let (u0, u1) = if a >= c { (a, b) } else { (b, c) };
    let norm = crate::math::sqrt(u0 * u0 + u1 * u1);
    let e = [u0 / norm, u1 / norm];
    let proj = e[0] * y[0] + e[1] * y[1];
    let r0 = y[0] - proj * e[0];
    let r1 = y[1] - proj * e[1];
    if r0.abs().max(r1.abs()) > 1e-9 * y_norm.max(1e-300) {
        return Err(Error::Singularity(alloc::format!(
            "observation {y:?} outside the range of a singular covariance"
        )));
    }
    let coef = proj / lambda;
    Ok([coef * e[0], coef * e[1]])
}

/// Expected squared estimation error `E[‖W_t − Ŵ_t‖² | history]` for ages
/// `delta1`, `delta2` at time `t`.
pub fn expected_mse(t: f64, rho: f64, delta1: f64, delta2: f64) -> Result<f64> {
    if !(0.0 <= delta1 && delta1 <= t && 0.0 <= delta2 && delta2 <= t) {
        return Err(domain!("ages ({delta1}, {delta2}) must lie in [0, t = {t}]"));
    }
    let rho2 = rho * rho;
    let gap = (delta1 - delta2).abs();
    let numer = rho2 * gap * gap;
    if numer == 0.0 {
        return Ok(delta1 + delta2);
    }
    let hi = delta1.max(delta2);
    // (1−ρ²)t + ρ²·max − min, rearranged as a sum of non-negative terms
    let denom = (1.0 - rho2) * (t - hi) + gap;
    if !(denom > 0.0) {
        return Err(Error::Invariant(alloc::format!(
            "non-positive error denominator {denom}"
        )));
    }
    Ok(delta1 + delta2 - numer / denom)
}

/// `q_ρ(x, y) = |x − y| · (1 − ρ²|x − y| / (max(x, y) − ρ² min(x, y)))`,
/// with `q_ρ(x, x) = 0`.
pub fn q_rho(x: f64, y: f64, rho: f64) -> Result<f64> {
    if !(x >= 0.0 && y >= 0.0) {
        return Err(domain!("sample times ({x}, {y}) must be non-negative"));
    }
    let gap = (x - y).abs();
    if gap == 0.0 {
        return Ok(0.0);
    }
    let rho2 = rho * rho;
    let denom = x.max(y) - rho2 * x.min(y);
    Ok(gap * (1.0 - rho2 * gap / denom))
}

/// Constant `ρ²(s₁ − s₂)² / (max − ρ² min)` subtracted from the AoI sum
/// between two deliveries; `Γ − q_ρ(s₁, s₂)`.
pub(crate) fn fusion_gain(s1: f64, s2: f64, rho: f64) -> f64 {
    let gap = (s1 - s2).abs();
    if gap == 0.0 {
        return 0.0;
    }
    let rho2 = rho * rho;
    rho2 * gap * gap / (gap + (1.0 - rho2) * s1.min(s2))
}

/// Expected error accumulated between a delivery and the next one, when the
/// sampler waits `z_i` and the next delay is drawn from the distribution
/// with `moments`. `y_i` is the delay of the packet that opened the interval.
pub fn interval_cost(s1: f64, s2: f64, y_i: f64, z_i: f64, moments: DelayMoments, rho: f64) -> Result<f64> {
    if !(s1 >= 0.0 && s2 >= 0.0 && y_i >= 0.0 && z_i >= 0.0) {
        return Err(domain!("interval cost arguments must be non-negative"));
    }
    let q = q_rho(s1, s2, rho)?;
    let DelayMoments { mu_y, sigma_y } = moments;
    Ok(sigma_y + mu_y * z_i + (z_i + mu_y) * (2.0 * y_i + z_i + q))
}
