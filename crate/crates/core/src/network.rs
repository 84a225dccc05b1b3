//! Epoch-level simulation of the shared non-preemptive channel.
//!
//! Epoch `i` samples source `a_i` at `S_i = D_{i−1} + Z_{i−1}` and delivers
//! at `D_i = S_i + Y_i`. Both sources start with a virtual sample of value 0
//! at time 0, epoch 0 samples at `S_0 = 0`, and an episode of `n` epochs
//! covers `[0, D_{n−1})`.
//!
//! Between deliveries the conditional error `ε(t) = 2t − s₁ − s₂ − R` is
//! affine in `t`, so the analytic MSE and AoI integrals are exact. The
//! optional empirical MSE integrates `‖W_t − Ŵ_t‖²` along a simulated path
//! by the trapezoid rule on a uniform grid joined with all epoch times.

use alloc::vec::Vec;

use crate::error::{contract, domain, Error, Result};
use crate::fusion::{self, DelayMoments, FusionState};
use crate::mdp::{cost_mdp2, cost_mdp3};
use crate::policies::{DecisionContext, Sampler, Scheduler, Source};
use crate::process::PathCursor;
use crate::rng::RandomStream;

/// Finite-support delay distribution with cached moments.
#[derive(Clone, Debug, PartialEq)]
pub struct DelayDistribution {
    values: Vec<f64>,
    probs: Vec<f64>,
    cdf: Vec<f64>,
    moments: DelayMoments,
}

impl DelayDistribution {
    /// Atoms with zero probability are dropped; the rest are sorted by value.
    pub fn new(values: &[f64], probs: &[f64]) -> Result<Self> {
        if values.len() != probs.len() || values.is_empty() {
            return Err(domain!("delay support needs matching, non-empty values and probabilities"));
        }
        let mut atoms: Vec<(f64, f64)> = Vec::with_capacity(values.len());
        for (&y, &p) in values.iter().zip(probs) {
            if !(y >= 0.0) || !y.is_finite() {
                return Err(domain!("delay value {y} must be finite and non-negative"));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(domain!("delay probability {p} outside [0, 1]"));
            }
            if p > 0.0 {
                atoms.push((y, p));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(domain!("delay probabilities sum to {total}, not 1"));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        if atoms.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(domain!("delay values must be distinct"));
        }
        let values: Vec<f64> = atoms.iter().map(|a| a.0).collect();
        let probs: Vec<f64> = atoms.iter().map(|a| a.1).collect();
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        *cdf.last_mut().unwrap() = 1.0;
        let mu: f64 = atoms.iter().map(|(y, p)| p * y).sum();
        let second: f64 = atoms.iter().map(|(y, p)| p * y * y).sum();
        Ok(Self {
            values,
            probs,
            cdf,
            moments: DelayMoments::new(mu, second.max(mu * mu))?,
        })
    }

    /// Zero with probability `p`, `y_max` otherwise.
    pub fn binary(p: f64, y_max: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(domain!("binary delay p = {p} outside [0, 1]"));
        }
        if !(y_max > 0.0) {
            return Err(domain!("binary delay y_max = {y_max} must be positive"));
        }
        Self::new(&[0.0, y_max], &[p, 1.0 - p])
    }

    pub fn deterministic(y: f64) -> Result<Self> {
        Self::new(&[y], &[1.0])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn moments(&self) -> DelayMoments {
        self.moments
    }

    pub fn max_value(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn std_dev(&self) -> f64 {
        crate::math::sqrt(self.moments.variance())
    }

    pub fn sample(&self, rng: &mut RandomStream) -> f64 {
        if self.values.len() == 1 {
            return self.values[0];
        }
        let u = rng.uniform();
        let i = self.cdf.partition_point(|&c| c <= u);
        self.values[i.min(self.values.len() - 1)]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpochRecord {
    pub index: usize,
    pub source: Source,
    pub sample_time: f64,
    /// Wait chosen at this epoch's delivery, `Z_i = S_{i+1} − D_i`.
    pub wait: f64,
    pub delay: f64,
    pub delivery: f64,
    /// Filled in only when the true path is simulated.
    pub sample_value: Option<f64>,
}

/// `(Γ_i, M_i, Y_i)` plus the latest sample times, at delivery `D_i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochState {
    pub gamma: f64,
    pub m: f64,
    pub y: f64,
    pub s1: f64,
    pub s2: f64,
}

impl EpochState {
    pub fn from_samples(s1: f64, s2: f64, y: f64) -> Self {
        Self {
            gamma: (s1 - s2).abs(),
            m: s1.max(s2),
            y,
            s1,
            s2,
        }
    }

    /// Virtual delivery at time 0.
    pub fn initial() -> Self {
        Self::from_samples(0.0, 0.0, 0.0)
    }
}

/// Cumulative integrals at the end of a given epoch count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Checkpoint {
    pub epochs: usize,
    pub horizon: f64,
    pub mse_integral: f64,
    pub aoi_integral: f64,
    pub empirical_integral: Option<f64>,
    /// Running sum of per-epoch `ψ − c` terms.
    pub gap_sum: f64,
}

impl Checkpoint {
    pub fn avg_mse(&self) -> f64 {
        ratio(self.mse_integral, self.horizon)
    }

    pub fn avg_aoi(&self) -> f64 {
        ratio(self.aoi_integral, self.horizon)
    }

    pub fn avg_gap(&self) -> f64 {
        ratio(self.gap_sum, self.epochs as f64)
    }
}

/// No elapsed time means no accumulated error.
fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunMetrics {
    pub horizon: f64,
    pub avg_mse_analytic: f64,
    pub avg_mse_empirical: Option<f64>,
    pub avg_aoi: f64,
    pub epoch_count: usize,
    /// Running mean of the per-epoch `ψ − c` gap at each checkpoint.
    pub equivalence_gap_trace: Vec<f64>,
    pub checkpoints: Vec<Checkpoint>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeConfig {
    pub rho: f64,
    pub n_epochs: usize,
    /// Grid step for the empirical MSE; `None` skips path simulation.
    pub empirical_dt: Option<f64>,
    /// Epoch counts (ascending) at which cumulative integrals are logged.
    pub checkpoints: Vec<usize>,
    pub keep_trace: bool,
}

impl EpisodeConfig {
    pub fn new(rho: f64, n_epochs: usize) -> Self {
        Self {
            rho,
            n_epochs,
            empirical_dt: None,
            checkpoints: Vec::new(),
            keep_trace: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Episode {
    /// Empty unless `keep_trace` was set.
    pub records: Vec<EpochRecord>,
    /// Empty unless `keep_trace` was set.
    pub states: Vec<EpochState>,
    pub metrics: RunMetrics,
}

/// Stream roles for one replication; stream ids never collide across
/// replications of the same seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamPurpose {
    Delay = 0,
    Scheduler = 1,
    Path = 2,
    Tuning = 3,
}

pub fn replication_stream(seed: u64, replication: u64, purpose: StreamPurpose) -> RandomStream {
    RandomStream::new(seed, replication * 4 + purpose as u64)
}

/// Exact `∫ ε(t) dt` over `[D, D + L)` where `D = M + Y` is the delivery
/// time of `state`.
pub fn integrate_epsilon(state: &EpochState, interval_length: f64, rho: f64) -> f64 {
    if interval_length <= 0.0 {
        return 0.0;
    }
    let start_sum = 2.0 * state.y + state.gamma;
    let r = fusion::fusion_gain(state.s1, state.s2, rho);
    interval_length * (start_sum + interval_length - r)
}

/// `(Δ₁(D_i), Δ₂(D_i))` recovered from the epoch history, falling back to
/// the virtual samples at time 0.
pub fn aoi_pair_at_delivery(records: &[EpochRecord], i: usize) -> Result<(f64, f64)> {
    let rec = records.get(i).ok_or_else(|| domain!("epoch {i} outside history of {}", records.len()))?;
    let d = rec.delivery;
    let mut latest = [None::<f64>, None::<f64>];
    for r in records[..=i].iter().rev() {
        if r.delivery <= d {
            let slot = &mut latest[r.source.index() - 1];
            if slot.is_none() {
                *slot = Some(r.sample_time);
            }
        }
        if latest[0].is_some() && latest[1].is_some() {
            break;
        }
    }
    Ok((d - latest[0].unwrap_or(0.0), d - latest[1].unwrap_or(0.0)))
}

struct EmpiricalState<'a> {
    dt: f64,
    cursor: PathCursor,
    rng: &'a mut RandomStream,
    integral: f64,
}

pub fn run_episode<P: Scheduler, S: Sampler>(
    cfg: &EpisodeConfig,
    delay: &DelayDistribution,
    scheduler: &mut P,
    sampler: &S,
    delay_rng: &mut RandomStream,
    path_rng: Option<&mut RandomStream>,
) -> Result<Episode> {
    let rho = cfg.rho;
    if !(0.0..=1.0).contains(&rho) {
        return Err(domain!("rho = {rho} outside [0, 1]"));
    }
    if cfg.n_epochs == 0 {
        return Err(domain!("an episode needs at least one epoch"));
    }
    let mut empirical = match (cfg.empirical_dt, path_rng) {
        (None, _) => None,
        (Some(dt), _) if !(dt > 0.0) => return Err(domain!("empirical grid step {dt} must be positive")),
        (Some(dt), Some(rng)) => Some(EmpiricalState {
            dt,
            cursor: PathCursor::new(rho),
            rng,
            integral: 0.0,
        }),
        (Some(_), None) => return Err(contract!("empirical MSE requested without a path stream")),
    };
    let moments = delay.moments();

    let mut s = [0.0_f64; 2];
    let mut v = [0.0_f64; 2];
    let mut state = EpochState::initial();
    let mut prev_delivery = 0.0_f64;
    let mut wait = 0.0_f64;
    let mut source = scheduler.schedule(&DecisionContext {
        time: 0.0,
        delta1: 0.0,
        delta2: 0.0,
        gamma: 0.0,
        m: 0.0,
        y: 0.0,
    });

    let mut mse_integral = 0.0;
    let mut aoi_integral = 0.0;
    let mut gap_sum = 0.0;
    let mut records = Vec::new();
    let mut states = Vec::new();
    let mut checkpoints = Vec::with_capacity(cfg.checkpoints.len());
    let mut next_checkpoint = cfg.checkpoints.iter().copied().peekable();

    for i in 0..cfg.n_epochs {
        let sample_time = prev_delivery + wait;
        let y = delay.sample(delay_rng);
        let delivery = sample_time + y;
        let length = wait + y;

        // Interval [D_{i−1}, D_i) under the pre-delivery state.
        let age_sum = (prev_delivery - s[0]) + (prev_delivery - s[1]);
        let r = fusion::fusion_gain(s[0], s[1], rho);
        aoi_integral += length * (age_sum + length);
        mse_integral += length * (age_sum + length - r);

        let sample_value = match empirical.as_mut() {
            Some(emp) => Some(integrate_empirical(emp, rho, s, v, prev_delivery, sample_time, delivery, source)?),
            None => None,
        };

        let k = source.index() - 1;
        s[k] = sample_time;
        v[k] = sample_value.unwrap_or(0.0);
        state = EpochState::from_samples(s[0], s[1], y);

        let delta1 = delivery - s[0];
        let delta2 = delivery - s[1];
        check_delivery_identity(i, delta1, delta2, &state, delivery)?;

        let ctx = DecisionContext {
            time: delivery,
            delta1,
            delta2,
            gamma: state.gamma,
            m: state.m,
            y,
        };
        let next_source = scheduler.schedule(&ctx);
        let z = sampler.wait(&ctx);
        if !(z >= 0.0) || !z.is_finite() {
            return Err(contract!("sampler returned wait {z} at epoch {i}"));
        }
        gap_sum += cost_mdp3(state.gamma, y, z, 0.0, moments)? - cost_mdp2(state.gamma, state.m, y, z, 0.0, rho, moments)?;

        if cfg.keep_trace {
            records.push(EpochRecord {
                index: i,
                source,
                sample_time,
                wait: z,
                delay: y,
                delivery,
                sample_value,
            });
            states.push(state);
        }
        while next_checkpoint.peek() == Some(&(i + 1)) {
            next_checkpoint.next();
            checkpoints.push(Checkpoint {
                epochs: i + 1,
                horizon: delivery,
                mse_integral,
                aoi_integral,
                empirical_integral: empirical.as_ref().map(|e| e.integral),
                gap_sum,
            });
        }
        while matches!(next_checkpoint.peek(), Some(&c) if c <= i + 1) {
            next_checkpoint.next();
        }

        prev_delivery = delivery;
        wait = z;
        source = next_source;
    }

    let horizon = prev_delivery;
    let _ = state;
    Ok(Episode {
        records,
        states,
        metrics: RunMetrics {
            horizon,
            avg_mse_analytic: ratio(mse_integral, horizon),
            avg_mse_empirical: empirical.as_ref().map(|e| ratio(e.integral, horizon)),
            avg_aoi: ratio(aoi_integral, horizon),
            epoch_count: cfg.n_epochs,
            equivalence_gap_trace: checkpoints.iter().map(Checkpoint::avg_gap).collect(),
            checkpoints,
        },
    })
}

/// Freshest-delivered-sample identities: `min Δ = Y_i` and
/// `Δ₁ + Δ₂ = 2Y_i + Γ_i`.
fn check_delivery_identity(i: usize, delta1: f64, delta2: f64, state: &EpochState, delivery: f64) -> Result<()> {
    let tol = 1e-9 * delivery.max(1.0);
    let min_ok = (delta1.min(delta2) - state.y).abs() <= tol;
    let sum_ok = (delta1 + delta2 - 2.0 * state.y - state.gamma).abs() <= 2.0 * tol;
    if min_ok && sum_ok {
        Ok(())
    } else {
        Err(Error::Invariant(alloc::format!(
            "delivery identity broken at epoch {i}: ages ({delta1}, {delta2}), state {state:?}"
        )))
    }
}

/// Trapezoid integral of the squared error over `[start, end)` and the
/// sampled value of `source` at `sample_time`.
#[allow(clippy::too_many_arguments)]
fn integrate_empirical(
    emp: &mut EmpiricalState<'_>,
    rho: f64,
    s: [f64; 2],
    v: [f64; 2],
    start: f64,
    sample_time: f64,
    end: f64,
    source: Source,
) -> Result<f64> {
    let sq_err = |t: f64, w: [f64; 2]| -> Result<f64> {
        let est = fusion::mmse_estimate(&FusionState {
            t,
            s1: s[0],
            v1: v[0],
            s2: s[1],
            v2: v[1],
            rho,
        })?;
        Ok((w[0] - est[0]) * (w[0] - est[0]) + (w[1] - est[1]) * (w[1] - est[1]))
    };
    let mut t_prev = start;
    let mut w = emp.cursor.advance_to(start, emp.rng);
    let mut e_prev = sq_err(start, w)?;
    let mut sample_value = (sample_time <= start).then(|| w[source.index() - 1]);
    let mut k = crate::math::ceil(start / emp.dt) as u64;
    while k as f64 * emp.dt <= start {
        k += 1;
    }
    loop {
        let grid_t = k as f64 * emp.dt;
        let fixed = grid_t.min(end);
        let t = match sample_value {
            None if sample_time <= fixed => sample_time,
            _ => fixed,
        };
        if t > t_prev {
            w = emp.cursor.advance_to(t, emp.rng);
            let e = sq_err(t, w)?;
            emp.integral += 0.5 * (e + e_prev) * (t - t_prev);
            e_prev = e;
            t_prev = t;
        }
        if sample_value.is_none() && t == sample_time {
            sample_value = Some(w[source.index() - 1]);
            continue;
        }
        if t >= end {
            break;
        }
        k += 1;
    }
    sample_value.ok_or_else(|| Error::Invariant(alloc::format!("sample at {sample_time} not visited")))
}
