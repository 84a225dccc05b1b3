//! Remote fusion estimation of a correlated bivariate Wiener process over a
//! shared, non-preemptive random-delay channel.
//!
//! The crate is `no_std` (with `alloc`). It contains the source model, the
//! MMSE fusion estimator and its closed-form error costs, the epoch-level
//! channel simulator, the scheduling/sampling policies, and the average-cost
//! MDP machinery (relative value iteration, Dinkelbach, golden-section
//! threshold tuning). File formats, configuration and the command line live
//! in the `fusionsim` crate.

#![no_std]
#![deny(unsafe_code)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod fusion;
mod math;
pub mod mdp;
pub mod network;
pub mod policies;
pub mod process;
pub mod rng;

pub use error::{Error, Result};
pub use fusion::{DelayMoments, FusionState, FusionWeights};
pub use network::{DelayDistribution, EpochRecord, EpochState, RunMetrics};
pub use policies::{SamplerPolicy, SchedulerPolicy, Source};
pub use process::{ProcessParams, ProcessPath};
pub use rng::RandomStream;
