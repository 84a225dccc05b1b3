//! JSON experiment configuration.
//!
//! ```json
//! {
//!   "rho": 0.9,
//!   "delay": {"kind": "binary", "p": 0.95, "y_max": 20},
//!   "scheduler": "maf",
//!   "sampler": {"kind": "wf", "T": "auto"},
//!   "n_epochs": 100000,
//!   "replications": 200,
//!   "dt_empirical": 0.05,
//!   "seed": 1
//! }
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use fusionsim_core::mdp::{DinkelbachOptions, GridOptions, RviOptions};
use fusionsim_core::network::DelayDistribution;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub rho: f64,
    pub delay: DelaySpec,
    pub scheduler: SchedulerKind,
    pub sampler: SamplerSpec,
    pub n_epochs: usize,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_empirical: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fig4: Option<Fig4Sweep>,
}

fn default_replications() -> usize {
    200
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DelaySpec {
    /// 0 with probability `p`, `y_max` otherwise.
    Binary { p: f64, y_max: f64 },
    Discrete { values: Vec<f64>, probs: Vec<f64> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchedulerKind {
    Maf,
    Rand,
}

impl fmt::Display for SchedulerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchedulerKind::Maf => "maf",
            SchedulerKind::Rand => "rand",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SamplerSpec {
    #[serde(rename = "zero-wait")]
    ZeroWait,
    #[serde(rename = "constant")]
    Constant { d: f64 },
    #[serde(rename = "wf")]
    WaterFilling {
        #[serde(rename = "T")]
        threshold: Threshold,
    },
    #[serde(rename = "tabular")]
    Tabular { table_path: PathBuf },
}

impl SamplerSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            SamplerSpec::ZeroWait => "zero-wait",
            SamplerSpec::Constant { .. } => "constant",
            SamplerSpec::WaterFilling { .. } => "wf",
            SamplerSpec::Tabular { .. } => "tabular",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Threshold {
    Value(f64),
    Auto(AutoKeyword),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AutoKeyword {
    #[serde(rename = "auto")]
    Auto,
}

impl Threshold {
    pub const AUTO: Threshold = Threshold::Auto(AutoKeyword::Auto);
}

/// Grid, tolerances and threshold-tuning budget for the optimizers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub grid_step: f64,
    pub headroom: f64,
    pub tol_lambda: f64,
    pub tol_rvi: f64,
    pub rvi_max_iter: usize,
    pub dinkelbach_max_iter: usize,
    pub tune_epochs: usize,
    pub tune_tol: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        let grid = GridOptions::default();
        Self {
            grid_step: grid.step,
            headroom: grid.headroom,
            tol_lambda: 1e-6,
            tol_rvi: 1e-9,
            rvi_max_iter: 100_000,
            dinkelbach_max_iter: 100,
            tune_epochs: 1_000_000,
            tune_tol: 1e-3,
        }
    }
}

impl SolverSettings {
    pub fn grid_options(&self) -> GridOptions {
        GridOptions {
            step: self.grid_step,
            headroom: self.headroom,
        }
    }

    pub fn dinkelbach_options(&self) -> DinkelbachOptions {
        DinkelbachOptions {
            tol_lambda: self.tol_lambda,
            rvi: RviOptions {
                tol: self.tol_rvi,
                max_iter: self.rvi_max_iter,
                ..RviOptions::default()
            },
            max_iter: self.dinkelbach_max_iter,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Ymax,
    P,
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::Ymax => "ymax",
            SweepAxis::P => "p",
        })
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ymax" => Ok(SweepAxis::Ymax),
            "p" => Ok(SweepAxis::P),
            other => Err(format!("unknown axis `{other}` (expected `ymax` or `p`)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig4Sweep {
    pub axis: SweepAxis,
    pub grid: Vec<f64>,
}

impl Fig4Sweep {
    pub fn default_for(axis: SweepAxis) -> Self {
        let grid = match axis {
            SweepAxis::Ymax => vec![5.0, 10.0, 15.0, 20.0, 25.0],
            SweepAxis::P => vec![0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99],
        };
        Self { axis, grid }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Long-horizon convergence run with a tuned water-filling sampler.
    pub fn fig3_default() -> Self {
        Self {
            rho: 0.9,
            delay: DelaySpec::Binary { p: 0.95, y_max: 20.0 },
            scheduler: SchedulerKind::Maf,
            sampler: SamplerSpec::WaterFilling {
                threshold: Threshold::AUTO,
            },
            n_epochs: 100_000,
            replications: 200,
            dt_empirical: None,
            seed: 1,
            solver: SolverSettings::default(),
            fig4: None,
        }
    }

    /// Base point of the benchmark sweeps; the swept parameter is overridden.
    pub fn fig4_default() -> Self {
        Self {
            delay: DelaySpec::Binary { p: 0.95, y_max: 25.0 },
            n_epochs: 20_000,
            fig4: Some(Fig4Sweep::default_for(SweepAxis::Ymax)),
            ..Self::fig3_default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(CliError::config("rho", format!("{} outside [0, 1]", self.rho)));
        }
        match &self.delay {
            DelaySpec::Binary { p, y_max } => {
                if !(0.0..=1.0).contains(p) {
                    return Err(CliError::config("delay.p", format!("{p} outside [0, 1]")));
                }
                if !(*y_max > 0.0 && y_max.is_finite()) {
                    return Err(CliError::config("delay.y_max", format!("{y_max} must be positive")));
                }
            }
            DelaySpec::Discrete { values, probs } => {
                if values.len() != probs.len() {
                    return Err(CliError::config("delay.probs", "length differs from delay.values"));
                }
                DelayDistribution::new(values, probs).map_err(|e| CliError::config("delay", e.to_string()))?;
            }
        }
        match &self.sampler {
            SamplerSpec::Constant { d } if !(*d >= 0.0 && d.is_finite()) => {
                return Err(CliError::config("sampler.d", format!("{d} must be non-negative")));
            }
            SamplerSpec::WaterFilling {
                threshold: Threshold::Value(t),
            } if !(*t >= 0.0 && t.is_finite()) => {
                return Err(CliError::config("sampler.T", format!("{t} must be non-negative")));
            }
            _ => {}
        }
        if self.n_epochs == 0 {
            return Err(CliError::config("n_epochs", "must be at least 1"));
        }
        if self.replications == 0 {
            return Err(CliError::config("replications", "must be at least 1"));
        }
        if let Some(dt) = self.dt_empirical {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(CliError::config("dt_empirical", format!("{dt} must be positive")));
            }
        }
        let s = &self.solver;
        for (name, v) in [
            ("solver.grid_step", s.grid_step),
            ("solver.tol_lambda", s.tol_lambda),
            ("solver.tol_rvi", s.tol_rvi),
            ("solver.tune_tol", s.tune_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::config(name, format!("{v} must be positive")));
            }
        }
        if !(s.headroom >= 0.0 && s.headroom.is_finite()) {
            return Err(CliError::config("solver.headroom", "must be non-negative"));
        }
        if s.rvi_max_iter == 0 {
            return Err(CliError::config("solver.rvi_max_iter", "must be at least 1"));
        }
        if s.dinkelbach_max_iter == 0 {
            return Err(CliError::config("solver.dinkelbach_max_iter", "must be at least 1"));
        }
        if s.tune_epochs == 0 {
            return Err(CliError::config("solver.tune_epochs", "must be at least 1"));
        }
        if let Some(sweep) = &self.fig4 {
            if sweep.grid.is_empty() {
                return Err(CliError::config("fig4.grid", "must not be empty"));
            }
        }
        Ok(())
    }

    pub fn delay_distribution(&self) -> Result<DelayDistribution> {
        let d = match &self.delay {
            DelaySpec::Binary { p, y_max } => DelayDistribution::binary(*p, *y_max),
            DelaySpec::Discrete { values, probs } => DelayDistribution::new(values, probs),
        };
        d.map_err(|e| CliError::config("delay", e.to_string()))
    }
}
