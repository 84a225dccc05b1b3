//! Replicated simulation runs, the two benchmark sweeps and the solver
//! driver behind the CLI subcommands.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use fusionsim_core::mdp::{dinkelbach_solve_with, tune_threshold, MdpGrid, MdpSolution, ThresholdTuning};
use fusionsim_core::network::{replication_stream, run_episode, DelayDistribution, EpisodeConfig, RunMetrics, StreamPurpose};
use fusionsim_core::policies::{SamplerPolicy, SchedulerPolicy};
use fusionsim_core::RandomStream;
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::config::{DelaySpec, ExperimentConfig, Fig4Sweep, SamplerSpec, SchedulerKind, SweepAxis, Threshold};
use crate::error::{CliError, Result};
use crate::output::{format_opt, format_sig, CsvRecord};
use crate::table::{read_table, write_table};

pub fn worker_pool(workers: usize) -> Result<ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?)
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Sample mean and standard error of the mean (NaN error for one sample).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub stderr: f64,
}

impl Stat {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let stderr = if xs.len() < 2 {
            f64::NAN
        } else {
            let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        };
        Self { mean, stderr }
    }
}

/// Stream used by golden-section tuning for a run seeded with `seed`.
pub fn tuning_stream(seed: u64) -> RandomStream {
    replication_stream(seed, 0, StreamPurpose::Tuning)
}

pub fn tune_for(cfg: &ExperimentConfig, delay: &DelayDistribution) -> Result<ThresholdTuning> {
    let s = &cfg.solver;
    Ok(tune_threshold(delay, s.grid_options(), s.tune_tol, s.tune_epochs, &tuning_stream(cfg.seed))?)
}

/// Sampler ready to run, with `T = "auto"` resolved by tuning.
#[derive(Clone, Debug)]
pub struct ResolvedSampler {
    pub policy: SamplerPolicy,
    /// `d` or `T`, when the sampler has one.
    pub param: Option<f64>,
}

pub fn resolve_sampler(cfg: &ExperimentConfig, delay: &DelayDistribution) -> Result<ResolvedSampler> {
    Ok(match &cfg.sampler {
        SamplerSpec::ZeroWait => ResolvedSampler {
            policy: SamplerPolicy::ZeroWait,
            param: None,
        },
        SamplerSpec::Constant { d } => ResolvedSampler {
            policy: SamplerPolicy::constant(*d)?,
            param: Some(*d),
        },
        SamplerSpec::WaterFilling { threshold } => {
            let t = match threshold {
                Threshold::Value(t) => *t,
                Threshold::Auto(_) => tune_for(cfg, delay)?.threshold,
            };
            ResolvedSampler {
                policy: SamplerPolicy::water_filling(t)?,
                param: Some(t),
            }
        }
        SamplerSpec::Tabular { table_path } => ResolvedSampler {
            policy: SamplerPolicy::Tabular(Arc::new(read_table(table_path)?)),
            param: None,
        },
    })
}

/// Runs `cfg.replications` independent episodes; results are ordered by
/// replication index whatever the pool size.
pub fn run_replications(
    cfg: &ExperimentConfig,
    delay: &DelayDistribution,
    scheduler: SchedulerKind,
    sampler: &SamplerPolicy,
    checkpoints: &[usize],
    pool: &ThreadPool,
) -> Result<Vec<RunMetrics>> {
    let mut episode = EpisodeConfig::new(cfg.rho, cfg.n_epochs);
    episode.empirical_dt = cfg.dt_empirical;
    episode.checkpoints = checkpoints.to_vec();
    pool.install(|| {
        (0..cfg.replications as u64)
            .into_par_iter()
            .map(|rep| {
                let mut delay_rng = replication_stream(cfg.seed, rep, StreamPurpose::Delay);
                let mut path_rng = replication_stream(cfg.seed, rep, StreamPurpose::Path);
                let mut sched = match scheduler {
                    SchedulerKind::Maf => SchedulerPolicy::Maf,
                    SchedulerKind::Rand => {
                        SchedulerPolicy::Rand(replication_stream(cfg.seed, rep, StreamPurpose::Scheduler))
                    }
                };
                let path = cfg.dt_empirical.map(|_| &mut path_rng);
                run_episode(&episode, delay, &mut sched, sampler, &mut delay_rng, path)
                    .map(|e| e.metrics)
                    .map_err(CliError::from)
            })
            .collect()
    })
}

fn delay_echo(spec: &DelaySpec) -> (&'static str, Option<f64>, Option<f64>) {
    match spec {
        DelaySpec::Binary { p, y_max } => ("binary", Some(*p), Some(*y_max)),
        DelaySpec::Discrete { .. } => ("discrete", None, None),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulateRow {
    pub config: ExperimentConfig,
    pub mu_y: f64,
    pub sigma_y: f64,
    pub sampler_param: Option<f64>,
    pub horizon_time: f64,
    pub avg_mse_analytic: Stat,
    pub avg_mse_empirical: Option<Stat>,
    pub avg_aoi: Stat,
    pub wall_seconds: f64,
}

impl CsvRecord for SimulateRow {
    const EXPERIMENT: &'static str = "simulate";
    const HEADER: &'static [&'static str] = &[
        "experiment",
        "rho",
        "delay_kind",
        "p",
        "y_max",
        "mu_y",
        "sigma_y",
        "scheduler",
        "sampler",
        "sampler_param",
        "n_epochs",
        "replications",
        "dt_empirical",
        "seed",
        "horizon_time",
        "avg_mse_analytic",
        "stderr_mse",
        "avg_mse_empirical",
        "stderr_mse_empirical",
        "avg_aoi",
        "stderr_aoi",
        "wall_seconds",
        "config",
    ];

    fn fields(&self) -> Vec<String> {
        let c = &self.config;
        let (kind, p, y_max) = delay_echo(&c.delay);
        vec![
            Self::EXPERIMENT.into(),
            format_sig(c.rho),
            kind.into(),
            format_opt(p),
            format_opt(y_max),
            format_sig(self.mu_y),
            format_sig(self.sigma_y),
            c.scheduler.to_string(),
            c.sampler.kind().into(),
            format_opt(self.sampler_param),
            c.n_epochs.to_string(),
            c.replications.to_string(),
            format_opt(c.dt_empirical),
            c.seed.to_string(),
            format_sig(self.horizon_time),
            format_sig(self.avg_mse_analytic.mean),
            format_sig(self.avg_mse_analytic.stderr),
            format_opt(self.avg_mse_empirical.map(|s| s.mean)),
            format_opt(self.avg_mse_empirical.map(|s| s.stderr)),
            format_sig(self.avg_aoi.mean),
            format_sig(self.avg_aoi.stderr),
            format!("{:.3}", self.wall_seconds),
            c.to_json(),
        ]
    }
}

/// Replicated run of one configuration. The echoed config has any `"auto"`
/// threshold replaced by the tuned value, so re-running it reproduces the row.
pub fn simulate(cfg: &ExperimentConfig, pool: &ThreadPool) -> Result<SimulateRow> {
    let start = Instant::now();
    let delay = cfg.delay_distribution()?;
    let sampler = resolve_sampler(cfg, &delay)?;
    let runs = run_replications(cfg, &delay, cfg.scheduler, &sampler.policy, &[], pool)?;
    let mut echo = cfg.clone();
    if let (SamplerSpec::WaterFilling { threshold }, Some(t)) = (&mut echo.sampler, sampler.param) {
        *threshold = Threshold::Value(t);
    }
    let col = |f: fn(&RunMetrics) -> f64| runs.iter().map(f).collect::<Vec<_>>();
    let m = delay.moments();
    Ok(SimulateRow {
        config: echo,
        mu_y: m.mu_y,
        sigma_y: m.sigma_y,
        sampler_param: sampler.param,
        horizon_time: Stat::of(&col(|r| r.horizon)).mean,
        avg_mse_analytic: Stat::of(&col(|r| r.avg_mse_analytic)),
        avg_mse_empirical: cfg
            .dt_empirical
            .map(|_| Stat::of(&col(|r| r.avg_mse_empirical.unwrap_or(f64::NAN)))),
        avg_aoi: Stat::of(&col(|r| r.avg_aoi)),
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Epoch counts `1, 2, 5 × 10^k` from 10 up to `n`, always ending at `n`.
pub fn geometric_checkpoints(n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut decade = 10usize;
    'outer: loop {
        for m in [1, 2, 5] {
            let c = decade * m;
            if c >= n {
                break 'outer;
            }
            out.push(c);
        }
        decade *= 10;
    }
    out.push(n);
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fig3Row {
    pub rho: f64,
    pub p: Option<f64>,
    pub y_max: Option<f64>,
    pub threshold: Option<f64>,
    pub replications: usize,
    pub seed: u64,
    pub epochs: usize,
    pub horizon_time: f64,
    pub avg_mse: Stat,
    pub avg_aoi: Stat,
}

impl Fig3Row {
    /// `(AoI − MSE) / AoI`, zero when both vanish.
    pub fn relative_gap(&self) -> f64 {
        if self.avg_aoi.mean == 0.0 {
            0.0
        } else {
            (self.avg_aoi.mean - self.avg_mse.mean) / self.avg_aoi.mean
        }
    }
}

impl CsvRecord for Fig3Row {
    const EXPERIMENT: &'static str = "fig3";
    const HEADER: &'static [&'static str] = &[
        "experiment",
        "rho",
        "p",
        "y_max",
        "threshold",
        "replications",
        "seed",
        "epochs",
        "horizon_time",
        "avg_mse",
        "stderr_mse",
        "avg_aoi",
        "stderr_aoi",
        "relative_gap",
    ];

    fn fields(&self) -> Vec<String> {
        vec![
            Self::EXPERIMENT.into(),
            format_sig(self.rho),
            format_opt(self.p),
            format_opt(self.y_max),
            format_opt(self.threshold),
            self.replications.to_string(),
            self.seed.to_string(),
            self.epochs.to_string(),
            format_sig(self.horizon_time),
            format_sig(self.avg_mse.mean),
            format_sig(self.avg_mse.stderr),
            format_sig(self.avg_aoi.mean),
            format_sig(self.avg_aoi.stderr),
            format_sig(self.relative_gap()),
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fig3Report {
    pub rows: Vec<Fig3Row>,
}

impl Fig3Report {
    /// AoI at least the MSE at every logged horizon.
    pub fn aoi_dominates(&self) -> bool {
        self.rows.iter().all(|r| r.avg_aoi.mean >= r.avg_mse.mean)
    }

    /// The relative gap at the last horizon is below the first (or both are 0).
    pub fn gap_shrinks(&self) -> bool {
        let (first, last) = (self.rows[0].relative_gap(), self.rows[self.rows.len() - 1].relative_gap());
        last < first || (first == 0.0 && last == 0.0)
    }

    /// Relative change of `(mse, aoi)` between the final horizon and the
    /// last checkpoint at or below a tenth of it.
    pub fn last_decade_change(&self) -> (f64, f64) {
        let last = &self.rows[self.rows.len() - 1];
        let base = self
            .rows
            .iter()
            .rev()
            .find(|r| r.epochs * 10 <= last.epochs)
            .unwrap_or(&self.rows[0]);
        let rel = |a: f64, b: f64| if a == 0.0 && b == 0.0 { 0.0 } else { ((a - b) / a).abs() };
        (
            rel(last.avg_mse.mean, base.avg_mse.mean),
            rel(last.avg_aoi.mean, base.avg_aoi.mean),
        )
    }

    pub fn check(&self) -> Result<()> {
        if !self.aoi_dominates() {
            return Err(CliError::Verification("time-average AoI fell below the MSE".into()));
        }
        if !self.gap_shrinks() {
            return Err(CliError::Verification(
                "relative AoI-MSE gap at the final horizon is not below the first".into(),
            ));
        }
        Ok(())
    }
}

/// Convergence of time-average MSE and AoI over geometrically spaced epoch counts.
pub fn fig3(cfg: &ExperimentConfig, pool: &ThreadPool) -> Result<Fig3Report> {
    let delay = cfg.delay_distribution()?;
    let sampler = resolve_sampler(cfg, &delay)?;
    let checkpoints = geometric_checkpoints(cfg.n_epochs);
    let runs = run_replications(cfg, &delay, cfg.scheduler, &sampler.policy, &checkpoints, pool)?;
    let (_, p, y_max) = delay_echo(&cfg.delay);
    let rows = checkpoints
        .iter()
        .enumerate()
        .map(|(k, &epochs)| {
            let pick = |f: fn(&fusionsim_core::network::Checkpoint) -> f64| {
                runs.iter().map(|r| f(&r.checkpoints[k])).collect::<Vec<_>>()
            };
            Fig3Row {
                rho: cfg.rho,
                p,
                y_max,
                threshold: sampler.param,
                replications: cfg.replications,
                seed: cfg.seed,
                epochs,
                horizon_time: Stat::of(&pick(|c| c.horizon)).mean,
                avg_mse: Stat::of(&pick(|c| c.avg_mse())),
                avg_aoi: Stat::of(&pick(|c| c.avg_aoi())),
            }
        })
        .collect();
    Ok(Fig3Report { rows })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fig4Row {
    pub axis: SweepAxis,
    pub axis_value: f64,
    pub p: f64,
    pub y_max: f64,
    pub rho: f64,
    pub scheduler: SchedulerKind,
    pub sampler: &'static str,
    pub sampler_param: Option<f64>,
    pub avg_mse: Stat,
    pub replications: usize,
    pub n_epochs: usize,
    pub seed: u64,
}

impl Fig4Row {
    pub fn combo(&self) -> String {
        format!("{}+{}", self.sampler, self.scheduler)
    }
}

impl CsvRecord for Fig4Row {
    const EXPERIMENT: &'static str = "fig4";
    const HEADER: &'static [&'static str] = &[
        "experiment",
        "axis",
        "axis_value",
        "p",
        "y_max",
        "rho",
        "scheduler",
        "sampler",
        "sampler_param",
        "avg_mse",
        "stderr_mse",
        "replications",
        "n_epochs",
        "seed",
    ];

    fn fields(&self) -> Vec<String> {
        vec![
            Self::EXPERIMENT.into(),
            self.axis.to_string(),
            format_sig(self.axis_value),
            format_sig(self.p),
            format_sig(self.y_max),
            format_sig(self.rho),
            self.scheduler.to_string(),
            self.sampler.into(),
            format_opt(self.sampler_param),
            format_sig(self.avg_mse.mean),
            format_sig(self.avg_mse.stderr),
            self.replications.to_string(),
            self.n_epochs.to_string(),
            self.seed.to_string(),
        ]
    }
}

/// Binary delay at one sweep point; the other parameter comes from `base`.
pub fn sweep_delay(base: &ExperimentConfig, axis: SweepAxis, value: f64) -> Result<(f64, f64)> {
    let (p, y_max) = match base.delay {
        DelaySpec::Binary { p, y_max } => (p, y_max),
        DelaySpec::Discrete { .. } => {
            return Err(CliError::config("delay.kind", "benchmark sweeps need a binary delay"));
        }
    };
    Ok(match axis {
        SweepAxis::Ymax => (p, value),
        SweepAxis::P => (value, y_max),
    })
}

/// Six benchmark combinations at every sweep point. All combinations share
/// each replication's delay stream; the water-filling threshold is tuned per
/// point.
pub fn fig4(cfg: &ExperimentConfig, sweep: &Fig4Sweep, pool: &ThreadPool) -> Result<Vec<Fig4Row>> {
    let mut rows = Vec::new();
    for &value in &sweep.grid {
        let (p, y_max) = sweep_delay(cfg, sweep.axis, value)?;
        let mut point = cfg.clone();
        point.delay = DelaySpec::Binary { p, y_max };
        point.validate().map_err(|e| match e {
            CliError::Config { message, .. } => CliError::config("fig4.grid", message),
            other => other,
        })?;
        let delay = point.delay_distribution()?;
        let threshold = tune_for(&point, &delay)?.threshold;
        let samplers = [
            ("zero-wait", SamplerPolicy::ZeroWait, None),
            ("constant", SamplerPolicy::constant(1.0)?, Some(1.0)),
            ("wf", SamplerPolicy::water_filling(threshold)?, Some(threshold)),
        ];
        for scheduler in [SchedulerKind::Maf, SchedulerKind::Rand] {
            for (name, policy, param) in &samplers {
                let runs = run_replications(&point, &delay, scheduler, policy, &[], pool)?;
                let mse: Vec<f64> = runs.iter().map(|r| r.avg_mse_analytic).collect();
                rows.push(Fig4Row {
                    axis: sweep.axis,
                    axis_value: value,
                    p,
                    y_max,
                    rho: point.rho,
                    scheduler,
                    sampler: name,
                    sampler_param: *param,
                    avg_mse: Stat::of(&mse),
                    replications: point.replications,
                    n_epochs: point.n_epochs,
                    seed: point.seed,
                });
            }
        }
    }
    Ok(rows)
}

/// How WF+MAF compares with the best other combination at one sweep point.
#[derive(Clone, Debug, PartialEq)]
pub struct Fig4Group {
    pub axis_value: f64,
    pub wf_maf: f64,
    pub runner_up: String,
    pub runner_up_mse: f64,
    /// `runner_up_mse − wf_maf` in units of `√(se₁² + se₂²)`.
    pub separation: f64,
}

impl Fig4Group {
    pub fn passes(&self, min_separation: f64) -> bool {
        self.wf_maf < self.runner_up_mse && self.separation > min_separation
    }
}

pub fn fig4_groups(rows: &[Fig4Row]) -> Vec<Fig4Group> {
    let mut values: Vec<f64> = rows.iter().map(|r| r.axis_value).collect();
    values.dedup();
    values
        .into_iter()
        .filter_map(|v| {
            let group: Vec<&Fig4Row> = rows.iter().filter(|r| r.axis_value == v).collect();
            let wf = group
                .iter()
                .find(|r| r.sampler == "wf" && r.scheduler == SchedulerKind::Maf)?;
            let other = group
                .iter()
                .filter(|r| !std::ptr::eq(**r, *wf))
                .min_by(|a, b| a.avg_mse.mean.total_cmp(&b.avg_mse.mean))?;
            let se = (wf.avg_mse.stderr.powi(2) + other.avg_mse.stderr.powi(2)).sqrt();
            Some(Fig4Group {
                axis_value: v,
                wf_maf: wf.avg_mse.mean,
                runner_up: other.combo(),
                runner_up_mse: other.avg_mse.mean,
                separation: (other.avg_mse.mean - wf.avg_mse.mean) / se,
            })
        })
        .collect()
}

/// Least-squares slope of `avg_mse` against the axis value for one combination.
pub fn fig4_slope(rows: &[Fig4Row], sampler: &str, scheduler: SchedulerKind) -> f64 {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.sampler == sampler && r.scheduler == scheduler)
        .map(|r| (r.axis_value, r.avg_mse.mean))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveRow {
    pub config: ExperimentConfig,
    pub mu_y: f64,
    pub sigma_y: f64,
    pub n_gamma: usize,
    pub n_y: usize,
    pub n_actions: usize,
    pub lambda_star: f64,
    pub theta: f64,
    pub dinkelbach_iterations: usize,
    pub rvi_iterations: usize,
    pub residual: f64,
    pub clamped_transitions: usize,
    pub wf_threshold: f64,
    pub wf_cost: f64,
    pub table_path: PathBuf,
    pub wall_seconds: f64,
}

impl SolveRow {
    /// `|λ* − J(T*)| / λ*`.
    pub fn relative_difference(&self) -> f64 {
        (self.lambda_star - self.wf_cost).abs() / self.lambda_star
    }
}

impl CsvRecord for SolveRow {
    const EXPERIMENT: &'static str = "solve";
    const HEADER: &'static [&'static str] = &[
        "experiment",
        "delay_kind",
        "p",
        "y_max",
        "mu_y",
        "sigma_y",
        "grid_step",
        "headroom",
        "n_gamma",
        "n_y",
        "n_actions",
        "lambda_star",
        "theta",
        "tol_lambda",
        "dinkelbach_iterations",
        "rvi_iterations",
        "residual",
        "clamped_transitions",
        "wf_threshold",
        "wf_cost",
        "relative_difference",
        "seed",
        "table_path",
        "wall_seconds",
    ];

    fn fields(&self) -> Vec<String> {
        let c = &self.config;
        let (kind, p, y_max) = delay_echo(&c.delay);
        vec![
            Self::EXPERIMENT.into(),
            kind.into(),
            format_opt(p),
            format_opt(y_max),
            format_sig(self.mu_y),
            format_sig(self.sigma_y),
            format_sig(c.solver.grid_step),
            format_sig(c.solver.headroom),
            self.n_gamma.to_string(),
            self.n_y.to_string(),
            self.n_actions.to_string(),
            format_sig(self.lambda_star),
            format_sig(self.theta),
            format_sig(c.solver.tol_lambda),
            self.dinkelbach_iterations.to_string(),
            self.rvi_iterations.to_string(),
            format_sig(self.residual),
            self.clamped_transitions.to_string(),
            format_sig(self.wf_threshold),
            format_sig(self.wf_cost),
            format_sig(self.relative_difference()),
            c.seed.to_string(),
            self.table_path.display().to_string(),
            format!("{:.3}", self.wall_seconds),
        ]
    }
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub row: SolveRow,
    pub solution: MdpSolution,
    pub tuning: ThresholdTuning,
}

/// Dinkelbach on the default grid plus golden-section threshold tuning;
/// the policy table is written to `table_path`.
pub fn solve(cfg: &ExperimentConfig, table_path: &Path) -> Result<SolveOutcome> {
    let start = Instant::now();
    let delay = cfg.delay_distribution()?;
    let s = &cfg.solver;
    let grid = MdpGrid::default_for(&delay, s.grid_options())?;
    let outcome = dinkelbach_solve_with(&grid, 0.0, &s.dinkelbach_options())?;
    let solution = outcome.solution;
    write_table(table_path, &solution)?;
    let tuning = tune_for(cfg, &delay)?;
    let m = delay.moments();
    let row = SolveRow {
        config: cfg.clone(),
        mu_y: m.mu_y,
        sigma_y: m.sigma_y,
        n_gamma: grid.gammas().len(),
        n_y: grid.ys().len(),
        n_actions: grid.actions().len(),
        lambda_star: solution.lambda,
        theta: solution.gain,
        dinkelbach_iterations: outcome.trace.len(),
        rvi_iterations: solution.iterations,
        residual: solution.residual,
        clamped_transitions: grid.clamped_transitions(),
        wf_threshold: tuning.threshold,
        wf_cost: tuning.cost,
        table_path: table_path.to_path_buf(),
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    Ok(SolveOutcome { row, solution, tuning })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkpoints_are_geometric() {
        assert_eq!(geometric_checkpoints(1000), vec![10, 20, 50, 100, 200, 500, 1000]);
        assert_eq!(geometric_checkpoints(300), vec![10, 20, 50, 100, 200, 300]);
        assert_eq!(geometric_checkpoints(5), vec![5]);
    }

    #[test]
    fn stat_of_samples() {
        let s = Stat::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.stderr - (5.0f64 / 12.0).sqrt()).abs() < 1e-12);
        assert!(Stat::of(&[1.0]).stderr.is_nan());
    }
}
