use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fusionsim::config::{ExperimentConfig, Fig4Sweep, SweepAxis};
use fusionsim::experiments::{self, fig4_groups};
use fusionsim::output::{append_rows, format_sig, CsvRecord};
use fusionsim::verify::{self, Check, Suite};
use fusionsim::{CliError, Result};

#[derive(Parser)]
#[command(name = "fusionsim", version, about = "Sampling, scheduling and fusion estimation for two correlated Wiener sources")]
#[command(after_help = COLUMNS_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

const COLUMNS_HELP: &str = "\
CSV columns (fixed order, floats with 9 significant digits):
  simulate: experiment,rho,delay_kind,p,y_max,mu_y,sigma_y,scheduler,sampler,sampler_param,
            n_epochs,replications,dt_empirical,seed,horizon_time,avg_mse_analytic,stderr_mse,
            avg_mse_empirical,stderr_mse_empirical,avg_aoi,stderr_aoi,wall_seconds,config
  fig3:     experiment,rho,p,y_max,threshold,replications,seed,epochs,horizon_time,avg_mse,
            stderr_mse,avg_aoi,stderr_aoi,relative_gap
  fig4:     experiment,axis,axis_value,p,y_max,rho,scheduler,sampler,sampler_param,avg_mse,
            stderr_mse,replications,n_epochs,seed
  solve:    experiment,delay_kind,p,y_max,mu_y,sigma_y,grid_step,headroom,n_gamma,n_y,n_actions,
            lambda_star,theta,tol_lambda,dinkelbach_iterations,rvi_iterations,residual,
            clamped_transitions,wf_threshold,wf_cost,relative_difference,seed,table_path,wall_seconds
  verify:   experiment,suite,property,measured,relation,bound,passed

Exit status: 0 success, 2 invalid config or input, 3 failed verification,
4 solver did not converge, 1 other errors.";

#[derive(Args)]
struct Common {
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV file to append rows to.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for replications.
    #[arg(long, env = "FUSIONSIM_WORKERS")]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Replicated episodes of one configuration.
    Simulate(Common),
    /// Time-average MSE and AoI at geometrically spaced horizons.
    Fig3(Common),
    /// Six scheduler/sampler combinations across a delay-parameter sweep.
    Fig4 {
        #[command(flatten)]
        common: Common,
        /// `ymax` or `p`.
        #[arg(long)]
        axis: Option<SweepAxis>,
        /// Comma-separated axis values.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
    },
    /// Property suites with measured values and bounds.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Suite to run; repeat for several. All suites when omitted.
        #[arg(long)]
        suite: Vec<Suite>,
    },
    /// Optimal waiting table by Dinkelbach iteration, plus the tuned threshold.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Policy table output; defaults to the CSV path with a `.table.tsv` suffix.
        #[arg(long)]
        table: Option<PathBuf>,
    },
}

/// Reads `--config`, falling back to `default` (or failing without one).
fn load(common: &Common, command: &str, default: Option<fn() -> ExperimentConfig>) -> Result<ExperimentConfig> {
    let mut cfg = match (&common.config, default) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(default)) => default(),
        (None, None) => return Err(CliError::config("config", format!("{command} needs --config"))),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn pool(common: &Common) -> Result<rayon::ThreadPool> {
    experiments::worker_pool(common.workers.unwrap_or_else(experiments::default_workers))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(common) => {
            let cfg = load(&common, "simulate", None)?;
            let row = experiments::simulate(&cfg, &pool(&common)?)?;
            append_rows(&common.out, std::slice::from_ref(&row))?;
            print_row(&row);
        }
        Command::Fig3(common) => {
            let cfg = load(&common, "fig3", Some(ExperimentConfig::fig3_default))?;
            let report = experiments::fig3(&cfg, &pool(&common)?)?;
            append_rows(&common.out, &report.rows)?;
            for row in &report.rows {
                println!(
                    "epochs {:>9}  horizon {:>12}  mse {:>11}  aoi {:>11}  gap {}",
                    row.epochs,
                    format_sig(row.horizon_time),
                    format_sig(row.avg_mse.mean),
                    format_sig(row.avg_aoi.mean),
                    format_sig(row.relative_gap())
                );
            }
            report.check()?;
        }
        Command::Fig4 { common, axis, grid } => {
            let cfg = load(&common, "fig4", Some(ExperimentConfig::fig4_default))?;
            let mut sweep = cfg.fig4.clone().unwrap_or_else(|| Fig4Sweep::default_for(SweepAxis::Ymax));
            if let Some(axis) = axis {
                sweep = Fig4Sweep::default_for(axis);
            }
            if let Some(grid) = grid {
                sweep.grid = grid;
            }
            let rows = experiments::fig4(&cfg, &sweep, &pool(&common)?)?;
            append_rows(&common.out, &rows)?;
            for g in fig4_groups(&rows) {
                println!(
                    "{} = {:>6}  wf+maf {:>11}  next best {} {:>11}  separation {} se",
                    sweep.axis,
                    format_sig(g.axis_value),
                    format_sig(g.wf_maf),
                    g.runner_up,
                    format_sig(g.runner_up_mse),
                    format_sig(g.separation)
                );
            }
        }
        Command::Verify { common, suite } => {
            let cfg = load(&common, "verify", Some(ExperimentConfig::fig3_default))?;
            let suites = if suite.is_empty() { Suite::ALL.to_vec() } else { suite };
            let mut checks: Vec<Check> = Vec::new();
            for s in suites {
                checks.extend(verify::run_suite(s, cfg.seed)?);
            }
            append_rows(&common.out, &checks)?;
            for c in &checks {
                println!("{c}");
            }
            verify::ensure_passed(&checks)?;
        }
        Command::Solve { common, table } => {
            let cfg = load(&common, "solve", None)?;
            let table = table.unwrap_or_else(|| default_table_path(&common.out));
            let outcome = experiments::solve(&cfg, &table)?;
            append_rows(&common.out, std::slice::from_ref(&outcome.row))?;
            print_row(&outcome.row);
        }
    }
    Ok(())
}

fn default_table_path(out: &Path) -> PathBuf {
    out.with_extension("table.tsv")
}

fn print_row<R: CsvRecord>(row: &R) {
    for (k, v) in R::HEADER.iter().zip(row.fields()) {
        if *k != "config" {
            println!("{k:>22}  {v}");
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fusionsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
