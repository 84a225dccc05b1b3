//! Property suites run by `fusionsim verify`.

use std::fmt;

use fusionsim_core::fusion::{expected_mse, interval_cost, DelayMoments};
use fusionsim_core::mdp::{
    cost_mdp2, cost_mdp3, dinkelbach_solve, equivalence_gap, h_rho, rvi_solve, MdpGrid,
};
use fusionsim_core::network::{integrate_epsilon, run_episode, DelayDistribution, EpisodeConfig, EpochState};
use fusionsim_core::policies::coupling::{interchange_experiment, AgeRole};
use fusionsim_core::policies::{SamplerPolicy, SchedulerPolicy};
use fusionsim_core::RandomStream;

use crate::error::{CliError, Result};
use crate::oracles::{
    empirical_mse, estimator_oracle_max_error, interval_integral_mc, midpoint_integral, small_instances,
};
use crate::output::{format_sig, CsvRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Estimator,
    Costs,
    Coupling,
    Equivalence,
    Mdp,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Estimator, Suite::Costs, Suite::Coupling, Suite::Equivalence, Suite::Mdp];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Estimator => "estimator",
            Suite::Costs => "costs",
            Suite::Coupling => "coupling",
            Suite::Equivalence => "equivalence",
            Suite::Mdp => "mdp",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

/// How a measured value is compared with its bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    AtLeast,
    Below,
    Above,
    Equal,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Below => "<",
            Relation::Above => ">",
            Relation::Equal => "==",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub property: String,
    pub measured: f64,
    pub relation: Relation,
    pub bound: f64,
}

impl Check {
    fn new(suite: Suite, property: impl Into<String>, measured: f64, relation: Relation, bound: f64) -> Self {
        Self {
            suite: suite.name(),
            property: property.into(),
            measured,
            relation,
            bound,
        }
    }

    pub fn passed(&self) -> bool {
        match self.relation {
            Relation::AtMost => self.measured <= self.bound,
            Relation::AtLeast => self.measured >= self.bound,
            Relation::Below => self.measured < self.bound,
            Relation::Above => self.measured > self.bound,
            Relation::Equal => self.measured == self.bound,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}/{}: {} {} {}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.suite,
            self.property,
            format_sig(self.measured),
            self.relation,
            format_sig(self.bound)
        )
    }
}

impl CsvRecord for Check {
    const EXPERIMENT: &'static str = "verify";
    const HEADER: &'static [&'static str] = &["experiment", "suite", "property", "measured", "relation", "bound", "passed"];

    fn fields(&self) -> Vec<String> {
        vec![
            Self::EXPERIMENT.into(),
            self.suite.into(),
            self.property.clone(),
            format_sig(self.measured),
            self.relation.to_string(),
            format_sig(self.bound),
            self.passed().to_string(),
        ]
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<Check>> {
    let mut rng = RandomStream::new(seed, 1000 + suite as u64);
    match suite {
        Suite::Estimator => estimator(&mut rng),
        Suite::Costs => costs(&mut rng),
        Suite::Coupling => coupling(&mut rng),
        Suite::Equivalence => equivalence(seed),
        Suite::Mdp => mdp(),
    }
}

pub fn ensure_passed(checks: &[Check]) -> Result<()> {
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed()).map(|c| c.to_string()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed.join("; ")))
    }
}

fn estimator(rng: &mut RandomStream) -> Result<Vec<Check>> {
    let s = Suite::Estimator;
    let mut out = vec![Check::new(
        s,
        "oracle_max_relative_error",
        estimator_oracle_max_error(1000, rng)?,
        Relation::AtMost,
        1e-9,
    )];

    let (mut above_sum, mut rho1_err) = (0usize, 0.0_f64);
    for i in 1..=40 {
        for j in 1..=40 {
            let (d1, d2, t) = (i as f64 * 0.5, j as f64 * 0.5, 25.0);
            for rho in [0.0, 0.3, 0.9, 1.0] {
                if expected_mse(t, rho, d1, d2)? > d1 + d2 {
                    above_sum += 1;
                }
            }
            if i != j {
                rho1_err = rho1_err.max((expected_mse(t, 1.0, d1, d2)? - 2.0 * d1.min(d2)).abs());
            }
        }
    }
    out.push(Check::new(s, "mse_above_age_sum", above_sum as f64, Relation::Equal, 0.0));
    out.push(Check::new(s, "full_correlation_min_age_error", rho1_err, Relation::AtMost, 1e-9));

    let (t, s1, s2) = (10.0, 6.0, 8.0);
    for rho in [0.0, 0.5, 0.9] {
        let emp = empirical_mse(t, rho, s1, s2, 20_000, rng)?;
        let analytic = expected_mse(t, rho, t - s1, t - s2)?;
        out.push(Check::new(
            s,
            format!("empirical_mse_zscore_rho{rho}"),
            ((emp.mse.mean - analytic) / emp.mse.stderr).abs(),
            Relation::AtMost,
            3.0,
        ));
        let bias = emp.bias.iter().map(|b| (b.mean / b.stderr).abs()).fold(0.0, f64::max);
        out.push(Check::new(s, format!("bias_zscore_rho{rho}"), bias, Relation::AtMost, 4.0));
    }
    Ok(out)
}

fn costs(rng: &mut RandomStream) -> Result<Vec<Check>> {
    let s = Suite::Costs;
    let mut out = Vec::new();

    let mut worst_z = 0.0_f64;
    for _ in 0..50 {
        let (s1, s2, y, z, rho, delay) = random_interval(rng)?;
        let mc = interval_integral_mc(s1, s2, y, z, rho, &delay, 10_000, rng)?;
        let closed = interval_cost(s1, s2, y, z, delay.moments(), rho)?;
        worst_z = worst_z.max((mc.mean - closed).abs() / mc.stderr);
    }
    out.push(Check::new(s, "interval_cost_max_zscore", worst_z, Relation::AtMost, 3.0));

    let mut worst_rel = 0.0_f64;
    for _ in 0..50 {
        let s1 = rng.uniform_in(0.0, 20.0);
        let s2 = rng.uniform_in(0.0, 20.0);
        let rho = rng.uniform();
        let y = rng.uniform_in(0.0, 5.0);
        let len = rng.uniform_in(0.0, 10.0);
        let state = EpochState::from_samples(s1, s2, y);
        let exact = integrate_epsilon(&state, len, rho);
        let quad = midpoint_integral(s1, s2, rho, s1.max(s2) + y, len, 10_000)?;
        worst_rel = worst_rel.max((exact - quad).abs() / quad.abs().max(1e-300));
    }
    out.push(Check::new(s, "epsilon_integral_vs_quadrature", worst_rel, Relation::AtMost, 1e-6));

    let mut min_slope = f64::INFINITY;
    let mut above_gamma = 0usize;
    for rho in [0.3, 0.9, 0.99] {
        for mi in 1..=100 {
            let m = mi as f64;
            let mut prev = h_rho(0.0, m, rho)?;
            for gi in 1..=100 {
                let g = m * gi as f64 / 100.0;
                let h = h_rho(g, m, rho)?;
                min_slope = min_slope.min((h - prev) / (m / 100.0));
                if h > g {
                    above_gamma += 1;
                }
                prev = h;
            }
        }
    }
    out.push(Check::new(s, "h_min_finite_difference_slope", min_slope, Relation::Above, 0.0));
    out.push(Check::new(s, "h_above_gamma", above_gamma as f64, Relation::Equal, 0.0));

    let mut max_diff = 0.0_f64;
    let mom = DelayMoments::new(1.0, 20.0)?;
    for _ in 0..200 {
        let m = rng.uniform_in(0.0, 50.0);
        let g = rng.uniform_in(0.0, m);
        let (y, z, l) = (rng.uniform_in(0.0, 5.0), rng.uniform_in(0.0, 5.0), rng.uniform_in(0.0, 3.0));
        max_diff = max_diff.max((cost_mdp2(g, m, y, z, l, 0.0, mom)? - cost_mdp3(g, y, z, l, mom)?).abs());
    }
    out.push(Check::new(s, "uncorrelated_costs_coincide", max_diff, Relation::Equal, 0.0));
    Ok(out)
}

/// Sample times, delay and wait of a random interval plus a random
/// delay law with 2 or 3 atoms.
pub fn random_interval(rng: &mut RandomStream) -> Result<(f64, f64, f64, f64, f64, DelayDistribution)> {
    let s1 = rng.uniform_in(0.0, 30.0);
    let s2 = rng.uniform_in(0.0, 30.0);
    let y = rng.uniform_in(0.0, 5.0);
    let z = rng.uniform_in(0.0, 5.0);
    let rho = rng.uniform();
    let atoms = 2 + (rng.next_u64() % 2) as usize;
    let values: Vec<f64> = (0..atoms).map(|k| k as f64 * 2.0 + rng.uniform_in(0.0, 2.0)).collect();
    let weights: Vec<f64> = (0..atoms).map(|_| rng.uniform_in(0.1, 1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let head: f64 = probs[..atoms - 1].iter().sum();
    probs[atoms - 1] = 1.0 - head;
    Ok((s1, s2, y, z, rho, DelayDistribution::new(&values, &probs)?))
}

/// Random shared delays, waits and role sequence with at least one
/// fresher-source decision, plus the epoch to flip.
pub fn random_interchange(rng: &mut RandomStream) -> (Vec<f64>, Vec<f64>, Vec<AgeRole>, usize) {
    let n = 2 + (rng.next_u64() % 39) as usize;
    let delays: Vec<f64> = (0..n).map(|_| if rng.bernoulli(0.3) { 0.0 } else { rng.uniform_in(0.0, 10.0) }).collect();
    let waits: Vec<f64> = (0..n).map(|_| if rng.bernoulli(0.5) { 0.0 } else { rng.uniform_in(0.0, 4.0) }).collect();
    let mut roles: Vec<AgeRole> = (0..n)
        .map(|_| if rng.bernoulli(0.5) { AgeRole::MaxAge } else { AgeRole::MinAge })
        .collect();
    let flip = (rng.next_u64() % n as u64) as usize;
    roles[flip] = AgeRole::MinAge;
    (delays, waits, roles, flip)
}

fn coupling(rng: &mut RandomStream) -> Result<Vec<Check>> {
    let s = Suite::Coupling;
    let (mut gamma, mut cost, mut env) = (0usize, 0usize, 0usize);
    for _ in 0..1000 {
        let (delays, waits, roles, flip) = random_interchange(rng);
        let rho = rng.uniform();
        let m = DelayMoments::new(rng.uniform_in(0.0, 3.0), 10.0)?;
        let r = interchange_experiment(&delays, &waits, &roles, flip, rho, m, &[0.0, 1.0, 10.0])?;
        gamma += r.gamma_violations;
        cost += r.cost_violations;
        env += r.envelope_mismatches;
    }
    let mut out = vec![
        Check::new(s, "gap_violations", gamma as f64, Relation::Equal, 0.0),
        Check::new(s, "cost_violations", cost as f64, Relation::Equal, 0.0),
        Check::new(s, "envelope_mismatches", env as f64, Relation::Equal, 0.0),
    ];

    let delay = DelayDistribution::binary(0.8, 6.0)?;
    let mut cfg = EpisodeConfig::new(0.7, 500);
    cfg.keep_trace = true;
    let run = |sampler: SamplerPolicy| {
        let mut rng = RandomStream::new(11, 0);
        run_episode(&cfg, &delay, &mut SchedulerPolicy::Maf, &sampler, &mut rng, None)
    };
    let wf0 = run(SamplerPolicy::water_filling(0.0)?)?;
    let zw = run(SamplerPolicy::ZeroWait)?;
    let differing = wf0.records.iter().zip(&zw.records).filter(|(a, b)| a != b).count();
    out.push(Check::new(s, "wf_zero_threshold_differs_from_zero_wait", differing as f64, Relation::Equal, 0.0));
    Ok(out)
}

fn equivalence(seed: u64) -> Result<Vec<Check>> {
    let s = Suite::Equivalence;
    let delay = DelayDistribution::binary(0.95, 20.0)?;
    let m = delay.moments();
    let trace = |rho: f64, scheduler: SchedulerPolicy, n: usize| {
        let mut cfg = EpisodeConfig::new(rho, n);
        cfg.keep_trace = true;
        let mut rng = RandomStream::new(seed, 0);
        let mut sched = scheduler;
        run_episode(&cfg, &delay, &mut sched, &SamplerPolicy::WaterFilling(4.0), &mut rng, None)
    };
    let mut out = Vec::new();

    let ep = trace(0.0, SchedulerPolicy::Maf, 10_000)?;
    let gaps = equivalence_gap(&ep.records, &ep.states, 0.0, 1.0, m)?;
    let max_abs = gaps.iter().fold(0.0_f64, |a, g| a.max(g.abs()));
    out.push(Check::new(s, "uncorrelated_gap_max", max_abs, Relation::Equal, 0.0));

    let ep = trace(0.9, SchedulerPolicy::Maf, 100_000)?;
    let gaps = equivalence_gap(&ep.records, &ep.states, 0.9, 0.0, m)?;
    let mut min_term = f64::INFINITY;
    for (i, rec) in ep.records.iter().enumerate() {
        let st = &ep.states[i];
        let term = (rec.wait + m.mu_y) * (st.gamma - h_rho(st.gamma, st.m, 0.9)?);
        min_term = min_term.min(term);
    }
    out.push(Check::new(s, "min_per_epoch_gap", min_term, Relation::AtLeast, 0.0));
    out.push(Check::new(
        s,
        "running_mean_ratio_1e5_over_1e3",
        gaps[99_999] / gaps[999],
        Relation::Below,
        1.0,
    ));

    let ep = trace(0.5, SchedulerPolicy::Rand(RandomStream::new(seed, 1)), 1000)?;
    let rejected = equivalence_gap(&ep.records, &ep.states, 0.5, 0.0, m).is_err();
    out.push(Check::new(s, "random_schedule_rejected", rejected as u8 as f64, Relation::Equal, 1.0));
    Ok(out)
}

fn mdp() -> Result<Vec<Check>> {
    let s = Suite::Mdp;
    let mut out = Vec::new();

    let mut worst = 0.0_f64;
    for inst in small_instances() {
        let grid = MdpGrid::new(inst.gammas.clone(), inst.delay.clone(), inst.actions.clone())?;
        let sol = rvi_solve(&grid, inst.lambda, 1e-11, 1_000_000)?;
        worst = worst.max((sol.gain - inst.exhaustive_min_gain()?).abs());
    }
    out.push(Check::new(s, "small_instance_gain_error", worst, Relation::AtMost, 1e-8));

    let delay = DelayDistribution::binary(0.8, 5.0)?;
    let grid = MdpGrid::default_for(&delay, Default::default())?;
    let outcome = dinkelbach_solve(&grid, 1e-6, 1e-10)?;
    let star = outcome.solution.lambda;
    let gain_at = |l: f64| rvi_solve(&grid, l, 1e-10, 1_000_000).map(|s| s.gain);
    out.push(Check::new(s, "gain_below_lambda_star", gain_at(star - 0.5)?, Relation::Above, 0.0));
    out.push(Check::new(s, "gain_above_lambda_star", -gain_at(star + 0.5)?, Relation::Above, 0.0));
    out.push(Check::new(
        s,
        "gain_at_lambda_star_relative",
        outcome.solution.gain.abs() / star,
        Relation::AtMost,
        1e-4,
    ));

    let mut prev = f64::INFINITY;
    let mut increases = 0usize;
    for k in 0..=20 {
        let g = gain_at(star * k as f64 / 10.0)?;
        if g > prev + 1e-9 {
            increases += 1;
        }
        prev = g;
    }
    out.push(Check::new(s, "gain_increases_in_lambda", increases as f64, Relation::Equal, 0.0));

    let opts = fusionsim_core::mdp::DinkelbachOptions {
        tol_lambda: 1e-6,
        rvi: fusionsim_core::mdp::RviOptions {
            tol: 1e-10,
            ..Default::default()
        },
        ..Default::default()
    };
    let from_above = fusionsim_core::mdp::dinkelbach_solve_with(&grid, 2.0 * star, &opts)?;
    out.push(Check::new(
        s,
        "fixed_point_restart_difference",
        (from_above.solution.lambda - star).abs(),
        Relation::AtMost,
        1e-6,
    ));
    Ok(out)
}
