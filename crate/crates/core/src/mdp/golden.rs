use alloc::vec::Vec;

use super::cost::cost_mdp3;
use super::grid::GridOptions;
use crate::error::{domain, Error, Result};
use crate::fusion::DelayMoments;
use crate::math::{ceil, sqrt};
use crate::network::DelayDistribution;
use crate::policies::wf_wait;
use crate::rng::RandomStream;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a unimodal `f` on `[low, high]`. Returns the
/// midpoint of the final bracket and `f` there. A minimum pressed against
/// `high` is reported as [`Error::BracketExpansion`].
pub fn golden_section_minimize<F>(mut f: F, low: f64, high: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(low < high) || !low.is_finite() || !high.is_finite() {
        return Err(domain!("bracket [{low}, {high}] is empty or not finite"));
    }
    if !(tol > 0.0) {
        return Err(domain!("golden-section tolerance must be positive"));
    }
    let (mut a, mut b) = (low, high);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    if b == high {
        return Err(Error::BracketExpansion { high });
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

/// Renewal-reward estimate of the error per unit time of water-filling with
/// threshold `T` under maximum-age-first, driven by a fixed delay sequence
/// (`delays[0]` is the first epoch's delay). Starts from `Γ = 0`.
pub fn wf_renewal_cost(delays: &[f64], threshold: f64, moments: DelayMoments) -> Result<f64> {
    if delays.len() < 2 {
        return Err(domain!("need at least two delays"));
    }
    let (mut gamma, mut y) = (0.0, delays[0]);
    let (mut num, mut den) = (0.0, 0.0);
    for &y_next in &delays[1..] {
        // At a delivery the two ages sum to 2Y + Γ.
        let z = wf_wait(y, y + gamma, threshold);
        num += cost_mdp3(gamma, y, z, 0.0, moments)?;
        den += y_next + z;
        gamma = y + z;
        y = y_next;
    }
    if !(den > 0.0) {
        return Err(Error::Singularity("zero elapsed time in renewal run".into()));
    }
    Ok(num / den)
}

fn draw_delays(delay: &DelayDistribution, epochs: usize, rng: &RandomStream) -> Result<Vec<f64>> {
    if epochs == 0 {
        return Err(domain!("evaluator needs at least one epoch"));
    }
    let mut rng = rng.clone();
    Ok((0..=epochs).map(|_| delay.sample(&mut rng)).collect())
}

/// Tunes the water-filling threshold by golden section over `J(T)`, with
/// every probe reusing the same delay sequence drawn from a copy of `rng`.
pub fn golden_section_threshold(
    delay: &DelayDistribution,
    bounds: (f64, f64),
    tol: f64,
    evaluator_epochs: usize,
    rng: &RandomStream,
) -> Result<(f64, f64)> {
    let delays = draw_delays(delay, evaluator_epochs, rng)?;
    let moments = delay.moments();
    golden_section_minimize(|t| wf_renewal_cost(&delays, t, moments), bounds.0, bounds.1, tol)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdTuning {
    pub threshold: f64,
    pub cost: f64,
    /// Upper bracket end that finally contained the minimum.
    pub high: f64,
    pub expansions: u32,
}

/// [`golden_section_threshold`] on `[0, 3(E[Y] + max Z)]`, where `max Z` is
/// the largest action of the default grid, doubling `high` whenever the
/// minimum lands on it.
pub fn tune_threshold(
    delay: &DelayDistribution,
    grid: GridOptions,
    tol: f64,
    evaluator_epochs: usize,
    rng: &RandomStream,
) -> Result<ThresholdTuning> {
    const MAX_EXPANSIONS: u32 = 20;
    let m = delay.moments();
    let z_top = ceil((2.0 * m.mu_y + 3.0 * sqrt(m.variance()) + grid.headroom) / grid.step) * grid.step;
    let mut high = 3.0 * (m.mu_y + z_top);
    let delays = draw_delays(delay, evaluator_epochs, rng)?;
    for expansions in 0..=MAX_EXPANSIONS {
        match golden_section_minimize(|t| wf_renewal_cost(&delays, t, m), 0.0, high, tol) {
            Ok((threshold, cost)) => {
                return Ok(ThresholdTuning {
                    threshold,
                    cost,
                    high,
                    expansions,
                })
            }
            Err(Error::BracketExpansion { .. }) => high *= 2.0,
            Err(e) => return Err(e),
        }
    }
    Err(Error::BracketExpansion { high })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_minimizer() {
        let (x, fx) = golden_section_minimize(|x| Ok((x - 1.7) * (x - 1.7) + 3.0), 0.0, 10.0, 1e-6).unwrap();
        assert!((x - 1.7).abs() < 1e-6);
        assert!((fx - 3.0).abs() < 1e-12);
    }

    #[test]
    fn decreasing_function_asks_for_more_room() {
        match golden_section_minimize(|x| Ok(-x), 0.0, 4.0, 1e-6) {
            Err(Error::BracketExpansion { high }) => assert_eq!(high, 4.0),
            other => panic!("{other:?}"),
        }
        assert!(golden_section_minimize(Ok, 1.0, 1.0, 1e-6).is_err());
    }

    #[test]
    fn deterministic_delay_renewal_cost() {
        // Y ≡ 1, T large enough to wait: fixed point z = (2T − 3)/3 and
        // J = (E[Y²] + z + (z + 1)(2z + 3)) / (1 + z) once the transient
        // from Γ = 0 is washed out.
        let d = DelayDistribution::deterministic(1.0).unwrap();
        let delays = alloc::vec![1.0; 100_001];
        let t = 4.5;
        let z = (2.0 * t - 3.0) / 3.0;
        let j = wf_renewal_cost(&delays, t, d.moments()).unwrap();
        let expected = (1.0 + z + (z + 1.0) * (2.0 * z + 3.0)) / (1.0 + z);
        assert!((j - expected).abs() < 1e-3, "{j} vs {expected}");
    }

    #[test]
    fn waiting_beats_zero_wait_under_heavy_tail() {
        let d = DelayDistribution::binary(0.95, 20.0).unwrap();
        let rng = RandomStream::new(7, 0);
        let tuned = tune_threshold(&d, GridOptions::default(), 1e-3, 20_000, &rng).unwrap();
        let delays = draw_delays(&d, 20_000, &rng).unwrap();
        let j0 = wf_renewal_cost(&delays, 0.0, d.moments()).unwrap();
        assert!(tuned.threshold > 0.0);
        assert!(tuned.cost < j0, "{} vs {j0}", tuned.cost);
    }
}
