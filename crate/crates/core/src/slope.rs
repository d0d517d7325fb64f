//! Noisy slope identification.
//!
//! An agent must identify `a` in `y = a x + N(0, sigma^2)` with `a` in
//! `[-2, 2]`, querying `x` in `[-3, 3]`. The agent keeps an exact posterior
//! over a 401-point slope grid, queries the point of largest estimated gain
//! per unit cost, and stops once the central 95% credible interval is no wider
//! than the success resolution. [`run_noise_sweep`] compares its step counts
//! with the a-priori prediction from [`crate::gp::a_priori_estimate`].

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{AcpError, Result};
use crate::gp::{self, a_priori_estimate, gaussian_channel_gain, linspace, EstimationTask};
use crate::info::{entropy_of, select_action, ActionCandidate, Bits};
use crate::report::{fmt_real, CsvRecord};
use crate::seed::{derive_seed, rng_from_seed, streams};
use crate::stats::MeanSe;

pub const SLOPE_RANGE: (f64, f64) = (-2.0, 2.0);
pub const QUERY_RANGE: (f64, f64) = (-3.0, 3.0);
pub const DEFAULT_RESOLUTION: f64 = 0.1;
pub const DEFAULT_STEP_CAP: usize = 200;
pub const DEFAULT_NOISE_LEVELS: [f64; 4] = [0.1, 0.3, 1.0, 3.0];

/// One slope-identification problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeTask {
    true_slope: f64,
    noise_sigma: f64,
    success_resolution: f64,
}

impl SlopeTask {
    /// `noise_sigma = 0` is accepted and means noise-free observations.
    pub fn new(true_slope: f64, noise_sigma: f64, success_resolution: f64) -> Result<Self> {
        if !(SLOPE_RANGE.0..=SLOPE_RANGE.1).contains(&true_slope) {
            return Err(AcpError::domain(format!(
                "slope must lie in [-2, 2], got {true_slope}"
            )));
        }
        if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
            return Err(AcpError::domain("noise sigma must be non-negative"));
        }
        if !(success_resolution > 0.0) {
            return Err(AcpError::domain("success resolution must be positive"));
        }
        Ok(SlopeTask {
            true_slope,
            noise_sigma,
            success_resolution,
        })
    }

    pub fn true_slope(&self) -> f64 {
        self.true_slope
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }
}

/// Agent discretization and stopping parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentConfig {
    pub slope_points: usize,
    pub query_points: usize,
    pub step_cap: usize,
    /// Mass of the central credible interval used by the stopping rule.
    pub credible_mass: f64,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            slope_points: gp::DEFAULT_THETA_POINTS,
            query_points: gp::DEFAULT_ACTION_POINTS,
            step_cap: DEFAULT_STEP_CAP,
            credible_mass: 0.95,
        }
    }
}

/// Record of one agent run.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentTrace {
    pub queries: Vec<(f64, f64)>,
    pub steps: usize,
    /// Posterior mean of the slope when the agent stopped.
    pub final_estimate: f64,
    /// Posterior entropy after each query.
    pub posterior_entropy_trace: Vec<Bits>,
    /// False when the step cap was reached before the stopping rule fired.
    pub completed: bool,
}

/// Grid posterior over the slope.
struct SlopePosterior {
    slopes: Vec<f64>,
    probs: Vec<f64>,
    scratch: Vec<f64>,
}

impl SlopePosterior {
    fn uniform(slopes: Vec<f64>) -> Self {
        let n = slopes.len();
        SlopePosterior {
            slopes,
            probs: vec![1.0 / n as f64; n],
            scratch: vec![0.0; n],
        }
    }

    fn mean(&self) -> f64 {
        self.slopes
            .iter()
            .zip(&self.probs)
            .map(|(a, p)| a * p)
            .sum()
    }

    fn variance(&self) -> f64 {
        let m = self.mean();
        self.slopes
            .iter()
            .zip(&self.probs)
            .map(|(a, p)| p * (a - m).powi(2))
            .sum()
    }

    fn entropy(&self) -> Bits {
        entropy_of(&self.probs)
    }

    fn observe(&mut self, x: f64, y: f64, sigma: f64) {
        if sigma == 0.0 {
            // Noise-free: keep only the grid slopes closest to y / x.
            if x == 0.0 {
                return;
            }
            let dist: Vec<f64> = self.slopes.iter().map(|a| (y - a * x).abs()).collect();
            let best = self
                .probs
                .iter()
                .zip(&dist)
                .filter(|(p, _)| **p > 0.0)
                .map(|(_, d)| *d)
                .fold(f64::INFINITY, f64::min);
            for (p, d) in self.probs.iter_mut().zip(&dist) {
                if *d > best + 1e-12 {
                    *p = 0.0;
                }
            }
            let total: f64 = self.probs.iter().sum();
            self.probs.iter_mut().for_each(|p| *p /= total);
            return;
        }
        let inv_two_var = 0.5 / (sigma * sigma);
        for ((w, p), a) in self.scratch.iter_mut().zip(&self.probs).zip(&self.slopes) {
            *w = p.ln() - (y - a * x).powi(2) * inv_two_var;
        }
        gp::normalize_log_weights(&mut self.scratch);
        std::mem::swap(&mut self.probs, &mut self.scratch);
    }

    /// Width of the central credible interval holding `mass`.
    fn credible_width(&self, mass: f64) -> f64 {
        let tail = 0.5 * (1.0 - mass);
        let mut cdf = 0.0;
        let mut lower = None;
        let mut upper = self.slopes[self.slopes.len() - 1];
        for (a, p) in self.slopes.iter().zip(&self.probs) {
            cdf += p;
            if lower.is_none() && cdf >= tail - 1e-12 {
                lower = Some(*a);
            }
            if cdf >= 1.0 - tail - 1e-12 {
                upper = *a;
                break;
            }
        }
        upper - lower.unwrap_or(self.slopes[0])
    }
}

/// Runs the Bayesian grid agent on `task`. Deterministic given `seed`.
pub fn run_slope_agent(task: &SlopeTask, config: &AgentConfig, seed: u64) -> Result<AgentTrace> {
    if config.step_cap == 0 || !(config.credible_mass > 0.0 && config.credible_mass < 1.0) {
        return Err(AcpError::domain(
            "step cap must be positive and credible mass in (0, 1)",
        ));
    }
    let queries = linspace(QUERY_RANGE.0, QUERY_RANGE.1, config.query_points)?;
    let mut posterior =
        SlopePosterior::uniform(linspace(SLOPE_RANGE.0, SLOPE_RANGE.1, config.slope_points)?);
    let mut rng = rng_from_seed(seed);
    let sigma = task.noise_sigma;
    let noise_variance = sigma * sigma;

    let mut trace = AgentTrace {
        queries: Vec::new(),
        steps: 0,
        final_estimate: posterior.mean(),
        posterior_entropy_trace: Vec::new(),
        completed: false,
    };
    while trace.steps < config.step_cap {
        // Estimated gain of each query: Gaussian channel gain of the slope
        // posterior seen through x. Unit costs, so the rate is the gain.
        let slope_var = posterior.variance();
        let candidates: Vec<ActionCandidate> = queries
            .iter()
            .map(|&x| {
                ActionCandidate::new(
                    gaussian_channel_gain(x * x * slope_var, noise_variance),
                    1.0,
                )
            })
            .collect();
        let x = queries[select_action(&candidates)?];
        let noise: f64 = rng.sample(StandardNormal);
        let y = task.true_slope * x + sigma * noise;
        posterior.observe(x, y, sigma);

        trace.queries.push((x, y));
        trace.steps += 1;
        trace.posterior_entropy_trace.push(posterior.entropy());
        if posterior.credible_width(config.credible_mass) <= task.success_resolution + 1e-12 {
            trace.completed = true;
            break;
        }
    }
    trace.final_estimate = posterior.mean();
    Ok(trace)
}

/// One agent run within a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeTrialRow {
    pub sigma: f64,
    pub trial: usize,
    pub steps_actual: usize,
    pub completed: bool,
    pub final_error: f64,
}

impl CsvRecord for SlopeTrialRow {
    fn header() -> &'static [&'static str] {
        &["sigma", "trial", "steps_actual", "completed", "final_error"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            fmt_real(self.sigma),
            self.trial.to_string(),
            self.steps_actual.to_string(),
            self.completed.to_string(),
            fmt_real(self.final_error),
        ]
    }
}

/// Predicted versus observed steps at one noise level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub sigma: f64,
    pub steps_predicted: u64,
    pub steps_actual_mean: f64,
    pub steps_actual_se: f64,
    /// `steps_actual_mean - steps_predicted`.
    pub gap: f64,
}

impl CsvRecord for SweepRow {
    fn header() -> &'static [&'static str] {
        &[
            "sigma",
            "steps_predicted",
            "steps_actual_mean",
            "steps_actual_se",
            "gap",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            fmt_real(self.sigma),
            self.steps_predicted.to_string(),
            fmt_real(self.steps_actual_mean),
            fmt_real(self.steps_actual_se),
            fmt_real(self.gap),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub summary: Vec<SweepRow>,
    pub trials: Vec<SlopeTrialRow>,
}

/// Sweep parameters besides the noise levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub trials_per_level: usize,
    pub success_resolution: f64,
    pub agent: AgentConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            trials_per_level: 50,
            success_resolution: DEFAULT_RESOLUTION,
            agent: AgentConfig::default(),
        }
    }
}

/// For each noise level: the a-priori predicted step count and the observed
/// steps of `trials_per_level` agent runs with slopes drawn uniformly from
/// `[-2, 2]`. Trial `t` of level `l` is seeded by
/// `derive_seed(seed, SLOPE_TRIAL, (l << 32) | t)`.
pub fn run_noise_sweep(
    noise_levels: &[f64],
    config: &SweepConfig,
    seed: u64,
) -> Result<SweepReport> {
    if noise_levels.len() < 2 {
        return Err(AcpError::domain("a sweep needs at least two noise levels"));
    }
    if noise_levels.iter().any(|s| !(*s > 0.0)) {
        return Err(AcpError::domain("noise levels must be positive"));
    }
    if config.trials_per_level < 20 {
        return Err(AcpError::domain(
            "a sweep needs at least 20 trials per level",
        ));
    }
    let jobs: Vec<(usize, usize)> = (0..noise_levels.len())
        .flat_map(|l| (0..config.trials_per_level).map(move |t| (l, t)))
        .collect();
    let trials: Vec<SlopeTrialRow> = jobs
        .par_iter()
        .map(|&(l, t)| {
            let sigma = noise_levels[l];
            let trial_seed = derive_seed(seed, streams::SLOPE_TRIAL, ((l as u64) << 32) | t as u64);
            let slope = rng_from_seed(trial_seed).random_range(SLOPE_RANGE.0..=SLOPE_RANGE.1);
            let task = SlopeTask::new(slope, sigma, config.success_resolution)?;
            let trace = run_slope_agent(&task, &config.agent, derive_seed(trial_seed, 0, 0))?;
            Ok(SlopeTrialRow {
                sigma,
                trial: t,
                steps_actual: trace.steps,
                completed: trace.completed,
                final_error: (trace.final_estimate - slope).abs(),
            })
        })
        .collect::<Result<_>>()?;

    let summary = noise_levels
        .iter()
        .enumerate()
        .map(|(l, &sigma)| {
            let mut task = EstimationTask::slope(sigma, config.success_resolution)?;
            task.actions = linspace(QUERY_RANGE.0, QUERY_RANGE.1, config.agent.query_points)?;
            let estimate = a_priori_estimate(&task, config.agent.step_cap as f64, seed)?;
            let steps_predicted = estimate.predicted_steps.unwrap_or(u64::MAX);
            let observed = MeanSe::of(
                trials[l * config.trials_per_level..(l + 1) * config.trials_per_level]
                    .iter()
                    .map(|r| r.steps_actual as f64),
            );
            Ok(SweepRow {
                sigma,
                steps_predicted,
                steps_actual_mean: observed.mean,
                steps_actual_se: observed.se,
                gap: observed.mean - steps_predicted as f64,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SweepReport { summary, trials })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(slope: f64, sigma: f64, seed: u64) -> AgentTrace {
        let task = SlopeTask::new(slope, sigma, DEFAULT_RESOLUTION).unwrap();
        run_slope_agent(&task, &AgentConfig::default(), seed).unwrap()
    }

    #[test]
    fn task_validation() {
        assert!(SlopeTask::new(2.5, 0.1, 0.1).is_err());
        assert!(SlopeTask::new(0.0, -0.1, 0.1).is_err());
        assert!(SlopeTask::new(0.0, 0.1, 0.0).is_err());
    }

    #[test]
    fn noise_free_identifies_in_one_step() {
        for (i, slope) in [-1.987, -0.3, 0.0, 1.234, 2.0].into_iter().enumerate() {
            let t = run(slope, 0.0, i as u64);
            assert_eq!(t.steps, 1);
            assert!(t.completed);
            assert_eq!(t.queries[0].0.abs(), 3.0);
            assert!((t.final_estimate - slope).abs() <= 0.005 + 1e-12);
        }
    }

    #[test]
    fn near_noiseless_needs_few_steps() {
        let fast = (0..100u64)
            .filter(|&s| {
                let slope = -2.0 + 4.0 * (s as f64 + 0.5) / 100.0;
                run(slope, 0.01, s).steps <= 3
            })
            .count();
        assert!(fast >= 95, "{fast}");
    }

    #[test]
    fn first_query_is_at_domain_edge() {
        for sigma in [0.1, 1.0, 3.0] {
            let t = run(0.7, sigma, 3);
            assert_eq!(t.queries[0].0.abs(), QUERY_RANGE.1);
        }
    }

    #[test]
    fn estimates_are_calibrated() {
        let mut completed = 0;
        let mut close = 0;
        for s in 0..100u64 {
            let slope = -2.0 + 4.0 * ((s * 37) % 100) as f64 / 99.0;
            let t = run(slope, 0.3, s);
            assert_eq!(t.steps, t.queries.len());
            assert_eq!(t.steps, t.posterior_entropy_trace.len());
            if t.completed {
                completed += 1;
                if (t.final_estimate - slope).abs() <= DEFAULT_RESOLUTION {
                    close += 1;
                }
            }
        }
        assert!(completed > 0);
        assert!(
            close as f64 >= 0.9 * completed as f64,
            "{close}/{completed}"
        );
    }

    #[test]
    fn step_cap_marks_incomplete() {
        let task = SlopeTask::new(0.5, 3.0, DEFAULT_RESOLUTION).unwrap();
        let config = AgentConfig {
            step_cap: 5,
            ..AgentConfig::default()
        };
        let t = run_slope_agent(&task, &config, 1).unwrap();
        assert_eq!(t.steps, 5);
        assert!(!t.completed);
    }

    #[test]
    fn agent_is_deterministic() {
        assert_eq!(run(0.4, 1.0, 77), run(0.4, 1.0, 77));
    }

    #[test]
    fn entropy_decreases_on_average() {
        let t = run(-0.8, 1.0, 5);
        let first = t.posterior_entropy_trace[0].value();
        let last = t.posterior_entropy_trace.last().unwrap().value();
        assert!(last < first);
    }

    #[test]
    fn sweep_validation() {
        let cfg = SweepConfig::default();
        assert!(run_noise_sweep(&[0.1], &cfg, 0).is_err());
        assert!(run_noise_sweep(&[0.1, 0.0], &cfg, 0).is_err());
        let few = SweepConfig {
            trials_per_level: 10,
            ..cfg
        };
        assert!(run_noise_sweep(&[0.1, 0.3], &few, 0).is_err());
    }

    #[test]
    fn small_sweep_lower_bounds() {
        let cfg = SweepConfig {
            trials_per_level: 20,
            ..SweepConfig::default()
        };
        let report = run_noise_sweep(&[0.1, 1.0], &cfg, 11).unwrap();
        assert_eq!(report.trials.len(), 40);
        for row in &report.summary {
            assert!(
                row.steps_predicted as f64 <= row.steps_actual_mean + 2.0 * row.steps_actual_se
            );
        }
        assert!(report.summary[1].gap >= report.summary[0].gap);
    }
}
