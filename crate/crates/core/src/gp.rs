//! One-dimensional Gaussian-process surrogate and a-priori cost estimation.
//!
//! The estimation pipeline ([`a_priori_estimate`]) runs in four steps:
//!
//! 1. model the unknown response with a zero-mean GP prior (or, for the
//!    linear slope task, with an explicit hypothesis grid and likelihood);
//! 2. compute the information needed to localise the goal to the requested
//!    resolution ([`estimate_total_information`]);
//! 3. estimate the gain of every candidate action and average the gains of
//!    the best `top_fraction` of actions to obtain `I_s`;
//! 4. predict `C_eff = (I_total / I_s) * C_s` and compare it, plus an error
//!    margin, to the budget.
//!
//! The error margin combines a Hoeffding bound on the averaging step
//! ([`monte_carlo_error`]) and a Lipschitz bound on surrogate misspecification
//! ([`surrogate_error_bound`]), pushed through the first-order sensitivity of
//! `C_eff` ([`propagate_estimate_error`]).

use std::f64::consts::LN_2;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{AcpError, Result};
use crate::info::{effective_cost, entropy_of, solvability_verdict, Bits, DiscreteDistribution};
use crate::report::{fmt_real, CsvRecord};
use crate::seed::{derive_seed, rng_from_seed, streams};

/// Jitter added to the Gram diagonal when the plain factorization fails.
const JITTER_LADDER: [f64; 5] = [1e-10, 1e-9, 1e-8, 1e-7, 1e-6];

/// Per-step gains below this are treated as "no progress".
pub const MIN_GAIN_BITS: f64 = 1e-6;

/// Minimum number of simulated outcomes per action in [`information_gain`].
pub const MIN_OUTCOME_SAMPLES: usize = 16;

/// Squared-exponential kernel `s^2 exp(-(x - x')^2 / (2 l^2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RbfKernel {
    lengthscale: f64,
    signal_variance: f64,
}

impl RbfKernel {
    pub fn new(lengthscale: f64, signal_variance: f64) -> Result<Self> {
        if !(lengthscale > 0.0) || !(signal_variance > 0.0) {
            return Err(AcpError::domain(
                "RBF lengthscale and signal variance must be positive",
            ));
        }
        Ok(RbfKernel {
            lengthscale,
            signal_variance,
        })
    }

    pub fn lengthscale(&self) -> f64 {
        self.lengthscale
    }

    pub fn signal_variance(&self) -> f64 {
        self.signal_variance
    }
}

/// Covariance functions available to [`GpPosterior`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    Rbf(RbfKernel),
    /// `v * x * x'`: Bayesian linear regression through the origin with
    /// slope prior variance `v`.
    Linear {
        slope_variance: f64,
    },
}

impl Kernel {
    pub fn eval(&self, a: f64, b: f64) -> f64 {
        match *self {
            Kernel::Rbf(k) => {
                let d = (a - b) / k.lengthscale;
                k.signal_variance * (-0.5 * d * d).exp()
            }
            Kernel::Linear { slope_variance } => slope_variance * a * b,
        }
    }
}

impl From<RbfKernel> for Kernel {
    fn from(k: RbfKernel) -> Self {
        Kernel::Rbf(k)
    }
}

/// GP posterior given noisy observations. Immutable; adding an observation
/// builds a new posterior.
#[derive(Debug, Clone)]
pub struct GpPosterior {
    kernel: Kernel,
    noise_variance: f64,
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Lower Cholesky factor of `K + noise I (+ jitter I)`.
    chol_lower: DMatrix<f64>,
    alpha: DVector<f64>,
}

impl GpPosterior {
    pub fn prior(kernel: impl Into<Kernel>, noise_variance: f64) -> Result<Self> {
        Self::new(kernel, noise_variance, &[])
    }

    pub fn new(
        kernel: impl Into<Kernel>,
        noise_variance: f64,
        observations: &[(f64, f64)],
    ) -> Result<Self> {
        let kernel = kernel.into();
        if !(noise_variance > 0.0) {
            return Err(AcpError::domain("noise variance must be positive"));
        }
        if let Kernel::Linear { slope_variance } = kernel {
            if !(slope_variance > 0.0) {
                return Err(AcpError::domain("slope variance must be positive"));
            }
        }
        let xs: Vec<f64> = observations.iter().map(|o| o.0).collect();
        let ys: Vec<f64> = observations.iter().map(|o| o.1).collect();
        let n = xs.len();
        let gram = DMatrix::from_fn(n, n, |i, j| {
            kernel.eval(xs[i], xs[j]) + if i == j { noise_variance } else { 0.0 }
        });
        let chol = std::iter::once(0.0)
            .chain(JITTER_LADDER)
            .find_map(|jitter| {
                let mut m = gram.clone();
                for i in 0..n {
                    m[(i, i)] += jitter;
                }
                m.cholesky()
            })
            .ok_or(AcpError::SingularGram {
                jitter: JITTER_LADDER[JITTER_LADDER.len() - 1],
            })?;
        let alpha = chol.solve(&DVector::from_column_slice(&ys));
        Ok(GpPosterior {
            kernel,
            noise_variance,
            xs,
            ys,
            chol_lower: chol.l(),
            alpha,
        })
    }

    pub fn with_observation(&self, x: f64, y: f64) -> Result<Self> {
        let mut obs: Vec<(f64, f64)> = self
            .xs
            .iter()
            .copied()
            .zip(self.ys.iter().copied())
            .collect();
        obs.push((x, y));
        Self::new(self.kernel, self.noise_variance, &obs)
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn observation_count(&self) -> usize {
        self.xs.len()
    }

    /// Posterior mean and variance of the latent function at `x` (without
    /// observation noise).
    pub fn predict(&self, x: f64) -> (f64, f64) {
        let prior_var = self.kernel.eval(x, x);
        if self.xs.is_empty() {
            return (0.0, prior_var);
        }
        let k_star = DVector::from_iterator(
            self.xs.len(),
            self.xs.iter().map(|&xi| self.kernel.eval(xi, x)),
        );
        let mean = k_star.dot(&self.alpha);
        let v = self
            .chol_lower
            .solve_lower_triangular(&k_star)
            .expect("Cholesky factor has a positive diagonal");
        let var = (prior_var - v.norm_squared()).clamp(0.0, prior_var);
        (mean, var)
    }

    pub fn max_predictive_variance(&self, points: &[f64]) -> f64 {
        points
            .iter()
            .map(|&x| self.predict(x).1)
            .fold(0.0, f64::max)
    }
}

/// Mutual information between a Gaussian latent value with variance
/// `predictive_variance` and its observation under additive Gaussian noise:
/// `0.5 * log2(1 + v / noise)`.
pub fn gaussian_channel_gain(predictive_variance: f64, noise_variance: f64) -> Bits {
    Bits::saturating(0.5 * (predictive_variance / noise_variance).ln_1p() / LN_2)
}

/// Average of [`gaussian_channel_gain`] over `n_samples` candidates drawn
/// uniformly from `[lo, hi]`.
pub fn mean_sampled_gain(
    posterior: &GpPosterior,
    lo: f64,
    hi: f64,
    n_samples: usize,
    seed: u64,
) -> Bits {
    let mut rng = rng_from_seed(seed);
    let noise = posterior.noise_variance();
    let total: f64 = (0..n_samples)
        .map(|_| {
            let x = rng.random_range(lo..=hi);
            gaussian_channel_gain(posterior.predict(x).1, noise).value()
        })
        .sum();
    Bits::saturating(total / n_samples as f64)
}

/// Mean response of hypothesis `theta` to query `x`.
pub trait ResponseModel: Send + Sync {
    fn response(&self, theta: f64, x: f64) -> f64;
}

/// `y = theta * x`.
#[derive(Debug, Clone, Copy, Default)]
pub struct LinearResponse;

impl ResponseModel for LinearResponse {
    fn response(&self, theta: f64, x: f64) -> f64 {
        theta * x
    }
}

/// A discretized one-dimensional hypothesis space with a prior.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisGrid {
    points: Vec<f64>,
    prior: DiscreteDistribution,
    lo: f64,
    hi: f64,
}

impl HypothesisGrid {
    /// `n` evenly spaced points from `lo` to `hi` inclusive, uniform prior.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        let points = linspace(lo, hi, n)?;
        let prior = DiscreteDistribution::uniform(n)?;
        Ok(HypothesisGrid {
            points,
            prior,
            lo,
            hi,
        })
    }

    /// Evenly spaced points with prior masses proportional to a normal density.
    pub fn gaussian(mean: f64, variance: f64, lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(variance > 0.0) {
            return Err(AcpError::domain("prior variance must be positive"));
        }
        let points = linspace(lo, hi, n)?;
        let prior = DiscreteDistribution::from_weights(
            points
                .iter()
                .map(|x| (-(x - mean).powi(2) / (2.0 * variance)).exp())
                .collect(),
        )?;
        Ok(HypothesisGrid {
            points,
            prior,
            lo,
            hi,
        })
    }

    pub fn with_prior(&self, prior: DiscreteDistribution) -> Result<Self> {
        if prior.len() != self.points.len() {
            return Err(AcpError::domain("prior length does not match the grid"));
        }
        Ok(HypothesisGrid {
            prior,
            ..self.clone()
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn prior(&self) -> &DiscreteDistribution {
        &self.prior
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn prior_mean(&self) -> f64 {
        self.points
            .iter()
            .zip(self.prior.probabilities())
            .map(|(x, p)| x * p)
            .sum()
    }

    pub fn prior_variance(&self) -> f64 {
        let m = self.prior_mean();
        self.points
            .iter()
            .zip(self.prior.probabilities())
            .map(|(x, p)| p * (x - m).powi(2))
            .sum()
    }
}

/// `n >= 2` evenly spaced points covering `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(hi > lo) {
        return Err(AcpError::domain(
            "a grid needs at least two points and lo < hi",
        ));
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect())
}

/// Normalizes log-weights in place into probabilities and returns their entropy.
pub(crate) fn normalize_log_weights(log_w: &mut [f64]) -> Bits {
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for w in log_w.iter_mut() {
        *w = (*w - max).exp();
        total += *w;
    }
    for w in log_w.iter_mut() {
        *w /= total;
    }
    entropy_of(log_w)
}

/// Expected reduction in entropy of the hypothesis grid from observing
/// `y = response(theta, x) + noise` at `action_x`, estimated by simulating
/// outcomes from the grid's own predictive distribution.
///
/// The simulated `(theta, noise)` draws depend only on `seed`, so calls for
/// different actions with the same seed share random numbers. The estimate is
/// clamped to `[0, H(prior)]`.
pub fn information_gain(
    grid: &HypothesisGrid,
    model: &dyn ResponseModel,
    noise_variance: f64,
    action_x: f64,
    n_outcome_samples: usize,
    seed: u64,
) -> Result<Bits> {
    if n_outcome_samples < MIN_OUTCOME_SAMPLES {
        return Err(AcpError::domain(format!(
            "need at least {MIN_OUTCOME_SAMPLES} outcome samples, got {n_outcome_samples}"
        )));
    }
    if !(noise_variance > 0.0) {
        return Err(AcpError::domain("noise variance must be positive"));
    }
    let probs = grid.prior.probabilities();
    let prior_entropy = grid.prior.entropy();
    let log_prior: Vec<f64> = probs.iter().map(|p| p.ln()).collect();
    let responses: Vec<f64> = grid
        .points
        .iter()
        .map(|&t| model.response(t, action_x))
        .collect();
    let sd = noise_variance.sqrt();
    let inv_two_var = 0.5 / noise_variance;

    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in probs {
        acc += p;
        cdf.push(acc);
    }

    let mut rng = rng_from_seed(seed);
    let mut log_w = vec![0.0; probs.len()];
    let mut posterior_entropy = 0.0;
    for _ in 0..n_outcome_samples {
        let u: f64 = rng.random::<f64>() * acc;
        let eps: f64 = rng.sample(StandardNormal);
        let idx = cdf.partition_point(|&c| c < u).min(probs.len() - 1);
        let y = responses[idx] + sd * eps;
        for (w, (lp, r)) in log_w.iter_mut().zip(log_prior.iter().zip(&responses)) {
            *w = lp - (y - r).powi(2) * inv_two_var;
        }
        posterior_entropy += normalize_log_weights(&mut log_w).value();
    }
    let gain = prior_entropy.value() - posterior_entropy / n_outcome_samples as f64;
    Ok(Bits::saturating(gain.min(prior_entropy.value())))
}

/// Information needed to localise a hypothesis to within `resolution`.
///
/// The grid prior is read as a piecewise-constant density over a domain of
/// width `domain_width`, one cell per grid point. The result is its
/// differential entropy relative to the resolution,
/// `H(prior) - log2(m * resolution / domain_width)` for `m` cells, floored at
/// zero. This is `log2(domain_width / resolution)` for a uniform prior and
/// equals the entropy of the prior coarsened to resolution-width bins whenever
/// the prior is constant within each bin.
pub fn estimate_total_information(
    grid_prior: &DiscreteDistribution,
    resolution: f64,
    domain_width: f64,
) -> Result<Bits> {
    if !(resolution > 0.0) || !(resolution < domain_width) {
        return Err(AcpError::domain(
            "resolution must be positive and smaller than the domain width",
        ));
    }
    let cells = grid_prior.len() as f64;
    Ok(Bits::saturating(
        grid_prior.entropy().value() - (cells * resolution / domain_width).log2(),
    ))
}

/// Hoeffding deviation `L * sqrt(ln(2/delta) / (2 S))` of an average of `S`
/// gains each lying in `[0, L]`.
pub fn monte_carlo_error(l_bound: Bits, n_samples: usize, delta: f64) -> Result<Bits> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(AcpError::domain(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    if n_samples == 0 {
        return Err(AcpError::domain("need at least one sample"));
    }
    Ok(Bits::saturating(
        l_bound.value() * ((2.0 / delta).ln() / (2.0 * n_samples as f64)).sqrt(),
    ))
}

/// Bound on the gain error caused by a predictive-variance error of at most
/// `delta_sigma`: the Gaussian channel gain is Lipschitz in the variance with
/// constant `1 / (2 (noise + var_lb))` nats. Returned in bits.
pub fn surrogate_error_bound(sigma_n2: f64, sigma_lb2: f64, delta_sigma: f64) -> Result<Bits> {
    if !(sigma_n2 > 0.0) {
        return Err(AcpError::domain("noise variance must be positive"));
    }
    if !(sigma_lb2 >= 0.0) || !(delta_sigma >= 0.0) {
        return Err(AcpError::domain("variance bounds must be non-negative"));
    }
    Ok(Bits::saturating(
        delta_sigma / (2.0 * (sigma_n2 + sigma_lb2)) / LN_2,
    ))
}

/// First-order margin `c_s (eps_tot / i_s + i_total eps_s / i_s^2)` on the
/// effective cost. The second-order remainder is dropped.
pub fn propagate_estimate_error(
    eps_tot: Bits,
    eps_s: Bits,
    i_total: Bits,
    i_s: Bits,
    c_s: f64,
) -> Result<f64> {
    let gain = i_s.value();
    if !(gain > 0.0) {
        return Err(AcpError::domain("per-step gain must be positive"));
    }
    Ok(c_s * (eps_tot.value() / gain + i_total.value() * eps_s.value() / (gain * gain)))
}

/// How the per-action gain is computed in [`a_priori_estimate`].
#[derive(Debug, Clone)]
pub enum GainModel {
    /// Closed-form channel gain of a GP surrogate at each action.
    Surrogate(GpPosterior),
    /// Simulated entropy reduction of the hypothesis grid under `y = theta x`.
    LinearResponse,
}

/// Inputs to [`a_priori_estimate`].
#[derive(Debug, Clone)]
pub struct EstimationTask {
    /// Prior over the hypothesis space.
    pub theta: HypothesisGrid,
    /// Width to which the goal must be localised.
    pub resolution: f64,
    /// Candidate actions.
    pub actions: Vec<f64>,
    pub noise_variance: f64,
    pub cost_per_action: f64,
    pub gain_model: GainModel,
    /// Fraction of best actions averaged into `I_s`.
    pub top_fraction: f64,
    pub n_outcome_samples: usize,
    /// Confidence parameter of the Monte Carlo error bound.
    pub delta: f64,
    /// Lower bound on predictive variance over the domain.
    pub variance_lower_bound: f64,
    /// Caller-supplied bound on the surrogate's predictive-variance error.
    pub variance_deviation: f64,
}

pub const DEFAULT_THETA_POINTS: usize = 401;
pub const DEFAULT_ACTION_POINTS: usize = 61;
pub const DEFAULT_TOP_FRACTION: f64 = 0.25;
pub const DEFAULT_OUTCOME_SAMPLES: usize = 64;
pub const DEFAULT_DELTA: f64 = 0.05;

impl EstimationTask {
    /// Slope identification: `theta` uniform on `[-2, 2]`, queries on `[-3, 3]`,
    /// noise standard deviation `noise_sigma`.
    pub fn slope(noise_sigma: f64, resolution: f64) -> Result<Self> {
        if !(noise_sigma > 0.0) {
            return Err(AcpError::domain("noise sigma must be positive"));
        }
        Ok(EstimationTask {
            theta: HypothesisGrid::uniform(-2.0, 2.0, DEFAULT_THETA_POINTS)?,
            resolution,
            actions: linspace(-3.0, 3.0, DEFAULT_ACTION_POINTS)?,
            noise_variance: noise_sigma * noise_sigma,
            cost_per_action: 1.0,
            gain_model: GainModel::LinearResponse,
            top_fraction: DEFAULT_TOP_FRACTION,
            n_outcome_samples: DEFAULT_OUTCOME_SAMPLES,
            delta: DEFAULT_DELTA,
            variance_lower_bound: 0.0,
            variance_deviation: 0.0,
        })
    }

    /// GP surrogate over `[-3, 3]` with an RBF kernel, `theta_points` grid
    /// points and a uniform prior over where the goal lies.
    pub fn surrogate(
        kernel: RbfKernel,
        noise_sigma: f64,
        theta_points: usize,
        resolution: f64,
    ) -> Result<Self> {
        let noise_variance = noise_sigma * noise_sigma;
        let gp = GpPosterior::prior(kernel, noise_variance)?;
        Ok(EstimationTask {
            theta: HypothesisGrid::uniform(-3.0, 3.0, theta_points)?,
            resolution,
            actions: linspace(-3.0, 3.0, DEFAULT_ACTION_POINTS)?,
            noise_variance,
            cost_per_action: 1.0,
            gain_model: GainModel::Surrogate(gp),
            top_fraction: DEFAULT_TOP_FRACTION,
            n_outcome_samples: DEFAULT_OUTCOME_SAMPLES,
            delta: DEFAULT_DELTA,
            variance_lower_bound: 0.0,
            variance_deviation: 0.0,
        })
    }

    /// Estimated gain of every action, in action order.
    pub fn action_gains(&self, seed: u64) -> Result<Vec<Bits>> {
        match &self.gain_model {
            GainModel::Surrogate(gp) => Ok(self
                .actions
                .iter()
                .map(|&x| gaussian_channel_gain(gp.predict(x).1, self.noise_variance))
                .collect()),
            GainModel::LinearResponse => {
                let outcome_seed = derive_seed(seed, streams::OUTCOME_SAMPLES, 0);
                self.actions
                    .par_iter()
                    .map(|&x| {
                        information_gain(
                            &self.theta,
                            &LinearResponse,
                            self.noise_variance,
                            x,
                            self.n_outcome_samples,
                            outcome_seed,
                        )
                    })
                    .collect()
            }
        }
    }

    /// Largest predictive variance of the observed quantity over the actions.
    fn max_predictive_variance(&self) -> f64 {
        match &self.gain_model {
            GainModel::Surrogate(gp) => gp.max_predictive_variance(&self.actions),
            GainModel::LinearResponse => {
                let v = self.theta.prior_variance();
                self.actions.iter().map(|x| x * x * v).fold(0.0, f64::max)
            }
        }
    }
}

/// Result of a-priori cost estimation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationReport {
    pub i_total: Bits,
    pub i_s: Bits,
    /// Predicted effective cost; infinite when no action is informative.
    pub c_eff_predicted: f64,
    /// `ceil(i_total / i_s)`, or `None` when the cost is infinite.
    pub predicted_steps: Option<u64>,
    pub mc_error: Bits,
    pub c_eff_margin: f64,
    /// `budget >= c_eff + margin`.
    pub solvable: bool,
}

impl EstimationReport {
    /// Assembles a report from its ingredients. A gain below
    /// [`MIN_GAIN_BITS`] makes the cost infinite and the verdict negative.
    pub fn from_parts(
        i_total: Bits,
        i_s: Bits,
        c_s: f64,
        mc_error: Bits,
        c_eff_margin: f64,
        budget: f64,
    ) -> Result<Self> {
        if i_s.value() < MIN_GAIN_BITS {
            return Ok(EstimationReport {
                i_total,
                i_s,
                c_eff_predicted: f64::INFINITY,
                predicted_steps: None,
                mc_error,
                c_eff_margin: c_eff_margin.max(0.0),
                solvable: false,
            });
        }
        let c_eff = effective_cost(i_total, i_s, c_s)?;
        let steps = (i_total.value() / i_s.value()).ceil();
        Ok(EstimationReport {
            i_total,
            i_s,
            c_eff_predicted: c_eff,
            predicted_steps: steps.is_finite().then_some(steps as u64),
            mc_error,
            c_eff_margin: c_eff_margin.max(0.0),
            solvable: solvability_verdict(c_eff + c_eff_margin.max(0.0), budget),
        })
    }
}

impl CsvRecord for EstimationReport {
    fn header() -> &'static [&'static str] {
        &[
            "i_total_bits",
            "i_s_bits",
            "c_eff",
            "predicted_steps",
            "mc_error_bits",
            "margin",
            "solvable",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            fmt_real(self.i_total.value()),
            fmt_real(self.i_s.value()),
            fmt_real(self.c_eff_predicted),
            self.predicted_steps
                .map_or_else(|| "inf".to_string(), |s| s.to_string()),
            fmt_real(self.mc_error.value()),
            fmt_real(self.c_eff_margin),
            self.solvable.to_string(),
        ]
    }
}

/// A-priori estimate of the cost of solving `task` and whether `budget`
/// covers it. Deterministic given `seed`.
pub fn a_priori_estimate(
    task: &EstimationTask,
    budget: f64,
    seed: u64,
) -> Result<EstimationReport> {
    if !(budget > 0.0) {
        return Err(AcpError::domain("budget must be positive"));
    }
    if !(task.top_fraction > 0.0 && task.top_fraction <= 1.0) {
        return Err(AcpError::domain("top fraction must lie in (0, 1]"));
    }
    if task.actions.is_empty() {
        return Err(AcpError::domain("no candidate actions"));
    }
    let i_total =
        estimate_total_information(task.theta.prior(), task.resolution, task.theta.width())?;

    let mut gains: Vec<f64> = task
        .action_gains(seed)?
        .into_iter()
        .map(Bits::value)
        .collect();
    gains.sort_by(|a, b| b.total_cmp(a));
    let top = ((task.top_fraction * gains.len() as f64).ceil() as usize).clamp(1, gains.len());
    let i_s = Bits::saturating(gains[..top].iter().sum::<f64>() / top as f64);

    let l_bound = gaussian_channel_gain(task.max_predictive_variance(), task.noise_variance);
    let mc_error = monte_carlo_error(l_bound, top, task.delta)?;
    if i_s.value() < MIN_GAIN_BITS {
        return EstimationReport::from_parts(
            i_total,
            i_s,
            task.cost_per_action,
            mc_error,
            0.0,
            budget,
        );
    }
    let model_error = surrogate_error_bound(
        task.noise_variance,
        task.variance_lower_bound,
        task.variance_deviation,
    )?;
    let eps_s = Bits::saturating(mc_error.value() + model_error.value());
    let margin = propagate_estimate_error(Bits::ZERO, eps_s, i_total, i_s, task.cost_per_action)?;
    EstimationReport::from_parts(i_total, i_s, task.cost_per_action, mc_error, margin, budget)
}
