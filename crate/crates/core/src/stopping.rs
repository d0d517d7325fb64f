//! Sequential information accumulation and its cost bounds.
//!
//! Gains `X_1, X_2, ...` are drawn independently with non-increasing means
//! `mu_1 >= mu_2 >= ... >= mu_inf > 0`. The stopping time is the first `N`
//! with `X_1 + ... + X_N >= I_total`, and the cost of a run is `C_s * N`.
//! Expected cost is sandwiched by
//!
//! ```text
//! C_s * I_total / mu_1  <=  E[C]  <=  C_s * (I_total / mu_inf + M2 / mu_inf^2)
//! ```
//!
//! where `M2` bounds every `E[X_i^2]`. For gains bounded by `M`, Hoeffding's
//! inequality gives a step count that suffices with probability `1 - delta`
//! ([`high_prob_steps`]). The `ln(1/delta)` there is a natural log while gains
//! are in bits; the algebra is unit-consistent because the partial sums and
//! `I_total` share a unit.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erf;

use crate::error::{AcpError, Result};
use crate::info::Bits;
use crate::report::{fmt_real, CsvRecord};
use crate::seed::{derive_seed, rng_from_seed, streams};
use crate::stats::MeanSe;

/// Hard per-trial cap on the number of steps.
pub const STEP_CAP: u64 = 10_000_000;

/// Minimum trial count accepted by [`validate_bounds`].
pub const MIN_VALIDATION_TRIALS: usize = 100;

/// Shape of each gain's distribution around its mean `mu_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GainFamily {
    /// `X_i = mu_i`.
    Deterministic,
    /// Exponential with mean `mu_i`. Unbounded.
    Exponential,
    /// Uniform on the widest interval centred at `mu_i` inside `[0, support]`.
    /// With `mu_i = support / 2` this is uniform on `[0, support]`.
    Uniform { support: f64 },
    /// Normal `(mu_i, sd^2)` truncated symmetrically about `mu_i` to the widest
    /// such interval inside `[0, support]`. Symmetric truncation keeps the
    /// mean exactly `mu_i`.
    TruncatedGaussian { sd: f64, support: f64 },
}

impl GainFamily {
    pub fn name(&self) -> &'static str {
        match self {
            GainFamily::Deterministic => "deterministic",
            GainFamily::Exponential => "exponential",
            GainFamily::Uniform { .. } => "uniform",
            GainFamily::TruncatedGaussian { .. } => "truncated-gaussian",
        }
    }

    pub fn support_bound(&self) -> Option<f64> {
        match *self {
            GainFamily::Uniform { support } | GainFamily::TruncatedGaussian { support, .. } => {
                Some(support)
            }
            GainFamily::Deterministic | GainFamily::Exponential => None,
        }
    }

    /// Half-width of the symmetric interval around `mean`.
    fn half_width(&self, mean: f64) -> f64 {
        match self.support_bound() {
            Some(m) => mean.min(m - mean).max(0.0),
            None => mean,
        }
    }

    /// `E[X^2]` for a gain with the given mean.
    fn second_moment(&self, mean: f64) -> f64 {
        let var = match *self {
            GainFamily::Deterministic => 0.0,
            GainFamily::Exponential => mean * mean,
            GainFamily::Uniform { .. } => self.half_width(mean).powi(2) / 3.0,
            GainFamily::TruncatedGaussian { sd, .. } => {
                truncated_normal_variance(sd, self.half_width(mean))
            }
        };
        mean * mean + var
    }

    fn sample(&self, mean: f64, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            GainFamily::Deterministic => mean,
            GainFamily::Exponential => Exp::new(1.0 / mean).expect("positive rate").sample(rng),
            GainFamily::Uniform { .. } => {
                let w = self.half_width(mean);
                mean - w + 2.0 * w * rng.random::<f64>()
            }
            GainFamily::TruncatedGaussian { sd, .. } => {
                let w = self.half_width(mean);
                if w == 0.0 {
                    return mean;
                }
                // Inverse-CDF sampling restricted to [-w, w].
                let std = Normal::standard();
                let hi = std.cdf(w / sd);
                let lo = 1.0 - hi;
                let u = lo + (hi - lo) * rng.random::<f64>();
                let z = std.inverse_cdf(u).clamp(-w / sd, w / sd);
                mean + sd * z
            }
        }
    }
}

/// Variance of `N(0, sd^2)` truncated to `[-w, w]`.
fn truncated_normal_variance(sd: f64, w: f64) -> f64 {
    if w == 0.0 {
        return 0.0;
    }
    let a = w / sd;
    let mass = erf(a / std::f64::consts::SQRT_2);
    let density = (-0.5 * a * a).exp() / (2.0 * std::f64::consts::PI).sqrt();
    if mass < 1e-8 {
        // Narrow window: the density is flat, so the law is uniform on [-w, w].
        return w * w / 3.0;
    }
    (sd * sd * (1.0 - 2.0 * a * density / mass)).max(0.0)
}

/// Distributional description of the per-step information gains.
///
/// Means are an explicit non-increasing prefix `mu_1, ..., mu_k` followed by a
/// constant tail `mu_inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct GainSequenceSpec {
    family: GainFamily,
    prefix: Vec<f64>,
    tail: f64,
    second_moment_bound: f64,
}

impl GainSequenceSpec {
    pub fn new(family: GainFamily, prefix: Vec<f64>, tail: f64) -> Result<Self> {
        if !(tail > 0.0 && tail.is_finite()) {
            return Err(AcpError::domain(format!(
                "tail mean must be positive, got {tail}"
            )));
        }
        let mut prev = f64::INFINITY;
        for &mu in prefix.iter().chain(std::iter::once(&tail)) {
            if !(mu <= prev) {
                return Err(AcpError::domain("mean sequence must be non-increasing"));
            }
            prev = mu;
        }
        match family {
            GainFamily::Uniform { support } | GainFamily::TruncatedGaussian { support, .. } => {
                let mu_1 = prefix.first().copied().unwrap_or(tail);
                if !(support.is_finite() && mu_1 <= support) {
                    return Err(AcpError::domain(format!(
                        "bounded family needs every mean <= support bound {support}, got {mu_1}"
                    )));
                }
            }
            _ => {}
        }
        if let GainFamily::TruncatedGaussian { sd, .. } = family {
            if !(sd > 0.0) {
                return Err(AcpError::domain("truncated-gaussian sd must be positive"));
            }
        }
        let second_moment_bound = prefix
            .iter()
            .chain(std::iter::once(&tail))
            .map(|&mu| family.second_moment(mu))
            .fold(0.0, f64::max);
        Ok(GainSequenceSpec {
            family,
            prefix,
            tail,
            second_moment_bound,
        })
    }

    /// Independent, identically distributed gains with the given mean.
    pub fn iid(family: GainFamily, mean: f64) -> Result<Self> {
        Self::new(family, Vec::new(), mean)
    }

    /// Means `max(start * ratio^(i-1), floor)`.
    pub fn geometric_decay(family: GainFamily, start: f64, ratio: f64, floor: f64) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 1.0) || !(floor > 0.0) {
            return Err(AcpError::domain("decay needs 0 < ratio < 1 and floor > 0"));
        }
        let mut prefix = Vec::new();
        let mut mu = start;
        while mu > floor {
            prefix.push(mu);
            mu *= ratio;
        }
        Self::new(family, prefix, floor)
    }

    /// Replaces the computed second-moment bound by a looser one.
    pub fn with_second_moment_bound(mut self, m2: f64) -> Result<Self> {
        if !(m2 >= self.second_moment_bound * (1.0 - 1e-12)) {
            return Err(AcpError::domain(format!(
                "M2 = {m2} is below sup E[X_i^2] = {}",
                self.second_moment_bound
            )));
        }
        self.second_moment_bound = m2;
        Ok(self)
    }

    pub fn family(&self) -> GainFamily {
        self.family
    }

    /// Mean of the `i`-th gain, 1-based.
    pub fn mean(&self, i: u64) -> f64 {
        let idx = i.saturating_sub(1);
        usize::try_from(idx)
            .ok()
            .and_then(|idx| self.prefix.get(idx))
            .copied()
            .unwrap_or(self.tail)
    }

    pub fn mu_1(&self) -> f64 {
        self.mean(1)
    }

    pub fn mu_inf(&self) -> f64 {
        self.tail
    }

    /// `M2 >= sup_i E[X_i^2]`.
    pub fn second_moment_bound(&self) -> f64 {
        self.second_moment_bound
    }

    /// Almost-sure bound `M` on each gain, for bounded families.
    pub fn support_bound(&self) -> Option<f64> {
        match self.family {
            GainFamily::Deterministic => Some(self.mu_1()),
            f => f.support_bound(),
        }
    }

    pub fn is_iid(&self) -> bool {
        self.prefix.iter().all(|&m| m == self.tail)
    }
}

/// Outcome of one run of the gain process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingTrial {
    /// Stopping time `N`.
    pub n_steps: u64,
    /// `S_N`.
    pub accumulated: f64,
    /// `S_N - I_total`.
    pub overshoot: f64,
}

/// Runs the gain process until the partial sum reaches `i_total`.
pub fn simulate_stopping(
    spec: &GainSequenceSpec,
    i_total: Bits,
    seed: u64,
) -> Result<StoppingTrial> {
    simulate_with_cap(spec, i_total, seed, STEP_CAP)
}

fn simulate_with_cap(
    spec: &GainSequenceSpec,
    i_total: Bits,
    seed: u64,
    cap: u64,
) -> Result<StoppingTrial> {
    let target = i_total.value();
    if !(target > 0.0) || i_total.is_infinite() {
        return Err(AcpError::domain("I_total must be positive and finite"));
    }
    let mut rng = rng_from_seed(seed);
    let mut sum = 0.0;
    for step in 1..=cap {
        sum += spec.family.sample(spec.mean(step), &mut rng);
        if sum >= target {
            return Ok(StoppingTrial {
                n_steps: step,
                accumulated: sum,
                overshoot: sum - target,
            });
        }
    }
    Err(AcpError::StepCapExceeded { cap })
}

/// Lower and upper bounds on expected total cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBounds {
    /// `C_s * I_total / mu_1`, the effective cost.
    pub lower: f64,
    /// `C_s * (I_total / mu_inf + M2 / mu_inf^2)`.
    pub upper: f64,
}

pub fn cost_bounds(spec: &GainSequenceSpec, i_total: Bits, c_s: f64) -> Result<CostBounds> {
    if !(i_total.value() > 0.0) || i_total.is_infinite() {
        return Err(AcpError::domain("I_total must be positive and finite"));
    }
    if !(c_s > 0.0) {
        return Err(AcpError::domain("cost per action must be positive"));
    }
    let total = i_total.value();
    let mu_inf = spec.mu_inf();
    Ok(CostBounds {
        lower: c_s * total / spec.mu_1(),
        upper: c_s * (total / mu_inf + spec.second_moment_bound() / (mu_inf * mu_inf)),
    })
}

/// Unrounded Hoeffding step count:
/// `I/mu + M^2 ln(1/delta) / (2 mu^2) + sqrt(I M^2 ln(1/delta) / (2 mu^3))`.
pub fn high_prob_steps_real(
    i_total: Bits,
    mu_inf: f64,
    support_bound: f64,
    delta: f64,
) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(AcpError::domain(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    if !(mu_inf > 0.0) {
        return Err(AcpError::domain("mu_inf must be positive"));
    }
    if !(support_bound >= mu_inf) {
        return Err(AcpError::domain("support bound must be at least mu_inf"));
    }
    let i = i_total.value();
    let m2 = support_bound * support_bound;
    let log_term = (1.0 / delta).ln();
    Ok(i / mu_inf
        + m2 / (2.0 * mu_inf * mu_inf) * log_term
        + (i * m2 * log_term / (2.0 * mu_inf.powi(3))).sqrt())
}

/// Steps that suffice to reach `i_total` with probability at least
/// `1 - delta` when every gain lies in `[0, support_bound]`.
pub fn high_prob_steps(i_total: Bits, mu_inf: f64, support_bound: f64, delta: f64) -> Result<u64> {
    let n = high_prob_steps_real(i_total, mu_inf, support_bound, delta)?;
    Ok(n.ceil() as u64)
}

/// Runs `n_trials` independent trials; trial `j` uses
/// `derive_seed(seed, STOPPING_TRIAL, j)`. The result is in trial order
/// regardless of how rayon schedules the work.
pub fn run_trials(
    spec: &GainSequenceSpec,
    i_total: Bits,
    n_trials: usize,
    seed: u64,
) -> Result<Vec<StoppingTrial>> {
    (0..n_trials)
        .into_par_iter()
        .map(|j| {
            simulate_stopping(
                spec,
                i_total,
                derive_seed(seed, streams::STOPPING_TRIAL, j as u64),
            )
        })
        .collect()
}

/// Aggregate statistics over a batch of trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSummary {
    pub steps: MeanSe,
    pub accumulated: MeanSe,
    pub overshoot: MeanSe,
}

impl TrialSummary {
    pub fn of(trials: &[StoppingTrial]) -> Self {
        TrialSummary {
            steps: MeanSe::of(trials.iter().map(|t| t.n_steps as f64)),
            accumulated: MeanSe::of(trials.iter().map(|t| t.accumulated)),
            overshoot: MeanSe::of(trials.iter().map(|t| t.overshoot)),
        }
    }
}

/// Wald's identity `E[S_N] = mu E[N]` for iid gains of mean `mu`: returns the
/// mean and standard error of `mu * N - S_N` across trials.
pub fn wald_discrepancy(trials: &[StoppingTrial], mu: f64) -> MeanSe {
    MeanSe::of(trials.iter().map(|t| mu * t.n_steps as f64 - t.accumulated))
}

/// Fraction of trials that stopped within `n` steps.
pub fn completion_fraction(trials: &[StoppingTrial], n: u64) -> f64 {
    if trials.is_empty() {
        return f64::NAN;
    }
    trials.iter().filter(|t| t.n_steps <= n).count() as f64 / trials.len() as f64
}

/// Bounds together with the empirical cost they are meant to contain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub lower: f64,
    pub upper: f64,
    pub empirical_mean_cost: f64,
    pub standard_error: f64,
    pub n_trials: usize,
    pub mean_overshoot: f64,
    pub overshoot_standard_error: f64,
    /// `M2 / mu_inf`, the bound on expected overshoot.
    pub overshoot_bound: f64,
    /// `lower <= mean <= upper + 3 se`.
    pub within_bounds: bool,
}

/// Monte Carlo check of [`cost_bounds`] over `n_trials` runs.
pub fn validate_bounds(
    spec: &GainSequenceSpec,
    i_total: Bits,
    c_s: f64,
    n_trials: usize,
    seed: u64,
) -> Result<(BoundReport, Vec<StoppingTrial>)> {
    if n_trials < MIN_VALIDATION_TRIALS {
        return Err(AcpError::domain(format!(
            "validation needs at least {MIN_VALIDATION_TRIALS} trials, got {n_trials}"
        )));
    }
    let bounds = cost_bounds(spec, i_total, c_s)?;
    let trials = run_trials(spec, i_total, n_trials, seed)?;
    let summary = TrialSummary::of(&trials);
    let mean = c_s * summary.steps.mean;
    let se = c_s * summary.steps.se;
    let report = BoundReport {
        lower: bounds.lower,
        upper: bounds.upper,
        empirical_mean_cost: mean,
        standard_error: se,
        n_trials,
        mean_overshoot: summary.overshoot.mean,
        overshoot_standard_error: summary.overshoot.se,
        overshoot_bound: spec.second_moment_bound() / spec.mu_inf(),
        within_bounds: bounds.lower <= mean && mean <= bounds.upper + 3.0 * se,
    };
    Ok((report, trials))
}

impl CsvRecord for BoundReport {
    fn header() -> &'static [&'static str] {
        &[
            "lower",
            "upper",
            "empirical_mean_cost",
            "standard_error",
            "n_trials",
            "mean_overshoot",
            "overshoot_se",
            "overshoot_bound",
            "within_bounds",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            fmt_real(self.lower),
            fmt_real(self.upper),
            fmt_real(self.empirical_mean_cost),
            fmt_real(self.standard_error),
            self.n_trials.to_string(),
            fmt_real(self.mean_overshoot),
            fmt_real(self.overshoot_standard_error),
            fmt_real(self.overshoot_bound),
            self.within_bounds.to_string(),
        ]
    }
}

/// One row of the optional per-trial dump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub trial_id: usize,
    pub trial: StoppingTrial,
}

impl CsvRecord for TrialRecord {
    fn header() -> &'static [&'static str] {
        &["trial_id", "n_steps", "s_n", "overshoot"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.trial_id.to_string(),
            self.trial.n_steps.to_string(),
            fmt_real(self.trial.accumulated),
            fmt_real(self.trial.overshoot),
        ]
    }
}

pub fn trial_records(trials: &[StoppingTrial]) -> Vec<TrialRecord> {
    trials
        .iter()
        .enumerate()
        .map(|(trial_id, &trial)| TrialRecord { trial_id, trial })
        .collect()
}
