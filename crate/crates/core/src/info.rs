//! Entropy primitives and the effective-cost formulas.
//!
//! All information quantities are in bits. Unsolvability (for instance an
//! accuracy target that cannot be approximated at all) is represented by the
//! infinite sentinel [`Bits::INFINITE`], which propagates through
//! [`effective_cost`] as an infinite cost and is never judged solvable.

use std::fmt;

use crate::error::{AcpError, Result};

/// Tolerance on the total mass of a [`DiscreteDistribution`].
pub const PROBABILITY_TOLERANCE: f64 = 1e-9;

/// A non-negative information quantity in bits.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Bits(f64);

impl Bits {
    pub const ZERO: Bits = Bits(0.0);
    /// Sentinel for "no finite amount of information suffices".
    pub const INFINITE: Bits = Bits(f64::INFINITY);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value < 0.0 {
            return Err(AcpError::domain(format!(
                "information must be a non-negative number of bits, got {value}"
            )));
        }
        Ok(Bits(value))
    }

    /// Clamps tiny negative round-off to zero.
    pub(crate) fn saturating(value: f64) -> Self {
        Bits(if value > 0.0 { value } else { 0.0 })
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4} bits", self.0)
    }
}

/// Per-action cost `C_s` and total budget `B`, both in abstract resource units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    cost_per_action: f64,
    budget: f64,
}

impl CostModel {
    pub fn new(cost_per_action: f64, budget: f64) -> Result<Self> {
        if !(cost_per_action > 0.0 && cost_per_action.is_finite()) {
            return Err(AcpError::domain("cost per action must be positive"));
        }
        if !(budget > 0.0) {
            return Err(AcpError::domain("budget must be positive"));
        }
        Ok(CostModel {
            cost_per_action,
            budget,
        })
    }

    pub fn cost_per_action(&self) -> f64 {
        self.cost_per_action
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    /// Effective cost of the given information requirement and per-step gain
    /// under this cost model, and whether the budget covers it.
    pub fn assess(&self, i_total: Bits, i_s: Bits) -> Result<(f64, bool)> {
        let cost = effective_cost(i_total, i_s, self.cost_per_action)?;
        Ok((cost, solvability_verdict(cost, self.budget)))
    }
}

/// A probability vector over a finite outcome set.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    probabilities: Vec<f64>,
}

impl DiscreteDistribution {
    /// Validates that entries are non-negative and sum to one within
    /// [`PROBABILITY_TOLERANCE`].
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(AcpError::domain("distribution has no outcomes"));
        }
        if let Some(bad) = probabilities
            .iter()
            .find(|p| !(**p >= 0.0) || !p.is_finite())
        {
            return Err(AcpError::domain(format!(
                "probabilities must be finite and non-negative, got {bad}"
            )));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(AcpError::domain(format!(
                "probabilities must sum to 1, got {total}"
            )));
        }
        Ok(DiscreteDistribution { probabilities })
    }

    /// Normalizes non-negative weights into a distribution.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(AcpError::domain("weights must be finite and non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(AcpError::domain("weights must have positive total mass"));
        }
        Ok(DiscreteDistribution {
            probabilities: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(AcpError::domain("distribution has no outcomes"));
        }
        Ok(DiscreteDistribution {
            probabilities: vec![1.0 / n as f64; n],
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn entropy(&self) -> Bits {
        entropy_of(&self.probabilities)
    }
}

/// `x * log2(x)` with the continuous extension `0 * log2(0) = 0`.
fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

pub(crate) fn entropy_of(probabilities: &[f64]) -> Bits {
    Bits::saturating(-probabilities.iter().map(|&p| plogp(p)).sum::<f64>())
}

/// Entropy of a Bernoulli(p) indicator.
pub fn binary_entropy(p: f64) -> Result<Bits> {
    if !(0.0..=1.0).contains(&p) {
        return Err(AcpError::domain(format!(
            "probability must lie in [0, 1], got {p}"
        )));
    }
    Ok(Bits::saturating(-plogp(p) - plogp(1.0 - p)))
}

/// Shannon entropy of `d` in bits.
pub fn entropy(d: &DiscreteDistribution) -> Bits {
    d.entropy()
}

/// Self-information `-log2(p_goal)` of landing in the goal set. A goal set of
/// probability zero yields [`Bits::INFINITE`].
pub fn search_information(p_goal: f64) -> Result<Bits> {
    if !(0.0..=1.0).contains(&p_goal) {
        return Err(AcpError::domain(format!(
            "goal probability must lie in [0, 1], got {p_goal}"
        )));
    }
    if p_goal == 0.0 {
        return Ok(Bits::INFINITE);
    }
    Ok(Bits::saturating(-p_goal.log2()))
}

/// `(i_total / i_s) * c_s`. Returns `f64::INFINITY` when `i_total` is the
/// infinite sentinel.
pub fn effective_cost(i_total: Bits, i_s: Bits, c_s: f64) -> Result<f64> {
    if !(i_s.value() > 0.0) {
        return Err(AcpError::domain(
            "per-step information gain must be positive; zero gain never finishes",
        ));
    }
    if !(c_s > 0.0) {
        return Err(AcpError::domain("cost per action must be positive"));
    }
    if i_total.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(i_total.value() / i_s.value() * c_s)
}

/// One candidate action for [`select_action`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionCandidate {
    pub expected_gain: Bits,
    pub cost: f64,
}

impl ActionCandidate {
    pub fn new(expected_gain: Bits, cost: f64) -> Self {
        ActionCandidate {
            expected_gain,
            cost,
        }
    }

    fn rate(&self) -> f64 {
        self.expected_gain.value() / self.cost
    }
}

/// Index of the candidate with the largest gain-per-cost ratio; ties go to the
/// smallest index.
pub fn select_action(candidates: &[ActionCandidate]) -> Result<usize> {
    if candidates.is_empty() {
        return Err(AcpError::domain("no candidate actions"));
    }
    if let Some(c) = candidates.iter().find(|c| !(c.cost > 0.0)) {
        return Err(AcpError::domain(format!(
            "action costs must be positive, got {}",
            c.cost
        )));
    }
    let mut best = 0;
    for (i, c) in candidates.iter().enumerate().skip(1) {
        if c.rate() > candidates[best].rate() {
            best = i;
        }
    }
    Ok(best)
}

/// `budget >= c_eff`. An infinite (or NaN) cost is never solvable.
pub fn solvability_verdict(c_eff: f64, budget: f64) -> bool {
    c_eff.is_finite() && budget >= c_eff
}
