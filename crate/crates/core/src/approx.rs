//! Epsilon-approximate goal sets over explicit finite candidate spaces.
//!
//! For a minimization objective `f` with optimum `f*`, the goal set at
//! accuracy `eps` is every candidate with `f <= (1 + eps) f*`. Relaxing `eps`
//! grows the set, so the self-information `-log2 p_goal` of hitting it shrinks.
//! The binary entropy of the goal indicator is reported alongside but is not
//! monotone: it peaks when the goal set covers half of the space.

use rand::Rng;

use crate::error::{AcpError, Result};
use crate::info::{binary_entropy, effective_cost, search_information, solvability_verdict, Bits};
use crate::report::{fmt_real, CsvRecord};
use crate::seed::{derive_seed, rng_from_seed, streams};

/// Largest candidate space accepted.
pub const MAX_CANDIDATES: usize = 1 << 20;

/// Relative slack on the goal threshold so that candidates lying exactly on
/// `(1 + eps) f*` are not lost to rounding.
const THRESHOLD_SLACK: f64 = 1e-12;

/// A minimization problem over candidates `0..len`, with every objective value
/// precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteOptInstance {
    objective: Vec<f64>,
}

impl FiniteOptInstance {
    pub fn new(objective: Vec<f64>) -> Result<Self> {
        if objective.is_empty() {
            return Err(AcpError::domain("candidate space is empty"));
        }
        if objective.len() > MAX_CANDIDATES {
            return Err(AcpError::TooLarge {
                what: "candidate count",
                got: objective.len(),
                limit: MAX_CANDIDATES,
            });
        }
        if objective.iter().any(|f| !f.is_finite()) {
            return Err(AcpError::domain(
                "objective must be finite on every candidate",
            ));
        }
        Ok(FiniteOptInstance { objective })
    }

    pub fn from_fn(count: usize, f: impl Fn(usize) -> f64) -> Result<Self> {
        if count > MAX_CANDIDATES {
            return Err(AcpError::TooLarge {
                what: "candidate count",
                got: count,
                limit: MAX_CANDIDATES,
            });
        }
        Self::new((0..count).map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.objective.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objective.is_empty()
    }

    pub fn objective(&self, candidate: usize) -> f64 {
        self.objective[candidate]
    }

    pub fn optimum(&self) -> f64 {
        self.objective.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn select(&self, threshold: f64) -> Vec<usize> {
        let limit = threshold + THRESHOLD_SLACK * threshold.abs().max(1.0);
        (0..self.len())
            .filter(|&i| self.objective[i] <= limit)
            .collect()
    }
}

/// A 0/1 knapsack item.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Item {
    pub weight: u32,
    pub value: u32,
}

/// 0/1 knapsack as minimization over all `2^items` subsets (bit `i` of the
/// candidate index selects item `i`):
///
/// `f(S) = V - v(S) + (V + 1) * max(0, w(S) - capacity)`
///
/// where `V` is the total value of all items. Every overweight subset scores
/// worse than the empty set, and `f >= 0` everywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Knapsack {
    pub items: Vec<Item>,
    pub capacity: u32,
}

impl Knapsack {
    /// `count` items with weights in `1..=20` and values in `1..=30`; capacity
    /// is half the total weight.
    pub fn random(count: usize, seed: u64) -> Result<Self> {
        if count == 0 || count > 20 {
            return Err(AcpError::domain("knapsack needs between 1 and 20 items"));
        }
        let mut rng = rng_from_seed(derive_seed(seed, streams::KNAPSACK, count as u64));
        let items: Vec<Item> = (0..count)
            .map(|_| Item {
                weight: rng.random_range(1..=20),
                value: rng.random_range(1..=30),
            })
            .collect();
        let capacity = items.iter().map(|i| i.weight).sum::<u32>() / 2;
        Ok(Knapsack { items, capacity })
    }

    pub fn total_value(&self) -> u64 {
        self.items.iter().map(|i| u64::from(i.value)).sum()
    }

    /// Objective of the subset encoded by `mask`.
    pub fn penalized_cost(&self, mask: usize) -> u64 {
        let (mut w, mut v) = (0u64, 0u64);
        for (i, item) in self.items.iter().enumerate() {
            if mask >> i & 1 == 1 {
                w += u64::from(item.weight);
                v += u64::from(item.value);
            }
        }
        let total = self.total_value();
        total - v + (total + 1) * w.saturating_sub(u64::from(self.capacity))
    }

    pub fn to_instance(&self) -> Result<FiniteOptInstance> {
        FiniteOptInstance::from_fn(1usize << self.items.len(), |m| {
            self.penalized_cost(m) as f64
        })
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(AcpError::domain(format!(
            "epsilon must be non-negative, got {epsilon}"
        )));
    }
    Ok(())
}

/// Candidates with `f <= (1 + eps) f*`, in index order. Requires `f* >= 0`;
/// use [`goal_set_additive`] for objectives that can be negative.
pub fn goal_set(instance: &FiniteOptInstance, epsilon: f64) -> Result<Vec<usize>> {
    check_epsilon(epsilon)?;
    let best = instance.optimum();
    if best < 0.0 {
        return Err(AcpError::domain(format!(
            "multiplicative goal needs a non-negative optimum (got {best}); use goal_set_additive"
        )));
    }
    Ok(instance.select((1.0 + epsilon) * best))
}

/// Extension for signed objectives: candidates with `f <= f* + eps |f*|`.
/// Agrees with [`goal_set`] whenever `f* >= 0`.
pub fn goal_set_additive(instance: &FiniteOptInstance, epsilon: f64) -> Result<Vec<usize>> {
    check_epsilon(epsilon)?;
    let best = instance.optimum();
    Ok(instance.select(best + epsilon * best.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonGoalReport {
    pub epsilon: f64,
    pub goal_count: usize,
    pub p_goal: f64,
    /// Binary entropy of the goal indicator.
    pub i_total_indicator: Bits,
    /// `-log2 p_goal`.
    pub i_total_search: Bits,
}

impl CsvRecord for EpsilonGoalReport {
    fn header() -> &'static [&'static str] {
        &[
            "epsilon",
            "goal_count",
            "p_goal",
            "i_total_indicator_bits",
            "i_total_search_bits",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            fmt_real(self.epsilon),
            self.goal_count.to_string(),
            fmt_real(self.p_goal),
            fmt_real(self.i_total_indicator.value()),
            fmt_real(self.i_total_search.value()),
        ]
    }
}

fn epsilon_report(instance: &FiniteOptInstance, epsilon: f64) -> Result<EpsilonGoalReport> {
    let goal_count = goal_set(instance, epsilon)?.len();
    let p_goal = goal_count as f64 / instance.len() as f64;
    Ok(EpsilonGoalReport {
        epsilon,
        goal_count,
        p_goal,
        i_total_indicator: binary_entropy(p_goal)?,
        i_total_search: search_information(p_goal)?,
    })
}

/// Goal-set size and information requirement at each accuracy level.
pub fn information_vs_epsilon(
    instance: &FiniteOptInstance,
    epsilons: &[f64],
) -> Result<Vec<EpsilonGoalReport>> {
    if epsilons.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(AcpError::domain("epsilons must be strictly ascending"));
    }
    epsilons
        .iter()
        .map(|&e| epsilon_report(instance, e))
        .collect()
}

/// Effective cost of reaching accuracy `eps` and whether `budget` covers it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyVerdict {
    pub epsilon: f64,
    pub i_total: Bits,
    pub c_eff: f64,
    pub solvable: bool,
}

/// Uses `I_total = -log2 p_goal(eps)`. When an inapproximability ratio `rho`
/// is declared, any `eps < rho - 1` needs infinite information and is never
/// solvable.
pub fn feasibility_at_accuracy(
    instance: &FiniteOptInstance,
    epsilon: f64,
    i_s: Bits,
    c_s: f64,
    budget: f64,
    inapproximability_ratio: Option<f64>,
) -> Result<AccuracyVerdict> {
    check_epsilon(epsilon)?;
    let i_total = match inapproximability_ratio {
        Some(rho) if epsilon < rho - 1.0 => Bits::INFINITE,
        _ => epsilon_report(instance, epsilon)?.i_total_search,
    };
    let c_eff = effective_cost(i_total, i_s, c_s)?;
    Ok(AccuracyVerdict {
        epsilon,
        i_total,
        c_eff,
        solvable: solvability_verdict(c_eff, budget),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(v: f64) -> Bits {
        Bits::new(v).unwrap()
    }

    #[test]
    fn instance_validation() {
        assert!(FiniteOptInstance::new(vec![]).is_err());
        assert!(FiniteOptInstance::new(vec![1.0, f64::NAN]).is_err());
        assert!(matches!(
            FiniteOptInstance::from_fn(MAX_CANDIDATES + 1, |_| 0.0),
            Err(AcpError::TooLarge { .. })
        ));
    }

    #[test]
    fn zero_epsilon_is_argmin() {
        let inst = FiniteOptInstance::new(vec![3.0, 1.0, 2.0, 1.0]).unwrap();
        assert_eq!(goal_set(&inst, 0.0).unwrap(), vec![1, 3]);
    }

    #[test]
    fn large_epsilon_is_everything() {
        let inst = FiniteOptInstance::new(vec![3.0, 1.0, 2.0, 1.0]).unwrap();
        assert_eq!(goal_set(&inst, 2.0).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn boundary_candidates_included() {
        // 1.1 * 10 is 11.000000000000002 in floating point; 1.05 * 20 rounds down.
        let inst = FiniteOptInstance::new(vec![10.0, 11.0, 12.0]).unwrap();
        assert_eq!(goal_set(&inst, 0.1).unwrap(), vec![0, 1]);
        let inst = FiniteOptInstance::new(vec![20.0, 21.0, 22.0]).unwrap();
        assert_eq!(goal_set(&inst, 0.05).unwrap(), vec![0, 1]);
    }

    #[test]
    fn negative_optimum_needs_additive_variant() {
        let inst = FiniteOptInstance::new(vec![-4.0, -3.0, 1.0]).unwrap();
        assert!(goal_set(&inst, 0.1).is_err());
        assert_eq!(goal_set_additive(&inst, 0.25).unwrap(), vec![0, 1]);
        let pos = FiniteOptInstance::new(vec![4.0, 5.0, 6.0]).unwrap();
        assert_eq!(
            goal_set_additive(&pos, 0.3).unwrap(),
            goal_set(&pos, 0.3).unwrap()
        );
    }

    /// Independent oracle: enumerate subsets directly and compare values in
    /// exact integer arithmetic, `100 f(S) <= (100 + e) f*` with `eps = e/100`.
    fn knapsack_goal_oracle(k: &Knapsack, eps_percent: u64) -> Vec<usize> {
        let n = k.items.len();
        let total: u64 = k.items.iter().map(|i| i.value as u64).sum();
        let cost = |mask: usize| {
            let w: u64 = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| k.items[i].weight as u64)
                .sum();
            let v: u64 = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| k.items[i].value as u64)
                .sum();
            if w <= k.capacity as u64 {
                total - v
            } else {
                total - v + (total + 1) * (w - k.capacity as u64)
            }
        };
        let best = (0..1usize << n).map(cost).min().unwrap();
        (0..1usize << n)
            .filter(|&m| 100 * cost(m) <= (100 + eps_percent) * best)
            .collect()
    }

    #[test]
    fn knapsack_goal_sets_match_oracle() {
        let k = Knapsack::random(5, 3).unwrap();
        let inst = k.to_instance().unwrap();
        assert_eq!(goal_set(&inst, 0.1).unwrap(), knapsack_goal_oracle(&k, 10));
        for seed in 0..20 {
            let k = Knapsack::random(8, seed).unwrap();
            let inst = k.to_instance().unwrap();
            for e in [0, 5, 10, 20, 50] {
                assert_eq!(
                    goal_set(&inst, e as f64 / 100.0).unwrap(),
                    knapsack_goal_oracle(&k, e)
                );
            }
        }
    }

    #[test]
    fn goal_sets_are_nested() {
        for seed in 0..10 {
            let inst = Knapsack::random(7, seed).unwrap().to_instance().unwrap();
            let best = inst.optimum();
            let mut prev: Vec<usize> = Vec::new();
            for e in [0.0, 0.01, 0.05, 0.1, 0.3, 1.0, 5.0] {
                let g = goal_set(&inst, e).unwrap();
                assert!(prev.iter().all(|c| g.contains(c)));
                assert!((0..inst.len())
                    .filter(|&c| inst.objective(c) == best)
                    .all(|c| g.contains(&c)));
                prev = g;
            }
        }
    }

    #[test]
    fn information_curves() {
        let inst = Knapsack::random(10, 1).unwrap().to_instance().unwrap();
        let eps = [0.0, 0.05, 0.1, 0.2, 0.5];
        let reports = information_vs_epsilon(&inst, &eps).unwrap();
        for w in reports.windows(2) {
            assert!(w[0].goal_count <= w[1].goal_count);
            assert!(w[0].i_total_search >= w[1].i_total_search);
        }
        for r in &reports {
            assert!(r.goal_count >= 1);
            assert_eq!(r.p_goal, r.goal_count as f64 / 1024.0);
        }
        assert!(information_vs_epsilon(&inst, &[0.1, 0.1]).is_err());
        assert!(information_vs_epsilon(&inst, &[0.2, 0.1]).is_err());
        assert!(information_vs_epsilon(&inst, &[-0.1, 0.1]).is_err());
    }

    #[test]
    fn eighth_of_space_needs_three_bits() {
        let inst = FiniteOptInstance::from_fn(8, |i| i as f64 + 1.0).unwrap();
        let r = &information_vs_epsilon(&inst, &[0.0]).unwrap()[0];
        assert_eq!(r.i_total_search.value(), 3.0);
        assert!(
            (r.i_total_indicator.value() - binary_entropy(0.125).unwrap().value()).abs() < 1e-15
        );
    }

    #[test]
    fn feasibility_verdicts() {
        let inst = Knapsack::random(6, 2).unwrap().to_instance().unwrap();
        let v = feasibility_at_accuracy(&inst, 0.1, bits(1.0), 1.0, f64::MAX, Some(1.5)).unwrap();
        assert!(v.i_total.is_infinite());
        assert!(!v.solvable);
        let everything = FiniteOptInstance::new(vec![2.0; 4]).unwrap();
        let v = feasibility_at_accuracy(&everything, 0.0, bits(1.0), 1.0, 1e-9, None).unwrap();
        assert_eq!(v.c_eff, 0.0);
        assert!(v.solvable);
    }

    #[test]
    fn minimal_budget_non_increasing_in_epsilon() {
        let inst = Knapsack::random(5, 4).unwrap().to_instance().unwrap();
        let budgets: Vec<f64> = [0.0, 0.05, 0.1, 0.2, 0.5, 1.0]
            .iter()
            .map(|&e| {
                // Smallest budget on a 0.01 grid that is judged solvable.
                (0..100_000)
                    .map(|b| b as f64 * 0.01)
                    .find(|&b| {
                        b > 0.0
                            && feasibility_at_accuracy(&inst, e, bits(0.5), 1.0, b, None)
                                .unwrap()
                                .solvable
                    })
                    .unwrap()
            })
            .collect();
        assert!(budgets.windows(2).all(|w| w[0] >= w[1]), "{budgets:?}");
    }
}
