//! Cross-module invariants checked over random inputs.

use acp_core::approx::{goal_set, goal_set_additive, information_vs_epsilon, FiniteOptInstance};
use acp_core::coloring::{
    count_proper_colorings, gen_erdos_renyi, is_k_colorable, predict_cost, solve, AgentKind,
    ColoringInstance,
};
use acp_core::info::{effective_cost, solvability_verdict};
use acp_core::report::fmt_real;
use acp_core::stopping::{
    cost_bounds, high_prob_steps_real, simulate_stopping, GainFamily, GainSequenceSpec,
};
use acp_core::Bits;
use proptest::prelude::*;

fn family() -> impl Strategy<Value = GainFamily> {
    prop_oneof![
        Just(GainFamily::Deterministic),
        Just(GainFamily::Exponential),
        (1.0f64..4.0).prop_map(|support| GainFamily::Uniform { support }),
        (0.1f64..2.0, 1.0f64..4.0)
            .prop_map(|(sd, support)| GainFamily::TruncatedGaussian { sd, support }),
    ]
}

/// Non-increasing means no larger than 1, so every family's support fits.
fn spec() -> impl Strategy<Value = GainSequenceSpec> {
    (
        family(),
        prop::collection::vec(0.2f64..1.0, 0..6),
        0.1f64..0.2,
    )
        .prop_map(|(f, mut prefix, tail)| {
            prefix.sort_by(|a, b| b.total_cmp(a));
            GainSequenceSpec::new(f, prefix, tail).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stopping_trial_invariants(s in spec(), i_total in 0.5f64..20.0, seed in any::<u64>()) {
        let i = Bits::new(i_total).unwrap();
        let t = simulate_stopping(&s, i, seed).unwrap();
        prop_assert!(t.n_steps >= 1);
        prop_assert!(t.accumulated >= i_total);
        prop_assert!(t.overshoot >= 0.0);
        prop_assert!((t.accumulated - i_total - t.overshoot).abs() < 1e-9);
        prop_assert_eq!(t, simulate_stopping(&s, i, seed).unwrap());
    }

    #[test]
    fn bounds_are_ordered(s in spec(), i_total in 0.1f64..100.0, c_s in 0.01f64..10.0) {
        let b = cost_bounds(&s, Bits::new(i_total).unwrap(), c_s).unwrap();
        prop_assert!(b.lower <= b.upper);
        prop_assert!((b.lower - effective_cost(Bits::new(i_total).unwrap(), Bits::new(s.mu_1()).unwrap(), c_s).unwrap()).abs() < 1e-9 * b.lower.max(1.0));
    }

    #[test]
    fn high_prob_steps_shrink_as_delta_grows(i_total in 0.1f64..50.0, mu in 0.1f64..1.0, d1 in 0.001f64..0.5, d2 in 0.5f64..0.999) {
        let i = Bits::new(i_total).unwrap();
        let strict = high_prob_steps_real(i, mu, 1.0, d1).unwrap();
        let loose = high_prob_steps_real(i, mu, 1.0, d2).unwrap();
        prop_assert!(strict >= loose);
        prop_assert!(loose >= i_total / mu);
    }

    #[test]
    fn colorability_agrees_with_counting(n in 1usize..10, p in 0.0f64..1.0, k in 1usize..4, seed in any::<u64>()) {
        let g = gen_erdos_renyi(n, p, seed).unwrap();
        prop_assert_eq!(is_k_colorable(&g, k).unwrap(), count_proper_colorings(&g, k).unwrap() > 0);
    }

    #[test]
    fn solvers_return_proper_colorings(n in 2usize..13, p in 0.1f64..0.5, seed in any::<u64>()) {
        let inst = ColoringInstance::generate(n, p, 3, seed).unwrap();
        let feasible = is_k_colorable(&inst.graph, 3).unwrap();
        for agent in AgentKind::ALL {
            let stats = solve(&inst, agent, seed ^ 0x5a5a).unwrap();
            prop_assert_eq!(stats.found, feasible);
            if let Some(colors) = &stats.assignment {
                prop_assert!(inst.graph.is_proper_coloring(colors));
                prop_assert!(colors.iter().all(|&c| c < 3));
            }
            if stats.found {
                prop_assert!(stats.expansions as f64 >= predict_cost(&inst).unwrap());
            }
        }
    }

    #[test]
    fn goal_sets_nested_and_contain_minimizers(values in prop::collection::vec(0u32..50, 1..64), e1 in 0.0f64..2.0, e2 in 0.0f64..2.0) {
        let inst = FiniteOptInstance::new(values.iter().map(|&v| v as f64).collect()).unwrap();
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let small = goal_set(&inst, lo).unwrap();
        let large = goal_set(&inst, hi).unwrap();
        prop_assert!(small.iter().all(|c| large.contains(c)));
        let best = inst.optimum();
        for c in 0..inst.len() {
            if inst.objective(c) == best {
                prop_assert!(small.contains(&c));
            }
        }
        prop_assert_eq!(goal_set_additive(&inst, lo).unwrap(), small);
    }

    #[test]
    fn search_information_non_increasing(values in prop::collection::vec(1u32..100, 2..64), mut eps in prop::collection::vec(0.0f64..3.0, 2..8)) {
        eps.sort_by(|a, b| a.total_cmp(b));
        eps.dedup();
        let inst = FiniteOptInstance::new(values.iter().map(|&v| v as f64).collect()).unwrap();
        let reports = information_vs_epsilon(&inst, &eps).unwrap();
        for w in reports.windows(2) {
            prop_assert!(w[0].goal_count <= w[1].goal_count);
            prop_assert!(w[0].i_total_search >= w[1].i_total_search);
        }
        for r in &reports {
            prop_assert!(r.goal_count >= 1);
            prop_assert_eq!(r.p_goal, r.goal_count as f64 / inst.len() as f64);
        }
    }

    #[test]
    fn verdict_monotone_in_budget(c in 0.0f64..1e6, b1 in 0.0f64..1e6, b2 in 0.0f64..1e6) {
        let (lo, hi) = if b1 <= b2 { (b1, b2) } else { (b2, b1) };
        prop_assert!(!solvability_verdict(c, lo) || solvability_verdict(c, hi));
        prop_assert!(!solvability_verdict(f64::INFINITY, hi));
    }

    #[test]
    fn fixed_decimal_round_trip(x in -1e6f64..1e6) {
        let s = fmt_real(x);
        prop_assert_eq!(s.split('.').nth(1).map(str::len), Some(6));
        prop_assert!((s.parse::<f64>().unwrap() - x).abs() <= 5e-7 + 1e-9 * x.abs());
    }
}
