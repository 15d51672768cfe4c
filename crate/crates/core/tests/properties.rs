use proptest::prelude::*;
use twr_core::relay_opt::{classify_case, optimize, relative_levels};
use twr_core::waterfill::{
    forward_waterfill, inverse_waterfill, pooled, power_of_level, rate_of_level,
};
use twr_core::{MaRates, Node, SubchannelGains};

fn gain_list() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..6.0, 1..=4).prop_map(|mut v| {
        v.sort_by(|a, b| b.total_cmp(a));
        v
    })
}

/// MA rates with `max(r_bar) <= r_ma < r_bar_1r + r_bar_2r`.
fn ma_rates() -> impl Strategy<Value = MaRates> {
    (0.05f64..4.0, 0.05f64..4.0, 0.0f64..0.98).prop_map(|(a, b, t)| {
        let hi = a.max(b);
        MaRates {
            r_ma: hi + t * (a + b - hi),
            r_bar_1r: a,
            r_bar_2r: b,
        }
    })
}

fn instance() -> impl Strategy<Value = (SubchannelGains, MaRates)> {
    (gain_list(), gain_list(), ma_rates())
        .prop_map(|(a1, a2, r)| (SubchannelGains::from_gain_lists(a1, a2).unwrap(), r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn output_is_feasible_and_structured((g, r) in instance(), pr in 0.0f64..12.0) {
        let s = optimize(&g, &r, pr).unwrap();
        prop_assert!(s.consumed_power <= pr + 1e-9);
        for n in Node::BOTH {
            prop_assert!(s.bc_rates[n.index()] <= r.cap(n) + 1e-9);
        }
        prop_assert!(s.bc_sum() <= r.r_ma + 1e-9);

        let rel = relative_levels(&g, &r, pr);
        let [l1, l2] = s.levels;
        if (l1 - l2).abs() <= 1e-10 {
            prop_assert!((l1 - rel.mu_ma_level.min(rel.lambda0_level)).abs() <= 1e-10);
        } else {
            prop_assert!((l1.min(l2) - rel.low_cap()).abs() <= 1e-10, "levels {:?}, caps {:?}", s.levels, rel.caps());
        }
    }

    #[test]
    fn trace_matches_classifier((g, r) in instance(), pr in 0.0f64..12.0) {
        let s = optimize(&g, &r, pr).unwrap();
        prop_assert_eq!(s.step_trace, classify_case(&s.ledger, pr));
    }

    #[test]
    fn thresholds_ordered((g, r) in instance()) {
        let s = optimize(&g, &r, 1.0).unwrap();
        let t = s.ledger;
        prop_assert!(t.p_l <= t.p_t + 1e-12 && t.p_t <= t.p_s + 1e-12);
        prop_assert!(t.p_l >= 0.0);
        if !t.case_symmetric {
            prop_assert!(t.p_ma <= t.p_bar_ma + 1e-12);
        }
    }

    #[test]
    fn relative_level_ordering((g, r) in instance()) {
        let rel = relative_levels(&g, &r, 1.0);
        prop_assert!(rel.mu_ma_level < rel.high_cap() + 1e-12);
    }

    #[test]
    fn saturation_is_monotone((g, r) in instance()) {
        let sat = optimize(&g, &r, 0.0).unwrap().ledger.saturation();
        let top = 1.5 * sat + 1.0;
        let mut prev_power = 0.0;
        let mut prev_rate = 0.0;
        for k in 0..=40 {
            let pr = top * k as f64 / 40.0;
            let s = optimize(&g, &r, pr).unwrap();
            prop_assert!(s.consumed_power >= prev_power - 1e-9);
            prop_assert!(s.sum_rate_tw >= prev_rate - 1e-9);
            if pr > sat + 1e-6 {
                prop_assert!((s.consumed_power - sat).abs() <= 1e-8);
                prop_assert!((s.sum_rate_tw - 0.5 * r.r_ma).abs() <= 1e-9);
            }
            prev_power = s.consumed_power;
            prev_rate = s.sum_rate_tw;
        }
    }

    /// Splitting a fixed budget between the two directions: the BC sum-rate
    /// peaks at the pooled level and falls off on either side.
    #[test]
    fn budget_split_is_unimodal(a1 in gain_list(), a2 in gain_list(), budget in 0.1f64..10.0) {
        let peak = forward_waterfill(&pooled(&a1, &a2), budget).level;
        let top = forward_waterfill(&a1, budget).level;
        let lo = 1.0 / a1[0];
        let bc = |l1: f64| {
            let rest = (budget - power_of_level(&a1, l1)).max(0.0);
            rate_of_level(&a1, l1) + forward_waterfill(&a2, rest).rate
        };
        let best = bc(peak);
        let steps = 60;
        let mut prev = best;
        for k in 1..=steps {
            let l = peak + (top - peak) * k as f64 / steps as f64;
            let v = bc(l);
            prop_assert!(v <= prev + 1e-10);
            prev = v;
        }
        prev = best;
        for k in 1..=steps {
            let l = peak - (peak - lo).max(0.0) * k as f64 / steps as f64;
            let v = bc(l);
            prop_assert!(v <= prev + 1e-10);
            prev = v;
        }
    }

    /// On a curve of constant BC sum-rate, spreading the two levels apart
    /// costs power.
    #[test]
    fn contour_power_grows_away_from_common_level(
        a1 in gain_list(), a2 in gain_list(), target in 0.2f64..5.0, side in any::<bool>()
    ) {
        let (own, other) = if side { (&a1, &a2) } else { (&a2, &a1) };
        let common = inverse_waterfill(&pooled(&a1, &a2), target).level;
        let top = inverse_waterfill(own, target).level;
        let power = |l: f64| {
            let rest = inverse_waterfill(other, (target - rate_of_level(own, l)).max(0.0)).level;
            power_of_level(own, l) + power_of_level(other, rest)
        };
        let base = power(common);
        let mut prev = base;
        for k in 1..=40 {
            let l = common + (top - common) * k as f64 / 40.0;
            let p = power(l);
            prop_assert!(p >= prev - 1e-9);
            prev = p;
        }
        if top - common > 1e-6 {
            prop_assert!(power(top) > base);
        }
    }
}

#[test]
fn prepared_trials_are_feasible() {
    use twr_core::trial::prepare_trial;
    use twr_core::SystemConfig;
    let cfg = SystemConfig::uniform_noise((3, 2, 4), (2.0, 3.0, 4.0), 1.0, 99);
    for t in 0..30 {
        let p = prepare_trial(&cfg, t).unwrap();
        let r = p.strategy.rates;
        assert!(r.subadditivity_gap() > 0.0);
        for pr in [0.2, 1.0, 4.0, 20.0] {
            let s = p.solve(pr).unwrap();
            assert!(s.consumed_power <= pr + 1e-9);
            assert!(s.bc_sum() <= r.r_ma + 1e-9);
            assert_eq!(s.step_trace, classify_case(&s.ledger, pr));
        }
    }
}
