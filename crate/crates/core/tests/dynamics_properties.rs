use proptest::prelude::*;
use tunnelsplit::dynamics::*;
use tunnelsplit::exact_vd::VdParameters;
use tunnelsplit::oracle::oracle_splitting;
use tunnelsplit::potential::Units;
use tunnelsplit::wkb::{splitting_regularized_form, SplitOptions};

proptest! {
    #[test]
    fn probability_is_conserved(
        delta in 0.0f64..2.0,
        detuning in -2.0f64..2.0,
        t_max in 0.0f64..500.0,
        from_left in any::<bool>(),
    ) {
        let sys = TwoStateSystem::new(0.3, delta, detuning, 1.0).unwrap();
        let initial = if from_left { Initial::Left } else { Initial::Right };
        let tr = evolve_two_state(&sys, t_max, 257, initial).unwrap();
        for (r, l) in tr.p_right.iter().zip(&tr.p_left) {
            prop_assert!((r + l - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lorentzian_is_even_in_detuning(delta in 1e-12f64..1.0, d in 0.0f64..1.0) {
        prop_assert_eq!(
            max_transfer_probability(delta, d).unwrap(),
            max_transfer_probability(delta, -d).unwrap()
        );
    }

    #[test]
    fn trajectory_peak_matches_closed_form(ln_delta in -12.0f64..0.0, ratio in -6.0f64..6.0) {
        let delta = ln_delta.exp();
        let d = ratio * delta;
        let sys = TwoStateSystem::new(0.0, delta, d, 1.0).unwrap();
        let period = 2.0 * std::f64::consts::PI / sys.gap();
        // the grid contains every half period
        let tr = evolve_two_state(&sys, 3.0 * period, 6 * 200 + 1, Initial::Right).unwrap();
        let peak = tr.p_left.iter().cloned().fold(0.0, f64::max);
        prop_assert!((peak - max_transfer_probability(delta, d).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn shuttling_frequency_is_splitting_over_hbar() {
    let sys = TwoStateSystem::new(0.0, 0.02, 0.0, 0.5).unwrap();
    let tr = evolve_two_state(&sys, 1000.0, 10, Initial::Left).unwrap();
    assert_eq!(tr.shuttle_frequency, 0.04);
    for (t, p) in tr.times.iter().zip(&tr.p_right) {
        assert!((p - (0.02 * t / (2.0 * 0.5)).sin().powi(2)).abs() < 1e-14);
    }
}

#[test]
fn oracle_gap_inverts_to_wkb_splitting() {
    let units = Units::natural();
    let base = VdParameters::from_alpha(3.0, 1, 0.0, units)
        .unwrap()
        .model()
        .unwrap();
    let wkb = splitting_regularized_form(&base, 0, SplitOptions { formal: true })
        .unwrap()
        .splitting;
    let eps = wkb / units.quantum();
    let detuned = VdParameters::from_alpha(3.0, 1, eps, units)
        .unwrap()
        .model()
        .unwrap();
    let gap = oracle_splitting(&detuned, 0).unwrap();
    let recovered = invert_detuned_splitting(gap, units.quantum() * eps).unwrap();
    assert!((recovered / wkb - 1.0).abs() < 0.1, "{recovered} vs {wkb}");
}
