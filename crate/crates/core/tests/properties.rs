use num_complex::Complex64;
use proptest::prelude::*;
use resonance_core::darboux::darboux_potential;
use resonance_core::decay::{survival_amplitude, FbwNormalization, FockDistribution, SurvivalMethod};
use resonance_core::gamow::build_gamow_state;
use resonance_core::numerics::Tolerances;
use resonance_core::oscillator::{steady_state, OscillatorParams};
use resonance_core::scattering::{
    find_poles, local_jost, solve_scattering, wronskian, KRegion, PiecewisePotential, PiecewiseWave, PoleKind,
    PoleSearch,
};

fn well(depth: f64, width: f64) -> PiecewisePotential {
    PiecewisePotential::square_well(depth, width).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn splitting_a_segment_changes_nothing(depth in 1.0f64..200.0, width in 0.5f64..6.0, frac in 0.05f64..0.95, energy in 0.01f64..50.0) {
        let v = well(depth, width);
        let x = -0.5 * width + frac * width;
        let split = v.split_at(x).unwrap();
        let k = Complex64::new(energy.sqrt(), 0.0);
        let a = solve_scattering(&v, k).unwrap();
        let b = solve_scattering(&split, k).unwrap();
        prop_assert!((a.transmitted - b.transmitted).norm() < 1e-12);
        prop_assert!((a.reflected - b.reflected).norm() < 1e-12);
    }

    #[test]
    fn wronskian_is_position_independent(depth in 1.0f64..100.0, width in 0.5f64..4.0, energy in 0.05f64..30.0, x in -8.0f64..8.0) {
        let v = well(depth, width);
        let k = Complex64::new(energy.sqrt(), 0.0);
        let one = PiecewiseWave::from_left(&v, k, Complex64::new(1.0, 0.0), Complex64::default());
        let two = PiecewiseWave::from_left(&v, k, Complex64::default(), Complex64::new(1.0, 0.0));
        let reference = wronskian(&one.eval(-10.0), &two.eval(-10.0));
        let here = wronskian(&one.eval(x), &two.eval(x));
        prop_assert!((here - reference).norm() < 1e-10 * reference.norm().max(1.0));
    }

    #[test]
    fn steady_state_phase_decreases_with_frequency(gamma in 0.01f64..1.5, w in 0.01f64..3.0, dw in 1e-3f64..1.0) {
        let p = OscillatorParams::new(1.0, 1.0, gamma, 1.0, 0.0).unwrap();
        let a = steady_state(&p, w).unwrap().phase;
        let b = steady_state(&p, w + dw).unwrap().phase;
        prop_assert!(b < a && b > -std::f64::consts::PI && a <= 0.0);
    }

    #[test]
    fn closed_form_survival_decays_exponentially(e0 in -20.0f64..20.0, width in 0.01f64..5.0, t in 0.0f64..20.0) {
        let d = FockDistribution::new(e0, width, FbwNormalization::Squared).unwrap();
        let tol = Tolerances::default();
        let a0 = survival_amplitude(&d, 0.0, SurvivalMethod::ClosedForm, &tol).unwrap().norm();
        let at = survival_amplitude(&d, t, SurvivalMethod::ClosedForm, &tol).unwrap().norm();
        prop_assert!((at / a0 - (-0.5 * width * t).exp()).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn resonance_poles_come_in_mirror_pairs(depth in 20.0f64..120.0, width in 1.0f64..3.0) {
        let v = well(depth, width);
        let set = find_poles(&v, &KRegion::new((0.2, 12.0), (-4.0, 0.5)).unwrap(), &PoleSearch::default()).unwrap();
        for p in set.of_kind(PoleKind::Resonance) {
            prop_assert!(local_jost(&v, -p.k.conj()).norm() < 1e-8);
            prop_assert!(local_jost(&v, p.k).norm() < 1e-8);
        }
    }

    #[test]
    fn deformed_potential_satisfies_both_riccati_forms(depth in 20.0f64..80.0, x in -6.0f64..6.0) {
        let v = well(depth, 2.0);
        let set = find_poles(&v, &KRegion::new((0.2, 12.0), (-4.0, 0.5)).unwrap(), &PoleSearch::default()).unwrap();
        let seeds: Vec<_> = set
            .of_kind(PoleKind::Resonance)
            .filter_map(|p| build_gamow_state(&v, p, 1e-8).ok())
            .collect();
        for g in seeds.iter().take(2) {
            if let Ok(d) = darboux_potential(g, -6.0, 6.0, 50) {
                if let Ok(r) = d.riccati_pair_residual(x) {
                    prop_assert!(r < 1e-10 * (1.0 + g.beta(x).map(|b| b.norm_sqr()).unwrap_or(0.0)));
                }
            }
        }
    }
}
