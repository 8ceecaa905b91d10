//! Structural invariants checked over random data.

use num_complex::Complex64;
use proptest::prelude::*;

use delta_nls::classifier::{classify_fixed_omega, Region};
use delta_nls::evolution::{evolve, EvolutionConfig, Integrator};
use delta_nls::functionals::{evaluate, k_functional, standard_pairs};
use delta_nls::grid::{apply_hamiltonian, inner, l2_norm_sq, make_grid, reflect, GridFunction, Params};
use delta_nls::groundstate::{threshold_scaling_exponent, Thresholds};

fn gaussian(n: usize, a: f64, w: f64, c: f64, k: f64) -> GridFunction {
    let g = make_grid(20.0, n).unwrap();
    GridFunction::from_fn(g, |x| Complex64::from_polar(a * (-((x - c) / w).powi(2)).exp(), k * x))
}

fn params(gamma: f64) -> Params {
    Params::new(gamma, 7.0, 1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn hamiltonian_is_symmetric(
        a in 0.1f64..2.0, w in 0.5f64..2.0, c in -3.0f64..3.0, k in -2.0f64..2.0,
        b in 0.1f64..2.0, v in 0.5f64..2.0, d in -3.0f64..3.0, gamma in -2.0f64..0.0,
    ) {
        let f = gaussian(801, a, w, c, k);
        let g = gaussian(801, b, v, d, 0.0);
        let lhs = inner(&apply_hamiltonian(&f, gamma), &g);
        let rhs = inner(&f, &apply_hamiltonian(&g, gamma));
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + lhs.norm()), "{lhs} vs {rhs}");
        // and non-negative for repulsive γ
        prop_assert!(inner(&apply_hamiltonian(&f, gamma), &f).re >= -1e-12);
    }

    #[test]
    fn strang_step_conserves_mass(
        a in 0.1f64..0.9, w in 0.6f64..2.0, c in -3.0f64..3.0, k in -1.0f64..1.0, gamma in -1.5f64..0.0,
    ) {
        let mut u = gaussian(513, a, w, c, k);
        let m0 = l2_norm_sq(&u);
        let mut int = Integrator::new(*u.grid(), params(gamma));
        for _ in 0..50 {
            int.step_in_place(&mut u, 1e-3);
        }
        prop_assert!(((l2_norm_sq(&u) - m0) / m0).abs() <= 1e-10);
    }

    #[test]
    fn backward_steps_undo_forward_steps(
        a in 0.1f64..0.9, w in 0.6f64..2.0, c in -3.0f64..3.0, k in -1.0f64..1.0, gamma in -1.5f64..0.0,
    ) {
        let u0 = gaussian(513, a, w, c, k);
        let mut u = u0.clone();
        let mut int = Integrator::new(*u.grid(), params(gamma));
        for _ in 0..40 {
            int.step_in_place(&mut u, 2e-3);
        }
        for _ in 0..40 {
            int.step_in_place(&mut u, -2e-3);
        }
        prop_assert!(u.max_distance(&u0) <= 1e-10, "{}", u.max_distance(&u0));
    }

    #[test]
    fn classification_is_reflection_invariant(
        a in 0.1f64..2.0, w in 0.5f64..2.0, c in -3.0f64..3.0, k in -1.0f64..1.0, gamma in -1.5f64..0.0,
    ) {
        let f = gaussian(1025, a, w, c, k);
        let p = params(gamma);
        let x = classify_fixed_omega(&f, &p, false).unwrap();
        let y = classify_fixed_omega(&reflect(&f), &p, false).unwrap();
        prop_assert_eq!(x.region, y.region);
        prop_assert!((x.value - y.value).abs() <= 1e-12 * (1.0 + x.value.abs()));
    }

    #[test]
    fn k_functionals_vanish_at_zero_and_share_sign_near_it(
        a in 0.001f64..0.01, w in 0.5f64..2.0, gamma in -1.5f64..0.0,
    ) {
        // small data lie in the positive region for every scaling pair
        let f = gaussian(1025, a, w, 0.0, 0.0);
        for sp in standard_pairs() {
            prop_assert!(k_functional(&f, &params(gamma), &sp) > 0.0);
        }
    }

    #[test]
    fn thresholds_are_ordered_and_scale(omega in 0.01f64..20.0, gamma in -3.0f64..0.0) {
        let th = Thresholds::compute(Params::new(gamma, 7.0, omega).unwrap());
        let unit = Thresholds::compute(Params::new(0.0, 7.0, 1.0).unwrap());
        let law = omega.powf(threshold_scaling_exponent(7.0)) * unit.l_omega;
        prop_assert!((th.l_omega - law).abs() <= 1e-10 * law);
        prop_assert_eq!(th.n_omega, th.l_omega);
        if gamma == 0.0 {
            prop_assert!((th.r_omega - th.l_omega).abs() <= 1e-10 * th.l_omega);
        } else if th.delta_soliton_exists {
            prop_assert!(th.l_omega < th.r_omega && th.r_omega < 2.0 * th.l_omega);
        } else {
            prop_assert_eq!(th.r_omega, 2.0 * th.l_omega);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    /// Below threshold the region is invariant under the flow.
    #[test]
    fn region_is_invariant_along_trajectories(a in 0.2f64..1.8, w in 0.8f64..1.5) {
        let f = gaussian(1025, a, w, 0.0, 0.0);
        let p = params(-1.0);
        let c0 = classify_fixed_omega(&f, &p, true).unwrap();
        prop_assume!(c0.region != Region::AboveThreshold);
        prop_assume!(c0.margin > 0.05 * c0.threshold_used);
        let cfg = EvolutionConfig {
            dt: 2e-3,
            t_max: 0.3,
            record_every: 5,
            keep_snapshots: true,
            ..EvolutionConfig::default()
        };
        let rec = evolve(&f, &p, &cfg).unwrap();
        let e0 = evaluate(&f, &p).energy;
        // the argument runs on conservation; once a collapse outruns the step
        // the discrete energy jumps and the premise is gone
        let mut checked = 0;
        for (s, u) in rec.samples.iter().zip(&rec.snapshots) {
            if (s.report.energy - e0).abs() > 1e-3 * (1.0 + e0.abs()) {
                prop_assert!(c0.region == Region::BlowupMinus, "energy lost on a dispersing run at t = {}", s.time);
                continue;
            }
            let even = u.add(&reflect(u)).scaled(0.5);
            let c = classify_fixed_omega(&even, &p, true).unwrap();
            prop_assert_eq!(c.region, c0.region, "t = {}", s.time);
            checked += 1;
        }
        prop_assert!(checked > 1);
    }
}
