use attoqo_core::coherence::{csi_parameter, g1_gaussian, g2_gaussian};
use attoqo_core::driver::{averaged_vector, classical_limit_weight, DriverDistribution, Sampler};
use attoqo_core::phase_space::{
    apply_loss, branch_entropy, coherent_overlap, entanglement_entropy, log_negativity, photon_statistics, purity,
    qfi_phase, squeezing_parameters, wigner, Axis, CoherentSuperposition, GaussianModeState,
};
use attoqo_core::qstate::{gaussian_output_state, BilinearCoefficients, HarmonicAmplitudes};
use attoqo_core::C64;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn amp(lim: f64) -> impl Strategy<Value = C64> {
    (-lim..lim, -lim..lim).prop_map(|(re, im)| C64::new(re, im))
}

fn superposition(modes: usize, terms: usize, lim: f64) -> impl Strategy<Value = CoherentSuperposition> {
    prop::collection::vec((amp(1.0), prop::collection::vec(amp(lim), modes)), 1..=terms)
        .prop_filter_map("degenerate norm", move |t| {
            CoherentSuperposition::new(modes, t).ok().and_then(|s| s.normalized().ok())
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn overlap_bounded(a in prop::collection::vec(amp(4.0), 2), b in prop::collection::vec(amp(4.0), 2)) {
        let o = coherent_overlap(&a, &b).unwrap();
        let d2: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).norm_sqr()).sum();
        prop_assert!(o.norm() <= 1.0 + 1e-15);
        prop_assert!((o.norm() - (-0.5 * d2).exp()).abs() < 1e-12);
        let back = coherent_overlap(&b, &a).unwrap();
        prop_assert!((back - o.conj()).norm() < 1e-12);
    }

    #[test]
    fn loss_keeps_trace_and_lowers_purity(s in superposition(1, 3, 3.0), eta in 0.05f64..0.999) {
        let mix = apply_loss(&s, eta).unwrap();
        prop_assert!((mix.trace().re - 1.0).abs() < 1e-9);
        prop_assert!(mix.is_hermitian(1e-9));
        let p = purity(&mix).unwrap();
        prop_assert!(p > 0.0 && p <= 1.0 + 1e-9, "purity {}", p);
        prop_assert!((purity(&s.to_operator()).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn qfi_not_increased_by_loss(s in superposition(1, 3, 2.5), eta in 0.1f64..0.99) {
        let pure = qfi_phase(&s).unwrap();
        let lossy = qfi_phase(&apply_loss(&s, eta).unwrap()).unwrap();
        prop_assert!(pure >= -1e-9 && lossy >= -1e-9);
        // Loss commutes with phase rotation, so QFI is monotone under it.
        prop_assert!(lossy <= pure + 1e-6 * pure.max(1.0), "{} > {}", lossy, pure);
    }

    #[test]
    fn pmf_is_a_distribution(s in superposition(2, 3, 2.0), mode in 0usize..2) {
        let st = photon_statistics(&s, mode, 120).unwrap();
        prop_assert!(st.pmf.iter().all(|&p| p >= -1e-12));
        prop_assert!((st.total() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn wigner_normalized(s in superposition(1, 2, 2.0)) {
        let ax = Axis::symmetric(7.0, 0.1).unwrap();
        let grid = wigner(&s, 0, ax, ax).unwrap();
        prop_assert!((grid.integral() - 1.0).abs() < 1e-6, "{}", grid.integral());
        prop_assert!(grid.max() <= 1.0 / std::f64::consts::PI + 1e-9);
        prop_assert!(grid.min() >= -1.0 / std::f64::consts::PI - 1e-9);
    }

    #[test]
    fn entropy_bounds(s in superposition(2, 3, 2.0)) {
        let e = entanglement_entropy(&s, &[0]).unwrap();
        prop_assert!(e >= -1e-12);
        prop_assert!(e <= (s.len() as f64).ln() + 1e-9);
    }

    #[test]
    fn branch_entropy_bounds(a in superposition(1, 2, 2.0), b in superposition(1, 2, 2.0)) {
        let e = branch_entropy(&[a, b]).unwrap();
        prop_assert!(e >= -1e-12 && e <= std::f64::consts::LN_2 + 1e-12);
    }

    #[test]
    fn product_coherent_is_second_order_coherent(a in prop::collection::vec(amp(5.0), 3)) {
        prop_assume!(a.iter().all(|z| z.norm() > 1e-3));
        let g = GaussianModeState::coherent(&a);
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!((g2_gaussian(&g, i, j).unwrap() - 1.0).abs() < 1e-9);
                prop_assert!((g1_gaussian(&g, i, j).unwrap().norm() - 1.0).abs() < 1e-9);
            }
        }
        let r = csi_parameter(g2_gaussian(&g, 0, 0).unwrap(), g2_gaussian(&g, 1, 1).unwrap(), g2_gaussian(&g, 0, 1).unwrap()).unwrap();
        prop_assert!((r - 1.0).abs() < 1e-9);
    }

    #[test]
    fn thermal_bunching(nbar in 0.01f64..50.0) {
        let g = GaussianModeState::thermal(1, nbar).unwrap();
        prop_assert!((g2_gaussian(&g, 0, 0).unwrap() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn bilinear_output_is_physical(
        gv in prop::collection::vec(amp(0.3), 9),
        kv in prop::collection::vec(amp(0.3), 9),
        chi in prop::collection::vec(amp(1.0), 3),
    ) {
        let g = DMatrix::from_fn(3, 3, |i, j| 0.5 * (gv[3 * i + j] + gv[3 * j + i]));
        let k = DMatrix::from_fn(3, 3, |i, j| 0.5 * (kv[3 * i + j] + kv[3 * j + i].conj()));
        let bil = BilinearCoefficients { g, k };
        prop_assert!(bil.hermiticity_defect() < 1e-15);
        let amps = HarmonicAmplitudes { chi: chi.clone(), alpha_in: C64::new(10.0, 0.0), omega0: 0.057 };
        let state = gaussian_output_state(&amps, Some(&bil)).unwrap();
        // Re-validating through the checked constructor enforces ν ≥ 1/2.
        prop_assert!(GaussianModeState::new(state.mean().clone(), state.covariance().clone()).is_ok());
        let det = state.covariance().determinant();
        prop_assert!((det - 1.0 / 64.0).abs() < 1e-9, "pure state det {}", det);
        for q in 0..3 {
            let (r, angle) = squeezing_parameters(&state, q).unwrap();
            prop_assert!(r >= 0.0 && (0.0..std::f64::consts::PI).contains(&angle));
            prop_assert!(state.photon_number(q) >= chi[q].norm_sqr() - 1e-12);
        }
        prop_assert!(log_negativity(&state, &[0]).unwrap() >= 0.0);
        let plain = gaussian_output_state(&amps, None).unwrap();
        prop_assert!(squeezing_parameters(&plain, 0).unwrap().0 < 1e-12);
        prop_assert!(log_negativity(&plain, &[0, 2]).unwrap() < 1e-12);
    }

    #[test]
    fn squeezing_round_trip(r in 0.0f64..2.0, angle in 0.0f64..3.14) {
        let s = GaussianModeState::squeezed_vacuum(r, angle);
        let (r2, a2) = squeezing_parameters(&s, 0).unwrap();
        prop_assert!((r - r2).abs() < 1e-9);
        if r > 1e-3 {
            let d = (angle - a2).abs();
            prop_assert!(d < 1e-6 || (std::f64::consts::PI - d).abs() < 1e-6, "{} vs {}", angle, a2);
        }
    }

    #[test]
    fn averaging_is_linear(nbar in 0.1f64..5.0, a in -2.0f64..2.0, b in -2.0f64..2.0, seed in 0u64..1000) {
        let w = classical_limit_weight(&DriverDistribution::thermal(C64::new(1.0, 0.5), nbar).unwrap());
        for sampler in [Sampler::MonteCarlo { nodes: 64, seed }, Sampler::GaussHermite { per_axis: 6 }] {
            let f = |z: C64| vec![z.norm_sqr(), z.re.powi(3)];
            let fa = averaged_vector(&w, &sampler, |z| Ok(f(z))).unwrap();
            let comb = averaged_vector(&w, &sampler, |z| { let v = f(z); Ok(vec![a * v[0] + b * v[1]]) }).unwrap();
            let expect = a * fa.mean[0] + b * fa.mean[1];
            prop_assert!((comb.mean[0] - expect).abs() < 1e-10 * (1.0 + expect.abs()));
        }
        // Gauss-Hermite is exact for low-degree moments.
        let gh = averaged_vector(&w, &Sampler::GaussHermite { per_axis: 6 }, |z| Ok(vec![z.norm_sqr()])).unwrap();
        prop_assert!((gh.mean[0] - (1.25 + nbar)).abs() < 1e-10);
    }
}
