use num_complex::Complex;
use optoswap::experiments::fock_transfer;
use optoswap::gaussian::{
    propagate, protocol_map_for_mu, symplectic_residual, GaussianState, ModeState, ProtocolMap,
};
use optoswap::oracle::{fock_protocol_oracle, FockSimConfig};
use optoswap::params::DerivedQuantities;
use optoswap::phasespace::{
    analytic_wigner, fidelity, make_cf, negativity, transfer_to_mechanics, wigner_grid, GridSpec, Parity, StateSpec,
};
use proptest::prelude::*;

fn grid(n: usize) -> GridSpec<f64> {
    GridSpec { r_max: 6.0, n_points: n }
}

fn fft_vs_analytic(spec: &StateSpec<f64>, g: GridSpec<f64>) -> f64 {
    let (w, report) = wigner_grid(&make_cf(spec).unwrap(), g).unwrap();
    assert!(!report.aliasing_risk, "{spec:?}");
    w.sup_distance(&analytic_wigner(spec, g).unwrap()).unwrap()
}

#[test]
fn fock_states_fourier_matches_number_basis() {
    for n in 0..=4 {
        let d = fft_vs_analytic(&StateSpec::Fock(n), grid(128));
        assert!(d < 1e-4, "n={n}: {d:e}");
    }
}

#[test]
fn cats_fourier_matches_number_basis() {
    for r in [0.3, 0.8, 1.5] {
        for phase in [0.0, 0.7, std::f64::consts::FRAC_PI_2] {
            for parity in [Parity::Even, Parity::Odd] {
                let spec = StateSpec::Cat {
                    alpha: Complex::from_polar(r, phase),
                    parity,
                };
                let d = fft_vs_analytic(&spec, grid(128));
                assert!(d < 1e-4, "{spec:?}: {d:e}");
            }
        }
    }
}

#[test]
fn gaussians_fourier_matches_closed_form() {
    let mut sq = ModeState::squeezed_vacuum(0.4);
    sq.mean = [0.5, -1.0];
    for m in [ModeState::vacuum(), ModeState::thermal(0.7), ModeState::coherent(1.2, 0.3), sq] {
        let d = fft_vs_analytic(&StateSpec::Gaussian(m), grid(128));
        assert!(d < 1e-6, "{m:?}: {d:e}");
    }
}

#[test]
fn added_noise_lowers_fidelity_monotonically() {
    let g = grid(64);
    let target = analytic_wigner(&StateSpec::Fock(1), g).unwrap();
    let cf = make_cf(&StateSpec::Fock(1)).unwrap();
    let mut last = 1.0 + 1e-12;
    for v in [0.0, 0.01, 0.05, 0.2, 1.0] {
        let (w, _) = wigner_grid(&cf.with_isotropic_noise(v), g).unwrap();
        let f = fidelity(&w, &target).unwrap().fidelity;
        assert!(f < last, "v={v}: {f} !< {last}");
        last = f;
    }
    assert!(last < 0.8);
}

#[test]
fn single_phonon_negativity_falls_with_damping() {
    let mut prev = f64::INFINITY;
    for q in [1e8, 1e7, 1e6] {
        let d = DerivedQuantities::from_damping_ratio(1.0 / q, 5e4).unwrap();
        let out = fock_transfer(&d, 1.0, 10.0, 1, grid(128)).unwrap();
        assert!(out.negativity.integrated < prev, "Q={q}");
        assert!(out.negativity.min_value < 0.0);
        prev = out.negativity.integrated;
    }
}

#[test]
fn oracle_and_characteristic_function_agree_for_fock_two() {
    let g = grid(64);
    let pm = ProtocolMap::ideal_swap();
    let cf = transfer_to_mechanics(&StateSpec::vacuum(), &StateSpec::Fock(2), &pm).unwrap();
    let (w, _) = wigner_grid(&cf, g).unwrap();
    let out = fock_protocol_oracle(&FockSimConfig {
        grid: g,
        ..FockSimConfig::new([-1.0; 3], StateSpec::vacuum(), StateSpec::Fock(2))
    })
    .unwrap();
    let d = w.sup_distance(&out.wigner).unwrap();
    assert!(d < 1e-4, "{d:e}");
    assert!((negativity(&w).min_value - negativity(&out.wigner).min_value).abs() < 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn displaced_squeezed_fourier(x in -1.5f64..1.5, p in -1.5f64..1.5, xi in -0.5f64..0.5) {
        let mut m = ModeState::squeezed_vacuum(xi);
        m.mean = [x, p];
        let d = fft_vs_analytic(&StateSpec::Gaussian(m), grid(64));
        prop_assert!(d < 1e-6, "{:e}", d);
    }

    #[test]
    fn ideal_swap_moves_light_onto_mechanics(x in -2.0f64..2.0, p in -2.0f64..2.0, n in 0.0f64..5.0) {
        let mut light = ModeState::thermal(n);
        light.mean = [x, p];
        let out = propagate(&GaussianState::product(&ModeState::thermal(3.0), &light), &ProtocolMap::ideal_swap()).unwrap();
        let m = out.mechanics();
        prop_assert!((m.mean[0] + p).abs() < 1e-12 && (m.mean[1] - x).abs() < 1e-12);
        prop_assert!((m.occupancy() - n - (x * x + p * p) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn protocol_maps_preserve_physicality(
        mu in proptest::array::uniform3(0.2f64..3.0),
        eps in 0.0f64..1e-3,
        nb in 1.0f64..1e5,
        eta in 0.5f64..1.0,
    ) {
        let lossless = protocol_map_for_mu(mu, &DerivedQuantities::from_epsilon(0.0, 0.0).unwrap(), 1.0).unwrap();
        prop_assert!(symplectic_residual(&lossless.m) < 1e-9);
        let d = DerivedQuantities::from_epsilon(eps, nb).unwrap();
        let pm = protocol_map_for_mu(mu, &d, eta).unwrap();
        let out = propagate(&GaussianState::thermal_mechanics(nb), &pm).unwrap();
        prop_assert!(out.check_physical().is_ok());
    }
}

#[test]
fn gaussian_channels_match_covariance_propagation() {
    let mut light = ModeState::squeezed_vacuum(0.3);
    light.mean = [0.8, -0.4];
    let mech = ModeState::thermal(0.5);
    for (mu, eps, nb, eta) in [
        ([1.0, 1.0, 1.0], 1e-4, 1.0, 1.0),
        ([0.95, 1.05, 1.0], 1e-3, 5.0, 0.9),
        ([1.0, 0.8, 1.1], 1e-5, 50.0, 0.7),
    ] {
        let pm = protocol_map_for_mu(mu, &DerivedQuantities::from_epsilon(eps, nb).unwrap(), eta).unwrap();
        let cf = transfer_to_mechanics(&StateSpec::Gaussian(mech), &StateSpec::Gaussian(light), &pm).unwrap();
        let (w, _) = wigner_grid(&cf, grid(128)).unwrap();
        let out = propagate(&GaussianState::product(&mech, &light), &pm).unwrap().mechanics();
        let exact = analytic_wigner(&StateSpec::Gaussian(out), grid(128)).unwrap();
        let d = w.sup_distance(&exact).unwrap();
        assert!(d < 1e-6, "mu={mu:?}: {d:e}");
    }
}

#[test]
fn oracle_matches_characteristic_function_on_default_grid() {
    let g = GridSpec::default();
    let mu2 = 0.1f64.exp();
    let cat = StateSpec::odd_cat(Complex::new(0.6, -0.5));
    let lossless = DerivedQuantities::from_epsilon(0.0, 0.0).unwrap();
    let pm = protocol_map_for_mu([1.0, mu2, 1.0], &lossless, 1.0).unwrap();
    let cf = transfer_to_mechanics(&StateSpec::vacuum(), &cat, &pm).unwrap();
    let (w, _) = wigner_grid(&cf, g).unwrap();
    let out = fock_protocol_oracle(&FockSimConfig {
        grid: g,
        ..FockSimConfig::new([-1.0 / mu2, -mu2, -1.0 / mu2], StateSpec::vacuum(), cat)
    })
    .unwrap();
    let d = w.sup_distance(&out.wigner).unwrap();
    assert!(d < 1e-4, "{d:e}");
}
