use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};

use discpower_core::gates::{cartan_kernel, CartanCoordinates};
use discpower_core::linalg::{tensor, ComplexMatrix};
use discpower_core::mdms::{max_discord, rank_family};
use discpower_core::power::{
    angle_sweep, discording_power, discording_power_of_unitary, power_curve, preimage_witness, GateFamily,
    PowerSearchConfig, PreimageWitness,
};
use discpower_core::states::qubit_basis;

fn small(mu: f64) -> PowerSearchConfig {
    PowerSearchConfig {
        angle_step: 0.25 * PI,
        prob_samples: 60,
        finalists: 6,
        refine_starts: 2,
        refine_max_evals: 150,
        ..PowerSearchConfig::new(mu)
    }
}

#[test]
fn power_stays_below_the_boundary() {
    let gates = [
        CartanCoordinates::new(FRAC_PI_4, 0.0, 0.0),
        CartanCoordinates::new(FRAC_PI_8, FRAC_PI_8, 0.0),
        CartanCoordinates::new(0.5, 0.3, 0.1),
    ];
    for mu in [0.3, 0.6] {
        let dmax = max_discord(mu).unwrap();
        for g in &gates {
            let r = discording_power(g, &small(mu)).unwrap();
            assert!(r.dp >= 0.0 && r.dp <= dmax + 1e-6, "{g} mu={mu}: {} > {dmax}", r.dp);
        }
    }
}

#[test]
fn local_dressing_does_not_change_power() {
    let coords = CartanCoordinates::new(0.6, 0.25, 0.1);
    let pre = tensor(&qubit_basis(0.4, 1.1), &qubit_basis(2.0, -0.3)).unwrap();
    let post = tensor(&qubit_basis(1.3, 0.2), &qubit_basis(0.9, 2.5)).unwrap();
    let dressed: ComplexMatrix = post * cartan_kernel(&coords) * pre;
    let cfg = small(0.5);
    let bare = discording_power(&coords, &cfg).unwrap();
    let via = discording_power_of_unitary(&dressed, &cfg).unwrap();
    assert!((bare.dp - via.dp).abs() < 1e-3, "{} vs {}", bare.dp, via.dp);
}

#[test]
fn cnot_kernel_is_a_perfect_entangler() {
    let r = discording_power(&CartanCoordinates::new(FRAC_PI_4, 0.0, 0.0), &small(1.0)).unwrap();
    assert!((r.dp - 1.0).abs() < 1e-6);
}

#[test]
fn curve_has_one_result_per_purity() {
    let mus = [0.25, 0.5, 1.0];
    let rows = power_curve(&CartanCoordinates::new(0.0, 0.0, 0.0), &mus, &small(0.5)).unwrap();
    assert_eq!(rows.len(), 3);
    for (r, mu) in rows.iter().zip(mus) {
        assert_eq!(r.purity, mu);
        assert!(r.dp < 1e-6);
    }
    assert!(power_curve(&CartanCoordinates::new(0.0, 0.0, 0.0), &[0.2], &small(0.5)).is_err());
}

#[test]
fn sweep_starts_at_zero_and_rejects_large_angles() {
    let rows = angle_sweep(GateFamily::DoubleAxis, &[0.0], &small(0.7)).unwrap();
    assert!(rows[0].1.dp < 1e-6);
    assert!(angle_sweep(GateFamily::SingleAxis, &[1.0], &small(0.7)).is_err());
}

#[test]
fn cnot_gap_oracle() {
    // independent multistart Nelder-Mead over bases and spectra, run offline,
    // reached 0.588320 at mu = 0.7 and 0.840575 at mu = 0.9
    let coords = CartanCoordinates::new(FRAC_PI_4, 0.0, 0.0);
    for (mu, oracle) in [(0.7, 0.588320), (0.9, 0.840575)] {
        let r = discording_power(&coords, &PowerSearchConfig::new(mu)).unwrap();
        assert!((r.dp - oracle).abs() < 1e-5, "mu={mu}: {}", r.dp);
        assert!(max_discord(mu).unwrap() - oracle > 1e-2);
    }
}

#[test]
fn rank2_state_has_no_classical_preimage_under_cnot_kernel() {
    let coords = CartanCoordinates::new(FRAC_PI_4, 0.0, 0.0);
    let target = rank_family(0.8, 0.2, 0.0).unwrap();
    match preimage_witness(&coords, &target, 0.1 * PI).unwrap() {
        PreimageWitness::NotFound { best_residual, min_concurrence } => {
            assert!((best_residual - 0.3 * 2f64.sqrt()).abs() < 1e-6, "{best_residual}");
            // a suitable local dressing lets the inverse kernel disentangle it
            assert!(min_concurrence < 1e-6, "{min_concurrence}");
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn double_axis_sweep_against_multistart_oracle() {
    // 200-start Nelder-Mead values at mu = 0.7; the exact peak sits at pi/8
    let dmax = max_discord(0.7).unwrap();
    for (k, oracle) in [(0.13, 0.693141), (0.15, 0.666835), (0.17, 0.694308)] {
        let coords = CartanCoordinates::new(k * PI, k * PI, 0.0);
        let dp = discording_power(&coords, &PowerSearchConfig::new(0.7)).unwrap().dp;
        assert!(dp >= oracle - 1e-5 && dp <= dmax, "{k}: {dp}");
    }
    let peak = discording_power(&CartanCoordinates::new(FRAC_PI_8, FRAC_PI_8, 0.0), &PowerSearchConfig::new(0.7)).unwrap();
    assert!((peak.dp - dmax).abs() < 1e-9);
}
