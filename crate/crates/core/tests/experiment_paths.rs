use std::f64::consts::FRAC_1_SQRT_2;

use cusim::experiment::{simulate_experiment, ArmSpec, ExperimentSpec, Protocol};
use cusim::interferometer::ideal_cu;
use cusim::noise::NoiseConfig;
use cusim::optics::{gate, GateName};
use cusim::remote::RcCoefficients;
use cusim::tomography::{born_probabilities, ideal_chi, mle_chi, process_fidelity, Channel};

fn cnot_spec(shots: u64, seed: u64) -> ExperimentSpec {
    ExperimentSpec {
        protocol: Protocol::CuGate,
        u0: ArmSpec::Named(GateName::I),
        u1: ArmSpec::Named(GateName::X),
        noise: NoiseConfig::ideal(seed),
        shots,
        seed,
    }
}

#[test]
fn zero_noise_cnot_matches_abstract_born_probabilities() {
    let sim = simulate_experiment(&cnot_spec(1000, 3)).unwrap();
    let ideal = ideal_cu(&gate(GateName::I), &gate(GateName::X)).unwrap();
    assert!(cusim::linalg::equal_up_to_global_phase(
        &sim.target_operator,
        &ideal,
        1e-12
    ));
    let reference = born_probabilities(&Channel::Op(ideal), &sim.design).unwrap();
    let mut worst = 0.0f64;
    for i in 0..sim.design.n_preps() {
        for j in 0..sim.design.n_settings() {
            for k in 0..sim.design.n_outcomes() {
                let d = (sim.probabilities.prob(i, j, k) - reference.prob(i, j, k)).abs();
                worst = worst.max(d);
            }
        }
    }
    assert!(worst < 1e-9, "worst conditional probability gap {worst:.3e}");
    for (i, s) in sim.success_summary.iter().enumerate() {
        assert!(
            (s - 0.25).abs() < 1e-9,
            "prep {i}: success {s} should be the 1/4 coincidence weight"
        );
    }
}

#[test]
fn zero_noise_cnot_counts_reach_high_mle_fidelity() {
    let sim = simulate_experiment(&cnot_spec(20_000, 11)).unwrap();
    let outcome = mle_chi(&sim.counts, &sim.design).unwrap();
    let ideal = ideal_chi(&sim.target_operator).unwrap();
    let f = process_fidelity(&outcome.chi, &ideal).unwrap();
    assert!(f > 0.995, "fidelity {f}");
}

#[test]
fn annihilating_remote_channel_produces_empty_rows() {
    let cf = RcCoefficients::real(FRAC_1_SQRT_2, -FRAC_1_SQRT_2).unwrap();
    let spec = ExperimentSpec {
        protocol: Protocol::RcStatePrep(cf),
        u0: ArmSpec::Named(GateName::I),
        u1: ArmSpec::Named(GateName::X),
        noise: NoiseConfig::ideal(5),
        shots: 5000,
        seed: 5,
    };
    let sim = simulate_experiment(&spec).unwrap();
    // (I - X)/√2 annihilates |+>, which is prep index 2 of the standard set.
    for j in 0..sim.design.n_settings() {
        assert_eq!(sim.probabilities.row_weight(2, j), 0.0);
        for k in 0..sim.design.n_outcomes() {
            assert_eq!(sim.probabilities.prob(2, j, k), 0.0);
            assert_eq!(sim.counts.count(2, j, k), 0);
        }
    }
    assert_eq!(sim.success_summary[2], 0.0);
    // |0> and |1> pass through with success 1/8 each.
    assert!((sim.success_summary[0] - 0.125).abs() < 1e-9);
    assert!((sim.success_summary[1] - 0.125).abs() < 1e-9);
}

#[test]
fn remote_projection_and_state_prep_probabilities_agree() {
    let cf = RcCoefficients::new(
        num_complex::Complex64::new((2.0f64 / 3.0).sqrt(), 0.0),
        num_complex::Complex64::new((1.0f64 / 3.0).sqrt(), 0.0),
    )
    .unwrap();
    let mk = |protocol| ExperimentSpec {
        protocol,
        u0: ArmSpec::Named(GateName::I),
        u1: ArmSpec::Named(GateName::X),
        noise: NoiseConfig::ideal(9),
        shots: 1000,
        seed: 9,
    };
    let a = simulate_experiment(&mk(Protocol::RcStatePrep(cf.clone()))).unwrap();
    let b = simulate_experiment(&mk(Protocol::RcProjection(cf))).unwrap();
    for i in 0..a.design.n_preps() {
        for j in 0..a.design.n_settings() {
            assert!(
                (a.probabilities.row_weight(i, j) - b.probabilities.row_weight(i, j)).abs() < 1e-9
            );
            for k in 0..a.design.n_outcomes() {
                let pa = a.probabilities.prob(i, j, k);
                let pb = b.probabilities.prob(i, j, k);
                assert!((pa - pb).abs() < 1e-9, "prep {i} setting {j} outcome {k}: {pa} vs {pb}");
            }
        }
    }
}

#[test]
fn noisy_runs_are_reproducible_and_noise_actually_moves_probabilities() {
    let noise = NoiseConfig {
        umi_phase_sigma: 0.1,
        umzi_phase_sigma: 0.1,
        waveplate_angle_sigma: 0.3,
        depolarizing_p: 0.02,
        seed: 77,
    };
    let spec = ExperimentSpec {
        noise,
        ..cnot_spec(2000, 77)
    };
    let a = simulate_experiment(&spec).unwrap();
    let b = simulate_experiment(&spec).unwrap();
    assert_eq!(a.probabilities.values(), b.probabilities.values());
    assert_eq!(a.counts.counts(), b.counts.counts());

    let clean = simulate_experiment(&cnot_spec(2000, 77)).unwrap();
    let moved = a
        .probabilities
        .values()
        .iter()
        .zip(clean.probabilities.values())
        .any(|(x, y)| (x - y).abs() > 1e-4);
    assert!(moved, "noise draws left every probability unchanged");
}
