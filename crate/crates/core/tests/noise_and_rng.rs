//! The noise and random-stream layers: determinism, zero-noise exactness,
//! and the depolarizing algebra.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use cusim::interferometer::InterferometerSettings;
use cusim::noise::{depolarize, jitter_plates, sample_noisy_settings, NoiseConfig};
use cusim::optics::{gate, GateName, Plate, WaveplateSetting};
use cusim::rng::{haar_unitary, random_state, stream, DOMAIN_COUNTS, DOMAIN_NOISE};

fn base_settings() -> InterferometerSettings {
    InterferometerSettings::new(gate(GateName::I), gate(GateName::X))
        .unwrap()
        .with_phases(0.3, -0.1)
}

fn plate_pairs() -> Vec<WaveplateSetting> {
    vec![
        WaveplateSetting::new(22.5, 45.0),
        WaveplateSetting::new(-10.0, 5.0),
    ]
}

#[test]
fn zero_sigma_sampling_reproduces_the_base_settings() {
    let cfg = NoiseConfig::ideal(9);
    let noisy = sample_noisy_settings(&base_settings(), &plate_pairs(), &cfg, 17).unwrap();
    assert_eq!(noisy.interferometer.umi_phase, 0.3);
    assert_eq!(noisy.interferometer.umzi_phase, -0.1);
    for (a, b) in noisy.waveplates.iter().zip(plate_pairs()) {
        assert_eq!(a.hwp_angle(), b.hwp_angle());
        assert_eq!(a.qwp_angle(), b.qwp_angle());
    }
    let plates = vec![Plate::hwp(67.5), Plate::qwp(45.0)];
    let mut rng = stream(9, DOMAIN_NOISE, &[17]);
    let same = jitter_plates(&plates, 0.0, &mut rng);
    assert_eq!(same[0].angle_deg, 67.5);
    assert_eq!(same[1].angle_deg, 45.0);
}

#[test]
fn noise_draws_are_deterministic_per_run_index() {
    let cfg = NoiseConfig {
        umi_phase_sigma: 0.05,
        umzi_phase_sigma: 0.02,
        waveplate_angle_sigma: 0.4,
        depolarizing_p: 0.0,
        seed: 21,
    };
    let a = sample_noisy_settings(&base_settings(), &plate_pairs(), &cfg, 3).unwrap();
    let b = sample_noisy_settings(&base_settings(), &plate_pairs(), &cfg, 3).unwrap();
    let c = sample_noisy_settings(&base_settings(), &plate_pairs(), &cfg, 4).unwrap();
    assert_eq!(a.interferometer.umi_phase, b.interferometer.umi_phase);
    assert_eq!(a.waveplates[1].hwp_angle(), b.waveplates[1].hwp_angle());
    assert_ne!(a.interferometer.umi_phase, c.interferometer.umi_phase);
    assert_ne!(a.interferometer.umi_phase, 0.3, "sigma > 0 must move the phase");
}

#[test]
fn depolarize_mixes_toward_the_maximally_mixed_state() {
    let rho = nalgebra::dmatrix![
        Complex64::new(0.8, 0.0), Complex64::new(0.1, 0.2);
        Complex64::new(0.1, -0.2), Complex64::new(0.2, 0.0);
    ];
    let out = depolarize(&rho, 0.4).unwrap();
    assert!((out[(0, 0)].re - (0.6 * 0.8 + 0.2)).abs() < 1e-15);
    assert!((out[(0, 1)] - Complex64::new(0.06, 0.12)).norm() < 1e-15);
    let tr = (out[(0, 0)] + out[(1, 1)]).re;
    assert!((tr - 1.0).abs() < 1e-15);

    let full = depolarize(&rho, 1.0).unwrap();
    assert!((full[(0, 0)].re - 0.5).abs() < 1e-15);
    assert!(full[(0, 1)].norm() < 1e-15);

    assert!(depolarize(&rho, -0.1).is_err());
    assert!(depolarize(&rho, 1.1).is_err());
    assert!(depolarize(&DMatrix::zeros(2, 3), 0.1).is_err());
}

#[test]
fn noise_config_validation_catches_bad_parameters() {
    let mut cfg = NoiseConfig::ideal(0);
    assert!(cfg.validate().is_ok());
    assert!(cfg.is_ideal());
    cfg.umi_phase_sigma = -1.0;
    assert!(cfg.validate().is_err());
    cfg.umi_phase_sigma = 0.1;
    assert!(!cfg.is_ideal());
    cfg.depolarizing_p = 1.5;
    assert!(cfg.validate().is_err());
}

#[test]
fn streams_are_stable_and_sensitive_to_every_key_part() {
    let draw = |seed, domain, ix: &[u64]| {
        let mut rng = stream(seed, domain, ix);
        (0..4).map(|_| rng.gen::<u64>()).collect::<Vec<_>>()
    };
    let a = draw(5, DOMAIN_COUNTS, &[1, 2, 3]);
    assert_eq!(a, draw(5, DOMAIN_COUNTS, &[1, 2, 3]));
    assert_ne!(a, draw(6, DOMAIN_COUNTS, &[1, 2, 3]));
    assert_ne!(a, draw(5, DOMAIN_NOISE, &[1, 2, 3]));
    assert_ne!(a, draw(5, DOMAIN_COUNTS, &[1, 2, 4]));
    assert_ne!(a, draw(5, DOMAIN_COUNTS, &[1, 2]));
}

#[test]
fn haar_unitaries_and_random_states_are_well_formed() {
    let mut rng = stream(77, DOMAIN_COUNTS, &[0]);
    for dim in [2usize, 4] {
        let u = haar_unitary(dim, &mut rng);
        let v = haar_unitary(dim, &mut rng);
        assert!(u.unitarity_deviation() < 1e-10);
        assert!(cusim::linalg::max_abs_diff(u.entries(), v.entries()) > 1e-3);
        let s = random_state(dim, &mut rng);
        assert!(s.is_normalized());
        assert_eq!(s.dim(), dim);
    }
}
