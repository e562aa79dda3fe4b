//! Remote-controlled gate oracles: the effective operator αU₀+βU₁, both
//! protocols run through the physical pipeline, and their exact agreement.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};

use cusim::linalg::StateVector;
use cusim::optics::{gate, GateName};
use cusim::remote::{rc_operator, rc_projection, rc_state_prep, RcCoefficients};
use cusim::rng::{haar_unitary, random_state};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn coeff_a() -> RcCoefficients {
    RcCoefficients::real((2.0f64 / 3.0).sqrt(), (1.0f64 / 3.0).sqrt()).unwrap()
}

fn coeff_b() -> RcCoefficients {
    RcCoefficients::real(std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2)
        .unwrap()
}

fn plus() -> StateVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    StateVector::qubit(c(s, 0.0), c(s, 0.0)).unwrap()
}

#[test]
fn coefficients_must_be_normalized() {
    assert!(RcCoefficients::real(1.0, 1.0).is_err());
    assert!(RcCoefficients::real(0.6, 0.8).is_ok());
    assert!(RcCoefficients::new(c(0.0, 0.6), c(0.8, 0.0)).is_ok());
}

#[test]
fn rc_operator_a_matrix() {
    let op = rc_operator(&coeff_a(), &gate(GateName::I), &gate(GateName::X)).unwrap();
    let a = (2.0f64 / 3.0).sqrt();
    let b = (1.0f64 / 3.0).sqrt();
    let e = op.entries();
    assert!((e[(0, 0)] - c(a, 0.0)).norm() < 1e-12);
    assert!((e[(0, 1)] - c(b, 0.0)).norm() < 1e-12);
    assert!((e[(1, 0)] - c(b, 0.0)).norm() < 1e-12);
    assert!((e[(1, 1)] - c(a, 0.0)).norm() < 1e-12);
    assert!(!op.is_unitary());
}

#[test]
fn rc_operator_degenerates_to_single_arm() {
    let op = rc_operator(
        &RcCoefficients::real(1.0, 0.0).unwrap(),
        &gate(GateName::I),
        &gate(GateName::X),
    )
    .unwrap();
    assert!((op.entries() - gate(GateName::I).entries()).norm() < 1e-12);
    assert!(op.is_unitary());
}

#[test]
fn rc_operator_b_is_rank_one() {
    let op = rc_operator(&coeff_b(), &gate(GateName::I), &gate(GateName::X)).unwrap();
    // (I−X)/√2 = √2·|−⟩⟨−|
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let e = op.entries();
    assert!((e[(0, 0)] - c(s, 0.0)).norm() < 1e-12);
    assert!((e[(0, 1)] - c(-s, 0.0)).norm() < 1e-12);
    assert!(!op.is_unitary());
    let svd = e.clone().svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    assert!((sv[0] - 2.0f64.sqrt()).abs() < 1e-12);
    assert!(sv[1].abs() < 1e-12);
}

#[test]
fn state_prep_example_a() {
    let out = rc_state_prep(&coeff_a(), &gate(GateName::I), &gate(GateName::X), &StateVector::ket0())
        .unwrap();
    assert!((out.success_prob - 0.125).abs() < 1e-12);
    assert!((out.coincidence_prob - 0.25).abs() < 1e-12);
    assert!((out.projection_prob - 0.5).abs() < 1e-12);
    let expect =
        StateVector::qubit(c((2.0f64 / 3.0).sqrt(), 0.0), c((1.0f64 / 3.0).sqrt(), 0.0)).unwrap();
    let got = out.output_state.state().unwrap();
    assert!(got.inner(&expect).unwrap().norm() > 1.0 - 1e-12);
}

#[test]
fn state_prep_annihilates_the_dark_input() {
    let out = rc_state_prep(&coeff_b(), &gate(GateName::I), &gate(GateName::X), &plus()).unwrap();
    assert!(out.output_state.state().is_none());
    assert_eq!(out.success_prob, 0.0);
}

#[test]
fn single_branch_prep_applies_u0() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(17);
    for _ in 0..10 {
        let u0 = haar_unitary(2, &mut rng);
        let psi = random_state(2, &mut rng);
        let out = rc_state_prep(
            &RcCoefficients::real(1.0, 0.0).unwrap(),
            &u0,
            &haar_unitary(2, &mut rng),
            &psi,
        )
        .unwrap();
        assert!((out.success_prob - 0.125).abs() < 1e-12);
        let expect = u0.apply(&psi).unwrap();
        assert!(out.output_state.state().unwrap().inner(&expect).unwrap().norm() > 1.0 - 1e-12);
    }
}

#[test]
fn projection_example_b_on_ket0() {
    let out =
        rc_projection(&coeff_b(), &gate(GateName::I), &gate(GateName::X), &StateVector::ket0())
            .unwrap();
    assert!((out.success_prob - 0.125).abs() < 1e-12);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let minus = StateVector::qubit(c(s, 0.0), c(-s, 0.0)).unwrap();
    assert!(out.output_state.state().unwrap().inner(&minus).unwrap().norm() > 1.0 - 1e-12);
}

#[test]
fn balanced_identity_projection_passes_any_state() {
    // Both branches identity and coefficients (1/√2, 1/√2): the effective
    // operator is √2·I, so the control projection interferes constructively
    // and the success probability is ‖√2·ψ‖²/8 = 1/4, double the
    // unit-operator baseline of 1/8.
    let mut rng = rand::rngs::StdRng::seed_from_u64(23);
    let cf = RcCoefficients::real(std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2)
        .unwrap();
    for _ in 0..10 {
        let psi = random_state(2, &mut rng);
        let out = rc_projection(&cf, &gate(GateName::I), &gate(GateName::I), &psi).unwrap();
        assert!((out.success_prob - 0.25).abs() < 1e-12);
        assert!(out.output_state.state().unwrap().inner(&psi).unwrap().norm() > 1.0 - 1e-12);
    }
}

fn random_coefficients<R: Rng>(rng: &mut R) -> RcCoefficients {
    let alpha = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let beta = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
    RcCoefficients::new(alpha / norm, beta / norm).unwrap()
}

#[test]
fn protocols_agree_over_random_draws() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(4096);
    for trial in 0..100 {
        let cf = random_coefficients(&mut rng);
        let u0 = haar_unitary(2, &mut rng);
        let u1 = haar_unitary(2, &mut rng);
        let psi = random_state(2, &mut rng);
        let prep = rc_state_prep(&cf, &u0, &u1, &psi).unwrap();
        let proj = rc_projection(&cf, &u0, &u1, &psi).unwrap();
        assert!(
            (prep.success_prob - proj.success_prob).abs() < 1e-12,
            "trial {trial}: success probabilities differ"
        );
        match (prep.output_state.state(), proj.output_state.state()) {
            (Some(a), Some(b)) => {
                assert!(a.inner(b).unwrap().norm() > 1.0 - 1e-12, "trial {trial}")
            }
            (None, None) => {}
            _ => panic!("trial {trial}: protocols disagree on annihilation"),
        }

        // Both protocols report ‖U_RC ψ‖²/8.
        let op = rc_operator(&cf, &u0, &u1).unwrap();
        let expected = op.apply(&psi).unwrap().norm_sq() / 8.0;
        assert!((prep.success_prob - expected).abs() < 1e-12, "trial {trial}");
    }
}

#[test]
fn unitary_combinations_succeed_with_one_eighth_regardless_of_input() {
    // cos(t)·U₀ + sin(t)·(iU₀) = e^{it}·U₀ is exactly unitary.
    let mut rng = rand::rngs::StdRng::seed_from_u64(555);
    let u0 = haar_unitary(2, &mut rng);
    let u1 = cusim::linalg::Operator::unitary(u0.entries() * c(0.0, 1.0)).unwrap();
    let t: f64 = 0.7;
    let cf = RcCoefficients::real(t.cos(), t.sin()).unwrap();
    let op = rc_operator(&cf, &u0, &u1).unwrap();
    assert!(op.is_unitary());
    for _ in 0..10 {
        let psi = random_state(2, &mut rng);
        let out = rc_state_prep(&cf, &u0, &u1, &psi).unwrap();
        assert!((out.success_prob - 0.125).abs() < 1e-12);
    }
}

#[test]
fn proportional_arms_give_input_independent_success() {
    // U₁ = e^{iφ}U₀ makes the effective operator (α+βe^{iφ})·U₀: scaled
    // unitary, so the success probability |α+βe^{iφ}|²/8 ignores the input.
    let mut rng = rand::rngs::StdRng::seed_from_u64(556);
    let u0 = haar_unitary(2, &mut rng);
    let phi: f64 = 1.1;
    let u1 = cusim::linalg::Operator::unitary(u0.entries() * c(phi.cos(), phi.sin())).unwrap();
    let cf = random_coefficients(&mut rng);
    let expected = (cf.alpha() + cf.beta() * c(phi.cos(), phi.sin())).norm_sqr() / 8.0;
    for _ in 0..10 {
        let psi = random_state(2, &mut rng);
        let out = rc_state_prep(&cf, &u0, &u1, &psi).unwrap();
        assert!((out.success_prob - expected).abs() < 1e-12);
    }
}

#[test]
fn output_state_ignores_a_common_coefficient_phase() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(808);
    let cf = random_coefficients(&mut rng);
    let phase = c(0.0, 0.9).exp();
    let rotated = RcCoefficients::new(cf.alpha() * phase, cf.beta() * phase).unwrap();
    let u0 = haar_unitary(2, &mut rng);
    let u1 = haar_unitary(2, &mut rng);
    let psi = random_state(2, &mut rng);
    let a = rc_state_prep(&cf, &u0, &u1, &psi).unwrap();
    let b = rc_state_prep(&rotated, &u0, &u1, &psi).unwrap();
    assert!((a.success_prob - b.success_prob).abs() < 1e-12);
    let (sa, sb) = (a.output_state.state().unwrap(), b.output_state.state().unwrap());
    assert!(sa.inner(sb).unwrap().norm() > 1.0 - 1e-12);
}
