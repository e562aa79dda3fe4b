//! Tomography of the remote-controlled channels, which are the non-unitary
//! stress cases: U_RC,A rescales preparation rows unevenly and U_RC,B
//! annihilates one preparation outright.

use num_complex::Complex64;

use cusim::optics::{gate, GateName};
use cusim::remote::{rc_operator, RcCoefficients};
use cusim::tomography::{
    born_probabilities, ideal_chi, linear_inversion_chi, linear_inversion_chi_from_probabilities,
    mle_chi, process_fidelity, simulate_counts, Channel, TomographyDesign,
};

fn coeff_a() -> RcCoefficients {
    RcCoefficients::new(
        Complex64::new((2.0f64 / 3.0).sqrt(), 0.0),
        Complex64::new((1.0f64 / 3.0).sqrt(), 0.0),
    )
    .unwrap()
}

fn coeff_b() -> RcCoefficients {
    RcCoefficients::real(std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2)
        .unwrap()
}

#[test]
fn probability_inversion_recovers_rc_a_exactly() {
    let op = rc_operator(&coeff_a(), &gate(GateName::I), &gate(GateName::X)).unwrap();
    let design = TomographyDesign::single_qubit();
    let table = born_probabilities(&Channel::Op(op.clone()), &design).unwrap();
    let chi = linear_inversion_chi_from_probabilities(&table, &design).unwrap();
    // Rank-1 ideal: outer product of the Pauli coefficients (√(2/3), √(1/3), 0, 0).
    let e = chi.entries();
    assert!((e[(0, 0)].re - 2.0 / 3.0).abs() < 1e-10);
    assert!((e[(1, 1)].re - 1.0 / 3.0).abs() < 1e-10);
    assert!((e[(0, 1)].re - 2.0f64.sqrt() / 3.0).abs() < 1e-10);
    assert!((e[(1, 0)].re - 2.0f64.sqrt() / 3.0).abs() < 1e-10);
    let f = process_fidelity(&chi, &ideal_chi(&op).unwrap()).unwrap();
    assert!(f >= 1.0 - 1e-8, "fidelity {f}");
}

#[test]
fn count_inversion_of_rc_a_rejects_the_unphysical_interpolant() {
    // A count table normalizes every row to its own total, so the uneven row
    // weights of U_RC,A are lost. The least-squares fit of those conditional
    // frequencies lands on a matrix with a large negative eigenvalue, and
    // validation refuses it. The probability-table path above keeps the row
    // weights and does not have this problem; the likelihood estimator
    // handles the count case.
    let op = rc_operator(&coeff_a(), &gate(GateName::I), &gate(GateName::X)).unwrap();
    let design = TomographyDesign::single_qubit();
    let table = born_probabilities(&Channel::Op(op), &design).unwrap();
    let shots = 10_000_000;
    let counts = simulate_counts(&table, shots, 5).unwrap();
    let err = linear_inversion_chi(&counts, &design).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("eigenvalue"), "unexpected error: {msg}");
}

#[test]
fn mle_on_rc_a_counts_reaches_the_ideal() {
    let op = rc_operator(&coeff_a(), &gate(GateName::I), &gate(GateName::X)).unwrap();
    let design = TomographyDesign::single_qubit();
    let table = born_probabilities(&Channel::Op(op.clone()), &design).unwrap();
    let counts = simulate_counts(&table, 100_000, 7).unwrap();
    let outcome = mle_chi(&counts, &design).unwrap();
    assert!(outcome.converged);
    let f = process_fidelity(&outcome.chi, &ideal_chi(&op).unwrap()).unwrap();
    assert!(f >= 0.995, "fidelity {f}");
}

#[test]
fn mle_on_rc_b_counts_recovers_the_rank_one_ideal() {
    // The |+⟩ rows carry zero counts; the zero-row term of the likelihood
    // pins the annihilated direction and the reconstruction comes back
    // rank-1 at the ideal chi: entries ±1/2 over the I/X block.
    let op = rc_operator(&coeff_b(), &gate(GateName::I), &gate(GateName::X)).unwrap();
    let design = TomographyDesign::single_qubit();
    let table = born_probabilities(&Channel::Op(op.clone()), &design).unwrap();
    let counts = simulate_counts(&table, 100_000, 7).unwrap();
    let has_empty_row = (0..3).any(|j| (0..2).all(|k| counts.count(2, j, k) == 0));
    assert!(has_empty_row);
    let outcome = mle_chi(&counts, &design).unwrap();
    assert!(outcome.converged);
    let ideal = ideal_chi(&op).unwrap();
    let f = process_fidelity(&outcome.chi, &ideal).unwrap();
    assert!(f >= 0.995, "fidelity {f}");
    let e = outcome.chi.entries();
    assert!((e[(0, 0)].re - 0.5).abs() < 0.01);
    assert!((e[(1, 1)].re - 0.5).abs() < 0.01);
    assert!((e[(0, 1)].re + 0.5).abs() < 0.01);
    // Rank-1 within tolerance: second eigenvalue is noise-sized.
    let eigs = outcome.chi.entries().clone().symmetric_eigen().eigenvalues;
    let mut sorted: Vec<f64> = eigs.iter().copied().collect();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    assert!(sorted[0] > 0.99);
    assert!(sorted[1].abs() < 0.01);
}
