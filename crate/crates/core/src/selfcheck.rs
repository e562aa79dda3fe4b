//! Runtime invariant battery.
//!
//! Every check here is a structural identity the library must satisfy
//! regardless of inputs: norms, unitarity, protocol equivalences, estimator
//! round trips. The CLI exposes the battery as `verify`; tests call
//! [`run_all`] directly. Checks draw their randomness from a dedicated
//! stream so results are reproducible per seed.

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;

use crate::interferometer::{effective_cu, ideal_cu, run_pipeline, InterferometerSettings};
use crate::linalg::{
    equal_up_to_global_phase, pauli_expand, psd_sqrt, tensor_product_states, Operator, StateVector,
};
use crate::noise::{depolarize, sample_noisy_settings, NoiseConfig};
use crate::optics::{
    gate, gate_plate_recipe, hwp, prep_state, qwp, solve_prep_angles, stack_operator,
    verify_cs_decomposition, GateName, WaveplateSetting,
};
use crate::remote::{rc_operator, rc_projection, rc_state_prep, RcCoefficients, RcOutputState};
use crate::rng::{haar_unitary, random_state, stream, DOMAIN_SELFCHECK};
use crate::tomography::{
    born_probabilities, ideal_chi, linear_inversion_chi_from_probabilities, mle_chi,
    process_fidelity, simulate_counts, Channel, TomographyDesign,
};

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn pass(name: &'static str, detail: impl Into<String>) -> Self {
        CheckResult {
            name,
            passed: true,
            detail: detail.into(),
        }
    }

    fn fail(name: &'static str, detail: impl Into<String>) -> Self {
        CheckResult {
            name,
            passed: false,
            detail: detail.into(),
        }
    }

    fn from_error(name: &'static str, err: crate::Error) -> Self {
        CheckResult::fail(name, format!("error: {err}"))
    }
}

fn check_rng(seed: u64, index: u64) -> ChaCha8Rng {
    stream(seed, DOMAIN_SELFCHECK, &[index])
}

macro_rules! try_check {
    ($name:expr, $expr:expr) => {
        match $expr {
            Ok(v) => v,
            Err(e) => return CheckResult::from_error($name, e),
        }
    };
}

fn check_plate_identities() -> CheckResult {
    const NAME: &str = "plate identities";
    let ident = try_check!(NAME, Operator::identity(2));
    let mut worst = 0.0f64;
    for k in 0..24 {
        let theta = -90.0 + 7.5 * k as f64;
        let h = hwp(theta);
        worst = worst.max(h.unitarity_deviation());
        worst = worst.max(qwp(theta).unitarity_deviation());
        let sq = try_check!(NAME, h.mul(&h));
        let dev = crate::linalg::max_abs_diff(sq.entries(), ident.entries());
        worst = worst.max(dev);
        let qq = try_check!(NAME, qwp(theta).mul(&qwp(theta)));
        let hv = crate::linalg::max_abs_diff(qq.entries(), hwp(theta).entries());
        worst = worst.max(hv);
    }
    if worst < 1e-10 {
        CheckResult::pass(NAME, format!("max deviation {worst:.2e}"))
    } else {
        CheckResult::fail(NAME, format!("max deviation {worst:.2e}"))
    }
}

fn check_gate_recipes() -> CheckResult {
    const NAME: &str = "gate plate recipes";
    let mut failures = Vec::new();
    for name in GateName::ALL {
        let Some(plates) = gate_plate_recipe(name) else {
            continue;
        };
        let built = stack_operator(&plates);
        if !equal_up_to_global_phase(&built, &gate(name), 1e-10) {
            failures.push(name.to_string());
        }
    }
    if failures.is_empty() {
        CheckResult::pass(NAME, "all single-qubit recipes match their gates")
    } else {
        CheckResult::fail(NAME, format!("recipes off target: {}", failures.join(", ")))
    }
}

fn check_cs_decomposition() -> CheckResult {
    const NAME: &str = "controlled-S decomposition";
    if verify_cs_decomposition() {
        CheckResult::pass(NAME, "CNOT/T decomposition reproduces controlled-S")
    } else {
        CheckResult::fail(NAME, "decomposition does not match controlled-S")
    }
}

fn check_prep_solver(seed: u64) -> CheckResult {
    const NAME: &str = "preparation angle solver";
    let mut rng = check_rng(seed, 1);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let target = random_state(2, &mut rng);
        let setting = try_check!(NAME, solve_prep_angles(&target));
        let achieved = prep_state(&setting);
        let overlap = try_check!(NAME, target.inner(&achieved)).norm();
        worst = worst.max(1.0 - overlap * overlap);
    }
    if worst <= 1e-8 {
        CheckResult::pass(NAME, format!("worst infidelity {worst:.2e} over 10 targets"))
    } else {
        CheckResult::fail(NAME, format!("worst infidelity {worst:.2e}"))
    }
}

fn check_cu_synthesis(seed: u64) -> CheckResult {
    const NAME: &str = "controlled-unitary synthesis";
    let mut rng = check_rng(seed, 2);
    let mut worst_overlap = 1.0f64;
    let mut worst_success = 0.0f64;
    for _ in 0..20 {
        let u0 = haar_unitary(2, &mut rng);
        let u1 = haar_unitary(2, &mut rng);
        let settings = try_check!(NAME, InterferometerSettings::new(u0.clone(), u1.clone()));
        let got = try_check!(NAME, effective_cu(&settings));
        let ideal = try_check!(NAME, ideal_cu(&u0, &u1));
        let tr = try_check!(NAME, got.dagger().mul(&ideal)).trace();
        worst_overlap = worst_overlap.min(tr.norm() / 4.0);
        let input = random_state(4, &mut rng);
        let (_, success) = try_check!(NAME, run_pipeline(&input, &settings));
        worst_success = worst_success.max((success - 0.25).abs());
    }
    if worst_overlap >= 1.0 - 1e-10 && worst_success <= 1e-12 {
        CheckResult::pass(
            NAME,
            format!(
                "overlap ≥ 1-{:.1e}, success within {:.1e} of 1/4",
                1.0 - worst_overlap,
                worst_success
            ),
        )
    } else {
        CheckResult::fail(
            NAME,
            format!(
                "worst overlap {worst_overlap:.12}, success deviation {worst_success:.2e}"
            ),
        )
    }
}

fn check_pipeline_norm(seed: u64) -> CheckResult {
    const NAME: &str = "post-selection norms";
    let mut rng = check_rng(seed, 3);
    for _ in 0..10 {
        let u0 = haar_unitary(2, &mut rng);
        let u1 = haar_unitary(2, &mut rng);
        let settings = try_check!(NAME, InterferometerSettings::new(u0, u1))
            .with_phases(0.3, -1.1);
        let input = random_state(4, &mut rng);
        let (kept, success) = try_check!(NAME, run_pipeline(&input, &settings));
        if success > 1.0 + 1e-12 {
            return CheckResult::fail(NAME, format!("success probability {success} exceeds 1"));
        }
        if (kept.norm_sq() - success).abs() > 1e-12 {
            return CheckResult::fail(NAME, "post-selected norm disagrees with success weight");
        }
        if (success - 0.25).abs() > 1e-12 {
            return CheckResult::fail(
                NAME,
                format!("unitary-arm success {success} is not 1/4"),
            );
        }
    }
    CheckResult::pass(NAME, "success weight equals kept norm and 1/4 for unitary arms")
}

fn check_interferometer_phases(seed: u64) -> CheckResult {
    const NAME: &str = "interferometer phase action";
    let mut rng = check_rng(seed, 4);
    let u0 = haar_unitary(2, &mut rng);
    let u1 = haar_unitary(2, &mut rng);
    let phi_a = 0.7;
    let phi_b = -0.4;
    let settings = try_check!(NAME, InterferometerSettings::new(u0.clone(), u1.clone()))
        .with_phases(phi_a, phi_b);
    let effective = try_check!(NAME, crate::interferometer::effective_cu_unchecked(&settings));
    let phase = Complex64::from_polar(1.0, phi_a + phi_b);
    let mut expected = try_check!(NAME, ideal_cu(&u0, &u1)).entries().clone();
    for r in 2..4 {
        for c in 2..4 {
            expected[(r, c)] *= phase;
        }
    }
    let dev = crate::linalg::max_abs_diff(effective.entries(), &expected);
    if dev < 1e-10 {
        CheckResult::pass(NAME, "phases multiply the lower block as exp(i(φ_UMI+φ_UMZI))")
    } else {
        CheckResult::fail(NAME, format!("block phase deviation {dev:.2e}"))
    }
}

fn check_protocol_equivalence(seed: u64) -> CheckResult {
    const NAME: &str = "remote protocol equivalence";
    let mut rng = check_rng(seed, 5);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let u0 = haar_unitary(2, &mut rng);
        let u1 = haar_unitary(2, &mut rng);
        let target = random_state(2, &mut rng);
        let g = random_state(2, &mut rng);
        let cf = try_check!(
            NAME,
            RcCoefficients::new(g.amplitudes()[0], g.amplitudes()[1])
        );
        let a = try_check!(NAME, rc_state_prep(&cf, &u0, &u1, &target));
        let b = try_check!(NAME, rc_projection(&cf, &u0, &u1, &target));
        worst = worst.max((a.success_prob - b.success_prob).abs());
        match (&a.output_state, &b.output_state) {
            (RcOutputState::State(sa), RcOutputState::State(sb)) => {
                let overlap = try_check!(NAME, sa.inner(sb)).norm();
                worst = worst.max(1.0 - overlap);
            }
            (RcOutputState::Annihilated, RcOutputState::Annihilated) => {}
            _ => return CheckResult::fail(NAME, "protocols disagree about annihilation"),
        }
        let expected = {
            let op = try_check!(NAME, rc_operator(&cf, &u0, &u1));
            let out = try_check!(NAME, op.apply(&target));
            out.norm_sq() / 8.0
        };
        worst = worst.max((a.success_prob - expected).abs());
    }
    if worst <= 1e-12 {
        CheckResult::pass(NAME, format!("max deviation {worst:.2e} over 20 draws"))
    } else {
        CheckResult::fail(NAME, format!("max deviation {worst:.2e}"))
    }
}

fn check_annihilation() -> CheckResult {
    const NAME: &str = "annihilation handling";
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    let cf = try_check!(NAME, RcCoefficients::real(inv, -inv));
    let outcome = try_check!(
        NAME,
        rc_state_prep(&cf, &gate(GateName::I), &gate(GateName::I), &StateVector::ket_plus())
    );
    match outcome.output_state {
        RcOutputState::Annihilated => {
            if outcome.success_prob == 0.0 {
                CheckResult::pass(NAME, "destructive combination reports annihilation")
            } else {
                CheckResult::fail(NAME, "annihilated outcome kept nonzero success")
            }
        }
        RcOutputState::State(_) => CheckResult::fail(NAME, "expected annihilated output"),
    }
}

fn check_pauli_round_trip(seed: u64) -> CheckResult {
    const NAME: &str = "pauli expansion round trip";
    let mut rng = check_rng(seed, 6);
    for dim in [2usize, 4] {
        let u = haar_unitary(dim, &mut rng);
        let coeffs = try_check!(NAME, pauli_expand(&u));
        let back = coeffs.reconstruct();
        let dev = crate::linalg::max_abs_diff(&back, u.entries());
        if dev > 1e-10 {
            return CheckResult::fail(NAME, format!("dim {dim} deviation {dev:.2e}"));
        }
    }
    CheckResult::pass(NAME, "expansion and reconstruction agree")
}

fn check_psd_sqrt(seed: u64) -> CheckResult {
    const NAME: &str = "matrix square root";
    let mut rng = check_rng(seed, 7);
    let g = crate::rng::random_hermitian(4, &mut rng);
    let sq = &g * &g;
    let a = try_check!(NAME, Operator::hermitian((sq.adjoint() + &sq).scale(0.5)));
    let root = try_check!(NAME, psd_sqrt(&a));
    let back = try_check!(NAME, root.mul(&root));
    let dev = crate::linalg::max_abs_diff(back.entries(), a.entries());
    if dev < 1e-8 {
        CheckResult::pass(NAME, format!("root squares back within {dev:.2e}"))
    } else {
        CheckResult::fail(NAME, format!("root squares back within {dev:.2e}"))
    }
}

fn check_born_rows(seed: u64) -> CheckResult {
    const NAME: &str = "born probability structure";
    let mut rng = check_rng(seed, 8);
    let design = TomographyDesign::single_qubit();
    let u = haar_unitary(2, &mut rng);
    let table = try_check!(NAME, born_probabilities(&Channel::Op(u), &design));
    for i in 0..design.n_preps() {
        for j in 0..design.n_settings() {
            let w = table.row_weight(i, j);
            if (w - 1.0).abs() > 1e-9 {
                return CheckResult::fail(
                    NAME,
                    format!("unitary channel row weight {w} at prep {i}, setting {j}"),
                );
            }
            let sum: f64 = (0..design.n_outcomes())
                .map(|k| table.prob(i, j, k))
                .sum();
            if (sum - 1.0).abs() > 1e-9 {
                return CheckResult::fail(NAME, "conditional row does not sum to one");
            }
        }
    }
    CheckResult::pass(NAME, "unitary channel rows are normalized with unit weight")
}

fn check_chi_round_trip(seed: u64) -> CheckResult {
    const NAME: &str = "linear inversion round trip";
    let mut rng = check_rng(seed, 9);
    let mut worst = 0.0f64;
    for dim in [2usize, 4] {
        let design = try_check!(NAME, TomographyDesign::standard(if dim == 2 { 1 } else { 2 }));
        let u = haar_unitary(dim, &mut rng);
        let ideal = try_check!(NAME, ideal_chi(&u));
        let table = try_check!(NAME, born_probabilities(&Channel::Op(u), &design));
        let li = try_check!(NAME, linear_inversion_chi_from_probabilities(&table, &design));
        let f = try_check!(NAME, process_fidelity(&li, &ideal));
        worst = worst.max(1.0 - f);
    }
    if worst <= 1e-8 {
        CheckResult::pass(NAME, format!("worst infidelity {worst:.2e}"))
    } else {
        CheckResult::fail(NAME, format!("worst infidelity {worst:.2e}"))
    }
}

fn check_mle_small(seed: u64) -> CheckResult {
    const NAME: &str = "maximum likelihood sanity";
    let mut rng = check_rng(seed, 10);
    let design = TomographyDesign::single_qubit();
    let u = haar_unitary(2, &mut rng);
    let ideal = try_check!(NAME, ideal_chi(&u));
    let table = try_check!(NAME, born_probabilities(&Channel::Op(u.clone()), &design));
    let counts = try_check!(NAME, simulate_counts(&table, 200_000, seed ^ 0x5eed));
    let outcome = try_check!(NAME, mle_chi(&counts, &design));
    let f = try_check!(NAME, process_fidelity(&outcome.chi, &ideal));
    let tr = outcome.chi.entries().trace();
    if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
        return CheckResult::fail(NAME, format!("estimate trace {tr}"));
    }
    if f >= 0.99 {
        CheckResult::pass(
            NAME,
            format!(
                "fidelity {f:.5} after {} iterations (converged: {})",
                outcome.iterations, outcome.converged
            ),
        )
    } else {
        CheckResult::fail(NAME, format!("fidelity {f:.5}"))
    }
}

fn check_depolarize(seed: u64) -> CheckResult {
    const NAME: &str = "depolarizing map";
    let mut rng = check_rng(seed, 11);
    let state = random_state(4, &mut rng);
    let rho = state.density();
    let out = try_check!(NAME, depolarize(&rho, 0.3));
    let tr = out.trace();
    if (tr.re - 1.0).abs() > 1e-12 && tr.im.abs() < 1e-12 {
        return CheckResult::fail(NAME, format!("trace not preserved: {tr}"));
    }
    let herm = crate::linalg::max_abs_diff(&out.adjoint(), &out);
    if herm > 1e-12 {
        return CheckResult::fail(NAME, format!("output not Hermitian ({herm:.2e})"));
    }
    let ident = try_check!(NAME, depolarize(&rho, 0.0));
    if crate::linalg::max_abs_diff(&ident, &rho) > 0.0 {
        return CheckResult::fail(NAME, "p = 0 must leave the state untouched");
    }
    CheckResult::pass(NAME, "trace preserved, Hermitian, identity at p = 0")
}

fn check_noise_determinism(seed: u64) -> CheckResult {
    const NAME: &str = "noise reproducibility";
    let id = try_check!(NAME, Operator::identity(2));
    let base = try_check!(NAME, InterferometerSettings::new(id.clone(), id));
    let pairs = [WaveplateSetting::new(10.0, 20.0); 4];
    let cfg = NoiseConfig {
        umi_phase_sigma: 0.05,
        umzi_phase_sigma: 0.05,
        waveplate_angle_sigma: 0.2,
        depolarizing_p: 0.0,
        seed,
    };
    let a = try_check!(NAME, sample_noisy_settings(&base, &pairs, &cfg, 7));
    let b = try_check!(NAME, sample_noisy_settings(&base, &pairs, &cfg, 7));
    let c = try_check!(NAME, sample_noisy_settings(&base, &pairs, &cfg, 8));
    let same = a.interferometer.umi_phase == b.interferometer.umi_phase
        && a.waveplates
            .iter()
            .zip(b.waveplates.iter())
            .all(|(x, y)| x.hwp_angle() == y.hwp_angle() && x.qwp_angle() == y.qwp_angle());
    let differs = a.interferometer.umi_phase != c.interferometer.umi_phase;
    let ideal = NoiseConfig::ideal(seed);
    let clean = try_check!(NAME, sample_noisy_settings(&base, &pairs, &ideal, 7));
    let untouched = clean
        .waveplates
        .iter()
        .zip(pairs.iter())
        .all(|(x, y)| x.hwp_angle() == y.hwp_angle() && x.qwp_angle() == y.qwp_angle())
        && clean.interferometer.umi_phase == 0.0;
    if same && differs && untouched {
        CheckResult::pass(NAME, "draws reproduce per run index, zero sigma is exact")
    } else {
        CheckResult::fail(
            NAME,
            format!("same={same} differs={differs} untouched={untouched}"),
        )
    }
}

fn check_tensor_states(seed: u64) -> CheckResult {
    const NAME: &str = "tensor product states";
    let mut rng = check_rng(seed, 12);
    let a = random_state(2, &mut rng);
    let b = random_state(2, &mut rng);
    let joint = try_check!(NAME, tensor_product_states(&a, &b));
    if (joint.norm_sq() - 1.0).abs() > 1e-12 {
        return CheckResult::fail(NAME, "product of unit states must be a unit state");
    }
    let a00 = joint.amplitudes()[0];
    let expect = a.amplitudes()[0] * b.amplitudes()[0];
    if (a00 - expect).norm() > 1e-14 {
        return CheckResult::fail(NAME, "component ordering broken");
    }
    CheckResult::pass(NAME, "norm and component ordering hold")
}

/// Runs every registered check with randomness derived from `seed`.
pub fn run_all(seed: u64) -> Vec<CheckResult> {
    vec![
        check_plate_identities(),
        check_gate_recipes(),
        check_cs_decomposition(),
        check_prep_solver(seed),
        check_cu_synthesis(seed),
        check_pipeline_norm(seed),
        check_interferometer_phases(seed),
        check_protocol_equivalence(seed),
        check_annihilation(),
        check_pauli_round_trip(seed),
        check_psd_sqrt(seed),
        check_born_rows(seed),
        check_chi_round_trip(seed),
        check_mle_small(seed),
        check_depolarize(seed),
        check_noise_determinism(seed),
        check_tensor_states(seed),
    ]
}
