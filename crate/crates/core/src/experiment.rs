//! End-to-end simulated experiments: plate settings, interferometers,
//! post-selection, measurement, counts.
//!
//! This layer is the physical counterpart of
//! [`born_probabilities`](crate::tomography::born_probabilities): instead of
//! applying an abstract channel, it prepares every tomography input with
//! wave plates, runs the two-interferometer pipeline, applies the noise
//! draws of the run, projects onto plate-defined analyzer states and only
//! then hands conditional probabilities to the count simulator. With all
//! noise off the two paths agree to numerical precision.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::interferometer::{run_pipeline, InterferometerSettings};
use crate::linalg::{tensor_product_states, Operator, StateVector};
use crate::noise::{depolarize, jitter_plates, sample_noisy_settings_with_rng, NoiseConfig};
use crate::optics::{
    gate, gate_plate_recipe, prep_state, projection_state, solve_prep_angles,
    solve_projection_angles, stack_operator, GateName, Plate, WaveplateSetting,
};
use crate::remote::{rc_operator, RcCoefficients};
use crate::rng::{stream, DOMAIN_NOISE};
use crate::tomography::{
    simulate_counts, single_qubit_basis_states, single_qubit_prep_states, CountTable,
    ProbabilityTable, TomographyDesign,
};
use crate::{Error, Result};

/// One interferometer arm: a library gate (with its physical plate stack) or
/// an explicit matrix (no plate model, so angle noise does not reach it).
#[derive(Debug, Clone)]
pub enum ArmSpec {
    Named(GateName),
    Matrix(Operator),
}

impl ArmSpec {
    pub fn operator(&self) -> Result<Operator> {
        match self {
            ArmSpec::Named(name) => {
                if name.is_two_qubit() {
                    return Err(Error::InvalidArgument(format!(
                        "{name} cannot sit in a single interferometer arm"
                    )));
                }
                Ok(gate(*name))
            }
            ArmSpec::Matrix(op) => {
                if op.dim() != 2 {
                    return Err(Error::Dimension("arm operators must be 2x2".into()));
                }
                if op.unitarity_deviation() > 1e-10 {
                    return Err(Error::InvalidMatrix("arm operators must be unitary".into()));
                }
                Ok(op.clone())
            }
        }
    }

    pub fn plates(&self) -> Option<Vec<Plate>> {
        match self {
            ArmSpec::Named(name) => gate_plate_recipe(*name),
            ArmSpec::Matrix(_) => None,
        }
    }
}

/// Which experiment runs on top of the interferometer pair.
#[derive(Debug, Clone)]
pub enum Protocol {
    /// Two-qubit process tomography of the post-selected gate itself.
    CuGate,
    /// Single-qubit tomography of αU₀+βU₁, control prepared as α|0⟩+β|1⟩
    /// and heralded on |+⟩.
    RcStatePrep(RcCoefficients),
    /// Single-qubit tomography of αU₀+βU₁, control fixed at |+⟩ and
    /// heralded on the analyzer encoding (α, β).
    RcProjection(RcCoefficients),
}

/// Full description of one simulated run.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub protocol: Protocol,
    pub u0: ArmSpec,
    pub u1: ArmSpec,
    pub noise: NoiseConfig,
    pub shots: u64,
    /// Seed of the count simulation (noise draws use `noise.seed`).
    pub seed: u64,
}

/// Everything the tomography and reporting layers need from a simulation.
#[derive(Debug, Clone)]
pub struct SimulatedExperiment {
    pub design: TomographyDesign,
    /// Conditional probabilities actually used for counting, including every
    /// noise effect of the run.
    pub probabilities: ProbabilityTable,
    pub counts: CountTable,
    /// Per-preparation success probability (coincidence × heralding),
    /// averaged over measurement settings.
    pub success_summary: Vec<f64>,
    /// The operation the run is supposed to implement: the 4×4 controlled
    /// unitary, or the 2×2 remote-controlled operator.
    pub target_operator: Operator,
}

/// Exact plate settings for the six canonical states; falls back to the
/// numeric solver for anything else. The exact entries matter: they keep
/// zero-noise runs at analytic precision, so channels that annihilate a
/// preparation produce exactly empty rows rather than solver-residual dust.
fn plate_pair_for_prep(target: &StateVector) -> Result<WaveplateSetting> {
    let canonical: [(StateVector, WaveplateSetting); 6] = [
        (StateVector::ket0(), WaveplateSetting::new(0.0, 0.0)),
        (StateVector::ket1(), WaveplateSetting::new(45.0, 0.0)),
        (StateVector::ket_plus(), WaveplateSetting::new(22.5, 45.0)),
        (StateVector::ket_minus(), WaveplateSetting::new(-22.5, 45.0)),
        (StateVector::ket_plus_i(), WaveplateSetting::new(22.5, 0.0)),
        (
            StateVector::qubit(
                Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                Complex64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2),
            )?,
            WaveplateSetting::new(-22.5, 0.0),
        ),
    ];
    for (state, setting) in &canonical {
        if target.inner(state)?.norm() >= 1.0 - 1e-12 {
            debug_assert!(
                target
                    .inner(&prep_state(setting))
                    .expect("dimension 2")
                    .norm()
                    >= 1.0 - 1e-12
            );
            return Ok(*setting);
        }
    }
    solve_prep_angles(target)
}

fn conj_state(state: &StateVector) -> Result<StateVector> {
    let amps: Vec<Complex64> = state.amplitudes().iter().map(|z| z.conj()).collect();
    StateVector::normalized(amps)
}

/// Analyzer counterpart of [`plate_pair_for_prep`].
fn plate_pair_for_projection(target: &StateVector) -> Result<WaveplateSetting> {
    match plate_pair_for_prep(&conj_state(target)?) {
        Ok(setting) => Ok(setting),
        Err(_) => solve_projection_angles(target),
    }
}

/// Both analyzer port states for a plate pair: index 0 is the transmitted
/// port (bra ⟨0|·hwp·qwp), index 1 the reflected port (bra ⟨1|·hwp·qwp).
fn analyzer_states(setting: &WaveplateSetting) -> [StateVector; 2] {
    let transmitted = projection_state(setting);
    let composite = crate::optics::qwp(setting.qwp_angle())
        .mul(&crate::optics::hwp(setting.hwp_angle()))
        .expect("2x2 product");
    let through = composite
        .apply(&StateVector::ket1())
        .expect("unitary on |1>");
    let reflected_amps: Vec<Complex64> =
        through.amplitudes().iter().map(|z| z.conj()).collect();
    let reflected = StateVector::normalized(reflected_amps).expect("conjugate of a unit vector");
    [transmitted, reflected]
}

fn projector4(control: &StateVector, target: &StateVector) -> Result<DMatrix<Complex64>> {
    let joint = tensor_product_states(control, target)?;
    Ok(joint.density())
}

struct PlatePlan {
    /// Control preparation pair per prep index (constant for RC protocols).
    control_preps: Vec<WaveplateSetting>,
    /// Target preparation pair per prep index.
    target_preps: Vec<WaveplateSetting>,
    /// Control analyzer pair per setting index (constant herald for RC).
    control_meas: Vec<WaveplateSetting>,
    /// Target analyzer pair per setting index.
    target_meas: Vec<WaveplateSetting>,
}

fn build_plan(protocol: &Protocol) -> Result<(TomographyDesign, PlatePlan)> {
    let single_preps = single_qubit_prep_states();
    let bases = single_qubit_basis_states();
    let prep_pairs: Vec<WaveplateSetting> = single_preps
        .iter()
        .map(plate_pair_for_prep)
        .collect::<Result<_>>()?;
    let meas_pairs: Vec<WaveplateSetting> = bases
        .iter()
        .map(|pair| plate_pair_for_projection(&pair[0]))
        .collect::<Result<_>>()?;

    match protocol {
        Protocol::CuGate => {
            let design = TomographyDesign::two_qubit();
            let mut control_preps = Vec::with_capacity(16);
            let mut target_preps = Vec::with_capacity(16);
            for pc in 0..4 {
                for pt in 0..4 {
                    control_preps.push(prep_pairs[pc]);
                    target_preps.push(prep_pairs[pt]);
                }
            }
            let mut control_meas = Vec::with_capacity(9);
            let mut target_meas = Vec::with_capacity(9);
            for sc in 0..3 {
                for st in 0..3 {
                    control_meas.push(meas_pairs[sc]);
                    target_meas.push(meas_pairs[st]);
                }
            }
            Ok((
                design,
                PlatePlan {
                    control_preps,
                    target_preps,
                    control_meas,
                    target_meas,
                },
            ))
        }
        Protocol::RcStatePrep(cf) => {
            let design = TomographyDesign::single_qubit();
            let control_prep = plate_pair_for_prep(&cf.control_state())?;
            let herald = plate_pair_for_projection(&StateVector::ket_plus())?;
            Ok((
                design,
                PlatePlan {
                    control_preps: vec![control_prep; 4],
                    target_preps: prep_pairs,
                    control_meas: vec![herald; 3],
                    target_meas: meas_pairs,
                },
            ))
        }
        Protocol::RcProjection(cf) => {
            let design = TomographyDesign::single_qubit();
            let control_prep = plate_pair_for_prep(&StateVector::ket_plus())?;
            // The herald must apply the bra α⟨0| + β⟨1|, i.e. project onto
            // the state with conjugated coefficients.
            let herald_state = StateVector::qubit(cf.alpha().conj(), cf.beta().conj())?;
            let herald = plate_pair_for_projection(&herald_state)?;
            Ok((
                design,
                PlatePlan {
                    control_preps: vec![control_prep; 4],
                    target_preps: prep_pairs,
                    control_meas: vec![herald; 3],
                    target_meas: meas_pairs,
                },
            ))
        }
    }
}

/// Runs the full physical simulation and count generation for a spec.
pub fn simulate_experiment(spec: &ExperimentSpec) -> Result<SimulatedExperiment> {
    spec.noise.validate()?;
    if spec.shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let u0 = spec.u0.operator()?;
    let u1 = spec.u1.operator()?;
    let base = InterferometerSettings::new(u0.clone(), u1.clone())?;
    let (design, plan) = build_plan(&spec.protocol)?;
    let target_operator = match &spec.protocol {
        Protocol::CuGate => crate::interferometer::ideal_cu(&u0, &u1)?,
        Protocol::RcStatePrep(cf) | Protocol::RcProjection(cf) => rc_operator(cf, &u0, &u1)?,
    };

    let n_preps = design.n_preps();
    let n_settings = design.n_settings();
    let n_outcomes = design.n_outcomes();
    let herald_only = !matches!(spec.protocol, Protocol::CuGate);

    let u0_plates = spec.u0.plates();
    let u1_plates = spec.u1.plates();

    let mut raw = vec![0.0; n_preps * n_settings * n_outcomes];
    for i in 0..n_preps {
        for j in 0..n_settings {
            let run_index = (i * n_settings + j) as u64;
            let mut rng = stream(spec.noise.seed, DOMAIN_NOISE, &[run_index]);
            let pairs = [
                plan.control_preps[i],
                plan.target_preps[i],
                plan.control_meas[j],
                plan.target_meas[j],
            ];
            let noisy = sample_noisy_settings_with_rng(&base, &pairs, &spec.noise, &mut rng);

            // Arm plates draw after the listed pairs, u0 stack then u1 stack.
            let u0_run = match &u0_plates {
                Some(plates) => stack_operator(&jitter_plates(
                    plates,
                    spec.noise.waveplate_angle_sigma,
                    &mut rng,
                )),
                None => u0.clone(),
            };
            let u1_run = match &u1_plates {
                Some(plates) => stack_operator(&jitter_plates(
                    plates,
                    spec.noise.waveplate_angle_sigma,
                    &mut rng,
                )),
                None => u1.clone(),
            };
            let settings = InterferometerSettings::new(u0_run, u1_run)?
                .with_phases(noisy.interferometer.umi_phase, noisy.interferometer.umzi_phase);

            let control_in = prep_state(&noisy.waveplates[0]);
            let target_in = prep_state(&noisy.waveplates[1]);
            let input = tensor_product_states(&control_in, &target_in)?;
            let (kept, weight) = run_pipeline(&input, &settings)?;

            let row = &mut raw[(i * n_settings + j) * n_outcomes..][..n_outcomes];
            if weight <= 1e-30 {
                continue;
            }
            let rho = kept.density().scale(1.0 / weight);
            let rho = depolarize(&rho, spec.noise.depolarizing_p)?.scale(weight);

            let control_ports = analyzer_states(&noisy.waveplates[2]);
            let target_ports = analyzer_states(&noisy.waveplates[3]);
            if herald_only {
                for (kt, port) in target_ports.iter().enumerate() {
                    let proj = projector4(&control_ports[0], port)?;
                    row[kt] = re_trace_product(&proj, &rho);
                }
            } else {
                for (kc, cport) in control_ports.iter().enumerate() {
                    for (kt, tport) in target_ports.iter().enumerate() {
                        let proj = projector4(cport, tport)?;
                        row[2 * kc + kt] = re_trace_product(&proj, &rho);
                    }
                }
            }
        }
    }

    let probabilities =
        ProbabilityTable::from_unconditional(&raw, n_preps, n_settings, n_outcomes)?;
    let mut success_summary = Vec::with_capacity(n_preps);
    for i in 0..n_preps {
        let mean = (0..n_settings)
            .map(|j| probabilities.row_weight(i, j))
            .sum::<f64>()
            / n_settings as f64;
        success_summary.push(mean);
    }
    let counts = simulate_counts(&probabilities, spec.shots, spec.seed)?;

    Ok(SimulatedExperiment {
        design,
        probabilities,
        counts,
        success_summary,
        target_operator,
    })
}

fn re_trace_product(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let mut tr = Complex64::new(0.0, 0.0);
    for r in 0..a.nrows() {
        for c in 0..a.ncols() {
            tr += a[(r, c)] * b[(c, r)];
        }
    }
    tr.re
}
