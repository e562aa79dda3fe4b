//! Preparation states and measurement settings for process tomography.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::linalg::{max_abs_diff, tensor_product, tensor_product_states, Operator, StateVector};
use crate::{Error, Result};

/// Measurement-basis labels in setting order.
pub const BASIS_LABELS: [&str; 3] = ["Z", "X", "Y"];

/// The four single-qubit preparation states, in prep-index order:
/// |0⟩, |1⟩, |+⟩, (|0⟩+i|1⟩)/√2.
pub fn single_qubit_prep_states() -> Vec<StateVector> {
    vec![
        StateVector::ket0(),
        StateVector::ket1(),
        StateVector::ket_plus(),
        StateVector::ket_plus_i(),
    ]
}

/// The three measurement bases, each as its pair of orthogonal basis states
/// (outcome 0, outcome 1): Z → (|0⟩, |1⟩), X → (|+⟩, |−⟩), Y → (|+i⟩, |−i⟩).
pub fn single_qubit_basis_states() -> Vec<[StateVector; 2]> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let minus_i = StateVector::qubit(Complex64::new(s, 0.0), Complex64::new(0.0, -s))
        .expect("|-i> is well formed");
    vec![
        [StateVector::ket0(), StateVector::ket1()],
        [StateVector::ket_plus(), StateVector::ket_minus()],
        [StateVector::ket_plus_i(), minus_i],
    ]
}

fn projector(state: &StateVector) -> Operator {
    Operator::hermitian(state.density()).expect("outer products are Hermitian")
}

/// Informationally complete preparation and measurement plan.
///
/// Preparations are pure states; each measurement setting is a complete set
/// of orthogonal projectors (one per outcome). The standard designs pair the
/// four preparations |0⟩, |1⟩, |+⟩, |+i⟩ per qubit with the three Pauli
/// bases per qubit; two-qubit indices run control-major.
#[derive(Debug, Clone)]
pub struct TomographyDesign {
    preps: Vec<StateVector>,
    meas_settings: Vec<Vec<Operator>>,
    n_qubits: usize,
}

impl TomographyDesign {
    /// Validates dimensions, projector completeness, and that the
    /// preparations span the operator space.
    pub fn new(preps: Vec<StateVector>, meas_settings: Vec<Vec<Operator>>) -> Result<Self> {
        let dim = preps
            .first()
            .map(StateVector::dim)
            .ok_or_else(|| Error::InvalidArgument("design needs at least one prep".into()))?;
        let n_qubits = match dim {
            2 => 1,
            4 => 2,
            _ => {
                return Err(Error::Dimension(format!(
                    "tomography supports 2- or 4-dim systems, got {dim}"
                )))
            }
        };
        for p in &preps {
            if p.dim() != dim {
                return Err(Error::Dimension("mixed prep dimensions".into()));
            }
            if !p.is_normalized() {
                return Err(Error::InvalidArgument(
                    "preparation states must be normalized".into(),
                ));
            }
        }
        if meas_settings.is_empty() {
            return Err(Error::InvalidArgument(
                "design needs at least one measurement setting".into(),
            ));
        }
        let n_outcomes = meas_settings[0].len();
        for setting in &meas_settings {
            if setting.len() != n_outcomes {
                return Err(Error::InvalidArgument(
                    "all measurement settings must have the same outcome count".into(),
                ));
            }
            let mut sum = DMatrix::<Complex64>::zeros(dim, dim);
            for proj in setting {
                if proj.dim() != dim {
                    return Err(Error::Dimension("projector dimension mismatch".into()));
                }
                let sq = proj.entries() * proj.entries();
                if max_abs_diff(&sq, proj.entries()) > 1e-10 {
                    return Err(Error::InvalidMatrix(
                        "measurement operators must be projectors".into(),
                    ));
                }
                sum += proj.entries();
            }
            if max_abs_diff(&sum, &DMatrix::identity(dim, dim)) > 1e-10 {
                return Err(Error::InvalidMatrix(
                    "measurement setting does not resolve the identity".into(),
                ));
            }
        }

        // Preparations must span the d² dimensional operator space: stack the
        // vectorized density matrices and check the rank.
        let d2 = dim * dim;
        let mut stack = DMatrix::<f64>::zeros(preps.len(), 2 * d2);
        for (i, p) in preps.iter().enumerate() {
            let rho = p.density();
            for (k, z) in rho.iter().enumerate() {
                stack[(i, k)] = z.re;
                stack[(i, d2 + k)] = z.im;
            }
        }
        let svd = stack.svd(false, false);
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let rank = svd
            .singular_values
            .iter()
            .filter(|&&s| s > smax * 1e-9)
            .count();
        if rank < d2 {
            return Err(Error::InvalidArgument(format!(
                "preparations span only {rank} of {d2} operator dimensions"
            )));
        }

        Ok(Self {
            preps,
            meas_settings,
            n_qubits,
        })
    }

    /// Standard single-qubit design: 4 preps × 3 Pauli bases × 2 outcomes.
    pub fn single_qubit() -> Self {
        let preps = single_qubit_prep_states();
        let settings = single_qubit_basis_states()
            .iter()
            .map(|pair| pair.iter().map(projector).collect())
            .collect();
        Self::new(preps, settings).expect("the standard single-qubit design is complete")
    }

    /// Standard two-qubit design: 16 product preps × 9 basis combinations ×
    /// 4 outcomes, control index major throughout.
    pub fn two_qubit() -> Self {
        let singles = single_qubit_prep_states();
        let mut preps = Vec::with_capacity(16);
        for pc in &singles {
            for pt in &singles {
                preps.push(tensor_product_states(pc, pt).expect("2 ⊗ 2 states"));
            }
        }
        let bases = single_qubit_basis_states();
        let mut settings = Vec::with_capacity(9);
        for bc in &bases {
            for bt in &bases {
                let mut projs = Vec::with_capacity(4);
                for kc in 0..2 {
                    for kt in 0..2 {
                        let p =
                            tensor_product(&projector(&bc[kc]), &projector(&bt[kt]))
                                .expect("2x2 ⊗ 2x2 projectors");
                        projs.push(p);
                    }
                }
                settings.push(projs);
            }
        }
        Self::new(preps, settings).expect("the standard two-qubit design is complete")
    }

    /// Standard design for the given qubit count (1 or 2).
    pub fn standard(n_qubits: usize) -> Result<Self> {
        match n_qubits {
            1 => Ok(Self::single_qubit()),
            2 => Ok(Self::two_qubit()),
            n => Err(Error::Dimension(format!(
                "no standard design for {n} qubits"
            ))),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Hilbert-space dimension (2 or 4).
    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn preps(&self) -> &[StateVector] {
        &self.preps
    }

    pub fn meas_settings(&self) -> &[Vec<Operator>] {
        &self.meas_settings
    }

    pub fn n_preps(&self) -> usize {
        self.preps.len()
    }

    pub fn n_settings(&self) -> usize {
        self.meas_settings.len()
    }

    /// Outcomes per setting (uniform across settings in the standard designs).
    pub fn n_outcomes(&self) -> usize {
        self.meas_settings[0].len()
    }
}
