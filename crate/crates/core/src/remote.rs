//! Remote-controlled single-qubit gates riding on the controlled-unitary
//! pipeline.
//!
//! Both protocols leave the target photon in a state proportional to
//! (αU₀ + βU₁)|ψ_T⟩: either the control is prepared as α|0⟩+β|1⟩ and
//! projected onto |+⟩, or the control is fixed at |+⟩ and the projection
//! basis encodes (α, β). The effective operator U_RC = αU₀+βU₁ is generally
//! not unitary, which shows up as an input-dependent success probability
//! ‖U_RC|ψ⟩‖²/8 (1/4 from the coincidence filter, 1/2 from the control
//! projection).

use num_complex::Complex64;

use crate::interferometer::{run_pipeline, InterferometerSettings};
use crate::linalg::{Operator, StateVector};
use crate::{Error, Result};

/// Below this success probability the protocol output carries no photons and
/// no state exists to normalize.
pub const ANNIHILATION_THRESHOLD: f64 = 1e-14;

/// Superposition weights (α, β) programmed into a remote-controlled gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RcCoefficients {
    alpha: Complex64,
    beta: Complex64,
}

impl RcCoefficients {
    /// Requires |α|² + |β|² = 1 within 1e-10.
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let n = alpha.norm_sqr() + beta.norm_sqr();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "remote-control coefficients must satisfy |α|²+|β|²=1, got {n}"
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// Real coefficient pair, the only kind the reference instances use.
    pub fn real(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(Complex64::new(alpha, 0.0), Complex64::new(beta, 0.0))
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// Control state α|0⟩ + β|1⟩.
    pub fn control_state(&self) -> StateVector {
        StateVector::qubit(self.alpha, self.beta).expect("coefficients are normalized")
    }
}

/// What came out of a remote-controlled gate run.
#[derive(Debug, Clone)]
pub enum RcOutputState {
    /// Normalized post-selected target state.
    State(StateVector),
    /// The protocol destructively interfered the entire input; no photon
    /// reaches the detector on the heralded port.
    Annihilated,
}

impl RcOutputState {
    pub fn state(&self) -> Option<&StateVector> {
        match self {
            RcOutputState::State(s) => Some(s),
            RcOutputState::Annihilated => None,
        }
    }
}

/// Result of one remote-controlled gate protocol run.
#[derive(Debug, Clone)]
pub struct RcOutcome {
    pub output_state: RcOutputState,
    /// Joint probability of coincidence plus control projection,
    /// ‖U_RC|ψ⟩‖²/8.
    pub success_prob: f64,
    /// αU₀ + βU₁, possibly non-unitary.
    pub effective_operator: Operator,
    /// Coincidence (time-bin) factor alone; 1/4 for unitary arms.
    pub coincidence_prob: f64,
    /// Control-projection factor conditioned on a coincidence.
    pub projection_prob: f64,
}

/// αU₀ + βU₁, flagged unitary when U†U = I holds within 1e-10.
pub fn rc_operator(cf: &RcCoefficients, u0: &Operator, u1: &Operator) -> Result<Operator> {
    for (label, u) in [("u0", u0), ("u1", u1)] {
        if u.dim() != 2 {
            return Err(Error::Dimension(format!("{label} must be 2x2")));
        }
        if u.unitarity_deviation() > 1e-10 {
            return Err(Error::InvalidMatrix(format!("{label} is not unitary")));
        }
    }
    let m = u0.entries() * cf.alpha + u1.entries() * cf.beta;
    let op = Operator::new(m.clone())?;
    if op.unitarity_deviation() <= 1e-10 {
        Operator::unitary(m)
    } else {
        Ok(op)
    }
}

fn project_control(
    state: &StateVector,
    bra0: Complex64,
    bra1: Complex64,
) -> Result<StateVector> {
    // state is the 4-dim (control ⊗ target) polarization state; contract the
    // control index with the given bra components.
    let amps = vec![
        bra0 * state.amplitude(0) + bra1 * state.amplitude(2),
        bra0 * state.amplitude(1) + bra1 * state.amplitude(3),
    ];
    StateVector::unnormalized(amps)
}

fn finish_outcome(
    projected: StateVector,
    coincidence_prob: f64,
    effective_operator: Operator,
) -> RcOutcome {
    let success_prob = projected.norm_sq();
    if success_prob < ANNIHILATION_THRESHOLD {
        return RcOutcome {
            output_state: RcOutputState::Annihilated,
            success_prob: 0.0,
            effective_operator,
            coincidence_prob,
            projection_prob: 0.0,
        };
    }
    let normalized = projected
        .normalize()
        .expect("norm above the annihilation threshold");
    RcOutcome {
        output_state: RcOutputState::State(normalized),
        success_prob,
        effective_operator,
        coincidence_prob,
        projection_prob: success_prob / coincidence_prob,
    }
}

/// Preparation protocol: control enters as α|0⟩+β|1⟩ and is projected onto
/// |+⟩ after the gate. Runs the actual interferometer pipeline.
pub fn rc_state_prep(
    cf: &RcCoefficients,
    u0: &Operator,
    u1: &Operator,
    target: &StateVector,
) -> Result<RcOutcome> {
    check_target(target)?;
    let effective = rc_operator(cf, u0, u1)?;
    let settings = InterferometerSettings::new(u0.clone(), u1.clone())?;
    let input = crate::linalg::tensor_product_states(&cf.control_state(), target)?;
    let (kept, coincidence) = run_pipeline(&input, &settings)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let projected = project_control(&kept, Complex64::new(s, 0.0), Complex64::new(s, 0.0))?;
    Ok(finish_outcome(projected, coincidence, effective))
}

/// Projection protocol: control enters as |+⟩ and the analyzer projects it
/// onto the state with bra α⟨0| + β⟨1|, so the target again receives
/// αU₀+βU₁. For complex (α, β) this means the measured control state is
/// α*|0⟩+β*|1⟩; real coefficients make the distinction invisible.
pub fn rc_projection(
    cf: &RcCoefficients,
    u0: &Operator,
    u1: &Operator,
    target: &StateVector,
) -> Result<RcOutcome> {
    check_target(target)?;
    let effective = rc_operator(cf, u0, u1)?;
    let settings = InterferometerSettings::new(u0.clone(), u1.clone())?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let control = StateVector::qubit(Complex64::new(s, 0.0), Complex64::new(s, 0.0))?;
    let input = crate::linalg::tensor_product_states(&control, target)?;
    let (kept, coincidence) = run_pipeline(&input, &settings)?;
    let projected = project_control(&kept, cf.alpha, cf.beta)?;
    Ok(finish_outcome(projected, coincidence, effective))
}

fn check_target(target: &StateVector) -> Result<()> {
    if target.dim() != 2 {
        return Err(Error::Dimension(format!(
            "remote-control target must be a single qubit, got dimension {}",
            target.dim()
        )));
    }
    if !target.is_normalized() {
        return Err(Error::InvalidArgument(
            "remote-control target must be normalized".into(),
        ));
    }
    Ok(())
}
