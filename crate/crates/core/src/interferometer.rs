//! Amplitude bookkeeping for the two-interferometer gate.
//!
//! The control photon enters an unbalanced Michelson interferometer whose
//! polarizing beam splitter routes |0⟩ through the short arm and |1⟩ through
//! the long arm, writing the polarization onto a time-bin label. The target
//! photon enters an unbalanced Mach-Zehnder interferometer whose first
//! (non-polarizing) beam splitter sends half the amplitude through each arm;
//! the short arm applies U₀, the long arm applies U₁. Detecting both photons
//! in the same time bin keeps the (short, short) and (long, long) components,
//! and the surviving polarization state is
//!
//!   (1/2) (|0⟩⟨0| ⊗ U₀ + |1⟩⟨1| ⊗ U₁) |Ψ_CT⟩
//!
//! so a coincidence fires with probability 1/4 regardless of the input.

use num_complex::Complex64;

use crate::linalg::{tensor_product, Operator, StateVector};
use crate::{Error, Result};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Time-bin label: short-arm (early) or long-arm (late) wave packet.
const BIN_S: usize = 0;
const BIN_L: usize = 1;

/// Flat amplitude index over (control pol, control bin, target pol, target bin).
fn idx(c_pol: usize, c_bin: usize, t_pol: usize, t_bin: usize) -> usize {
    ((c_pol * 2 + c_bin) * 2 + t_pol) * 2 + t_bin
}

/// Joint state of both photons over polarization and time-bin labels:
/// 16 complex amplitudes, (control pol 2) × (control bin s,l) × (target pol 2)
/// × (target bin s,l).
///
/// Time bins start out merged in the initial pulse (label s); each
/// interferometer may be traversed once, after which the photon's amplitude
/// can occupy both bins and the corresponding flag blocks a second pass.
#[derive(Debug, Clone)]
pub struct DualDofState {
    amplitudes: [Complex64; 16],
    norm_sq: f64,
    umi_done: bool,
    umzi_done: bool,
}

impl DualDofState {
    /// Places a two-qubit polarization state into the initial time-bin pair
    /// (both photons in bin s).
    pub fn from_polarization(state: &StateVector) -> Result<Self> {
        if state.dim() != 4 {
            return Err(Error::Dimension(format!(
                "dual-DOF input needs a 4-dim polarization state, got {}",
                state.dim()
            )));
        }
        let norm_sq = state.norm_sq();
        if norm_sq > 1.0 + 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "input norm² {norm_sq} exceeds 1"
            )));
        }
        let mut amplitudes = [c(0.0, 0.0); 16];
        for c_pol in 0..2 {
            for t_pol in 0..2 {
                amplitudes[idx(c_pol, BIN_S, t_pol, BIN_S)] = state.amplitude(c_pol * 2 + t_pol);
            }
        }
        Ok(Self {
            amplitudes,
            norm_sq,
            umi_done: false,
            umzi_done: false,
        })
    }

    pub fn amplitude(&self, c_pol: usize, c_bin: usize, t_pol: usize, t_bin: usize) -> Complex64 {
        self.amplitudes[idx(c_pol, c_bin, t_pol, t_bin)]
    }

    /// Sum of squared magnitudes; equals the stored value by construction.
    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    fn recompute_norm(&mut self) {
        self.norm_sq = self.amplitudes.iter().map(|a| a.norm_sqr()).sum();
    }

    fn control_in_long_bin(&self) -> f64 {
        (0..2)
            .flat_map(|cp| (0..2).flat_map(move |tp| (0..2).map(move |tb| (cp, tp, tb))))
            .map(|(cp, tp, tb)| self.amplitudes[idx(cp, BIN_L, tp, tb)].norm_sqr())
            .sum()
    }

    fn target_in_long_bin(&self) -> f64 {
        (0..2)
            .flat_map(|cp| (0..2).flat_map(move |cb| (0..2).map(move |tp| (cp, cb, tp))))
            .map(|(cp, cb, tp)| self.amplitudes[idx(cp, cb, tp, BIN_L)].norm_sqr())
            .sum()
    }
}

/// Configuration of the interferometer pair: arm unitaries, residual phases
/// of the long arms, and the physical path differences (metadata; the bin
/// algebra never consumes them).
#[derive(Debug, Clone)]
pub struct InterferometerSettings {
    /// Relative phase (long − short) picked up in the control Michelson.
    pub umi_phase: f64,
    /// Relative phase picked up in the target Mach-Zehnder.
    pub umzi_phase: f64,
    u0: Operator,
    u1: Operator,
    /// Michelson arm-length difference in meters.
    pub path_delta_m: f64,
    /// Mach-Zehnder arm-length difference in meters (twice the Michelson
    /// value, so like bins from the same pulse overlap).
    pub umzi_delta_m: f64,
}

/// Michelson arm-length difference used by the reference setup, in meters.
pub const DEFAULT_PATH_DELTA_M: f64 = 1.875;
/// Mach-Zehnder arm-length difference used by the reference setup, in meters.
pub const DEFAULT_UMZI_DELTA_M: f64 = 3.75;

impl InterferometerSettings {
    /// Ideal settings: zero phases, default path lengths. Errors unless both
    /// arm operators are unitary 2×2 within 1e-10.
    pub fn new(u0: Operator, u1: Operator) -> Result<Self> {
        for (label, u) in [("u0", &u0), ("u1", &u1)] {
            if u.dim() != 2 {
                return Err(Error::Dimension(format!(
                    "{label} must be 2x2, got {0}x{0}",
                    u.dim()
                )));
            }
            let dev = u.unitarity_deviation();
            if dev > 1e-10 {
                return Err(Error::InvalidMatrix(format!(
                    "{label} deviates from unitarity by {dev:.3e}"
                )));
            }
        }
        Ok(Self {
            umi_phase: 0.0,
            umzi_phase: 0.0,
            u0,
            u1,
            path_delta_m: DEFAULT_PATH_DELTA_M,
            umzi_delta_m: DEFAULT_UMZI_DELTA_M,
        })
    }

    pub fn with_phases(mut self, umi_phase: f64, umzi_phase: f64) -> Self {
        self.umi_phase = umi_phase;
        self.umzi_phase = umzi_phase;
        self
    }

    pub fn u0(&self) -> &Operator {
        &self.u0
    }

    pub fn u1(&self) -> &Operator {
        &self.u1
    }
}

/// Sends the control photon through the Michelson: polarization |0⟩ keeps
/// bin s, polarization |1⟩ moves to bin l with phase e^{i·umi_phase}. Norm²
/// is preserved.
pub fn propagate_umi(state: &DualDofState, s: &InterferometerSettings) -> Result<DualDofState> {
    if state.umi_done || state.control_in_long_bin() > 1e-24 {
        return Err(Error::InvalidArgument(
            "control photon already traversed the Michelson (amplitude in bin l)".into(),
        ));
    }
    let phase = c(s.umi_phase.cos(), s.umi_phase.sin());
    let mut out = state.clone();
    for t_pol in 0..2 {
        for t_bin in 0..2 {
            let from = idx(1, BIN_S, t_pol, t_bin);
            let to = idx(1, BIN_L, t_pol, t_bin);
            out.amplitudes[to] = out.amplitudes[from] * phase;
            out.amplitudes[from] = c(0.0, 0.0);
        }
    }
    out.umi_done = true;
    out.recompute_norm();
    Ok(out)
}

/// Sends the target photon through the Mach-Zehnder. The retained output
/// port carries (1/2)·U₀ in bin s and (1/2)·e^{i·umzi_phase}·U₁ in bin l;
/// the other port is loss, so norm² halves for unitary arms.
pub fn propagate_umzi(state: &DualDofState, s: &InterferometerSettings) -> Result<DualDofState> {
    if state.umzi_done || state.target_in_long_bin() > 1e-24 {
        return Err(Error::InvalidArgument(
            "target photon already traversed the Mach-Zehnder (amplitude in bin l)".into(),
        ));
    }
    let phase = c(s.umzi_phase.cos(), s.umzi_phase.sin());
    let half = c(0.5, 0.0);
    let u0 = s.u0.entries();
    let u1 = s.u1.entries();
    let mut out = state.clone();
    for c_pol in 0..2 {
        for c_bin in 0..2 {
            let in0 = state.amplitudes[idx(c_pol, c_bin, 0, BIN_S)];
            let in1 = state.amplitudes[idx(c_pol, c_bin, 1, BIN_S)];
            for t_pol in 0..2 {
                out.amplitudes[idx(c_pol, c_bin, t_pol, BIN_S)] =
                    half * (u0[(t_pol, 0)] * in0 + u0[(t_pol, 1)] * in1);
                out.amplitudes[idx(c_pol, c_bin, t_pol, BIN_L)] =
                    half * phase * (u1[(t_pol, 0)] * in0 + u1[(t_pol, 1)] * in1);
            }
        }
    }
    out.umzi_done = true;
    out.recompute_norm();
    Ok(out)
}

/// Coincidence post-selection: keeps the (s,s) and (l,l) time-bin pairs,
/// erases the bin labels and returns the surviving (unnormalized)
/// polarization state together with the detection probability.
pub fn postselect_coincidence(state: &DualDofState) -> Result<(StateVector, f64)> {
    if !(state.umi_done && state.umzi_done) {
        return Err(Error::InvalidArgument(
            "post-selection requires both photons to have traversed their interferometers".into(),
        ));
    }
    let mut amps = Vec::with_capacity(4);
    for c_pol in 0..2 {
        for t_pol in 0..2 {
            amps.push(
                state.amplitude(c_pol, BIN_S, t_pol, BIN_S)
                    + state.amplitude(c_pol, BIN_L, t_pol, BIN_L),
            );
        }
    }
    let kept = StateVector::unnormalized(amps)?;
    let success = kept.norm_sq();
    Ok((kept, success))
}

/// Runs a polarization state through both interferometers and the
/// coincidence filter in one call.
pub fn run_pipeline(
    input: &StateVector,
    s: &InterferometerSettings,
) -> Result<(StateVector, f64)> {
    let state = DualDofState::from_polarization(input)?;
    let state = propagate_umi(&state, s)?;
    let state = propagate_umzi(&state, s)?;
    postselect_coincidence(&state)
}

/// The block-diagonal controlled unitary |0⟩⟨0|⊗U₀ + |1⟩⟨1|⊗U₁.
pub fn ideal_cu(u0: &Operator, u1: &Operator) -> Result<Operator> {
    for (label, u) in [("u0", u0), ("u1", u1)] {
        if u.dim() != 2 {
            return Err(Error::Dimension(format!("{label} must be 2x2")));
        }
        if u.unitarity_deviation() > 1e-10 {
            return Err(Error::InvalidMatrix(format!("{label} is not unitary")));
        }
    }
    let p0 = Operator::hermitian(StateVector::ket0().density())?;
    let p1 = Operator::hermitian(StateVector::ket1().density())?;
    let block0 = tensor_product(&p0, u0)?;
    let block1 = tensor_product(&p1, u1)?;
    Operator::unitary(block0.entries() + block1.entries())
}

fn extract_cu(s: &InterferometerSettings) -> Result<Operator> {
    let mut columns = Vec::with_capacity(4);
    for k in 0..4 {
        let (kept, success) = run_pipeline(&StateVector::basis(4, k)?, s)?;
        if (success - 0.25).abs() > 1e-10 {
            return Err(Error::NotAnOperator(format!(
                "basis state {k} survives with probability {success:.12} instead of 1/4; \
                 arm operators are not amplitude-uniform"
            )));
        }
        columns.push(kept);
    }
    let mut entries = Vec::with_capacity(16);
    for row in 0..4 {
        for col in &columns {
            entries.push(col.amplitude(row) * c(2.0, 0.0));
        }
    }
    Operator::from_rows(4, &entries)
}

/// Extracts the post-selected two-qubit operator by running all four basis
/// states through the pipeline and rescaling by the uniform 1/2 amplitude.
///
/// Requires ideal (zero) interferometer phases: a residual phase would still
/// pass the amplitude-uniformity check while silently rotating the long-path
/// block, so it is rejected up front. Use [`effective_cu_unchecked`] to
/// inspect exactly that effect.
pub fn effective_cu(s: &InterferometerSettings) -> Result<Operator> {
    if s.umi_phase != 0.0 || s.umzi_phase != 0.0 {
        return Err(Error::InvalidArgument(format!(
            "effective_cu expects zero interferometer phases, got umi {} / umzi {}",
            s.umi_phase, s.umzi_phase
        )));
    }
    extract_cu(s)
}

/// Same extraction with the zero-phase requirement dropped; the result picks
/// up e^{i(umi_phase+umzi_phase)} on the |1⟩⟨1|⊗U₁ block.
pub fn effective_cu_unchecked(s: &InterferometerSettings) -> Result<Operator> {
    extract_cu(s)
}
