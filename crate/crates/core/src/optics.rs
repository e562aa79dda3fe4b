//! Jones-calculus model of the wave plates and the fixed gate library.
//!
//! Convention: a retarder with fast axis at angle θ from horizontal is
//! R(θ)·diag(1, e^{iδ})·R(−θ) with δ = π for a half-wave plate and δ = π/2
//! for a quarter-wave plate, global phase dropped. Under this convention
//! hwp(45°) = X and the preparation settings (22.5°, 45°) → |+⟩ and
//! (−22.5°, 45°) → |−⟩ hold. Public interfaces take angles in degrees.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::fmt;
use std::str::FromStr;

use crate::linalg::{Operator, StateVector};
use crate::{Error, Result};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Folds an angle in degrees into [−90°, 90°). Wave plates are invariant
/// under 180° rotations of the fast axis, so this loses nothing.
pub fn normalize_angle_deg(angle: f64) -> f64 {
    let mut a = (angle + 90.0).rem_euclid(180.0) - 90.0;
    // rem_euclid can return exactly 180.0 - tiny, landing on 90.0 after the
    // shift; fold that edge back.
    if a >= 90.0 {
        a -= 180.0;
    }
    a
}

/// Fast-axis angles (degrees from horizontal) of the preparation or analysis
/// wave-plate pair in one beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveplateSetting {
    hwp_angle: f64,
    qwp_angle: f64,
}

impl WaveplateSetting {
    /// Stores the pair with both angles folded into [−90°, 90°).
    pub fn new(hwp_angle: f64, qwp_angle: f64) -> Self {
        Self {
            hwp_angle: normalize_angle_deg(hwp_angle),
            qwp_angle: normalize_angle_deg(qwp_angle),
        }
    }

    pub fn hwp_angle(&self) -> f64 {
        self.hwp_angle
    }

    pub fn qwp_angle(&self) -> f64 {
        self.qwp_angle
    }
}

/// Half-wave plate with fast axis at `theta_deg` degrees:
/// [[cos2θ, sin2θ], [sin2θ, −cos2θ]].
pub fn hwp(theta_deg: f64) -> Operator {
    let t = theta_deg.to_radians();
    let (s2, c2) = (2.0 * t).sin_cos();
    Operator::unitary(DMatrix::from_row_slice(
        2,
        2,
        &[c(c2, 0.0), c(s2, 0.0), c(s2, 0.0), c(-c2, 0.0)],
    ))
    .expect("half-wave plate matrices are unitary by construction")
}

/// Quarter-wave plate with fast axis at `theta_deg` degrees; qwp(0°) = diag(1, i).
pub fn qwp(theta_deg: f64) -> Operator {
    let t = theta_deg.to_radians();
    let (s, co) = t.sin_cos();
    let (s2, c2) = (s * s, co * co);
    let cs = co * s;
    Operator::unitary(DMatrix::from_row_slice(
        2,
        2,
        &[
            c(c2, s2),
            c(cs, -cs),
            c(cs, -cs),
            c(s2, c2),
        ],
    ))
    .expect("quarter-wave plate matrices are unitary by construction")
}

/// Names of the gates the library ships ready-made.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateName {
    I,
    X,
    Y,
    Z,
    S,
    T,
    Tdag,
    H,
    Cnot,
    Cs,
}

impl GateName {
    pub const ALL: [GateName; 10] = [
        GateName::I,
        GateName::X,
        GateName::Y,
        GateName::Z,
        GateName::S,
        GateName::T,
        GateName::Tdag,
        GateName::H,
        GateName::Cnot,
        GateName::Cs,
    ];

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, GateName::Cnot | GateName::Cs)
    }
}

impl fmt::Display for GateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GateName::I => "I",
            GateName::X => "X",
            GateName::Y => "Y",
            GateName::Z => "Z",
            GateName::S => "S",
            GateName::T => "T",
            GateName::Tdag => "Tdag",
            GateName::H => "H",
            GateName::Cnot => "CNOT",
            GateName::Cs => "CS",
        };
        f.write_str(s)
    }
}

impl FromStr for GateName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "i" => Ok(GateName::I),
            "x" => Ok(GateName::X),
            "y" => Ok(GateName::Y),
            "z" => Ok(GateName::Z),
            "s" => Ok(GateName::S),
            "t" => Ok(GateName::T),
            "tdag" | "t-dag" | "tdg" => Ok(GateName::Tdag),
            "h" => Ok(GateName::H),
            "cnot" => Ok(GateName::Cnot),
            "cs" => Ok(GateName::Cs),
            other => Err(Error::InvalidArgument(format!("unknown gate name {other:?}"))),
        }
    }
}

/// Canonical matrix for a named gate.
pub fn gate(name: GateName) -> Operator {
    let t = FRAC_PI_4; // π/4 phase of the T gate
    let m = match name {
        GateName::I => DMatrix::identity(2, 2),
        GateName::X => DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
        GateName::Y => {
            DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
        }
        GateName::Z => {
            DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
        }
        GateName::S => DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(0., 1.)]),
        GateName::T => DMatrix::from_row_slice(
            2,
            2,
            &[c(1., 0.), c(0., 0.), c(0., 0.), c(t.cos(), t.sin())],
        ),
        GateName::Tdag => DMatrix::from_row_slice(
            2,
            2,
            &[c(1., 0.), c(0., 0.), c(0., 0.), c(t.cos(), -t.sin())],
        ),
        GateName::H => DMatrix::from_row_slice(
            2,
            2,
            &[
                c(FRAC_1_SQRT_2, 0.),
                c(FRAC_1_SQRT_2, 0.),
                c(FRAC_1_SQRT_2, 0.),
                c(-FRAC_1_SQRT_2, 0.),
            ],
        ),
        GateName::Cnot => DMatrix::from_row_slice(
            4,
            4,
            &[
                c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.),
                c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.),
                c(0., 0.), c(0., 0.), c(0., 0.), c(1., 0.),
                c(0., 0.), c(0., 0.), c(1., 0.), c(0., 0.),
            ],
        ),
        GateName::Cs => {
            let mut m = DMatrix::identity(4, 4);
            m[(3, 3)] = c(0., 1.);
            m
        }
    };
    Operator::unitary(m).expect("library gates are unitary")
}

/// Kind of retarder in a physical plate stack.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlateKind {
    Hwp,
    Qwp,
}

/// One physical wave plate: retarder kind plus fast-axis angle in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plate {
    pub kind: PlateKind,
    pub angle_deg: f64,
}

impl Plate {
    pub fn hwp(angle_deg: f64) -> Self {
        Self {
            kind: PlateKind::Hwp,
            angle_deg,
        }
    }

    pub fn qwp(angle_deg: f64) -> Self {
        Self {
            kind: PlateKind::Qwp,
            angle_deg,
        }
    }

    pub fn operator(&self) -> Operator {
        match self.kind {
            PlateKind::Hwp => hwp(self.angle_deg),
            PlateKind::Qwp => qwp(self.angle_deg),
        }
    }
}

/// Composite Jones matrix of a plate stack, light hitting `plates[0]` first.
pub fn stack_operator(plates: &[Plate]) -> Operator {
    let mut m = DMatrix::identity(2, 2);
    for p in plates {
        m = p.operator().entries() * m;
    }
    Operator::unitary(m).expect("products of plate unitaries are unitary")
}

/// Physical plate stacks realizing each single-qubit gate in an
/// interferometer arm (two-qubit gates have no arm recipe).
///
/// The phase-gate stacks sandwich a half-wave plate between quarter-wave
/// plates at 45°: that combination is diag(1, e^{i(4θ+π)}) up to global
/// phase, so θ = 67.5° gives S. With all three plates at 45° the stack
/// collapses to the identity, whatever the retarder convention, since the
/// three retardances share one rotation frame and multiply out to e^{2πi}.
pub fn gate_plate_recipe(name: GateName) -> Option<Vec<Plate>> {
    match name {
        GateName::I => Some(vec![]),
        GateName::X => Some(vec![Plate::hwp(45.0)]),
        GateName::Y => Some(vec![Plate::hwp(0.0), Plate::hwp(45.0)]),
        GateName::Z => Some(vec![Plate::hwp(0.0)]),
        GateName::S => Some(vec![Plate::qwp(45.0), Plate::hwp(67.5), Plate::qwp(45.0)]),
        GateName::T => Some(vec![Plate::qwp(45.0), Plate::hwp(-33.75), Plate::qwp(45.0)]),
        GateName::Tdag => Some(vec![Plate::qwp(45.0), Plate::hwp(-56.25), Plate::qwp(45.0)]),
        GateName::H => Some(vec![Plate::hwp(22.5)]),
        GateName::Cnot | GateName::Cs => None,
    }
}

/// Checks the standard controlled-phase decomposition
/// CS = CNOT·(I⊗T†)·CNOT·(T⊗T) up to global phase.
pub fn verify_cs_decomposition() -> bool {
    let t = gate(GateName::T);
    let tdag = gate(GateName::Tdag);
    let cnot = gate(GateName::Cnot);
    let eye = gate(GateName::I);
    let tt = crate::linalg::tensor_product(&t, &t).expect("2x2 ⊗ 2x2");
    let i_tdag = crate::linalg::tensor_product(&eye, &tdag).expect("2x2 ⊗ 2x2");
    let composite = cnot
        .mul(&i_tdag)
        .and_then(|m| m.mul(&cnot))
        .and_then(|m| m.mul(&tt))
        .expect("4x4 products");
    crate::linalg::equal_up_to_global_phase(&composite, &gate(GateName::Cs), 1e-10)
}

/// State prepared by the plate pair from horizontal polarization:
/// qwp(q)·hwp(h)·|0⟩ (the beam meets the half-wave plate first).
pub fn prep_state(setting: &WaveplateSetting) -> StateVector {
    let composite = qwp(setting.qwp_angle)
        .mul(&hwp(setting.hwp_angle))
        .expect("2x2 product");
    composite
        .apply(&StateVector::ket0())
        .expect("unitary on normalized state")
}

/// State an analyzer with this plate pair projects onto.
///
/// On the analysis side the beam meets the quarter-wave plate first, then the
/// half-wave plate, then the polarizing beam splitter whose transmitted port
/// is ⟨0|. The effective bra ⟨0|·hwp(h)·qwp(q) is the conjugate of the
/// preparation state for the same angles (hwp is real, qwp is symmetric).
pub fn projection_state(setting: &WaveplateSetting) -> StateVector {
    let prep = prep_state(setting);
    let amps: Vec<Complex64> = prep.amplitudes().iter().map(|a| a.conj()).collect();
    StateVector::normalized(amps).expect("conjugation preserves the norm")
}

fn prep_infidelity(h_deg: f64, q_deg: f64, target: &StateVector) -> f64 {
    let s = WaveplateSetting::new(h_deg, q_deg);
    let prepared = prep_state(&s);
    let overlap = target
        .inner(&prepared)
        .expect("dimension-2 states")
        .norm_sqr();
    1.0 - overlap
}

/// Finds plate angles (h, q) with qwp(q)·hwp(h)·|0⟩ = `target` up to global
/// phase.
///
/// Deterministic: a 5° grid scan over both angles followed by shrinking
/// pattern-search refinement. Two plates reach every point of the Bloch
/// sphere from |0⟩, so the residual 1 − |⟨target|prepared⟩|² ends below 1e-8;
/// anything above 1e-6 is reported as an error.
pub fn solve_prep_angles(target: &StateVector) -> Result<WaveplateSetting> {
    if target.dim() != 2 {
        return Err(Error::Dimension(format!(
            "prep angle solve needs a single-qubit target, got dimension {}",
            target.dim()
        )));
    }
    if !target.is_normalized() {
        return Err(Error::InvalidArgument(
            "prep angle solve needs a normalized target".into(),
        ));
    }

    let mut best = (f64::MAX, 0.0, 0.0);
    let mut a = -90.0;
    while a < 90.0 {
        let mut b = -90.0;
        while b < 90.0 {
            let r = prep_infidelity(a, b, target);
            if r < best.0 {
                best = (r, a, b);
            }
            b += 5.0;
        }
        a += 5.0;
    }

    let (mut residual, mut h, mut q) = best;
    let mut step = 2.5;
    while step > 1e-7 {
        let mut improved = false;
        for (dh, dq) in [
            (step, 0.0),
            (-step, 0.0),
            (0.0, step),
            (0.0, -step),
            (step, step),
            (step, -step),
            (-step, step),
            (-step, -step),
        ] {
            let r = prep_infidelity(h + dh, q + dq, target);
            if r < residual {
                residual = r;
                h += dh;
                q += dq;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    if residual > 1e-6 {
        return Err(Error::Numerical(format!(
            "prep angle solve stalled at residual {residual:.3e}"
        )));
    }
    Ok(WaveplateSetting::new(h, q))
}

/// Finds analyzer angles projecting onto `target`: the analyzer state for
/// (h, q) is the conjugate of the preparation state, so this solves the
/// preparation problem for the conjugated target.
pub fn solve_projection_angles(target: &StateVector) -> Result<WaveplateSetting> {
    if target.dim() != 2 {
        return Err(Error::Dimension(format!(
            "projection angle solve needs a single-qubit target, got dimension {}",
            target.dim()
        )));
    }
    let conj: Vec<Complex64> = target.amplitudes().iter().map(|z| z.conj()).collect();
    let conj_state = StateVector::normalized(conj)?;
    solve_prep_angles(&conj_state)
}
