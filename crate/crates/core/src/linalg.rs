//! States, operators, tensor products, Pauli-basis expansion and the
//! positive-semidefinite matrix square root.
//!
//! Everything here is dense and small (dimension at most 16), so the
//! implementation favors clarity over sparsity tricks. The control qubit is
//! always the most-significant tensor factor: |ψ_C⟩|ψ_T⟩ has the control
//! amplitudes varying slowest.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

/// Elementwise tolerance for exact algebra (products, expansions).
pub const TOL_ALGEBRA: f64 = 1e-10;
/// Elementwise tolerance for hermiticity checks.
pub const TOL_HERMITIAN: f64 = 1e-12;
/// Results that pass through an eigensolver are only trusted to this level.
pub const TOL_EIGEN: f64 = 1e-9;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest elementwise absolute difference between two matrices.
pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff on mismatched shapes");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn is_power_of_two_dim(d: usize) -> bool {
    matches!(d, 2 | 4 | 8 | 16)
}

/// A pure state over a computational basis of dimension 2, 4, 8 or 16.
///
/// States are either flagged normalized (squared norm 1 within 1e-10) or
/// carry their actual squared norm, which the remote-control protocols use to
/// derive success probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<Complex64>,
    normalized: bool,
    norm_sq: f64,
}

impl StateVector {
    /// Builds a state that is required to be normalized.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        let dim = v.len();
        if !is_power_of_two_dim(dim) {
            return Err(Error::Dimension(format!(
                "state dimension {dim} not in {{2, 4, 8, 16}}"
            )));
        }
        let norm_sq = v.norm_squared();
        if (norm_sq - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidMatrix(format!(
                "state flagged normalized has squared norm {norm_sq}"
            )));
        }
        Ok(Self {
            amplitudes: v,
            normalized: true,
            norm_sq,
        })
    }

    /// Builds a state without a normalization requirement; the squared norm
    /// is recorded and can be queried later.
    pub fn unnormalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        let dim = v.len();
        if !is_power_of_two_dim(dim) {
            return Err(Error::Dimension(format!(
                "state dimension {dim} not in {{2, 4, 8, 16}}"
            )));
        }
        let norm_sq = v.norm_squared();
        Ok(Self {
            amplitudes: v,
            normalized: false,
            norm_sq,
        })
    }

    /// Computational basis state |k⟩ of the given dimension.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if !is_power_of_two_dim(dim) || k >= dim {
            return Err(Error::Dimension(format!(
                "basis state |{k}⟩ of dimension {dim} out of range"
            )));
        }
        let mut amps = vec![c(0.0, 0.0); dim];
        amps[k] = c(1.0, 0.0);
        Self::normalized(amps)
    }

    /// Single-qubit state α|0⟩ + β|1⟩, normalized on entry.
    pub fn qubit(alpha: Complex64, beta: Complex64) -> Result<Self> {
        Self::normalized(vec![alpha, beta])
    }

    /// |0⟩
    pub fn ket0() -> Self {
        Self::basis(2, 0).expect("|0> is well formed")
    }

    /// |1⟩
    pub fn ket1() -> Self {
        Self::basis(2, 1).expect("|1> is well formed")
    }

    /// (|0⟩ + |1⟩)/√2
    pub fn ket_plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::qubit(c(s, 0.0), c(s, 0.0)).expect("|+> is well formed")
    }

    /// (|0⟩ − |1⟩)/√2
    pub fn ket_minus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::qubit(c(s, 0.0), c(-s, 0.0)).expect("|-> is well formed")
    }

    /// (|0⟩ + i|1⟩)/√2
    pub fn ket_plus_i() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::qubit(c(s, 0.0), c(0.0, s)).expect("|+i> is well formed")
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Squared norm recorded at construction.
    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, k: usize) -> Complex64 {
        self.amplitudes[k]
    }

    /// ⟨self|other⟩ with the left argument conjugated.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!(
                "inner product between dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// Rescales to unit norm. Errors on (numerically) zero states.
    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm_sq.sqrt();
        if n < 1e-14 {
            return Err(Error::Annihilated { norm: n });
        }
        let v = self.amplitudes.map(|a| a / c(n, 0.0));
        Ok(Self {
            amplitudes: v,
            normalized: true,
            norm_sq: 1.0,
        })
    }

    /// Density matrix |ψ⟩⟨ψ| of a normalized state.
    pub fn density(&self) -> DMatrix<Complex64> {
        let v = &self.amplitudes;
        let mut rho = DMatrix::zeros(v.len(), v.len());
        for i in 0..v.len() {
            for j in 0..v.len() {
                rho[(i, j)] = v[i] * v[j].conj();
            }
        }
        rho
    }
}

/// A dense complex square matrix of dimension 2 or 4, optionally tagged (and
/// then validated) as unitary or Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    entries: DMatrix<Complex64>,
    unitary: bool,
    hermitian: bool,
}

impl Operator {
    /// Wraps a matrix without structural claims.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        let (r, cdim) = entries.shape();
        if r != cdim || !(r == 2 || r == 4) {
            return Err(Error::Dimension(format!(
                "operator must be 2x2 or 4x4, got {r}x{cdim}"
            )));
        }
        Ok(Self {
            entries,
            unitary: false,
            hermitian: false,
        })
    }

    /// Row-major construction from a flat slice.
    pub fn from_rows(d: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != d * d {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {d}x{d} operator, got {}",
                d * d,
                entries.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(d, d, entries))
    }

    /// Wraps a matrix and checks U†U = I to 1e-10 elementwise.
    pub fn unitary(entries: DMatrix<Complex64>) -> Result<Self> {
        let mut op = Self::new(entries)?;
        let d = op.dim();
        let gram = op.entries.adjoint() * &op.entries;
        let eye = DMatrix::identity(d, d);
        let dev = max_abs_diff(&gram, &eye);
        if dev > TOL_ALGEBRA {
            return Err(Error::InvalidMatrix(format!(
                "matrix flagged unitary deviates from U†U = I by {dev:.3e}"
            )));
        }
        op.unitary = true;
        Ok(op)
    }

    /// Wraps a matrix and checks A = A† to 1e-12 elementwise.
    pub fn hermitian(entries: DMatrix<Complex64>) -> Result<Self> {
        let mut op = Self::new(entries)?;
        let dev = max_abs_diff(&op.entries, &op.entries.adjoint());
        if dev > TOL_HERMITIAN {
            return Err(Error::InvalidMatrix(format!(
                "matrix flagged hermitian deviates from A = A† by {dev:.3e}"
            )));
        }
        op.hermitian = true;
        Ok(op)
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::unitary(DMatrix::identity(d, d))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn dagger(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
            unitary: self.unitary,
            hermitian: self.hermitian,
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.diagonal().sum()
    }

    /// Matrix product self·other; structural flags are not propagated.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!(
                "product of {}x{} and {}x{} operators",
                self.dim(),
                self.dim(),
                other.dim(),
                other.dim()
            )));
        }
        Self::new(&self.entries * &other.entries)
    }

    /// Applies the operator to a state, preserving the (un)normalized flag
    /// only when the operator is unitary.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if self.dim() != state.dim() {
            return Err(Error::Dimension(format!(
                "applying {0}x{0} operator to dimension-{1} state",
                self.dim(),
                state.dim()
            )));
        }
        let v = &self.entries * state.amplitudes();
        if self.unitary && state.is_normalized() {
            StateVector::normalized(v.iter().copied().collect())
        } else {
            StateVector::unnormalized(v.iter().copied().collect())
        }
    }

    /// Checks U†U = I within the given elementwise tolerance without
    /// mutating flags.
    pub fn unitarity_deviation(&self) -> f64 {
        let d = self.dim();
        let gram = self.entries.adjoint() * &self.entries;
        max_abs_diff(&gram, &DMatrix::identity(d, d))
    }
}

/// Raw 2×2 Pauli matrices in the order I, X, Y, Z.
pub fn pauli_matrices() -> [DMatrix<Complex64>; 4] {
    let i = DMatrix::identity(2, 2);
    let x = DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
    let y = DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]);
    let z = DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]);
    [i, x, y, z]
}

/// Single-qubit Pauli basis labels.
pub const PAULI_LABELS_1Q: [&str; 4] = ["I", "X", "Y", "Z"];

/// Pauli basis element for `n_qubits` qubits at flat index `m`.
///
/// Two-qubit elements are ordered row-major: index 4·a + b is σ_a ⊗ σ_b with
/// the control factor first.
pub fn pauli_basis_element(n_qubits: usize, m: usize) -> DMatrix<Complex64> {
    let paulis = pauli_matrices();
    match n_qubits {
        1 => paulis[m].clone(),
        2 => paulis[m / 4].kronecker(&paulis[m % 4]),
        _ => panic!("pauli basis defined for 1 or 2 qubits"),
    }
}

/// Label for the flat Pauli index, e.g. `"IX"` for I ⊗ X.
pub fn pauli_label(n_qubits: usize, m: usize) -> String {
    match n_qubits {
        1 => PAULI_LABELS_1Q[m].to_string(),
        2 => format!("{}{}", PAULI_LABELS_1Q[m / 4], PAULI_LABELS_1Q[m % 4]),
        _ => panic!("pauli labels defined for 1 or 2 qubits"),
    }
}

/// Expansion coefficients of an operator over the Pauli basis.
///
/// Length 4 (one qubit, order I, X, Y, Z) or 16 (two qubits, order
/// I⊗I, I⊗X, ..., Z⊗Z row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct PauliCoefficients {
    coeffs: Vec<Complex64>,
    n_qubits: usize,
}

impl PauliCoefficients {
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.coeffs.len())
            .map(|m| pauli_label(self.n_qubits, m))
            .collect()
    }

    /// Σ cₘ σₘ as a dense matrix.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let d = 1 << self.n_qubits;
        let mut out = DMatrix::zeros(d, d);
        for (m, coeff) in self.coeffs.iter().enumerate() {
            out += pauli_basis_element(self.n_qubits, m) * *coeff;
        }
        out
    }
}

/// Kronecker product of two operators, left argument most significant.
pub fn tensor_product(a: &Operator, b: &Operator) -> Result<Operator> {
    let d = a.dim() * b.dim();
    if d > 16 {
        return Err(Error::Dimension(format!(
            "tensor product dimension {d} exceeds the two-qubit scope"
        )));
    }
    let m = a.entries().kronecker(b.entries());
    Ok(Operator {
        entries: m,
        unitary: a.unitary && b.unitary,
        hermitian: a.hermitian && b.hermitian,
    })
}

/// Kronecker product of two states, left argument most significant.
pub fn tensor_product_states(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    let d = a.dim() * b.dim();
    if d > 16 {
        return Err(Error::Dimension(format!(
            "tensor product dimension {d} exceeds the dual-degree-of-freedom scope"
        )));
    }
    let mut amps = Vec::with_capacity(d);
    for i in 0..a.dim() {
        for j in 0..b.dim() {
            amps.push(a.amplitude(i) * b.amplitude(j));
        }
    }
    if a.is_normalized() && b.is_normalized() {
        StateVector::normalized(amps)
    } else {
        StateVector::unnormalized(amps)
    }
}

/// Pauli expansion cₘ = tr(σₘ† op)/d, exact round trip to 1e-12.
pub fn pauli_expand(op: &Operator) -> Result<PauliCoefficients> {
    let d = op.dim();
    let n_qubits = match d {
        2 => 1,
        4 => 2,
        _ => {
            return Err(Error::Dimension(format!(
                "pauli expansion defined for 2x2 and 4x4 operators, got {d}x{d}"
            )))
        }
    };
    let n = d * d;
    let mut coeffs = Vec::with_capacity(n);
    for m in 0..n {
        let sigma = pauli_basis_element(n_qubits, m);
        let prod = sigma.adjoint() * op.entries();
        let tr: Complex64 = prod.diagonal().sum();
        coeffs.push(tr / c(d as f64, 0.0));
    }
    Ok(PauliCoefficients { coeffs, n_qubits })
}

/// Hermitian eigendecomposition with eigenvalues clamped below at `clamp`.
///
/// Returns an error when the input is non-Hermitian (elementwise 1e-10) or
/// has an eigenvalue under the clamp floor.
pub(crate) fn psd_sqrt_matrix(a: &DMatrix<Complex64>, clamp: f64) -> Result<DMatrix<Complex64>> {
    let dev = max_abs_diff(a, &a.adjoint());
    if dev > TOL_ALGEBRA {
        return Err(Error::InvalidMatrix(format!(
            "square root input deviates from hermiticity by {dev:.3e}"
        )));
    }
    // Work on the exactly Hermitian average to keep the eigensolver honest.
    let h = (a + a.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    let mut vals = eig.eigenvalues.clone();
    for v in vals.iter_mut() {
        if *v < clamp {
            return Err(Error::InvalidMatrix(format!(
                "square root input has eigenvalue {v:.3e} below {clamp:.1e}"
            )));
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let d = a.nrows();
    let mut out = DMatrix::zeros(d, d);
    for k in 0..d {
        let col = eig.eigenvectors.column(k);
        let s = vals[k].sqrt();
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] += col[i] * col[j].conj() * c(s, 0.0);
            }
        }
    }
    Ok(out)
}

/// Positive-semidefinite square root of a Hermitian operator.
///
/// Eigenvalues in [−1e-9, 0) are treated as solver jitter and clamped to 0;
/// anything lower is rejected.
pub fn psd_sqrt(a: &Operator) -> Result<Operator> {
    let root = psd_sqrt_matrix(a.entries(), -1e-9)?;
    Operator::hermitian((&root + root.adjoint()).scale(0.5))
}

/// True when both operators are unitary and differ only by a global phase:
/// |tr(a†b)|/d ≥ 1 − tol.
pub fn equal_up_to_global_phase(a: &Operator, b: &Operator, tol: f64) -> bool {
    if a.dim() != b.dim() {
        return false;
    }
    if a.unitarity_deviation() > TOL_ALGEBRA || b.unitarity_deviation() > TOL_ALGEBRA {
        return false;
    }
    let prod = a.entries().adjoint() * b.entries();
    let tr: Complex64 = prod.diagonal().sum();
    tr.norm() / a.dim() as f64 >= 1.0 - tol
}
