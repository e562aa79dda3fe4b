//! The process (chi) matrix and its ideal form for a known operator.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::linalg::{max_abs_diff, pauli_basis_element, pauli_expand, pauli_label, Operator};
use crate::{Error, Result};

/// Process matrix of a channel E(ρ) = Σ χ_mn σ_m ρ σ_n† over the Pauli
/// basis (I, X, Y, Z per qubit, row-major for two qubits).
///
/// Construction validates hermiticity (1e-10 elementwise), positivity
/// (eigenvalues ≥ −1e-8) and, when flagged, unit trace (1e-10).
#[derive(Debug, Clone, PartialEq)]
pub struct ChiMatrix {
    entries: DMatrix<Complex64>,
    trace_normalized: bool,
    n_qubits: usize,
}

impl ChiMatrix {
    pub fn new(entries: DMatrix<Complex64>, trace_normalized: bool) -> Result<Self> {
        let (r, c) = entries.shape();
        let n_qubits = match (r, c) {
            (4, 4) => 1,
            (16, 16) => 2,
            _ => {
                return Err(Error::Dimension(format!(
                    "chi matrix must be 4x4 or 16x16, got {r}x{c}"
                )))
            }
        };
        let herm_dev = max_abs_diff(&entries, &entries.adjoint());
        if herm_dev > 1e-10 {
            return Err(Error::InvalidMatrix(format!(
                "chi deviates from hermiticity by {herm_dev:.3e}"
            )));
        }
        let h = (&entries + entries.adjoint()).scale(0.5);
        let eigs = h.symmetric_eigen().eigenvalues;
        if let Some(min) = eigs.iter().cloned().reduce(f64::min) {
            if min < -1e-8 {
                return Err(Error::InvalidMatrix(format!(
                    "chi has eigenvalue {min:.3e} below -1e-8"
                )));
            }
        }
        if trace_normalized {
            let tr: Complex64 = entries.diagonal().sum();
            if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
                return Err(Error::InvalidMatrix(format!(
                    "chi flagged trace-normalized has trace {tr}"
                )));
            }
        }
        Ok(Self {
            entries,
            trace_normalized,
            n_qubits,
        })
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Hilbert-space dimension d (2 or 4); the matrix itself is d²×d².
    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// Side length of the chi matrix (d²).
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn trace_normalized(&self) -> bool {
        self.trace_normalized
    }

    /// Pauli label of basis index m ("Y", "ZX", ...), matching the row and
    /// column order of `entries`.
    pub fn basis_labels(&self) -> Vec<String> {
        (0..self.size())
            .map(|m| pauli_label(self.n_qubits, m))
            .collect()
    }

    /// Applies the channel to a density matrix: Σ χ_mn σ_m ρ σ_n†.
    pub fn apply(&self, rho: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
        let d = self.dim();
        if rho.shape() != (d, d) {
            return Err(Error::Dimension(format!(
                "chi of dimension {d} applied to {}x{} density matrix",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let size = self.size();
        let sigmas: Vec<DMatrix<Complex64>> = (0..size)
            .map(|m| pauli_basis_element(self.n_qubits, m))
            .collect();
        // Cache σ_m ρ once per m; Paulis are Hermitian so σ_n† = σ_n.
        let left: Vec<DMatrix<Complex64>> = sigmas.iter().map(|s| s * rho).collect();
        let mut out = DMatrix::zeros(d, d);
        for m in 0..size {
            for n in 0..size {
                let coeff = self.entries[(m, n)];
                if coeff.norm_sqr() == 0.0 {
                    continue;
                }
                out += &left[m] * &sigmas[n] * coeff;
            }
        }
        Ok(out)
    }
}

/// Rank-1 chi matrix of a known operation: χ = v v† / (v† v) with
/// v the Pauli expansion of the operator. Accepts non-unitary operators so
/// remote-controlled gates get an ideal reference too.
pub fn ideal_chi(op: &Operator) -> Result<ChiMatrix> {
    let v = pauli_expand(op)?;
    let coeffs = v.coeffs();
    let norm_sq: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum();
    if norm_sq < 1e-24 {
        return Err(Error::InvalidArgument(
            "ideal chi of the zero operator is undefined".into(),
        ));
    }
    let size = coeffs.len();
    let mut m = DMatrix::zeros(size, size);
    for i in 0..size {
        for j in 0..size {
            m[(i, j)] = coeffs[i] * coeffs[j].conj() / Complex64::new(norm_sq, 0.0);
        }
    }
    ChiMatrix::new(m, true)
}
