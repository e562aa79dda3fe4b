//! Precomputed linear structure of a tomography design.
//!
//! Every estimator ultimately works with the same kernels
//! B_c[m,n] = tr(Π_c σ_m ρ_i σ_n) indexed by measurement cell c = (i, j, k):
//! the model probability of a cell is the real pairing q_c = Σ_mn χ_mn B_c[m,n].
//! Building the kernels and factorizing the least-squares system costs far
//! more than one reconstruction, so bootstrap loops share one
//! [`PreparedDesign`] across trials.

use nalgebra::{DMatrix, DVector, Dyn};
use num_complex::Complex64;

use crate::linalg::pauli_basis_element;
use crate::tomography::TomographyDesign;
use crate::{Error, Result};

/// A tomography design plus its precomputed kernels and least-squares
/// factorization.
pub struct PreparedDesign {
    design: TomographyDesign,
    /// Real kernel matrix, n_cells × 2·s² with s = d²: row c is
    /// [vec Re(B_c) | −vec Im(B_c)], so q = kmat · [vec Re(χ); vec Im(χ)].
    kmat: DMatrix<f64>,
    svd: nalgebra::SVD<f64, Dyn, Dyn>,
    rank: usize,
    size: usize,
}

impl PreparedDesign {
    pub fn new(design: &TomographyDesign) -> Result<Self> {
        let dim = design.dim();
        let size = dim * dim;
        let n_qubits = design.n_qubits();
        let n_cells = design.n_preps() * design.n_settings() * design.n_outcomes();
        let sigmas: Vec<DMatrix<Complex64>> = (0..size)
            .map(|m| pauli_basis_element(n_qubits, m))
            .collect();

        let mut kmat = DMatrix::<f64>::zeros(n_cells, 2 * size * size);
        let mut cell = 0;
        for prep in design.preps() {
            let rho = prep.density();
            // left[m] = σ_m ρ; B_c[m,n] = tr(Π_c left[m] σ_n).
            let left: Vec<DMatrix<Complex64>> = sigmas.iter().map(|s| s * &rho).collect();
            let mut mid = vec![DMatrix::<Complex64>::zeros(dim, dim); size * size];
            for m in 0..size {
                for n in 0..size {
                    mid[m * size + n] = &left[m] * &sigmas[n];
                }
            }
            for setting in design.meas_settings() {
                for proj in setting {
                    let p = proj.entries();
                    for (mn, y) in mid.iter().enumerate() {
                        // tr(P·Y) = Σ_ab P[a,b]·Y[b,a]
                        let mut tr = Complex64::new(0.0, 0.0);
                        for a in 0..dim {
                            for b in 0..dim {
                                tr += p[(a, b)] * y[(b, a)];
                            }
                        }
                        kmat[(cell, mn)] = tr.re;
                        kmat[(cell, size * size + mn)] = -tr.im;
                    }
                    cell += 1;
                }
            }
        }

        let svd = kmat.clone().svd(true, true);
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let rank = svd
            .singular_values
            .iter()
            .filter(|&&s| s > smax * 1e-9)
            .count();
        // Anti-Hermitian directions of χ never reach the real pairing, so a
        // complete design has rank exactly s² out of the 2s² columns.
        if rank < size * size {
            return Err(Error::InvalidArgument(format!(
                "design is rank-deficient: rank {rank} of {} required",
                size * size
            )));
        }
        Ok(Self {
            design: design.clone(),
            kmat,
            svd,
            rank,
            size,
        })
    }

    pub fn design(&self) -> &TomographyDesign {
        &self.design
    }

    /// Side length s = d² of the chi matrices this design reconstructs.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn n_cells(&self) -> usize {
        self.kmat.nrows()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Model probabilities q_c for a Hermitian matrix in packed real form.
    pub(crate) fn forward(&self, packed: &DVector<f64>) -> DVector<f64> {
        &self.kmat * packed
    }

    /// Adjoint of [`forward`](Self::forward): packs Σ_c coef_c B_c.
    pub(crate) fn adjoint(&self, coef: &DVector<f64>) -> DVector<f64> {
        self.kmat.tr_mul(coef)
    }

    /// Minimum-norm least-squares solution of kmat·x = targets. The
    /// anti-Hermitian null space gets zero weight, so the unpacked matrix is
    /// Hermitian up to numerical noise.
    pub(crate) fn least_squares(&self, targets: &DVector<f64>) -> Result<DVector<f64>> {
        let smax = self.svd.singular_values.iter().cloned().fold(0.0, f64::max);
        self.svd
            .solve(targets, smax * 1e-9)
            .map_err(|e| Error::Numerical(format!("least-squares solve failed: {e}")))
    }

    /// Packs a complex matrix into [vec Re; vec Im] layout.
    pub(crate) fn pack(&self, m: &DMatrix<Complex64>) -> DVector<f64> {
        let s2 = self.size * self.size;
        let mut v = DVector::zeros(2 * s2);
        for (k, z) in m.iter().enumerate() {
            // nalgebra iterates column-major; record the flat (row-major)
            // index explicitly to match the kernel layout.
            let row = k % self.size;
            let col = k / self.size;
            let idx = row * self.size + col;
            v[idx] = z.re;
            v[s2 + idx] = z.im;
        }
        v
    }

    /// Inverse of [`pack`](Self::pack).
    pub(crate) fn unpack(&self, v: &DVector<f64>) -> DMatrix<Complex64> {
        let s2 = self.size * self.size;
        DMatrix::from_fn(self.size, self.size, |r, c| {
            let idx = r * self.size + c;
            Complex64::new(v[idx], v[s2 + idx])
        })
    }
}
