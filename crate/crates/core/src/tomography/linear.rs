//! Linear-inversion chi reconstruction.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::tomography::{ChiMatrix, CountTable, PreparedDesign, ProbabilityTable, TomographyDesign};
use crate::{Error, Result};

fn invert(pd: &PreparedDesign, targets: &DVector<f64>) -> Result<ChiMatrix> {
    let x = pd.least_squares(targets)?;
    let m = pd.unpack(&x);
    let herm = (&m + m.adjoint()).scale(0.5);
    let tr: Complex64 = herm.diagonal().sum();
    if tr.norm() < 1e-12 {
        return Err(Error::Numerical(
            "linear inversion produced a traceless chi".into(),
        ));
    }
    let normalized = herm / tr;
    // Enforce exact hermiticity again: the complex division by a nearly-real
    // trace can reintroduce jitter at the last digit.
    let sym = (&normalized + normalized.adjoint()).scale(0.5);
    ChiMatrix::new(sym, true)
}

/// Least-squares inversion of the Born system from conditional frequencies.
///
/// The result is Hermitized and trace-normalized but, with noisy counts, not
/// necessarily positive semidefinite: construction-level validation still
/// applies, so heavily non-physical data surfaces as an error rather than a
/// silently bad estimate. Use the likelihood estimator when positivity
/// matters.
pub fn linear_inversion_chi(counts: &CountTable, design: &TomographyDesign) -> Result<ChiMatrix> {
    let pd = PreparedDesign::new(design)?;
    linear_inversion_chi_prepared(counts, &pd)
}

/// As [`linear_inversion_chi`] with a shared prepared design.
pub fn linear_inversion_chi_prepared(
    counts: &CountTable,
    pd: &PreparedDesign,
) -> Result<ChiMatrix> {
    check_counts_shape(counts, pd)?;
    let freqs = counts.frequencies();
    invert(pd, &DVector::from_vec(freqs))
}

/// Linear inversion from exact probabilities, bypassing count quantization
/// entirely; this is the infinite-shot limit.
///
/// The table keeps each row's success weight alongside its conditional
/// values, so the fit targets are the unconditional Born values
/// (conditional × weight). That restores the absolute scale a count table
/// cannot carry, and the inversion is exact for any channel, trace
/// preserving or not.
pub fn linear_inversion_chi_from_probabilities(
    probs: &ProbabilityTable,
    design: &TomographyDesign,
) -> Result<ChiMatrix> {
    let pd = PreparedDesign::new(design)?;
    if probs.n_cells() != pd.n_cells() {
        return Err(Error::Dimension(
            "probability table does not match the design geometry".into(),
        ));
    }
    let n_outcomes = probs.n_outcomes();
    let targets: Vec<f64> = probs
        .values()
        .iter()
        .enumerate()
        .map(|(c, &p)| p * probs.row_weights()[c / n_outcomes])
        .collect();
    invert(&pd, &DVector::from_vec(targets))
}

pub(crate) fn check_counts_shape(counts: &CountTable, pd: &PreparedDesign) -> Result<()> {
    let design = pd.design();
    if counts.n_preps() != design.n_preps()
        || counts.n_settings() != design.n_settings()
        || counts.n_outcomes() != design.n_outcomes()
    {
        return Err(Error::Dimension(
            "count table does not match the design geometry".into(),
        ));
    }
    Ok(())
}

/// Raw least-squares estimate without the ChiMatrix validation, for use as
/// an optimizer seed (may be slightly non-PSD).
pub(crate) fn raw_linear_estimate(
    counts: &CountTable,
    pd: &PreparedDesign,
) -> Result<nalgebra::DMatrix<Complex64>> {
    check_counts_shape(counts, pd)?;
    let freqs = counts.frequencies();
    let x = pd.least_squares(&DVector::from_vec(freqs))?;
    let m = pd.unpack(&x);
    Ok((&m + m.adjoint()).scale(0.5))
}
