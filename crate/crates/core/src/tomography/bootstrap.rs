//! Monte-Carlo error bars by Poisson resampling of observed counts.

use crate::rng::{stream, DOMAIN_BOOTSTRAP};
use crate::tomography::counts::poisson_draw;
use crate::tomography::mle::mle_chi_from_counts_prepared;
use crate::tomography::{process_fidelity, ChiMatrix, CountTable, PreparedDesign, TomographyDesign};
use crate::{Error, Result};

/// Spread of the reconstructed fidelity under count resampling.
#[derive(Debug, Clone)]
pub struct BootstrapSummary {
    pub mean: f64,
    pub std: f64,
    /// Trials whose likelihood ascent did not meet the convergence
    /// criterion; they are excluded from the statistics.
    pub n_excluded: usize,
    pub n_trials: usize,
    /// Set when more than 10% of trials were excluded; the error bar is
    /// then based on a thinned sample and should be treated with suspicion.
    pub exclusion_warning: bool,
    /// Per-trial fidelities of the included trials.
    pub fidelities: Vec<f64>,
}

/// Re-draws every cell Poisson with mean equal to the observed count,
/// refits by maximum likelihood, and measures fidelity to `ideal` per trial.
///
/// Trial t draws from a stream keyed (counts.seed, trial), so the ensemble
/// is deterministic and independent of evaluation order. Non-converged fits
/// are excluded; losing more than 10% of trials sets a warning flag, and
/// fewer than two usable trials is an error.
pub fn bootstrap_fidelity(
    counts: &CountTable,
    design: &TomographyDesign,
    ideal: &ChiMatrix,
    n_trials: usize,
) -> Result<BootstrapSummary> {
    if n_trials < 2 {
        return Err(Error::InvalidArgument(format!(
            "bootstrap needs at least 2 trials, got {n_trials}"
        )));
    }
    let pd = PreparedDesign::new(design)?;
    bootstrap_fidelity_prepared(counts, &pd, ideal, n_trials)
}

/// As [`bootstrap_fidelity`] with a shared prepared design.
pub fn bootstrap_fidelity_prepared(
    counts: &CountTable,
    pd: &PreparedDesign,
    ideal: &ChiMatrix,
    n_trials: usize,
) -> Result<BootstrapSummary> {
    if n_trials < 2 {
        return Err(Error::InvalidArgument(format!(
            "bootstrap needs at least 2 trials, got {n_trials}"
        )));
    }
    let mut fidelities = Vec::with_capacity(n_trials);
    let mut n_excluded = 0;
    for trial in 0..n_trials {
        let mut rng = stream(counts.seed(), DOMAIN_BOOTSTRAP, &[trial as u64]);
        let resampled: Vec<u64> = counts
            .counts()
            .iter()
            .map(|&n| {
                if n == 0 {
                    0
                } else {
                    poisson_draw(n as f64, &mut rng)
                }
            })
            .collect();
        let table = counts.with_counts(resampled);
        match mle_chi_from_counts_prepared(&table, pd) {
            Ok(outcome) if outcome.converged => {
                fidelities.push(process_fidelity(&outcome.chi, ideal)?);
            }
            Ok(_) => n_excluded += 1,
            Err(_) => n_excluded += 1,
        }
    }
    if fidelities.len() < 2 {
        return Err(Error::Numerical(format!(
            "bootstrap kept only {} of {n_trials} trials",
            fidelities.len()
        )));
    }
    let n = fidelities.len() as f64;
    let mean = fidelities.iter().sum::<f64>() / n;
    let var = fidelities
        .iter()
        .map(|f| (f - mean) * (f - mean))
        .sum::<f64>()
        / (n - 1.0);
    Ok(BootstrapSummary {
        mean,
        std: var.sqrt(),
        n_excluded,
        n_trials,
        exclusion_warning: n_excluded * 10 > n_trials,
        fidelities,
    })
}
