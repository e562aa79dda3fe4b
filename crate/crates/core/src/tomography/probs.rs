//! Born probabilities of a channel over a tomography design.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::linalg::Operator;
use crate::tomography::{ChiMatrix, TomographyDesign};
use crate::{Error, Result};

/// Row weights below this are treated as exact annihilation: the row stays
/// all-zero instead of being renormalized.
pub(crate) const ZERO_ROW_THRESHOLD: f64 = 1e-14;

/// A channel in one of the two forms tomography consumes: a validated chi
/// matrix, or a raw (possibly non-unitary) operator A acting as ρ ↦ AρA†.
#[derive(Debug, Clone)]
pub enum Channel {
    Chi(ChiMatrix),
    Op(Operator),
}

impl Channel {
    pub fn dim(&self) -> usize {
        match self {
            Channel::Chi(chi) => chi.dim(),
            Channel::Op(op) => op.dim(),
        }
    }

    /// Applies the channel to a density matrix; not trace-preserving in
    /// general.
    pub fn apply(&self, rho: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
        match self {
            Channel::Chi(chi) => chi.apply(rho),
            Channel::Op(op) => {
                if rho.nrows() != op.dim() {
                    return Err(Error::Dimension(
                        "operator channel applied to mismatched density matrix".into(),
                    ));
                }
                Ok(op.entries() * rho * op.entries().adjoint())
            }
        }
    }
}

/// Conditional outcome probabilities per (prep, setting) row, plus the
/// pre-conditioning success weight of each row.
///
/// Rows are normalized to sum 1, except annihilated rows which are all-zero
/// with weight 0. The weight records what fraction of attempts survives the
/// channel (and, in physical simulations, post-selection) before
/// renormalization.
#[derive(Debug, Clone)]
pub struct ProbabilityTable {
    values: Vec<f64>,
    row_weights: Vec<f64>,
    n_preps: usize,
    n_settings: usize,
    n_outcomes: usize,
}

impl ProbabilityTable {
    /// Builds a table from unconditional row data: `raw[i][j][k]` flattened
    /// row-major. Each row is renormalized; rows with weight under the
    /// annihilation threshold become all-zero.
    pub fn from_unconditional(
        raw: &[f64],
        n_preps: usize,
        n_settings: usize,
        n_outcomes: usize,
    ) -> Result<Self> {
        if raw.len() != n_preps * n_settings * n_outcomes {
            return Err(Error::Dimension(format!(
                "expected {} probability cells, got {}",
                n_preps * n_settings * n_outcomes,
                raw.len()
            )));
        }
        let mut values = vec![0.0; raw.len()];
        let mut row_weights = Vec::with_capacity(n_preps * n_settings);
        for r in 0..n_preps * n_settings {
            let row = &raw[r * n_outcomes..(r + 1) * n_outcomes];
            for (k, &q) in row.iter().enumerate() {
                if q < -1e-9 {
                    return Err(Error::InvalidProbabilities(format!(
                        "cell (row {r}, outcome {k}) has probability {q:.3e}"
                    )));
                }
            }
            let w: f64 = row.iter().map(|&q| q.max(0.0)).sum();
            if w > ZERO_ROW_THRESHOLD {
                for (k, &q) in row.iter().enumerate() {
                    values[r * n_outcomes + k] = q.max(0.0) / w;
                }
                row_weights.push(w);
            } else {
                row_weights.push(0.0);
            }
        }
        Ok(Self {
            values,
            row_weights,
            n_preps,
            n_settings,
            n_outcomes,
        })
    }

    /// Builds a table whose rows are already conditional (each summing to 1
    /// within 1e-9, or all zero); row weights are set to 1 and 0.
    pub fn from_conditional(
        values: Vec<f64>,
        n_preps: usize,
        n_settings: usize,
        n_outcomes: usize,
    ) -> Result<Self> {
        if values.len() != n_preps * n_settings * n_outcomes {
            return Err(Error::Dimension(format!(
                "expected {} probability cells, got {}",
                n_preps * n_settings * n_outcomes,
                values.len()
            )));
        }
        let mut row_weights = Vec::with_capacity(n_preps * n_settings);
        for r in 0..n_preps * n_settings {
            let row = &values[r * n_outcomes..(r + 1) * n_outcomes];
            if row.iter().any(|&p| !(0.0..=1.0 + 1e-9).contains(&p)) {
                return Err(Error::InvalidProbabilities(format!(
                    "row {r} has entries outside [0, 1]"
                )));
            }
            let s: f64 = row.iter().sum();
            if s.abs() <= ZERO_ROW_THRESHOLD {
                row_weights.push(0.0);
            } else if (s - 1.0).abs() <= 1e-9 {
                row_weights.push(1.0);
            } else {
                return Err(Error::InvalidProbabilities(format!(
                    "row {r} sums to {s}, neither 0 nor 1"
                )));
            }
        }
        Ok(Self {
            values,
            row_weights,
            n_preps,
            n_settings,
            n_outcomes,
        })
    }

    pub fn n_preps(&self) -> usize {
        self.n_preps
    }

    pub fn n_settings(&self) -> usize {
        self.n_settings
    }

    pub fn n_outcomes(&self) -> usize {
        self.n_outcomes
    }

    pub fn n_cells(&self) -> usize {
        self.values.len()
    }

    pub fn flat_index(&self, prep: usize, setting: usize, outcome: usize) -> usize {
        (prep * self.n_settings + setting) * self.n_outcomes + outcome
    }

    /// Conditional probability p(outcome | prep, setting); 0 everywhere on
    /// annihilated rows.
    pub fn prob(&self, prep: usize, setting: usize, outcome: usize) -> f64 {
        self.values[self.flat_index(prep, setting, outcome)]
    }

    /// Pre-conditioning success weight of the (prep, setting) row.
    pub fn row_weight(&self, prep: usize, setting: usize) -> f64 {
        self.row_weights[prep * self.n_settings + setting]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row_weights(&self) -> &[f64] {
        &self.row_weights
    }
}

/// Born probabilities p(k | i, j) = tr(Π_k E(ρ_i)) / w_ij over the design,
/// conditionally renormalized row by row (w_ij is the channel's success
/// weight; unitary channels have w = 1 and their rows are untouched).
///
/// Chi channels are PSD by construction of [`ChiMatrix`], so every
/// unconditional cell is non-negative up to eigensolver jitter.
pub fn born_probabilities(channel: &Channel, design: &TomographyDesign) -> Result<ProbabilityTable> {
    if channel.dim() != design.dim() {
        return Err(Error::Dimension(format!(
            "channel dimension {} does not match design dimension {}",
            channel.dim(),
            design.dim()
        )));
    }
    let n_preps = design.n_preps();
    let n_settings = design.n_settings();
    let n_outcomes = design.n_outcomes();
    let mut raw = vec![0.0; n_preps * n_settings * n_outcomes];
    for (i, prep) in design.preps().iter().enumerate() {
        let rho_out = channel.apply(&prep.density())?;
        for (j, setting) in design.meas_settings().iter().enumerate() {
            for (k, proj) in setting.iter().enumerate() {
                let prod = proj.entries() * &rho_out;
                let q: Complex64 = prod.diagonal().sum();
                raw[(i * n_settings + j) * n_outcomes + k] = q.re;
            }
        }
    }
    ProbabilityTable::from_unconditional(&raw, n_preps, n_settings, n_outcomes)
}
