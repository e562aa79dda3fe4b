//! Poisson count simulation over probability tables.

use rand_distr::{Distribution, Poisson};

use crate::rng::{stream, DOMAIN_COUNTS};
use crate::tomography::ProbabilityTable;
use crate::{Error, Result};

/// Simulated coincidence counts for every (prep, setting, outcome) cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    counts: Vec<u64>,
    n_preps: usize,
    n_settings: usize,
    n_outcomes: usize,
    shots_per_setting: u64,
    seed: u64,
}

impl CountTable {
    pub fn new(
        counts: Vec<u64>,
        n_preps: usize,
        n_settings: usize,
        n_outcomes: usize,
        shots_per_setting: u64,
        seed: u64,
    ) -> Result<Self> {
        if counts.len() != n_preps * n_settings * n_outcomes {
            return Err(Error::Dimension(format!(
                "expected {} count cells, got {}",
                n_preps * n_settings * n_outcomes,
                counts.len()
            )));
        }
        if shots_per_setting == 0 {
            return Err(Error::InvalidArgument("shots must be at least 1".into()));
        }
        Ok(Self {
            counts,
            n_preps,
            n_settings,
            n_outcomes,
            shots_per_setting,
            seed,
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

    pub fn shots_per_setting(&self) -> u64 {
        self.shots_per_setting
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn flat_index(&self, prep: usize, setting: usize, outcome: usize) -> usize {
        (prep * self.n_settings + setting) * self.n_outcomes + outcome
    }

    pub fn count(&self, prep: usize, setting: usize, outcome: usize) -> u64 {
        self.counts[self.flat_index(prep, setting, outcome)]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Conditional frequencies: each (prep, setting) row divided by its own
    /// total; rows with zero total stay all-zero. This is the estimator-side
    /// mirror of the conditional renormalization in probability generation.
    pub fn frequencies(&self) -> Vec<f64> {
        let mut freqs = vec![0.0; self.counts.len()];
        for r in 0..self.n_preps * self.n_settings {
            let row = &self.counts[r * self.n_outcomes..(r + 1) * self.n_outcomes];
            let total: u64 = row.iter().sum();
            if total > 0 {
                for (k, &n) in row.iter().enumerate() {
                    freqs[r * self.n_outcomes + k] = n as f64 / total as f64;
                }
            }
        }
        freqs
    }

    /// Replaces the counts, keeping geometry and metadata. Lengths must
    /// match; used by bootstrap resampling.
    pub(crate) fn with_counts(&self, counts: Vec<u64>) -> Self {
        assert_eq!(counts.len(), self.counts.len());
        Self {
            counts,
            ..self.clone()
        }
    }
}

/// Draws one Poisson count with the given mean from the cell's own stream.
pub(crate) fn poisson_draw(mean: f64, rng: &mut rand_chacha::ChaCha8Rng) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let dist = Poisson::new(mean).expect("positive finite Poisson mean");
    let draw: f64 = dist.sample(rng);
    draw.round() as u64
}

/// Simulates coincidence counting: every cell is an independent Poisson draw
/// with mean shots·p, from a generator keyed by (seed, prep, setting,
/// outcome). Identical inputs give identical tables, cell by cell.
pub fn simulate_counts(probs: &ProbabilityTable, shots: u64, seed: u64) -> Result<CountTable> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let mut counts = vec![0u64; probs.n_cells()];
    for i in 0..probs.n_preps() {
        for j in 0..probs.n_settings() {
            for k in 0..probs.n_outcomes() {
                let p = probs.prob(i, j, k);
                if p == 0.0 {
                    continue;
                }
                let mut rng = stream(seed, DOMAIN_COUNTS, &[i as u64, j as u64, k as u64]);
                counts[probs.flat_index(i, j, k)] = poisson_draw(shots as f64 * p, &mut rng);
            }
        }
    }
    CountTable::new(
        counts,
        probs.n_preps(),
        probs.n_settings(),
        probs.n_outcomes(),
        shots,
        seed,
    )
}
