//! The JSON report a run writes, and the chi wire format it embeds.

use cusim::nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use cusim::tomography::ChiMatrix;

use crate::CliError;

/// Serialized chi matrix: row-major [re, im] pairs over the Pauli basis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChiWire {
    /// Hilbert-space dimension (2 or 4); the matrix side is dim².
    pub dim: usize,
    pub basis_labels: Vec<String>,
    pub trace_normalized: bool,
    pub entries: Vec<[f64; 2]>,
}

impl ChiWire {
    pub fn from_chi(chi: &ChiMatrix) -> Self {
        let size = chi.size();
        let mut entries = Vec::with_capacity(size * size);
        for r in 0..size {
            for c in 0..size {
                let z = chi.entries()[(r, c)];
                entries.push([z.re, z.im]);
            }
        }
        ChiWire {
            dim: chi.dim(),
            basis_labels: chi.basis_labels(),
            trace_normalized: chi.trace_normalized(),
            entries,
        }
    }

    pub fn size(&self) -> usize {
        self.basis_labels.len()
    }

    pub fn to_chi(&self) -> Result<ChiMatrix, CliError> {
        let size = self.size();
        if size != self.dim * self.dim {
            return Err(CliError::Config(format!(
                "chi has {} basis labels but dimension {}",
                size, self.dim
            )));
        }
        if self.entries.len() != size * size {
            return Err(CliError::Config(format!(
                "chi needs {} entries, found {}",
                size * size,
                self.entries.len()
            )));
        }
        let m = DMatrix::from_fn(size, size, |r, c| {
            let [re, im] = self.entries[r * size + c];
            Complex64::new(re, im)
        });
        ChiMatrix::new(m, self.trace_normalized)
            .map_err(|e| CliError::Config(format!("report chi is not a valid process matrix: {e}")))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseEcho {
    pub umi_phase_sigma: f64,
    pub umzi_phase_sigma: f64,
    pub waveplate_angle_sigma: f64,
    pub depolarizing_p: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SettingsEcho {
    pub preset: String,
    pub protocol: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
    pub u0: String,
    pub u1: String,
    pub shots: u64,
    pub n_trials: usize,
    pub seed: u64,
    pub noise: NoiseEcho,
}

/// Everything a run reports. Serialization is fully deterministic: same
/// config and seed give byte-identical JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub settings: SettingsEcho,
    pub chi_ideal: ChiWire,
    pub chi_exp: ChiWire,
    /// Bootstrap mean and standard deviation of the process fidelity.
    pub fidelity_mean: f64,
    pub fidelity_std: f64,
    /// Fidelity of the single fit to the full count table.
    pub fidelity_point: f64,
    pub bootstrap_trials: usize,
    pub bootstrap_excluded: usize,
    /// Mean success probability per preparation, averaged over settings.
    pub success_prob_summary: Vec<f64>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report structs always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text)
            .map_err(|e| CliError::Config(format!("cannot parse report: {e}")))
    }
}
