//! Quasi-static noise on phases and plate angles, plus depolarization.
//!
//! Phase noise models the residual drift of actively stabilized
//! interferometers: each tomography run (one preparation/setting
//! combination) gets a single Gaussian draw per interferometer, held fixed
//! for all shots of that run. Wave-plate missets are likewise one Gaussian
//! draw per plate per run. Depolarization absorbs everything else
//! (distinguishability, accidental coincidences) as a single white-noise
//! admixture on the post-selected two-qubit state.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::interferometer::InterferometerSettings;
use crate::optics::{Plate, WaveplateSetting};
use crate::rng::{stream, DOMAIN_NOISE};
use crate::{Error, Result};

/// Strengths of the noise channels; all zero means the ideal pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    /// Std of the Michelson long-arm phase, radians.
    pub umi_phase_sigma: f64,
    /// Std of the Mach-Zehnder long-arm phase, radians.
    pub umzi_phase_sigma: f64,
    /// Std of every wave-plate fast-axis misset, degrees.
    pub waveplate_angle_sigma: f64,
    /// Depolarizing weight applied to the post-selected two-qubit state
    /// before measurement.
    pub depolarizing_p: f64,
    /// Base seed of the noise streams.
    pub seed: u64,
}

impl NoiseConfig {
    /// Noise-free configuration with the given seed.
    pub fn ideal(seed: u64) -> Self {
        Self {
            umi_phase_sigma: 0.0,
            umzi_phase_sigma: 0.0,
            waveplate_angle_sigma: 0.0,
            depolarizing_p: 0.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.umi_phase_sigma < 0.0
            || self.umzi_phase_sigma < 0.0
            || self.waveplate_angle_sigma < 0.0
        {
            return Err(Error::InvalidArgument(
                "noise sigmas must be non-negative".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.depolarizing_p) {
            return Err(Error::InvalidArgument(format!(
                "depolarizing weight {} outside [0, 1]",
                self.depolarizing_p
            )));
        }
        Ok(())
    }

    pub fn is_ideal(&self) -> bool {
        self.umi_phase_sigma == 0.0
            && self.umzi_phase_sigma == 0.0
            && self.waveplate_angle_sigma == 0.0
            && self.depolarizing_p == 0.0
    }
}

/// One run's worth of perturbed hardware settings.
#[derive(Debug, Clone)]
pub struct NoisySettings {
    pub interferometer: InterferometerSettings,
    pub waveplates: Vec<WaveplateSetting>,
}

fn gaussian<R: Rng>(rng: &mut R, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return 0.0;
    }
    let normal = Normal::new(0.0, sigma).expect("validated sigma");
    normal.sample(rng)
}

/// Draws the run's phase offsets and plate missets from the stream keyed
/// (cfg.seed, run_index). Draw order is fixed: Michelson phase, Mach-Zehnder
/// phase, then each plate pair's half-wave and quarter-wave angles in list
/// order. Zero sigmas reproduce the inputs exactly.
pub fn sample_noisy_settings(
    base: &InterferometerSettings,
    waveplates: &[WaveplateSetting],
    cfg: &NoiseConfig,
    run_index: u64,
) -> Result<NoisySettings> {
    cfg.validate()?;
    let mut rng = stream(cfg.seed, DOMAIN_NOISE, &[run_index]);
    Ok(sample_noisy_settings_with_rng(base, waveplates, cfg, &mut rng))
}

/// Same draws from a caller-provided stream; the physical experiment layer
/// uses this to pull additional arm-plate missets from the run's stream
/// after the listed pairs.
pub fn sample_noisy_settings_with_rng<R: Rng>(
    base: &InterferometerSettings,
    waveplates: &[WaveplateSetting],
    cfg: &NoiseConfig,
    rng: &mut R,
) -> NoisySettings {
    let mut interferometer = base.clone();
    interferometer.umi_phase = base.umi_phase + gaussian(rng, cfg.umi_phase_sigma);
    interferometer.umzi_phase = base.umzi_phase + gaussian(rng, cfg.umzi_phase_sigma);
    let waveplates = waveplates
        .iter()
        .map(|wp| {
            let dh = gaussian(rng, cfg.waveplate_angle_sigma);
            let dq = gaussian(rng, cfg.waveplate_angle_sigma);
            WaveplateSetting::new(wp.hwp_angle() + dh, wp.qwp_angle() + dq)
        })
        .collect();
    NoisySettings {
        interferometer,
        waveplates,
    }
}

/// Perturbs each plate's fast-axis angle; used for the arm plates whose
/// stacks realize U₀ and U₁.
pub fn jitter_plates<R: Rng>(plates: &[Plate], sigma_deg: f64, rng: &mut R) -> Vec<Plate> {
    plates
        .iter()
        .map(|p| Plate {
            kind: p.kind,
            angle_deg: p.angle_deg + gaussian(rng, sigma_deg),
        })
        .collect()
}

/// (1 − p)·ρ + p·I/d on a trace-1 density matrix.
pub fn depolarize(rho: &DMatrix<Complex64>, p: f64) -> Result<DMatrix<Complex64>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "depolarizing weight {p} outside [0, 1]"
        )));
    }
    let d = rho.nrows();
    if rho.ncols() != d {
        return Err(Error::Dimension("density matrix must be square".into()));
    }
    let eye = DMatrix::identity(d, d);
    Ok(rho.scale(1.0 - p) + eye.scale(p / d as f64))
}
