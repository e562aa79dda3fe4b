//! Drives one experiment end to end: simulate, fit, bootstrap, report.

use std::path::Path;

use cusim::experiment::{simulate_experiment, ArmSpec, ExperimentSpec, Protocol};
use cusim::tomography::{
    ideal_chi, mle_chi_from_counts_prepared, process_fidelity, PreparedDesign,
};

use crate::config::{format_complex, ExperimentConfig};
use crate::presets::resolve;
use crate::report::{ChiWire, NoiseEcho, RunReport, SettingsEcho};
use crate::CliError;

fn numerical(e: cusim::Error) -> CliError {
    CliError::Numerical(e.to_string())
}

fn arm_echo(arm: &ArmSpec) -> String {
    match arm {
        ArmSpec::Named(name) => name.to_string(),
        ArmSpec::Matrix(op) => {
            let e = op.entries();
            format!(
                "matrix[{}, {}; {}, {}]",
                format_complex(e[(0, 0)]),
                format_complex(e[(0, 1)]),
                format_complex(e[(1, 0)]),
                format_complex(e[(1, 1)])
            )
        }
    }
}

fn settings_echo(
    cfg: &ExperimentConfig,
    protocol: &Protocol,
    u0: &ArmSpec,
    u1: &ArmSpec,
) -> SettingsEcho {
    let (protocol_name, alpha, beta) = match protocol {
        Protocol::CuGate => ("cu-qpt", None, None),
        Protocol::RcStatePrep(cf) => (
            "rc-stateprep",
            Some(format_complex(cf.alpha())),
            Some(format_complex(cf.beta())),
        ),
        Protocol::RcProjection(cf) => (
            "rc-projection",
            Some(format_complex(cf.alpha())),
            Some(format_complex(cf.beta())),
        ),
    };
    SettingsEcho {
        preset: cfg.preset.to_string(),
        protocol: protocol_name.to_string(),
        alpha,
        beta,
        u0: arm_echo(u0),
        u1: arm_echo(u1),
        shots: cfg.shots,
        n_trials: cfg.n_trials,
        seed: cfg.seed,
        noise: NoiseEcho {
            umi_phase_sigma: cfg.noise.umi_phase_sigma,
            umzi_phase_sigma: cfg.noise.umzi_phase_sigma,
            waveplate_angle_sigma: cfg.noise.waveplate_angle_sigma,
            depolarizing_p: cfg.noise.depolarizing_p,
            seed: cfg.noise.seed,
        },
    }
}

/// Simulates the configured experiment, reconstructs the process matrix by
/// maximum likelihood, bootstraps the fidelity error bar, and assembles the
/// report. Deterministic for a given config.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport, CliError> {
    let (protocol, u0, u1) = resolve(cfg)?;
    let spec = ExperimentSpec {
        protocol: protocol.clone(),
        u0: u0.clone(),
        u1: u1.clone(),
        noise: cfg.noise,
        shots: cfg.shots,
        seed: cfg.seed,
    };
    let sim = simulate_experiment(&spec).map_err(numerical)?;
    let chi_ideal = ideal_chi(&sim.target_operator).map_err(numerical)?;
    let pd = PreparedDesign::new(&sim.design).map_err(numerical)?;
    let fit = mle_chi_from_counts_prepared(&sim.counts, &pd).map_err(numerical)?;
    if !fit.converged {
        return Err(CliError::Numerical(format!(
            "likelihood fit did not converge (gradient norm {:.3e} after {} iterations)",
            fit.grad_norm, fit.iterations
        )));
    }
    let fidelity_point = process_fidelity(&fit.chi, &chi_ideal).map_err(numerical)?;
    let boot = cusim::tomography::bootstrap_fidelity_prepared(
        &sim.counts,
        &pd,
        &chi_ideal,
        cfg.n_trials,
    )
    .map_err(numerical)?;
    if !(0.0..=1.0).contains(&boot.mean) || boot.std < 0.0 {
        return Err(CliError::Numerical(format!(
            "bootstrap produced mean {} / std {}",
            boot.mean, boot.std
        )));
    }

    Ok(RunReport {
        settings: settings_echo(cfg, &protocol, &u0, &u1),
        chi_ideal: ChiWire::from_chi(&chi_ideal),
        chi_exp: ChiWire::from_chi(&fit.chi),
        fidelity_mean: boot.mean,
        fidelity_std: boot.std,
        fidelity_point,
        bootstrap_trials: boot.n_trials,
        bootstrap_excluded: boot.n_excluded,
        success_prob_summary: sim.success_summary,
    })
}

pub fn write_report(report: &RunReport, path: &Path) -> Result<(), CliError> {
    std::fs::write(path, report.to_json())
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}
