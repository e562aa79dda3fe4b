use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cusim_cli::config::ExperimentConfig;
use cusim_cli::export::export_bar_chart_data;
use cusim_cli::presets::PresetName;
use cusim_cli::report::RunReport;
use cusim_cli::runner::{run_experiment, write_report};
use cusim_cli::CliError;

#[derive(Parser)]
#[command(
    name = "cusim",
    version,
    about = "Simulates a photonic controlled-unitary gate and its remote-control \
             variants, reconstructs the process matrix from the counts, and reports \
             bootstrapped process fidelities."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseChoice {
    /// All noise parameters zero.
    Ideal,
    /// The shipped calibrated profile of the physical setup.
    Calibrated,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChiChoice {
    /// The reconstructed process matrix.
    Exp,
    /// The process matrix of the target operation.
    Ideal,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a config file or a named preset.
    Run {
        /// Config file (flat key = value lines). Mutually exclusive with the
        /// preset flags.
        #[arg(long, conflicts_with_all = ["preset", "shots", "seed", "out", "noise"])]
        config: Option<PathBuf>,
        /// Built-in experiment: cnot-qpt, cs-qpt, rc-stateprep-a, rc-stateprep-b,
        /// rc-projection-a, rc-projection-b.
        #[arg(long)]
        preset: Option<String>,
        /// Counts per tomography row (default 10000).
        #[arg(long)]
        shots: Option<u64>,
        /// Seed for count statistics and noise draws (default 1).
        #[arg(long)]
        seed: Option<u64>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Noise profile for the run (default ideal).
        #[arg(long, value_enum)]
        noise: Option<NoiseChoice>,
    },
    /// Re-emit a report's process matrix as bar-chart CSV.
    ExportChi {
        /// Report file produced by `run`.
        #[arg(long = "in")]
        input: PathBuf,
        /// Output format (only csv).
        #[arg(long, default_value = "csv")]
        format: String,
        /// Which matrix to export.
        #[arg(long, value_enum, default_value_t = ChiChoice::Exp)]
        which: ChiChoice,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in self-test battery and report violations.
    Verify {
        /// Seed for the randomized checks.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Run {
            config,
            preset,
            shots,
            seed,
            out,
            noise,
        } => {
            let cfg = match (config, preset) {
                (Some(path), None) => ExperimentConfig::from_file(&path)?,
                (None, Some(name)) => {
                    let preset: PresetName = name.parse()?;
                    let calibrated = matches!(noise, Some(NoiseChoice::Calibrated));
                    ExperimentConfig::for_preset(preset, shots, seed, out, calibrated)?
                }
                (None, None) => {
                    return Err(CliError::Config(
                        "run needs either --config or --preset".into(),
                    ))
                }
                (Some(_), Some(_)) => unreachable!("clap rejects --config with --preset"),
            };
            let report = run_experiment(&cfg)?;
            match &cfg.output_path {
                Some(path) => {
                    write_report(&report, path)?;
                    println!(
                        "{}: fidelity {:.6} +/- {:.6} over {} trials -> {}",
                        report.settings.preset,
                        report.fidelity_mean,
                        report.fidelity_std,
                        report.bootstrap_trials,
                        path.display()
                    );
                }
                None => print!("{}", report.to_json()),
            }
            Ok(())
        }
        Command::ExportChi {
            input,
            format,
            which,
            out,
        } => {
            if format != "csv" {
                return Err(CliError::Config(format!(
                    "unsupported export format {format:?} (only csv)"
                )));
            }
            let text = std::fs::read_to_string(&input).map_err(|e| {
                CliError::Config(format!("cannot read {}: {e}", input.display()))
            })?;
            let report = RunReport::from_json(&text)?;
            let chi = match which {
                ChiChoice::Exp => &report.chi_exp,
                ChiChoice::Ideal => &report.chi_ideal,
            };
            match out {
                Some(path) => {
                    let mut buf = Vec::new();
                    export_bar_chart_data(chi, &mut buf)?;
                    std::fs::write(&path, buf).map_err(|e| {
                        CliError::Config(format!("cannot write {}: {e}", path.display()))
                    })?;
                }
                None => {
                    let stdout = std::io::stdout();
                    let mut lock = stdout.lock();
                    export_bar_chart_data(chi, &mut lock)?;
                    lock.flush()
                        .map_err(|e| CliError::Numerical(format!("stdout: {e}")))?;
                }
            }
            Ok(())
        }
        Command::Verify { seed } => {
            let outcomes = cusim::selfcheck::run_all(seed);
            let mut failures = 0usize;
            for check in &outcomes {
                let tag = if check.passed { "PASS" } else { "FAIL" };
                println!("[{tag}] {}: {}", check.name, check.detail);
                if !check.passed {
                    failures += 1;
                }
            }
            if failures == 0 {
                println!("{} checks, 0 violations", outcomes.len());
                Ok(())
            } else {
                Err(CliError::Numerical(format!(
                    "{failures} of {} checks violated",
                    outcomes.len()
                )))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
