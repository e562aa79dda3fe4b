//! Experiment configuration: a flat key-value text format with dotted keys,
//! parseable with nothing more than line splitting.
//!
//! ```text
//! preset = custom
//! protocol = rc-stateprep
//! alpha = 0.816496580927726+0j
//! beta = 0.5773502691896258+0j
//! u0 = i
//! u1 = x
//! shots = 100000
//! n_trials = 100
//! seed = 7
//! noise.waveplate_angle_sigma = 0.5
//! noise.depolarizing_p = 0.02
//! output_path = report.json
//! ```
//!
//! Complex numbers are "re+imj" strings. Arm operators are gate names or an
//! explicit matrix via `u0.m00` .. `u0.m11`. Unknown or duplicate keys are
//! errors so typos cannot silently fall back to defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;

use cusim::experiment::ArmSpec;
use cusim::linalg::Operator;
use cusim::noise::NoiseConfig;
use cusim::optics::GateName;

use crate::presets::{calibrated_noise, PresetName};
use crate::CliError;

/// Protocol of a custom run; named presets imply theirs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CustomProtocol {
    RcStatePrep,
    RcProjection,
}

impl FromStr for CustomProtocol {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "rc-stateprep" => Ok(CustomProtocol::RcStatePrep),
            "rc-projection" => Ok(CustomProtocol::RcProjection),
            other => Err(CliError::Config(format!(
                "unknown protocol {other:?} (expected rc-stateprep or rc-projection)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub preset: PresetName,
    /// Custom runs only; named presets carry their own protocol.
    pub protocol: Option<CustomProtocol>,
    pub alpha: Option<Complex64>,
    pub beta: Option<Complex64>,
    pub u0: Option<ArmSpec>,
    pub u1: Option<ArmSpec>,
    pub shots: u64,
    pub n_trials: usize,
    pub noise: NoiseConfig,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
}

pub fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::Config(format!("cannot parse complex number {s:?} (want \"re+imj\")"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = t.strip_suffix(['j', 'J']) else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // Split the real part from the imaginary at the last sign that is not a
    // leading sign and not part of an exponent.
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            split = Some(k);
            break;
        }
    }
    let (re_str, im_str) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let re = re_str.parse::<f64>().map_err(|_| bad())?;
    let im = match im_str {
        "" | "+" => 1.0,
        "-" => -1.0,
        _ => im_str.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

/// Canonical "re+imj" rendering, the inverse of [`parse_complex`].
pub fn format_complex(z: Complex64) -> String {
    if z.im < 0.0 {
        format!("{}{}j", z.re, z.im)
    } else {
        format!("{}+{}j", z.re, z.im)
    }
}

fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Config(format!(
                "line {}: expected \"key = value\", got {line:?}",
                lineno + 1
            )));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if map.insert(key.clone(), value).is_some() {
            return Err(CliError::Config(format!("duplicate key {key:?}")));
        }
    }
    Ok(map)
}

fn take_parsed<T: FromStr>(
    map: &mut BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    match map.remove(key) {
        None => Ok(None),
        Some(v) => v
            .parse::<T>()
            .map(Some)
            .map_err(|e| CliError::Config(format!("key {key}: {e}"))),
    }
}

fn take_complex(
    map: &mut BTreeMap<String, String>,
    key: &str,
) -> Result<Option<Complex64>, CliError> {
    map.remove(key).map(|v| parse_complex(&v)).transpose()
}

fn take_arm(map: &mut BTreeMap<String, String>, key: &str) -> Result<Option<ArmSpec>, CliError> {
    let named = map.remove(key);
    let cells = ["m00", "m01", "m10", "m11"];
    let mut matrix = Vec::new();
    for cell in cells {
        if let Some(v) = map.remove(&format!("{key}.{cell}")) {
            matrix.push(parse_complex(&v)?);
        }
    }
    match (named, matrix.len()) {
        (None, 0) => Ok(None),
        (Some(name), 0) => {
            let gate = GateName::from_str(&name)
                .map_err(|e| CliError::Config(format!("key {key}: {e}")))?;
            if gate.is_two_qubit() {
                return Err(CliError::Config(format!(
                    "key {key}: {gate} is two-qubit and cannot sit in an interferometer arm"
                )));
            }
            Ok(Some(ArmSpec::Named(gate)))
        }
        (None, 4) => {
            let op = Operator::from_rows(2, &matrix)
                .map_err(|e| CliError::Config(format!("key {key}: {e}")))?;
            let arm = ArmSpec::Matrix(op);
            // Surface non-unitary matrices here, where the offending key is
            // known, instead of deep inside the run.
            arm.operator()
                .map_err(|e| CliError::Config(format!("key {key}: {e}")))?;
            Ok(Some(arm))
        }
        (Some(_), _) => Err(CliError::Config(format!(
            "key {key}: give a gate name or a matrix, not both"
        ))),
        (None, n) => Err(CliError::Config(format!(
            "key {key}: matrix needs all four entries {key}.m00 .. {key}.m11, got {n}"
        ))),
    }
}

impl ExperimentConfig {
    pub fn from_text(text: &str) -> Result<Self, CliError> {
        let mut map = parse_pairs(text)?;

        let preset: PresetName = take_parsed(&mut map, "preset")?
            .ok_or_else(|| CliError::Config("missing required key \"preset\"".into()))?;
        let protocol = match map.remove("protocol") {
            Some(v) => Some(v.parse::<CustomProtocol>()?),
            None => None,
        };
        let alpha = take_complex(&mut map, "alpha")?;
        let beta = take_complex(&mut map, "beta")?;
        let u0 = take_arm(&mut map, "u0")?;
        let u1 = take_arm(&mut map, "u1")?;
        let shots = take_parsed::<u64>(&mut map, "shots")?.unwrap_or(10_000);
        let n_trials = take_parsed::<usize>(&mut map, "n_trials")?.unwrap_or(100);
        let seed = take_parsed::<u64>(&mut map, "seed")?.unwrap_or(1);
        let output_path = map.remove("output_path").map(PathBuf::from);

        let noise_preset = map.remove("noise.preset");
        let sigma_keys = [
            "noise.umi_phase_sigma",
            "noise.umzi_phase_sigma",
            "noise.waveplate_angle_sigma",
            "noise.depolarizing_p",
        ];
        let noise_seed = take_parsed::<u64>(&mut map, "noise.seed")?.unwrap_or(seed);
        let noise = match noise_preset.as_deref() {
            Some(name) => {
                if let Some(k) = sigma_keys.iter().find(|k| map.contains_key(**k)) {
                    return Err(CliError::Config(format!(
                        "noise.preset conflicts with explicit {k}"
                    )));
                }
                match name {
                    "ideal" => NoiseConfig::ideal(noise_seed),
                    "calibrated" => calibrated_noise(noise_seed),
                    other => {
                        return Err(CliError::Config(format!(
                            "unknown noise.preset {other:?} (expected ideal or calibrated)"
                        )))
                    }
                }
            }
            None => NoiseConfig {
                umi_phase_sigma: take_parsed(&mut map, sigma_keys[0])?.unwrap_or(0.0),
                umzi_phase_sigma: take_parsed(&mut map, sigma_keys[1])?.unwrap_or(0.0),
                waveplate_angle_sigma: take_parsed(&mut map, sigma_keys[2])?.unwrap_or(0.0),
                depolarizing_p: take_parsed(&mut map, sigma_keys[3])?.unwrap_or(0.0),
                seed: noise_seed,
            },
        };
        // The preset branch above skips the sigma reads, so drain them here
        // to keep the unknown-key check honest.
        for k in sigma_keys {
            map.remove(k);
        }

        if !map.is_empty() {
            let keys: Vec<&str> = map.keys().map(String::as_str).collect();
            return Err(CliError::Config(format!(
                "unknown keys: {}",
                keys.join(", ")
            )));
        }

        let cfg = ExperimentConfig {
            preset,
            protocol,
            alpha,
            beta,
            u0,
            u1,
            shots,
            n_trials,
            noise,
            seed,
            output_path,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_text(&text)
    }

    /// Config for `run --preset NAME` with optional flag overrides.
    pub fn for_preset(
        preset: PresetName,
        shots: Option<u64>,
        seed: Option<u64>,
        output_path: Option<PathBuf>,
        calibrated: bool,
    ) -> Result<Self, CliError> {
        let seed = seed.unwrap_or(1);
        let noise = if calibrated {
            calibrated_noise(seed)
        } else {
            NoiseConfig::ideal(seed)
        };
        let cfg = ExperimentConfig {
            preset,
            protocol: None,
            alpha: None,
            beta: None,
            u0: None,
            u1: None,
            shots: shots.unwrap_or(10_000),
            n_trials: 100,
            noise,
            seed,
            output_path,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.shots == 0 {
            return Err(CliError::Config("shots must be at least 1".into()));
        }
        if self.n_trials < 2 {
            return Err(CliError::Config(
                "n_trials must be at least 2 for an error bar".into(),
            ));
        }
        self.noise
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        let customs = [
            ("alpha", self.alpha.is_some()),
            ("beta", self.beta.is_some()),
            ("u0", self.u0.is_some()),
            ("u1", self.u1.is_some()),
            ("protocol", self.protocol.is_some()),
        ];
        if self.preset == PresetName::Custom {
            if let Some((k, _)) = customs[..4].iter().find(|(_, set)| !set) {
                return Err(CliError::Config(format!(
                    "custom preset requires key {k:?}"
                )));
            }
        } else if let Some((k, _)) = customs.iter().find(|(_, set)| *set) {
            return Err(CliError::Config(format!(
                "preset {} forbids key {k:?} (custom only)",
                self.preset
            )));
        }
        Ok(())
    }
}
