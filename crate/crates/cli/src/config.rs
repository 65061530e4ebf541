//! Resolution of flags and `--config` files into a validated [`RunConfig`].
//!
//! A config file holds `key = value` lines named after the long flags
//! (`state = werner:0.8`, `a1 = 0 1.5708`, `grid-theta = 24`). Blank lines and
//! `#` comments are ignored; values may be quoted. Flags given on the command
//! line win over the file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use bell_core::chsh::MeasurementSettings;
use bell_core::lhv::LhvModel;
use bell_core::observables::PolarAngles;
use bell_core::states::{make_singlet, werner, DensityMatrix};
use bell_core::OptimizerConfig;
use clap::ValueEnum;

use crate::args::{Cli, Command, Format, GridArgs, SettingsArgs, StateArgs};
use crate::CliError;

const KNOWN_KEYS: &[&str] = &[
    "format", "out", "seed", "state", "preset", "a1", "a2", "b1", "b2", "grid-theta", "grid-phi",
    "from", "to", "points", "step", "exhaustive", "weights", "trials", "log",
];

pub const DEFAULT_SWEEP_POINTS: usize = 41;

/// Values read from a `--config` file.
#[derive(Debug, Default)]
pub struct FileLayer {
    values: BTreeMap<String, String>,
}

impl FileLayer {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", n + 1)))?;
            let key = key.trim().replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("config line {}: unknown key '{key}'", n + 1)));
            }
            let value = value.trim().trim_matches('"').trim_matches('\'').to_string();
            values.insert(key, value);
        }
        Ok(Self { values })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.raw(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| CliError::Usage(format!("config key '{key}': cannot parse '{v}'")))
            })
            .transpose()
    }

    /// `cli` if present, else the file value.
    fn pick<T: FromStr>(&self, cli: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        match cli {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    fn angles(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        self.raw(key)
            .map(|v| {
                v.split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| CliError::Usage(format!("config key '{key}': expected two numbers")))
            })
            .transpose()
    }

    fn flag(&self, cli: bool, key: &str) -> Result<bool, CliError> {
        Ok(cli || self.get::<bool>(key)?.unwrap_or(false))
    }
}

#[derive(Debug)]
pub struct StateSpec {
    pub label: String,
    pub rho: DensityMatrix,
}

#[derive(Debug)]
pub struct SettingsSpec {
    /// `optimal`, `aligned` or `explicit`.
    pub label: String,
    pub settings: MeasurementSettings,
}

#[derive(Debug)]
pub struct ModelSpec {
    pub label: String,
    pub model: LhvModel,
}

#[derive(Debug)]
pub enum Job {
    Chsh {
        state: StateSpec,
        settings: SettingsSpec,
    },
    Optimize {
        state: StateSpec,
        optimizer: OptimizerConfig,
    },
    WernerSweep {
        visibilities: Vec<f64>,
        optimizer: OptimizerConfig,
    },
    LhvExhaustive,
    Lhv {
        model: ModelSpec,
        trials: Option<usize>,
        log: Option<PathBuf>,
    },
    Sample {
        state: StateSpec,
        settings: SettingsSpec,
        trials: usize,
        log: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub struct RunConfig {
    pub command: &'static str,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub job: Job,
}

impl RunConfig {
    pub fn sampling_seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

pub fn parse_state(text: &str) -> Result<StateSpec, CliError> {
    let text = text.trim();
    let rho = if text == "singlet" {
        make_singlet()
    } else if let Some(p) = text.strip_prefix("werner:") {
        let p: f64 = p
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("bad visibility in '{text}'")))?;
        werner(p).map_err(|e| CliError::Usage(e.to_string()))?
    } else {
        return Err(CliError::Usage(format!(
            "unknown state '{text}' (expected singlet or werner:<p>)"
        )));
    };
    Ok(StateSpec {
        label: text.to_string(),
        rho,
    })
}

fn resolve_state(args: &StateArgs, file: &FileLayer) -> Result<StateSpec, CliError> {
    let text: Option<String> = file.pick(args.state.clone(), "state")?;
    parse_state(&text.ok_or_else(|| CliError::Usage("--state is required".into()))?)
}

fn preset(name: &str) -> Result<MeasurementSettings, CliError> {
    match name {
        "optimal" => Ok(MeasurementSettings::optimal()),
        "aligned" => Ok(MeasurementSettings::aligned()),
        other => Err(CliError::Usage(format!(
            "unknown settings preset '{other}' (expected optimal or aligned)"
        ))),
    }
}

fn polar(name: &str, v: &[f64]) -> Result<PolarAngles, CliError> {
    match v {
        [theta, phi] => PolarAngles::new(*theta, *phi)
            .map_err(|e| CliError::Usage(format!("--{name}: {e} (theta in [0, pi], phi in [0, 2pi))"))),
        _ => Err(CliError::Usage(format!("--{name} takes THETA PHI"))),
    }
}

fn resolve_settings(args: &SettingsArgs, file: &FileLayer) -> Result<SettingsSpec, CliError> {
    let names = ["a1", "a2", "b1", "b2"];
    let cli_angles = [&args.a1, &args.a2, &args.b1, &args.b2];
    let cli_explicit = cli_angles.iter().any(|a| a.is_some());

    let (preset_name, angles) = if args.preset.is_some() || cli_explicit {
        if args.preset.is_some() && cli_explicit {
            return Err(CliError::Usage("give either --preset or explicit angles, not both".into()));
        }
        let mut angles = Vec::new();
        if cli_explicit {
            for (name, cli) in names.iter().zip(cli_angles) {
                angles.push(match cli {
                    Some(v) => Some(v.clone()),
                    None => file.angles(name)?,
                });
            }
        }
        (args.preset.clone(), angles)
    } else {
        let file_preset: Option<String> = file.get("preset")?;
        let angles = names.iter().map(|n| file.angles(n)).collect::<Result<Vec<_>, _>>()?;
        let explicit = angles.iter().any(Option::is_some);
        if file_preset.is_some() && explicit {
            return Err(CliError::Usage("config gives both a preset and explicit angles".into()));
        }
        (file_preset, if explicit { angles } else { Vec::new() })
    };

    if angles.is_empty() {
        let label = preset_name.unwrap_or_else(|| "optimal".to_string());
        return Ok(SettingsSpec {
            settings: preset(&label)?,
            label,
        });
    }
    let mut polar_angles = Vec::with_capacity(4);
    for (name, a) in names.iter().zip(angles) {
        let a = a.ok_or_else(|| CliError::Usage(format!("--{name} missing: explicit settings need all four directions")))?;
        polar_angles.push(polar(name, &a)?);
    }
    Ok(SettingsSpec {
        label: "explicit".into(),
        settings: MeasurementSettings::from_polar(polar_angles.try_into().expect("four angles")),
    })
}

fn resolve_optimizer(grid: &GridArgs, file: &FileLayer, seed: Option<u64>) -> Result<OptimizerConfig, CliError> {
    let defaults = OptimizerConfig::default();
    let grid_theta = file.pick(grid.grid_theta, "grid-theta")?.unwrap_or(defaults.grid_theta);
    let grid_phi = file.pick(grid.grid_phi, "grid-phi")?.unwrap_or(defaults.grid_phi);
    if grid_theta == 0 || grid_phi == 0 {
        return Err(CliError::Usage("grid resolution must be positive".into()));
    }
    Ok(OptimizerConfig {
        grid_theta,
        grid_phi,
        seed,
        ..defaults
    })
}

fn parse_model(preset: Option<String>, weights: Option<Vec<f64>>) -> Result<Option<ModelSpec>, CliError> {
    let bad = |e: bell_core::Error| CliError::Usage(e.to_string());
    match (preset, weights) {
        (Some(_), Some(_)) => Err(CliError::Usage("give either --preset or --weights, not both".into())),
        (Some(p), None) => {
            let model = if p == "uniform16" {
                LhvModel::uniform16()
            } else if let Some(i) = p.strip_prefix("pattern:") {
                let i: usize = i
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad pattern index in '{p}'")))?;
                let mut w = [0.0; 16];
                *w.get_mut(i)
                    .ok_or_else(|| CliError::Usage(format!("pattern index {i} not in 0..16")))? = 1.0;
                LhvModel::from_pattern_weights(&w).map_err(bad)?
            } else {
                return Err(CliError::Usage(format!(
                    "unknown model preset '{p}' (expected uniform16 or pattern:<i>)"
                )));
            };
            Ok(Some(ModelSpec { label: p, model }))
        }
        (None, Some(w)) => {
            let w: [f64; 16] = w
                .try_into()
                .map_err(|w: Vec<f64>| CliError::Usage(format!("--weights needs 16 values, got {}", w.len())))?;
            Ok(Some(ModelSpec {
                label: "weights".into(),
                model: LhvModel::from_pattern_weights(&w).map_err(bad)?,
            }))
        }
        (None, None) => Ok(None),
    }
}

fn weights_from_file(file: &FileLayer) -> Result<Option<Vec<f64>>, CliError> {
    file.raw("weights")
        .map(|v| {
            v.split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| CliError::Usage("config key 'weights': expected numbers".into()))
        })
        .transpose()
}

fn require_trials(trials: Option<usize>) -> Result<usize, CliError> {
    match trials {
        None => Err(CliError::Usage("--trials is required".into())),
        Some(0) => Err(CliError::Usage("--trials must be at least 1".into())),
        Some(n) => Ok(n),
    }
}

fn sweep_points(from: f64, to: f64, points: Option<usize>, step: Option<f64>) -> Result<Vec<f64>, CliError> {
    let lo = bell_core::states::VISIBILITY_MIN - bell_core::states::VISIBILITY_SLACK;
    let hi = bell_core::states::VISIBILITY_MAX + bell_core::states::VISIBILITY_SLACK;
    for p in [from, to] {
        if !(lo..=hi).contains(&p) {
            return Err(CliError::Usage(format!("sweep bound {p} outside [-1/3, 1]")));
        }
    }
    if from > to {
        return Err(CliError::Usage("--from must not exceed --to".into()));
    }
    let points = match (points, step) {
        (_, Some(step)) if !(step > 0.0) => return Err(CliError::Usage("--step must be positive".into())),
        (_, Some(step)) => ((to - from) / step + 1e-9).floor() as usize + 1,
        (Some(n), None) => n,
        (None, None) => DEFAULT_SWEEP_POINTS,
    };
    match points {
        0 => Err(CliError::Usage("--points must be at least 1".into())),
        1 => Ok(vec![from]),
        n => Ok((0..n)
            .map(|i| {
                if i == n - 1 {
                    to
                } else {
                    from + (to - from) * i as f64 / (n - 1) as f64
                }
            })
            .collect()),
    }
}

pub fn resolve(cli: Cli) -> Result<RunConfig, CliError> {
    let file = match &cli.config {
        Some(path) => FileLayer::load(path)?,
        None => FileLayer::default(),
    };
    let format = match cli.format {
        Some(f) => f,
        None => match file.raw("format") {
            Some(v) => Format::from_str(v, true)
                .map_err(|_| CliError::Usage(format!("config key 'format': unknown format '{v}'")))?,
            None => Format::Text,
        },
    };
    let out: Option<PathBuf> = file.pick(cli.out, "out")?;
    let seed: Option<u64> = file.pick(cli.seed, "seed")?;
    let command = cli.command.name();

    let job = match cli.command {
        Command::Chsh(a) => Job::Chsh {
            state: resolve_state(&a.state, &file)?,
            settings: resolve_settings(&a.settings, &file)?,
        },
        Command::Optimize(a) => Job::Optimize {
            state: resolve_state(&a.state, &file)?,
            optimizer: resolve_optimizer(&a.grid, &file, seed)?,
        },
        Command::WernerSweep(a) => {
            let from = file.pick(a.from, "from")?.unwrap_or(0.0);
            let to = file.pick(a.to, "to")?.unwrap_or(1.0);
            let (points, step) = if a.points.is_some() || a.step.is_some() {
                (a.points, a.step)
            } else {
                (file.get("points")?, file.get("step")?)
            };
            Job::WernerSweep {
                visibilities: sweep_points(from, to, points, step)?,
                optimizer: resolve_optimizer(&a.grid, &file, seed)?,
            }
        }
        Command::Lhv(a) => {
            let exhaustive = file.flag(a.exhaustive, "exhaustive")?;
            let (preset, weights) = if a.preset.is_some() || a.weights.is_some() {
                (a.preset, a.weights)
            } else {
                (file.get("preset")?, weights_from_file(&file)?)
            };
            let model = parse_model(preset, weights)?;
            let trials = file.pick(a.trials, "trials")?;
            let log = file.pick(a.log, "log")?;
            match (exhaustive, model) {
                (true, Some(_)) => {
                    return Err(CliError::Usage("--exhaustive does not take a model".into()))
                }
                (true, None) => Job::LhvExhaustive,
                (false, None) => {
                    return Err(CliError::Usage(
                        "lhv needs --exhaustive, --preset or --weights".into(),
                    ))
                }
                (false, Some(model)) => {
                    if trials == Some(0) {
                        return Err(CliError::Usage("--trials must be at least 1".into()));
                    }
                    if log.is_some() && trials.is_none() {
                        return Err(CliError::Usage("--log requires --trials".into()));
                    }
                    Job::Lhv { model, trials, log }
                }
            }
        }
        Command::Sample(a) => Job::Sample {
            state: resolve_state(&a.state, &file)?,
            settings: resolve_settings(&a.settings, &file)?,
            trials: require_trials(file.pick(a.trials, "trials")?)?,
            log: file.pick(a.log, "log")?,
        },
    };

    Ok(RunConfig {
        command,
        format,
        out,
        seed,
        job,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    fn run(args: &[&str]) -> Result<RunConfig, CliError> {
        resolve(Cli::try_parse_from(std::iter::once("bell").chain(args.iter().copied())).unwrap())
    }

    #[test]
    fn state_parsing() {
        assert!(parse_state("singlet").is_ok());
        assert!(parse_state("werner:0.5").is_ok());
        assert!(matches!(parse_state("werner:1.5"), Err(CliError::Usage(_))));
        assert!(matches!(parse_state("werner:x"), Err(CliError::Usage(_))));
        assert!(matches!(parse_state("ghz"), Err(CliError::Usage(_))));
    }

    #[test]
    fn file_layer_parsing() {
        let f = FileLayer::parse("# comment\nstate = \"werner:0.8\"\ngrid_theta=12 # inline\n\n").unwrap();
        assert_eq!(f.raw("state"), Some("werner:0.8"));
        assert_eq!(f.get::<usize>("grid-theta").unwrap(), Some(12));
        assert!(FileLayer::parse("bogus = 1").is_err());
        assert!(FileLayer::parse("state singlet").is_err());
    }

    #[test]
    fn settings_resolution() {
        let c = run(&["chsh", "--state", "singlet"]).unwrap();
        let Job::Chsh { settings, .. } = c.job else { panic!() };
        assert_eq!(settings.label, "optimal");

        let c = run(&["chsh", "--state", "singlet", "--a1", "0", "0", "--a2", "0", "0", "--b1", "0", "0", "--b2", "0", "0"])
            .unwrap();
        let Job::Chsh { settings, .. } = c.job else { panic!() };
        assert_eq!(settings.label, "explicit");

        assert!(run(&["chsh", "--state", "singlet", "--a1", "0", "0"]).is_err());
        assert!(run(&["chsh", "--state", "singlet", "--preset", "optimal", "--a1", "0", "0"]).is_err());
        assert!(run(&["chsh", "--state", "singlet", "--a1", "4", "0", "--a2", "0", "0", "--b1", "0", "0", "--b2", "0", "0"])
            .is_err());
        assert!(run(&["chsh", "--state", "singlet", "--preset", "best"]).is_err());
    }

    #[test]
    fn sweep_grid() {
        assert_eq!(sweep_points(0.0, 1.0, None, None).unwrap().len(), 41);
        let v = sweep_points(0.0, 1.0, None, Some(0.05)).unwrap();
        assert_eq!(v.len(), 21);
        assert_eq!(*v.last().unwrap(), 1.0);
        assert!(sweep_points(-0.5, 1.0, None, None).is_err());
        assert!(sweep_points(0.0, 1.0, Some(0), None).is_err());
    }

    #[test]
    fn lhv_resolution() {
        assert!(matches!(run(&["lhv", "--exhaustive"]).unwrap().job, Job::LhvExhaustive));
        assert!(run(&["lhv"]).is_err());
        assert!(run(&["lhv", "--weights", "1,0"]).is_err());
        assert!(run(&["lhv", "--weights", "0.5,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0"]).is_err());
        assert!(run(&["lhv", "--preset", "pattern:16"]).is_err());
        assert!(run(&["lhv", "--preset", "uniform16", "--trials", "0"]).is_err());
        assert!(run(&["lhv", "--preset", "pattern:3"]).is_ok());
    }

    #[test]
    fn sample_requires_positive_trials() {
        assert!(run(&["sample", "--state", "singlet"]).is_err());
        assert!(run(&["sample", "--state", "singlet", "--trials", "0"]).is_err());
        assert!(run(&["sample", "--state", "singlet", "--trials", "5"]).is_ok());
    }
}
