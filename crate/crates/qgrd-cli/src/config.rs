//! Run configuration: flags merged over an optional JSON file, validated
//! before anything is computed.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use qgrd::instance::InstanceDescriptor;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
#[value(rename_all = "kebab-case")]
pub enum Experiment {
    Growth,
    RdFit,
    ModularContrast,
    Dirac,
    Summability,
    Lipnorm,
    Distance,
    Probe,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Growth => "growth",
            Experiment::RdFit => "rd-fit",
            Experiment::ModularContrast => "modular-contrast",
            Experiment::Dirac => "dirac",
            Experiment::Summability => "summability",
            Experiment::Lipnorm => "lipnorm",
            Experiment::Distance => "distance",
            Experiment::Probe => "probe",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every experiment. Each one mirrors a key of the JSON
/// config file; flags win over the file.
#[derive(Args, Clone, Debug, Default)]
pub struct Flags {
    /// JSON file with any of the keys below
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// z_d, free_group, su_q_2 or o_n_plus
    #[arg(long)]
    pub instance: Option<String>,
    #[arg(long)]
    pub q: Option<f64>,
    /// Rank of the lattice Z^d
    #[arg(long)]
    pub d: Option<u32>,
    /// Number of free generators
    #[arg(long)]
    pub rank: Option<u32>,
    /// N of O_N^+
    #[arg(long = "on-n")]
    pub on_n: Option<u32>,
    /// Generating set, comma separated labels (`1`, `-1`, `a`, `[1,0]`)
    #[arg(long = "gen", allow_hyphen_values = true)]
    pub generators: Option<String>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long = "M")]
    pub m: Option<usize>,
    #[arg(long = "Mprime")]
    pub m_prime: Option<usize>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    pub state1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub state2: Option<String>,
    /// Group-algebra element (JSON file) for lipnorm
    #[arg(long)]
    pub element: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub threads: Option<usize>,
}

/// The merged configuration, embedded verbatim in every output.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub on_n: Option<u32>,
    #[serde(rename = "gen", skip_serializing_if = "Option::is_none")]
    pub generators: Option<String>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(rename = "Mprime", skip_serializing_if = "Option::is_none")]
    pub m_prime: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state1: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state2: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub element: Option<PathBuf>,
    // where output goes is not part of what was computed
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing)]
    pub threads: Option<usize>,
}

macro_rules! overlay {
    ($cfg:ident, $flags:ident, $($field:ident),*) => {
        $( if $flags.$field.is_some() { $cfg.$field = $flags.$field.clone(); } )*
    };
}

impl RunConfig {
    pub fn from_flags(experiment: Experiment, flags: &Flags) -> Result<Self, CliError> {
        let mut cfg = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str::<RunConfig>(&text)
                    .map_err(|e| CliError::invalid(format!("config {}: {e}", path.display())))?
            }
            None => RunConfig::default(),
        };
        if let Some(e) = cfg.experiment {
            if e != experiment {
                return Err(CliError::invalid(format!(
                    "config file is for `{}`, but `{}` was requested",
                    e.name(),
                    experiment.name()
                )));
            }
        }
        cfg.experiment = Some(experiment);
        overlay!(
            cfg, flags, instance, q, d, rank, on_n, generators, n, m, m_prime, k, p, s, c, tol, samples, seed,
            state1, state2, element, out, format, threads
        );
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn experiment(&self) -> Experiment {
        self.experiment.expect("set by from_flags")
    }

    pub fn descriptor(&self) -> Result<InstanceDescriptor, CliError> {
        let kind = self
            .instance
            .as_deref()
            .ok_or_else(|| CliError::invalid("--instance is required"))?;
        let unused = |name: &str, set: bool| {
            if set {
                Err(CliError::invalid(format!("--{name} does not apply to {kind}")))
            } else {
                Ok(())
            }
        };
        let d = match kind {
            "z_d" => {
                unused("q", self.q.is_some())?;
                unused("rank", self.rank.is_some())?;
                unused("on-n", self.on_n.is_some())?;
                InstanceDescriptor::z_d(self.d.unwrap_or(1))
            }
            "free_group" => {
                unused("q", self.q.is_some())?;
                unused("d", self.d.is_some())?;
                unused("on-n", self.on_n.is_some())?;
                InstanceDescriptor::free_group(self.rank.unwrap_or(2))
            }
            "su_q_2" => {
                unused("d", self.d.is_some())?;
                unused("rank", self.rank.is_some())?;
                unused("on-n", self.on_n.is_some())?;
                InstanceDescriptor::su_q_2(self.q.ok_or_else(|| CliError::invalid("su_q_2 needs --q"))?)
            }
            "o_n_plus" => {
                unused("q", self.q.is_some())?;
                unused("d", self.d.is_some())?;
                unused("rank", self.rank.is_some())?;
                InstanceDescriptor::o_n_plus(self.on_n.ok_or_else(|| CliError::invalid("o_n_plus needs --on-n"))?)
            }
            other => return Err(CliError::invalid(format!("unknown instance `{other}`"))),
        };
        Ok(d)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(match self.experiment() {
            Experiment::Distance | Experiment::Lipnorm => Format::Json,
            _ => Format::Csv,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or(1e-3)
    }

    fn require<T: Copy>(&self, v: Option<T>, flag: &str) -> Result<T, CliError> {
        v.ok_or_else(|| CliError::invalid(format!("{} needs --{flag}", self.experiment().name())))
    }

    pub fn n(&self) -> Result<usize, CliError> {
        self.require(self.n, "N")
    }

    pub fn m(&self) -> Result<usize, CliError> {
        self.require(self.m, "M")
    }

    pub fn k(&self) -> Result<u32, CliError> {
        self.require(self.k, "k")
    }

    pub fn p(&self) -> Result<f64, CliError> {
        self.require(self.p, "p")
    }

    /// Structural checks: required parameters present and in range.
    fn validate(&self) -> Result<(), CliError> {
        self.descriptor()?;
        let positive = |name: &str, v: Option<f64>| match v {
            Some(x) if !(x > 0.0 && x.is_finite()) => Err(CliError::invalid(format!("--{name} must be positive"))),
            _ => Ok(()),
        };
        positive("tol", self.tol)?;
        positive("p", self.p)?;
        positive("c", self.c)?;
        if let Some(s) = self.s {
            if !s.is_finite() {
                return Err(CliError::invalid("--s must be finite"));
            }
        }
        if self.threads == Some(0) {
            return Err(CliError::invalid("--threads must be positive"));
        }
        if self.k == Some(0) {
            return Err(CliError::invalid("--k must be at least 1"));
        }
        match self.experiment() {
            Experiment::Growth | Experiment::ModularContrast | Experiment::Summability => {
                self.n()?;
            }
            Experiment::RdFit => {
                self.n()?;
                if self.samples == Some(0) {
                    return Err(CliError::invalid("--samples must be positive"));
                }
            }
            Experiment::Dirac => {
                self.m()?;
            }
            Experiment::Lipnorm => {
                self.k()?;
                self.m()?;
            }
            Experiment::Distance => {
                self.k()?;
                self.m()?;
                if self.state1.is_none() || self.state2.is_none() {
                    return Err(CliError::invalid("distance needs --state1 and --state2"));
                }
                if let Some(mp) = self.m_prime {
                    if mp < self.m()? {
                        return Err(CliError::invalid("--Mprime must be at least --M"));
                    }
                }
            }
            Experiment::Probe => {
                self.k()?;
                if self.n()? == 0 {
                    return Err(CliError::invalid("probe needs --N >= 1"));
                }
            }
        }
        if self.experiment() == Experiment::Summability {
            self.p()?;
        }
        Ok(())
    }
}
