//! JSON run configuration: the system, how to evolve it, and where results go.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qht_core::metrics::{ParamPath, DEFAULT_RATE_WINDOW, DEFAULT_SMOOTHING, DEFAULT_T_F};
use qht_core::{EvaluationOptions, InteractionKind, Junction, Propagator, QubitSpec, SystemSpec};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PropagatorChoice {
    Rk4,
    Expm,
    /// expm for the trajectory, RK4 alongside as a cross-check.
    Both,
}

impl std::str::FromStr for PropagatorChoice {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4" => Ok(Self::Rk4),
            "expm" => Ok(Self::Expm),
            "both" => Ok(Self::Both),
            _ => Err(CliError::Usage(format!("unknown propagator {s:?} (rk4, expm, both)"))),
        }
    }
}

/// The `system` section. Junctions and the zero-frequency flag are optional
/// and fall back to the interaction's defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub kind: InteractionKind,
    pub g: f64,
    pub qubits: Vec<QubitSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primary: Option<Junction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub secondary: Option<Junction>,
    #[serde(default = "yes")]
    pub zero_frequency_terms: bool,
}

fn yes() -> bool {
    true
}

impl SystemSection {
    pub fn to_spec(&self) -> SystemSpec {
        let mut spec = SystemSpec::new(self.kind, self.qubits.clone(), self.g);
        let (p, s) = self.kind.default_junctions();
        spec.primary = self.primary.unwrap_or(p);
        spec.secondary = self.secondary.unwrap_or(s);
        spec.zero_frequency_terms = self.zero_frequency_terms;
        spec
    }

    pub fn from_spec(spec: &SystemSpec) -> Self {
        Self {
            kind: spec.kind,
            g: spec.g,
            qubits: spec.qubits.clone(),
            primary: Some(spec.primary),
            secondary: Some(spec.secondary),
            zero_frequency_terms: spec.zero_frequency_terms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub t_final: f64,
    pub propagator: PropagatorChoice,
    pub dt: f64,
    pub samples: usize,
    /// Resolution of the dense run over `[0, transient_t]`.
    pub transient_dt: f64,
    pub transient_t: f64,
    pub margin: f64,
    /// Rate-ordering window; `null` skips the analysis.
    pub rate_window: Option<(f64, f64)>,
    pub rate_dt: f64,
    pub smoothing: f64,
}

impl Default for RunSection {
    fn default() -> Self {
        let o = EvaluationOptions::default();
        Self {
            t_final: DEFAULT_T_F,
            propagator: PropagatorChoice::Expm,
            dt: o.dt,
            samples: o.samples,
            transient_dt: o.transient_dt,
            transient_t: o.transient_t,
            margin: o.margin,
            rate_window: Some(DEFAULT_RATE_WINDOW),
            rate_dt: o.rate_dt,
            smoothing: DEFAULT_SMOOTHING,
        }
    }
}

impl RunSection {
    pub fn options(&self) -> EvaluationOptions {
        EvaluationOptions {
            t_f: self.t_final,
            propagator: match self.propagator {
                PropagatorChoice::Rk4 => Propagator::Rk4,
                _ => Propagator::Expm,
            },
            samples: self.samples,
            dt: self.dt,
            transient_t: self.transient_t,
            transient_dt: self.transient_dt,
            margin: self.margin,
            rate_window: self.rate_window,
            rate_dt: self.rate_dt,
            smoothing: self.smoothing,
        }
    }

    fn check(&self) -> Result<()> {
        let positive = [
            ("t_final", self.t_final),
            ("dt", self.dt),
            ("transient_dt", self.transient_dt),
            ("transient_t", self.transient_t),
            ("rate_dt", self.rate_dt),
            ("smoothing", self.smoothing),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Usage(format!("run.{name} must be positive, got {v}")));
            }
        }
        if self.samples < 2 {
            return Err(CliError::Usage(format!("run.samples must be at least 2, got {}", self.samples)));
        }
        if !(self.margin >= 0.0) {
            return Err(CliError::Usage(format!("run.margin must be non-negative, got {}", self.margin)));
        }
        if let Some((a, b)) = self.rate_window {
            if !(a >= 0.0 && b > a) {
                return Err(CliError::Usage(format!("run.rate_window [{a}, {b}] is empty")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub param: String,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub trajectory_csv: PathBuf,
    pub metrics_json: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot_svg: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steady_json: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_csv: Option<PathBuf>,
}

impl OutputSection {
    /// Every output path, resolved against `dir` when relative.
    pub fn resolved(&self, dir: &Path) -> OutputSection {
        let r = |p: &PathBuf| if p.is_absolute() { p.clone() } else { dir.join(p) };
        OutputSection {
            trajectory_csv: r(&self.trajectory_csv),
            metrics_json: r(&self.metrics_json),
            plot_svg: self.plot_svg.as_ref().map(r),
            steady_json: self.steady_json.as_ref().map(r),
            sweep_csv: self.sweep_csv.as_ref().map(r),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    pub outputs: OutputSection,
}

impl RunConfig {
    pub fn spec(&self) -> SystemSpec {
        self.system.to_spec()
    }

    /// Canonical form: every default spelled out, fields in declaration order.
    pub fn to_canonical_json(&self) -> String {
        let mut c = self.clone();
        let spec = c.spec();
        c.system = SystemSection::from_spec(&spec);
        serde_json::to_string_pretty(&c).expect("config serializes")
    }

    pub fn sweep_path(&self) -> Result<Option<ParamPath>> {
        self.sweep.as_ref().map(|s| s.param.parse().map_err(CliError::from)).transpose()
    }
}

/// Parses and fully validates a config document. `origin` names it in errors.
pub fn parse_config(text: &str, origin: &str) -> Result<RunConfig> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    validate_config(&cfg)?;
    Ok(cfg)
}

pub fn validate_config(cfg: &RunConfig) -> Result<()> {
    let report = cfg.spec().validate();
    if !report.is_valid() {
        return Err(CliError::Validation(report));
    }
    cfg.run.check()?;
    if let Some(s) = &cfg.sweep {
        cfg.sweep_path()?.expect("sweep present").apply(&cfg.spec(), s.from)?;
        if s.steps == 0 {
            return Err(CliError::Usage("sweep.steps must be at least 1".into()));
        }
    }
    Ok(())
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text, &path.display().to_string())
}

/// Fails early if `path` could not be written, creating parent directories.
pub fn ensure_writable(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    match fs::metadata(path) {
        Ok(meta) if meta.is_dir() => Err(CliError::io(
            path,
            std::io::Error::new(std::io::ErrorKind::IsADirectory, "output path is a directory"),
        )),
        Ok(_) => fs::OpenOptions::new().append(true).open(path).map(drop).map_err(|e| CliError::io(path, e)),
        Err(_) => {
            fs::File::create(path).map_err(|e| CliError::io(path, e))?;
            fs::remove_file(path).map_err(|e| CliError::io(path, e))
        }
    }
}
