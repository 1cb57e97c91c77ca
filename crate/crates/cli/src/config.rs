//! Scenario file schema.
//!
//! All physical inputs are dimensionless (units of one reference rate).
//! Complex Rabi frequencies are written as `[re, im]`.

use nief_core::doppler::DopplerConfig;
use nief_core::lics::{ContinuumCoupling, LicsDetunings};
use nief_core::mixing::MixingConfig;
use nief_core::model::{FieldSpec, RelaxationSpec, SchemeTopology, ValidationMode};
use nief_core::relaxation::{CascadeDoublet, FwmRates};
use nief_core::spectra::{Probe, WindowOptions};
use serde::{Deserialize, Serialize};

use crate::error::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Probe,
    Mixing,
    Lics,
    Cascade,
    Fwm,
    Sweep,
    Selftest,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Probe => "probe",
            Task::Mixing => "mixing",
            Task::Lics => "lics",
            Task::Cascade => "cascade",
            Task::Fwm => "fwm",
            Task::Sweep => "sweep",
            Task::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeChoice {
    #[default]
    R2,
    R4,
}

impl From<ProbeChoice> for Probe {
    fn from(p: ProbeChoice) -> Self {
        match p {
            ProbeChoice::R2 => Probe::R2,
            ProbeChoice::R4 => Probe::R4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MixingScan {
    #[default]
    X1,
    X02,
    Xs,
    /// Scan `ω_1` across the line: `x1` and `x02` move together.
    Omega1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingSection {
    #[serde(flatten)]
    pub config: MixingConfig,
    #[serde(default)]
    pub scan: MixingScan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LicsScan {
    XL,
    XN,
    #[default]
    YL,
    YN,
    ZGm,
    ZMu,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LicsSection {
    #[serde(default)]
    pub coupling: ContinuumCoupling,
    #[serde(default)]
    pub detunings: LicsDetunings,
    #[serde(default)]
    pub scan: LicsScan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Dot path of a numeric field in the scenario, e.g. `fields.rabi.0.0`.
    pub parameter: String,
    pub values: Vec<f64>,
    /// Task evaluated at each value.
    pub task: Task,
    /// Values are squares of the parameter (e.g. `|G_1|²` when sweeping a
    /// real Rabi frequency).
    #[serde(default)]
    pub squared: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub csv: Option<String>,
    pub json: Option<String>,
    /// Significant digits of every float in the CSV.
    pub precision: usize,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { csv: None, json: None, precision: 17 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub task: Task,
    #[serde(default)]
    pub scheme: SchemeTopology,
    #[serde(default)]
    pub validation: ValidationMode,
    #[serde(default)]
    pub probe: ProbeChoice,
    pub relaxation: Option<RelaxationSpec>,
    pub fields: Option<FieldSpec>,
    pub grid: Option<GridSpec>,
    pub doppler: Option<DopplerConfig>,
    pub windows: Option<WindowOptions>,
    pub mixing: Option<MixingSection>,
    pub lics: Option<LicsSection>,
    pub cascade: Option<CascadeDoublet>,
    pub fwm: Option<FwmRates>,
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub output: OutputSpec,
    pub seed: Option<u64>,
}

impl ScenarioConfig {
    pub fn from_value(value: serde_json::Value) -> Result<Self, RunError> {
        let cfg: Self = serde_json::from_value(value).map_err(|e| RunError::Schema(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), RunError> {
        if !(1..=17).contains(&self.output.precision) {
            return Err(RunError::Config("output.precision must lie in 1..=17".into()));
        }
        if let Some(g) = &self.grid {
            if g.points < 2 {
                return Err(RunError::Config(format!("grid.points = {} must be >= 2", g.points)));
            }
            if !(g.min.is_finite() && g.max.is_finite() && g.min < g.max) {
                return Err(RunError::Config("grid needs finite min < max".into()));
            }
        }
        if self.task == Task::Sweep {
            let Some(s) = &self.sweep else {
                return Err(RunError::Config("task sweep needs a sweep block".into()));
            };
            if s.values.is_empty() {
                return Err(RunError::Config("sweep.values is empty".into()));
            }
            if matches!(s.task, Task::Sweep | Task::Selftest) {
                return Err(RunError::Config("sweep.task must be a computation task".into()));
            }
            if s.values.iter().any(|v| !v.is_finite() || (s.squared && *v < 0.0)) {
                return Err(RunError::Config("sweep.values must be finite (and >= 0 when squared)".into()));
            }
        }
        Ok(())
    }

    pub fn require<'a, T>(&self, what: &'a Option<T>, name: &str) -> Result<&'a T, RunError> {
        what.as_ref().ok_or_else(|| RunError::Config(format!("task {} needs a {name} block", self.task.name())))
    }

    pub fn csv_name(&self) -> String {
        self.output.csv.clone().unwrap_or_else(|| format!("{}.csv", self.task.name()))
    }

    pub fn json_name(&self) -> String {
        self.output.json.clone().unwrap_or_else(|| format!("{}.json", self.task.name()))
    }
}
