//! Experiment configuration: one JSON document per experiment.

use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use folnerlab_core::folner::{FolnerSequence, Shape};
use folnerlab_core::systems::{DynamicalSystem, Observable};
use folnerlab_core::{Character, Element, Group};

use crate::LabError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    FolnerCheck,
    Decompose,
    WwSweep,
    WwSup,
    Decay,
    VdcCheck,
    VdcFuzz,
    Correlation,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::FolnerCheck,
        ExperimentKind::Decompose,
        ExperimentKind::WwSweep,
        ExperimentKind::WwSup,
        ExperimentKind::Decay,
        ExperimentKind::VdcCheck,
        ExperimentKind::VdcFuzz,
        ExperimentKind::Correlation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::FolnerCheck => "folner-check",
            ExperimentKind::Decompose => "decompose",
            ExperimentKind::WwSweep => "ww-sweep",
            ExperimentKind::WwSup => "ww-sup",
            ExperimentKind::Decay => "decay",
            ExperimentKind::VdcCheck => "vdc-check",
            ExperimentKind::VdcFuzz => "vdc-fuzz",
            ExperimentKind::Correlation => "correlation",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GroupSpec {
    Lattice { dim: usize },
    Cyclic { modulus: u64, dim: usize },
    Line { step: f64, band: Option<f64>, dim: usize },
}

impl GroupSpec {
    pub fn build(&self) -> Result<Group, LabError> {
        let g = match *self {
            GroupSpec::Lattice { dim } => Group::lattice(dim),
            GroupSpec::Cyclic { modulus, dim } => Group::cyclic(modulus, dim),
            GroupSpec::Line { step, band, dim } => Group::line(step, band, dim),
        };
        g.map_err(|e| LabError::field("group", e))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SystemSpec {
    Rotation { alpha: Vec<f64> },
    Bernoulli { k: u64, seed: u64 },
    FiniteCycle { period: u64 },
    Product { parts: Vec<SystemSpec> },
}

impl SystemSpec {
    pub fn build(&self, group: &Group) -> Result<DynamicalSystem, LabError> {
        let s = match self {
            SystemSpec::Rotation { alpha } => DynamicalSystem::rotation(group, alpha),
            SystemSpec::Bernoulli { k, seed } => DynamicalSystem::bernoulli(group, *k, *seed),
            SystemSpec::FiniteCycle { period } => DynamicalSystem::finite_cycle(group, *period),
            SystemSpec::Product { parts } => {
                let parts = parts.iter().map(|p| p.build(group)).collect::<Result<Vec<_>, _>>()?;
                DynamicalSystem::product(&parts)
            }
        };
        s.map_err(|e| LabError::field("system", e))
    }
}

/// A complex number as `[re, im]`.
pub type ComplexSpec = [f64; 2];

fn c64(z: &ComplexSpec) -> Complex64 {
    Complex64::new(z[0], z[1])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ObservableSpec {
    Constant { value: ComplexSpec },
    /// `Σ c_k e^{2πi k x}` on a circle factor.
    Trig { factor: usize, terms: Vec<(i64, ComplexSpec)> },
    CircleCharacter { factor: usize, k: i64 },
    Symbol { factor: usize, site: Vec<i64>, table: Vec<ComplexSpec> },
    /// The symbol at the origin mapped to `k` evenly spaced reals in `[-1, 1]`.
    CenteredSymbol { factor: usize, k: u64 },
    State { factor: usize, table: Vec<ComplexSpec> },
    StateIndicator { factor: usize, period: u64, residue: u64 },
    Scaled { by: ComplexSpec, of: Box<ObservableSpec> },
    Sum { terms: Vec<ObservableSpec> },
    Product { factors: Vec<ObservableSpec> },
}

impl ObservableSpec {
    pub fn build(&self, sys: &DynamicalSystem) -> Result<Observable, LabError> {
        let o = self.build_unchecked(sys)?;
        o.check(sys).map_err(|e| LabError::field("observable", e))?;
        Ok(o)
    }

    fn build_unchecked(&self, sys: &DynamicalSystem) -> Result<Observable, LabError> {
        Ok(match self {
            ObservableSpec::Constant { value } => Observable::constant(c64(value)),
            ObservableSpec::Trig { factor, terms } => {
                Observable::trig(*factor, terms.iter().map(|(k, c)| (*k, c64(c))).collect())
            }
            ObservableSpec::CircleCharacter { factor, k } => Observable::circle_character(*factor, *k),
            ObservableSpec::Symbol { factor, site, table } => {
                let site = Element::new(site).map_err(|e| LabError::field("observable.site", e))?;
                Observable::symbol(*factor, site, table.iter().map(c64).collect())
            }
            ObservableSpec::CenteredSymbol { factor, k } => Observable::centered_symbol(*factor, sys.group().dim(), *k),
            ObservableSpec::State { factor, table } => Observable::state(*factor, table.iter().map(c64).collect()),
            ObservableSpec::StateIndicator {
                factor,
                period,
                residue,
            } => Observable::state_indicator(*factor, *period, *residue),
            ObservableSpec::Scaled { by, of } => of.build_unchecked(sys)?.scaled(c64(by)),
            ObservableSpec::Sum { terms } => Observable::Sum(
                terms
                    .iter()
                    .map(|t| t.build_unchecked(sys))
                    .collect::<Result<_, _>>()?,
            ),
            ObservableSpec::Product { factors } => Observable::Product(
                factors
                    .iter()
                    .map(|t| t.build_unchecked(sys))
                    .collect::<Result<_, _>>()?,
            ),
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FolnerSpec {
    #[default]
    Cube,
    Rectangle {
        rates: Vec<u64>,
    },
    ShiftedCube {
        drift: Vec<i64>,
    },
}

impl FolnerSpec {
    pub fn build(&self, group: &Group, n_max: u64) -> Result<FolnerSequence, LabError> {
        let shape = match self {
            FolnerSpec::Cube => Shape::Cube,
            FolnerSpec::Rectangle { rates } => Shape::Rectangle { rates: rates.clone() },
            FolnerSpec::ShiftedCube { drift } => Shape::ShiftedCube { drift: drift.clone() },
        };
        FolnerSequence::new(group, shape, 0, n_max).map_err(|e| LabError::field("folner", e))
    }
}

/// Random functions for `vdc-fuzz`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuzzSpec {
    pub cases: u64,
}

fn default_oversample() -> usize {
    8
}

fn default_max_frequency() -> u32 {
    4
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub group: GroupSpec,
    #[serde(default)]
    pub system: Option<SystemSpec>,
    #[serde(default)]
    pub observable: Option<ObservableSpec>,
    #[serde(default)]
    pub folner: FolnerSpec,
    pub n_list: Vec<u64>,
    /// Inner window indices `H` (vdc) or shift magnitudes (correlation,
    /// folner-check translate sup).
    #[serde(default)]
    pub h_list: Vec<u64>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default = "default_oversample")]
    pub oversample: usize,
    /// Character parameters for fixed-character averages; empty means the
    /// trivial character.
    #[serde(default)]
    pub characters: Vec<Vec<f64>>,
    /// Eigenbasis truncation `|k| ≤ max_frequency` on rotation factors.
    #[serde(default = "default_max_frequency")]
    pub max_frequency: u32,
    #[serde(default)]
    pub fuzz: Option<FuzzSpec>,
    #[serde(default)]
    pub output_dir: Option<String>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, LabError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| LabError::Usage(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::from_json(&text)
    }

    /// Canonical bytes: the parsed config re-serialized, so formatting of the
    /// source file does not matter.
    pub fn canonical_json(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), LabError> {
        let usage = |field: &str, msg: &str| Err(LabError::Usage(format!("{field}: {msg}")));
        if self.n_list.is_empty() {
            return usage("n_list", "must not be empty");
        }
        if self.oversample == 0 {
            return usage("oversample", "must be at least 1");
        }
        let group = self.group.build()?;
        let dim = group.dim();
        if let Some(c) = self.characters.iter().find(|c| c.len() != dim) {
            return usage("characters", &format!("{} parameters for a {dim}-dimensional group", c.len()));
        }
        let needs_system = !matches!(self.experiment, ExperimentKind::FolnerCheck | ExperimentKind::VdcFuzz);
        if needs_system {
            let Some(sys) = &self.system else {
                return usage("system", &format!("required by {}", self.experiment));
            };
            let sys = sys.build(&group)?;
            let Some(obs) = &self.observable else {
                return usage("observable", &format!("required by {}", self.experiment));
            };
            obs.build(&sys)?;
        }
        let needs_seeds = !matches!(
            self.experiment,
            ExperimentKind::FolnerCheck | ExperimentKind::Decompose
        );
        if needs_seeds && self.seeds.is_empty() {
            return usage("seeds", &format!("{} needs at least one seed", self.experiment));
        }
        match self.experiment {
            ExperimentKind::VdcCheck | ExperimentKind::VdcFuzz if self.h_list.is_empty() => {
                return usage("h_list", "vdc experiments need at least one H");
            }
            ExperimentKind::Correlation if self.h_list.is_empty() => {
                return usage("h_list", "correlation needs at least one shift");
            }
            ExperimentKind::VdcFuzz if self.fuzz.is_none() => return usage("fuzz", "required by vdc-fuzz"),
            ExperimentKind::Decay if self.n_list.windows(2).any(|w| w[0] >= w[1]) => {
                return usage("n_list", "decay needs a strictly increasing list");
            }
            _ => {}
        }
        self.folner.build(&group, self.n_max())?;
        Ok(())
    }

    pub fn n_max(&self) -> u64 {
        let n = self.n_list.iter().max().copied().unwrap_or(0);
        let h = self.h_list.iter().max().copied().unwrap_or(0);
        n.max(h)
    }

    pub fn build_group(&self) -> Result<Group, LabError> {
        self.group.build()
    }

    pub fn build_system(&self, group: &Group) -> Result<DynamicalSystem, LabError> {
        self.system
            .as_ref()
            .ok_or_else(|| LabError::Usage("system: missing".into()))?
            .build(group)
    }

    pub fn build_observable(&self, sys: &DynamicalSystem) -> Result<Observable, LabError> {
        self.observable
            .as_ref()
            .ok_or_else(|| LabError::Usage("observable: missing".into()))?
            .build(sys)
    }

    pub fn build_characters(&self, group: &Group) -> Result<Vec<Character>, LabError> {
        if self.characters.is_empty() {
            return Ok(vec![Character::trivial(group)]);
        }
        self.characters
            .iter()
            .map(|p| Character::new(group, p).map_err(|e| LabError::field("characters", e)))
            .collect()
    }
}
