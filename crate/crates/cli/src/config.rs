use std::path::{Path, PathBuf};

use lscheme::num::{q_from_str, Kappa, Q};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// A full run description. Unknown keys are rejected at every level.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub group: GroupConfig,
    #[serde(default)]
    pub scheme: SchemeConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub bernoulli: BernoulliConfig,
    /// Lift the scheme through `Q × N → Q` as a final stage.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lift: Option<LiftConfig>,
    #[serde(default)]
    pub dihedral: DihedralConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupConfig {
    /// `H₃(ℤ)` with the box construction.
    #[default]
    Heisenberg,
    /// A 2-step nilpotent group from a Malcev presentation.
    Nil2 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        preset: Option<Nil2Preset>,
        /// `{r, s, comm: [[i, j, [..]], ..]}`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        presentation: Option<serde_json::Value>,
    },
    /// `A ≀ ℤ`; lamp moduli, `0` for a ℤ factor.
    Wreath {
        #[serde(default = "default_lamp")]
        lamp: Vec<u64>,
    },
    /// `BS(1, d)`.
    Bs {
        #[serde(default = "default_d")]
        d: u32,
    },
    /// `D_∞`: diagnostics only.
    Dihedral,
    /// `ℤ^d`: always refused.
    Zd {
        #[serde(default = "default_d_usize")]
        d: usize,
    },
}

fn default_lamp() -> Vec<u64> {
    vec![2]
}

fn default_d() -> u32 {
    2
}

fn default_d_usize() -> usize {
    2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Nil2Preset {
    /// `[y, x] = z`.
    H3,
    /// `[y, x] = z²`.
    H3Mu2,
    /// `H₅(ℤ)`.
    H5,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, JsonSchema, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ProfileName {
    /// Small parameters that enumerate in seconds.
    #[default]
    Desk,
    /// `A_n = 2^n` towers.
    Paper,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    #[serde(default)]
    pub profile: ProfileName,
    /// Window length; defaults to 4 for Heisenberg and 3 otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "default_shift_bound")]
    pub shift_bound: i64,
    #[serde(default = "default_series_max")]
    pub series_max: i64,
}

fn default_shift_bound() -> i64 {
    16
}

fn default_series_max() -> i64 {
    4096
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { shift_bound: default_shift_bound(), series_max: default_series_max() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct BernoulliConfig {
    /// Rational perturbation size, e.g. `"1/10"`.
    #[serde(default = "default_eps")]
    pub eps: String,
    /// Rational κ; defaults to the window's declared value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<String>,
    #[serde(default = "default_k0")]
    pub k0: i64,
    #[serde(default = "default_doublings")]
    pub doublings: usize,
    /// Exact norms are used for `|k|` up to this bound.
    #[serde(default = "default_exact_limit")]
    pub exact_limit: i64,
    /// Random cylinders per generator in the pushforward check.
    #[serde(default = "default_cylinders")]
    pub cylinders: usize,
    #[serde(default = "default_cylinder_size")]
    pub cylinder_size: usize,
}

fn default_eps() -> String {
    "1/10".into()
}

fn default_k0() -> i64 {
    1
}

fn default_doublings() -> usize {
    6
}

fn default_exact_limit() -> i64 {
    16
}

fn default_cylinders() -> usize {
    20
}

fn default_cylinder_size() -> usize {
    8
}

impl Default for BernoulliConfig {
    fn default() -> Self {
        Self {
            eps: default_eps(),
            kappa: None,
            k0: default_k0(),
            doublings: default_doublings(),
            exact_limit: default_exact_limit(),
            cylinders: default_cylinders(),
            cylinder_size: default_cylinder_size(),
        }
    }
}

impl BernoulliConfig {
    pub fn eps_q(&self) -> Result<Q, CliError> {
        parse_q("bernoulli.eps", &self.eps)
    }

    pub fn kappa_q(&self) -> Result<Option<Kappa>, CliError> {
        self.kappa.as_deref().map(|k| parse_q("bernoulli.kappa", k).map(|value| Kappa::Rational { value })).transpose()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, JsonSchema, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum RepChoice {
    #[default]
    Least,
    Greatest,
}

impl From<RepChoice> for lscheme::lifting::Rep {
    fn from(r: RepChoice) -> Self {
        match r {
            RepChoice::Least => Self::Least,
            RepChoice::Greatest => Self::Greatest,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct LiftConfig {
    /// Kernel moduli, `0` for a ℤ factor.
    #[serde(default = "default_lamp")]
    pub kernel: Vec<u64>,
    /// Seed of the twisted section.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<u64>,
    #[serde(default)]
    pub rep: RepChoice,
}

impl Default for LiftConfig {
    fn default() -> Self {
        Self { kernel: default_lamp(), twist: None, rep: RepChoice::Least }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct DihedralConfig {
    #[serde(default = "default_m_max")]
    pub m_max: i64,
    /// Random admissible sets per context.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_m_max() -> i64 {
    1000
}

fn default_samples() -> usize {
    100
}

impl Default for DihedralConfig {
    fn default() -> Self {
        Self { m_max: default_m_max(), samples: default_samples() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Report path; stdout when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    /// Directory for CSV series.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv_dir: Option<PathBuf>,
}

pub fn parse_q(field: &str, s: &str) -> Result<Q, CliError> {
    q_from_str(s).map_err(|e| CliError::Config(format!("{field}: {e}")))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn n_max(&self) -> usize {
        self.scheme.n_max.unwrap_or(match self.group {
            GroupConfig::Heisenberg => 4,
            _ => 3,
        })
    }
}

/// JSON Schema of [`RunConfig`].
pub fn schema() -> serde_json::Value {
    serde_json::to_value(schemars::schema_for!(RunConfig)).expect("schema serializes")
}
