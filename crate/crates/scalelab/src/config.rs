//! Run configuration: defaults, TOML file, environment, then flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use scalelab_core::{BoxSpec, DensityModel, FunctionalSpec, QuadratureSpec, RadialSpec};

use crate::parse::{parse_density, parse_functional, ParseError};

pub const SEED_ENV: &str = "SCALELAB_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Homogeneity,
    Invariance,
    Euler,
    Representation,
    Pde,
    Box,
    Forms,
}

impl Check {
    pub const ALL: [Check; 7] = [
        Check::Homogeneity,
        Check::Invariance,
        Check::Euler,
        Check::Representation,
        Check::Pde,
        Check::Box,
        Check::Forms,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Homogeneity => "homogeneity",
            Check::Invariance => "invariance",
            Check::Euler => "euler",
            Check::Representation => "representation",
            Check::Pde => "pde",
            Check::Box => "box",
            Check::Forms => "forms",
        }
    }
}

/// Pass/fail gates. Defaults are the acceptance tolerances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// `|p̂ − p(m)|`.
    pub p_hat: f64,
    pub residual_rms: f64,
    /// `|m̂₀ − m₀|` and `|q̂ − q|`.
    pub m0: f64,
    pub euler: f64,
    pub invariance_condition: f64,
    pub representation: f64,
    pub pde: f64,
    /// Residual at `m₀ + 1` must exceed this.
    pub pde_wrong_m0_floor: f64,
    pub box_invariance: f64,
    pub form_spread: f64,
    pub form_identity: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            p_hat: 1e-6,
            residual_rms: 1e-8,
            m0: 1e-6,
            euler: 1e-6,
            invariance_condition: 1e-6,
            representation: 1e-6,
            pde: 1e-8,
            pde_wrong_m0_floor: 1e-2,
            box_invariance: 1e-6,
            form_spread: 1e-8,
            form_identity: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    /// Fixed radial cutoff; automatic from the tail tolerance when absent.
    pub r_max: Option<f64>,
    pub radial_panels: usize,
    pub radial_nodes: usize,
    pub box_panels: usize,
    pub box_nodes: usize,
    pub tail_tolerance: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        Self {
            r_max: q.radial.r_max,
            radial_panels: q.radial.panels,
            radial_nodes: q.radial.nodes_per_panel,
            box_panels: q.cube.panels_per_axis,
            box_nodes: q.cube.nodes_per_panel,
            tail_tolerance: q.tail_tolerance,
        }
    }
}

impl QuadratureConfig {
    pub fn to_spec(&self) -> QuadratureSpec {
        let base = QuadratureSpec::default();
        QuadratureSpec {
            radial: RadialSpec { r_max: self.r_max, panels: self.radial_panels, nodes_per_panel: self.radial_nodes },
            cube: BoxSpec { panels_per_axis: self.box_panels, nodes_per_panel: self.box_nodes, ..base.cube },
            tail_tolerance: self.tail_tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub json: Option<PathBuf>,
    pub csv_dir: Option<PathBuf>,
    /// Record per-check wall-clock seconds. Off by default so reports are
    /// byte-stable apart from the timestamp.
    pub timings: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub functionals: Vec<String>,
    pub densities: Vec<String>,
    /// Degrees for the homogeneity and invariance fits.
    pub m_set: Vec<f64>,
    /// Degrees for the Euler relation and integral representation.
    pub identity_m_set: Vec<f64>,
    pub lambda_set: Vec<f64>,
    pub checks: Vec<Check>,
    pub seed: u64,
    /// Sample points (and pairs) for pointwise checks.
    pub points: usize,
    pub boxes: usize,
    pub box_lambdas: Vec<f64>,
    pub quadrature: QuadratureConfig,
    pub thresholds: Thresholds,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            functionals: ["ne", "ext(z=1)", "hartree", "vw", "tf"].map(String::from).to_vec(),
            densities: vec!["gaussian:alpha=1,n=1".into()],
            m_set: vec![0.0, 1.0, 2.0, 3.0],
            identity_m_set: vec![0.0, 4.0],
            lambda_set: scalelab_core::scaling::default_lambdas(),
            checks: Vec::new(),
            seed: 20_240_601,
            points: 128,
            boxes: 3,
            box_lambdas: vec![0.5, 2.0],
            quadrature: QuadratureConfig::default(),
            thresholds: Thresholds::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("reading config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("config {path}: {source}")]
    Toml { path: PathBuf, source: toml::de::Error },
    #[error("{SEED_ENV}=`{0}` is not an unsigned integer")]
    SeedEnv(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Validated, parsed form of a [`RunConfig`].
#[derive(Debug, Clone)]
pub struct Plan {
    pub functionals: Vec<FunctionalSpec>,
    pub densities: Vec<(String, DensityModel)>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|source| ConfigError::Toml { path: path.to_path_buf(), source })
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        Self::from_toml_str(&text, path)
    }

    /// Applies `SCALELAB_SEED` when set.
    pub fn apply_env(&mut self, value: Option<String>) -> Result<(), ConfigError> {
        if let Some(v) = value {
            self.seed = v.trim().parse().map_err(|_| ConfigError::SeedEnv(v))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<Plan, ConfigError> {
        let invalid = |msg: &str| Err(ConfigError::Invalid(msg.to_string()));
        if self.checks.is_empty() {
            return invalid("no checks requested");
        }
        if self.functionals.is_empty() {
            return invalid("no functionals given");
        }
        if self.densities.is_empty() {
            return invalid("no densities given");
        }
        let wants = |c: Check| self.checks.contains(&c);
        if (wants(Check::Homogeneity) || wants(Check::Invariance))
            && (self.m_set.is_empty() || self.lambda_set.is_empty())
        {
            return invalid("homogeneity and invariance need non-empty m_set and lambda_set");
        }
        if (wants(Check::Euler) || wants(Check::Representation)) && self.identity_m_set.is_empty() {
            return invalid("euler and representation need a non-empty identity_m_set");
        }
        if (wants(Check::Pde) || wants(Check::Forms)) && self.points == 0 {
            return invalid("points must be > 0");
        }
        if wants(Check::Box) && (self.boxes == 0 || self.box_lambdas.is_empty()) {
            return invalid("box invariance needs boxes > 0 and non-empty box_lambdas");
        }
        let reals = self.m_set.iter().chain(&self.identity_m_set).chain(&self.lambda_set).chain(&self.box_lambdas);
        if reals.into_iter().any(|x| !x.is_finite()) {
            return invalid("m and lambda values must be finite");
        }
        self.quadrature.to_spec().build().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let functionals = self.functionals.iter().map(|s| parse_functional(s)).collect::<Result<_, _>>()?;
        let densities =
            self.densities.iter().map(|s| Ok((s.clone(), parse_density(s)?))).collect::<Result<_, ParseError>>()?;
        Ok(Plan { functionals, densities })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let mut c = RunConfig { checks: vec![Check::Homogeneity, Check::Box], ..RunConfig::default() };
        c.output.json = Some("r.json".into());
        let text = toml::to_string(&c).unwrap();
        assert_eq!(RunConfig::from_toml_str(&text, Path::new("x.toml")).unwrap(), c);
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let c =
            RunConfig::from_toml_str("checks = [\"pde\"]\nseed = 7\n[thresholds]\npde = 1e-9\n", Path::new("x.toml"))
                .unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.thresholds.pde, 1e-9);
        assert_eq!(c.thresholds.p_hat, 1e-6);
        assert_eq!(c.m_set, vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::from_toml_str("sede = 1\n", Path::new("x.toml")).is_err());
    }

    #[test]
    fn seed_env_override() {
        let mut c = RunConfig::default();
        c.apply_env(Some("42".into())).unwrap();
        assert_eq!(c.seed, 42);
        assert!(c.apply_env(Some("forty".into())).is_err());
        c.apply_env(None).unwrap();
        assert_eq!(c.seed, 42);
    }

    #[test]
    fn validation() {
        assert!(matches!(RunConfig::default().validate(), Err(ConfigError::Invalid(_))));
        let ok = RunConfig { checks: Check::ALL.to_vec(), ..RunConfig::default() };
        let plan = ok.validate().unwrap();
        assert_eq!(plan.functionals.len(), 5);
        let bad = RunConfig { densities: vec!["cube:side=1".into()], ..ok.clone() };
        assert!(matches!(bad.validate(), Err(ConfigError::Parse(_))));
        let bad = RunConfig { lambda_set: vec![], checks: vec![Check::Homogeneity], ..ok };
        assert!(bad.validate().is_err());
    }
}
