//! Job configuration: a TOML file with `schema_version`, complex numbers as
//! `[re, im]` pairs and spins as `two_ell` integers.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;
use sha2::{Digest, Sha256};
use thiserror::Error;
use xyz_gaudin::bethe::{probe_points, SolverOptions};
use xyz_gaudin::elliptic::ModulusContext;
use xyz_gaudin::gaudin::GaudinSpec;
use xyz_gaudin::lattice::{ChainSpec, Site, DEFAULT_DIM_CAP};
use xyz_gaudin::sklyanin::Spin;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("invalid config: {0}")]
    Model(#[from] xyz_gaudin::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelChoice {
    Gaudin,
    Xyz,
    Both,
}

impl ModelChoice {
    pub fn gaudin(self) -> bool {
        matches!(self, ModelChoice::Gaudin | ModelChoice::Both)
    }

    pub fn xyz(self) -> bool {
        matches!(self, ModelChoice::Xyz | ModelChoice::Both)
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelChoice::Gaudin => "gaudin",
            ModelChoice::Xyz => "xyz",
            ModelChoice::Both => "both",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Verification suites run by `verify`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Theta,
    Sklyanin,
    YangBaxter,
    Commutativity,
    Limits,
    Gaudin,
    Bethe,
    XyzBethe,
    Tphi,
    XyzVectors,
    GaudinVectors,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Theta => "theta",
            Suite::Sklyanin => "sklyanin",
            Suite::YangBaxter => "yang_baxter",
            Suite::Commutativity => "commutativity",
            Suite::Limits => "limits",
            Suite::Gaudin => "gaudin",
            Suite::Bethe => "bethe",
            Suite::XyzBethe => "xyz_bethe",
            Suite::Tphi => "tphi",
            Suite::XyzVectors => "xyz_vectors",
            Suite::GaudinVectors => "gaudin_vectors",
        }
    }

    /// Suites that need a finite `eta`.
    pub fn needs_eta(self) -> bool {
        matches!(
            self,
            Suite::Sklyanin | Suite::YangBaxter | Suite::Commutativity | Suite::XyzBethe | Suite::Tphi | Suite::XyzVectors
        )
    }

    pub fn defaults(model: ModelChoice) -> Vec<Suite> {
        let mut out = vec![Suite::Theta];
        if model.xyz() {
            out.extend([Suite::Sklyanin, Suite::YangBaxter, Suite::Commutativity, Suite::XyzBethe, Suite::Tphi, Suite::XyzVectors]);
        }
        if model.gaudin() {
            out.extend([Suite::Limits, Suite::Gaudin, Suite::Bethe, Suite::GaudinVectors]);
        }
        out.sort();
        out
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub schema_version: u32,
    #[serde(default = "default_job_id")]
    pub job_id: String,
    pub model: ModelChoice,
    pub seed: u64,
    pub chain: ChainConfig,
    #[serde(default)]
    pub nu_range: Option<NuRange>,
    pub probes: ProbeConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
}

fn default_job_id() -> String {
    "job".into()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub tau: [f64; 2],
    #[serde(default)]
    pub eta: Option<[f64; 2]>,
    pub sites: Vec<SiteConfig>,
    #[serde(default)]
    pub dim_cap: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteConfig {
    pub two_ell: i64,
    pub z: [f64; 2],
}

/// Inclusive range of the integer `nu`; empty when `min > max`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NuRange {
    pub min: i64,
    pub max: i64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub count: usize,
    pub seed: u64,
    #[serde(default = "default_exclusion")]
    pub exclusion: f64,
}

fn default_exclusion() -> f64 {
    0.05
}

/// Overrides of the solver defaults.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub starts: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub collision_tol: Option<f64>,
    pub dedup_tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub homotopy_steps: Option<usize>,
    pub max_root_height: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default)]
    pub suites: Option<Vec<Suite>>,
    /// Negative control: evaluate RLL with the sign of `eta` flipped in `R`.
    #[serde(default)]
    pub corrupt_eta_sign: bool,
    #[serde(default = "default_nodes")]
    pub quadrature_nodes: usize,
    #[serde(default = "default_denominator")]
    pub max_denominator: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            suites: None,
            corrupt_eta_sign: false,
            quadrature_nodes: default_nodes(),
            max_denominator: default_denominator(),
        }
    }
}

fn default_nodes() -> usize {
    32
}

fn default_denominator() -> usize {
    64
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
    /// Points per curve in CSV output.
    #[serde(default = "default_csv_points")]
    pub csv_points: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { path: None, format: None, csv_points: default_csv_points() }
    }
}

fn default_csv_points() -> usize {
    41
}

pub fn complex(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

/// A validated job.
#[derive(Clone, Debug)]
pub struct Job {
    pub config: JobConfig,
    pub config_hash: String,
    pub seed: u64,
    pub gaudin: GaudinSpec,
    pub chain: Option<ChainSpec>,
    pub nus: Vec<i64>,
    pub solver: SolverOptions,
    pub probes: Vec<Complex64>,
}

impl Job {
    pub fn load(path: &Path, seed_override: Option<u64>) -> Result<Self, ConfigError> {
        let bytes = std::fs::read(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::from_bytes(&bytes, seed_override)
    }

    pub fn from_bytes(bytes: &[u8], seed_override: Option<u64>) -> Result<Self, ConfigError> {
        let text = std::str::from_utf8(bytes).map_err(|e| ConfigError::Invalid(format!("not UTF-8: {e}")))?;
        let config: JobConfig = toml::from_str(text)?;
        let config_hash = hex::encode(Sha256::digest(bytes));
        Self::validate(config, config_hash, seed_override)
    }

    fn validate(config: JobConfig, config_hash: String, seed_override: Option<u64>) -> Result<Self, ConfigError> {
        if config.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::Invalid(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                config.schema_version
            )));
        }
        let all = config.chain.tau.iter().chain(config.chain.eta.iter().flatten()).chain(config.chain.sites.iter().flat_map(|s| s.z.iter()));
        if let Some(x) = all.into_iter().find(|x| !x.is_finite()) {
            return Err(ConfigError::Invalid(format!("non-finite number {x}")));
        }
        if config.chain.sites.is_empty() {
            return Err(ConfigError::Invalid("chain.sites is empty".into()));
        }
        if config.probes.count == 0 {
            return Err(ConfigError::Invalid("probes.count must be positive".into()));
        }
        if !(config.probes.exclusion > 0.0 && config.probes.exclusion <= 0.2) {
            return Err(ConfigError::Invalid("probes.exclusion must lie in (0, 0.2]".into()));
        }
        if config.verify.quadrature_nodes < 16 {
            return Err(ConfigError::Invalid("verify.quadrature_nodes must be at least 16".into()));
        }
        if config.model.xyz() && config.chain.eta.is_none() {
            return Err(ConfigError::Invalid(format!("model {} needs chain.eta", config.model.name())));
        }
        if let Some(suites) = &config.verify.suites {
            if let Some(s) = suites.iter().find(|s| s.needs_eta()) {
                if config.chain.eta.is_none() {
                    return Err(ConfigError::Invalid(format!("suite {} needs chain.eta", s.name())));
                }
            }
        }
        let ctx = ModulusContext::new(complex(config.chain.tau))?;
        let sites = config
            .chain
            .sites
            .iter()
            .map(|s| Ok(Site::new(Spin::from_twice(s.two_ell)?, complex(s.z))))
            .collect::<Result<Vec<_>, xyz_gaudin::Error>>()?;
        let cap = config.chain.dim_cap.unwrap_or(DEFAULT_DIM_CAP);
        let gaudin = GaudinSpec::with_dim_cap(sites.clone(), ctx.clone(), cap)?;
        let chain = match config.chain.eta {
            Some(eta) => Some(ChainSpec::with_dim_cap(sites.clone(), complex(eta), ctx.clone(), cap)?),
            None => None,
        };
        let nus = match &config.nu_range {
            Some(r) => (r.min..=r.max).collect(),
            None => Vec::new(),
        };
        let seed = seed_override.unwrap_or(config.seed);
        let mut solver = SolverOptions { seed, ..SolverOptions::default() };
        let s = &config.solver;
        solver.starts = s.starts.unwrap_or(solver.starts);
        solver.seed = seed_override.or(s.seed).unwrap_or(seed);
        solver.tol = s.tol.unwrap_or(solver.tol);
        solver.collision_tol = s.collision_tol.unwrap_or(solver.collision_tol);
        solver.dedup_tol = s.dedup_tol.unwrap_or(solver.dedup_tol);
        solver.max_iter = s.max_iter.unwrap_or(solver.max_iter);
        solver.homotopy_steps = s.homotopy_steps.unwrap_or(solver.homotopy_steps);
        solver.max_root_height = s.max_root_height.unwrap_or(solver.max_root_height);
        let probes = probe_points(&sites, &ctx, config.probes.seed, config.probes.count, config.probes.exclusion);
        Ok(Job { config, config_hash, seed, gaudin, chain, nus, solver, probes })
    }

    pub fn model(&self) -> ModelChoice {
        self.config.model
    }

    pub fn suites(&self) -> Vec<Suite> {
        let mut s = self.config.verify.suites.clone().unwrap_or_else(|| Suite::defaults(self.config.model));
        s.sort();
        s.dedup();
        s
    }
}
