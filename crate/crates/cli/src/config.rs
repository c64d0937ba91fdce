//! Benchmark and scenario configuration files (TOML key-value format).

use serde::Deserialize;

use prana_core::bench::BenchConfig;
use prana_core::fdr::FdrMethod;
use prana_core::minet::{BandwidthRule, KernelConfig};
use prana_core::robustfit::{LtsConfig, Model};
use prana_core::simgen::ScenarioKind;

/// On-disk benchmark configuration. Only `scenario`, `p`, and `n` are
/// required; every other key has the pipeline default.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchFileConfig {
    pub scenario: String,
    pub p: usize,
    pub n: usize,
    #[serde(default)]
    pub effect: f64,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_model")]
    pub model: String,
    #[serde(default = "default_fdr")]
    pub fdr_method: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub parallelism: Option<usize>,
    #[serde(default)]
    pub dpi: bool,
    #[serde(default)]
    pub dpi_epsilon: f64,
    #[serde(default)]
    pub bandwidth: Option<f64>,
    #[serde(default = "default_trim")]
    pub trim: f64,
    #[serde(default = "default_starts")]
    pub n_starts: usize,
    #[serde(default = "default_csteps")]
    pub cstep_max: usize,
    /// Optional reference-count TSV; the bundled reference is used otherwise.
    #[serde(default)]
    pub reference: Option<String>,
    /// Override of the group-1 age-category proportions (three values, sum 1).
    #[serde(default)]
    pub proportions_group1: Option<Vec<f64>>,
    /// Override of the group-2 age-category proportions (three values, sum 1).
    #[serde(default)]
    pub proportions_group2: Option<Vec<f64>>,
}

fn default_replicates() -> usize {
    100
}
fn default_alpha() -> f64 {
    0.05
}
fn default_model() -> String {
    "multivariable".to_string()
}
fn default_fdr() -> String {
    "bh".to_string()
}
fn default_seed() -> u64 {
    42
}
fn default_trim() -> f64 {
    LtsConfig::default().trim_c
}
fn default_starts() -> usize {
    LtsConfig::default().n_starts
}
fn default_csteps() -> usize {
    LtsConfig::default().cstep_max
}

impl BenchFileConfig {
    pub fn parse(text: &str) -> anyhow::Result<BenchFileConfig> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_bench_config(&self) -> anyhow::Result<BenchConfig> {
        let kind = ScenarioKind::parse(&self.scenario)
            .ok_or_else(|| anyhow::anyhow!("unknown scenario {:?}", self.scenario))?;
        let model = match self.model.as_str() {
            "multivariable" => Model::Multivariable,
            "univariable" => Model::Univariable,
            other => anyhow::bail!("unknown model {:?}", other),
        };
        let fdr_method = FdrMethod::parse(&self.fdr_method)
            .ok_or_else(|| anyhow::anyhow!("unknown fdr method {:?}", self.fdr_method))?;
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            anyhow::bail!("alpha {} outside (0, 1)", self.alpha);
        }
        if self.replicates < 1 {
            anyhow::bail!("replicates must be at least 1");
        }
        let mut cfg = BenchConfig::new(kind, self.p, self.n, self.effect);
        cfg.n_replicates = self.replicates;
        cfg.alpha = self.alpha;
        cfg.model = model;
        cfg.fdr_method = fdr_method;
        cfg.master_seed = self.seed;
        if let Some(par) = self.parallelism {
            cfg.parallelism = par.max(1);
        }
        cfg.kernel = KernelConfig {
            bandwidth_rule: match self.bandwidth {
                Some(h) if h > 0.0 => BandwidthRule::Fixed(h),
                Some(h) => anyhow::bail!("bandwidth {} must be positive", h),
                None => BandwidthRule::Silverman,
            },
            dpi_enabled: self.dpi,
            dpi_epsilon: self.dpi_epsilon,
        };
        cfg.lts = LtsConfig {
            trim_c: self.trim,
            n_starts: self.n_starts,
            cstep_max: self.cstep_max,
            seed: self.seed,
        };
        cfg.proportions = match (&self.proportions_group1, &self.proportions_group2) {
            (None, None) => None,
            (g1, g2) => {
                let mut scn_defaults = prana_core::simgen::build_scenario(kind, 8, 0.1, 0)
                    .map(|s| s.sampling_proportions)
                    .unwrap_or([[1.0 / 3.0; 3]; 2]);
                if let Some(v) = g1 {
                    scn_defaults[0] = proportions_triple(v)?;
                }
                if let Some(v) = g2 {
                    scn_defaults[1] = proportions_triple(v)?;
                }
                Some(scn_defaults)
            }
        };
        Ok(cfg)
    }
}

pub fn proportions_triple(values: &[f64]) -> anyhow::Result<[f64; 3]> {
    if values.len() != 3 {
        anyhow::bail!("proportions need exactly 3 values, got {}", values.len());
    }
    let triple = [values[0], values[1], values[2]];
    prana_core::simgen::validate_proportions(&triple).map_err(|e| anyhow::anyhow!("{}", e))?;
    Ok(triple)
}
