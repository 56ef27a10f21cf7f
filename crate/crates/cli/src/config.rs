use std::path::{Path, PathBuf};

use rppc::analysis::{ExperimentConfig, Scenario};
use rppc::signal_model::RadarParams;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    /// P = 12, N = 64, K = 32, Q = 3, 200 trials.
    #[default]
    Desk,
    /// P = 20, T_r = 25 us, f_c = 10 GHz, B_h = 20 MHz, T_h = 1 us, N = 500.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SubsetKind {
    #[default]
    Random,
    Nyquist,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct SubsetSpec {
    pub strategy: SubsetKind,
    /// Coefficients per PRI; unset keeps the scale default.
    pub k: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneSpec {
    pub targets: Option<usize>,
    pub ambiguity_factor: Option<usize>,
    pub on_grid: bool,
    pub worst_case: bool,
}

impl Default for SceneSpec {
    fn default() -> Self {
        Self {
            targets: None,
            ambiguity_factor: None,
            on_grid: true,
            worst_case: false,
        }
    }
}

/// Everything a run needs. Unset optional fields fall back to the defaults
/// of the chosen scale and scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub scale: Scale,
    pub params: Option<RadarParams>,
    pub subset: SubsetSpec,
    pub code_seed: Option<u64>,
    pub scene: SceneSpec,
    pub snr_db: Option<Vec<f64>>,
    pub gamma: Option<usize>,
    pub trials: usize,
    pub no_coding: bool,
    /// `recover` synthesizes through the sampled time-domain path.
    pub time_domain: bool,
    pub output: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::RppcVsMprf,
            scale: Scale::Desk,
            params: None,
            subset: SubsetSpec::default(),
            code_seed: None,
            scene: SceneSpec::default(),
            snr_db: None,
            gamma: None,
            trials: 200,
            no_coding: false,
            time_domain: false,
            output: PathBuf::from("results"),
            seed: 2024,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| CliError::Config(path.to_path_buf(), e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn params(&self) -> RadarParams {
        self.params.unwrap_or(match self.scale {
            Scale::Desk => RadarParams::desk_scale(),
            Scale::Full => RadarParams::full_scale(),
        })
    }

    /// K for `recover`; `None` is Nyquist.
    pub fn coefficients(&self) -> Option<usize> {
        match self.subset.strategy {
            SubsetKind::Nyquist => None,
            SubsetKind::Random => Some(self.subset.k.unwrap_or(match self.scale {
                Scale::Desk => 32,
                Scale::Full => 250,
            })),
        }
    }

    pub fn ambiguity_factor(&self) -> usize {
        self.scene.ambiguity_factor.unwrap_or(match self.scale {
            Scale::Desk => 3,
            Scale::Full => 4,
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.experiment().map(|_| ())
    }

    pub fn experiment(&self) -> Result<ExperimentConfig, CliError> {
        let mut e = match self.scale {
            Scale::Desk => ExperimentConfig::desk(self.scenario),
            Scale::Full => ExperimentConfig::full_scale(self.scenario),
        };
        if let Some(p) = self.params {
            e.params = p;
        }
        match self.subset.strategy {
            SubsetKind::Nyquist => e.subnyquist = None,
            SubsetKind::Random => {
                if let Some(k) = self.subset.k {
                    e.subnyquist = Some(k);
                }
            }
        }
        if let Some(l) = self.scene.targets {
            e.targets = l;
        }
        if let Some(q) = self.scene.ambiguity_factor {
            e.ambiguity_factor = q;
            e.ambiguity_factors = vec![q];
        }
        if let Some(s) = &self.snr_db {
            e.snr_db = s.clone();
        }
        if let Some(g) = self.gamma {
            e.gammas = vec![g];
        }
        e.trials = self.trials;
        e.no_coding = self.no_coding;
        e.seed = self.seed;
        e.validate()?;
        Ok(e)
    }
}
