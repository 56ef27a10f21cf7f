use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// When a greedy solver stops: after a known number of atoms, or once the
/// residual Frobenius norm drops to a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stopping {
    TargetCount(usize),
    ResidualThreshold(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// 1 / ||B||_2^2.
    Lipschitz,
    Fixed(f64),
}

/// FISTA settings for the l1 sub-problem solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct L1Params {
    pub step: StepRule,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub debias: bool,
    /// Entries with |x_i| <= support_threshold * max|x| are dropped.
    pub support_threshold: f64,
    /// Final lambda as a fraction of max|B^H g|.
    pub lambda_ratio: f64,
    /// Geometric factor between continuation stages.
    pub continuation: f64,
}

impl Default for L1Params {
    fn default() -> Self {
        Self {
            step: StepRule::Lipschitz,
            max_iterations: 20_000,
            tolerance: 1e-9,
            debias: true,
            support_threshold: 0.1,
            lambda_ratio: 1e-4,
            continuation: 0.2,
        }
    }
}

impl L1Params {
    pub fn validate(&self) -> Result<()> {
        if let StepRule::Fixed(s) = self.step {
            if !(s.is_finite() && s > 0.0) {
                return Err(invalid("l1.step", "fixed step must be positive"));
            }
        }
        if self.max_iterations == 0 {
            return Err(invalid("l1.max_iterations", "must be at least 1"));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(invalid("l1.tolerance", "must be positive"));
        }
        if !(0.0..1.0).contains(&self.support_threshold) {
            return Err(invalid("l1.support_threshold", "must lie in [0, 1)"));
        }
        if !(self.lambda_ratio > 0.0 && self.lambda_ratio < 1.0) {
            return Err(invalid("l1.lambda_ratio", "must lie in (0, 1)"));
        }
        if !(self.continuation > 0.0 && self.continuation < 1.0) {
            return Err(invalid("l1.continuation", "must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RecoveryConfigDoc", into = "RecoveryConfigDoc")]
pub struct RecoveryConfig {
    stopping: Stopping,
    gamma: usize,
    l1: L1Params,
}

#[derive(Serialize, Deserialize)]
struct RecoveryConfigDoc {
    stopping: Stopping,
    #[serde(default = "one")]
    gamma: usize,
    #[serde(default)]
    l1: L1Params,
}

fn one() -> usize {
    1
}

impl TryFrom<RecoveryConfigDoc> for RecoveryConfig {
    type Error = Error;
    fn try_from(d: RecoveryConfigDoc) -> Result<Self> {
        Self::new(d.stopping, d.gamma, d.l1)
    }
}

impl From<RecoveryConfig> for RecoveryConfigDoc {
    fn from(c: RecoveryConfig) -> Self {
        Self {
            stopping: c.stopping,
            gamma: c.gamma,
            l1: c.l1,
        }
    }
}

impl RecoveryConfig {
    pub fn new(stopping: Stopping, gamma: usize, l1: L1Params) -> Result<Self> {
        if gamma == 0 {
            return Err(invalid("gamma", "over-discretization factor must be >= 1"));
        }
        if let Stopping::ResidualThreshold(t) = stopping {
            if !(t.is_finite() && t >= 0.0) {
                return Err(invalid("residual_threshold", "must be finite and non-negative"));
            }
        }
        l1.validate()?;
        Ok(Self { stopping, gamma, l1 })
    }

    pub fn known_targets(count: usize) -> Self {
        Self {
            stopping: Stopping::TargetCount(count),
            gamma: 1,
            l1: L1Params::default(),
        }
    }

    pub fn residual_threshold(threshold: f64) -> Result<Self> {
        Self::new(Stopping::ResidualThreshold(threshold), 1, L1Params::default())
    }

    pub fn with_gamma(self, gamma: usize) -> Result<Self> {
        Self::new(self.stopping, gamma, self.l1)
    }

    pub fn with_l1(self, l1: L1Params) -> Result<Self> {
        Self::new(self.stopping, self.gamma, l1)
    }

    pub fn stopping(&self) -> Stopping {
        self.stopping
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn l1(&self) -> &L1Params {
        &self.l1
    }
}
