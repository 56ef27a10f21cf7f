//! Sparse recovery of the delay-Doppler map: matrix OMP, per-range-bin
//! vector OMP and l1 (FISTA) solvers, refined dictionaries for off-grid
//! scenes, and the index-to-parameter readout.

mod config;
mod grid;
mod l1;
mod omp;

pub use config::{L1Params, RecoveryConfig, StepRule, Stopping};
pub use grid::{build_overdiscretized, detect_range_bin, extract_targets, nyquist_reduce, TargetEstimate};
pub use l1::l1_vector;
pub use omp::{matrix_omp, omp_core, omp_vector, OmpOutcome, VectorRecovery};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Serializable record of one recovery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub support: Vec<(usize, usize)>,
    pub amplitudes: Vec<Complex64>,
    pub estimates: Vec<TargetEstimate>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl RecoveryReport {
    pub fn new(outcome: &OmpOutcome, estimates: Vec<TargetEstimate>) -> Self {
        Self {
            support: outcome.map.entries().iter().map(|e| (e.row, e.col)).collect(),
            amplitudes: outcome.map.entries().iter().map(|e| e.amplitude).collect(),
            estimates,
            residual_norm: outcome.residual_norm,
            iterations: outcome.iterations,
            converged: outcome.converged,
        }
    }
}
