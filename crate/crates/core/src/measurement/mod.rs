//! Frequency subsets, the measurement matrices A and B, the sparse
//! delay-Doppler map and the forward model Y = A X B^T.

mod operators;
mod subset;
mod text;

pub use operators::{
    build_A, build_B, forward_model, unvec, vec, vectorize_model, MatrixA, MatrixB, SparseEntry,
    SparseMap, KRON_CAP,
};
pub(crate) use operators::{coded_blocks, partial_fourier};
pub use subset::{random_subset, select_subset, FrequencySubset, SubsetStrategy};
pub use text::{from_text, to_text};

use crate::error::Result;
use crate::signal_model::PhaseCode;
use crate::CMatrix;

/// Subset, both measurement matrices and (optionally) an observation.
#[derive(Debug, Clone)]
pub struct MeasurementEnsemble {
    pub subset: FrequencySubset,
    pub a: MatrixA,
    pub b: MatrixB,
    pub y: Option<CMatrix>,
}

impl MeasurementEnsemble {
    pub fn new(subset: FrequencySubset, code: &PhaseCode, blocks: usize) -> Result<Self> {
        let a = build_A(&subset);
        let b = build_B(code, blocks)?;
        Ok(Self { subset, a, b, y: None })
    }

    pub fn with_observation(mut self, y: CMatrix) -> Self {
        self.y = Some(y);
        self
    }
}
