use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Pulse-to-pulse phase code z[p] = e^{j phi[p]}, with z[p] = 0 outside
/// [0, P-1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PhaseCodeDoc", into = "PhaseCodeDoc")]
pub struct PhaseCode {
    phases: Vec<f64>,
    codes: Vec<Complex64>,
}

impl PhaseCode {
    pub fn from_phases(phases: Vec<f64>) -> Result<Self> {
        if phases.is_empty() {
            return Err(invalid("phases", "code needs at least one pulse"));
        }
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(invalid("phases", "non-finite phase"));
        }
        let codes = phases
            .iter()
            .map(|&p| {
                if p == 0.0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::from_polar(1.0, p)
                }
            })
            .collect();
        Ok(Self { phases, codes })
    }

    /// Independent phases uniform on [0, 2 pi).
    pub fn random<R: Rng + ?Sized>(pulses: usize, rng: &mut R) -> Self {
        let phases = (0..pulses.max(1))
            .map(|_| rng.random_range(0.0..2.0 * PI))
            .collect();
        Self::from_phases(phases).expect("finite phases")
    }

    /// No coding: z[p] = 1 exactly.
    pub fn uncoded(pulses: usize) -> Self {
        Self::from_phases(vec![0.0; pulses.max(1)]).expect("finite phases")
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// z[index]; exactly zero for index < 0 or index >= P.
    pub fn z(&self, index: isize) -> Complex64 {
        if index < 0 || index as usize >= self.codes.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.codes[index as usize]
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PhaseCodeDoc {
    phases: Vec<f64>,
}

impl From<PhaseCode> for PhaseCodeDoc {
    fn from(c: PhaseCode) -> Self {
        Self { phases: c.phases }
    }
}

impl TryFrom<PhaseCodeDoc> for PhaseCode {
    type Error = crate::Error;
    fn try_from(d: PhaseCodeDoc) -> Result<Self> {
        PhaseCode::from_phases(d.phases)
    }
}
