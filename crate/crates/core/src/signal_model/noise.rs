use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{RadarParams, Waveform};

/// Additive noise level, given as total transmit SNR of the pulse train.
/// `None` means noiseless.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub total_snr_db: Option<f64>,
}

impl NoiseSpec {
    pub fn noiseless() -> Self {
        Self { total_snr_db: None }
    }

    pub fn snr_db(db: f64) -> Self {
        Self {
            total_snr_db: Some(db),
        }
    }

    pub fn is_noiseless(&self) -> bool {
        match self.total_snr_db {
            None => true,
            Some(db) => db == f64::INFINITY,
        }
    }

    pub fn snr_linear(&self) -> f64 {
        match self.total_snr_db {
            None => f64::INFINITY,
            Some(db) => 10f64.powf(db / 10.0),
        }
    }

    /// Per-sample variance of the band-limited receiver noise,
    /// sigma^2 = pulses * E_h * B_h / SNR with the pulse energy E_h counted
    /// in Nyquist samples. `pulses` is P for a single train and P1 + P2 when
    /// two trains share the SNR budget.
    pub fn sample_variance(&self, params: &RadarParams, w: &Waveform, pulses: usize) -> f64 {
        if self.is_noiseless() {
            return 0.0;
        }
        pulses as f64 * w.energy() * params.bandwidth() / self.snr_linear()
    }

    /// Variance of each Fourier coefficient U_b[m], sigma^2 / (B_h T_r).
    pub fn coefficient_variance(&self, params: &RadarParams, w: &Waveform, pulses: usize) -> f64 {
        self.sample_variance(params, w, pulses) / (params.bandwidth() * params.pri())
    }

    /// Variance of the normalized coefficient noise T_r U_b[m] / H for a
    /// spectrum that is flat over the band (|H|^2 = E_h / B_h). This reduces
    /// to pulses * B_h * T_r / SNR and is the level used by the Fourier-domain
    /// synthesizers.
    pub fn normalized_variance(&self, params: &RadarParams, pulses: usize) -> f64 {
        if self.is_noiseless() {
            return 0.0;
        }
        pulses as f64 * params.bandwidth() * params.pri() / self.snr_linear()
    }
}

/// Circular complex Gaussian sample with E|x|^2 = variance.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}
