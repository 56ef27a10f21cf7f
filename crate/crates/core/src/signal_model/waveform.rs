use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::RadarParams;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveformKind {
    Lfm,
}

/// Baseband pulse h(t), time-limited to [0, T_h).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waveform {
    pub kind: WaveformKind,
    pub bandwidth: f64,
    pub pulse_width: f64,
}

impl Waveform {
    pub fn lfm(bandwidth: f64, pulse_width: f64) -> Result<Self> {
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(invalid("bandwidth", "must be finite and positive"));
        }
        if !(pulse_width.is_finite() && pulse_width > 0.0) {
            return Err(invalid("pulse_width", "must be finite and positive"));
        }
        Ok(Self {
            kind: WaveformKind::Lfm,
            bandwidth,
            pulse_width,
        })
    }

    /// The LFM pulse matching the band and width of `params`.
    pub fn for_params(params: &RadarParams) -> Self {
        Self {
            kind: WaveformKind::Lfm,
            bandwidth: params.bandwidth(),
            pulse_width: params.pulse_width(),
        }
    }

    pub fn sample(&self, t: f64) -> Complex64 {
        lfm_sample(self, t)
    }

    /// Integral of |h(t)|^2 over the support.
    pub fn energy(&self) -> f64 {
        match self.kind {
            WaveformKind::Lfm => self.pulse_width,
        }
    }

    /// H at frequency `freq` (Hz): the integral of h(t) e^{-j 2 pi freq t}
    /// by composite Simpson with at least 16 points per cycle of the
    /// integrand's fastest phase rotation.
    pub fn spectrum(&self, freq: f64) -> Complex64 {
        let th = self.pulse_width;
        let cycles = (self.bandwidth + freq.abs()) * th;
        let mut n = ((16.0 * cycles).ceil() as usize).max(4096);
        if n % 2 == 1 {
            n += 1;
        }
        let step = th / n as f64;
        let f = |t: f64| {
            let phase = PI * (self.bandwidth / th) * t * t - 2.0 * PI * freq * t;
            Complex64::from_polar(1.0, phase)
        };
        // h(T_h) is excluded by the half-open support but the endpoint has
        // zero measure; use the closed-form value so Simpson stays 4th order
        let mut acc = f(0.0) + f(th);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += f(i as f64 * step) * w;
        }
        acc * (step / 3.0)
    }
}

/// e^{j pi (B_h/T_h) t^2} on [0, T_h), zero elsewhere.
pub fn lfm_sample(w: &Waveform, t: f64) -> Complex64 {
    if !(0.0..w.pulse_width).contains(&t) {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar(1.0, PI * (w.bandwidth / w.pulse_width) * t * t)
}

/// Pulse spectrum sampled at the Fourier-series frequencies m / T_r,
/// m = 0..N-1.
#[derive(Debug, Clone)]
pub struct SpectrumTable {
    values: Vec<Complex64>,
    max_abs: f64,
}

/// Fraction of the in-band spectral peak below which a frequency index
/// may not be used for normalization.
pub const SPECTRAL_FLOOR: f64 = 0.1;

impl SpectrumTable {
    pub fn new(w: &Waveform, params: &RadarParams) -> Self {
        let n = params.nyquist_bins();
        let values: Vec<Complex64> = (0..n)
            .map(|m| w.spectrum(m as f64 / params.pri()))
            .collect();
        let max_abs = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        Self { values, max_abs }
    }

    pub fn at(&self, m: usize) -> Complex64 {
        self.values[m]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Whether index `m` clears the spectral floor.
    pub fn admissible(&self, m: usize) -> bool {
        self.values[m].norm() >= SPECTRAL_FLOOR * self.max_abs
    }

    pub fn admissible_mask(&self) -> Vec<bool> {
        (0..self.values.len()).map(|m| self.admissible(m)).collect()
    }
}
