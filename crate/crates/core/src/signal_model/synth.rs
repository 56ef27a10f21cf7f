//! Received-signal synthesis along the physical (time-domain) path and the
//! idealized Fourier-domain path.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

use super::noise::complex_gaussian;
use super::{NoiseSpec, PhaseCode, RadarParams, SpectrumTable, TargetScene, Waveform};
use crate::dft::twiddle2;
use crate::error::{invalid, Error, Result};
use crate::measurement::FrequencySubset;
use crate::CMatrix;

/// Oversampling factor used when none is given.
pub const DEFAULT_OVERSAMPLE: usize = 4;

/// Fast-time samples of every PRI. Stream `b` holds y(b T_r + t) taken at
/// t_i = (i + sample_offset) * T_r / len, i = 0..len.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedSignal {
    pub pri: f64,
    pub sample_offset: f64,
    pub streams: Vec<Vec<Complex64>>,
}

impl ReceivedSignal {
    pub fn samples_per_pri(&self) -> usize {
        self.streams.first().map_or(0, Vec::len)
    }

    pub fn sample_interval(&self) -> f64 {
        self.pri / self.samples_per_pri() as f64
    }
}

/// Offset (in sample intervals) of the fast-time sampling grid. Sampling
/// cell midpoints makes the Riemann sum a midpoint rule, which is second
/// order across the pulse edges for on-grid delays.
pub const SAMPLE_OFFSET: f64 = 0.5;

/// Samples the down-converted echo of every PRI from the exact sum over
/// targets and pulses, with per-sample Doppler phase e^{-j 2 pi nu t}.
/// Noise is band-limited to the N Nyquist harmonics with per-coefficient
/// variance sigma^2 / (B_h T_r), so the per-sample variance is sigma^2.
pub fn synthesize_received(
    params: &RadarParams,
    w: &Waveform,
    scene: &TargetScene,
    code: &PhaseCode,
    noise: &NoiseSpec,
    oversample: usize,
    seed: u64,
) -> Result<ReceivedSignal> {
    synthesize_received_with_offset(params, w, scene, code, noise, oversample, seed, SAMPLE_OFFSET)
}

#[allow(clippy::too_many_arguments)]
pub fn synthesize_received_with_offset(
    params: &RadarParams,
    w: &Waveform,
    scene: &TargetScene,
    code: &PhaseCode,
    noise: &NoiseSpec,
    oversample: usize,
    seed: u64,
    offset: f64,
) -> Result<ReceivedSignal> {
    if oversample == 0 {
        return Err(invalid("oversample", "must be at least 1"));
    }
    let pulses = params.pulse_count();
    if code.len() != pulses {
        return Err(Error::DimensionMismatch(format!(
            "phase code has {} pulses, radar has {pulses}",
            code.len()
        )));
    }
    for (i, t) in scene.targets().iter().enumerate() {
        if t.order >= pulses {
            return Err(Error::EchoOutsideCpi {
                index: i,
                order: t.order,
                pulses,
            });
        }
    }
    let max_nu_th = scene.max_doppler() * w.pulse_width;
    if max_nu_th > 0.1 {
        log::warn!("max doppler * T_h = {max_nu_th:.3}: intra-pulse Doppler is not negligible");
    }

    let pri = params.pri();
    let n_bins = params.nyquist_bins();
    let len = oversample * n_bins;
    let dt = pri / len as f64;

    let mut streams = vec![vec![Complex64::new(0.0, 0.0); len]; pulses];
    for (b, stream) in streams.iter_mut().enumerate() {
        for (i, y) in stream.iter_mut().enumerate() {
            let t_abs = b as f64 * pri + (i as f64 + offset) * dt;
            for st in scene.targets() {
                let tgt = &st.target;
                let rel = t_abs - tgt.full_delay;
                if rel < 0.0 {
                    continue;
                }
                let p = (rel / pri).floor() as isize;
                let zp = code.z(p);
                if zp.norm_sqr() == 0.0 {
                    continue;
                }
                let h = w.sample(rel - p as f64 * pri);
                if h.norm_sqr() == 0.0 {
                    continue;
                }
                let doppler = Complex64::from_polar(1.0, -2.0 * PI * tgt.doppler * t_abs);
                *y += tgt.amplitude * h * doppler * zp;
            }
        }
    }

    if !noise.is_noiseless() {
        let var = noise.coefficient_variance(params, w, pulses);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut planner = FftPlanner::<f64>::new();
        let ifft = planner.plan_fft_inverse(len);
        for stream in streams.iter_mut() {
            let mut buf = vec![Complex64::new(0.0, 0.0); len];
            for (m, slot) in buf.iter_mut().enumerate().take(n_bins) {
                let shift = Complex64::from_polar(1.0, 2.0 * PI * m as f64 * offset / len as f64);
                *slot = complex_gaussian(&mut rng, var) * shift;
            }
            ifft.process(&mut buf);
            for (y, u) in stream.iter_mut().zip(buf) {
                *y += u;
            }
        }
    }

    Ok(ReceivedSignal {
        pri,
        sample_offset: offset,
        streams,
    })
}

/// Fourier-series coefficients Y_b[m_k] = (1/T_r) * integral of the PRI
/// stream against e^{-j 2 pi m_k t / T_r}, by the Riemann sum over the
/// stream's samples.
pub fn fourier_coefficients(
    stream: &[Complex64],
    sample_offset: f64,
    subset: &FrequencySubset,
) -> Result<Vec<Complex64>> {
    let len = stream.len();
    if len < subset.bins() {
        return Err(invalid(
            "stream",
            format!("{len} samples cannot resolve {} harmonics", subset.bins()),
        ));
    }
    let mut buf = stream.to_vec();
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(len).process(&mut buf);
    Ok(subset
        .indices()
        .iter()
        .map(|&m| {
            let shift = Complex64::from_polar(1.0, -2.0 * PI * m as f64 * sample_offset / len as f64);
            buf[m] * shift / len as f64
        })
        .collect())
}

/// Divides Fourier coefficients by the pulse spectrum,
/// Y~_b[m_k] = T_r Y_b[m_k] / H(2 pi m_k / T_r).
#[derive(Debug, Clone)]
pub struct Normalizer {
    table: SpectrumTable,
    pri: f64,
}

impl Normalizer {
    pub fn new(w: &Waveform, params: &RadarParams) -> Self {
        Self {
            table: SpectrumTable::new(w, params),
            pri: params.pri(),
        }
    }

    pub fn table(&self) -> &SpectrumTable {
        &self.table
    }

    /// Fails with [`Error::SpectralFloor`] listing every index of the subset
    /// whose spectrum is below the floor.
    pub fn check(&self, subset: &FrequencySubset) -> Result<()> {
        if subset.bins() != self.table.len() {
            return Err(Error::DimensionMismatch(format!(
                "subset over {} bins, spectrum table has {}",
                subset.bins(),
                self.table.len()
            )));
        }
        let bad: Vec<usize> = subset
            .indices()
            .iter()
            .copied()
            .filter(|&m| !self.table.admissible(m))
            .collect();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::SpectralFloor(bad))
        }
    }

    pub fn normalize(&self, coeffs: &[Complex64], subset: &FrequencySubset) -> Result<Vec<Complex64>> {
        if coeffs.len() != subset.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for a subset of {}",
                coeffs.len(),
                subset.len()
            )));
        }
        self.check(subset)?;
        Ok(coeffs
            .iter()
            .zip(subset.indices())
            .map(|(y, &m)| y * self.pri / self.table.at(m))
            .collect())
    }
}

pub fn normalize_coefficients(
    coeffs: &[Complex64],
    w: &Waveform,
    params: &RadarParams,
    subset: &FrequencySubset,
) -> Result<Vec<Complex64>> {
    Normalizer::new(w, params).normalize(coeffs, subset)
}

/// Full physical path: time-domain synthesis, Fourier extraction and
/// normalization, assembled into the K x P observation matrix.
#[allow(clippy::too_many_arguments)]
pub fn observe_time_domain(
    params: &RadarParams,
    w: &Waveform,
    scene: &TargetScene,
    code: &PhaseCode,
    subset: &FrequencySubset,
    noise: &NoiseSpec,
    oversample: usize,
    seed: u64,
) -> Result<CMatrix> {
    let normalizer = Normalizer::new(w, params);
    normalizer.check(subset)?;
    let rx = synthesize_received(params, w, scene, code, noise, oversample, seed)?;
    let mut y = DMatrix::zeros(subset.len(), params.pulse_count());
    for (b, stream) in rx.streams.iter().enumerate() {
        let coeffs = fourier_coefficients(stream, rx.sample_offset, subset)?;
        let norm = normalizer.normalize(&coeffs, subset)?;
        for (k, v) in norm.into_iter().enumerate() {
            y[(k, b)] = v;
        }
    }
    Ok(y)
}

fn add_coefficient_noise(y: &mut CMatrix, variance: f64, seed: u64) {
    if variance == 0.0 {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // column-major order: all k for b = 0, then b = 1, ...
    for v in y.iter_mut() {
        *v += complex_gaussian(&mut rng, variance);
    }
}

/// On-grid Fourier-domain synthesis,
/// Y[k, b] = sum_l a~_l W_P^{b p_l} W_N^{m_k n_l} z[b - q_l] + U~,
/// with U~ i.i.d. circular Gaussian of variance
/// [`NoiseSpec::normalized_variance`].
pub fn synthesize_ongrid(
    params: &RadarParams,
    scene: &TargetScene,
    code: &PhaseCode,
    subset: &FrequencySubset,
    noise: &NoiseSpec,
    seed: u64,
) -> Result<CMatrix> {
    let cells = scene
        .grid_cells()
        .ok_or_else(|| Error::OffGrid("synthesize_ongrid needs an on-grid scene".into()))?;
    let pulses = params.pulse_count();
    let n_bins = params.nyquist_bins();
    if subset.bins() != n_bins {
        return Err(Error::DimensionMismatch(format!(
            "subset over {} bins, radar has N = {n_bins}",
            subset.bins()
        )));
    }
    let mut y = DMatrix::zeros(subset.len(), pulses);
    for (st, g) in scene.targets().iter().zip(&cells) {
        for b in 0..pulses {
            let z = code.z(b as isize - g.order as isize);
            if z.norm_sqr() == 0.0 {
                continue;
            }
            let slow = st.effective_amplitude * z;
            for (k, &m) in subset.indices().iter().enumerate() {
                y[(k, b)] += slow * twiddle2(b * g.doppler_bin, pulses, m * g.range_bin, n_bins);
            }
        }
    }
    add_coefficient_noise(&mut y, noise.normalized_variance(params, pulses), seed);
    Ok(y)
}

/// Direct evaluation of the normalized Fourier coefficients for arbitrary
/// (off-grid) delays and Dopplers,
/// Y[k, b] = sum_l a~_l e^{-j 2 pi nu_l b T_r} e^{-j 2 pi m_k tau_l / T_r} z[b - q_l] + U~.
/// `noise_pulses` is the pulse count that shares the SNR budget.
pub fn synthesize_fourier(
    params: &RadarParams,
    scene: &TargetScene,
    code: &PhaseCode,
    subset: &FrequencySubset,
    noise: &NoiseSpec,
    noise_pulses: usize,
    seed: u64,
) -> Result<CMatrix> {
    let pulses = params.pulse_count();
    let pri = params.pri();
    if subset.bins() != params.nyquist_bins() {
        return Err(Error::DimensionMismatch(format!(
            "subset over {} bins, radar has N = {}",
            subset.bins(),
            params.nyquist_bins()
        )));
    }
    let mut y = DMatrix::zeros(subset.len(), pulses);
    for st in scene.targets() {
        let fast: Vec<Complex64> = subset
            .indices()
            .iter()
            .map(|&m| Complex64::from_polar(1.0, -2.0 * PI * m as f64 * st.folded_delay / pri))
            .collect();
        for b in 0..pulses {
            let z = code.z(b as isize - st.order as isize);
            if z.norm_sqr() == 0.0 {
                continue;
            }
            let slow = st.effective_amplitude
                * z
                * Complex64::from_polar(1.0, -2.0 * PI * st.target.doppler * b as f64 * pri);
            for (k, f) in fast.iter().enumerate() {
                y[(k, b)] += slow * f;
            }
        }
    }
    add_coefficient_noise(&mut y, noise.normalized_variance(params, noise_pulses), seed);
    Ok(y)
}
