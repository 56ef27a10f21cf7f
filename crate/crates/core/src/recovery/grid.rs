use nalgebra::DVector;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::measurement::{coded_blocks, partial_fourier, FrequencySubset, MatrixA, MatrixB, SparseMap};
use crate::signal_model::{PhaseCode, RadarParams};
use crate::CMatrix;

/// Physical readout of one support entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetEstimate {
    pub ambiguity_order: usize,
    pub folded_delay: f64,
    pub doppler: f64,
    pub amplitude: Complex64,
    pub full_delay: f64,
}

/// Converts support indices (row, col) of a gamma-refined map into
/// (q, tau, nu): q = col / (gamma P), tau = row T_r / (gamma N),
/// nu = (col mod gamma P) / (gamma P T_r).
pub fn extract_targets(map: &SparseMap, params: &RadarParams, gamma: usize) -> Result<Vec<TargetEstimate>> {
    let (rows, width) = (gamma * params.nyquist_bins(), gamma * params.pulse_count());
    if map.rows() != rows || map.block_width() != width {
        return Err(Error::DimensionMismatch(format!(
            "map has {} rows and block width {}, gamma = {gamma} needs {rows} and {width}",
            map.rows(),
            map.block_width()
        )));
    }
    let pri = params.pri();
    Ok(map
        .entries()
        .iter()
        .map(|e| {
            let (q, p) = map.readout(e.col);
            let folded_delay = e.row as f64 * pri / rows as f64;
            TargetEstimate {
                ambiguity_order: q,
                folded_delay,
                doppler: p as f64 / (width as f64 * pri),
                amplitude: e.amplitude,
                full_delay: folded_delay + q as f64 * pri,
            }
        })
        .collect())
}

/// Dictionaries on grids refined by gamma:
/// A[k, n] = e^{-j 2 pi m_k n / (gamma N)}, n < gamma N, and Q blocks of
/// e^{-j 2 pi b p / (gamma P)} z[b - q], p < gamma P.
pub fn build_overdiscretized(
    params: &RadarParams,
    code: &PhaseCode,
    subset: &FrequencySubset,
    blocks: usize,
    gamma: usize,
) -> Result<(MatrixA, MatrixB)> {
    if gamma == 0 {
        return Err(invalid("gamma", "over-discretization factor must be >= 1"));
    }
    if subset.bins() != params.nyquist_bins() || code.len() != params.pulse_count() {
        return Err(Error::DimensionMismatch(format!(
            "subset over {} bins and code of {} pulses for N = {}, P = {}",
            subset.bins(),
            code.len(),
            params.nyquist_bins(),
            params.pulse_count()
        )));
    }
    let a = partial_fourier(subset, gamma * params.nyquist_bins());
    let b = coded_blocks(code, blocks, gamma * params.pulse_count())?;
    Ok((a, b))
}

/// Splits a Nyquist observation into per-range-bin systems
/// g_n = [Y^T conj(A)]_n / N, so that noiseless data satisfy g_n = B x_n.
pub fn nyquist_reduce(y: &CMatrix, a: &MatrixA) -> Result<Vec<DVector<Complex64>>> {
    let n = a.subset().bins();
    if !a.subset().is_nyquist() || a.grid() != n {
        return Err(invalid(
            "subset",
            format!("Nyquist reduction needs K = N = {n}, got K = {}", a.subset().len()),
        ));
    }
    if y.nrows() != n {
        return Err(Error::DimensionMismatch(format!("Y has {} rows, N = {n}", y.nrows())));
    }
    // conj(A) is the unnormalized inverse DFT, one transform per pulse
    let pulses = y.ncols();
    let ifft = FftPlanner::<f64>::new().plan_fft_inverse(n);
    let scale = 1.0 / n as f64;
    let mut out = vec![DVector::<Complex64>::zeros(pulses); n];
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for b in 0..pulses {
        for (slot, v) in buf.iter_mut().zip(y.column(b).iter()) {
            *slot = *v;
        }
        ifft.process(&mut buf);
        for (g, v) in out.iter_mut().zip(&buf) {
            g[b] = v * scale;
        }
    }
    Ok(out)
}

/// Index of the reduced right-hand side with the most energy (lowest index
/// on ties).
pub fn detect_range_bin(reduced: &[DVector<Complex64>]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, g) in reduced.iter().enumerate() {
        let e = g.norm_squared();
        if best.is_none_or(|(_, be)| e > be) {
            best = Some((i, e));
        }
    }
    best.map(|b| b.0)
}
