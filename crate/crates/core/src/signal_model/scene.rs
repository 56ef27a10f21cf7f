use std::collections::HashSet;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::RadarParams;
use crate::error::{invalid, Error, Result};

/// A point target: full round-trip delay, Doppler in [0, 1/T_r) and the
/// complex echo amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub full_delay: f64,
    pub doppler: f64,
    pub amplitude: Complex64,
}

/// Splits a full delay into (ambiguity order, folded delay). Values within
/// 1e-12 PRI of a PRI boundary snap to the boundary.
pub fn fold_delay(full_delay: f64, pri: f64) -> (usize, f64) {
    let x = full_delay / pri;
    let mut q = x.floor();
    if x - q > 1.0 - 1e-12 {
        q += 1.0;
    }
    let q = q.max(0.0);
    let folded = (full_delay - q * pri).max(0.0);
    (q as usize, folded)
}

/// Cell of the on-grid delay-Doppler map: folded delay n T_r/N, Doppler
/// p/(P T_r) and ambiguity order q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridIndex {
    pub range_bin: usize,
    pub doppler_bin: usize,
    pub order: usize,
}

impl GridIndex {
    /// Column of the sparse map, P q + p.
    pub fn column(&self, pulses: usize) -> usize {
        pulses * self.order + self.doppler_bin
    }
}

/// A validated target together with its fold against the scene PRI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneTarget {
    pub target: Target,
    pub order: usize,
    pub folded_delay: f64,
    /// alpha * e^{-j 2 pi nu tau}
    pub effective_amplitude: Complex64,
    pub grid: Option<GridIndex>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetScene {
    targets: Vec<SceneTarget>,
    on_grid: bool,
}

impl TargetScene {
    /// Off-grid scene. Rejects negative delays, Dopplers outside
    /// [0, 1/T_r) and echoes whose order is at least P.
    pub fn new(params: &RadarParams, targets: &[Target]) -> Result<Self> {
        let pri = params.pri();
        let mut out = Vec::with_capacity(targets.len());
        for (i, t) in targets.iter().enumerate() {
            if !(t.full_delay.is_finite() && t.full_delay >= 0.0) {
                return Err(invalid("full_delay", format!("target {i}: must be >= 0")));
            }
            if !(t.doppler.is_finite() && (0.0..1.0 / pri).contains(&t.doppler)) {
                return Err(invalid(
                    "doppler",
                    format!("target {i}: {} outside [0, 1/T_r)", t.doppler),
                ));
            }
            let (order, folded_delay) = fold_delay(t.full_delay, pri);
            if order >= params.pulse_count() {
                return Err(Error::EchoOutsideCpi {
                    index: i,
                    order,
                    pulses: params.pulse_count(),
                });
            }
            out.push(SceneTarget {
                target: *t,
                order,
                folded_delay,
                effective_amplitude: t.amplitude
                    * Complex64::from_polar(1.0, -2.0 * PI * t.doppler * folded_delay),
                grid: None,
            });
        }
        Ok(Self {
            targets: out,
            on_grid: false,
        })
    }

    /// On-grid scene from cells and effective amplitudes. Delays and
    /// Dopplers are computed from the indices, so they sit exactly on
    /// the bin centers.
    pub fn on_grid(params: &RadarParams, cells: &[(GridIndex, Complex64)]) -> Result<Self> {
        let n_bins = params.nyquist_bins();
        let pulses = params.pulse_count();
        let pri = params.pri();
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(cells.len());
        for (i, (g, eff)) in cells.iter().enumerate() {
            if g.range_bin >= n_bins {
                return Err(invalid(
                    "range_bin",
                    format!("target {i}: {} not below N = {n_bins}", g.range_bin),
                ));
            }
            if g.doppler_bin >= pulses {
                return Err(invalid(
                    "doppler_bin",
                    format!("target {i}: {} not below P = {pulses}", g.doppler_bin),
                ));
            }
            if g.order >= pulses {
                return Err(Error::EchoOutsideCpi {
                    index: i,
                    order: g.order,
                    pulses,
                });
            }
            if !seen.insert((g.range_bin, g.column(pulses))) {
                return Err(invalid("grid", format!("target {i}: duplicate cell {g:?}")));
            }
            let folded_delay = g.range_bin as f64 * pri / n_bins as f64;
            let doppler = g.doppler_bin as f64 / (pulses as f64 * pri);
            let full_delay = folded_delay + g.order as f64 * pri;
            let amplitude = eff * Complex64::from_polar(1.0, 2.0 * PI * doppler * folded_delay);
            out.push(SceneTarget {
                target: Target {
                    full_delay,
                    doppler,
                    amplitude,
                },
                order: g.order,
                folded_delay,
                effective_amplitude: *eff,
                grid: Some(*g),
            });
        }
        Ok(Self {
            targets: out,
            on_grid: true,
        })
    }

    pub fn empty() -> Self {
        Self {
            targets: Vec::new(),
            on_grid: true,
        }
    }

    pub fn targets(&self) -> &[SceneTarget] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn is_on_grid(&self) -> bool {
        self.on_grid
    }

    /// Q = max order + 1 (1 for an empty scene).
    pub fn ambiguity_factor(&self) -> usize {
        self.targets.iter().map(|t| t.order + 1).max().unwrap_or(1)
    }

    pub fn grid_cells(&self) -> Option<Vec<GridIndex>> {
        if !self.on_grid {
            return None;
        }
        self.targets.iter().map(|t| t.grid).collect()
    }

    /// Truth pairs (full delay, Doppler) for hit scoring.
    pub fn truth(&self) -> Vec<(f64, f64)> {
        self.targets
            .iter()
            .map(|t| (t.target.full_delay, t.target.doppler))
            .collect()
    }

    pub fn max_doppler(&self) -> f64 {
        self.targets
            .iter()
            .map(|t| t.target.doppler)
            .fold(0.0, f64::max)
    }

    /// Draws `count` distinct on-grid cells uniformly over N x P x Q with
    /// random unit-modulus amplitudes.
    pub fn random_on_grid<R: Rng + ?Sized>(
        params: &RadarParams,
        count: usize,
        ambiguity_factor: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let n = params.nyquist_bins();
        let p = params.pulse_count();
        let cells_total = n * p * ambiguity_factor;
        if count > cells_total {
            return Err(invalid("target_count", "more targets than grid cells"));
        }
        let mut seen = HashSet::new();
        let mut cells = Vec::with_capacity(count);
        while cells.len() < count {
            let g = GridIndex {
                range_bin: rng.random_range(0..n),
                doppler_bin: rng.random_range(0..p),
                order: rng.random_range(0..ambiguity_factor),
            };
            if seen.insert(g) {
                let phase = rng.random_range(0.0..2.0 * PI);
                cells.push((g, Complex64::from_polar(1.0, phase)));
            }
        }
        Self::on_grid(params, &cells)
    }

    /// Worst case: every target in one reduced range bin, distinct
    /// (order, Doppler) columns.
    pub fn random_same_bin<R: Rng + ?Sized>(
        params: &RadarParams,
        count: usize,
        ambiguity_factor: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let p = params.pulse_count();
        if count > p * ambiguity_factor {
            return Err(invalid("target_count", "more targets than columns"));
        }
        let bin = rng.random_range(0..params.nyquist_bins());
        let columns = rand::seq::index::sample(rng, p * ambiguity_factor, count);
        let cells: Vec<_> = columns
            .iter()
            .map(|c| {
                let phase = rng.random_range(0.0..2.0 * PI);
                (
                    GridIndex {
                        range_bin: bin,
                        doppler_bin: c % p,
                        order: c / p,
                    },
                    Complex64::from_polar(1.0, phase),
                )
            })
            .collect();
        Self::on_grid(params, &cells)
    }

    /// Continuous delays uniform in [0, Q T_r), Dopplers uniform in
    /// [0, 1/T_r), unit-modulus amplitudes.
    pub fn random_off_grid<R: Rng + ?Sized>(
        params: &RadarParams,
        count: usize,
        ambiguity_factor: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let pri = params.pri();
        let targets: Vec<Target> = (0..count)
            .map(|_| Target {
                full_delay: rng.random_range(0.0..ambiguity_factor as f64 * pri),
                doppler: rng.random_range(0.0..1.0 / pri),
                amplitude: Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI)),
            })
            .collect();
        Self::new(params, &targets)
    }
}

/// Serializable scene description, validated into a [`TargetScene`]
/// against a set of radar parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneDocument {
    pub on_grid: bool,
    pub targets: Vec<SceneTargetDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneTargetDoc {
    pub full_delay: f64,
    pub doppler: f64,
    pub amplitude: Complex64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambiguity_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub folded_delay: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effective_amplitude: Option<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridIndex>,
}

impl SceneDocument {
    pub fn from_scene(scene: &TargetScene) -> Self {
        Self {
            on_grid: scene.is_on_grid(),
            targets: scene
                .targets()
                .iter()
                .map(|t| SceneTargetDoc {
                    full_delay: t.target.full_delay,
                    doppler: t.target.doppler,
                    amplitude: t.target.amplitude,
                    ambiguity_order: Some(t.order),
                    folded_delay: Some(t.folded_delay),
                    effective_amplitude: Some(t.effective_amplitude),
                    grid: t.grid,
                })
                .collect(),
        }
    }

    /// Validates the document. On-grid targets without explicit grid
    /// indices are snapped to the nearest cell, which must lie within
    /// 1e-6 bin of the stated delay and Doppler.
    pub fn into_scene(&self, params: &RadarParams) -> Result<TargetScene> {
        if !self.on_grid {
            let targets: Vec<Target> = self
                .targets
                .iter()
                .map(|t| Target {
                    full_delay: t.full_delay,
                    doppler: t.doppler,
                    amplitude: t.amplitude,
                })
                .collect();
            return TargetScene::new(params, &targets);
        }
        let pri = params.pri();
        let mut cells = Vec::with_capacity(self.targets.len());
        for (i, t) in self.targets.iter().enumerate() {
            let g = match t.grid {
                Some(g) => g,
                None => {
                    let (order, folded) = fold_delay(t.full_delay, pri);
                    let n = folded / params.delay_bin();
                    let p = t.doppler / params.doppler_bin();
                    if (n - n.round()).abs() > 1e-6 || (p - p.round()).abs() > 1e-6 {
                        return Err(Error::OffGrid(format!(
                            "target {i}: delay {} / Doppler {} not on a bin center",
                            t.full_delay, t.doppler
                        )));
                    }
                    let (mut order, mut n) = (order, n.round() as usize);
                    if n == params.nyquist_bins() {
                        n = 0;
                        order += 1;
                    }
                    GridIndex {
                        range_bin: n,
                        doppler_bin: p.round() as usize,
                        order,
                    }
                }
            };
            if g.order >= params.pulse_count() {
                return Err(Error::EchoOutsideCpi {
                    index: i,
                    order: g.order,
                    pulses: params.pulse_count(),
                });
            }
            let folded = g.range_bin as f64 * params.delay_bin();
            let doppler = g.doppler_bin as f64 * params.doppler_bin();
            let derived = t.amplitude * Complex64::from_polar(1.0, -2.0 * PI * doppler * folded);
            let eff = match t.effective_amplitude {
                Some(e) if (e - derived).norm() > 1e-9 * derived.norm().max(1.0) => {
                    return Err(invalid(
                        "effective_amplitude",
                        format!("target {i}: inconsistent with amplitude, delay and Doppler"),
                    ));
                }
                Some(e) => e,
                None => derived,
            };
            cells.push((g, eff));
        }
        TargetScene::on_grid(params, &cells)
    }
}
