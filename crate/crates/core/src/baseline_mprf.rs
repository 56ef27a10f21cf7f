//! Multiple-PRF baseline: two uncoded trains at different PRIs, each
//! recovered on its own ambiguous grid, then paired by Doppler and
//! unfolded to a common delay.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::measurement::{build_A, build_B, FrequencySubset};
use crate::recovery::{extract_targets, matrix_omp, RecoveryConfig, TargetEstimate};
use crate::signal_model::{PhaseCode, RadarParams};
use crate::CMatrix;
use num_complex::Complex64;

/// Pulse count and PRI of one train.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainSpec {
    pub pulses: usize,
    pub pri: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MprfConfig {
    pub base: RadarParams,
    pub train1: TrainSpec,
    pub train2: TrainSpec,
    /// Candidates are unfolded over [0, window).
    pub window: f64,
    /// PRI used to split resolved delays into (q, tau).
    pub reference_pri: f64,
    pub doppler_match_tol: f64,
    pub delay_match_tol: f64,
}

impl MprfConfig {
    /// Trains sharing the waveform and carrier of `base`. The surveillance
    /// window is Q T_r1; tolerances default to the coarser train's Doppler
    /// bin and one delay bin 1/B_h.
    pub fn new(base: &RadarParams, train1: TrainSpec, train2: TrainSpec, ambiguity_factor: usize) -> Result<Self> {
        if train1.pri == train2.pri {
            return Err(invalid("train2.pri", "the two trains need distinct PRIs"));
        }
        if ambiguity_factor == 0 {
            return Err(invalid("ambiguity_factor", "must be at least 1"));
        }
        let cfg = Self {
            base: *base,
            train1,
            train2,
            window: ambiguity_factor as f64 * train1.pri,
            reference_pri: train1.pri,
            doppler_match_tol: 0.0,
            delay_match_tol: 1.0 / base.bandwidth(),
        };
        let (p1, p2) = (cfg.train_params(1)?, cfg.train_params(2)?);
        Ok(Self {
            doppler_match_tol: p1.doppler_bin().max(p2.doppler_bin()),
            ..cfg
        })
    }

    pub fn train(&self, which: u8) -> TrainSpec {
        if which == 1 {
            self.train1
        } else {
            self.train2
        }
    }

    pub fn train_params(&self, which: u8) -> Result<RadarParams> {
        let t = self.train(which);
        self.base.with_pulse_count(t.pulses)?.with_pri(t.pri)
    }

    /// Same configuration with the trains exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            train1: self.train2,
            train2: self.train1,
            ..self.clone()
        }
    }

    pub fn total_pulses(&self) -> usize {
        self.train1.pulses + self.train2.pulses
    }
}

/// Folded estimate of one train.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldedEstimate {
    pub folded_delay: f64,
    pub doppler: f64,
    pub amplitude: Complex64,
}

/// Matrix OMP with Q = 1 and an all-ones code on one train's grid.
pub fn mprf_recover_train(
    y: &CMatrix,
    params: &RadarParams,
    subset: &FrequencySubset,
    targets: usize,
) -> Result<Vec<FoldedEstimate>> {
    if targets == 0 {
        return Ok(Vec::new());
    }
    let a = build_A(subset);
    let b = build_B(&PhaseCode::uncoded(params.pulse_count()), 1)?;
    let out = matrix_omp(y, &a, &b, &RecoveryConfig::known_targets(targets))?;
    Ok(extract_targets(&out.map, params, 1)?
        .into_iter()
        .map(|e| FoldedEstimate {
            folded_delay: e.folded_delay,
            doppler: e.doppler,
            amplitude: e.amplitude,
        })
        .collect())
}

/// Resolved targets plus the indices of estimates left unpaired.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MprfResolution {
    pub targets: Vec<TargetEstimate>,
    pub unmatched_train1: Vec<usize>,
    pub unmatched_train2: Vec<usize>,
}

fn unfold(tau: f64, pri: f64, window: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let c = tau + k as f64 * pri;
        if c >= window && k > 0 {
            break;
        }
        out.push(c);
        k += 1;
    }
    out
}

struct Pair {
    i: usize,
    j: usize,
    gap: f64,
    delay: f64,
    doppler: f64,
}

/// Pairwise-unfold nearest-match resolution. Every Doppler-compatible pair
/// is unfolded over the window and scored by its smallest delay gap; pairs
/// are then accepted greedily by gap (one estimate per pair at most) when
/// the gap is within delay_match_tol. The resolved delay is the midpoint of
/// the two unfolded candidates and the Doppler is their mean.
pub fn mprf_cluster_resolve(est1: &[FoldedEstimate], est2: &[FoldedEstimate], cfg: &MprfConfig) -> MprfResolution {
    let (t1, t2) = (cfg.train1.pri, cfg.train2.pri);
    let mut pairs = Vec::new();
    for (i, e1) in est1.iter().enumerate() {
        for (j, e2) in est2.iter().enumerate() {
            if (e1.doppler - e2.doppler).abs() > cfg.doppler_match_tol {
                continue;
            }
            let mut best: Option<(f64, f64)> = None;
            for c1 in unfold(e1.folded_delay, t1, cfg.window) {
                for c2 in unfold(e2.folded_delay, t2, cfg.window) {
                    let gap = (c1 - c2).abs();
                    let mid = 0.5 * (c1 + c2);
                    if best.is_none_or(|(g, m)| gap < g || (gap == g && mid < m)) {
                        best = Some((gap, mid));
                    }
                }
            }
            if let Some((gap, delay)) = best {
                pairs.push(Pair {
                    i,
                    j,
                    gap,
                    delay,
                    doppler: 0.5 * (e1.doppler + e2.doppler),
                });
            }
        }
    }
    pairs.sort_by(|a, b| {
        a.gap
            .total_cmp(&b.gap)
            .then(a.delay.total_cmp(&b.delay))
            .then(a.doppler.total_cmp(&b.doppler))
    });
    let mut used1 = vec![false; est1.len()];
    let mut used2 = vec![false; est2.len()];
    let mut targets = Vec::new();
    for p in pairs {
        if p.gap > cfg.delay_match_tol || used1[p.i] || used2[p.j] {
            continue;
        }
        used1[p.i] = true;
        used2[p.j] = true;
        let q = (p.delay / cfg.reference_pri).floor().max(0.0);
        targets.push(TargetEstimate {
            ambiguity_order: q as usize,
            folded_delay: p.delay - q * cfg.reference_pri,
            doppler: p.doppler,
            amplitude: 0.5 * (est1[p.i].amplitude + est2[p.j].amplitude),
            full_delay: p.delay,
        });
    }
    targets.sort_by(|a, b| a.full_delay.total_cmp(&b.full_delay).then(a.doppler.total_cmp(&b.doppler)));
    MprfResolution {
        targets,
        unmatched_train1: (0..est1.len()).filter(|&i| !used1[i]).collect(),
        unmatched_train2: (0..est2.len()).filter(|&j| !used2[j]).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal_model::{synthesize_fourier, NoiseSpec, Target, TargetScene};

    fn desk_cfg() -> MprfConfig {
        let base = RadarParams::desk_scale();
        let tr2 = 51.0 / base.bandwidth();
        MprfConfig::new(
            &base,
            TrainSpec { pulses: 12, pri: base.pri() },
            TrainSpec { pulses: 15, pri: tr2 },
            4,
        )
        .unwrap()
    }

    fn observe(cfg: &MprfConfig, which: u8, targets: &[Target]) -> Vec<FoldedEstimate> {
        let p = cfg.train_params(which).unwrap();
        let scene = TargetScene::new(&p, targets).unwrap();
        let subset = FrequencySubset::nyquist(p.nyquist_bins());
        let y = synthesize_fourier(&p, &scene, &PhaseCode::uncoded(p.pulse_count()), &subset, &NoiseSpec::noiseless(), 1, 0)
            .unwrap();
        mprf_recover_train(&y, &p, &subset, targets.len()).unwrap()
    }

    #[test]
    fn train_grids() {
        let cfg = desk_cfg();
        assert_eq!(cfg.train_params(1).unwrap().nyquist_bins(), 64);
        assert_eq!(cfg.train_params(2).unwrap().nyquist_bins(), 51);
        assert!(MprfConfig::new(&cfg.base, cfg.train1, cfg.train1, 4).is_err());
    }

    #[test]
    fn unfolded_target_same_in_both_trains() {
        let cfg = desk_cfg();
        let bin = 1.0 / cfg.base.bandwidth();
        let t = Target {
            full_delay: 10.0 * bin,
            doppler: 0.0,
            amplitude: Complex64::new(1.0, 0.0),
        };
        let e1 = observe(&cfg, 1, &[t]);
        let e2 = observe(&cfg, 2, &[t]);
        assert!((e1[0].folded_delay - t.full_delay).abs() < 1e-12);
        assert!((e2[0].folded_delay - t.full_delay).abs() < 1e-12);
        assert_eq!(e1[0].doppler, e2[0].doppler);
    }

    #[test]
    fn folding_arithmetic() {
        let cfg = desk_cfg();
        let bin = 1.0 / cfg.base.bandwidth();
        let t = Target {
            full_delay: cfg.train1.pri + 5.0 * bin,
            doppler: 2.0 * cfg.train_params(1).unwrap().doppler_bin(),
            amplitude: Complex64::new(1.0, 0.0),
        };
        let e1 = observe(&cfg, 1, &[t]);
        let e2 = observe(&cfg, 2, &[t]);
        assert!((e1[0].folded_delay - 5.0 * bin).abs() < 1e-12);
        let want2 = t.full_delay - cfg.train2.pri;
        assert!((e2[0].folded_delay - want2).abs() < 1e-12);
        let r = mprf_cluster_resolve(&e1, &e2, &cfg);
        assert_eq!(r.targets.len(), 1);
        assert!((r.targets[0].full_delay - t.full_delay).abs() <= cfg.delay_match_tol);
        assert_eq!(r.targets[0].ambiguity_order, 1);
    }

    #[test]
    fn exact_unfold_resolves_window() {
        let cfg = desk_cfg();
        let tau = 2.3 * cfg.train1.pri;
        let e1 = [FoldedEstimate {
            folded_delay: tau - 2.0 * cfg.train1.pri,
            doppler: 1000.0,
            amplitude: Complex64::new(1.0, 0.0),
        }];
        let k2 = (tau / cfg.train2.pri).floor();
        let e2 = [FoldedEstimate {
            folded_delay: tau - k2 * cfg.train2.pri,
            doppler: 1000.0,
            amplitude: Complex64::new(1.0, 0.0),
        }];
        let r = mprf_cluster_resolve(&e1, &e2, &cfg);
        assert!((r.targets[0].full_delay - tau).abs() <= cfg.delay_match_tol);
        assert!(r.unmatched_train1.is_empty() && r.unmatched_train2.is_empty());
    }

    #[test]
    fn one_bin_error_can_jump_a_pri() {
        // PRIs of 10 and 11 delay bins: a one-bin slip in train 1 makes a
        // wrong unfold pair coincide exactly
        let bin = 1.0 / RadarParams::desk_scale().bandwidth();
        let mut cfg = desk_cfg();
        cfg.train1.pri = 10.0 * bin;
        cfg.train2.pri = 11.0 * bin;
        cfg.window = 110.0 * bin;
        cfg.reference_pri = cfg.train1.pri;
        cfg.delay_match_tol = bin;
        let mk = |d: f64| FoldedEstimate {
            folded_delay: d * bin,
            doppler: 0.0,
            amplitude: Complex64::new(1.0, 0.0),
        };
        let exact = mprf_cluster_resolve(&[mk(5.0)], &[mk(5.0)], &cfg);
        assert!((exact.targets[0].full_delay - 5.0 * bin).abs() < 1e-12);
        let slipped = mprf_cluster_resolve(&[mk(6.0)], &[mk(5.0)], &cfg);
        let err = (slipped.targets[0].full_delay - 5.0 * bin).abs();
        assert!(err > cfg.train1.pri, "resolved error {err}");
    }

    #[test]
    fn empty_and_symmetric() {
        let cfg = desk_cfg();
        let r = mprf_cluster_resolve(&[], &[], &cfg);
        assert!(r.targets.is_empty());
        let mk = |d: f64, v: f64| FoldedEstimate {
            folded_delay: d,
            doppler: v,
            amplitude: Complex64::new(1.0, 0.0),
        };
        let bin = 1.0 / cfg.base.bandwidth();
        let e1 = [mk(3.0 * bin, 0.0), mk(40.0 * bin, 6000.0), mk(12.0 * bin, 6000.0)];
        let e2 = [mk(16.0 * bin, 6010.0), mk(3.0 * bin, 5.0), mk(13.0 * bin, 6000.0)];
        let a = mprf_cluster_resolve(&e1, &e2, &cfg);
        let b = mprf_cluster_resolve(&e2, &e1, &cfg.swapped());
        assert_eq!(a.targets, b.targets);
        assert!(!a.targets.is_empty());
    }
}
