use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::recovery::TargetEstimate;
use crate::signal_model::RadarParams;

/// Rectangle of half-widths around each true target. When
/// `doppler_period` is set, Doppler distance is taken modulo the period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HitCriterion {
    pub delay_half_width: f64,
    pub doppler_half_width: f64,
    pub doppler_period: Option<f64>,
}

impl HitCriterion {
    pub fn new(delay_half_width: f64, doppler_half_width: f64, doppler_period: Option<f64>) -> Result<Self> {
        if !(delay_half_width > 0.0 && delay_half_width.is_finite()) {
            return Err(invalid("delay_half_width", "must be positive"));
        }
        if !(doppler_half_width > 0.0 && doppler_half_width.is_finite()) {
            return Err(invalid("doppler_half_width", "must be positive"));
        }
        if doppler_period.is_some_and(|p| !(p > 0.0)) {
            return Err(invalid("doppler_period", "must be positive"));
        }
        Ok(Self {
            delay_half_width,
            doppler_half_width,
            doppler_period,
        })
    }

    /// One delay bin 1/B_h, one Doppler bin 1/(P T_r), Doppler cyclic
    /// over 1/T_r.
    pub fn for_params(params: &RadarParams) -> Self {
        Self {
            delay_half_width: 1.0 / params.bandwidth(),
            doppler_half_width: params.doppler_bin(),
            doppler_period: Some(1.0 / params.pri()),
        }
    }

    fn doppler_gap(&self, a: f64, b: f64) -> f64 {
        let d = (a - b).abs();
        match self.doppler_period {
            Some(p) => {
                let r = d % p;
                r.min(p - r)
            }
            None => d,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HitScore {
    pub hits: usize,
    pub targets: usize,
    /// hits / targets, and 1 for an empty truth list.
    pub hit_rate: f64,
}

/// Greedy one-to-one matching: every (truth, estimate) pair inside the
/// rectangle is ranked by scaled distance and accepted when neither side is
/// taken yet.
pub fn score_hits(truth: &[(f64, f64)], estimates: &[TargetEstimate], crit: &HitCriterion) -> HitScore {
    let mut cands = Vec::new();
    for (i, &(tau, nu)) in truth.iter().enumerate() {
        for (j, e) in estimates.iter().enumerate() {
            let dt = (e.full_delay - tau).abs();
            let dn = crit.doppler_gap(e.doppler, nu);
            if dt <= crit.delay_half_width && dn <= crit.doppler_half_width {
                let dist = (dt / crit.delay_half_width).hypot(dn / crit.doppler_half_width);
                cands.push((dist, i, e.full_delay, e.doppler, j));
            }
        }
    }
    cands.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.cmp(&b.1))
            .then(a.2.total_cmp(&b.2))
            .then(a.3.total_cmp(&b.3))
    });
    let mut used_t = vec![false; truth.len()];
    let mut used_e = vec![false; estimates.len()];
    let mut hits = 0;
    for (_, i, _, _, j) in cands {
        if !used_t[i] && !used_e[j] {
            used_t[i] = true;
            used_e[j] = true;
            hits += 1;
        }
    }
    HitScore {
        hits,
        targets: truth.len(),
        hit_rate: if truth.is_empty() {
            1.0
        } else {
            hits as f64 / truth.len() as f64
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn est(tau: f64, nu: f64) -> TargetEstimate {
        TargetEstimate {
            ambiguity_order: 0,
            folded_delay: tau,
            doppler: nu,
            amplitude: Complex64::new(1.0, 0.0),
            full_delay: tau,
        }
    }

    #[test]
    fn examples() {
        let p = RadarParams::full_scale();
        let crit = HitCriterion::for_params(&p);
        let truth = vec![(1e-6, 2e3), (30e-6, 10e3)];
        let exact: Vec<_> = truth.iter().map(|&(t, n)| est(t, n)).collect();
        assert_eq!(score_hits(&truth, &exact, &crit).hit_rate, 1.0);
        assert_eq!(score_hits(&truth, &[], &crit).hit_rate, 0.0);
        let bin = 1.0 / p.bandwidth();
        let off = [est(1e-6 + 1.5 * bin, 2e3)];
        assert_eq!(score_hits(&truth[..1], &off, &crit).hits, 0);
        let edge = [est(1e-6 + bin, 2e3 + p.doppler_bin())];
        assert_eq!(score_hits(&truth[..1], &edge, &crit).hits, 1);
    }

    #[test]
    fn no_double_counting_and_cyclic_doppler() {
        let p = RadarParams::full_scale();
        let crit = HitCriterion::for_params(&p);
        let truth = vec![(1e-6, 0.0), (1e-6 + 1e-9, 0.0)];
        let one = [est(1e-6, 0.0)];
        assert_eq!(score_hits(&truth, &one, &crit).hits, 1);
        let wrapped = [est(1e-6, 1.0 / p.pri() - 100.0)];
        assert_eq!(score_hits(&truth[..1], &wrapped, &crit).hits, 1);
        let linear = HitCriterion::new(crit.delay_half_width, crit.doppler_half_width, None).unwrap();
        assert_eq!(score_hits(&truth[..1], &wrapped, &linear).hits, 0);
        assert!(HitCriterion::new(0.0, 1.0, None).is_err());
        assert!(HitCriterion::new(1.0, -1.0, None).is_err());
    }
}
