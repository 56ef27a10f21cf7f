use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spark::{is_dependent, spark_bruteforce, SparkReport, RANK_TOLERANCE};
use crate::error::{invalid, Error, Result};
use crate::measurement::build_B;
use crate::signal_model::{PhaseCode, TargetScene};

/// Per-draw spark of B against the almost-sure value P - Q + 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Summary {
    pub pulses: usize,
    pub ambiguity_factor: usize,
    pub draws: usize,
    pub expected: usize,
    pub matches: usize,
    pub sparks: Vec<usize>,
    /// Any P - Q + 2 columns of the last block are dependent (checked on
    /// the first P - Q + 2 of them in every draw).
    pub upper_bound_holds: bool,
}

impl Theorem1Summary {
    pub fn all_match(&self) -> bool {
        self.matches == self.draws && self.upper_bound_holds
    }
}

fn ensure_small(pulses: usize, blocks: usize) -> Result<()> {
    if blocks == 0 || blocks > pulses {
        return Err(invalid("q", format!("need 1 <= Q <= P = {pulses}, got {blocks}")));
    }
    let cols = pulses * blocks;
    if cols > super::spark::SPARK_COLUMN_LIMIT {
        return Err(Error::SparkGuard {
            columns: cols,
            limit: super::spark::SPARK_COLUMN_LIMIT,
        });
    }
    Ok(())
}

/// Draws random phase codes and compares the brute-force spark of B with
/// P - Q + 2. Draw d uses stream d of a generator seeded with `seed`.
pub fn verify_theorem1(pulses: usize, blocks: usize, draws: usize, seed: u64) -> Result<Theorem1Summary> {
    ensure_small(pulses, blocks)?;
    let expected = pulses - blocks + 2;
    let results: Vec<(usize, bool)> = (0..draws)
        .into_par_iter()
        .map(|d| -> Result<(usize, bool)> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(d as u64);
            let code = PhaseCode::random(pulses, &mut rng);
            let b = build_B(&code, blocks)?;
            let report = spark_bruteforce(b.matrix(), RANK_TOLERANCE)?;
            let last = (blocks - 1) * pulses;
            let bound = expected > pulses
                || is_dependent(
                    b.matrix(),
                    &(last..last + expected).collect::<Vec<_>>(),
                    RANK_TOLERANCE,
                );
            Ok((report.value(), bound))
        })
        .collect::<Result<_>>()?;
    let sparks: Vec<usize> = results.iter().map(|r| r.0).collect();
    Ok(Theorem1Summary {
        pulses,
        ambiguity_factor: blocks,
        draws,
        expected,
        matches: sparks.iter().filter(|&&s| s == expected).count(),
        upper_bound_holds: results.iter().all(|r| r.1),
        sparks,
    })
}

/// Spark of B with z = 1 and the explicit collapse witness
/// {0, 1, P, P + 1} (zero-based), for Q >= 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseSummary {
    pub report: SparkReport,
    pub witness: Vec<usize>,
    pub witness_dependent: bool,
}

pub fn verify_no_coding(pulses: usize, blocks: usize) -> Result<CollapseSummary> {
    ensure_small(pulses, blocks)?;
    if blocks < 2 || pulses < 2 {
        return Err(invalid("q", "the collapse needs Q >= 2 and P >= 2"));
    }
    let b = build_B(&PhaseCode::uncoded(pulses), blocks)?;
    let report = spark_bruteforce(b.matrix(), RANK_TOLERANCE)?;
    let witness = vec![0, 1, pulses, pulses + 1];
    let witness_dependent = is_dependent(b.matrix(), &witness, RANK_TOLERANCE);
    Ok(CollapseSummary {
        report,
        witness,
        witness_dependent,
    })
}

/// Largest L with L < min((K + 1) / 2, (P - Q + 2) / 2).
pub fn theorem2_max_targets(k: usize, pulses: usize, blocks: usize) -> usize {
    let bound = (k + 1).min((pulses + 2).saturating_sub(blocks));
    bound.saturating_sub(1) / 2
}

/// Targets counted per reduced range bin against (P - Q + 2) / 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeBinCheck {
    pub range_bin: usize,
    pub targets: usize,
    pub within_bound: bool,
}

pub fn nyquist_condition_check(scene: &TargetScene, pulses: usize, blocks: usize) -> Result<Vec<RangeBinCheck>> {
    let cells = scene
        .grid_cells()
        .ok_or_else(|| Error::OffGrid("condition check needs an on-grid scene".into()))?;
    let mut counts = BTreeMap::new();
    for g in cells {
        *counts.entry(g.range_bin).or_insert(0usize) += 1;
    }
    let spark = (pulses + 2).saturating_sub(blocks);
    Ok(counts
        .into_iter()
        .map(|(range_bin, targets)| RangeBinCheck {
            range_bin,
            targets,
            within_bound: 2 * targets < spark,
        })
        .collect())
}
