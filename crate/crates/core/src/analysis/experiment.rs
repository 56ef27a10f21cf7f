use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hits::{score_hits, HitCriterion};
use crate::baseline_mprf::{mprf_cluster_resolve, mprf_recover_train, MprfConfig, TrainSpec};
use crate::error::{invalid, Error, Result};
use crate::measurement::{build_A, build_B, random_subset, FrequencySubset, SparseMap};
use crate::recovery::{
    build_overdiscretized, detect_range_bin, extract_targets, l1_vector, matrix_omp, nyquist_reduce, omp_vector,
    RecoveryConfig, TargetEstimate, VectorRecovery,
};
use crate::signal_model::{
    complex_gaussian, synthesize_fourier, synthesize_ongrid, NoiseSpec, PhaseCode, RadarParams, SpectrumTable,
    TargetScene, Waveform,
};
use crate::CMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    RppcVsMprf,
    OffgridGamma,
    SparsitySweep,
    WorstcaseSamebin,
    Timing,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::RppcVsMprf,
        Scenario::OffgridGamma,
        Scenario::SparsitySweep,
        Scenario::WorstcaseSamebin,
        Scenario::Timing,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::RppcVsMprf => "rppc_vs_mprf",
            Scenario::OffgridGamma => "offgrid_gamma",
            Scenario::SparsitySweep => "sparsity_sweep",
            Scenario::WorstcaseSamebin => "worstcase_samebin",
            Scenario::Timing => "timing",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::UnknownScenario(s.to_string()))
    }
}

/// Monte Carlo setup. Which fields matter depends on the scenario:
///
/// * `rppc_vs_mprf`: `targets`, `ambiguity_factor`, `snr_db`, `mprf_train2`.
/// * `offgrid_gamma`: `targets`, `ambiguity_factor`, `snr_db`, `gammas`.
/// * `sparsity_sweep`: `target_counts` (one curve each), `ambiguity_factor`, `snr_db`.
/// * `worstcase_samebin`: `target_counts` (the sweep), `ambiguity_factors`; always noiseless Nyquist.
/// * `timing`: `target_counts` (the sweep), `ambiguity_factor`; Nyquist and K = N/2 curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub params: RadarParams,
    /// Number of Fourier coefficients K per PRI; `None` is Nyquist.
    pub subnyquist: Option<usize>,
    pub targets: usize,
    pub target_counts: Vec<usize>,
    pub ambiguity_factor: usize,
    pub ambiguity_factors: Vec<usize>,
    pub snr_db: Vec<f64>,
    pub gammas: Vec<usize>,
    pub mprf_train2: Option<TrainSpec>,
    pub no_coding: bool,
    pub trials: usize,
    pub seed: u64,
}

fn snr_range(lo: i32, hi: i32, step: i32) -> Vec<f64> {
    (lo..=hi).step_by(step as usize).map(f64::from).collect()
}

impl ExperimentConfig {
    /// Desk-scale defaults (P = 12, N = 64, K = 32, Q = 3, 200 trials),
    /// with scenario-specific sweeps.
    pub fn desk(scenario: Scenario) -> Self {
        let params = RadarParams::desk_scale();
        let mut cfg = Self {
            scenario,
            params,
            subnyquist: Some(32),
            targets: 5,
            target_counts: Vec::new(),
            ambiguity_factor: 3,
            ambiguity_factors: Vec::new(),
            snr_db: Vec::new(),
            gammas: Vec::new(),
            mprf_train2: None,
            no_coding: false,
            trials: 200,
            seed: 2024,
        };
        match scenario {
            Scenario::RppcVsMprf => {
                cfg.ambiguity_factor = 4;
                cfg.snr_db = snr_range(4, 30, 2);
                cfg.mprf_train2 = Some(desk_train2(&cfg.params));
            }
            Scenario::OffgridGamma => {
                cfg.ambiguity_factor = 4;
                cfg.snr_db = snr_range(10, 50, 5);
                cfg.gammas = vec![1, 2, 4];
            }
            Scenario::SparsitySweep => {
                cfg.ambiguity_factor = 4;
                cfg.snr_db = snr_range(10, 50, 5);
                cfg.target_counts = vec![4, 5, 7];
            }
            Scenario::WorstcaseSamebin => {
                cfg.params = cfg.params.with_pulse_count(20).expect("valid pulse count");
                cfg.subnyquist = None;
                cfg.target_counts = (1..=20).collect();
                cfg.ambiguity_factors = vec![1, 2, 4];
            }
            Scenario::Timing => {
                cfg.params = RadarParams::full_scale();
                cfg.subnyquist = Some(250);
                cfg.ambiguity_factor = 4;
                cfg.target_counts = (1..=8).collect();
                cfg.trials = 20;
            }
        }
        cfg
    }

    /// Full-scale setup: P = 20, N = 500, K = 250, Q = 4, L = 5, with the
    /// 25-pulse, 20 us second MPRF train and the full gamma and L sweeps.
    pub fn full_scale(scenario: Scenario) -> Self {
        let mut cfg = Self::desk(scenario);
        cfg.params = RadarParams::full_scale();
        cfg.subnyquist = Some(250);
        cfg.ambiguity_factor = 4;
        match scenario {
            Scenario::RppcVsMprf => {
                cfg.mprf_train2 = Some(TrainSpec {
                    pulses: 25,
                    pri: 20e-6,
                });
            }
            Scenario::OffgridGamma => cfg.gammas = vec![1, 2, 4, 16],
            Scenario::SparsitySweep => cfg.target_counts = vec![7, 9, 11],
            Scenario::WorstcaseSamebin => cfg.subnyquist = None,
            Scenario::Timing => {}
        }
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.params.nyquist_bins();
        let p = self.params.pulse_count();
        if self.trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        if let Some(k) = self.subnyquist {
            if k == 0 || k > n {
                return Err(invalid("subnyquist", format!("need 1 <= K <= N = {n}, got {k}")));
            }
        }
        let check_q = |q: usize| {
            if q == 0 || q > p {
                Err(invalid("ambiguity_factor", format!("need 1 <= Q <= P = {p}, got {q}")))
            } else {
                Ok(())
            }
        };
        if self.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(invalid("snr_db", "entries must be finite"));
        }
        match self.scenario {
            Scenario::RppcVsMprf | Scenario::OffgridGamma => {
                check_q(self.ambiguity_factor)?;
                if self.targets == 0 {
                    return Err(invalid("targets", "must be at least 1"));
                }
                if self.snr_db.is_empty() {
                    return Err(invalid("snr_db", "sweep needs at least one SNR"));
                }
                if self.scenario == Scenario::OffgridGamma {
                    if self.gammas.is_empty() || self.gammas.contains(&0) {
                        return Err(invalid("gammas", "need at least one factor, all >= 1"));
                    }
                } else if self.mprf_train2.is_none() {
                    return Err(invalid("mprf_train2", "second train is required"));
                }
            }
            Scenario::SparsitySweep => {
                check_q(self.ambiguity_factor)?;
                if self.target_counts.is_empty() || self.target_counts.contains(&0) {
                    return Err(invalid("target_counts", "need at least one count, all >= 1"));
                }
                if self.snr_db.is_empty() {
                    return Err(invalid("snr_db", "sweep needs at least one SNR"));
                }
            }
            Scenario::WorstcaseSamebin => {
                if self.ambiguity_factors.is_empty() {
                    return Err(invalid("ambiguity_factors", "need at least one Q"));
                }
                for &q in &self.ambiguity_factors {
                    check_q(q)?;
                }
                if self.target_counts.is_empty() || self.target_counts.iter().any(|&l| l == 0 || l > p) {
                    return Err(invalid("target_counts", format!("counts must lie in [1, P = {p}]")));
                }
            }
            Scenario::Timing => {
                check_q(self.ambiguity_factor)?;
                if self.target_counts.is_empty() || self.target_counts.contains(&0) {
                    return Err(invalid("target_counts", "need at least one count, all >= 1"));
                }
            }
        }
        Ok(())
    }
}

/// Second MPRF train for the desk setup: 15 pulses at a PRI of 51 delay
/// bins, close to the 4 : 5 PRI ratio of the full-scale setup.
pub fn desk_train2(params: &RadarParams) -> TrainSpec {
    TrainSpec {
        pulses: 15,
        pri: 51.0 / params.bandwidth(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub sweep_value: f64,
    pub trials: usize,
    pub hits: usize,
    pub targets: usize,
    pub hit_rate: f64,
    /// Mean solver wall-clock; only measured by the timing scenario.
    pub mean_runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub label: String,
    pub sweep: String,
    pub points: Vec<SweepPoint>,
}

impl Curve {
    pub fn hit_rates(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.hit_rate).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub scenario: Scenario,
    pub trials: usize,
    pub seed: u64,
    pub curves: Vec<Curve>,
    pub config: ExperimentConfig,
}

pub const CSV_HEADER: &str = "sweep_value,trials,hits,hit_rate,mean_runtime_ms";

impl ExperimentResult {
    pub fn curve(&self, label: &str) -> Option<&Curve> {
        self.curves.iter().find(|c| c.label == label)
    }

    /// One comma-separated table per curve.
    pub fn to_csv(curve: &Curve) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for p in &curve.points {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                p.sweep_value, p.trials, p.hits, p.hit_rate, p.mean_runtime_ms
            ));
        }
        out
    }
}

/// Hits, targets and solver nanoseconds of one trial at one sweep point.
#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    hits: usize,
    targets: usize,
    nanos: u128,
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn unit_noise(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    let mut m = DMatrix::zeros(rows, cols);
    for v in m.iter_mut() {
        *v = complex_gaussian(rng, 1.0);
    }
    m
}

fn draw_subset(params: &RadarParams, k: Option<usize>, rng: &mut ChaCha8Rng) -> Result<FrequencySubset> {
    let n = params.nyquist_bins();
    match k {
        None => Ok(FrequencySubset::nyquist(n)),
        Some(k) if k == n => Ok(FrequencySubset::nyquist(n)),
        Some(k) => {
            let table = SpectrumTable::new(&Waveform::for_params(params), params);
            random_subset(n, k, rng, Some(&table))
        }
    }
}

fn draw_code(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> PhaseCode {
    let p = cfg.params.pulse_count();
    if cfg.no_coding {
        PhaseCode::uncoded(p)
    } else {
        PhaseCode::random(p, rng)
    }
}

fn score(truth: &[(f64, f64)], est: &Result<Vec<TargetEstimate>>, crit: &HitCriterion, nanos: u128) -> Tally {
    let hits = match est {
        Ok(e) => score_hits(truth, e, crit).hits,
        Err(err) => {
            log::warn!("trial recovery failed, counted as misses: {err}");
            0
        }
    };
    Tally {
        hits,
        targets: truth.len(),
        nanos,
    }
}

fn omp_estimates(
    y: &CMatrix,
    a: &crate::measurement::MatrixA,
    b: &crate::measurement::MatrixB,
    params: &RadarParams,
    targets: usize,
    gamma: usize,
) -> Result<Vec<TargetEstimate>> {
    let out = matrix_omp(y, a, b, &RecoveryConfig::known_targets(targets))?;
    extract_targets(&out.map, params, gamma)
}

fn add_scaled(y0: &CMatrix, unit: &CMatrix, variance: f64) -> CMatrix {
    y0 + unit * num_complex::Complex64::new(variance.sqrt(), 0.0)
}

type TrialOutput = Vec<Vec<Tally>>;

fn rppc_vs_mprf_trial(cfg: &ExperimentConfig, trial: usize) -> Result<TrialOutput> {
    let params = &cfg.params;
    let mut rng = trial_rng(cfg.seed, trial);
    let code = draw_code(cfg, &mut rng);
    let subset = draw_subset(params, cfg.subnyquist, &mut rng)?;
    let scene = TargetScene::random_on_grid(params, cfg.targets, cfg.ambiguity_factor, &mut rng)?;
    let truth = scene.truth();
    let crit = HitCriterion::for_params(params);

    let a = build_A(&subset);
    let b = build_B(&code, cfg.ambiguity_factor)?;
    let y0 = synthesize_ongrid(params, &scene, &code, &subset, &NoiseSpec::noiseless(), 0)?;
    let u0 = unit_noise(&mut rng, y0.nrows(), y0.ncols());

    let train2 = cfg.mprf_train2.expect("validated");
    let train1 = TrainSpec {
        pulses: params.pulse_count(),
        pri: params.pri(),
    };
    let mcfg = MprfConfig::new(params, train1, train2, cfg.ambiguity_factor)?;
    let targets: Vec<_> = scene.targets().iter().map(|t| t.target).collect();
    let mut trains = Vec::new();
    for which in [1u8, 2] {
        let tp = mcfg.train_params(which)?;
        let k = cfg
            .subnyquist
            .map(|k| (k * tp.nyquist_bins()).div_ceil(params.nyquist_bins()));
        let sub = draw_subset(&tp, k, &mut rng)?;
        let sc = TargetScene::new(&tp, &targets)?;
        let uncoded = PhaseCode::uncoded(tp.pulse_count());
        let y = synthesize_fourier(&tp, &sc, &uncoded, &sub, &NoiseSpec::noiseless(), 1, 0)?;
        let u = unit_noise(&mut rng, y.nrows(), y.ncols());
        trains.push((tp, sub, y, u));
    }

    let mut rppc = Vec::new();
    let mut mprf = Vec::new();
    for &snr in &cfg.snr_db {
        let noise = NoiseSpec::snr_db(snr);
        let y = add_scaled(&y0, &u0, noise.normalized_variance(params, params.pulse_count()));
        let est = omp_estimates(&y, &a, &b, params, cfg.targets, 1);
        rppc.push(score(&truth, &est, &crit, 0));

        let folded: Result<Vec<_>> = trains
            .iter()
            .map(|(tp, sub, y0, u)| {
                let y = add_scaled(y0, u, noise.normalized_variance(tp, mcfg.total_pulses()));
                mprf_recover_train(&y, tp, sub, cfg.targets)
            })
            .collect();
        let est = folded.map(|f| mprf_cluster_resolve(&f[0], &f[1], &mcfg).targets);
        mprf.push(score(&truth, &est, &crit, 0));
    }
    Ok(vec![rppc, mprf])
}

fn offgrid_trial(cfg: &ExperimentConfig, trial: usize) -> Result<TrialOutput> {
    let params = &cfg.params;
    let mut rng = trial_rng(cfg.seed, trial);
    let code = draw_code(cfg, &mut rng);
    let subset = draw_subset(params, cfg.subnyquist, &mut rng)?;
    let crit = HitCriterion::for_params(params);
    let q = cfg.ambiguity_factor;

    let off = TargetScene::random_off_grid(params, cfg.targets, q, &mut rng)?;
    let y_off = synthesize_fourier(params, &off, &code, &subset, &NoiseSpec::noiseless(), params.pulse_count(), 0)?;
    let u_off = unit_noise(&mut rng, y_off.nrows(), y_off.ncols());
    let on = TargetScene::random_on_grid(params, cfg.targets, q, &mut rng)?;
    let y_on = synthesize_ongrid(params, &on, &code, &subset, &NoiseSpec::noiseless(), 0)?;
    let u_on = unit_noise(&mut rng, y_on.nrows(), y_on.ncols());

    let mut curves = Vec::new();
    for &gamma in &cfg.gammas {
        let (a, b) = build_overdiscretized(params, &code, &subset, q, gamma)?;
        let truth = off.truth();
        let pts = cfg
            .snr_db
            .iter()
            .map(|&snr| {
                let var = NoiseSpec::snr_db(snr).normalized_variance(params, params.pulse_count());
                let y = add_scaled(&y_off, &u_off, var);
                score(&truth, &omp_estimates(&y, &a, &b, params, cfg.targets, gamma), &crit, 0)
            })
            .collect();
        curves.push(pts);
    }
    let a = build_A(&subset);
    let b = build_B(&code, q)?;
    let truth = on.truth();
    let pts = cfg
        .snr_db
        .iter()
        .map(|&snr| {
            let var = NoiseSpec::snr_db(snr).normalized_variance(params, params.pulse_count());
            let y = add_scaled(&y_on, &u_on, var);
            score(&truth, &omp_estimates(&y, &a, &b, params, cfg.targets, 1), &crit, 0)
        })
        .collect();
    curves.push(pts);
    Ok(curves)
}

fn sparsity_trial(cfg: &ExperimentConfig, trial: usize) -> Result<TrialOutput> {
    let params = &cfg.params;
    let mut rng = trial_rng(cfg.seed, trial);
    let code = draw_code(cfg, &mut rng);
    let subset = draw_subset(params, cfg.subnyquist, &mut rng)?;
    let crit = HitCriterion::for_params(params);
    let a = build_A(&subset);
    let b = build_B(&code, cfg.ambiguity_factor)?;
    let mut curves = Vec::new();
    for &l in &cfg.target_counts {
        let scene = TargetScene::random_on_grid(params, l, cfg.ambiguity_factor, &mut rng)?;
        let y0 = synthesize_ongrid(params, &scene, &code, &subset, &NoiseSpec::noiseless(), 0)?;
        let u = unit_noise(&mut rng, y0.nrows(), y0.ncols());
        let truth = scene.truth();
        let pts = cfg
            .snr_db
            .iter()
            .map(|&snr| {
                let var = NoiseSpec::snr_db(snr).normalized_variance(params, params.pulse_count());
                let y = add_scaled(&y0, &u, var);
                score(&truth, &omp_estimates(&y, &a, &b, params, l, 1), &crit, 0)
            })
            .collect();
        curves.push(pts);
    }
    Ok(curves)
}

fn vector_estimates(x: &VectorRecovery, row: usize, params: &RadarParams, blocks: usize) -> Result<Vec<TargetEstimate>> {
    let p = params.pulse_count();
    let mut map = SparseMap::new(params.nyquist_bins(), p * blocks, p)?;
    for &(c, v) in &x.entries {
        map.push(row, c, v)?;
    }
    extract_targets(&map, params, 1)
}

fn worstcase_trial(cfg: &ExperimentConfig, trial: usize) -> Result<TrialOutput> {
    let params = &cfg.params;
    let mut rng = trial_rng(cfg.seed, trial);
    let code = draw_code(cfg, &mut rng);
    let subset = FrequencySubset::nyquist(params.nyquist_bins());
    let a = build_A(&subset);
    let crit = HitCriterion::for_params(params);
    let mut curves = Vec::new();
    for &q in &cfg.ambiguity_factors {
        let b = build_B(&code, q)?;
        let mut l1_pts = Vec::new();
        let mut omp_pts = Vec::new();
        for &l in &cfg.target_counts {
            let scene = TargetScene::random_same_bin(params, l, q, &mut rng)?;
            let truth = scene.truth();
            let y = synthesize_ongrid(params, &scene, &code, &subset, &NoiseSpec::noiseless(), 0)?;
            let reduced = nyquist_reduce(&y, &a)?;
            let row = detect_range_bin(&reduced).expect("nonempty");
            let g = &reduced[row];
            let rc = RecoveryConfig::known_targets(l);
            let l1 = l1_vector(g, b.matrix(), &rc).and_then(|x| vector_estimates(&x, row, params, q));
            l1_pts.push(score(&truth, &l1, &crit, 0));
            let om = omp_vector(g, b.matrix(), &rc).and_then(|x| vector_estimates(&x, row, params, q));
            omp_pts.push(score(&truth, &om, &crit, 0));
        }
        curves.push(l1_pts);
        curves.push(omp_pts);
    }
    Ok(curves)
}

fn timing_trial(cfg: &ExperimentConfig, trial: usize) -> Result<TrialOutput> {
    let params = &cfg.params;
    let mut rng = trial_rng(cfg.seed, trial);
    let code = draw_code(cfg, &mut rng);
    let crit = HitCriterion::for_params(params);
    let b = build_B(&code, cfg.ambiguity_factor)?;
    let n = params.nyquist_bins();
    let regimes = [None, Some(cfg.subnyquist.unwrap_or(n / 2))];
    let mut curves = Vec::new();
    for k in regimes {
        let subset = draw_subset(params, k, &mut rng)?;
        let a = build_A(&subset);
        let mut pts = Vec::new();
        for &l in &cfg.target_counts {
            let scene = TargetScene::random_on_grid(params, l, cfg.ambiguity_factor, &mut rng)?;
            let y = synthesize_ongrid(params, &scene, &code, &subset, &NoiseSpec::noiseless(), 0)?;
            let start = Instant::now();
            let out = matrix_omp(&y, &a, &b, &RecoveryConfig::known_targets(l));
            let nanos = start.elapsed().as_nanos();
            let est = out.and_then(|o| extract_targets(&o.map, params, 1));
            pts.push(score(&scene.truth(), &est, &crit, nanos));
        }
        curves.push(pts);
    }
    Ok(curves)
}

fn curve_layout(cfg: &ExperimentConfig) -> (Vec<String>, &'static str, Vec<f64>) {
    match cfg.scenario {
        Scenario::RppcVsMprf => (vec!["rppc".into(), "mprf".into()], "snr_db", cfg.snr_db.clone()),
        Scenario::OffgridGamma => {
            let mut labels: Vec<String> = cfg.gammas.iter().map(|g| format!("gamma={g}")).collect();
            labels.push("on_grid".into());
            (labels, "snr_db", cfg.snr_db.clone())
        }
        Scenario::SparsitySweep => (
            cfg.target_counts.iter().map(|l| format!("L={l}")).collect(),
            "snr_db",
            cfg.snr_db.clone(),
        ),
        Scenario::WorstcaseSamebin => (
            cfg.ambiguity_factors
                .iter()
                .flat_map(|q| [format!("l1 Q={q}"), format!("omp Q={q}")])
                .collect(),
            "targets",
            cfg.target_counts.iter().map(|&l| l as f64).collect(),
        ),
        Scenario::Timing => (
            vec!["nyquist".into(), "subnyquist".into()],
            "targets",
            cfg.target_counts.iter().map(|&l| l as f64).collect(),
        ),
    }
}

/// Runs every trial of the scenario and aggregates hit rates per curve and
/// sweep point. Trial t draws all its randomness from stream t of a
/// generator seeded with `cfg.seed`, so results do not depend on thread
/// scheduling. Timing trials run sequentially.
pub fn monte_carlo(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let run = |t: usize| match cfg.scenario {
        Scenario::RppcVsMprf => rppc_vs_mprf_trial(cfg, t),
        Scenario::OffgridGamma => offgrid_trial(cfg, t),
        Scenario::SparsitySweep => sparsity_trial(cfg, t),
        Scenario::WorstcaseSamebin => worstcase_trial(cfg, t),
        Scenario::Timing => timing_trial(cfg, t),
    };
    let outputs: Vec<TrialOutput> = if cfg.scenario == Scenario::Timing {
        (0..cfg.trials).map(run).collect::<Result<_>>()?
    } else {
        (0..cfg.trials).into_par_iter().map(run).collect::<Result<_>>()?
    };

    let (labels, sweep, values) = curve_layout(cfg);
    let timed = cfg.scenario == Scenario::Timing;
    let curves = labels
        .into_iter()
        .enumerate()
        .map(|(ci, label)| {
            let points = values
                .iter()
                .enumerate()
                .map(|(pi, &v)| {
                    let mut sum = Tally::default();
                    for o in &outputs {
                        let t = o[ci][pi];
                        sum.hits += t.hits;
                        sum.targets += t.targets;
                        sum.nanos += t.nanos;
                    }
                    SweepPoint {
                        sweep_value: v,
                        trials: cfg.trials,
                        hits: sum.hits,
                        targets: sum.targets,
                        hit_rate: if sum.targets == 0 {
                            1.0
                        } else {
                            sum.hits as f64 / sum.targets as f64
                        },
                        mean_runtime_ms: if timed {
                            sum.nanos as f64 / cfg.trials as f64 / 1e6
                        } else {
                            0.0
                        },
                    }
                })
                .collect();
            Curve {
                label,
                sweep: sweep.to_string(),
                points,
            }
        })
        .collect();
    Ok(ExperimentResult {
        scenario: cfg.scenario,
        trials: cfg.trials,
        seed: cfg.seed,
        curves,
        config: cfg.clone(),
    })
}
