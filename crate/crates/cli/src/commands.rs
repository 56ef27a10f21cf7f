use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rppc::analysis::{
    monte_carlo, score_hits, theorem2_max_targets, verify_no_coding, verify_theorem1, ExperimentResult, HitCriterion,
    Scenario,
};
use rppc::measurement::{select_subset, FrequencySubset, SubsetStrategy};
use rppc::recovery::{build_overdiscretized, extract_targets, matrix_omp, RecoveryConfig, RecoveryReport};
use rppc::signal_model::{
    observe_time_domain, synthesize_fourier, synthesize_ongrid, NoiseSpec, PhaseCode, SceneDocument, SpectrumTable,
    TargetScene, Waveform, DEFAULT_OVERSAMPLE,
};

use crate::config::RunConfig;
use crate::CliError;

pub const EXAMPLE_SCENE: &str = include_str!("../scenes/example.json");

pub fn spark(pulses: usize, blocks: usize, draws: usize, seed: u64, no_coding: bool) -> Result<String, CliError> {
    if no_coding {
        let c = verify_no_coding(pulses, blocks)?;
        let cols: Vec<String> = c.witness.iter().map(|i| (i + 1).to_string()).collect();
        let mut out = String::new();
        if c.witness_dependent && c.report.value() <= 4 {
            writeln!(out, "spark ≤ 4, witness columns [{}]", cols.join(",")).unwrap();
        } else {
            writeln!(out, "collapse witness [{}] not dependent", cols.join(",")).unwrap();
        }
        writeln!(out, "brute-force spark={}", c.report.value()).unwrap();
        return Ok(out);
    }
    let s = verify_theorem1(pulses, blocks, draws, seed)?;
    let mut out = format!("{}/{} spark={} (=P-Q+2)\n", s.matches, s.draws, s.expected);
    if s.matches != s.draws {
        let mut hist = BTreeMap::new();
        for v in &s.sparks {
            *hist.entry(*v).or_insert(0usize) += 1;
        }
        writeln!(out, "observed: {hist:?}").unwrap();
    }
    if !s.upper_bound_holds {
        writeln!(out, "warning: P-Q+2 columns of the last block were independent").unwrap();
    }
    Ok(out)
}

fn load_scene(path: Option<&Path>) -> Result<SceneDocument, CliError> {
    let (text, origin) = match path {
        Some(p) => (
            std::fs::read_to_string(p).map_err(|e| CliError::Io(p.to_path_buf(), e))?,
            p.to_path_buf(),
        ),
        None => (EXAMPLE_SCENE.to_string(), PathBuf::from("<example>")),
    };
    serde_json::from_str(&text).map_err(|e| CliError::Config(origin, e))
}

fn random_scene(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<TargetScene, CliError> {
    let params = cfg.params();
    let l = cfg.scene.targets.unwrap_or(3);
    let q = cfg.ambiguity_factor();
    Ok(if cfg.scene.worst_case {
        TargetScene::random_same_bin(&params, l, q, rng)?
    } else if cfg.scene.on_grid {
        TargetScene::random_on_grid(&params, l, q, rng)?
    } else {
        TargetScene::random_off_grid(&params, l, q, rng)?
    })
}

/// Synthesizes the scene, recovers it with matrix OMP and prints the
/// estimates with their hit score. The scene is the bundled example unless
/// a file is given or `random` asks for a draw from the config.
pub fn recover(cfg: &RunConfig, scene_path: Option<&Path>, random: bool, out: Option<&Path>) -> Result<String, CliError> {
    let params = cfg.params();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.code_seed.unwrap_or(cfg.seed));
    let code = if cfg.no_coding {
        PhaseCode::uncoded(params.pulse_count())
    } else {
        PhaseCode::random(params.pulse_count(), &mut rng)
    };
    let scene = if random {
        random_scene(cfg, &mut rng)?
    } else {
        load_scene(scene_path)?.into_scene(&params)?
    };
    let n = params.nyquist_bins();
    let w = Waveform::for_params(&params);
    let subset = match cfg.coefficients() {
        None => FrequencySubset::nyquist(n),
        Some(k) => select_subset(n, k, &SubsetStrategy::Random, cfg.seed, Some(&SpectrumTable::new(&w, &params)))?,
    };
    let noise = cfg
        .snr_db
        .as_ref()
        .and_then(|s| s.first())
        .map_or(NoiseSpec::noiseless(), |&db| NoiseSpec::snr_db(db));
    let blocks = cfg.ambiguity_factor().max(scene.ambiguity_factor());
    let gamma = cfg.gamma.unwrap_or(1);

    let mut text = String::new();
    writeln!(
        text,
        "# P={} N={} K={} Q={} gamma={} seed={}",
        params.pulse_count(),
        n,
        subset.len(),
        blocks,
        gamma,
        cfg.seed
    )
    .unwrap();
    if scene.is_empty() {
        writeln!(text, "q,folded_delay_us,doppler_hz,amplitude_re,amplitude_im").unwrap();
        writeln!(text, "hits: 0/0").unwrap();
        return Ok(text);
    }
    let y = if cfg.time_domain {
        observe_time_domain(&params, &w, &scene, &code, &subset, &noise, DEFAULT_OVERSAMPLE, cfg.seed)?
    } else if scene.is_on_grid() {
        synthesize_ongrid(&params, &scene, &code, &subset, &noise, cfg.seed)?
    } else {
        synthesize_fourier(&params, &scene, &code, &subset, &noise, params.pulse_count(), cfg.seed)?
    };
    let (a, b) = build_overdiscretized(&params, &code, &subset, blocks, gamma)?;
    let outcome = matrix_omp(&y, &a, &b, &RecoveryConfig::known_targets(scene.len()))?;
    let estimates = extract_targets(&outcome.map, &params, gamma)?;
    let score = score_hits(&scene.truth(), &estimates, &HitCriterion::for_params(&params));

    writeln!(text, "q,folded_delay_us,doppler_hz,amplitude_re,amplitude_im").unwrap();
    for e in &estimates {
        writeln!(
            text,
            "{},{:.6},{:.3},{:.6},{:.6}",
            e.ambiguity_order,
            e.folded_delay * 1e6,
            e.doppler,
            e.amplitude.re,
            e.amplitude.im
        )
        .unwrap();
    }
    writeln!(text, "hits: {}/{}", score.hits, score.targets).unwrap();
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
        let path = dir.join("recovery.json");
        let report = RecoveryReport::new(&outcome, estimates);
        let json = serde_json::to_string_pretty(&report)?;
        std::fs::write(&path, json).map_err(|e| CliError::Io(path.clone(), e))?;
        writeln!(text, "wrote {}", path.display()).unwrap();
    }
    Ok(text)
}

fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

fn csv_with_header(result: &ExperimentResult, curve: usize) -> String {
    let c = &result.config;
    let p = &c.params;
    let mut out = format!(
        "# scenario={} curve={} seed={} trials={} P={} N={} K={} Q={} no_coding={}\n",
        result.scenario,
        result.curves[curve].label,
        result.seed,
        result.trials,
        p.pulse_count(),
        p.nyquist_bins(),
        c.subnyquist.map_or("nyquist".to_string(), |k| k.to_string()),
        c.ambiguity_factor,
        c.no_coding
    );
    out.push_str(&ExperimentResult::to_csv(&result.curves[curve]));
    out
}

/// Writes one CSV per curve plus the full result as JSON. Returns the
/// summary text and the JSON path.
pub fn write_result(result: &ExperimentResult, dir: &Path) -> Result<(String, PathBuf), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
    let mut text = String::new();
    for (i, curve) in result.curves.iter().enumerate() {
        let path = dir.join(format!("{}_{}.csv", result.scenario, file_stem(&curve.label)));
        std::fs::write(&path, csv_with_header(result, i)).map_err(|e| CliError::Io(path.clone(), e))?;
        let rates: Vec<String> = curve.points.iter().map(|p| format!("{:.3}", p.hit_rate)).collect();
        writeln!(text, "{}: {}", curve.label, rates.join(" ")).unwrap();
        writeln!(text, "  wrote {}", path.display()).unwrap();
    }
    let json_path = dir.join(format!("{}.json", result.scenario));
    let json = serde_json::to_string_pretty(result)?;
    std::fs::write(&json_path, json).map_err(|e| CliError::Io(json_path.clone(), e))?;
    writeln!(text, "wrote {}", json_path.display()).unwrap();
    writeln!(text, "seed: {}", result.seed).unwrap();
    Ok((text, json_path))
}

pub fn experiment(cfg: &RunConfig, scenario: Option<Scenario>) -> Result<String, CliError> {
    let mut cfg = cfg.clone();
    if let Some(s) = scenario {
        cfg.scenario = s;
    }
    let e = cfg.experiment()?;
    let result = monte_carlo(&e)?;
    Ok(write_result(&result, &cfg.output)?.0)
}

/// Re-runs the config echoed in a result file and reports whether the
/// hit counts come out identical.
pub fn replay(path: &Path) -> Result<String, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    let old: ExperimentResult = serde_json::from_str(&text).map_err(|e| CliError::Config(path.to_path_buf(), e))?;
    let new = monte_carlo(&old.config)?;
    let counts = |r: &ExperimentResult| -> Vec<Vec<(usize, usize)>> {
        r.curves
            .iter()
            .map(|c| c.points.iter().map(|p| (p.hits, p.targets)).collect())
            .collect()
    };
    if counts(&old) == counts(&new) {
        Ok(format!("reproduced {} (seed {})\n", path.display(), old.seed))
    } else {
        Err(CliError::Replay(format!("{} does not reproduce", path.display())))
    }
}

pub fn info(cfg: &RunConfig) -> Result<String, CliError> {
    let p = cfg.params();
    let q = cfg.ambiguity_factor();
    let k = cfg.coefficients().unwrap_or(p.nyquist_bins());
    let mut out = String::new();
    let rows: Vec<(&str, String)> = vec![
        ("scale", format!("{:?}", cfg.scale).to_lowercase()),
        ("pulses P", p.pulse_count().to_string()),
        ("PRI T_r", format!("{} us", p.pri() * 1e6)),
        ("carrier f_c", format!("{} GHz", p.carrier() / 1e9)),
        ("bandwidth B_h", format!("{} MHz", p.bandwidth() / 1e6)),
        ("pulse width T_h", format!("{} us", p.pulse_width() * 1e6)),
        ("Nyquist bins N", p.nyquist_bins().to_string()),
        ("coefficients K", k.to_string()),
        ("ambiguity factor Q", q.to_string()),
        ("delay bin", format!("{} ns", p.delay_bin() * 1e9)),
        ("Doppler bin", format!("{} Hz", p.doppler_bin())),
        ("R_max", format!("{} m", p.r_max())),
        ("V_max", format!("{} m/s", p.v_max())),
        ("window Q R_max", format!("{} m", q as f64 * p.r_max())),
        ("spark(B) a.s.", (p.pulse_count() + 2).saturating_sub(q).to_string()),
        ("guaranteed L <=", theorem2_max_targets(k, p.pulse_count(), q).to_string()),
        ("trials", cfg.trials.to_string()),
        ("seed", cfg.seed.to_string()),
    ];
    for (name, value) in rows {
        writeln!(out, "{name:<20} {value}").unwrap();
    }
    Ok(out)
}
