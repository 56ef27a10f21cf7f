//! Radar, waveform and scene parameterization, plus synthesis of received
//! signals and their normalized Fourier coefficients.

mod code;
mod noise;
mod params;
mod scene;
mod synth;
mod waveform;

pub use code::PhaseCode;
pub use noise::{complex_gaussian, NoiseSpec};
pub use params::RadarParams;
pub use scene::{fold_delay, GridIndex, SceneDocument, SceneTarget, SceneTargetDoc, Target, TargetScene};
pub use synth::{
    fourier_coefficients, normalize_coefficients, observe_time_domain, synthesize_fourier,
    synthesize_ongrid, synthesize_received, Normalizer, ReceivedSignal, DEFAULT_OVERSAMPLE,
    SAMPLE_OFFSET,
};
pub use waveform::{lfm_sample, SpectrumTable, Waveform, WaveformKind, SPECTRAL_FLOOR};

#[doc(hidden)]
pub use synth::synthesize_received_with_offset;
