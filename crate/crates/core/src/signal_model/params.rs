use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Radar configuration: pulse train geometry and waveform band.
///
/// All quantities are SI (seconds, hertz, meters per second). The Nyquist
/// bin count and the grid spacings are derived on demand and never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RadarParamsDoc", into = "RadarParamsDoc")]
pub struct RadarParams {
    pulse_count: usize,
    pri: f64,
    carrier: f64,
    bandwidth: f64,
    pulse_width: f64,
    wave_speed: f64,
}

impl RadarParams {
    pub fn new(
        pulse_count: usize,
        pri: f64,
        carrier: f64,
        bandwidth: f64,
        pulse_width: f64,
        wave_speed: f64,
    ) -> Result<Self> {
        let p = Self {
            pulse_count,
            pri,
            carrier,
            bandwidth,
            pulse_width,
            wave_speed,
        };
        p.validate()?;
        Ok(p)
    }

    /// P = 20, T_r = 25 us, f_c = 10 GHz, B_h = 20 MHz, T_h = 1 us (N = 500).
    pub fn full_scale() -> Self {
        Self {
            pulse_count: 20,
            pri: 25e-6,
            carrier: 10e9,
            bandwidth: 20e6,
            pulse_width: 1e-6,
            wave_speed: 3e8,
        }
    }

    /// Reduced configuration used for fast sweeps: P = 12 and N = 64 at the
    /// same PRI and pulse width, so `max doppler * T_h` stays at 0.04.
    pub fn desk_scale() -> Self {
        Self {
            pulse_count: 12,
            pri: 25e-6,
            carrier: 10e9,
            bandwidth: 2.56e6,
            pulse_width: 1e-6,
            wave_speed: 3e8,
        }
    }

    fn validate(&self) -> Result<()> {
        let finite_pos = |v: f64| v.is_finite() && v > 0.0;
        if self.pulse_count == 0 {
            return Err(invalid("pulse_count", "must be at least 1"));
        }
        for (name, v) in [
            ("pri", self.pri),
            ("carrier", self.carrier),
            ("bandwidth", self.bandwidth),
            ("pulse_width", self.pulse_width),
            ("wave_speed", self.wave_speed),
        ] {
            if !finite_pos(v) {
                return Err(invalid(name, format!("must be finite and positive, got {v}")));
            }
        }
        if self.pulse_width >= self.pri {
            return Err(invalid("pulse_width", "must be shorter than the PRI"));
        }
        if self.bandwidth * self.pulse_width < 1.0 - 1e-9 {
            return Err(invalid(
                "bandwidth",
                "time-bandwidth product B_h * T_h must be at least 1",
            ));
        }
        if self.nyquist_bins() == 0 {
            return Err(invalid("bandwidth", "B_h * T_r must be at least 1"));
        }
        Ok(())
    }

    pub fn with_pulse_count(mut self, pulse_count: usize) -> Result<Self> {
        self.pulse_count = pulse_count;
        self.validate()?;
        Ok(self)
    }

    pub fn with_pri(mut self, pri: f64) -> Result<Self> {
        self.pri = pri;
        self.validate()?;
        Ok(self)
    }

    pub fn with_bandwidth(mut self, bandwidth: f64) -> Result<Self> {
        self.bandwidth = bandwidth;
        self.validate()?;
        Ok(self)
    }

    pub fn pulse_count(&self) -> usize {
        self.pulse_count
    }
    pub fn pri(&self) -> f64 {
        self.pri
    }
    pub fn carrier(&self) -> f64 {
        self.carrier
    }
    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }
    pub fn pulse_width(&self) -> f64 {
        self.pulse_width
    }
    pub fn wave_speed(&self) -> f64 {
        self.wave_speed
    }

    /// N = floor(B_h * T_r). A product that lands within 1e-9 (relative) of an
    /// integer is taken as that integer, so 20 MHz * 25 us gives 500.
    pub fn nyquist_bins(&self) -> usize {
        let x = self.bandwidth * self.pri;
        let r = x.round();
        if (x - r).abs() <= 1e-9 * x.max(1.0) {
            r as usize
        } else {
            x.floor() as usize
        }
    }

    /// Fast-time grid spacing T_r / N.
    pub fn delay_bin(&self) -> f64 {
        self.pri / self.nyquist_bins() as f64
    }

    /// Slow-time grid spacing 1 / (P T_r).
    pub fn doppler_bin(&self) -> f64 {
        1.0 / (self.pulse_count as f64 * self.pri)
    }

    pub fn wavelength(&self) -> f64 {
        self.wave_speed / self.carrier
    }

    pub fn r_max(&self) -> f64 {
        self.wave_speed * self.pri / 2.0
    }

    pub fn v_max(&self) -> f64 {
        self.wavelength() / (4.0 * self.pri)
    }

    /// Radial velocity for a stored Doppler, v = nu * lambda / 2. Dopplers are
    /// kept in [0, 1/T_r), so velocities alias modulo lambda / (2 T_r).
    pub fn velocity_of(&self, doppler: f64) -> f64 {
        doppler * self.wavelength() / 2.0
    }
}

#[derive(Serialize, Deserialize)]
struct RadarParamsDoc {
    pulse_count: usize,
    pri: f64,
    carrier: f64,
    bandwidth: f64,
    pulse_width: f64,
    wave_speed: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nyquist_bins: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delay_bin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    doppler_bin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    v_max: Option<f64>,
}

impl From<RadarParams> for RadarParamsDoc {
    fn from(p: RadarParams) -> Self {
        Self {
            pulse_count: p.pulse_count,
            pri: p.pri,
            carrier: p.carrier,
            bandwidth: p.bandwidth,
            pulse_width: p.pulse_width,
            wave_speed: p.wave_speed,
            nyquist_bins: Some(p.nyquist_bins()),
            delay_bin: Some(p.delay_bin()),
            doppler_bin: Some(p.doppler_bin()),
            r_max: Some(p.r_max()),
            v_max: Some(p.v_max()),
        }
    }
}

impl TryFrom<RadarParamsDoc> for RadarParams {
    type Error = Error;

    fn try_from(d: RadarParamsDoc) -> Result<Self> {
        let p = RadarParams::new(
            d.pulse_count,
            d.pri,
            d.carrier,
            d.bandwidth,
            d.pulse_width,
            d.wave_speed,
        )?;
        // derived fields are optional on input but must agree when present
        if let Some(n) = d.nyquist_bins {
            if n != p.nyquist_bins() {
                return Err(invalid(
                    "nyquist_bins",
                    format!("document says {n}, floor(B_h*T_r) is {}", p.nyquist_bins()),
                ));
            }
        }
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b.abs().max(f64::MIN_POSITIVE);
        for (name, given, actual) in [
            ("delay_bin", d.delay_bin, p.delay_bin()),
            ("doppler_bin", d.doppler_bin, p.doppler_bin()),
            ("r_max", d.r_max, p.r_max()),
            ("v_max", d.v_max, p.v_max()),
        ] {
            if let Some(g) = given {
                if !close(g, actual) {
                    return Err(invalid(name, format!("document says {g}, derived {actual}")));
                }
            }
        }
        Ok(p)
    }
}

impl std::fmt::Display for RadarParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "P={} T_r={:e}s f_c={:e}Hz B_h={:e}Hz T_h={:e}s N={}",
            self.pulse_count,
            self.pri,
            self.carrier,
            self.bandwidth,
            self.pulse_width,
            self.nyquist_bins()
        )
    }
}
