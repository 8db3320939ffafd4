use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::channels::{
    calibrated_bath, AnalyticChannel, BathChannel, ChannelBackend, LocalChannel, PulseErrors,
    TransmissionChannel, DEFAULT_BATH_MODES, DEFAULT_HALF_WIDTH,
};
use crate::dynamics::MAX_BATH_MODES;
use crate::error::{Error, Result};
use crate::protocols::{EprConfig, GateNoise};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    JointMeasure,
    Epr,
    GateRaw,
    GatePurified,
    StationarityScan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    #[default]
    Ideal,
    Analytic,
    Bath,
}

fn default_modes() -> usize {
    DEFAULT_BATH_MODES
}

fn default_half_width() -> f64 {
    DEFAULT_HALF_WIDTH
}

/// Noise model shared by all protocols. Couplings are in units of the
/// Raman coupling `g = 1`, so a complete transfer lasts `pi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    #[serde(default)]
    pub backend: Backend,
    /// Loss probability of one local copy (and of one gate photon interval).
    #[serde(default)]
    pub eta_local: f64,
    /// Loss probability of one transmission.
    #[serde(default)]
    pub eta_transmission: f64,
    /// Systematic detuning expressed as the phase `delta * pi` acquired by
    /// `|r>` over one transfer pulse.
    #[serde(default)]
    pub detuning_phase: f64,
    /// Relative pulse-area error.
    #[serde(default)]
    pub pulse_area_error: f64,
    /// Laser phase offset.
    #[serde(default)]
    pub phase_offset: f64,
    /// Initial excitation probability of each bath mode.
    #[serde(default)]
    pub p_therm: f64,
    #[serde(default = "default_modes")]
    pub bath_modes: usize,
    #[serde(default = "default_half_width")]
    pub bath_half_width: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            backend: Backend::Ideal,
            eta_local: 0.0,
            eta_transmission: 0.0,
            detuning_phase: 0.0,
            pulse_area_error: 0.0,
            phase_offset: 0.0,
            p_therm: 0.0,
            bath_modes: DEFAULT_BATH_MODES,
            bath_half_width: DEFAULT_HALF_WIDTH,
        }
    }
}

/// Input `gamma|00> + alpha|01> + beta|10>` of the joint measurement (real
/// amplitudes, normalized on use).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointInput {
    pub alpha: f64,
    pub beta: f64,
    #[serde(default)]
    pub gamma: f64,
}

impl Default for JointInput {
    fn default() -> Self {
        Self {
            alpha: std::f64::consts::FRAC_1_SQRT_2,
            beta: std::f64::consts::FRAC_1_SQRT_2,
            gamma: 0.0,
        }
    }
}

/// One parameter axis of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub parameter: String,
    pub values: Vec<f64>,
}

/// Sweepable parameter names.
pub const SWEEP_PARAMETERS: [&str; 6] = [
    "eta_local",
    "eta_transmission",
    "detuning_phase",
    "pulse_area_error",
    "phase_offset",
    "p_therm",
];

fn default_max_attempts() -> usize {
    50
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub protocol: Protocol,
    #[serde(default)]
    pub noise: NoiseConfig,
    pub trials: usize,
    pub seed: u64,
    #[serde(default = "default_max_attempts")]
    pub max_attempts: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<JointInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepAxis>,
}

impl ExperimentConfig {
    pub fn new(protocol: Protocol, noise: NoiseConfig, trials: usize, seed: u64) -> Self {
        Self {
            protocol,
            noise,
            trials,
            seed,
            max_attempts: default_max_attempts(),
            input: None,
            sweep: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.max_attempts == 0 {
            return bad("max_attempts must be at least 1".into());
        }
        self.noise.validate()?;
        if let Some(inp) = &self.input {
            let n = inp.alpha * inp.alpha + inp.beta * inp.beta + inp.gamma * inp.gamma;
            if !(n > 0.0 && n.is_finite()) {
                return bad("joint input must have nonzero finite norm".into());
            }
        }
        if let Some(axis) = &self.sweep {
            if !SWEEP_PARAMETERS.contains(&axis.parameter.as_str()) {
                return bad(format!("unknown sweep parameter `{}`", axis.parameter));
            }
            if axis.values.is_empty() {
                return bad("sweep grid is empty".into());
            }
            for &v in &axis.values {
                self.with_parameter(&axis.parameter, v)?.noise.validate()?;
            }
        }
        Ok(())
    }

    /// Copy with one noise parameter replaced.
    pub fn with_parameter(&self, name: &str, value: f64) -> Result<Self> {
        let mut c = self.clone();
        let n = &mut c.noise;
        match name {
            "eta_local" => n.eta_local = value,
            "eta_transmission" => n.eta_transmission = value,
            "detuning_phase" => n.detuning_phase = value,
            "pulse_area_error" => n.pulse_area_error = value,
            "phase_offset" => n.phase_offset = value,
            "p_therm" => n.p_therm = value,
            other => return Err(Error::Config(format!("unknown sweep parameter `{other}`"))),
        }
        c.sweep = None;
        Ok(c)
    }
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        for (name, v) in [
            ("eta_local", self.eta_local),
            ("eta_transmission", self.eta_transmission),
        ] {
            if !(0.0..1.0).contains(&v) {
                return bad(format!("{name} = {v} outside [0, 1)"));
            }
        }
        if !(0.0..1.0).contains(&self.p_therm) {
            return bad(format!("p_therm = {} outside [0, 1)", self.p_therm));
        }
        if self.p_therm > 0.0 && self.backend != Backend::Bath {
            return bad("p_therm requires the bath backend".into());
        }
        for (name, v) in [
            ("detuning_phase", self.detuning_phase),
            ("pulse_area_error", self.pulse_area_error),
            ("phase_offset", self.phase_offset),
        ] {
            if !v.is_finite() || v.abs() > 1.0 {
                return bad(format!("{name} = {v} outside [-1, 1]"));
            }
        }
        if self.bath_modes == 0 || self.bath_modes > MAX_BATH_MODES {
            return bad(format!(
                "bath_modes = {} outside 1..={MAX_BATH_MODES}",
                self.bath_modes
            ));
        }
        if !(self.bath_half_width >= 0.0 && self.bath_half_width.is_finite()) {
            return bad("bath_half_width must be finite and >= 0".into());
        }
        if self.backend == Backend::Ideal
            && (
                self.eta_local,
                self.eta_transmission,
                self.detuning_phase,
                self.pulse_area_error,
                self.phase_offset,
            ) != (0.0, 0.0, 0.0, 0.0, 0.0)
        {
            return bad("the ideal backend takes no noise parameters".into());
        }
        Ok(())
    }

    fn errors(&self) -> PulseErrors {
        PulseErrors {
            area: self.pulse_area_error,
            phase: self.phase_offset,
            detuning: self.detuning_phase / PI,
        }
    }

    fn has_systematics(&self) -> bool {
        self.errors() != PulseErrors::default()
    }

    fn bath_channel(&self, eta: f64) -> Result<BathChannel> {
        let mut ch = calibrated_bath(eta, self.bath_modes, self.bath_half_width)?;
        ch.errors = self.errors();
        ch.with_p_therm(self.p_therm)
    }

    /// Backend of a copy with loss `eta`.
    pub fn channel_backend(&self, eta: f64) -> Result<ChannelBackend> {
        Ok(match self.backend {
            Backend::Ideal => ChannelBackend::ideal(),
            Backend::Analytic if self.has_systematics() => {
                let sys = BathChannel::systematic(1.0, self.errors())?.derive_analytic(0)?;
                ChannelBackend::Analytic(sys.with_extra_loss(eta)?)
            }
            Backend::Analytic => ChannelBackend::Analytic(AnalyticChannel::amplitude_damping(eta)?),
            Backend::Bath => ChannelBackend::Bath(self.bath_channel(eta)?),
        })
    }

    pub fn local_channel(&self) -> Result<LocalChannel> {
        Ok(LocalChannel::new(self.channel_backend(self.eta_local)?))
    }

    pub fn transmission_channel(&self) -> Result<TransmissionChannel> {
        Ok(TransmissionChannel::new(
            self.channel_backend(self.eta_transmission)?,
        ))
    }

    pub fn epr_config(&self, max_attempts: usize) -> Result<EprConfig> {
        Ok(EprConfig {
            transmission: self.transmission_channel()?,
            local: self.local_channel()?,
            max_attempts,
        })
    }

    /// Gate noise; the analytic model uses `eta_local` and `detuning_phase`.
    pub fn gate_noise(&self) -> Result<GateNoise> {
        Ok(match self.backend {
            Backend::Ideal => GateNoise::Ideal,
            Backend::Analytic => GateNoise::Analytic {
                eta: self.eta_local,
                detuning_phase: self.detuning_phase,
            },
            Backend::Bath => GateNoise::Bath(self.bath_channel(self.eta_local)?),
        })
    }
}
