use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{check_stationarity, LocalChannel};
use crate::error::{Error, Result};
use crate::hilbert::{reduced_fidelity, StateVector, SubsystemSpec};
use crate::protocols::{
    establish_epr, joint_measure_00, purified_gate, universal_gate_raw, EprConfig, GateNoise,
    JointFlag, OutcomeSource, Sampler,
};
use crate::C64;

use super::config::{Backend, ExperimentConfig, Protocol};
use super::probes::{ideal_gate_output, probe_state, PROBE_COUNT};

/// Default `p_therm` grid of a stationarity scan on the bath backend.
pub const STATIONARITY_GRID: [f64; 4] = [0.0, 0.02, 0.05, 0.1];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub trial: usize,
    pub success: bool,
    pub attempts: usize,
    /// Conditional fidelity with the protocol's target; 0 on failure. For
    /// stationarity scans, `1 - deviation`.
    pub fidelity: f64,
    /// `(measurement label, outcome)` in the order taken.
    pub outcomes: Vec<(String, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationarityPoint {
    pub p_therm: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryStats {
    pub trials: usize,
    pub successes: usize,
    pub success_probability: f64,
    /// `sqrt(p (1 - p) / N)`.
    pub standard_error: f64,
    /// Over successful trials only.
    pub mean_fidelity: Option<f64>,
    pub min_fidelity: Option<f64>,
    pub mean_attempts: f64,
    /// `(attempts, count)` pairs in increasing order of attempts.
    pub attempts_histogram: Vec<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stationarity: Option<Vec<StationarityPoint>>,
}

impl SummaryStats {
    /// Reduces trial results in the given (canonical) order.
    pub fn from_trials(trials: &[TrialResult]) -> Self {
        let n = trials.len();
        let successes = trials.iter().filter(|t| t.success).count();
        let p = if n > 0 {
            successes as f64 / n as f64
        } else {
            0.0
        };
        let fids: Vec<f64> = trials
            .iter()
            .filter(|t| t.success)
            .map(|t| t.fidelity)
            .collect();
        let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
        for t in trials {
            *hist.entry(t.attempts).or_default() += 1;
        }
        Self {
            trials: n,
            successes,
            success_probability: p,
            standard_error: if n > 0 {
                (p * (1.0 - p) / n as f64).sqrt()
            } else {
                0.0
            },
            mean_fidelity: (!fids.is_empty()).then(|| fids.iter().sum::<f64>() / fids.len() as f64),
            min_fidelity: fids.iter().copied().reduce(f64::min),
            mean_attempts: if n > 0 {
                trials.iter().map(|t| t.attempts as f64).sum::<f64>() / n as f64
            } else {
                0.0
            },
            attempts_histogram: hist.into_iter().collect(),
            stationarity: None,
        }
    }
}

/// Outcome of one protocol run, before logging.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOutcome {
    pub success: bool,
    pub attempts: usize,
    pub fidelity: f64,
}

/// A configuration with its channels and gate noise built once.
#[derive(Debug, Clone)]
pub struct PreparedExperiment {
    pub cfg: ExperimentConfig,
    local: LocalChannel,
    epr: EprConfig,
    gate: GateNoise,
}

impl PreparedExperiment {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let n = &cfg.noise;
        Ok(Self {
            cfg: cfg.clone(),
            local: n.local_channel()?,
            epr: n.epr_config(cfg.max_attempts)?,
            gate: n.gate_noise()?,
        })
    }

    /// Runs trial `trial` (gate probes cycle with the trial index).
    pub fn run_one(&self, trial: usize, src: &mut dyn OutcomeSource) -> Result<RunOutcome> {
        match self.cfg.protocol {
            Protocol::JointMeasure => self.run_joint(src),
            Protocol::Epr => {
                let r = establish_epr(&self.epr, src)?;
                Ok(RunOutcome {
                    success: r.success,
                    attempts: r.attempts,
                    fidelity: r.fidelity_to_bell,
                })
            }
            Protocol::GateRaw => {
                let k = trial % PROBE_COUNT;
                let out = universal_gate_raw(&probe_state(k), ("1", "2"), &self.gate)?;
                let f = reduced_fidelity(&out, &ideal_gate_output(k))?;
                Ok(RunOutcome {
                    success: true,
                    attempts: 1,
                    fidelity: f,
                })
            }
            Protocol::GatePurified => {
                let k = trial % PROBE_COUNT;
                let rec = purified_gate(&probe_state(k), ("1", "2"), &self.gate, src)?;
                let f = if rec.error_detected {
                    0.0
                } else {
                    reduced_fidelity(&rec.post_state, &ideal_gate_output(k))?
                };
                Ok(RunOutcome {
                    success: !rec.error_detected,
                    attempts: 1,
                    fidelity: f,
                })
            }
            Protocol::StationarityScan => {
                let d = check_stationarity(&self.local.backend, (trial, trial + 1))?;
                Ok(RunOutcome {
                    success: d <= crate::tol::EXACT,
                    attempts: 1,
                    fidelity: (1.0 - d).clamp(0.0, 1.0),
                })
            }
        }
    }

    fn run_joint(&self, src: &mut dyn OutcomeSource) -> Result<RunOutcome> {
        let inp = self.cfg.input.unwrap_or_default();
        let spec = SubsystemSpec::builder()
            .atom("1")
            .atom("2")
            .atom("R")
            .build()?;
        let mut s = StateVector::zero(spec.clone());
        for (a, b, v) in [(0, 0, inp.gamma), (0, 1, inp.alpha), (1, 0, inp.beta)] {
            s.amplitudes_mut()[spec.compose(&[a, b, 0])] = C64::new(v, 0.0);
        }
        let s = s.normalized()?;
        let out = joint_measure_00(&s, ("1", "2"), "R", &self.local, 0, src)?;
        if out.flag != JointFlag::SubspaceOk {
            return Ok(RunOutcome {
                success: false,
                attempts: 1,
                fidelity: 0.0,
            });
        }
        let pair = SubsystemSpec::builder().atom("1").atom("2").build()?;
        let mut target = StateVector::zero(pair.clone());
        target.amplitudes_mut()[pair.compose(&[0, 1])] = C64::new(inp.alpha, 0.0);
        target.amplitudes_mut()[pair.compose(&[1, 0])] = C64::new(inp.beta, 0.0);
        let f = reduced_fidelity(&out.post_state, &target)?;
        Ok(RunOutcome {
            success: true,
            attempts: 1,
            fidelity: f,
        })
    }
}

/// Independent rng stream of one trial.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Runs `cfg.trials` seeded trials on `jobs` threads (all cores when
/// `None`). Results do not depend on the thread count.
pub fn run_trials(
    cfg: &ExperimentConfig,
    jobs: Option<usize>,
) -> Result<(SummaryStats, Vec<TrialResult>)> {
    let prepared = PreparedExperiment::new(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let trials: Vec<TrialResult> = pool.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let mut src = Sampler::new(trial_rng(cfg.seed, t));
                let r = prepared.run_one(t, &mut src)?;
                Ok(TrialResult {
                    trial: t,
                    success: r.success,
                    attempts: r.attempts,
                    fidelity: r.fidelity,
                    outcomes: src.log,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut stats = SummaryStats::from_trials(&trials);
    if cfg.protocol == Protocol::StationarityScan {
        stats.stationarity = Some(stationarity_scan(cfg)?);
    }
    Ok((stats, trials))
}

/// Stationarity deviation of the local channel (slots 0 and 1) over the
/// `p_therm` grid: the sweep grid if the config sweeps `p_therm`, else
/// [`STATIONARITY_GRID`] on the bath backend and the configured value
/// otherwise.
pub fn stationarity_scan(cfg: &ExperimentConfig) -> Result<Vec<StationarityPoint>> {
    let grid: Vec<f64> = match &cfg.sweep {
        Some(axis) if axis.parameter == "p_therm" => axis.values.clone(),
        _ if cfg.noise.backend == Backend::Bath => STATIONARITY_GRID.to_vec(),
        _ => vec![cfg.noise.p_therm],
    };
    grid.into_iter()
        .map(|p| {
            let c = cfg.with_parameter("p_therm", p)?;
            c.noise.validate()?;
            let deviation = check_stationarity(&c.noise.local_channel()?.backend, (0, 1))?;
            Ok(StationarityPoint {
                p_therm: p,
                deviation,
            })
        })
        .collect()
}
