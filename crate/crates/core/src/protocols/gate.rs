use std::f64::consts::PI;

use crate::channels::{compress_environment, BathChannel};
use crate::dynamics::{
    run_pulses, single_atom_op, CavityEnv, Pulse, PulseSchedule, RamanCoupling, SingleAtomOp,
};
use crate::error::{Error, Result};
use crate::hilbert::{level, Measurement, StateVector, Subsystem, SubsystemKind, SubsystemSpec};
use crate::tol;
use crate::C64;

use super::outcome::{measure, OutcomeSource};

/// Cavity label shared by the two gate atoms.
pub const GATE_CAVITY: &str = "cav";

/// Noise acting during the conditional pulses of the gate.
#[derive(Debug, Clone, PartialEq)]
pub enum GateNoise {
    Ideal,
    /// After each of the first three pulses the cavity photon is lost with
    /// probability `eta`; after every pulse the pulsed atom's `|r>` picks up
    /// the systematic phase `exp(-i detuning_phase)`.
    Analytic {
        eta: f64,
        detuning_phase: f64,
    },
    /// Pulses run with the bath concurrently; each application couples to
    /// its own environment.
    Bath(BathChannel),
}

impl GateNoise {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Analytic {
                eta,
                detuning_phase,
            } => {
                if !(0.0..=1.0).contains(eta) || !detuning_phase.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "gate loss {eta} outside [0, 1]"
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn pulse(&self, atom: &str, flip: bool) -> Pulse<f64> {
        let (coupling, area) = match self {
            Self::Bath(ch) => (ch.coupling(), ch.errors.area),
            _ => (RamanCoupling::resonant(1.0), 0.0),
        };
        let coupling = if flip {
            coupling.with_phase(coupling.phase + PI)
        } else {
            coupling
        };
        let mut p = Pulse::pi(atom, coupling);
        p.duration *= 1.0 + area;
        p
    }
}

/// Outcome of the four-application purified gate.
#[derive(Debug, Clone)]
pub struct GateRunRecord {
    /// `|r>` population found on the first atom at some checkpoint.
    pub error_detected: bool,
    /// Checkpoint outcomes, one per completed application (`true` = `|r>`).
    pub checkpoints: Vec<bool>,
    pub post_state: StateVector<f64>,
}

/// Pulse order of the conditional step: first atom, second atom, second
/// atom, first atom. `flip` adds a laser phase of pi to the third pulse.
fn pulse_sequence(noise: &GateNoise, (a1, a2): (&str, &str), flip: bool) -> Vec<Pulse<f64>> {
    vec![
        noise.pulse(a1, false),
        noise.pulse(a2, false),
        noise.pulse(a2, flip),
        noise.pulse(a1, false),
    ]
}

/// Prepares the cavity for an application: an existing cavity label must
/// be empty and is dropped; a fresh one (with bath) is attached.
fn attach_cavity(
    s: &StateVector<f64>,
    noise: &GateNoise,
    index: usize,
) -> Result<StateVector<f64>> {
    let mut s = s.clone();
    if s.spec().contains(GATE_CAVITY) {
        let occupied = s.weight_of(GATE_CAVITY, 1)?;
        if occupied > tol::NEGLIGIBLE {
            return Err(Error::Precondition(format!(
                "cavity not in vacuum (weight {occupied:.3e} in |1>)"
            )));
        }
        s = s.drop_label(GATE_CAVITY, 0)?;
    }
    let env = match noise {
        GateNoise::Bath(ch) => {
            let period = ch.schedule().total_duration() * 2.0 + 2.0 * ch.idle;
            ch.environment_at(index as f64 * period)?
        }
        _ => {
            let spec = SubsystemSpec::builder().cavity(GATE_CAVITY).build()?;
            StateVector::basis(spec, &[(GATE_CAVITY, 0)])?
        }
    };
    s.tensor(&env)
}

/// Moves a cavity photon into a fresh two-level loss register with
/// probability `eta`.
fn damp_cavity(s: &StateVector<f64>, eta: f64, register: &str) -> Result<StateVector<f64>> {
    let spec = s.spec();
    let pc = spec.position(GATE_CAVITY)?;
    let out_spec = spec.push(Subsystem {
        label: register.into(),
        dim: 2,
        kind: SubsystemKind::Register,
    })?;
    let mut amps = vec![C64::new(0.0, 0.0); out_spec.dim()];
    let (keep, lose) = ((1.0 - eta).sqrt(), eta.sqrt());
    let stride = spec.strides()[pc];
    for (i, a) in s.amplitudes().iter().enumerate() {
        if spec.digit(i, pc) == 1 {
            amps[2 * i] += a * keep;
            amps[2 * (i - stride) + 1] += a * lose;
        } else {
            amps[2 * i] += a;
        }
    }
    StateVector::from_amplitudes(out_spec, amps)
}

/// One application of the conditional gate (swap, four pulses, swap) as the
/// `index`-th use of the cavity; the environment is compressed afterwards.
pub fn gate_application(
    s: &StateVector<f64>,
    atoms: (&str, &str),
    noise: &GateNoise,
    index: usize,
    flip: bool,
) -> Result<StateVector<f64>> {
    noise.validate()?;
    let (a1, a2) = atoms;
    let mut s = attach_cavity(s, noise, index)?;
    // later applications may inherit stray |r> weight from a noisy bath
    let checked: &[&str] = if index == 0 { &[a1, a2] } else { &[] };
    for &p in checked {
        if s.weight_of(p, level::R)? > tol::NEGLIGIBLE {
            return Err(Error::Precondition(format!(
                "atom `{p}` has |r> population before the gate"
            )));
        }
    }
    s = single_atom_op(&s, a2, SingleAtomOp::Swap1r)?;
    let pulses = pulse_sequence(noise, atoms, flip);
    match noise {
        GateNoise::Bath(ch) => {
            let sched = PulseSchedule::new(pulses).with_idle(ch.idle);
            s = run_pulses(&s, &sched, &CavityEnv::with_bath(GATE_CAVITY, &ch.bath))?;
        }
        GateNoise::Ideal => {
            s = run_pulses(
                &s,
                &PulseSchedule::new(pulses),
                &CavityEnv::bare(GATE_CAVITY),
            )?;
        }
        GateNoise::Analytic {
            eta,
            detuning_phase,
        } => {
            for (j, p) in pulses.into_iter().enumerate() {
                let atom = p.atom.clone();
                s = run_pulses(
                    &s,
                    &PulseSchedule::new(vec![p]),
                    &CavityEnv::bare(GATE_CAVITY),
                )?;
                if *detuning_phase != 0.0 {
                    s = single_atom_op(&s, &atom, SingleAtomOp::PhaseR(*detuning_phase))?;
                }
                if j < 3 && *eta > 0.0 {
                    s = damp_cavity(&s, *eta, &format!("env.loss{j}"))?;
                }
            }
        }
    }
    s = single_atom_op(&s, a2, SingleAtomOp::Swap1r)?;
    compress_environment(&s)
}

/// A single noisy application: ideally `|10> -> -|10>` and identity on
/// the other computational states.
pub fn universal_gate_raw(
    s: &StateVector<f64>,
    atoms: (&str, &str),
    noise: &GateNoise,
) -> Result<StateVector<f64>> {
    gate_application(s, atoms, noise, 0, false)
}

fn checkpoint(a1: &str) -> Measurement<f64> {
    let e = |k: usize| {
        (0..3)
            .map(|j| C64::new(if j == k { 1.0 } else { 0.0 }, 0.0))
            .collect::<Vec<_>>()
    };
    Measurement::new(
        a1,
        vec![vec![e(level::R)], vec![e(level::ZERO), e(level::ONE)]],
    )
}

/// Frame change after application `k`: NOT on the first, second, first and
/// second atom.
fn frame_atom<'a>((a1, a2): (&'a str, &'a str), k: usize) -> &'a str {
    if k.is_multiple_of(2) {
        a1
    } else {
        a2
    }
}

/// Four applications with interleaved NOTs; the last one has the laser
/// phase of its third pulse flipped, so it acts as the identity. The
/// result equals the single gate up to a global sign, which is left
/// uncorrected. Atom 1 is checked for `|r>` after every application.
pub fn purified_gate(
    s: &StateVector<f64>,
    atoms: (&str, &str),
    noise: &GateNoise,
    src: &mut dyn OutcomeSource,
) -> Result<GateRunRecord> {
    let mut state = s.clone();
    let mut checkpoints = Vec::with_capacity(4);
    for k in 0..4 {
        state = gate_application(&state, atoms, noise, k, k == 3)?;
        let (outcome, _, post) = measure(&state, &checkpoint(atoms.0), src)?;
        let found_r = outcome == 0;
        checkpoints.push(found_r);
        if found_r {
            return Ok(GateRunRecord {
                error_detected: true,
                checkpoints,
                post_state: post,
            });
        }
        state = single_atom_op(&post, frame_atom(atoms, k), SingleAtomOp::Not01)?;
    }
    Ok(GateRunRecord {
        error_detected: false,
        checkpoints,
        post_state: state,
    })
}

/// Unnormalized no-error branch of [`purified_gate`]: every checkpoint is
/// replaced by the projector onto `{|0>, |1>}` of atom 1, so the squared
/// norm is the success probability.
pub fn purified_gate_projected(
    s: &StateVector<f64>,
    atoms: (&str, &str),
    noise: &GateNoise,
) -> Result<StateVector<f64>> {
    let mut state = s.clone();
    for k in 0..4 {
        state = gate_application(&state, atoms, noise, k, k == 3)?;
        let p1 = state.spec().position(atoms.0)?;
        state = state.filtered(|d| d[p1] != level::R);
        state = single_atom_op(&state, frame_atom(atoms, k), SingleAtomOp::Not01)?;
    }
    Ok(state)
}
