use super::evolve::propagator;
use super::hamiltonian::{bath_hamiltonian, raman_hamiltonian, BathSpec, RamanCoupling};
use crate::error::{Error, Result};
use crate::hilbert::{LinearOp, StateVector, SubsystemSpec};
use crate::scalar::Real;

/// One laser pulse on one atom.
#[derive(Debug, Clone, PartialEq)]
pub struct Pulse<T> {
    pub atom: String,
    pub duration: T,
    pub coupling: RamanCoupling<T>,
}

impl<T: Real> Pulse<T> {
    /// A complete transfer pulse, duration `pi / g`.
    pub fn pi(atom: impl Into<String>, coupling: RamanCoupling<T>) -> Self {
        Self {
            atom: atom.into(),
            duration: coupling.pi_time(),
            coupling,
        }
    }
}

/// Ordered pulses with an optional idle interval between consecutive pulses.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule<T> {
    pub pulses: Vec<Pulse<T>>,
    /// Free (bath-only) evolution inserted between pulses.
    pub idle: T,
}

impl<T: Real> PulseSchedule<T> {
    pub fn new(pulses: Vec<Pulse<T>>) -> Self {
        Self {
            pulses,
            idle: T::zero(),
        }
    }

    pub fn with_idle(self, idle: T) -> Self {
        Self { idle, ..self }
    }

    /// Two complete transfers, first on `first`, then on `second`.
    pub fn transfer(first: &str, g_first: T, second: &str, g_second: T) -> Self {
        Self::new(vec![
            Pulse::pi(first, RamanCoupling::resonant(g_first)),
            Pulse::pi(second, RamanCoupling::resonant(g_second)),
        ])
    }

    pub fn validate(&self) -> Result<()> {
        if self.idle < T::zero() || !self.idle.is_finite() {
            return Err(Error::InvalidParameter(
                "idle time must be finite and >= 0".into(),
            ));
        }
        for p in &self.pulses {
            if !(p.duration > T::zero() && p.duration.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "pulse on `{}` has non-positive duration",
                    p.atom
                )));
            }
        }
        Ok(())
    }

    pub fn total_duration(&self) -> T {
        let n = self.pulses.len();
        let idle = if n > 1 {
            self.idle * T::lit((n - 1) as f64)
        } else {
            T::zero()
        };
        self.pulses.iter().fold(idle, |acc, p| acc + p.duration)
    }
}

/// Cavity with an optional attached bath, as seen by the pulse runner.
#[derive(Debug, Clone)]
pub struct CavityEnv<'a, T> {
    pub cavity: &'a str,
    pub bath: Option<&'a BathSpec<T>>,
}

impl<'a, T: Real> CavityEnv<'a, T> {
    pub fn bare(cavity: &'a str) -> Self {
        Self { cavity, bath: None }
    }

    pub fn with_bath(cavity: &'a str, bath: &'a BathSpec<T>) -> Self {
        Self {
            cavity,
            bath: Some(bath),
        }
    }

    pub(crate) fn bath_term(&self, spec: &SubsystemSpec) -> Result<Option<LinearOp<T>>> {
        match self.bath {
            Some(b) if !b.modes.is_empty() => Ok(Some(bath_hamiltonian(
                spec,
                self.cavity,
                &b.labels(self.cavity),
                b,
            )?)),
            _ => Ok(None),
        }
    }
}

/// Sequential evolution: during each pulse the active atom's Raman term plus
/// the bath term act together; between pulses only the bath acts.
pub fn run_pulses<T: Real>(
    s: &StateVector<T>,
    schedule: &PulseSchedule<T>,
    env: &CavityEnv<'_, T>,
) -> Result<StateVector<T>> {
    schedule.validate()?;
    let spec = s.spec();
    let bath = env.bath_term(spec)?;
    let mut state = s.clone();
    for (k, pulse) in schedule.pulses.iter().enumerate() {
        if k > 0 && schedule.idle > T::zero() {
            if let Some(hb) = &bath {
                state = propagator(hb, schedule.idle)?.apply(&state)?;
            }
        }
        let mut h = raman_hamiltonian(spec, &pulse.atom, env.cavity, &pulse.coupling)?;
        if let Some(hb) = &bath {
            h = h.add(hb)?;
        }
        state = propagator(&h, pulse.duration)?.apply(&state)?;
    }
    Ok(state)
}

/// Free evolution of the cavity and bath alone.
pub fn free_evolution<T: Real>(
    s: &StateVector<T>,
    env: &CavityEnv<'_, T>,
    dt: T,
) -> Result<StateVector<T>> {
    match env.bath_term(s.spec())? {
        Some(h) if dt != T::zero() => propagator(&h, dt)?.apply(s),
        _ => Ok(s.clone()),
    }
}
