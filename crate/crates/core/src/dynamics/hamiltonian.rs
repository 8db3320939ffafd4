use num_complex::Complex;

use crate::error::{Error, Result};
use crate::hilbert::{level, LinearOp, SubsystemKind, SubsystemSpec};
use crate::scalar::{phase, Real};

/// Effective Raman coupling between |1> and |r> of one atom via the cavity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamanCoupling<T> {
    /// Effective coupling `g` (rad / time).
    pub g: T,
    /// Laser phase (rad).
    pub phase: T,
    /// Systematic detuning on |r> (rad / time); zero when ideal.
    pub detuning: T,
}

impl<T: Real> RamanCoupling<T> {
    pub fn resonant(g: T) -> Self {
        Self {
            g,
            phase: T::zero(),
            detuning: T::zero(),
        }
    }

    pub fn with_phase(self, phase: T) -> Self {
        Self { phase, ..self }
    }

    pub fn with_detuning(self, detuning: T) -> Self {
        Self { detuning, ..self }
    }

    /// Duration of a complete transfer, `pi / g`.
    pub fn pi_time(&self) -> T {
        T::lit(std::f64::consts::PI) / self.g
    }
}

/// One discretized bath oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathMode<T> {
    /// Mode frequency `omega_k`.
    pub frequency: T,
    /// Cavity coupling `g_k`.
    pub coupling: T,
}

/// Discretized reservoir coupled linearly to one cavity mode.
#[derive(Debug, Clone, PartialEq)]
pub struct BathSpec<T> {
    pub modes: Vec<BathMode<T>>,
    /// Cavity frequency `omega`; Hamiltonians are written in the frame
    /// rotating at this frequency, so only `omega_k - omega` enters.
    pub cavity_frequency: T,
    /// Initial excitation probability of each mode (0 = vacuum).
    pub p_therm: T,
}

/// Desk-scale limit on the number of bath modes.
pub const MAX_BATH_MODES: usize = 6;

impl<T: Real> BathSpec<T> {
    pub fn vacuum(modes: Vec<BathMode<T>>, cavity_frequency: T) -> Self {
        Self {
            modes,
            cavity_frequency,
            p_therm: T::zero(),
        }
    }

    pub fn none() -> Self {
        Self {
            modes: Vec::new(),
            cavity_frequency: T::zero(),
            p_therm: T::zero(),
        }
    }

    /// `K` modes equally spaced over `[omega - half_width, omega + half_width]`
    /// with a common coupling.
    pub fn flat(count: usize, cavity_frequency: T, half_width: T, coupling: T) -> Self {
        let modes = (0..count)
            .map(|k| {
                let offset = if count == 1 {
                    T::zero()
                } else {
                    -half_width
                        + T::lit(2.0) * half_width * T::lit(k as f64) / T::lit((count - 1) as f64)
                };
                BathMode {
                    frequency: cavity_frequency + offset,
                    coupling,
                }
            })
            .collect();
        Self::vacuum(modes, cavity_frequency)
    }

    pub fn with_p_therm(self, p_therm: T) -> Self {
        Self { p_therm, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.modes.len() > MAX_BATH_MODES {
            return Err(Error::InvalidParameter(format!(
                "{} bath modes exceeds the limit of {MAX_BATH_MODES}",
                self.modes.len()
            )));
        }
        if !(self.p_therm >= T::zero() && self.p_therm < T::one()) {
            return Err(Error::InvalidParameter(format!(
                "p_therm {} outside [0, 1)",
                self.p_therm
            )));
        }
        Ok(())
    }

    /// Detunings `omega_k - omega` stored relative to the cavity frame.
    pub fn detunings(&self) -> Vec<T> {
        self.modes
            .iter()
            .map(|m| m.frequency - self.cavity_frequency)
            .collect()
    }

    /// Labels of the mode subsystems attached to `cavity`.
    pub fn labels(&self, cavity: &str) -> Vec<String> {
        (0..self.modes.len())
            .map(|k| format!("{cavity}.b{k}"))
            .collect()
    }

    /// Initial single-mode state `sqrt(1-p)|0> + sqrt(p)|1>` for every mode.
    pub fn mode_initial_state(&self) -> Vec<Complex<T>> {
        vec![
            Complex::new((T::one() - self.p_therm).sqrt(), T::zero()),
            Complex::new(self.p_therm.sqrt(), T::zero()),
        ]
    }
}

fn require_kind(spec: &SubsystemSpec, label: &str, kind: SubsystemKind) -> Result<()> {
    let e = spec.entry(label)?;
    if e.kind != kind {
        return Err(Error::SpecMismatch(format!(
            "`{label}` is {:?}, expected {kind:?}",
            e.kind
        )));
    }
    Ok(())
}

/// `(g/2)(e^{i phi} |1><r| a + h.c.) + delta |r><r|` on `(atom, cavity)`,
/// photon number truncated at one.
pub fn raman_hamiltonian<T: Real>(
    spec: &SubsystemSpec,
    atom: &str,
    cavity: &str,
    coupling: &RamanCoupling<T>,
) -> Result<LinearOp<T>> {
    require_kind(spec, atom, SubsystemKind::Atom)?;
    require_kind(spec, cavity, SubsystemKind::Cavity)?;
    // support index = atom * 2 + photons
    let idx = |lvl: usize, n: usize| lvl * 2 + n;
    let half = coupling.g * T::lit(0.5);
    let forward = phase(coupling.phase) * half;
    let mut triples = vec![
        (idx(level::ONE, 0), idx(level::R, 1), forward),
        (idx(level::R, 1), idx(level::ONE, 0), forward.conj()),
    ];
    if coupling.detuning != T::zero() {
        let d = Complex::new(coupling.detuning, T::zero());
        triples.push((idx(level::R, 0), idx(level::R, 0), d));
        triples.push((idx(level::R, 1), idx(level::R, 1), d));
    }
    LinearOp::from_triples(spec, &[atom, cavity], triples)
}

/// `sum_k (omega_k - omega) b_k† b_k + sum_k g_k (a† b_k + b_k† a)` on the
/// cavity and its bath modes, each truncated to occupation 0/1.
pub fn bath_hamiltonian<T: Real>(
    spec: &SubsystemSpec,
    cavity: &str,
    bath_labels: &[String],
    bath: &BathSpec<T>,
) -> Result<LinearOp<T>> {
    bath.validate()?;
    require_kind(spec, cavity, SubsystemKind::Cavity)?;
    if bath_labels.len() != bath.modes.len() {
        return Err(Error::SpecMismatch(format!(
            "{} bath labels for {} modes",
            bath_labels.len(),
            bath.modes.len()
        )));
    }
    for l in bath_labels {
        require_kind(spec, l, SubsystemKind::BathMode)?;
    }
    let mut support: Vec<&str> = vec![cavity];
    support.extend(bath_labels.iter().map(String::as_str));
    let sub = spec.subset(&support)?;
    let detunings = bath.detunings();
    let mut triples = Vec::new();
    for i in 0..sub.dim() {
        let d = sub.digits(i);
        let mut diag = T::zero();
        for (k, &dk) in detunings.iter().enumerate() {
            if d[k + 1] == 1 {
                diag += dk;
            }
        }
        if diag != T::zero() {
            triples.push((i, i, Complex::new(diag, T::zero())));
        }
        // a† b_k: |0_cav, 1_k> -> |1_cav, 0_k>
        if d[0] == 0 {
            for (k, m) in bath.modes.iter().enumerate() {
                if d[k + 1] == 1 && m.coupling != T::zero() {
                    let mut e = d.clone();
                    e[0] = 1;
                    e[k + 1] = 0;
                    let j = sub.compose(&e);
                    let g = Complex::new(m.coupling, T::zero());
                    triples.push((j, i, g));
                    triples.push((i, j, g));
                }
            }
        }
    }
    LinearOp::from_triples(spec, &support, triples)
}

/// Conserved excitation number of a basis configuration: photons + bath
/// excitations + atoms in |1>.
pub fn excitation_number(spec: &SubsystemSpec, index: usize) -> usize {
    spec.entries()
        .iter()
        .enumerate()
        .map(|(p, e)| {
            let d = spec.digit(index, p);
            match e.kind {
                SubsystemKind::Atom => usize::from(d == level::ONE),
                SubsystemKind::Cavity | SubsystemKind::BathMode => d,
                SubsystemKind::Register => 0,
            }
        })
        .sum()
}
