use std::f64::consts::FRAC_1_SQRT_2;

use crate::channels::{transmission_apply, LocalChannel, TransmissionChannel};
use crate::dynamics::{single_atom_op, SingleAtomOp};
use crate::error::{Error, Result};
use crate::hilbert::{reduced_fidelity, Measurement, StateVector, SubsystemSpec};
use crate::C64;

use super::joint::{joint_measure_unchecked, JointFlag};
use super::outcome::{measure, OutcomeSource};

/// Atom labels: the pair `1` (cavity 1) and `2` (cavity 2), the ancilla `a`
/// and the red atom `R` (both in cavity 2).
pub const EPR_ATOMS: [&str; 4] = ["1", "2", "a", "R"];

#[derive(Debug, Clone, PartialEq)]
pub struct EprConfig {
    pub transmission: TransmissionChannel,
    pub local: LocalChannel,
    pub max_attempts: usize,
}

impl EprConfig {
    pub fn ideal(max_attempts: usize) -> Self {
        Self {
            transmission: TransmissionChannel::ideal(),
            local: LocalChannel::ideal(),
            max_attempts,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone)]
pub struct EprResult {
    pub success: bool,
    pub attempts: usize,
    /// Post-measurement state of all atoms and the environment register;
    /// `None` when every attempt failed.
    pub final_state: Option<StateVector<f64>>,
    pub sign_outcome: Option<Sign>,
    /// Fidelity of the reduced state of atoms 1 and 2 with
    /// `(|00> + |11>)/sqrt(2)`; zero on failure.
    pub fidelity_to_bell: f64,
}

/// `(|00> + |11>)/sqrt(2)` on atoms 1 and 2.
pub fn bell_target() -> Result<StateVector<f64>> {
    let spec = SubsystemSpec::builder().atom("1").atom("2").build()?;
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let a = StateVector::basis(spec.clone(), &[("1", 0), ("2", 0)])?;
    let b = StateVector::basis(spec, &[("1", 1), ("2", 1)])?;
    a.add(&b).map(|s| s.scaled(h))
}

/// Repeats [`epr_attempt`] until one succeeds or `max_attempts` is reached.
/// Every attempt starts from fresh atoms and environments.
pub fn establish_epr(cfg: &EprConfig, src: &mut dyn OutcomeSource) -> Result<EprResult> {
    if cfg.max_attempts == 0 {
        return Err(Error::InvalidParameter(
            "max_attempts must be at least 1".into(),
        ));
    }
    for attempt in 1..=cfg.max_attempts {
        if let Some((state, sign)) = epr_attempt(cfg, src)? {
            let fidelity = reduced_fidelity(&state, &bell_target()?)?;
            return Ok(EprResult {
                success: true,
                attempts: attempt,
                final_state: Some(state),
                sign_outcome: Some(sign),
                fidelity_to_bell: fidelity,
            });
        }
    }
    Ok(EprResult {
        success: false,
        attempts: cfg.max_attempts,
        final_state: None,
        sign_outcome: None,
        fidelity_to_bell: 0.0,
    })
}

/// One attempt; `None` when a loss was detected.
pub fn epr_attempt(
    cfg: &EprConfig,
    src: &mut dyn OutcomeSource,
) -> Result<Option<(StateVector<f64>, Sign)>> {
    let mut b = SubsystemSpec::builder();
    for l in EPR_ATOMS {
        b = b.atom(l);
    }
    let mut s = StateVector::basis(b.build()?, &EPR_ATOMS.map(|l| (l, 0)))?;
    s = single_atom_op(&s, "1", SingleAtomOp::Hadamard01)?;
    s = transmission_apply(&s, &cfg.transmission, "1", "2", 0)?;
    s = single_atom_op(&s, "1", SingleAtomOp::Not01)?;
    s = transmission_apply(&s, &cfg.transmission, "1", "a", 1)?;
    s = single_atom_op(&s, "1", SingleAtomOp::Not01)?;

    let joint = joint_measure_unchecked(&s, ("2", "a"), "R", &cfg.local, 0, src)?;
    if joint.flag == JointFlag::LossDetected {
        return Ok(None);
    }
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let z = C64::new(0.0, 0.0);
    let basis = vec![
        vec![h, h, z],
        vec![h, -h, z],
        vec![z, z, C64::new(1.0, 0.0)],
    ];
    let (k, _, post) = measure(&joint.post_state, &Measurement::in_basis("a", basis), src)?;
    match k {
        0 => Ok(Some((post, Sign::Plus))),
        1 => Ok(Some((
            single_atom_op(&post, "1", SingleAtomOp::PhaseZ)?,
            Sign::Minus,
        ))),
        _ => Ok(None),
    }
}
