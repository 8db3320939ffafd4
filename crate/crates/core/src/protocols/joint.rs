use crate::channels::{local_channel_apply, LocalChannel};
use crate::error::{Error, Result};
use crate::hilbert::{level, Measurement, StateVector};
use crate::tol;

use super::outcome::{measure, OutcomeSource};

/// Result flag of the red-light measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointFlag {
    /// Red atom found in `|1>`: the pair was in span{|01>, |10>}.
    SubspaceOk,
    LossDetected,
}

#[derive(Debug, Clone)]
pub struct JointMeasureOutcome {
    pub flag: JointFlag,
    pub post_state: StateVector<f64>,
    pub branch_probability: f64,
}

/// Copies `a` and then `b` into the red atom (both with the local channel,
/// in slots `first_slot` and `first_slot + 1`) and measures the red atom.
///
/// The pair must lie in span{|00>, |01>, |10>} and the red atom in `|0>`.
pub fn joint_measure_00(
    s: &StateVector<f64>,
    atoms: (&str, &str),
    red: &str,
    ch: &LocalChannel,
    first_slot: usize,
    src: &mut dyn OutcomeSource,
) -> Result<JointMeasureOutcome> {
    check_domain(s, atoms, red)?;
    joint_measure_unchecked(s, atoms, red, ch, first_slot, src)
}

fn check_domain(s: &StateVector<f64>, (a, b): (&str, &str), red: &str) -> Result<()> {
    let spec = s.spec();
    let (pa, pb, pr) = (spec.position(a)?, spec.position(b)?, spec.position(red)?);
    for (i, amp) in s.amplitudes().iter().enumerate() {
        if amp.norm() <= tol::NEGLIGIBLE {
            continue;
        }
        let (da, db, dr) = (spec.digit(i, pa), spec.digit(i, pb), spec.digit(i, pr));
        if dr != level::ZERO {
            return Err(Error::Precondition(format!(
                "red atom `{red}` must start in |0>"
            )));
        }
        if da == level::R || db == level::R || (da == level::ONE && db == level::ONE) {
            return Err(Error::Precondition(format!(
                "joint measurement of ({a}, {b}) requires no |11> or |r> amplitude (found {:.3e})",
                amp.norm()
            )));
        }
    }
    Ok(())
}

/// Same as [`joint_measure_00`] without the domain check; components
/// outside the domain follow the channel's inert rules.
pub(crate) fn joint_measure_unchecked(
    s: &StateVector<f64>,
    (a, b): (&str, &str),
    red: &str,
    ch: &LocalChannel,
    first_slot: usize,
    src: &mut dyn OutcomeSource,
) -> Result<JointMeasureOutcome> {
    let s = local_channel_apply(s, ch, a, red, first_slot)?;
    let s = local_channel_apply(&s, ch, b, red, first_slot + 1)?;
    let (k, p, post) = measure(&s, &Measurement::computational(red, 3), src)?;
    let flag = if k == level::ONE {
        JointFlag::SubspaceOk
    } else {
        JointFlag::LossDetected
    };
    Ok(JointMeasureOutcome {
        flag,
        post_state: post,
        branch_probability: p,
    })
}
