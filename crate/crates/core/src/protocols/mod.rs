//! Composite procedures: the red-light joint measurement, EPR-pair
//! establishment with repeat-until-success, and the raw and purified
//! two-bit gate.
//!
//! Measurements draw their outcomes from an [`OutcomeSource`], so the same
//! code serves Monte Carlo sampling and exhaustive branch enumeration.

mod epr;
mod gate;
mod joint;
mod outcome;

pub use epr::{bell_target, epr_attempt, establish_epr, EprConfig, EprResult, Sign, EPR_ATOMS};
pub use gate::{
    gate_application, purified_gate, purified_gate_projected, universal_gate_raw, GateNoise,
    GateRunRecord, GATE_CAVITY,
};
pub use joint::{joint_measure_00, JointFlag, JointMeasureOutcome};
pub use outcome::{measure, OutcomeSource, Sampler, Script, PROBABILITY_FLOOR};
