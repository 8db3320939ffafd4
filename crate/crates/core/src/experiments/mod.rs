//! Seeded Monte Carlo trials, exact branch enumeration, gate process
//! fidelity and parameter sweeps.

mod config;
mod enumerate;
mod probes;
mod run;

pub use config::{
    Backend, ExperimentConfig, JointInput, NoiseConfig, Protocol, SweepAxis, SWEEP_PARAMETERS,
};
pub use enumerate::{enumerate_branches, enumerate_paths, EnumeratedBranch, Enumeration};
pub use probes::{
    env_product_spread, estimate_process_fidelity, ideal_gate_output, probe_state,
    purified_env_products, GateRunner, PROBE_COUNT,
};
pub use run::{
    run_trials, stationarity_scan, trial_rng, PreparedExperiment, RunOutcome, StationarityPoint,
    SummaryStats, TrialResult, STATIONARITY_GRID,
};
