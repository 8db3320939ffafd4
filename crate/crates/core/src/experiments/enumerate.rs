use serde::Serialize;

use crate::error::{Error, Result};
use crate::protocols::Script;
use crate::tol;

use super::config::{ExperimentConfig, Protocol};
use super::probes::PROBE_COUNT;
use super::run::{PreparedExperiment, RunOutcome};

/// One leaf of the measurement tree with its exact probability.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnumeratedBranch {
    /// Gate probe index for gate protocols.
    pub probe: Option<usize>,
    pub path: Vec<(String, usize)>,
    pub weight: f64,
    pub success: bool,
    pub attempts: usize,
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Enumeration {
    pub branches: Vec<EnumeratedBranch>,
    pub total_weight: f64,
    pub success_probability: f64,
    /// Minimum fidelity over successful branches.
    pub min_success_fidelity: Option<f64>,
    pub mean_attempts: f64,
}

/// Depth-first walk over every admissible measurement outcome of `run`.
/// Returns each leaf's script (path and probabilities) with its result.
pub fn enumerate_paths<T>(
    mut run: impl FnMut(&mut Script) -> Result<T>,
) -> Result<Vec<(Script, T)>> {
    let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
    let mut leaves = Vec::new();
    while let Some(prefix) = stack.pop() {
        let fixed = prefix.len();
        let mut script = Script::new(prefix);
        let out = run(&mut script)?;
        // queue untried alternatives at every free decision point, in
        // reverse so that lower outcomes are visited first
        for step in (fixed..script.taken.len()).rev() {
            let probs = &script.probs[step];
            for k in (script.taken[step] + 1..probs.len()).rev() {
                if probs[k] >= crate::protocols::PROBABILITY_FLOOR {
                    let mut p = script.taken[..step].to_vec();
                    p.push(k);
                    stack.push(p);
                }
            }
        }
        leaves.push((script, out));
        if leaves.len() + stack.len() > tol::BRANCH_CAP {
            return Err(Error::BranchExplosion(tol::BRANCH_CAP));
        }
    }
    Ok(leaves)
}

/// Exact outcome distribution of `cfg`'s protocol. Gate protocols average
/// uniformly over the probe set; stationarity scans have one branch.
pub fn enumerate_branches(cfg: &ExperimentConfig) -> Result<Enumeration> {
    let prepared = PreparedExperiment::new(cfg)?;
    let probes: Vec<Option<usize>> = match cfg.protocol {
        Protocol::GateRaw | Protocol::GatePurified => (0..PROBE_COUNT).map(Some).collect(),
        _ => vec![None],
    };
    let scale = 1.0 / probes.len() as f64;
    let mut branches = Vec::new();
    for probe in probes {
        let leaves = enumerate_paths(|script| prepared.run_one(probe.unwrap_or(0), script))?;
        for (
            script,
            RunOutcome {
                success,
                attempts,
                fidelity,
            },
        ) in leaves
        {
            let path = script
                .labels
                .iter()
                .cloned()
                .zip(script.taken.iter().copied())
                .collect();
            branches.push(EnumeratedBranch {
                probe,
                path,
                weight: script.weight() * scale,
                success,
                attempts,
                fidelity,
            });
        }
    }
    let total_weight: f64 = branches.iter().map(|b| b.weight).sum();
    let success_probability = branches
        .iter()
        .filter(|b| b.success)
        .map(|b| b.weight)
        .sum();
    let min_success_fidelity = branches
        .iter()
        .filter(|b| b.success)
        .map(|b| b.fidelity)
        .reduce(f64::min);
    let mean_attempts = branches.iter().map(|b| b.weight * b.attempts as f64).sum();
    Ok(Enumeration {
        branches,
        total_weight,
        success_probability,
        min_success_fidelity,
        mean_attempts,
    })
}
