use rand::Rng;

use crate::error::{Error, Result};
use crate::hilbert::{Measurement, StateVector};

/// Outcomes with probability below this are never selected.
pub const PROBABILITY_FLOOR: f64 = 1e-14;

/// Decides measurement outcomes: sampled for Monte Carlo runs, scripted for
/// branch enumeration.
pub trait OutcomeSource {
    /// Picks an outcome of measurement `label` given outcome probabilities
    /// that sum to one.
    fn choose(&mut self, label: &str, probs: &[f64]) -> usize;
}

/// Born-rule sampling from an rng; keeps a log of `(label, outcome)`.
pub struct Sampler<R> {
    rng: R,
    pub log: Vec<(String, usize)>,
}

impl<R: Rng> Sampler<R> {
    pub fn new(rng: R) -> Self {
        Self {
            rng,
            log: Vec::new(),
        }
    }
}

impl<R: Rng> OutcomeSource for Sampler<R> {
    fn choose(&mut self, label: &str, probs: &[f64]) -> usize {
        let u: f64 = self.rng.gen();
        let mut acc = 0.0;
        let mut pick = None;
        for (k, &p) in probs.iter().enumerate() {
            if p < PROBABILITY_FLOOR {
                continue;
            }
            acc += p;
            pick = Some(k);
            if u < acc {
                break;
            }
        }
        let k = pick.expect("at least one outcome above the floor");
        self.log.push((label.to_string(), k));
        k
    }
}

/// Replays a fixed prefix of choices, then takes the first admissible
/// outcome; records every decision point for the enumerator.
#[derive(Debug, Clone, Default)]
pub struct Script {
    prefix: Vec<usize>,
    pub taken: Vec<usize>,
    pub probs: Vec<Vec<f64>>,
    pub labels: Vec<String>,
}

impl Script {
    pub fn new(prefix: Vec<usize>) -> Self {
        Self {
            prefix,
            ..Default::default()
        }
    }

    /// Probability of the path taken.
    pub fn weight(&self) -> f64 {
        self.taken
            .iter()
            .zip(&self.probs)
            .map(|(&k, p)| p[k])
            .product()
    }
}

impl OutcomeSource for Script {
    fn choose(&mut self, label: &str, probs: &[f64]) -> usize {
        let step = self.taken.len();
        let k = match self.prefix.get(step) {
            Some(&k) => k,
            None => probs
                .iter()
                .position(|&p| p >= PROBABILITY_FLOOR)
                .expect("at least one admissible outcome"),
        };
        self.taken.push(k);
        self.probs.push(probs.to_vec());
        self.labels.push(label.to_string());
        k
    }
}

/// Measures `m` on `s`; returns the outcome, its probability and the
/// normalized post-measurement state.
pub fn measure(
    s: &StateVector<f64>,
    m: &Measurement<f64>,
    src: &mut dyn OutcomeSource,
) -> Result<(usize, f64, StateVector<f64>)> {
    let branches = m.project_branches(s)?;
    let total: f64 = branches.iter().map(|b| b.weight).sum();
    if total <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    let probs: Vec<f64> = branches.iter().map(|b| b.weight / total).collect();
    let k = src.choose(m.label(), &probs);
    let b = &branches[k];
    Ok((k, probs[k], b.state.normalized()?))
}
