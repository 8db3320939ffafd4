use std::collections::BTreeMap;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::hilbert::{fold_environment, level, StateVector, Subsystem, SubsystemKind};
use crate::tol;
use crate::C64;

/// Label of the accumulated environment register in protocol states.
pub const ENV_REGISTER: &str = "env";

/// Atomic configuration `(source level, target level)`.
pub type Config = (usize, usize);

/// Action of one noisy primitive on the atoms it touches.
///
/// Each input configuration maps to output configurations tagged with an
/// environment vector. Vectors are coordinates in an orthonormal basis of
/// the environment after the primitive, shared by all rules of one map.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchMap {
    pub env_dim: usize,
    pub rules: BTreeMap<Config, Vec<(Config, Vec<C64>)>>,
}

impl BranchMap {
    pub fn new(env_dim: usize) -> Self {
        Self {
            env_dim,
            rules: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, input: Config, output: Config, env: Vec<C64>) {
        debug_assert_eq!(env.len(), self.env_dim);
        self.rules.entry(input).or_default().push((output, env));
    }

    /// Environment vector of the `input -> output` rule, zero if absent.
    pub fn env(&self, input: Config, output: Config) -> Vec<C64> {
        self.rules
            .get(&input)
            .and_then(|outs| outs.iter().find(|(o, _)| *o == output))
            .map(|(_, v)| v.clone())
            .unwrap_or_else(|| vec![C64::new(0.0, 0.0); self.env_dim])
    }

    /// Branch weight `|env|^2` for one rule.
    pub fn weight(&self, input: Config, output: Config) -> f64 {
        self.env(input, output).iter().map(|z| z.norm_sqr()).sum()
    }

    fn keys(&self) -> Vec<(Config, Config)> {
        self.rules
            .iter()
            .flat_map(|(i, outs)| outs.iter().map(move |(o, _)| (*i, *o)))
            .collect()
    }

    /// Largest entry-wise difference between the Gram matrices of two maps
    /// over the union of their rules. Zero iff the maps agree up to an
    /// isometry on the environment.
    pub fn gram_distance(&self, other: &BranchMap) -> f64 {
        let mut keys = self.keys();
        keys.extend(other.keys());
        keys.sort_unstable();
        keys.dedup();
        let gram = |m: &BranchMap| -> Vec<C64> {
            let vs: Vec<Vec<C64>> = keys.iter().map(|(i, o)| m.env(*i, *o)).collect();
            let mut g = Vec::with_capacity(vs.len() * vs.len());
            for a in &vs {
                for b in &vs {
                    g.push(a.iter().zip(b).map(|(x, y)| x.conj() * y).sum());
                }
            }
            g
        };
        gram(self)
            .iter()
            .zip(gram(other))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Applies `map` to atoms `(source, target)` of `s`, writing the new
/// environment into a fresh register which is then folded into the
/// accumulated [`ENV_REGISTER`].
pub fn apply_branch_map(
    s: &StateVector<f64>,
    map: &BranchMap,
    source: &str,
    target: &str,
) -> Result<StateVector<f64>> {
    let spec = s.spec();
    for l in [source, target] {
        if spec.entry(l)?.kind != SubsystemKind::Atom {
            return Err(Error::SpecMismatch(format!("`{l}` is not an atom")));
        }
    }
    let (ps, pt) = (spec.position(source)?, spec.position(target)?);
    let slot_label = "env.slot";
    let out_spec = spec.push(Subsystem {
        label: slot_label.into(),
        dim: map.env_dim,
        kind: SubsystemKind::Register,
    })?;
    let mut amps = vec![Complex::new(0.0, 0.0); out_spec.dim()];
    for (i, a) in s.amplitudes().iter().enumerate() {
        if a.norm() <= tol::NEGLIGIBLE {
            continue;
        }
        let mut d = spec.digits(i);
        let cfg = (d[ps], d[pt]);
        let Some(outs) = map.rules.get(&cfg) else {
            return Err(Error::Precondition(format!(
                "channel {source}->{target} undefined on configuration ({}, {}) with amplitude {:.3e}",
                level_name(cfg.0),
                level_name(cfg.1),
                a.norm()
            )));
        };
        for ((os, ot), env) in outs {
            d[ps] = *os;
            d[pt] = *ot;
            let base = spec.compose(&d) * map.env_dim;
            for (k, e) in env.iter().enumerate() {
                amps[base + k] += a * e;
            }
        }
    }
    let raw = StateVector::from_amplitudes(out_spec, amps)?;
    compress_environment(&raw)
}

/// True for labels that belong to the environment: cavities, bath modes,
/// [`ENV_REGISTER`] and registers named `env.*`.
pub fn is_environment(sub: &Subsystem) -> bool {
    matches!(sub.kind, SubsystemKind::Cavity | SubsystemKind::BathMode)
        || sub.label == ENV_REGISTER
        || sub.label.starts_with("env.")
}

/// Folds all environment labels into a single [`ENV_REGISTER`], keeping
/// the others in their current order.
pub fn compress_environment(s: &StateVector<f64>) -> Result<StateVector<f64>> {
    let keep: Vec<&str> = s
        .spec()
        .entries()
        .iter()
        .filter(|e| !is_environment(e))
        .map(|e| e.label.as_str())
        .collect();
    fold_environment(s, &keep, ENV_REGISTER)
}

fn level_name(l: usize) -> &'static str {
    match l {
        level::ZERO => "0",
        level::ONE => "1",
        _ => "r",
    }
}
