use std::collections::BTreeMap;

use crate::dynamics::{
    free_evolution, run_pulses, single_atom_op, BathSpec, CavityEnv, Pulse, PulseSchedule,
    RamanCoupling, SingleAtomOp,
};
use crate::error::{Error, Result};
use crate::hilbert::{gauge, LinearOp, StateVector, SubsystemSpec};
use crate::tol;
use crate::C64;

use super::analytic_from_kets;
use super::branch::{BranchMap, Config};
use super::env::{AnalyticChannel, EnvOperator};

const SRC: &str = "src";
const TGT: &str = "tgt";
const CAV: &str = "cav";

/// Systematic pulse imperfections.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PulseErrors {
    /// Relative pulse-area error: durations are `(1 + area) pi / g`.
    pub area: f64,
    /// Laser phase offset.
    pub phase: f64,
    /// Raman detuning during the pulses.
    pub detuning: f64,
}

/// A copy operation simulated with an explicit cavity bath.
///
/// Every application (slot) couples to its own environment, prepared in the
/// configured bath state and free-evolved up to the slot start.
#[derive(Debug, Clone, PartialEq)]
pub struct BathChannel {
    pub g: f64,
    pub errors: PulseErrors,
    pub bath: BathSpec<f64>,
    /// Free evolution between the two pulses and between slots.
    pub idle: f64,
}

/// Physical environment kets keyed by `(input, output)` configuration.
pub type EnvKets = BTreeMap<(Config, Config), Vec<C64>>;

impl BathChannel {
    pub fn new(g: f64, errors: PulseErrors, bath: BathSpec<f64>, idle: f64) -> Result<Self> {
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "coupling g = {g} must be positive"
            )));
        }
        if errors.area.is_nan() || errors.area <= -1.0 {
            return Err(Error::InvalidParameter(
                "pulse-area error must exceed -1".into(),
            ));
        }
        bath.validate()?;
        let ch = Self {
            g,
            errors,
            bath,
            idle,
        };
        ch.schedule().validate()?;
        Ok(ch)
    }

    /// Bath-free channel carrying only systematic errors.
    pub fn systematic(g: f64, errors: PulseErrors) -> Result<Self> {
        Self::new(g, errors, BathSpec::none(), 0.0)
    }

    /// Flat vacuum bath whose uniform coupling is solved so that the
    /// single-application loss probability equals `eta`.
    pub fn calibrated(eta: f64, modes: usize, half_width: f64, g: f64) -> Result<Self> {
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "target loss {eta} outside (0, 1)"
            )));
        }
        if modes == 0 {
            return Err(Error::InvalidParameter(
                "calibration needs at least one bath mode".into(),
            ));
        }
        let make = |c: f64| {
            Self::new(
                g,
                PulseErrors::default(),
                BathSpec::flat(modes, 0.0, half_width, c),
                0.0,
            )
        };
        let loss = |c: f64| -> Result<f64> { make(c)?.loss_probability(0) };
        let step = 0.01 * g;
        let (mut lo, mut hi) = (0.0, step);
        loop {
            if loss(hi)? >= eta {
                break;
            }
            lo = hi;
            hi += step;
            if hi > 3.0 * g {
                return Err(Error::InvalidParameter(format!(
                    "loss {eta} not reachable with this bath"
                )));
            }
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if loss(mid)? < eta {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        make(0.5 * (lo + hi))
    }

    pub fn with_p_therm(mut self, p: f64) -> Result<Self> {
        self.bath = self.bath.with_p_therm(p);
        self.bath.validate()?;
        Ok(self)
    }

    pub fn coupling(&self) -> RamanCoupling<f64> {
        RamanCoupling {
            g: self.g,
            phase: self.errors.phase,
            detuning: self.errors.detuning,
        }
    }

    fn pulse(&self, atom: &str) -> Pulse<f64> {
        let mut p = Pulse::pi(atom, self.coupling());
        p.duration *= 1.0 + self.errors.area;
        p
    }

    pub fn schedule(&self) -> PulseSchedule<f64> {
        PulseSchedule::new(vec![self.pulse(SRC), self.pulse(TGT)]).with_idle(self.idle)
    }

    pub fn duration(&self) -> f64 {
        self.schedule().total_duration()
    }

    pub fn slot_start(&self, slot: usize) -> f64 {
        slot as f64 * (self.duration() + self.idle)
    }

    pub fn env_spec(&self) -> Result<SubsystemSpec> {
        let mut b = SubsystemSpec::builder().cavity(CAV);
        for l in self.bath.labels(CAV) {
            b = b.bath_mode(l);
        }
        b.build()
    }

    /// Environment state at time `t`: empty cavity, bath modes in their
    /// initial state, freely evolved.
    pub fn environment_at(&self, t: f64) -> Result<StateVector<f64>> {
        let spec = self.env_spec()?;
        let mut factors = vec![vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]];
        factors.extend(std::iter::repeat_n(
            self.bath.mode_initial_state(),
            self.bath.modes.len(),
        ));
        let e = StateVector::product(spec, &factors)?;
        free_evolution(&e, &CavityEnv::with_bath(CAV, &self.bath), t)
    }

    /// Runs the copy sequence for atomic input `input` in slot `slot` and
    /// returns the environment ket attached to every output configuration.
    fn outputs(&self, input: Config, slot: usize) -> Result<Vec<(Config, Vec<C64>)>> {
        let atoms = SubsystemSpec::builder().atom(SRC).atom(TGT).build()?;
        let a = StateVector::basis(atoms, &[(SRC, input.0), (TGT, input.1)])?;
        let mut s = a.tensor(&self.environment_at(self.slot_start(slot))?)?;
        s = single_atom_op(&s, TGT, SingleAtomOp::Exchange0r)?;
        s = run_pulses(&s, &self.schedule(), &CavityEnv::with_bath(CAV, &self.bath))?;
        s = single_atom_op(&s, SRC, SingleAtomOp::Exchange1r)?;
        s = single_atom_op(&s, TGT, SingleAtomOp::Exchange0r)?;
        s = pump_coherent(&s, SRC)?;

        let env_dim = s.spec().dim() / 9;
        let mut by_cfg: BTreeMap<Config, Vec<C64>> = BTreeMap::new();
        for (i, amp) in s.amplitudes().iter().enumerate() {
            if amp.norm() == 0.0 {
                continue;
            }
            let cfg = (i / (3 * env_dim), (i / env_dim) % 3);
            by_cfg
                .entry(cfg)
                .or_insert_with(|| vec![C64::new(0.0, 0.0); env_dim])[i % env_dim] = *amp;
        }
        Ok(by_cfg
            .into_iter()
            .filter(|(_, v)| {
                v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() > tol::NEGLIGIBLE * 1e-3
            })
            .collect())
    }

    /// Physical environment kets of every rule in slot `slot`. Inputs with
    /// the target already in `|1>` are inert and reuse the `(0,0) -> (0,0)`
    /// ket.
    pub fn env_kets(&self, slot: usize) -> Result<EnvKets> {
        let mut kets = EnvKets::new();
        for input in [(0, 0), (1, 0)] {
            for (out, v) in self.outputs(input, slot)? {
                kets.insert((input, out), v);
            }
        }
        if let Some(v) = kets.get(&((0, 0), (0, 0))).cloned() {
            kets.insert(((0, 1), (0, 1)), v.clone());
            kets.insert(((1, 1), (1, 1)), v);
        }
        Ok(kets)
    }

    /// Kets expressed in an orthonormal basis of their span.
    pub fn branch_map(&self, slot: usize) -> Result<BranchMap> {
        let kets = self.env_kets(slot)?;
        let vecs: Vec<&Vec<C64>> = kets.values().collect();
        let (dim, coords) = orthonormal_coordinates(&vecs);
        let mut m = BranchMap::new(dim);
        for ((i, o), c) in kets.keys().zip(coords) {
            m.insert(*i, *o, c);
        }
        Ok(m)
    }

    /// `(L0, L1, La)` applied to the slot's environment.
    pub fn operators(&self, slot: usize) -> Result<[EnvOperator; 3]> {
        let kets = self.env_kets(slot)?;
        let dim = self.env_spec()?.dim();
        let get = |i: Config, o: Config| EnvOperator::Bath {
            ket: kets
                .get(&(i, o))
                .cloned()
                .unwrap_or_else(|| vec![C64::new(0.0, 0.0); dim]),
        };
        Ok([
            get((0, 0), (0, 0)),
            get((1, 0), (1, 1)),
            get((1, 0), (1, 0)),
        ])
    }

    /// Total weight of outputs outside the two-branch structure.
    pub fn stray_weight(&self, slot: usize) -> Result<f64> {
        let expected = [
            ((0, 0), (0, 0)),
            ((0, 1), (0, 1)),
            ((1, 1), (1, 1)),
            ((1, 0), (1, 1)),
            ((1, 0), (1, 0)),
        ];
        Ok(self
            .env_kets(slot)?
            .iter()
            .filter(|(k, _)| !expected.contains(k))
            .map(|(_, v)| v.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .fold(0.0, |a, b| a + b))
    }

    /// Weight of the `|1>|0> -> |1>|0>` loss branch.
    pub fn loss_probability(&self, slot: usize) -> Result<f64> {
        let kets = self.env_kets(slot)?;
        Ok(kets
            .get(&((1, 0), (1, 0)))
            .map_or(0.0, |v| v.iter().map(|z| z.norm_sqr()).sum()))
    }

    /// c-number scalars read off against the freely evolved environment at
    /// the end of the slot.
    pub fn derive_analytic(&self, slot: usize) -> Result<AnalyticChannel> {
        let reference = self.environment_at(self.slot_start(slot) + self.duration())?;
        let kets = self.env_kets(slot)?;
        analytic_from_kets(reference.amplitudes(), &kets)
    }
}

/// Coherent relabeling `|r> -> |1>` on the source atom: after the copy the
/// two levels are never populated with the same environment configuration
/// unless the bath started excited, in which case the amplitudes add.
fn pump_coherent(s: &StateVector<f64>, atom: &str) -> Result<StateVector<f64>> {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    let m = [l, o, o, o, l, l, o, o, o];
    LinearOp::from_dense(s.spec(), &[atom], &m)?.apply(s)
}

/// Twice-iterated Gram-Schmidt over `vecs`; returns the span dimension
/// (at least 1) and each vector's coordinates.
pub(crate) fn orthonormal_coordinates(vecs: &[&Vec<C64>]) -> (usize, Vec<Vec<C64>>) {
    let scale = vecs
        .iter()
        .flat_map(|v| v.iter())
        .fold(0.0f64, |m, z| m.max(z.norm()));
    let cutoff = 1e-13 * scale;
    let mut basis: Vec<Vec<C64>> = Vec::new();
    let mut coords: Vec<Vec<C64>> = Vec::new();
    for v in vecs {
        let mut r = (*v).clone();
        let mut c = vec![C64::new(0.0, 0.0); basis.len()];
        for _ in 0..2 {
            for (j, q) in basis.iter().enumerate() {
                let ip: C64 = q.iter().zip(&r).map(|(x, y)| x.conj() * y).sum();
                c[j] += ip;
                for (x, y) in r.iter_mut().zip(q) {
                    *x -= y * ip;
                }
            }
        }
        let n = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > cutoff {
            let ph = gauge(&r);
            basis.push(r.iter().map(|z| z / (ph * n)).collect());
            c.push(ph * n);
        }
        coords.push(c);
    }
    let dim = basis.len().max(1);
    for c in &mut coords {
        c.resize(dim, C64::new(0.0, 0.0));
    }
    (dim, coords)
}
