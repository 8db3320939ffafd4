//! Noisy copy primitives packaged as environment operators `(L0, L1, La)`,
//! with a c-number backend and an explicit-bath backend.
//!
//! A copy acts on a (source, target) atom pair with the target in `|0>`:
//!
//! ```text
//! |0>|0> -> |0>|0> L0|E>
//! |1>|0> -> |1>|1> L1|E> + |1>|0> La|E>
//! ```
//!
//! A target already in `|1>` is left alone (`L0`). Each application owns a
//! fresh environment. Protocol states carry all
//! environments in one register that is re-compressed after every step.

mod bath;
mod branch;
mod env;

pub use bath::{BathChannel, EnvKets, PulseErrors};
pub use branch::{
    apply_branch_map, compress_environment, is_environment, BranchMap, Config, ENV_REGISTER,
};
pub use env::{AnalyticChannel, EnvOperator};

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::dynamics::BathSpec;
use crate::error::{Error, Result};
use crate::hilbert::StateVector;
use crate::C64;

/// Default single-application loss of a local copy.
pub const DEFAULT_ETA_LOCAL: f64 = 0.05;
/// Default loss of a cavity-to-cavity transmission.
pub const DEFAULT_ETA_TRANSMISSION: f64 = 0.2;
/// Default number of bath modes in calibrated presets.
pub const DEFAULT_BATH_MODES: usize = 4;
/// Default half-width of the flat bath band, in units of `g`.
pub const DEFAULT_HALF_WIDTH: f64 = 2.0;

/// Either backend behind a channel.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelBackend {
    Analytic(AnalyticChannel),
    Bath(BathChannel),
}

impl ChannelBackend {
    pub fn ideal() -> Self {
        Self::Analytic(AnalyticChannel::ideal())
    }

    /// Branch map of the `slot`-th application.
    pub fn branch_map(&self, slot: usize) -> Result<BranchMap> {
        match self {
            Self::Analytic(a) => Ok(a.branch_map()),
            Self::Bath(b) => b.branch_map(slot),
        }
    }

    pub fn operators(&self, slot: usize) -> Result<[EnvOperator; 3]> {
        match self {
            Self::Analytic(a) => Ok(a.operators()),
            Self::Bath(b) => b.operators(slot),
        }
    }

    /// True when every application has the same branch map.
    pub fn is_time_independent(&self) -> bool {
        match self {
            Self::Analytic(_) => true,
            Self::Bath(b) => b.bath.p_therm == 0.0 || b.bath.modes.is_empty(),
        }
    }
}

/// Per-slot branch maps, shared between clones of one channel.
#[derive(Clone, Default)]
pub struct MapCache(Arc<Mutex<HashMap<usize, BranchMap>>>);

impl std::fmt::Debug for MapCache {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("MapCache")
    }
}

impl PartialEq for MapCache {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl MapCache {
    fn get(&self, backend: &ChannelBackend, slot: usize) -> Result<BranchMap> {
        let key = if backend.is_time_independent() {
            0
        } else {
            slot
        };
        if let Some(m) = self.0.lock().expect("map cache").get(&key) {
            return Ok(m.clone());
        }
        let m = backend.branch_map(key)?;
        self.0.lock().expect("map cache").insert(key, m.clone());
        Ok(m)
    }
}

macro_rules! channel_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name {
            pub backend: ChannelBackend,
            cache: MapCache,
        }

        impl $name {
            pub fn new(backend: ChannelBackend) -> Self {
                Self { backend, cache: MapCache::default() }
            }

            pub fn ideal() -> Self {
                Self::new(ChannelBackend::ideal())
            }

            /// Amplitude damping with loss probability `eta`.
            pub fn analytic(eta: f64) -> Result<Self> {
                Ok(Self::new(ChannelBackend::Analytic(AnalyticChannel::amplitude_damping(eta)?)))
            }

            /// Calibrated vacuum bath with the default band.
            pub fn bath(eta: f64) -> Result<Self> {
                Ok(Self::new(ChannelBackend::Bath(preset_bath(eta)?)))
            }

            /// Branch map of the `slot`-th application, cached.
            pub fn branch_map(&self, slot: usize) -> Result<BranchMap> {
                self.cache.get(&self.backend, slot)
            }
        }
    };
}

channel_type!(
    /// Copy between two atoms of one cavity.
    LocalChannel
);
channel_type!(
    /// Copy from an atom of one cavity to an atom of another; the loss
    /// branch also covers propagation loss.
    TransmissionChannel
);

/// Vacuum bath of [`DEFAULT_BATH_MODES`] modes over `+-DEFAULT_HALF_WIDTH`
/// (with `g = 1`) whose coupling gives loss `eta`.
pub fn preset_bath(eta: f64) -> Result<BathChannel> {
    calibrated_bath(eta, DEFAULT_BATH_MODES, DEFAULT_HALF_WIDTH)
}

/// [`BathChannel::calibrated`] with `g = 1`, memoized. Zero loss gives an
/// uncoupled bath.
pub fn calibrated_bath(eta: f64, modes: usize, half_width: f64) -> Result<BathChannel> {
    type Key = (u64, usize, u64);
    static CACHE: OnceLock<Mutex<HashMap<Key, BathChannel>>> = OnceLock::new();
    let key = (eta.to_bits(), modes, half_width.to_bits());
    let cache = CACHE.get_or_init(Default::default);
    if let Some(ch) = cache.lock().expect("preset cache").get(&key) {
        return Ok(ch.clone());
    }
    let ch = if eta == 0.0 {
        BathChannel::new(
            1.0,
            PulseErrors::default(),
            BathSpec::flat(modes, 0.0, half_width, 0.0),
            0.0,
        )?
    } else {
        BathChannel::calibrated(eta, modes, half_width, 1.0)?
    };
    cache.lock().expect("preset cache").insert(key, ch.clone());
    Ok(ch)
}

/// Applies the `slot`-th use of a local channel from `source` to `target`.
pub fn local_channel_apply(
    s: &StateVector<f64>,
    ch: &LocalChannel,
    source: &str,
    target: &str,
    slot: usize,
) -> Result<StateVector<f64>> {
    apply_branch_map(s, &ch.branch_map(slot)?, source, target)
}

/// Applies the `slot`-th use of a transmission channel.
pub fn transmission_apply(
    s: &StateVector<f64>,
    ch: &TransmissionChannel,
    source: &str,
    target: &str,
    slot: usize,
) -> Result<StateVector<f64>> {
    apply_branch_map(s, &ch.branch_map(slot)?, source, target)
}

/// `|| L1(2) L0(1)|E> - L0(2) L1(1)|E> ||` for two applications in slots
/// `slots.0` (first) and `slots.1` (second), each on its own environment.
pub fn check_stationarity(backend: &ChannelBackend, slots: (usize, usize)) -> Result<f64> {
    let [l0_1, l1_1, _] = backend.operators(slots.0)?;
    let [l0_2, l1_2, _] = backend.operators(slots.1)?;
    let (a, b, c, d) = (
        l1_2.coordinates(),
        l0_1.coordinates(),
        l0_2.coordinates(),
        l1_1.coordinates(),
    );
    // explicit difference: expanding the norm loses half the digits
    let mut sq = 0.0;
    for (x, z) in a.iter().zip(&c) {
        for (y, w) in b.iter().zip(&d) {
            sq += (x * y - z * w).norm_sqr();
        }
    }
    Ok(sq.sqrt())
}

/// Scalars `l = <E|L E>` and the orthogonal remainder of `La E`.
pub(crate) fn analytic_from_kets(reference: &[C64], kets: &EnvKets) -> Result<AnalyticChannel> {
    let dot = |v: &Vec<C64>| -> C64 { reference.iter().zip(v).map(|(x, y)| x.conj() * y).sum() };
    let get = |i: Config, o: Config| kets.get(&(i, o));
    let l0 = get((0, 0), (0, 0)).map_or(C64::new(0.0, 0.0), dot);
    let l1 = get((1, 0), (1, 1)).map_or(C64::new(0.0, 0.0), dot);
    let (la_coherent, la_flag) = match get((1, 0), (1, 0)) {
        Some(v) => {
            let c = dot(v);
            let rest: f64 = v
                .iter()
                .zip(reference)
                .map(|(x, e)| (x - e * c).norm_sqr())
                .sum();
            (c, rest.sqrt())
        }
        None => (C64::new(0.0, 0.0), 0.0),
    };
    AnalyticChannel::new(l0, l1, la_coherent, la_flag).map_err(|e| match e {
        Error::InvalidOperator(m) => Error::InvalidOperator(format!("derived scalars: {m}")),
        other => other,
    })
}
