use crate::error::{Error, Result};
use crate::tol;
use crate::C64;

use super::branch::BranchMap;

/// Action of one environment operator on the initial environment `|E>`.
#[derive(Debug, Clone, PartialEq)]
pub enum EnvOperator {
    /// `coherent |E> + flag |F>` with `|F>` a loss state orthogonal to `|E>`
    /// and private to the operation slot.
    Analytic { coherent: C64, flag: f64 },
    /// Explicit environment ket over cavity and bath modes.
    Bath { ket: Vec<C64> },
}

impl EnvOperator {
    pub fn norm_squared(&self) -> f64 {
        match self {
            Self::Analytic { coherent, flag } => coherent.norm_sqr() + flag * flag,
            Self::Bath { ket } => ket.iter().map(|z| z.norm_sqr()).sum(),
        }
    }

    /// Coordinates in an orthonormal basis of the slot's environment
    /// (`|E>` then the flag for the analytic form).
    pub fn coordinates(&self) -> Vec<C64> {
        match self {
            Self::Analytic { coherent, flag } => vec![*coherent, C64::new(*flag, 0.0)],
            Self::Bath { ket } => ket.clone(),
        }
    }

    /// `<self|other>` for two operators of the same slot.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        match (self, other) {
            (
                Self::Analytic {
                    coherent: a,
                    flag: fa,
                },
                Self::Analytic {
                    coherent: b,
                    flag: fb,
                },
            ) => Ok(a.conj() * b + fa * fb),
            (Self::Bath { ket: a }, Self::Bath { ket: b }) if a.len() == b.len() => {
                Ok(a.iter().zip(b).map(|(x, y)| x.conj() * y).sum())
            }
            _ => Err(Error::SpecMismatch(
                "environment operators from different backends".into(),
            )),
        }
    }
}

/// The c-number backend: `L0 = l0`, `L1 = l1`, `La = la_coherent + la_flag`
/// (flag part orthogonal to `|E>`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticChannel {
    pub l0: C64,
    pub l1: C64,
    pub la_coherent: C64,
    pub la_flag: f64,
}

impl AnalyticChannel {
    pub fn new(l0: C64, l1: C64, la_coherent: C64, la_flag: f64) -> Result<Self> {
        let ch = Self {
            l0,
            l1,
            la_coherent,
            la_flag,
        };
        ch.validate()?;
        Ok(ch)
    }

    pub fn ideal() -> Self {
        Self {
            l0: C64::new(1.0, 0.0),
            l1: C64::new(1.0, 0.0),
            la_coherent: C64::new(0.0, 0.0),
            la_flag: 0.0,
        }
    }

    /// Amplitude damping of the carried photon with loss probability `eta`.
    pub fn amplitude_damping(eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidParameter(format!(
                "loss probability {eta} outside [0, 1]"
            )));
        }
        Self::new(
            C64::new(1.0, 0.0),
            C64::new((1.0 - eta).sqrt(), 0.0),
            C64::new(0.0, 0.0),
            eta.sqrt(),
        )
    }

    /// Adds an independent photon loss `eta` after the copy: the 1-branch
    /// shrinks by `sqrt(1 - eta)` and the lost part joins the flag.
    pub fn with_extra_loss(self, eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidParameter(format!(
                "loss probability {eta} outside [0, 1]"
            )));
        }
        let lost = self.l1.norm_sqr() * eta;
        Self::new(
            self.l0,
            self.l1 * (1.0 - eta).sqrt(),
            self.la_coherent,
            (self.la_flag * self.la_flag + lost).sqrt(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |z: C64| z.norm().is_nan() || z.norm() > 1.0 + tol::EXACT;
        if bad(self.l0)
            || bad(self.l1)
            || bad(self.la_coherent)
            || !(self.la_flag >= 0.0 && self.la_flag <= 1.0 + tol::EXACT)
        {
            return Err(Error::InvalidOperator(
                "analytic scalars must have modulus <= 1".into(),
            ));
        }
        let out = self.l1.norm_sqr() + self.la_coherent.norm_sqr() + self.la_flag * self.la_flag;
        if out > 1.0 + tol::EXACT {
            return Err(Error::InvalidOperator(format!(
                "|L1|^2 + |La|^2 = {out} exceeds 1"
            )));
        }
        Ok(())
    }

    pub fn operators(&self) -> [EnvOperator; 3] {
        [
            EnvOperator::Analytic {
                coherent: self.l0,
                flag: 0.0,
            },
            EnvOperator::Analytic {
                coherent: self.l1,
                flag: 0.0,
            },
            EnvOperator::Analytic {
                coherent: self.la_coherent,
                flag: self.la_flag,
            },
        ]
    }

    /// Register coordinates: 0 is `|E>`, 1 the loss flag.
    pub fn branch_map(&self) -> BranchMap {
        let z = C64::new(0.0, 0.0);
        let mut m = BranchMap::new(2);
        m.insert((0, 0), (0, 0), vec![self.l0, z]);
        m.insert((0, 1), (0, 1), vec![self.l0, z]);
        m.insert((1, 1), (1, 1), vec![self.l0, z]);
        m.insert((1, 0), (1, 1), vec![self.l1, z]);
        m.insert(
            (1, 0),
            (1, 0),
            vec![self.la_coherent, C64::new(self.la_flag, 0.0)],
        );
        m
    }
}
