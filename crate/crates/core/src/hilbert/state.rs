use num_complex::Complex;
use num_traits::Zero;

use super::spec::SubsystemSpec;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense amplitude vector over a labeled tensor-product basis. May be
/// subnormalized: unnormalized environment branches are first-class.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    spec: SubsystemSpec,
    amps: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    pub fn zero(spec: SubsystemSpec) -> Self {
        let amps = vec![Complex::zero(); spec.dim()];
        Self { spec, amps }
    }

    pub fn from_amplitudes(spec: SubsystemSpec, amps: Vec<Complex<T>>) -> Result<Self> {
        if amps.len() != spec.dim() {
            return Err(Error::SpecMismatch(format!(
                "{} amplitudes for dimension {}",
                amps.len(),
                spec.dim()
            )));
        }
        Ok(Self { spec, amps })
    }

    /// Product basis state with unit amplitude on the assigned configuration.
    pub fn basis(spec: SubsystemSpec, assignments: &[(&str, usize)]) -> Result<Self> {
        for (label, _) in assignments {
            spec.position(label)?;
        }
        let mut digits = Vec::with_capacity(spec.len());
        for e in spec.entries() {
            let idx = assignments
                .iter()
                .find(|(l, _)| *l == e.label)
                .map(|(_, i)| *i)
                .ok_or_else(|| Error::MissingAssignment(e.label.clone()))?;
            if idx >= e.dim {
                return Err(Error::IndexOutOfRange {
                    label: e.label.clone(),
                    index: idx,
                    dim: e.dim,
                });
            }
            digits.push(idx);
        }
        let mut s = Self::zero(spec);
        let i = s.spec.compose(&digits);
        s.amps[i] = Complex::new(T::one(), T::zero());
        Ok(s)
    }

    /// Product state of single-subsystem vectors, one per label in spec order.
    pub fn product(spec: SubsystemSpec, factors: &[Vec<Complex<T>>]) -> Result<Self> {
        if factors.len() != spec.len() {
            return Err(Error::SpecMismatch(
                "one factor per subsystem required".into(),
            ));
        }
        for (f, e) in factors.iter().zip(spec.entries()) {
            if f.len() != e.dim {
                return Err(Error::SpecMismatch(format!(
                    "factor for `{}` has wrong length",
                    e.label
                )));
            }
        }
        let mut amps = vec![Complex::new(T::one(), T::zero())];
        for f in factors {
            amps = amps
                .iter()
                .flat_map(|a| f.iter().map(move |b| *a * *b))
                .collect();
        }
        Ok(Self { spec, amps })
    }

    pub fn spec(&self) -> &SubsystemSpec {
        &self.spec
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amps
    }

    pub fn amplitude(&self, assignments: &[(&str, usize)]) -> Result<Complex<T>> {
        let probe = Self::basis(self.spec.clone(), assignments)?;
        probe.inner(self)
    }

    pub fn norm_squared(&self) -> T {
        self.amps
            .iter()
            .fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.check_same(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * *b))
    }

    pub fn scaled(&self, k: Complex<T>) -> Self {
        Self {
            spec: self.spec.clone(),
            amps: self.amps.iter().map(|a| *a * k).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let amps = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| *a + *b)
            .collect();
        Ok(Self {
            spec: self.spec.clone(),
            amps,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scaled(Complex::new(-T::one(), T::zero())))
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_squared();
        if n <= T::zero() {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scaled(Complex::new(T::one() / n.sqrt(), T::zero())))
    }

    /// Tensor product `self ⊗ other`, labels concatenated.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let spec = self.spec.extend(&other.spec)?;
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| *a * *b))
            .collect();
        Ok(Self { spec, amps })
    }

    /// Largest elementwise amplitude difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.check_same(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm())))
    }

    /// Probability weight (unnormalized) that `label` holds `value`.
    pub fn weight_of(&self, label: &str, value: usize) -> Result<T> {
        let pos = self.spec.position(label)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| self.spec.digit(*i, pos) == value)
            .fold(T::zero(), |acc, (_, a)| acc + a.norm_sqr()))
    }

    /// Zeroes every amplitude for which `keep` returns false on the digit vector.
    pub fn filtered(&self, mut keep: impl FnMut(&[usize]) -> bool) -> Self {
        let mut out = self.clone();
        for (i, a) in out.amps.iter_mut().enumerate() {
            if !keep(&self.spec.digits(i)) {
                *a = Complex::zero();
            }
        }
        out
    }

    /// Iterates over nonzero amplitudes with their digit vectors.
    pub fn nonzero(&self) -> impl Iterator<Item = (Vec<usize>, Complex<T>)> + '_ {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(i, a)| (self.spec.digits(i), *a))
    }

    /// Re-expresses the state over `target`, which must contain every label
    /// of `self.spec`; the extra labels are set to basis index 0.
    pub fn embed(&self, target: &SubsystemSpec) -> Result<Self> {
        let map = self
            .spec
            .entries()
            .iter()
            .map(|e| {
                let p = target.position(&e.label)?;
                if target.entries()[p].dim != e.dim {
                    return Err(Error::SpecMismatch(format!(
                        "dimension of `{}` differs",
                        e.label
                    )));
                }
                Ok(target.strides()[p])
            })
            .collect::<Result<Vec<_>>>()?;
        let mut out = Self::zero(target.clone());
        for (i, a) in self.amps.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let j: usize = (0..self.spec.len())
                .map(|p| self.spec.digit(i, p) * map[p])
                .sum();
            out.amps[j] = *a;
        }
        Ok(out)
    }

    /// Removes `label` assuming it is in basis state `value` (amplitudes with
    /// other values must be negligible; they are dropped).
    pub fn drop_label(&self, label: &str, value: usize) -> Result<Self> {
        let pos = self.spec.position(label)?;
        let entries: Vec<_> = self
            .spec
            .entries()
            .iter()
            .filter(|e| e.label != label)
            .cloned()
            .collect();
        let spec = SubsystemSpec::new(entries)?;
        let mut out = Self::zero(spec);
        let mut k = 0;
        for (i, a) in self.amps.iter().enumerate() {
            if self.spec.digit(i, pos) == value {
                out.amps[k] = *a;
                k += 1;
            }
        }
        Ok(out)
    }

    /// Fixed-label slice: the amplitudes with `label` = `value`, left in place.
    pub fn project_label(&self, label: &str, value: usize) -> Result<Self> {
        let pos = self.spec.position(label)?;
        Ok(self.filtered(|d| d[pos] == value))
    }

    pub(crate) fn check_same(&self, other: &Self) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch(format!(
                "{:?} vs {:?}",
                self.spec, other.spec
            )));
        }
        Ok(())
    }
}

/// Amplitude-only constructor: `make_state` of the public interface.
pub fn make_state<T: Real>(
    spec: SubsystemSpec,
    assignments: &[(&str, usize)],
) -> Result<StateVector<T>> {
    StateVector::basis(spec, assignments)
}

pub fn norm_squared<T: Real>(s: &StateVector<T>) -> T {
    s.norm_squared()
}
