use num_complex::Complex;
use num_traits::Zero;
use rand::Rng;

use super::spec::SubsystemSpec;
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// One projected branch of a measurement: the unnormalized post-measurement
/// state and its weight (squared norm).
#[derive(Debug, Clone)]
pub struct Branch<T: Real> {
    pub outcome: usize,
    pub weight: T,
    pub state: StateVector<T>,
}

/// Projective measurement on one label. Each outcome is a subspace given by
/// orthonormal vectors; single-vector outcomes give an ordinary basis
/// measurement.
#[derive(Debug, Clone)]
pub struct Measurement<T: Real> {
    label: String,
    outcomes: Vec<Vec<Vec<Complex<T>>>>,
}

impl<T: Real> Measurement<T> {
    pub fn new(label: impl Into<String>, outcomes: Vec<Vec<Vec<Complex<T>>>>) -> Self {
        Self {
            label: label.into(),
            outcomes,
        }
    }

    /// Measurement in an orthonormal basis, one outcome per vector.
    pub fn in_basis(label: impl Into<String>, basis: Vec<Vec<Complex<T>>>) -> Self {
        Self::new(label, basis.into_iter().map(|v| vec![v]).collect())
    }

    /// Computational-basis measurement of a `dim`-level subsystem.
    pub fn computational(label: impl Into<String>, dim: usize) -> Self {
        Self::in_basis(label, computational_basis(dim))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn outcome_count(&self) -> usize {
        self.outcomes.len()
    }

    fn vectors(&self) -> impl Iterator<Item = &Vec<Complex<T>>> {
        self.outcomes.iter().flatten()
    }

    /// Checks orthonormality of all vectors; returns the rank covered.
    fn validate(&self, spec: &SubsystemSpec) -> Result<usize> {
        let dim = spec.entry(&self.label)?.dim;
        let vs: Vec<_> = self.vectors().collect();
        let tol = T::lit(1e-12);
        let mut worst = T::zero();
        for (i, a) in vs.iter().enumerate() {
            if a.len() != dim {
                return Err(Error::SpecMismatch(format!(
                    "basis vector of length {} for `{}` (dim {dim})",
                    a.len(),
                    self.label
                )));
            }
            for (j, b) in vs.iter().enumerate().skip(i) {
                let ip: Complex<T> = a
                    .iter()
                    .zip(b.iter())
                    .fold(Complex::zero(), |acc, (x, y)| acc + x.conj() * *y);
                let expected = if i == j { T::one() } else { T::zero() };
                worst = worst.max((ip - Complex::new(expected, T::zero())).norm());
            }
        }
        if worst > tol {
            return Err(Error::NonOrthonormalBasis(
                worst.to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(vs.len())
    }

    /// Every branch with its weight, without sampling. The returned states are
    /// the unnormalized projections `P_k s`.
    pub fn project_branches(&self, s: &StateVector<T>) -> Result<Vec<Branch<T>>> {
        self.validate(s.spec())?;
        let spec = s.spec();
        let pos = spec.position(&self.label)?;
        let dim = spec.entries()[pos].dim;
        let stride = spec.strides()[pos];
        let amps = s.amplitudes();
        let mut branches = Vec::with_capacity(self.outcomes.len());
        for (k, vecs) in self.outcomes.iter().enumerate() {
            let mut out = vec![Complex::zero(); amps.len()];
            for (i, _) in amps.iter().enumerate() {
                if spec.digit(i, pos) != 0 {
                    continue;
                }
                // i is the base index with this label at 0
                for v in vecs {
                    let overlap = (0..dim).fold(Complex::zero(), |acc, d| {
                        acc + v[d].conj() * amps[i + d * stride]
                    });
                    if overlap.is_zero() {
                        continue;
                    }
                    for d in 0..dim {
                        out[i + d * stride] += v[d] * overlap;
                    }
                }
            }
            let state = StateVector::from_amplitudes(spec.clone(), out)?;
            branches.push(Branch {
                outcome: k,
                weight: state.norm_squared(),
                state,
            });
        }
        Ok(branches)
    }

    /// Samples an outcome by the Born rule and returns `(outcome, collapsed
    /// unit-norm state, probability)`. The outcomes must cover the whole
    /// subsystem space.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        s: &StateVector<T>,
        rng: &mut R,
    ) -> Result<(usize, StateVector<T>, T)> {
        let total = s.norm_squared();
        if total <= T::zero() {
            return Err(Error::ZeroNorm);
        }
        let dim = s.spec().entry(&self.label)?.dim;
        let rank = self.validate(s.spec())?;
        if rank != dim {
            return Err(Error::IncompleteBasis {
                label: self.label.clone(),
                rank,
                dim,
            });
        }
        let branches = self.project_branches(s)?;
        let u = T::lit(rng.gen::<f64>()) * total;
        let mut acc = T::zero();
        let mut chosen = None;
        for b in &branches {
            acc += b.weight;
            if b.weight > T::zero() && u < acc {
                chosen = Some(b.outcome);
                break;
            }
        }
        // rounding can leave u just above the accumulated total
        let k = chosen.unwrap_or_else(|| {
            branches
                .iter()
                .rev()
                .find(|b| b.weight > T::zero())
                .map(|b| b.outcome)
                .unwrap_or(0)
        });
        let b = &branches[k];
        Ok((k, b.state.normalized()?, b.weight / total))
    }
}

/// Columns of the identity as basis vectors.
pub fn computational_basis<T: Real>(dim: usize) -> Vec<Vec<Complex<T>>> {
    (0..dim)
        .map(|k| {
            (0..dim)
                .map(|j| {
                    if j == k {
                        Complex::new(T::one(), T::zero())
                    } else {
                        Complex::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// Samples a basis measurement on `label`.
pub fn measure_projective<T: Real, R: Rng + ?Sized>(
    s: &StateVector<T>,
    label: &str,
    basis: Vec<Vec<Complex<T>>>,
    rng: &mut R,
) -> Result<(usize, StateVector<T>, T)> {
    Measurement::in_basis(label, basis).sample(s, rng)
}

/// Deterministic counterpart of [`measure_projective`]: every branch.
pub fn project_branch<T: Real>(
    s: &StateVector<T>,
    label: &str,
    basis: Vec<Vec<Complex<T>>>,
) -> Result<Vec<Branch<T>>> {
    Measurement::in_basis(label, basis).project_branches(s)
}

/// `|<target|s>|^2` after normalizing both states.
pub fn fidelity<T: Real>(s: &StateVector<T>, target: &StateVector<T>) -> Result<T> {
    let ns = s.norm_squared();
    let nt = target.norm_squared();
    if ns <= T::zero() || nt <= T::zero() {
        return Err(Error::ZeroNorm);
    }
    let ip = target.inner(s)?;
    Ok((ip.norm_sqr() / (ns * nt)).min(T::one()))
}

/// Fidelity against `target ⊗ rest`, where `target` covers a subset of the
/// labels and `rest` fixes the remaining ones in a product state.
pub fn fidelity_with_rest<T: Real>(
    s: &StateVector<T>,
    target: &StateVector<T>,
    rest: &StateVector<T>,
) -> Result<T> {
    let full = target.tensor(rest)?;
    let reordered = reorder(&full, s.spec())?;
    fidelity(s, &reordered)
}

/// `<target| Tr_rest(|s><s|) |target>` normalized by both norms: the
/// fidelity of the reduced state of `s` on `target`'s labels.
pub fn reduced_fidelity<T: Real>(s: &StateVector<T>, target: &StateVector<T>) -> Result<T> {
    let ns = s.norm_squared();
    let nt = target.norm_squared();
    if ns <= T::zero() || nt <= T::zero() {
        return Err(Error::ZeroNorm);
    }
    let spec = s.spec();
    let tspec = target.spec();
    let positions: Vec<usize> = tspec
        .entries()
        .iter()
        .map(|e| {
            let p = spec.position(&e.label)?;
            if spec.entries()[p].dim != e.dim {
                return Err(Error::SpecMismatch(format!(
                    "dimension of `{}` differs",
                    e.label
                )));
            }
            Ok(p)
        })
        .collect::<Result<_>>()?;
    // overlap per configuration of the traced-out labels
    let mut overlaps: std::collections::HashMap<usize, Complex<T>> = Default::default();
    for (i, a) in s.amplitudes().iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let mut t_idx = 0;
        let mut rest_key = i;
        for (k, &p) in positions.iter().enumerate() {
            let d = spec.digit(i, p);
            t_idx += d * tspec.strides()[k];
            rest_key -= d * spec.strides()[p];
        }
        let t = target.amplitudes()[t_idx];
        *overlaps.entry(rest_key).or_insert_with(Complex::zero) += t.conj() * *a;
    }
    let f = overlaps
        .values()
        .fold(T::zero(), |acc, o| acc + o.norm_sqr());
    Ok((f / (ns * nt)).min(T::one()))
}

/// Permutes `s` (same label set) into the label order of `spec`.
pub fn reorder<T: Real>(s: &StateVector<T>, spec: &SubsystemSpec) -> Result<StateVector<T>> {
    if s.spec().len() != spec.len() {
        return Err(Error::SpecMismatch("label sets differ".into()));
    }
    s.embed(spec)
}
