use num_complex::Complex;
use num_traits::Zero;

use super::spec::SubsystemSpec;
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Sparse operator acting on a subset of labels, identity elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOp<T: Real> {
    spec: SubsystemSpec,
    support: Vec<usize>,
    support_spec: SubsystemSpec,
    entries: Vec<(usize, usize, Complex<T>)>,
}

impl<T: Real> LinearOp<T> {
    /// Builds from `(row, col, value)` triples over the support subspace.
    /// Duplicate positions are summed; exact zeros are dropped.
    pub fn from_triples(
        spec: &SubsystemSpec,
        support: &[&str],
        triples: impl IntoIterator<Item = (usize, usize, Complex<T>)>,
    ) -> Result<Self> {
        let support_spec = spec.subset(support)?;
        let positions = support
            .iter()
            .map(|l| spec.position(l))
            .collect::<Result<Vec<_>>>()?;
        let d = support_spec.dim();
        let mut dense: std::collections::BTreeMap<(usize, usize), Complex<T>> = Default::default();
        for (r, c, v) in triples {
            if r >= d || c >= d {
                return Err(Error::InvalidOperator(format!(
                    "entry ({r},{c}) outside {d}x{d}"
                )));
            }
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::InvalidOperator("non-finite entry".into()));
            }
            *dense.entry((r, c)).or_insert_with(Complex::zero) += v;
        }
        let entries = dense
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|((r, c), v)| (r, c, v))
            .collect();
        Ok(Self {
            spec: spec.clone(),
            support: positions,
            support_spec,
            entries,
        })
    }

    /// Builds from a dense row-major matrix over the support subspace.
    pub fn from_dense(
        spec: &SubsystemSpec,
        support: &[&str],
        matrix: &[Complex<T>],
    ) -> Result<Self> {
        let d = spec.subset(support)?.dim();
        if matrix.len() != d * d {
            return Err(Error::InvalidOperator(format!(
                "expected {}x{} matrix",
                d, d
            )));
        }
        let triples = matrix.iter().enumerate().map(|(k, v)| (k / d, k % d, *v));
        Self::from_triples(spec, support, triples)
    }

    pub fn identity(spec: &SubsystemSpec, support: &[&str]) -> Result<Self> {
        let d = spec.subset(support)?.dim();
        Self::from_triples(
            spec,
            support,
            (0..d).map(|i| (i, i, Complex::new(T::one(), T::zero()))),
        )
    }

    pub fn zero(spec: &SubsystemSpec, support: &[&str]) -> Result<Self> {
        Self::from_triples(spec, support, std::iter::empty())
    }

    /// `|ket><bra|` on a single label.
    pub fn outer(spec: &SubsystemSpec, label: &str, ket: usize, bra: usize) -> Result<Self> {
        Self::from_triples(
            spec,
            &[label],
            [(ket, bra, Complex::new(T::one(), T::zero()))],
        )
    }

    pub fn spec(&self) -> &SubsystemSpec {
        &self.spec
    }

    pub fn support_spec(&self) -> &SubsystemSpec {
        &self.support_spec
    }

    pub fn support_labels(&self) -> Vec<&str> {
        self.support_spec.labels().collect()
    }

    pub fn entries(&self) -> &[(usize, usize, Complex<T>)] {
        &self.entries
    }

    pub fn support_dim(&self) -> usize {
        self.support_spec.dim()
    }

    pub fn dense(&self) -> Vec<Complex<T>> {
        let d = self.support_dim();
        let mut m = vec![Complex::zero(); d * d];
        for &(r, c, v) in &self.entries {
            m[r * d + c] += v;
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|&(r, c, v)| (c, r, v.conj()))
            .collect();
        Self {
            entries,
            ..self.clone()
        }
    }

    pub fn scaled(&self, k: Complex<T>) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|&(r, c, v)| (r, c, v * k))
            .collect();
        Self {
            entries,
            ..self.clone()
        }
    }

    /// Largest |H - H†| entry.
    pub fn hermiticity_defect(&self) -> T {
        let d = self.support_dim();
        let m = self.dense();
        let mut worst = T::zero();
        for r in 0..d {
            for c in r..d {
                worst = worst.max((m[r * d + c] - m[c * d + r].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Sum of two operators on the same spec; the result is supported on
    /// the union of supports (ordered as in the spec).
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch("operator specs differ".into()));
        }
        let mut pos: Vec<usize> = self.support.iter().chain(&other.support).copied().collect();
        pos.sort_unstable();
        pos.dedup();
        let labels: Vec<&str> = pos
            .iter()
            .map(|&p| self.spec.entries()[p].label.as_str())
            .collect();
        let a = self.widen(&labels)?;
        let b = other.widen(&labels)?;
        Self::from_triples(&self.spec, &labels, a.into_iter().chain(b))
    }

    /// Triples of this operator re-expressed on a wider support.
    fn widen(&self, labels: &[&str]) -> Result<Vec<(usize, usize, Complex<T>)>> {
        let wide = self.spec.subset(labels)?;
        let mine: Vec<usize> = self
            .support_labels()
            .iter()
            .map(|l| wide.position(l))
            .collect::<Result<_>>()?;
        let others: Vec<usize> = (0..wide.len()).filter(|p| !mine.contains(p)).collect();
        let other_dims: Vec<usize> = others.iter().map(|&p| wide.entries()[p].dim).collect();
        let n_other: usize = other_dims.iter().product();
        let mut out = Vec::with_capacity(self.entries.len() * n_other);
        for k in 0..n_other {
            let mut rest = k;
            let mut digits = vec![0; wide.len()];
            for (i, &p) in others.iter().enumerate().rev() {
                digits[p] = rest % other_dims[i];
                rest /= other_dims[i];
            }
            for &(r, c, v) in &self.entries {
                let rd = self.support_spec.digits(r);
                let cd = self.support_spec.digits(c);
                let mut row = digits.clone();
                let mut col = digits.clone();
                for (i, &p) in mine.iter().enumerate() {
                    row[p] = rd[i];
                    col[p] = cd[i];
                }
                out.push((wide.compose(&row), wide.compose(&col), v));
            }
        }
        Ok(out)
    }

    /// Product `self · other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch("operator specs differ".into()));
        }
        let mut pos: Vec<usize> = self.support.iter().chain(&other.support).copied().collect();
        pos.sort_unstable();
        pos.dedup();
        let labels: Vec<&str> = pos
            .iter()
            .map(|&p| self.spec.entries()[p].label.as_str())
            .collect();
        let d = self.spec.subset(&labels)?.dim();
        let mut a: Vec<Complex<T>> = vec![Complex::zero(); d * d];
        for (r, c, v) in self.widen(&labels)? {
            a[r * d + c] += v;
        }
        let mut b: Vec<Complex<T>> = vec![Complex::zero(); d * d];
        for (r, c, v) in other.widen(&labels)? {
            b[r * d + c] += v;
        }
        let mut m: Vec<Complex<T>> = vec![Complex::zero(); d * d];
        for r in 0..d {
            for k in 0..d {
                let x = a[r * d + k];
                if x.is_zero() {
                    continue;
                }
                for c in 0..d {
                    m[r * d + c] += x * b[k * d + c];
                }
            }
        }
        Self::from_dense(&self.spec, &labels, &m)
    }

    /// Applies `op ⊗ I` to `s`.
    pub fn apply(&self, s: &StateVector<T>) -> Result<StateVector<T>> {
        if *s.spec() != self.spec {
            return Err(Error::SpecMismatch(format!(
                "operator on {:?}, state on {:?}",
                self.spec,
                s.spec()
            )));
        }
        let spec = &self.spec;
        let d = self.support_dim();
        // offset of each support basis element inside a flat index
        let offsets: Vec<usize> = (0..d)
            .map(|k| {
                let digits = self.support_spec.digits(k);
                digits
                    .iter()
                    .zip(&self.support)
                    .map(|(dg, &p)| dg * spec.strides()[p])
                    .sum()
            })
            .collect();
        let mut by_col: Vec<Vec<(usize, Complex<T>)>> = vec![Vec::new(); d];
        for &(r, c, v) in &self.entries {
            by_col[c].push((r, v));
        }
        let amps = s.amplitudes();
        let mut out = vec![Complex::zero(); amps.len()];
        for (i, a) in amps.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let mut sub = 0;
            for (k, &p) in self.support.iter().enumerate() {
                sub = sub * self.support_spec.entries()[k].dim + spec.digit(i, p);
            }
            let base = i - offsets[sub];
            for &(r, v) in &by_col[sub] {
                out[base + offsets[r]] += v * *a;
            }
        }
        StateVector::from_amplitudes(spec.clone(), out)
    }
}

/// Applies `op` to `s`.
pub fn apply<T: Real>(op: &LinearOp<T>, s: &StateVector<T>) -> Result<StateVector<T>> {
    op.apply(s)
}
