use std::fmt;

use crate::error::{Error, Result};
use crate::tol;

/// Physical role of a tensor factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubsystemKind {
    /// Three-level atom: index 0 = |0>, 1 = |1>, 2 = |r>.
    Atom,
    /// Cavity mode truncated to zero or one photon.
    Cavity,
    /// Bath oscillator truncated to zero or one excitation.
    BathMode,
    /// Reduced environment register of arbitrary dimension.
    Register,
}

/// Atomic level indices.
pub mod level {
    pub const ZERO: usize = 0;
    pub const ONE: usize = 1;
    pub const R: usize = 2;
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subsystem {
    pub label: String,
    pub dim: usize,
    pub kind: SubsystemKind,
}

/// Ordered list of labeled tensor factors. The first entry is the most
/// significant digit of a flat basis index.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SubsystemSpec {
    entries: Vec<Subsystem>,
    strides: Vec<usize>,
    dim: usize,
}

impl fmt::Debug for SubsystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|e| format!("{}:{}", e.label, e.dim))
            .collect();
        write!(f, "SubsystemSpec[{}]", parts.join(", "))
    }
}

impl SubsystemSpec {
    pub fn new(entries: Vec<Subsystem>) -> Result<Self> {
        Self::with_cap(entries, tol::DIMENSION_CAP)
    }

    pub fn with_cap(entries: Vec<Subsystem>, cap: usize) -> Result<Self> {
        let mut dim: usize = 1;
        for (i, e) in entries.iter().enumerate() {
            if entries[..i].iter().any(|o| o.label == e.label) {
                return Err(Error::DuplicateLabel(e.label.clone()));
            }
            let expected = match e.kind {
                SubsystemKind::Atom => Some(3),
                SubsystemKind::Cavity | SubsystemKind::BathMode => Some(2),
                SubsystemKind::Register => None,
            };
            if e.dim == 0 || expected.is_some_and(|d| d != e.dim) {
                return Err(Error::InvalidSubsystem {
                    label: e.label.clone(),
                    reason: format!("dimension {} not allowed for {:?}", e.dim, e.kind),
                });
            }
            dim = dim
                .checked_mul(e.dim)
                .filter(|d| *d <= cap)
                .ok_or(Error::DimensionCap {
                    dim: dim.saturating_mul(e.dim),
                    cap,
                })?;
        }
        let mut strides = vec![1; entries.len()];
        for i in (0..entries.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * entries[i + 1].dim;
        }
        Ok(Self {
            entries,
            strides,
            dim,
        })
    }

    pub fn empty() -> Self {
        Self {
            entries: Vec::new(),
            strides: Vec::new(),
            dim: 1,
        }
    }

    /// Builder-style helper used by most call sites.
    pub fn builder() -> SpecBuilder {
        SpecBuilder::default()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Subsystem] {
        &self.entries
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.entries
            .iter()
            .position(|e| e.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn contains(&self, label: &str) -> bool {
        self.entries.iter().any(|e| e.label == label)
    }

    pub fn entry(&self, label: &str) -> Result<&Subsystem> {
        Ok(&self.entries[self.position(label)?])
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.label.as_str())
    }

    /// Digit of subsystem `pos` in flat index `index`.
    #[inline]
    pub fn digit(&self, index: usize, pos: usize) -> usize {
        (index / self.strides[pos]) % self.entries[pos].dim
    }

    pub fn digits(&self, index: usize) -> Vec<usize> {
        (0..self.entries.len())
            .map(|p| self.digit(index, p))
            .collect()
    }

    pub fn compose(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.strides).map(|(d, s)| d * s).sum()
    }

    /// Appends the entries of `other`; labels must stay unique.
    pub fn extend(&self, other: &SubsystemSpec) -> Result<Self> {
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Self::new(entries)
    }

    pub fn push(&self, sub: Subsystem) -> Result<Self> {
        let mut entries = self.entries.clone();
        entries.push(sub);
        Self::new(entries)
    }

    /// Returns the spec restricted to `labels`, in the given order.
    pub fn subset(&self, labels: &[&str]) -> Result<Self> {
        let entries = labels
            .iter()
            .map(|l| self.entry(l).cloned())
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    pub fn labels_of_kind(&self, kind: SubsystemKind) -> Vec<String> {
        self.entries
            .iter()
            .filter(|e| e.kind == kind)
            .map(|e| e.label.clone())
            .collect()
    }
}

#[derive(Default)]
pub struct SpecBuilder {
    entries: Vec<Subsystem>,
    cap: Option<usize>,
}

impl SpecBuilder {
    pub fn atom(mut self, label: impl Into<String>) -> Self {
        self.entries.push(Subsystem {
            label: label.into(),
            dim: 3,
            kind: SubsystemKind::Atom,
        });
        self
    }

    pub fn cavity(mut self, label: impl Into<String>) -> Self {
        self.entries.push(Subsystem {
            label: label.into(),
            dim: 2,
            kind: SubsystemKind::Cavity,
        });
        self
    }

    pub fn bath_mode(mut self, label: impl Into<String>) -> Self {
        self.entries.push(Subsystem {
            label: label.into(),
            dim: 2,
            kind: SubsystemKind::BathMode,
        });
        self
    }

    pub fn register(mut self, label: impl Into<String>, dim: usize) -> Self {
        self.entries.push(Subsystem {
            label: label.into(),
            dim,
            kind: SubsystemKind::Register,
        });
        self
    }

    pub fn cap(mut self, cap: usize) -> Self {
        self.cap = Some(cap);
        self
    }

    pub fn build(self) -> Result<SubsystemSpec> {
        SubsystemSpec::with_cap(self.entries, self.cap.unwrap_or(tol::DIMENSION_CAP))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strides_are_row_major() {
        let s = SubsystemSpec::builder()
            .atom("1")
            .atom("2")
            .cavity("cav")
            .build()
            .unwrap();
        assert_eq!(s.dim(), 18);
        assert_eq!(s.strides(), &[6, 2, 1]);
        let idx = s.compose(&[1, 2, 0]);
        assert_eq!(s.digits(idx), vec![1, 2, 0]);
    }

    #[test]
    fn rejects_duplicates_and_bad_dims() {
        let dup = SubsystemSpec::builder().atom("a").atom("a").build();
        assert_eq!(dup.unwrap_err(), Error::DuplicateLabel("a".into()));
        let bad = SubsystemSpec::new(vec![Subsystem {
            label: "c".into(),
            dim: 3,
            kind: SubsystemKind::Cavity,
        }]);
        assert!(matches!(bad, Err(Error::InvalidSubsystem { .. })));
    }

    #[test]
    fn dimension_cap_enforced() {
        let r = SubsystemSpec::builder().atom("a").atom("b").cap(8).build();
        assert!(matches!(r, Err(Error::DimensionCap { .. })));
    }
}
