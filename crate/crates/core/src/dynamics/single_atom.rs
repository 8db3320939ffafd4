use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hilbert::{level, LinearOp, StateVector, SubsystemKind};
use crate::scalar::{phase, Real};
use crate::tol;

/// Error-free single-atom operations on the three atomic levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SingleAtomOp<T> {
    /// `|1> -> -|r>`, `|r> -> -|1>`: maps `-|r>` to `|1>`.
    Exchange1r,
    /// `|0> <-> |r>`.
    Exchange0r,
    /// `|1> <-> |r>` without sign.
    Swap1r,
    /// `|0> <-> |1>`.
    Not01,
    /// Hadamard on the qubit levels.
    Hadamard01,
    /// `Z` on the qubit levels.
    PhaseZ,
    /// `exp(i theta)` on `|1>`.
    PhaseOne(T),
    /// `exp(-i theta)` on `|r>`.
    PhaseR(T),
    /// Incoherent transfer `|r> -> |1>`, modeled as a relabeling that is
    /// only defined when no branch holds both levels.
    OpticalPumpRTo1,
}

impl<T: Real> SingleAtomOp<T> {
    /// Unitary matrix (row-major, 3x3) of the coherent operations.
    pub fn matrix(&self) -> Option<[[Complex<T>; 3]; 3]> {
        let o = Complex::zero();
        let l = Complex::new(T::one(), T::zero());
        let m = -l;
        let h = Complex::new(T::lit(std::f64::consts::FRAC_1_SQRT_2), T::zero());
        Some(match *self {
            Self::Exchange1r => [[l, o, o], [o, o, m], [o, m, o]],
            Self::Exchange0r => [[o, o, l], [o, l, o], [l, o, o]],
            Self::Swap1r => [[l, o, o], [o, o, l], [o, l, o]],
            Self::Not01 => [[o, l, o], [l, o, o], [o, o, l]],
            Self::Hadamard01 => [[h, h, o], [h, -h, o], [o, o, l]],
            Self::PhaseZ => [[l, o, o], [o, m, o], [o, o, l]],
            Self::PhaseOne(theta) => [[l, o, o], [o, phase(theta), o], [o, o, l]],
            Self::PhaseR(theta) => [[l, o, o], [o, l, o], [o, o, phase(-theta)]],
            Self::OpticalPumpRTo1 => return None,
        })
    }

    pub fn to_op(
        &self,
        spec: &crate::hilbert::SubsystemSpec,
        atom: &str,
    ) -> Result<Option<LinearOp<T>>> {
        let Some(m) = self.matrix() else {
            return Ok(None);
        };
        let flat: Vec<Complex<T>> = m.iter().flatten().copied().collect();
        Ok(Some(LinearOp::from_dense(spec, &[atom], &flat)?))
    }
}

/// Applies an error-free single-atom operation.
pub fn single_atom_op<T: Real>(
    s: &StateVector<T>,
    atom: &str,
    kind: SingleAtomOp<T>,
) -> Result<StateVector<T>> {
    let e = s.spec().entry(atom)?;
    if e.kind != SubsystemKind::Atom {
        return Err(Error::SpecMismatch(format!("`{atom}` is not an atom")));
    }
    match kind.to_op(s.spec(), atom)? {
        Some(op) => op.apply(s),
        None => optical_pump(s, atom),
    }
}

fn optical_pump<T: Real>(s: &StateVector<T>, atom: &str) -> Result<StateVector<T>> {
    let spec = s.spec();
    let pos = spec.position(atom)?;
    let stride = spec.strides()[pos];
    let amps = s.amplitudes();
    let eps = T::lit(tol::NEGLIGIBLE);
    let mut out = amps.to_vec();
    for (i, a) in amps.iter().enumerate() {
        if spec.digit(i, pos) != level::R {
            continue;
        }
        let j = i - (level::R - level::ONE) * stride;
        if a.norm() > eps && amps[j].norm() > eps {
            return Err(Error::AmbiguousPump(atom.to_string()));
        }
        out[j] += *a;
        out[i] = Complex::zero();
    }
    StateVector::from_amplitudes(spec.clone(), out)
}
