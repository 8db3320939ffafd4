//! Exact state-vector simulator for cavity-QED joint measurements, EPR-pair
//! distribution over a lossy photonic link, and a purified two-bit gate.
//!
//! The linear-algebra and Hamiltonian layers ([`hilbert`], [`linalg`],
//! [`dynamics`]) are generic over the [`Real`] scalar; the protocol layers
//! run in double precision through the aliases below.

pub mod channels;
pub mod cli;
pub mod dynamics;
mod error;
pub mod experiments;
pub mod hilbert;
pub mod linalg;
pub mod protocols;
mod scalar;
pub mod tol;

pub use error::{Error, Result};
pub use scalar::{cplx, phase, Real};

/// Double-precision complex amplitude.
pub type C64 = num_complex::Complex<f64>;
/// Double-precision state vector.
pub type StateVector = hilbert::StateVector<f64>;
/// Double-precision sparse operator.
pub type LinearOp = hilbert::LinearOp<f64>;
/// Double-precision Raman coupling.
pub type RamanCoupling = dynamics::RamanCoupling<f64>;
/// Double-precision bath description.
pub type BathSpec = dynamics::BathSpec<f64>;
/// Double-precision pulse schedule.
pub type PulseSchedule = dynamics::PulseSchedule<f64>;

pub use hilbert::{SubsystemKind, SubsystemSpec};
