//! Hamiltonians of the atom-cavity-bath system and exact evolution over
//! pulse schedules.

mod evolve;
mod hamiltonian;
mod pulses;
mod single_atom;

pub use evolve::{evolve, propagator};
pub use hamiltonian::{
    bath_hamiltonian, excitation_number, raman_hamiltonian, BathMode, BathSpec, RamanCoupling,
    MAX_BATH_MODES,
};
pub use pulses::{free_evolution, run_pulses, CavityEnv, Pulse, PulseSchedule};
pub use single_atom::{single_atom_op, SingleAtomOp};
