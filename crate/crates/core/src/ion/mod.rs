//! Trapped-ion realizations of the global entangling gates.

pub mod bichromatic;
pub mod fock;
pub mod trap;

pub use bichromatic::{
    closed_form_spin_block, collective_squared_exp, displacement_envelope, sm_propagator,
    BichromaticParams, SpinBasis,
};
pub use fock::{fock_simulate, FockEvolution, FockOptions};
pub use trap::{
    axial_hessian, dimensionless_couplings, equilibrium_positions, free_evolution, magic_couplings,
    TrapSpec,
};
