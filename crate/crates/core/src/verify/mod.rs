//! Numerical verifiers for the uniqueness argument.

mod flatten;
mod uniqueness;

pub use flatten::{
    check_flat_tangential, check_flat_transmission, flatten_field, pull_back_transmission_residual,
    FlatteningTransform, HeightFunction, PhaseFields, COND_MAX,
};
pub use uniqueness::{
    energy_check, estimate_lipschitz, flat_coordinates, gronwall_check, k_agree, phi_functional, psi_energy,
    twin_experiment, GronwallFit, PerturbedTwin, TwinReport, TwinSample, UniquenessMonitor, ZeroTwin,
    ATOL_UNIQUE, K_FLOOR, K_REL_TOL, K_SLACK,
};
