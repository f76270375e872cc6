//! Minimizer u₁, truncation J, mountain-pass solution u₂, thresholds and
//! verification probes.

mod lambda;
mod minimize;
mod mountain_pass;
mod newton;
mod probes;
mod truncation;

pub use lambda::{find_lambda_star, lambda1_estimate, LambdaStar, SweepRow, ThresholdProbe, EPS_NEG};
pub use minimize::{
    minimize_energy, minimize_multistart, plateau_height, plateau_witness, random_field, start_pool, MinimizeReport,
};
pub use mountain_pass::{
    mountain_pass, ring_probe, MountainPassOptions, MountainPassOutcome, MountainPassReport, MountainPassState,
    RingReport,
};
pub use newton::{IterRecord, SolverOptions};
pub use probes::{
    coercivity_probe, energy_agreement, flux_gap, flux_monotonicity_check, verify_ordering_and_sign,
    CoercivityReport, EnergyAgreement, FluxReport, OrderingReport, ORDERING_TOL,
};
pub use truncation::{assemble_gradient_j, assemble_j, Truncation, TruncatedReaction};
