//! Rate regions of the Gaussian MIMO cognitive channel.
//!
//! A licensed transmitter/receiver pair shares the medium with a cognitive
//! pair whose transmitter knows the licensed message. This crate evaluates
//! and optimizes the dirty-paper-coding achievable region, a family of
//! outer bounds indexed by a scaling α, and the checks that tie them
//! together.

pub mod achievable;
pub mod boundary;
pub mod channel;
pub mod error;
pub mod matrix;
pub mod mc;
pub mod optimizer;
pub mod outer;
mod parallel;

pub use achievable::{
    dpc_rates, feasibility_violation, is_feasible, mu_sum_achievable, trace_boundary,
    DpcAllocation, MuSumSolution, RatePair,
};
pub use boundary::{BoundaryPoint, RegionBoundary, Witness, CSV_HEADER, SCHEMA_VERSION};
pub use channel::{
    composite_matrices, load_channel, scaled_channel, Antennas, ChannelSpec, CognitiveChannel,
    CompositeMatrices, SignalMode,
};
pub use error::{Error, Result};
pub use matrix::{
    is_psd, log_det_id_plus, log_det_pd, project_psd, CMatrix, CholeskyParam, HermitianMatrix,
    PsdMatrix,
};
pub use mc::mc_mutual_info;
pub use optimizer::{normalized, SolverSettings};
pub use outer::{
    bc_mu_sum, bc_rates, bound_report, condition_check, inf_alpha_partial_outer, inf_sigma_z,
    mu_sum_outer, mu_sum_partial_outer, outer_rates, partial_outer_rates, trace_outer_boundary,
    BoundReport, ConditionCheck, NoiseCoupling, OuterAllocation, PartialOuterAllocation,
};
pub use parallel::workers;
