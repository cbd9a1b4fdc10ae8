//! Failure of Peano's theorem on `c0`.
//!
//! The field `f_n(x) = sqrt|x_n| + 1/(n+1)` is spread over the blocks of a
//! partition and summed with `l1` weights; the resulting continuous field
//! admits no local solution through any point.

mod field;
mod ode;
mod witness;

pub use field::{
    combined_eval, dieudonne_coord, l1_bound_check, lipschitz_transfer_check, partial_combined_coord, spread_coord,
    spread_evaluation_matrix, spread_independence_rank, CoordinateField, L1Coefficients, TruncatedPoint,
};
pub use ode::{
    analytic_time, antiderivative, integrate_scalar, refined_step, rk4_step, ScalarCauchyProblem, Trajectory,
    KINK_REFINEMENT_DEPTH,
};
pub use witness::{coordinate_problem, peano_failure_witness, BlowupWitness, SampledCoordinate, WitnessConfig};
