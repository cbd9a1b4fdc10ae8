//! Spreading a scalar mother vector over the blocks of a partition and
//! tensoring with uniform isomorphs of a model space.

mod family;
mod operator;
mod plus;
mod tensor;

pub use family::{ComponentNorm, ComponentSpaceFamily, IsomorphFamily, ScaleProfile};
pub use operator::{
    range_decay_check, range_divergence_certificate, range_independence_check, t_coord, t_norm_bound_check, ChainCheck,
    IndependenceReport, NormBoundReport, RangeCertificate, RangeDecay, SpreadOperator, TERMWISE_RTOL,
};
pub use plus::{plus_space_cauchy_check, PlusSpaceLadder, PlusSpaceReport, RungReport, DEFAULT_RUNGS};
pub use tensor::{block_restricted_partial, make_y, tensor_coord, tilde_s, TensorSequence};
