//! Explicit constructions behind two mother-vector spaceability arguments,
//! with finite numerical certificates for every estimate they rely on.
//!
//! * [`sequence`], [`partition`] and [`norm`] provide formula-defined
//!   sequences, block decompositions of the positive integers and certified
//!   `l_q` computations.
//! * [`peano`] builds Dieudonné's field on `c_0`, its spreads over blocks,
//!   the combined fields `L(a)` and blow-up witnesses for `u' = L(a)(u)`.
//! * [`spread`] builds the operator `T(w) = sum_j y_j (x) w_j` into
//!   `(sum X_n)_p`-type spaces and certifies that its range avoids the
//!   smaller spaces.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
mod linalg;
pub mod norm;
pub mod partition;
pub mod peano;
pub mod sequence;
pub mod spread;

pub use error::{Error, Result};
pub use linalg::rank;
pub use norm::{BoundCheck, ConvergenceVerdict, DecayIndex, NormPolicy};
pub use partition::{BlockIndex, PartitionScheme};
pub use sequence::{ScalarSequence, TailEnvelope};
