//! Deciding whether a distribution is compatible with a hypergraph.
//!
//! A [`Witness`] extends the distribution with one noise variable per arc. It is
//! valid when the noise variables are mutually independent and each arc's
//! sources, together with its noise, determine its targets.

mod bn;
mod decide;
mod transport;
mod witness;

pub use bn::{bn_violation, bn_witness, decide_bn, LocalViolation};
pub use decide::{
    decide_general, decide_parallel_func, Certificate, CompatVerdict, GeneralOptions, ParallelClause, ParallelReport,
};
pub use transport::{extend_to, transport_witness, with_unit_noise, UNIT_VALUE};
pub use witness::{verify_witness, Check, Witness, WitnessReport};
