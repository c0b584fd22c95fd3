//! Verification statistics: Gowers norms of independent sets, subgraph
//! counts and their predictions, containment frequencies, and balance and
//! Turán exponents of templates.

mod balance;
mod counting;
mod gowers;

pub use balance::{
    balance_check, degcond_predictor, min_span, template_corpus, turan_exponent, BalanceVerdict, DegcondPrediction,
    DegcondRow,
};
pub use counting::{
    contained_count, containment_frequency, count_contained, families_conflict, intersection_profile,
    ContainedCount, ContainmentEstimate, DeltaRatio, IntersectionProfile,
};
pub use gowers::{gowers_norm, DEFAULT_BUDGET};
