//! Constructors for the hypergraph families studied here: copies of a fixed
//! template, arithmetic progressions and sum triples in `Z_N`, labeled
//! `d`-cubes, and random instances for testing.

mod arith;
mod labeled;
mod random;
mod template;

pub use arith::{d_cube, is_prime, k_ap, k_ap_labeled, sum_free};
pub use labeled::LabeledFamily;
pub use random::random_uniform;
pub use template::{colex_rank, pair_index, template_copies, Template};
