// `!(x > 0)` style guards are kept so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod generators;
pub mod harness;
pub mod hypergraph;
pub mod process;
pub mod scalar;
pub mod trajectory;

pub use error::{Error, Result};
pub use hypergraph::{EdgeFamily, Hypergraph, Vertex};

/// Double-precision trajectory parameters.
pub type Params = trajectory::TrajectoryParams<f64>;
/// Single-precision trajectory parameters.
pub type Params32 = trajectory::TrajectoryParams<f32>;

pub const VERSION: &str = concat!("hygreedy ", env!("CARGO_PKG_VERSION"));
