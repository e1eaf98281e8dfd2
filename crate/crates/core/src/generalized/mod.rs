//! Coordination games beyond pairwise additive utilities.

mod hypergraph;
mod omega;
mod table;

pub use hypergraph::*;
pub use omega::*;
pub use table::*;
