//! Social coordination games in exact rational arithmetic.
//!
//! Players pick one of `m` strategies and earn an intrinsic preference plus
//! a share of every relationship whose other end picked the same strategy.
//! The crate builds exact, approximate and strong equilibria, verifies them
//! exhaustively at small scale, computes stabilizing payments and potential
//! certificates, and extends the dynamics to table, hypergraph and ω-games.
//!
//! Indices are 0-based throughout the library.

pub mod analysis;
pub mod bounds;
pub mod dynamics;
pub mod error;
pub mod game;
pub mod generalized;
pub mod generators;
pub mod io;
pub mod model;
pub mod numeric;
pub mod par;
pub mod potentials;
pub mod profile;

#[cfg(test)]
mod properties;

pub use error::{Error, Result};
pub use game::Game;
pub use model::{Edge, GameInstance};
pub use numeric::{Extended, Num, Threshold};
pub use par::Exec;
pub use profile::{Profile, ProfileSpace, ENUMERATION_LIMIT};
