//! Reputation-based cooperation on k-regular networks.
//!
//! Agents of fixed type (cooperator or cheater) play a repeated prisoner's
//! dilemma. Each agent remembers the last action of every partner, and in the
//! networked variant also consults the opinions of neighbours it still trusts.
//! The experiment harness estimates the number of plays per agent after which
//! cooperating pays better than cheating, and relates that threshold to the
//! average clustering coefficient of the interaction network.

pub mod cli;
pub mod error;
pub mod experiment;
pub mod format;
pub mod game;
pub mod graphs;
pub mod oracle;

pub use error::{Error, Result};
