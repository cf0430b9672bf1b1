//! Finite rank-3 polar spaces, their generalized quadrangles, and constructive
//! root elations checked exhaustively against independent oracles.

pub mod configs;
pub mod error;
pub mod eta;
pub mod extend;
pub mod field;
pub mod form;
pub mod frames;
pub mod geometry;
pub mod gq_elation;
pub mod h3;
pub mod oracle;
pub mod pentagon;
pub mod perm;
pub mod realize;
pub mod report;
pub mod subspace;
pub mod suite;
pub mod verify;

pub use error::{Error, Result};
