//! Exact modular data for spin and super-modular categories.
//!
//! Everything is computed over cyclotomic fields with certified arithmetic:
//! S-matrices, twists, fusion rules via the Verlinde formula, fermionic
//! gradings and quotients, zesting, twisted Drinfeld doubles of small finite
//! groups, and boson condensation, together with the concrete families they
//! are exercised on (SU(2)_k and its even part, pointed categories from
//! metric groups, Ising theories, and the sixteen minimal closures of the
//! even part of SU(2)_{4m+2}).

pub mod cyclo;
pub mod error;
pub mod interval;

pub use error::{Error, Result};
pub mod cli;
pub mod doubles;
pub mod moddata;
