//! Finite inverse semigroups, pseudogroups, and their Morita theory.
//!
//! Every structure is finite and stored as index tables. Constructors validate
//! their input exhaustively and return a typed error carrying a witness when a
//! law fails.

pub mod action;
pub mod bimodule;
pub mod bits;
pub mod catalog;
pub mod enlargement;
pub mod invariants;
pub mod io;
pub mod lattice;
pub mod presentation;
pub mod pseudogroup;
pub mod quantale;
pub mod semigroup;
pub mod sheaf;

pub use pseudogroup::Pseudogroup;
pub use semigroup::{CayleyTable, Compatibility, Element, InverseSemigroup};
