//! Symbolic computation with hyperidentities.
//!
//! * [`typesys`]: similarity types and the order they are compared by.
//! * [`term`]: terms, hyperterms, identities, parsing and enumeration.
//! * [`hyper`]: the hyperidentity catalog and expansion into identity sets.
//! * [`rewrite`]: bounded derivation search and proof checking.
//! * [`freealg`]: relatively free semigroups by bounded congruence closure.
//! * [`words`]: Thue–Morse and square-free words.
//! * [`witness`]: the alternating two-operation term towers and instance censuses.

pub mod error;
pub mod freealg;
pub mod hyper;
pub mod rewrite;
pub mod term;
pub mod typesys;
pub mod witness;
pub mod words;

pub use error::{Error, Result};
