//! Finite order conditions, MIN-trees and pigeonhole arrays.
//!
//! Conditions are injective sequences over `[0, n)`. The crate builds
//! uniform trees and their envelopes, validates and searches pigeonhole
//! arrays, compiles bounded-depth oracle programs into condition families,
//! and plays the generic forcing game over several frames. Small instances
//! are cross-checked against brute-force enumeration in [`bruteforce`].

pub mod arrays;
pub mod bruteforce;
pub mod error;
pub mod frame;
pub mod game;
pub mod machines;
pub mod poset;
pub mod trees;
pub mod variants;
pub mod verify;

pub use error::{Error, Result};
pub use frame::{Frame, OrderFrame};
pub use poset::{Compatibility, Condition, Universe};
