//! Absolute separability of qubit-qudit states and measures of
//! non-absolute separability (NAS).
//!
//! A state is absolutely separable (AS) when no global unitary can entangle
//! it. In `2 x d` this is decided by its spectrum alone. This crate provides
//! the AS geometry, distance-based NAS measures (closed forms and a numerical
//! minimiser over the AS set), the witness-based measure, metric segment
//! bounds, and the randomised verification suites used by the CLI.

pub mod as_geometry;
pub mod error;
pub mod io;
pub mod metric_bounds;
pub mod nas_distance;
pub mod nas_witness;
pub mod optim;
pub mod qcore;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
