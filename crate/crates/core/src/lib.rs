//! Programmable spin-rotation gates: closed-form fidelity bounds, exact
//! channel simulation and a measure-and-operate benchmark.

pub mod angle;
pub mod channel;
pub mod cli;
pub mod closed_forms;
pub mod covariant;
pub mod error;
pub mod linalg;
pub mod optimize;
pub mod protocols;
pub mod quadrature;
pub mod recycling;
pub mod report;
pub mod spin;

pub use error::{Error, Result};
