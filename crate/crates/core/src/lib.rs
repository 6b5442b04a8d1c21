pub mod cli;
pub mod compat;
pub mod error;
pub mod feasibility;
pub mod observable;
pub mod operator;
pub mod qubit;
pub mod stacks;
pub mod symmetry;

pub use error::{Error, Result};
