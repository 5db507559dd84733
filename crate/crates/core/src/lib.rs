//! Richardson-Gaudin integrable models and their contraction to the Dicke model.

pub mod algebra;
pub mod branches;
pub mod cli;
pub mod dicke;
pub mod error;
pub mod families;
pub mod oracle;
pub mod rg_core;
pub mod solver;

pub use error::{Error, Result};
