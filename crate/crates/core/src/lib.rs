pub mod cli;
pub mod cstar;
pub mod ergodic;
pub mod error;
pub mod folner;
pub mod gns;
pub mod harness;
pub mod hilbert_module;
pub mod linalg;
pub mod literal;
pub mod sequences;

pub use error::{Error, Result};
