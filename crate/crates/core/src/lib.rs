//! Moduli of smoothness, Besov and Lizorkin-Triebel norms, and their
//! uniformly localized versions, computed on uniformly sampled functions.

pub mod error;
pub mod grid;
pub mod norms;
pub mod testlab;
pub mod verify;
pub mod windows;

pub use error::{Error, Result};
