//! Exact verification of Bott-type vanishing for sheaves of logarithmic
//! differential forms on smooth projective toric varieties.

pub mod error;
pub mod exactmath;

pub use error::{Error, Result};

pub mod danilov;
pub mod divisors;
pub mod fan;
pub mod suite;
pub mod certifier;
pub mod counterexample;
pub mod cli;
