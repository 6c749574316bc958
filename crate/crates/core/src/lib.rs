//! Exact prime-factor-count statistics on short intervals and numerical
//! evaluation of the Hildebrand-Tenenbaum density.

pub mod convolution;
pub mod counts;
pub mod density;
pub mod divisor;
pub mod error;
pub mod minorants;
pub mod numeric;
pub mod sieve;

pub use error::{Error, Result};
