pub mod arith;
pub mod error;
pub mod field;

pub use error::{Error, Result};
pub mod bbox;
pub mod harness;
pub mod involutions;
pub mod frobenius;
pub mod bbfield;
pub mod report;
pub mod sl2_odd;
pub mod sl2_char2;
