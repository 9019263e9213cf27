// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod core;
pub mod error;
pub mod harness;
pub mod jost;
pub mod linalg;
pub mod quad;
pub mod rhp;
pub mod scattering;
pub mod simulator;
pub mod solitons;

pub use crate::core::{ConeCoords, FieldState, SampledComplexFunction};
pub use error::{Error, Result};

pub type C64 = num_complex::Complex64;
