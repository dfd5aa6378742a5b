#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod spectral;

pub use error::{Error, Result};
pub mod cli;
pub mod conditions;
pub mod dynamics;
pub mod fields;
pub mod io;
pub mod norms;
pub mod verification;
