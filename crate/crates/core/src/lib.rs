// NaN-rejecting guards are written as `!(x > 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod cli;
pub mod cubic;
pub mod decay;
pub mod error;
pub mod io;
pub mod modal;
pub mod numeric;
pub mod regions;
pub mod resolvent;
pub mod spectrum;

pub use error::{LabError, Result};
