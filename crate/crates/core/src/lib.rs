//! Odd nilpotent orbits and Springer fibers of `osp(2n+1, 2n)`.

pub mod cli;
pub mod diagram;
pub mod error;
pub mod exactalg;
pub mod fiber;
pub mod realize;
pub mod slicing;

pub use error::{Error, Result};
