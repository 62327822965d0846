//! Exact F_p polynomial solutions of sl2 KZ equations and the tools to check them.

pub mod cli;
pub mod construct;
pub mod curves;
pub mod error;
pub mod ffpoly;
pub mod fpintegral;
pub mod field;
pub mod sl2rep;
pub mod suite;
pub mod verify;

pub use error::{Error, Result};
