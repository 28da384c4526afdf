//! Exact local formula for the Euler number of an affinely foliated sphere
//! bundle, together with the triangulation algorithms it relies on and a
//! desk-scale laboratory over the 2-torus.

pub mod error;
pub mod exactgeom;
pub mod exec;
pub mod fixtures;
pub mod localformula;
pub mod toruslab;
pub mod triangulations;
pub mod verify;

pub use error::{Error, Result};
