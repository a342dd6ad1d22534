//! Exact characteristic polyhedra of ideals in regular local rings of
//! equal characteristic, with the preparation, blow-up and Hilbert-polynomial
//! machinery used to follow a two-dimensional resolution locally.

pub mod algebra;
pub mod blowup;
pub mod charpoly;
pub mod error;
pub mod hilbert;
pub mod lp;
pub mod polyhedron;
pub mod preparation;
pub mod resolve;

pub use error::{Error, Result};
