//! Exact arithmetic for the lattice-theoretic side of the smooth
//! classification of simply connected elliptic surfaces: intersection
//! lattices, kappa-fixing isometries, walls and suitable chambers,
//! Donaldson-polynomial coefficient formulas and multiplicity recovery.

// index loops mirror the matrix formulas they implement
#![allow(clippy::needless_range_loop)]

pub mod classify;
pub mod cli;
pub mod error;
pub mod invariants;
pub mod isometry;
pub mod lattice;
pub mod matrix;
pub mod poly;
pub mod search;
pub mod series;
pub mod walls;

pub use error::{Error, ErrorKind, Result};
