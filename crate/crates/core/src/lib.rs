//! Hasse–Weil L-functions of elliptic curves over F_q(t), computed from point
//! counts at places, and the Chebyshev-bias prime races they govern.

pub mod arith;
pub mod cli;
pub mod config;
pub mod curve;
mod ecgroup;
pub mod error;
pub mod euler;
pub mod field;
pub mod io;
pub mod limit;
pub mod lpoly;
pub mod places;
pub mod poly;
pub mod qsqrt;
pub mod race;
pub mod sympower;
pub mod twist;
pub mod ulmer;

pub use error::{Error, Result};
pub use field::{make_field, FieldContext, FieldElement};
pub use places::{count_places, places_of_degree, Place, PlaceKind};
pub use poly::Poly;
