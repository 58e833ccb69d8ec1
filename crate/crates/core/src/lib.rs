//! Exact arithmetic over the rational function field `F_q(t)`.

pub mod acceptance;
pub mod arith;
pub mod definability;
pub mod dirichlet;
pub mod error;
pub mod gf;
pub mod places;
pub mod poly;
pub mod quaternion;
pub mod ratfunc;
pub mod symbols;
pub mod text;

pub use error::{Error, Result};
pub use gf::{Field, FieldElem};
pub use places::Place;
pub use poly::{Factorization, Poly};
pub use ratfunc::RatFunc;
pub use symbols::SymbolValue;
