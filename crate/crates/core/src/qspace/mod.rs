//! Formal Q-vector spaces over declared real symbols.
//!
//! A well-order of the space is replaced by an explicit finite
//! [`Enumeration`]; greedy constructions always take its first eligible item.

mod basis;
pub mod bundled;
mod space;
mod vector;

pub use basis::{coordinates, extend_greedy, greedy_extract, span_solve, BasisList};
pub use space::{Space, Symbol, SymbolId, ONE};
pub use vector::{Enumeration, FormalVector};
