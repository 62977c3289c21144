//! Exact Q-linear algebra on finitely generated subspaces of the reals.
//!
//! Vectors are finite rational combinations of named real symbols (`one`,
//! `sqrt2`, `pi`, ...). Symbols are treated as Q-linearly independent by
//! fiat. On top of that the crate builds greedy Hamel bases from explicit
//! enumerations, kernel/complement/range decompositions of Q-linear maps,
//! inner products induced by declaring a basis orthonormal, and the
//! coefficient-sum functional `J` with certificates for its continuity
//! behaviour under the induced and absolute-value topologies.
//!
//! Everything is a finite stand-in: the uncountable Hamel basis of R over Q
//! is out of computational reach, so every vector here lives in a declared
//! finite span. Extending scalars from Q to R is not modelled.

pub mod error;
pub mod exactnum;
pub mod innerprod;
pub mod jprobe;
pub mod linmap;
pub mod qspace;

pub use error::{Error, Result};
pub use exactnum::{AbsOrdering, Evaluator, IntervalValue, Rational, ValueExpr};
pub use innerprod::{AdaptedFrame, NormSq};
pub use jprobe::{build_j_operator, Claim, JOperator, ProbeCertificate, Verdict};
pub use linmap::{KernelDecomposition, LinearMap, RangeBasis};
pub use qspace::{BasisList, Enumeration, FormalVector, Space, SymbolId};
