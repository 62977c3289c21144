//! Benchmark fixtures shared by the criterion targets.

use hamel_core::qspace::bundled::prime_root_space;
use hamel_core::qspace::greedy_extract;
use hamel_core::{Evaluator, JOperator, Space};

/// The bundled prime-root space with `symbols` symbols.
pub fn space(symbols: usize) -> Space {
    prime_root_space(symbols)
}

/// `J` with the whole unit basis as its chain.
pub fn operator(space: &Space) -> JOperator {
    let basis = greedy_extract(&space.units());
    JOperator::build(&Evaluator::new(space), &basis, 0..basis.len()).expect("prime roots give a valid chain")
}
