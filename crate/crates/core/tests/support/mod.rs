//! Brute-force oracles that share no code with the crate's elimination.

#![allow(dead_code)]

use std::collections::BTreeSet;

use hamel_core::qspace::{bundled, FormalVector, Space, SymbolId};
use hamel_core::Rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Rank by dense Gauss elimination over the union of supports.
pub fn rank(vectors: &[&FormalVector]) -> usize {
    let cols: Vec<SymbolId> = vectors
        .iter()
        .flat_map(|v| v.iter().map(|(s, _)| s))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut m: Vec<Vec<Rational>> = vectors
        .iter()
        .map(|v| cols.iter().map(|&c| v.coeff(c).cloned().unwrap_or_default()).collect())
        .collect();
    let mut r = 0;
    for c in 0..cols.len() {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                let pivot_row = m[r].clone();
                for (x, p) in m[i].iter_mut().zip(&pivot_row) {
                    *x -= &(&f * p);
                }
            }
        }
        r += 1;
    }
    r
}

/// Lexicographically first maximum independent index set, found by trying
/// every subset.
pub fn lex_first_basis(items: &[FormalVector]) -> Vec<usize> {
    let full = rank(&items.iter().collect::<Vec<_>>());
    let mut best: Option<Vec<usize>> = None;
    for mask in 0u32..(1 << items.len()) {
        if mask.count_ones() as usize != full {
            continue;
        }
        let idx: Vec<usize> = (0..items.len()).filter(|i| mask & (1 << i) != 0).collect();
        let chosen: Vec<&FormalVector> = idx.iter().map(|&i| &items[i]).collect();
        if rank(&chosen) == full && best.as_ref().map_or(true, |b| idx < *b) {
            best = Some(idx);
        }
    }
    best.unwrap_or_default()
}

pub fn small_space(symbols: usize) -> Space {
    bundled::prime_root_space(symbols)
}

/// A vector over the first `symbols` units with coefficients in `-k..=k`,
/// occasionally with a non-integer entry.
pub fn random_vector(rng: &mut ChaCha8Rng, space: &Space, symbols: usize, k: i64) -> FormalVector {
    let units = space.units();
    let mut v = FormalVector::zero();
    for u in units.iter().take(symbols) {
        if rng.gen_bool(0.6) {
            let n = rng.gen_range(-k..=k);
            let d = if rng.gen_bool(0.2) { rng.gen_range(2..=3) } else { 1 };
            v.add_scaled(&Rational::new(n, d).unwrap(), u);
        }
    }
    v
}

/// Seeded enumerations of at most 8 vectors over at most 5 symbols, biased
/// towards repeats and multiples.
pub fn greedy_instances(seed: u64, count: usize) -> Vec<(Space, Vec<FormalVector>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let symbols = rng.gen_range(1..=5);
            let space = small_space(symbols);
            let len = rng.gen_range(0..=8);
            let mut items: Vec<FormalVector> = Vec::with_capacity(len);
            for _ in 0..len {
                let v = if !items.is_empty() && rng.gen_bool(0.25) {
                    let i = rng.gen_range(0..items.len());
                    items[i].scale(&Rational::from(rng.gen_range(-2..=2)))
                } else {
                    random_vector(&mut rng, &space, symbols, 2)
                };
                items.push(v);
            }
            (space, items)
        })
        .collect()
}

/// Exact `lo <= sqrt(r) <= hi` by squaring, for `lo >= 0`.
pub fn brackets_sqrt(lo: &Rational, hi: &Rational, r: &Rational) -> bool {
    lo.signum() >= 0 && lo.square() <= *r && *r <= hi.square()
}
