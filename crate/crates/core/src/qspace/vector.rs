use std::collections::BTreeMap;
use std::ops::{Add, Index, Neg, Sub};

use crate::exactnum::Rational;

use super::SymbolId;

/// A finite Q-combination of symbols. Zero coefficients are never stored, so
/// the empty combination is θ.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FormalVector {
    terms: BTreeMap<SymbolId, Rational>,
}

impl FormalVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn unit(sym: SymbolId) -> Self {
        Self {
            terms: BTreeMap::from([(sym, Rational::one())]),
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (SymbolId, Rational)>) -> Self {
        let mut v = Self::zero();
        for (sym, c) in terms {
            v.add_term(sym, &c);
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, sym: SymbolId) -> Option<&Rational> {
        self.terms.get(&sym)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (SymbolId, &Rational)> + '_ {
        self.terms.iter().map(|(s, c)| (*s, c))
    }

    pub fn support_len(&self) -> usize {
        self.terms.len()
    }

    /// Highest-indexed symbol with a nonzero coefficient.
    pub fn last_term(&self) -> Option<(SymbolId, &Rational)> {
        self.terms.iter().next_back().map(|(s, c)| (*s, c))
    }

    pub fn add_term(&mut self, sym: SymbolId, coeff: &Rational) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(sym).or_insert_with(Rational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&sym);
        }
    }

    /// `self += k * other`.
    pub fn add_scaled(&mut self, k: &Rational, other: &FormalVector) {
        if k.is_zero() {
            return;
        }
        for (sym, c) in other.iter() {
            self.add_term(sym, &(k * c));
        }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(s, c)| (*s, c * k)).collect(),
        }
    }

    /// `sum c_i * v_i`.
    pub fn combination<'a>(
        coeffs: impl IntoIterator<Item = &'a Rational>,
        vectors: impl IntoIterator<Item = &'a FormalVector>,
    ) -> Self {
        let mut acc = Self::zero();
        for (c, v) in coeffs.into_iter().zip(vectors) {
            acc.add_scaled(c, v);
        }
        acc
    }
}

impl Add<&FormalVector> for &FormalVector {
    type Output = FormalVector;
    fn add(self, rhs: &FormalVector) -> FormalVector {
        let mut out = self.clone();
        out.add_scaled(&Rational::one(), rhs);
        out
    }
}

impl Add for FormalVector {
    type Output = FormalVector;
    fn add(mut self, rhs: FormalVector) -> FormalVector {
        self.add_scaled(&Rational::one(), &rhs);
        self
    }
}

impl Sub<&FormalVector> for &FormalVector {
    type Output = FormalVector;
    fn sub(self, rhs: &FormalVector) -> FormalVector {
        let mut out = self.clone();
        out.add_scaled(&-Rational::one(), rhs);
        out
    }
}

impl Sub for FormalVector {
    type Output = FormalVector;
    fn sub(mut self, rhs: FormalVector) -> FormalVector {
        self.add_scaled(&-Rational::one(), &rhs);
        self
    }
}

impl Neg for &FormalVector {
    type Output = FormalVector;
    fn neg(self) -> FormalVector {
        self.scale(&-Rational::one())
    }
}

impl Neg for FormalVector {
    type Output = FormalVector;
    fn neg(self) -> FormalVector {
        -&self
    }
}

/// An ordered list of vectors standing in for a well-order: greedy
/// constructions always take the first eligible item.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Enumeration {
    items: Vec<FormalVector>,
}

impl Enumeration {
    pub fn new(items: Vec<FormalVector>) -> Self {
        Self { items }
    }

    pub fn items(&self) -> &[FormalVector] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, FormalVector> {
        self.items.iter()
    }
}

impl FromIterator<FormalVector> for Enumeration {
    fn from_iter<I: IntoIterator<Item = FormalVector>>(iter: I) -> Self {
        Self {
            items: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a Enumeration {
    type Item = &'a FormalVector;
    type IntoIter = std::slice::Iter<'a, FormalVector>;
    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

impl Index<usize> for Enumeration {
    type Output = FormalVector;
    fn index(&self, i: usize) -> &FormalVector {
        &self.items[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    #[test]
    fn cancellation_removes_terms() {
        let a = FormalVector::unit(SymbolId(1));
        let b = a.scale(&rat!(-1));
        assert!((&a + &b).is_zero());
        assert_eq!((&a - &a), FormalVector::zero());
        assert!(a.scale(&rat!(0)).is_zero());
    }

    #[test]
    fn last_term_is_highest_symbol() {
        let v = FormalVector::from_terms([(SymbolId(3), rat!(2)), (SymbolId(0), rat!(5))]);
        assert_eq!(v.last_term().map(|(s, _)| s), Some(SymbolId(3)));
        assert_eq!(v.support_len(), 2);
    }
}
