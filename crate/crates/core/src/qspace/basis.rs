use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactnum::Rational;

use super::{Enumeration, FormalVector, SymbolId};

/// One row of the echelon cache: a primitive integer vector whose pivot is
/// its highest-indexed symbol, together with its expression in terms of the
/// basis vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
struct EchelonRow {
    entries: BTreeMap<SymbolId, BigInt>,
    combo: BTreeMap<usize, Rational>,
}

impl EchelonRow {
    fn pivot(&self) -> (SymbolId, &BigInt) {
        let (s, c) = self.entries.iter().next_back().expect("echelon rows are nonzero");
        (*s, c)
    }
}

/// Fraction-free reduction state for one candidate vector `v`:
/// `entries = scale * v + sum combo[i] * basis[i]`.
struct Reduction {
    entries: BTreeMap<SymbolId, BigInt>,
    scale: Rational,
    combo: BTreeMap<usize, Rational>,
}

impl Reduction {
    fn new(v: &FormalVector) -> Self {
        let lcm = v
            .iter()
            .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let entries = v
            .iter()
            .map(|(s, c)| (s, c.numer() * (&lcm / c.denom())))
            .collect();
        Self {
            entries,
            scale: Rational::from_integer(lcm),
            combo: BTreeMap::new(),
        }
    }

    fn divide_content(&mut self) {
        let content = self
            .entries
            .values()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if content.is_zero() || content.is_one() {
            return;
        }
        for c in self.entries.values_mut() {
            *c /= &content;
        }
        let inv = Rational::new(BigInt::one(), content).expect("nonzero content");
        self.scale *= &inv;
        for c in self.combo.values_mut() {
            *c *= &inv;
        }
    }

    /// `self <- p * self - a * row` where `p` is the row's pivot coefficient
    /// and `a` the candidate's coefficient at the same symbol.
    fn eliminate(&mut self, row: &EchelonRow, track: bool) {
        let (pivot_sym, p) = row.pivot();
        let a = self.entries.get(&pivot_sym).cloned().expect("pivot present");
        let unit_pivot = p.is_one();
        if !unit_pivot {
            for c in self.entries.values_mut() {
                *c *= p;
            }
            if track {
                let p = Rational::from_integer(p.clone());
                self.scale *= &p;
                for c in self.combo.values_mut() {
                    *c *= &p;
                }
            }
        }
        for (s, rc) in &row.entries {
            let slot = self.entries.entry(*s).or_insert_with(BigInt::zero);
            *slot -= &a * rc;
            if slot.is_zero() {
                self.entries.remove(s);
            }
        }
        if track {
            let a = Rational::from_integer(a);
            for (i, rc) in &row.combo {
                let slot = self.combo.entry(*i).or_insert_with(Rational::zero);
                *slot -= &(&a * rc);
                if slot.is_zero() {
                    self.combo.remove(i);
                }
            }
        }
        if !unit_pivot {
            self.divide_content();
        }
    }
}

/// An ordered Q-linearly independent list of vectors with a cached echelon
/// form used for span tests and coordinate solves.
#[derive(Clone, Debug, Default)]
pub struct BasisList {
    vectors: Vec<FormalVector>,
    rows: Vec<EchelonRow>,
    pivots: HashMap<SymbolId, usize>,
}

impl PartialEq for BasisList {
    fn eq(&self, other: &Self) -> bool {
        self.vectors == other.vectors
    }
}

impl Eq for BasisList {}

impl BasisList {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fails with [`Error::Dependent`] unless `vectors` are independent.
    pub fn from_independent(vectors: impl IntoIterator<Item = FormalVector>) -> Result<Self> {
        let mut basis = Self::new();
        for v in vectors {
            if !basis.push_if_independent(v) {
                return Err(Error::Dependent);
            }
        }
        Ok(basis)
    }

    pub fn vectors(&self) -> &[FormalVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&FormalVector> {
        self.vectors.get(i)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, FormalVector> {
        self.vectors.iter()
    }

    fn reduce(&self, v: &FormalVector, track: bool) -> Reduction {
        let mut red = Reduction::new(v);
        while let Some((&sym, _)) = red.entries.iter().next_back() {
            match self.pivots.get(&sym) {
                Some(&r) => red.eliminate(&self.rows[r], track),
                None => break,
            }
        }
        red
    }

    pub fn contains(&self, v: &FormalVector) -> bool {
        self.reduce(v, false).entries.is_empty()
    }

    /// Appends `v` when it is outside the current span; returns whether it was
    /// appended. θ is never appended.
    pub fn push_if_independent(&mut self, v: FormalVector) -> bool {
        let red = self.reduce(&v, true);
        if red.entries.is_empty() {
            return false;
        }
        let index = self.vectors.len();
        let mut red = red;
        red.divide_content();
        let Reduction {
            mut entries,
            scale,
            mut combo,
        } = red;
        combo.insert(index, scale);
        let negate = entries.values().next_back().is_some_and(|p| p.is_negative());
        if negate {
            for c in entries.values_mut() {
                *c = -&*c;
            }
            for c in combo.values_mut() {
                *c = -&*c;
            }
        }
        let row = EchelonRow { entries, combo };
        self.pivots.insert(row.pivot().0, self.rows.len());
        self.rows.push(row);
        self.vectors.push(v);
        true
    }

    /// Sparse coordinates of `v`, or `None` when `v` is outside the span.
    pub fn solve_sparse(&self, v: &FormalVector) -> Option<BTreeMap<usize, Rational>> {
        let red = self.reduce(v, true);
        if !red.entries.is_empty() {
            return None;
        }
        // 0 = scale * v + sum combo_i b_i
        let k = -red.scale.recip().expect("scale is nonzero");
        Some(
            red.combo
                .into_iter()
                .map(|(i, c)| (i, &c * &k))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        )
    }

    /// Coefficients `c` with `sum c_i * basis_i == v`, or `None` (not in span).
    pub fn span_solve(&self, v: &FormalVector) -> Option<Vec<Rational>> {
        let sparse = self.solve_sparse(v)?;
        let mut dense = vec![Rational::zero(); self.len()];
        for (i, c) in sparse {
            dense[i] = c;
        }
        Some(dense)
    }

    /// The unique Fourier coefficients of `v` relative to this basis.
    pub fn coordinates(&self, v: &FormalVector) -> Result<Vec<Rational>> {
        self.span_solve(v).ok_or(Error::NotInSpan)
    }

    pub fn reconstruct(&self, coeffs: &[Rational]) -> FormalVector {
        FormalVector::combination(coeffs, &self.vectors)
    }
}

/// Keeps each item of `e`, in order, that is outside the span of the items
/// kept before it. θ and repeats are skipped.
pub fn greedy_extract(e: &Enumeration) -> BasisList {
    let mut basis = BasisList::new();
    extend_greedy(&mut basis, e);
    basis
}

/// Greedy continuation of `basis` over `e`; returns the indices of `e` kept.
pub fn extend_greedy(basis: &mut BasisList, e: &Enumeration) -> Vec<usize> {
    e.iter()
        .enumerate()
        .filter_map(|(i, v)| basis.push_if_independent(v.clone()).then_some(i))
        .collect()
}

pub fn span_solve(v: &FormalVector, basis: &BasisList) -> Option<Vec<Rational>> {
    basis.span_solve(v)
}

pub fn coordinates(v: &FormalVector, basis: &BasisList) -> Result<Vec<Rational>> {
    basis.coordinates(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qspace::Space;
    use crate::rat;

    fn space() -> Space {
        Space::with_symbols(
            [("sqrt2", "sqrt(2)"), ("sqrt3", "sqrt(3)")]
                .map(|(n, e)| (n, e.parse().unwrap())),
        )
        .unwrap()
    }

    #[test]
    fn span_solve_examples() {
        let s = space();
        let one = s.unit("one").unwrap();
        let sqrt2 = s.unit("sqrt2").unwrap();
        let b1 = BasisList::from_independent([one.clone()]).unwrap();
        assert_eq!(b1.span_solve(&one.scale(&rat!(2))), Some(vec![rat!(2)]));
        let b2 = BasisList::from_independent([one.clone(), sqrt2.clone()]).unwrap();
        assert_eq!(b2.span_solve(&(&one + &sqrt2)), Some(vec![rat!(1), rat!(1)]));
        assert_eq!(b2.span_solve(&s.unit("sqrt3").unwrap()), None);
    }

    #[test]
    fn greedy_examples() {
        let s = space();
        let one = s.unit("one").unwrap();
        let sqrt2 = s.unit("sqrt2").unwrap();
        let sqrt3 = s.unit("sqrt3").unwrap();
        let e = Enumeration::new(vec![
            one.clone(),
            one.scale(&rat!(2)),
            sqrt2.clone(),
            &one + &sqrt2,
            sqrt3.clone(),
        ]);
        assert_eq!(greedy_extract(&e).vectors(), &[one, sqrt2, sqrt3]);
        assert!(greedy_extract(&Enumeration::default()).is_empty());
        assert!(greedy_extract(&Enumeration::new(vec![FormalVector::zero()])).is_empty());
    }

    #[test]
    fn coordinates_examples() {
        let s = space();
        let one = s.unit("one").unwrap();
        let sqrt2 = s.unit("sqrt2").unwrap();
        let b = BasisList::from_independent([one.clone(), sqrt2.clone()]).unwrap();
        let v = s.vector(&[("one", rat!(4)), ("sqrt2", rat!(-2))]).unwrap();
        assert_eq!(b.coordinates(&v).unwrap(), vec![rat!(4), rat!(-2)]);
        assert_eq!(b.coordinates(&FormalVector::zero()).unwrap(), vec![rat!(0), rat!(0)]);
        assert_eq!(b.coordinates(&s.unit("sqrt3").unwrap()), Err(Error::NotInSpan));

        let shifted = BasisList::from_independent([one.clone(), &sqrt2 - &one]).unwrap();
        assert_eq!(shifted.coordinates(&(&sqrt2 - &one)).unwrap(), vec![rat!(0), rat!(1)]);
    }

    #[test]
    fn non_unit_pivots_and_fractions() {
        let s = space();
        let v1 = s.vector(&[("one", rat!(2 / 3)), ("sqrt3", rat!(4))]).unwrap();
        let v2 = s.vector(&[("sqrt2", rat!(5)), ("sqrt3", rat!(6 / 7))]).unwrap();
        let v3 = s.vector(&[("one", rat!(1)), ("sqrt2", rat!(-3))]).unwrap();
        let b = BasisList::from_independent([v1.clone(), v2.clone(), v3.clone()]).unwrap();
        let target = s
            .vector(&[("one", rat!(7)), ("sqrt2", rat!(1 / 2)), ("sqrt3", rat!(-9))])
            .unwrap();
        let c = b.coordinates(&target).unwrap();
        assert_eq!(b.reconstruct(&c), target);
        assert_eq!(
            BasisList::from_independent([v1.clone(), v2, v1.scale(&rat!(-5 / 2))]),
            Err(Error::Dependent)
        );
    }
}
