//! Inner products induced by declaring an ordered basis orthonormal.
//!
//! Norms are kept as exact squares. The same vector has different norms in
//! different frames, so every frame carries a label that reports repeat.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::linmap::{KernelDecomposition, LinearMap};
use crate::qspace::{BasisList, FormalVector};

/// A basis declared orthonormal, with a label naming how it was built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptedFrame {
    basis: BasisList,
    label: String,
}

impl AdaptedFrame {
    pub fn new(basis: BasisList, label: impl Into<String>) -> Self {
        Self {
            basis,
            label: label.into(),
        }
    }

    pub fn basis(&self) -> &BasisList {
        &self.basis
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Sparse Fourier coefficients of `x` in this frame.
    pub fn coordinates(&self, x: &FormalVector) -> Result<BTreeMap<usize, Rational>> {
        self.basis.solve_sparse(x).ok_or(Error::NotInSpan)
    }
}

/// Exact squared norm `<x, x>`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NormSq(pub Rational);

impl NormSq {
    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn of_coordinates<'a>(coords: impl IntoIterator<Item = &'a Rational>) -> Self {
        Self(coords.into_iter().map(Rational::square).sum())
    }
}

pub fn inner(x: &FormalVector, y: &FormalVector, frame: &AdaptedFrame) -> Result<Rational> {
    let cx = frame.coordinates(x)?;
    let cy = frame.coordinates(y)?;
    Ok(cx
        .iter()
        .filter_map(|(i, a)| cy.get(i).map(|b| a * b))
        .sum())
}

pub fn norm_sq(x: &FormalVector, frame: &AdaptedFrame) -> Result<NormSq> {
    Ok(NormSq::of_coordinates(frame.coordinates(x)?.values()))
}

/// The functional extracting the `index`-th Fourier coefficient.
#[derive(Clone, Copy, Debug)]
pub struct CoordinateFunctional<'a> {
    frame: &'a AdaptedFrame,
    index: usize,
}

impl CoordinateFunctional<'_> {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn eval(&self, x: &FormalVector) -> Result<Rational> {
        Ok(self
            .frame
            .coordinates(x)?
            .remove(&self.index)
            .unwrap_or_else(Rational::zero))
    }
}

pub fn coordinate_functional(index: usize, frame: &AdaptedFrame) -> Result<CoordinateFunctional<'_>> {
    if index >= frame.len() {
        return Err(Error::IndexOutOfRange {
            index,
            len: frame.len(),
        });
    }
    Ok(CoordinateFunctional { frame, index })
}

/// Outcome of the norm-1 bound for one sample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundSample {
    pub image_norm_sq: Rational,
    pub norm_sq: Rational,
    pub holds: bool,
    pub equality: bool,
    pub kernel_component_zero: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub domain_frame: String,
    pub codomain_frame: String,
    pub samples: Vec<BoundSample>,
}

impl BoundReport {
    pub fn all_hold(&self) -> bool {
        self.samples.iter().all(|s| s.holds)
    }

    /// Equality held exactly on the samples whose kernel component was θ.
    pub fn equality_iff_kernel_zero(&self) -> bool {
        self.samples.iter().all(|s| s.equality == s.kernel_component_zero)
    }
}

/// Checks `norm_sq(L x, F_Y) <= norm_sq(x, F_X)` exactly for each sample.
pub fn operator_bound_check(
    map: &LinearMap,
    decomposition: &KernelDecomposition,
    domain_frame: &AdaptedFrame,
    codomain_frame: &AdaptedFrame,
    samples: &[FormalVector],
) -> Result<BoundReport> {
    let samples = samples
        .iter()
        .map(|x| {
            let image = map.apply(x)?;
            let image_norm_sq = norm_sq(&image, codomain_frame)?.0;
            let norm_sq = norm_sq(x, domain_frame)?.0;
            let (kernel_part, _) = decomposition.decompose_vector(x)?;
            Ok(BoundSample {
                holds: image_norm_sq <= norm_sq,
                equality: image_norm_sq == norm_sq,
                kernel_component_zero: kernel_part.is_zero(),
                image_norm_sq,
                norm_sq,
            })
        })
        .collect::<Result<_>>()?;
    Ok(BoundReport {
        domain_frame: domain_frame.label().to_owned(),
        codomain_frame: codomain_frame.label().to_owned(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linmap::{extend_codomain_basis, kernel_decomposition, range_basis};
    use crate::qspace::{Enumeration, Space};
    use crate::rat;

    fn space() -> Space {
        Space::with_symbols(
            [("sqrt2", "sqrt(2)"), ("sqrt3", "sqrt(3)")].map(|(n, e)| (n, e.parse().unwrap())),
        )
        .unwrap()
    }

    fn frame(vs: &[FormalVector], label: &str) -> AdaptedFrame {
        AdaptedFrame::new(BasisList::from_independent(vs.iter().cloned()).unwrap(), label)
    }

    #[test]
    fn inner_and_norm_examples() {
        let s = space();
        let j1 = s.unit("one").unwrap();
        let k1 = &s.unit("sqrt2").unwrap() - &j1;
        let f = frame(&[j1.clone(), k1.clone()], "test");
        let x = &j1.scale(&rat!(2)) + &k1.scale(&rat!(3));
        let y = &j1 - &k1;
        assert_eq!(inner(&x, &y, &f).unwrap(), rat!(-1));
        assert_eq!(inner(&j1, &k1, &f).unwrap(), rat!(0));
        assert_eq!(inner(&x, &x, &f).unwrap(), rat!(13));
        let z = &j1.scale(&rat!(3)) + &k1.scale(&rat!(4));
        assert_eq!(norm_sq(&z, &f).unwrap().0, rat!(25));
        assert_eq!(norm_sq(&FormalVector::zero(), &f).unwrap().0, rat!(0));
        assert_eq!(norm_sq(&s.unit("sqrt3").unwrap(), &f), Err(Error::NotInSpan));
    }

    #[test]
    fn coordinate_functional_examples() {
        let s = space();
        let one = s.unit("one").unwrap();
        let sqrt2 = s.unit("sqrt2").unwrap();
        let f = frame(&[one.clone(), sqrt2.clone()], "units");
        let c0 = coordinate_functional(0, &f).unwrap();
        assert_eq!(c0.eval(&one).unwrap(), rat!(1));
        assert_eq!(c0.eval(&sqrt2).unwrap(), rat!(0));
        assert_eq!(c0.eval(&(&one.scale(&rat!(4)) - &sqrt2.scale(&rat!(2)))).unwrap(), rat!(4));
        assert_eq!(
            coordinate_functional(2, &f).unwrap_err(),
            Error::IndexOutOfRange { index: 2, len: 2 }
        );
    }

    #[test]
    fn bound_check_examples() {
        let s = space();
        let one = s.unit("one").unwrap();
        let sqrt2 = s.unit("sqrt2").unwrap();
        let sqrt3 = s.unit("sqrt3").unwrap();
        let domain = BasisList::from_independent([one.clone(), sqrt2.clone()]).unwrap();
        let units = Enumeration::new(vec![one.clone(), sqrt2.clone()]);

        let injective = LinearMap::new(domain.clone(), vec![sqrt2.clone(), sqrt3.clone()]).unwrap();
        let k = kernel_decomposition(&injective, &units).unwrap();
        let fx = AdaptedFrame::new(k.joint_basis().clone(), "kernel+complement");
        let fy = AdaptedFrame::new(extend_codomain_basis(&range_basis(&k), &s.units()).unwrap(), "range+ext");
        let x = &one.scale(&rat!(3)) + &sqrt2.scale(&rat!(4));
        let report = operator_bound_check(&injective, &k, &fx, &fy, &[x]).unwrap();
        assert_eq!(report.samples[0].image_norm_sq, rat!(25));
        assert_eq!(report.samples[0].norm_sq, rat!(25));
        assert!(report.samples[0].equality);

        let collapse = LinearMap::new(domain, vec![one.clone(), one.scale(&rat!(2))]).unwrap();
        let k = kernel_decomposition(&collapse, &units).unwrap();
        let fx = AdaptedFrame::new(k.joint_basis().clone(), "kernel+complement");
        let fy = AdaptedFrame::new(extend_codomain_basis(&range_basis(&k), &s.units()).unwrap(), "range+ext");
        let in_kernel = k.kernel_basis().vectors()[0].scale(&rat!(-3));
        let report = operator_bound_check(&collapse, &k, &fx, &fy, &[in_kernel, FormalVector::zero()]).unwrap();
        assert_eq!(report.domain_frame, "kernel+complement");
        assert!(report.all_hold() && report.equality_iff_kernel_zero());
        assert!(!report.samples[0].equality && report.samples[1].equality);
    }
}
