//! The coefficient-sum functional `J` on a rescaled basis, and certificates
//! for how it behaves under inner-product and absolute-value topologies.
//!
//! `J` sends a vector to the sum of its coordinates in `full_basis`. The
//! first `chain_length` basis vectors are rescaled by powers of two so each
//! is less than half the size of the one before; the rest are left alone.

mod certificate;
mod probes;

use std::ops::Range;

pub use certificate::{Check, Claim, NamedVector, ProbeCertificate, Relation, Verdict, Witness};
pub use probes::SampleRange;

use crate::error::{Error, Result};
use crate::exactnum::{Evaluator, Rational};
use crate::innerprod::AdaptedFrame;
use crate::linmap::{extend_codomain_basis, kernel_decomposition, range_basis, KernelDecomposition, LinearMap};
use crate::qspace::{BasisList, Enumeration, FormalVector, Space};

pub const J_BASIS_FRAME: &str = "j_basis";
pub const KERNEL_FRAME: &str = "kernel_frame";
pub const RANGE_FRAME: &str = "range_frame";

#[derive(Clone, Debug)]
pub struct JOperator {
    space: Space,
    cap_bits: u32,
    subbasis: Vec<FormalVector>,
    scales: Vec<Rational>,
    j_chain: Vec<FormalVector>,
    map: LinearMap,
    decomposition: KernelDecomposition,
    j_basis_frame: AdaptedFrame,
    kernel_frame: AdaptedFrame,
    range_frame: AdaptedFrame,
}

/// Builds `J` with the chain taken from the first `chain_length` vectors.
pub fn build_j_operator(evaluator: &Evaluator<'_>, basis: &BasisList, chain_length: usize) -> Result<JOperator> {
    JOperator::build(evaluator, basis, 0..chain_length)
}

impl JOperator {
    /// Builds `J` with the chain taken from `basis[chain]`. The remaining
    /// vectors follow the chain in `full_basis`, in their original order.
    pub fn build(evaluator: &Evaluator<'_>, basis: &BasisList, chain: Range<usize>) -> Result<Self> {
        if chain.is_empty() {
            return Err(Error::InvalidArgument("chain length must be positive".into()));
        }
        if chain.end > basis.len() {
            return Err(Error::InsufficientBasis {
                needed: chain.end,
                available: basis.len(),
            });
        }
        let space = evaluator.space();
        let subbasis = basis.vectors()[chain.clone()].to_vec();
        match space.rational_value(&subbasis[0]) {
            Some(v) if !v.is_zero() => {}
            _ => return Err(Error::RationalFirstRequired),
        }

        let mut scales = vec![Rational::one()];
        let mut j_chain = vec![subbasis[0].clone()];
        for h in &subbasis[1..] {
            let prev = j_chain.last().expect("chain is nonempty");
            let q = evaluator.halving_scale(h, prev)?;
            j_chain.push(h.scale(&q));
            scales.push(q);
        }

        let untouched = basis
            .iter()
            .enumerate()
            .filter(|(i, _)| !chain.contains(i))
            .map(|(_, v)| v.clone());
        let full_basis = BasisList::from_independent(j_chain.iter().cloned().chain(untouched))
            .expect("rescaling a basis keeps it independent");

        let one_y = space.unit(crate::qspace::ONE).expect("`one` is always declared");
        let map = LinearMap::new(full_basis.clone(), vec![one_y; full_basis.len()])?;
        let decomposition = kernel_decomposition(&map, &Enumeration::new(full_basis.vectors().to_vec()))?;

        let mut kernel_basis = BasisList::new();
        kernel_basis.push_if_independent(j_chain[0].clone());
        for k in decomposition.kernel_basis().iter() {
            kernel_basis.push_if_independent(k.clone());
        }
        let range = range_basis(&decomposition);
        let range_frame = extend_codomain_basis(&range, &space.units())?;

        Ok(Self {
            space: space.clone(),
            cap_bits: evaluator.cap_bits(),
            subbasis,
            scales,
            j_chain,
            map,
            decomposition,
            j_basis_frame: AdaptedFrame::new(full_basis, J_BASIS_FRAME),
            kernel_frame: AdaptedFrame::new(kernel_basis, KERNEL_FRAME),
            range_frame: AdaptedFrame::new(range_frame, RANGE_FRAME),
        })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn cap_bits(&self) -> u32 {
        self.cap_bits
    }

    pub fn evaluator(&self) -> Evaluator<'_> {
        Evaluator::with_cap(&self.space, self.cap_bits)
    }

    /// The original vectors `h'_n` the chain was built from.
    pub fn subbasis(&self) -> &[FormalVector] {
        &self.subbasis
    }

    /// `j_n = scales[n] * h'_n`.
    pub fn scales(&self) -> &[Rational] {
        &self.scales
    }

    pub fn j_chain(&self) -> &[FormalVector] {
        &self.j_chain
    }

    pub fn chain_len(&self) -> usize {
        self.j_chain.len()
    }

    pub fn j1(&self) -> &FormalVector {
        &self.j_chain[0]
    }

    pub fn full_basis(&self) -> &BasisList {
        self.j_basis_frame.basis()
    }

    pub fn map(&self) -> &LinearMap {
        &self.map
    }

    pub fn decomposition(&self) -> &KernelDecomposition {
        &self.decomposition
    }

    /// `full_basis` declared orthonormal.
    pub fn j_basis_frame(&self) -> &AdaptedFrame {
        &self.j_basis_frame
    }

    /// `j_1` followed by the kernel basis of `J`.
    pub fn kernel_frame(&self) -> &AdaptedFrame {
        &self.kernel_frame
    }

    /// `J(j_1)` followed by the extension over the space's units.
    pub fn range_frame(&self) -> &AdaptedFrame {
        &self.range_frame
    }

    /// Sum of the coordinates of `x` in `full_basis`.
    pub fn j_apply(&self, x: &FormalVector) -> Result<Rational> {
        Ok(self
            .full_basis()
            .solve_sparse(x)
            .ok_or(Error::NotInSpan)?
            .into_values()
            .sum())
    }

    /// `(q, x0)` with `q = J(x)` and `x0 = x - q j_1` in the kernel.
    pub fn j_kernel_split(&self, x: &FormalVector) -> Result<(Rational, FormalVector)> {
        let q = self.j_apply(x)?;
        let x0 = x - &self.j1().scale(&q);
        Ok((q, x0))
    }
}

pub fn j_apply(j: &JOperator, x: &FormalVector) -> Result<Rational> {
    j.j_apply(x)
}

pub fn j_kernel_split(j: &JOperator, x: &FormalVector) -> Result<(Rational, FormalVector)> {
    j.j_kernel_split(x)
}
