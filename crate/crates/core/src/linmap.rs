//! Q-linear maps given by images of a domain basis, and the kernel,
//! complement and range bases they induce.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::qspace::{extend_greedy, greedy_extract, BasisList, Enumeration, FormalVector, SymbolId};

/// The Q-linear map sending `domain_basis[i]` to `images[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMap {
    domain_basis: BasisList,
    images: Vec<FormalVector>,
}

impl LinearMap {
    pub fn new(domain_basis: BasisList, images: Vec<FormalVector>) -> Result<Self> {
        if domain_basis.len() != images.len() {
            return Err(Error::LengthMismatch {
                basis: domain_basis.len(),
                images: images.len(),
            });
        }
        Ok(Self { domain_basis, images })
    }

    pub fn domain_basis(&self) -> &BasisList {
        &self.domain_basis
    }

    pub fn images(&self) -> &[FormalVector] {
        &self.images
    }

    pub fn apply(&self, x: &FormalVector) -> Result<FormalVector> {
        let coords = self.domain_basis.solve_sparse(x).ok_or(Error::NotInSpan)?;
        let mut out = FormalVector::zero();
        for (i, c) in coords {
            out.add_scaled(&c, &self.images[i]);
        }
        Ok(out)
    }

    /// Canonical kernel basis: one vector per free column of the reduced
    /// echelon form of the image coefficient matrix, with that free variable
    /// set to 1, in column order.
    pub fn canonical_kernel(&self) -> Vec<FormalVector> {
        let rows: BTreeSet<SymbolId> = self.images.iter().flat_map(|v| v.iter().map(|(s, _)| s)).collect();
        let cols = self.images.len();
        let mut matrix: Vec<Vec<Rational>> = rows
            .iter()
            .map(|&s| {
                self.images
                    .iter()
                    .map(|img| img.coeff(s).cloned().unwrap_or_else(Rational::zero))
                    .collect()
            })
            .collect();
        let pivots = rref(&mut matrix, cols);

        let mut pivot_of_col = vec![None; cols];
        for (r, &c) in pivots.iter().enumerate() {
            pivot_of_col[c] = Some(r);
        }
        (0..cols)
            .filter(|&f| pivot_of_col[f].is_none())
            .map(|free| {
                let mut v = self.domain_basis.vectors()[free].clone();
                for (r, &c) in pivots.iter().enumerate() {
                    let entry = &matrix[r][free];
                    if !entry.is_zero() {
                        v.add_scaled(&-entry, &self.domain_basis.vectors()[c]);
                    }
                }
                v
            })
            .collect()
    }
}

/// Gauss-Jordan elimination in place. Columns are scanned left to right and
/// the first remaining row with a nonzero entry becomes the pivot row.
/// Returns the pivot column of each leading row.
fn rref(matrix: &mut [Vec<Rational>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next_row = 0;
    for col in 0..cols {
        if next_row == matrix.len() {
            break;
        }
        let Some(found) = (next_row..matrix.len()).find(|&r| !matrix[r][col].is_zero()) else {
            continue;
        };
        matrix.swap(next_row, found);
        let inv = matrix[next_row][col].recip().expect("pivot is nonzero");
        for entry in matrix[next_row].iter_mut() {
            *entry *= &inv;
        }
        let pivot_row = matrix[next_row].clone();
        for (r, row) in matrix.iter_mut().enumerate() {
            if r == next_row || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (entry, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *entry -= &(&factor * p);
                }
            }
        }
        pivots.push(col);
        next_row += 1;
    }
    pivots
}

/// Kernel basis `{x_a}` and complement basis `{x_b}` of a map, realizing the
/// unique split `x = x0 + x0c` with `x0` in the kernel.
#[derive(Clone, Debug)]
pub struct KernelDecomposition {
    map: LinearMap,
    kernel_basis: BasisList,
    complement_basis: BasisList,
    joint: BasisList,
}

impl KernelDecomposition {
    pub fn map(&self) -> &LinearMap {
        &self.map
    }

    pub fn kernel_basis(&self) -> &BasisList {
        &self.kernel_basis
    }

    pub fn complement_basis(&self) -> &BasisList {
        &self.complement_basis
    }

    /// Kernel basis followed by complement basis.
    pub fn joint_basis(&self) -> &BasisList {
        &self.joint
    }

    /// `(x0, x0c)` with `x = x0 + x0c`, `x0` in the kernel span and `x0c` in
    /// the complement span.
    pub fn decompose_vector(&self, x: &FormalVector) -> Result<(FormalVector, FormalVector)> {
        let coords = self.joint.solve_sparse(x).ok_or(Error::NotInSpan)?;
        let split = self.kernel_basis.len();
        let mut kernel_part = FormalVector::zero();
        let mut complement_part = FormalVector::zero();
        for (i, c) in coords {
            if i < split {
                kernel_part.add_scaled(&c, &self.joint.vectors()[i]);
            } else {
                complement_part.add_scaled(&c, &self.joint.vectors()[i]);
            }
        }
        Ok((kernel_part, complement_part))
    }
}

/// Kernel basis from the canonical echelon form; complement by greedy
/// selection over `domain_enum`, skipping anything already spanned by the
/// kernel and the complement vectors kept so far.
pub fn kernel_decomposition(map: &LinearMap, domain_enum: &Enumeration) -> Result<KernelDecomposition> {
    let kernel_basis = BasisList::from_independent(map.canonical_kernel())
        .expect("canonical kernel vectors are independent");
    if domain_enum.iter().any(|v| !map.domain_basis().contains(v)) {
        return Err(Error::NotInSpan);
    }
    let mut joint = kernel_basis.clone();
    let kept = extend_greedy(&mut joint, domain_enum);
    if joint.len() != map.domain_basis().len() {
        return Err(Error::NotInSpan);
    }
    let complement_basis = BasisList::from_independent(kept.into_iter().map(|i| domain_enum[i].clone()))
        .expect("greedy selections are independent");
    Ok(KernelDecomposition {
        map: map.clone(),
        kernel_basis,
        complement_basis,
        joint,
    })
}

/// A basis of the range built from complement images, with the index of the
/// complement vector each one came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RangeBasis {
    pub vectors: BasisList,
    pub provenance: Vec<usize>,
}

/// Images of the complement basis in order, dropping any image already in
/// the span of the ones kept.
pub fn range_basis(decomposition: &KernelDecomposition) -> RangeBasis {
    let map = decomposition.map();
    let mut vectors = BasisList::new();
    let mut provenance = Vec::new();
    for (i, b) in decomposition.complement_basis().iter().enumerate() {
        let image = map.apply(b).expect("complement vectors lie in the domain");
        if vectors.push_if_independent(image) {
            provenance.push(i);
        }
    }
    RangeBasis { vectors, provenance }
}

/// The range basis followed by greedy selections from `codomain_enum`.
/// Fails with `NotInSpan` when `codomain_enum` does not span the range.
pub fn extend_codomain_basis(range: &RangeBasis, codomain_enum: &Enumeration) -> Result<BasisList> {
    let enum_span = greedy_extract(codomain_enum);
    if range.vectors.iter().any(|v| !enum_span.contains(v)) {
        return Err(Error::NotInSpan);
    }
    let mut extended = range.vectors.clone();
    extend_greedy(&mut extended, codomain_enum);
    Ok(extended)
}

/// `y = y_R + y_c` with `y_R` in the span of the range basis and `y_c` in the
/// span of the extension vectors.
pub fn split_codomain(
    y: &FormalVector,
    range: &RangeBasis,
    extended: &BasisList,
) -> Result<(FormalVector, FormalVector)> {
    let coords = extended.solve_sparse(y).ok_or(Error::NotInSpan)?;
    let split = range.vectors.len();
    let mut in_range = FormalVector::zero();
    let mut outside = FormalVector::zero();
    for (i, c) in coords {
        let target = if i < split { &mut in_range } else { &mut outside };
        target.add_scaled(&c, &extended.vectors()[i]);
    }
    Ok((in_range, outside))
}
