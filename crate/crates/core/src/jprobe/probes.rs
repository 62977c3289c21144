use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::certificate::{Check, Claim, NamedVector, ProbeCertificate, Relation, Verdict, Witness};
use super::{JOperator, J_BASIS_FRAME, KERNEL_FRAME, RANGE_FRAME};
use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::innerprod::{norm_sq, operator_bound_check, AdaptedFrame, NormSq};
use crate::qspace::FormalVector;

/// Coefficient ranges for seeded samples: numerators in
/// `[-max_numerator, max_numerator]`, denominators in `[1, max_denominator]`,
/// at most `max_support` kernel vectors per sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleRange {
    pub max_numerator: i64,
    pub max_denominator: i64,
    pub max_support: usize,
}

impl Default for SampleRange {
    fn default() -> Self {
        Self {
            max_numerator: 9,
            max_denominator: 9,
            max_support: 6,
        }
    }
}

impl SampleRange {
    fn draw(&self, rng: &mut ChaCha8Rng) -> Rational {
        let n = rng.gen_range(-self.max_numerator..=self.max_numerator);
        let d = rng.gen_range(1..=self.max_denominator.max(1));
        Rational::new(n, d).expect("denominator is positive")
    }
}

fn relation_of(lhs: &Rational, rhs: &Rational) -> Relation {
    match lhs.cmp(rhs) {
        Ordering::Less => Relation::Lt,
        Ordering::Equal => Relation::Eq,
        Ordering::Greater => Relation::Gt,
    }
}

fn params<const N: usize>(pairs: [(&str, String); N]) -> BTreeMap<String, String> {
    pairs.into_iter().map(|(k, v)| (k.to_owned(), v)).collect()
}

fn witness(clause: impl Into<String>, check: Check) -> Witness {
    Witness {
        clause: clause.into(),
        check,
    }
}

impl JOperator {
    fn named(&self, v: &FormalVector) -> NamedVector {
        self.space.named(v)
    }

    fn frame_prefix(&self, frame: &AdaptedFrame, len: usize) -> Vec<NamedVector> {
        frame.basis().vectors()[..len.min(frame.len())]
            .iter()
            .map(|v| self.named(v))
            .collect()
    }

    fn certificate(
        &self,
        claim: Claim,
        verdict: Verdict,
        parameters: BTreeMap<String, String>,
        frames: BTreeMap<String, Vec<NamedVector>>,
        witnesses: Vec<Witness>,
        conclusion: String,
    ) -> ProbeCertificate {
        let mut names = BTreeSet::new();
        for v in frames.values().flatten() {
            names.extend(v.keys().cloned());
        }
        for w in &witnesses {
            if let Check::AbsLess { left, right, .. } = &w.check {
                names.extend(left.keys().chain(right.keys()).cloned());
            }
        }
        let symbols = names
            .into_iter()
            .map(|n| {
                let id = self.space.id(&n).expect("names come from this space");
                (n, self.space.value(id).clone())
            })
            .collect();
        ProbeCertificate {
            claim,
            verdict: Verdict::from_bool(verdict.passed() && witnesses.iter().all(|w| w.check.holds())),
            parameters,
            symbols,
            frames,
            witnesses,
            conclusion,
        }
    }

    fn norm_bound(&self, frame: &AdaptedFrame, x: &FormalVector, bound_sq: &Rational) -> Result<Check> {
        let coordinates = frame.coordinates(x)?;
        let norm_sq_x = NormSq::of_coordinates(coordinates.values()).0;
        let (j_value, x0) = self.j_kernel_split(x)?;
        let image_norm_sq = norm_sq(&self.map.apply(x)?, &self.range_frame)?.0;
        Ok(Check::NormBound {
            frame: frame.label().to_owned(),
            coordinates,
            j_value,
            relation: relation_of(&image_norm_sq, &(bound_sq * &norm_sq_x)),
            image_norm_sq,
            bound_sq: bound_sq.clone(),
            norm_sq: norm_sq_x,
            kernel_component_zero: x0.is_zero(),
        })
    }

    fn j_value(&self, n: usize) -> Result<Check> {
        let z = &self.j_chain[n];
        let image_norm_sq = norm_sq(&self.map.apply(z)?, &self.range_frame)?.0;
        Ok(Check::JValue {
            frame: J_BASIS_FRAME.to_owned(),
            coordinates: self.j_basis_frame.coordinates(z)?,
            value: self.j_apply(z)?,
            image_norm_sq,
        })
    }

    /// Interval evidence that `|left| < |right|`, refining up to `max_bits`.
    fn abs_less(&self, left: &FormalVector, right: &FormalVector, max_bits: u32) -> Result<Check> {
        let evaluator = self.evaluator();
        let max_bits = max_bits.min(self.cap_bits).max(1);
        let mut bits = 32.min(max_bits);
        loop {
            let l = evaluator.eval_interval(left, bits)?.abs();
            let r = evaluator.eval_interval(right, bits)?.abs();
            if l.hi() < r.lo() {
                return Ok(Check::AbsLess {
                    left: self.named(left),
                    right: self.named(right),
                    left_abs_hi: l.hi(),
                    right_abs_lo: r.lo(),
                    precision_bits: bits,
                });
            }
            if bits >= max_bits {
                return Err(Error::Undecidable {
                    left: self.space.display(left),
                    right: self.space.display(right),
                    max_bits,
                });
            }
            bits = bits.saturating_mul(2).min(max_bits);
        }
    }

    fn require_chain(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidArgument("sequence length must be positive".into()));
        }
        if n > self.chain_len() {
            return Err(Error::InsufficientBasis {
                needed: n,
                available: self.chain_len(),
            });
        }
        Ok(())
    }

    /// `|z_n| < |j_1| / 2^(n-1)` for `2 <= n <= len`, with `z_n = j_n`.
    fn decay_witnesses(&self, len: usize, max_bits: u32) -> Result<Vec<Witness>> {
        (2..=len)
            .map(|n| {
                let bound = self.j1().scale(&Rational::inverse_power_of_two(n as u32 - 1));
                let check = self.abs_less(&self.j_chain[n - 1], &bound, max_bits)?;
                Ok(witness(format!("n={n}: |z_n| < |j_1| / 2^(n-1)"), check))
            })
            .collect()
    }

    /// Seeded samples `q j_1 + sum q_i k_i` over the kernel frame. Every
    /// eighth sample is a pure multiple of `j_1`.
    pub fn sample_vectors(&self, count: usize, seed: u64, range: SampleRange) -> Vec<FormalVector> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let frame = self.kernel_frame.basis().vectors();
        let kernel_dim = frame.len() - 1;
        (0..count)
            .map(|i| {
                let mut x = frame[0].scale(&range.draw(&mut rng));
                if i % 8 != 0 && kernel_dim > 0 {
                    let support = rng.gen_range(1..=range.max_support.clamp(1, kernel_dim));
                    for k in index::sample(&mut rng, kernel_dim, support) {
                        x.add_scaled(&range.draw(&mut rng), &frame[k + 1]);
                    }
                }
                x
            })
            .collect()
    }

    /// `norm_sq(J x, range_frame) <= norm_sq(x, kernel_frame)` for each
    /// sample, with the equality case `x = j_1` recorded first. Each value is
    /// recomputed through the generic bound check and must agree.
    pub fn probe_inner_inner(&self, samples: &[FormalVector], seed: Option<u64>) -> Result<ProbeCertificate> {
        let one = Rational::one();
        let mut witnesses = vec![witness(
            "equality case x = j_1",
            self.norm_bound(&self.kernel_frame, self.j1(), &one)?,
        )];
        for (i, x) in samples.iter().enumerate() {
            witnesses.push(witness(
                format!("sample {i}"),
                self.norm_bound(&self.kernel_frame, x, &one)?,
            ));
        }

        let report = operator_bound_check(
            &self.map,
            &self.decomposition,
            &self.kernel_frame,
            &self.range_frame,
            samples,
        )?;
        let agrees = report.samples.iter().zip(&witnesses[1..]).all(|(s, w)| match &w.check {
            Check::NormBound {
                image_norm_sq,
                norm_sq,
                kernel_component_zero,
                ..
            } => {
                &s.image_norm_sq == image_norm_sq
                    && &s.norm_sq == norm_sq
                    && s.kernel_component_zero == *kernel_component_zero
            }
            _ => false,
        });
        let bounded = witnesses.iter().all(|w| match &w.check {
            Check::NormBound {
                relation,
                kernel_component_zero,
                ..
            } => match relation {
                Relation::Lt => !kernel_component_zero,
                Relation::Eq => *kernel_component_zero,
                _ => false,
            },
            _ => false,
        });

        let mut parameters = params([("samples", samples.len().to_string())]);
        if let Some(seed) = seed {
            parameters.insert("seed".into(), seed.to_string());
        }
        let dim = self.full_basis().len();
        let frames = BTreeMap::from([
            (J_BASIS_FRAME.to_owned(), self.frame_prefix(&self.j_basis_frame, dim)),
            (KERNEL_FRAME.to_owned(), self.frame_prefix(&self.kernel_frame, dim)),
            (RANGE_FRAME.to_owned(), self.frame_prefix(&self.range_frame, 1)),
        ]);
        let conclusion = format!(
            "On all {} samples the squared range-frame norm of J(x) is at most the squared \
             kernel-frame norm of x, with equality exactly when x is a rational multiple of j_1.",
            samples.len()
        );
        Ok(self.certificate(
            Claim::InnerInnerBounded,
            Verdict::from_bool(agrees && bounded && report.all_hold() && report.equality_iff_kernel_zero()),
            parameters,
            frames,
            witnesses,
            conclusion,
        ))
    }

    /// `z_n = j_n` shrinks below `|j_1| / 2^(n-1)` while `J(z_n) = 1`.
    pub fn probe_abs_abs(&self, len: usize, max_bits: u32) -> Result<ProbeCertificate> {
        self.require_chain(len)?;
        let mut witnesses = self.decay_witnesses(len, max_bits)?;
        let mut constant = true;
        for n in 1..=len {
            let check = self.j_value(n - 1)?;
            if let Check::JValue { value, .. } = &check {
                constant &= value.is_integer() && *value == 1;
            }
            witnesses.push(witness(format!("n={n}: J(z_n) = 1"), check));
        }
        witnesses.push(witness(
            "J(0) = 0 differs from the constant value 1",
            Check::Exact {
                lhs: self.j_apply(&FormalVector::zero())?,
                relation: Relation::Lt,
                rhs: Rational::one(),
            },
        ));
        let frames = BTreeMap::from([(J_BASIS_FRAME.to_owned(), self.frame_prefix(&self.j_basis_frame, len))]);
        let conclusion = format!(
            "|z_n| is certified below |j_1|/2^(n-1) for n <= {len} while J(z_n) = 1 for every n, \
             so z_n tends to 0 in absolute value but J(z_n) does not tend to J(0) = 0."
        );
        Ok(self.certificate(
            Claim::AbsAbsDiscontinuous,
            Verdict::from_bool(constant),
            params([("N", len.to_string()), ("max_bits", max_bits.to_string())]),
            frames,
            witnesses,
            conclusion,
        ))
    }

    /// Refutes `|J(x)| <= a ||x||` with `x = j_1 + ... + j_n`, `n = floor(a^2) + 1`,
    /// using the norm of the frame that declares `full_basis` orthonormal.
    pub fn probe_inner_abs(&self, a: &Rational) -> Result<ProbeCertificate> {
        if a.is_negative() {
            return Err(Error::InvalidArgument(format!("bound must be non-negative, got {a}")));
        }
        let a_sq = a.square();
        let n_big: BigInt = a_sq.floor() + 1;
        let n = n_big.to_usize().ok_or_else(|| Error::InsufficientBasis {
            needed: usize::MAX,
            available: self.chain_len(),
        })?;
        self.require_chain(n)?;

        let one = Rational::one();
        let mut x = FormalVector::zero();
        for j in &self.j_chain[..n] {
            x.add_scaled(&one, j);
        }
        let check = self.norm_bound(&self.j_basis_frame, &x, &a_sq)?;
        let n_rat = Rational::from_integer(n_big);
        let exact = Check::Exact {
            lhs: n_rat.square(),
            relation: Relation::Gt,
            rhs: &a_sq * &n_rat,
        };
        let refuted = matches!(&check, Check::NormBound { relation: Relation::Gt, j_value, norm_sq, .. }
            if *j_value == n_rat && *norm_sq == n_rat);
        let witnesses = vec![
            witness("|J(x)|^2 > a^2 ||x||^2 for x = j_1 + ... + j_n", check),
            witness("n^2 > a^2 n", exact),
        ];
        let frames = BTreeMap::from([
            (J_BASIS_FRAME.to_owned(), self.frame_prefix(&self.j_basis_frame, n)),
            (RANGE_FRAME.to_owned(), self.frame_prefix(&self.range_frame, 1)),
        ]);
        let conclusion = format!(
            "For a = {a}, the vector x = j_1 + ... + j_{n} has J(x) = {n} and squared norm {n} in the \
             j_basis frame, and {n}^2 > a^2 * {n}, so |J(x)| <= a ||x|| fails for this a."
        );
        Ok(self.certificate(
            Claim::InnerAbsUnbounded,
            Verdict::from_bool(refuted),
            params([("a", a.to_string()), ("n", n.to_string())]),
            frames,
            witnesses,
            conclusion,
        ))
    }

    /// `z_n = j_n` shrinks in absolute value while `J(z_n)` keeps squared
    /// range-frame norm 1.
    pub fn probe_abs_inner(&self, len: usize, max_bits: u32) -> Result<ProbeCertificate> {
        self.require_chain(len)?;
        let mut witnesses = self.decay_witnesses(len, max_bits)?;
        let mut unit = true;
        for n in 1..=len {
            let check = self.j_value(n - 1)?;
            if let Check::JValue { image_norm_sq, .. } = &check {
                unit &= *image_norm_sq == 1;
            }
            witnesses.push(witness(format!("n={n}: ||J(z_n)||^2 = 1"), check));
        }
        let first = &self.range_frame.basis().vectors()[0];
        witnesses.push(witness(
            "||J(j_1)||^2 > 0 in the range frame",
            Check::Exact {
                lhs: norm_sq(first, &self.range_frame)?.0,
                relation: Relation::Gt,
                rhs: Rational::zero(),
            },
        ));
        let frames = BTreeMap::from([
            (J_BASIS_FRAME.to_owned(), self.frame_prefix(&self.j_basis_frame, len)),
            (RANGE_FRAME.to_owned(), self.frame_prefix(&self.range_frame, 1)),
        ]);
        let conclusion = format!(
            "|z_n| is certified below |j_1|/2^(n-1) for n <= {len} while ||J(z_n)||_Y = 1 for every n, \
             so J(z_n) stays at distance 1 from J(0) = 0."
        );
        Ok(self.certificate(
            Claim::AbsInnerDiscontinuous,
            Verdict::from_bool(unit),
            params([("N", len.to_string()), ("max_bits", max_bits.to_string())]),
            frames,
            witnesses,
            conclusion,
        ))
    }

    /// On the rational line `q = a j_1`: `||q||_X^2 = a^2 = ||J(q)||_Y^2` and
    /// `|q| = b |J(q)|` with `b = |j_1|`.
    pub fn probe_rational_restriction(&self, q: &Rational) -> Result<ProbeCertificate> {
        let v = self
            .space
            .rational_value(self.j1())
            .filter(|v| !v.is_zero())
            .ok_or(Error::RationalFirstRequired)?;
        let one = self.space.unit(crate::qspace::ONE)?;
        let x = one.scale(q);
        let a = q / &v;
        let b = v.abs();
        let check = self.norm_bound(&self.kernel_frame, &x, &Rational::one())?;
        let (norm_ok, j_value) = match &check {
            Check::NormBound {
                norm_sq,
                image_norm_sq,
                j_value,
                ..
            } => (*norm_sq == a.square() && *image_norm_sq == a.square(), j_value.clone()),
            _ => unreachable!("norm_bound builds a NormBound check"),
        };
        let abs_j = j_value.abs();
        let witnesses = vec![
            witness("||q||_X^2 = ||J(q)||_Y^2 = a^2", check),
            witness(
                "|q| = b |J(q)| with b = |j_1|",
                Check::Exact {
                    lhs: q.abs(),
                    relation: Relation::Eq,
                    rhs: &b * &abs_j,
                },
            ),
        ];
        let frames = BTreeMap::from([
            (J_BASIS_FRAME.to_owned(), self.frame_prefix(&self.j_basis_frame, 1)),
            (KERNEL_FRAME.to_owned(), self.frame_prefix(&self.kernel_frame, 1)),
            (RANGE_FRAME.to_owned(), self.frame_prefix(&self.range_frame, 1)),
        ]);
        let conclusion = format!(
            "On span{{j_1}} the operator is a scaling: q = {q} is a = {a} times j_1, both norms equal |a|, \
             and |q| = {b} * |J(q)|, so every topology combination makes J bounded there."
        );
        Ok(self.certificate(
            Claim::RationalRestrictionContinuous,
            Verdict::from_bool(norm_ok && j_value == a),
            params([
                ("q", q.to_string()),
                ("j1_value", v.to_string()),
                ("a", a.to_string()),
                ("b", b.to_string()),
            ]),
            frames,
            witnesses,
            conclusion,
        ))
    }
}
