//! Exact scalars and certified magnitude comparisons.
//!
//! Scalars are exact rationals. Real values of formal vectors are only ever
//! observed through dyadic interval enclosures; a comparison is decided when
//! the enclosures separate, and reported [`Error::Undecidable`] otherwise.

mod expr;
mod interval;
mod rational;

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed};

pub use expr::ValueExpr;
pub use interval::IntervalValue;
pub use rational::Rational;

use crate::error::{Error, Result};
use crate::qspace::{FormalVector, Space};
use interval::{enclose, Enclosure, FIRST_WORKING_BITS};

pub const DEFAULT_MAX_BITS: u32 = 4096;

/// Outcome of [`Evaluator::compare_abs`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AbsOrdering {
    Less,
    Greater,
    Undecidable,
}

/// Interval evaluation of formal vectors over a [`Space`].
///
/// `cap_bits` is the largest precision any evaluation or comparison may ask for.
#[derive(Clone, Copy, Debug)]
pub struct Evaluator<'a> {
    space: &'a Space,
    cap_bits: u32,
}

impl<'a> Evaluator<'a> {
    pub fn new(space: &'a Space) -> Self {
        Self::with_cap(space, DEFAULT_MAX_BITS)
    }

    pub fn with_cap(space: &'a Space, cap_bits: u32) -> Self {
        Self {
            space,
            cap_bits: cap_bits.max(FIRST_WORKING_BITS),
        }
    }

    pub fn space(&self) -> &'a Space {
        self.space
    }

    pub fn cap_bits(&self) -> u32 {
        self.cap_bits
    }

    fn enclose_vector(&self, x: &FormalVector, w: u32) -> Option<Enclosure> {
        let mut acc = Enclosure::rational(&Rational::zero(), w);
        for (sym, coeff) in x.iter() {
            let value = enclose(self.space.value(sym), w)?;
            let term = if coeff.is_integer() {
                Enclosure {
                    lo: &value.lo * coeff.numer(),
                    hi: &value.hi * coeff.numer(),
                }
                .normalized()
            } else {
                Enclosure::rational(coeff, w).mul(&value, w)
            };
            acc = acc.add(&term);
        }
        Some(acc)
    }

    /// Enclosure of the real value of `x` with width at most `2^-precision_bits`.
    ///
    /// Working precisions follow a fixed doubling schedule and every stage is
    /// intersected with the previous ones, so a larger `precision_bits` always
    /// yields a sub-interval of the one returned for a smaller request.
    pub fn eval_interval(&self, x: &FormalVector, precision_bits: u32) -> Result<IntervalValue> {
        let precision_bits = precision_bits.max(1);
        let exceeded = Error::EvalDepthExceeded {
            requested_bits: precision_bits,
            cap_bits: self.cap_bits,
        };
        if precision_bits > self.cap_bits {
            return Err(exceeded);
        }
        // Working precision may run one doubling past the cap so that a
        // request of exactly `cap_bits` is attainable.
        let working_cap = self.cap_bits.saturating_mul(2);
        let mut w = FIRST_WORKING_BITS;
        let mut acc: Option<(Enclosure, u32)> = None;
        while w <= working_cap {
            if let Some(enc) = self.enclose_vector(x, w) {
                let merged = match acc.take() {
                    Some((prev, prev_w)) => prev.rescale(prev_w, w).intersect(&enc),
                    None => enc,
                };
                if merged.narrow_enough(w, precision_bits) {
                    return Ok(IntervalValue::from_enclosure(merged, w, precision_bits));
                }
                acc = Some((merged, w));
            }
            w = w.saturating_mul(2);
        }
        Err(exceeded)
    }

    /// Certified comparison of `|x|` and `|y|`, refining from 32 bits up to
    /// `max_bits`. Equal magnitudes always come back `Undecidable`.
    pub fn compare_abs(&self, x: &FormalVector, y: &FormalVector, max_bits: u32) -> Result<AbsOrdering> {
        let mut bits = FIRST_WORKING_BITS.min(max_bits.max(1));
        loop {
            let ax = self.eval_interval(x, bits)?.abs();
            let ay = self.eval_interval(y, bits)?.abs();
            match ax.separation(&ay) {
                Some(Ordering::Less) => return Ok(AbsOrdering::Less),
                Some(Ordering::Greater) => return Ok(AbsOrdering::Greater),
                _ if bits >= max_bits => return Ok(AbsOrdering::Undecidable),
                _ => bits = bits.saturating_mul(2).min(max_bits),
            }
        }
    }

    fn undecidable(&self, x: &FormalVector, y: &FormalVector, max_bits: u32) -> Error {
        Error::Undecidable {
            left: self.space.display(x),
            right: self.space.display(y),
            max_bits,
        }
    }

    /// Certifies `x != 0` in value, not just formally.
    fn require_nonzero(&self, x: &FormalVector, max_bits: u32) -> Result<()> {
        if x.is_zero() {
            return Err(Error::NonzeroRequired);
        }
        match self.compare_abs(x, &FormalVector::zero(), max_bits)? {
            AbsOrdering::Greater => Ok(()),
            _ => Err(self.undecidable(x, &FormalVector::zero(), max_bits)),
        }
    }

    /// Interval for `|x|` with a strictly positive lower end.
    fn positive_magnitude(&self, x: &FormalVector) -> Result<IntervalValue> {
        let mut bits = FIRST_WORKING_BITS;
        loop {
            let iv = self.eval_interval(x, bits)?.abs();
            if iv.lo().signum() > 0 {
                return Ok(iv);
            }
            if bits >= self.cap_bits {
                return Err(self.undecidable(x, &FormalVector::zero(), self.cap_bits));
            }
            bits = bits.saturating_mul(2).min(self.cap_bits);
        }
    }

    /// `2^-m` for the least `m >= 0` with `|2^-m h| < |bound| / 2`, certified
    /// by [`compare_abs`](Self::compare_abs) at the evaluator's cap.
    pub fn halving_scale(&self, h: &FormalVector, bound: &FormalVector) -> Result<Rational> {
        let max_bits = self.cap_bits;
        if h.is_zero() || bound.is_zero() {
            return Err(Error::NonzeroRequired);
        }

        // Comparisons run on operands rescaled to unit order of magnitude,
        // with the power of two carried separately:
        //   |2^-m h| < |bound|/2  <=>  |h_unit| 2^(offset - m) < |b_unit|
        // Deep chains would otherwise need precision proportional to depth.
        let (e_h, e_b) = (leading_exponent(h), leading_exponent(bound));
        let h_unit = h.scale(&pow2(-e_h));
        let b_unit = bound.scale(&pow2(-e_b));
        let offset = e_h - e_b + 1;
        self.require_nonzero(&h_unit, max_bits)?;
        self.require_nonzero(&b_unit, max_bits)?;

        // Every m with |h_unit|.lo * 2^(offset - m) >= |b_unit|.hi is
        // certainly not Less, so the search starts after them.
        let h_abs = self.positive_magnitude(&h_unit)?;
        let b_abs = self.eval_interval(&b_unit, FIRST_WORKING_BITS)?.abs();
        let t_min = ceil_log2(&(&b_abs.hi() / &h_abs.lo()));
        let mut m = u32::try_from((offset - t_min + 1).max(0)).expect("exponent fits in u32");

        loop {
            let candidate = h_unit.scale(&pow2(offset - i64::from(m)));
            match self.compare_abs(&candidate, &b_unit, max_bits)? {
                AbsOrdering::Less => return Ok(Rational::inverse_power_of_two(m)),
                AbsOrdering::Greater => m += 1,
                AbsOrdering::Undecidable => {
                    let q = Rational::inverse_power_of_two(m);
                    return Err(self.undecidable(&h.scale(&q), &bound.scale(&pow2(-1)), max_bits));
                }
            }
        }
    }
}

/// Least `t` with `r <= 2^t`, for positive `r`.
fn ceil_log2(r: &Rational) -> i64 {
    let mut t = r.numer().bits() as i64 - r.denom().bits() as i64;
    while *r > pow2(t) {
        t += 1;
    }
    while *r <= pow2(t - 1) {
        t -= 1;
    }
    t
}

/// `2^e` as a rational, for any sign of `e`.
fn pow2(e: i64) -> Rational {
    let bits = e.unsigned_abs() as u32;
    if e >= 0 {
        Rational::from_integer(BigInt::one() << bits)
    } else {
        Rational::inverse_power_of_two(bits)
    }
}

/// Rough base-2 exponent of the largest coefficient of `x`.
fn leading_exponent(x: &FormalVector) -> i64 {
    x.iter()
        .map(|(_, c)| c.numer().abs().bits() as i64 - c.denom().bits() as i64)
        .max()
        .unwrap_or(0)
}

impl Enclosure {
    fn normalized(self) -> Self {
        if self.lo <= self.hi {
            self
        } else {
            Self {
                lo: self.hi,
                hi: self.lo,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn space() -> Space {
        let mut s = Space::new();
        for (name, expr) in [("sqrt2", "sqrt(2)"), ("sqrt3", "sqrt(3)"), ("pi", "pi"), ("zero_ish", "1 - 1")] {
            s.add_symbol(name, expr.parse().unwrap()).unwrap();
        }
        s
    }

    #[test]
    fn integer_coefficients_keep_orientation() {
        let s = space();
        let ev = Evaluator::new(&s);
        let x = s.vector(&[("sqrt2", rat!(-3))]).unwrap();
        let iv = ev.eval_interval(&x, 20).unwrap();
        assert!(iv.lo() < rat!(-4) && iv.hi() > rat!(-5));
        assert!(iv.lo() <= iv.hi());
    }

    #[test]
    fn rational_symbol_evaluates_exactly() {
        let s = space();
        let ev = Evaluator::new(&s);
        let iv = ev.eval_interval(&s.vector(&[("one", rat!(3))]).unwrap(), 8).unwrap();
        assert_eq!(iv.lo(), rat!(3));
        assert_eq!(iv.hi(), rat!(3));
        let zero = ev.eval_interval(&FormalVector::zero(), 8).unwrap();
        assert_eq!((zero.lo(), zero.hi()), (rat!(0), rat!(0)));
    }

    #[test]
    fn requests_beyond_the_cap_fail() {
        let s = space();
        let ev = Evaluator::with_cap(&s, 64);
        let err = ev.eval_interval(&s.unit("sqrt2").unwrap(), 200).unwrap_err();
        assert!(matches!(err, Error::EvalDepthExceeded { requested_bits: 200, .. }));
        assert!(ev.eval_interval(&s.unit("sqrt2").unwrap(), 64).is_ok());
        // a divisor that never separates from zero
        let mut s = space();
        s.add_symbol("bad", "1 / (1 - 1)".parse().unwrap()).unwrap();
        let ev = Evaluator::with_cap(&s, 64);
        let err = ev.eval_interval(&s.unit("bad").unwrap(), 8).unwrap_err();
        assert!(matches!(err, Error::EvalDepthExceeded { .. }));
    }

    #[test]
    fn compare_examples() {
        let s = space();
        let ev = Evaluator::new(&s);
        let half = s.vector(&[("one", rat!(1 / 2))]).unwrap();
        let third = s.vector(&[("one", rat!(1 / 3))]).unwrap();
        assert_eq!(ev.compare_abs(&half, &third, 64).unwrap(), AbsOrdering::Greater);
        let sqrt2 = s.unit("sqrt2").unwrap();
        let three_halves = s.vector(&[("one", rat!(3 / 2))]).unwrap();
        assert_eq!(ev.compare_abs(&sqrt2, &three_halves, 64).unwrap(), AbsOrdering::Less);
        assert_eq!(ev.compare_abs(&sqrt2, &sqrt2, 64).unwrap(), AbsOrdering::Undecidable);
        // |-sqrt2| vs |sqrt2|: magnitudes agree even though values differ
        assert_eq!(ev.compare_abs(&sqrt2.scale(&rat!(-1)), &sqrt2, 64).unwrap(), AbsOrdering::Undecidable);
    }

    #[test]
    fn halving_scale_examples() {
        let s = space();
        let ev = Evaluator::new(&s);
        let one = s.unit("one").unwrap();
        let sqrt2 = s.unit("sqrt2").unwrap();
        assert_eq!(ev.halving_scale(&sqrt2, &one).unwrap(), rat!(1 / 4));
        let small = s.vector(&[("sqrt3", rat!(1 / 10))]).unwrap();
        assert_eq!(ev.halving_scale(&small, &one).unwrap(), rat!(1));
        assert_eq!(ev.halving_scale(&FormalVector::zero(), &one), Err(Error::NonzeroRequired));
        assert_eq!(ev.halving_scale(&one, &FormalVector::zero()), Err(Error::NonzeroRequired));
    }

    #[test]
    fn halving_scale_with_value_zero_symbol_is_undecidable() {
        let s = space();
        let ev = Evaluator::with_cap(&s, 128);
        let z = s.unit("zero_ish").unwrap();
        let err = ev.halving_scale(&z, &s.unit("one").unwrap()).unwrap_err();
        assert!(matches!(err, Error::Undecidable { .. }), "{err:?}");
    }

    #[test]
    fn halving_scale_handles_tiny_bounds() {
        let s = space();
        let ev = Evaluator::with_cap(&s, 128);
        // |bound| ~ 2^-3000, far below what 128-bit absolute intervals resolve
        let bound = s.vector(&[("sqrt2", Rational::inverse_power_of_two(3000))]).unwrap();
        let q = ev.halving_scale(&s.unit("sqrt3").unwrap(), &bound).unwrap();
        // sqrt3 * 2^-m < sqrt2 * 2^-3001  <=>  3 * 4^-m < 2 * 4^-3001
        let m = q.denom().bits() - 1;
        assert_eq!(m, 3002);
    }

    #[test]
    fn pi_symbol_compares() {
        let s = space();
        let ev = Evaluator::new(&s);
        let pi = s.unit("pi").unwrap();
        let x = s.vector(&[("one", rat!(355 / 113))]).unwrap();
        // 355/113 = 3.14159292... > pi
        assert_eq!(ev.compare_abs(&pi, &x, 64).unwrap(), AbsOrdering::Less);
    }
}
