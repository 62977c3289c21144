use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Rational, ValueExpr};

/// Working precisions start here and double up to the configured cap.
pub(crate) const FIRST_WORKING_BITS: u32 = 32;

/// A closed interval `[lo, hi]` with dyadic endpoints `lo_num / 2^scale`
/// and `hi_num / 2^scale`, refined to width at most `2^-precision_bits`.
#[derive(Clone, PartialEq, Eq)]
pub struct IntervalValue {
    lo: BigInt,
    hi: BigInt,
    scale: u32,
    precision_bits: u32,
}

impl IntervalValue {
    pub(crate) fn from_enclosure(enc: Enclosure, scale: u32, precision_bits: u32) -> Self {
        debug_assert!(enc.lo <= enc.hi);
        Self {
            lo: enc.lo,
            hi: enc.hi,
            scale,
            precision_bits,
        }
    }

    pub fn lo(&self) -> Rational {
        dyadic(&self.lo, self.scale)
    }

    pub fn hi(&self) -> Rational {
        dyadic(&self.hi, self.scale)
    }

    pub fn width(&self) -> Rational {
        dyadic(&(&self.hi - &self.lo), self.scale)
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    /// Denominator exponent shared by both endpoints.
    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn contains(&self, value: &Rational) -> bool {
        self.lo() <= *value && *value <= self.hi()
    }

    /// Interval enclosing `|x|` for every `x` in `self`.
    pub fn abs(&self) -> Self {
        let (lo, hi) = if !self.lo.is_negative() {
            (self.lo.clone(), self.hi.clone())
        } else if !self.hi.is_positive() {
            (-&self.hi, -&self.lo)
        } else {
            (BigInt::zero(), (-&self.lo).max(self.hi.clone()))
        };
        Self { lo, hi, ..*self }
    }

    /// `Less` when `self` lies strictly below `other`, `Greater` when strictly
    /// above, `None` while they overlap.
    pub fn separation(&self, other: &Self) -> Option<Ordering> {
        if self.hi() < other.lo() {
            Some(Ordering::Less)
        } else if other.hi() < self.lo() {
            Some(Ordering::Greater)
        } else {
            None
        }
    }
}

impl fmt::Debug for IntervalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]@{}", self.lo(), self.hi(), self.precision_bits)
    }
}

fn dyadic(num: &BigInt, scale: u32) -> Rational {
    Rational::new(num.clone(), BigInt::one() << scale).expect("power of two is nonzero")
}

/// Integer endpoints of an enclosure at an implicit scale `2^-w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Enclosure {
    pub lo: BigInt,
    pub hi: BigInt,
}

fn shr_floor(x: &BigInt, bits: u32) -> BigInt {
    x.div_floor(&(BigInt::one() << bits))
}

fn shr_ceil(x: &BigInt, bits: u32) -> BigInt {
    -shr_floor(&-x, bits)
}

impl Enclosure {
    pub fn rational(r: &Rational, w: u32) -> Self {
        let scaled = r.numer() << w;
        Self {
            lo: scaled.div_floor(r.denom()),
            hi: -((-&scaled).div_floor(r.denom())),
        }
    }

    pub fn sqrt(r: &Rational, w: u32) -> Self {
        let scaled = r.numer() << (2 * w);
        let (quot, rem) = scaled.div_rem(r.denom());
        let lo = quot.sqrt();
        let hi = if rem.is_zero() && &lo * &lo == quot {
            lo.clone()
        } else {
            &lo + 1
        };
        Self { lo, hi }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    pub fn mul(&self, other: &Self, w: u32) -> Self {
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let min = products.iter().min().expect("nonempty");
        let max = products.iter().max().expect("nonempty");
        Self {
            lo: shr_floor(min, w),
            hi: shr_ceil(max, w),
        }
    }

    /// `None` when the divisor interval contains zero.
    pub fn div(&self, other: &Self, w: u32) -> Option<Self> {
        if !other.lo.is_positive() && !other.hi.is_negative() {
            return None;
        }
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for x in [&self.lo, &self.hi] {
            let shifted = x << w;
            for y in [&other.lo, &other.hi] {
                let floor = shifted.div_floor(y);
                let ceil = -((-&shifted).div_floor(y));
                lo = Some(lo.map_or(floor.clone(), |l| l.min(floor)));
                hi = Some(hi.map_or(ceil.clone(), |h| h.max(ceil)));
            }
        }
        Some(Self {
            lo: lo.expect("set"),
            hi: hi.expect("set"),
        })
    }

    pub fn intersect(&self, other: &Self) -> Self {
        Self {
            lo: (&self.lo).max(&other.lo).clone(),
            hi: (&self.hi).min(&other.hi).clone(),
        }
    }

    pub fn rescale(&self, from: u32, to: u32) -> Self {
        debug_assert!(to >= from);
        Self {
            lo: &self.lo << (to - from),
            hi: &self.hi << (to - from),
        }
    }

    /// Width at scale `w` is at most `2^-bits`.
    pub fn narrow_enough(&self, w: u32, bits: u32) -> bool {
        ((&self.hi - &self.lo) << bits) <= (BigInt::one() << w)
    }

    /// Widen a fixed-point estimate at scale `w + guard` with absolute error
    /// at most `err` units into an enclosure at scale `w`.
    fn from_estimate(estimate: &BigInt, err: u64, guard: u32) -> Self {
        Self {
            lo: shr_floor(&(estimate - err), guard),
            hi: shr_ceil(&(estimate + err), guard),
        }
    }
}

const GUARD_BITS: u32 = 40;

/// `atan(1/x) * 2^bits` in fixed point, with the number of series terms used.
/// Each truncation loses less than one unit on the running power and on
/// each term, so the total error is below `3 * terms + 2` units.
fn atan_inv(x: u64, bits: u32) -> (BigInt, u64) {
    let x_sq = BigInt::from(x * x);
    let mut power = (BigInt::one() << bits) / BigInt::from(x);
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x_sq;
        k += 1;
    }
    (sum, k)
}

pub(crate) fn pi(w: u32) -> Enclosure {
    let bits = w + GUARD_BITS;
    let (a5, k5) = atan_inv(5, bits);
    let (a239, k239) = atan_inv(239, bits);
    let estimate = a5 * 16 - a239 * 4;
    let err = 16 * (3 * k5 + 2) + 4 * (3 * k239 + 2);
    Enclosure::from_estimate(&estimate, err, GUARD_BITS)
}

/// `e = sum 1/k!`; every truncated term is within two units of exact and
/// the omitted tail is below two units.
pub(crate) fn euler(w: u32) -> Enclosure {
    let bits = w + GUARD_BITS;
    let mut term = BigInt::one() << bits;
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !term.is_zero() {
        sum += &term;
        k += 1;
        term /= BigInt::from(k);
    }
    Enclosure::from_estimate(&sum, 2 * k + 2, GUARD_BITS)
}

/// Enclosure of `expr` at scale `2^-w`, or `None` if some divisor could not
/// be separated from zero at this precision.
pub(crate) fn enclose(expr: &ValueExpr, w: u32) -> Option<Enclosure> {
    Some(match expr {
        ValueExpr::Lit(r) => Enclosure::rational(r, w),
        ValueExpr::Sqrt(r) => Enclosure::sqrt(r, w),
        ValueExpr::Pi => pi(w),
        ValueExpr::E => euler(w),
        ValueExpr::Neg(a) => enclose(a, w)?.neg(),
        ValueExpr::Add(a, b) => enclose(a, w)?.add(&enclose(b, w)?),
        ValueExpr::Sub(a, b) => enclose(a, w)?.sub(&enclose(b, w)?),
        ValueExpr::Mul(a, b) => enclose(a, w)?.mul(&enclose(b, w)?, w),
        ValueExpr::Div(a, b) => enclose(a, w)?.div(&enclose(b, w)?, w)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    #[test]
    fn sqrt_of_perfect_square_is_exact() {
        let enc = Enclosure::sqrt(&rat!(9 / 4), 10);
        assert_eq!(enc.lo, enc.hi);
        assert_eq!(enc.lo, BigInt::from(1536));
    }

    #[test]
    fn pi_and_e_bracket_known_digits() {
        // 3.14159265358979323846 and 2.71828182845904523536, 20 decimals each
        let pi_lo = rat!(314159265358979323i64 / 100000000000000000i64);
        let pi_hi = rat!(314159265358979324i64 / 100000000000000000i64);
        let e_lo = rat!(271828182845904523i64 / 100000000000000000i64);
        let e_hi = rat!(271828182845904524i64 / 100000000000000000i64);
        for w in [64, 100, 256] {
            let p = pi(w);
            let e = euler(w);
            let (plo, phi) = (dyadic(&p.lo, w), dyadic(&p.hi, w));
            let (elo, ehi) = (dyadic(&e.lo, w), dyadic(&e.hi, w));
            assert!(plo <= pi_hi && pi_lo <= phi, "pi at {w}: {plo:?} {phi:?}");
            assert!(elo <= e_hi && e_lo <= ehi, "e at {w}: {elo:?} {ehi:?}");
            assert!(p.narrow_enough(w, w - 4));
            assert!(e.narrow_enough(w, w - 4));
        }
    }

    #[test]
    fn division_by_straddling_interval_is_refused() {
        let x = Enclosure::rational(&rat!(1), 8);
        let y = Enclosure {
            lo: BigInt::from(-1),
            hi: BigInt::from(1),
        };
        assert!(x.div(&y, 8).is_none());
    }

    #[test]
    fn abs_of_straddling_interval() {
        let iv = IntervalValue {
            lo: BigInt::from(-3),
            hi: BigInt::from(2),
            scale: 0,
            precision_bits: 0,
        };
        let a = iv.abs();
        assert_eq!(a.lo(), rat!(0));
        assert_eq!(a.hi(), rat!(3));
    }
}
