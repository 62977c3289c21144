use crate::exactnum::{Rational, ValueExpr};

use super::Space;

/// Number of symbols in the stock space: `one` plus `sqrtP` for the first
/// 127 primes.
pub const DEFAULT_SYMBOLS: usize = 128;

/// The first `count` primes.
pub fn primes(count: usize) -> Vec<u64> {
    if count == 0 {
        return Vec::new();
    }
    // p_n < n (ln n + ln ln n) for n >= 6
    let n = count.max(6) as f64;
    let limit = (n * (n.ln() + n.ln().ln())).ceil() as usize + 1;
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::with_capacity(count);
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        if out.len() == count {
            break;
        }
        for j in (i * i..=limit).step_by(i) {
            composite[j] = true;
        }
    }
    out
}

/// `one, sqrt2, sqrt3, sqrt5, ...` with `symbols` entries in total.
pub fn prime_root_space(symbols: usize) -> Space {
    let mut space = Space::new();
    for p in primes(symbols.saturating_sub(1)) {
        let value = ValueExpr::sqrt(Rational::from_integer(p)).expect("primes are positive");
        space
            .add_symbol(&format!("sqrt{p}"), value)
            .expect("prime names are unique");
    }
    space
}

pub fn default_space() -> Space {
    prime_root_space(DEFAULT_SYMBOLS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_table() {
        assert_eq!(primes(6), vec![2, 3, 5, 7, 11, 13]);
        assert_eq!(primes(127).last(), Some(&709));
        assert_eq!(primes(10_000).last(), Some(&104_729));
    }

    #[test]
    fn default_space_shape() {
        let s = default_space();
        assert_eq!(s.len(), 128);
        assert_eq!(s.name(s.one()), "one");
        assert_eq!(s.symbols()[1].name, "sqrt2");
        assert_eq!(s.symbols()[127].name, "sqrt709");
    }
}
