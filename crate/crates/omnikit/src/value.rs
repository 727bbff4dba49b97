//! Exact rational values with an exactness marker.
//!
//! Hypergraph and binary-linear backends produce exact rationals. Tabular
//! entropies are computed in double precision and rationalized once at a
//! fixed grid (1e-12); everything downstream stays in exact arithmetic, and
//! only comparisons are tolerance-aware (1e-9 for inexact provenance).

use crate::error::{KitError, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt;

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// Comparison tolerance used wherever a quantity has float provenance.
pub fn float_tolerance() -> Rat {
    Rat::new(BigInt::from(1), BigInt::from(1_000_000_000i64))
}

/// Rationalize a double by rounding to the 1e-12 grid.
pub fn rationalize(x: f64) -> Rat {
    const GRID: i64 = 1_000_000_000_000;
    let scaled = x * GRID as f64;
    let rounded = scaled.round();
    debug_assert!(rounded.abs() < 9e15, "entropy magnitude out of range");
    Rat::new(BigInt::from(rounded as i64), BigInt::from(GRID))
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().expect("rational out of f64 range")
}

/// Parse "p/q" or "p" into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let mk_err = || KitError::Parse(format!("expected a rational like \"3\" or \"1/2\", got {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let num: BigInt = p.trim().parse().map_err(|_| mk_err())?;
        let den: BigInt = q.trim().parse().map_err(|_| mk_err())?;
        if den.is_zero() {
            return Err(KitError::Parse(format!("zero denominator in {s:?}")));
        }
        Ok(Rat::new(num, den))
    } else {
        let num: BigInt = s.parse().map_err(|_| mk_err())?;
        Ok(Rat::from(num))
    }
}

/// A rational quantity that remembers whether it came from an exact backend.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Value {
    pub rat: Rat,
    pub exact: bool,
}

impl Value {
    pub fn exact(rat: Rat) -> Self {
        Value { rat, exact: true }
    }

    pub fn inexact(rat: Rat) -> Self {
        Value { rat, exact: false }
    }

    pub fn with_exactness(rat: Rat, exact: bool) -> Self {
        Value { rat, exact }
    }

    /// Rendered form: "p/q" for exact values, decimal for float-backed ones.
    pub fn render(&self) -> String {
        if self.exact {
            self.rat.to_string()
        } else {
            format!("{}", to_f64(&self.rat))
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Tolerance-aware equality: exact when `exact`, within 1e-9 otherwise.
pub fn eq_within(a: &Rat, b: &Rat, exact: bool) -> bool {
    if exact {
        a == b
    } else {
        (a - b).abs() <= float_tolerance()
    }
}

/// Tolerance-aware `a <= b`.
pub fn le_within(a: &Rat, b: &Rat, exact: bool) -> bool {
    if exact {
        a <= b
    } else {
        a - b <= &float_tolerance() * Rat::from(BigInt::from(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rat("3").unwrap(), rat_int(3));
        assert_eq!(parse_rat("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rat(" -7/4 ").unwrap(), rat(-7, 4));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn rationalize_recovers_dyadics() {
        assert_eq!(rationalize(0.5), rat(1, 2));
        assert_eq!(rationalize(2.5), rat(5, 2));
        assert_eq!(rationalize(3.0), rat_int(3));
    }

    #[test]
    fn render_distinguishes_exactness() {
        assert_eq!(Value::exact(rat(3, 2)).render(), "3/2");
        assert_eq!(Value::exact(rat_int(3)).render(), "3");
        assert_eq!(Value::inexact(rat(3, 2)).render(), "1.5");
    }
}
