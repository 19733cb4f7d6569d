//! Exact rational scalars.
//!
//! Every scalar in the crate is a [`Rational`], an arbitrary-precision
//! fraction kept in lowest terms with a positive denominator. On every
//! external boundary (CLI, JSON reports) rationals travel as `"p/q"` strings.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed rational `{0}` (expected an integer or `p/q`)")]
pub struct ParseRationalError(pub String);

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n/d`, reduced. Panics on a zero denominator.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn is_integral(r: &Rational) -> bool {
    r.is_integer()
}

/// Parses `"p/q"`, `"-p/q"` or a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err())?;
    let den: BigInt = den.parse().map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(num, den))
}

/// Always `p/q`, even for integers: `-4` prints as `-4/1`.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Display adapter producing the `p/q` form.
pub struct Fraction<'a>(pub &'a Rational);

impl fmt::Display for Fraction<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

/// Serde helpers for `"p/q"` strings, for use with `#[serde(with = ...)]`.
pub mod as_string {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
            match r {
                Some(r) => s.serialize_str(&format_rational(r)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
            let s: Option<String> = Option::deserialize(d)?;
            s.map(|s| parse_rational(&s).map_err(serde::de::Error::custom))
                .transpose()
        }
    }
}

/// Exact square root of a non-negative rational, if it is a perfect square.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rational::new(n, d))
}

/// Seeded source of small random rationals, used by the randomized
/// identity checks (polynomial identity testing at rational points).
pub struct RationalSampler {
    rng: ChaCha8Rng,
    max_numer: i64,
    max_denom: i64,
}

impl RationalSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            max_numer: 60,
            max_denom: 24,
        }
    }

    pub fn with_bounds(seed: u64, max_numer: i64, max_denom: i64) -> Self {
        assert!(max_numer >= 1 && max_denom >= 1);
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            max_numer,
            max_denom,
        }
    }

    pub fn sample(&mut self) -> Rational {
        let n = self.rng.gen_range(-self.max_numer..=self.max_numer);
        let d = self.rng.gen_range(1..=self.max_denom);
        rat(n, d)
    }

    pub fn sample_nonzero(&mut self) -> Rational {
        loop {
            let r = self.sample();
            if !r.is_zero() {
                return r;
            }
        }
    }

    pub fn sample_non_integer(&mut self) -> Rational {
        loop {
            let r = self.sample();
            if !r.is_integer() {
                return r;
            }
        }
    }

    /// A rational avoiding every value in `excluded`.
    pub fn sample_avoiding(&mut self, excluded: &[Rational]) -> Rational {
        loop {
            let r = self.sample();
            if !excluded.contains(&r) {
                return r;
            }
        }
    }

    pub fn sample_index(&mut self, bound: i64) -> i64 {
        self.rng.gen_range(-bound..=bound)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_formats() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational(" -4 ").unwrap(), int(-4));
        assert_eq!(parse_rational("2/-4").unwrap(), rat(-1, 2));
        assert_eq!(format_rational(&int(-4)), "-4/1");
        assert_eq!(format_rational(&rat(0, 7)), "0/1");
        assert_eq!(Fraction(&rat(6, -8)).to_string(), "-3/4");
    }

    #[test]
    fn rejects_malformed() {
        for s in ["", "1/0", "a/2", "1.5", "1//2"] {
            assert!(parse_rational(s).is_err(), "{s}");
        }
    }

    #[test]
    fn exact_sqrt() {
        assert_eq!(rational_sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(rational_sqrt(&rat(2, 1)), None);
        assert_eq!(rational_sqrt(&rat(-1, 1)), None);
    }

    #[test]
    fn sampler_is_deterministic() {
        let a: Vec<_> = {
            let mut s = RationalSampler::new(7);
            (0..10).map(|_| s.sample()).collect()
        };
        let b: Vec<_> = {
            let mut s = RationalSampler::new(7);
            (0..10).map(|_| s.sample()).collect()
        };
        assert_eq!(a, b);
        let mut s = RationalSampler::new(1);
        assert!((0..50).all(|_| !s.sample_non_integer().is_integer()));
    }
}
