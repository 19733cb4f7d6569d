//! The twisted Heisenberg-Virasoro algebra over the rationals.
//!
//! Basis: `x_n`, `I(n)` for every integer `n`, and the central elements
//! `C_D`, `C_DI`, `C_I`. The bracket is
//!
//! ```text
//! [x_n, x_m]   = (m - n) x_{n+m} + δ_{n,-m} (n³ - n)/12 C_D
//! [x_n, I(m)]  = m I(n+m)       + δ_{n,-m} (n² + n)   C_DI
//! [I(n), I(m)] = n δ_{n,-m} C_I
//! ```
//!
//! with `C_D`, `C_DI`, `C_I` central. Note the `(m - n)` ordering in the
//! first line; it is kept as is.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::Zero;
use thiserror::Error;

use crate::rational::{int, parse_rational, rat, Fraction, Rational};

/// A basis element. Textual form: `x[n]`, `I[n]`, `CD`, `CDI`, `CI`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    X(i64),
    I(i64),
    CD,
    CDI,
    CI,
}

pub const CENTRAL: [Generator; 3] = [Generator::CD, Generator::CDI, Generator::CI];

impl Generator {
    pub fn degree(&self) -> i64 {
        match *self {
            Generator::X(n) | Generator::I(n) => n,
            _ => 0,
        }
    }

    pub fn is_central(&self) -> bool {
        matches!(self, Generator::CD | Generator::CDI | Generator::CI)
    }

    /// All `x_n`, `I(n)` with `|n| <= bound`, followed by the three central elements.
    pub fn basis(bound: i64) -> Vec<Generator> {
        let mut out: Vec<_> = (-bound..=bound).map(Generator::X).collect();
        out.extend((-bound..=bound).map(Generator::I));
        out.extend(CENTRAL);
        out
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::X(n) => write!(f, "x[{n}]"),
            Generator::I(n) => write!(f, "I[{n}]"),
            Generator::CD => f.write_str("CD"),
            Generator::CDI => f.write_str("CDI"),
            Generator::CI => f.write_str("CI"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseElementError {
    #[error("unknown generator `{0}`")]
    Generator(String),
    #[error("malformed coefficient in `{0}`")]
    Coefficient(String),
    #[error("empty element")]
    Empty,
}

impl FromStr for Generator {
    type Err = ParseElementError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || ParseElementError::Generator(t.to_string());
        match t {
            "CD" => return Ok(Generator::CD),
            "CDI" => return Ok(Generator::CDI),
            "CI" => return Ok(Generator::CI),
            _ => {}
        }
        let (head, rest) = t.split_at(t.find('[').ok_or_else(bad)?);
        let index = rest
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(bad)?
            .trim()
            .parse::<i64>()
            .map_err(|_| bad())?;
        match head.trim() {
            "x" => Ok(Generator::X(index)),
            "I" => Ok(Generator::I(index)),
            _ => Err(bad()),
        }
    }
}

/// Degree of a [`LieElement`] under the ℤ-grading.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementDegree {
    Zero,
    Homogeneous(i64),
    Nonhomogeneous,
}

/// Finite rational combination of generators. Zero coefficients are never
/// stored, so structural equality is equality in the algebra.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct LieElement {
    terms: BTreeMap<Generator, Rational>,
}

impl LieElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(g: Generator, c: Rational) -> Self {
        let mut e = Self::zero();
        e.add_term(g, c);
        e
    }

    pub fn add_term(&mut self, g: Generator, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(g).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&g);
        }
    }

    pub fn coeff(&self, g: &Generator) -> Rational {
        self.terms.get(g).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Generator, &Rational)> {
        self.terms.iter()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(g, v)| (*g, v * c)).collect(),
        }
    }

    pub fn degree(&self) -> ElementDegree {
        let mut degrees = self.terms.keys().map(Generator::degree);
        let Some(first) = degrees.next() else {
            return ElementDegree::Zero;
        };
        if degrees.all(|d| d == first) {
            ElementDegree::Homogeneous(first)
        } else {
            ElementDegree::Nonhomogeneous
        }
    }
}

impl From<Generator> for LieElement {
    fn from(g: Generator) -> Self {
        Self::term(g, int(1))
    }
}

impl FromIterator<(Generator, Rational)> for LieElement {
    fn from_iter<T: IntoIterator<Item = (Generator, Rational)>>(iter: T) -> Self {
        let mut e = Self::zero();
        for (g, c) in iter {
            e.add_term(g, c);
        }
        e
    }
}

impl AddAssign<&LieElement> for LieElement {
    fn add_assign(&mut self, rhs: &LieElement) {
        for (g, c) in &rhs.terms {
            self.add_term(*g, c.clone());
        }
    }
}

impl Add for &LieElement {
    type Output = LieElement;
    fn add(self, rhs: &LieElement) -> LieElement {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for LieElement {
    type Output = LieElement;
    fn add(mut self, rhs: LieElement) -> LieElement {
        self += &rhs;
        self
    }
}

impl Neg for &LieElement {
    type Output = LieElement;
    fn neg(self) -> LieElement {
        self.scale(&int(-1))
    }
}

impl Sub for &LieElement {
    type Output = LieElement;
    fn sub(self, rhs: &LieElement) -> LieElement {
        self + &(-rhs)
    }
}

impl Mul<&LieElement> for &Rational {
    type Output = LieElement;
    fn mul(self, rhs: &LieElement) -> LieElement {
        rhs.scale(self)
    }
}

impl fmt::Display for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (g, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}*{}", Fraction(c), g)?;
        }
        Ok(())
    }
}

/// Parses sums like `x[1] + 2*I[-1] - 1/2*CD`.
impl FromStr for LieElement {
    type Err = ParseElementError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = LieElement::zero();
        let mut terms = Vec::new();
        let mut depth = 0usize;
        let mut start = 0usize;
        let mut sign = 1i64;
        for (pos, ch) in s.char_indices() {
            match ch {
                '[' => depth += 1,
                ']' => depth = depth.saturating_sub(1),
                '+' | '-' if depth == 0 => {
                    let chunk = s[start..pos].trim();
                    let prev = s[..pos].trim_end();
                    // a sign directly after '*' or '/' belongs to a coefficient
                    if prev.ends_with('*') || prev.ends_with('/') {
                        continue;
                    }
                    if !chunk.is_empty() {
                        terms.push((sign, chunk.to_string()));
                    }
                    sign = if ch == '-' { -1 } else { 1 };
                    start = pos + 1;
                }
                _ => {}
            }
        }
        let tail = s[start..].trim();
        if !tail.is_empty() {
            terms.push((sign, tail.to_string()));
        }
        if terms.is_empty() {
            return Err(ParseElementError::Empty);
        }
        for (sign, t) in terms {
            let (coeff, gen) = match t.rsplit_once('*') {
                Some((c, g)) => (
                    parse_rational(c).map_err(|_| ParseElementError::Coefficient(t.clone()))?,
                    g.parse::<Generator>()?,
                ),
                None => (int(1), t.parse::<Generator>()?),
            };
            out.add_term(gen, coeff * int(sign));
        }
        Ok(out)
    }
}

/// Bracket of two basis elements.
pub fn bracket_generators(a: Generator, b: Generator) -> LieElement {
    use Generator::*;
    let mut out = LieElement::zero();
    match (a, b) {
        (X(n), X(m)) => {
            out.add_term(X(n + m), int(m - n));
            if n == -m {
                out.add_term(CD, rat(n * n * n - n, 12));
            }
        }
        (X(n), I(m)) => {
            out.add_term(I(n + m), int(m));
            if n == -m {
                out.add_term(CDI, int(n * n + n));
            }
        }
        (I(_), X(_)) => return -&bracket_generators(b, a),
        (I(n), I(m)) if n == -m => out.add_term(CI, int(n)),
        _ => {}
    }
    out
}

/// Bilinear extension of [`bracket_generators`].
pub fn bracket(a: &LieElement, b: &LieElement) -> LieElement {
    let mut out = LieElement::zero();
    for (ga, ca) in a.iter() {
        for (gb, cb) in b.iter() {
            let c = ca * cb;
            for (g, v) in bracket_generators(*ga, *gb).iter() {
                out.add_term(*g, v * &c);
            }
        }
    }
    out
}

/// `[a,[b,c]] + [b,[c,a]] + [c,[a,b]]`.
pub fn jacobiator(a: &LieElement, b: &LieElement, c: &LieElement) -> LieElement {
    bracket(a, &bracket(b, c)) + bracket(b, &bracket(c, a)) + bracket(c, &bracket(a, b))
}

/// Basis of the Virasoro copy `Vir[e]`: `x_n + e I(n)` for `n != 0` and the
/// corrected zero mode `x_0 + e I(0) - e C_DI - (e²/2) C_I`.
pub fn vir_embed(e: &Rational, n: i64) -> LieElement {
    let mut out = LieElement::term(Generator::X(n), int(1));
    out.add_term(Generator::I(n), e.clone());
    if n == 0 {
        out.add_term(Generator::CDI, -e.clone());
        out.add_term(Generator::CI, -(e * e) / int(2));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use Generator::*;

    fn g(x: Generator) -> LieElement {
        x.into()
    }

    #[test]
    fn bracket_examples() {
        let b = bracket(&g(X(2)), &g(X(-2)));
        let expected: LieElement = [(X(0), int(-4)), (CD, rat(1, 2))].into_iter().collect();
        assert_eq!(b, expected);

        let b = bracket(&g(X(1)), &g(I(-1)));
        let expected: LieElement = [(I(0), int(-1)), (CDI, int(2))].into_iter().collect();
        assert_eq!(b, expected);

        assert_eq!(bracket(&g(I(3)), &g(I(-3))), LieElement::term(CI, int(3)));
        assert!(bracket(&g(I(5)), &g(CD)).is_zero());
    }

    #[test]
    fn vir_embed_examples() {
        let e = rat(3, 7);
        let v5: LieElement = [(X(5), int(1)), (I(5), e.clone())].into_iter().collect();
        assert_eq!(vir_embed(&e, 5), v5);
        let v0: LieElement = [
            (X(0), int(1)),
            (I(0), e.clone()),
            (CDI, -e.clone()),
            (CI, -(&e * &e) / int(2)),
        ]
        .into_iter()
        .collect();
        assert_eq!(vir_embed(&e, 0), v0);
        for n in -3..=3 {
            assert_eq!(vir_embed(&int(0), n), g(X(n)));
        }
    }

    #[test]
    fn degrees() {
        assert_eq!(X(-3).degree(), -3);
        assert_eq!(CDI.degree(), 0);
        let mixed = &g(X(1)) + &g(I(2));
        assert_eq!(mixed.degree(), ElementDegree::Nonhomogeneous);
        assert_eq!((&g(X(2)) + &g(I(2))).degree(), ElementDegree::Homogeneous(2));
        assert_eq!(LieElement::zero().degree(), ElementDegree::Zero);
    }

    #[test]
    fn jacobiator_examples() {
        assert!(jacobiator(&g(X(1)), &g(X(2)), &g(X(3))).is_zero());
        assert!(jacobiator(&g(X(2)), &g(I(-1)), &g(X(-1))).is_zero());
        assert!(jacobiator(&g(CD), &g(X(5)), &g(I(7))).is_zero());
    }

    #[test]
    fn canonical_form_drops_zeros() {
        let a = g(X(1));
        assert!((&a - &a).is_zero());
        assert_eq!((&a - &a), LieElement::zero());
    }

    #[test]
    fn parse_roundtrip() {
        let e: LieElement = "x[1] + 2*I[-1] - 1/2*CD".parse().unwrap();
        assert_eq!(e.coeff(&X(1)), int(1));
        assert_eq!(e.coeff(&I(-1)), int(2));
        assert_eq!(e.coeff(&CD), rat(-1, 2));
        let e: LieElement = "-x[-2] + -3/4*CI".parse().unwrap();
        assert_eq!(e.coeff(&X(-2)), int(-1));
        assert_eq!(e.coeff(&CI), rat(-3, 4));
        assert_eq!("x[ -7 ]".parse::<Generator>().unwrap(), X(-7));
        assert!("y[1]".parse::<Generator>().is_err());
        assert!("x[1".parse::<Generator>().is_err());
        assert!("".parse::<LieElement>().is_err());
        let back: LieElement = e.to_string().parse().unwrap();
        assert_eq!(back, e);
    }
}
