//! Polynomials used by the constraint systems: sparse multivariate
//! polynomials over the relation unknowns, and dense univariate polynomials
//! for branch parameters.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::rational::{rational_sqrt, Fraction, Rational};

/// An unknown of a constraint system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    /// Scalar coefficient `F_{i,n}`: `I(i) v_{α+n} = F_{i,n} v_{α+n+i}`.
    Coef(i64, i64),
    /// Entry `(row, col)` (0-based) of the matrix `F_{i,n}`.
    Entry(i64, i64, u8, u8),
    /// The eigenvalue `F` of `I(0)`.
    Scalar,
    CI,
    CDI,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Coef(i, n) => write!(f, "F[{i},{n}]"),
            Var::Entry(i, n, r, c) => write!(f, "F[{i},{n}]({},{})", r + 1, c + 1),
            Var::Scalar => f.write_str("F"),
            Var::CI => f.write_str("cI"),
            Var::CDI => f.write_str("cDI"),
        }
    }
}

/// Sorted multiset of variables.
pub type Monomial = Vec<Var>;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn var(v: Var) -> Self {
        Self::monomial(vec![v], Rational::one())
    }

    pub fn monomial(mut m: Monomial, c: Rational) -> Self {
        m.sort();
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flatten().copied().collect()
    }

    pub fn coeff(&self, m: &[Var]) -> Rational {
        let mut key = m.to_vec();
        key.sort();
        self.terms.get(&key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    pub fn add(&self, other: &Poly) -> Self {
        let mut out = self.clone();
        for (m, v) in &other.terms {
            out.add_term(m.clone(), v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn mul(&self, other: &Poly) -> Self {
        let mut out = Self::zero();
        for (ma, va) in &self.terms {
            for (mb, vb) in &other.terms {
                let mut m: Monomial = ma.iter().chain(mb).copied().collect();
                m.sort();
                out.add_term(m, va * vb);
            }
        }
        out
    }

    /// Replaces each variable for which `f` returns a polynomial.
    pub fn substitute(&self, f: &impl Fn(&Var) -> Option<Poly>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut term = Poly::constant(c.clone());
            for v in m {
                let factor = f(v).unwrap_or_else(|| Poly::var(*v));
                term = term.mul(&factor);
            }
            out = out.add(&term);
        }
        out
    }

    /// Evaluates with every variable assigned; `None` if one is missing.
    pub fn eval(&self, f: &impl Fn(&Var) -> Option<Rational>) -> Option<Rational> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for v in m {
                t *= f(v)?;
            }
            acc += t;
        }
        Some(acc)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}", Fraction(c))?;
            for v in m {
                write!(f, "*{v}")?;
            }
        }
        Ok(())
    }
}

/// Dense univariate polynomial, coefficients from the constant term up.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UPoly {
    coeffs: Vec<Rational>,
}

impl UPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `c0 + c1·t`
    pub fn affine(c0: Rational, c1: Rational) -> Self {
        Self::new(vec![c0, c1])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.coeffs.len() {
            0 => Some(Rational::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn add(&self, other: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UPoly::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn scale(&self, c: &Rational) -> UPoly {
        UPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn sub(&self, other: &UPoly) -> UPoly {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn mul(&self, other: &UPoly) -> UPoly {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UPoly::new(out)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * t + c)
    }

    fn monic(&self) -> UPoly {
        match self.coeffs.last() {
            Some(lead) => self.scale(&lead.recip()),
            None => UPoly::zero(),
        }
    }

    /// Remainder of division by a nonzero polynomial.
    pub fn rem(&self, d: &UPoly) -> UPoly {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.coeffs[dd].clone();
        let mut r = self.clone();
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let f = &r.coeffs[rd] / &lead;
            let mut shifted = vec![Rational::zero(); rd - dd];
            shifted.extend(d.coeffs.iter().map(|c| c * &f));
            r = r.sub(&UPoly::new(shifted));
        }
        r
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Rational roots of a polynomial of degree at most two.
    /// `Err(())` when a quadratic has no rational factorization.
    #[allow(clippy::result_unit_err)]
    pub fn rational_roots(&self) -> Result<Vec<Rational>, ()> {
        match self.degree() {
            None | Some(0) => Ok(Vec::new()),
            Some(1) => Ok(vec![-&self.coeffs[0] / &self.coeffs[1]]),
            Some(2) => {
                let (c, b, a) = (&self.coeffs[0], &self.coeffs[1], &self.coeffs[2]);
                let disc = b * b - Rational::from_integer(4.into()) * a * c;
                let s = rational_sqrt(&disc).ok_or(())?;
                let two_a = a * Rational::from_integer(2.into());
                let r1 = (-b + &s) / &two_a;
                let r2 = (-b - &s) / &two_a;
                Ok(if r1 == r2 { vec![r1] } else { vec![r1, r2] })
            }
            Some(_) => Err(()),
        }
    }
}
