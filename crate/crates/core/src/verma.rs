//! Verma modules `M(λ, λ_I, c_D, c_DI, c_I)` truncated by depth.
//!
//! A basis vector is a PBW monomial `x_{-a_1} ⋯ x_{-a_r} I(-b_1) ⋯ I(-b_s) v`
//! with `a` and `b` partitions; the action of a generator is computed by
//! straightening it to the right until it reaches `v`.

use std::cell::RefCell;
use std::cmp::{Ordering, Reverse};
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::{bracket_generators, Generator};
use crate::linalg::Matrix;
use crate::modules::ModuleWindow;
use crate::rational::{format_rational, int, parse_rational, ParseRationalError, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HighestWeight {
    pub lambda: Rational,
    pub lambda_i: Rational,
    pub c_d: Rational,
    pub c_di: Rational,
    pub c_i: Rational,
}

impl HighestWeight {
    pub fn new(lambda: Rational, lambda_i: Rational, c_d: Rational, c_di: Rational, c_i: Rational) -> Self {
        Self {
            lambda,
            lambda_i,
            c_d,
            c_di,
            c_i,
        }
    }

    pub fn to_strings(&self) -> [String; 5] {
        [&self.lambda, &self.lambda_i, &self.c_d, &self.c_di, &self.c_i].map(format_rational)
    }
}

/// Five comma-separated rationals `λ,λ_I,c_D,c_DI,c_I`.
impl FromStr for HighestWeight {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [a, b, c, d, e] = parts.as_slice() else {
            return Err(ParseRationalError(format!("expected five values, got {s:?}")));
        };
        Ok(Self::new(
            parse_rational(a)?,
            parse_rational(b)?,
            parse_rational(c)?,
            parse_rational(d)?,
            parse_rational(e)?,
        ))
    }
}

/// `x_{-k}` for each `k` in `x_part`, then `I(-k)` for each `k` in `i_part`;
/// both weakly decreasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PBWMonomial {
    pub x_part: Vec<i64>,
    pub i_part: Vec<i64>,
}

impl PBWMonomial {
    pub fn new(x_part: Vec<i64>, i_part: Vec<i64>) -> Self {
        debug_assert!(x_part.windows(2).all(|p| p[0] >= p[1]) && x_part.iter().all(|&k| k >= 1));
        debug_assert!(i_part.windows(2).all(|p| p[0] >= p[1]) && i_part.iter().all(|&k| k >= 1));
        Self { x_part, i_part }
    }

    pub fn one() -> Self {
        Self::default()
    }

    pub fn depth(&self) -> i64 {
        self.x_part.iter().sum::<i64>() + self.i_part.iter().sum::<i64>()
    }

    pub fn factors(&self) -> impl Iterator<Item = Generator> + '_ {
        let xs = self.x_part.iter().map(|&k| Generator::X(-k));
        xs.chain(self.i_part.iter().map(|&k| Generator::I(-k)))
    }

    fn split_first(&self) -> Option<(Generator, PBWMonomial)> {
        let mut rest = self.clone();
        if !rest.x_part.is_empty() {
            let k = rest.x_part.remove(0);
            Some((Generator::X(-k), rest))
        } else if !rest.i_part.is_empty() {
            let k = rest.i_part.remove(0);
            Some((Generator::I(-k), rest))
        } else {
            None
        }
    }

    /// `g · self` when `g` sorts before the leading factor.
    fn prepend(&self, g: Generator) -> Option<PBWMonomial> {
        let lead = self.factors().next();
        if g.degree() >= 0 || lead.is_some_and(|f| factor_key(f) < factor_key(g)) {
            return None;
        }
        let mut out = self.clone();
        match g {
            Generator::X(k) => out.x_part.insert(0, -k),
            Generator::I(k) => out.i_part.insert(0, -k),
            _ => unreachable!(),
        }
        Some(out)
    }
}

fn factor_key(g: Generator) -> (u8, i64) {
    match g {
        Generator::X(k) => (0, k),
        Generator::I(k) => (1, k),
        _ => (2, 0),
    }
}

/// Canonical order: by depth, then deeper `x` part first, then both
/// partitions in descending lexicographic order.
impl Ord for PBWMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let key = |m: &PBWMonomial| {
            (
                m.depth(),
                Reverse(m.x_part.iter().sum::<i64>()),
                Reverse(m.x_part.clone()),
                Reverse(m.i_part.clone()),
            )
        };
        key(self).cmp(&key(other))
    }
}

impl PartialOrd for PBWMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PBWMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.x_part.is_empty() && self.i_part.is_empty() {
            return f.write_str("1");
        }
        for g in self.factors() {
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

type Terms = BTreeMap<PBWMonomial, Rational>;

fn add_into(out: &mut Terms, m: PBWMonomial, c: Rational) {
    if c.is_zero() {
        return;
    }
    match out.entry(m) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// A homogeneous vector at a fixed depth.
#[derive(Debug, Clone, Eq)]
pub struct VermaVector {
    depth: i64,
    coeffs: Terms,
}

/// Zero vectors are equal whatever their nominal depth.
impl PartialEq for VermaVector {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && (self.depth == other.depth || self.coeffs.is_empty())
    }
}

impl VermaVector {
    pub fn zero(depth: i64) -> Self {
        Self {
            depth: depth.max(0),
            coeffs: Terms::new(),
        }
    }

    pub fn highest_weight_vector() -> Self {
        Self::monomial(PBWMonomial::one())
    }

    pub fn monomial(m: PBWMonomial) -> Self {
        Self {
            depth: m.depth(),
            coeffs: Terms::from([(m, int(1))]),
        }
    }

    /// Panics if the monomials have different depths.
    pub fn from_terms(depth: i64, terms: impl IntoIterator<Item = (PBWMonomial, Rational)>) -> Self {
        let mut coeffs = Terms::new();
        for (m, c) in terms {
            assert_eq!(m.depth(), depth, "inhomogeneous vector");
            add_into(&mut coeffs, m, c);
        }
        Self { depth, coeffs }
    }

    pub fn depth(&self) -> i64 {
        self.depth
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, m: &PBWMonomial) -> Rational {
        self.coeffs.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PBWMonomial, &Rational)> {
        self.coeffs.iter()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_terms(self.depth, self.coeffs.iter().map(|(m, v)| (m.clone(), v * c)))
    }

    /// Panics on a depth mismatch between nonzero vectors.
    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        assert_eq!(self.depth, other.depth, "adding vectors of different depth");
        let mut coeffs = self.coeffs.clone();
        for (m, c) in &other.coeffs {
            add_into(&mut coeffs, m.clone(), c.clone());
        }
        Self {
            depth: self.depth,
            coeffs,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&int(-1)))
    }

    /// Coordinates in [`level_basis`] order.
    pub fn coordinates(&self) -> Vec<Rational> {
        level_basis(self.depth).iter().map(|m| self.coeff(m)).collect()
    }
}

impl fmt::Display for VermaVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.coeffs.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}*{m}", format_rational(c))?;
        }
        Ok(())
    }
}

/// Partitions of `n` with parts at most `max`, in descending lexicographic order.
fn partitions_bounded(n: i64, max: i64) -> Vec<Vec<i64>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=max.min(n)).rev() {
        for mut rest in partitions_bounded(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn partitions(n: i64) -> Vec<Vec<i64>> {
    partitions_bounded(n, n)
}

/// All monomials of depth `d` in canonical order.
pub fn level_basis(d: i64) -> Vec<PBWMonomial> {
    let mut out = Vec::new();
    for k in (0..=d).rev() {
        for x in partitions(k) {
            for i in partitions(d - k) {
                out.push(PBWMonomial::new(x.clone(), i));
            }
        }
    }
    out
}

pub fn weight_dims(dmax: i64) -> Vec<usize> {
    (0..=dmax).map(|d| level_basis(d).len()).collect()
}

/// A Verma module with a memo table for generator actions on monomials.
#[derive(Debug)]
pub struct VermaModule {
    hw: HighestWeight,
    cache: RefCell<HashMap<(Generator, PBWMonomial), Terms>>,
}

impl VermaModule {
    pub fn new(hw: HighestWeight) -> Self {
        Self {
            hw,
            cache: RefCell::default(),
        }
    }

    pub fn highest_weight(&self) -> &HighestWeight {
        &self.hw
    }

    fn act(&self, g: Generator, m: &PBWMonomial) -> Terms {
        if let Some(t) = self.cache.borrow().get(&(g, m.clone())) {
            return t.clone();
        }
        let t = self.act_uncached(g, m);
        self.cache.borrow_mut().insert((g, m.clone()), t.clone());
        t
    }

    fn act_uncached(&self, g: Generator, m: &PBWMonomial) -> Terms {
        let hw = &self.hw;
        let scalar = |c: Rational| {
            let mut t = Terms::new();
            add_into(&mut t, m.clone(), c);
            t
        };
        match g {
            Generator::CD => return scalar(hw.c_d.clone()),
            Generator::CDI => return scalar(hw.c_di.clone()),
            Generator::CI => return scalar(hw.c_i.clone()),
            Generator::X(0) => return scalar(&hw.lambda - int(m.depth())),
            Generator::I(0) => return scalar(hw.lambda_i.clone()),
            _ => {}
        }
        if let Some(p) = m.prepend(g) {
            return Terms::from([(p, int(1))]);
        }
        let Some((lead, rest)) = m.split_first() else {
            // positive generator on the highest weight vector
            return Terms::new();
        };
        // g·lead·rest = lead·(g·rest) + [g, lead]·rest
        let mut out = Terms::new();
        for (m2, c) in self.act(g, &rest) {
            for (m3, c3) in self.act(lead, &m2) {
                add_into(&mut out, m3, &c * c3);
            }
        }
        for (h, c) in bracket_generators(g, lead).iter() {
            for (m3, c3) in self.act(*h, &rest) {
                add_into(&mut out, m3, c * c3);
            }
        }
        out
    }

    pub fn apply(&self, g: Generator, v: &VermaVector) -> VermaVector {
        let depth = v.depth - g.degree();
        if depth < 0 {
            return VermaVector::zero(0);
        }
        let mut coeffs = Terms::new();
        for (m, c) in &v.coeffs {
            for (m2, c2) in self.act(g, m) {
                add_into(&mut coeffs, m2, c * c2);
            }
        }
        VermaVector { depth, coeffs }
    }

    /// Matrix of `g` from depth `d` to depth `d - deg g`, in level-basis order.
    pub fn level_matrix(&self, g: Generator, d: i64) -> Matrix {
        let source = level_basis(d);
        let target = level_basis(d - g.degree());
        let index: HashMap<&PBWMonomial, usize> = target.iter().enumerate().map(|(k, m)| (m, k)).collect();
        let mut out = Matrix::zeros(if d - g.degree() < 0 { 0 } else { target.len() }, source.len());
        for (col, m) in source.iter().enumerate() {
            for (m2, c) in self.act(g, m) {
                out.set(index[&m2], col, c);
            }
        }
        out
    }

    pub fn singular_space(&self, d: i64) -> Vec<VermaVector> {
        let gens = [Generator::X(1), Generator::X(2), Generator::I(1)];
        let blocks: Vec<Matrix> = gens.iter().map(|&g| self.level_matrix(g, d)).collect();
        let refs: Vec<&Matrix> = blocks.iter().filter(|b| b.rows() > 0).collect();
        let basis = level_basis(d);
        let kernel = if refs.is_empty() {
            (0..basis.len())
                .map(|k| (0..basis.len()).map(|j| int((j == k) as i64)).collect())
                .collect()
        } else {
            Matrix::vstack(basis.len(), &refs).nullspace()
        };
        kernel
            .into_iter()
            .map(|v| VermaVector::from_terms(d, basis.iter().cloned().zip(v)))
            .collect()
    }

    pub fn verify_singular(&self, v: &VermaVector) -> bool {
        (1..=3)
            .flat_map(|k| [Generator::X(k), Generator::I(k)])
            .all(|g| self.apply(g, v).is_zero())
    }

    /// The module on depths `0..=dmax` as a window: depth `d` sits at index
    /// `-d`, indices above 0 are empty, and blocks are stored for generators
    /// of degree at most `max_degree` whose target stays in the window.
    pub fn truncation_window(&self, dmax: i64, max_degree: i64) -> ModuleWindow {
        let dims: BTreeMap<i64, usize> = (-dmax..=dmax)
            .map(|k| (k, if k > 0 { 0 } else { level_basis(-k).len() }))
            .collect();
        let mut actions = HashMap::new();
        for deg in -max_degree..=max_degree {
            for g in [Generator::X(deg), Generator::I(deg)] {
                for k in -dmax..=dmax {
                    let t = k + deg;
                    if t.abs() > dmax {
                        continue;
                    }
                    let block = if k > 0 {
                        Matrix::zeros(dims[&t], 0)
                    } else if t > 0 {
                        Matrix::zeros(0, dims[&k])
                    } else {
                        self.level_matrix(g, -k)
                    };
                    actions.insert((g, k), block);
                }
            }
        }
        let hw = &self.hw;
        ModuleWindow::from_parts(
            hw.lambda.clone(),
            dmax,
            max_degree,
            dims,
            actions,
            [hw.c_d.clone(), hw.c_di.clone(), hw.c_i.clone()],
        )
    }
}

pub fn apply(g: Generator, v: &VermaVector, hw: &HighestWeight) -> VermaVector {
    VermaModule::new(hw.clone()).apply(g, v)
}

pub fn singular_space(hw: &HighestWeight, d: i64) -> Vec<VermaVector> {
    VermaModule::new(hw.clone()).singular_space(d)
}

pub fn verify_singular(v: &VermaVector, hw: &HighestWeight) -> bool {
    VermaModule::new(hw.clone()).verify_singular(v)
}

/// JSON report of a singular-vector search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularReport {
    pub hw: [String; 5],
    pub depth: i64,
    pub dim: usize,
    pub vectors: Vec<Vec<(String, String)>>,
}

impl SingularReport {
    pub fn new(hw: &HighestWeight, depth: i64, vectors: &[VermaVector]) -> Self {
        Self {
            hw: hw.to_strings(),
            depth,
            dim: vectors.len(),
            vectors: vectors
                .iter()
                .map(|v| v.terms().map(|(m, c)| (m.to_string(), format_rational(c))).collect())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hw(v: [i64; 5]) -> HighestWeight {
        let [a, b, c, d, e] = v.map(int);
        HighestWeight::new(a, b, c, d, e)
    }

    fn mono(x: &[i64], i: &[i64]) -> VermaVector {
        VermaVector::monomial(PBWMonomial::new(x.to_vec(), i.to_vec()))
    }

    #[test]
    fn level_two() {
        let names: Vec<String> = level_basis(2).iter().map(|m| m.to_string()).collect();
        assert_eq!(names, ["x[-2]", "x[-1]x[-1]", "x[-1]I[-1]", "I[-2]", "I[-1]I[-1]"]);
        assert_eq!(level_basis(0), vec![PBWMonomial::one()]);
        assert_eq!(PBWMonomial::one().to_string(), "1");
    }

    #[test]
    fn small_actions() {
        let h = HighestWeight::new(int(3), int(5), int(7), int(11), int(13));
        let m = VermaModule::new(h);
        let one = VermaVector::highest_weight_vector();
        assert_eq!(m.apply(Generator::X(1), &mono(&[1], &[])), one.scale(&int(-6)));
        assert_eq!(m.apply(Generator::I(1), &mono(&[], &[1])), one.scale(&int(13)));
        assert_eq!(m.apply(Generator::X(1), &mono(&[], &[1])), one.scale(&int(-5 + 22)));
        assert!(m.apply(Generator::X(2), &one).is_zero());
        // x_{-1} applied to I(-1) v reorders; I(-1) applied to x_{-1} v commutes past
        assert_eq!(m.apply(Generator::X(-1), &mono(&[], &[1])), mono(&[1], &[1]));
        assert_eq!(
            m.apply(Generator::I(-1), &mono(&[1], &[])),
            mono(&[1], &[1]).add(&mono(&[], &[2]))
        );
    }

    #[test]
    fn depth_one_singular() {
        assert_eq!(singular_space(&hw([0; 5]), 1).len(), 2);
        assert_eq!(singular_space(&hw([1, 1, 0, 0, 0]), 1).len(), 0);
        let s = singular_space(&hw([4, 0, 0, 0, 0]), 1);
        assert_eq!(s.len(), 1);
        assert!(s[0].coeff(&PBWMonomial::new(vec![], vec![1])) != Rational::zero());
        assert!(!verify_singular(&mono(&[1], &[]), &hw([1, 0, 0, 0, 0])));
        assert!(verify_singular(&VermaVector::zero(3), &hw([1, 0, 0, 0, 0])));
    }

    #[test]
    fn parse_and_report() {
        let h: HighestWeight = "1/2, 0, -1, 2, 3/4".parse().unwrap();
        let r = SingularReport::new(&h, 1, &singular_space(&h, 1));
        assert_eq!(r.hw[0], "1/2");
        assert_eq!(r.dim, r.vectors.len());
        assert!("1,2".parse::<HighestWeight>().is_err());
    }
}
