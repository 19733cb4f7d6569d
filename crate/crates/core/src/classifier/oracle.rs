//! Brute-force diagnostics on materialized windows.

use std::collections::{BTreeMap, VecDeque};

use num_traits::{One, Zero};

use crate::algebra::Generator;
use crate::linalg::Matrix;
use crate::modules::ModuleWindow;
use crate::rational::Rational;

/// Generator degree bound used by the generation sweep.
pub const ORACLE_MARGIN: i64 = 2;

/// Row-reduced spanning set of a subspace of one weight space.
#[derive(Debug, Clone, Default)]
struct Span {
    // rows in reduced form, each with a distinct leading column
    rows: Vec<(usize, Vec<Rational>)>,
}

impl Span {
    fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        let mut v = v.to_vec();
        for (lead, row) in &self.rows {
            if v[*lead].is_zero() {
                continue;
            }
            let f = v[*lead].clone();
            for (x, r) in v.iter_mut().zip(row) {
                *x -= &f * r;
            }
        }
        v
    }

    /// Adds `v` if it is new; returns the reduced vector in that case.
    fn insert(&mut self, v: &[Rational]) -> Option<Vec<Rational>> {
        let mut r = self.reduce(v);
        let lead = r.iter().position(|x| !x.is_zero())?;
        let inv = r[lead].recip();
        for x in r.iter_mut() {
            *x *= &inv;
        }
        for (_, row) in self.rows.iter_mut() {
            if row[lead].is_zero() {
                continue;
            }
            let f = row[lead].clone();
            for (x, y) in row.iter_mut().zip(&r) {
                *x -= &f * y;
            }
        }
        self.rows.push((lead, r.clone()));
        Some(r)
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }
}

/// Submodule generated by `v` at index `k`, truncated to the window and
/// built with generators of degree at most `margin`; dimensions per index.
fn generated_dims(w: &ModuleWindow, k: i64, v: Vec<Rational>, margin: i64) -> BTreeMap<i64, usize> {
    let n = w.half_width();
    let gens: Vec<Generator> = w
        .generators()
        .into_iter()
        .filter(|g| g.degree().abs() <= margin)
        .collect();
    let mut spans: BTreeMap<i64, Span> = BTreeMap::new();
    let mut queue = VecDeque::new();
    if let Some(r) = spans.entry(k).or_default().insert(&v) {
        queue.push_back((k, r));
    }
    while let Some((idx, vec)) = queue.pop_front() {
        for &g in &gens {
            let t = idx + g.degree();
            if t.abs() > n {
                continue;
            }
            let Some(out) = w.apply(g, idx, &vec) else {
                continue;
            };
            if out.iter().all(Zero::is_zero) {
                continue;
            }
            if let Some(r) = spans.entry(t).or_default().insert(&out) {
                queue.push_back((t, r));
            }
        }
    }
    spans.into_iter().map(|(k, s)| (k, s.dim())).collect()
}

/// True iff every basis vector on the inner window `[-N+2M, N-2M]`
/// generates all inner weight spaces, using generators of degree at most
/// `M = 2`. Exact for windows whose weight spaces are one-dimensional.
pub fn irreducibility_oracle(w: &ModuleWindow) -> bool {
    let m = ORACLE_MARGIN;
    let inner = w.half_width() - 2 * m;
    assert!(inner >= 0, "window too small for the oracle");
    for k in -inner..=inner {
        let d = w.dim(k);
        for e in 0..d {
            let mut v = vec![Rational::zero(); d];
            v[e] = Rational::one();
            let dims = generated_dims(w, k, v, m);
            if (-inner..=inner).any(|t| dims.get(&t).copied().unwrap_or(0) < w.dim(t)) {
                return false;
            }
        }
    }
    true
}

/// Per index, the dimension of `{v : I(i) v = 0 for all j <= i <= max_degree}`.
pub fn i_torsion(w: &ModuleWindow, j: i64) -> BTreeMap<i64, usize> {
    assert!(j >= 0, "torsion level must be nonnegative");
    w.indices()
        .map(|k| {
            let d = w.dim(k);
            let blocks: Vec<&Matrix> = (j..=w.max_degree())
                .filter_map(|i| w.action(Generator::I(i), k))
                .filter(|b| b.rows() > 0)
                .collect();
            if d == 0 || blocks.is_empty() {
                return (k, d);
            }
            let stacked = Matrix::vstack(d, &blocks);
            (k, d - stacked.rank())
        })
        .collect()
}

/// Window-level reading of the highest/lowest weight dichotomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportShape {
    UniformlyBounded(usize),
    /// Weights bounded above: dimensions vanish at the top and grow downward.
    UpperBounded,
    LowerBounded,
    UnboundedBothSides,
}

const GROWTH_RUN: usize = 3;

/// Strictly decreasing over the first `GROWTH_RUN + 1` entries.
fn grows_toward_edge(seq: &[usize]) -> bool {
    seq.len() > GROWTH_RUN && seq[..=GROWTH_RUN].windows(2).all(|p| p[0] > p[1])
}

/// Diagnostic only: a finite window cannot decide boundedness.
pub fn support_shape(dims: &BTreeMap<i64, usize>) -> SupportShape {
    let seq: Vec<usize> = dims.values().copied().collect();
    let rev: Vec<usize> = seq.iter().rev().copied().collect();
    let low_growth = grows_toward_edge(&seq);
    let high_growth = grows_toward_edge(&rev);
    let low_zero = seq.first() == Some(&0);
    let high_zero = seq.last() == Some(&0);
    match (low_growth, high_growth) {
        (false, false) => SupportShape::UniformlyBounded(seq.iter().copied().max().unwrap_or(0)),
        (true, false) if high_zero => SupportShape::UpperBounded,
        (false, true) if low_zero => SupportShape::LowerBounded,
        _ => SupportShape::UnboundedBothSides,
    }
}
