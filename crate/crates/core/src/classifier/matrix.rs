//! The constraint system for weight spaces of dimension `p = 2` whose
//! Virasoro structure is a fixed upper-triangular fixture: a decomposable
//! pair `V(α,β_1) ⊕ V(α,β_2)` or one of the two indecomposable extensions.
//!
//! `I(i)` acts on the weight space at `n` by an unknown 2×2 matrix
//! `F_{i,n}` (columns index the source basis `v, v'`). Entry `(2,1)` in the
//! 1-based notation is the component of `I(i) v` along `v'`; it is the
//! coupling that would make the `v` span fail to be a submodule.

use std::collections::{BTreeSet, HashMap};

use num_traits::Zero;

use super::ClassifierError;
use crate::algebra::Generator;
use crate::linalg::{Matrix, SparseEliminator, SparseRow};
use crate::modules::{build_window_with_degree, ModuleSpec, VirModuleKind};
use crate::poly::{Poly, Var};
use crate::rational::{int, is_integral, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fixture {
    DiagonalPair(Rational, Rational),
    ExtCaseA,
    ExtCaseB,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixRelationKind {
    Eigenvalue,
    Quadratic,
    Linear,
}

/// A matrix identity `entries = 0`, entries in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixRelation {
    pub kind: MatrixRelationKind,
    pub i: i64,
    pub j: i64,
    pub n: i64,
    pub entries: Vec<Poly>,
}

#[derive(Debug, Clone)]
pub struct MatrixSystem {
    pub p: usize,
    pub fixture: Fixture,
    pub alpha: Rational,
    pub window: i64,
    a: HashMap<(i64, i64), Matrix>,
    unknowns: BTreeSet<(i64, i64)>,
    relations: Vec<MatrixRelation>,
}

type PolyMatrix = [[Poly; 2]; 2];

fn unknown(i: i64, n: i64) -> PolyMatrix {
    let e = |r: u8, c: u8| Poly::var(Var::Entry(i, n, r, c));
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn constant(m: &Matrix) -> PolyMatrix {
    let e = |r: usize, c: usize| Poly::constant(m.get(r, c).clone());
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn scalar_matrix(p: &Poly) -> PolyMatrix {
    [[p.clone(), Poly::zero()], [Poly::zero(), p.clone()]]
}

fn mul(a: &PolyMatrix, b: &PolyMatrix) -> PolyMatrix {
    let e = |r: usize, c: usize| a[r][0].mul(&b[0][c]).add(&a[r][1].mul(&b[1][c]));
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn combine(a: &PolyMatrix, b: &PolyMatrix, f: impl Fn(&Poly, &Poly) -> Poly) -> PolyMatrix {
    let e = |r: usize, c: usize| f(&a[r][c], &b[r][c]);
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn flatten(m: PolyMatrix) -> Vec<Poly> {
    m.into_iter().flatten().collect()
}

impl MatrixSystem {
    pub fn unknowns(&self) -> &BTreeSet<(i64, i64)> {
        &self.unknowns
    }

    pub fn relations(&self) -> &[MatrixRelation] {
        &self.relations
    }

    /// The fixture's `x_i` block on the weight space at `n`.
    pub fn a_block(&self, i: i64, n: i64) -> Option<&Matrix> {
        self.a.get(&(i, n))
    }

    /// Checks `[x_i, x_j] = (j−i) x_{i+j}` on the stored fixture blocks.
    pub fn fixture_consistent(&self) -> bool {
        let nn = self.window;
        for i in -nn..=nn {
            for j in -nn..=nn {
                if (i + j).abs() > nn {
                    continue;
                }
                for n in -nn..=nn {
                    let (Some(a1), Some(a2), Some(b1), Some(b2), Some(c)) = (
                        self.a_block(i, n + j),
                        self.a_block(j, n),
                        self.a_block(j, n + i),
                        self.a_block(i, n),
                        self.a_block(i + j, n),
                    ) else {
                        continue;
                    };
                    if a1.mul(a2).sub(&b1.mul(b2)) != c.scale(&int(j - i)) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn fixture_blocks(fixture: &Fixture, alpha: &Rational, window: i64) -> HashMap<(i64, i64), Matrix> {
    let reach = 2 * window;
    match fixture {
        Fixture::DiagonalPair(b1, b2) => {
            let mut out = HashMap::new();
            for i in -window..=window {
                for n in -reach..=reach {
                    let base = alpha + int(n);
                    let mut m = Matrix::zeros(2, 2);
                    m.set(0, 0, &base + b1 * int(i));
                    m.set(1, 1, &base + b2 * int(i));
                    out.insert((i, n), m);
                }
            }
            out
        }
        Fixture::ExtCaseA | Fixture::ExtCaseB => {
            let kind = match fixture {
                Fixture::ExtCaseA => VirModuleKind::ExtCaseA(alpha.clone()),
                _ => VirModuleKind::ExtCaseB(alpha.clone()),
            };
            let w = build_window_with_degree(&ModuleSpec::Vir(kind), reach, window).expect("non-integral alpha");
            w.actions()
                .filter_map(|(&(g, n), b)| match g {
                    Generator::X(i) => Some(((i, n), b.clone())),
                    _ => None,
                })
                .collect()
        }
    }
}

/// Instantiates the eigenvalue, commutator and mixed relations for 2×2
/// blocks on `|i|, |n| <= N`.
pub fn build_matrix_system(
    p: usize,
    fixture: Fixture,
    alpha: &Rational,
    window: i64,
) -> Result<MatrixSystem, ClassifierError> {
    if p != 2 {
        return Err(ClassifierError::UnsupportedP(p));
    }
    if window < super::scalar::MIN_SYSTEM_WINDOW {
        return Err(ClassifierError::WindowTooSmall {
            needed: super::scalar::MIN_SYSTEM_WINDOW,
            got: window,
        });
    }
    if matches!(fixture, Fixture::ExtCaseA | Fixture::ExtCaseB) && is_integral(alpha) {
        return Err(ClassifierError::IntegralAlpha(alpha.clone()));
    }
    let a = fixture_blocks(&fixture, alpha, window);
    let nn = window;
    let unknowns: BTreeSet<(i64, i64)> = (-nn..=nn).flat_map(|i| (-nn..=nn).map(move |n| (i, n))).collect();
    let ok = |i: i64, n: i64| unknowns.contains(&(i, n));
    let f = Poly::var(Var::Scalar);
    let c_di = scalar_matrix(&Poly::var(Var::CDI));
    let c_i = scalar_matrix(&Poly::var(Var::CI));

    let mut relations = Vec::new();
    for n in -nn..=nn {
        relations.push(MatrixRelation {
            kind: MatrixRelationKind::Eigenvalue,
            i: 0,
            j: 0,
            n,
            entries: flatten(combine(&unknown(0, n), &scalar_matrix(&f), |x, y| x.sub(y))),
        });
    }
    for i in -nn..=nn {
        for j in -nn..=nn {
            let delta = i == -j;
            for n in -nn..=nn {
                // F_{i,j+n} F_{j,n} − F_{j,i+n} F_{i,n} = i δ c_I
                if ok(i, j + n) && ok(j, n) && ok(j, i + n) && ok(i, n) && i != j {
                    let mut m = combine(
                        &mul(&unknown(i, j + n), &unknown(j, n)),
                        &mul(&unknown(j, i + n), &unknown(i, n)),
                        |x, y| x.sub(y),
                    );
                    if delta {
                        m = combine(&m, &c_i, |x, y| x.sub(&y.scale(&int(i))));
                    }
                    relations.push(MatrixRelation {
                        kind: MatrixRelationKind::Quadratic,
                        i,
                        j,
                        n,
                        entries: flatten(m),
                    });
                }
                // A_{i,j+n} F_{j,n} − F_{j,i+n} A_{i,n} = j F_{i+j,n} + δ (i²+i) c_DI
                if ok(j, n) && ok(j, i + n) && ok(i + j, n) {
                    let (Some(a1), Some(a2)) = (a.get(&(i, j + n)), a.get(&(i, n))) else {
                        continue;
                    };
                    let mut m = combine(
                        &mul(&constant(a1), &unknown(j, n)),
                        &mul(&unknown(j, i + n), &constant(a2)),
                        |x, y| x.sub(y),
                    );
                    m = combine(&m, &unknown(i + j, n), |x, y| x.sub(&y.scale(&int(j))));
                    if delta {
                        m = combine(&m, &c_di, |x, y| x.sub(&y.scale(&int(i * i + i))));
                    }
                    relations.push(MatrixRelation {
                        kind: MatrixRelationKind::Linear,
                        i,
                        j,
                        n,
                        entries: flatten(m),
                    });
                }
            }
        }
    }
    Ok(MatrixSystem {
        p,
        fixture,
        alpha: alpha.clone(),
        window,
        a,
        unknowns,
        relations,
    })
}

/// True iff the linear relations force every lower-left entry
/// `F_{i,n}(2,1)` with `|i|, |n| <= N/2` to vanish.
///
/// Entries near the edge of the window take part in too few relations to
/// be pinned down, so only the central half is inspected.
pub fn verify_coupling_obstruction(m: &MatrixSystem) -> bool {
    let linear: Vec<&Poly> = m
        .relations()
        .iter()
        .filter(|r| r.kind != MatrixRelationKind::Quadratic)
        .flat_map(|r| &r.entries)
        .collect();
    // central unknowns become pivots first; this keeps fill-in low
    let mut vars: Vec<Var> = linear
        .iter()
        .flat_map(|p| p.vars())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let key = |v: &Var| match *v {
        Var::Entry(i, n, r, c) => (0, i.abs() + n.abs(), i, n, r, c),
        _ => (1, 0, 0, 0, 0, 0),
    };
    vars.sort_by_key(key);
    let cols: HashMap<Var, usize> = vars.into_iter().enumerate().map(|(k, v)| (v, k)).collect();
    let mut elim = SparseEliminator::new();
    for e in linear {
        let mut row = SparseRow::new();
        for (mono, c) in e.terms() {
            let [v] = mono.as_slice() else {
                unreachable!("linear relation with a nonlinear term");
            };
            *row.entry(cols[v]).or_insert_with(Rational::zero) += c;
        }
        elim.add_row(row);
    }
    let core = m.window / 2;
    (-core..=core).all(|i| {
        (-core..=core).all(|n| {
            cols.get(&Var::Entry(i, n, 1, 0))
                .is_some_and(|&c| elim.is_forced_zero(c))
        })
    })
}

/// `F_{j,n} = (α+1) j / (α+n+j) · M`, with `F = c_DI = c_I = 0`.
pub fn constant_matrix_family(alpha: &Rational, mat: &Matrix, j: i64, n: i64) -> Matrix {
    let s = (alpha + int(1)) * int(j) / (alpha + int(n + j));
    mat.scale(&s)
}

/// Evaluates every relation at the given assignment of unknowns.
pub fn satisfies_all(
    m: &MatrixSystem,
    value: impl Fn(i64, i64) -> Matrix,
    f: &Rational,
    c_di: &Rational,
    c_i: &Rational,
) -> bool {
    let table: HashMap<(i64, i64), Matrix> = m.unknowns().iter().map(|&(i, n)| ((i, n), value(i, n))).collect();
    let lookup = |v: &Var| match *v {
        Var::Entry(i, n, r, c) => table.get(&(i, n)).map(|b| b.get(r as usize, c as usize).clone()),
        Var::Scalar => Some(f.clone()),
        Var::CDI => Some(c_di.clone()),
        Var::CI => Some(c_i.clone()),
        Var::Coef(..) => None,
    };
    m.relations()
        .iter()
        .all(|r| r.entries.iter().all(|e| e.eval(&lookup) == Some(Rational::zero())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn fixtures() {
        let b = build_matrix_system(2, Fixture::ExtCaseB, &rat(1, 2), 6).unwrap();
        let a2 = b.a_block(2, 0).unwrap();
        assert_eq!(a2.get(0, 1), &rat(4, 15));
        let a = build_matrix_system(2, Fixture::ExtCaseA, &rat(1, 2), 6).unwrap();
        assert_eq!(a.a_block(3, 1).unwrap().get(0, 1), &int(-3));
        let d = build_matrix_system(2, Fixture::DiagonalPair(int(0), int(0)), &rat(1, 2), 6).unwrap();
        assert!(d.a_block(2, 1).unwrap().get(0, 1).is_zero());
        for s in [&a, &b, &d] {
            assert!(s.fixture_consistent());
        }
        assert!(matches!(
            build_matrix_system(3, Fixture::ExtCaseA, &rat(1, 2), 6),
            Err(ClassifierError::UnsupportedP(3))
        ));
    }

    #[test]
    fn obstruction() {
        let a = build_matrix_system(2, Fixture::ExtCaseA, &rat(1, 3), 6).unwrap();
        assert!(verify_coupling_obstruction(&a));
        let b = build_matrix_system(2, Fixture::ExtCaseB, &rat(1, 2), 6).unwrap();
        assert!(verify_coupling_obstruction(&b));
        let d = build_matrix_system(2, Fixture::DiagonalPair(int(0), int(0)), &rat(1, 2), 6).unwrap();
        assert!(!verify_coupling_obstruction(&d));
        let nil = Matrix::from_rows(vec![vec![int(0), int(0)], vec![int(1), int(0)]]);
        let zero = Rational::zero();
        assert!(satisfies_all(
            &d,
            |j, n| constant_matrix_family(&d.alpha, &nil, j, n),
            &zero,
            &zero,
            &zero
        ));
    }
}
