//! The constraint system for one-dimensional weight spaces.
//!
//! With `x_i v_n = (α+n+βi) v_{n+i}` fixed, the unknowns are the scalars
//! `F_{i,n}` in `I(i) v_n = F_{i,n} v_{n+i}` together with `c_DI`, `c_I`.
//! The module axioms for `[I(i),I(j)]` and `[x_i,I(j)]` give quadratic and
//! linear relations among them. The solver reduces everything to the
//! `F_{1,·}` chain by linear elimination, branches on the rational roots of
//! the remaining univariate quadratics, and classifies each surviving leaf.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};

use super::oracle::irreducibility_oracle;
use super::ClassifierError;
use crate::linalg::{SparseEliminator, SparseRow};
use crate::modules::{build_window_with_degree, IntermediateParams, ModuleSpec, ModuleWindow};
use crate::poly::{Poly, UPoly, Var};
use crate::rational::{int, is_integral, Fraction, Rational};

/// Smallest window accepted by [`build_scalar_system`].
pub const MIN_SYSTEM_WINDOW: i64 = 4;
/// Smallest window accepted by [`solve_scalar`].
pub const MIN_SOLVE_WINDOW: i64 = 6;
/// Smallest window for the punctured solve: `F = 0` comes from the
/// `i = -2, j = 2` relation at `n = 5`, which needs index 7.
pub const MIN_PUNCTURED_WINDOW: i64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationKind {
    /// `F_{0,n} = F`
    Eigenvalue,
    /// from `[I(i), I(j)]`
    Quadratic,
    /// from `[x_i, I(j)]`
    Linear,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub kind: RelationKind,
    pub i: i64,
    pub j: i64,
    pub n: i64,
    /// The relation reads `poly = 0`.
    pub poly: Poly,
}

#[derive(Debug, Clone)]
pub struct ScalarSystem {
    pub alpha: Rational,
    pub beta: Rational,
    pub window: i64,
    pub punctured: bool,
    unknowns: BTreeSet<(i64, i64)>,
    relations: Vec<Relation>,
}

fn coef(i: i64, n: i64) -> Poly {
    Poly::var(Var::Coef(i, n))
}

impl ScalarSystem {
    pub fn unknowns(&self) -> &BTreeSet<(i64, i64)> {
        &self.unknowns
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn has_unknown(&self, i: i64, n: i64) -> bool {
        self.unknowns.contains(&(i, n))
    }

    fn find(&self, kind: RelationKind, i: i64, j: i64, n: i64) -> Option<&Relation> {
        self.relations
            .iter()
            .find(|r| r.kind == kind && r.i == i && r.j == j && r.n == n)
    }
}

/// Instantiates every relation whose unknowns lie in `|i|, |n| <= N`.
///
/// In punctured mode the weight `0` may be missing: `α` is normalized to 0,
/// unknowns touching index 0 are dropped, only relations with
/// `n(n+i)(n+j)(n+i+j) != 0` are kept, and the eigenvalue identities
/// `c_DI = F`, `c_I = 0` are imposed.
pub fn build_scalar_system(
    alpha: &Rational,
    beta: &Rational,
    window: i64,
    punctured: bool,
) -> Result<ScalarSystem, ClassifierError> {
    if window < MIN_SYSTEM_WINDOW {
        return Err(ClassifierError::WindowTooSmall {
            needed: MIN_SYSTEM_WINDOW,
            got: window,
        });
    }
    let alpha = if punctured {
        if !is_integral(alpha) {
            return Err(ClassifierError::PuncturedAlpha(alpha.clone()));
        }
        if !(beta.is_zero() || beta.is_one()) {
            return Err(ClassifierError::PuncturedBeta(beta.clone()));
        }
        Rational::zero()
    } else {
        alpha.clone()
    };
    let nn = window;
    let unknowns: BTreeSet<(i64, i64)> = (-nn..=nn)
        .flat_map(|i| (-nn..=nn).map(move |n| (i, n)))
        .filter(|&(i, n)| !punctured || (n != 0 && n + i != 0))
        .collect();
    let ok = |i: i64, n: i64| unknowns.contains(&(i, n));
    let (c_di, c_i) = if punctured {
        (Poly::var(Var::Scalar), Poly::zero())
    } else {
        (Poly::var(Var::CDI), Poly::var(Var::CI))
    };

    let mut relations = Vec::new();
    for n in -nn..=nn {
        if ok(0, n) {
            relations.push(Relation {
                kind: RelationKind::Eigenvalue,
                i: 0,
                j: 0,
                n,
                poly: coef(0, n).sub(&Poly::var(Var::Scalar)),
            });
        }
    }
    for i in -nn..=nn {
        for j in -nn..=nn {
            let delta = i == -j;
            for n in -nn..=nn {
                // F_{j,n+i} F_{i,n} - F_{i,n+j} F_{j,n} = j δ c_I
                if ok(j, n + i) && ok(i, n) && ok(i, n + j) && ok(j, n) {
                    let mut p = coef(j, n + i).mul(&coef(i, n)).sub(&coef(i, n + j).mul(&coef(j, n)));
                    if delta {
                        p = p.sub(&c_i.scale(&int(j)));
                    }
                    if !p.is_zero() {
                        relations.push(Relation {
                            kind: RelationKind::Quadratic,
                            i,
                            j,
                            n,
                            poly: p,
                        });
                    }
                }
                // (α+n+j+iβ) F_{j,n} - (α+n+iβ) F_{j,n+i} = j F_{i+j,n} + δ (i²+i) c_DI
                if ok(j, n) && ok(j, n + i) && ok(i + j, n) {
                    let a = &alpha + int(n) + beta * int(i);
                    let mut p = coef(j, n)
                        .scale(&(&a + int(j)))
                        .sub(&coef(j, n + i).scale(&a))
                        .sub(&coef(i + j, n).scale(&int(j)));
                    if delta {
                        p = p.sub(&c_di.scale(&int(i * i + i)));
                    }
                    if !p.is_zero() {
                        relations.push(Relation {
                            kind: RelationKind::Linear,
                            i,
                            j,
                            n,
                            poly: p,
                        });
                    }
                }
            }
        }
    }
    Ok(ScalarSystem {
        alpha,
        beta: beta.clone(),
        window,
        punctured,
        unknowns,
        relations,
    })
}

/// Result of eliminating with the `j = 1` relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct J1Elimination {
    /// `F_{i,n}` as a linear expression in the `F_{1,·}` and `F`.
    pub expressions: BTreeMap<(i64, i64), Poly>,
    /// Keyed by `m`: `(α−β+m+2) F_{1,m+1} − (α−β+m+1) F_{1,m} − F`, read as `= 0`.
    pub recurrences: BTreeMap<i64, Poly>,
}

/// Solves each stored `j = 1` linear relation for its `F_{i+1,n}` term.
pub fn eliminate_j1(s: &ScalarSystem) -> J1Elimination {
    let mut expressions = BTreeMap::new();
    let mut recurrences = BTreeMap::new();
    for &(i, n) in s.unknowns() {
        if i == 1 {
            expressions.insert((1, n), coef(1, n));
            continue;
        }
        // the [x_{i-1}, I(1)] relation at n carries -F_{i,n}
        let Some(rel) = s.find(RelationKind::Linear, i - 1, 1, n) else {
            continue;
        };
        let target = Var::Coef(i, n);
        let c = rel.poly.coeff(&[target]);
        debug_assert_eq!(c, int(-1));
        let expr = rel.poly.add(&Poly::var(target));
        if i == 0 {
            // F_{0,n} = F turns the expression into the chain recurrence
            recurrences.insert(n - 1, expr.sub(&Poly::var(Var::Scalar)));
        } else {
            expressions.insert((i, n), expr);
        }
    }
    J1Elimination {
        expressions,
        recurrences,
    }
}

/// `(F_{1,n} − F)((α−β+n+1) F_{1,n} − (α+n+β) F)`.
pub fn quadratic_obstruction(alpha: &Rational, beta: &Rational, n: i64) -> Poly {
    let f1 = coef(1, n);
    let f = Poly::var(Var::Scalar);
    let left = f1.sub(&f);
    let right = f1
        .scale(&(alpha - beta + int(n + 1)))
        .sub(&f.scale(&(alpha + int(n) + beta)));
    left.mul(&right)
}

/// The `[I(1), I(2)]` relation at `n` with `F_{2,·}` eliminated through the
/// `j = 1` relations and `F_{1,n+1}`, `F_{1,n+2}` through the chain
/// recurrence, cleared of denominators and halved. `None` if the relation
/// does not fit the window or a recurrence coefficient vanishes.
pub fn eliminated_quadratic(s: &ScalarSystem, n: i64) -> Option<Poly> {
    let rel = s.find(RelationKind::Quadratic, 1, 2, n)?;
    let elim = eliminate_j1(s);
    let shift = &s.alpha - &s.beta;
    let d1 = &shift + int(n + 2);
    let d2 = &shift + int(n + 3);
    if d1.is_zero() || d2.is_zero() {
        return None;
    }
    let f2 = |m: i64| elim.expressions.get(&(2, m)).cloned();
    let (e0, e1) = (f2(n)?, f2(n + 1)?);
    let step1 = elim.recurrences.get(&n)?;
    let step2 = elim.recurrences.get(&(n + 1))?;
    let p = rel.poly.substitute(&|v| match *v {
        Var::Coef(2, m) if m == n => Some(e0.clone()),
        Var::Coef(2, m) if m == n + 1 => Some(e1.clone()),
        _ => None,
    });
    // solve the recurrences for the two forward chain values
    let solve_for = |rec: &Poly, v: Var| {
        let c = rec.coeff(&[v]);
        rec.sub(&Poly::var(v).scale(&c)).scale(&(-c.recip()))
    };
    let f_next = solve_for(step1, Var::Coef(1, n + 1));
    let f_next2 =
        solve_for(step2, Var::Coef(1, n + 2)).substitute(&|v| (*v == Var::Coef(1, n + 1)).then(|| f_next.clone()));
    let p = p.substitute(&|v| match *v {
        Var::Coef(1, m) if m == n + 1 => Some(f_next.clone()),
        Var::Coef(1, m) if m == n + 2 => Some(f_next2.clone()),
        _ => None,
    });
    Some(p.scale(&(&d1 * &d2 / int(2))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyKind {
    Constant,
    RescaledBeta0,
    RescaledBeta1,
    AllZero,
}

impl FamilyKind {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::Constant => "Constant",
            FamilyKind::RescaledBeta0 => "RescaledBeta0",
            FamilyKind::RescaledBeta1 => "RescaledBeta1",
            FamilyKind::AllZero => "AllZero",
        }
    }
}

/// A one-parameter family of solutions `F_{j,n} = closed_form(j, n) · F`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionFamily {
    pub kind: FamilyKind,
    pub alpha: Rational,
    pub beta: Rational,
    pub c_i: Rational,
    pub c_di: Rational,
    /// Whether the `F = 0` member is a reducible module.
    pub reducible_at_zero: bool,
}

impl SolutionFamily {
    fn new(kind: FamilyKind, alpha: &Rational, beta: &Rational) -> Self {
        Self {
            kind,
            alpha: alpha.clone(),
            beta: beta.clone(),
            c_i: Rational::zero(),
            c_di: Rational::zero(),
            reducible_at_zero: false,
        }
    }

    /// Coefficient of `F` in `F_{j,n}`; `None` at a pole of the closed form.
    pub fn closed_form(&self, j: i64, n: i64) -> Option<Rational> {
        let a = &self.alpha + int(n);
        match self.kind {
            FamilyKind::Constant => Some(Rational::one()),
            FamilyKind::AllZero => Some(Rational::zero()),
            FamilyKind::RescaledBeta0 => {
                let d = &a + int(j);
                (!d.is_zero()).then(|| a / d)
            }
            FamilyKind::RescaledBeta1 => (!a.is_zero()).then(|| (&a + int(j)) / a),
        }
    }
}

/// Substitutes the family (at `F = f`) into every relation of `s`.
pub fn check_family(s: &ScalarSystem, fam: &SolutionFamily, f: &Rational) -> bool {
    let mut values = HashMap::new();
    for &(i, n) in s.unknowns() {
        match fam.closed_form(i, n) {
            Some(c) => values.insert(Var::Coef(i, n), c * f),
            None => return false,
        };
    }
    values.insert(Var::Scalar, f.clone());
    values.insert(Var::CI, &fam.c_i * f * f);
    values.insert(Var::CDI, &fam.c_di * f);
    s.relations()
        .iter()
        .all(|r| r.poly.eval(&|v| values.get(v).cloned()) == Some(Rational::zero()))
}

/// A branch of the case analysis that satisfies the window relations but
/// yields a reducible module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DischargedBranch {
    pub f: Rational,
    /// Free parameters left after branching (set to 1 when materialized).
    pub free: Vec<Var>,
    /// Values of `F_{1,n}` on the window at the materialized point.
    pub chain: BTreeMap<i64, Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarSolution {
    pub families: Vec<SolutionFamily>,
    pub discharged: Vec<DischargedBranch>,
}

/// All families on the window, discharging reducible branches.
pub fn solve_scalar(alpha: &Rational, beta: &Rational, window: i64) -> Result<Vec<SolutionFamily>, ClassifierError> {
    solve_scalar_detailed(alpha, beta, window).map(|s| s.families)
}

pub fn solve_scalar_detailed(
    alpha: &Rational,
    beta: &Rational,
    window: i64,
) -> Result<ScalarSolution, ClassifierError> {
    if window < MIN_SOLVE_WINDOW {
        return Err(ClassifierError::WindowTooSmall {
            needed: MIN_SOLVE_WINDOW,
            got: window,
        });
    }
    let s = build_scalar_system(alpha, beta, window, false)?;
    solve_system(&s)
}

/// The punctured system (support possibly missing the weight 0).
pub fn solve_punctured(beta: &Rational, window: i64) -> Result<ScalarSolution, ClassifierError> {
    if window < MIN_PUNCTURED_WINDOW {
        return Err(ClassifierError::WindowTooSmall {
            needed: MIN_PUNCTURED_WINDOW,
            got: window,
        });
    }
    let s = build_scalar_system(&Rational::zero(), beta, window, true)?;
    solve_system(&s)
}

/// Unknowns whose values a leaf must determine.
fn in_core(s: &ScalarSystem, i: i64, n: i64) -> bool {
    let c = s.window / 2;
    i.abs() <= c && n.abs() <= c
}

/// Linear part at fixed `F`: every variable as an affine expression in the
/// free columns, or `None` if inconsistent.
fn linear_solve(s: &ScalarSystem, f: &Rational) -> Option<HashMap<Var, Poly>> {
    let mut order: Vec<Var> = vec![Var::CDI, Var::CI];
    let mut others: Vec<(i64, i64)> = s.unknowns().iter().copied().filter(|&(i, _)| i != 1).collect();
    others.sort_by_key(|&(i, n)| (i.abs().max(n.abs()), i, n));
    order.extend(others.into_iter().map(|(i, n)| Var::Coef(i, n)));
    let mut chain: Vec<i64> = s.unknowns().iter().filter(|&&(i, _)| i == 1).map(|&(_, n)| n).collect();
    chain.sort_by_key(|n| (std::cmp::Reverse(n.abs()), *n));
    order.extend(chain.into_iter().map(|n| Var::Coef(1, n)));
    let one = order.len();
    let col: HashMap<Var, usize> = order.iter().enumerate().map(|(k, v)| (*v, k)).collect();

    let mut elim = SparseEliminator::new();
    for r in s.relations().iter().filter(|r| r.kind != RelationKind::Quadratic) {
        let mut row = SparseRow::new();
        for (m, c) in r.poly.terms() {
            let (key, val) = match m.as_slice() {
                [] => (one, c.clone()),
                [Var::Scalar] => (one, c * f),
                [v] => (col[v], c.clone()),
                _ => unreachable!("nonlinear term in a linear relation"),
            };
            *row.entry(key).or_insert_with(Rational::zero) += val;
        }
        elim.add_row(row);
        if elim.is_pivot(one) {
            return None;
        }
    }
    let mut values = HashMap::new();
    for (k, v) in order.iter().enumerate() {
        let expr = elim.express(k);
        let mut p = Poly::zero();
        for (c, x) in expr {
            p = p.add(&if c == one {
                Poly::constant(x)
            } else {
                Poly::var(order[c]).scale(&x)
            });
        }
        values.insert(*v, p);
    }
    values.insert(Var::Scalar, Poly::constant(f.clone()));
    Some(values)
}

struct Leaf {
    assign: BTreeMap<Var, Rational>,
    /// Variables solved for linearly, in elimination order.
    derived: Vec<(Var, Poly)>,
}

impl Leaf {
    fn resolve(&self, p: &Poly, assign: &BTreeMap<Var, Rational>) -> Poly {
        let mut q = p.clone();
        for (v, e) in &self.derived {
            q = q.substitute(&|w| (*w == *v).then(|| e.clone()));
        }
        q.substitute(&constants(assign))
    }
}

fn constants(assign: &BTreeMap<Var, Rational>) -> impl Fn(&Var) -> Option<Poly> + '_ {
    |v| assign.get(v).map(|c| Poly::constant(c.clone()))
}

fn to_upoly(p: &Poly) -> UPoly {
    let mut coeffs = vec![Rational::zero(); p.degree() + 1];
    for (m, c) in p.terms() {
        coeffs[m.len()] += c;
    }
    UPoly::new(coeffs)
}

/// Branches on rational roots until every quadratic relation vanishes.
fn branch(
    polys: &[Poly],
    assign: BTreeMap<Var, Rational>,
    derived: Vec<(Var, Poly)>,
    leaves: &mut Vec<Leaf>,
) -> Result<(), ClassifierError> {
    let mut derived = derived;
    let mut polys: Vec<Poly> = polys
        .iter()
        .map(|p| p.substitute(&constants(&assign)))
        .filter(|p| !p.is_zero())
        .collect();
    // a variable occurring only as a bare linear term is solved for directly
    loop {
        if polys.iter().any(|p| p.degree() == 0) {
            return Ok(());
        }
        let pick = polys.iter().enumerate().find_map(|(k, p)| {
            p.vars().into_iter().find_map(|v| {
                let only_linear = p.terms().all(|(m, _)| !m.contains(&v) || m.len() == 1);
                let c = p.coeff(&[v]);
                (only_linear && !c.is_zero() && p.vars().len() > 1).then_some((k, v, c))
            })
        });
        let Some((k, v, c)) = pick else { break };
        let p = polys.swap_remove(k);
        let expr = p.sub(&Poly::var(v).scale(&c)).scale(&(-c.recip()));
        derived.push((v, expr.clone()));
        polys = polys
            .iter()
            .map(|q| q.substitute(&|w| (*w == v).then(|| expr.clone())))
            .filter(|q| !q.is_zero())
            .collect();
    }
    if polys.is_empty() {
        leaves.push(Leaf { assign, derived });
        return Ok(());
    }
    let mut univariate: BTreeMap<Var, UPoly> = BTreeMap::new();
    for p in &polys {
        let vars = p.vars();
        if vars.len() == 1 {
            let v = *vars.iter().next().expect("one variable");
            let u = to_upoly(p);
            let g = match univariate.get(&v) {
                Some(prev) => prev.gcd(&u),
                None => u,
            };
            univariate.insert(v, g);
        }
    }
    let Some((v, g)) = univariate.into_iter().next() else {
        return Err(ClassifierError::Unresolved(format!(
            "no univariate constraint among {} remaining relations",
            polys.len()
        )));
    };
    if g.degree() == Some(0) {
        return Ok(());
    }
    let roots = g
        .rational_roots()
        .map_err(|_| ClassifierError::IrrationalBranch(format!("{v} with constraint of degree {:?}", g.degree())))?;
    for r in roots {
        let mut a = assign.clone();
        a.insert(v, r);
        branch(&polys, a, derived.clone(), leaves)?;
    }
    Ok(())
}

fn solve_system(s: &ScalarSystem) -> Result<ScalarSolution, ClassifierError> {
    let mut families: Vec<SolutionFamily> = Vec::new();
    let mut discharged = Vec::new();
    let mut zero_consistent = false;
    for f in [Rational::one(), Rational::zero()] {
        let Some(values) = linear_solve(s, &f) else {
            continue;
        };
        let quad: Vec<Poly> = s
            .relations()
            .iter()
            .filter(|r| r.kind == RelationKind::Quadratic)
            .map(|r| r.poly.substitute(&|v| values.get(v).cloned()))
            .filter(|p| !p.is_zero())
            .collect();
        let mut leaves = Vec::new();
        branch(&quad, BTreeMap::new(), Vec::new(), &mut leaves)?;
        for leaf in leaves {
            match classify_leaf(s, &f, &values, &leaf)? {
                LeafOutcome::Family(fam) => {
                    if fam.kind == FamilyKind::AllZero {
                        zero_consistent = true;
                    } else if !families.iter().any(|g| g.kind == fam.kind) {
                        families.push(fam);
                    }
                }
                LeafOutcome::Discharged(d) => discharged.push(d),
            }
        }
    }
    families.sort_by_key(|f| f.kind);
    if let Some(c) = families.iter_mut().find(|f| f.kind == FamilyKind::Constant) {
        c.reducible_at_zero = constant_reducible_at_zero(s);
    } else if families.is_empty() && zero_consistent {
        let mut z = SolutionFamily::new(FamilyKind::AllZero, &s.alpha, &s.beta);
        z.reducible_at_zero = s.punctured || constant_reducible_at_zero(s);
        families.push(z);
    }
    Ok(ScalarSolution { families, discharged })
}

fn constant_reducible_at_zero(s: &ScalarSystem) -> bool {
    let p = IntermediateParams::new(s.alpha.clone(), s.beta.clone(), Rational::zero());
    let w = build_window_with_degree(&ModuleSpec::Intermediate(p), s.window.max(8), 2).expect("valid window");
    !irreducibility_oracle(&w)
}

enum LeafOutcome {
    Family(SolutionFamily),
    Discharged(DischargedBranch),
}

fn classify_leaf(
    s: &ScalarSystem,
    f: &Rational,
    values: &HashMap<Var, Poly>,
    leaf: &Leaf,
) -> Result<LeafOutcome, ClassifierError> {
    let assign = &leaf.assign;
    let value_of = |v: Var, assign: &BTreeMap<Var, Rational>| leaf.resolve(&values[&v], assign);
    let determined: BTreeMap<(i64, i64), Option<Rational>> = s
        .unknowns()
        .iter()
        .map(|&(i, n)| {
            let p = value_of(Var::Coef(i, n), assign);
            ((i, n), (p.degree() == 0).then(|| p.coeff(&[])))
        })
        .collect();
    let core_ok = determined.iter().all(|(&(i, n), v)| v.is_some() || !in_core(s, i, n));
    let scalar = |v: Var| {
        let p = value_of(v, assign);
        (p.degree() == 0).then(|| p.coeff(&[]))
    };
    let c_i = if s.punctured {
        Some(Rational::zero())
    } else {
        scalar(Var::CI)
    };
    let c_di = if s.punctured { Some(f.clone()) } else { scalar(Var::CDI) };

    let alpha_generic = !is_integral(&s.alpha);
    let mut kinds = vec![FamilyKind::Constant];
    if alpha_generic && s.beta.is_zero() {
        kinds.push(FamilyKind::RescaledBeta0);
    }
    if alpha_generic && s.beta.is_one() {
        kinds.push(FamilyKind::RescaledBeta1);
    }
    if f.is_zero() {
        kinds = vec![FamilyKind::AllZero];
    }
    if core_ok {
        for kind in kinds {
            let fam = SolutionFamily::new(kind, &s.alpha, &s.beta);
            let matches = determined.iter().all(|(&(i, n), v)| match (v, fam.closed_form(i, n)) {
                (Some(v), Some(c)) => *v == c * f,
                (None, _) => true,
                (Some(_), None) => false,
            });
            if matches {
                let (Some(c_i), Some(c_di)) = (c_i.clone(), c_di.clone()) else {
                    return Err(ClassifierError::Unresolved("central charges not determined".into()));
                };
                let mut fam = fam;
                if !f.is_zero() {
                    fam.c_i = c_i / (f * f);
                    fam.c_di = c_di / f;
                }
                return Ok(LeafOutcome::Family(fam));
            }
        }
    }
    // anything else must be a reducible module
    let free: BTreeSet<Var> = s
        .unknowns()
        .iter()
        .flat_map(|&(i, n)| value_of(Var::Coef(i, n), assign).vars())
        .collect();
    let mut point = assign.clone();
    for v in &free {
        point.insert(*v, Rational::one());
    }
    let value = |i: i64, n: i64| {
        value_of(Var::Coef(i, n), &point)
            .eval(&|_| None)
            .expect("every parameter assigned")
    };
    if s.punctured {
        return Err(ClassifierError::Unclassified(format!(
            "punctured leaf at F = {} with F[1,1] = {}",
            Fraction(f),
            Fraction(&value(1, 1))
        )));
    }
    let w = ModuleWindow::from_coefficients(&s.alpha, &s.beta, s.window, value);
    if irreducibility_oracle(&w) {
        return Err(ClassifierError::Unclassified(format!(
            "irreducible leaf at F = {} outside the known families (F[1,0] = {})",
            Fraction(f),
            Fraction(&value(1, 0))
        )));
    }
    Ok(LeafOutcome::Discharged(DischargedBranch {
        f: f.clone(),
        free: free.into_iter().collect(),
        chain: (-s.window..=s.window)
            .filter(|&n| s.has_unknown(1, n))
            .map(|n| (n, value(1, n)))
            .collect(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn kinds(f: &[SolutionFamily]) -> Vec<FamilyKind> {
        f.iter().map(|f| f.kind).collect()
    }

    #[test]
    fn window_preconditions() {
        assert!(matches!(
            build_scalar_system(&rat(1, 3), &int(2), 3, false),
            Err(ClassifierError::WindowTooSmall { .. })
        ));
        assert!(build_scalar_system(&rat(1, 3), &int(2), 4, false).is_ok());
        assert!(matches!(
            build_scalar_system(&rat(1, 3), &int(0), 6, true),
            Err(ClassifierError::PuncturedAlpha(_))
        ));
    }

    #[test]
    fn punctured_drops_zero_weight() {
        let s = build_scalar_system(&int(0), &int(0), 6, true).unwrap();
        assert!(!s.has_unknown(2, 0));
        assert!(!s.has_unknown(2, -2));
        assert!(s.has_unknown(2, 1));
        for r in s.relations() {
            let n = r.n;
            assert!(n * (n + r.i) * (n + r.j) * (n + r.i + r.j) != 0 || r.kind == RelationKind::Eigenvalue);
        }
    }

    #[test]
    fn obstruction_example() {
        let q = quadratic_obstruction(&rat(1, 4), &int(0), 0);
        let f1 = Var::Coef(1, 0);
        assert_eq!(q.coeff(&[f1, f1]), rat(5, 4));
        assert_eq!(q.coeff(&[f1, Var::Scalar]), rat(-3, 2));
        assert_eq!(q.coeff(&[Var::Scalar, Var::Scalar]), rat(1, 4));
    }

    #[test]
    fn solver_examples() {
        assert_eq!(
            kinds(&solve_scalar(&rat(1, 3), &int(2), 6).unwrap()),
            vec![FamilyKind::Constant]
        );
        assert_eq!(
            kinds(&solve_scalar(&rat(1, 4), &int(0), 6).unwrap()),
            vec![FamilyKind::Constant, FamilyKind::RescaledBeta0]
        );
        let z = solve_scalar(&int(0), &int(0), 6).unwrap();
        assert_eq!(kinds(&z), vec![FamilyKind::Constant]);
        assert!(z[0].reducible_at_zero);
        for (a, b) in [(int(1), int(1)), (int(0), int(1)), (int(2), int(0))] {
            let d = solve_scalar_detailed(&a, &b, 6).unwrap();
            assert_eq!(kinds(&d.families), vec![FamilyKind::Constant]);
            // the leftover F = 0 branch has a free chain value at n = β−α−1
            let m = (&b - &a - int(1)).to_integer().try_into().unwrap();
            assert!(d
                .discharged
                .iter()
                .any(|br| br.f.is_zero() && br.free.contains(&Var::Coef(1, m))));
        }
        assert_eq!(
            kinds(&solve_scalar(&rat(1, 2), &rat(1, 2), 6).unwrap()),
            vec![FamilyKind::Constant]
        );
        assert!(matches!(
            solve_scalar(&rat(1, 3), &int(2), 5),
            Err(ClassifierError::WindowTooSmall { .. })
        ));
    }

    #[test]
    fn punctured_solutions() {
        for b in [int(0), int(1)] {
            let d = solve_punctured(&b, 8).unwrap();
            assert_eq!(kinds(&d.families), vec![FamilyKind::AllZero], "beta {b}");
        }
        assert!(matches!(
            solve_punctured(&int(0), 7),
            Err(ClassifierError::WindowTooSmall { .. })
        ));
    }

    #[test]
    fn j1_elimination_matches_chain() {
        let (a, b) = (rat(2, 7), rat(3, 5));
        let s = build_scalar_system(&a, &b, 6, false).unwrap();
        let e = eliminate_j1(&s);
        for (m, rec) in &e.recurrences {
            let want = coef(1, m + 1)
                .scale(&(&a - &b + int(m + 2)))
                .sub(&coef(1, *m).scale(&(&a - &b + int(m + 1))))
                .sub(&Poly::var(Var::Scalar));
            assert_eq!(rec, &want, "m = {m}");
        }
        for n in -2..=2 {
            assert_eq!(
                eliminated_quadratic(&s, n),
                Some(quadratic_obstruction(&a, &b, n)),
                "n = {n}"
            );
        }
    }

    #[test]
    fn families_plug_back() {
        let s = build_scalar_system(&rat(1, 4), &int(0), 6, false).unwrap();
        for f in solve_scalar(&rat(1, 4), &int(0), 6).unwrap() {
            for x in [int(1), rat(-3, 2)] {
                assert!(check_family(&s, &f, &x), "{:?}", f.kind);
            }
        }
        let s = build_scalar_system(&rat(1, 3), &int(1), 6, false).unwrap();
        let fam = SolutionFamily::new(FamilyKind::RescaledBeta1, &rat(1, 3), &int(1));
        assert!(check_family(&s, &fam, &int(2)));
        let wrong = SolutionFamily::new(FamilyKind::RescaledBeta0, &rat(1, 3), &int(1));
        assert!(!check_family(&s, &wrong, &int(2)));
    }
}
