//! Concrete weight modules and their materialization on finite windows.
//!
//! Indices label weights relative to an offset: index `k` stands for the
//! weight space of `α + k`. An action of a degree-`n` generator on index `k`
//! is a block mapping coordinates at `k` to coordinates at `k + n`; columns
//! index the source basis, rows the target basis.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Generator, LieElement};
use crate::linalg::Matrix;
use crate::rational::{as_string, int, is_integral, Fraction, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuleError {
    #[error("x[{0}] is not among the defining actions of this extension (|i| <= 2)")]
    IndexOutOfFamily(i64),
    #[error("alpha = {} must not be an integer for this module", Fraction(.0))]
    IntegralAlpha(Rational),
    #[error("module family `{0}` needs the field `{1}`")]
    MissingField(String, &'static str),
    #[error("unknown module family `{0}`")]
    UnknownFamily(String),
    #[error("window half-width must be at least 1")]
    EmptyWindow,
}

/// Parameters of `V(α,β;F)`: `x_i v_k = (α+k+βi) v_{k+i}`, `I(i) v_k = F v_{k+i}`,
/// all central elements acting as zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntermediateParams {
    #[serde(with = "as_string")]
    pub alpha: Rational,
    #[serde(with = "as_string")]
    pub beta: Rational,
    #[serde(rename = "F", with = "as_string")]
    pub f: Rational,
}

impl IntermediateParams {
    pub fn new(alpha: Rational, beta: Rational, f: Rational) -> Self {
        Self { alpha, beta, f }
    }
}

/// Modules over the Virasoro part only.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum VirModuleKind {
    Vab {
        alpha: Rational,
        beta: Rational,
    },
    Aa(Rational),
    Ba(Rational),
    /// Extension of `V(α,0)` by itself with coupling `-i` (basis `v, v'`).
    ExtCaseA(Rational),
    /// Extension of `V(α,0)` by itself with coupling only in `x_{±2}`.
    ExtCaseB(Rational),
}

impl VirModuleKind {
    /// Dimension of every weight space.
    pub fn rank(&self) -> usize {
        match self {
            VirModuleKind::ExtCaseA(_) | VirModuleKind::ExtCaseB(_) => 2,
            _ => 1,
        }
    }

    fn check(&self) -> Result<(), ModuleError> {
        match self {
            VirModuleKind::ExtCaseA(a) | VirModuleKind::ExtCaseB(a) if is_integral(a) => {
                Err(ModuleError::IntegralAlpha(a.clone()))
            }
            _ => Ok(()),
        }
    }
}

/// Anything a window can be built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModuleSpec {
    Intermediate(IntermediateParams),
    /// The irreducible sub-quotient `V'(0,0;0)`.
    Vprime,
    Vir(VirModuleKind),
}

/// JSON form: `{"family": "V"|"A"|"B"|"ExtA"|"ExtB"|"Vprime", "alpha": "p/q", ...}`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ModuleSpecJson {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "as_string::option")]
    pub alpha: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "as_string::option")]
    pub beta: Option<Rational>,
    #[serde(
        rename = "F",
        default,
        skip_serializing_if = "Option::is_none",
        with = "as_string::option"
    )]
    pub f: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "as_string::option")]
    pub a: Option<Rational>,
}

impl TryFrom<ModuleSpecJson> for ModuleSpec {
    type Error = ModuleError;

    fn try_from(j: ModuleSpecJson) -> Result<Self, ModuleError> {
        let fam = j.family.clone();
        let need = |v: Option<Rational>, name| v.ok_or_else(|| ModuleError::MissingField(fam.clone(), name));
        let spec = match j.family.as_str() {
            "V" => ModuleSpec::Intermediate(IntermediateParams::new(
                need(j.alpha, "alpha")?,
                need(j.beta, "beta")?,
                j.f.unwrap_or_else(Rational::zero),
            )),
            "A" => ModuleSpec::Vir(VirModuleKind::Aa(need(j.a, "a")?)),
            "B" => ModuleSpec::Vir(VirModuleKind::Ba(need(j.a, "a")?)),
            "ExtA" => ModuleSpec::Vir(VirModuleKind::ExtCaseA(need(j.alpha, "alpha")?)),
            "ExtB" => ModuleSpec::Vir(VirModuleKind::ExtCaseB(need(j.alpha, "alpha")?)),
            "Vprime" => ModuleSpec::Vprime,
            other => return Err(ModuleError::UnknownFamily(other.to_string())),
        };
        if let ModuleSpec::Vir(kind) = &spec {
            kind.check()?;
        }
        Ok(spec)
    }
}

impl From<&ModuleSpec> for ModuleSpecJson {
    fn from(spec: &ModuleSpec) -> Self {
        let mut j = ModuleSpecJson::default();
        match spec {
            ModuleSpec::Intermediate(p) => {
                j.family = "V".into();
                j.alpha = Some(p.alpha.clone());
                j.beta = Some(p.beta.clone());
                j.f = Some(p.f.clone());
            }
            ModuleSpec::Vprime => j.family = "Vprime".into(),
            ModuleSpec::Vir(kind) => match kind {
                VirModuleKind::Vab { alpha, beta } => {
                    j.family = "V".into();
                    j.alpha = Some(alpha.clone());
                    j.beta = Some(beta.clone());
                }
                VirModuleKind::Aa(a) => {
                    j.family = "A".into();
                    j.a = Some(a.clone());
                }
                VirModuleKind::Ba(a) => {
                    j.family = "B".into();
                    j.a = Some(a.clone());
                }
                VirModuleKind::ExtCaseA(a) => {
                    j.family = "ExtA".into();
                    j.alpha = Some(a.clone());
                }
                VirModuleKind::ExtCaseB(a) => {
                    j.family = "ExtB".into();
                    j.alpha = Some(a.clone());
                }
            },
        }
        j
    }
}

/// Coefficient and target index of a generator on `v_k` in `V(α,β;F)`;
/// `None` when the coefficient is zero.
pub fn intermediate_action(p: &IntermediateParams, gen: Generator, k: i64) -> Option<(Rational, i64)> {
    let (c, target) = match gen {
        Generator::X(i) => (&p.alpha + int(k) + &p.beta * int(i), k + i),
        Generator::I(i) => (p.f.clone(), k + i),
        _ => (Rational::zero(), k),
    };
    (!c.is_zero()).then_some((c, target))
}

/// One action block: `x_i` sends index `k` to `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub target: i64,
    pub block: Matrix,
}

fn scalar(c: Rational) -> Matrix {
    Matrix::from_rows(vec![vec![c]])
}

fn upper(diag: Rational, coupling: Rational) -> Matrix {
    Matrix::from_rows(vec![vec![diag.clone(), coupling], vec![Rational::zero(), diag]])
}

/// Action of `x_i` on the weight space at index `k`.
pub fn vir_action(kind: &VirModuleKind, i: i64, k: i64) -> Result<Action, ModuleError> {
    let target = k + i;
    let block = match kind {
        VirModuleKind::Vab { alpha, beta } => scalar(alpha + int(k) + beta * int(i)),
        VirModuleKind::Aa(a) => {
            if k == 0 {
                scalar(int(i) * (int(i) + a))
            } else {
                scalar(int(i + k))
            }
        }
        VirModuleKind::Ba(a) => {
            if k == -i {
                scalar(-int(i) * (int(i) + a))
            } else {
                scalar(int(k))
            }
        }
        VirModuleKind::ExtCaseA(alpha) => upper(alpha + int(k), int(-i)),
        VirModuleKind::ExtCaseB(alpha) => {
            let d = alpha + int(k);
            let coupling = match i {
                1 | -1 => Rational::zero(),
                2 => ((alpha + int(k + 2)) * (alpha + int(k + 1))).recip(),
                -2 => -((alpha + int(k - 2)) * (alpha + int(k - 1))).recip(),
                _ => return Err(ModuleError::IndexOutOfFamily(i)),
            };
            upper(d, coupling)
        }
    };
    Ok(Action { target, block })
}

/// `V(α,β;F)` is reducible iff `F = 0`, `α ∈ ℤ` and `β ∈ {0, 1}`.
pub fn is_reducible(p: &IntermediateParams) -> bool {
    p.f.is_zero() && is_integral(&p.alpha) && (p.beta.is_zero() || p.beta.is_one())
}

/// A weight module truncated to indices `[-N, N]`, with actions of every
/// generator of degree `|n| <= max_degree` stored for each index in the window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleWindow {
    offset: Rational,
    half_width: i64,
    max_degree: i64,
    dims: BTreeMap<i64, usize>,
    actions: HashMap<(Generator, i64), Matrix>,
    centrals: [Rational; 3],
}

impl ModuleWindow {
    /// Assembles a window from raw tables. Blocks for `(g, k)` must have
    /// `dims[k]` columns.
    pub fn from_parts(
        offset: Rational,
        half_width: i64,
        max_degree: i64,
        dims: BTreeMap<i64, usize>,
        actions: HashMap<(Generator, i64), Matrix>,
        centrals: [Rational; 3],
    ) -> Self {
        for ((g, k), b) in &actions {
            debug_assert!(!g.is_central());
            debug_assert!(k.abs() <= half_width && g.degree().abs() <= max_degree);
            debug_assert_eq!(b.cols(), dims.get(k).copied().unwrap_or(0), "block {g} at {k}");
        }
        Self {
            offset,
            half_width,
            max_degree,
            dims,
            actions,
            centrals,
        }
    }

    pub fn offset(&self) -> &Rational {
        &self.offset
    }

    pub fn half_width(&self) -> i64 {
        self.half_width
    }

    pub fn max_degree(&self) -> i64 {
        self.max_degree
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> {
        -self.half_width..=self.half_width
    }

    pub fn dim(&self, k: i64) -> usize {
        self.dims.get(&k).copied().unwrap_or(0)
    }

    pub fn dims(&self) -> &BTreeMap<i64, usize> {
        &self.dims
    }

    /// Non-central generators with stored actions, sorted.
    pub fn generators(&self) -> Vec<Generator> {
        let mut gens: Vec<Generator> = self.actions.keys().map(|(g, _)| *g).collect();
        gens.sort();
        gens.dedup();
        gens
    }

    pub fn has_action(&self, g: Generator) -> bool {
        g.is_central() || self.actions.keys().any(|(h, _)| *h == g)
    }

    pub fn central_scalar(&self, g: Generator) -> Rational {
        match g {
            Generator::CD => self.centrals[0].clone(),
            Generator::CDI => self.centrals[1].clone(),
            Generator::CI => self.centrals[2].clone(),
            _ => panic!("{g} is not central"),
        }
    }

    /// Stored block of a non-central generator at index `k`.
    pub fn action(&self, g: Generator, k: i64) -> Option<&Matrix> {
        self.actions.get(&(g, k))
    }

    pub fn actions(&self) -> impl Iterator<Item = (&(Generator, i64), &Matrix)> {
        self.actions.iter()
    }

    /// `g · v` for `v` at index `k`; `None` if the action is not stored.
    pub fn apply(&self, g: Generator, k: i64, v: &[Rational]) -> Option<Vec<Rational>> {
        if g.is_central() {
            let c = self.central_scalar(g);
            return Some(v.iter().map(|x| x * &c).collect());
        }
        self.action(g, k).map(|b| b.mul_vec(v))
    }

    /// Action of a nonzero homogeneous element; `None` if some term is not
    /// stored or `e` is zero.
    pub fn apply_element(&self, e: &LieElement, k: i64, v: &[Rational]) -> Option<Vec<Rational>> {
        let mut out: Option<Vec<Rational>> = None;
        for (g, c) in e.iter() {
            let w = self.apply(*g, k, v)?;
            match &mut out {
                None => out = Some(w.into_iter().map(|x| x * c).collect()),
                Some(acc) => {
                    if acc.len() != w.len() {
                        return None;
                    }
                    for (a, x) in acc.iter_mut().zip(w) {
                        *a += x * c;
                    }
                }
            }
        }
        out
    }

    /// Change of basis `w_k = d(k) · v_k` on a window of one-dimensional
    /// weight spaces.
    pub fn rescale(&self, d: impl Fn(i64) -> Rational) -> ModuleWindow {
        let actions = self
            .actions
            .iter()
            .map(|(&(g, k), b)| {
                assert!(
                    b.rows() <= 1 && b.cols() <= 1,
                    "rescale needs one-dimensional weight spaces"
                );
                let t = k + g.degree();
                let factor = d(k) / d(t);
                ((g, k), b.scale(&factor))
            })
            .collect();
        ModuleWindow {
            actions,
            ..self.clone()
        }
    }

    /// Window with the `x` actions of `V(α,β)` and `I(i) v_n = F_{i,n} v_{n+i}`
    /// for a prescribed coefficient function.
    pub fn from_coefficients(
        alpha: &Rational,
        beta: &Rational,
        n: i64,
        coef: impl Fn(i64, i64) -> Rational,
    ) -> ModuleWindow {
        let dims = (-n..=n).map(|k| (k, 1)).collect();
        let mut actions = HashMap::new();
        for k in -n..=n {
            for i in -n..=n {
                actions.insert((Generator::X(i), k), scalar(alpha + int(k) + beta * int(i)));
                actions.insert((Generator::I(i), k), scalar(coef(i, k)));
            }
        }
        ModuleWindow::from_parts(alpha.clone(), n, n, dims, actions, zero_centrals())
    }

    /// Checks `[a,b] v = a(b v) − b(a v)` for all stored generators of degree
    /// at most `max_deg` on basis vectors at indices `|k| <= inner`.
    pub fn verify_axioms(&self, max_deg: i64, inner: i64) -> Result<(), AxiomFailure> {
        assert!(
            2 * max_deg <= self.max_degree && inner + max_deg <= self.half_width,
            "axiom check does not fit the window"
        );
        let gens: Vec<Generator> = self
            .generators()
            .into_iter()
            .filter(|g| g.degree().abs() <= max_deg)
            .collect();
        for k in -inner..=inner {
            for e in 0..self.dim(k) {
                let mut v = vec![Rational::zero(); self.dim(k)];
                v[e] = Rational::one();
                for &a in &gens {
                    for &b in &gens {
                        if a >= b {
                            continue;
                        }
                        if !self.axiom_holds(a, b, k, &v) {
                            return Err(AxiomFailure {
                                a,
                                b,
                                index: k,
                                basis: e,
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn axiom_holds(&self, a: Generator, b: Generator, k: i64, v: &[Rational]) -> bool {
        let ab = self.apply(b, k, v).and_then(|w| self.apply(a, k + b.degree(), &w));
        let ba = self.apply(a, k, v).and_then(|w| self.apply(b, k + a.degree(), &w));
        let (Some(ab), Some(ba)) = (ab, ba) else {
            return true;
        };
        let comm: Vec<Rational> = ab.iter().zip(&ba).map(|(x, y)| x - y).collect();
        let e = crate::algebra::bracket_generators(a, b);
        if e.is_zero() {
            return comm.iter().all(Zero::is_zero);
        }
        match self.apply_element(&e, k, v) {
            Some(lhs) => lhs == comm,
            None => true,
        }
    }
}

/// A failed module-axiom instance.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("[{a},{b}] acts incorrectly on basis vector {basis} at index {index}")]
pub struct AxiomFailure {
    pub a: Generator,
    pub b: Generator,
    pub index: i64,
    pub basis: usize,
}

fn zero_centrals() -> [Rational; 3] {
    [Rational::zero(), Rational::zero(), Rational::zero()]
}

fn intermediate_window(p: &IntermediateParams, n: i64, max_degree: i64) -> ModuleWindow {
    let dims = (-n..=n).map(|k| (k, 1)).collect();
    let mut actions = HashMap::new();
    for k in -n..=n {
        for i in -max_degree..=max_degree {
            for g in [Generator::X(i), Generator::I(i)] {
                let c = intermediate_action(p, g, k).map_or_else(Rational::zero, |(c, _)| c);
                actions.insert((g, k), scalar(c));
            }
        }
    }
    ModuleWindow::from_parts(p.alpha.clone(), n, max_degree, dims, actions, zero_centrals())
}

/// `V'(0,0;0)` inside `V(0,1;0)`: basis `v_n`, `n != 0`, `x_i v_n = (n+i) v_{n+i}`.
fn vprime_window(n: i64, max_degree: i64) -> ModuleWindow {
    let d = |k: i64| usize::from(k != 0);
    let dims = (-n..=n).map(|k| (k, d(k))).collect();
    let mut actions = HashMap::new();
    for k in -n..=n {
        for i in -max_degree..=max_degree {
            let (rows, cols) = (d(k + i), d(k));
            let mut x = Matrix::zeros(rows, cols);
            if rows == 1 && cols == 1 {
                x.set(0, 0, int(k + i));
            }
            actions.insert((Generator::X(i), k), x);
            actions.insert((Generator::I(i), k), Matrix::zeros(rows, cols));
        }
    }
    ModuleWindow::from_parts(Rational::zero(), n, max_degree, dims, actions, zero_centrals())
}

/// `x_i` blocks for the second rank-two extension, generated from the
/// defining actions of `x_{±1}`, `x_{±2}` by brackets.
struct ExtBActions<'a> {
    kind: &'a VirModuleKind,
    memo: HashMap<(i64, i64), Matrix>,
}

impl ExtBActions<'_> {
    fn block(&mut self, i: i64, k: i64) -> Matrix {
        if let Some(b) = self.memo.get(&(i, k)) {
            return b.clone();
        }
        let b = match i {
            -2..=2 if i != 0 => vir_action(self.kind, i, k).expect("defining action").block,
            // [x_{-1}, x_1] = 2 x_0
            0 => self.commutator(-1, 1, k).scale(&Rational::new(1.into(), 2.into())),
            // [x_1, x_{i-1}] = (i-2) x_i
            i if i > 0 => self.commutator(1, i - 1, k).scale(&int(i - 2).recip()),
            // [x_{-1}, x_{i+1}] = (i+2) x_i
            i => self.commutator(-1, i + 1, k).scale(&int(i + 2).recip()),
        };
        self.memo.insert((i, k), b.clone());
        b
    }

    /// Block of `x_a x_b − x_b x_a` at index `k`.
    fn commutator(&mut self, a: i64, b: i64, k: i64) -> Matrix {
        let ab = self.block(a, k + b).mul(&self.block(b, k));
        let ba = self.block(b, k + a).mul(&self.block(a, k));
        ab.sub(&ba)
    }
}

fn vir_window(kind: &VirModuleKind, n: i64, max_degree: i64) -> ModuleWindow {
    let r = kind.rank();
    let dims = (-n..=n).map(|k| (k, r)).collect();
    let mut actions = HashMap::new();
    let mut ext_b = ExtBActions {
        kind,
        memo: HashMap::new(),
    };
    for k in -n..=n {
        for i in -max_degree..=max_degree {
            let block = match kind {
                VirModuleKind::ExtCaseB(_) => ext_b.block(i, k),
                _ => vir_action(kind, i, k).expect("total for this kind").block,
            };
            actions.insert((Generator::X(i), k), block);
        }
    }
    let offset = match kind {
        VirModuleKind::Vab { alpha, .. } | VirModuleKind::ExtCaseA(alpha) | VirModuleKind::ExtCaseB(alpha) => {
            alpha.clone()
        }
        _ => Rational::zero(),
    };
    ModuleWindow::from_parts(offset, n, max_degree, dims, actions, zero_centrals())
}

/// `V(α,β;F)` itself when irreducible, otherwise `V'(0,0;0)`.
pub fn irreducible_quotient(p: &IntermediateParams, n: i64) -> ModuleWindow {
    if is_reducible(p) {
        vprime_window(n, n)
    } else {
        intermediate_window(p, n, n)
    }
}

/// Window over `[-N, N]` with every generator of degree `|n| <= N`.
pub fn build_window(spec: &ModuleSpec, n: i64) -> Result<ModuleWindow, ModuleError> {
    build_window_with_degree(spec, n, n)
}

/// As [`build_window`], storing generators up to `max_degree` only.
pub fn build_window_with_degree(spec: &ModuleSpec, n: i64, max_degree: i64) -> Result<ModuleWindow, ModuleError> {
    if n < 1 {
        return Err(ModuleError::EmptyWindow);
    }
    Ok(match spec {
        ModuleSpec::Intermediate(p) => intermediate_window(p, n, max_degree),
        ModuleSpec::Vprime => vprime_window(n, max_degree),
        ModuleSpec::Vir(kind) => {
            kind.check()?;
            vir_window(kind, n, max_degree)
        }
    })
}
