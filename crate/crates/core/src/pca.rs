//! Partial applicative structures, bracket abstraction, relative PCAs and
//! their correspondence with relationally complete DCOs.
//!
//! Two instances are provided: finite application tables ([`TableOpas`]) and
//! closed SK-terms under step-bounded weak-head reduction ([`SkPca`]). In the
//! SK instance "undefined" is approximated by "no weak-head normal form within
//! the step budget", reported as [`Eval::OutOfBudget`] and never conflated with
//! a definite [`Eval::Undefined`].

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};

use crate::cartesian::{nary, CartesianWitness};
use crate::error::{Error, Result};
use crate::relcomplete::{validate_witness, RelCompWitness};
use crate::relcore::{BinRel, Carrier};
use crate::uord::{check_preorder, Basis, NamedRel, UniformPreorder};

/// Result of a partial computation under a step budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Eval<E> {
    Defined(E),
    Undefined,
    OutOfBudget,
}

impl<E> Eval<E> {
    pub fn defined(self) -> Option<E> {
        match self {
            Eval::Defined(e) => Some(e),
            _ => None,
        }
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, Eval::Defined(_))
    }
}

/// An ordered partial applicative structure.
pub trait Opas: Sync {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    /// `a·b`, spending steps from `steps`.
    fn apply(&self, a: &Self::Elem, b: &Self::Elem, steps: &mut u64) -> Eval<Self::Elem>;

    /// `a ≤ b`; `None` when the budget ran out before deciding.
    fn leq(&self, a: &Self::Elem, b: &Self::Elem, steps: &mut u64) -> Option<bool>;

    fn k(&self) -> Option<Self::Elem>;
    fn s(&self) -> Option<Self::Elem>;

    fn name(&self, e: &Self::Elem) -> String;

    /// All elements, when the carrier is finite.
    fn elements(&self) -> Option<Vec<Self::Elem>>;

    /// A random element, for sampled checks.
    fn sample(&self, rng: &mut dyn RngCore) -> Self::Elem;
}

/// Polynomials: variables, constants and left-associated application.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term<E> {
    Var(String),
    Const(E),
    App(Box<Term<E>>, Box<Term<E>>),
}

impl<E: Clone + PartialEq> Term<E> {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn app(f: Term<E>, x: Term<E>) -> Self {
        Term::App(Box::new(f), Box::new(x))
    }

    /// `head · args[0] · args[1] · …`
    pub fn apply_all(head: Term<E>, args: impl IntoIterator<Item = Term<E>>) -> Self {
        args.into_iter().fold(head, Term::app)
    }

    pub fn mentions(&self, x: &str) -> bool {
        match self {
            Term::Var(v) => v == x,
            Term::Const(_) => false,
            Term::App(f, a) => f.mentions(x) || a.mentions(x),
        }
    }

    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) if !out.contains(v) => out.push(v.clone()),
            Term::App(f, a) => {
                f.collect_vars(out);
                a.collect_vars(out);
            }
            _ => {}
        }
    }

    pub fn constants(&self) -> Vec<E> {
        match self {
            Term::Var(_) => vec![],
            Term::Const(c) => vec![c.clone()],
            Term::App(f, a) => {
                let mut v = f.constants();
                v.extend(a.constants());
                v
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::App(f, a) => 1 + f.depth().max(a.depth()),
            _ => 0,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::App(f, a) => f.size() + a.size(),
            _ => 1,
        }
    }

    pub fn display_with<'a>(&'a self, name: &'a dyn Fn(&E) -> String) -> TermDisplay<'a, E> {
        TermDisplay { term: self, name }
    }
}

pub struct TermDisplay<'a, E> {
    term: &'a Term<E>,
    name: &'a dyn Fn(&E) -> String,
}

impl<E> TermDisplay<'_, E> {
    fn write(&self, t: &Term<E>, f: &mut fmt::Formatter<'_>, arg: bool) -> fmt::Result {
        match t {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "{}", (self.name)(c)),
            Term::App(g, a) => {
                if arg {
                    write!(f, "(")?;
                }
                self.write(g, f, false)?;
                write!(f, " ")?;
                self.write(a, f, true)?;
                if arg {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl<E> fmt::Display for TermDisplay<'_, E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.term, f, false)
    }
}

/// Parses juxtaposition with parentheses, e.g. `S (K x) y`. Identifiers that
/// `resolve` maps to an element become constants; the rest are variables.
pub fn parse_term<E: Clone + PartialEq>(
    src: &str,
    resolve: impl Fn(&str) -> Option<E>,
) -> Result<Term<E>> {
    let mut tokens = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '(' || c == ')' {
            tokens.push(c.to_string());
            chars.next();
        } else if c.is_alphanumeric() || "_#'".contains(c) {
            let mut end = i;
            while let Some(&(j, d)) = chars.peek() {
                if d.is_alphanumeric() || "_#'".contains(d) {
                    end = j + d.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
            tokens.push(src[i..end].to_string());
        } else {
            return Err(Error::TermSyntax(format!("unexpected `{c}` at {i}")));
        }
    }
    let mut pos = 0;
    let t = parse_seq(&tokens, &mut pos, &resolve)?;
    if pos != tokens.len() {
        return Err(Error::TermSyntax(format!("unbalanced `{}`", tokens[pos])));
    }
    Ok(t)
}

fn parse_seq<E: Clone + PartialEq>(
    tokens: &[String],
    pos: &mut usize,
    resolve: &impl Fn(&str) -> Option<E>,
) -> Result<Term<E>> {
    let mut acc: Option<Term<E>> = None;
    while *pos < tokens.len() && tokens[*pos] != ")" {
        let atom = if tokens[*pos] == "(" {
            *pos += 1;
            let inner = parse_seq(tokens, pos, resolve)?;
            if tokens.get(*pos).map(String::as_str) != Some(")") {
                return Err(Error::TermSyntax("missing `)`".into()));
            }
            *pos += 1;
            inner
        } else {
            let tok = &tokens[*pos];
            *pos += 1;
            resolve(tok).map_or_else(|| Term::var(tok.clone()), Term::Const)
        };
        acc = Some(match acc {
            None => atom,
            Some(f) => Term::app(f, atom),
        });
    }
    acc.ok_or_else(|| Error::TermSyntax("empty term".into()))
}

/// Strict left-to-right evaluation: the function, then the argument, then the
/// application.
pub fn eval_term<O: Opas>(
    o: &O,
    t: &Term<O::Elem>,
    env: &HashMap<String, O::Elem>,
    budget: u64,
) -> Result<Eval<O::Elem>> {
    let mut steps = budget;
    eval_with(o, t, env, &mut steps)
}

fn eval_with<O: Opas>(
    o: &O,
    t: &Term<O::Elem>,
    env: &HashMap<String, O::Elem>,
    steps: &mut u64,
) -> Result<Eval<O::Elem>> {
    Ok(match t {
        Term::Var(v) => Eval::Defined(
            env.get(v)
                .cloned()
                .ok_or_else(|| Error::UnboundVariable(v.clone()))?,
        ),
        Term::Const(c) => Eval::Defined(c.clone()),
        Term::App(f, a) => {
            let f = match eval_with(o, f, env, steps)? {
                Eval::Defined(f) => f,
                other => return Ok(other),
            };
            let a = match eval_with(o, a, env, steps)? {
                Eval::Defined(a) => a,
                other => return Ok(other),
            };
            o.apply(&f, &a, steps)
        }
    })
}

/// `e · args[0] · …` on elements.
pub fn apply_args<O: Opas>(o: &O, e: &O::Elem, args: &[O::Elem], steps: &mut u64) -> Eval<O::Elem> {
    let mut acc = e.clone();
    for a in args {
        match o.apply(&acc, a, steps) {
            Eval::Defined(v) => acc = v,
            other => return other,
        }
    }
    Eval::Defined(acc)
}

/// `λ*x₁ … xₙ. p` from `k` and `s`. The constant rule is applied to atoms
/// only, so every partial application of the result is defined.
pub fn bracket_abstract<O: Opas>(o: &O, p: &Term<O::Elem>, vars: &[&str]) -> Result<Term<O::Elem>> {
    let (k, s) = match (o.k(), o.s()) {
        (Some(k), Some(s)) => (Term::Const(k), Term::Const(s)),
        _ => return Err(Error::MissingCombinators),
    };
    Ok(vars
        .iter()
        .rev()
        .fold(p.clone(), |t, x| abstract_one(&t, x, &k, &s)))
}

fn abstract_one<E: Clone + PartialEq>(t: &Term<E>, x: &str, k: &Term<E>, s: &Term<E>) -> Term<E> {
    match t {
        Term::Var(v) if v == x => Term::apply_all(s.clone(), [k.clone(), k.clone()]),
        Term::Var(_) | Term::Const(_) => Term::app(k.clone(), t.clone()),
        Term::App(f, a) => Term::apply_all(
            s.clone(),
            [abstract_one(f, x, k, s), abstract_one(a, x, k, s)],
        ),
    }
}

/// Outcome of checking the two guarantees of `e = λ*x₁…xₙ y. p` on samples.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ObligationReport {
    pub probes: u64,
    pub violations: u64,
    /// Probes where the budget ran out before a verdict.
    pub inconclusive: u64,
    pub first_violation: Option<String>,
}

impl ObligationReport {
    pub fn merge(&mut self, other: ObligationReport) {
        self.probes += other.probes;
        self.violations += other.violations;
        self.inconclusive += other.inconclusive;
        if self.first_violation.is_none() {
            self.first_violation = other.first_violation;
        }
    }
}

/// Checks `e·a₁…aₙ↓` and `p[ā,b]↓ ⇒ e·ā·b↓ ∧ e·ā·b ≤ p[ā,b]` for each sample
/// `(a₁, …, aₙ, b)`; `vars` lists `x₁ … xₙ, y`.
pub fn check_abstraction<O: Opas>(
    o: &O,
    p: &Term<O::Elem>,
    vars: &[&str],
    e: &Term<O::Elem>,
    samples: &[Vec<O::Elem>],
    budget: u64,
) -> Result<ObligationReport> {
    if vars.is_empty() {
        return Err(Error::InvalidStructure("abstraction needs at least one variable".into()));
    }
    let n = vars.len() - 1;
    let mut report = ObligationReport::default();
    let none = HashMap::new();
    for args in samples {
        if args.len() != vars.len() {
            return Err(Error::InvalidStructure(format!(
                "sample has {} arguments, expected {}",
                args.len(),
                vars.len()
            )));
        }
        report.probes += 1;
        let show = |a: &[O::Elem]| a.iter().map(|x| o.name(x)).collect::<Vec<_>>().join(", ");
        let mut steps = budget;
        let head = match eval_with(o, e, &none, &mut steps)? {
            Eval::Defined(h) => h,
            Eval::OutOfBudget => {
                report.inconclusive += 1;
                continue;
            }
            Eval::Undefined => {
                report.violations += 1;
                report.first_violation.get_or_insert_with(|| "e is undefined".into());
                continue;
            }
        };
        let partial = match apply_args(o, &head, &args[..n], &mut steps) {
            Eval::Defined(v) => v,
            Eval::OutOfBudget => {
                report.inconclusive += 1;
                continue;
            }
            Eval::Undefined => {
                report.violations += 1;
                report
                    .first_violation
                    .get_or_insert_with(|| format!("e·ā undefined at ({})", show(&args[..n])));
                continue;
            }
        };
        let env: HashMap<String, O::Elem> = vars
            .iter()
            .map(|v| v.to_string())
            .zip(args.iter().cloned())
            .collect();
        let mut psteps = budget;
        let target = match eval_with(o, p, &env, &mut psteps)? {
            Eval::Defined(v) => v,
            Eval::Undefined => continue,
            Eval::OutOfBudget => {
                report.inconclusive += 1;
                continue;
            }
        };
        let mut steps = budget;
        let verdict = match o.apply(&partial, &args[n], &mut steps) {
            Eval::Defined(v) => o.leq(&v, &target, &mut steps),
            Eval::Undefined => Some(false),
            Eval::OutOfBudget => None,
        };
        match verdict {
            Some(true) => {}
            Some(false) => {
                report.violations += 1;
                report
                    .first_violation
                    .get_or_insert_with(|| format!("e·ā·b ≰ p[ā,b] at ({})", show(args)));
            }
            None => report.inconclusive += 1,
        }
    }
    Ok(report)
}

/// Finite application table with a definedness mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableOpas {
    carrier: Carrier,
    table: Vec<Option<usize>>,
    order: BinRel,
    k: Option<usize>,
    s: Option<usize>,
}

impl TableOpas {
    /// `table[a * n + b]` is `a·b`; `order` defaults to equality.
    pub fn new(
        carrier: Carrier,
        table: Vec<Option<usize>>,
        order: Option<BinRel>,
        k: Option<usize>,
        s: Option<usize>,
    ) -> Result<Self> {
        let n = carrier.size();
        if table.len() != n * n {
            return Err(Error::CarrierMismatch(format!(
                "application table has {} entries, expected {}",
                table.len(),
                n * n
            )));
        }
        if table.iter().flatten().chain(k.iter()).chain(s.iter()).any(|&v| v >= n) {
            return Err(Error::CarrierMismatch("application value outside the carrier".into()));
        }
        let order = order.unwrap_or_else(|| BinRel::identity(n));
        if order.source() != n || order.target() != n {
            return Err(Error::CarrierMismatch("order has the wrong shape".into()));
        }
        check_preorder(&order)?;
        Ok(TableOpas {
            carrier,
            table,
            order,
            k,
            s,
        })
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn size(&self) -> usize {
        self.carrier.size()
    }

    pub fn order(&self) -> &BinRel {
        &self.order
    }

    pub fn table(&self) -> &[Option<usize>] {
        &self.table
    }

    pub fn app(&self, a: usize, b: usize) -> Option<usize> {
        self.table[a * self.size() + b]
    }
}

impl Opas for TableOpas {
    type Elem = usize;

    fn apply(&self, a: &usize, b: &usize, _steps: &mut u64) -> Eval<usize> {
        self.app(*a, *b).map_or(Eval::Undefined, Eval::Defined)
    }

    fn leq(&self, a: &usize, b: &usize, _steps: &mut u64) -> Option<bool> {
        Some(self.order.contains(*a, *b))
    }

    fn k(&self) -> Option<usize> {
        self.k
    }

    fn s(&self) -> Option<usize> {
        self.s
    }

    fn name(&self, e: &usize) -> String {
        self.carrier.name(*e).to_string()
    }

    fn elements(&self) -> Option<Vec<usize>> {
        Some((0..self.size()).collect())
    }

    fn sample(&self, rng: &mut dyn RngCore) -> usize {
        rng.gen_range(0..self.size())
    }
}

/// Closed combinatory-logic terms over `K` and `S`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Sk {
    K,
    S,
    App(SkTerm, SkTerm),
}

pub type SkTerm = Arc<Sk>;

pub fn sk_k() -> SkTerm {
    Arc::new(Sk::K)
}

pub fn sk_s() -> SkTerm {
    Arc::new(Sk::S)
}

pub fn sk_app(f: &SkTerm, a: &SkTerm) -> SkTerm {
    Arc::new(Sk::App(f.clone(), a.clone()))
}

/// `S K K`, the identity combinator.
pub fn sk_i() -> SkTerm {
    sk_app(&sk_app(&sk_s(), &sk_k()), &sk_k())
}

fn unwind(t: &SkTerm) -> (SkTerm, Vec<SkTerm>) {
    let mut args = Vec::new();
    let mut head = t.clone();
    while let Sk::App(f, a) = &*head {
        args.push(a.clone());
        let f = f.clone();
        head = f;
    }
    args.reverse();
    (head, args)
}

fn rebuild(head: SkTerm, args: impl IntoIterator<Item = SkTerm>) -> SkTerm {
    args.into_iter().fold(head, |f, a| sk_app(&f, &a))
}

/// Weak-head reduction; each contraction costs one step.
pub fn whnf(t: &SkTerm, steps: &mut u64) -> Eval<SkTerm> {
    let (mut head, mut args) = unwind(t);
    loop {
        let redex = match *head {
            Sk::K => args.len() >= 2,
            Sk::S => args.len() >= 3,
            Sk::App(..) => unreachable!("unwound head is a combinator"),
        };
        if !redex {
            return Eval::Defined(rebuild(head, args));
        }
        if *steps == 0 {
            return Eval::OutOfBudget;
        }
        *steps -= 1;
        let rest = match *head {
            Sk::K => {
                let rest = args.split_off(2);
                let (h, mut inner) = unwind(&args[0]);
                head = h;
                inner.extend(rest);
                inner
            }
            _ => {
                let rest = args.split_off(3);
                let (a, b, c) = (&args[0], &args[1], &args[2]);
                let (h, mut inner) = unwind(a);
                head = h;
                inner.push(c.clone());
                inner.push(sk_app(b, c));
                inner.extend(rest);
                inner
            }
        };
        args = rest;
    }
}

/// Full normal form by leftmost-outermost reduction.
pub fn normal_form(t: &SkTerm, steps: &mut u64) -> Eval<SkTerm> {
    let w = match whnf(t, steps) {
        Eval::Defined(w) => w,
        other => return other,
    };
    let (head, args) = unwind(&w);
    let mut out = Vec::with_capacity(args.len());
    for a in &args {
        match normal_form(a, steps) {
            Eval::Defined(v) => out.push(v),
            other => return other,
        }
    }
    Eval::Defined(rebuild(head, out))
}

impl fmt::Display for Sk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sk::K => write!(f, "K"),
            Sk::S => write!(f, "S"),
            Sk::App(g, a) => {
                write!(f, "{g} ")?;
                if matches!(**a, Sk::App(..)) {
                    write!(f, "({a})")
                } else {
                    write!(f, "{a}")
                }
            }
        }
    }
}

/// Parses a closed SK term such as `S (K K) K`.
pub fn parse_sk(src: &str) -> Result<SkTerm> {
    let t = parse_term(src, resolve_sk)?;
    term_to_sk(&t)
}

pub fn resolve_sk(name: &str) -> Option<SkTerm> {
    match name {
        "K" | "k" => Some(sk_k()),
        "S" | "s" => Some(sk_s()),
        _ => None,
    }
}

/// The SK term denoted by a closed polynomial, without evaluating it.
pub fn term_to_sk(t: &Term<SkTerm>) -> Result<SkTerm> {
    match t {
        Term::Var(v) => Err(Error::UnboundVariable(v.clone())),
        Term::Const(c) => Ok(c.clone()),
        Term::App(f, a) => Ok(sk_app(&term_to_sk(f)?, &term_to_sk(a)?)),
    }
}

/// Closed SK terms; application is weak-head reduction of `a b`, and the
/// order is equality, decided by comparing normal forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SkPca {
    /// Leaves of randomly sampled elements.
    pub sample_leaves: usize,
}

impl Default for SkPca {
    fn default() -> Self {
        SkPca { sample_leaves: 6 }
    }
}

/// A uniformly shaped random SK term with `leaves` combinators.
pub fn random_sk(rng: &mut dyn RngCore, leaves: usize) -> SkTerm {
    if leaves <= 1 {
        return if rng.gen_bool(0.5) { sk_k() } else { sk_s() };
    }
    let left = rng.gen_range(1..leaves);
    sk_app(&random_sk(rng, left), &random_sk(rng, leaves - left))
}

impl Opas for SkPca {
    type Elem = SkTerm;

    fn apply(&self, a: &SkTerm, b: &SkTerm, steps: &mut u64) -> Eval<SkTerm> {
        whnf(&sk_app(a, b), steps)
    }

    fn leq(&self, a: &SkTerm, b: &SkTerm, steps: &mut u64) -> Option<bool> {
        if a == b {
            return Some(true);
        }
        let x = normal_form(a, steps).defined()?;
        let y = normal_form(b, steps).defined()?;
        Some(x == y)
    }

    fn k(&self) -> Option<SkTerm> {
        Some(sk_k())
    }

    fn s(&self) -> Option<SkTerm> {
        Some(sk_s())
    }

    fn name(&self, e: &SkTerm) -> String {
        e.to_string()
    }

    fn elements(&self) -> Option<Vec<SkTerm>> {
        None
    }

    fn sample(&self, rng: &mut dyn RngCore) -> SkTerm {
        let leaves = rng.gen_range(1..=self.sample_leaves.max(1));
        random_sk(rng, leaves)
    }
}

/// A random polynomial of the given depth over `vars` with `K`/`S` constants.
pub fn random_polynomial(rng: &mut dyn RngCore, vars: &[&str], depth: usize) -> Term<SkTerm> {
    if depth == 0 || rng.gen_bool(0.25) {
        let pick = rng.gen_range(0..vars.len() + 2);
        return match pick {
            0 => Term::Const(sk_k()),
            1 => Term::Const(sk_s()),
            i => Term::var(vars[i - 2]),
        };
    }
    Term::app(
        random_polynomial(rng, vars, depth - 1),
        random_polynomial(rng, vars, depth - 1),
    )
}

/// The designated realizers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Filter<E> {
    Members(Vec<E>),
    All,
}

impl<E: PartialEq + Clone> Filter<E> {
    pub fn contains(&self, e: &E) -> bool {
        match self {
            Filter::Members(m) => m.contains(e),
            Filter::All => true,
        }
    }

    pub fn members(&self, all: Option<Vec<E>>) -> Option<Vec<E>> {
        match self {
            Filter::Members(m) => Some(m.clone()),
            Filter::All => all,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strength {
    Weak,
    Strong,
}

/// A relative PCA `(A, ·, A#)`.
#[derive(Debug, Clone)]
pub struct RelPca<O: Opas> {
    pub opas: O,
    pub filter: Filter<O::Elem>,
    pub strength: Strength,
}

/// Sampling parameters for infinite carriers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleConfig {
    pub samples: usize,
    pub seed: u64,
    pub budget: u64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            samples: 100,
            seed: 0,
            budget: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinatorReport {
    pub exhaustive: bool,
    pub probes: u64,
    pub inconclusive: u64,
    pub k_law: bool,
    pub s_defined: bool,
    pub s_law: bool,
    /// `s·a·b·c↓ ⇒ a·c·(b·c)↓` held on every decided probe.
    pub strong: bool,
    /// Filter axioms; `None` when the filter is not enumerable.
    pub filter_upward_closed: Option<bool>,
    pub filter_application_closed: Option<bool>,
    pub filter_contains_ks: bool,
    pub counterexample: Option<String>,
}

impl CombinatorReport {
    pub fn pass(&self, strength: Strength) -> bool {
        self.k_law
            && self.s_defined
            && self.s_law
            && (strength == Strength::Weak || self.strong)
            && self.filter_upward_closed != Some(false)
            && self.filter_application_closed != Some(false)
            && self.filter_contains_ks
    }
}

/// The `k`/`s` laws and filter axioms: exhaustive on finite carriers, sampled
/// otherwise.
pub fn check_combinators<O: Opas>(r: &RelPca<O>, cfg: &SampleConfig) -> CombinatorReport {
    let o = &r.opas;
    let all = o.elements();
    let exhaustive = all.is_some();
    let mut rep = CombinatorReport {
        exhaustive,
        probes: 0,
        inconclusive: 0,
        k_law: true,
        s_defined: true,
        s_law: true,
        strong: true,
        filter_upward_closed: None,
        filter_application_closed: None,
        filter_contains_ks: false,
        counterexample: None,
    };
    let (Some(k), Some(s)) = (o.k(), o.s()) else {
        rep.k_law = false;
        rep.s_defined = false;
        rep.s_law = false;
        rep.counterexample = Some("no designated k and s".into());
        return rep;
    };
    rep.filter_contains_ks = r.filter.contains(&k) && r.filter.contains(&s);
    let triples: Vec<[O::Elem; 3]> = match &all {
        Some(xs) => xs
            .iter()
            .flat_map(|a| xs.iter().flat_map(move |b| xs.iter().map(move |c| [a.clone(), b.clone(), c.clone()])))
            .collect(),
        None => {
            let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(cfg.seed);
            (0..cfg.samples)
                .map(|_| [o.sample(&mut rng), o.sample(&mut rng), o.sample(&mut rng)])
                .collect()
        }
    };
    let name = |x: &O::Elem| o.name(x);
    for [a, b, c] in &triples {
        rep.probes += 1;
        let budget = cfg.budget;
        let mut steps = budget;
        let fail = |rep: &mut CombinatorReport, what: String| {
            rep.counterexample.get_or_insert(what);
        };
        match apply_args(o, &k, &[a.clone(), b.clone()], &mut steps) {
            Eval::Defined(v) => match o.leq(&v, a, &mut steps) {
                Some(true) => {}
                Some(false) => {
                    rep.k_law = false;
                    fail(&mut rep, format!("k·{}·{} ≰ {}", name(a), name(b), name(a)));
                }
                None => rep.inconclusive += 1,
            },
            Eval::Undefined => {
                rep.k_law = false;
                fail(&mut rep, format!("k·{}·{} undefined", name(a), name(b)));
            }
            Eval::OutOfBudget => rep.inconclusive += 1,
        }
        let mut steps = budget;
        let sab = match apply_args(o, &s, &[a.clone(), b.clone()], &mut steps) {
            Eval::Defined(v) => Some(v),
            Eval::Undefined => {
                rep.s_defined = false;
                fail(&mut rep, format!("s·{}·{} undefined", name(a), name(b)));
                None
            }
            Eval::OutOfBudget => {
                rep.inconclusive += 1;
                None
            }
        };
        let Some(sab) = sab else { continue };
        let mut rsteps = budget;
        let rhs = match o.apply(a, c, &mut rsteps) {
            Eval::Defined(ac) => match o.apply(b, c, &mut rsteps) {
                Eval::Defined(bc) => o.apply(&ac, &bc, &mut rsteps),
                other => other,
            },
            other => other,
        };
        let mut lsteps = budget;
        let lhs = o.apply(&sab, c, &mut lsteps);
        let show = || format!("{}, {}, {}", name(a), name(b), name(c));
        match (&lhs, &rhs) {
            (_, Eval::Defined(rv)) => match &lhs {
                Eval::Defined(lv) => match o.leq(lv, rv, &mut lsteps) {
                    Some(true) => {}
                    Some(false) => {
                        rep.s_law = false;
                        fail(&mut rep, format!("s·a·b·c ≰ a·c·(b·c) at ({})", show()));
                    }
                    None => rep.inconclusive += 1,
                },
                Eval::Undefined => {
                    rep.s_law = false;
                    fail(&mut rep, format!("s·a·b·c undefined, a·c·(b·c) defined at ({})", show()));
                }
                Eval::OutOfBudget => rep.inconclusive += 1,
            },
            (Eval::Defined(_), Eval::Undefined) => rep.strong = false,
            (Eval::OutOfBudget, _) | (_, Eval::OutOfBudget) => rep.inconclusive += 1,
            _ => {}
        }
    }
    if let (Some(xs), Filter::Members(m)) = (&all, &r.filter) {
        let mut steps = cfg.budget;
        rep.filter_upward_closed = Some(m.iter().all(|a| {
            xs.iter()
                .all(|b| o.leq(a, b, &mut steps) != Some(true) || m.contains(b))
        }));
        rep.filter_application_closed = Some(m.iter().all(|a| {
            m.iter().all(|b| match o.apply(a, b, &mut steps) {
                Eval::Defined(v) => m.contains(&v),
                _ => true,
            })
        }));
        if rep.filter_upward_closed == Some(false) || rep.filter_application_closed == Some(false) {
            rep.counterexample.get_or_insert_with(|| "filter axioms fail".into());
        }
    }
    rep
}

/// The uniform preorder with basis `r_e = {(a, b) : e·a ≤ b}` for `e ∈ A#`.
pub fn rpca_to_dco(r: &RelPca<TableOpas>) -> Result<UniformPreorder> {
    let o = &r.opas;
    let n = o.size();
    let members = r
        .filter
        .members(o.elements())
        .ok_or_else(|| Error::Internal("finite filter expected".into()))?;
    let rels = members
        .iter()
        .map(|&e| {
            let mut rel = BinRel::empty(n, n);
            for a in 0..n {
                if let Some(v) = o.app(e, a) {
                    for b in 0..n {
                        if o.order().contains(v, b) {
                            rel.insert(a, b);
                        }
                    }
                }
            }
            NamedRel::new(format!("r_{}", o.carrier().name(e)), rel)
        })
        .collect();
    UniformPreorder::from_basis(Basis::new(o.carrier().clone(), rels)?, false)
}

/// The realizability order on subset-valued predicates: a realizer `e ∈ A#`
/// with `e·a ≤ b` for some `b ∈ ψ(i)`, for every `a ∈ φ(i)`.
pub fn realizer(r: &RelPca<TableOpas>, phi: &[u64], psi: &[u64]) -> Option<usize> {
    let o = &r.opas;
    let members = r.filter.members(o.elements())?;
    members.into_iter().find(|&e| {
        phi.iter().zip(psi).all(|(&p, &q)| {
            crate::relcore::bits(p).all(|a| {
                o.app(e, a)
                    .is_some_and(|v| crate::relcore::bits(q).any(|b| o.order().contains(v, b)))
            })
        })
    })
}

/// A weak relative PCA from a relationally complete cartesian DCO:
/// `a·b = @(a∧b)` and `A# = {a : {(⊤, a)} ∈ R}`, with `k`, `s` found by
/// exhaustive search in `A#`. The round trip through [`rpca_to_dco`] is
/// checked before returning.
pub fn dco_to_rpca(
    u: &UniformPreorder,
    w: &CartesianWitness,
    rc: &RelCompWitness,
) -> Result<RelPca<TableOpas>> {
    if let Some(g) = u.non_functional_generator() {
        return Err(Error::NotDco(g.name.clone()));
    }
    if !validate_witness(u, w, rc)? {
        return Err(Error::NotRelationallyComplete(
            "witness fails the defining implication".into(),
        ));
    }
    let n = u.size();
    let at = |m: usize| crate::relcore::bits(rc.at.row(m)).next();
    let table: Vec<Option<usize>> = (0..n * n).map(|ab| at(w.meet_of(ab / n, ab % n))).collect();
    let filter: Vec<usize> = (0..n)
        .filter(|&a| {
            let mut r = BinRel::empty(n, n);
            r.insert(w.top, a);
            u.has(&r)
        })
        .collect();
    let base = TableOpas::new(u.carrier().clone(), table.clone(), None, None, None)?;
    let mut steps = 0;
    let k = filter.iter().copied().find(|&k| {
        (0..n).all(|a| (0..n).all(|b| apply_args(&base, &k, &[a, b], &mut steps) == Eval::Defined(a)))
    });
    let s = filter.iter().copied().find(|&s| {
        (0..n).all(|a| {
            (0..n).all(|b| {
                base.app(s, a).and_then(|sa| base.app(sa, b)).is_some_and(|sab| {
                    (0..n).all(|c| {
                        let rhs = base
                            .app(a, c)
                            .and_then(|ac| base.app(b, c).and_then(|bc| base.app(ac, bc)));
                        rhs.is_none() || base.app(sab, c) == rhs
                    })
                })
            })
        })
    });
    let (Some(k), Some(s)) = (k, s) else {
        return Err(Error::KsSearchFailed);
    };
    let opas = TableOpas::new(u.carrier().clone(), table, None, Some(k), Some(s))?;
    let r = RelPca {
        opas,
        filter: Filter::Members(filter),
        strength: Strength::Weak,
    };
    if !rpca_to_dco(&r)?.same_relations(u) {
        return Err(Error::Internal("round trip changed the uniform preorder".into()));
    }
    Ok(r)
}

/// Whether `ā ↦ p[ā]` lies in `R^(n)`, for a polynomial with coefficients in
/// `A#` over the bridge structure.
pub fn polynomial_in_rn_check(
    u: &UniformPreorder,
    w: &CartesianWitness,
    bridge: &RelPca<TableOpas>,
    p: &Term<usize>,
    vars: &[&str],
) -> Result<bool> {
    for c in p.constants() {
        if !bridge.filter.contains(&c) {
            return Err(Error::CoefficientOutsideFilter(bridge.opas.name(&c)));
        }
    }
    let nx = nary(u, w, vars.len())?;
    let n = u.size();
    let tuples = n.pow(vars.len() as u32);
    let mut r = BinRel::empty(tuples, n);
    for code in 0..tuples {
        let args = nx.decode(code);
        let env: HashMap<String, usize> = vars.iter().map(|v| v.to_string()).zip(args).collect();
        if let Eval::Defined(v) = eval_term(&bridge.opas, p, &env, 0)? {
            r.insert(code, v);
        }
    }
    Ok(nx.in_rn(&r)?.is_some())
}

/// Outcome of a budgeted realizer search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Realized {
    Found(SkTerm),
    /// No realizer among the candidates tried within budget.
    Unknown,
}

/// Realizability order of `fam(D)` over the SK instance, as a semi-decision:
/// candidate realizers are `S K K` followed by all terms by increasing size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SkRealizability {
    pub budget: u64,
    pub max_candidates: usize,
}

impl Default for SkRealizability {
    fn default() -> Self {
        SkRealizability {
            budget: 10_000,
            max_candidates: 2_000,
        }
    }
}

/// All SK terms with exactly `leaves` combinators.
pub fn sk_terms(leaves: usize) -> Vec<SkTerm> {
    if leaves == 1 {
        return vec![sk_k(), sk_s()];
    }
    let mut out = Vec::new();
    for l in 1..leaves {
        let lefts = sk_terms(l);
        let rights = sk_terms(leaves - l);
        for f in &lefts {
            for a in &rights {
                out.push(sk_app(f, a));
            }
        }
    }
    out
}

impl SkRealizability {
    fn realizes(&self, e: &SkTerm, phi: &[Vec<SkTerm>], psi: &[Vec<SkTerm>]) -> bool {
        let o = SkPca::default();
        phi.iter().zip(psi).all(|(ps, qs)| {
            ps.iter().all(|a| {
                let mut steps = self.budget;
                match o.apply(e, a, &mut steps) {
                    Eval::Defined(v) => qs.iter().any(|b| o.leq(&v, b, &mut steps) == Some(true)),
                    _ => false,
                }
            })
        })
    }

    pub fn fiber_leq(&self, phi: &[Vec<SkTerm>], psi: &[Vec<SkTerm>]) -> Result<Realized> {
        if phi.len() != psi.len() {
            return Err(Error::CarrierMismatch("predicates over different index sets".into()));
        }
        let first = std::iter::once(sk_i());
        let rest = (1..).flat_map(sk_terms);
        for e in first.chain(rest).take(self.max_candidates) {
            if self.realizes(&e, phi, psi) {
                return Ok(Realized::Found(e));
            }
        }
        Ok(Realized::Unknown)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartesian::search_cartesian;
    use crate::relcomplete::check_relational_completeness;
    use crate::testutil::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sk(src: &str) -> SkTerm {
        parse_sk(src).unwrap()
    }

    fn singleton() -> RelPca<TableOpas> {
        let o = TableOpas::new(Carrier::new(["*"]).unwrap(), vec![Some(0)], None, Some(0), Some(0)).unwrap();
        RelPca {
            opas: o,
            filter: Filter::Members(vec![0]),
            strength: Strength::Strong,
        }
    }

    #[test]
    fn sk_reduction() {
        let o = SkPca::default();
        let none = HashMap::new();
        let t = parse_term("K S K", resolve_sk).unwrap();
        assert_eq!(eval_term(&o, &t, &none, 2).unwrap(), Eval::Defined(sk_s()));
        let t = parse_term("S K K (K S)", resolve_sk).unwrap();
        assert_eq!(eval_term(&o, &t, &none, 100).unwrap(), Eval::Defined(sk("K S")));
        let t = parse_term("K S K", resolve_sk).unwrap();
        assert_eq!(eval_term(&o, &t, &none, 0).unwrap(), Eval::OutOfBudget);
        let omega = sk("S (S K K) (S K K) (S (S K K) (S K K))");
        assert_eq!(whnf(&omega, &mut 500), Eval::OutOfBudget);
        assert_eq!(sk("S (K K) K").to_string(), "S (K K) K");
    }

    #[test]
    fn eval_needs_bound_variables() {
        let t: Term<SkTerm> = parse_term("K x", resolve_sk).unwrap();
        assert!(matches!(
            eval_term(&SkPca::default(), &t, &HashMap::new(), 10),
            Err(Error::UnboundVariable(v)) if v == "x"
        ));
        assert!(parse_sk("(K").is_err());
        assert!(parse_sk("K)").is_err());
        assert!(parse_sk("").is_err());
    }

    #[test]
    fn abstraction_examples() {
        let o = SkPca::default();
        let x = Term::var("x");
        let e = bracket_abstract(&o, &x, &["x"]).unwrap();
        assert_eq!(term_to_sk(&e).unwrap(), sk_i());
        let c = Term::Const(sk("S K"));
        let e = bracket_abstract(&o, &c, &["x"]).unwrap();
        assert_eq!(term_to_sk(&e).unwrap(), sk("K (S K)"));
        let e = bracket_abstract(&o, &x, &["x", "y"]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let samples: Vec<Vec<SkTerm>> = (0..20).map(|_| vec![o.sample(&mut rng), o.sample(&mut rng)]).collect();
        let r = check_abstraction(&o, &x, &["x", "y"], &e, &samples, 10_000).unwrap();
        assert_eq!(r.violations, 0);
        assert_eq!(r.probes, 20);
        let t = TableOpas::new(Carrier::indexed(1), vec![Some(0)], None, None, None).unwrap();
        assert!(matches!(bracket_abstract(&t, &Term::var("x"), &["x"]), Err(Error::MissingCombinators)));
    }

    #[test]
    fn combinator_examples() {
        let r = singleton();
        let rep = check_combinators(&r, &SampleConfig::default());
        assert!(rep.pass(Strength::Strong), "{rep:?}");
        assert!(rep.strong);
        let sk = RelPca {
            opas: SkPca::default(),
            filter: Filter::All,
            strength: Strength::Strong,
        };
        let rep = check_combinators(&sk, &SampleConfig::default());
        assert!(rep.pass(Strength::Strong), "{rep:?}");
        assert_eq!(rep.probes, 100);
        // k·a·b = b on two points.
        let table = vec![Some(1), Some(1), Some(0), Some(1)];
        let o = TableOpas::new(Carrier::indexed(2), table, None, Some(0), Some(0)).unwrap();
        let bad = RelPca {
            opas: o,
            filter: Filter::Members(vec![0, 1]),
            strength: Strength::Weak,
        };
        let rep = check_combinators(&bad, &SampleConfig::default());
        assert!(!rep.k_law);
        assert!(rep.counterexample.unwrap().starts_with("k·"));
    }

    #[test]
    fn bridge_examples() {
        let one = crate::uord::UniformPreorder::discrete(Carrier::indexed(1));
        let w = search_cartesian(&one).unwrap().unwrap();
        let rc = check_relational_completeness(&one, &w).unwrap().unwrap();
        let r = dco_to_rpca(&one, &w, &rc).unwrap();
        assert_eq!(r.filter, Filter::Members(vec![0]));
        let back = rpca_to_dco(&r).unwrap();
        assert!(back.same_relations(&one));
        assert_eq!(realizer(&r, &[1], &[1]), Some(0));
        assert!(rpca_to_dco(&singleton()).unwrap().same_relations(&one));
        let x = Term::var("x");
        assert!(polynomial_in_rn_check(&one, &w, &r, &x, &["x"]).unwrap());
        assert!(polynomial_in_rn_check(&one, &w, &r, &Term::Const(0), &[]).unwrap());

        let c2 = chain(2);
        let w2 = search_cartesian(&c2).unwrap().unwrap();
        let rc2 = check_relational_completeness(&c2, &w2).unwrap().unwrap();
        assert!(matches!(dco_to_rpca(&c2, &w2, &rc2), Err(Error::NotDco(_))));
    }

    #[test]
    fn coefficient_outside_filter() {
        let o = TableOpas::new(Carrier::indexed(2), vec![Some(0); 4], None, Some(0), Some(0)).unwrap();
        let r = RelPca {
            opas: o,
            filter: Filter::Members(vec![0]),
            strength: Strength::Weak,
        };
        let u = chain(2);
        let w = search_cartesian(&u).unwrap().unwrap();
        assert!(matches!(
            polynomial_in_rn_check(&u, &w, &r, &Term::Const(1), &[]),
            Err(Error::CoefficientOutsideFilter(_))
        ));
    }

    #[test]
    fn sk_realizer_for_identity() {
        let h = SkRealizability::default();
        let r = h.fiber_leq(&[vec![sk_k()]], &[vec![sk_k()]]).unwrap();
        assert_eq!(r, Realized::Found(sk_i()));
        assert_eq!(sk_terms(2).len(), 4);
        assert_eq!(sk_terms(3).len(), 16);
    }

    #[test]
    fn budget_monotone_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let t = random_sk(&mut rng, 9);
            let mut last: Option<SkTerm> = None;
            for b in [0u64, 1, 2, 4, 8, 16, 64, 256] {
                let mut steps = b;
                match whnf(&t, &mut steps) {
                    Eval::Defined(v) => {
                        if let Some(l) = &last {
                            assert_eq!(l, &v);
                        }
                        last = Some(v);
                    }
                    Eval::OutOfBudget => assert!(last.is_none()),
                    Eval::Undefined => unreachable!(),
                }
            }
        }
    }
}
