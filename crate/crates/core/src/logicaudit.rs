//! Bounded-universe audits of indexed-preorder laws.
//!
//! An indexed preorder is presented by a [`FiberOracle`]: predicates over an
//! index set `{0, …, k-1}` are value vectors of length `k`, compared by
//! [`FiberOracle::leq`] and reindexed by precomposition. The auditor
//! enumerates every fiber with `k ≤ max_index_size`, quotients it by
//! isomorphism, and computes meets, quantifiers and implications by brute
//! force on the quotient. Each law is then checked on every instance in a
//! fixed order, and the first failing instance is reported.
//!
//! A passing audit means "no counterexample within the bounds"; a failing
//! one is definitive.

use std::collections::HashMap;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use crate::cartesian::CartesianWitness;
use crate::dcompletion::{DCompletion, DPredicate};
use crate::error::{Error, Result};
use crate::relcore::{bits, FunTable};
use crate::uord::UniformPreorder;

/// An indexed preorder over finite index sets.
pub trait FiberOracle: Sync {
    /// Number of values a predicate can take at each index.
    fn carrier_size(&self) -> usize;

    fn element_name(&self, x: usize) -> String {
        x.to_string()
    }

    /// The fiber order on predicates over a common index set.
    fn leq(&self, phi: &[usize], psi: &[usize]) -> bool;

    fn reindex(&self, u: &FunTable, phi: &[usize]) -> Vec<usize> {
        u.values().iter().map(|&i| phi[i]).collect()
    }

    /// A closed-form `∃_u`, if the structure provides one.
    fn exists(&self, _u: &FunTable, _phi: &[usize]) -> Option<Vec<usize>> {
        None
    }

    /// A pointwise binary meet, if the structure provides one.
    fn meet(&self, _a: usize, _b: usize) -> Option<usize> {
        None
    }

    /// The value of the pointwise top predicate, if any.
    fn top(&self) -> Option<usize> {
        None
    }
}

/// `fam(A, R)` of a uniform preorder, optionally with its cartesian tables and
/// the union quantifier of a D-completion.
#[derive(Debug, Clone)]
pub struct FamOracle {
    uord: UniformPreorder,
    /// Bit `g` of entry `a * |A| + b` is set when generator `g` contains `(a, b)`.
    masks: Option<Vec<u64>>,
    meet: Option<FunTable>,
    top: Option<usize>,
    union_exists: bool,
}

impl FamOracle {
    pub fn new(u: &UniformPreorder) -> Self {
        let n = u.size();
        let gens = u.generators();
        let masks = (gens.len() <= 64).then(|| {
            let mut m = vec![0u64; n * n];
            for (gi, g) in gens.iter().enumerate() {
                for (a, b) in g.rel.pairs() {
                    m[a * n + b] |= 1 << gi;
                }
            }
            m
        });
        FamOracle {
            uord: u.clone(),
            masks,
            meet: None,
            top: None,
            union_exists: false,
        }
    }

    /// Exposes `(∧, ⊤)` as pointwise constructors.
    pub fn with_meets(mut self, w: &CartesianWitness) -> Self {
        self.meet = Some(w.meet.clone());
        self.top = Some(w.top);
        self
    }

    /// `fam(D(A, R))`, with unions as the closed-form existential.
    pub fn of_dcompletion(d: &DCompletion) -> Self {
        let mut o = FamOracle::new(d.lifted());
        o.union_exists = true;
        o
    }

    pub fn uord(&self) -> &UniformPreorder {
        &self.uord
    }
}

impl FiberOracle for FamOracle {
    fn carrier_size(&self) -> usize {
        self.uord.size()
    }

    fn element_name(&self, x: usize) -> String {
        self.uord.carrier().name(x).to_string()
    }

    fn leq(&self, phi: &[usize], psi: &[usize]) -> bool {
        let n = self.uord.size();
        match &self.masks {
            Some(masks) => {
                let mut acc = u64::MAX;
                for (&a, &b) in phi.iter().zip(psi) {
                    acc &= masks[a * n + b];
                    if acc == 0 {
                        return false;
                    }
                }
                true
            }
            None => self.uord.generators().iter().any(|g| {
                phi.iter().zip(psi).all(|(&a, &b)| g.rel.contains(a, b))
            }),
        }
    }

    fn exists(&self, u: &FunTable, phi: &[usize]) -> Option<Vec<usize>> {
        if !self.union_exists {
            return None;
        }
        let mut out = vec![0usize; u.target()];
        for (j, &i) in u.values().iter().enumerate() {
            out[i] |= phi[j];
        }
        Some(out)
    }

    fn meet(&self, a: usize, b: usize) -> Option<usize> {
        let n = self.uord.size();
        self.meet.as_ref().map(|m| m.apply(a * n + b))
    }

    fn top(&self) -> Option<usize> {
        self.top
    }
}

/// Bounds of the audited universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniverseConfig {
    pub max_index_size: usize,
    /// Largest fiber (number of predicates) that may be enumerated.
    pub enumeration_cap: u64,
    /// Reserved for sampled audits; exact enumeration ignores it.
    pub sample_seed: u64,
}

impl Default for UniverseConfig {
    fn default() -> Self {
        UniverseConfig {
            max_index_size: 3,
            enumeration_cap: 65536,
            sample_seed: 0,
        }
    }
}

/// A concrete failing instance of a law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub law: String,
    /// Index size of the fiber, for laws about a single fiber.
    pub index_size: Option<usize>,
    pub maps: Vec<FunTable>,
    pub predicates: Vec<Vec<usize>>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawResult {
    pub law: String,
    pub pass: bool,
    /// A prerequisite law failed; nothing was checked.
    pub skipped: bool,
    pub checked: u64,
    pub counterexample: Option<Counterexample>,
    pub note: Option<String>,
}

impl LawResult {
    fn skipped(law: &str, why: &str) -> Self {
        LawResult {
            law: law.into(),
            pass: false,
            skipped: true,
            checked: 0,
            counterexample: None,
            note: Some(why.into()),
        }
    }

    fn noted(law: &str, note: &str) -> Self {
        LawResult {
            law: law.into(),
            pass: true,
            skipped: false,
            checked: 0,
            counterexample: None,
            note: Some(note.into()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub results: Vec<LawResult>,
}

impl AuditReport {
    /// True when every law was checked and passed.
    pub fn pass(&self) -> bool {
        self.results.iter().all(|r| r.pass && !r.skipped)
    }

    pub fn law(&self, name: &str) -> Option<&LawResult> {
        self.results.iter().find(|r| r.law == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LawResult> {
        self.results.iter().filter(|r| !r.pass)
    }

    fn extend(&mut self, other: AuditReport) {
        self.results.extend(other.results);
    }
}

/// One fiber quotiented by isomorphism.
struct Fiber {
    class_of: Vec<u32>,
    reps: Vec<usize>,
    up: Vec<FixedBitSet>,
    down: Vec<FixedBitSet>,
}

impl Fiber {
    fn build(oracle: &dyn FiberOracle, m: usize, k: usize) -> Fiber {
        let count = m.pow(k as u32);
        let vals: Vec<Vec<usize>> = (0..count).map(|c| decode(c, m, k)).collect();
        let rows: Vec<FixedBitSet> = (0..count)
            .into_par_iter()
            .map(|p| {
                let mut row = FixedBitSet::with_capacity(count);
                for q in 0..count {
                    if oracle.leq(&vals[p], &vals[q]) {
                        row.insert(q);
                    }
                }
                row
            })
            .collect();
        let mut index: HashMap<&FixedBitSet, u32> = HashMap::new();
        let mut class_of = Vec::with_capacity(count);
        let mut reps = Vec::new();
        for (p, row) in rows.iter().enumerate() {
            let next = reps.len() as u32;
            let c = *index.entry(row).or_insert(next);
            if c == next {
                reps.push(p);
            }
            class_of.push(c);
        }
        let nc = reps.len();
        let mut up = vec![FixedBitSet::with_capacity(nc); nc];
        let mut down = vec![FixedBitSet::with_capacity(nc); nc];
        for (c, &p) in reps.iter().enumerate() {
            for (d, &q) in reps.iter().enumerate() {
                if rows[p].contains(q) {
                    up[c].insert(d);
                    down[d].insert(c);
                }
            }
        }
        Fiber {
            class_of,
            reps,
            up,
            down,
        }
    }

    fn classes(&self) -> usize {
        self.reps.len()
    }

    fn leq(&self, a: u32, b: u32) -> bool {
        self.up[a as usize].contains(b as usize)
    }

    /// The greatest member of `cands`, if there is one.
    fn greatest(&self, cands: &FixedBitSet) -> Option<u32> {
        let mut it = cands.ones();
        let mut best = it.next()? as u32;
        for c in it {
            if self.leq(best, c as u32) {
                best = c as u32;
            }
        }
        cands.is_subset(&self.down[best as usize]).then_some(best)
    }

    /// The least member of `cands`, if there is one.
    fn least(&self, cands: &FixedBitSet) -> Option<u32> {
        let mut it = cands.ones();
        let mut best = it.next()? as u32;
        for c in it {
            if self.leq(c as u32, best) {
                best = c as u32;
            }
        }
        cands.is_subset(&self.up[best as usize]).then_some(best)
    }
}

fn decode(mut code: usize, m: usize, k: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for slot in out.iter_mut().rev() {
        *slot = code % m;
        code /= m;
    }
    out
}

fn encode(vals: &[usize], m: usize) -> usize {
    vals.iter().fold(0, |acc, &v| acc * m + v)
}

/// All maps `J → I` with `|I|, |J| ≤ bound`, ordered by `|J| + |I|`, then
/// `|J|`, then lexicographically.
fn all_maps(bound: usize) -> Vec<FunTable> {
    let mut sizes: Vec<(usize, usize)> = (0..=bound)
        .flat_map(|j| (0..=bound).map(move |i| (j, i)))
        .collect();
    sizes.sort_by_key(|&(j, i)| (j + i, j));
    let mut out = Vec::new();
    for (j, i) in sizes {
        out.extend(maps_between(j, i));
    }
    out
}

/// Maps `{0..j} → {0..i}` in lexicographic order.
pub fn maps_between(j: usize, i: usize) -> Vec<FunTable> {
    if i == 0 {
        return if j == 0 {
            vec![FunTable::identity(0)]
        } else {
            Vec::new()
        };
    }
    (0..i.pow(j as u32))
        .map(|c| FunTable::new(i, decode(c, i, j)).expect("values in range"))
        .collect()
}

/// Surjections `{0..k} ↠ {0..j}` in lexicographic order.
pub fn surjections(k: usize, j: usize) -> Vec<FunTable> {
    maps_between(k, j)
        .into_iter()
        .filter(|e| e.is_surjective())
        .collect()
}

/// The pullback of `u: J → I` and `v: K → I`: the set
/// `L = {(j, k) : u(j) = v(k)}` in lexicographic order with its projections
/// `v̄: L → J` and `ū: L → K`.
pub fn pullback(u: &FunTable, v: &FunTable) -> (FunTable, FunTable) {
    let mut vbar = Vec::new();
    let mut ubar = Vec::new();
    for j in 0..u.source() {
        for k in 0..v.source() {
            if u.apply(j) == v.apply(k) {
                vbar.push(j);
                ubar.push(k);
            }
        }
    }
    (
        FunTable::new(u.source(), vbar).expect("projection in range"),
        FunTable::new(v.source(), ubar).expect("projection in range"),
    )
}

/// `∀_u(φ ⇒ ψ)` as a closed-form constructor: takes `u: J → I` and the
/// values of `φ, ψ` over `J`, and returns the values over `I`.
pub type ForallConstructor<'a> = dyn Fn(&FunTable, &[usize], &[usize]) -> Vec<usize> + Sync + 'a;

#[derive(Default)]
struct Tables {
    top: OnceLock<Vec<Option<u32>>>,
    glb: OnceLock<Vec<Vec<Option<u32>>>>,
    exists: OnceLock<Vec<Vec<Option<u32>>>>,
    forall: OnceLock<Vec<Vec<Option<u32>>>>,
    implication: OnceLock<Vec<Vec<Option<u32>>>>,
}

/// A law instance at class level: fiber size, map indices and predicates.
#[derive(Debug, Clone)]
struct Inst {
    k: Option<usize>,
    maps: Vec<usize>,
    preds: Vec<(usize, u32)>,
}

/// A bounded universe over one oracle, shared by all audits.
pub struct Auditor<'a> {
    oracle: &'a dyn FiberOracle,
    cfg: UniverseConfig,
    m: usize,
    fibers: Vec<Fiber>,
    maps: Vec<FunTable>,
    map_index: HashMap<FunTable, usize>,
    /// Per map `u: J → I`: class over `I` ↦ class of `u*` over `J`.
    reindex: Vec<Vec<u32>>,
    tables: Tables,
}

impl<'a> Auditor<'a> {
    pub fn new(oracle: &'a dyn FiberOracle, cfg: UniverseConfig) -> Result<Self> {
        let m = oracle.carrier_size();
        let bound = cfg.max_index_size;
        let largest = (m as u128).checked_pow(bound as u32).unwrap_or(u128::MAX);
        if largest > cfg.enumeration_cap as u128 {
            return Err(Error::EnumerationCapExceeded {
                size: largest,
                cap: cfg.enumeration_cap as u128,
            });
        }
        let fibers: Vec<Fiber> = (0..=bound).map(|k| Fiber::build(oracle, m, k)).collect();
        let maps = all_maps(bound);
        let map_index = maps.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
        let reindex = maps
            .iter()
            .map(|u| {
                let (fi, fj) = (&fibers[u.target()], &fibers[u.source()]);
                fi.reps
                    .iter()
                    .map(|&code| {
                        let vals = oracle.reindex(u, &decode(code, m, u.target()));
                        fj.class_of[encode(&vals, m)]
                    })
                    .collect()
            })
            .collect();
        Ok(Auditor {
            oracle,
            cfg,
            m,
            fibers,
            maps,
            map_index,
            reindex,
            tables: Tables::default(),
        })
    }

    pub fn config(&self) -> UniverseConfig {
        self.cfg
    }

    /// Number of isomorphism classes of predicates over `k`.
    pub fn fiber_classes(&self, k: usize) -> usize {
        self.fibers[k].classes()
    }

    /// Representative value vectors of the classes over `k`, in order.
    pub fn class_representatives(&self, k: usize) -> Vec<Vec<usize>> {
        self.fibers[k]
            .reps
            .iter()
            .map(|&c| decode(c, self.m, k))
            .collect()
    }

    /// Whether class `a` lies below class `b` in the fiber over `k`.
    pub fn class_leq(&self, k: usize, a: usize, b: usize) -> bool {
        self.fibers[k].leq(a as u32, b as u32)
    }

    /// Class of a predicate given by its values.
    pub fn class_of(&self, vals: &[usize]) -> Result<u32> {
        let k = vals.len();
        if k > self.cfg.max_index_size || vals.iter().any(|&v| v >= self.m) {
            return Err(Error::CarrierMismatch(format!(
                "predicate over {k} outside the audited universe"
            )));
        }
        Ok(self.fibers[k].class_of[encode(vals, self.m)])
    }

    fn vals(&self, k: usize, c: u32) -> Vec<usize> {
        decode(self.fibers[k].reps[c as usize], self.m, k)
    }

    fn ri(&self, u: usize, c: u32) -> u32 {
        self.reindex[u][c as usize]
    }

    fn src(&self, u: usize) -> usize {
        self.maps[u].source()
    }

    fn tgt(&self, u: usize) -> usize {
        self.maps[u].target()
    }

    fn all_classes(&self, k: usize) -> FixedBitSet {
        let n = self.fibers[k].classes();
        let mut s = FixedBitSet::with_capacity(n);
        s.insert_range(..);
        s
    }

    fn top_table(&self) -> &Vec<Option<u32>> {
        self.tables.top.get_or_init(|| {
            self.fibers
                .iter()
                .enumerate()
                .map(|(k, f)| f.greatest(&self.all_classes(k)))
                .collect()
        })
    }

    fn glb_table(&self) -> &Vec<Vec<Option<u32>>> {
        self.tables.glb.get_or_init(|| {
            self.fibers
                .iter()
                .map(|f| {
                    let n = f.classes();
                    (0..n * n)
                        .into_par_iter()
                        .map(|ab| {
                            let mut l = f.down[ab / n].clone();
                            l.intersect_with(&f.down[ab % n]);
                            f.greatest(&l)
                        })
                        .collect()
                })
                .collect()
        })
    }

    fn glb(&self, k: usize, a: u32, b: u32) -> Option<u32> {
        let n = self.fibers[k].classes();
        self.glb_table()[k][a as usize * n + b as usize]
    }

    fn exists_table(&self) -> &Vec<Vec<Option<u32>>> {
        self.tables.exists.get_or_init(|| {
            (0..self.maps.len())
                .into_par_iter()
                .map(|u| {
                    let (fi, fj) = (&self.fibers[self.tgt(u)], &self.fibers[self.src(u)]);
                    (0..fj.classes() as u32)
                        .map(|phi| {
                            let mut c = FixedBitSet::with_capacity(fi.classes());
                            for xi in 0..fi.classes() as u32 {
                                if fj.leq(phi, self.ri(u, xi)) {
                                    c.insert(xi as usize);
                                }
                            }
                            fi.least(&c)
                        })
                        .collect()
                })
                .collect()
        })
    }

    fn forall_table(&self) -> &Vec<Vec<Option<u32>>> {
        self.tables.forall.get_or_init(|| {
            (0..self.maps.len())
                .into_par_iter()
                .map(|u| {
                    let (fi, fj) = (&self.fibers[self.tgt(u)], &self.fibers[self.src(u)]);
                    (0..fj.classes() as u32)
                        .map(|phi| {
                            let mut c = FixedBitSet::with_capacity(fi.classes());
                            for xi in 0..fi.classes() as u32 {
                                if fj.leq(self.ri(u, xi), phi) {
                                    c.insert(xi as usize);
                                }
                            }
                            fi.greatest(&c)
                        })
                        .collect()
                })
                .collect()
        })
    }

    /// `φ ⇒ ψ` per fiber; requires all binary meets.
    fn implication_table(&self) -> &Vec<Vec<Option<u32>>> {
        self.tables.implication.get_or_init(|| {
            self.fibers
                .iter()
                .enumerate()
                .map(|(k, f)| {
                    let n = f.classes();
                    (0..n * n)
                        .into_par_iter()
                        .map(|pq| {
                            let (phi, psi) = ((pq / n) as u32, (pq % n) as u32);
                            let mut c = FixedBitSet::with_capacity(n);
                            for xi in 0..n as u32 {
                                if let Some(m) = self.glb(k, xi, phi) {
                                    if f.leq(m, psi) {
                                        c.insert(xi as usize);
                                    }
                                }
                            }
                            f.greatest(&c)
                        })
                        .collect()
                })
                .collect()
        })
    }

    /// Runs `holds` over instances in order; the first failure becomes the
    /// counterexample.
    fn run_law(
        &self,
        law: &str,
        insts: Vec<Inst>,
        holds: impl Fn(&Inst) -> bool + Sync,
    ) -> LawResult {
        let failure = insts.par_iter().position_first(|i| !holds(i));
        LawResult {
            law: law.into(),
            pass: failure.is_none(),
            skipped: false,
            checked: insts.len() as u64,
            counterexample: failure.map(|p| self.counterexample(law, &insts[p])),
            note: None,
        }
    }

    fn counterexample(&self, law: &str, inst: &Inst) -> Counterexample {
        let predicates: Vec<Vec<usize>> = inst.preds.iter().map(|&(k, c)| self.vals(k, c)).collect();
        let rendered: Vec<String> = predicates
            .iter()
            .map(|p| {
                let names: Vec<_> = p.iter().map(|&x| self.oracle.element_name(x)).collect();
                format!("({})", names.join(", "))
            })
            .collect();
        Counterexample {
            law: law.into(),
            index_size: inst.k,
            maps: inst.maps.iter().map(|&u| self.maps[u].clone()).collect(),
            predicates,
            note: rendered.join(" "),
        }
    }

    fn fiber_insts(&self, arity: usize) -> Vec<Inst> {
        let mut out = Vec::new();
        for k in 0..=self.cfg.max_index_size {
            let n = self.fibers[k].classes() as u32;
            match arity {
                0 => out.push(Inst {
                    k: Some(k),
                    maps: vec![],
                    preds: vec![],
                }),
                1 => out.extend((0..n).map(|a| Inst {
                    k: Some(k),
                    maps: vec![],
                    preds: vec![(k, a)],
                })),
                _ => {
                    for a in 0..n {
                        for b in 0..n {
                            out.push(Inst {
                                k: Some(k),
                                maps: vec![],
                                preds: vec![(k, a), (k, b)],
                            });
                        }
                    }
                }
            }
        }
        out
    }

    /// Instances `(u, φ…)` with predicates over the target (`on_target`) or
    /// the source of `u`.
    fn map_insts(&self, arity: usize, on_target: bool) -> Vec<Inst> {
        let mut out = Vec::new();
        for u in 0..self.maps.len() {
            let k = if on_target { self.tgt(u) } else { self.src(u) };
            let n = self.fibers[k].classes() as u32;
            if arity == 1 {
                out.extend((0..n).map(|a| Inst {
                    k: None,
                    maps: vec![u],
                    preds: vec![(k, a)],
                }));
            } else {
                for a in 0..n {
                    for b in 0..n {
                        out.push(Inst {
                            k: None,
                            maps: vec![u],
                            preds: vec![(k, a), (k, b)],
                        });
                    }
                }
            }
        }
        out
    }

    /// Squares `(u: J → I, v: K → I, v̄, ū)` whose pullback fits the bound,
    /// with one predicate over `K`.
    fn square_insts(&self) -> Vec<Inst> {
        let mut out = Vec::new();
        for u in 0..self.maps.len() {
            for v in 0..self.maps.len() {
                if self.tgt(u) != self.tgt(v) {
                    continue;
                }
                let (vbar, ubar) = pullback(&self.maps[u], &self.maps[v]);
                let (Some(&vb), Some(&ub)) = (self.map_index.get(&vbar), self.map_index.get(&ubar))
                else {
                    continue;
                };
                let k = self.src(v);
                for a in 0..self.fibers[k].classes() as u32 {
                    out.push(Inst {
                        k: None,
                        maps: vec![u, v, vb, ub],
                        preds: vec![(k, a)],
                    });
                }
            }
        }
        out
    }

    /// Finite meets per fiber, their stability under reindexing, and agreement
    /// with the oracle's pointwise constructors.
    pub fn meets(&self) -> AuditReport {
        let mut report = AuditReport::default();
        report.results.push(self.law("meets.top", self.fiber_insts(0), None));
        report.results.push(self.law("meets.glb", self.fiber_insts(2), None));
        let mut stable = self.map_insts(2, true);
        stable.extend((0..self.maps.len()).map(|u| Inst {
            k: None,
            maps: vec![u],
            preds: vec![],
        }));
        report.results.push(self.law("meets.stable", stable, None));
        if self.oracle.meet(0, 0).is_some() || (self.m == 0 && self.oracle.top().is_some()) {
            let mut insts = self.fiber_insts(0);
            insts.extend(self.fiber_insts(2));
            report.results.push(self.law("meets.constructor", insts, None));
        }
        report
    }

    fn law(&self, law: &str, insts: Vec<Inst>, ctor: Option<&ForallConstructor<'_>>) -> LawResult {
        self.run_law(law, insts, |i| self.single(law, i, ctor))
    }

    fn meets_pass(&self) -> bool {
        self.top_table().iter().all(Option::is_some)
            && self.glb_table().iter().all(|t| t.iter().all(Option::is_some))
    }

    /// Left adjoints to reindexing, Beck–Chevalley and, when meets exist,
    /// Frobenius.
    pub fn exists(&self) -> AuditReport {
        let mut report = AuditReport::default();
        let adjoint = self.law("exists.adjoint", self.map_insts(1, false), None);
        let adjoint_ok = adjoint.pass;
        report.results.push(adjoint);
        if self.oracle.exists(&FunTable::identity(0), &[]).is_some() {
            report
                .results
                .push(self.law("exists.constructor", self.map_insts(1, false), None));
        }
        if !adjoint_ok {
            report.results.push(LawResult::skipped("exists.beck_chevalley", "exists.adjoint failed"));
            report.results.push(LawResult::skipped("exists.frobenius", "exists.adjoint failed"));
            return report;
        }
        report
            .results
            .push(self.law("exists.beck_chevalley", self.square_insts(), None));
        if !self.meets_pass() {
            report.results.push(LawResult::skipped("exists.frobenius", "meets failed"));
            return report;
        }
        let mut frob = Vec::new();
        for u in 0..self.maps.len() {
            let (ki, kj) = (self.tgt(u), self.src(u));
            for a in 0..self.fibers[ki].classes() as u32 {
                for b in 0..self.fibers[kj].classes() as u32 {
                    frob.push(Inst {
                        k: None,
                        maps: vec![u],
                        preds: vec![(ki, a), (kj, b)],
                    });
                }
            }
        }
        report.results.push(self.law("exists.frobenius", frob, None));
        report
    }

    /// Heyting implication, right adjoints to reindexing, their stability and,
    /// optionally, agreement of a closed-form `∀_u(φ ⇒ ψ)` with brute force on
    /// index sets of size at most `constructor_bound`.
    pub fn heyting_forall(
        &self,
        constructor: Option<&ForallConstructor<'_>>,
        constructor_bound: usize,
    ) -> AuditReport {
        let mut report = AuditReport::default();
        if !self.meets_pass() {
            for law in ["heyting.implication", "heyting.stable", "forall.adjoint", "forall.beck_chevalley"] {
                report.results.push(LawResult::skipped(law, "meets failed"));
            }
            if constructor.is_some() {
                report.results.push(LawResult::skipped("forall.constructor", "meets failed"));
            }
            return report;
        }
        let implication = self.law("heyting.implication", self.fiber_insts(2), None);
        let implication_ok = implication.pass;
        report.results.push(implication);
        if implication_ok {
            report.results.push(self.law("heyting.stable", self.map_insts(2, true), None));
        } else {
            report.results.push(LawResult::skipped("heyting.stable", "heyting.implication failed"));
        }
        let adjoint = self.law("forall.adjoint", self.map_insts(1, false), None);
        let adjoint_ok = adjoint.pass;
        report.results.push(adjoint);
        if adjoint_ok {
            report
                .results
                .push(self.law("forall.beck_chevalley", self.square_insts(), None));
        } else {
            report.results.push(LawResult::skipped("forall.beck_chevalley", "forall.adjoint failed"));
        }
        if let Some(ctor) = constructor {
            let insts: Vec<Inst> = self
                .map_insts(2, false)
                .into_iter()
                .filter(|i| {
                    let u = i.maps[0];
                    self.src(u) <= constructor_bound && self.tgt(u) <= constructor_bound
                })
                .collect();
            report.results.push(self.law("forall.constructor", insts, Some(ctor)));
        }
        report
    }

    /// Compares `ctor(u, φ, ψ)` with the greatest `ξ` satisfying
    /// `u*ξ ∧ φ ≤ ψ`, found by scanning the fiber over the target of `u`.
    fn forall_constructor_holds(&self, ctor: &ForallConstructor<'_>, i: &Inst) -> bool {
        let u = i.maps[0];
        let (ki, kj) = (self.tgt(u), self.src(u));
        let (phi, psi) = (i.preds[0].1, i.preds[1].1);
        let fi = &self.fibers[ki];
        let mut c = FixedBitSet::with_capacity(fi.classes());
        for xi in 0..fi.classes() as u32 {
            if let Some(m) = self.glb(kj, self.ri(u, xi), phi) {
                if self.fibers[kj].leq(m, psi) {
                    c.insert(xi as usize);
                }
            }
        }
        let brute = fi.greatest(&c);
        let got = ctor(&self.maps[u], &self.vals(kj, phi), &self.vals(kj, psi));
        brute.is_some() && self.class_of(&got).ok() == brute
    }

    /// Meets, existentials, implication and universals, plus the generic
    /// predicate (automatic for `fam`-backed oracles).
    pub fn tripos(&self, opts: &TriposOptions<'_>) -> AuditReport {
        let mut report = self.meets();
        report.extend(self.exists());
        report.extend(self.heyting_forall(opts.forall_constructor, opts.constructor_bound));
        report
            .results
            .push(LawResult::noted("generic", "automatic: the identity on the carrier"));
        report
    }

    fn exists_class(&self, u: usize, phi: u32) -> Option<u32> {
        let vals = self.vals(self.src(u), phi);
        match self.oracle.exists(&self.maps[u], &vals) {
            Some(v) => self.class_of(&v).ok(),
            None => self.exists_table()[u][phi as usize],
        }
    }

    /// Bounded check that `π` is ∃-prime: every `u*π ≤ ∃_v φ` with
    /// `u: J → I`, `v: K → J` splits through a section of `v`.
    pub fn is_exists_prime(&self, pi: &[usize]) -> Result<PrimeResult> {
        let pc = self.class_of(pi)?;
        let ki = pi.len();
        let mut checked = 0u64;
        for u in 0..self.maps.len() {
            if self.tgt(u) != ki {
                continue;
            }
            let kj = self.src(u);
            let lhs = self.ri(u, pc);
            for v in 0..self.maps.len() {
                if self.tgt(v) != kj {
                    continue;
                }
                let kk = self.src(v);
                let sections: Vec<usize> = (0..self.maps.len())
                    .filter(|&s| {
                        self.src(s) == kj
                            && self.tgt(s) == kk
                            && (0..kj).all(|j| self.maps[v].apply(self.maps[s].apply(j)) == j)
                    })
                    .collect();
                for phi in 0..self.fibers[kk].classes() as u32 {
                    checked += 1;
                    let Some(e) = self.exists_class(v, phi) else {
                        return Err(Error::Internal("no existential along a map".into()));
                    };
                    if !self.fibers[kj].leq(lhs, e) {
                        continue;
                    }
                    let split = sections
                        .iter()
                        .any(|&s| self.fibers[kj].leq(lhs, self.ri(s, phi)));
                    if !split {
                        let inst = Inst {
                            k: None,
                            maps: vec![u, v],
                            preds: vec![(ki, pc), (kk, phi)],
                        };
                        let mut ce = self.counterexample("prime", &inst);
                        ce.predicates[0] = pi.to_vec();
                        return Ok(PrimeResult {
                            prime: false,
                            checked,
                            counterexample: Some(ce),
                        });
                    }
                }
            }
        }
        Ok(PrimeResult {
            prime: true,
            checked,
            counterexample: None,
        })
    }

    /// Re-evaluates a reported counterexample; `true` when it still fails.
    pub fn recheck(
        &self,
        ce: &Counterexample,
        constructor: Option<&ForallConstructor<'_>>,
    ) -> Result<bool> {
        if ce.law == "prime" {
            let pi = ce
                .predicates
                .first()
                .ok_or_else(|| Error::InvalidStructure("prime counterexample without π".into()))?;
            return Ok(!self.is_exists_prime(pi)?.prime);
        }
        let maps = ce
            .maps
            .iter()
            .map(|f| {
                self.map_index
                    .get(f)
                    .copied()
                    .ok_or_else(|| Error::CarrierMismatch("map outside the audited universe".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let preds = ce
            .predicates
            .iter()
            .map(|p| Ok((p.len(), self.class_of(p)?)))
            .collect::<Result<Vec<_>>>()?;
        let inst = Inst {
            k: ce.index_size,
            maps,
            preds,
        };
        Ok(!self.single(&ce.law, &inst, constructor))
    }

    /// Whether one instance of `law` holds.
    fn single(&self, law: &str, i: &Inst, ctor: Option<&ForallConstructor<'_>>) -> bool {
        let top = self.top_table();
        match law {
            "meets.top" => top[i.k.unwrap_or(0)].is_some(),
            "meets.glb" => self.glb(i.preds[0].0, i.preds[0].1, i.preds[1].1).is_some(),
            "meets.stable" => {
                let u = i.maps[0];
                let (ki, kj) = (self.tgt(u), self.src(u));
                if i.preds.is_empty() {
                    return match (top[ki], top[kj]) {
                        (Some(t), Some(s)) => self.ri(u, t) == s,
                        _ => true,
                    };
                }
                let (a, b) = (i.preds[0].1, i.preds[1].1);
                match self.glb(ki, a, b) {
                    Some(m) => self.glb(kj, self.ri(u, a), self.ri(u, b)) == Some(self.ri(u, m)),
                    None => true,
                }
            }
            "meets.constructor" => {
                let k = i.k.unwrap_or(0);
                if i.preds.is_empty() {
                    let t = self.oracle.top().map(|t| vec![t; k]);
                    return t.and_then(|t| self.class_of(&t).ok()) == top[k];
                }
                let (a, b) = (self.vals(k, i.preds[0].1), self.vals(k, i.preds[1].1));
                let m: Option<Vec<usize>> =
                    a.iter().zip(&b).map(|(&x, &y)| self.oracle.meet(x, y)).collect();
                m.and_then(|m| self.class_of(&m).ok()) == self.glb(k, i.preds[0].1, i.preds[1].1)
            }
            "exists.adjoint" => self.exists_table()[i.maps[0]][i.preds[0].1 as usize].is_some(),
            "exists.constructor" => {
                let u = i.maps[0];
                let vals = self.vals(self.src(u), i.preds[0].1);
                self.oracle
                    .exists(&self.maps[u], &vals)
                    .and_then(|v| self.class_of(&v).ok())
                    == self.exists_table()[u][i.preds[0].1 as usize]
            }
            "exists.beck_chevalley" | "forall.beck_chevalley" => {
                let t = if law.starts_with("exists") {
                    self.exists_table()
                } else {
                    self.forall_table()
                };
                let (u, v, vb, ub) = (i.maps[0], i.maps[1], i.maps[2], i.maps[3]);
                let phi = i.preds[0].1;
                t[v][phi as usize].map(|e| self.ri(u, e)) == t[vb][self.ri(ub, phi) as usize]
            }
            "exists.frobenius" => {
                let u = i.maps[0];
                let (ki, kj) = (self.tgt(u), self.src(u));
                let ex = self.exists_table();
                let (a, b) = (i.preds[0].1, i.preds[1].1);
                let lhs = ex[u][b as usize].and_then(|e| self.glb(ki, a, e));
                let rhs = self.glb(kj, self.ri(u, a), b).and_then(|m| ex[u][m as usize]);
                lhs.is_some() && lhs == rhs
            }
            "heyting.implication" => {
                let k = i.preds[0].0;
                let n = self.fibers[k].classes();
                self.implication_table()[k][i.preds[0].1 as usize * n + i.preds[1].1 as usize].is_some()
            }
            "heyting.stable" => {
                let u = i.maps[0];
                let (ki, kj) = (self.tgt(u), self.src(u));
                let imp = self.implication_table();
                let (a, b) = (i.preds[0].1, i.preds[1].1);
                let (ni, nj) = (self.fibers[ki].classes(), self.fibers[kj].classes());
                imp[ki][a as usize * ni + b as usize].map(|c| self.ri(u, c))
                    == imp[kj][self.ri(u, a) as usize * nj + self.ri(u, b) as usize]
            }
            "forall.adjoint" => self.forall_table()[i.maps[0]][i.preds[0].1 as usize].is_some(),
            "forall.constructor" => ctor.is_some_and(|c| self.forall_constructor_holds(c, i)),
            _ => true,
        }
    }
}

/// Options for [`Auditor::tripos`].
#[derive(Default, Clone, Copy)]
pub struct TriposOptions<'a> {
    pub forall_constructor: Option<&'a ForallConstructor<'a>>,
    /// Largest index set on which the constructor is compared with brute force.
    pub constructor_bound: usize,
}

/// Outcome of a bounded primality check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeResult {
    pub prime: bool,
    pub checked: u64,
    pub counterexample: Option<Counterexample>,
}

/// Outcome of a bounded discreteness check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteResult {
    pub discrete: bool,
    pub checked: u64,
    /// Maps `e: K ↠ J`, `f: K → I` and predicate `φ` over `J` with
    /// `e*φ ≤ f*δ` but no `g` with `g ∘ e = f`.
    pub counterexample: Option<Counterexample>,
}

/// Bounded check that `δ` over `I` is discrete: for surjections `e: K ↠ J`
/// and maps `f: K → I` with `|K| ≤ span_bound`, whenever some `φ` has
/// `e*φ ≤ f*δ`, `f` factors through `e`.
pub fn is_discrete(
    oracle: &dyn FiberOracle,
    delta: &[usize],
    span_bound: usize,
    cfg: &UniverseConfig,
) -> Result<DiscreteResult> {
    let m = oracle.carrier_size();
    let ki = delta.len();
    let cap = cfg.enumeration_cap as u128;
    for size in [m, ki] {
        let count = (size as u128).checked_pow(span_bound as u32).unwrap_or(u128::MAX);
        if count > cap {
            return Err(Error::EnumerationCapExceeded { size: count, cap });
        }
    }
    let mut checked = 0u64;
    for kk in 0..=span_bound {
        for kj in 0..=kk {
            let es = surjections(kk, kj);
            let phis = maps_between(kj, m);
            for e in &es {
                for f in maps_between(kk, ki) {
                    checked += 1;
                    let factors = (0..kk).all(|x| {
                        (0..kk).all(|y| e.apply(x) != e.apply(y) || f.apply(x) == f.apply(y))
                    });
                    if factors {
                        continue;
                    }
                    let fd = oracle.reindex(&f, delta);
                    if let Some(phi) = phis
                        .iter()
                        .find(|phi| oracle.leq(&oracle.reindex(e, phi.values()), &fd))
                    {
                        let names: Vec<_> = phi.values().iter().map(|&x| oracle.element_name(x)).collect();
                        return Ok(DiscreteResult {
                            discrete: false,
                            checked,
                            counterexample: Some(Counterexample {
                                law: "discrete".into(),
                                index_size: None,
                                maps: vec![e.clone(), f],
                                predicates: vec![delta.to_vec(), phi.values().to_vec()],
                                note: format!("φ = ({})", names.join(", ")),
                            }),
                        });
                    }
                }
            }
        }
    }
    Ok(DiscreteResult {
        discrete: true,
        checked,
        counterexample: None,
    })
}

/// Re-verifies a discreteness counterexample directly.
pub fn recheck_discrete(oracle: &dyn FiberOracle, ce: &Counterexample) -> Result<bool> {
    let [e, f] = ce.maps.as_slice() else {
        return Err(Error::InvalidStructure("discreteness counterexample needs two maps".into()));
    };
    let [delta, phi] = ce.predicates.as_slice() else {
        return Err(Error::InvalidStructure("discreteness counterexample needs two predicates".into()));
    };
    let kk = e.source();
    let factors = (0..kk).all(|x| (0..kk).all(|y| e.apply(x) != e.apply(y) || f.apply(x) == f.apply(y)));
    Ok(e.is_surjective()
        && !factors
        && oracle.leq(&oracle.reindex(e, phi), &oracle.reindex(f, delta)))
}

/// Bounded audits of a D-completion: singleton-valued predicates are ∃-prime
/// and every predicate is `∃_u` of a singleton-valued one.
pub fn audit_enough_primes(d: &DCompletion, auditor: &Auditor<'_>) -> Result<AuditReport> {
    let n = d.base_size();
    let bound = auditor.config().max_index_size;
    let mut report = AuditReport::default();
    let mut checked = 0;
    let mut failure = None;
    'outer: for k in 0..=bound {
        for phi in maps_between(k, n) {
            checked += 1;
            let pi: Vec<usize> = phi.values().iter().map(|&a| 1 << a).collect();
            let r = auditor.is_exists_prime(&pi)?;
            if let Some(ce) = r.counterexample {
                failure = Some(ce);
                break 'outer;
            }
        }
    }
    report.results.push(LawResult {
        law: "primes.singletons".into(),
        pass: failure.is_none(),
        skipped: false,
        checked,
        counterexample: failure,
        note: None,
    });
    let mut checked = 0;
    let mut failure = None;
    'outer2: for k in 0..=bound {
        for code in 0..(1usize << n).pow(k as u32) {
            checked += 1;
            let vals = decode(code, 1 << n, k);
            let phi = DPredicate::new(n, vals.iter().map(|&v| v as u64).collect())?;
            let (u, sigma) = crate::dcompletion::decompose(&phi);
            if !sigma.is_singleton_valued() || crate::dcompletion::exists_along(&u, &sigma)? != phi {
                failure = Some(Counterexample {
                    law: "primes.decomposition".into(),
                    index_size: Some(k),
                    maps: vec![u],
                    predicates: vec![vals],
                    note: String::new(),
                });
                break 'outer2;
            }
        }
    }
    report.results.push(LawResult {
        law: "primes.decomposition".into(),
        pass: failure.is_none(),
        skipped: false,
        checked,
        counterexample: failure,
        note: None,
    });
    Ok(report)
}

/// `audit_meets` on a fresh universe.
pub fn audit_meets(oracle: &dyn FiberOracle, cfg: &UniverseConfig) -> Result<AuditReport> {
    Ok(Auditor::new(oracle, *cfg)?.meets())
}

/// `audit_exists` on a fresh universe.
pub fn audit_exists(oracle: &dyn FiberOracle, cfg: &UniverseConfig) -> Result<AuditReport> {
    Ok(Auditor::new(oracle, *cfg)?.exists())
}

/// `audit_heyting_forall` on a fresh universe.
pub fn audit_heyting_forall(
    oracle: &dyn FiberOracle,
    cfg: &UniverseConfig,
    constructor: Option<&ForallConstructor<'_>>,
) -> Result<AuditReport> {
    Ok(Auditor::new(oracle, *cfg)?.heyting_forall(constructor, cfg.max_index_size))
}

/// The composite tripos audit of `fam(D(U))`, optionally with enough-primes.
pub fn audit_tripos(oracle: &dyn FiberOracle, cfg: &UniverseConfig) -> Result<AuditReport> {
    Ok(Auditor::new(oracle, *cfg)?.tripos(&TriposOptions::default()))
}

/// The tripos audit of `fam(D(U))` together with the characterization
/// conditions on its primes: enough primes, meets on `fam(U)` and
/// discreteness of the generic predicate `id_A` at span bound 4.
pub fn audit_rtr_char(u: &UniformPreorder, cfg: &UniverseConfig) -> Result<AuditReport> {
    let d = crate::dcompletion::dcomplete(u)?;
    let dfam = FamOracle::of_dcompletion(&d);
    let auditor = Auditor::new(&dfam, *cfg)?;
    let mut report = auditor.tripos(&TriposOptions::default());
    report.extend(audit_enough_primes(&d, &auditor)?);
    let base = FamOracle::new(u);
    let mut base_meets = audit_meets(&base, cfg)?;
    for r in &mut base_meets.results {
        r.law = format!("prim.{}", r.law);
        if let Some(ce) = &mut r.counterexample {
            ce.law = r.law.clone();
        }
    }
    report.extend(base_meets);
    let id: Vec<usize> = (0..u.size()).collect();
    let disc = is_discrete(&base, &id, 4, cfg)?;
    report.results.push(LawResult {
        law: "prim.discrete_generic".into(),
        pass: disc.discrete,
        skipped: false,
        checked: disc.checked,
        counterexample: disc.counterexample,
        note: None,
    });
    Ok(report)
}

/// Subsets of the base carrier, for callers that build predicates on `fam(D)`.
pub fn subset_values(mask: u64) -> impl Iterator<Item = usize> {
    bits(mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartesian::search_cartesian;
    use crate::dcompletion::{dcomplete, forall_impl};
    use crate::relcore::{BinRel, Carrier};
    use crate::testutil::*;

    fn cfg(b: usize) -> UniverseConfig {
        UniverseConfig {
            max_index_size: b,
            ..UniverseConfig::default()
        }
    }

    #[test]
    fn meets_examples() {
        assert!(audit_meets(&FamOracle::new(&chain(2)), &cfg(3)).unwrap().pass());
        let d2 = UniformPreorder::discrete(Carrier::indexed(2));
        let r = audit_meets(&FamOracle::new(&d2), &cfg(3)).unwrap();
        let top = r.law("meets.top").unwrap();
        assert!(!top.pass);
        assert_eq!(top.counterexample.as_ref().unwrap().index_size, Some(1));
        let d = dcomplete(&chain(2)).unwrap();
        let w = search_cartesian(&chain(2)).unwrap().unwrap();
        let dw = crate::dcompletion::d_cartesian(&d, &w).unwrap();
        let o = FamOracle::of_dcompletion(&d).with_meets(&dw);
        let r = audit_meets(&o, &cfg(3)).unwrap();
        assert!(r.pass(), "{r:?}");
        assert!(r.law("meets.constructor").unwrap().pass);
    }

    #[test]
    fn exists_examples() {
        let d = dcomplete(&random_uord(2, 2, 3)).unwrap();
        let r = audit_exists(&FamOracle::of_dcompletion(&d), &cfg(3)).unwrap();
        for law in ["exists.adjoint", "exists.constructor", "exists.beck_chevalley"] {
            assert!(r.law(law).unwrap().pass, "{law}");
        }
        assert!(audit_exists(&FamOracle::new(&chain(2)), &cfg(3)).unwrap().pass());
        let d2 = UniformPreorder::discrete(Carrier::new(["x", "y"]).unwrap());
        let r = audit_exists(&FamOracle::new(&d2), &cfg(3)).unwrap();
        let ce = r.law("exists.adjoint").unwrap().counterexample.clone().unwrap();
        // The first failure is the empty predicate: no least element over 1.
        assert_eq!((ce.maps[0].source(), ce.maps[0].target()), (0, 1));
        let o = FamOracle::new(&d2);
        let aud = Auditor::new(&o, cfg(3)).unwrap();
        let merge = Counterexample {
            maps: vec![FunTable::new(1, vec![0, 0]).unwrap()],
            predicates: vec![vec![0, 1]],
            ..ce
        };
        assert!(aud.recheck(&merge, None).unwrap());
    }

    #[test]
    fn heyting_examples() {
        let u = chain(2);
        let d = dcomplete(&u).unwrap();
        let w = search_cartesian(&u).unwrap().unwrap();
        let o = FamOracle::of_dcompletion(&d);
        let aud = Auditor::new(&o, cfg(3)).unwrap();
        let r = aud.heyting_forall(None, 3);
        assert!(r.pass(), "{r:?}");
        // ({1} ⇒ {0}) ≅ {0} over a one-point index.
        let imp = aud.implication_table();
        let c1 = aud.class_of(&[0b10]).unwrap();
        let c0 = aud.class_of(&[0b01]).unwrap();
        let n = aud.fiber_classes(1);
        assert_eq!(imp[1][c1 as usize * n + c0 as usize], Some(c0));
        let at = leq_chain(2);
        let ctor = |uu: &FunTable, p: &[usize], q: &[usize]| -> Vec<usize> {
            let p = DPredicate::new(2, p.iter().map(|&x| x as u64).collect()).unwrap();
            let q = DPredicate::new(2, q.iter().map(|&x| x as u64).collect()).unwrap();
            let r = forall_impl(&d, &at, &w, uu, &p, &q).unwrap();
            r.values().iter().map(|&x| x as usize).collect()
        };
        let r = aud.heyting_forall(Some(&ctor), 3);
        assert!(r.law("forall.constructor").unwrap().pass);

        let d2 = UniformPreorder::discrete(Carrier::indexed(2));
        let r = audit_heyting_forall(&FamOracle::new(&d2), &cfg(2), None).unwrap();
        assert!(r.results.iter().all(|l| l.skipped));
    }

    #[test]
    fn top_implies_is_identity() {
        let d = dcomplete(&chain(3)).unwrap();
        let o = FamOracle::of_dcompletion(&d);
        let aud = Auditor::new(&o, cfg(2)).unwrap();
        let imp = aud.implication_table();
        for (k, table) in imp.iter().enumerate().take(3) {
            let n = aud.fiber_classes(k);
            let top = aud.top_table()[k].unwrap();
            for phi in 0..n {
                assert_eq!(table[top as usize * n + phi], Some(phi as u32));
            }
        }
    }

    #[test]
    fn prime_examples() {
        let d = dcomplete(&chain(2)).unwrap();
        let o = FamOracle::of_dcompletion(&d);
        let aud = Auditor::new(&o, cfg(3)).unwrap();
        assert!(aud.is_exists_prime(&[0b01]).unwrap().prime);
        assert!(aud.is_exists_prime(&[0b10, 0b01]).unwrap().prime);
        let r = aud.is_exists_prime(&[0]).unwrap();
        assert!(!r.prime);
        assert!(aud.recheck(r.counterexample.as_ref().unwrap(), None).unwrap());
        assert!(aud.is_exists_prime(&[]).unwrap().prime);
        // {0,1} ≅ {1} in the completion of a chain.
        assert!(aud.is_exists_prime(&[0b11]).unwrap().prime);
        let dd = dcomplete(&UniformPreorder::discrete(Carrier::indexed(2))).unwrap();
        let o = FamOracle::of_dcompletion(&dd);
        let aud = Auditor::new(&o, cfg(2)).unwrap();
        let r = aud.is_exists_prime(&[0b11]).unwrap();
        assert!(!r.prime);
        assert!(aud.recheck(r.counterexample.as_ref().unwrap(), None).unwrap());
    }

    #[test]
    fn discrete_examples() {
        let d2 = UniformPreorder::discrete(Carrier::indexed(2));
        let c = cfg(3);
        assert!(is_discrete(&FamOracle::new(&d2), &[0, 1], 4, &c).unwrap().discrete);
        let r = is_discrete(&FamOracle::new(&chain(2)), &[0, 1], 4, &c).unwrap();
        assert!(!r.discrete);
        let ce = r.counterexample.unwrap();
        assert_eq!(ce.maps[0].values(), &[0, 0]);
        assert_eq!(ce.maps[1].values(), &[0, 1]);
        assert_eq!(ce.predicates[1], vec![0]);
        assert!(recheck_discrete(&FamOracle::new(&chain(2)), &ce).unwrap());
        // Reindexing the generic predicate of a DCO along an injection.
        let swap = id_swap();
        assert!(is_discrete(&FamOracle::new(&swap), &[1], 4, &c).unwrap().discrete);
        assert!(is_discrete(&FamOracle::new(&swap), &[0, 1], 4, &c).unwrap().discrete);
    }

    #[test]
    fn tripos_examples() {
        let c = cfg(3);
        let d = dcomplete(&chain(2)).unwrap();
        assert!(audit_tripos(&FamOracle::of_dcompletion(&d), &c).unwrap().pass());
        let d2 = UniformPreorder::discrete(Carrier::indexed(2));
        let dd = dcomplete(&d2).unwrap();
        assert!(audit_tripos(&FamOracle::of_dcompletion(&dd), &c).unwrap().pass());
        let rc = audit_rtr_char(&d2, &c).unwrap();
        assert!(rc.law("prim.discrete_generic").unwrap().pass);
        assert!(rc.law("primes.singletons").unwrap().pass);
        assert!(!rc.law("prim.meets.top").unwrap().pass);
        assert!(!audit_tripos(&FamOracle::new(&d2), &c).unwrap().pass());
    }

    #[test]
    fn counterexamples_recheck() {
        let d2 = UniformPreorder::discrete(Carrier::indexed(2));
        let o = FamOracle::new(&d2);
        let aud = Auditor::new(&o, cfg(2)).unwrap();
        let mut rep = aud.meets();
        rep.extend(aud.exists());
        let fails: Vec<_> = rep.failures().filter(|l| !l.skipped).collect();
        assert!(!fails.is_empty());
        for l in fails {
            let ce = l.counterexample.as_ref().unwrap();
            assert!(aud.recheck(ce, None).unwrap(), "{}", l.law);
        }
    }

    #[test]
    fn pullbacks() {
        let u = FunTable::new(2, vec![0, 1, 1]).unwrap();
        let v = FunTable::new(2, vec![1, 1]).unwrap();
        let (vb, ub) = pullback(&u, &v);
        assert_eq!(vb.values(), &[1, 1, 2, 2]);
        assert_eq!(ub.values(), &[0, 1, 0, 1]);
        let _ = BinRel::identity(0);
    }
}

