//! Finite meets on a uniform preorder.
//!
//! A pair `(∧, ⊤)` makes `fam(A, R)` fiberwise a meet-semilattice exactly when
//! the relations
//!
//! * `τ = {(a, ⊤)}`,
//! * `λ = {(a ∧ b, a)}` and `ρ = {(a ∧ b, b)}`,
//! * `⟨⟨r, s⟩⟩ = {(a, b ∧ c) : (a, b) ∈ r, (a, c) ∈ s}` for all `r, s ∈ R`
//!
//! all lie in `R`. Since `⟨⟨·,·⟩⟩` is monotone in both arguments, checking it on
//! pairs of generators suffices.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::relcore::{compose, meet_pair, BinRel, FunTable};
use crate::uord::UniformPreorder;

/// Default cap on `|A|^(|A|²+1)`, the raw number of `(∧, ⊤)` candidates.
pub const DEFAULT_SEARCH_CAP: u128 = 1 << 40;

/// Largest `|A|^n` accepted by [`nary`].
pub const MAX_NARY_TUPLES: usize = 4096;

/// A certified cartesian structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartesianWitness {
    /// Binary meet on pairs encoded as `a * |A| + b`.
    pub meet: FunTable,
    pub top: usize,
    /// Generators containing `τ`, `λ` and `ρ`.
    pub tau: String,
    pub lambda: String,
    pub rho: String,
}

impl CartesianWitness {
    pub fn meet_of(&self, a: usize, b: usize) -> usize {
        let n = self.meet.target();
        self.meet.apply(a * n + b)
    }
}

/// The first condition a candidate `(∧, ⊤)` violates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CartesianFailure {
    Top(BinRel),
    Left(BinRel),
    Right(BinRel),
    /// `⟨⟨g, h⟩⟩` for the named generators escapes `R`.
    Pairing {
        left: String,
        right: String,
        rel: BinRel,
    },
}

impl CartesianFailure {
    pub fn condition(&self) -> &'static str {
        match self {
            CartesianFailure::Top(_) => "tau",
            CartesianFailure::Left(_) => "lambda",
            CartesianFailure::Right(_) => "rho",
            CartesianFailure::Pairing { .. } => "pairing",
        }
    }
}

pub fn tau(n: usize, top: usize) -> BinRel {
    let mut r = BinRel::empty(n, n);
    (0..n).for_each(|a| r.insert(a, top));
    r
}

/// `λ` and `ρ` of a binary meet table.
pub fn projections(meet: &FunTable) -> (BinRel, BinRel) {
    let n = meet.target();
    let mut l = BinRel::empty(n, n);
    let mut r = BinRel::empty(n, n);
    for a in 0..n {
        for b in 0..n {
            let m = meet.apply(a * n + b);
            l.insert(m, a);
            r.insert(m, b);
        }
    }
    (l, r)
}

/// Verifies `(∧, ⊤)`; `None` when some condition fails.
pub fn check_cartesian(
    u: &UniformPreorder,
    meet: &FunTable,
    top: usize,
) -> Result<Option<CartesianWitness>> {
    Ok(diagnose_cartesian(u, meet, top)?.ok())
}

/// Like [`check_cartesian`], reporting the violated condition on failure.
pub fn diagnose_cartesian(
    u: &UniformPreorder,
    meet: &FunTable,
    top: usize,
) -> Result<std::result::Result<CartesianWitness, CartesianFailure>> {
    let n = u.size();
    if meet.source() != n * n || meet.target() != n || top >= n {
        return Err(Error::CarrierMismatch(format!(
            "meet table {}→{} with top {top} on a carrier of size {n}",
            meet.source(),
            meet.target()
        )));
    }
    let t = tau(n, top);
    let Some(tau_w) = u.find_generator(&t) else {
        return Ok(Err(CartesianFailure::Top(t)));
    };
    let (l, r) = projections(meet);
    let Some(lambda_w) = u.find_generator(&l) else {
        return Ok(Err(CartesianFailure::Left(l)));
    };
    let Some(rho_w) = u.find_generator(&r) else {
        return Ok(Err(CartesianFailure::Right(r)));
    };
    for g in u.generators() {
        for h in u.generators() {
            let p = meet_pair(&g.rel, &h.rel, meet)?;
            if u.find_generator(&p).is_none() {
                return Ok(Err(CartesianFailure::Pairing {
                    left: g.name.clone(),
                    right: h.name.clone(),
                    rel: p,
                }));
            }
        }
    }
    Ok(Ok(CartesianWitness {
        meet: meet.clone(),
        top,
        tau: tau_w.name,
        lambda: lambda_w.name,
        rho: rho_w.name,
    }))
}

/// Searches `(⊤, ∧)` in lexicographic order of the top element and then the
/// meet table, returning the first valid candidate.
pub fn search_cartesian(u: &UniformPreorder) -> Result<Option<CartesianWitness>> {
    search_cartesian_with(u, DEFAULT_SEARCH_CAP)
}

pub fn search_cartesian_with(u: &UniformPreorder, cap: u128) -> Result<Option<CartesianWitness>> {
    let n = u.size();
    let size = (n as u128).checked_pow((n * n + 1) as u32).unwrap_or(u128::MAX);
    if size > cap {
        return Err(Error::SearchSpaceTooLarge { size, cap });
    }
    if n == 0 {
        return Ok(None);
    }
    let found = (0..n).into_par_iter().find_map_first(|top| {
        if !u.has(&tau(n, top)) {
            return None;
        }
        let mut search = MeetSearch::new(u);
        search.run(0).then(|| (top, search.table()))
    });
    match found {
        Some((top, table)) => {
            let meet = FunTable::new(n, table)?;
            match check_cartesian(u, &meet, top)? {
                Some(w) => Ok(Some(w)),
                None => Err(Error::Internal("search result failed verification".into())),
            }
        }
        None => Ok(None),
    }
}

/// Depth-first assignment of meet-table entries with partial-relation pruning.
struct MeetSearch<'a> {
    u: &'a UniformPreorder,
    n: usize,
    table: Vec<usize>,
}

impl<'a> MeetSearch<'a> {
    fn new(u: &'a UniformPreorder) -> Self {
        let n = u.size();
        MeetSearch {
            u,
            n,
            table: Vec::with_capacity(n * n),
        }
    }

    fn table(&self) -> Vec<usize> {
        self.table.clone()
    }

    fn run(&mut self, k: usize) -> bool {
        if k == self.n * self.n {
            return true;
        }
        for m in 0..self.n {
            self.table.push(m);
            if self.consistent() && self.run(k + 1) {
                return true;
            }
            self.table.pop();
        }
        false
    }

    /// Checks the partial `λ`, `ρ` and pairings built from the assigned prefix.
    fn consistent(&self) -> bool {
        let n = self.n;
        let mut l = BinRel::empty(n, n);
        let mut r = BinRel::empty(n, n);
        for (k, &m) in self.table.iter().enumerate() {
            l.insert(m, k / n);
            r.insert(m, k % n);
        }
        if !self.u.has(&l) || !self.u.has(&r) {
            return false;
        }
        for g in self.u.generators() {
            for h in self.u.generators() {
                let mut p = BinRel::empty(n, n);
                for a in 0..n {
                    for (k, &m) in self.table.iter().enumerate() {
                        if g.rel.contains(a, k / n) && h.rel.contains(a, k % n) {
                            p.insert(a, m);
                        }
                    }
                }
                if !self.u.has(&p) {
                    return false;
                }
            }
        }
        true
    }
}

/// The `n`-ary meet and the test for membership in `R^(n)`.
#[derive(Debug, Clone)]
pub struct Nary<'a> {
    u: &'a UniformPreorder,
    arity: usize,
    /// `∧ⁿ` on tuples encoded in base `|A|`, first component most significant.
    pub meet_n: FunTable,
}

impl Nary<'_> {
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// `r ⊆ Aⁿ × A` lies in `R^(n)` when `r ⊆ g ∘ ∧ⁿ` for a generator `g`;
    /// returns that generator's name.
    pub fn in_rn(&self, r: &BinRel) -> Result<Option<String>> {
        if r.source() != self.meet_n.source() || r.target() != self.u.size() {
            return Err(Error::CarrierMismatch(format!(
                "relation {}×{} is not on A^{} × A",
                r.source(),
                r.target(),
                self.arity
            )));
        }
        let graph = self.meet_n.graph();
        for g in self.u.generators() {
            if r.is_subset(&compose(&graph, &g.rel)?) {
                return Ok(Some(g.name.clone()));
            }
        }
        Ok(None)
    }

    /// Encodes a tuple of elements.
    pub fn encode(&self, tuple: &[usize]) -> usize {
        let n = self.u.size();
        tuple.iter().fold(0, |acc, &a| acc * n + a)
    }

    /// Decodes a tuple code.
    pub fn decode(&self, mut code: usize) -> Vec<usize> {
        let n = self.u.size();
        let mut out = vec![0; self.arity];
        for slot in out.iter_mut().rev() {
            *slot = code % n;
            code /= n;
        }
        out
    }
}

/// `∧⁰ = ⊤` and `∧ⁿ⁺¹(ā, b) = ∧ⁿ(ā) ∧ b`.
pub fn nary<'a>(u: &'a UniformPreorder, w: &CartesianWitness, arity: usize) -> Result<Nary<'a>> {
    let n = u.size();
    let tuples = n
        .checked_pow(arity as u32)
        .filter(|&t| t <= MAX_NARY_TUPLES)
        .ok_or(Error::CarrierTooLarge {
            size: usize::MAX,
            bound: MAX_NARY_TUPLES,
        })?;
    let mut values = vec![w.top; 1];
    for _ in 0..arity {
        values = values
            .iter()
            .flat_map(|&m| (0..n).map(move |b| (m, b)))
            .map(|(m, b)| w.meet_of(m, b))
            .collect();
    }
    debug_assert_eq!(values.len(), tuples);
    Ok(Nary {
        u,
        arity,
        meet_n: FunTable::new(n, values)?,
    })
}

/// `⟨λ, ρ⟩ ∘ ∧ = id` on `A × A`, i.e. the meet is injective.
pub fn projections_split_meet(w: &CartesianWitness) -> bool {
    w.meet.is_injective()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relcore::Carrier;
    use crate::testutil::*;

    fn min_table(n: usize) -> FunTable {
        FunTable::new(n, (0..n * n).map(|k| (k / n).min(k % n)).collect()).unwrap()
    }

    fn diamond_meet() -> FunTable {
        // bot=0, a=1, b=2, top=3
        let m = |x: usize, y: usize| match (x, y) {
            (x, y) if x == y => x,
            (3, y) => y,
            (x, 3) => x,
            _ => 0,
        };
        FunTable::new(4, (0..16).map(|k| m(k / 4, k % 4)).collect()).unwrap()
    }

    #[test]
    fn check_examples() {
        let w = check_cartesian(&chain(2), &min_table(2), 1).unwrap().unwrap();
        assert_eq!((w.tau.as_str(), w.lambda.as_str()), ("leq", "leq"));
        assert!(check_cartesian(&diamond(), &diamond_meet(), 3).unwrap().is_some());
        let d = UniformPreorder::discrete(Carrier::indexed(2));
        for code in 0..16usize {
            let meet = FunTable::new(2, (0..4).map(|k| code >> k & 1).collect()).unwrap();
            for top in 0..2 {
                assert!(check_cartesian(&d, &meet, top).unwrap().is_none());
            }
        }
    }

    #[test]
    fn diagnose_names_the_condition() {
        let max = FunTable::new(2, vec![0, 1, 1, 1]).unwrap();
        let e = diagnose_cartesian(&chain(2), &max, 1).unwrap().unwrap_err();
        assert_eq!(e.condition(), "lambda");
        let e = diagnose_cartesian(&chain(2), &min_table(2), 0).unwrap().unwrap_err();
        assert_eq!(e.condition(), "tau");
    }

    #[test]
    fn search_examples() {
        let one = UniformPreorder::discrete(Carrier::indexed(1));
        assert!(search_cartesian(&one).unwrap().is_some());
        let w = search_cartesian(&chain(2)).unwrap().unwrap();
        assert_eq!((w.meet, w.top), (min_table(2), 1));
        let d = UniformPreorder::discrete(Carrier::indexed(2));
        assert!(search_cartesian(&d).unwrap().is_none());
        let w = search_cartesian(&diamond()).unwrap().unwrap();
        assert_eq!(w.top, 3);
        assert!(matches!(
            search_cartesian_with(&chain(3), 10),
            Err(Error::SearchSpaceTooLarge { .. })
        ));
    }

    #[test]
    fn search_agrees_with_brute_force_on_small_carriers() {
        for seed in 0..40u64 {
            let u = random_uord(2, 2, seed);
            let mut first = None;
            'outer: for top in 0..2 {
                for code in 0..16usize {
                    let meet = FunTable::new(2, (0..4).map(|k| code >> k & 1).collect()).unwrap();
                    if check_cartesian(&u, &meet, top).unwrap().is_some() {
                        first = Some((top, meet));
                        break 'outer;
                    }
                }
            }
            let found = search_cartesian(&u).unwrap().map(|w| (w.top, w.meet));
            assert_eq!(found, first, "seed {seed}");
        }
    }

    #[test]
    fn nary_examples() {
        let u = chain(2);
        let w = check_cartesian(&u, &min_table(2), 1).unwrap().unwrap();
        let z = nary(&u, &w, 0).unwrap();
        assert_eq!(z.meet_n.values(), &[1]);
        let two = nary(&u, &w, 2).unwrap();
        assert_eq!(two.meet_n, min_table(2));

        let one = UniformPreorder::discrete(Carrier::indexed(1));
        let w1 = search_cartesian(&one).unwrap().unwrap();
        assert!(projections_split_meet(&w1));
        assert!(!projections_split_meet(&w));
    }

    #[test]
    fn rn_contains_projections_after_generators_and_is_down_closed() {
        for (u, w) in [
            (chain(3), check_cartesian(&chain(3), &min_table(3), 2).unwrap().unwrap()),
            (diamond(), check_cartesian(&diamond(), &diamond_meet(), 3).unwrap().unwrap()),
        ] {
            let n = u.size();
            for arity in 1..=2 {
                let nr = nary(&u, &w, arity).unwrap();
                for i in 0..arity {
                    for g in u.generators() {
                        let mut r = BinRel::empty(nr.meet_n.source(), n);
                        for code in 0..nr.meet_n.source() {
                            let a = nr.decode(code)[i];
                            for c in 0..n {
                                if g.rel.contains(a, c) {
                                    r.insert(code, c);
                                }
                            }
                        }
                        assert!(nr.in_rn(&r).unwrap().is_some());
                        // Drop one pair: still inside.
                        let first = r.pairs().next();
                        if let Some((x, y)) = first {
                            let rest: Vec<_> = r.pairs().filter(|&p| p != (x, y)).collect();
                            let sub = BinRel::from_pairs(r.source(), n, rest).unwrap();
                            assert!(nr.in_rn(&sub).unwrap().is_some());
                        }
                    }
                }
            }
        }
    }
}
