//! The existential completion `D(A, R)` on the powerset of `A`.
//!
//! Subsets of `A` are bit masks, so the lifted carrier is indexed by the
//! masks `0..2^|A|` themselves. A base relation `r` lifts to
//! `[r] = {(U, V) : ∀a ∈ U ∃b ∈ V. (a, b) ∈ r}`.

use crate::cartesian::{check_cartesian, CartesianWitness};
use crate::error::{Error, Result};
use crate::logicaudit::{audit_enough_primes, maps_between, Auditor, FamOracle, FiberOracle, LawResult, UniverseConfig};
use crate::relcore::{bits, compose, word_mask, BinRel, Carrier, FunTable, WORD_BITS};
use crate::uord::{check_adjunction, check_monotone, Limits, NamedRel, UniformPreorder};

/// A predicate `I → P(A)`, one subset mask per index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DPredicate {
    base: usize,
    values: Vec<u64>,
}

impl DPredicate {
    pub fn new(base: usize, values: Vec<u64>) -> Result<Self> {
        if base > WORD_BITS {
            return Err(Error::CarrierTooLarge {
                size: base,
                bound: WORD_BITS,
            });
        }
        if values.iter().any(|v| v & !word_mask(base) != 0) {
            return Err(Error::CarrierMismatch(format!(
                "subset outside a carrier of size {base}"
            )));
        }
        Ok(DPredicate { base, values })
    }

    /// The singleton-valued predicate `η ∘ φ`.
    pub fn singletons(phi: &FunTable) -> Self {
        DPredicate {
            base: phi.target(),
            values: phi.values().iter().map(|&a| 1 << a).collect(),
        }
    }

    pub fn constant(base: usize, index: usize, subset: u64) -> Result<Self> {
        DPredicate::new(base, vec![subset; index])
    }

    pub fn base_size(&self) -> usize {
        self.base
    }

    pub fn index_size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn at(&self, i: usize) -> u64 {
        self.values[i]
    }

    /// Whether every value is a singleton.
    pub fn is_singleton_valued(&self) -> bool {
        self.values.iter().all(|v| v.count_ones() == 1)
    }

    /// Reindexing `φ ∘ u` along `u: J → I`.
    pub fn reindex(&self, u: &FunTable) -> Result<DPredicate> {
        if u.target() != self.index_size() {
            return Err(index_mismatch(u.target(), self.index_size()));
        }
        Ok(DPredicate {
            base: self.base,
            values: u.values().iter().map(|&i| self.values[i]).collect(),
        })
    }

    /// The same predicate read as a map into the lifted carrier.
    pub fn as_lifted(&self) -> FunTable {
        FunTable::new(
            1 << self.base,
            self.values.iter().map(|&v| v as usize).collect(),
        )
        .expect("masks are below 2^|A|")
    }

    pub fn from_lifted(base: usize, f: &FunTable) -> Result<Self> {
        DPredicate::new(base, f.values().iter().map(|&v| v as u64).collect())
    }
}

/// `D(A, R)` together with its base.
#[derive(Debug, Clone)]
pub struct DCompletion {
    base: UniformPreorder,
    lifted: UniformPreorder,
}

/// Renders a subset mask with the base labels, e.g. `{a,b}`.
pub fn subset_name(carrier: &Carrier, mask: u64) -> String {
    let names: Vec<_> = bits(mask).map(|a| carrier.name(a)).collect();
    format!("{{{}}}", names.join(","))
}

/// `{a : some b ∈ V has (a, b) ∈ r}`.
fn preimage(r: &BinRel, v: u64) -> u64 {
    (0..r.source())
        .filter(|&a| r.row(a) & v != 0)
        .fold(0, |acc, a| acc | 1 << a)
}

/// The lifted relation `[r]` on subset masks.
pub fn lift(r: &BinRel) -> BinRel {
    let n = r.source();
    let m = 1usize << n;
    let mut out = BinRel::empty(m, m);
    for v in 0..m as u64 {
        let pre = preimage(r, v);
        for u in 0..m {
            if u as u64 & !pre == 0 {
                out.insert(u, v as usize);
            }
        }
    }
    out
}

/// Builds `D(A, R)` with the default [`Limits`].
pub fn dcomplete(u: &UniformPreorder) -> Result<DCompletion> {
    dcomplete_with(u, Limits::default())
}

pub fn dcomplete_with(u: &UniformPreorder, limits: Limits) -> Result<DCompletion> {
    let n = u.size();
    let bound = limits.max_carrier.min(WORD_BITS);
    if n >= usize::BITS as usize || 1usize << n > bound {
        return Err(Error::CarrierTooLarge {
            size: 1usize.checked_shl(n as u32).unwrap_or(usize::MAX),
            bound,
        });
    }
    let names: Vec<String> = (0..1u64 << n).map(|m| subset_name(u.carrier(), m)).collect();
    let carrier = Carrier::new(names)?;
    let gens: Vec<NamedRel> = u
        .generators()
        .iter()
        .map(|g| NamedRel::new(format!("[{}]", g.name), lift(&g.rel)))
        .collect();
    // [g'] ∘ [g] ⊆ [g' ∘ g], which lies under some lifted generator.
    for g in &gens {
        for h in &gens {
            let c = compose(&g.rel, &h.rel)?;
            if !gens.iter().any(|k| c.is_subset(&k.rel)) {
                return Err(Error::Internal(format!(
                    "lifted composite {}∘{} escapes the lifted generators",
                    h.name, g.name
                )));
            }
        }
    }
    Ok(DCompletion {
        base: u.clone(),
        lifted: UniformPreorder::from_saturated(carrier, gens),
    })
}

impl DCompletion {
    pub fn base(&self) -> &UniformPreorder {
        &self.base
    }

    pub fn lifted(&self) -> &UniformPreorder {
        &self.lifted
    }

    pub fn base_size(&self) -> usize {
        self.base.size()
    }

    /// The singleton map `η: A → P(A)`.
    pub fn eta(&self) -> FunTable {
        let n = self.base.size();
        FunTable::new(1 << n, (0..n).map(|a| 1 << a).collect()).expect("singletons in range")
    }

    /// `φ ≤ ψ` when a base generator `r` has `∀i ∀a ∈ φ(i) ∃b ∈ ψ(i). (a, b) ∈ r`;
    /// returns the name of the lifted generator.
    pub fn leq(&self, phi: &DPredicate, psi: &DPredicate) -> Result<Option<String>> {
        self.check_pred(phi)?;
        self.check_pred(psi)?;
        if phi.index_size() != psi.index_size() {
            return Err(index_mismatch(phi.index_size(), psi.index_size()));
        }
        Ok(self
            .base
            .generators()
            .iter()
            .zip(self.lifted.generators())
            .find(|(g, _)| {
                phi.values
                    .iter()
                    .zip(&psi.values)
                    .all(|(&u, &v)| u & !preimage(&g.rel, v) == 0)
            })
            .map(|(_, lg)| lg.name.clone()))
    }

    /// Pointwise meet `U ∧ V = {a ∧ b}` and top `{⊤}` on the lifted carrier.
    pub fn meet_table(&self, w: &CartesianWitness) -> FunTable {
        let m = 1usize << self.base_size();
        let values = (0..m * m)
            .map(|k| subset_meet(w, (k / m) as u64, (k % m) as u64) as usize)
            .collect();
        FunTable::new(m, values).expect("subset meets in range")
    }

    fn check_pred(&self, p: &DPredicate) -> Result<()> {
        if p.base != self.base_size() {
            return Err(Error::CarrierMismatch(format!(
                "predicate into P of a {}-element set, base has {}",
                p.base,
                self.base_size()
            )));
        }
        Ok(())
    }
}

/// `{a ∧ b : a ∈ U, b ∈ V}`.
pub fn subset_meet(w: &CartesianWitness, u: u64, v: u64) -> u64 {
    let mut out = 0;
    for a in bits(u) {
        for b in bits(v) {
            out |= 1 << w.meet_of(a, b);
        }
    }
    out
}

/// `(∃_u φ)(i) = ⋃_{u(j) = i} φ(j)` for `u: J → I`.
pub fn exists_along(u: &FunTable, phi: &DPredicate) -> Result<DPredicate> {
    if u.source() != phi.index_size() {
        return Err(index_mismatch(u.source(), phi.index_size()));
    }
    let mut values = vec![0u64; u.target()];
    for (j, &i) in u.values().iter().enumerate() {
        values[i] |= phi.values[j];
    }
    Ok(DPredicate {
        base: phi.base,
        values,
    })
}

/// The cartesian structure of `D(A, R)` induced by a base witness.
pub fn d_cartesian(d: &DCompletion, w: &CartesianWitness) -> Result<CartesianWitness> {
    let table = d.meet_table(w);
    check_cartesian(d.lifted(), &table, 1 << w.top)?.ok_or_else(|| {
        Error::Internal("lifted meets fail the cartesian criterion".into())
    })
}

/// Writes `φ` as `∃_u σ` with `σ` singleton-valued: `J` lists the pairs
/// `(i, a)` with `a ∈ φ(i)` and `u` is the first projection.
pub fn decompose(phi: &DPredicate) -> (FunTable, DPredicate) {
    let mut u = Vec::new();
    let mut sigma = Vec::new();
    for (i, &v) in phi.values.iter().enumerate() {
        for a in bits(v) {
            u.push(i);
            sigma.push(1u64 << a);
        }
    }
    (
        FunTable::new(phi.index_size(), u).expect("indices in range"),
        DPredicate {
            base: phi.base,
            values: sigma,
        },
    )
}

/// `∀_u(φ ⇒ ψ)(i) = ⋂_{u(j) = i} {a : ∀b ∈ φ(j) ∃c ∈ ψ(j). (a ∧ b, c) ∈ @}`.
pub fn forall_impl(
    d: &DCompletion,
    at: &BinRel,
    w: &CartesianWitness,
    u: &FunTable,
    phi: &DPredicate,
    psi: &DPredicate,
) -> Result<DPredicate> {
    let n = d.base_size();
    if d.base().contains(at)?.is_none() {
        return Err(Error::NotInPreorder("@".into()));
    }
    if phi.index_size() != u.source() || psi.index_size() != u.source() {
        return Err(index_mismatch(u.source(), phi.index_size()));
    }
    let full = word_mask(n);
    let mut values = vec![full; u.target()];
    for (j, &i) in u.values().iter().enumerate() {
        let (pj, qj) = (phi.values[j], psi.values[j]);
        let ok = (0..n)
            .filter(|&a| bits(pj).all(|b| at.row(w.meet_of(a, b)) & qj != 0))
            .fold(0u64, |acc, a| acc | 1 << a);
        values[i] &= ok;
    }
    Ok(DPredicate {
        base: n,
        values,
    })
}

/// Default cap on the number of candidate maps `P(A) → A`.
pub const DEFAULT_ALGEBRA_CAP: u128 = 1 << 24;

/// Searches a left adjoint `α: P(A) → A` of `η`.
pub fn d_algebra_check(u: &UniformPreorder) -> Result<Option<FunTable>> {
    d_algebra_check_with(u, DEFAULT_ALGEBRA_CAP)
}

pub fn d_algebra_check_with(u: &UniformPreorder, cap: u128) -> Result<Option<FunTable>> {
    let n = u.size();
    let m = 1u32.checked_shl(n as u32).unwrap_or(u32::MAX);
    let size = (n as u128).checked_pow(m).unwrap_or(u128::MAX);
    if size > cap {
        return Err(Error::SearchSpaceTooLarge { size, cap });
    }
    let d = dcomplete(u)?;
    let eta = d.eta();
    let m = m as usize;
    let mut values = vec![0usize; m];
    if n == 0 {
        // P(∅) = {∅} has no map into the empty set.
        return Ok(None);
    }
    loop {
        let alpha = FunTable::new(n, values.clone())?;
        if check_monotone(&alpha, d.lifted(), u)?
            && check_adjunction(&alpha, &eta, d.lifted(), u)?.pass()
        {
            return Ok(Some(alpha));
        }
        // Next table in lexicographic order, last entry fastest.
        let mut k = m;
        loop {
            if k == 0 {
                return Ok(None);
            }
            k -= 1;
            values[k] += 1;
            if values[k] < n {
                break;
            }
            values[k] = 0;
        }
    }
}

fn index_mismatch(a: usize, b: usize) -> Error {
    Error::CarrierMismatch(format!("index sets of sizes {a} and {b} do not match"))
}

/// Bounded checks on the unit `η: A → PA` of the completion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaReport {
    /// Each `[g]` contains `{({a}, {a′}) : (a, a′) ∈ g}`.
    pub monotone: bool,
    /// `η∘φ ≤ η∘ψ` in the completion iff `φ ≤ ψ` in the base, for `|I| ≤ bound`.
    pub order_reflecting: bool,
    pub prime_singletons: LawResult,
    pub decomposition: LawResult,
}

impl EtaReport {
    pub fn pass(&self) -> bool {
        self.monotone
            && self.order_reflecting
            && self.prime_singletons.pass
            && self.decomposition.pass
    }
}

pub fn eta_checks(d: &DCompletion, cfg: &UniverseConfig) -> Result<EtaReport> {
    let n = d.base_size();
    let monotone = d.base().generators().iter().all(|g| {
        let mut r = BinRel::empty(1 << n, 1 << n);
        for (a, b) in g.rel.pairs() {
            r.insert(1 << a, 1 << b);
        }
        d.lifted().has(&r)
    });
    let base = FamOracle::new(d.base());
    let lifted = FamOracle::of_dcompletion(d);
    let eta = d.eta();
    let order_reflecting = (0..=cfg.max_index_size).all(|k| {
        let preds = maps_between(k, n);
        preds.iter().all(|phi| {
            preds.iter().all(|psi| {
                let lift = |f: &FunTable| -> Vec<usize> { f.values().iter().map(|&a| eta.apply(a)).collect() };
                let up = lifted.leq(&lift(phi), &lift(psi));
                up == base.leq(phi.values(), psi.values())
            })
        })
    });
    let auditor = Auditor::new(&lifted, *cfg)?;
    let mut primes = audit_enough_primes(d, &auditor)?.results.into_iter();
    let (Some(prime_singletons), Some(decomposition)) = (primes.next(), primes.next()) else {
        return Err(Error::Internal("enough-primes audit returned no results".into()));
    };
    Ok(EtaReport {
        monotone,
        order_reflecting,
        prime_singletons,
        decomposition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartesian::search_cartesian;
    use crate::testutil::*;
    use proptest::prelude::*;

    fn dp(base: usize, v: &[u64]) -> DPredicate {
        DPredicate::new(base, v.to_vec()).unwrap()
    }

    #[test]
    fn dcomplete_examples() {
        let d = dcomplete(&chain(2)).unwrap();
        assert_eq!(d.lifted().size(), 4);
        assert_eq!(d.lifted().generators().len(), 1);
        assert_eq!(d.lifted().generators()[0].name, "[leq]");

        let idl = lift(&BinRel::identity(3));
        for u in 0..8usize {
            for v in 0..8usize {
                assert_eq!(idl.contains(u, v), u & !v == 0);
            }
        }

        let one = UniformPreorder::discrete(Carrier::indexed(1));
        let d = dcomplete(&one).unwrap();
        assert_eq!(d.lifted().carrier().names(), ["{}", "{0}"]);
        let g = &d.lifted().generators()[0].rel;
        assert!(g.contains(0, 0) && g.contains(0, 1) && g.contains(1, 1));
        assert!(!g.contains(1, 0));
    }

    #[test]
    fn dcomplete_rejects_large_bases() {
        assert!(matches!(dcomplete(&chain(5)), Err(Error::CarrierTooLarge { .. })));
    }

    #[test]
    fn exists_examples() {
        let phi = dp(2, &[0b01, 0b10]);
        let u = FunTable::constant(2, 1, 0);
        assert_eq!(exists_along(&u, &phi).unwrap().values(), &[0b11]);
        assert_eq!(exists_along(&FunTable::identity(2), &phi).unwrap(), phi);
        let into_two = FunTable::new(2, vec![0]).unwrap();
        let e = exists_along(&into_two, &dp(2, &[0b10])).unwrap();
        assert_eq!(e.values(), &[0b10, 0]);
    }

    #[test]
    fn d_cartesian_examples() {
        let u = chain(2);
        let w = search_cartesian(&u).unwrap().unwrap();
        let d = dcomplete(&u).unwrap();
        let dw = d_cartesian(&d, &w).unwrap();
        assert_eq!(dw.meet_of(0b11, 0b10), 0b11);
        assert_eq!(dw.top, 0b10);
        for v in 0..4 {
            assert_eq!(dw.meet_of(0, v), 0);
        }

        let dia = diamond();
        let w = search_cartesian(&dia).unwrap().unwrap();
        let d = dcomplete(&dia).unwrap();
        let dw = d_cartesian(&d, &w).unwrap();
        for v in 0..16 {
            assert_eq!(dw.meet_of(v, dw.top), v);
        }
    }

    #[test]
    fn forall_impl_examples() {
        let u = chain(2);
        let w = search_cartesian(&u).unwrap().unwrap();
        let d = dcomplete(&u).unwrap();
        let at = leq_chain(2);
        let id1 = FunTable::identity(1);
        let r = forall_impl(&d, &at, &w, &id1, &dp(2, &[0b10]), &dp(2, &[0b01])).unwrap();
        assert_eq!(r.values(), &[0b01]);
        let r = forall_impl(&d, &at, &w, &id1, &dp(2, &[0]), &dp(2, &[0b01])).unwrap();
        assert_eq!(r.values(), &[0b11]);
        let empty = FunTable::new(1, vec![]).unwrap();
        let r = forall_impl(&d, &at, &w, &empty, &dp(2, &[]), &dp(2, &[])).unwrap();
        assert_eq!(r.values(), &[0b11]);
        let bad = BinRel::from_pairs(2, 2, [(1, 0)]).unwrap();
        assert!(matches!(
            forall_impl(&d, &bad, &w, &id1, &dp(2, &[0]), &dp(2, &[0])),
            Err(Error::NotInPreorder(_))
        ));
    }

    #[test]
    fn decomposition_examples() {
        let (u, s) = decompose(&dp(2, &[0]));
        assert_eq!((u.source(), s.index_size()), (0, 0));
        let (u, s) = decompose(&dp(2, &[0b11]));
        assert_eq!(u.values(), &[0, 0]);
        assert_eq!(s.values(), &[0b01, 0b10]);
    }

    #[test]
    fn d_algebra_examples() {
        let one = UniformPreorder::discrete(Carrier::indexed(1));
        assert!(d_algebra_check(&one).unwrap().is_some());
        let alpha = d_algebra_check(&chain(2)).unwrap().unwrap();
        assert_eq!(alpha.values(), &[0, 0, 1, 1]);
        let d2 = UniformPreorder::discrete(Carrier::indexed(2));
        assert!(d_algebra_check(&d2).unwrap().is_none());
    }

    #[test]
    fn d_order_matches_lifted_fiber_order() {
        for u in [chain(2), chain(3), id_swap(), random_uord(3, 2, 5), random_uord(3, 1, 9)] {
            let d = dcomplete(&u).unwrap();
            let m = 1u64 << u.size();
            for i in 0..=2u32 {
                let count = m.pow(i);
                let all: Vec<DPredicate> = (0..count)
                    .map(|mut c| {
                        let v = (0..i)
                            .map(|_| {
                                let x = c % m;
                                c /= m;
                                x
                            })
                            .collect();
                        DPredicate::new(u.size(), v).unwrap()
                    })
                    .collect();
                for p in &all {
                    for q in &all {
                        let direct = d.leq(p, q).unwrap().is_some();
                        let lifted = d
                            .lifted()
                            .fiber_leq(&p.as_lifted(), &q.as_lifted())
                            .unwrap()
                            .is_some();
                        assert_eq!(direct, lifted);
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn exists_is_left_adjoint_to_reindexing(
            seed in any::<u64>(),
            u in proptest::collection::vec(0usize..3, 0..=3),
            phi in proptest::collection::vec(0u64..8, 3),
            xi in proptest::collection::vec(0u64..8, 3),
        ) {
            let base = random_uord(3, 2, seed);
            let d = dcomplete(&base)?;
            let u = FunTable::new(3, u)?;
            let phi = DPredicate::new(3, phi[..u.source()].to_vec())?;
            let xi = DPredicate::new(3, xi)?;
            let lhs = d.leq(&exists_along(&u, &phi)?, &xi)?.is_some();
            let rhs = d.leq(&phi, &xi.reindex(&u)?)?.is_some();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn eta_examples() {
        let cfg = UniverseConfig { max_index_size: 2, ..UniverseConfig::default() };
        for u in [chain(2), UniformPreorder::discrete(Carrier::indexed(2)), id_swap()] {
            let d = dcomplete(&u).unwrap();
            let r = eta_checks(&d, &cfg).unwrap();
            assert!(r.pass(), "{r:?}");
        }
        let d = dcomplete(&chain(2)).unwrap();
        let lifted = FamOracle::of_dcompletion(&d);
        assert!(lifted.leq(&[0b01], &[0b10]));
        assert!(!lifted.leq(&[0b10], &[0b01]));
        let (u, sigma) = decompose(&DPredicate::new(2, vec![0b11]).unwrap());
        assert_eq!(u.source(), 2);
        assert_eq!(sigma.values(), &[0b01, 0b10]);
        let (u, _) = decompose(&DPredicate::new(2, vec![0, 0]).unwrap());
        assert_eq!(u.source(), 0);
    }
}
