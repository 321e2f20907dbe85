use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use uniform_preorders::cartesian::search_cartesian;
use uniform_preorders::corpus::random_uord;
use uniform_preorders::dcompletion::{decompose, dcomplete, exists_along, DPredicate};
use uniform_preorders::logicaudit::{audit_tripos, Auditor, FamOracle, UniverseConfig};
use uniform_preorders::pca::{
    bracket_abstract, eval_term, random_polynomial, random_sk, whnf, Eval, SkPca,
};
use uniform_preorders::relcomplete::{check_relational_completeness, validate_witness};
use uniform_preorders::relcore::{BinRel, Carrier, FunTable};
use uniform_preorders::uord::{Basis, NamedRel, UniformPreorder};

fn cfg(bound: usize) -> UniverseConfig {
    UniverseConfig {
        max_index_size: bound,
        ..UniverseConfig::default()
    }
}

fn uord_from_seed(seed: u64, n: usize) -> UniformPreorder {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_uord(&mut rng, n, 1 + (seed % 2) as usize, 0.3).unwrap()
}

fn relabel(u: &UniformPreorder, p: &[usize]) -> UniformPreorder {
    let n = u.size();
    let rels = u
        .generators()
        .iter()
        .map(|g| {
            let mut r = BinRel::empty(n, n);
            for (a, b) in g.rel.pairs() {
                r.insert(p[a], p[b]);
            }
            NamedRel::new(g.name.clone(), r)
        })
        .collect();
    UniformPreorder::from_basis(Basis::new(Carrier::indexed(n), rels).unwrap(), false).unwrap()
}

fn verdicts(u: &UniformPreorder) -> Vec<(String, bool, bool)> {
    let mut oracle = FamOracle::new(u);
    if let Some(w) = search_cartesian(u).unwrap() {
        oracle = oracle.with_meets(&w);
    }
    audit_tripos(&oracle, &cfg(2))
        .unwrap()
        .results
        .into_iter()
        .map(|l| (l.law, l.pass, l.skipped))
        .collect()
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn seeded(max_n: usize) -> impl Strategy<Value = (u64, Vec<usize>)> {
    (1..=max_n, any::<u64>()).prop_flat_map(|(n, seed)| (Just(seed), permutation(n)))
}

fn predicate(n: usize, k: usize) -> impl Strategy<Value = DPredicate> {
    proptest::collection::vec(0u64..(1 << n), k).prop_map(move |v| DPredicate::new(n, v).unwrap())
}

fn map(j: usize, i: usize) -> impl Strategy<Value = FunTable> {
    proptest::collection::vec(0..i, j).prop_map(move |v| FunTable::new(i, v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn law_verdicts_survive_relabeling((seed, p) in seeded(3)) {
        let u = uord_from_seed(seed, p.len());
        prop_assert_eq!(verdicts(&u), verdicts(&relabel(&u, &p)));
    }

    #[test]
    fn relational_completeness_survives_relabeling((seed, p) in seeded(3)) {
        let u = uord_from_seed(seed, p.len());
        let v = relabel(&u, &p);
        let (Some(wu), Some(wv)) = (search_cartesian(&u).unwrap(), search_cartesian(&v).unwrap()) else {
            prop_assert_eq!(search_cartesian(&u).unwrap().is_some(), search_cartesian(&v).unwrap().is_some());
            return Ok(());
        };
        let ru = check_relational_completeness(&u, &wu).unwrap();
        let rv = check_relational_completeness(&v, &wv).unwrap();
        prop_assert_eq!(ru.is_some(), rv.is_some());
        if let Some(r) = ru {
            prop_assert!(validate_witness(&u, &wu, &r).unwrap());
        }
    }

    #[test]
    fn reported_counterexamples_still_fail((seed, p) in seeded(3)) {
        let u = uord_from_seed(seed, p.len());
        let oracle = FamOracle::new(&u);
        let aud = Auditor::new(&oracle, cfg(2)).unwrap();
        let report = aud.tripos(&Default::default());
        for law in report.failures() {
            if let Some(ce) = &law.counterexample {
                prop_assert!(aud.recheck(ce, None).unwrap(), "{} no longer fails", ce.law);
            }
        }
    }

    #[test]
    fn exists_is_left_adjoint_to_reindexing(
        (n, u, phi, psi) in (1usize..=3, 0usize..=3, 1usize..=3).prop_flat_map(|(n, j, i)| {
            (Just(n), map(j, i), predicate(n, j), predicate(n, i))
        }),
        seed in any::<u64>(),
    ) {
        let d = dcomplete(&uord_from_seed(seed, n)).unwrap();
        let left = d.leq(&exists_along(&u, &phi).unwrap(), &psi).unwrap().is_some();
        let right = d.leq(&phi, &psi.reindex(&u).unwrap()).unwrap().is_some();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn predicates_decompose_over_singletons(phi in (1usize..=3, 0usize..=3).prop_flat_map(|(n, k)| predicate(n, k))) {
        let (u, sigma) = decompose(&phi);
        prop_assert!(sigma.is_singleton_valued());
        prop_assert_eq!(exists_along(&u, &sigma).unwrap(), phi);
    }

    #[test]
    fn evaluation_is_monotone_in_budget(seed in any::<u64>(), b in 0u64..200, extra in 0u64..2000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_sk(&mut rng, 8);
        let (mut s1, mut s2) = (b, b + extra);
        match (whnf(&t, &mut s1), whnf(&t, &mut s2)) {
            (Eval::Defined(x), later) => prop_assert_eq!(later, Eval::Defined(x)),
            (Eval::OutOfBudget, _) => {}
            (Eval::Undefined, later) => prop_assert_eq!(later, Eval::Undefined),
        }
    }

    #[test]
    fn abstraction_is_closed(seed in any::<u64>(), nv in 1usize..=3, depth in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vars = &["x", "y", "z"][..nv];
        let p = random_polynomial(&mut rng, vars, depth);
        let e = bracket_abstract(&SkPca::default(), &p, vars).unwrap();
        prop_assert!(e.free_vars().is_empty());
        let value = eval_term(&SkPca::default(), &e, &Default::default(), 10_000).unwrap();
        prop_assert!(value.is_defined());
    }
}
