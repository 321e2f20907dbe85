//! One PASS/FAIL line per acceptance criterion. Each check compares the
//! library against a brute-force oracle written here.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uniform_preorders::cartesian::search_cartesian;
use uniform_preorders::corpus::{
    all_uords, meet_semilattices, random_cartesian, random_mixed, random_uord, CorpusEntry,
    RandomCorpusConfig,
};
use uniform_preorders::dcompletion::{
    dcomplete, eta_checks, forall_impl, subset_meet, DCompletion, DPredicate,
};
use uniform_preorders::logicaudit::{
    is_discrete, maps_between, Auditor, FamOracle, FiberOracle, UniverseConfig,
};
use uniform_preorders::pca::{
    bracket_abstract, check_abstraction, dco_to_rpca, random_polynomial, rpca_to_dco,
    ObligationReport, Opas, SkPca, SkTerm,
};
use uniform_preorders::relcomplete::{check_relational_completeness, cross_validate};
use uniform_preorders::relcore::{classify, BinRel, Carrier, FunTable};
use uniform_preorders::uord::{check_adjunction, check_monotone, UniformPreorder};
use uniform_preorders::Result;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn bound(k: usize) -> UniverseConfig {
    UniverseConfig {
        max_index_size: k,
        ..UniverseConfig::default()
    }
}

/// Lattices on ≤ 4 points, 100 default random cartesian entries and 20
/// random entries with several generators.
fn theorem_corpus() -> Result<Vec<CorpusEntry>> {
    let mut c = meet_semilattices(4)?;
    c.extend(random_cartesian(&RandomCorpusConfig::default())?);
    let mut multi = random_cartesian(&RandomCorpusConfig {
        count: 20,
        min_size: 3,
        min_relations: 2,
        max_relations: 5,
        min_generators: 2,
        seed: 8,
        ..RandomCorpusConfig::default()
    })?;
    for (i, e) in multi.iter_mut().enumerate() {
        e.name = format!("multi{i}");
    }
    c.extend(multi);
    Ok(c)
}

fn criterion_1() -> Result<Outcome> {
    let start = Instant::now();
    let corpus = theorem_corpus()?;
    let report = cross_validate(&corpus, &bound(3))?;
    let elapsed = start.elapsed();
    let dis = report.disagreements();
    let in_time = elapsed < Duration::from_secs(300);
    outcome(
        dis.is_empty() && in_time && corpus.len() >= 105,
        format!(
            "{} entries, {} relationally complete, {} not, {} disagreements, {:.1}s",
            report.entries.len(),
            report.positives(),
            report.entries.len() - report.positives(),
            dis.len(),
            elapsed.as_secs_f64()
        ),
    )
}

/// Whether two finite posets, given as `leq[i][j]`, are isomorphic.
fn order_isomorphic(x: &[Vec<bool>], y: &[Vec<bool>]) -> bool {
    fn extend(x: &[Vec<bool>], y: &[Vec<bool>], map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let i = map.len();
        if i == x.len() {
            return true;
        }
        for j in 0..y.len() {
            if used[j] {
                continue;
            }
            let ok = (0..i).all(|p| x[p][i] == y[map[p]][j] && x[i][p] == y[j][map[p]])
                && x[i][i] == y[j][j];
            if ok {
                map.push(j);
                used[j] = true;
                if extend(x, y, map, used) {
                    return true;
                }
                map.pop();
                used[j] = false;
            }
        }
        false
    }
    x.len() == y.len() && extend(x, y, &mut Vec::new(), &mut vec![false; y.len()])
}

fn criterion_2() -> Result<Outcome> {
    let mut details = Vec::new();
    let mut pass = true;
    for e in meet_semilattices(4)? {
        let n = e.uord.size();
        let leq = &e.uord.generators()[0].rel;
        let d = dcomplete(&e.uord)?;
        let oracle = FamOracle::of_dcompletion(&d);
        let aud = Auditor::new(&oracle, bound(1))?;
        let classes = aud.fiber_classes(1);
        let refl: Vec<Vec<bool>> = (0..classes)
            .map(|a| (0..classes).map(|b| aud.class_leq(1, a, b)).collect())
            .collect();
        let downsets: Vec<u64> = (0..1u64 << n)
            .filter(|&m| (0..n).all(|b| m >> b & 1 == 0 || (0..n).all(|a| !leq.contains(a, b) || m >> a & 1 == 1)))
            .collect();
        let incl: Vec<Vec<bool>> = downsets
            .iter()
            .map(|&a| downsets.iter().map(|&b| a & !b == 0).collect())
            .collect();
        let iso = order_isomorphic(&refl, &incl);
        pass &= iso;
        details.push(format!("{}:{}/{}", e.name, classes, downsets.len()));
    }
    outcome(pass, details.join(" "))
}

fn small_bases() -> Result<Vec<(String, UniformPreorder)>> {
    let mut out: Vec<(String, UniformPreorder)> = meet_semilattices(3)?
        .into_iter()
        .map(|e| (e.name, e.uord))
        .collect();
    for n in 1..=3 {
        out.push((format!("discrete{n}"), UniformPreorder::discrete(Carrier::indexed(n))));
    }
    out.extend(random_mixed(12, 3, 31)?);
    Ok(out)
}

fn criterion_3() -> Result<Outcome> {
    let cfg = bound(3);
    let mut pass = true;
    let mut failures = Vec::new();
    let bases = small_bases()?;
    for (name, u) in &bases {
        let d = dcomplete(u)?;
        let r = eta_checks(&d, &cfg)?;
        if !r.pass() {
            pass = false;
            failures.push(name.clone());
        }
        let oracle = FamOracle::of_dcompletion(&d);
        let aud = Auditor::new(&oracle, cfg)?;
        if aud.is_exists_prime(&[0])?.prime {
            pass = false;
            failures.push(format!("{name}: empty predicate passed"));
        }
    }
    outcome(
        pass,
        format!("{} bases, failures: {:?}", bases.len(), failures),
    )
}

fn criterion_4() -> Result<Outcome> {
    let mut corpus = small_bases()?;
    corpus.extend(random_mixed(60, 3, 4)?);
    for (i, u) in all_uords(2)?.into_iter().enumerate() {
        corpus.push((format!("two{i}"), u));
    }
    let cfg = UniverseConfig::default();
    let (mut agree, mut dcos) = (0, 0);
    for (_, u) in &corpus {
        let id: Vec<usize> = (0..u.size()).collect();
        let discrete = is_discrete(&FamOracle::new(u), &id, 4, &cfg)?.discrete;
        let dco = u.generators().iter().all(|g| classify(&g.rel).single_valued);
        dcos += dco as usize;
        agree += (discrete == dco) as usize;
    }
    outcome(
        agree == corpus.len() && dcos > 0 && dcos < corpus.len(),
        format!(
            "{agree}/{} agree ({dcos} DCOs, {} non-DCOs)",
            corpus.len(),
            corpus.len() - dcos
        ),
    )
}

/// `g∘h` is a greatest `φ` with `f∘φ ≤ h`, for every `h: I → B`, `|I| ≤ 3`.
fn adjoint_by_fibers(f: &FunTable, g: &FunTable, a: &UniformPreorder, b: &UniformPreorder) -> bool {
    let (oa, ob) = (FamOracle::new(a), FamOracle::new(b));
    (0..=3).all(|k| {
        let phis = maps_between(k, a.size());
        maps_between(k, b.size()).iter().all(|h| {
            let gh: Vec<usize> = h.values().iter().map(|&x| g.apply(x)).collect();
            let below = |phi: &[usize]| {
                let fphi: Vec<usize> = phi.iter().map(|&x| f.apply(x)).collect();
                ob.leq(&fphi, h.values())
            };
            below(&gh) && phis.iter().all(|p| !below(p.values()) || oa.leq(p.values(), &gh))
        })
    })
}

fn criterion_5() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let lattices: Vec<UniformPreorder> = meet_semilattices(3)?.into_iter().map(|e| e.uord).collect();
    let pick = |rng: &mut ChaCha8Rng| -> Result<UniformPreorder> {
        if rng.gen_bool(0.5) {
            Ok(lattices[rng.gen_range(0..lattices.len())].clone())
        } else {
            let n = rng.gen_range(1..=3);
            let k = rng.gen_range(1..=2);
            random_uord(rng, n, k, 0.3)
        }
    };
    let (mut pairs, mut agree, mut adjoint) = (0, 0, 0);
    while pairs < 300 {
        let a = pick(&mut rng)?;
        let b = pick(&mut rng)?;
        let f = FunTable::new(b.size(), (0..a.size()).map(|_| rng.gen_range(0..b.size())).collect())?;
        if !check_monotone(&f, &a, &b)? {
            continue;
        }
        let g = FunTable::new(a.size(), (0..b.size()).map(|_| rng.gen_range(0..a.size())).collect())?;
        pairs += 1;
        let fast = check_adjunction(&f, &g, &a, &b)?.pass();
        adjoint += fast as usize;
        agree += (fast == adjoint_by_fibers(&f, &g, &a, &b)) as usize;
    }
    outcome(
        agree == pairs && adjoint > 0 && adjoint < pairs,
        format!("{agree}/{pairs} agree ({adjoint} adjunctions)"),
    )
}

fn criterion_6() -> Result<Outcome> {
    let corpus: Vec<CorpusEntry> = theorem_corpus()?
        .into_iter()
        .filter(|e| e.uord.size() <= 3)
        .collect();
    let mut failures = Vec::new();
    let mut squares = 0;
    let mut frobenius = 0;
    for e in &corpus {
        let d = dcomplete(&e.uord)?;
        let oracle = FamOracle::of_dcompletion(&d);
        let r = Auditor::new(&oracle, bound(3))?.exists();
        for law in ["exists.beck_chevalley", "exists.frobenius"] {
            match r.law(law) {
                Some(l) if l.pass && !l.skipped => {
                    if law.ends_with("chevalley") {
                        squares += l.checked;
                    } else {
                        frobenius += l.checked;
                    }
                }
                _ => failures.push(format!("{}:{law}", e.name)),
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{} bases, {squares} square instances, {frobenius} Frobenius instances, failures: {:?}",
            corpus.len(),
            failures
        ),
    )
}

fn criterion_7() -> Result<Outcome> {
    let o = SkPca::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let names = ["x1", "x2", "y"];
    let mut total = ObligationReport::default();
    let polys = 50;
    for i in 0..polys {
        let nv = 1 + i % 3;
        let vars: Vec<&str> = names[3 - nv..].to_vec();
        let depth = rng.gen_range(1..=4);
        let p = random_polynomial(&mut rng, &vars, depth);
        let e = bracket_abstract(&o, &p, &vars)?;
        let samples: Vec<Vec<SkTerm>> = (0..20)
            .map(|_| vars.iter().map(|_| o.sample(&mut rng)).collect())
            .collect();
        total.merge(check_abstraction(&o, &p, &vars, &e, &samples, 10_000)?);
    }
    let rate = total.inconclusive as f64 / total.probes as f64;
    outcome(
        total.violations == 0 && rate < 0.05,
        format!(
            "{polys} polynomials, {} probes, {} violations, {:.2}% out of budget",
            total.probes,
            total.violations,
            100.0 * rate
        ),
    )
}

/// The greatest `ξ` over `I` with `u*ξ ∧ φ ≤ ψ`, by scanning all of them.
fn brute_forall(
    d: &DCompletion,
    w: &uniform_preorders::cartesian::CartesianWitness,
    u: &FunTable,
    phi: &DPredicate,
    psi: &DPredicate,
) -> Result<Vec<DPredicate>> {
    let n = d.base_size();
    let mut sols = Vec::new();
    for code in 0..(1usize << n).pow(u.target() as u32) {
        let vals: Vec<u64> = (0..u.target())
            .map(|i| ((code >> (i * n)) & ((1 << n) - 1)) as u64)
            .collect();
        let xi = DPredicate::new(n, vals)?;
        let pulled = xi.reindex(u)?;
        let meet: Vec<u64> = (0..u.source())
            .map(|j| subset_meet(w, pulled.at(j), phi.at(j)))
            .collect();
        if d.leq(&DPredicate::new(n, meet)?, psi)?.is_some() {
            sols.push(xi);
        }
    }
    Ok(sols)
}

fn criterion_8() -> Result<Outcome> {
    let mut checked = 0u64;
    let mut wrong = 0u64;
    let mut bases = 0;
    for n in 1..=2 {
        for u in all_uords(n)? {
            let Some(w) = search_cartesian(&u)? else { continue };
            let Some(rc) = check_relational_completeness(&u, &w)? else { continue };
            bases += 1;
            let d = dcomplete(&u)?;
            let preds = |k: usize| -> Result<Vec<DPredicate>> {
                (0..(1usize << n).pow(k as u32))
                    .map(|code| {
                        DPredicate::new(
                            n,
                            (0..k).map(|i| ((code >> (i * n)) & ((1 << n) - 1)) as u64).collect(),
                        )
                    })
                    .collect()
            };
            for j in 0..=2 {
                for i in 0..=2 {
                    for uu in maps_between(j, i) {
                        let pj = preds(j)?;
                        for phi in &pj {
                            for psi in &pj {
                                checked += 1;
                                let got = forall_impl(&d, &rc.at, &w, &uu, phi, psi)?;
                                let sols = brute_forall(&d, &w, &uu, phi, psi)?;
                                let greatest = sols.contains(&got)
                                    && sols.iter().all(|x| d.leq(x, &got).map(|r| r.is_some()).unwrap_or(false));
                                wrong += (!greatest) as u64;
                            }
                        }
                    }
                }
            }
        }
    }
    outcome(
        wrong == 0 && bases > 0,
        format!("{bases} bases, {checked} instances, {wrong} mismatches"),
    )
}

fn criterion_9() -> Result<Outcome> {
    let one = UniformPreorder::discrete(Carrier::indexed(1));
    let w = search_cartesian(&one)?.expect("singleton is cartesian");
    let rc = check_relational_completeness(&one, &w)?.expect("singleton is complete");
    let r = dco_to_rpca(&one, &w, &rc)?;
    let back = rpca_to_dco(&r)?;
    let same: Vec<&BinRel> = back.generators().iter().map(|g| &g.rel).collect();
    let orig: Vec<&BinRel> = one.generators().iter().map(|g| &g.rel).collect();
    outcome(
        same == orig,
        format!("generators {:?} -> {:?}", orig.len(), same.len()),
    )
}

fn main() -> ExitCode {
    type Criterion = fn() -> Result<Outcome>;
    let criteria: [(&str, Criterion); 9] = [
        ("completeness cross-validation", criterion_1),
        ("down-set frame correspondence", criterion_2),
        ("primal existential completion", criterion_3),
        ("DCO iff discrete generic", criterion_4),
        ("adjunction criterion", criterion_5),
        ("Beck-Chevalley and Frobenius", criterion_6),
        ("combinatory completeness", criterion_7),
        ("forall formula agreement", criterion_8),
        ("bridge round trip", criterion_9),
    ];
    let mut failed = 0;
    let mut times = HashMap::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        times.insert(i + 1, start.elapsed());
        println!(
            "{} criterion {}: {name} ({detail}) [{:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            times[&(i + 1)].as_secs_f64()
        );
        failed += (!pass) as usize;
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
