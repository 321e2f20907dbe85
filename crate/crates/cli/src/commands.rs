//! One function per subcommand, each delegating to the library.

use std::collections::HashMap;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use uniform_preorders::cartesian::{diagnose_cartesian, search_cartesian, CartesianFailure, CartesianWitness};
use uniform_preorders::corpus::{meet_semilattices, random_cartesian, RandomCorpusConfig};
use uniform_preorders::dcompletion::{
    d_algebra_check, d_cartesian, dcomplete, decompose, eta_checks, exists_along, subset_name,
    DCompletion, DPredicate,
};
use uniform_preorders::logicaudit::{
    audit_enough_primes, is_discrete, maps_between, recheck_discrete, Auditor, AuditReport,
    Counterexample, FamOracle, FiberOracle, LawResult, TriposOptions, UniverseConfig,
};
use uniform_preorders::pca::{
    bracket_abstract, check_abstraction, check_combinators, dco_to_rpca, eval_term, parse_term,
    polynomial_in_rn_check, realizer, resolve_sk, rpca_to_dco, Eval, Filter, Opas, Realized,
    RelPca, SampleConfig, SkPca, SkRealizability, SkTerm, Strength, TableOpas, Term,
};
use uniform_preorders::relcomplete::{check_relational_completeness, cross_validate, validate_witness};
use uniform_preorders::relcore::{classify, map_image, pair_graph, BinRel, Carrier, FunTable};
use uniform_preorders::uord::{check_adjunction, non_monotone_generator, UniformPreorder};

use crate::input::{self, InputError, Loaded};
use crate::report::{digest, Entry, Report};
use crate::{Cmd, Config};

pub struct Ctx {
    pub cfg: Config,
    pub recheck: bool,
}

impl Ctx {
    fn universe(&self) -> UniverseConfig {
        UniverseConfig {
            max_index_size: self.cfg.max_index,
            enumeration_cap: self.cfg.enumeration_cap,
            sample_seed: self.cfg.seed,
        }
    }

    fn recheck(&self, entry: &mut Entry, f: impl FnOnce() -> Result<bool, InputError>) -> Result<(), InputError> {
        if self.recheck {
            entry.recheck = Some(f()?);
        }
        Ok(())
    }
}

type CmdResult = Result<Report, InputError>;

fn new_report(name: &str, ctx: &Ctx, inputs: &[&Loaded]) -> Report {
    let parts: Vec<&[u8]> = inputs.iter().map(|l| l.bytes.as_slice()).collect();
    Report::new(name, digest(&parts), serde_json::to_value(&ctx.cfg).expect("config serializes"))
}

pub fn run(cmd: &Cmd, name: &str, ctx: &Ctx) -> CmdResult {
    match cmd {
        Cmd::Validate { file } => validate(name, ctx, file),
        Cmd::Saturate { file } => saturate(name, ctx, file),
        Cmd::Leq { file, phi, psi } => leq(name, ctx, file, phi, psi),
        Cmd::Monotone { file, target, map } => monotone(name, ctx, file, target.as_deref(), map),
        Cmd::Adjunction { file, target, f, g } => adjunction(name, ctx, file, target.as_deref(), f, g),
        Cmd::Cartesian { file, search } => cartesian(name, ctx, file, *search),
        Cmd::Dcomplete { file } => dcompletion(name, ctx, file),
        Cmd::Relcomp { file } => relcomp(name, ctx, file),
        Cmd::Dco { file } => dco(name, ctx, file),
        Cmd::Discrete { file, delta, span } => discrete(name, ctx, file, delta.as_deref(), *span),
        Cmd::Prime { file, pi } => prime(name, ctx, file, pi),
        Cmd::Audit {
            file,
            tripos,
            rtr_char,
            dcomplete,
        } => audit(name, ctx, file, *tripos, *rtr_char, *dcomplete),
        Cmd::Dalgebra { file } => dalgebra(name, ctx, file),
        Cmd::PcaEval { file, term } => pca_eval(name, ctx, file, term),
        Cmd::PcaCompile { file, term, vars } => pca_compile(name, ctx, file, term, vars),
        Cmd::PcaCheck { file } => pca_check(name, ctx, file),
        Cmd::Bridge {
            file,
            to_rpca,
            phi,
            psi,
            polynomial,
            vars,
            ..
        } => {
            if *to_rpca {
                bridge_to_rpca(name, ctx, file, polynomial.as_deref(), vars.as_deref())
            } else {
                bridge_to_dco(name, ctx, file, phi.as_deref().zip(psi.as_deref()))
            }
        }
        Cmd::Corpus {
            semilattices_upto,
            random,
        } => corpus(name, ctx, *semilattices_upto, *random),
    }
}

fn pairs_json(r: &BinRel, src: &Carrier, tgt: &Carrier) -> Value {
    r.pairs()
        .map(|(a, b)| json!([src.name(a), tgt.name(b)]))
        .collect()
}

fn generators_json(u: &UniformPreorder) -> Value {
    u.generators()
        .iter()
        .map(|g| json!({"name": g.name, "pairs": pairs_json(&g.rel, u.carrier(), u.carrier())}))
        .collect()
}

fn names(c: &Carrier, values: &[usize]) -> Value {
    values.iter().map(|&v| c.name(v)).collect()
}

fn map_json(f: &FunTable) -> Value {
    json!({"source": f.source(), "target": f.target(), "values": f.values()})
}

fn counterexample_json(ce: &Counterexample, render: &dyn Fn(&[usize]) -> Value) -> Value {
    json!({
        "law": ce.law,
        "index_size": ce.index_size,
        "maps": ce.maps.iter().map(map_json).collect::<Vec<_>>(),
        "predicates": ce.predicates.iter().map(|p| render(p)).collect::<Vec<_>>(),
        "note": ce.note,
    })
}

fn law_entry(l: &LawResult, render: &dyn Fn(&[usize]) -> Value) -> Entry {
    let mut e = Entry::new(l.pass && !l.skipped).with("checked", l.checked);
    if l.skipped {
        e = e.with("skipped", true);
    }
    if let Some(note) = &l.note {
        e = e.with("note", note.clone());
    }
    if let Some(ce) = &l.counterexample {
        e = e.with("counterexample", counterexample_json(ce, render));
    }
    e
}

/// Renders predicates of `fam(D)` as lists of subsets.
fn subset_renderer(c: &Carrier) -> impl Fn(&[usize]) -> Value + '_ {
    move |p| p.iter().map(|&m| Value::from(subset_name(c, m as u64))).collect()
}

fn element_renderer(c: &Carrier) -> impl Fn(&[usize]) -> Value + '_ {
    move |p| names(c, p)
}

fn load(path: &Path) -> Result<Loaded, InputError> {
    input::load(path)
}

fn cartesian_witness(l: &Loaded, u: &UniformPreorder) -> Result<Option<CartesianWitness>, InputError> {
    Ok(match l.meet_top()? {
        Some((meet, top)) => diagnose_cartesian(u, &meet, top)?.ok(),
        None => search_cartesian(u)?,
    })
}

fn validate(name: &str, ctx: &Ctx, file: &Path) -> CmdResult {
    let l = load(file)?;
    let mut r = new_report(name, ctx, &[&l]);
    if l.is_sk() {
        r.add("structure", Entry::new(true).with("pca", "sk"));
        return Ok(r);
    }
    let u = l.uord(ctx.cfg.auto_reflexive)?;
    let gens: Vec<&str> = u.generators().iter().map(|g| g.name.as_str()).collect();
    r.add(
        "structure",
        Entry::new(true)
            .with("size", u.size())
            .with("generators", json!(gens)),
    );
    if let Some((meet, top)) = l.meet_top()? {
        let e = cartesian_entry(&u, &meet, top)?;
        let pass = e.pass;
        let e = r.add("cartesian", e);
        ctx.recheck(e, || recheck_cartesian(&u, &meet, top, pass))?;
    }
    if l.file.pca.as_ref().is_some_and(|p| p.table.is_some()) {
        let p = l.table_pca()?;
        r.add("pca", Entry::new(true).with("size", p.opas.size()));
    }
    Ok(r)
}

fn saturate(name: &str, ctx: &Ctx, file: &Path) -> CmdResult {
    let l = load(file)?;
    let u = l.uord(ctx.cfg.auto_reflexive)?;
    let mut r = new_report(name, ctx, &[&l]);
    let e = r.add("saturate", Entry::new(true).with("generators", generators_json(&u)));
    ctx.recheck(e, || {
        // Each generator is in R, and no generator contains another.
        let g = u.generators();
        Ok(g.iter().enumerate().all(|(i, a)| {
            u.contains(&a.rel).is_ok_and(|w| w.is_some())
                && g.iter().enumerate().all(|(j, b)| i == j || !a.rel.is_subset(&b.rel))
        }))
    })?;
    Ok(r)
}

fn leq(name: &str, ctx: &Ctx, file: &Path, phi: &str, psi: &str) -> CmdResult {
    let l = load(file)?;
    let u = l.uord(ctx.cfg.auto_reflexive)?;
    let phi = input::predicate(&l, "phi", phi)?;
    let psi = input::predicate(&l, "psi", psi)?;
    let w = u.fiber_leq(&phi, &psi)?;
    let mut r = new_report(name, ctx, &[&l]);
    let mut e = Entry::new(w.is_some());
    if let Some(w) = &w {
        e = e.with("witness", json!({"generator": w.name}));
    }
    let e = r.add("leq", e);
    ctx.recheck(e, || {
        let graph = pair_graph(&phi, &psi)?;
        Ok(match &w {
            Some(w) => u
                .generators()
                .iter()
                .any(|g| g.name == w.name && graph.is_subset(&g.rel)),
            None => u.generators().iter().all(|g| !graph.is_subset(&g.rel)),
        })
    })?;
    Ok(r)
}

fn target_of(file: &Path, target: Option<&Path>) -> Result<(Loaded, Option<Loaded>), InputError> {
    let src = load(file)?;
    let tgt = target.map(load).transpose()?;
    Ok((src, tgt))
}

fn monotone(name: &str, ctx: &Ctx, file: &Path, target: Option<&Path>, map: &str) -> CmdResult {
    let (sl, tl) = target_of(file, target)?;
    let tl_ref = tl.as_ref().unwrap_or(&sl);
    let src = sl.uord(ctx.cfg.auto_reflexive)?;
    let tgt = tl_ref.uord(ctx.cfg.auto_reflexive)?;
    let f = input::map(&sl, tl_ref, "map", map)?;
    let bad = non_monotone_generator(&f, &src, &tgt)?.cloned();
    let mut r = new_report(name, ctx, &[&sl, tl_ref]);
    let mut e = Entry::new(bad.is_none());
    if let Some(g) = &bad {
        let image = map_image(&f, &f, &g.rel)?;
        e = e.with(
            "counterexample",
            json!({"generator": g.name, "image": pairs_json(&image, tgt.carrier(), tgt.carrier())}),
        );
    }
    let e = r.add("monotone", e);
    ctx.recheck(e, || {
        Ok(match &bad {
            Some(g) => tgt.contains(&map_image(&f, &f, &g.rel)?)?.is_none(),
            None => src
                .generators()
                .iter()
                .all(|g| map_image(&f, &f, &g.rel).is_ok_and(|m| tgt.contains(&m).is_ok_and(|w| w.is_some()))),
        })
    })?;
    Ok(r)
}

/// `g∘h` is the greatest `φ` with `f∘φ ≤ h` for every `h: I → B`, `|I| ≤ bound`.
fn adjoint_on_fibers(f: &FunTable, g: &FunTable, a: &UniformPreorder, b: &UniformPreorder, bound: usize) -> bool {
    let (oa, ob) = (FamOracle::new(a), FamOracle::new(b));
    (0..=bound).all(|k| {
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

fn adjunction(name: &str, ctx: &Ctx, file: &Path, target: Option<&Path>, f: &str, g: &str) -> CmdResult {
    let (sl, tl) = target_of(file, target)?;
    let tl_ref = tl.as_ref().unwrap_or(&sl);
    let src = sl.uord(ctx.cfg.auto_reflexive)?;
    let tgt = tl_ref.uord(ctx.cfg.auto_reflexive)?;
    let f = input::map(&sl, tl_ref, "f", f)?;
    let g = input::map(tl_ref, &sl, "g", g)?;
    let rep = check_adjunction(&f, &g, &src, &tgt)?;
    let mut r = new_report(name, ctx, &[&sl, tl_ref]);
    r.add("adjunction.counit", Entry::new(rep.counit));
    for (s, ok) in &rep.transforms {
        r.add(format!("adjunction.transform[{s}]"), Entry::new(*ok));
    }
    if ctx.recheck {
        let agrees = adjoint_on_fibers(&f, &g, &src, &tgt, ctx.cfg.max_index) == rep.pass();
        for e in r.results.values_mut() {
            e.recheck = Some(agrees);
        }
    }
    Ok(r)
}

fn cartesian_entry(u: &UniformPreorder, meet: &FunTable, top: usize) -> Result<Entry, InputError> {
    let c = u.carrier();
    Ok(match diagnose_cartesian(u, meet, top)? {
        Ok(w) => Entry::new(true).with("witness", input::witness_json(c, &w)),
        Err(fail) => {
            let rel = match &fail {
                CartesianFailure::Top(r) | CartesianFailure::Left(r) | CartesianFailure::Right(r) => r,
                CartesianFailure::Pairing { rel, .. } => rel,
            };
            let mut ce = json!({"condition": fail.condition(), "relation": pairs_json(rel, c, c)});
            if let CartesianFailure::Pairing { left, right, .. } = &fail {
                ce["generators"] = json!([left, right]);
            }
            Entry::new(false).with("counterexample", ce)
        }
    })
}

fn recheck_cartesian(u: &UniformPreorder, meet: &FunTable, top: usize, pass: bool) -> Result<bool, InputError> {
    Ok(match diagnose_cartesian(u, meet, top)? {
        Ok(_) => pass,
        Err(fail) => {
            let rel = match &fail {
                CartesianFailure::Top(r) | CartesianFailure::Left(r) | CartesianFailure::Right(r) => r,
                CartesianFailure::Pairing { rel, .. } => rel,
            };
            !pass && u.contains(rel)?.is_none()
        }
    })
}

fn cartesian(name: &str, ctx: &Ctx, file: &Path, search: bool) -> CmdResult {
    let l = load(file)?;
    let u = l.uord(ctx.cfg.auto_reflexive)?;
    let mut r = new_report(name, ctx, &[&l]);
    let given = if search { None } else { l.meet_top()? };
    let (meet, top) = match given {
        Some(mt) => mt,
        None if search => match search_cartesian(&u)? {
            Some(w) => (w.meet, w.top),
            None => {
                r.add("cartesian", Entry::new(false).with("note", "no (meet, top) pair is cartesian"));
                return Ok(r);
            }
        },
        None => {
            return Err(InputError::Schema {
                field: "meet".into(),
                detail: "missing; pass --search to search one".into(),
            })
        }
    };
    let e = r.add("cartesian", cartesian_entry(&u, &meet, top)?);
    let pass = e.pass;
    ctx.recheck(e, || recheck_cartesian(&u, &meet, top, pass))?;
    Ok(r)
}

fn dcompletion(name: &str, ctx: &Ctx, file: &Path) -> CmdResult {
    let l = load(file)?;
    let u = l.uord(ctx.cfg.auto_reflexive)?;
    let d = dcomplete(&u)?;
    let mut r = new_report(name, ctx, &[&l]);
    let gens: Vec<&str> = d.lifted().generators().iter().map(|g| g.name.as_str()).collect();
    r.add(
        "dcomplete",
        Entry::new(true)
            .with("size", d.lifted().size())
            .with("generators", json!(gens)),
    );
    let eta = eta_checks(&d, &ctx.universe())?;
    r.add("eta.monotone", Entry::new(eta.monotone));
    r.add("eta.order_reflecting", Entry::new(eta.order_reflecting));
    let render = subset_renderer(u.carrier());
    let oracle = FamOracle::of_dcompletion(&d);
    let aud = Auditor::new(&oracle, ctx.universe())?;
    for (law, res) in [("eta.prime_singletons", &eta.prime_singletons), ("eta.decomposition", &eta.decomposition)] {
        let e = r.add(law, law_entry(res, &render));
        if let Some(ce) = &res.counterexample {
            ctx.recheck(e, || recheck_d(&d, &aud, ce))?;
        }
    }
    Ok(r)
}

fn recheck_d(d: &DCompletion, aud: &Auditor<'_>, ce: &Counterexample) -> Result<bool, InputError> {
    if ce.law.ends_with("decomposition") {
        let phi = DPredicate::new(d.base_size(), ce.predicates[0].iter().map(|&v| v as u64).collect())?;
        let (u, sigma) = decompose(&phi);
        return Ok(!sigma.is_singleton_valued() || exists_along(&u, &sigma)? != phi);
    }
    Ok(aud.recheck(ce, None)?)
}

fn relcomp(name: &str, ctx: &Ctx, file: &Path) -> CmdResult {
    let l = load(file)?;
    let u = l.uord(ctx.cfg.auto_reflexive)?;
    let mut r = new_report(name, ctx, &[&l]);
    let Some(w) = cartesian_witness(&l, &u)? else {
        r.add("cartesian", Entry::new(false).with("note", "not cartesian"));
        return Ok(r);
    };
    let c = u.carrier();
    let wit = check_relational_completeness(&u, &w)?;
    let mut e = Entry::new(wit.is_some());
    if let Some(wit) = &wit {
        let tilde: serde_json::Map<String, Value> = wit
            .tilde
            .iter()
            .map(|t| {
                (
                    t.generator.clone(),
                    json!({"map": names(c, t.map.values()), "within": t.within}),
                )
            })
            .collect();
        e = e.with("witness", json!({"at": wit.at_name, "tilde": tilde}));
    }
    let e = r.add("relcomp", e);
    if let Some(wit) = &wit {
        ctx.recheck(e, || Ok(validate_witness(&u, &w, wit)?))?;
    }
    Ok(r)
}

fn dco(name: &str, ctx: &Ctx, file: &Path) -> CmdResult {
    let l = load(file)?;
    let u = l.uord(ctx.cfg.auto_reflexive)?;
    let mut r = new_report(name, ctx, &[&l]);
    let bad = u.generators().iter().find(|g| !classify(&g.rel).single_valued);
    let mut e = Entry::new(bad.is_none());
    if let Some(g) = bad {
        let c = u.carrier();
        let a = (0..u.size()).find(|&a| g.rel.row(a).count_ones() > 1).expect("not single-valued");
        let values: Vec<usize> = (0..u.size()).filter(|&b| g.rel.contains(a, b)).collect();
        e = e.with(
            "counterexample",
            json!({"generator": g.name, "element": c.name(a), "values": names(c, &values)}),
        );
        let e = r.add("dco", e);
        ctx.recheck(e, || Ok(values.len() > 1 && values.iter().all(|&b| g.rel.contains(a, b))))?;
    } else {
        r.add("dco", e);
    }
    Ok(r)
}

fn discrete(name: &str, ctx: &Ctx, file: &Path, delta: Option<&str>, span: usize) -> CmdResult {
    let l = load(file)?;
    let u = l.uord(ctx.cfg.auto_reflexive)?;
    let delta = match delta {
        Some(d) => input::predicate(&l, "delta", d)?.values().to_vec(),
        None => (0..u.size()).collect(),
    };
    let oracle = FamOracle::new(&u);
    let res = is_discrete(&oracle, &delta, span, &ctx.universe())?;
    let mut r = new_report(name, ctx, &[&l]);
    let mut e = Entry::new(res.discrete).with("checked", res.checked);
    if let Some(ce) = &res.counterexample {
        e = e.with("counterexample", counterexample_json(ce, &element_renderer(u.carrier())));
    }
    let e = r.add("discrete", e);
    if let Some(ce) = &res.counterexample {
        ctx.recheck(e, || Ok(recheck_discrete(&oracle, ce)?))?;
    }
    Ok(r)
}

fn prime(name: &str, ctx: &Ctx, file: &Path, pi: &str) -> CmdResult {
    let l = load(file)?;
    let u = l.uord(ctx.cfg.auto_reflexive)?;
    let pi: Vec<usize> = input::subset_predicate(&l, "pi", pi)?
        .into_iter()
        .map(|m| m as usize)
        .collect();
    let d = dcomplete(&u)?;
    let oracle = FamOracle::of_dcompletion(&d);
    let aud = Auditor::new(&oracle, ctx.universe())?;
    let res = aud.is_exists_prime(&pi)?;
    let mut r = new_report(name, ctx, &[&l]);
    let mut e = Entry::new(res.prime).with("checked", res.checked);
    if let Some(ce) = &res.counterexample {
        e = e.with("counterexample", counterexample_json(ce, &subset_renderer(u.carrier())));
    }
    let e = r.add("prime", e);
    if let Some(ce) = &res.counterexample {
        ctx.recheck(e, || Ok(aud.recheck(ce, None)?))?;
    }
    Ok(r)
}

fn add_audit(
    r: &mut Report,
    ctx: &Ctx,
    report: &AuditReport,
    render: &dyn Fn(&[usize]) -> Value,
    recheck: &dyn Fn(&Counterexample) -> Result<bool, InputError>,
) -> Result<(), InputError> {
    for l in &report.results {
        let e = r.add(l.law.clone(), law_entry(l, render));
        if let Some(ce) = &l.counterexample {
            ctx.recheck(e, || recheck(ce))?;
        }
    }
    Ok(())
}

fn audit(name: &str, ctx: &Ctx, file: &Path, tripos: bool, rtr_char: bool, over_d: bool) -> CmdResult {
    let l = load(file)?;
    let u = l.uord(ctx.cfg.auto_reflexive)?;
    let cfg = ctx.universe();
    let mut r = new_report(name, ctx, &[&l]);
    let w = cartesian_witness(&l, &u)?;
    let subsets = subset_renderer(u.carrier());
    let elements = element_renderer(u.carrier());
    if rtr_char {
        let d = dcomplete(&u)?;
        let dfam = FamOracle::of_dcompletion(&d);
        let daud = Auditor::new(&dfam, cfg)?;
        let mut rep = daud.tripos(&TriposOptions::default());
        rep.results.extend(audit_enough_primes(&d, &daud)?.results);
        add_audit(&mut r, ctx, &rep, &subsets, &|ce| recheck_d(&d, &daud, ce))?;
        let base = FamOracle::new(&u);
        let baud = Auditor::new(&base, cfg)?;
        let mut meets = baud.meets();
        for res in &mut meets.results {
            res.law = format!("prim.{}", res.law);
        }
        add_audit(&mut r, ctx, &meets, &elements, &|ce| Ok(baud.recheck(ce, None)?))?;
        let id: Vec<usize> = (0..u.size()).collect();
        let disc = is_discrete(&base, &id, 4, &cfg)?;
        let res = LawResult {
            law: "prim.discrete_generic".into(),
            pass: disc.discrete,
            skipped: false,
            checked: disc.checked,
            counterexample: disc.counterexample,
            note: None,
        };
        let e = r.add(res.law.clone(), law_entry(&res, &elements));
        if let Some(ce) = &res.counterexample {
            ctx.recheck(e, || Ok(recheck_discrete(&base, ce)?))?;
        }
        return Ok(r);
    }
    let d;
    let oracle = if over_d {
        d = dcomplete(&u)?;
        let o = FamOracle::of_dcompletion(&d);
        match &w {
            Some(w) => o.with_meets(&d_cartesian(&d, w)?),
            None => o,
        }
    } else {
        let o = FamOracle::new(&u);
        match &w {
            Some(w) => o.with_meets(w),
            None => o,
        }
    };
    let aud = Auditor::new(&oracle, cfg)?;
    let rep = if tripos {
        aud.tripos(&TriposOptions::default())
    } else {
        let mut rep = aud.meets();
        rep.results.extend(aud.exists().results);
        rep
    };
    let render: &dyn Fn(&[usize]) -> Value = if over_d { &subsets } else { &elements };
    add_audit(&mut r, ctx, &rep, render, &|ce| Ok(aud.recheck(ce, None)?))?;
    Ok(r)
}

fn dalgebra(name: &str, ctx: &Ctx, file: &Path) -> CmdResult {
    let l = load(file)?;
    let u = l.uord(ctx.cfg.auto_reflexive)?;
    let alpha = d_algebra_check(&u)?;
    let mut r = new_report(name, ctx, &[&l]);
    let c = u.carrier();
    let mut e = Entry::new(alpha.is_some());
    if let Some(a) = &alpha {
        let table: serde_json::Map<String, Value> = (0..a.source())
            .map(|m| (subset_name(c, m as u64), Value::from(c.name(a.apply(m)))))
            .collect();
        e = e.with("witness", json!({"alpha": table}));
    }
    let e = r.add("dalgebra", e);
    if let Some(a) = &alpha {
        // α ⊣ η: α is monotone and the unit and counit lie in the completions.
        ctx.recheck(e, || {
            let d = dcomplete(&u)?;
            Ok(check_adjunction(a, &d.eta(), d.lifted(), &u)?.pass())
        })?;
    }
    Ok(r)
}

/// Either PCA instance of a structure file.
enum AnyPca {
    Table(RelPca<TableOpas>),
    Sk(RelPca<SkPca>),
}

fn any_pca(l: &Loaded) -> Result<AnyPca, InputError> {
    if l.is_sk() {
        let p = l.pca_spec()?;
        let filter = match &p.filter {
            None => Filter::All,
            Some(m) => Filter::Members(
                m.iter()
                    .map(|t| Ok(uniform_preorders::pca::parse_sk(t)?))
                    .collect::<Result<Vec<_>, InputError>>()?,
            ),
        };
        return Ok(AnyPca::Sk(RelPca {
            opas: SkPca::default(),
            filter,
            strength: if p.strong { Strength::Strong } else { Strength::Weak },
        }));
    }
    Ok(AnyPca::Table(l.table_pca()?))
}

fn table_resolver(o: &TableOpas) -> impl Fn(&str) -> Option<usize> + '_ {
    move |x| o.carrier().index_of(x)
}

fn eval_entry<O: Opas>(o: &O, t: &Term<O::Elem>, budget: u64) -> Result<Entry, InputError> {
    let shown = t.display_with(&|e| o.name(e)).to_string();
    Ok(match eval_term(o, t, &HashMap::new(), budget)? {
        Eval::Defined(v) => Entry::new(true)
            .with("term", shown)
            .with("outcome", "defined")
            .with("value", o.name(&v)),
        Eval::Undefined => Entry::new(false).with("term", shown).with("outcome", "undefined"),
        Eval::OutOfBudget => Entry::new(false).with("term", shown).with("outcome", "out_of_budget"),
    })
}

fn pca_eval(name: &str, ctx: &Ctx, file: &Path, term: &str) -> CmdResult {
    let l = load(file)?;
    let budget = ctx.cfg.budget;
    let entry = match any_pca(&l)? {
        AnyPca::Sk(p) => eval_entry(&p.opas, &parse_term(term, resolve_sk)?, budget)?,
        AnyPca::Table(p) => eval_entry(&p.opas, &parse_term(term, table_resolver(&p.opas))?, budget)?,
    };
    let mut r = new_report(name, ctx, &[&l]);
    r.add("eval", entry);
    Ok(r)
}

fn compile_entries<O: Opas>(
    r: &mut Report,
    ctx: &Ctx,
    o: &O,
    p: &Term<O::Elem>,
    vars: &[&str],
) -> Result<(), InputError> {
    let e = bracket_abstract(o, p, vars)?;
    let show = |t: &Term<O::Elem>| t.display_with(&|x| o.name(x)).to_string();
    r.add("compile", Entry::new(true).with("polynomial", show(p)).with("term", show(&e)));
    let samples: Vec<Vec<O::Elem>> = match o.elements() {
        Some(all) if all.len().pow(vars.len() as u32) <= ctx.cfg.samples => {
            maps_between(vars.len(), all.len())
                .iter()
                .map(|f| f.values().iter().map(|&i| all[i].clone()).collect())
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.seed);
            (0..ctx.cfg.samples)
                .map(|_| vars.iter().map(|_| o.sample(&mut rng)).collect())
                .collect()
        }
    };
    let rep = check_abstraction(o, p, vars, &e, &samples, ctx.cfg.budget)?;
    let mut entry = Entry::new(rep.violations == 0)
        .with("probes", rep.probes)
        .with("violations", rep.violations)
        .with("inconclusive", rep.inconclusive);
    if let Some(v) = &rep.first_violation {
        entry = entry.with("counterexample", v.clone());
    }
    let entry = r.add("obligations", entry);
    ctx.recheck(entry, || {
        let again = check_abstraction(o, p, vars, &e, &samples, ctx.cfg.budget)?;
        Ok(again == rep)
    })?;
    Ok(())
}

fn split_vars(vars: &str) -> Vec<&str> {
    vars.split(',').map(str::trim).filter(|v| !v.is_empty()).collect()
}

fn pca_compile(name: &str, ctx: &Ctx, file: &Path, term: &str, vars: &str) -> CmdResult {
    let l = load(file)?;
    let vars = split_vars(vars);
    let mut r = new_report(name, ctx, &[&l]);
    match any_pca(&l)? {
        AnyPca::Sk(p) => {
            let t = parse_term(term, resolve_sk)?;
            compile_entries(&mut r, ctx, &p.opas, &t, &vars)?;
        }
        AnyPca::Table(p) => {
            let t = parse_term(term, table_resolver(&p.opas))?;
            compile_entries(&mut r, ctx, &p.opas, &t, &vars)?;
        }
    }
    Ok(r)
}

fn combinator_entries<O: Opas>(r: &mut Report, ctx: &Ctx, p: &RelPca<O>) {
    let cfg = SampleConfig {
        samples: ctx.cfg.samples,
        seed: ctx.cfg.seed,
        budget: ctx.cfg.budget,
    };
    let rep = check_combinators(p, &cfg);
    let ce = rep.counterexample.clone();
    let mut add = |law: &str, pass: bool| {
        let mut e = Entry::new(pass);
        if !pass {
            if let Some(c) = &ce {
                e = e.with("counterexample", c.clone());
            }
        }
        r.add(law, e);
    };
    add("combinators.k", rep.k_law);
    add("combinators.s_defined", rep.s_defined);
    add("combinators.s", rep.s_law);
    if p.strength == Strength::Strong {
        add("combinators.strong", rep.strong);
    }
    if let Some(b) = rep.filter_upward_closed {
        add("filter.upward_closed", b);
    }
    if let Some(b) = rep.filter_application_closed {
        add("filter.application_closed", b);
    }
    add("filter.contains_ks", rep.filter_contains_ks);
    let summary = r.results.entry("combinators.k".into()).or_insert_with(|| Entry::new(true));
    summary.fields.insert("probes".into(), rep.probes.into());
    summary.fields.insert("inconclusive".into(), rep.inconclusive.into());
    summary.fields.insert("exhaustive".into(), rep.exhaustive.into());
    if ctx.recheck {
        let same = check_combinators(p, &cfg) == rep;
        for e in r.results.values_mut() {
            e.recheck = Some(same);
        }
    }
}

fn pca_check(name: &str, ctx: &Ctx, file: &Path) -> CmdResult {
    let l = load(file)?;
    let mut r = new_report(name, ctx, &[&l]);
    match any_pca(&l)? {
        AnyPca::Sk(p) => combinator_entries(&mut r, ctx, &p),
        AnyPca::Table(p) => combinator_entries(&mut r, ctx, &p),
    }
    Ok(r)
}

fn sk_predicate(src: &str, flag: &str) -> Result<Vec<Vec<SkTerm>>, InputError> {
    let sets: Vec<Vec<String>> = serde_json::from_str(src).map_err(|e| InputError::Schema {
        field: flag.into(),
        detail: e.to_string(),
    })?;
    sets.iter()
        .map(|s| {
            s.iter()
                .map(|t| Ok(uniform_preorders::pca::parse_sk(t)?))
                .collect()
        })
        .collect()
}

fn bridge_to_dco(name: &str, ctx: &Ctx, file: &Path, leq: Option<(&str, &str)>) -> CmdResult {
    let l = load(file)?;
    let mut r = new_report(name, ctx, &[&l]);
    match any_pca(&l)? {
        AnyPca::Sk(_) => {
            let (phi, psi) = leq.ok_or_else(|| InputError::Schema {
                field: "phi".into(),
                detail: "the SK instance is infinite; pass --phi and --psi".into(),
            })?;
            let (phi, psi) = (sk_predicate(phi, "phi")?, sk_predicate(psi, "psi")?);
            let search = SkRealizability {
                budget: ctx.cfg.budget,
                ..SkRealizability::default()
            };
            let entry = match search.fiber_leq(&phi, &psi)? {
                Realized::Found(e) => Entry::new(true).with("witness", json!({"realizer": SkPca::default().name(&e)})),
                Realized::Unknown => Entry::new(false).with("outcome", "unknown"),
            };
            r.add("bridge.fiber_leq", entry);
        }
        AnyPca::Table(p) => {
            let u = rpca_to_dco(&p)?;
            let e = r.add("bridge.to_dco", Entry::new(true).with("generators", generators_json(&u)));
            ctx.recheck(e, || Ok(rpca_to_dco(&p)?.same_relations(&u)))?;
            if let Some((phi, psi)) = leq {
                let phi = input::subset_predicate(&l, "phi", phi)?;
                let psi = input::subset_predicate(&l, "psi", psi)?;
                if phi.len() != psi.len() {
                    return Err(InputError::Schema {
                        field: "psi".into(),
                        detail: "predicates over different index sets".into(),
                    });
                }
                let found = realizer(&p, &phi, &psi);
                let mut e = Entry::new(found.is_some());
                if let Some(x) = found {
                    e = e.with("witness", json!({"realizer": p.opas.carrier().name(x)}));
                }
                r.add("bridge.fiber_leq", e);
            }
        }
    }
    Ok(r)
}

fn bridge_to_rpca(name: &str, ctx: &Ctx, file: &Path, polynomial: Option<&str>, vars: Option<&str>) -> CmdResult {
    let l = load(file)?;
    let u = l.uord(ctx.cfg.auto_reflexive)?;
    let mut r = new_report(name, ctx, &[&l]);
    let Some(w) = cartesian_witness(&l, &u)? else {
        r.add("cartesian", Entry::new(false).with("note", "not cartesian"));
        return Ok(r);
    };
    let Some(rc) = check_relational_completeness(&u, &w)? else {
        r.add("relcomp", Entry::new(false).with("note", "not relationally complete"));
        return Ok(r);
    };
    let p = dco_to_rpca(&u, &w, &rc)?;
    let c = u.carrier();
    let n = u.size();
    let table: Vec<Vec<Option<&str>>> = (0..n)
        .map(|a| (0..n).map(|b| p.opas.app(a, b).map(|v| c.name(v))).collect())
        .collect();
    let filter = match &p.filter {
        Filter::Members(m) => names(c, m),
        Filter::All => Value::from("all"),
    };
    let k = p.opas.k().map(|k| c.name(k).to_string());
    let s = p.opas.s().map(|s| c.name(s).to_string());
    r.add(
        "bridge.to_rpca",
        Entry::new(true).with(
            "witness",
            json!({"table": table, "filter": filter, "k": k, "s": s, "strength": "weak"}),
        ),
    );
    let e = r.add("bridge.round_trip", Entry::new(true));
    ctx.recheck(e, || Ok(rpca_to_dco(&p)?.same_relations(&u)))?;
    if let (Some(poly), Some(vars)) = (polynomial, vars) {
        let t = parse_term(poly, table_resolver(&p.opas))?;
        let vars = split_vars(vars);
        let ok = polynomial_in_rn_check(&u, &w, &p, &t, &vars)?;
        r.add("bridge.polynomial", Entry::new(ok));
    }
    Ok(r)
}

fn corpus(name: &str, ctx: &Ctx, upto: usize, random: usize) -> CmdResult {
    let mut entries = meet_semilattices(upto)?;
    if random > 0 {
        entries.extend(random_cartesian(&RandomCorpusConfig {
            count: random,
            seed: ctx.cfg.seed,
            ..RandomCorpusConfig::default()
        })?);
    }
    let rep = cross_validate(&entries, &ctx.universe())?;
    let args = format!("corpus semilattices_upto={upto} random={random}");
    let mut r = Report::new(
        name,
        digest(&[args.as_bytes()]),
        serde_json::to_value(&ctx.cfg).expect("config serializes"),
    );
    for (entry, x) in rep.entries.iter().zip(&entries) {
        let mut e = Entry::new(entry.agrees())
            .with("size", entry.size)
            .with("relationally_complete", entry.relationally_complete)
            .with("tripos", entry.tripos);
        if let Some(law) = &entry.failed_law {
            e = e.with("failed_law", law.clone());
        }
        if let Some(a) = entry.forall_agrees {
            e = e.with("forall_agrees", a);
        }
        let e = r.add(format!("corpus.{}", entry.name), e);
        if let Some(wit) = &entry.witness {
            ctx.recheck(e, || Ok(validate_witness(&x.uord, &x.witness, wit)?))?;
        }
    }
    let dis = rep.disagreements().len();
    r.add(
        "corpus.disagreements",
        Entry::new(dis == 0)
            .with("entries", rep.entries.len())
            .with("relationally_complete", rep.positives())
            .with("disagreements", dis),
    );
    Ok(r)
}
