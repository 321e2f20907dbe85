//! Relational completeness: a universal relation `@` in `R` and, for each
//! generator `r`, a function `r̃` in `R` with
//! `(a∧b, c) ∈ r ⇒ (r̃(a)∧b, c) ∈ @`.

use rayon::prelude::*;

use crate::cartesian::{check_cartesian, CartesianWitness};
use crate::corpus::CorpusEntry;
use crate::dcompletion::{d_cartesian, dcomplete, forall_impl, DPredicate};
use crate::error::{Error, Result};
use crate::logicaudit::{Auditor, FamOracle, ForallConstructor, TriposOptions, UniverseConfig};
use crate::relcore::{BinRel, FunTable};
use crate::uord::UniformPreorder;

/// The function `r̃` chosen for generator `generator`, with the generator of
/// `R` containing its graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tilde {
    pub generator: String,
    pub map: FunTable,
    pub within: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelCompWitness {
    pub at_name: String,
    pub at: BinRel,
    pub tilde: Vec<Tilde>,
}

impl RelCompWitness {
    pub fn tilde_for(&self, generator: &str) -> Option<&FunTable> {
        self.tilde
            .iter()
            .find(|t| t.generator == generator)
            .map(|t| &t.map)
    }
}

fn require_cartesian(u: &UniformPreorder, w: &CartesianWitness) -> Result<()> {
    match check_cartesian(u, &w.meet, w.top)? {
        Some(_) => Ok(()),
        None => Err(Error::NotCartesian),
    }
}

/// `V_r(a)` as a bitmask: the `v` with `(v∧b, c) ∈ @` whenever `(a∧b, c) ∈ r`.
fn admissible(u: &UniformPreorder, w: &CartesianWitness, r: &BinRel, at: &BinRel, a: usize) -> u64 {
    let n = u.size();
    let mut out = 0u64;
    'v: for v in 0..n {
        for b in 0..n {
            let ab = w.meet_of(a, b);
            let vb = w.meet_of(v, b);
            if r.row(ab) & !at.row(vb) != 0 {
                continue 'v;
            }
        }
        out |= 1 << v;
    }
    out
}

/// Searches for a witness, trying each generator as `@` in order and, for
/// each `r`, the first generator that admits a choice of `r̃(a)` at every
/// `a` (smallest value first).
pub fn check_relational_completeness(
    u: &UniformPreorder,
    w: &CartesianWitness,
) -> Result<Option<RelCompWitness>> {
    require_cartesian(u, w)?;
    let n = u.size();
    let gens = u.generators();
    'at: for at in gens {
        let mut tilde = Vec::with_capacity(gens.len());
        for r in gens {
            let sets: Vec<u64> = (0..n).map(|a| admissible(u, w, &r.rel, &at.rel, a)).collect();
            let found = gens.iter().find_map(|g| {
                let values: Option<Vec<usize>> = (0..n)
                    .map(|a| {
                        let m = sets[a] & g.rel.row(a);
                        (m != 0).then(|| m.trailing_zeros() as usize)
                    })
                    .collect();
                values.map(|v| (g, v))
            });
            let Some((g, values)) = found else {
                continue 'at;
            };
            tilde.push(Tilde {
                generator: r.name.clone(),
                map: FunTable::new(n, values)?,
                within: g.name.clone(),
            });
        }
        return Ok(Some(RelCompWitness {
            at_name: at.name.clone(),
            at: at.rel.clone(),
            tilde,
        }));
    }
    Ok(None)
}

/// Re-checks a witness by enumerating every triple `(a, b, c)` for every
/// generator, and membership of `@` and each `r̃` in `R`.
pub fn validate_witness(
    u: &UniformPreorder,
    w: &CartesianWitness,
    wit: &RelCompWitness,
) -> Result<bool> {
    require_cartesian(u, w)?;
    let n = u.size();
    if !u.has(&wit.at) {
        return Ok(false);
    }
    for r in u.generators() {
        let Some(t) = wit.tilde_for(&r.name) else {
            return Ok(false);
        };
        if t.source() != n || !u.has(&t.graph()) {
            return Ok(false);
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if r.rel.contains(w.meet_of(a, b), c)
                        && !wit.at.contains(w.meet_of(t.apply(a), b), c)
                    {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// `∀_u(φ ⇒ ψ)` on `fam(D(U))` built from a witness, in the value encoding
/// used by [`FamOracle::of_dcompletion`].
pub fn forall_constructor<'a>(
    d: &'a crate::dcompletion::DCompletion,
    w: &'a CartesianWitness,
    wit: &'a RelCompWitness,
) -> impl Fn(&FunTable, &[usize], &[usize]) -> Vec<usize> + Sync + 'a {
    let n = d.base_size();
    move |u, phi, psi| {
        let enc = |p: &[usize]| DPredicate::new(n, p.iter().map(|&x| x as u64).collect());
        let out = enc(phi)
            .and_then(|p| enc(psi).map(|q| (p, q)))
            .and_then(|(p, q)| forall_impl(d, &wit.at, w, u, &p, &q))
            .expect("witness and predicates come from the audited universe");
        out.values().iter().map(|&x| x as usize).collect()
    }
}

/// Outcome of one corpus entry.
#[derive(Debug, Clone)]
pub struct CrossEntry {
    pub name: String,
    pub size: usize,
    pub relationally_complete: bool,
    pub witness: Option<RelCompWitness>,
    pub tripos: bool,
    /// First failing tripos law, if any.
    pub failed_law: Option<String>,
    /// Whether the witness-built `∀_u(φ ⇒ ψ)` matched brute force.
    pub forall_agrees: Option<bool>,
}

impl CrossEntry {
    pub fn agrees(&self) -> bool {
        self.relationally_complete == self.tripos && self.forall_agrees != Some(false)
    }
}

#[derive(Debug, Clone, Default)]
pub struct CrossReport {
    pub entries: Vec<CrossEntry>,
}

impl CrossReport {
    pub fn disagreements(&self) -> Vec<&CrossEntry> {
        self.entries.iter().filter(|e| !e.agrees()).collect()
    }

    pub fn positives(&self) -> usize {
        self.entries.iter().filter(|e| e.relationally_complete).count()
    }
}

/// Largest index set on which witness-built universals are compared with
/// brute force during cross-validation.
pub const CONSTRUCTOR_BOUND: usize = 2;

/// Compares relational completeness with the tripos audit of `fam(D(U))`
/// for every entry.
pub fn cross_validate(corpus: &[CorpusEntry], cfg: &UniverseConfig) -> Result<CrossReport> {
    let entries = corpus
        .par_iter()
        .map(|e| cross_validate_entry(e, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(CrossReport { entries })
}

pub fn cross_validate_entry(e: &CorpusEntry, cfg: &UniverseConfig) -> Result<CrossEntry> {
    let witness = check_relational_completeness(&e.uord, &e.witness)?;
    if let Some(wit) = &witness {
        if !validate_witness(&e.uord, &e.witness, wit)? {
            return Err(Error::Internal(format!("{}: witness fails re-validation", e.name)));
        }
    }
    let d = dcomplete(&e.uord)?;
    let dw = d_cartesian(&d, &e.witness)?;
    let oracle = FamOracle::of_dcompletion(&d).with_meets(&dw);
    let auditor = Auditor::new(&oracle, *cfg)?;
    let ctor = witness
        .as_ref()
        .map(|wit| forall_constructor(&d, &e.witness, wit));
    let opts = TriposOptions {
        forall_constructor: ctor.as_ref().map(|c| c as &ForallConstructor<'_>),
        constructor_bound: CONSTRUCTOR_BOUND,
    };
    let report = auditor.tripos(&opts);
    let laws = || report.results.iter().filter(|l| l.law != "forall.constructor");
    let tripos = laws().all(|l| l.pass && !l.skipped);
    let failed_law = laws().find(|l| !l.pass).map(|l| l.law.clone());
    let forall_agrees = report.law("forall.constructor").map(|l| l.pass);
    drop(ctor);
    Ok(CrossEntry {
        name: e.name.clone(),
        size: e.uord.size(),
        relationally_complete: witness.is_some(),
        tripos,
        failed_law,
        forall_agrees,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartesian::search_cartesian;
    use crate::corpus::{meet_semilattices, random_cartesian, RandomCorpusConfig};
    use crate::logicaudit::audit_tripos;
    use crate::relcore::Carrier;
    use crate::testutil::*;

    fn cw(u: &UniformPreorder) -> CartesianWitness {
        search_cartesian(u).unwrap().unwrap()
    }

    #[test]
    fn examples() {
        let one = UniformPreorder::discrete(Carrier::indexed(1));
        assert!(check_relational_completeness(&one, &cw(&one)).unwrap().is_some());
        let c2 = chain(2);
        let wit = check_relational_completeness(&c2, &cw(&c2)).unwrap().unwrap();
        assert_eq!(wit.at_name, "leq");
        assert_eq!(wit.tilde_for("leq").unwrap(), &FunTable::identity(2));
        let dm = diamond();
        let wit = check_relational_completeness(&dm, &cw(&dm)).unwrap().unwrap();
        assert_eq!(wit.at_name, "leq");
        assert_eq!(wit.tilde_for("leq").unwrap(), &FunTable::identity(4));
        assert!(validate_witness(&dm, &cw(&dm), &wit).unwrap());
    }

    #[test]
    fn not_cartesian_is_an_error() {
        let d2 = UniformPreorder::discrete(Carrier::indexed(2));
        let w = cw(&chain(2));
        assert!(matches!(
            check_relational_completeness(&d2, &w),
            Err(Error::NotCartesian)
        ));
    }

    #[test]
    fn small_lattices_agree() {
        let corpus = meet_semilattices(3).unwrap();
        let r = cross_validate(&corpus, &UniverseConfig::default()).unwrap();
        assert!(r.disagreements().is_empty());
        assert_eq!(r.positives(), corpus.len());
        assert!(r.entries.iter().all(|e| e.forall_agrees == Some(true)));
    }

    #[test]
    fn random_corpus_agrees() {
        let corpus = random_cartesian(&RandomCorpusConfig {
            count: 24,
            seed: 11,
            ..RandomCorpusConfig::default()
        })
        .unwrap();
        let cfg = UniverseConfig {
            max_index_size: 2,
            ..UniverseConfig::default()
        };
        let r = cross_validate(&corpus, &cfg).unwrap();
        assert!(r.disagreements().is_empty(), "{:?}", r.disagreements());
    }

    #[test]
    fn tripos_fam_implies_complete() {
        let cfg = UniverseConfig::default();
        for u in [chain(2), chain(3), diamond()] {
            assert!(audit_tripos(&FamOracle::new(&u).with_meets(&cw(&u)), &cfg).unwrap().pass());
            assert!(check_relational_completeness(&u, &cw(&u)).unwrap().is_some());
        }
    }

    #[test]
    fn completion_of_complete_is_complete() {
        let u = chain(2);
        let d = dcomplete(&u).unwrap();
        let dw = d_cartesian(&d, &cw(&u)).unwrap();
        assert!(check_relational_completeness(d.lifted(), &dw).unwrap().is_some());
    }
}
