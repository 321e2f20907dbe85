//! Reproducible families of uniform preorders for cross-checking.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cartesian::{check_cartesian, search_cartesian, CartesianWitness};
use crate::error::{Error, Result};
use crate::relcore::{BinRel, Carrier, FunTable};
use crate::uord::{Basis, NamedRel, UniformPreorder};

/// A named cartesian uniform preorder with its `(∧, ⊤)` witness.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub uord: UniformPreorder,
    pub witness: CartesianWitness,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Smallest encoding of `r` over all relabelings of its carrier.
fn canonical_form(r: &BinRel, perms: &[Vec<usize>]) -> Vec<u64> {
    perms
        .iter()
        .map(|p| {
            let mut rows = vec![0u64; r.source()];
            for (a, b) in r.pairs() {
                rows[p[a]] |= 1 << p[b];
            }
            rows
        })
        .min()
        .unwrap_or_default()
}

fn is_partial_order(r: &BinRel) -> bool {
    let n = r.source();
    (0..n).all(|a| r.contains(a, a))
        && (0..n).all(|a| (0..n).all(|b| a == b || !(r.contains(a, b) && r.contains(b, a))))
        && (0..n).all(|a| {
            (0..n).all(|b| !r.contains(a, b) || (0..n).all(|c| !r.contains(b, c) || r.contains(a, c)))
        })
}

/// Greatest lower bound of `a, b` in a partial order, if it exists.
fn glb(r: &BinRel, a: usize, b: usize) -> Option<usize> {
    let n = r.source();
    let lower: Vec<usize> = (0..n).filter(|&x| r.contains(x, a) && r.contains(x, b)).collect();
    lower
        .iter()
        .copied()
        .find(|&m| lower.iter().all(|&x| r.contains(x, m)))
}

/// The meet table and top of a partial order with all finite meets.
pub fn order_meets(r: &BinRel) -> Option<(FunTable, usize)> {
    let n = r.source();
    let top = (0..n).find(|&t| (0..n).all(|a| r.contains(a, t)))?;
    let mut values = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            values.push(glb(r, a, b)?);
        }
    }
    Some((FunTable::new(n, values).ok()?, top))
}

/// All partial orders with finite meets (top included) on `1..=max_size`
/// points, one per isomorphism class, as `(A, ↓{≤})`.
pub fn meet_semilattices(max_size: usize) -> Result<Vec<CorpusEntry>> {
    if max_size > 5 {
        return Err(Error::CarrierTooLarge {
            size: max_size,
            bound: 5,
        });
    }
    let mut out = Vec::new();
    for n in 1..=max_size {
        let perms = permutations(n);
        let off: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
            .collect();
        let mut seen = HashSet::new();
        let mut found = Vec::new();
        for mask in 0u64..(1 << off.len()) {
            let mut r = BinRel::identity(n);
            for (i, &(a, b)) in off.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    r.insert(a, b);
                }
            }
            if !is_partial_order(&r) || order_meets(&r).is_none() {
                continue;
            }
            if seen.insert(canonical_form(&r, &perms)) {
                found.push(r);
            }
        }
        for (i, r) in found.into_iter().enumerate() {
            let total = r.len() == n * (n + 1) / 2;
            let name = if total {
                format!("chain{n}")
            } else {
                format!("lattice{n}.{i}")
            };
            let (meet, top) = order_meets(&r).expect("filtered above");
            let uord = UniformPreorder::from_order(Carrier::indexed(n), r)?;
            let witness = check_cartesian(&uord, &meet, top)?
                .ok_or_else(|| Error::Internal(format!("{name}: order meets are not cartesian")))?;
            out.push(CorpusEntry {
                name,
                uord,
                witness,
            });
        }
    }
    Ok(out)
}

/// Parameters of the random corpus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomCorpusConfig {
    pub count: usize,
    /// Carrier sizes cycle through `min_size..=max_size`.
    pub min_size: usize,
    pub max_size: usize,
    /// Number of random basis relations added to the identity.
    pub min_relations: usize,
    pub max_relations: usize,
    /// Probability of each extra pair in a random relation.
    pub density: f64,
    /// Draws whose saturation has fewer generators are discarded.
    pub min_generators: usize,
    pub seed: u64,
    /// Generation attempts before giving up.
    pub max_attempts: usize,
}

impl Default for RandomCorpusConfig {
    fn default() -> Self {
        RandomCorpusConfig {
            count: 100,
            min_size: 1,
            max_size: 3,
            min_relations: 1,
            max_relations: 3,
            density: 0.3,
            min_generators: 1,
            seed: 7,
            max_attempts: 1_000_000,
        }
    }
}

/// Identity plus `k` random relations on `n` points, saturated. Each row of
/// a random relation gets one random target with probability 0.8, and every
/// pair is added independently with probability `density`.
pub fn random_uord(rng: &mut impl Rng, n: usize, k: usize, density: f64) -> Result<UniformPreorder> {
    let mut rels = vec![NamedRel::new("id", BinRel::identity(n))];
    for i in 0..k {
        let mut r = BinRel::empty(n, n);
        for a in 0..n {
            if rng.gen_bool(0.8) {
                r.insert(a, rng.gen_range(0..n));
            }
            for b in 0..n {
                if rng.gen_bool(density) {
                    r.insert(a, b);
                }
            }
        }
        rels.push(NamedRel::new(format!("r{i}"), r));
    }
    UniformPreorder::from_basis(Basis::new(Carrier::indexed(n), rels)?, false)
}

/// Seeded random cartesian uniform preorders; non-cartesian draws and draws
/// with too few generators are discarded.
pub fn random_cartesian(cfg: &RandomCorpusConfig) -> Result<Vec<CorpusEntry>> {
    if cfg.min_size == 0 || cfg.min_size > cfg.max_size || cfg.min_relations > cfg.max_relations {
        return Err(Error::InvalidStructure("empty size or relation range".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(cfg.count);
    let span = cfg.max_size - cfg.min_size + 1;
    let mut attempts = 0;
    while out.len() < cfg.count {
        if attempts == cfg.max_attempts {
            return Err(Error::Internal(format!(
                "only {} cartesian draws in {} attempts",
                out.len(),
                attempts
            )));
        }
        attempts += 1;
        let n = cfg.min_size + out.len() % span;
        let k = rng.gen_range(cfg.min_relations..=cfg.max_relations);
        let u = random_uord(&mut rng, n, k, cfg.density)?;
        if u.generators().len() < cfg.min_generators {
            continue;
        }
        if let Some(witness) = search_cartesian(&u)? {
            out.push(CorpusEntry {
                name: format!("random{}.n{n}", out.len()),
                uord: u,
                witness,
            });
        }
    }
    Ok(out)
}

/// Seeded random uniform preorders on `1..=max_size` points, half generated
/// from partial functions (hence DCOs) and half from arbitrary relations.
pub fn random_mixed(count: usize, max_size: usize, seed: u64) -> Result<Vec<(String, UniformPreorder)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let n = 1 + i % max_size;
        let k = rng.gen_range(1..=2);
        let u = if i % 2 == 0 {
            let mut rels = vec![NamedRel::new("id", BinRel::identity(n))];
            for j in 0..k {
                let mut r = BinRel::empty(n, n);
                for a in 0..n {
                    if rng.gen_bool(0.7) {
                        r.insert(a, rng.gen_range(0..n));
                    }
                }
                rels.push(NamedRel::new(format!("f{j}"), r));
            }
            UniformPreorder::from_basis(Basis::new(Carrier::indexed(n), rels)?, false)?
        } else {
            random_uord(&mut rng, n, k, 0.4)?
        };
        out.push((format!("mixed{i}.n{n}"), u));
    }
    Ok(out)
}

/// Every uniform preorder on `n ≤ 2` points, one per generator set.
pub fn all_uords(n: usize) -> Result<Vec<UniformPreorder>> {
    if n > 2 {
        return Err(Error::CarrierTooLarge { size: n, bound: 2 });
    }
    let cells = n * n;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    // A uniform preorder is the saturation of its own relations, so
    // saturating every set of relations reaches all of them.
    for set in 0u64..(1 << (1 << cells)) {
        let mut rels = vec![NamedRel::new("id", BinRel::identity(n))];
        for r in 0..(1u64 << cells) {
            if set >> r & 1 == 1 {
                let rows = (0..n).map(|a| (r >> (a * n)) & ((1 << n) - 1)).collect();
                rels.push(NamedRel::new(format!("r{r}"), BinRel::from_rows(n, rows)?));
            }
        }
        let u = UniformPreorder::from_basis(Basis::new(Carrier::indexed(n), rels)?, false)?;
        let mut key: Vec<Vec<u64>> = u.generators().iter().map(|g| g.rel.rows().to_vec()).collect();
        key.sort();
        if seen.insert(key) {
            out.push(u);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_counts() {
        let c = meet_semilattices(4).unwrap();
        let names: Vec<_> = c.iter().map(|e| e.name.as_str()).collect();
        assert_eq!(names.len(), 5);
        assert_eq!(names.iter().filter(|n| n.starts_with("chain")).count(), 4);
        // Five lattices on five points: the chain, M3, N5 and two diamonds
        // extended by a new top or bottom.
        assert_eq!(meet_semilattices(5).unwrap().len(), 10);
    }

    #[test]
    fn random_corpus_is_cartesian_and_seeded() {
        let cfg = RandomCorpusConfig {
            count: 12,
            ..RandomCorpusConfig::default()
        };
        let a = random_cartesian(&cfg).unwrap();
        let b = random_cartesian(&cfg).unwrap();
        assert_eq!(a.len(), 12);
        for (x, y) in a.iter().zip(&b) {
            assert!(x.uord.same_relations(&y.uord));
            assert!(x.uord.size() <= 3);
        }
    }

    #[test]
    fn uords_on_two_points() {
        assert_eq!(all_uords(0).unwrap().len(), 1);
        assert_eq!(all_uords(1).unwrap().len(), 1);
        let two = all_uords(2).unwrap();
        assert!(two.iter().any(|u| u.is_dco()));
        assert!(two.iter().any(|u| !u.is_dco()));
    }
}
