//! Carriers, binary relations and total function tables.
//!
//! Relations are dense bit matrices: row `a` is a `u64` whose bit `b` is set
//! iff `(a, b)` is in the relation, so targets are limited to 64 elements.
//! Composition is written in diagrammatic order of application: in
//! [`compose`]`(r, s)` the relation `r` is applied first, giving the
//! relation usually written `s ∘ r`.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Largest carrier a single bit-matrix row can address.
pub const WORD_BITS: usize = 64;

/// Default bound on carrier sizes for constructions that build new carriers.
pub const DEFAULT_MAX_CARRIER: usize = 16;

/// A finite set of named elements, indexed `0..size`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Carrier {
    names: Vec<String>,
}

impl Carrier {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut seen = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if let Some(j) = seen.insert(n.as_str(), i) {
                return Err(Error::CarrierMismatch(format!(
                    "duplicate element label `{n}` at positions {j} and {i}"
                )));
            }
        }
        Ok(Carrier { names })
    }

    /// The carrier `{0, 1, …, n-1}` labelled by decimal numerals.
    pub fn indexed(n: usize) -> Self {
        Carrier {
            names: (0..n).map(|i| i.to_string()).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// A binary relation between finite carriers of sizes `source` and `target`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinRel {
    source: usize,
    target: usize,
    rows: Vec<u64>,
}

impl BinRel {
    /// The empty relation. Panics if `target` exceeds [`WORD_BITS`].
    pub fn empty(source: usize, target: usize) -> Self {
        assert!(
            target <= WORD_BITS,
            "relation target of size {target} exceeds {WORD_BITS}"
        );
        BinRel {
            source,
            target,
            rows: vec![0; source],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = BinRel::empty(n, n);
        for a in 0..n {
            r.rows[a] = 1 << a;
        }
        r
    }

    pub fn full(source: usize, target: usize) -> Self {
        let mut r = BinRel::empty(source, target);
        let mask = word_mask(target);
        r.rows.iter_mut().for_each(|row| *row = mask);
        r
    }

    pub fn from_pairs(
        source: usize,
        target: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut r = BinRel::empty(source, target);
        for (a, b) in pairs {
            if a >= source || b >= target {
                return Err(Error::CarrierMismatch(format!(
                    "pair ({a}, {b}) outside {source} × {target}"
                )));
            }
            r.insert(a, b);
        }
        Ok(r)
    }

    /// Builds a relation from explicit rows; bits beyond `target` are rejected.
    pub fn from_rows(target: usize, rows: Vec<u64>) -> Result<Self> {
        if target > WORD_BITS {
            return Err(Error::CarrierTooLarge {
                size: target,
                bound: WORD_BITS,
            });
        }
        if rows.iter().any(|r| r & !word_mask(target) != 0) {
            return Err(Error::CarrierMismatch(format!(
                "row bits outside target of size {target}"
            )));
        }
        Ok(BinRel {
            source: rows.len(),
            target,
            rows,
        })
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn is_square(&self) -> bool {
        self.source == self.target
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    /// Successor set of `a` as a bit mask.
    pub fn row(&self, a: usize) -> u64 {
        self.rows[a]
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.rows[a] >> b & 1 == 1
    }

    pub fn insert(&mut self, a: usize, b: usize) {
        debug_assert!(a < self.source && b < self.target);
        self.rows[a] |= 1 << b;
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(a, &row)| bits(row).map(move |b| (a, b)))
    }

    /// Bitwise inclusion. Relations of different shapes are never included.
    pub fn is_subset(&self, other: &BinRel) -> bool {
        self.source == other.source
            && self.target == other.target
            && self
                .rows
                .iter()
                .zip(&other.rows)
                .all(|(a, b)| a & !b == 0)
    }

    pub fn union(&self, other: &BinRel) -> Result<BinRel> {
        same_shape(self, other)?;
        Ok(BinRel {
            source: self.source,
            target: self.target,
            rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a | b).collect(),
        })
    }

    pub fn converse(&self) -> BinRel {
        let mut r = BinRel::empty(self.target, self.source);
        for (a, b) in self.pairs() {
            r.insert(b, a);
        }
        r
    }

    /// The product relation `r × s` on `A × B`, pairs encoded as `a * |B| + b`.
    pub fn product(&self, other: &BinRel) -> BinRel {
        let (ns, nt) = (other.source, other.target);
        let mut r = BinRel::empty(self.source * ns, self.target * nt);
        for (a, a2) in self.pairs() {
            for (b, b2) in other.pairs() {
                r.insert(a * ns + b, a2 * nt + b2);
            }
        }
        r
    }

    /// Pretty-prints the pairs using element labels.
    pub fn display_with<'a>(&'a self, src: &'a Carrier, tgt: &'a Carrier) -> impl fmt::Display + 'a {
        DisplayRel {
            rel: self,
            src,
            tgt,
        }
    }
}

impl fmt::Display for BinRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (a, b)) in self.pairs().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({a},{b})")?;
        }
        write!(f, "}}")
    }
}

struct DisplayRel<'a> {
    rel: &'a BinRel,
    src: &'a Carrier,
    tgt: &'a Carrier,
}

impl fmt::Display for DisplayRel<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (a, b)) in self.rel.pairs().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({},{})", self.src.name(a), self.tgt.name(b))?;
        }
        write!(f, "}}")
    }
}

/// A total function between finite carriers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FunTable {
    target: usize,
    values: Vec<usize>,
}

impl FunTable {
    pub fn new(target: usize, values: Vec<usize>) -> Result<Self> {
        if let Some(&v) = values.iter().find(|&&v| v >= target) {
            return Err(Error::CarrierMismatch(format!(
                "function value {v} outside target of size {target}"
            )));
        }
        Ok(FunTable { target, values })
    }

    pub fn identity(n: usize) -> Self {
        FunTable {
            target: n,
            values: (0..n).collect(),
        }
    }

    pub fn constant(source: usize, target: usize, value: usize) -> Self {
        assert!(value < target, "constant {value} outside target {target}");
        FunTable {
            target,
            values: vec![value; source],
        }
    }

    pub fn source(&self) -> usize {
        self.values.len()
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn apply(&self, i: usize) -> usize {
        self.values[i]
    }

    /// `other ∘ self`: apply `self` first.
    pub fn then(&self, other: &FunTable) -> Result<FunTable> {
        if self.target != other.source() {
            return Err(Error::CarrierMismatch(format!(
                "cannot compose map into {} with map from {}",
                self.target,
                other.source()
            )));
        }
        Ok(FunTable {
            target: other.target,
            values: self.values.iter().map(|&v| other.values[v]).collect(),
        })
    }

    pub fn graph(&self) -> BinRel {
        let mut r = BinRel::empty(self.source(), self.target);
        for (i, &v) in self.values.iter().enumerate() {
            r.insert(i, v);
        }
        r
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target];
        self.values.iter().for_each(|&v| hit[v] = true);
        hit.into_iter().all(|h| h)
    }

    pub fn is_injective(&self) -> bool {
        let mut hit = vec![false; self.target];
        self.values.iter().all(|&v| !std::mem::replace(&mut hit[v], true))
    }
}

/// Single-valuedness and totality of a relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub single_valued: bool,
    pub entire: bool,
}

impl Classification {
    pub fn is_function(&self) -> bool {
        self.single_valued && self.entire
    }
}

/// `s ∘ r`, with `r` applied first.
pub fn compose(r: &BinRel, s: &BinRel) -> Result<BinRel> {
    if r.target != s.source {
        return Err(Error::CarrierMismatch(format!(
            "compose: target {} of the first relation differs from source {} of the second",
            r.target, s.source
        )));
    }
    let mut out = BinRel::empty(r.source, s.target);
    for (a, &row) in r.rows.iter().enumerate() {
        out.rows[a] = bits(row).fold(0, |acc, b| acc | s.rows[b]);
    }
    Ok(out)
}

/// `{(f a, g a′) : (a, a′) ∈ r}`.
pub fn map_image(f: &FunTable, g: &FunTable, r: &BinRel) -> Result<BinRel> {
    if f.source() != r.source || g.source() != r.target {
        return Err(Error::CarrierMismatch(format!(
            "map_image: legs {}→{} and {}→{} do not fit a {}×{} relation",
            f.source(),
            f.target,
            g.source(),
            g.target,
            r.source,
            r.target
        )));
    }
    let mut out = BinRel::empty(f.target, g.target);
    for (a, b) in r.pairs() {
        out.insert(f.values[a], g.values[b]);
    }
    Ok(out)
}

/// The image `{(φ i, ψ i) : i ∈ I}` of the pairing of two predicates.
pub fn pair_graph(phi: &FunTable, psi: &FunTable) -> Result<BinRel> {
    if phi.source() != psi.source() || phi.target != psi.target {
        return Err(Error::CarrierMismatch(format!(
            "pair_graph: predicates {}→{} and {}→{} differ in shape",
            phi.source(),
            phi.target,
            psi.source(),
            psi.target
        )));
    }
    let mut out = BinRel::empty(phi.target, psi.target);
    for (&x, &y) in phi.values.iter().zip(&psi.values) {
        out.insert(x, y);
    }
    Ok(out)
}

/// `s* = {(a, g b) : (f a, b) ∈ s}` for `f: A → B`, `g: B → A` and `s` on `B`.
pub fn star_transform(s: &BinRel, f: &FunTable, g: &FunTable) -> Result<BinRel> {
    if !s.is_square()
        || f.target != s.source
        || g.source() != s.source
        || g.target != f.source()
    {
        return Err(Error::CarrierMismatch(
            "star_transform: expected f: A→B, g: B→A and s on B".into(),
        ));
    }
    let a_size = f.source();
    let mut out = BinRel::empty(a_size, a_size);
    for a in 0..a_size {
        for b in bits(s.rows[f.values[a]]) {
            out.insert(a, g.values[b]);
        }
    }
    Ok(out)
}

/// `⟨⟨r, s⟩⟩ = {(a, b ∧ c) : (a, b) ∈ r, (a, c) ∈ s}` for a binary `meet` table
/// on `A × A` encoded as `b * |A| + c`.
pub fn meet_pair(r: &BinRel, s: &BinRel, meet: &FunTable) -> Result<BinRel> {
    let n = r.source;
    if !r.is_square() || !s.is_square() || s.source != n {
        return Err(Error::CarrierMismatch(
            "meet_pair: relations must live on the same carrier".into(),
        ));
    }
    if meet.source() != n * n || meet.target != n {
        return Err(Error::CarrierMismatch(format!(
            "meet_pair: meet table must map {}×{} into {}",
            n, n, n
        )));
    }
    let mut out = BinRel::empty(n, n);
    for a in 0..n {
        let mut row = 0u64;
        for b in bits(r.rows[a]) {
            for c in bits(s.rows[a]) {
                row |= 1 << meet.values[b * n + c];
            }
        }
        out.rows[a] = row;
    }
    Ok(out)
}

pub fn classify(r: &BinRel) -> Classification {
    Classification {
        single_valued: r.rows.iter().all(|row| row.count_ones() <= 1),
        entire: r.rows.iter().all(|&row| row != 0),
    }
}

/// Iterates over the set bits of a word in increasing order.
pub fn bits(mut word: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if word == 0 {
            None
        } else {
            let b = word.trailing_zeros() as usize;
            word &= word - 1;
            Some(b)
        }
    })
}

pub(crate) fn word_mask(n: usize) -> u64 {
    if n >= WORD_BITS {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn same_shape(r: &BinRel, s: &BinRel) -> Result<()> {
    if r.source != s.source || r.target != s.target {
        return Err(Error::CarrierMismatch(format!(
            "relations of shape {}×{} and {}×{}",
            r.source, r.target, s.source, s.target
        )));
    }
    Ok(())
}
