//! Uniform preorders presented by a saturated antichain of generators.
//!
//! A uniform preorder on a carrier `A` is a down-closed set `R` of relations
//! on `A` containing the identity and closed under composition. We never
//! materialize `R`; we keep the maximal antichain of relations generating it,
//! so membership of `r` means "some generator contains `r`".

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::relcore::{
    classify, compose, map_image, pair_graph, star_transform, BinRel, Carrier, FunTable,
    DEFAULT_MAX_CARRIER, WORD_BITS,
};

/// Predicates `I → A` are total function tables.
pub type Predicate = FunTable;

/// Resource bounds for constructions that build new carriers or relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_carrier: usize,
    pub max_saturation: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_carrier: DEFAULT_MAX_CARRIER,
            max_saturation: 4096,
        }
    }
}

/// A relation with a human-readable name.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NamedRel {
    pub name: String,
    pub rel: BinRel,
}

impl NamedRel {
    pub fn new(name: impl Into<String>, rel: BinRel) -> Self {
        NamedRel {
            name: name.into(),
            rel,
        }
    }
}

/// A generating set of relations on a carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    carrier: Carrier,
    rels: Vec<NamedRel>,
}

impl Basis {
    pub fn new(carrier: Carrier, rels: Vec<NamedRel>) -> Result<Self> {
        let n = carrier.size();
        if n > WORD_BITS {
            return Err(Error::CarrierTooLarge {
                size: n,
                bound: WORD_BITS,
            });
        }
        for r in &rels {
            if r.rel.source() != n || r.rel.target() != n {
                return Err(Error::CarrierMismatch(format!(
                    "basis relation `{}` is {}×{} on a carrier of size {n}",
                    r.name,
                    r.rel.source(),
                    r.rel.target()
                )));
            }
        }
        Ok(Basis { carrier, rels })
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn rels(&self) -> &[NamedRel] {
        &self.rels
    }
}

/// Generator naming a relation that realizes an inequality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeqWitness {
    pub generator: usize,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniformPreorder {
    carrier: Carrier,
    generators: Vec<NamedRel>,
}

impl UniformPreorder {
    /// Saturates a basis with the default [`Limits`].
    pub fn from_basis(basis: Basis, auto_reflexive: bool) -> Result<Self> {
        Self::from_basis_with(basis, auto_reflexive, Limits::default())
    }

    pub fn from_basis_with(basis: Basis, auto_reflexive: bool, limits: Limits) -> Result<Self> {
        let Basis { carrier, mut rels } = basis;
        let n = carrier.size();
        if n > limits.max_carrier {
            return Err(Error::CarrierTooLarge {
                size: n,
                bound: limits.max_carrier,
            });
        }
        let id = BinRel::identity(n);
        if !rels.iter().any(|r| id.is_subset(&r.rel)) {
            if !auto_reflexive {
                return Err(Error::MissingReflexivity);
            }
            rels.push(NamedRel::new("id", id));
        }
        let generators = saturate(rels, limits.max_saturation)?;
        Ok(UniformPreorder {
            carrier,
            generators,
        })
    }

    /// The canonical indexing of a preorder: generated by the order itself.
    pub fn from_order(carrier: Carrier, order: BinRel) -> Result<Self> {
        check_preorder(&order)?;
        let basis = Basis::new(carrier, vec![NamedRel::new("leq", order)])?;
        Self::from_basis(basis, false)
    }

    /// The discrete uniform preorder generated by the identity alone.
    pub fn discrete(carrier: Carrier) -> Self {
        let n = carrier.size();
        UniformPreorder {
            carrier,
            generators: vec![NamedRel::new("id", BinRel::identity(n))],
        }
    }

    /// Wraps an antichain already known to be saturated and reflexive.
    pub(crate) fn from_saturated(carrier: Carrier, generators: Vec<NamedRel>) -> Self {
        UniformPreorder {
            carrier,
            generators,
        }
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn size(&self) -> usize {
        self.carrier.size()
    }

    pub fn generators(&self) -> &[NamedRel] {
        &self.generators
    }

    /// Some generator containing `r`, if any.
    pub fn contains(&self, r: &BinRel) -> Result<Option<LeqWitness>> {
        self.check_square(r)?;
        Ok(self.find_generator(r))
    }

    pub(crate) fn find_generator(&self, r: &BinRel) -> Option<LeqWitness> {
        self.generators
            .iter()
            .position(|g| r.is_subset(&g.rel))
            .map(|i| LeqWitness {
                generator: i,
                name: self.generators[i].name.clone(),
            })
    }

    pub(crate) fn has(&self, r: &BinRel) -> bool {
        self.generators.iter().any(|g| r.is_subset(&g.rel))
    }

    /// `φ ≤ ψ` in the fiber of `fam` over the common index set.
    pub fn fiber_leq(&self, phi: &Predicate, psi: &Predicate) -> Result<Option<LeqWitness>> {
        if phi.target() != self.size() {
            return Err(Error::CarrierMismatch(format!(
                "predicate target {} differs from carrier size {}",
                phi.target(),
                self.size()
            )));
        }
        Ok(self.find_generator(&pair_graph(phi, psi)?))
    }

    /// True when every generator is single-valued.
    pub fn is_dco(&self) -> bool {
        self.non_functional_generator().is_none()
    }

    /// The first generator that is not single-valued.
    pub fn non_functional_generator(&self) -> Option<&NamedRel> {
        self.generators
            .iter()
            .find(|g| !classify(&g.rel).single_valued)
    }

    /// Equality of the generated uniform preorders: same carrier size and
    /// the same generator antichain as a set.
    pub fn same_relations(&self, other: &UniformPreorder) -> bool {
        self.size() == other.size()
            && self.generators.len() == other.generators.len()
            && self
                .generators
                .iter()
                .all(|g| other.generators.iter().any(|h| h.rel == g.rel))
    }

    fn check_square(&self, r: &BinRel) -> Result<()> {
        let n = self.size();
        if r.source() != n || r.target() != n {
            return Err(Error::CarrierMismatch(format!(
                "relation {}×{} on a carrier of size {n}",
                r.source(),
                r.target()
            )));
        }
        Ok(())
    }
}

/// Closes a basis under composition, keeping only maximal relations.
fn saturate(rels: Vec<NamedRel>, bound: usize) -> Result<Vec<NamedRel>> {
    let mut seen: HashSet<BinRel> = HashSet::new();
    let mut gens: Vec<NamedRel> = Vec::new();
    let admit = |gens: &mut Vec<NamedRel>, cand: NamedRel| -> bool {
        if gens.iter().any(|g| cand.rel.is_subset(&g.rel)) {
            return false;
        }
        gens.retain(|g| !g.rel.is_subset(&cand.rel));
        gens.push(cand);
        true
    };
    for r in rels {
        seen.insert(r.rel.clone());
        admit(&mut gens, r);
    }
    loop {
        let mut changed = false;
        let snapshot = gens.clone();
        for g in &snapshot {
            for h in &snapshot {
                let c = compose(&g.rel, &h.rel)?;
                if !seen.insert(c.clone()) {
                    continue;
                }
                if seen.len() > bound {
                    return Err(Error::SaturationBound { bound });
                }
                let name = format!("{}∘{}", h.name, g.name);
                changed |= admit(&mut gens, NamedRel::new(name, c));
            }
        }
        if !changed {
            return Ok(gens);
        }
    }
}

/// Whether `f` maps every generator of `src` into `tgt`.
pub fn check_monotone(f: &FunTable, src: &UniformPreorder, tgt: &UniformPreorder) -> Result<bool> {
    Ok(non_monotone_generator(f, src, tgt)?.is_none())
}

/// The first generator of `src` whose image under `f × f` escapes `tgt`.
pub fn non_monotone_generator<'a>(
    f: &FunTable,
    src: &'a UniformPreorder,
    tgt: &UniformPreorder,
) -> Result<Option<&'a NamedRel>> {
    check_map(f, src, tgt)?;
    for g in &src.generators {
        if !tgt.has(&map_image(f, f, &g.rel)?) {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

/// Outcome of the adjunction criterion for `f: A → B` and `g: B → A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjunctionReport {
    /// `{(f(g(b)), b)}` lies in the target uniform preorder.
    pub counit: bool,
    /// For each target generator `s`, whether `s*` lies in the source.
    pub transforms: Vec<(String, bool)>,
}

impl AdjunctionReport {
    pub fn pass(&self) -> bool {
        self.counit && self.transforms.iter().all(|(_, ok)| *ok)
    }
}

/// Decides whether `g` is a monotone right adjoint of the monotone map `f`.
pub fn check_adjunction(
    f: &FunTable,
    g: &FunTable,
    src: &UniformPreorder,
    tgt: &UniformPreorder,
) -> Result<AdjunctionReport> {
    check_map(f, src, tgt)?;
    check_map(g, tgt, src)?;
    if let Some(bad) = non_monotone_generator(f, src, tgt)? {
        return Err(Error::NotMonotone(format!(
            "f (image of generator `{}`)",
            bad.name
        )));
    }
    let fg = g.then(f)?;
    let counit = tgt.has(&pair_graph(&fg, &FunTable::identity(tgt.size()))?);
    let transforms = tgt
        .generators
        .iter()
        .map(|s| Ok((s.name.clone(), src.has(&star_transform(&s.rel, f, g)?))))
        .collect::<Result<_>>()?;
    Ok(AdjunctionReport { counit, transforms })
}

/// The product uniform preorder on `A × B`, element `(a, b)` at `a * |B| + b`.
pub fn product(u: &UniformPreorder, v: &UniformPreorder) -> Result<UniformPreorder> {
    product_with(u, v, Limits::default())
}

pub fn product_with(u: &UniformPreorder, v: &UniformPreorder, limits: Limits) -> Result<UniformPreorder> {
    let size = u.size() * v.size();
    if size > limits.max_carrier {
        return Err(Error::CarrierTooLarge {
            size,
            bound: limits.max_carrier,
        });
    }
    let names = (0..u.size()).flat_map(|a| {
        (0..v.size()).map(move |b| format!("({},{})", u.carrier.name(a), v.carrier.name(b)))
    });
    let carrier = Carrier::new(names.collect::<Vec<_>>())?;
    let mut rels = Vec::new();
    for g in &u.generators {
        for h in &v.generators {
            rels.push(NamedRel::new(
                format!("{}×{}", g.name, h.name),
                g.rel.product(&h.rel),
            ));
        }
    }
    UniformPreorder::from_basis_with(Basis::new(carrier, rels)?, false, limits)
}

/// The two projections out of a product built by [`product`].
pub fn projections(a: usize, b: usize) -> (FunTable, FunTable) {
    let fst = (0..a * b).map(|k| k / b.max(1)).collect();
    let snd = (0..a * b).map(|k| k % b.max(1)).collect();
    (
        FunTable::new(a, fst).expect("projection values in range"),
        FunTable::new(b, snd).expect("projection values in range"),
    )
}

/// A monotone partial endofunction, `None` where undefined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialFun {
    pub name: String,
    pub values: Vec<Option<usize>>,
}

impl PartialFun {
    pub fn total(name: impl Into<String>, f: &FunTable) -> Self {
        PartialFun {
            name: name.into(),
            values: f.values().iter().map(|&v| Some(v)).collect(),
        }
    }

    fn at(&self, a: usize) -> Option<usize> {
        self.values[a]
    }

    /// `r_f = {(a, b) : f(a) defined and f(a) ≤ b}`.
    pub fn realizer_relation(&self, order: &BinRel) -> BinRel {
        let mut r = BinRel::empty(order.source(), order.target());
        for a in 0..order.source() {
            if let Some(fa) = self.at(a) {
                for b in 0..order.target() {
                    if order.contains(fa, b) {
                        r.insert(a, b);
                    }
                }
            }
        }
        r
    }
}

/// Checks that a square relation is reflexive and transitive.
pub fn check_preorder(order: &BinRel) -> Result<()> {
    if !order.is_square() {
        return Err(Error::NotAPreorder("order is not square".into()));
    }
    let n = order.source();
    if let Some(a) = (0..n).find(|&a| !order.contains(a, a)) {
        return Err(Error::NotAPreorder(format!("element {a} is not below itself")));
    }
    if !compose(order, order)?.is_subset(order) {
        return Err(Error::NotAPreorder("order is not transitive".into()));
    }
    Ok(())
}

/// The basis `{r_f}` of a BCO, after validating its axioms.
///
/// Returns the bare order as sole basis element when `funs` is empty or
/// consists of the identity alone.
pub fn bco_basis(carrier: Carrier, order: &BinRel, funs: &[PartialFun]) -> Result<Basis> {
    check_preorder(order)?;
    let n = carrier.size();
    if order.source() != n {
        return Err(Error::CarrierMismatch(format!(
            "order on {} elements for a carrier of size {n}",
            order.source()
        )));
    }
    for f in funs {
        validate_partial(f, order)?;
    }
    let identity_only = funs.len() == 1 && (0..n).all(|a| funs[0].at(a) == Some(a));
    if funs.is_empty() || identity_only {
        return Basis::new(carrier, vec![NamedRel::new("leq", order.clone())]);
    }
    let has_unit = funs
        .iter()
        .any(|i| (0..n).all(|a| i.at(a).is_some_and(|ia| order.contains(ia, a))));
    if !has_unit {
        return Err(Error::BcoAxiomViolation {
            axiom: "i",
            detail: "no function i with i(a) ≤ a for every a".into(),
        });
    }
    for f in funs {
        for g in funs {
            let ok = funs.iter().any(|h| {
                (0..n).all(|a| match f.at(a).and_then(|fa| g.at(fa)) {
                    Some(gfa) => h.at(a).is_some_and(|ha| order.contains(ha, gfa)),
                    None => true,
                })
            });
            if !ok {
                return Err(Error::BcoAxiomViolation {
                    axiom: "ii",
                    detail: format!(
                        "no h with h(a) ≤ {}({}(a)) wherever the right side is defined",
                        g.name, f.name
                    ),
                });
            }
        }
    }
    let rels = funs
        .iter()
        .map(|f| NamedRel::new(format!("r_{}", f.name), f.realizer_relation(order)))
        .collect();
    Basis::new(carrier, rels)
}

/// Imports an ordered set, optionally with BCO functions, as a uniform preorder.
pub fn import_ordered(carrier: Carrier, order: &BinRel, funs: &[PartialFun]) -> Result<UniformPreorder> {
    UniformPreorder::from_basis(bco_basis(carrier, order, funs)?, false)
}

fn validate_partial(f: &PartialFun, order: &BinRel) -> Result<()> {
    let n = order.source();
    let bad = |detail: String| Error::InvalidPartialFunction {
        name: f.name.clone(),
        detail,
    };
    if f.values.len() != n {
        return Err(bad(format!("{} entries for {n} elements", f.values.len())));
    }
    if let Some(v) = f.values.iter().flatten().find(|&&v| v >= n) {
        return Err(bad(format!("value {v} outside the carrier")));
    }
    for (a, b) in order.pairs() {
        match (f.at(a), f.at(b)) {
            (None, Some(_)) => {
                return Err(bad(format!("domain is not down-closed: {a} ≤ {b}")));
            }
            (Some(fa), Some(fb)) if !order.contains(fa, fb) => {
                return Err(bad(format!("not monotone: {a} ≤ {b} but f({a}) ≰ f({b})")));
            }
            _ => {}
        }
    }
    Ok(())
}

fn check_map(f: &FunTable, src: &UniformPreorder, tgt: &UniformPreorder) -> Result<()> {
    if f.source() != src.size() || f.target() != tgt.size() {
        return Err(Error::CarrierMismatch(format!(
            "map {}→{} between carriers of sizes {} and {}",
            f.source(),
            f.target(),
            src.size(),
            tgt.size()
        )));
    }
    Ok(())
}
