//! Structure files: JSON documents naming a carrier and what lives on it.

use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use uniform_preorders::cartesian::CartesianWitness;
use uniform_preorders::pca::{Filter, RelPca, Strength, TableOpas};
use uniform_preorders::relcore::{BinRel, Carrier, FunTable};
use uniform_preorders::uord::{import_ordered, Basis, NamedRel, PartialFun, UniformPreorder};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error in {path}: {detail}")]
    Parse { path: String, detail: String },
    #[error("schema error at `{field}`: {detail}")]
    Schema { field: String, detail: String },
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error(transparent)]
    Core(#[from] uniform_preorders::Error),
}

pub type InputResult<T> = Result<T, InputError>;

fn schema(field: impl Into<String>, detail: impl Into<String>) -> InputError {
    InputError::Schema {
        field: field.into(),
        detail: detail.into(),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureFile {
    #[serde(default)]
    pub carrier: Vec<String>,
    #[serde(default)]
    pub basis: Option<Vec<RelSpec>>,
    /// `meet[a][b]` names `a ∧ b`.
    #[serde(default)]
    pub meet: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub top: Option<String>,
    #[serde(default)]
    pub order: Option<Vec<[String; 2]>>,
    #[serde(default)]
    pub bco_funs: Option<Vec<FunSpec>>,
    #[serde(default)]
    pub pca: Option<PcaSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelSpec {
    pub name: String,
    pub pairs: Vec<[String; 2]>,
}

/// A partial function as a list of `[argument, value]` pairs.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunSpec {
    pub name: String,
    pub graph: Vec<[String; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PcaSpec {
    /// `table[a][b]` names `a·b`, or is null where undefined.
    #[serde(default)]
    pub table: Option<Vec<Vec<Option<String>>>>,
    /// Selects the SK-term instance instead of a table.
    #[serde(default)]
    pub sk: bool,
    /// Filter members, or absent for the whole carrier.
    #[serde(default)]
    pub filter: Option<Vec<String>>,
    #[serde(default)]
    pub k: Option<String>,
    #[serde(default)]
    pub s: Option<String>,
    #[serde(default)]
    pub strong: bool,
}

/// A loaded structure file with the digest of its bytes.
#[derive(Debug)]
pub struct Loaded {
    pub file: StructureFile,
    pub carrier: Carrier,
    pub bytes: Vec<u8>,
}

pub fn load(path: &Path) -> InputResult<Loaded> {
    let shown = path.display().to_string();
    let bytes = std::fs::read(path).map_err(|source| InputError::Io {
        path: shown.clone(),
        source,
    })?;
    let file: StructureFile = serde_json::from_slice(&bytes).map_err(|e| InputError::Parse {
        path: shown,
        detail: e.to_string(),
    })?;
    let carrier = Carrier::new(file.carrier.iter().cloned())
        .map_err(|e| schema("carrier", e.to_string()))?;
    Ok(Loaded {
        file,
        carrier,
        bytes,
    })
}

impl Loaded {
    pub fn element(&self, name: &str) -> InputResult<usize> {
        self.carrier
            .index_of(name)
            .ok_or_else(|| InputError::UnknownName(name.to_string()))
    }

    fn relation(&self, pairs: &[[String; 2]]) -> InputResult<BinRel> {
        let n = self.carrier.size();
        let mut r = BinRel::empty(n, n);
        for [a, b] in pairs {
            r.insert(self.element(a)?, self.element(b)?);
        }
        Ok(r)
    }

    /// The uniform preorder of the file: generated by `basis`, or imported
    /// from `order` and `bco_funs`.
    pub fn uord(&self, auto_reflexive: bool) -> InputResult<UniformPreorder> {
        let f = &self.file;
        if let Some(basis) = &f.basis {
            let rels = basis
                .iter()
                .map(|r| Ok(NamedRel::new(r.name.clone(), self.relation(&r.pairs)?)))
                .collect::<InputResult<Vec<_>>>()?;
            let basis = Basis::new(self.carrier.clone(), rels)?;
            return Ok(UniformPreorder::from_basis(basis, auto_reflexive)?);
        }
        if let Some(order) = &f.order {
            let order = self.relation(order)?;
            let funs = f
                .bco_funs
                .iter()
                .flatten()
                .map(|s| self.partial_fun(s))
                .collect::<InputResult<Vec<_>>>()?;
            return Ok(import_ordered(self.carrier.clone(), &order, &funs)?);
        }
        if f.pca.as_ref().is_some_and(|p| p.table.is_some()) {
            let r = self.table_pca()?;
            return Ok(uniform_preorders::pca::rpca_to_dco(&r)?);
        }
        Err(schema("basis", "a basis, an order or a pca table is required"))
    }

    fn partial_fun(&self, s: &FunSpec) -> InputResult<PartialFun> {
        let mut values = vec![None; self.carrier.size()];
        for [a, b] in &s.graph {
            let a = self.element(a)?;
            if values[a].is_some() {
                return Err(schema(
                    format!("bco_funs.{}", s.name),
                    format!("`{}` has two values", self.carrier.name(a)),
                ));
            }
            values[a] = Some(self.element(b)?);
        }
        Ok(PartialFun {
            name: s.name.clone(),
            values,
        })
    }

    /// The `(∧, ⊤)` given in the file, unchecked.
    pub fn meet_top(&self) -> InputResult<Option<(FunTable, usize)>> {
        let f = &self.file;
        let (Some(meet), Some(top)) = (&f.meet, &f.top) else {
            if f.meet.is_some() != f.top.is_some() {
                return Err(schema("meet", "`meet` and `top` must be given together"));
            }
            return Ok(None);
        };
        let n = self.carrier.size();
        if meet.len() != n || meet.iter().any(|row| row.len() != n) {
            return Err(schema("meet", format!("expected a {n}×{n} table")));
        }
        let values = meet
            .iter()
            .flatten()
            .map(|x| self.element(x))
            .collect::<InputResult<Vec<_>>>()?;
        Ok(Some((FunTable::new(n, values)?, self.element(top)?)))
    }

    pub fn pca_spec(&self) -> InputResult<&PcaSpec> {
        self.file
            .pca
            .as_ref()
            .ok_or_else(|| schema("pca", "missing"))
    }

    pub fn is_sk(&self) -> bool {
        self.file.pca.as_ref().is_some_and(|p| p.sk)
    }

    pub fn table_pca(&self) -> InputResult<RelPca<TableOpas>> {
        let p = self.pca_spec()?;
        let table = p
            .table
            .as_ref()
            .ok_or_else(|| schema("pca.table", "missing"))?;
        let n = self.carrier.size();
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(schema("pca.table", format!("expected a {n}×{n} table")));
        }
        let values = table
            .iter()
            .flatten()
            .map(|x| x.as_deref().map(|x| self.element(x)).transpose())
            .collect::<InputResult<Vec<_>>>()?;
        let order = self.file.order.as_ref().map(|o| self.relation(o)).transpose()?;
        let pick = |x: &Option<String>| x.as_deref().map(|x| self.element(x)).transpose();
        let opas = TableOpas::new(self.carrier.clone(), values, order, pick(&p.k)?, pick(&p.s)?)?;
        let filter = match &p.filter {
            Some(m) => Filter::Members(
                m.iter()
                    .map(|x| self.element(x))
                    .collect::<InputResult<Vec<_>>>()?,
            ),
            None => Filter::All,
        };
        Ok(RelPca {
            opas,
            filter,
            strength: if p.strong { Strength::Strong } else { Strength::Weak },
        })
    }
}

/// Parses a JSON array of element names into a predicate.
pub fn predicate(loaded: &Loaded, flag: &str, src: &str) -> InputResult<FunTable> {
    let names: Vec<String> =
        serde_json::from_str(src).map_err(|e| schema(flag, e.to_string()))?;
    let values = names
        .iter()
        .map(|x| loaded.element(x))
        .collect::<InputResult<Vec<_>>>()?;
    Ok(FunTable::new(loaded.carrier.size(), values)?)
}

/// Parses a JSON array of arrays of element names into subset masks.
pub fn subset_predicate(loaded: &Loaded, flag: &str, src: &str) -> InputResult<Vec<u64>> {
    let sets: Vec<Vec<String>> =
        serde_json::from_str(src).map_err(|e| schema(flag, e.to_string()))?;
    sets.iter()
        .map(|set| {
            set.iter()
                .try_fold(0u64, |m, x| Ok(m | 1 << loaded.element(x)?))
        })
        .collect()
}

/// A map between carriers given as a JSON array of target names.
pub fn map(src: &Loaded, tgt: &Loaded, flag: &str, text: &str) -> InputResult<FunTable> {
    let names: Vec<String> =
        serde_json::from_str(text).map_err(|e| schema(flag, e.to_string()))?;
    if names.len() != src.carrier.size() {
        return Err(schema(
            flag,
            format!("expected {} values, got {}", src.carrier.size(), names.len()),
        ));
    }
    let values = names
        .iter()
        .map(|x| tgt.element(x))
        .collect::<InputResult<Vec<_>>>()?;
    Ok(FunTable::new(tgt.carrier.size(), values)?)
}

/// The witness shape shared by several commands.
pub fn witness_json(carrier: &Carrier, w: &CartesianWitness) -> serde_json::Value {
    let n = carrier.size();
    let meet: Vec<Vec<&str>> = (0..n)
        .map(|a| (0..n).map(|b| carrier.name(w.meet_of(a, b))).collect())
        .collect();
    serde_json::json!({
        "meet": meet,
        "top": carrier.name(w.top),
        "tau": w.tau,
        "lambda": w.lambda,
        "rho": w.rho,
    })
}
