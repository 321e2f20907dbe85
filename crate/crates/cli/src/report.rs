//! Machine-readable reports and their text rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA: u32 = 1;

/// Outcome of one law or query.
#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    pub pass: bool,
    #[serde(flatten)]
    pub fields: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recheck: Option<bool>,
}

impl Entry {
    pub fn new(pass: bool) -> Self {
        Entry {
            pass,
            fields: Map::new(),
            recheck: None,
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.fields.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub input_digest: String,
    pub config: Value,
    pub results: BTreeMap<String, Entry>,
    pub runtime_ms: Option<u64>,
}

impl Report {
    pub fn new(command: &str, input_digest: String, config: Value) -> Self {
        Report {
            schema: SCHEMA,
            command: command.to_string(),
            input_digest,
            config,
            results: BTreeMap::new(),
            runtime_ms: None,
        }
    }

    pub fn add(&mut self, law: impl Into<String>, entry: Entry) -> &mut Entry {
        let law = law.into();
        self.results.insert(law.clone(), entry);
        self.results.get_mut(&law).expect("just inserted")
    }

    pub fn pass(&self) -> bool {
        self.results
            .values()
            .all(|e| e.pass && e.recheck != Some(false))
    }

    pub fn exit_code(&self) -> u8 {
        if self.pass() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} ({})", self.command, self.input_digest);
        for (law, e) in &self.results {
            let verdict = match (e.pass, e.fields.get("skipped")) {
                (_, Some(Value::Bool(true))) => "SKIP",
                (true, _) => "PASS",
                (false, _) => "FAIL",
            };
            let _ = writeln!(out, "{verdict} {law}: {}", describe(law));
            for (k, v) in &e.fields {
                if k != "skipped" {
                    let _ = writeln!(out, "    {k}: {v}");
                }
            }
            if let Some(r) = e.recheck {
                let _ = writeln!(out, "    recheck: {}", if r { "confirmed" } else { "NOT confirmed" });
            }
        }
        if let Some(ms) = self.runtime_ms {
            let _ = writeln!(out, "runtime: {ms} ms");
        }
        out
    }
}

/// `sha256:` digest of the concatenated inputs.
pub fn digest(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    format!("sha256:{}", hex::encode(h.finalize()))
}

/// The condition each law name stands for.
pub fn describe(law: &str) -> &'static str {
    let law = law.strip_prefix("prim.").unwrap_or(law);
    let law = law.split_once('[').map_or(law, |(head, _)| head);
    match law {
        "structure" => "basis saturates to a uniform preorder",
        "saturate" => "maximal antichain of generators",
        "leq" => "some generator contains the pairing graph",
        "monotone" => "image of every source generator lies in the target",
        "adjunction.counit" => "counit {(f(g(b)), b)} lies in the target",
        "cartesian" => "top and meet realize the diagonal and terminal right adjoints",
        "dcomplete" => "down-set completion on the powerset",
        "eta.monotone" => "singleton map is monotone",
        "eta.order_reflecting" => "singleton map reflects the fiber order",
        "eta.prime_singletons" | "primes.singletons" => "singleton-valued predicates are ∃-prime",
        "eta.decomposition" | "primes.decomposition" => {
            "every predicate is ∃ of a singleton-valued one"
        }
        "relcomp" => "universal relation with function witnesses",
        "dco" => "every generator is single-valued",
        "discrete" | "discrete_generic" => "unique factorization against surjections",
        "prime" => "inequalities into existentials split through a section",
        "meets.top" => "each fiber has a top",
        "meets.glb" => "each fiber has binary meets",
        "meets.stable" => "reindexing preserves top and meets",
        "meets.constructor" => "pointwise meets compute the fiber meets",
        "exists.adjoint" => "reindexing has left adjoints",
        "exists.constructor" => "image construction computes the left adjoints",
        "exists.beck_chevalley" => "left adjoints commute with pullback",
        "exists.frobenius" => "meets distribute over left adjoints",
        "heyting.implication" => "each fiber is a Heyting preorder",
        "heyting.stable" => "reindexing preserves implication",
        "forall.adjoint" => "reindexing has right adjoints",
        "forall.beck_chevalley" => "right adjoints commute with pullback",
        "forall.constructor" => "witness-built universal matches brute force",
        "generic" => "generic predicate exists for fam-style structures",
        "dalgebra" => "singleton map has a left adjoint",
        "eval" => "term evaluates within budget",
        "compile" => "bracket abstraction of the polynomial",
        "obligations" => "compiled term is defined and below the polynomial",
        "combinators.k" => "k·a·b ≤ a",
        "combinators.s_defined" => "s·a·b is defined",
        "combinators.s" => "s·a·b·c ≤ a·c·(b·c)",
        "combinators.strong" => "s·a·b·c defined iff a·c·(b·c) defined",
        "filter.upward_closed" => "filter is upward closed",
        "filter.application_closed" => "filter is closed under application",
        "filter.contains_ks" => "filter contains k and s",
        "bridge.to_dco" => "basis of realizer relations e·a ≤ b",
        "bridge.to_rpca" => "application a·b = @(a∧b) with filter of global elements",
        "bridge.round_trip" => "round trip reproduces the generators",
        "bridge.fiber_leq" => "realizer found for the fiber inequality",
        "bridge.polynomial" => "partial evaluation lies in the n-ary relations",
        "corpus" => "relational completeness agrees with the tripos audit",
        "corpus.disagreements" => "no entry disagrees",
        _ if law.starts_with("adjunction.transform") => "target generator transforms into the source",
        _ if law.starts_with("corpus.") => "relational completeness agrees with the tripos audit",
        _ => "",
    }
}
