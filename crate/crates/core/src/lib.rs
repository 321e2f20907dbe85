//! Finite models of uniform preorders.
//!
//! The crate builds uniform preorders from bases of relations, their
//! existential completion on the powerset, and decides cartesianness,
//! relational completeness and the laws of the associated indexed preorders
//! by exhaustive search over bounded universes. A small theory of partial
//! combinatory algebras, including a step-bounded SK-term evaluator, is
//! connected to uniform preorders through two bridges.

pub mod error;
pub mod relcore;
pub mod uord;
pub mod cartesian;
pub mod dcompletion;
pub mod logicaudit;
pub mod corpus;
pub mod relcomplete;
pub mod pca;

pub use error::{Error, Result};

#[cfg(test)]
mod testutil;

#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/uniform-preorders.md")]
    pub mod uniform_preorders {}
    #[doc = include_str!("../../../book/src/cartesian.md")]
    pub mod cartesian {}
    #[doc = include_str!("../../../book/src/completion.md")]
    pub mod completion {}
    #[doc = include_str!("../../../book/src/auditing.md")]
    pub mod auditing {}
    #[doc = include_str!("../../../book/src/relational-completeness.md")]
    pub mod relational_completeness {}
    #[doc = include_str!("../../../book/src/pca.md")]
    pub mod pca {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
    #[doc = include_str!("../../../book/src/acceptance.md")]
    pub mod acceptance {}
}
