//! Floor-action prediction for state legislation.
//!
//! The crate covers the whole modelling pipeline: corpus ingestion and status
//! normalization, contextual and lexical featurization, legislator
//! effectiveness scores, three base classifiers (a regularized log-linear
//! model, NBSVM and gradient-boosted trees), tree-structured Parzen estimator
//! hyperparameter search, an out-of-fold stacked meta-ensemble, and the
//! evaluation harness that produces accuracy / log-loss / AUROC reports per
//! state and chamber.
//!
//! The guide under `book/` walks through each stage; its code listings are
//! compiled and run as doc-tests of this crate.

pub mod analysis;
pub mod calibration;
pub mod cli;
pub mod corpus;
pub mod effectiveness;
pub mod ensemble;
pub mod features;
pub mod hyperopt;
pub mod models;
pub mod error;
pub mod eval;
pub mod synth;
pub mod textfeat;
pub(crate) mod util;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/corpus.md")]
    mod corpus {}
    #[doc = include_str!("../../../book/src/features.md")]
    mod features {}
    #[doc = include_str!("../../../book/src/text.md")]
    mod text {}
    #[doc = include_str!("../../../book/src/effectiveness.md")]
    mod effectiveness {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/calibration.md")]
    mod calibration {}
    #[doc = include_str!("../../../book/src/hyperopt.md")]
    mod hyperopt {}
    #[doc = include_str!("../../../book/src/ensemble.md")]
    mod ensemble {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/analysis.md")]
    mod analysis {}
    #[doc = include_str!("../../../book/src/synthetic.md")]
    mod synthetic {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
