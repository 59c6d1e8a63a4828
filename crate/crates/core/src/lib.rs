//! Building blocks for impossible-language experiments: aligned parallel
//! corpora, tokenizers, word-order perturbations, noun-phrase reordering on
//! constituency trees, an n-gram language model, and the evaluation
//! statistics that compare learnability across variants.
//!
//! ```
//! use implang::perturb::{Perturbation, PerturbationSpec};
//! use implang::tokenize::TokenSequence;
//!
//! let spec: PerturbationSpec = "reverse_full".parse().unwrap();
//! assert_eq!(spec.kind, Perturbation::ReverseFull);
//! let seq = TokenSequence::words("the cat sat");
//! let out = spec.apply(&seq, 0);
//! assert_eq!(out.render(), "sat cat the");
//! assert_eq!(spec.recover(&out).unwrap(), seq);
//! ```
//!
//! Every randomized step draws from [`rng::SplitMix64`] keyed by an explicit
//! seed, so results are reproducible across runs and thread counts.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod ngram;
pub mod nptree;
pub mod perturb;
pub mod rng;
pub mod tokenize;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/corpus.md")]
    mod corpus {}
    #[doc = include_str!("../../../book/src/tokenization.md")]
    mod tokenization {}
    #[doc = include_str!("../../../book/src/perturbations.md")]
    mod perturbations {}
    #[doc = include_str!("../../../book/src/noun-phrases.md")]
    mod noun_phrases {}
    #[doc = include_str!("../../../book/src/language-model.md")]
    mod language_model {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/determinism.md")]
    mod determinism {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
