//! Applause prediction over speech transcripts.
//!
//! This crate holds the allocation-only core: transcript segmentation,
//! lexicon indexing, rhetorical-device feature extraction, an L1-penalized
//! logistic regression solver with cross-validated penalty selection, and the
//! evaluation harness built on top of it. Everything here is a pure function
//! of its inputs; file IO, the CLI and the HTTP service live in the
//! `applause` crate.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod corpus;
pub mod eval;
pub mod features;
pub mod glm;
pub mod lexicon;
pub mod pipeline;
pub mod score;
pub mod text;

mod hash;
mod rng;

pub use hash::stable_hash;
