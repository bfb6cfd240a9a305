//! Dual-channel source code watermarking via constrained parity-check
//! encoding over GF(2).
//!
//! The library embeds an identity message into subject-language (Python 3
//! subset) source by steering two independent channels: structural
//! semantics-preserving transformations (the formal channel) and variable
//! renaming variants (the natural channel). Watermark bits are the grouped,
//! thresholded states of transformation anchors, constrained to satisfy a
//! per-organization parity-check system and protected by error-correcting
//! codeword sampling.

pub mod anchors;
pub mod bits;
pub mod codec;
pub mod config;
pub mod engine;
pub mod gf2;
pub mod harness;
pub mod pysrc;
pub mod registry;
pub mod rules;

pub use pysrc::{ParseError, SubjectProgram};
