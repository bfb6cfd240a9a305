//! Evaluation harness: the bundled synthetic corpus, semantics-preserving
//! attacks, and the detection/robustness/indistinguishability metrics.

pub mod attacks;
pub mod corpus;
pub mod metrics;

pub use attacks::{attack, AttackKind, AttackSpec};
pub use corpus::{corpus, reference_template, CorpusFile};
pub use metrics::{evaluate, indistinguishability, EvalSummary, FileRow, IndisReport};
