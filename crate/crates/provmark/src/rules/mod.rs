//! The two transformation channels: structural rewrite rules over statements
//! (formal) and identifier renaming variants (natural).

pub mod formal;
pub mod variants;

pub use formal::{apply, classify, detect_state, reverse, rule_name, set_state, RuleError, RULE_COUNT};
pub use variants::{
    apply_variants, decomposes_uniquely, is_canonical, strip_variants, suffix_for, Variant,
    VariantSet,
};
