//! Natural-channel renaming variants over a canonical identifier.
//!
//! Application order is fixed (Suffix, then Underline, then
//! InitialCapitalization) so every renamed form decomposes uniquely. The
//! suffix is a deterministic table lookup keyed by a hash of the canonical
//! name; strip therefore never has to guess which suffix was attached.

use serde::{Deserialize, Serialize};

use crate::pysrc::KEYWORDS;

/// Variant ids follow the fixed enumeration order used for anchor layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    Underline = 1,
    InitialCapitalization = 2,
    Suffix = 3,
}

pub const VARIANTS: [Variant; 3] = [
    Variant::Underline,
    Variant::InitialCapitalization,
    Variant::Suffix,
];

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Underline => "Underline",
            Variant::InitialCapitalization => "InitialCapitalization",
            Variant::Suffix => "Suffix",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct VariantSet {
    pub underline: bool,
    pub initial_cap: bool,
    pub suffix: bool,
}

impl VariantSet {
    pub fn empty() -> Self {
        VariantSet::default()
    }

    pub fn of(variants: &[Variant]) -> Self {
        let mut s = VariantSet::default();
        for v in variants {
            match v {
                Variant::Underline => s.underline = true,
                Variant::InitialCapitalization => s.initial_cap = true,
                Variant::Suffix => s.suffix = true,
            }
        }
        s
    }

    pub fn contains(&self, v: Variant) -> bool {
        match v {
            Variant::Underline => self.underline,
            Variant::InitialCapitalization => self.initial_cap,
            Variant::Suffix => self.suffix,
        }
    }

    /// State bits in variant-id order (Underline, InitialCapitalization, Suffix).
    pub fn states(&self) -> [u8; 3] {
        [
            self.underline as u8,
            self.initial_cap as u8,
            self.suffix as u8,
        ]
    }

    pub fn from_states(states: [u8; 3]) -> Self {
        VariantSet {
            underline: states[0] == 1,
            initial_cap: states[1] == 1,
            suffix: states[2] == 1,
        }
    }

    pub fn all() -> [VariantSet; 8] {
        let mut out = [VariantSet::default(); 8];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = VariantSet {
                underline: i & 1 != 0,
                initial_cap: i & 2 != 0,
                suffix: i & 4 != 0,
            };
        }
        out
    }
}

/// A canonical identifier: lowercase initial letter, no trailing underscore,
/// not a keyword. Anything else cannot be decomposed soundly.
pub fn is_canonical(name: &str) -> bool {
    let mut chars = name.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    first.is_ascii_lowercase()
        && !name.ends_with('_')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !KEYWORDS.contains(&name)
}

/// Deterministic suffix choice for a canonical name.
pub fn suffix_for<'a>(canonical: &str, table: &'a [String]) -> &'a str {
    let h: usize = canonical.bytes().map(|b| b as usize).sum();
    &table[h % table.len()]
}

pub fn apply_variants(canonical: &str, set: VariantSet, table: &[String]) -> String {
    let mut name = canonical.to_string();
    if set.suffix {
        name.push_str(suffix_for(canonical, table));
    }
    if set.underline {
        name.push('_');
    }
    if set.initial_cap {
        let mut chars = name.chars();
        if let Some(first) = chars.next() {
            name = first.to_ascii_uppercase().to_string() + chars.as_str();
        }
    }
    name
}

/// Total inverse of `apply_variants`: unknown shapes come back unchanged with
/// the empty set.
pub fn strip_variants(name: &str, table: &[String]) -> (String, VariantSet) {
    let mut cur = name.to_string();
    let mut set = VariantSet::default();
    if cur.chars().next().is_some_and(|c| c.is_ascii_uppercase()) {
        let mut chars = cur.chars();
        let first = chars.next().unwrap();
        cur = first.to_ascii_lowercase().to_string() + chars.as_str();
        set.initial_cap = true;
    }
    if cur.ends_with('_') {
        cur.pop();
        set.underline = true;
    }
    for s in table {
        if let Some(stem) = cur.strip_suffix(s.as_str()) {
            if !stem.is_empty() && suffix_for(stem, table) == s {
                cur = stem.to_string();
                set.suffix = true;
                break;
            }
        }
    }
    if is_canonical(&cur) && apply_variants(&cur, set, table) == name {
        (cur, set)
    } else {
        (name.to_string(), VariantSet::default())
    }
}

/// True when all eight renamed forms of `canonical` strip back losslessly.
/// Canonicals that fail (e.g. ones already ending in a table suffix that
/// their own hash selects) are excluded from the natural channel.
pub fn decomposes_uniquely(canonical: &str, table: &[String]) -> bool {
    is_canonical(canonical)
        && VariantSet::all().iter().all(|set| {
            strip_variants(&apply_variants(canonical, *set, table), table)
                == (canonical.to_string(), *set)
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::DEFAULT_SUFFIXES;

    fn table() -> Vec<String> {
        DEFAULT_SUFFIXES.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn apply_examples() {
        let t = table();
        let u = VariantSet::of(&[Variant::Underline]);
        assert_eq!(apply_variants("count", u, &t), "count_");
        let uc = VariantSet::of(&[Variant::Underline, Variant::InitialCapitalization]);
        assert_eq!(apply_variants("count", uc, &t), "Count_");
        assert_eq!(apply_variants("count", VariantSet::empty(), &t), "count");
    }

    #[test]
    fn strip_examples() {
        let t = table();
        assert_eq!(
            strip_variants("Count_", &t),
            (
                "count".to_string(),
                VariantSet::of(&[Variant::Underline, Variant::InitialCapitalization])
            )
        );
        assert_eq!(
            strip_variants("total_val", &t),
            ("total".to_string(), VariantSet::of(&[Variant::Suffix]))
        );
        assert_eq!(
            strip_variants("flag", &t),
            ("flag".to_string(), VariantSet::empty())
        );
    }

    #[test]
    fn unknown_shapes_are_fixed_points() {
        let t = table();
        // Shapes whose stripped stem is not canonical: leading underscore,
        // empty, keywords (including capitalized forms of keywords).
        for odd in ["_private", "__x", "", "class", "Class", "For"] {
            assert_eq!(strip_variants(odd, &t), (odd.to_string(), VariantSet::empty()));
        }
    }

    #[test]
    fn decomposition_round_trips() {
        let t = table();
        for c in ["count", "flag", "total", "i", "result", "left_edge", "n2"] {
            assert!(decomposes_uniquely(c, &t), "{c}");
            for set in VariantSet::all() {
                let renamed = apply_variants(c, set, &t);
                assert_eq!(strip_variants(&renamed, &t), (c.to_string(), set));
            }
        }
    }

    #[test]
    fn ambiguous_canonicals_are_rejected() {
        let t = table();
        // "d" hashes to "_val", so "d_val" strips to ("d", {Suffix}): the
        // plain form is not a fixed point and must be excluded.
        assert!(!decomposes_uniquely("d_val", &t));
        assert!(!decomposes_uniquely("Upper", &t));
        assert!(!decomposes_uniquely("trail_", &t));
    }

    #[test]
    fn suffix_choice_is_deterministic() {
        let t = table();
        assert_eq!(suffix_for("total", &t), "_val");
        assert_eq!(suffix_for("total", &t), suffix_for("total", &t));
    }
}
