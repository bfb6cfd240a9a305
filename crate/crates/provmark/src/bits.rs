//! Small helpers for bitstrings represented as `Vec<u8>` of 0/1 values.

/// Parses a string like "0101" into bits. Returns `None` on any other character.
pub fn parse_bits(s: &str) -> Option<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Some(0u8),
            '1' => Some(1u8),
            _ => None,
        })
        .collect()
}

pub fn bits_to_string(bits: &[u8]) -> String {
    bits.iter().map(|b| if *b == 0 { '0' } else { '1' }).collect()
}

pub fn is_all_zero(bits: &[u8]) -> bool {
    bits.iter().all(|b| *b == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_bits("0101"), Some(vec![0, 1, 0, 1]));
        assert_eq!(parse_bits("012"), None);
        assert_eq!(bits_to_string(&[1, 0, 1]), "101");
        assert!(is_all_zero(&[0, 0]));
        assert!(!is_all_zero(&[0, 1]));
    }
}
