//! Identity-message codecs: the (4,2,1) lookup code, the systematic (7,4)
//! Hamming code, and the organization-fixed sequence used when anchor
//! capacity is minimal.
//!
//! Embedded sequences are sampled from the set of words within the code's
//! error-correcting radius rather than always using the canonical codeword;
//! the all-zero word is never embedded because an all-zero state vector reads
//! as "unwatermarked".

use rand::Rng;
use thiserror::Error;

use crate::bits::{bits_to_string, is_all_zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum CodeId {
    #[serde(rename = "BCH421")]
    Bch421,
    #[serde(rename = "HAM74")]
    Ham74,
    #[serde(rename = "ORGFIXED")]
    OrgFixed,
}

impl CodeId {
    /// (codeword length l, message length k). OrgFixed lengths are dynamic.
    pub fn params(self) -> Option<(usize, usize)> {
        match self {
            CodeId::Bch421 => Some((4, 2)),
            CodeId::Ham74 => Some((7, 4)),
            CodeId::OrgFixed => None,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("message length {got} does not match code (expected {want})")]
    LengthMismatch { want: usize, got: usize },
    #[error("code {0:?} does not support this operation")]
    Unsupported(CodeId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityMessage(pub Vec<u8>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WatermarkSequence {
    pub bits: Vec<u8>,
    pub code: CodeId,
}

impl std::fmt::Display for WatermarkSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", bits_to_string(&self.bits))
    }
}

/// The normative (4,2,1) tables: canonical codewords and the disjoint valid
/// sets an embedded sequence may be drawn from.
const BCH421_TABLE: &[(&str, &str, &[&str])] = &[
    ("00", "0000", &["0001", "0010", "0100", "1000"]),
    ("01", "0101", &["0101", "0111", "1101"]),
    ("10", "1010", &["1010", "1011", "1110"]),
    ("11", "1111", &["1111"]),
];

fn bits(s: &str) -> Vec<u8> {
    crate::bits::parse_bits(s).expect("static table entries are bitstrings")
}

/// Canonical codeword of `m`.
pub fn encode(m: &[u8], code: CodeId) -> Result<Vec<u8>, CodecError> {
    match code {
        CodeId::Bch421 => {
            let key = bits_to_string(m);
            BCH421_TABLE
                .iter()
                .find(|(msg, _, _)| *msg == key)
                .map(|(_, cw, _)| bits(cw))
                .ok_or(CodecError::LengthMismatch {
                    want: 2,
                    got: m.len(),
                })
        }
        CodeId::Ham74 => {
            if m.len() != 4 {
                return Err(CodecError::LengthMismatch {
                    want: 4,
                    got: m.len(),
                });
            }
            let (d1, d2, d3, d4) = (m[0], m[1], m[2], m[3]);
            let p1 = d1 ^ d2 ^ d4;
            let p2 = d1 ^ d3 ^ d4;
            let p3 = d2 ^ d3 ^ d4;
            Ok(vec![d1, d2, d3, d4, p1, p2, p3])
        }
        CodeId::OrgFixed => Err(CodecError::Unsupported(code)),
    }
}

/// All sequences that may be embedded for `m`: the words within the
/// error-correcting radius, excluding the all-zero word.
pub fn valid_set(m: &[u8], code: CodeId) -> Result<Vec<Vec<u8>>, CodecError> {
    match code {
        CodeId::Bch421 => {
            let key = bits_to_string(m);
            BCH421_TABLE
                .iter()
                .find(|(msg, _, _)| *msg == key)
                .map(|(_, _, set)| set.iter().map(|w| bits(w)).collect())
                .ok_or(CodecError::LengthMismatch {
                    want: 2,
                    got: m.len(),
                })
        }
        CodeId::Ham74 => {
            let cw = encode(m, code)?;
            let mut out = vec![cw.clone()];
            for i in 0..cw.len() {
                let mut flipped = cw.clone();
                flipped[i] ^= 1;
                out.push(flipped);
            }
            out.retain(|w| !is_all_zero(w));
            Ok(out)
        }
        CodeId::OrgFixed => Err(CodecError::Unsupported(code)),
    }
}

/// Uniform draw from the valid set of `m`.
pub fn sample_watermark(
    m: &[u8],
    code: CodeId,
    rng: &mut impl Rng,
) -> Result<WatermarkSequence, CodecError> {
    let set = valid_set(m, code)?;
    let bits = set[rng.gen_range(0..set.len())].clone();
    Ok(WatermarkSequence { bits, code })
}

/// Recovers the identity message, or `None` when the word lies outside every
/// valid set (no watermark).
pub fn decode(w: &[u8], code: CodeId) -> Result<Option<Vec<u8>>, CodecError> {
    match code {
        CodeId::Bch421 => {
            if w.len() != 4 {
                return Err(CodecError::LengthMismatch {
                    want: 4,
                    got: w.len(),
                });
            }
            let key = bits_to_string(w);
            Ok(BCH421_TABLE
                .iter()
                .find(|(_, _, set)| set.contains(&key.as_str()))
                .map(|(msg, _, _)| bits(msg)))
        }
        CodeId::Ham74 => {
            if w.len() != 7 {
                return Err(CodecError::LengthMismatch {
                    want: 7,
                    got: w.len(),
                });
            }
            let mut w = w.to_vec();
            // Syndrome from recomputed parities; each bit position has a
            // distinct nonzero syndrome, so every word corrects uniquely.
            let s1 = w[4] ^ w[0] ^ w[1] ^ w[3];
            let s2 = w[5] ^ w[0] ^ w[2] ^ w[3];
            let s3 = w[6] ^ w[1] ^ w[2] ^ w[3];
            let syndrome = (s1, s2, s3);
            const POSITIONS: [( (u8, u8, u8), usize); 7] = [
                ((1, 1, 0), 0),
                ((1, 0, 1), 1),
                ((0, 1, 1), 2),
                ((1, 1, 1), 3),
                ((1, 0, 0), 4),
                ((0, 1, 0), 5),
                ((0, 0, 1), 6),
            ];
            if syndrome != (0, 0, 0) {
                let pos = POSITIONS
                    .iter()
                    .find(|(s, _)| *s == syndrome)
                    .map(|(_, p)| *p)
                    .expect("all nonzero syndromes are mapped");
                w[pos] ^= 1;
            }
            Ok(Some(w[..4].to_vec()))
        }
        CodeId::OrgFixed => Err(CodecError::Unsupported(code)),
    }
}
