//! Per-organization parity-check matrices and the registry file.
//!
//! Matrices are never stored: each organization holds a 64-bit seed and its
//! l×(l·α) matrices are regenerated on demand by rejection-sampling
//! full-row-rank matrices from a ChaCha stream keyed by (seed, l, α).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::ParityCheckMatrix;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct OrganizationProfile {
    pub id: String,
    pub seed: u64,
    /// ORGFIXED bitstring embedded when capacity only allows Case 3.
    pub fixed_code: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct Registry {
    pub orgs: Vec<OrganizationProfile>,
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("registry I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("registry format: {0}")]
    Format(#[from] serde_json::Error),
    #[error("org {0:?} not found in registry")]
    UnknownOrg(String),
    #[error("fixed code for org {0:?} must be a nonzero bitstring")]
    BadFixedCode(String),
}

impl OrganizationProfile {
    pub fn fixed_code_bits(&self) -> Result<Vec<u8>, RegistryError> {
        let bits = crate::bits::parse_bits(&self.fixed_code)
            .ok_or_else(|| RegistryError::BadFixedCode(self.id.clone()))?;
        if crate::bits::is_all_zero(&bits) {
            return Err(RegistryError::BadFixedCode(self.id.clone()));
        }
        Ok(bits)
    }

    /// Deterministic full-row-rank l×(l·α) matrix for this organization.
    pub fn matrix_for(&self, l: usize, alpha: usize) -> ParityCheckMatrix {
        matrix_from_seed(self.seed, l, alpha)
    }
}

/// Keyed derivation so matrices of different shapes never share a stream.
fn matrix_from_seed(seed: u64, l: usize, alpha: usize) -> ParityCheckMatrix {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(l as u64).to_le_bytes());
    key[16..24].copy_from_slice(&(alpha as u64).to_le_bytes());
    let mut rng = ChaCha20Rng::from_seed(key);
    let cols = l * alpha;
    let mask = if cols == 64 { u64::MAX } else { (1u64 << cols) - 1 };
    loop {
        let rows: Vec<u64> = (0..l).map(|_| rng.gen::<u64>() & mask).collect();
        let m = ParityCheckMatrix::from_masks(rows, cols);
        if m.is_full_row_rank() {
            return m;
        }
    }
}

pub fn unit_matrix(l: usize) -> ParityCheckMatrix {
    ParityCheckMatrix::identity(l)
}

impl Registry {
    pub fn load(path: &std::path::Path) -> Result<Registry, RegistryError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), RegistryError> {
        let text = serde_json::to_string_pretty(self)?;
        Ok(std::fs::write(path, text)?)
    }

    pub fn get(&self, id: &str) -> Result<&OrganizationProfile, RegistryError> {
        self.orgs
            .iter()
            .find(|o| o.id == id)
            .ok_or_else(|| RegistryError::UnknownOrg(id.to_string()))
    }
}

/// Attribution outcome across the registry: every organization whose matrix
/// verified on at least one channel. Empty means unattributed.
pub fn attribute<'a>(results: impl IntoIterator<Item = (&'a str, bool)>) -> Vec<String> {
    results
        .into_iter()
        .filter(|(_, verified)| *verified)
        .map(|(id, _)| id.to_string())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{solve_constrained, Grouping};
    use rand::rngs::StdRng;

    fn org(id: &str, seed: u64) -> OrganizationProfile {
        OrganizationProfile {
            id: id.to_string(),
            seed,
            fixed_code: "01".to_string(),
        }
    }

    #[test]
    fn matrices_are_deterministic() {
        let o = org("o1", 42);
        assert_eq!(o.matrix_for(4, 3).to_rows(), o.matrix_for(4, 3).to_rows());
    }

    #[test]
    fn matrices_have_full_rank() {
        for seed in 0..20 {
            let m = org("o", seed).matrix_for(4, 3);
            assert_eq!(m.rank(), 4);
            let m = org("o", seed).matrix_for(7, 3);
            assert_eq!(m.rank(), 7);
        }
    }

    #[test]
    fn distinct_seeds_give_distinct_matrices() {
        for pair in 0..100u64 {
            let a = org("a", pair).matrix_for(4, 3);
            let b = org("b", pair + 10_000).matrix_for(4, 3);
            assert_ne!(a.to_rows(), b.to_rows(), "seed pair {pair}");
        }
    }

    #[test]
    fn unit_matrix_solves_to_c() {
        let m = unit_matrix(2);
        assert_eq!(m.to_rows(), vec![vec![1, 0], vec![0, 1]]);
        let mut rng = <StdRng as rand::SeedableRng>::seed_from_u64(1);
        let g = Grouping::consecutive(2, 1);
        for c in [[0u8, 1], [1, 0], [1, 1]] {
            let r = solve_constrained(&m, &c, &g, 1, &mut rng, false).unwrap();
            assert_eq!(r, c.to_vec());
        }
    }

    #[test]
    fn registry_round_trips() {
        let dir = std::env::temp_dir().join("provmark-registry-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("registry.json");
        let reg = Registry {
            orgs: vec![org("acme", 7), org("globex", 8)],
        };
        reg.save(&path).unwrap();
        let loaded = Registry::load(&path).unwrap();
        assert_eq!(loaded.orgs, reg.orgs);
        assert_eq!(
            loaded.get("acme").unwrap().matrix_for(4, 3).to_rows(),
            reg.orgs[0].matrix_for(4, 3).to_rows()
        );
        assert!(matches!(
            loaded.get("missing"),
            Err(RegistryError::UnknownOrg(_))
        ));
    }

    #[test]
    fn attribution_filters_verified() {
        assert_eq!(
            attribute([("a", false), ("b", true), ("c", false)]),
            vec!["b".to_string()]
        );
        assert!(attribute([]).is_empty());
        let json = r#"{"orgs": [{"id": "x", "seed": 1, "fixed_code": "01"}]}"#;
        let reg: Registry = serde_json::from_str(json).unwrap();
        assert_eq!(reg.orgs[0].fixed_code_bits().unwrap(), vec![0, 1]);
    }
}
