//! GF(2) linear algebra: parity-check matrices, the constrained solver used
//! at insertion time, and the brute-force oracle used to test it.
//!
//! The constrained system is
//!   M · r ≡ c (mod 2)
//!   c_i = 1 ⇒ Σ_{j ∈ G_i} r_j ≥ τ
//!   c_i = 0 ⇒ Σ_{j ∈ G_i} r_j < τ
//! over a column partition G. Solutions are drawn uniformly from the feasible
//! set: Gaussian elimination parametrizes the affine solution set of the
//! linear part, free variables are rejection-sampled against the group
//! constraints, and full enumeration of the affine set takes over when
//! rejection stalls.

use rand::Rng;
use thiserror::Error;

/// Maximum column count. Matrices here are tiny (cols = l·α ≤ 28 in every
/// shipped configuration); one machine word per row is plenty.
pub const MAX_COLS: usize = 64;

/// Brute-force enumeration bound (2^n assignments).
pub const ENUM_LIMIT: usize = 24;

const REJECTION_TRIALS: usize = 10_000;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("no state vector satisfies the constraints")]
    Infeasible,
    #[error("enumeration limited to n <= {ENUM_LIMIT}, got n = {0}")]
    SizeLimit(usize),
}

/// Binary parity-check matrix, one u64 mask per row (bit j = column j).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    rows: Vec<u64>,
    cols: usize,
}

impl ParityCheckMatrix {
    pub fn from_rows(rows: Vec<Vec<u8>>) -> ParityCheckMatrix {
        let cols = rows.first().map(|r| r.len()).unwrap_or(0);
        assert!(cols <= MAX_COLS);
        let rows = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols);
                r.iter()
                    .enumerate()
                    .fold(0u64, |acc, (j, b)| acc | ((*b as u64 & 1) << j))
            })
            .collect();
        ParityCheckMatrix { rows, cols }
    }

    pub fn from_masks(rows: Vec<u64>, cols: usize) -> ParityCheckMatrix {
        assert!(cols <= MAX_COLS);
        ParityCheckMatrix { rows, cols }
    }

    /// l×l identity, the "unit" matrix of the minimal-capacity case.
    pub fn identity(l: usize) -> ParityCheckMatrix {
        ParityCheckMatrix {
            rows: (0..l).map(|i| 1u64 << i).collect(),
            cols: l,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        ((self.rows[row] >> col) & 1) as u8
    }

    pub fn row_mask(&self, row: usize) -> u64 {
        self.rows[row]
    }

    /// M · r over GF(2).
    pub fn mul(&self, r: &[u8]) -> Result<Vec<u8>, Gf2Error> {
        if r.len() != self.cols {
            return Err(Gf2Error::DimensionMismatch(format!(
                "vector has {} entries, matrix has {} columns",
                r.len(),
                self.cols
            )));
        }
        let x = pack(r);
        Ok(self
            .rows
            .iter()
            .map(|m| ((m & x).count_ones() & 1) as u8)
            .collect())
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pivot) = (rank..rows.len()).find(|&i| rows[i] >> col & 1 == 1) else {
                continue;
            };
            rows.swap(rank, pivot);
            let mask = rows[rank];
            for (i, row) in rows.iter_mut().enumerate() {
                if i != rank && *row >> col & 1 == 1 {
                    *row ^= mask;
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_full_row_rank(&self) -> bool {
        self.rank() == self.rows.len()
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        self.rows
            .iter()
            .map(|m| (0..self.cols).map(|j| ((m >> j) & 1) as u8).collect())
            .collect()
    }
}

fn pack(bits: &[u8]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0u64, |acc, (j, b)| acc | ((*b as u64 & 1) << j))
}

fn unpack(x: u64, n: usize) -> Vec<u8> {
    (0..n).map(|j| ((x >> j) & 1) as u8).collect()
}

/// Column partition: `groups[i]` lists the columns belonging to group i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grouping(pub Vec<Vec<usize>>);

impl Grouping {
    /// q consecutive blocks of size alpha.
    pub fn consecutive(q: usize, alpha: usize) -> Grouping {
        Grouping(
            (0..q)
                .map(|i| (i * alpha..(i + 1) * alpha).collect())
                .collect(),
        )
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.0
    }

    pub fn covers(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        for g in &self.0 {
            for &j in g {
                if j >= n || seen[j] {
                    return false;
                }
                seen[j] = true;
            }
        }
        seen.iter().all(|s| *s)
    }
}

/// c'_i = 1 iff the number of set bits of r in group i meets or exceeds tau.
pub fn threshold_groups(r: &[u8], grouping: &Grouping, tau: usize) -> Vec<u8> {
    grouping
        .0
        .iter()
        .map(|g| {
            let on = g.iter().filter(|&&j| r[j] == 1).count();
            u8::from(on >= tau)
        })
        .collect()
}

/// Checks M · r ≡ c (mod 2).
pub fn verify(m: &ParityCheckMatrix, r: &[u8], c: &[u8]) -> Result<bool, Gf2Error> {
    if c.len() != m.n_rows() {
        return Err(Gf2Error::DimensionMismatch(format!(
            "expected {} parity bits, got {}",
            m.n_rows(),
            c.len()
        )));
    }
    Ok(m.mul(r)? == c)
}

fn satisfies_groups(x: u64, c: &[u8], grouping: &Grouping, tau: usize) -> bool {
    c.iter().zip(&grouping.0).all(|(ci, g)| {
        let on = g.iter().filter(|&&j| (x >> j) & 1 == 1).count();
        if *ci == 1 {
            on >= tau
        } else {
            on < tau
        }
    })
}

fn check_dims(m: &ParityCheckMatrix, c: &[u8], grouping: &Grouping) -> Result<(), Gf2Error> {
    if c.len() != m.n_rows() {
        return Err(Gf2Error::DimensionMismatch(format!(
            "grouped state vector has {} bits, matrix has {} rows",
            c.len(),
            m.n_rows()
        )));
    }
    if grouping.0.len() != c.len() {
        return Err(Gf2Error::DimensionMismatch(format!(
            "{} groups for {} grouped bits",
            grouping.0.len(),
            c.len()
        )));
    }
    if !grouping.covers(m.n_cols()) {
        return Err(Gf2Error::DimensionMismatch(
            "grouping does not partition the columns".to_string(),
        ));
    }
    Ok(())
}

/// Affine parametrization of {r : M·r = c}: particular solution plus
/// nullspace basis. `None` when the linear system is inconsistent.
fn affine_solution_set(m: &ParityCheckMatrix, c: &[u8]) -> Option<(u64, Vec<u64>)> {
    let n = m.n_cols();
    let mut rows: Vec<(u64, u8)> = m
        .rows
        .iter()
        .zip(c)
        .map(|(mask, rhs)| (*mask, *rhs))
        .collect();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut rank = 0usize;
    for col in 0..n {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i].0 >> col & 1 == 1) else {
            continue;
        };
        rows.swap(rank, p);
        let (mask, rhs) = rows[rank];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row.0 >> col & 1 == 1 {
                row.0 ^= mask;
                row.1 ^= rhs;
            }
        }
        pivot_cols.push(col);
        rank += 1;
    }
    if rows[rank..].iter().any(|(mask, rhs)| *mask == 0 && *rhs == 1) {
        return None;
    }
    let pivot_set: u64 = pivot_cols.iter().fold(0, |acc, &c| acc | 1 << c);
    // Particular solution: free variables zero.
    let mut x0 = 0u64;
    for (i, &pc) in pivot_cols.iter().enumerate() {
        if rows[i].1 == 1 {
            x0 |= 1 << pc;
        }
    }
    // One basis vector per free column.
    let mut basis = Vec::new();
    for f in 0..n {
        if pivot_set >> f & 1 == 1 {
            continue;
        }
        let mut v = 1u64 << f;
        for (i, &pc) in pivot_cols.iter().enumerate() {
            if rows[i].0 >> f & 1 == 1 {
                v |= 1 << pc;
            }
        }
        basis.push(v);
    }
    Some((x0, basis))
}

/// Solves the constrained system, drawing uniformly from the feasible set.
///
/// `forbid_zero` additionally excludes the all-zero state vector (an all-zero
/// vector reads as "unwatermarked" downstream).
pub fn solve_constrained(
    m: &ParityCheckMatrix,
    c: &[u8],
    grouping: &Grouping,
    tau: usize,
    rng: &mut impl Rng,
    forbid_zero: bool,
) -> Result<Vec<u8>, Gf2Error> {
    check_dims(m, c, grouping)?;
    let n = m.n_cols();
    let Some((x0, basis)) = affine_solution_set(m, c) else {
        return Err(Gf2Error::Infeasible);
    };
    let d = basis.len();
    let accepts = |x: u64| (!forbid_zero || x != 0) && satisfies_groups(x, c, grouping, tau);

    if d > 0 {
        let combo_mask = if d == 64 { u64::MAX } else { (1u64 << d) - 1 };
        for _ in 0..REJECTION_TRIALS {
            let combo: u64 = rng.gen::<u64>() & combo_mask;
            let mut x = x0;
            for (i, b) in basis.iter().enumerate() {
                if combo >> i & 1 == 1 {
                    x ^= b;
                }
            }
            if accepts(x) {
                return Ok(unpack(x, n));
            }
        }
    } else if accepts(x0) {
        return Ok(unpack(x0, n));
    } else {
        return Err(Gf2Error::Infeasible);
    }

    // Rejection stalled: enumerate the affine set exactly.
    if d > ENUM_LIMIT {
        return Err(Gf2Error::Infeasible);
    }
    let mut feasible = Vec::new();
    for combo in 0u64..(1u64 << d) {
        let mut x = x0;
        for (i, b) in basis.iter().enumerate() {
            if combo >> i & 1 == 1 {
                x ^= b;
            }
        }
        if accepts(x) {
            feasible.push(x);
        }
    }
    if feasible.is_empty() {
        return Err(Gf2Error::Infeasible);
    }
    let pick = feasible[rng.gen_range(0..feasible.len())];
    Ok(unpack(pick, n))
}

/// Exact feasible set by brute force over all 2^n assignments. Test oracle;
/// independent of the elimination-based solver above.
pub fn enumerate_solutions(
    m: &ParityCheckMatrix,
    c: &[u8],
    grouping: &Grouping,
    tau: usize,
) -> Result<Vec<Vec<u8>>, Gf2Error> {
    check_dims(m, c, grouping)?;
    let n = m.n_cols();
    if n > ENUM_LIMIT {
        return Err(Gf2Error::SizeLimit(n));
    }
    let mut out = Vec::new();
    for x in 0u64..(1u64 << n) {
        let parity_ok = m
            .rows
            .iter()
            .zip(c)
            .all(|(mask, ci)| ((mask & x).count_ones() & 1) as u8 == *ci);
        if parity_ok && satisfies_groups(x, c, grouping, tau) {
            out.push(unpack(x, n));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn bits(s: &str) -> Vec<u8> {
        crate::bits::parse_bits(s).unwrap()
    }

    #[test]
    fn identity_system_unique_solution() {
        let m = ParityCheckMatrix::identity(4);
        let g = Grouping::consecutive(4, 1);
        let c = bits("0101");
        let mut rng = StdRng::seed_from_u64(1);
        let r = solve_constrained(&m, &c, &g, 1, &mut rng, false).unwrap();
        assert_eq!(r, bits("0101"));
        let all = enumerate_solutions(&m, &c, &g, 1).unwrap();
        assert_eq!(all, vec![bits("0101")]);
    }

    #[test]
    fn two_by_four_system() {
        // M = [[1,0,1,0],[0,1,0,1]], groups {0,1},{2,3}, tau=1, c=(1,0).
        let m = ParityCheckMatrix::from_rows(vec![vec![1, 0, 1, 0], vec![0, 1, 0, 1]]);
        let g = Grouping::consecutive(2, 2);
        let c = vec![1, 0];
        let all = enumerate_solutions(&m, &c, &g, 1).unwrap();
        assert_eq!(all, vec![vec![1, 0, 0, 0]]);
        let mut rng = StdRng::seed_from_u64(7);
        let r = solve_constrained(&m, &c, &g, 1, &mut rng, false).unwrap();
        assert_eq!(r, vec![1, 0, 0, 0]);
    }

    #[test]
    fn two_by_four_tau2_infeasible() {
        let m = ParityCheckMatrix::from_rows(vec![vec![1, 0, 1, 0], vec![0, 1, 0, 1]]);
        let g = Grouping::consecutive(2, 2);
        let c = vec![1, 1];
        assert!(enumerate_solutions(&m, &c, &g, 2).unwrap().is_empty());
        let mut rng = StdRng::seed_from_u64(7);
        assert_eq!(
            solve_constrained(&m, &c, &g, 2, &mut rng, false),
            Err(Gf2Error::Infeasible)
        );
    }

    #[test]
    fn homogeneous_contains_zero() {
        let m = ParityCheckMatrix::from_rows(vec![vec![1, 1, 0, 1], vec![0, 1, 1, 1]]);
        let g = Grouping::consecutive(2, 2);
        let c = vec![0, 0];
        let all = enumerate_solutions(&m, &c, &g, 1).unwrap();
        assert!(all.contains(&vec![0, 0, 0, 0]));
    }

    #[test]
    fn threshold_examples() {
        let g = Grouping::consecutive(2, 3);
        assert_eq!(threshold_groups(&bits("110000"), &g, 2), vec![1, 0]);
        assert_eq!(threshold_groups(&bits("000000"), &g, 2), vec![0, 0]);
        assert_eq!(threshold_groups(&bits("101010"), &g, 2), vec![1, 0]);
    }

    #[test]
    fn verify_definitional() {
        let m = ParityCheckMatrix::identity(4);
        assert!(verify(&m, &bits("0101"), &bits("0101")).unwrap());
        assert!(!verify(&m, &bits("0101"), &bits("0100")).unwrap());
        assert!(matches!(
            verify(&m, &bits("0101"), &bits("010")),
            Err(Gf2Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn enumeration_size_limit() {
        let m = ParityCheckMatrix::from_masks(vec![1], 25);
        let g = Grouping::consecutive(1, 25);
        assert_eq!(
            enumerate_solutions(&m, &[1], &g, 1),
            Err(Gf2Error::SizeLimit(25))
        );
    }

    #[test]
    fn solver_solutions_verify_and_threshold_back() {
        let mut rng = StdRng::seed_from_u64(42);
        for trial in 0..200 {
            let l = 1 + (trial % 4);
            let alpha = 1 + (trial / 4 % 4);
            let n = l * alpha;
            let rows: Vec<u64> = (0..l).map(|_| rng.gen::<u64>() & ((1 << n) - 1)).collect();
            let m = ParityCheckMatrix::from_masks(rows, n);
            let c: Vec<u8> = (0..l).map(|_| rng.gen_range(0..2u8)).collect();
            let g = Grouping::consecutive(l, alpha);
            let tau = (alpha + 1) / 2;
            match solve_constrained(&m, &c, &g, tau, &mut rng, false) {
                Ok(r) => {
                    assert!(verify(&m, &r, &c).unwrap());
                    assert_eq!(threshold_groups(&r, &g, tau), c);
                }
                Err(Gf2Error::Infeasible) => {
                    assert!(enumerate_solutions(&m, &c, &g, tau).unwrap().is_empty());
                }
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }

    #[test]
    fn approximate_uniformity() {
        // One pinned column per group leaves plenty of freedom.
        let m = ParityCheckMatrix::from_rows(vec![vec![1, 0, 0, 0, 0, 0], vec![0, 0, 0, 1, 0, 0]]);
        let g = Grouping::consecutive(2, 3);
        let c = vec![1, 1];
        let all = enumerate_solutions(&m, &c, &g, 2).unwrap();
        assert!(all.len() >= 8, "want a rich solution set, got {}", all.len());
        let mut rng = StdRng::seed_from_u64(9);
        let mut counts = std::collections::HashMap::new();
        let draws = 10_000;
        for _ in 0..draws {
            let r = solve_constrained(&m, &c, &g, 2, &mut rng, false).unwrap();
            *counts.entry(r).or_insert(0usize) += 1;
        }
        let expected = draws as f64 / all.len() as f64;
        for sol in &all {
            let got = *counts.get(sol).unwrap_or(&0) as f64;
            assert!(
                (got - expected).abs() <= 0.30 * expected,
                "frequency {got} vs expected {expected}"
            );
        }
    }
}
