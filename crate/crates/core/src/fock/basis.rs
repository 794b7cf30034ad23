//! Occupation-number basis of the truncated Fock space.

use crate::{Error, Result};

pub const DEFAULT_DIMENSION_CAP: usize = 200_000;

/// Ordered occupation-number basis for M modes with total occupation at
/// most N_max. States are graded by total particle number and ordered
/// lexicographically within each sector; the layout is deterministic and
/// index lookup is O(M) via combinatorial ranking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockBasis {
    modes: usize,
    n_max: usize,
    states: Vec<Vec<u32>>,
    sector_offsets: Vec<usize>,
    binom: Vec<Vec<usize>>,
}

/// Number of occupation vectors of M modes summing to exactly n.
fn sector_dim(binom: &[Vec<usize>], modes: usize, n: usize) -> usize {
    binom[n + modes - 1][modes - 1]
}

// Saturating: entries beyond the dimension cap are never consulted, but the
// full table is materialized.
fn binomial_table(max: usize) -> Vec<Vec<usize>> {
    let mut b = vec![vec![0usize; max + 1]; max + 1];
    for i in 0..=max {
        b[i][0] = 1;
        for j in 1..=i {
            let upper = if j <= i - 1 { b[i - 1][j] } else { 0 };
            b[i][j] = b[i - 1][j - 1].saturating_add(upper);
        }
    }
    b
}

pub fn enumerate_basis(modes: usize, n_max: usize) -> Result<FockBasis> {
    enumerate_basis_capped(modes, n_max, DEFAULT_DIMENSION_CAP)
}

pub fn enumerate_basis_capped(modes: usize, n_max: usize, cap: usize) -> Result<FockBasis> {
    if modes == 0 {
        return Err(Error::domain("enumerate_basis: need at least one mode"));
    }
    let binom = binomial_table(n_max + modes + 2);
    // dim = C(N + M, M)
    let dim = binom[n_max + modes][modes];
    if dim > cap {
        return Err(Error::Resource(format!(
            "Fock basis dimension {dim} exceeds cap {cap} (M={modes}, N={n_max})"
        )));
    }
    let mut states = Vec::with_capacity(dim);
    let mut sector_offsets = Vec::with_capacity(n_max + 2);
    for n in 0..=n_max {
        sector_offsets.push(states.len());
        let mut occ = vec![0u32; modes];
        emit_sector(&mut states, &mut occ, 0, n);
    }
    sector_offsets.push(states.len());
    debug_assert_eq!(states.len(), dim);
    Ok(FockBasis { modes, n_max, states, sector_offsets, binom })
}

fn emit_sector(out: &mut Vec<Vec<u32>>, occ: &mut Vec<u32>, mode: usize, remaining: usize) {
    if mode == occ.len() - 1 {
        occ[mode] = remaining as u32;
        out.push(occ.clone());
        occ[mode] = 0;
        return;
    }
    // Lexicographic order: highest occupation of the current mode first.
    for k in (0..=remaining).rev() {
        occ[mode] = k as u32;
        emit_sector(out, occ, mode + 1, remaining - k);
    }
    occ[mode] = 0;
}

impl FockBasis {
    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, idx: usize) -> &[u32] {
        &self.states[idx]
    }

    pub fn states(&self) -> impl Iterator<Item = &[u32]> {
        self.states.iter().map(|s| s.as_slice())
    }

    /// Total occupation of basis state idx.
    pub fn total_occupation(&self, idx: usize) -> usize {
        self.states[idx].iter().map(|&n| n as usize).sum()
    }

    /// Index range [lo, hi) of the sector with exactly n particles.
    pub fn sector_range(&self, n: usize) -> std::ops::Range<usize> {
        self.sector_offsets[n]..self.sector_offsets[n + 1]
    }

    /// Index of an occupation vector; None if it exceeds the truncation.
    pub fn index_of(&self, occ: &[u32]) -> Option<usize> {
        debug_assert_eq!(occ.len(), self.modes);
        let n: usize = occ.iter().map(|&x| x as usize).sum();
        if n > self.n_max {
            return None;
        }
        // Rank within the sector in the emitted (first mode descending)
        // order: count states that come earlier.
        let mut rank = 0usize;
        let mut remaining = n;
        for mode in 0..self.modes - 1 {
            let modes_left = self.modes - mode - 1;
            let k = occ[mode] as usize;
            // States with a larger occupation of this mode come first.
            for bigger in (k + 1)..=remaining {
                rank += sector_dim(&self.binom, modes_left, remaining - bigger);
            }
            remaining -= k;
        }
        Some(self.sector_offsets[n] + rank)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_dimension() {
        let b = enumerate_basis(1, 3).unwrap();
        assert_eq!(b.dim(), 4);
    }

    #[test]
    fn two_modes_two_particles() {
        let b = enumerate_basis(2, 2).unwrap();
        assert_eq!(b.dim(), 6);
    }

    #[test]
    fn four_modes_four_particles() {
        // Sum over sectors: 1 + 4 + 10 + 20 + 35 = 70.
        let b = enumerate_basis(4, 4).unwrap();
        assert_eq!(b.dim(), 70);
    }

    #[test]
    fn index_lookup_is_inverse_of_enumeration() {
        let b = enumerate_basis(4, 5).unwrap();
        for idx in 0..b.dim() {
            let occ = b.state(idx).to_vec();
            assert_eq!(b.index_of(&occ), Some(idx));
        }
    }

    #[test]
    fn cap_enforced() {
        assert!(matches!(
            enumerate_basis_capped(20, 20, 1000),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn deterministic_order() {
        let b1 = enumerate_basis(3, 4).unwrap();
        let b2 = enumerate_basis(3, 4).unwrap();
        assert_eq!(b1, b2);
        // Sector grading.
        for n in 0..=4 {
            for idx in b1.sector_range(n) {
                assert_eq!(b1.total_occupation(idx), n);
            }
        }
    }
}
