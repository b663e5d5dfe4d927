//! Fixed-N occupation-number basis on an M-site ring, and the Bose-Hubbard
//! Hamiltonian in that basis.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::sparse::SparseHamiltonian;

/// Default cap on the number of Fock states.
pub const DEFAULT_MAX_STATES: usize = 2_000_000;

/// All occupation vectors `(n_1..n_M)` with `Σ n_j = N`, in descending
/// lexicographic order (`(N,0,..,0)` first).
#[derive(Debug, Clone)]
pub struct FockBasis {
    sites: usize,
    bosons: usize,
    states: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

/// `C(N + M - 1, M - 1)`, saturating.
pub fn basis_size(sites: usize, bosons: usize) -> u128 {
    let n = (bosons + sites - 1) as u128;
    let k = (sites - 1).min(bosons) as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

impl FockBasis {
    pub fn new(sites: usize, bosons: usize) -> Result<Self> {
        Self::with_limit(sites, bosons, DEFAULT_MAX_STATES)
    }

    pub fn with_limit(sites: usize, bosons: usize, limit: usize) -> Result<Self> {
        if sites < 2 {
            return Err(Error::InvalidConfig(format!("Fock basis needs M >= 2, got {sites}")));
        }
        if bosons == 0 {
            return Err(Error::InvalidConfig("Fock basis needs N >= 1".into()));
        }
        let size = basis_size(sites, bosons);
        if size > limit as u128 {
            return Err(Error::BasisTooLarge {
                sites,
                bosons,
                size,
                limit,
            });
        }
        let mut states = Vec::with_capacity(size as usize);
        let mut current = vec![0u32; sites];
        enumerate(&mut current, 0, bosons as u32, &mut states);
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(Self {
            sites,
            bosons,
            states,
            index,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn bosons(&self) -> usize {
        self.bosons
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> &[u32] {
        &self.states[i]
    }

    pub fn states(&self) -> &[Vec<u32>] {
        &self.states
    }

    pub fn index_of(&self, occupation: &[u32]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    /// Diagonal of `n̂_site` (site 0-based).
    pub fn number_operator(&self, site: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[site] as f64).collect()
    }
}

fn enumerate(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<Vec<u32>>) {
    if pos == current.len() - 1 {
        current[pos] = remaining;
        out.push(current.clone());
        return;
    }
    for n in (0..=remaining).rev() {
        current[pos] = n;
        enumerate(current, pos + 1, remaining - n, out);
    }
    current[pos] = 0;
}

/// `-J Σ_j (a†_{j+1} a_j + h.c.) + (U/2) Σ_j n_j (n_j - 1)` with `a_{M+1} = a_1`.
///
/// The bond sum runs over `j = 1..M` exactly as written, so on an `M = 2`
/// ring the single physical bond is counted twice.
pub fn build_bh_hamiltonian(basis: &FockBasis, hopping: f64, interaction: f64) -> SparseHamiltonian {
    let m = basis.sites();
    let dim = basis.len();
    let mut diagonal = Vec::with_capacity(dim);
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(dim);
    let mut scratch = vec![0u32; m];

    for (row, occ) in basis.states().iter().enumerate() {
        diagonal.push(
            0.5 * interaction
                * occ
                    .iter()
                    .map(|&n| n as f64 * (n as f64 - 1.0))
                    .sum::<f64>(),
        );
        let mut entries: BTreeMap<usize, f64> = BTreeMap::new();
        for j in 0..m {
            let next = (j + 1) % m;
            // a†_next a_j and a†_j a_next
            for (from, to) in [(j, next), (next, j)] {
                if occ[from] == 0 {
                    continue;
                }
                scratch.copy_from_slice(occ);
                let amp = ((occ[from] as f64) * (occ[to] as f64 + 1.0)).sqrt();
                scratch[from] -= 1;
                scratch[to] += 1;
                let col = basis
                    .index_of(&scratch)
                    .expect("hopping preserves particle number");
                *entries.entry(col).or_insert(0.0) -= hopping * amp;
            }
        }
        // a hop out and back onto the same site cannot happen, so no diagonal leaks in
        debug_assert!(!entries.contains_key(&row));
        rows.push(entries.into_iter().filter(|&(_, v)| v != 0.0).collect());
    }
    SparseHamiltonian::from_rows(diagonal, rows)
}
