//! Fock bases at fixed particle number and total angular momentum over
//! lowest-Landau-level orbitals, for bosons and fermions, plus the
//! second-quantized two-body operator a_i† a_j† a_k a_l.
//!
//! Creation operators are ordered by ascending orbital index:
//! |n⟩ = ∏_{l ascending} (a_l†)^{n_l} / √(n_l!) |vac⟩. All fermion signs
//! follow from that convention.

use crate::error::{Error, Result};
use std::borrow::Borrow;
use std::collections::HashMap;
use std::fmt;
use std::hash::{BuildHasherDefault, Hasher};

/// FNV-1a over short occupation slices; markedly faster than the default
/// hasher for the lookup-heavy assembly loops.
pub struct FnvHasher(u64);

impl Default for FnvHasher {
    fn default() -> Self {
        FnvHasher(0xcbf2_9ce4_8422_2325)
    }
}

impl Hasher for FnvHasher {
    #[inline]
    fn write(&mut self, bytes: &[u8]) {
        let mut h = self.0;
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        self.0 = h;
    }

    #[inline]
    fn finish(&self) -> u64 {
        self.0
    }
}

pub type FnvBuild = BuildHasherDefault<FnvHasher>;

/// Particle statistics of a subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistics {
    Boson,
    Fermion,
}

impl Statistics {
    pub fn label(self) -> &'static str {
        match self {
            Statistics::Boson => "boson",
            Statistics::Fermion => "fermion",
        }
    }

    /// Smallest total angular momentum an N-particle state can carry.
    pub fn minimal_momentum(self, n: usize) -> usize {
        match self {
            Statistics::Boson => 0,
            Statistics::Fermion => n * (n - 1) / 2,
        }
    }
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Occupation-number state over orbitals 0..=l_max.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FockState {
    occupations: Vec<u8>,
}

// Hash/Eq agree with the occupation slice, so the basis index can be
// queried with a scratch buffer and no allocation.
impl Borrow<[u8]> for FockState {
    fn borrow(&self) -> &[u8] {
        &self.occupations
    }
}

impl FockState {
    pub fn new(occupations: Vec<u8>) -> Self {
        Self { occupations }
    }

    pub fn occupations(&self) -> &[u8] {
        &self.occupations
    }

    pub fn occupation(&self, orbital: usize) -> u8 {
        self.occupations.get(orbital).copied().unwrap_or(0)
    }

    pub fn particle_count(&self) -> usize {
        self.occupations.iter().map(|&n| n as usize).sum()
    }

    pub fn total_momentum(&self) -> usize {
        self.occupations
            .iter()
            .enumerate()
            .map(|(l, &n)| l * n as usize)
            .sum()
    }

    /// Occupied orbitals in ascending order.
    pub fn occupied_orbitals(&self) -> impl Iterator<Item = usize> + '_ {
        self.occupations
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(l, _)| l)
    }

    /// Compact text form like "0^3 2 5" (occupation as exponent).
    pub fn compact(&self) -> String {
        Self::compact_of(&self.occupations)
    }

    pub fn compact_of(occupations: &[u8]) -> String {
        let mut parts = Vec::new();
        for (l, &n) in occupations.iter().enumerate() {
            match n {
                0 => {}
                1 => parts.push(format!("{l}")),
                _ => parts.push(format!("{l}^{n}")),
            }
        }
        parts.join(" ")
    }
}

/// Largest orbital any (N, L) basis state can occupy.
///
/// Bosons park N−1 particles in l=0, so the bound is L itself. Fermions
/// must fill a staircase with the other N−1 particles, which costs
/// (N−1)(N−2)/2 units of momentum.
pub fn tight_orbital_bound(n: usize, l: usize, statistics: Statistics) -> usize {
    match statistics {
        Statistics::Boson => l,
        Statistics::Fermion => l.saturating_sub((n - 1) * (n - 2) / 2),
    }
}

/// All Fock states at fixed (N, L, statistics), with a bidirectional
/// state ↔ dense-index map. Immutable after construction.
#[derive(Debug)]
pub struct SubspaceBasis {
    n: usize,
    l_total: usize,
    l_max: usize,
    statistics: Statistics,
    states: Vec<FockState>,
    index: HashMap<FockState, u32, FnvBuild>,
}

impl SubspaceBasis {
    /// Enumerate the basis. `l_max = None` uses the tight orbital bound.
    ///
    /// Ordering is deterministic: occupation vectors compared from the
    /// highest orbital down, higher occupancy first.
    pub fn enumerate(
        n: usize,
        l_total: usize,
        statistics: Statistics,
        l_max: Option<usize>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("particle number must be >= 1".into()));
        }
        let tight = tight_orbital_bound(n, l_total, statistics);
        let l_max = l_max.unwrap_or(tight).min(l_total.max(tight));
        let mut states = Vec::new();
        let mut occ = vec![0u8; l_max + 1];
        enumerate_rec(
            &mut states,
            &mut occ,
            l_max as isize,
            n,
            l_total,
            statistics,
            l_max,
        );
        if states.is_empty() {
            return Err(Error::EmptySubspace {
                n,
                l: l_total,
                statistics: statistics.label(),
                l_max,
            });
        }
        let index = states
            .iter()
            .enumerate()
            .map(|(a, s)| (s.clone(), a as u32))
            .collect();
        Ok(Self {
            n,
            l_total,
            l_max,
            statistics,
            states,
            index,
        })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn particle_count(&self) -> usize {
        self.n
    }

    pub fn total_momentum(&self) -> usize {
        self.l_total
    }

    pub fn orbital_count(&self) -> usize {
        self.l_max + 1
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn state(&self, idx: usize) -> &FockState {
        &self.states[idx]
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn index_of(&self, state: &FockState) -> Option<usize> {
        self.index.get(state).map(|&i| i as usize)
    }

    /// Index lookup from a bare occupation slice.
    #[inline]
    pub fn index_of_slice(&self, occupations: &[u8]) -> Option<usize> {
        self.index.get(occupations).map(|&i| i as usize)
    }
}

fn enumerate_rec(
    states: &mut Vec<FockState>,
    occ: &mut Vec<u8>,
    orbital: isize,
    n_left: usize,
    l_left: usize,
    statistics: Statistics,
    l_max: usize,
) {
    if n_left == 0 {
        if l_left == 0 {
            states.push(FockState::new(occ.clone()));
        }
        return;
    }
    if orbital < 0 {
        return;
    }
    let l = orbital as usize;
    // feasibility pruning
    match statistics {
        Statistics::Boson => {
            if l_left > n_left * l {
                return;
            }
        }
        Statistics::Fermion => {
            if n_left > l + 1 {
                return;
            }
            // top n_left orbitals <= l, bottom staircase 0..n_left-1
            let max_m = n_left * l - n_left * (n_left - 1) / 2;
            let min_m = n_left * (n_left - 1) / 2;
            if l_left > max_m || l_left < min_m {
                return;
            }
        }
    }
    let cap = match statistics {
        Statistics::Boson => n_left.min(if l > 0 { l_left / l } else { n_left }),
        Statistics::Fermion => {
            if l <= l_left || (l == 0 && l_left == 0) {
                1
            } else {
                0
            }
        }
    };
    let mut nl = cap as isize;
    while nl >= 0 {
        let used = nl as usize * l;
        if used <= l_left {
            occ[l] = nl as u8;
            enumerate_rec(states, occ, orbital - 1, n_left - nl as usize, l_left - used, statistics, l_max);
            occ[l] = 0;
        }
        nl -= 1;
    }
}

/// Result of applying a normal-ordered two-body term to a basis state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoBodyImage {
    pub index: usize,
    pub amplitude: f64,
}

/// Matrix element of a_i† a_j† a_k a_l between occupation states.
///
/// Returns the image state's index in `basis` plus the amplitude, or
/// `None` when annihilation hits an empty orbital or creation violates
/// Pauli exclusion. Requires i + j = k + l.
pub fn apply_two_body(
    state: &FockState,
    basis: &SubspaceBasis,
    i: usize,
    j: usize,
    k: usize,
    l: usize,
) -> Result<Option<TwoBodyImage>> {
    let l_max = basis.l_max;
    for idx in [i, j, k, l] {
        if idx > l_max {
            return Err(Error::OrbitalOutOfRange { index: idx, l_max });
        }
    }
    debug_assert_eq!(i + j, k + l, "two-body term must conserve momentum");
    let mut occ = state.occupations.to_vec();
    let mut amp = 1.0f64;
    let fermion = basis.statistics == Statistics::Fermion;

    // operator order: a_l first, then a_k, then a_j†, then a_i†
    for &orb in &[l, k] {
        let n = occ[orb];
        if n == 0 {
            return Ok(None);
        }
        amp *= if fermion {
            jordan_wigner_sign(&occ, orb)
        } else {
            (n as f64).sqrt()
        };
        occ[orb] = n - 1;
    }
    for &orb in &[j, i] {
        let n = occ[orb];
        if fermion && n == 1 {
            return Ok(None);
        }
        amp *= if fermion {
            jordan_wigner_sign(&occ, orb)
        } else {
            ((n + 1) as f64).sqrt()
        };
        occ[orb] = n + 1;
    }
    let image = FockState::new(occ);
    let index = basis.index_of(&image).ok_or_else(|| {
        Error::BasisMismatch(format!(
            "image state {} left the (N={}, L={}) basis",
            image.compact(),
            basis.n,
            basis.l_total
        ))
    })?;
    Ok(Some(TwoBodyImage { index, amplitude: amp }))
}

fn jordan_wigner_sign(occ: &[u8], orbital: usize) -> f64 {
    let crossings: u32 = occ[..orbital].iter().map(|&n| n as u32).sum();
    if crossings % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}
