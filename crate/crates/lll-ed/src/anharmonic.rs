//! Interaction-strength scans in the quadratic-plus-quartic trap:
//! contact bosons with Numerov orbital energies on the diagonal and
//! numeric-orbital contact elements, swept over signed U₀.

use crate::entanglement;
use crate::error::{Error, Result};
use crate::fock::{Statistics, SubspaceBasis};
use crate::interaction::ElementTable;
use crate::orbitals::{build_orbital_set, OrbitalSet, TrapConfig};
use crate::solver::{
    build_hamiltonian, ground_state_lanczos, HamiltonianParts, LanczosOpts, SolveContext,
};
use serde::Serialize;

/// Allowed coupling window keeping the single-Landau-level truncation
/// honest.
pub const U0_LIMIT: f64 = 0.05;

#[derive(Debug, Clone, Serialize)]
pub struct StrengthScanRow {
    pub n: usize,
    pub l: usize,
    pub lambda: f64,
    pub u0: f64,
    pub e0: f64,
    pub s1: f64,
    pub s2: Option<f64>,
    /// Non-interacting minimizer degenerate at this point; entropies of
    /// degenerate points are start-vector artifacts, flagged not trusted.
    pub degenerate: bool,
}

/// Uniform U₀ grid with `points` samples over [lo, hi].
pub fn u0_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo <= hi) || points < 1 {
        return Err(Error::InvalidArgument("bad U0 grid".into()));
    }
    if lo < -U0_LIMIT - 1e-12 || hi > U0_LIMIT + 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "U0 grid must stay within [-{U0_LIMIT}, {U0_LIMIT}]"
        )));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect())
}

/// Reusable per-(N, L, λ) context: basis, orbital energies, elements.
pub struct AnharmonicSystem {
    pub basis: SubspaceBasis,
    pub table: ElementTable,
    pub energies: Vec<f64>,
    pub lambda: f64,
}

impl AnharmonicSystem {
    pub fn prepare(n: usize, l_total: usize, trap: &TrapConfig) -> Result<Self> {
        let basis = SubspaceBasis::enumerate(n, l_total, Statistics::Boson, None)?;
        let set = build_orbital_set(basis.l_max(), trap)?;
        Self::from_orbitals(basis, &set, trap.lambda)
    }

    pub fn from_orbitals(basis: SubspaceBasis, set: &OrbitalSet, lambda: f64) -> Result<Self> {
        let table = ElementTable::build_numeric_contact(set, basis.l_max())?;
        let energies = set.energies()[..=basis.l_max()].to_vec();
        Ok(Self {
            basis,
            table,
            energies,
            lambda,
        })
    }

    /// One grid point: assemble with signed U₀ and diagonalize.
    pub fn solve_at(&self, u0: f64, with_s2: bool, lanczos: &LanczosOpts) -> Result<StrengthScanRow> {
        let parts = HamiltonianParts {
            table: &self.table,
            coupling: u0,
            orbital_energies: Some(&self.energies),
            constant_offset: 0.0,
        };
        let h = build_hamiltonian(&self.basis, &parts)?;
        let ctx = SolveContext {
            statistics: Statistics::Boson,
            n: self.basis.particle_count(),
            l_total: self.basis.total_momentum(),
            interaction: self.table.kind(),
            coupling: u0,
            trap_lambda: Some(self.lambda),
        };
        let rec = ground_state_lanczos(&h, &ctx, lanczos)?;
        let rep = entanglement::report(&rec, &self.basis, with_s2)?;
        Ok(StrengthScanRow {
            n: self.basis.particle_count(),
            l: self.basis.total_momentum(),
            lambda: self.lambda,
            u0,
            e0: rec.energy,
            s1: rep.s1,
            s2: rep.s2,
            degenerate: rec.degenerate,
        })
    }

    /// Whether the non-interacting minimizer of Σ ε_l n_l is unique,
    /// and its index.
    pub fn noninteracting_minimizer(&self) -> (usize, bool) {
        let mut best = 0;
        let mut best_e = f64::INFINITY;
        let mut unique = true;
        for (idx, state) in self.basis.states().iter().enumerate() {
            let e: f64 = state
                .occupations()
                .iter()
                .enumerate()
                .map(|(l, &o)| self.energies[l] * o as f64)
                .sum();
            if e < best_e - 1e-12 {
                best_e = e;
                best = idx;
                unique = true;
            } else if (e - best_e).abs() <= 1e-12 {
                unique = false;
            }
        }
        (best, unique)
    }
}

/// Sweep S₁ (and optionally S₂) over the U₀ grid at fixed (N, L, λ).
pub fn strength_scan(
    n: usize,
    l_total: usize,
    trap: &TrapConfig,
    grid: &[f64],
    with_s2: bool,
    lanczos: &LanczosOpts,
) -> Result<Vec<StrengthScanRow>> {
    let system = AnharmonicSystem::prepare(n, l_total, trap)?;
    let mut rows = Vec::with_capacity(grid.len());
    for &u0 in grid {
        rows.push(system.solve_at(u0, with_s2, lanczos)?);
    }
    Ok(rows)
}

/// S₁ of the L = N subspace across particle numbers at fixed U₀: the
/// condensation diagnostic (grows with N for attraction, shrinks for
/// repulsion).
pub fn condensation_trend(
    n_list: &[usize],
    trap: &TrapConfig,
    u0: f64,
    lanczos: &LanczosOpts,
) -> Result<Vec<(usize, f64)>> {
    if u0 == 0.0 {
        return Err(Error::InvalidArgument(
            "condensation trend needs a nonzero interaction".into(),
        ));
    }
    let mut out = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let rows = strength_scan(n, n, trap, &[u0], false, lanczos)?;
        out.push((n, rows[0].s1));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trap() -> TrapConfig {
        TrapConfig::with_lambda(0.005)
    }

    #[test]
    fn grid_limits_enforced() {
        assert!(u0_grid(-0.06, 0.0, 5).is_err());
        let g = u0_grid(-0.05, 0.05, 21).unwrap();
        assert_eq!(g.len(), 21);
        assert_eq!(g[10], 0.0);
    }

    #[test]
    fn noninteracting_point_is_pure_condensate_at_l1_orbital() {
        // N=5, L=5, lambda=0.005: the unique minimizer puts all five
        // particles in l=1 (strict convexity of eps_l), so S1 = S2 = 0
        let system = AnharmonicSystem::prepare(5, 5, &trap()).unwrap();
        let (idx, unique) = system.noninteracting_minimizer();
        assert!(unique, "minimizer must be unique before asserting S1=0");
        let occ = system.basis.state(idx).occupations();
        assert_eq!(occ[1], 5);
        let row = system.solve_at(0.0, true, &LanczosOpts::default()).unwrap();
        assert!(row.s1.abs() < 1e-10, "S1 = {}", row.s1);
        assert!(row.s2.unwrap().abs() < 1e-10);
    }

    #[test]
    fn asymmetry_between_attraction_and_repulsion() {
        let system = AnharmonicSystem::prepare(4, 4, &trap()).unwrap();
        let lanczos = LanczosOpts::default();
        let plus = system.solve_at(0.05, false, &lanczos).unwrap();
        let minus = system.solve_at(-0.05, false, &lanczos).unwrap();
        assert!(plus.s1 > 0.0 && minus.s1 > 0.0);
        assert!((plus.s1 - minus.s1).abs() > 1e-6);
    }

    #[test]
    fn opposite_sign_ground_states_differ() {
        let system = AnharmonicSystem::prepare(4, 4, &trap()).unwrap();
        let lanczos = LanczosOpts::default();
        let parts = |u0: f64| HamiltonianParts {
            table: &system.table,
            coupling: u0,
            orbital_energies: Some(&system.energies),
            constant_offset: 0.0,
        };
        let ctx = SolveContext {
            statistics: Statistics::Boson,
            n: 4,
            l_total: 4,
            interaction: crate::interaction::InteractionKind::Contact,
            coupling: 1.0,
            trap_lambda: Some(0.005),
        };
        let hp = build_hamiltonian(&system.basis, &parts(0.05)).unwrap();
        let hm = build_hamiltonian(&system.basis, &parts(-0.05)).unwrap();
        let gp = ground_state_lanczos(&hp, &ctx, &lanczos).unwrap();
        let gm = ground_state_lanczos(&hm, &ctx, &lanczos).unwrap();
        let overlap: f64 = gp
            .amplitudes
            .iter()
            .zip(&gm.amplitudes)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            .abs();
        assert!(overlap < 1.0 - 1e-6, "overlap {overlap}");
    }

    #[test]
    fn entropies_grow_with_coupling_magnitude() {
        let system = AnharmonicSystem::prepare(4, 4, &trap()).unwrap();
        let lanczos = LanczosOpts::default();
        let grid = u0_grid(-0.05, 0.05, 11).unwrap();
        let rows: Vec<StrengthScanRow> = grid
            .iter()
            .map(|&u| system.solve_at(u, true, &lanczos).unwrap())
            .collect();
        let zero = rows.iter().position(|r| r.u0 == 0.0).unwrap();
        for w in rows[..=zero].windows(2) {
            assert!(w[0].s1 >= w[1].s1 - 1e-9, "S1 must fall toward U0=0-");
            assert!(w[0].s2.unwrap() >= w[1].s2.unwrap() - 1e-9);
        }
        for w in rows[zero..].windows(2) {
            assert!(w[1].s1 >= w[0].s1 - 1e-9, "S1 must rise from U0=0+");
            assert!(w[1].s2.unwrap() >= w[0].s2.unwrap() - 1e-9);
        }
    }

    #[test]
    fn energy_is_continuous_along_grid() {
        let system = AnharmonicSystem::prepare(4, 4, &trap()).unwrap();
        let lanczos = LanczosOpts::default();
        let grid = u0_grid(-0.05, 0.05, 21).unwrap();
        let rows: Vec<f64> = grid
            .iter()
            .map(|&u| system.solve_at(u, false, &lanczos).unwrap().e0)
            .collect();
        for w in rows.windows(2) {
            assert!((w[1] - w[0]).abs() < 0.2, "ground energy jumped: {w:?}");
        }
    }

    #[test]
    fn condensation_trend_signs() {
        let lanczos = LanczosOpts::default();
        let neg = condensation_trend(&[3, 5, 7], &trap(), -0.03, &lanczos).unwrap();
        assert!(neg[1].1 > neg[0].1 && neg[2].1 > neg[1].1, "{neg:?}");
        let pos = condensation_trend(&[3, 5, 7], &trap(), 0.03, &lanczos).unwrap();
        assert!(pos[1].1 < pos[0].1 && pos[2].1 < pos[1].1, "{pos:?}");
    }
}
