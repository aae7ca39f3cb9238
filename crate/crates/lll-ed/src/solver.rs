//! Subspace Hamiltonian assembly and ground-state eigensolvers: Lanczos
//! with full reorthogonalization for production runs, dense symmetric
//! diagonalization as the small-dimension oracle.

use crate::error::{Error, Result};
use crate::fock::{Statistics, SubspaceBasis};
use crate::interaction::{ElementTable, InteractionKind};
use nalgebra::DMatrix;
use rayon::prelude::*;

/// Symmetric sparse matrix in CSR form. Both triangles are stored, so a
/// matrix-vector product is a pure row-gather: deterministic bit-for-bit
/// at any worker count.
pub struct SparseHamiltonian {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
    /// Constant (L+N)ħω bookkeeping of the harmonic trap; never enters
    /// the matrix. The rotation term −LΩ is dropped throughout.
    pub constant_offset: f64,
}

/// Assembly inputs: interaction elements, coupling U₀ (kept at 1 for
/// harmonic repulsive runs, where the ground state is scale-invariant),
/// and single-particle energies for the anharmonic trap.
pub struct HamiltonianParts<'a> {
    pub table: &'a ElementTable,
    pub coupling: f64,
    pub orbital_energies: Option<&'a [f64]>,
    pub constant_offset: f64,
}

impl<'a> HamiltonianParts<'a> {
    pub fn harmonic(table: &'a ElementTable) -> Self {
        Self {
            table,
            coupling: 1.0,
            orbital_energies: None,
            constant_offset: 0.0,
        }
    }
}

/// Assemble ⟨m| Σ U_{ijkl} a_i†a_j†a_k a_l |n⟩ (times the coupling) plus
/// the diagonal Σ_l ε_l n_l part when orbital energies are given.
pub fn build_hamiltonian(basis: &SubspaceBasis, parts: &HamiltonianParts) -> Result<SparseHamiltonian> {
    let l_max = basis.l_max();
    if parts.table.l_max() < l_max {
        return Err(Error::ElementTableGap {
            orbital: l_max,
            l_max: parts.table.l_max(),
        });
    }
    if let Some(eps) = parts.orbital_energies {
        if eps.len() < l_max + 1 {
            return Err(Error::InvalidArgument(format!(
                "orbital energies cover {} orbitals, basis needs {}",
                eps.len(),
                l_max + 1
            )));
        }
    }
    let dim = basis.dim();
    let rows: Vec<Vec<(u32, f64)>> = (0..dim)
        .into_par_iter()
        .map(|a| assemble_row(basis, parts, a))
        .collect();
    let mut row_ptr = Vec::with_capacity(dim + 1);
    row_ptr.push(0);
    let nnz: usize = rows.iter().map(|r| r.len()).sum();
    let mut cols = Vec::with_capacity(nnz);
    let mut vals = Vec::with_capacity(nnz);
    for row in rows {
        for (c, v) in row {
            cols.push(c);
            vals.push(v);
        }
        row_ptr.push(cols.len());
    }
    Ok(SparseHamiltonian {
        dim,
        row_ptr,
        cols,
        vals,
        constant_offset: parts.constant_offset,
    })
}

fn assemble_row(basis: &SubspaceBasis, parts: &HamiltonianParts, a: usize) -> Vec<(u32, f64)> {
    let state = basis.state(a);
    let l_max = basis.l_max();
    let fermion = basis.statistics() == Statistics::Fermion;
    let table = parts.table;
    let mut occ = state.occupations().to_vec();
    let occupied: Vec<usize> = state.occupied_orbitals().collect();
    // accumulate into a dense scratch over candidate columns
    let mut acc: Vec<(u32, f64)> = Vec::new();
    let mut slot: std::collections::HashMap<u32, usize, crate::fock::FnvBuild> =
        std::collections::HashMap::default();

    for &l in &occupied {
        // a_l first
        let amp_l = if fermion {
            sign_below(&occ, l)
        } else {
            (occ[l] as f64).sqrt()
        };
        occ[l] -= 1;
        for &k in &occupied {
            if occ[k] == 0 {
                continue;
            }
            let amp_k = if fermion {
                sign_below(&occ, k)
            } else {
                (occ[k] as f64).sqrt()
            };
            occ[k] -= 1;
            let s = k + l;
            let i_lo = s.saturating_sub(l_max);
            let i_hi = s.min(l_max);
            for i in i_lo..=i_hi {
                let j = s - i;
                // a_j† then a_i†
                let (amp_c, ok) = creation_pair(&mut occ, j, i, fermion);
                if ok {
                    if let Some(b) = basis.index_of_slice(&occ) {
                        let u = table.get(i, j, k, l);
                        let w = amp_l * amp_k * amp_c * u;
                        if w != 0.0 {
                            match slot.entry(b as u32) {
                                std::collections::hash_map::Entry::Occupied(e) => {
                                    acc[*e.get()].1 += w;
                                }
                                std::collections::hash_map::Entry::Vacant(e) => {
                                    e.insert(acc.len());
                                    acc.push((b as u32, w));
                                }
                            }
                        }
                    }
                    undo_creation_pair(&mut occ, j, i);
                }
            }
            occ[k] += 1;
        }
        occ[l] += 1;
    }

    for entry in acc.iter_mut() {
        entry.1 *= parts.coupling;
    }
    if let Some(eps) = parts.orbital_energies {
        let diag: f64 = state
            .occupations()
            .iter()
            .enumerate()
            .map(|(l, &n)| eps[l] * n as f64)
            .sum();
        if let Some(pos) = slot.get(&(a as u32)) {
            acc[*pos].1 += diag;
        } else {
            acc.push((a as u32, diag));
        }
    }
    acc.retain(|&(_, v)| v != 0.0);
    acc.sort_unstable_by_key(|&(c, _)| c);
    acc
}

#[inline]
fn sign_below(occ: &[u8], orbital: usize) -> f64 {
    let parity: u32 = occ[..orbital].iter().map(|&n| n as u32).sum();
    if parity % 2 == 0 {
        occ[orbital] as f64
    } else {
        -(occ[orbital] as f64)
    }
}

#[inline]
fn creation_pair(occ: &mut [u8], j: usize, i: usize, fermion: bool) -> (f64, bool) {
    if fermion {
        if occ[j] == 1 {
            return (0.0, false);
        }
        let s1 = if occ[..j].iter().map(|&n| n as u32).sum::<u32>() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        occ[j] += 1;
        if occ[i] == 1 {
            occ[j] -= 1;
            return (0.0, false);
        }
        let s2 = if occ[..i].iter().map(|&n| n as u32).sum::<u32>() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        occ[i] += 1;
        (s1 * s2, true)
    } else {
        let a1 = ((occ[j] + 1) as f64).sqrt();
        occ[j] += 1;
        let a2 = ((occ[i] + 1) as f64).sqrt();
        occ[i] += 1;
        (a1 * a2, true)
    }
}

#[inline]
fn undo_creation_pair(occ: &mut [u8], j: usize, i: usize) {
    occ[i] -= 1;
    occ[j] -= 1;
}

impl SparseHamiltonian {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// y = H x, parallel over rows.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        y.par_iter_mut().enumerate().for_each(|(r, out)| {
            let mut acc = 0.0;
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[p] * x[self.cols[p] as usize];
            }
            *out = acc;
        });
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim];
        for r in 0..self.dim {
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.cols[p] as usize == r {
                    d[r] = self.vals[p];
                }
            }
        }
        d
    }

    /// ⟨x|H|x⟩ for a normalized vector.
    pub fn expectation(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; self.dim];
        self.matvec(x, &mut y);
        dot(x, &y)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[p] as usize)] = self.vals[p];
            }
        }
        m
    }

    /// Largest |H_{ab} − H_{ba}| over stored entries.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.cols[p] as usize;
                let mirror = self.entry(c, r);
                worst = worst.max((self.vals[p] - mirror).abs());
            }
        }
        worst
    }

    fn entry(&self, r: usize, c: usize) -> f64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        let cols = &self.cols[range.clone()];
        match cols.binary_search(&(c as u32)) {
            Ok(pos) => self.vals[range.start + pos],
            Err(_) => 0.0,
        }
    }

    /// Debug dump: `row,col,value` per stored entry.
    pub fn dump_csv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "row,col,value")?;
        for r in 0..self.dim {
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                writeln!(out, "{},{},{:.16e}", r, self.cols[p], self.vals[p])?;
            }
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Identifying metadata carried through to reports and output files.
#[derive(Debug, Clone)]
pub struct SolveContext {
    pub statistics: Statistics,
    pub n: usize,
    pub l_total: usize,
    pub interaction: InteractionKind,
    pub coupling: f64,
    pub trap_lambda: Option<f64>,
}

/// Ground eigenpair of one subspace plus bookkeeping.
#[derive(Debug, Clone)]
pub struct GroundStateRecord {
    pub context: SolveContext,
    /// Eigenvalue of the assembled matrix (interaction part, plus the
    /// ε-diagonal in the anharmonic case). Constant offset excluded.
    pub energy: f64,
    pub amplitudes: Vec<f64>,
    pub residual: f64,
    pub degenerate: bool,
    /// E₁ − E₀ estimate; infinite for one-dimensional subspaces.
    pub gap: f64,
    pub constant_offset: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct LanczosOpts {
    pub tolerance: f64,
    pub max_iter: usize,
}

impl Default for LanczosOpts {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iter: 600,
        }
    }
}

const DEGENERACY_TOL: f64 = 1e-10;

fn finish_record(
    ctx: &SolveContext,
    h: &SparseHamiltonian,
    energy: f64,
    mut amplitudes: Vec<f64>,
    residual: f64,
    gap: f64,
) -> GroundStateRecord {
    // normalize and canonicalize: first nonzero amplitude positive
    let n = norm(&amplitudes);
    for x in amplitudes.iter_mut() {
        *x /= n;
    }
    if let Some(first) = amplitudes.iter().find(|x| x.abs() > 1e-14) {
        if *first < 0.0 {
            for x in amplitudes.iter_mut() {
                *x = -*x;
            }
        }
    }
    let degenerate = gap.is_finite() && gap < DEGENERACY_TOL * energy.abs().max(1.0);
    GroundStateRecord {
        context: ctx.clone(),
        energy,
        amplitudes,
        residual,
        degenerate,
        gap,
        constant_offset: h.constant_offset,
    }
}

/// Lowest eigenpair by Lanczos with full reorthogonalization.
///
/// Deterministic: the start vector is the normalized all-ones vector,
/// reductions are serial, and the matvec is a row gather. If the run
/// stalls (breakdown before convergence), one deterministic pseudo-random
/// restart is attempted before reporting failure.
pub fn ground_state_lanczos(
    h: &SparseHamiltonian,
    ctx: &SolveContext,
    opts: &LanczosOpts,
) -> Result<GroundStateRecord> {
    let dim = h.dim();
    if dim == 0 {
        return Err(Error::InvalidArgument("empty Hamiltonian".into()));
    }
    if dim == 1 {
        let e = h.entry(0, 0);
        return Ok(finish_record(ctx, h, e, vec![1.0], 0.0, f64::INFINITY));
    }
    let ones = vec![1.0 / (dim as f64).sqrt(); dim];
    match lanczos_from(h, ctx, opts, ones) {
        Ok(rec) => Ok(rec),
        Err(_) => {
            let mut seed = 0x9e37_79b9_7f4a_7c15u64;
            let alt: Vec<f64> = (0..dim)
                .map(|_| {
                    seed = splitmix64(seed);
                    // uniform in [-1, 1)
                    (seed >> 11) as f64 / (1u64 << 52) as f64 - 1.0
                })
                .collect();
            lanczos_from(h, ctx, opts, alt)
        }
    }
}

fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn lanczos_from(
    h: &SparseHamiltonian,
    ctx: &SolveContext,
    opts: &LanczosOpts,
    start: Vec<f64>,
) -> Result<GroundStateRecord> {
    let dim = h.dim();
    let mut v = start;
    let n0 = norm(&v);
    for x in v.iter_mut() {
        *x /= n0;
    }
    let mut basis: Vec<Vec<f64>> = vec![v.clone()];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new(); // beta[j] couples v_j and v_{j+1}
    let mut w = vec![0.0; dim];
    let mut best_residual = f64::INFINITY;
    let mut prev_e1 = f64::INFINITY;
    let max_steps = opts.max_iter.min(dim);

    for step in 0..max_steps {
        h.matvec(&basis[step], &mut w);
        if step > 0 {
            let b = betas[step - 1];
            let prev = &basis[step - 1];
            for (wi, pi) in w.iter_mut().zip(prev) {
                *wi -= b * pi;
            }
        }
        let alpha = dot(&basis[step], &w);
        alphas.push(alpha);
        {
            let cur = &basis[step];
            for (wi, ci) in w.iter_mut().zip(cur) {
                *wi -= alpha * ci;
            }
        }
        // full reorthogonalization, twice
        for _ in 0..2 {
            for vb in &basis {
                let c = dot(vb, &w);
                if c != 0.0 {
                    for (wi, bi) in w.iter_mut().zip(vb) {
                        *wi -= c * bi;
                    }
                }
            }
        }
        let beta = norm(&w);
        let exhausted = beta <= 1e-13 * alphas[0].abs().max(1.0) || step + 1 == max_steps || step + 1 == dim;

        // Ritz check on the current tridiagonal
        let m = alphas.len();
        let check = exhausted || m >= 8 && m % 4 == 0 || dim <= 16;
        if check {
            let (theta, s_vec, theta1) = tridiag_ground(&alphas, &betas);
            let ritz_residual = if exhausted { 0.0 } else { (beta * s_vec[m - 1]).abs() };
            let scale = theta.abs().max(1.0);
            let e1_stable = theta1.map_or(true, |t1| (t1 - prev_e1).abs() <= 1e-8 * t1.abs().max(1.0));
            if let Some(t1) = theta1 {
                prev_e1 = t1;
            }
            if (ritz_residual <= opts.tolerance * scale && e1_stable) || exhausted {
                // assemble eigenvector, verify the true residual
                let mut x = vec![0.0; dim];
                for (c, vb) in s_vec.iter().zip(&basis) {
                    for (xi, bi) in x.iter_mut().zip(vb) {
                        *xi += c * bi;
                    }
                }
                let xn = norm(&x);
                for xi in x.iter_mut() {
                    *xi /= xn;
                }
                let mut hx = vec![0.0; dim];
                h.matvec(&x, &mut hx);
                let e = dot(&x, &hx);
                let mut res = 0.0;
                for (hi, xi) in hx.iter().zip(&x) {
                    let d = hi - e * xi;
                    res += d * d;
                }
                let res = res.sqrt();
                best_residual = best_residual.min(res);
                if res <= opts.tolerance * e.abs().max(1.0) * 5.0 || exhausted {
                    if res > opts.tolerance * e.abs().max(1.0) * 5.0 {
                        return Err(Error::NoConvergence {
                            iterations: m,
                            residual: res,
                        });
                    }
                    let gap = match theta1 {
                        Some(t1) if m >= 2 => t1 - theta,
                        _ => f64::INFINITY,
                    };
                    return Ok(finish_record(ctx, h, e, x, res, gap));
                }
            }
        }
        if exhausted {
            return Err(Error::NoConvergence {
                iterations: alphas.len(),
                residual: best_residual,
            });
        }
        betas.push(beta);
        let next: Vec<f64> = w.iter().map(|&x| x / beta).collect();
        basis.push(next);
    }
    Err(Error::NoConvergence {
        iterations: max_steps,
        residual: best_residual,
    })
}

/// Ground eigenpair (value, vector, second value) of the tridiagonal
/// with diagonal `alphas` and off-diagonal `betas`.
fn tridiag_ground(alphas: &[f64], betas: &[f64]) -> (f64, Vec<f64>, Option<f64>) {
    let m = alphas.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for (i, &a) in alphas.iter().enumerate() {
        t[(i, i)] = a;
    }
    for (i, &b) in betas.iter().take(m.saturating_sub(1)).enumerate() {
        t[(i, i + 1)] = b;
        t[(i + 1, i)] = b;
    }
    let eig = t.symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let g = order[0];
    let vec = eig.eigenvectors.column(g).iter().cloned().collect();
    let second = order.get(1).map(|&i| eig.eigenvalues[i]);
    (eig.eigenvalues[g], vec, second)
}

/// Dense symmetric eigensolve oracle; refuses above the cap.
pub fn ground_state_dense(
    h: &SparseHamiltonian,
    ctx: &SolveContext,
    cap: usize,
) -> Result<GroundStateRecord> {
    let dim = h.dim();
    if dim > cap {
        return Err(Error::DimensionCap { dim, cap });
    }
    let dense = h.to_dense();
    let eig = dense.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let g = order[0];
    let e = eig.eigenvalues[g];
    let x: Vec<f64> = eig.eigenvectors.column(g).iter().cloned().collect();
    let gap = if dim >= 2 {
        eig.eigenvalues[order[1]] - e
    } else {
        f64::INFINITY
    };
    let mut hx = vec![0.0; dim];
    h.matvec(&x, &mut hx);
    let mut res = 0.0;
    for (hi, xi) in hx.iter().zip(&x) {
        let d = hi - e * xi;
        res += d * d;
    }
    Ok(finish_record(ctx, h, e, x, res.sqrt(), gap))
}
