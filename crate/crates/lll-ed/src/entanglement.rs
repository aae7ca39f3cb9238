//! Reduced density operators of a subspace ground state and their von
//! Neumann entropies. ρ₁ is diagonal in the orbital index by momentum
//! conservation; ρ₂ is block-diagonal in the pair momentum s = i+j.

use crate::error::{Error, Result};
use crate::fock::{Statistics, SubspaceBasis};
use crate::solver::GroundStateRecord;
use nalgebra::DMatrix;
use std::collections::HashMap;

/// Spectrum of ρ₁: p_l = ⟨a_l†a_l⟩/N over orbitals 0..=l_max.
#[derive(Debug, Clone)]
pub struct SingleParticleRdm {
    pub eigenvalues: Vec<f64>,
}

/// Blocks of ρ₂ over ordered pairs (i,j) with i+j = s. Bosons include
/// i = j, fermions exclude it; with that choice Tr ρ₂ = 1 exactly.
#[derive(Debug, Clone)]
pub struct TwoParticleRdm {
    pub blocks: Vec<RdmBlock>,
}

#[derive(Debug, Clone)]
pub struct RdmBlock {
    pub pair_momentum: usize,
    pub pairs: Vec<(u16, u16)>,
    pub eigenvalues: Vec<f64>,
}

impl TwoParticleRdm {
    pub fn eigenvalues(&self) -> impl Iterator<Item = f64> + '_ {
        self.blocks.iter().flat_map(|b| b.eigenvalues.iter().copied())
    }

    pub fn trace(&self) -> f64 {
        self.eigenvalues().sum()
    }
}

/// Everything the scans consume per subspace point.
#[derive(Debug, Clone)]
pub struct EntanglementReport {
    pub s1: f64,
    pub s2: Option<f64>,
    /// ln L − S₁ with ln L exactly as plotted; absent at L = 0.
    pub ln_l_minus_s1: Option<f64>,
    /// S₁ − ln N.
    pub delta_s1: f64,
    /// ⟨a_l†a_l⟩ per orbital.
    pub occupations: Vec<f64>,
}

/// Diagonal ρ₁ from the ground-state amplitudes.
pub fn single_particle_rdm(record: &GroundStateRecord, basis: &SubspaceBasis) -> Result<SingleParticleRdm> {
    let n = basis.particle_count() as f64;
    let mut p = vec![0.0; basis.orbital_count()];
    for (amp, state) in record.amplitudes.iter().zip(basis.states()) {
        let w = amp * amp;
        for (l, &occ) in state.occupations().iter().enumerate() {
            if occ > 0 {
                p[l] += w * occ as f64;
            }
        }
    }
    for x in p.iter_mut() {
        *x /= n;
    }
    validate_rdm1(&p, basis)?;
    Ok(SingleParticleRdm { eigenvalues: p })
}

fn validate_rdm1(p: &[f64], basis: &SubspaceBasis) -> Result<()> {
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "rho1 trace {total} deviates from 1"
        )));
    }
    let fermion_cap = 1.0 / basis.particle_count() as f64 + 1e-12;
    for (l, &x) in p.iter().enumerate() {
        if x < -1e-14 {
            return Err(Error::InvalidArgument(format!(
                "rho1 eigenvalue {x} at orbital {l} is negative"
            )));
        }
        if basis.statistics() == Statistics::Fermion && x > fermion_cap {
            return Err(Error::InvalidArgument(format!(
                "rho1 eigenvalue {x} at orbital {l} violates the fermion bound"
            )));
        }
    }
    Ok(())
}

/// −Σ p ln p with 0·ln 0 := 0; entries are clipped at zero below 1e−14
/// and must sum to 1 within 1e−10.
pub fn entropy(spectrum: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    let mut s = 0.0;
    for &p in spectrum {
        if p < -1e-14 {
            return Err(Error::InvalidArgument(format!(
                "entropy input {p} below the clip threshold"
            )));
        }
        let p = p.max(0.0);
        sum += p;
        if p > 0.0 {
            s -= p * p.ln();
        }
    }
    if (sum - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "entropy input sums to {sum}, not 1"
        )));
    }
    Ok(s)
}

/// ρ₂ blocks via the pair-annihilation vectors v_{pq} = a_q a_p |Φ⟩;
/// each block is their Gram matrix over the (N−2)-particle states,
/// normalized by N(N−1).
pub fn two_particle_rdm(record: &GroundStateRecord, basis: &SubspaceBasis) -> Result<TwoParticleRdm> {
    let n = basis.particle_count();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "two-particle RDM needs at least two particles".into(),
        ));
    }
    let l_max = basis.l_max();
    let l_total = basis.total_momentum();
    let fermion = basis.statistics() == Statistics::Fermion;
    let norm = (n * (n - 1)) as f64;
    let mut blocks = Vec::new();

    for s in 0..=(2 * l_max).min(l_total) {
        let pairs: Vec<(u16, u16)> = (s.saturating_sub(l_max)..=s.min(l_max))
            .map(|p| (p as u16, (s - p) as u16))
            .filter(|&(p, q)| !fermion || p != q)
            .collect();
        if pairs.is_empty() {
            continue;
        }
        // reduced (N-2)-particle states discovered on the fly
        let mut reduced: HashMap<Vec<u8>, usize, crate::fock::FnvBuild> = HashMap::default();
        let mut vectors: Vec<Vec<f64>> = vec![Vec::new(); pairs.len()];
        let mut scratch = Vec::new();
        for (pi, &(p, q)) in pairs.iter().enumerate() {
            let (p, q) = (p as usize, q as usize);
            for (amp, state) in record.amplitudes.iter().zip(basis.states()) {
                if *amp == 0.0 {
                    continue;
                }
                scratch.clear();
                scratch.extend_from_slice(state.occupations());
                // a_p first, then a_q
                let mut w = *amp;
                let mut dead = false;
                for orb in [p, q] {
                    if scratch[orb] == 0 {
                        dead = true;
                        break;
                    }
                    if fermion {
                        let parity: u32 = scratch[..orb].iter().map(|&x| x as u32).sum();
                        if parity % 2 == 1 {
                            w = -w;
                        }
                    } else {
                        w *= (scratch[orb] as f64).sqrt();
                    }
                    scratch[orb] -= 1;
                }
                if dead {
                    continue;
                }
                let next_id = reduced.len();
                let idx = *reduced.entry(scratch.clone()).or_insert(next_id);
                for v in vectors.iter_mut() {
                    if v.len() < reduced.len() {
                        v.resize(reduced.len(), 0.0);
                    }
                }
                vectors[pi][idx] += w;
            }
        }
        let rdim = reduced.len();
        if rdim == 0 {
            continue;
        }
        for v in vectors.iter_mut() {
            v.resize(rdim, 0.0);
        }
        let mut gram = DMatrix::<f64>::zeros(pairs.len(), pairs.len());
        for a in 0..pairs.len() {
            for b in a..pairs.len() {
                let g: f64 = vectors[a].iter().zip(&vectors[b]).map(|(x, y)| x * y).sum();
                gram[(a, b)] = g / norm;
                gram[(b, a)] = g / norm;
            }
        }
        let eig = gram.symmetric_eigen();
        let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
        eigenvalues.sort_by(|x, y| y.partial_cmp(x).unwrap());
        for &ev in &eigenvalues {
            if ev < -1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "rho2 block s={s} has eigenvalue {ev} below the PSD tolerance"
                )));
            }
        }
        blocks.push(RdmBlock {
            pair_momentum: s,
            pairs,
            eigenvalues,
        });
    }

    let rdm = TwoParticleRdm { blocks };
    let trace = rdm.trace();
    if (trace - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "rho2 trace {trace} deviates from 1"
        )));
    }
    Ok(rdm)
}

/// Bundle S₁, optionally S₂, the plotted bound difference, ΔS₁, and the
/// occupation profile.
pub fn report(record: &GroundStateRecord, basis: &SubspaceBasis, with_s2: bool) -> Result<EntanglementReport> {
    let rdm1 = single_particle_rdm(record, basis)?;
    let s1 = entropy(&rdm1.eigenvalues)?;
    let n = basis.particle_count() as f64;
    let l = basis.total_momentum();
    let s2 = if with_s2 && basis.particle_count() >= 2 {
        let rdm2 = two_particle_rdm(record, basis)?;
        let spec: Vec<f64> = rdm2.eigenvalues().collect();
        Some(entropy(&spec)?)
    } else {
        None
    };
    Ok(EntanglementReport {
        s1,
        s2,
        ln_l_minus_s1: if l > 0 { Some((l as f64).ln() - s1) } else { None },
        delta_s1: s1 - n.ln(),
        occupations: rdm1.eigenvalues.iter().map(|p| p * n).collect(),
    })
}
