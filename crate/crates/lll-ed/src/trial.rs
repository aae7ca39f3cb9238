//! Bosonic trial states built from symmetrized products of squared
//! Jastrow factors, one ν = 1/2 Laughlin block per particle set, expanded
//! exactly (integer coefficients) and converted to normalized Fock
//! amplitudes for overlap checks against exact diagonalization.

use crate::analysis::special_subspace_momentum;
use crate::error::{Error, Result};
use crate::fock::{Statistics, SubspaceBasis};
use crate::math::ln_factorial;
use crate::solver::GroundStateRecord;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::collections::HashMap;

/// Exact expansion of a symmetric polynomial: coefficient per multiset
/// of particle degrees (the coefficient every ordered monomial of that
/// class carries).
#[derive(Debug, Clone)]
pub struct MonomialExpansion {
    /// Sorted (ascending) degree vectors → integer coefficient.
    pub terms: HashMap<Vec<u8>, BigInt>,
    pub n_vars: usize,
    pub degree: usize,
}

/// Expansion cap: set partitions × monomials grow combinatorially.
pub const DEFAULT_VARIABLE_CAP: usize = 8;

/// Polynomial over ordered exponent vectors, used while multiplying out
/// one block's factors.
type OrderedPoly = HashMap<Vec<u8>, i128>;

fn jastrow_squared_ordered(n_vars: usize) -> OrderedPoly {
    let mut poly: OrderedPoly = HashMap::new();
    poly.insert(vec![0u8; n_vars], 1);
    for p in 0..n_vars {
        for q in (p + 1)..n_vars {
            let mut next: OrderedPoly = HashMap::with_capacity(poly.len() * 2);
            for (expo, coeff) in &poly {
                // multiply by (z_p - z_q)^2 = z_p^2 - 2 z_p z_q + z_q^2
                for (dp, dq, factor) in [(2u8, 0u8, 1i128), (1, 1, -2), (0, 2, 1)] {
                    let mut e = expo.clone();
                    e[p] += dp;
                    e[q] += dq;
                    *next.entry(e).or_insert(0) += coeff * factor;
                }
            }
            next.retain(|_, c| *c != 0);
            poly = next;
        }
    }
    poly
}

/// Exact expansion of ∏_{i<j} (z_i − z_j)² over the given number of
/// variables. A single variable gives the constant 1.
pub fn jastrow_squared(n_vars: usize, cap: usize) -> Result<MonomialExpansion> {
    if n_vars == 0 {
        return Err(Error::InvalidArgument("need at least one variable".into()));
    }
    if n_vars > cap {
        return Err(Error::ExpansionCap(format!(
            "jastrow expansion over {n_vars} variables exceeds the cap {cap}"
        )));
    }
    let ordered = jastrow_squared_ordered(n_vars);
    let mut terms: HashMap<Vec<u8>, BigInt> = HashMap::new();
    for (expo, coeff) in ordered {
        let mut key = expo;
        key.sort_unstable();
        // the polynomial is symmetric: every ordering carries the same
        // coefficient, so insert-or-verify
        match terms.get(&key) {
            None => {
                terms.insert(key, BigInt::from(coeff));
            }
            Some(prev) => debug_assert_eq!(prev, &BigInt::from(coeff)),
        }
    }
    Ok(MonomialExpansion {
        terms,
        n_vars,
        degree: n_vars * (n_vars - 1),
    })
}

/// Normalized trial state on the (N, L, Boson) basis.
#[derive(Debug)]
pub struct TrialState {
    pub n: usize,
    pub k: usize,
    pub n_bar: usize,
    pub l_total: usize,
    pub amplitudes: Vec<f64>,
    pub basis: SubspaceBasis,
}

/// Enumerate set partitions of {0..n-1} into blocks of the prescribed
/// sizes (multiset), each partition visited exactly once.
fn for_each_partition<F: FnMut(&[Vec<usize>])>(n: usize, sizes: &[usize], f: &mut F) {
    let mut remaining: Vec<usize> = (0..n).rev().collect(); // pop() yields smallest
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut sizes_left = sizes.to_vec();
    recurse(&mut remaining, &mut blocks, &mut sizes_left, f);

    fn recurse<F: FnMut(&[Vec<usize>])>(
        remaining: &mut Vec<usize>,
        blocks: &mut Vec<Vec<usize>>,
        sizes_left: &mut Vec<usize>,
        f: &mut F,
    ) {
        if remaining.is_empty() {
            f(blocks);
            return;
        }
        let leader = remaining.pop().unwrap();
        let mut tried = Vec::new();
        for si in 0..sizes_left.len() {
            let size = sizes_left[si];
            if tried.contains(&size) {
                continue; // identical block sizes are interchangeable
            }
            tried.push(size);
            sizes_left.swap_remove(si);
            // choose size-1 companions from the remaining pool
            let pool: Vec<usize> = remaining.clone();
            choose(&pool, size - 1, &mut Vec::new(), &mut |members| {
                let mut block = vec![leader];
                block.extend_from_slice(members);
                let mut rest: Vec<usize> = pool
                    .iter()
                    .filter(|x| !members.contains(x))
                    .cloned()
                    .collect();
                blocks.push(block);
                recurse(&mut rest, blocks, sizes_left, f);
                blocks.pop();
            });
            sizes_left.push(size);
            let last = sizes_left.len() - 1;
            sizes_left.swap(si, last);
        }
        remaining.push(leader);
    }

    fn choose<F: FnMut(&[usize])>(pool: &[usize], k: usize, picked: &mut Vec<usize>, f: &mut F) {
        if k == 0 {
            f(picked);
            return;
        }
        for (i, &x) in pool.iter().enumerate() {
            if pool.len() - i < k {
                break;
            }
            picked.push(x);
            choose(&pool[i + 1..], k - 1, picked, f);
            picked.pop();
        }
    }
}

/// Block sizes of the symmetrized product: N̄ blocks of (N−N̄)/k + 1 and
/// k−N̄ blocks of (N−N̄)/k.
fn block_sizes(n: usize, k: usize) -> Result<(Vec<usize>, usize)> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    let n_bar = n % k;
    let m = (n - n_bar) / k;
    if m == 0 {
        return Err(Error::InvalidArgument(format!(
            "need at least one particle per block: N={n}, k={k}"
        )));
    }
    let mut sizes = Vec::new();
    sizes.extend(std::iter::repeat(m + 1).take(n_bar));
    sizes.extend(std::iter::repeat(m).take(k - n_bar));
    Ok((sizes, n_bar))
}

/// Build Ψ^k: the symmetrized product of squared Jastrow factors over
/// all set partitions into the prescribed block sizes, expanded to Fock
/// amplitudes and normalized.
pub fn symmetrized_product(n: usize, k: usize) -> Result<TrialState> {
    symmetrized_product_capped(n, k, DEFAULT_VARIABLE_CAP)
}

pub fn symmetrized_product_capped(n: usize, k: usize, cap: usize) -> Result<TrialState> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one particle".into()));
    }
    if n > cap {
        return Err(Error::ExpansionCap(format!(
            "trial construction capped at N <= {cap}; got N={n}"
        )));
    }
    let (sizes, n_bar) = block_sizes(n, k)?;
    let (l_total, _) = special_subspace_momentum(n, k, Statistics::Boson);

    // per-size block expansions over ordered exponents
    let mut by_size: HashMap<usize, Vec<(Vec<u8>, i128)>> = HashMap::new();
    for &s in &sizes {
        by_size
            .entry(s)
            .or_insert_with(|| jastrow_squared_ordered(s).into_iter().collect());
    }

    // accumulate over partitions into sorted-degree classes
    let mut accum: HashMap<Vec<u8>, BigInt> = HashMap::new();
    for_each_partition(n, &sizes, &mut |blocks| {
        // cartesian product over block monomials
        fn descend(
            blocks: &[Vec<usize>],
            polys: &HashMap<usize, Vec<(Vec<u8>, i128)>>,
            depth: usize,
            degrees: &mut Vec<u8>,
            coeff: BigInt,
            accum: &mut HashMap<Vec<u8>, BigInt>,
        ) {
            if depth == blocks.len() {
                let mut key = degrees.clone();
                key.sort_unstable();
                *accum.entry(key).or_insert_with(BigInt::zero) += coeff;
                return;
            }
            let block = &blocks[depth];
            for (expo, c) in &polys[&block.len()] {
                for (slot, &var) in block.iter().enumerate() {
                    degrees[var] = expo[slot];
                }
                descend(blocks, polys, depth + 1, degrees, &coeff * *c, accum);
            }
            for &var in block {
                degrees[var] = 0;
            }
        }
        let mut degrees = vec![0u8; n];
        descend(blocks, &by_size, 0, &mut degrees, BigInt::from(1), &mut accum);
    });
    accum.retain(|_, c| !c.is_zero());

    // Fock amplitudes: for the sorted degree class d with occupations
    // n_l, the accumulated coefficient equals (per-monomial coefficient)
    // × N!/∏ n_l!, and the amplitude is ∝ accum × √(∏ (l!)^{n_l} ∏ n_l!) / N!.
    let basis = SubspaceBasis::enumerate(n, l_total, Statistics::Boson, None)?;
    let mut ln_weights = Vec::with_capacity(accum.len());
    let mut entries = Vec::with_capacity(accum.len());
    for (degrees, coeff) in &accum {
        debug_assert_eq!(degrees.iter().map(|&d| d as usize).sum::<usize>(), l_total);
        let mut occ = vec![0u8; basis.orbital_count()];
        for &d in degrees {
            occ[d as usize] += 1;
        }
        let idx = basis.index_of_slice(&occ).ok_or_else(|| {
            Error::BasisMismatch("trial monomial fell outside the target basis".into())
        })?;
        let mut ln_w = 0.0;
        for (l, &o) in occ.iter().enumerate() {
            if o > 0 {
                ln_w += o as f64 * ln_factorial(l) + ln_factorial(o as usize);
            }
        }
        let (coeff_f, sign) = big_to_log(coeff);
        ln_weights.push(0.5 * ln_w + coeff_f);
        entries.push((idx, sign));
    }
    let max_ln = ln_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut amplitudes = vec![0.0; basis.dim()];
    for ((idx, sign), ln_w) in entries.into_iter().zip(ln_weights) {
        amplitudes[idx] = sign * (ln_w - max_ln).exp();
    }
    let norm: f64 = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
    for a in amplitudes.iter_mut() {
        *a /= norm;
    }
    Ok(TrialState {
        n,
        k,
        n_bar,
        l_total,
        amplitudes,
        basis,
    })
}

/// (ln |x|, sign) of a BigInt, exact in the mantissa range and shifted
/// bitwise beyond it.
fn big_to_log(x: &BigInt) -> (f64, f64) {
    use num_traits::ToPrimitive;
    let sign = if x.is_negative() { -1.0 } else { 1.0 };
    let mag = x.abs();
    match mag.to_f64() {
        Some(v) if v.is_finite() && v > 0.0 => (v.ln(), sign),
        _ => {
            let shift = mag.bits().saturating_sub(53);
            let top = (mag >> shift).to_f64().expect("53-bit mantissa fits f64");
            (top.ln() + shift as f64 * std::f64::consts::LN_2, sign)
        }
    }
}

/// |⟨Ψ_trial | Φ_ED⟩| for states on the same (N, L, Boson) basis.
pub fn overlap(trial: &TrialState, ed: &GroundStateRecord) -> Result<f64> {
    if ed.context.statistics != Statistics::Boson
        || ed.context.n != trial.n
        || ed.context.l_total != trial.l_total
        || ed.amplitudes.len() != trial.amplitudes.len()
    {
        return Err(Error::BasisMismatch(format!(
            "trial (N={}, L={}) vs ED (N={}, L={}, {})",
            trial.n,
            trial.l_total,
            ed.context.n,
            ed.context.l_total,
            ed.context.statistics
        )));
    }
    Ok(trial
        .amplitudes
        .iter()
        .zip(&ed.amplitudes)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        .abs())
}
