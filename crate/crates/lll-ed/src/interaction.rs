//! Closed-form two-body interaction matrix elements over
//! lowest-Landau-level orbitals: contact (exact factorial formula) and
//! Coulomb (Tsiper's A/B hypergeometric-sum form), plus the precomputed
//! `ElementTable` the Hamiltonian assembly reads from.
//!
//! Convention: the contact element is the normative scale, with
//! U(0,0,0,0) = 1 (the raw 2D integral times 2π). The Coulomb closed
//! form carries one global convention factor, calibrated once against
//! the quadrature oracle; in the harmonic trap every entanglement
//! observable is invariant under that positive rescaling.

use crate::error::{Error, Result};
use crate::math::{ln_binomial, ln_factorial, log_gamma_half};
use crate::quadrature::{self, Kernel, Orbitals};
use std::io::Write;
use std::sync::OnceLock;

pub use crate::quadrature::{gauss_laguerre, quadrature_element, QuadratureValue};

/// Interaction shape. The coupling strength U₀ multiplies the assembled
/// operator and lives in the Hamiltonian, not here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InteractionKind {
    Contact,
    Coulomb,
}

impl InteractionKind {
    pub fn label(self) -> &'static str {
        match self {
            InteractionKind::Contact => "contact",
            InteractionKind::Coulomb => "coulomb",
        }
    }
}

impl std::fmt::Display for InteractionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Contact element U = (1/2^{i+j}) (i+j)!/√(i!j!k!l!) δ_{i+j,k+l}.
pub fn contact_element(i: usize, j: usize, k: usize, l: usize) -> f64 {
    if i + j != k + l {
        return 0.0;
    }
    let s = i + j;
    if s <= 30 {
        // direct factorial products stay well inside f64 range here
        let fact = |n: usize| -> f64 { (1..=n).map(|v| v as f64).product() };
        fact(s) / (fact(i) * fact(j) * fact(k) * fact(l)).sqrt() / 2f64.powi(s as i32)
    } else {
        (ln_factorial(s)
            - 0.5 * (ln_factorial(i) + ln_factorial(j) + ln_factorial(k) + ln_factorial(l))
            - s as f64 * 2f64.ln())
        .exp()
    }
}

/// Ordered-index symmetry applied by [`canonicalize_indices`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexSymmetry {
    Identity,
    /// (i,j,k,l) → (l,k,j,i); flips the sign of the exponent i−l.
    Reversal,
}

/// Map a conserving tuple onto one with i − l ≥ 0 so the Γ and
/// factorial arguments of the Coulomb sums are well-defined.
pub fn canonicalize_indices(
    i: usize,
    j: usize,
    k: usize,
    l: usize,
) -> (usize, usize, usize, usize, IndexSymmetry) {
    debug_assert_eq!(i + j, k + l);
    if i >= l {
        (i, j, k, l, IndexSymmetry::Identity)
    } else {
        (l, k, j, i, IndexSymmetry::Reversal)
    }
}

/// ln of A_{rs}^t (unweighted) or B_{rs}^t (weighted by 2q+t+1/2), both
/// sums of positive terms, accumulated around the running maximum.
fn ln_tsiper_sum(r: usize, s: usize, t: usize, weighted: bool) -> f64 {
    let mut ln_terms = Vec::with_capacity(r + 1);
    for q in 0..=r {
        let mut ln = ln_binomial(r, q) + log_gamma_half(2 * q + 1) + log_gamma_half(2 * (q + t) + 1)
            - ln_factorial(q + t)
            - log_gamma_half(2 * (q + s + t) + 3);
        if weighted {
            ln += (2.0 * q as f64 + t as f64 + 0.5).ln();
        }
        ln_terms.push(ln);
    }
    let max = ln_terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = ln_terms.iter().map(|&v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Tsiper's Coulomb expression exactly as printed, before the
/// convention rescaling. Indices are canonicalized internally.
fn coulomb_closed_form_unscaled(i: usize, j: usize, k: usize, l: usize) -> f64 {
    if i + j != k + l {
        return 0.0;
    }
    let (i, j, k, l, _) = canonicalize_indices(i, j, k, l);
    let t = i - l;
    let s = i + j;
    let ln_pref = 0.5 * (ln_factorial(i) + ln_factorial(k) - ln_factorial(j) - ln_factorial(l))
        + log_gamma_half(2 * s + 3)
        - s as f64 * 2f64.ln();
    let p1 = ln_tsiper_sum(l, j, t, false) + ln_tsiper_sum(j, l, t, true);
    let p2 = ln_tsiper_sum(j, l, t, false) + ln_tsiper_sum(l, j, t, true);
    let hi = p1.max(p2);
    let lo = p1.min(p2);
    (ln_pref + hi + (1.0 + (lo - hi).exp()).ln()).exp()
}

/// Convention factor relating the printed closed form to the direct
/// integral over φ_l(z) = z^l e^{−|z|²/2}/√(π l!), calibrated once
/// against the quadrature oracle at (0,0,0,0).
pub fn coulomb_convention_scale() -> f64 {
    static SCALE: OnceLock<f64> = OnceLock::new();
    *SCALE.get_or_init(|| {
        let oracle = quadrature::quadrature_element(0, 0, 0, 0, Kernel::Coulomb, Orbitals::Analytic, 1e-10)
            .expect("calibration quadrature must converge");
        oracle.value / coulomb_closed_form_unscaled(0, 0, 0, 0)
    })
}

/// Coulomb element in the calibrated convention.
pub fn coulomb_element(i: usize, j: usize, k: usize, l: usize) -> f64 {
    coulomb_closed_form_unscaled(i, j, k, l) * coulomb_convention_scale()
}

/// Closed-form element of the given kind.
pub fn element(kind: InteractionKind, i: usize, j: usize, k: usize, l: usize) -> f64 {
    match kind {
        InteractionKind::Contact => contact_element(i, j, k, l),
        InteractionKind::Coulomb => coulomb_element(i, j, k, l),
    }
}

/// Precomputed table of U_{i,j,k,l} for all conserving tuples with
/// indices ≤ l_max, stored per pair momentum s as a dense (i,k) matrix
/// (j = s−i and l = s−k are implied). Reads are lock-free.
pub struct ElementTable {
    kind: InteractionKind,
    l_max: usize,
    per_s: Vec<SBlock>,
}

struct SBlock {
    i_min: usize,
    count: usize,
    vals: Vec<f64>,
}

impl ElementTable {
    /// Populate from the closed forms.
    pub fn build(kind: InteractionKind, l_max: usize) -> Self {
        Self::build_with(l_max, |i, j, k, l| element(kind, i, j, k, l), kind)
    }

    /// Populate from contact quadrature over numeric orbitals.
    pub fn build_numeric_contact(set: &crate::orbitals::OrbitalSet, l_max: usize) -> Result<Self> {
        if set.l_max() < l_max {
            return Err(Error::ElementTableGap {
                orbital: l_max,
                l_max: set.l_max(),
            });
        }
        let mut table = Self {
            kind: InteractionKind::Contact,
            l_max,
            per_s: Vec::with_capacity(2 * l_max + 1),
        };
        for s in 0..=(2 * l_max) {
            let i_min = s.saturating_sub(l_max);
            let i_max = s.min(l_max);
            let count = i_max - i_min + 1;
            let mut vals = vec![0.0; count * count];
            for i in i_min..=i_max {
                for k in i_min..=i_max {
                    if k < i {
                        continue;
                    }
                    let q = quadrature::quadrature_element(
                        i,
                        s - i,
                        k,
                        s - k,
                        Kernel::Contact,
                        Orbitals::Numeric(set),
                        1e-4,
                    )?;
                    vals[(i - i_min) * count + (k - i_min)] = q.value;
                    vals[(k - i_min) * count + (i - i_min)] = q.value;
                }
            }
            table.per_s.push(SBlock { i_min, count, vals });
        }
        Ok(table)
    }

    fn build_with<F: Fn(usize, usize, usize, usize) -> f64>(
        l_max: usize,
        f: F,
        kind: InteractionKind,
    ) -> Self {
        let mut per_s = Vec::with_capacity(2 * l_max + 1);
        for s in 0..=(2 * l_max) {
            let i_min = s.saturating_sub(l_max);
            let i_max = s.min(l_max);
            let count = i_max - i_min + 1;
            let mut vals = vec![0.0; count * count];
            for i in i_min..=i_max {
                for k in i..=i_max {
                    let v = f(i, s - i, k, s - k);
                    vals[(i - i_min) * count + (k - i_min)] = v;
                    vals[(k - i_min) * count + (i - i_min)] = v;
                }
            }
            per_s.push(SBlock { i_min, count, vals });
        }
        Self { kind, l_max, per_s }
    }

    pub fn kind(&self) -> InteractionKind {
        self.kind
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    /// U_{i,j,k,l}; zero when momentum conservation fails.
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        if i + j != k + l {
            return 0.0;
        }
        let s = i + j;
        debug_assert!(i <= self.l_max && j <= self.l_max && k <= self.l_max && l <= self.l_max);
        let block = &self.per_s[s];
        block.vals[(i - block.i_min) * block.count + (k - block.i_min)]
    }

    /// Golden-file dump: one `i,j,k,l,value` row per conserving tuple,
    /// 17 significant digits.
    pub fn dump_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "i,j,k,l,value")?;
        for (s, block) in self.per_s.iter().enumerate() {
            for i in block.i_min..(block.i_min + block.count) {
                for k in block.i_min..(block.i_min + block.count) {
                    let v = block.vals[(i - block.i_min) * block.count + (k - block.i_min)];
                    writeln!(out, "{},{},{},{},{:.16e}", i, s - i, k, s - k, v)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn contact_examples() {
        assert_eq!(contact_element(0, 0, 0, 0), 1.0);
        assert_eq!(contact_element(1, 0, 1, 0), 0.5);
        assert!((contact_element(2, 0, 1, 1) - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-15);
        assert_eq!(contact_element(1, 0, 0, 0), 0.0);
    }

    #[test]
    fn contact_log_space_branch_is_continuous() {
        // same tuple family across the s=30 switch
        for s in 28..=34usize {
            let direct = contact_element(s / 2, s - s / 2, s / 2, s - s / 2);
            let logged = (ln_factorial(s)
                - 0.5 * (ln_factorial(s / 2) * 2.0 + ln_factorial(s - s / 2) * 2.0)
                - s as f64 * 2f64.ln())
            .exp();
            assert!((direct - logged).abs() <= 1e-12 * logged);
        }
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(
            canonicalize_indices(0, 2, 1, 1),
            (1, 1, 2, 0, IndexSymmetry::Reversal)
        );
        assert_eq!(
            canonicalize_indices(1, 0, 1, 0),
            (1, 0, 1, 0, IndexSymmetry::Identity)
        );
        let (i, j, k, l, _) = canonicalize_indices(0, 3, 2, 1);
        assert!(i >= l);
        let orig = quadrature_element(0, 3, 2, 1, Kernel::Coulomb, Orbitals::Analytic, 1e-8)
            .unwrap()
            .value;
        assert!((coulomb_element(i, j, k, l) - orig).abs() < 1e-9 * orig.abs().max(1e-3));
    }

    #[test]
    fn coulomb_anchor_value() {
        // (0,0,0,0) in the dimensionless-orbital convention
        assert!((coulomb_element(0, 0, 0, 0) - (PI / 2.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn coulomb_convention_scale_is_recorded_constant() {
        // measured once: 1/(2 √2 π)
        let expected = 1.0 / (2.0 * 2f64.sqrt() * PI);
        assert!(
            (coulomb_convention_scale() - expected).abs() < 1e-12,
            "{} vs {expected}",
            coulomb_convention_scale()
        );
    }

    #[test]
    fn coulomb_ratio_to_quadrature_is_constant() {
        let mut ratios = Vec::new();
        for s in 0..=6usize {
            for i in 0..=s {
                for k in 0..=s {
                    let (j, l) = (s - i, s - k);
                    let oracle = quadrature_element(i, j, k, l, Kernel::Coulomb, Orbitals::Analytic, 1e-8)
                        .unwrap()
                        .value;
                    if oracle.abs() > 1e-12 {
                        ratios.push(coulomb_closed_form_unscaled(i, j, k, l) / oracle);
                    }
                }
            }
        }
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!((max - min) / min < 1e-5, "ratio spread {min}..{max}");
    }

    #[test]
    fn coulomb_stable_at_large_indices() {
        let v = coulomb_element(150, 10, 80, 80);
        assert!(v.is_finite() && v > 0.0);
        let d = coulomb_element(150, 150, 150, 150);
        assert!(d.is_finite() && d > 0.0);
    }

    #[test]
    fn diagonal_positivity() {
        for s in 0..=8usize {
            for i in 0..=s {
                let j = s - i;
                assert!(contact_element(i, j, j, i) > 0.0);
                assert!(coulomb_element(i, j, j, i) > 0.0);
            }
        }
    }

    #[test]
    fn table_matches_direct_evaluation() {
        for kind in [InteractionKind::Contact, InteractionKind::Coulomb] {
            let table = ElementTable::build(kind, 6);
            for s in 0..=12usize {
                for i in s.saturating_sub(6)..=s.min(6) {
                    for k in s.saturating_sub(6)..=s.min(6) {
                        let (j, l) = (s - i, s - k);
                        assert_eq!(table.get(i, j, k, l), element(kind, i, j, k, l));
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn four_fold_symmetry(s in 0usize..14, a in 0usize..14, b in 0usize..14) {
            let i = a.min(s);
            let k = b.min(s);
            let (j, l) = (s - i, s - k);
            for kind in [InteractionKind::Contact, InteractionKind::Coulomb] {
                let base = element(kind, i, j, k, l);
                for (p, q, r, t) in [(j, i, l, k), (l, k, j, i), (k, l, i, j)] {
                    let other = element(kind, p, q, r, t);
                    prop_assert!((base - other).abs() <= 1e-12 * base.abs().max(1.0));
                }
            }
        }

        #[test]
        fn conservation_enforced(i in 0usize..10, j in 0usize..10, k in 0usize..10, l in 0usize..10) {
            if i + j != k + l {
                prop_assert_eq!(contact_element(i, j, k, l), 0.0);
                prop_assert_eq!(coulomb_element(i, j, k, l), 0.0);
            }
        }
    }
}
