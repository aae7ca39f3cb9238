//! Numerical interaction-element oracle: radial Gauss–Laguerre rules for
//! analytic lowest-Landau-level orbitals, Simpson integration on the
//! Numerov grid for numeric ones, and a center/relative-coordinate
//! decomposition for the Coulomb double integral (the 1/|z₁−z₂|
//! singularity is absorbed into one-dimensional relative-radius
//! integrals).
//!
//! Values are reported in the convention of the closed-form contact
//! element (the raw 2D contact integral times 2π).

use crate::error::{Error, Result};
use crate::math::ln_factorial;
use crate::orbitals::{simpson, OrbitalSet};
use nalgebra::DMatrix;
use std::f64::consts::PI;

/// Interaction kernel of the two-body integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    Contact,
    Coulomb,
}

/// Which single-particle orbitals enter the integral.
#[derive(Clone, Copy)]
pub enum Orbitals<'a> {
    /// φ_l(z) = z^l e^{−|z|²/2} / √(π l!).
    Analytic,
    /// Numerov-solved radial profiles.
    Numeric(&'a OrbitalSet),
}

/// Quadrature output: convention value, raw 2D integral, and a
/// node-doubling (or grid-coarsening) error estimate.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureValue {
    pub value: f64,
    pub raw: f64,
    pub error_estimate: f64,
}

/// Nodes and weights of the generalized Gauss–Laguerre rule
/// ∫₀^∞ t^α e^{−t} f(t) dt ≈ Σ w_i f(t_i), by Golub–Welsch.
pub fn gauss_laguerre(n: usize, alpha: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1 && alpha > -1.0);
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        jac[(k, k)] = 2.0 * k as f64 + 1.0 + alpha;
        if k > 0 {
            let b = (k as f64 * (k as f64 + alpha)).sqrt();
            jac[(k, k - 1)] = b;
            jac[(k - 1, k)] = b;
        }
    }
    let eig = jac.symmetric_eigen();
    let mu0 = gamma_alpha_plus_one(alpha);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let node = eig.eigenvalues[i];
            let first = eig.eigenvectors[(0, i)];
            (node, mu0 * first * first)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

/// Γ(α+1) for the α used by the rules here (integers and half-integers).
fn gamma_alpha_plus_one(alpha: f64) -> f64 {
    let two = (2.0 * (alpha + 1.0)).round() as i64;
    assert!(
        ((2.0 * (alpha + 1.0)) - two as f64).abs() < 1e-12 && two >= 1,
        "unsupported Gauss-Laguerre alpha {alpha}"
    );
    crate::math::ln_gamma_int_or_half(two as usize).exp()
}

/// ln R_l(r) for the analytic orbital (R_l > 0 everywhere).
fn ln_radial_analytic(l: usize, r: f64) -> f64 {
    l as f64 * r.ln() - 0.5 * r * r - 0.5 * (PI.ln() + ln_factorial(l))
}

/// Two-body interaction element by quadrature.
///
/// Contact with analytic orbitals reduces to a single radial integral,
/// done with the Gaussian-weight Laguerre rule in t = 2r². Coulomb with
/// analytic orbitals goes through center/relative coordinates. Contact
/// with numeric orbitals is Simpson on the Numerov grid. The error
/// estimate comes from doubling the node count (halving the grid).
pub fn quadrature_element(
    i: usize,
    j: usize,
    k: usize,
    l: usize,
    kernel: Kernel,
    orbitals: Orbitals<'_>,
    tolerance: f64,
) -> Result<QuadratureValue> {
    if i + j != k + l {
        return Ok(QuadratureValue {
            value: 0.0,
            raw: 0.0,
            error_estimate: 0.0,
        });
    }
    let out = match (kernel, orbitals) {
        (Kernel::Contact, Orbitals::Analytic) => contact_analytic(i, j, k, l),
        (Kernel::Contact, Orbitals::Numeric(set)) => contact_numeric(i, j, k, l, set)?,
        (Kernel::Coulomb, Orbitals::Analytic) => coulomb_analytic(i, j, k, l)?,
        (Kernel::Coulomb, Orbitals::Numeric(_)) => {
            return Err(Error::Unsupported(
                "Coulomb quadrature over numeric orbitals is not provided; \
                 the anharmonic pipeline is contact-only"
                    .into(),
            ))
        }
    };
    if out.error_estimate > tolerance * out.value.abs().max(1e-300) {
        return Err(Error::QuadratureNotConverged {
            estimate: out.error_estimate,
            tolerance,
        });
    }
    Ok(out)
}

/// Raw 2D contact integral 2π ∫ R_i R_j R_k R_l r dr via Laguerre nodes
/// in t = 2r²; the integrand's Gaussian e^{−2r²} is the rule's weight.
fn contact_analytic(i: usize, j: usize, k: usize, l: usize) -> QuadratureValue {
    let s = i + j;
    let eval = |n: usize| -> f64 {
        let (nodes, weights) = gauss_laguerre(n, 0.0);
        let mut acc = 0.0;
        for (&t, &w) in nodes.iter().zip(&weights) {
            let r = (t / 2.0).sqrt();
            let ln_h = ln_radial_analytic(i, r)
                + ln_radial_analytic(j, r)
                + ln_radial_analytic(k, r)
                + ln_radial_analytic(l, r)
                + r.ln()
                + t
                - (4.0 * r).ln();
            acc += w * ln_h.exp();
        }
        2.0 * PI * acc
    };
    let n = s.max(16) + 4;
    let coarse = eval(n);
    let fine = eval(2 * n);
    QuadratureValue {
        value: 2.0 * PI * fine,
        raw: fine,
        error_estimate: 2.0 * PI * (fine - coarse).abs(),
    }
}

fn contact_numeric(i: usize, j: usize, k: usize, l: usize, set: &OrbitalSet) -> Result<QuadratureValue> {
    let l_max = set.l_max();
    for idx in [i, j, k, l] {
        if idx > l_max {
            return Err(Error::ElementTableGap {
                orbital: idx,
                l_max,
            });
        }
    }
    // integrand R_i R_j R_k R_l r = u_i u_j u_k u_l / r
    let n = set.grid_len();
    let mut vals = Vec::with_capacity(n);
    for p in 0..n {
        let prod = set.orbital(i).u[p] * set.orbital(j).u[p] * set.orbital(k).u[p]
            * set.orbital(l).u[p];
        vals.push(prod / set.r_at(p));
    }
    let h = set.trap.step;
    let full = simpson(&vals, h);
    let coarse_vals: Vec<f64> = vals.iter().step_by(2).copied().collect();
    let coarse = simpson(&coarse_vals, 2.0 * h);
    let raw = 2.0 * PI * full;
    Ok(QuadratureValue {
        value: 2.0 * PI * raw,
        raw,
        error_estimate: (2.0 * PI) * (2.0 * PI) * (full - coarse).abs(),
    })
}

/// Exact integer Σ_{p+q=M} C(a,p) C(b,q) (−1)^{b−q}, the change-of-basis
/// coefficient between z₁^a z₂^b and center/relative monomials.
fn pair_rotation_sum(a: usize, b: usize, cap_m: usize) -> Vec<i128> {
    let mut out = vec![0i128; cap_m + 1];
    let binom = |n: usize, r: usize| -> i128 {
        let mut v: i128 = 1;
        for t in 0..r {
            v = v * (n - t) as i128 / (t + 1) as i128;
        }
        v
    };
    for (m_total, item) in out.iter_mut().enumerate() {
        let mut acc: i128 = 0;
        for p in m_total.saturating_sub(b)..=m_total.min(a) {
            let q = m_total - p;
            let sign = if (b - q) % 2 == 0 { 1 } else { -1 };
            acc += sign * binom(a, p) * binom(b, q);
        }
        *item = acc;
    }
    out
}

/// c_m coefficients of φ_a(z₁) φ_b(z₂) over |M⟩_Z |m⟩_u with
/// Z = (z₁+z₂)/√2, u = (z₁−z₂)/√2; index by relative degree m.
fn center_relative_coefficients(a: usize, b: usize) -> Vec<f64> {
    let s = a + b;
    let sums = pair_rotation_sum(a, b, s);
    let mut out = vec![0.0; s + 1];
    for (m, item) in out.iter_mut().enumerate() {
        let cap_m = s - m;
        let ln_mag = 0.5 * (ln_factorial(cap_m) + ln_factorial(m) - ln_factorial(a) - ln_factorial(b))
            - 0.5 * s as f64 * 2f64.ln();
        *item = sums[cap_m] as f64 * ln_mag.exp();
    }
    out
}

/// Coulomb element via U = Σ_m c_m(i,j) c_m(l,k) V_m with the relative
/// integrals V_m = (1/√2) (1/m!) ∫ t^{m−1/2} e^{−t} dt done numerically.
fn coulomb_analytic(i: usize, j: usize, k: usize, l: usize) -> Result<QuadratureValue> {
    let s = i + j;
    if s > 60 {
        return Err(Error::Unsupported(
            "Coulomb quadrature oracle capped at i+j <= 60 (exact integer coefficients)".into(),
        ));
    }
    let bra = center_relative_coefficients(i, j);
    let ket = center_relative_coefficients(l, k);
    let eval = |n: usize| -> f64 {
        let (nodes, weights) = gauss_laguerre(n, -0.5);
        let mut total = 0.0;
        for m in 0..=s {
            let w_mm = bra[m] * ket[m];
            if w_mm == 0.0 {
                continue;
            }
            let mut integral = 0.0;
            for (&t, &w) in nodes.iter().zip(&weights) {
                integral += w * (m as f64 * t.ln() - ln_factorial(m)).exp();
            }
            total += w_mm * integral / 2f64.sqrt();
        }
        total
    };
    let n = s.max(16) + 4;
    let coarse = eval(n);
    let fine = eval(2 * n);
    Ok(QuadratureValue {
        value: fine,
        raw: fine,
        error_estimate: (fine - coarse).abs(),
    })
}
