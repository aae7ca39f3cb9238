//! Log-space factorial/Gamma arithmetic shared by the matrix-element and
//! trial-state code. Only integer and half-integer Gamma arguments occur in
//! this crate, so everything reduces to exact recurrences.

/// ln(n!) via a cached table extended on demand.
pub fn ln_factorial(n: usize) -> f64 {
    use std::sync::OnceLock;
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    const CAP: usize = 4096;
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(CAP + 1);
        t.push(0.0);
        for k in 1..=CAP {
            t.push(t[k - 1] + (k as f64).ln());
        }
        t
    });
    assert!(n <= CAP, "ln_factorial argument {n} above table cap");
    table[n]
}

/// ln Γ(n + 1/2) for the half-integer (2n+1)/2, by the exact recurrence
/// from Γ(1/2) = √π. The argument is the odd numerator 2n+1.
pub fn log_gamma_half(odd_numerator: usize) -> f64 {
    use std::sync::OnceLock;
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    const CAP: usize = 4096;
    assert!(odd_numerator % 2 == 1, "argument must be an odd numerator");
    let n = (odd_numerator - 1) / 2; // Γ((2n+1)/2)
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(CAP + 1);
        t.push(0.5 * std::f64::consts::PI.ln());
        let mut x = 0.5f64;
        for k in 1..=CAP {
            t.push(t[k - 1] + x.ln());
            x += 1.0;
        }
        t
    });
    assert!(n <= CAP, "log_gamma_half argument {odd_numerator} above table cap");
    table[n]
}

/// ln Γ(x) where x is a positive integer or half-integer.
pub fn ln_gamma_int_or_half(two_x: usize) -> f64 {
    assert!(two_x >= 1);
    if two_x % 2 == 0 {
        ln_factorial(two_x / 2 - 1)
    } else {
        log_gamma_half(two_x)
    }
}

/// ln C(n, k).
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}
