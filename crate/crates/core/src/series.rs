//! Cancellation-free kernels of the damped free-flight solution.
//!
//! Both closed forms and the oracle's decay integral are built from two
//! functions of the damping per flight θ = γt:
//!
//! * `damping_ratio(θ) = (1 − e^{−2θ})/θ`, which tends to 2 as θ → 0, and
//! * `spread_kernel(θ) = f(θ)/θ³` with `f(θ) = 4θ + 4e^{−2θ} − e^{−4θ} − 3`,
//!   which tends to 16/3.
//!
//! Realistic matter-wave setups have θ ≈ 1e-6 or smaller, where the textbook
//! forms lose every significant digit. Each function switches to its Taylor
//! series below a threshold chosen so that the two branches agree to better
//! than 1e-10 relative at the switch.

/// Below this θ, [`damping_ratio`] uses its Taylor series.
pub const DAMPING_SERIES_MAX: f64 = 1e-4;

/// Below this θ, [`spread_kernel`] uses its Taylor series.
///
/// The direct form carries a relative rounding error of roughly
/// `0.75·ε_mach/θ²`, so the switch must sit well above 1e-3.
pub const KERNEL_SERIES_MAX: f64 = 0.1;

const KERNEL_TERMS: usize = 24;

/// `(1 − e^{−2θ})/θ`, with the θ → 0 limit 2.
pub fn damping_ratio(theta: f64) -> f64 {
    if theta < DAMPING_SERIES_MAX {
        damping_ratio_series(theta)
    } else {
        damping_ratio_direct(theta)
    }
}

pub fn damping_ratio_direct(theta: f64) -> f64 {
    -(-2.0 * theta).exp_m1() / theta
}

pub fn damping_ratio_series(theta: f64) -> f64 {
    // Σ_{n≥1} (−1)^{n+1} 2^n θ^{n−1} / n!
    const C: [f64; 6] = [
        2.0,
        -2.0,
        4.0 / 3.0,
        -2.0 / 3.0,
        4.0 / 15.0,
        -4.0 / 45.0,
    ];
    C.iter().rev().fold(0.0, |acc, c| acc * theta + c)
}

/// `f(θ)/θ³` with `f(θ) = 4θ + 4e^{−2θ} − e^{−4θ} − 3`; θ → 0 limit 16/3.
pub fn spread_kernel(theta: f64) -> f64 {
    if theta < KERNEL_SERIES_MAX {
        spread_kernel_series(theta)
    } else {
        spread_kernel_direct(theta)
    }
}

pub fn spread_kernel_direct(theta: f64) -> f64 {
    // With a = e^{−2θ} − 1: f = 4θ + 2a − a².
    let a = (-2.0 * theta).exp_m1();
    (4.0 * theta + 2.0 * a - a * a) / (theta * theta * theta)
}

pub fn spread_kernel_series(theta: f64) -> f64 {
    // f(θ) = Σ_{n≥3} (−1)^n (4·2^n − 4^n) θ^n / n!
    let mut coeffs = [0.0; KERNEL_TERMS];
    let mut factorial = 6.0;
    let mut two_n = 8.0;
    let mut four_n = 64.0;
    for (i, c) in coeffs.iter_mut().enumerate() {
        let n = i + 3;
        if i > 0 {
            factorial *= n as f64;
            two_n *= 2.0;
            four_n *= 4.0;
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        *c = sign * (4.0 * two_n - four_n) / factorial;
    }
    coeffs.iter().rev().fold(0.0, |acc, c| acc * theta + c)
}
