#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;

/// |ψ(x, t)|² for two freely spreading Gaussians e^{−(x∓x₀)²/ε²}, computed
/// from the complex wave function rather than from any density-matrix route.
pub fn free_two_gaussian(x: f64, t: f64, hbar_over_m: f64, eps: f64, d: f64) -> f64 {
    let tau = Complex64::new(1.0, 2.0 * hbar_over_m * t / (eps * eps));
    let norm = (2.0 / PI).powf(0.25) / (2.0 * eps).sqrt();
    let x0 = 0.5 * d;
    let packet = |c: f64| (-(x - c) * (x - c) / (tau * eps * eps)).exp() / tau.sqrt();
    let psi = (packet(x0) + packet(-x0)) * norm;
    psi.norm_sqr()
}

/// Adaptive Simpson quadrature with a relative tolerance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        // Below ~100 ulp of the panel the difference is rounding noise.
        let noise = 1e-14 * (left.abs() + right.abs());
        if depth == 0 || delta.abs() <= (15.0 * tol).max(noise) {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    let tol = rel_tol * whole.abs().max(f64::MIN_POSITIVE);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, 40)
}

pub fn max_rel_dev(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs())) / scale
}
