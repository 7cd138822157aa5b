//! Semi-analytic solution of the high-temperature master equation
//!
//! ```text
//! ∂ρ/∂t = (iħ/2m)(∂²_x − ∂²_x′)ρ − γ(x − x′)(∂_x − ∂_x′)ρ − (D/4ħ²)(x − x′)²ρ
//! ```
//!
//! used as ground truth for the closed forms. In R = x + x′, r = x − x′ and
//! after a Fourier transform over R, ρ̃(k, r, t) = ∫ρ(R, r, t)e^{−ikR}dR
//! obeys the first-order equation
//!
//! ```text
//! ∂ρ̃/∂t = −(2ħk/m + 2γr) ∂ρ̃/∂r − (D r²/4ħ²) ρ̃
//! ```
//!
//! whose characteristics are known in closed form, so every (k, r, t) value
//! is exact and only the final inverse transform over k is numerical. The
//! derivation is written out in `docs/derivation.md`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{derive_scales, PhysicalParams, Scenario};
use crate::profile::{validate_grid, PatternProfile, ProfileMeta, Source};
use crate::series::{damping_ratio, spread_kernel};

/// Largest supported damping γt.
pub const THETA_MAX: f64 = 50.0;
/// Node doubling may change the profile by at most this fraction of its peak.
pub const CONVERGENCE_LIMIT: f64 = 1e-8;
/// Largest tolerated imaginary part of the inverse transform, relative to
/// the profile peak.
pub const IMAG_RESIDUE_LIMIT: f64 = 1e-10;
/// k_max·ε lower bound; the integrand decays at least as e^{−ε²k²/2}.
pub const MIN_K_MAX_WIDTHS: f64 = 10.0;

const DEFAULT_K_MAX_WIDTHS: f64 = 12.0;

/// Which packets the initial density matrix contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// Coherent superposition of both slit packets.
    #[default]
    BothSlits,
    /// Only the packet at −d/2, with the same prefactor.
    LeftSlit,
    /// Only the packet at +d/2, with the same prefactor.
    RightSlit,
}

/// Uniform trapezoid rule on [−k_max, k_max].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Truncation of the k integral, 1/m.
    pub k_max: f64,
    /// Node count, odd so that k = 0 is a node.
    pub k_points: usize,
}

impl OracleConfig {
    /// Smallest configuration meeting the invariants for screen half-span
    /// `x_max`.
    pub fn for_span(packet_width: f64, x_max: f64) -> Self {
        let k_max = DEFAULT_K_MAX_WIDTHS / packet_width;
        let h = max_spacing(x_max);
        let half = (k_max / h).ceil() as usize;
        OracleConfig {
            k_max,
            k_points: 2 * half.max(1) + 1,
        }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.k_max / (self.k_points - 1) as f64
    }

    /// Same interval, half the spacing.
    pub fn refined(&self) -> Self {
        OracleConfig {
            k_max: self.k_max,
            k_points: 2 * self.k_points - 1,
        }
    }

    pub fn validate(&self, packet_width: f64, x_max: f64) -> Result<()> {
        if !(self.k_max.is_finite() && self.k_max > 0.0) {
            return Err(Error::InvalidOracleConfig(format!("k_max = {} must be positive", self.k_max)));
        }
        if self.k_points < 3 || self.k_points & 1 == 0 {
            return Err(Error::InvalidOracleConfig(format!(
                "k_points = {} must be odd and at least 3",
                self.k_points
            )));
        }
        if self.k_max * packet_width < MIN_K_MAX_WIDTHS {
            return Err(Error::InvalidOracleConfig(format!(
                "k_max·ε = {:.3} is below {MIN_K_MAX_WIDTHS}",
                self.k_max * packet_width
            )));
        }
        let limit = max_spacing(x_max);
        if self.spacing() > limit * (1.0 + 1e-12) {
            return Err(Error::InvalidOracleConfig(format!(
                "k spacing {:.4e} exceeds {:.4e} needed to resolve e^(2ikx) up to |x| = {x_max:e}",
                self.spacing(),
                limit
            )));
        }
        Ok(())
    }

    fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = (self.k_points - 1) as f64;
        let h = self.spacing();
        (0..self.k_points).map(move |j| {
            let k = self.k_max * (2.0 * j as f64 - n) / n;
            let w = if j == 0 || j == self.k_points - 1 { 0.5 * h } else { h };
            (k, w)
        })
    }
}

fn max_spacing(x_max: f64) -> f64 {
    PI / (4.0 * x_max.max(f64::MIN_POSITIVE))
}

/// Coefficients of the transformed equation for one parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MasterEquation {
    hbar_over_m: f64,
    coupling_rate: f64,
    /// D/(4ħ²).
    decoherence: f64,
    packet_width: f64,
    slit_separation: f64,
    initial: InitialState,
}

impl MasterEquation {
    pub fn new(p: &PhysicalParams) -> Result<Self> {
        let s = derive_scales(p)?;
        Ok(MasterEquation {
            hbar_over_m: p.hbar / p.mass,
            coupling_rate: p.coupling_rate,
            decoherence: s.diffusion / (4.0 * p.hbar * p.hbar),
            packet_width: p.packet_width,
            slit_separation: p.slit_separation,
            initial: InitialState::BothSlits,
        })
    }

    pub fn with_initial(self, initial: InitialState) -> Self {
        MasterEquation { initial, ..self }
    }

    /// Fourier transform over R of the initial two-packet density matrix.
    ///
    /// Each of the four Gaussians transforms to √(2π)ε·e^{−ε²k²/2} times a
    /// phase (the R-displaced pair) or an r-profile (the r-displaced pair),
    /// and the √(2π)ε cancels the 1/√(2πε²) prefactor.
    pub fn initial_transform(&self, k: f64, r: f64) -> Complex64 {
        let eps = self.packet_width;
        let d = self.slit_separation;
        let two_eps2 = 2.0 * eps * eps;
        let base = (-eps * eps * k * k / 2.0).exp();
        let local = (-r * r / two_eps2).exp();
        let right = Complex64::from_polar(local, -k * d);
        let left = Complex64::from_polar(local, k * d);
        let cross = (-(r - d) * (r - d) / two_eps2).exp() + (-(r + d) * (r + d) / two_eps2).exp();
        let sum = match self.initial {
            InitialState::BothSlits => right + left + cross,
            InitialState::LeftSlit => left,
            InitialState::RightSlit => right,
        };
        sum * base
    }

    /// Drift velocity of the relative coordinate at γ = 0, v = 2ħk/m.
    fn drift(&self, k: f64) -> f64 {
        2.0 * self.hbar_over_m * k
    }

    fn check_time(&self, t: f64) -> Result<f64> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::param("t", t, "must be finite and non-negative"));
        }
        let theta = self.coupling_rate * t;
        if theta > THETA_MAX {
            return Err(Error::DampingTooStrong {
                theta,
                max: THETA_MAX,
            });
        }
        Ok(theta)
    }

    /// Relative coordinate on the characteristic through (r, t), a time `u`
    /// earlier: r(u) = r·e^{−2γu} − v·(1 − e^{−2γu})/(2γ).
    pub fn characteristic(&self, k: f64, r: f64, u: f64) -> f64 {
        let theta = self.coupling_rate * u;
        let decay = (-2.0 * theta).exp();
        r * decay - self.drift(k) * 0.5 * u * damping_ratio(theta)
    }

    /// ∫₀ᵗ r_char(s)² ds along the characteristic ending at (r, t).
    pub fn decay_integral(&self, k: f64, r: f64, t: f64) -> Result<f64> {
        let theta = self.check_time(t)?;
        Ok(self.decay_integral_unchecked(k, r, t, theta))
    }

    fn decay_integral_unchecked(&self, k: f64, r: f64, t: f64, theta: f64) -> f64 {
        let v = self.drift(k);
        // ∫e^{−4γu}, ∫e^{−2γu}H(u), ∫H(u)² over [0, t], H(u) = (1 − e^{−2γu})/2γ
        let a0 = 0.5 * t * damping_ratio(2.0 * theta);
        let h = 0.5 * damping_ratio(theta);
        let a1 = 0.5 * t * t * h * h;
        let a2 = t * t * t * spread_kernel(theta) / 16.0;
        r * r * a0 - 2.0 * r * v * a1 + v * v * a2
    }

    /// ρ̃(k, r, t) = ρ̃(k, r₀, 0)·exp(−(D/4ħ²)∫r_char²).
    pub fn evolve(&self, k: f64, r: f64, t: f64) -> Result<Complex64> {
        let theta = self.check_time(t)?;
        let r0 = self.characteristic(k, r, t);
        let integral = self.decay_integral_unchecked(k, r, t, theta);
        Ok(self.initial_transform(k, r0) * (-self.decoherence * integral).exp())
    }
}

pub fn initial_transform(p: &PhysicalParams, k: f64, r: f64) -> Result<Complex64> {
    Ok(MasterEquation::new(p)?.initial_transform(k, r))
}

pub fn evolve_point(p: &PhysicalParams, k: f64, r: f64, t: f64) -> Result<Complex64> {
    MasterEquation::new(p)?.evolve(k, r, t)
}

/// Tr ρ(t) = ρ̃(0, 0, t)/2. (0, 0) is a fixed point of the characteristic
/// flow with zero decay, so this is the initial trace 1 + e^{−d²/2ε²} for
/// every t, bit for bit.
pub fn trace(p: &PhysicalParams, t: f64) -> Result<f64> {
    Ok(0.5 * evolve_point(p, 0.0, 0.0, t)?.re)
}

/// Profile plus the diagnostics of the run that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRun {
    pub profile: PatternProfile,
    pub config: OracleConfig,
    /// max|I(2N−1 nodes) − I(N nodes)| / peak.
    pub doubling_change: f64,
    /// max|Im| / peak of the inverse transform at the reported resolution.
    pub imag_residue: f64,
}

/// Screen distribution ρ(x, x, t) = (1/2π)∫ρ̃(k, 0, t)e^{2ikx}dk.
pub fn diagonal_profile(
    p: &PhysicalParams,
    t: f64,
    grid: &[f64],
    cfg: &OracleConfig,
) -> Result<PatternProfile> {
    diagonal_profile_run(&MasterEquation::new(p)?, p, t, grid, cfg).map(|run| run.profile)
}

/// As [`diagonal_profile`], for an explicit (possibly single-slit) equation,
/// returning the convergence diagnostics.
pub fn diagonal_profile_run(
    eq: &MasterEquation,
    p: &PhysicalParams,
    t: f64,
    grid: &[f64],
    cfg: &OracleConfig,
) -> Result<OracleRun> {
    validate_grid(grid)?;
    eq.check_time(t)?;
    let x_max = grid.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    cfg.validate(p.packet_width, x_max)?;

    let (coarse, _) = invert(eq, t, grid, cfg)?;
    let fine_cfg = cfg.refined();
    let (fine, imag) = invert(eq, t, grid, &fine_cfg)?;

    let peak = fine.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if !(peak > 0.0 && peak.is_finite()) {
        return Err(Error::Numerical(format!("oracle profile has peak {peak}")));
    }
    let doubling_change = crate::profile::max_abs_difference(&coarse, &fine) / peak;
    if doubling_change > CONVERGENCE_LIMIT {
        return Err(Error::Convergence {
            change: doubling_change,
            limit: CONVERGENCE_LIMIT,
        });
    }
    let imag_residue = imag / peak;
    if imag_residue > IMAG_RESIDUE_LIMIT {
        return Err(Error::Numerical(format!(
            "inverse transform left an imaginary part of {imag_residue:.3e} of the peak"
        )));
    }

    let sc = Scenario::from_params(p)?;
    let flight = derive_scales(p)?.flight_time;
    Ok(OracleRun {
        profile: PatternProfile {
            positions: grid.to_vec(),
            intensities: fine,
            meta: ProfileMeta {
                source: Source::Oracle,
                variant: None,
                time_over_flight: t / flight,
                scenario: sc,
                warnings: p.warnings(),
                timestamp: None,
            },
        },
        config: fine_cfg,
        doubling_change,
        imag_residue,
    })
}

/// Returns the real parts and the largest |imaginary part|.
fn invert(eq: &MasterEquation, t: f64, grid: &[f64], cfg: &OracleConfig) -> Result<(Vec<f64>, f64)> {
    let nodes: Vec<(f64, f64)> = cfg.nodes().collect();
    let weighted: Vec<(f64, Complex64)> = nodes
        .par_iter()
        .map(|&(k, w)| eq.evolve(k, 0.0, t).map(|v| (k, v * w)))
        .collect::<Result<_>>()?;

    // Each x is an independent, sequential sum in node order, so the result
    // does not depend on the thread count.
    let sums: Vec<Complex64> = grid
        .par_iter()
        .map(|&x| {
            weighted.iter().fold(Complex64::new(0.0, 0.0), |acc, &(k, v)| {
                let (s, c) = (2.0 * k * x).sin_cos();
                acc + v * Complex64::new(c, s)
            }) / (2.0 * PI)
        })
        .collect();

    let mut re = Vec::with_capacity(sums.len());
    let mut imag = 0.0_f64;
    for (z, x) in sums.iter().zip(grid) {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Numerical(format!("non-finite oracle value at x = {x:e}")));
        }
        imag = imag.max(z.im.abs());
        re.push(z.re);
    }
    Ok((re, imag))
}
