//! Closed-form screen distributions.
//!
//! Both the exact (any damping) and the weak-coupling pattern share the same
//! shape: two spreading Gaussians at ±x₀ plus a cosine cross term whose
//! amplitude carries the decoherence,
//!
//! ```text
//! ρ(x) = 1/(√π Ω) · [ ½e^{−(x−x₀)²/Ω²} + ½e^{−(x+x₀)²/Ω²}
//!                     + e^{−(x²+x₀²)/Ω²} · C · cos(k x) ]
//! ```
//!
//! and differ only in how Ω, the coherence factor C and the fringe
//! wavenumber k depend on the dimensionless groups.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{
    DimensionlessGroups, PhysicalParams, Scenario, Warning, SPEED_OF_LIGHT, VACUUM_PERMITTIVITY,
};
use crate::profile::{validate_grid, PatternProfile, ProfileMeta, Source, Variant};
use crate::series::{damping_ratio, spread_kernel};

/// Reduced pattern assumes θ ≪ 1; warn above this.
pub const WEAK_COUPLING_THETA_MAX: f64 = 1e-2;
/// Reduced pattern assumes σ ≫ ε; warn below this ratio.
pub const SPREADING_RATIO_MIN: f64 = 10.0;

/// Coefficients of the exact screen distribution, in units of ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactPatternParams {
    /// Γ/ε².
    pub gamma_big: f64,
    /// Ω²/ε².
    pub omega_sq: f64,
    /// Coefficient of x/ε in the cosine.
    pub cos_coeff: f64,
}

impl ExactPatternParams {
    pub fn new(g: &DimensionlessGroups, variant: Variant) -> Self {
        // s = β(1 − e^{−2θ})/θ is the spread of the relative coordinate over
        // the flight; its square is the ballistic part of Ω².
        let s = g.beta * damping_ratio(g.theta);
        let kernel = g.kappa * spread_kernel(g.theta);
        let (gamma_big, omega_sq) = match variant {
            Variant::Published => {
                let gb = kernel / 16.0;
                (gb, 1.0 + s * s + gb)
            }
            Variant::Calibrated => {
                let gb = kernel / 8.0;
                (gb, 0.5 * (1.0 + s * s + gb))
            }
        };
        ExactPatternParams {
            gamma_big,
            omega_sq,
            cos_coeff: g.dtilde * s / omega_sq,
        }
    }

    /// Cross-term suppression e^{−Γx₀²/Ω²}.
    pub fn coherence(&self, dtilde: f64) -> f64 {
        let x0 = 0.5 * dtilde;
        (-self.gamma_big * x0 * x0 / self.omega_sq).exp()
    }
}

/// Two-packet interference law in scaled coordinates x̃ = x/ε.
#[derive(Debug, Clone, Copy)]
struct TwoPacket {
    width_sq: f64,
    half_sep: f64,
    coherence: f64,
    wavenumber: f64,
    unit: f64,
}

impl TwoPacket {
    fn intensity(&self, x: f64) -> f64 {
        let xt = x / self.unit;
        let w = self.width_sq;
        let x0 = self.half_sep;
        let norm = 1.0 / ((PI * w).sqrt() * self.unit);
        let left = (-(xt + x0) * (xt + x0) / w).exp();
        let right = (-(xt - x0) * (xt - x0) / w).exp();
        let cross = (-(xt * xt + x0 * x0) / w).exp() * self.coherence * (self.wavenumber * xt).cos();
        norm * (0.5 * right + 0.5 * left + cross)
    }

    fn sample(&self, grid: &[f64]) -> Result<Vec<f64>> {
        grid.iter()
            .map(|&x| {
                let v = self.intensity(x);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::Numerical(format!("non-finite intensity {v} at x = {x:e}")))
                }
            })
            .collect()
    }
}

/// Exact screen distribution at the flight time for full SI parameters.
pub fn pattern_exact(p: &PhysicalParams, grid: &[f64], variant: Variant) -> Result<PatternProfile> {
    let sc = Scenario::from_params(p)?;
    pattern_exact_for(&sc, grid, variant, p.warnings())
}

pub fn pattern_exact_for(
    sc: &Scenario,
    grid: &[f64],
    variant: Variant,
    warnings: Vec<Warning>,
) -> Result<PatternProfile> {
    validate_grid(grid)?;
    let g = &sc.groups;
    let c = ExactPatternParams::new(g, variant);
    let law = TwoPacket {
        width_sq: c.omega_sq,
        half_sep: 0.5 * g.dtilde,
        coherence: c.coherence(g.dtilde),
        wavenumber: c.cos_coeff,
        unit: sc.packet_width,
    };
    Ok(PatternProfile {
        positions: grid.to_vec(),
        intensities: law.sample(grid)?,
        meta: ProfileMeta {
            source: Source::Exact,
            variant: Some(variant),
            time_over_flight: 1.0,
            scenario: *sc,
            warnings,
            timestamp: None,
        },
    })
}

/// Decoherence factor of the weak-coupling pattern for a given t_L/τ_D:
/// `exp(−t_L/24τ_D)` as published, `exp(−t_L/12τ_D)` calibrated.
pub fn envelope_factor(t_ratio: f64, variant: Variant) -> Result<f64> {
    if !(t_ratio >= 0.0) {
        return Err(Error::param("t_ratio", t_ratio, "must be a non-negative number"));
    }
    Ok((-t_ratio / envelope_divisor(variant)).exp())
}

fn envelope_divisor(variant: Variant) -> f64 {
    match variant {
        Variant::Published => 24.0,
        Variant::Calibrated => 12.0,
    }
}

/// Squared envelope width of the weak-coupling pattern, in units of ε².
/// Published: σ² = (2β)²; calibrated: σ²/2.
pub fn weak_width_sq(g: &DimensionlessGroups, variant: Variant) -> f64 {
    let sigma_sq = 4.0 * g.beta * g.beta;
    match variant {
        Variant::Published => sigma_sq,
        Variant::Calibrated => 0.5 * sigma_sq,
    }
}

/// Fringe wavenumber of the weak-coupling pattern, per unit x/ε.
/// Published: πd/(λ_dL); calibrated: 2πd/(λ_dL).
pub fn weak_wavenumber(g: &DimensionlessGroups, variant: Variant) -> f64 {
    match variant {
        Variant::Published => g.dtilde / (2.0 * g.beta),
        Variant::Calibrated => g.dtilde / g.beta,
    }
}

pub fn weak_regime_warnings(sc: &Scenario) -> Vec<Warning> {
    let mut out = Vec::new();
    if sc.groups.theta > WEAK_COUPLING_THETA_MAX {
        out.push(Warning::StrongDamping {
            theta: sc.groups.theta,
            limit: WEAK_COUPLING_THETA_MAX,
        });
    }
    let ratio = 2.0 * sc.groups.beta;
    if ratio < SPREADING_RATIO_MIN {
        out.push(Warning::WeakSpreading {
            sigma_over_width: ratio,
            limit: SPREADING_RATIO_MIN,
        });
    }
    out
}

/// Weak-coupling, spreading-dominated screen distribution.
pub fn pattern_weak(p: &PhysicalParams, grid: &[f64], variant: Variant) -> Result<PatternProfile> {
    let sc = Scenario::from_params(p)?;
    pattern_weak_for(&sc, grid, variant, p.warnings())
}

pub fn pattern_weak_for(
    sc: &Scenario,
    grid: &[f64],
    variant: Variant,
    mut warnings: Vec<Warning>,
) -> Result<PatternProfile> {
    validate_grid(grid)?;
    let g = &sc.groups;
    warnings.extend(weak_regime_warnings(sc));
    let law = TwoPacket {
        width_sq: weak_width_sq(g, variant),
        half_sep: 0.5 * g.dtilde,
        coherence: envelope_factor(sc.t_ratio(), variant)?,
        wavenumber: weak_wavenumber(g, variant),
        unit: sc.packet_width,
    };
    Ok(PatternProfile {
        positions: grid.to_vec(),
        intensities: law.sample(grid)?,
        meta: ProfileMeta {
            source: Source::Weak,
            variant: Some(variant),
            time_over_flight: 1.0,
            scenario: *sc,
            warnings,
            timestamp: None,
        },
    })
}

/// Coupling rate of an electron beam passing a resistive plate,
/// `γ = e²ρ/(32π m z³)`, in Gaussian units: resistivity in s, mass in g,
/// distance in cm, charge in statcoulomb. Returns 1/s.
pub fn gamma_electron_plate_gaussian(
    resistivity_s: f64,
    mass_g: f64,
    distance_cm: f64,
    charge_statc: f64,
) -> Result<f64> {
    for (field, v) in [
        ("resistivity", resistivity_s),
        ("mass", mass_g),
        ("distance_z", distance_cm),
        ("charge", charge_statc),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::param(field, v, "must be strictly positive and finite"));
        }
    }
    Ok(charge_statc * charge_statc * resistivity_s / (32.0 * PI * mass_g * distance_cm.powi(3)))
}

/// SI front end for [`gamma_electron_plate_gaussian`]: resistivity in Ω·m,
/// mass in kg, distance in m, charge in C.
///
/// Converts every input to Gaussian units (q → q·10c, ρ → 4πϵ₀ρ) before
/// evaluating. The 4πϵ₀ factors cancel, so the result equals the same
/// expression evaluated directly in SI up to the CODATA value of μ₀.
pub fn gamma_electron_plate(
    resistivity_ohm_m: f64,
    mass_kg: f64,
    distance_m: f64,
    charge_c: f64,
) -> Result<f64> {
    gamma_electron_plate_gaussian(
        resistivity_ohm_m * 4.0 * PI * VACUUM_PERMITTIVITY,
        mass_kg * 1e3,
        distance_m * 1e2,
        charge_c * 10.0 * SPEED_OF_LIGHT,
    )
}
