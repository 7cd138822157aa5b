//! Physical description of a double-slit run and the scales derived from it.
//!
//! Inputs are SI. Every formula downstream is evaluated on the scale-free
//! [`DimensionlessGroups`] (plus the packet width as the length unit), since
//! raw SI products such as ħ² ≈ 1e-68 are numerically hostile.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s (CODATA 2018).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (exact).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Elementary charge, C (exact).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Electron mass, kg (CODATA 2018).
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
/// Vacuum permittivity, F/m (CODATA 2018).
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
/// Speed of light, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// SI description of the experiment after the slits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Particle mass m, kg.
    pub mass: f64,
    /// Center-to-center slit distance d, m. The packets start at ±d/2.
    pub slit_separation: f64,
    /// Gaussian width ε of each slit packet, m.
    pub packet_width: f64,
    /// de Broglie wavelength λ_d along the flight axis, m.
    pub de_broglie_wavelength: f64,
    /// Slit-to-screen distance L, m.
    pub path_length: f64,
    /// Environment relaxation rate γ, 1/s.
    pub coupling_rate: f64,
    /// Bath temperature T, K.
    pub temperature: f64,
    /// ħ, J·s. Only overridden for natural-unit runs.
    pub hbar: f64,
    /// k_B, J/K. Only overridden for natural-unit runs.
    pub boltzmann: f64,
}

/// The geometric subset of [`PhysicalParams`]; enough for the weak-coupling
/// pattern once the decoherence strength is given as t_L/τ_D.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlitGeometry {
    pub slit_separation: f64,
    pub packet_width: f64,
    pub de_broglie_wavelength: f64,
    pub path_length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedScales {
    /// t_L = m·L·λ_d/(2πħ), s.
    pub flight_time: f64,
    /// D = 2mγk_BT, kg²·m²/s³.
    pub diffusion: f64,
    /// τ_D = ħ²/(2mγk_BTd²), s; +∞ without coupling.
    pub decoherence_time: f64,
    /// σ = λ_d·L/(πε), m.
    pub envelope_width: f64,
    /// λ_d·L/d, m; +∞ for coincident slits.
    pub fringe_spacing: f64,
}

/// Scale-free re-expression of the run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessGroups {
    /// θ = γ·t_L, damping per flight.
    pub theta: f64,
    /// β = ħ·t_L/(m·ε²), quantum spreading per flight.
    pub beta: f64,
    /// κ = D·t_L³/(m²·ε²), decoherence strength.
    pub kappa: f64,
    /// d̃ = d/ε, slit separation in packet widths.
    pub dtilde: f64,
}

/// Non-fatal regime diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// d ≤ 2ε: the two packets are not initially resolvable.
    OverlappingPackets { slit_separation: f64, packet_width: f64 },
    /// θ above the weak-coupling bound used by the reduced pattern.
    StrongDamping { theta: f64, limit: f64 },
    /// σ/ε below the spreading-dominated bound used by the reduced pattern.
    WeakSpreading { sigma_over_width: f64, limit: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Warning::OverlappingPackets {
                slit_separation,
                packet_width,
            } => write!(
                f,
                "slit separation {slit_separation:e} m is not larger than twice the packet width {packet_width:e} m"
            ),
            Warning::StrongDamping { theta, limit } => write!(
                f,
                "damping per flight θ = {theta:e} exceeds the weak-coupling bound {limit:e}"
            ),
            Warning::WeakSpreading {
                sigma_over_width,
                limit,
            } => write!(
                f,
                "envelope width is only {sigma_over_width:.3} packet widths (reduced pattern assumes ≥ {limit})"
            ),
        }
    }
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::param(field, v, "must be finite"));
    }
    if v <= 0.0 {
        return Err(Error::param(field, v, "must be strictly positive"));
    }
    Ok(())
}

fn non_negative(field: &'static str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::param(field, v, "must be finite"));
    }
    if v < 0.0 {
        return Err(Error::param(field, v, "must not be negative"));
    }
    Ok(())
}

impl SlitGeometry {
    pub fn validate(&self) -> Result<()> {
        non_negative("slit_separation", self.slit_separation)?;
        positive("packet_width", self.packet_width)?;
        positive("de_broglie_wavelength", self.de_broglie_wavelength)?;
        positive("path_length", self.path_length)
    }

    /// Fresnel-type product ħt_L/m = λ_d·L/(2π), m².
    pub fn spreading_area(&self) -> f64 {
        self.de_broglie_wavelength * self.path_length / (2.0 * PI)
    }
}

impl PhysicalParams {
    /// SI parameters with CODATA constants.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        mass: f64,
        slit_separation: f64,
        packet_width: f64,
        de_broglie_wavelength: f64,
        path_length: f64,
        coupling_rate: f64,
        temperature: f64,
    ) -> Self {
        PhysicalParams {
            mass,
            slit_separation,
            packet_width,
            de_broglie_wavelength,
            path_length,
            coupling_rate,
            temperature,
            hbar: HBAR,
            boltzmann: BOLTZMANN,
        }
    }

    /// Natural units ħ = m = ε = k_B = 1 with L = 1, so that t_L = β.
    ///
    /// θ = 0 requires κ = 0 (no coupling, no diffusion); the temperature is
    /// then irrelevant and set to 1.
    pub fn natural(theta: f64, beta: f64, kappa: f64, dtilde: f64) -> Result<Self> {
        non_negative("theta", theta)?;
        positive("beta", beta)?;
        non_negative("kappa", kappa)?;
        non_negative("dtilde", dtilde)?;
        let t = beta;
        let gamma = theta / t;
        let diffusion = kappa / (t * t * t);
        let temperature = if theta == 0.0 {
            if kappa > 0.0 {
                return Err(Error::param(
                    "kappa",
                    kappa,
                    "decoherence without coupling (θ = 0) is only available in t_ratio mode",
                ));
            }
            1.0
        } else {
            diffusion / (2.0 * gamma)
        };
        let p = PhysicalParams {
            mass: 1.0,
            slit_separation: dtilde,
            packet_width: 1.0,
            de_broglie_wavelength: 2.0 * PI * beta,
            path_length: 1.0,
            coupling_rate: gamma,
            temperature,
            hbar: 1.0,
            boltzmann: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn geometry(&self) -> SlitGeometry {
        SlitGeometry {
            slit_separation: self.slit_separation,
            packet_width: self.packet_width,
            de_broglie_wavelength: self.de_broglie_wavelength,
            path_length: self.path_length,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("mass", self.mass)?;
        self.geometry().validate()?;
        non_negative("coupling_rate", self.coupling_rate)?;
        non_negative("temperature", self.temperature)?;
        positive("hbar", self.hbar)?;
        positive("boltzmann", self.boltzmann)
    }

    pub fn warnings(&self) -> Vec<Warning> {
        let mut out = Vec::new();
        if self.slit_separation <= 2.0 * self.packet_width {
            out.push(Warning::OverlappingPackets {
                slit_separation: self.slit_separation,
                packet_width: self.packet_width,
            });
        }
        out
    }

    /// Mean longitudinal momentum p₀ = 2πħ/λ_d.
    pub fn momentum(&self) -> f64 {
        2.0 * PI * self.hbar / self.de_broglie_wavelength
    }

    /// Returns a copy with the mass changed at fixed flight time (fixed
    /// longitudinal velocity), so λ_d scales as 1/m.
    pub fn with_mass_at_fixed_flight_time(&self, mass: f64) -> Self {
        PhysicalParams {
            mass,
            de_broglie_wavelength: self.de_broglie_wavelength * self.mass / mass,
            ..*self
        }
    }
}

pub fn derive_scales(p: &PhysicalParams) -> Result<DerivedScales> {
    p.validate()?;
    let flight_time = p.mass * p.path_length * p.de_broglie_wavelength / (2.0 * PI * p.hbar);
    let diffusion = 2.0 * p.mass * p.coupling_rate * p.boltzmann * p.temperature;
    let decoherence_time = if diffusion == 0.0 || p.slit_separation == 0.0 {
        f64::INFINITY
    } else {
        p.hbar * p.hbar / (diffusion * p.slit_separation * p.slit_separation)
    };
    let envelope_width = p.de_broglie_wavelength * p.path_length / (PI * p.packet_width);
    let fringe_spacing = if p.slit_separation == 0.0 {
        f64::INFINITY
    } else {
        p.de_broglie_wavelength * p.path_length / p.slit_separation
    };
    let s = DerivedScales {
        flight_time,
        diffusion,
        decoherence_time,
        envelope_width,
        fringe_spacing,
    };
    if !(flight_time.is_finite() && flight_time > 0.0) {
        return Err(Error::param("mass", p.mass, "flight time is not a positive finite number"));
    }
    if !(diffusion.is_finite() && envelope_width.is_finite() && envelope_width > 0.0) {
        return Err(Error::Numerical(format!("derived scales out of range: {s:?}")));
    }
    Ok(s)
}

pub fn dimensionless(p: &PhysicalParams, s: &DerivedScales) -> Result<DimensionlessGroups> {
    let t = s.flight_time;
    let eps2 = p.packet_width * p.packet_width;
    let g = DimensionlessGroups {
        theta: p.coupling_rate * t,
        beta: p.hbar * t / (p.mass * eps2),
        // D t³/(m² ε²) with one mass cancelled against D = 2mγk_BT.
        kappa: 2.0 * p.coupling_rate * p.boltzmann * p.temperature * t * t * t / (p.mass * eps2),
        dtilde: p.slit_separation / p.packet_width,
    };
    let ok = [g.theta, g.beta, g.kappa, g.dtilde]
        .iter()
        .all(|v| v.is_finite() && *v >= 0.0);
    if !ok {
        return Err(Error::Numerical(format!("dimensionless groups out of range: {g:?}")));
    }
    Ok(g)
}

/// What every closed-form evaluation needs: the length unit ε and the
/// dimensionless groups.
///
/// Built either from full SI parameters or from the geometry plus the ratio
/// t_L/τ_D; the latter is the weak-coupling limit θ → 0 at fixed t_L/τ_D.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub packet_width: f64,
    pub groups: DimensionlessGroups,
}

impl Scenario {
    pub fn from_params(p: &PhysicalParams) -> Result<Self> {
        let s = derive_scales(p)?;
        Ok(Scenario {
            packet_width: p.packet_width,
            groups: dimensionless(p, &s)?,
        })
    }

    pub fn from_ratio(geometry: &SlitGeometry, t_ratio: f64) -> Result<Self> {
        geometry.validate()?;
        non_negative("t_ratio", t_ratio)?;
        let eps = geometry.packet_width;
        let beta = geometry.spreading_area() / (eps * eps);
        let dtilde = geometry.slit_separation / eps;
        // t_L/τ_D = κ d̃²/β²; κ is undetermined for coincident slits.
        let kappa = if dtilde == 0.0 {
            0.0
        } else {
            t_ratio * beta * beta / (dtilde * dtilde)
        };
        if !(beta.is_finite() && kappa.is_finite()) {
            return Err(Error::Numerical(format!(
                "geometry gives non-finite groups: β = {beta}, κ = {kappa}"
            )));
        }
        Ok(Scenario {
            packet_width: eps,
            groups: DimensionlessGroups {
                theta: 0.0,
                beta,
                kappa,
                dtilde,
            },
        })
    }

    /// t_L/τ_D = κ·d̃²/β².
    pub fn t_ratio(&self) -> f64 {
        let g = &self.groups;
        g.kappa * g.dtilde * g.dtilde / (g.beta * g.beta)
    }

    /// σ = λ_d·L/(πε) = 2βε.
    pub fn envelope_width(&self) -> f64 {
        2.0 * self.groups.beta * self.packet_width
    }

    /// λ_d·L/d = 2πβε/d̃.
    pub fn fringe_spacing(&self) -> f64 {
        2.0 * PI * self.groups.beta * self.packet_width / self.groups.dtilde
    }

    /// x₀ = d/2.
    pub fn half_separation(&self) -> f64 {
        0.5 * self.groups.dtilde * self.packet_width
    }
}
