//! Fringe visibility V = (I_max − I_min)/(I_max + I_min), from the reduced
//! closed form and measured on a sampled profile.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::closedform::{envelope_factor, weak_wavenumber, weak_width_sq};
use crate::error::{Error, Result};
use crate::params::{PhysicalParams, Scenario};
use crate::profile::{PatternProfile, Variant};

/// Contrast below which a fringe is indistinguishable from rounding noise.
pub const NO_FRINGE_CONTRAST: f64 = 1e-12;

/// Minimum samples between a maximum and its neighbouring minimum
/// (half a fringe), i.e. 8 samples per fringe.
pub const MIN_HALF_FRINGE_SAMPLES: usize = 4;

/// Visibility of the fringe centred at `fringe_center` (m) in the
/// flat-background approximation: envelope / cosh(2 x_n x₀ / w²), with w
/// the reduced pattern's envelope width.
pub fn visibility_formula(p: &PhysicalParams, fringe_center: f64, variant: Variant) -> Result<f64> {
    visibility_formula_for(&Scenario::from_params(p)?, fringe_center, variant)
}

pub fn visibility_formula_for(sc: &Scenario, fringe_center: f64, variant: Variant) -> Result<f64> {
    if !fringe_center.is_finite() {
        return Err(Error::param("fringe_center", fringe_center, "must be finite"));
    }
    let env = envelope_factor(sc.t_ratio(), variant)?;
    let w_sq = weak_width_sq(&sc.groups, variant) * sc.packet_width * sc.packet_width;
    let arg = 2.0 * fringe_center * sc.half_separation() / w_sq;
    Ok(env / arg.cosh())
}

/// Position of the n-th bright fringe of the reduced pattern, m.
pub fn fringe_center(sc: &Scenario, index: i64, variant: Variant) -> f64 {
    index as f64 * fringe_period(sc, variant)
}

/// Distance between neighbouring maxima of the reduced pattern, m.
pub fn fringe_period(sc: &Scenario, variant: Variant) -> f64 {
    2.0 * PI * sc.packet_width / weak_wavenumber(&sc.groups, variant)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FringeReading {
    Fringe {
        visibility: f64,
        max_position: f64,
        min_position: f64,
        max_intensity: f64,
        min_intensity: f64,
    },
    NoFringe,
}

impl FringeReading {
    pub fn visibility(&self) -> Option<f64> {
        match *self {
            FringeReading::Fringe { visibility, .. } => Some(visibility),
            FringeReading::NoFringe => None,
        }
    }
}

/// Measures the contrast of the `fringe_index`-th bright fringe, counted
/// from the maximum nearest x = 0 (negative indices to the left).
///
/// The maximum is paired with the adjacent minimum on its outer side (the
/// right-hand one for the central fringe). Both extrema are refined by a
/// three-point parabola through the samples around them.
pub fn visibility_numeric(profile: &PatternProfile, fringe_index: i64) -> Result<FringeReading> {
    let x = &profile.positions;
    let y = &profile.intensities;
    if x.len() != y.len() {
        return Err(Error::Profile("positions and intensities differ in length".into()));
    }
    if x.len() < 3 {
        return Err(Error::Profile("need at least 3 samples".into()));
    }

    let maxima: Vec<usize> = (1..y.len() - 1)
        .filter(|&i| y[i] > y[i - 1] && y[i] >= y[i + 1])
        .collect();
    let minima: Vec<usize> = (1..y.len() - 1)
        .filter(|&i| y[i] < y[i - 1] && y[i] <= y[i + 1])
        .collect();
    let Some(central) = maxima
        .iter()
        .enumerate()
        .min_by(|a, b| x[*a.1].abs().total_cmp(&x[*b.1].abs()))
        .map(|(j, _)| j as i64)
    else {
        return Ok(FringeReading::NoFringe);
    };

    let target = central + fringe_index;
    if target < 0 || target >= maxima.len() as i64 {
        return Ok(FringeReading::NoFringe);
    }
    let i_max = maxima[target as usize];
    let outward_right = if fringe_index == 0 { true } else { fringe_index > 0 };
    let i_min = if outward_right {
        minima.iter().copied().find(|&i| i > i_max)
    } else {
        minima.iter().rev().copied().find(|&i| i < i_max)
    };
    let Some(i_min) = i_min else {
        return Ok(FringeReading::NoFringe);
    };

    let (max_position, max_intensity) = parabolic_vertex(x, y, i_max);
    let (min_position, min_intensity) = parabolic_vertex(x, y, i_min);
    let sum = max_intensity + min_intensity;
    if !(sum > 0.0) {
        return Ok(FringeReading::NoFringe);
    }
    let visibility = (max_intensity - min_intensity) / sum;
    if !(visibility > NO_FRINGE_CONTRAST) {
        return Ok(FringeReading::NoFringe);
    }
    if i_max.abs_diff(i_min) < MIN_HALF_FRINGE_SAMPLES {
        return Err(Error::Profile(format!(
            "fringe under-resolved: only {} samples between maximum and minimum (need {})",
            i_max.abs_diff(i_min),
            MIN_HALF_FRINGE_SAMPLES
        )));
    }
    Ok(FringeReading::Fringe {
        visibility,
        max_position,
        min_position,
        max_intensity,
        min_intensity,
    })
}

/// Vertex of the parabola through samples i−1, i, i+1, clamped to that
/// bracket.
fn parabolic_vertex(x: &[f64], y: &[f64], i: usize) -> (f64, f64) {
    let (u0, u2) = (x[i - 1] - x[i], x[i + 1] - x[i]);
    let (d0, d2) = (y[i - 1] - y[i], y[i + 1] - y[i]);
    // y(u) = y_i + b·u + a·u²
    let det = u0 * u2 * (u2 - u0);
    let a = (d2 * u0 - d0 * u2) / det;
    let b = (d0 * u2 * u2 - d2 * u0 * u0) / det;
    if a == 0.0 || !a.is_finite() {
        return (x[i], y[i]);
    }
    let u = (-b / (2.0 * a)).clamp(u0, u2);
    (x[i] + u, y[i] + b * u + a * u * u)
}
