use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{Scenario, Warning};

/// Which model produced a profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Exact,
    Weak,
    Oracle,
}

impl Source {
    pub fn as_str(&self) -> &'static str {
        match self {
            Source::Exact => "exact",
            Source::Weak => "weak",
            Source::Oracle => "oracle",
        }
    }
}

/// Constant convention for the closed forms.
///
/// `Published` evaluates the printed formulas verbatim. `Calibrated` uses the
/// constants that reproduce the characteristics solution of the master
/// equation (see `docs/derivation.md`): at fixed groups it has half the
/// squared width, twice the Γ term, and in the weak-coupling limit the
/// envelope `exp(−t_L/12τ_D)` with fringe period λ_d·L/d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Published,
    #[default]
    Calibrated,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::Published, Variant::Calibrated];

    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Published => "published",
            Variant::Calibrated => "calibrated",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "published" => Ok(Variant::Published),
            "calibrated" => Ok(Variant::Calibrated),
            other => Err(format!("unknown variant `{other}` (expected published|calibrated)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileMeta {
    pub source: Source,
    /// Closed-form constant convention; `None` for oracle profiles.
    pub variant: Option<Variant>,
    /// Evolution time the profile describes, in units of the flight time.
    pub time_over_flight: f64,
    pub scenario: Scenario,
    pub warnings: Vec<Warning>,
    /// Set by writers, never by the pure evaluators.
    pub timestamp: Option<String>,
}

/// Sampled screen intensity ρ(x, x, t) on a position grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternProfile {
    /// Screen coordinates, m, strictly increasing.
    pub positions: Vec<f64>,
    /// Probability density, 1/m.
    pub intensities: Vec<f64>,
    pub meta: ProfileMeta,
}

impl PatternProfile {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn max_intensity(&self) -> f64 {
        self.intensities.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Trapezoid rule over the sampled grid.
    pub fn integral(&self) -> f64 {
        self.positions
            .windows(2)
            .zip(self.intensities.windows(2))
            .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
            .sum()
    }

    /// `max|self − reference| / max|reference|` on a shared grid.
    pub fn max_relative_deviation(&self, reference: &PatternProfile) -> Result<f64> {
        if self.positions != reference.positions {
            return Err(Error::Profile("profiles are sampled on different grids".into()));
        }
        let scale = reference
            .intensities
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        Ok(max_abs_difference(&self.intensities, &reference.intensities) / scale)
    }

    /// Grid index of the largest intensity.
    pub fn argmax(&self) -> Option<usize> {
        self.intensities
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
    }
}

pub(crate) fn max_abs_difference(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

/// `points` samples symmetric about 0 on `[−span, span]`.
///
/// Mirror points are exact negatives of each other, so even patterns
/// evaluate identically on both sides.
pub fn symmetric_grid(span: f64, points: usize) -> Result<Vec<f64>> {
    if !(span.is_finite() && span > 0.0) {
        return Err(Error::InvalidGrid(format!("span must be positive and finite, got {span}")));
    }
    if points < 2 {
        return Err(Error::InvalidGrid(format!("need at least 2 points, got {points}")));
    }
    let n = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let k = 2.0 * i as f64 - n;
            span * k / n
        })
        .collect())
}

pub(crate) fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("grid is empty".into()));
    }
    if let Some(x) = grid.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidGrid(format!("non-finite position {x}")));
    }
    if let Some(i) = grid.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(format!(
            "positions must be strictly increasing (index {} → {})",
            i,
            i + 1
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_grid_mirrors_exactly() {
        let g = symmetric_grid(3.7e-6, 4096).unwrap();
        assert_eq!(g.len(), 4096);
        assert_eq!(g[0], -3.7e-6);
        assert_eq!(g[4095], 3.7e-6);
        for i in 0..g.len() {
            assert_eq!(g[i], -g[g.len() - 1 - i]);
        }
        let odd = symmetric_grid(1.0, 5).unwrap();
        assert_eq!(odd, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn grid_validation() {
        assert!(validate_grid(&[0.0, 1.0, 2.0]).is_ok());
        assert!(validate_grid(&[]).is_err());
        assert!(validate_grid(&[0.0, 0.0]).is_err());
        assert!(validate_grid(&[1.0, 0.0]).is_err());
        assert!(validate_grid(&[0.0, f64::NAN]).is_err());
        assert!(symmetric_grid(0.0, 10).is_err());
        assert!(symmetric_grid(1.0, 1).is_err());
    }

    #[test]
    fn variant_parsing() {
        assert_eq!("published".parse::<Variant>().unwrap(), Variant::Published);
        assert_eq!("calibrated".parse::<Variant>().unwrap(), Variant::Calibrated);
        assert!("exact".parse::<Variant>().is_err());
        assert_eq!(Variant::default(), Variant::Calibrated);
    }
}
