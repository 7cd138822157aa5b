//! Run configuration: a flat TOML table with unit-suffixed keys.
//!
//! Exactly one input mode must be present:
//!
//! * SI: `mass_kg`, `slit_separation_m`, `packet_width_m`,
//!   `de_broglie_wavelength_m`, `path_length_m`, `coupling_rate_per_s`,
//!   `temperature_K`;
//! * ratio: the four geometry keys plus `t_ratio` (t_L/τ_D);
//! * natural: `theta`, `beta`, `kappa`, `dtilde` (ħ = m = ε = 1).
//!
//! Positions are in metres for SI and ratio inputs and in packet widths for
//! natural inputs, which is why the span key differs (`grid_span_m` against
//! `grid_span_eps`).

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use decohere_core::{
    derive_scales, fringe_period, DerivedScales, DimensionlessGroups, PhysicalParams, Scenario,
    SlitGeometry, Variant,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const DEFAULT_GRID_POINTS: usize = 4096;
pub const MIN_GRID_POINTS: usize = 16;
/// Default half-span in envelope widths beyond the slit offset.
pub const DEFAULT_SPAN_WIDTHS: f64 = 4.0;
/// Default visibility window beyond the outermost requested fringe, in
/// fringe periods.
pub const DEFAULT_SPAN_FRINGES: f64 = 4.0;

/// Which closed form `pattern`, `visibility` and `sweep` evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    #[default]
    Exact,
    Weak,
}

impl FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Model::Exact),
            "weak" => Ok(Model::Weak),
            other => Err(format!("unknown model `{other}` (expected exact|weak)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Mass,
    Temperature,
    CouplingRate,
    SlitSeparation,
    TRatio,
}

impl SweepParam {
    /// CSV column name, with the unit of the swept values.
    pub fn column(&self) -> &'static str {
        match self {
            SweepParam::Mass => "mass_kg",
            SweepParam::Temperature => "temperature_K",
            SweepParam::CouplingRate => "coupling_rate_per_s",
            SweepParam::SlitSeparation => "slit_separation_m",
            SweepParam::TRatio => "t_ratio",
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.column())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepOutput {
    /// One CSV row per point: swept values and visibilities.
    #[default]
    Visibility,
    /// One profile CSV per point plus an index table.
    Profiles,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass_kg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slit_separation_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub packet_width_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub de_broglie_wavelength_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path_length_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_rate_per_s: Option<f64>,
    #[serde(
        default,
        rename = "temperature_K",
        skip_serializing_if = "Option::is_none"
    )]
    pub temperature_k: Option<f64>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_ratio: Option<f64>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dtilde: Option<f64>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_span_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_span_eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<Model>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fringe_indices: Option<Vec<i64>>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_params: Option<Vec<SweepParam>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_values: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_output: Option<SweepOutput>,
}

/// Overrides taken from the command line; applied before validation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub grid_span: Option<f64>,
    pub grid_points: Option<usize>,
    pub variant: Option<Variant>,
    pub model: Option<Model>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Input {
    Si(PhysicalParams),
    Ratio {
        geometry: SlitGeometry,
        t_ratio: f64,
    },
    Natural(DimensionlessGroups),
}

impl Input {
    pub fn mode(&self) -> &'static str {
        match self {
            Input::Si(_) => "si",
            Input::Ratio { .. } => "ratio",
            Input::Natural(_) => "natural",
        }
    }

    pub fn scenario(&self) -> Result<Scenario> {
        Ok(match self {
            Input::Si(p) => Scenario::from_params(p)?,
            Input::Ratio { geometry, t_ratio } => Scenario::from_ratio(geometry, *t_ratio)?,
            Input::Natural(g) => Scenario {
                packet_width: 1.0,
                groups: *g,
            },
        })
    }

    /// SI derived scales; only full SI input has them all.
    pub fn derived_scales(&self) -> Result<Option<DerivedScales>> {
        match self {
            Input::Si(p) => Ok(Some(derive_scales(p)?)),
            _ => Ok(None),
        }
    }

    pub fn warnings(&self) -> Vec<decohere_core::Warning> {
        match self {
            Input::Si(p) => p.warnings(),
            Input::Ratio { geometry, .. } => PhysicalParams::new(
                1.0,
                geometry.slit_separation,
                geometry.packet_width,
                geometry.de_broglie_wavelength,
                geometry.path_length,
                0.0,
                0.0,
            )
            .warnings(),
            Input::Natural(g) => PhysicalParams::natural(0.0, g.beta, 0.0, g.dtilde)
                .map(|p| p.warnings())
                .unwrap_or_default(),
        }
    }

    /// Column name for positions.
    pub fn position_column(&self) -> &'static str {
        match self {
            Input::Natural(_) => "x_eps",
            _ => "x_m",
        }
    }

    pub fn intensity_column(&self) -> &'static str {
        match self {
            Input::Natural(_) => "intensity_per_eps",
            _ => "intensity_per_m",
        }
    }
}

fn check_finite(key: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("`{key}` must be finite, got {v}")))
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config always serializes")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(span) = o.grid_span {
            if self.is_natural() {
                self.grid_span_eps = Some(span);
            } else {
                self.grid_span_m = Some(span);
            }
        }
        if let Some(n) = o.grid_points {
            self.grid_points = Some(n);
        }
        if let Some(v) = o.variant {
            self.variant = Some(v);
        }
        if let Some(m) = o.model {
            self.model = Some(m);
        }
    }

    fn is_natural(&self) -> bool {
        self.theta.is_some() || self.beta.is_some() || self.kappa.is_some() || self.dtilde.is_some()
    }

    pub fn variant(&self) -> Variant {
        self.variant.unwrap_or_default()
    }

    pub fn model(&self) -> Model {
        self.model.unwrap_or_default()
    }

    pub fn label(&self, fallback: &str) -> String {
        self.name.clone().unwrap_or_else(|| fallback.to_string())
    }

    pub fn fringe_indices(&self) -> Vec<i64> {
        self.fringe_indices.clone().unwrap_or_else(|| vec![0])
    }

    /// Resolves the input mode, rejecting mixed or incomplete inputs.
    pub fn input(&self) -> Result<Input> {
        let physics = [
            ("mass_kg", self.mass_kg),
            ("coupling_rate_per_s", self.coupling_rate_per_s),
            ("temperature_K", self.temperature_k),
        ];
        let geometry = [
            ("slit_separation_m", self.slit_separation_m),
            ("packet_width_m", self.packet_width_m),
            ("de_broglie_wavelength_m", self.de_broglie_wavelength_m),
            ("path_length_m", self.path_length_m),
        ];
        let natural = [
            ("theta", self.theta),
            ("beta", self.beta),
            ("kappa", self.kappa),
            ("dtilde", self.dtilde),
        ];
        let any = |keys: &[(&str, Option<f64>)]| keys.iter().any(|(_, v)| v.is_some());
        let missing = |keys: &[(&str, Option<f64>)]| -> Vec<String> {
            keys.iter()
                .filter(|(_, v)| v.is_none())
                .map(|(k, _)| format!("`{k}`"))
                .collect()
        };
        for (k, v) in physics.iter().chain(&geometry).chain(&natural) {
            if let Some(v) = v {
                check_finite(k, *v)?;
            }
        }
        if let Some(r) = self.t_ratio {
            check_finite("t_ratio", r)?;
        }

        let si_like = any(&physics) || any(&geometry);
        let modes = [any(&physics), self.t_ratio.is_some(), any(&natural)];
        if any(&natural) && (si_like || self.t_ratio.is_some()) {
            return Err(CliError::Config(
                "natural-unit keys cannot be combined with SI or t_ratio keys".into(),
            ));
        }
        if modes[0] && modes[1] {
            return Err(CliError::Config(
                "give either mass/coupling/temperature or t_ratio, not both".into(),
            ));
        }
        if self.grid_span_m.is_some() && any(&natural) {
            return Err(CliError::Config("natural-unit input takes `grid_span_eps`, not `grid_span_m`".into()));
        }
        if self.grid_span_eps.is_some() && !any(&natural) {
            return Err(CliError::Config("SI input takes `grid_span_m`, not `grid_span_eps`".into()));
        }

        let g = |i: usize| geometry[i].1.unwrap_or(f64::NAN);
        let input = if any(&natural) {
            let miss = missing(&natural);
            if !miss.is_empty() {
                return Err(CliError::Config(format!("natural input is missing {}", miss.join(", "))));
            }
            let groups = DimensionlessGroups {
                theta: self.theta.unwrap_or_default(),
                beta: self.beta.unwrap_or_default(),
                kappa: self.kappa.unwrap_or_default(),
                dtilde: self.dtilde.unwrap_or_default(),
            };
            // Validates ranges; θ = 0 with κ > 0 is still a valid closed form.
            PhysicalParams::natural(groups.theta, groups.beta, 0.0, groups.dtilde)?;
            if !(groups.kappa >= 0.0) {
                return Err(CliError::Config(format!("`kappa` must be non-negative, got {}", groups.kappa)));
            }
            Input::Natural(groups)
        } else if let Some(t_ratio) = self.t_ratio {
            let miss = missing(&geometry);
            if !miss.is_empty() {
                return Err(CliError::Config(format!("t_ratio input is missing {}", miss.join(", "))));
            }
            let geometry = SlitGeometry {
                slit_separation: g(0),
                packet_width: g(1),
                de_broglie_wavelength: g(2),
                path_length: g(3),
            };
            geometry.validate()?;
            if !(t_ratio >= 0.0) {
                return Err(CliError::Config(format!("`t_ratio` must be non-negative, got {t_ratio}")));
            }
            Input::Ratio { geometry, t_ratio }
        } else if si_like {
            let miss: Vec<String> = missing(&physics).into_iter().chain(missing(&geometry)).collect();
            if !miss.is_empty() {
                return Err(CliError::Config(format!("SI input is missing {}", miss.join(", "))));
            }
            let p = PhysicalParams::new(
                self.mass_kg.unwrap_or_default(),
                g(0),
                g(1),
                g(2),
                g(3),
                self.coupling_rate_per_s.unwrap_or_default(),
                self.temperature_k.unwrap_or_default(),
            );
            p.validate()?;
            derive_scales(&p)?;
            Input::Si(p)
        } else {
            return Err(CliError::Config(
                "no input given: expected SI parameters, geometry with t_ratio, or natural groups".into(),
            ));
        };
        Ok(input)
    }

    fn explicit_span(&self) -> Option<f64> {
        self.grid_span_m.or(self.grid_span_eps)
    }

    fn points(&self) -> Result<usize> {
        let n = self.grid_points.unwrap_or(DEFAULT_GRID_POINTS);
        if n < MIN_GRID_POINTS {
            return Err(CliError::Config(format!("`grid_points` = {n} is below {MIN_GRID_POINTS}")));
        }
        Ok(n)
    }

    fn checked_span(&self, default: f64) -> Result<f64> {
        let span = self.explicit_span().unwrap_or(default);
        if !(span.is_finite() && span > 0.0) {
            return Err(CliError::Config(format!("grid span must be positive and finite, got {span}")));
        }
        Ok(span)
    }

    /// Grid for profile output: x₀ plus a few envelope widths unless set.
    pub fn pattern_grid(&self, sc: &Scenario) -> Result<Vec<f64>> {
        let default = sc.half_separation() + DEFAULT_SPAN_WIDTHS * sc.envelope_width();
        Ok(decohere_core::symmetric_grid(self.checked_span(default)?, self.points()?)?)
    }

    /// Grid for visibility measurement: a few fringes past the outermost
    /// requested one, so the default sampling resolves them.
    pub fn visibility_grid(&self, sc: &Scenario) -> Result<Vec<f64>> {
        let outer = self.fringe_indices().iter().map(|n| n.unsigned_abs()).max().unwrap_or(0) as f64;
        let period = fringe_period(sc, self.variant());
        let wide = sc.half_separation() + DEFAULT_SPAN_WIDTHS * sc.envelope_width();
        let default = if period.is_finite() {
            wide.min((outer + DEFAULT_SPAN_FRINGES) * period)
        } else {
            wide
        };
        Ok(decohere_core::symmetric_grid(self.checked_span(default)?, self.points()?)?)
    }

    /// Parsed sweep section, if any.
    pub fn sweep(&self) -> Result<SweepSpec> {
        let params = self.sweep_params.clone().unwrap_or_default();
        let values = self.sweep_values.clone().unwrap_or_default();
        if params.is_empty() || params.len() > 2 {
            return Err(CliError::Config(format!(
                "`sweep_params` must name one or two parameters, got {}",
                params.len()
            )));
        }
        if params.len() == 2 && params[0] == params[1] {
            return Err(CliError::Config(format!("`{}` is swept twice", params[0])));
        }
        if values.len() != params.len() {
            return Err(CliError::Config(format!(
                "`sweep_values` needs one list per swept parameter ({} given for {})",
                values.len(),
                params.len()
            )));
        }
        for (p, list) in params.iter().zip(&values) {
            if list.is_empty() {
                return Err(CliError::Config(format!("value list for `{p}` is empty")));
            }
            for &v in list {
                check_finite(p.column(), v)?;
            }
        }
        let mut base = self.clone();
        base.sweep_params = None;
        base.sweep_values = None;
        base.sweep_output = None;
        Ok(SweepSpec {
            base,
            params,
            values,
            output: self.sweep_output.unwrap_or_default(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: RunConfig,
    pub params: Vec<SweepParam>,
    pub values: Vec<Vec<f64>>,
    pub output: SweepOutput,
}

impl SweepSpec {
    /// Points in sweep order: the first parameter varies slowest.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = vec![vec![]];
        for list in &self.values {
            out = out
                .iter()
                .flat_map(|prefix| {
                    list.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        out
    }

    /// Input for one sweep point.
    ///
    /// Mass changes keep the flight time fixed (λ_d ∝ 1/m). In t_ratio mode a
    /// slit-separation change scales t_ratio by (d/d₀)², as τ_D ∝ 1/d².
    pub fn point_input(&self, values: &[f64]) -> Result<Input> {
        let mut input = self.base.input()?;
        for (param, &v) in self.params.iter().zip(values) {
            input = apply_param(input, *param, v)?;
        }
        Ok(input)
    }
}

fn apply_param(input: Input, param: SweepParam, v: f64) -> Result<Input> {
    let unsupported = |mode: &str| {
        Err(CliError::Config(format!("`{param}` cannot be swept with {mode} input")))
    };
    Ok(match (input, param) {
        (Input::Si(p), SweepParam::Mass) => Input::Si(p.with_mass_at_fixed_flight_time(v)),
        (Input::Si(p), SweepParam::Temperature) => Input::Si(PhysicalParams {
            temperature: v,
            ..p
        }),
        (Input::Si(p), SweepParam::CouplingRate) => Input::Si(PhysicalParams {
            coupling_rate: v,
            ..p
        }),
        (Input::Si(p), SweepParam::SlitSeparation) => Input::Si(PhysicalParams {
            slit_separation: v,
            ..p
        }),
        (Input::Si(_), SweepParam::TRatio) => return unsupported("SI"),
        (Input::Ratio { geometry, t_ratio }, SweepParam::SlitSeparation) => {
            let scale = v / geometry.slit_separation;
            Input::Ratio {
                geometry: SlitGeometry {
                    slit_separation: v,
                    ..geometry
                },
                t_ratio: t_ratio * scale * scale,
            }
        }
        (Input::Ratio { geometry, .. }, SweepParam::TRatio) => Input::Ratio { geometry, t_ratio: v },
        (Input::Ratio { .. }, _) => return unsupported("t_ratio"),
        (Input::Natural(_), _) => return unsupported("natural-unit"),
    })
}
