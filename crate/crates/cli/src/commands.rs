use std::path::{Path, PathBuf};

use decohere_core::{
    diagonal_profile_run, fringe_center, pattern_exact_for, pattern_weak_for, visibility_formula_for,
    visibility_numeric, FringeReading, MasterEquation, OracleConfig, PatternProfile, PhysicalParams,
    Scenario, Source, Variant,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Input, Model, RunConfig, SweepOutput, SweepParam, SweepSpec};
use crate::error::{CliError, Result};
use crate::output::{self, num, opt_num, Sidecar, Table};

/// A closed form and the oracle "match" when their maximum relative
/// deviation is below this.
pub const ORACLE_MATCH_TOLERANCE: f64 = 1e-6;

/// Files written by a command.
#[derive(Debug, Clone, PartialEq)]
pub struct Written {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub extra: Vec<PathBuf>,
}

fn source_of(model: Model) -> Source {
    match model {
        Model::Exact => Source::Exact,
        Model::Weak => Source::Weak,
    }
}

/// Closed-form profile selected by the config's model and variant.
pub fn evaluate(input: &Input, cfg: &RunConfig, grid: &[f64]) -> Result<PatternProfile> {
    let sc = input.scenario()?;
    let warnings = input.warnings();
    Ok(match cfg.model() {
        Model::Exact => pattern_exact_for(&sc, grid, cfg.variant(), warnings)?,
        Model::Weak => pattern_weak_for(&sc, grid, cfg.variant(), warnings)?,
    })
}

fn sidecar(
    command: &str,
    cfg: &RunConfig,
    input: &Input,
    source: Option<Source>,
    outputs: &[&Path],
    report: serde_json::Value,
) -> Result<Sidecar> {
    let sc = input.scenario()?;
    let mut warnings = input.warnings();
    if cfg.model() == Model::Weak || command == "visibility" {
        warnings.extend(decohere_core::closedform::weak_regime_warnings(&sc));
    }
    Ok(Sidecar {
        tool: output::TOOL.into(),
        tool_version: output::TOOL_VERSION.into(),
        command: command.into(),
        config: cfg.clone(),
        input_mode: input.mode().into(),
        source,
        variant: cfg.variant(),
        scenario: sc,
        derived_scales: input.derived_scales()?,
        groups: sc.groups,
        t_ratio: sc.t_ratio(),
        warnings,
        outputs: outputs.iter().map(|p| output::file_name(p)).collect(),
        report,
        timestamp: output::timestamp(),
    })
}

fn profile_table(input: &Input, prof: &PatternProfile) -> Table {
    let mut t = Table::new([input.position_column(), input.intensity_column()]);
    for (x, y) in prof.positions.iter().zip(&prof.intensities) {
        t.push(vec![num(*x), num(*y)]);
    }
    t
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternReport {
    pub points: usize,
    pub span: f64,
    pub integral: f64,
    pub max_intensity: f64,
}

/// Screen profile of the configured model: CSV plus sidecar.
pub fn run_pattern(cfg: &RunConfig, out_dir: &Path, label: &str) -> Result<(PatternProfile, Written)> {
    let input = cfg.input()?;
    let sc = input.scenario()?;
    let grid = cfg.pattern_grid(&sc)?;
    let mut prof = evaluate(&input, cfg, &grid)?;
    let (csv, json) = output::paths(out_dir, &cfg.label(label), "");
    let report = PatternReport {
        points: prof.len(),
        span: grid[grid.len() - 1],
        integral: prof.integral(),
        max_intensity: prof.max_intensity(),
    };
    let side = sidecar(
        "pattern",
        cfg,
        &input,
        Some(prof.meta.source),
        &[&csv],
        serde_json::to_value(&report).expect("report serializes"),
    )?;
    profile_table(&input, &prof).write(&csv)?;
    side.write(&json)?;
    prof.meta.timestamp = Some(side.timestamp);
    Ok((
        prof,
        Written {
            csv,
            json,
            extra: vec![],
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FringeStatus {
    Fringe,
    NoFringe,
    /// The grid is too coarse to measure this fringe.
    Unresolved,
}

impl FringeStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            FringeStatus::Fringe => "fringe",
            FringeStatus::NoFringe => "no_fringe",
            FringeStatus::Unresolved => "unresolved",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisibilityRow {
    pub fringe_index: i64,
    pub fringe_center: f64,
    pub formula: f64,
    pub numeric: Option<f64>,
    pub discrepancy: Option<f64>,
    pub status: FringeStatus,
    pub message: String,
}

/// Formula and measured visibility of fringe `index` for one input.
pub fn visibility_row(
    sc: &Scenario,
    variant: Variant,
    prof: &PatternProfile,
    index: i64,
) -> Result<VisibilityRow> {
    let center = fringe_center(sc, index, variant);
    let formula = visibility_formula_for(sc, center, variant)?;
    let (numeric, status, message) = match visibility_numeric(prof, index) {
        Ok(FringeReading::Fringe { visibility, .. }) => (Some(visibility), FringeStatus::Fringe, String::new()),
        Ok(FringeReading::NoFringe) => (None, FringeStatus::NoFringe, String::new()),
        Err(decohere_core::Error::Profile(msg)) => (None, FringeStatus::Unresolved, msg),
        Err(e) => return Err(e.into()),
    };
    Ok(VisibilityRow {
        fringe_index: index,
        fringe_center: center,
        formula,
        numeric,
        discrepancy: numeric.map(|v| (v - formula).abs()),
        status,
        message,
    })
}

pub fn visibility_table(input: &Input, rows: &[VisibilityRow]) -> Table {
    let center = match input {
        Input::Natural(_) => "fringe_center_eps",
        _ => "fringe_center_m",
    };
    let mut t = Table::new([
        "fringe_index",
        center,
        "visibility_formula",
        "visibility_numeric",
        "discrepancy",
        "status",
        "message",
    ]);
    for r in rows {
        t.push(vec![
            r.fringe_index.to_string(),
            num(r.fringe_center),
            num(r.formula),
            opt_num(r.numeric),
            opt_num(r.discrepancy),
            r.status.as_str().into(),
            r.message.clone(),
        ]);
    }
    t
}

/// Visibility per requested fringe, from the reduced formula and measured on
/// the configured model's profile.
pub fn run_visibility(cfg: &RunConfig, out_dir: &Path, label: &str) -> Result<(Vec<VisibilityRow>, Written)> {
    let input = cfg.input()?;
    let sc = input.scenario()?;
    let grid = cfg.visibility_grid(&sc)?;
    let prof = evaluate(&input, cfg, &grid)?;
    let rows = cfg
        .fringe_indices()
        .into_iter()
        .map(|n| visibility_row(&sc, cfg.variant(), &prof, n))
        .collect::<Result<Vec<_>>>()?;
    let (csv, json) = output::paths(out_dir, &cfg.label(label), "visibility");
    let side = sidecar(
        "visibility",
        cfg,
        &input,
        Some(source_of(cfg.model())),
        &[&csv],
        serde_json::json!({ "points": grid.len(), "span": grid[grid.len() - 1], "rows": rows }),
    )?;
    visibility_table(&input, &rows).write(&csv)?;
    side.write(&json)?;
    Ok((
        rows,
        Written {
            csv,
            json,
            extra: vec![],
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub max_abs: f64,
    pub max_rel: f64,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub published: Deviation,
    pub calibrated: Deviation,
    /// Variant with the smaller relative deviation.
    pub winner: Variant,
    pub match_tolerance: f64,
    pub doubling_change: f64,
    pub imag_residue: f64,
    pub k_max: f64,
    pub k_points: usize,
}

impl OracleComparison {
    pub fn deviation(&self, v: Variant) -> Deviation {
        match v {
            Variant::Published => self.published,
            Variant::Calibrated => self.calibrated,
        }
    }
}

/// Oracle profile at the flight time against both exact-pattern variants.
/// Natural-unit input only, so that every length is O(1).
pub fn run_oracle_compare(cfg: &RunConfig, out_dir: &Path, label: &str) -> Result<(OracleComparison, Written)> {
    let input = cfg.input()?;
    let Input::Natural(g) = input else {
        return Err(CliError::Config(
            "oracle-compare needs natural-unit input (theta, beta, kappa, dtilde)".into(),
        ));
    };
    let p = PhysicalParams::natural(g.theta, g.beta, g.kappa, g.dtilde)?;
    let sc = input.scenario()?;
    let grid = cfg.pattern_grid(&sc)?;
    let span = grid[grid.len() - 1];
    let eq = MasterEquation::new(&p)?;
    let run = diagonal_profile_run(&eq, &p, g.beta, &grid, &OracleConfig::for_span(1.0, span))?;
    let deviation = |v: Variant| -> Result<(PatternProfile, Deviation)> {
        let prof = pattern_exact_for(&sc, &grid, v, vec![])?;
        let max_rel = prof.max_relative_deviation(&run.profile)?;
        let max_abs = max_rel * run.profile.max_intensity();
        Ok((
            prof,
            Deviation {
                max_abs,
                max_rel,
                matches: max_rel < ORACLE_MATCH_TOLERANCE,
            },
        ))
    };
    let (publ, dp) = deviation(Variant::Published)?;
    let (cal, dc) = deviation(Variant::Calibrated)?;
    let cmp = OracleComparison {
        published: dp,
        calibrated: dc,
        winner: if dc.max_rel <= dp.max_rel {
            Variant::Calibrated
        } else {
            Variant::Published
        },
        match_tolerance: ORACLE_MATCH_TOLERANCE,
        doubling_change: run.doubling_change,
        imag_residue: run.imag_residue,
        k_max: run.config.k_max,
        k_points: run.config.k_points,
    };

    let mut t = Table::new(["x_eps", "oracle", "exact_published", "exact_calibrated"]);
    for (i, &x) in grid.iter().enumerate() {
        t.push(vec![
            num(x),
            num(run.profile.intensities[i]),
            num(publ.intensities[i]),
            num(cal.intensities[i]),
        ]);
    }
    let (csv, json) = output::paths(out_dir, &cfg.label(label), "oracle");
    let side = sidecar(
        "oracle-compare",
        cfg,
        &input,
        Some(Source::Oracle),
        &[&csv],
        serde_json::to_value(&cmp).expect("report serializes"),
    )?;
    t.write(&csv)?;
    side.write(&json)?;
    Ok((
        cmp,
        Written {
            csv,
            json,
            extra: vec![],
        },
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub values: Vec<f64>,
    pub t_ratio: Option<f64>,
    pub visibility_formula: Option<f64>,
    pub visibility_numeric: Option<f64>,
    /// `fringe`, `no_fringe`, `unresolved` or `error`.
    pub status: String,
    pub message: String,
    #[serde(skip)]
    pub profile: Option<PatternProfile>,
}

impl SweepPoint {
    fn failed(values: Vec<f64>, e: CliError) -> Self {
        SweepPoint {
            values,
            t_ratio: None,
            visibility_formula: None,
            visibility_numeric: None,
            status: "error".into(),
            message: e.to_string(),
            profile: None,
        }
    }
}

fn sweep_point(spec: &SweepSpec, values: &[f64]) -> Result<SweepPoint> {
    let input = spec.point_input(values)?;
    let sc = input.scenario()?;
    let cfg = &spec.base;
    let t_ratio = Some(sc.t_ratio());
    match spec.output {
        SweepOutput::Visibility => {
            let grid = cfg.visibility_grid(&sc)?;
            let prof = evaluate(&input, cfg, &grid)?;
            let row = visibility_row(&sc, cfg.variant(), &prof, 0)?;
            Ok(SweepPoint {
                values: values.to_vec(),
                t_ratio,
                visibility_formula: Some(row.formula),
                visibility_numeric: row.numeric,
                status: row.status.as_str().into(),
                message: row.message,
                profile: None,
            })
        }
        SweepOutput::Profiles => {
            let grid = cfg.pattern_grid(&sc)?;
            let prof = evaluate(&input, cfg, &grid)?;
            Ok(SweepPoint {
                values: values.to_vec(),
                t_ratio,
                visibility_formula: None,
                visibility_numeric: None,
                status: "ok".into(),
                message: String::new(),
                profile: Some(prof),
            })
        }
    }
}

/// Evaluates every sweep point in parallel; results keep sweep order and
/// failures are recorded per point.
pub fn evaluate_sweep(spec: &SweepSpec) -> Vec<SweepPoint> {
    spec.points()
        .into_par_iter()
        .map(|v| sweep_point(spec, &v).unwrap_or_else(|e| SweepPoint::failed(v, e)))
        .collect()
}

pub fn run_sweep(cfg: &RunConfig, out_dir: &Path, label: &str) -> Result<(Vec<SweepPoint>, Written)> {
    let spec = cfg.sweep()?;
    let base = spec.base.input()?;
    // Fails early on a sweep the input mode cannot express.
    spec.point_input(&spec.points()[0]).map(|_| ())?;
    let points = evaluate_sweep(&spec);
    let name = cfg.label(label);
    let (csv, json) = output::paths(out_dir, &name, "sweep");
    let mut extra = Vec::new();

    let mut header: Vec<String> = spec.params.iter().map(|p| p.column().to_string()).collect();
    // The resulting t_L/τ_D gets its own column unless it is swept directly.
    let derived_ratio = !spec.params.contains(&SweepParam::TRatio);
    if derived_ratio {
        header.push("t_ratio".into());
    }
    let lead = |pt: &SweepPoint| -> Vec<String> {
        let mut row: Vec<String> = pt.values.iter().map(|v| num(*v)).collect();
        if derived_ratio {
            row.push(opt_num(pt.t_ratio));
        }
        row
    };
    let table = match spec.output {
        SweepOutput::Visibility => {
            header.extend(["visibility_formula", "visibility_numeric", "status", "message"].map(String::from));
            let mut t = Table::new(header);
            for pt in &points {
                let mut row = lead(pt);
                row.extend([
                    opt_num(pt.visibility_formula),
                    opt_num(pt.visibility_numeric),
                    pt.status.clone(),
                    pt.message.clone(),
                ]);
                t.push(row);
            }
            t
        }
        SweepOutput::Profiles => {
            header.extend(["file", "status", "message"].map(String::from));
            let dir = out_dir.join(format!("{name}_sweep"));
            let mut t = Table::new(header);
            for (i, pt) in points.iter().enumerate() {
                let file = match &pt.profile {
                    Some(prof) => {
                        let path = dir.join(format!("point_{i:04}.csv"));
                        profile_table(&base, prof).write(&path)?;
                        let rel = format!("{name}_sweep/{}", output::file_name(&path));
                        extra.push(path);
                        rel
                    }
                    None => String::new(),
                };
                let mut row = lead(pt);
                row.extend([file, pt.status.clone(), pt.message.clone()]);
                t.push(row);
            }
            t
        }
    };
    let failed = points.iter().filter(|p| p.status == "error").count();
    let side = sidecar(
        "sweep",
        cfg,
        &base,
        Some(source_of(cfg.model())),
        &[&csv],
        serde_json::json!({
            "params": spec.params,
            "output": spec.output,
            "points": points.len(),
            "failed": failed,
        }),
    )?;
    table.write(&csv)?;
    side.write(&json)?;
    Ok((points, Written { csv, json, extra }))
}
