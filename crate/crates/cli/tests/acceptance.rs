//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed; exits non-zero if any fails.

use std::f64::consts::PI;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use decohere_cli::{evaluate_sweep, run_oracle_compare, run_sweep, run_visibility, RunConfig, SweepOutput, SweepParam};
use decohere_core::series::{DAMPING_SERIES_MAX, KERNEL_SERIES_MAX};
use decohere_core::{
    derive_scales, diagonal_profile, pattern_exact, pattern_exact_for, pattern_weak, pattern_weak_for,
    symmetric_grid, trace, visibility_numeric, DimensionlessGroups, ExactPatternParams, MasterEquation,
    OracleConfig, PatternProfile, PhysicalParams, Scenario, SlitGeometry, Variant,
};
use num_complex::Complex64;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

// Reference experiment: 1 μm slit separation, 0.1 μm packets, λ_d = 5e-6 μm,
// 20 cm flight path.
const SEPARATION: f64 = 1e-6;
const WIDTH: f64 = 1e-7;
const WAVELENGTH: f64 = 5e-12;
const PATH: f64 = 0.2;
/// Packet width of the narrow-slit variant, where σ/ε ≈ 3e5 and the
/// envelope is flat over many fringes.
const NARROW_WIDTH: f64 = 1e-9;
const MASS: f64 = 1.2e-24;

fn geometry(width: f64) -> SlitGeometry {
    SlitGeometry {
        slit_separation: SEPARATION,
        packet_width: width,
        de_broglie_wavelength: WAVELENGTH,
        path_length: PATH,
    }
}

/// Narrow-slit SI parameters with θ ≈ 1.8e-7 and T set for `t_ratio`.
fn narrow_si(t_ratio: f64) -> PhysicalParams {
    let mut p = PhysicalParams::new(MASS, SEPARATION, NARROW_WIDTH, WAVELENGTH, PATH, 1e-4, 1.0);
    let s = derive_scales(&p).unwrap();
    p.temperature = t_ratio * s.decoherence_time / s.flight_time;
    p
}

fn si_config(p: &PhysicalParams, extra: &str) -> RunConfig {
    RunConfig::parse(&format!(
        "mass_kg = {:e}\nslit_separation_m = {:e}\npacket_width_m = {:e}\nde_broglie_wavelength_m = {:e}\n\
         path_length_m = {:e}\ncoupling_rate_per_s = {:e}\ntemperature_K = {:e}\n{extra}",
        p.mass, p.slit_separation, p.packet_width, p.de_broglie_wavelength, p.path_length, p.coupling_rate, p.temperature
    ))
    .unwrap()
}

/// Fringe period from the zero crossings of the interference term (pattern
/// minus its fully decohered counterpart), averaged over the central ones.
fn measured_period(sc: &Scenario, variant: Variant) -> f64 {
    let grid = symmetric_grid(6e-6, 24001).unwrap();
    let coherent = pattern_weak_for(sc, &grid, variant, vec![]).unwrap();
    let flat_sc = Scenario::from_ratio(&geometry(sc.packet_width), 1e6).unwrap();
    let flat = pattern_weak_for(&flat_sc, &grid, variant, vec![]).unwrap();
    let cross: Vec<f64> = coherent.intensities.iter().zip(&flat.intensities).map(|(a, b)| a - b).collect();
    let mut zeros = Vec::new();
    for i in 1..grid.len() {
        if cross[i - 1] * cross[i] < 0.0 && grid[i].abs() < 4e-6 {
            let f = cross[i - 1] / (cross[i - 1] - cross[i]);
            zeros.push(grid[i - 1] + f * (grid[i] - grid[i - 1]));
        }
    }
    2.0 * (zeros[zeros.len() - 1] - zeros[0]) / (zeros.len() - 1) as f64
}

fn central_visibility(t_ratio: f64, variant: Variant) -> f64 {
    let sc = Scenario::from_ratio(&geometry(NARROW_WIDTH), t_ratio).unwrap();
    let grid = symmetric_grid(3e-6, 2401).unwrap();
    let prof = pattern_weak_for(&sc, &grid, variant, vec![]).unwrap();
    visibility_numeric(&prof, 0).unwrap().visibility().unwrap_or(0.0)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let ratios = [4.0, 20.0, 60.0];
    let want = [0.8465, 0.4346, 0.0821];
    let run = |v: Variant| {
        let sc = Scenario::from_ratio(&geometry(WIDTH), 4.0).unwrap();
        let period = measured_period(&sc, v);
        let vis: Vec<f64> = ratios.iter().map(|&r| central_visibility(r, v)).collect();
        (period, vis)
    };
    let (period, vis) = run(Variant::default());
    let elapsed = start.elapsed().as_secs_f64();
    let (p_period, p_vis) = run(Variant::Published);
    let spacing_ok = (period / 1e-6 - 1.0).abs() <= 1e-3;
    let vis_ok = vis.iter().zip(&want).all(|(g, w)| (g - w).abs() <= 1e-3);
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join("/");
    outcome(
        spacing_ok && vis_ok && elapsed < 1.0,
        format!(
            "{} variant: spacing {:.4} um, V = {} (want 1.000 um, {}); published variant: spacing {:.4} um, V = {}; {:.2} s",
            Variant::default().as_str(),
            period * 1e6,
            fmt(&vis),
            fmt(&want),
            p_period * 1e6,
            fmt(&p_vis),
            elapsed
        ),
    )
}

fn criterion_2() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let v = Variant::default();
    // Pick T so that the central fringe has V = 0.600.
    let t_ratio = -match v {
        Variant::Published => 24.0,
        Variant::Calibrated => 12.0,
    } * 0.6f64.ln();
    let p = narrow_si(t_ratio);
    let grid = "model = \"weak\"\ngrid_span_m = 3e-6\ngrid_points = 2401\n";
    let (before, _) = run_visibility(&si_config(&p, grid), dir.path(), "before").unwrap();
    let doubled = PhysicalParams {
        slit_separation: 2.0 * p.slit_separation,
        ..p
    };
    let (after, _) = run_visibility(&si_config(&doubled, grid), dir.path(), "after").unwrap();
    let (f0, n0) = (before[0].formula, before[0].numeric.unwrap());
    let (f1, n1) = (after[0].formula, after[0].numeric.unwrap());
    let pass = (f0 - 0.6).abs() < 1e-4 && (f1 - 0.1296).abs() < 1e-4 && (n1 - 0.1296).abs() < 1e-4;
    outcome(
        pass,
        format!("V = {f0:.6} (measured {n0:.6}); doubled d: formula {f1:.6}, measured {n1:.6} (want 0.1296)"),
    )
}

/// Max relative deviation of the published variant against the oracle for
/// the adjudication run; frozen from a verified run.
const PUBLISHED_DEVIATION_PIN: f64 = 0.492258530783913;

fn criterion_3() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::parse("theta = 0.5\nbeta = 2.0\nkappa = 2.0\ndtilde = 6.0\ngrid_span_eps = 20.0\ngrid_points = 4096").unwrap();
    let start = Instant::now();
    let (cmp, _) = run_oracle_compare(&cfg, dir.path(), "adjudication").unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let matches = [cmp.published.matches, cmp.calibrated.matches].iter().filter(|m| **m).count();
    let pinned = cmp.winner == Variant::Calibrated
        && cmp.calibrated.max_rel < 1e-12
        && (cmp.published.max_rel - PUBLISHED_DEVIATION_PIN).abs() < 1e-9 * PUBLISHED_DEVIATION_PIN;
    outcome(
        cmp.doubling_change < 1e-8 && matches == 1 && pinned && elapsed < 30.0,
        format!(
            "node doubling change {:.2e}; calibrated max rel {:.2e}, published {:.6}; winner {}; {:.2} s",
            cmp.doubling_change,
            cmp.calibrated.max_rel,
            cmp.published.max_rel,
            cmp.winner.as_str(),
            elapsed
        ),
    )
}

/// |ψ|² of two freely spreading Gaussians, from the complex wave function.
fn free_two_gaussian(x: f64, t: f64, hbar_over_m: f64, eps: f64, d: f64) -> f64 {
    let tau = Complex64::new(1.0, 2.0 * hbar_over_m * t / (eps * eps));
    let norm = (2.0 / PI).powf(0.25) / (2.0 * eps).sqrt();
    let packet = |c: f64| (-(x - c) * (x - c) / (tau * eps * eps)).exp() / tau.sqrt();
    ((packet(0.5 * d) + packet(-0.5 * d)) * norm).norm_sqr()
}

fn max_rel(prof: &PatternProfile, want: &[f64]) -> f64 {
    let peak = want.iter().fold(0.0_f64, |m, v| m.max(*v));
    prof.intensities.iter().zip(want).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs())) / peak
}

fn criterion_4() -> Outcome {
    let v = Variant::default();
    let p = PhysicalParams::new(MASS, SEPARATION, NARROW_WIDTH, WAVELENGTH, PATH, 0.0, 0.0);
    let s = derive_scales(&p).unwrap();
    let grid = symmetric_grid(3.0 * s.envelope_width, 4096).unwrap();
    let want: Vec<f64> = grid
        .iter()
        .map(|&x| free_two_gaussian(x, s.flight_time, p.hbar / p.mass, p.packet_width, p.slit_separation))
        .collect();
    let exact = max_rel(&pattern_exact(&p, &grid, v).unwrap(), &want);
    let weak = max_rel(&pattern_weak(&p, &grid, v).unwrap(), &want);

    // Oracle in natural units: ħ = m = ε = 1, d = 6, t = 5, σ = 10.
    let n = PhysicalParams::natural(0.0, 5.0, 0.0, 6.0).unwrap();
    let span = 30.0;
    let ngrid = symmetric_grid(span, 4096).unwrap();
    let nwant: Vec<f64> = ngrid.iter().map(|&x| free_two_gaussian(x, 5.0, 1.0, 1.0, 6.0)).collect();
    let oracle = max_rel(&diagonal_profile(&n, 5.0, &ngrid, &OracleConfig::for_span(1.0, span)).unwrap(), &nwant);
    outcome(
        exact < 1e-6 && weak < 1e-6 && oracle < 1e-6,
        format!("max rel deviation from the free wave packet: exact {exact:.2e}, weak {weak:.2e}, oracle {oracle:.2e}"),
    )
}

fn criterion_5() -> Outcome {
    let p = PhysicalParams::natural(0.5, 2.0, 2.0, 1.5).unwrap();
    let t0 = trace(&p, 0.0).unwrap();
    let constant = (0..=64).all(|i| trace(&p, 0.1 * i as f64).unwrap().to_bits() == t0.to_bits());

    let mut worst = 0.0_f64;
    for &dtilde in &[10.0, 15.0, 30.0] {
        for &(theta, beta, kappa) in &[(0.0, 0.5, 0.0), (0.5, 2.0, 2.0), (3.0, 10.0, 50.0), (1e-6, 4.0, 1.0)] {
            let sc = Scenario {
                packet_width: 1.0,
                groups: DimensionlessGroups { theta, beta, kappa, dtilde },
            };
            for v in Variant::ALL {
                let c = ExactPatternParams::new(&sc.groups, v);
                let width = c.omega_sq.sqrt().min(2.0 * beta);
                let step = width.min(2.0 * PI / c.cos_coeff.max(dtilde / beta)) / 40.0;
                let span = 0.5 * dtilde + 12.0 * c.omega_sq.sqrt().max(2.0 * beta);
                let points = (2.0 * span / step).ceil() as usize | 1;
                let grid = symmetric_grid(span, points).unwrap();
                for prof in [
                    pattern_exact_for(&sc, &grid, v, vec![]).unwrap(),
                    pattern_weak_for(&sc, &grid, v, vec![]).unwrap(),
                ] {
                    worst = worst.max((prof.integral() - 1.0).abs());
                }
            }
        }
    }
    outcome(
        constant && worst < 1e-8,
        format!("trace {} for all 65 times: {constant}; worst |integral - 1| for d/eps >= 10: {worst:.2e}", t0),
    )
}

fn read_column(path: &Path, name: &str) -> Vec<f64> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect()
}

/// Max residual of a least-squares line through (x, y).
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    let resid = x.iter().zip(y).fold(0.0_f64, |m, (a, b)| m.max((b - my - slope * (a - mx)).abs()));
    (slope, resid)
}

fn criterion_6() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let v = Variant::default();
    let divisor = match v {
        Variant::Published => 24.0,
        Variant::Calibrated => 12.0,
    };
    let base = narrow_si(2.0);
    let s = derive_scales(&base).unwrap();
    let hbar2 = base.hbar * base.hbar;
    let sweeps: [(SweepParam, Vec<f64>, bool); 4] = [
        (SweepParam::CouplingRate, (0..8).map(|i| 1e-4 * 10f64.powf(i as f64 / 7.0)).collect(), false),
        (SweepParam::Mass, (0..8).map(|i| MASS * (1.0 + 0.5 * i as f64)).collect(), false),
        (SweepParam::Temperature, (0..8).map(|i| base.temperature * (0.5 + i as f64)).collect(), false),
        (SweepParam::SlitSeparation, (0..8).map(|i| SEPARATION * (1.0 + 0.25 * i as f64)).collect(), true),
    ];
    let mut worst = 0.0_f64;
    let mut notes = Vec::new();
    for (param, values, squared) in sweeps {
        let mut cfg = si_config(&base, "model = \"weak\"\ngrid_span_m = 3e-6\ngrid_points = 2401\n");
        cfg.variant = Some(v);
        cfg.sweep_params = Some(vec![param]);
        cfg.sweep_values = Some(vec![values]);
        let (_, w) = run_sweep(&cfg, dir.path(), param.column()).unwrap();
        let x: Vec<f64> = read_column(&w.csv, param.column())
            .into_iter()
            .map(|v| if squared { v * v } else { v })
            .collect();
        let y: Vec<f64> = read_column(&w.csv, "visibility_formula").iter().map(|v| v.ln()).collect();
        let (slope, resid) = line_fit(&x, &y);
        worst = worst.max(resid);
        if param == SweepParam::CouplingRate {
            let d2 = base.slit_separation * base.slit_separation;
            let expected = -2.0 * base.mass * base.boltzmann * base.temperature * d2 * s.flight_time / (divisor * hbar2);
            let slope_err = (slope / expected - 1.0).abs();
            notes.push(format!("gamma slope rel err {slope_err:.1e}"));
            worst = worst.max(slope_err);
        }
    }

    let mut cfg = RunConfig::parse(&format!(
        "slit_separation_m = {SEPARATION:e}\npacket_width_m = {NARROW_WIDTH:e}\nde_broglie_wavelength_m = {WAVELENGTH:e}\n\
         path_length_m = {PATH:e}\nt_ratio = 0.0\nmodel = \"weak\"\ngrid_span_m = 3e-6\ngrid_points = 2401\n"
    ))
    .unwrap();
    cfg.sweep_params = Some(vec![SweepParam::TRatio]);
    cfg.sweep_values = Some(vec![vec![0.0, 4.0, 20.0, 60.0]]);
    cfg.sweep_output = Some(SweepOutput::Profiles);
    let spec = cfg.sweep().unwrap();
    let maxima = |p: &PatternProfile| -> Vec<usize> {
        let y = &p.intensities;
        (1..y.len() - 1)
            .filter(|&i| y[i] > y[i - 1] && y[i] >= y[i + 1] && p.positions[i].abs() < 2.5e-6)
            .collect()
    };
    let points = evaluate_sweep(&spec);
    let reference = maxima(points[0].profile.as_ref().unwrap());
    let invariant = points.iter().all(|pt| maxima(pt.profile.as_ref().unwrap()) == reference);
    notes.push(format!("{} maxima fixed across t_ratio 0..60: {invariant}", reference.len()));
    outcome(
        worst < 1e-10 && invariant,
        format!("worst log-V line residual {worst:.1e} over gamma, m, T, d^2; {}", notes.join("; ")),
    )
}

fn criterion_7() -> Outcome {
    let mut worst = 0.0_f64;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    let eq = |theta: f64| {
        let p = PhysicalParams::natural(theta, 2.0, 1.0, 6.0).unwrap();
        MasterEquation::new(&p).unwrap()
    };
    for thr in [DAMPING_SERIES_MAX, 0.5 * DAMPING_SERIES_MAX, KERNEL_SERIES_MAX] {
        let (lo, hi) = (thr * (1.0 - 1e-12), thr * (1.0 + 1e-12));
        for v in Variant::ALL {
            let g = |theta| DimensionlessGroups { theta, beta: 3.0, kappa: 5.0, dtilde: 8.0 };
            let (a, b) = (ExactPatternParams::new(&g(lo), v), ExactPatternParams::new(&g(hi), v));
            worst = worst.max(rel(a.gamma_big, b.gamma_big)).max(rel(a.omega_sq, b.omega_sq));
        }
        // θ = γ·t with t = β = 2 at the flight time.
        for &(k, r) in &[(0.7, 0.0), (-1.3, 2.5), (0.0, 4.0)] {
            let a = eq(lo).decay_integral(k, r, 2.0).unwrap();
            let b = eq(hi).decay_integral(k, r, 2.0).unwrap();
            worst = worst.max(rel(a, b));
        }
    }
    outcome(worst < 1e-10, format!("worst relative jump across series switches: {worst:.1e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("reference fringe spacing and contrast", criterion_1),
        ("visibility after doubling the slit separation", criterion_2),
        ("oracle adjudication of the exact-pattern constants", criterion_3),
        ("free-particle limit", criterion_4),
        ("trace conservation and normalization", criterion_5),
        ("scaling of log-visibility and fixed fringe maxima", criterion_6),
        ("continuity across series switches", criterion_7),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let result = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !result.pass {
            failed += 1;
        }
        println!(
            "criterion {} {}: {} | {}",
            i + 1,
            if result.pass { "PASS" } else { "FAIL" },
            name,
            result.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
