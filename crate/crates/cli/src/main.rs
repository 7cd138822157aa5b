use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use decohere_cli::{
    run_oracle_compare, run_pattern, run_sweep, run_visibility, CliError, Model, Overrides,
    RunConfig,
};
use decohere_core::Variant;

#[derive(Parser)]
#[command(name = "decohere", version, about = "Double-slit patterns under thermal decoherence")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Screen intensity profile.
    Pattern(Common),
    /// Fringe visibility, formula and measured.
    Visibility(Common),
    /// Master-equation oracle against both exact-pattern variants.
    OracleCompare(Common),
    /// Parameter sweep.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Grid half-span, m (packet widths for natural input).
    #[arg(long)]
    grid_span: Option<f64>,
    #[arg(long)]
    grid_points: Option<usize>,
    #[arg(long)]
    variant: Option<Variant>,
    #[arg(long)]
    model: Option<Model>,
}

impl Common {
    fn load(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::load(&self.config)?;
        cfg.apply(&Overrides {
            grid_span: self.grid_span,
            grid_points: self.grid_points,
            variant: self.variant,
            model: self.model,
        });
        Ok(cfg)
    }

    fn label(&self) -> String {
        self.config
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "run".into())
    }
}

fn show(p: &Path) -> String {
    p.display().to_string()
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Pattern(c) => {
            let (prof, w) = run_pattern(&c.load()?, &c.out, &c.label())?;
            println!("{} points -> {}", prof.len(), show(&w.csv));
        }
        Command::Visibility(c) => {
            let (rows, w) = run_visibility(&c.load()?, &c.out, &c.label())?;
            for r in &rows {
                let measured = r.numeric.map(|v| format!("{v:.6}")).unwrap_or_else(|| r.status.as_str().into());
                println!("fringe {:>3}: formula {:.6}  measured {measured}", r.fringe_index, r.formula);
            }
            println!("-> {}", show(&w.csv));
        }
        Command::OracleCompare(c) => {
            let (cmp, w) = run_oracle_compare(&c.load()?, &c.out, &c.label())?;
            for v in Variant::ALL {
                let d = cmp.deviation(v);
                println!(
                    "{:<10} max abs {:.3e}  max rel {:.3e}  {}",
                    v.as_str(),
                    d.max_abs,
                    d.max_rel,
                    if d.matches { "match" } else { "no match" }
                );
            }
            println!("winner: {} (node doubling change {:.2e})", cmp.winner.as_str(), cmp.doubling_change);
            println!("-> {}", show(&w.csv));
        }
        Command::Sweep(c) => {
            let (points, w) = run_sweep(&c.load()?, &c.out, &c.label())?;
            let failed = points.iter().filter(|p| p.status == "error").count();
            println!("{} points ({failed} failed) -> {}", points.len(), show(&w.csv));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
