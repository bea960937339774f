//! Command-line front end: `nsda <subcommand> --config <file> [--out <dir>] [--seed <n>]`.
//!
//! Exit codes: 0 on success, 1 on usage or configuration errors, 2 on
//! numerical failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::conditions::check_conditions;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::grid::{ShellCutoff, WaveGrid};
use crate::interp::{estimate_p1, estimate_p2, estimate_p3, write_estimates_csv, InterpolantSpec};
use crate::ops::project_low;
use crate::postprocess::{lipschitz_probe, postprocess, write_lipschitz_csv};
use crate::run::{run_coupled, run_lockstep, write_diagnostics_csv};
use crate::series::error_series;
use crate::snapshot::Snapshot;
use crate::sweep::convergence_sweep;

#[derive(Debug, Parser)]
#[command(name = "nsda", version, about = "Nudged spectral Galerkin data assimilation for 2D periodic Navier-Stokes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the configuration's top-level `seed`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Spin up the truth and store its trajectory.
    Reference(Common),
    /// One coupled run: snapshots, error series and diagnostics.
    Assimilate {
        #[command(flatten)]
        common: Common,
        /// Initial truth state; defaults to the spun-up state from the config.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Convergence sweep over `sweep.cutoffs`.
    Sweep(Common),
    /// Estimate the interpolant constants.
    VerifyInterp(Common),
    /// Evaluate the parameter conditions.
    Check(Common),
    /// Apply the approximate inertial manifold to a stored state.
    Postprocess {
        #[command(flatten)]
        common: Common,
        /// Snapshot to postprocess; its modes beyond `kappa_N` are dropped first.
        #[arg(long)]
        snapshot: PathBuf,
    },
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config_error() {
                1
            } else {
                2
            }
        }
    }
}

fn load(common: &Common) -> Result<Config> {
    let mut cfg = Config::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn out_dir(common: &Common) -> Result<&Path> {
    std::fs::create_dir_all(&common.out).map_err(|e| Error::io(common.out.display().to_string(), e))?;
    Ok(&common.out)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path.display().to_string(), e))
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Reference(c) => reference(&c),
        Command::Assimilate { common, truth } => assimilate(&common, truth.as_deref()),
        Command::Sweep(c) => sweep(&c),
        Command::VerifyInterp(c) => verify_interp(&c),
        Command::Check(c) => check(&c),
        Command::Postprocess { common, snapshot } => postprocess_snapshot(&common, &snapshot),
    }
}

fn reference(c: &Common) -> Result<()> {
    let cfg = load(c)?;
    let dir = out_dir(c)?;
    let nudge = cfg.nudge_config()?;
    let u0 = cfg.initial_truth()?;
    Snapshot::new(nudge.t0, u0.clone()).save(&dir.join("truth_initial.nsf2"))?;
    let mut count = 0usize;
    run_lockstep(&nudge, &[], &u0, |s| {
        Snapshot::new(s.time, s.truth.clone()).save(&dir.join(format!("truth_{count:06}.nsf2")))?;
        count += 1;
        Ok(())
    })?;
    println!("wrote truth_initial.nsf2 and {count} trajectory snapshots to {}", dir.display());
    Ok(())
}

fn assimilate(c: &Common, truth: Option<&Path>) -> Result<()> {
    let cfg = load(c)?;
    let nudge = cfg.nudge_config()?;
    let u0 = match truth {
        Some(path) => Snapshot::load(path, Some(&nudge.grid_truth))?.field,
        None => cfg.initial_truth()?,
    };
    let dir = out_dir(c)?;
    let out = run_coupled(&nudge, &u0)?;
    out.write_snapshots(&dir.join("snapshots"))?;
    write_diagnostics_csv(create(&dir.join("diagnostics.csv"))?, &out.diagnostics())?;
    let g = nudge.build_forcing()?;
    let series = error_series(
        &out.truth_snapshots(),
        &out.nudged_snapshots(),
        &g,
        nudge.nu,
        &nudge.cutoff_n,
    )?;
    series.write_csv(create(&dir.join("errors.csv"))?)?;
    if let (Some(first), Some(last)) = (series.rows.first(), series.rows.last()) {
        println!(
            "t = {} .. {}: err_lowmodes_L2 {:.3e} -> {:.3e}, err_sgm_L2 {:.3e}, err_ppgm_L2 {:.3e}",
            first.t, last.t, first.err_lowmodes_l2, last.err_lowmodes_l2, last.err_sgm_l2, last.err_ppgm_l2
        );
    }
    Ok(())
}

fn sweep(c: &Common) -> Result<()> {
    let cfg = load(c)?;
    let dir = out_dir(c)?;
    let nudge = cfg.nudge_config()?;
    let report = convergence_sweep(&nudge, &cfg.sweep_cutoffs()?, &cfg.initial_truth()?, &cfg.sweep_options()?)?;
    report.write_csv(create(&dir.join("convergence.csv"))?)?;
    let gp = dir.join("convergence.gp");
    std::fs::write(&gp, report.gnuplot_script("convergence.csv")).map_err(|e| Error::io(gp.display().to_string(), e))?;
    let summary = dir.join("summary.txt");
    std::fs::write(&summary, report.to_string()).map_err(|e| Error::io(summary.display().to_string(), e))?;
    print!("{report}");
    Ok(())
}

fn verify_interp(c: &Common) -> Result<()> {
    let cfg = load(c)?;
    let dir = out_dir(c)?;
    let grid = match cfg.verify.points {
        Some(m) => WaveGrid::new(cfg.length, m)?,
        None => cfg.grid()?,
    };
    let mut variants = vec![cfg.interpolant()?];
    for &cells in &cfg.verify.cells {
        let v = InterpolantSpec::FiniteVolume { cells };
        if !variants.contains(&v) {
            variants.push(v);
        }
    }
    let shells = cfg
        .verify
        .shells
        .iter()
        .map(|&k| ShellCutoff::new(k))
        .collect::<Result<Vec<_>>>()?;
    let (n, seed) = (cfg.verify.samples, cfg.seed);
    let mut rows = Vec::new();
    for v in &variants {
        rows.push(estimate_p1(v, &grid, n, seed)?);
        rows.push(estimate_p2(v, &grid, n, seed)?);
        if !shells.is_empty() {
            rows.extend(estimate_p3(v, &grid, &shells, n, seed)?);
        }
    }
    write_estimates_csv(create(&dir.join("estimates.csv"))?, &rows)?;
    for r in &rows {
        println!("{:<9} {:<14} param {:<12.6} estimate {:.6}", r.constant.name(), r.variant.to_string(), r.param, r.estimate);
    }
    Ok(())
}

fn check(c: &Common) -> Result<()> {
    let cfg = load(c)?;
    let report = check_conditions(cfg.nu, cfg.beta()?, &cfg.interpolant()?, &cfg.grid()?, &cfg.constants);
    print!("{report}");
    Ok(())
}

fn postprocess_snapshot(c: &Common, path: &Path) -> Result<()> {
    let cfg = load(c)?;
    let nudge = cfg.nudge_config()?;
    let snap = Snapshot::load(path, Some(&nudge.grid_truth))?;
    let dir = out_dir(c)?;
    let g = nudge.build_forcing()?;
    let vn = project_low(&snap.field, &nudge.cutoff_n);
    let state = postprocess(&vn, &g, nudge.nu, &nudge.cutoff_n)?;
    Snapshot::new(snap.time, state.combined).save(&dir.join("postprocessed.nsf2"))?;
    println!("wrote postprocessed.nsf2 (t = {})", snap.time);
    if !cfg.probe.cutoffs.is_empty() {
        let mut rows = Vec::new();
        for &k in &cfg.probe.cutoffs {
            let cut = ShellCutoff::new(k)?;
            let est = lipschitz_probe(&g, nudge.nu, &cut, cfg.probe.radius, cfg.probe.pairs, cfg.seed)?;
            println!("kappa_N = {k}: ratio_L2 {:.4e}, ratio_H1 {:.4e}", est.ratio_l2, est.ratio_h1);
            rows.push(est);
        }
        write_lipschitz_csv(create(&dir.join("lipschitz.csv"))?, &rows)?;
    }
    Ok(())
}
