//! Lockstep integration of the truth and one or more nudged systems.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralVelocity;
use crate::forcing::{build_forcing, ForcingSpec};
use crate::grid::{ShellCutoff, WaveGrid};
use crate::interp::InterpolantSpec;
use crate::ops::{h1_norm, l2_norm};
use crate::random::{random_field, FieldKind};
use crate::snapshot::Snapshot;
use crate::solver::{NudgedStepper, TruthStepper};

/// How the nudged system is initialized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "policy", content = "seed")]
pub enum InitialGuess {
    Zero,
    /// Random solenoidal field with the given seed, projected onto `P_N`.
    Seeded(u64),
}

/// Parameters of one assimilation run.
#[derive(Clone, Debug)]
pub struct NudgeConfig {
    pub nu: f64,
    pub beta: f64,
    pub forcing: ForcingSpec,
    pub grid_truth: WaveGrid,
    pub cutoff_n: ShellCutoff,
    pub interp: InterpolantSpec,
    pub dt: f64,
    pub t0: f64,
    pub t_end: f64,
    /// Emit a sample every this many steps (plus the initial and final states).
    pub sample_every: usize,
    pub v0: InitialGuess,
}

impl NudgeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0) {
            return Err(Error::InvalidParameter(format!("nu must be positive, got {}", self.nu)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta must be nonnegative, got {}", self.beta)));
        }
        if !(self.t_end >= self.t0) {
            return Err(Error::InvalidParameter(format!(
                "t_end = {} precedes t0 = {}",
                self.t_end, self.t0
            )));
        }
        if self.sample_every == 0 {
            return Err(Error::InvalidParameter("sample_every must be at least 1".into()));
        }
        let radius = self.grid_truth.dealias_radius() as f64;
        if self.cutoff_n.kappa() > radius {
            return Err(Error::Cutoff(format!(
                "kappa_N = {} exceeds the dealias radius {radius}",
                self.cutoff_n.kappa()
            )));
        }
        self.interp.validate(&self.grid_truth)
    }

    /// Number of time steps between `t0` and `t_end`.
    pub fn steps(&self) -> usize {
        ((self.t_end - self.t0) / self.dt).round() as usize
    }

    pub fn build_forcing(&self) -> Result<SpectralVelocity> {
        build_forcing(&self.forcing, &self.grid_truth, self.nu)
    }

    /// The unprojected initial guess `v0` on the truth grid.
    pub fn initial_guess(&self) -> SpectralVelocity {
        match self.v0 {
            InitialGuess::Zero => SpectralVelocity::zeros(&self.grid_truth),
            InitialGuess::Seeded(seed) => random_field(
                &self.grid_truth,
                FieldKind::Solenoidal,
                self.grid_truth.dealias_radius() as f64,
                seed,
            ),
        }
    }
}

/// Energy diagnostics at one sample time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics {
    pub time: f64,
    pub energy_truth: f64,
    pub enstrophy_truth: f64,
    pub energy_vn: f64,
}

impl Diagnostics {
    pub fn new(time: f64, truth: &SpectralVelocity, nudged: &SpectralVelocity) -> Self {
        Diagnostics {
            time,
            energy_truth: 0.5 * l2_norm(truth).powi(2),
            enstrophy_truth: 0.5 * h1_norm(truth).powi(2),
            energy_vn: 0.5 * l2_norm(nudged).powi(2),
        }
    }
}

pub const DIAGNOSTICS_CSV_HEADER: [&str; 4] = ["t", "energy_truth", "enstrophy_truth", "energy_vN"];

pub fn write_diagnostics_csv<W: Write>(w: W, rows: &[Diagnostics]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(DIAGNOSTICS_CSV_HEADER)?;
    for d in rows {
        out.write_record([
            d.time.to_string(),
            d.energy_truth.to_string(),
            d.enstrophy_truth.to_string(),
            d.energy_vn.to_string(),
        ])?;
    }
    out.flush().map_err(|e| Error::io("diagnostics csv", e))
}

/// States handed to an observer at a sample time. Nudged states are given on
/// the truth grid, one per cutoff, in the order the cutoffs were passed.
pub struct Sample<'a> {
    pub step: usize,
    pub time: f64,
    pub truth: &'a SpectralVelocity,
    pub nudged: &'a [SpectralVelocity],
}

/// Integrates the truth from `u0` and one nudged system per cutoff, all with
/// the settings of `config` (its own `cutoff_n` is ignored). Observations are
/// taken from the truth at every step; `observer` sees every sample.
pub fn run_lockstep(
    config: &NudgeConfig,
    cutoffs: &[ShellCutoff],
    u0: &SpectralVelocity,
    mut observer: impl FnMut(&Sample<'_>) -> Result<()>,
) -> Result<()> {
    config.validate()?;
    if *u0.grid() != config.grid_truth {
        return Err(Error::GridMismatch("initial truth state is not on the truth grid".into()));
    }
    let g = config.build_forcing()?;
    let mut truth = TruthStepper::new(&g, config.nu, config.dt)?;
    let mut systems = Vec::with_capacity(cutoffs.len());
    for cut in cutoffs {
        let mut cfg = config.clone();
        cfg.cutoff_n = *cut;
        cfg.validate()?;
        systems.push(NudgedStepper::new(&g, config.nu, config.beta, *cut, config.interp, config.dt)?);
    }
    let guess = config.initial_guess();
    let mut states = systems
        .iter()
        .map(|s| s.initial_state(&guess))
        .collect::<Result<Vec<_>>>()?;

    let steps = config.steps();
    let mut u = u0.clone();
    let time_of = |step: usize| config.t0 + step as f64 * config.dt;
    observer(&Sample {
        step: 0,
        time: time_of(0),
        truth: &u,
        nudged: &systems_to_truth(&systems, &states)?,
    })?;
    for n in 0..steps {
        let next = truth.step(&u, time_of(n))?;
        let mid = (&u + &next).scaled(0.5);
        for (system, state) in systems.iter_mut().zip(states.iter_mut()) {
            let obs = system.observe(&mid)?;
            *state = system.step(state, &obs, time_of(n))?;
        }
        u = next;
        let step = n + 1;
        if step % config.sample_every == 0 || step == steps {
            observer(&Sample {
                step,
                time: time_of(step),
                truth: &u,
                nudged: &systems_to_truth(&systems, &states)?,
            })?;
        }
    }
    Ok(())
}

fn systems_to_truth(systems: &[NudgedStepper], states: &[SpectralVelocity]) -> Result<Vec<SpectralVelocity>> {
    systems.iter().zip(states).map(|(s, v)| s.to_truth(v)).collect()
}

/// Truth and nudged states at one sample time.
#[derive(Clone, Debug)]
pub struct RunSample {
    pub time: f64,
    pub truth: SpectralVelocity,
    pub nudged: SpectralVelocity,
    pub diagnostics: Diagnostics,
}

/// Everything a single coupled run produced.
#[derive(Clone, Debug, Default)]
pub struct RunOutput {
    pub samples: Vec<RunSample>,
}

impl RunOutput {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.time).collect()
    }

    pub fn truth_snapshots(&self) -> Vec<Snapshot> {
        self.samples.iter().map(|s| Snapshot::new(s.time, s.truth.clone())).collect()
    }

    pub fn nudged_snapshots(&self) -> Vec<Snapshot> {
        self.samples.iter().map(|s| Snapshot::new(s.time, s.nudged.clone())).collect()
    }

    pub fn diagnostics(&self) -> Vec<Diagnostics> {
        self.samples.iter().map(|s| s.diagnostics).collect()
    }

    /// Writes `truth_NNNNNN.nsf2` and `nudged_NNNNNN.nsf2` into `dir`.
    pub fn write_snapshots(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
        for (i, s) in self.samples.iter().enumerate() {
            Snapshot::new(s.time, s.truth.clone()).save(&dir.join(format!("truth_{i:06}.nsf2")))?;
            Snapshot::new(s.time, s.nudged.clone()).save(&dir.join(format!("nudged_{i:06}.nsf2")))?;
        }
        Ok(())
    }
}

/// One coupled run, keeping every sample in memory.
pub fn run_coupled(config: &NudgeConfig, u0_truth: &SpectralVelocity) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    run_lockstep(config, &[config.cutoff_n], u0_truth, |s| {
        let nudged = s.nudged[0].clone();
        out.samples.push(RunSample {
            time: s.time,
            diagnostics: Diagnostics::new(s.time, s.truth, &nudged),
            truth: s.truth.clone(),
            nudged,
        });
        Ok(())
    })?;
    Ok(out)
}

/// Integrates the truth alone from `u0` over `duration`, returning the final
/// state. Used to spin a reference flow up onto its attractor.
pub fn spin_up(g: &SpectralVelocity, nu: f64, dt: f64, duration: f64, u0: &SpectralVelocity) -> Result<SpectralVelocity> {
    let mut stepper = TruthStepper::new(g, nu, dt)?;
    let steps = (duration / dt).round() as usize;
    let mut u = u0.clone();
    for n in 0..steps {
        u = stepper.step(&u, n as f64 * dt)?;
    }
    Ok(u)
}

/// Experimental: nudges against stored truth snapshots, holding each
/// observation fixed until the next snapshot time. Snapshots must be sorted
/// by time and the first one must be at `config.t0`. The observer's `truth`
/// is the most recent snapshot.
pub fn run_offline(
    config: &NudgeConfig,
    truth: &[Snapshot],
    mut observer: impl FnMut(&Sample<'_>) -> Result<()>,
) -> Result<()> {
    config.validate()?;
    let first = truth
        .first()
        .ok_or_else(|| Error::TimeMismatch("no truth snapshots".into()))?;
    if (first.time - config.t0).abs() > 1e-9 * config.dt.max(1.0) {
        return Err(Error::TimeMismatch(format!(
            "first snapshot at t = {} but the run starts at t0 = {}",
            first.time, config.t0
        )));
    }
    if truth.windows(2).any(|w| !(w[1].time > w[0].time)) {
        return Err(Error::TimeMismatch("snapshot times are not strictly increasing".into()));
    }
    let g = config.build_forcing()?;
    let mut system = NudgedStepper::new(&g, config.nu, config.beta, config.cutoff_n, config.interp, config.dt)?;
    let mut v = system.initial_state(&config.initial_guess())?;
    let mut current = 0;
    let mut obs = system.observe(&truth[0].field)?;
    let steps = config.steps();
    let tol = 1e-9 * config.dt;
    for n in 0..=steps {
        let time = config.t0 + n as f64 * config.dt;
        if n > 0 {
            v = system.step(&v, &obs, time - config.dt)?;
        }
        while current + 1 < truth.len() && truth[current + 1].time <= time + tol {
            current += 1;
            obs = system.observe(&truth[current].field)?;
        }
        if n % config.sample_every == 0 || n == steps {
            let nudged = [system.to_truth(&v)?];
            observer(&Sample {
                step: n,
                time,
                truth: &truth[current].field,
                nudged: &nudged,
            })?;
        }
    }
    Ok(())
}
