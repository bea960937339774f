//! CNAB2 time stepping for the truth and the nudged Galerkin systems.
//!
//! Stiff mode-diagonal terms (viscosity, and the Fourier-projector feedback)
//! use Crank-Nicolson; everything else uses second order Adams-Bashforth,
//! with an explicit Euler start.

use crate::error::{Error, Result};
use crate::field::SpectralVelocity;
use crate::grid::{ShellCutoff, WaveGrid};
use crate::interp::{apply_interpolant, InterpolantSpec};
use crate::ops::{bilinear_b, leray_project_in_place, project_low};

/// `out = [(1 - dt c/2) x + dt (1.5 e - 0.5 e_prev + s)] / (1 + dt c/2)` per mode.
fn cnab_update(
    x: &SpectralVelocity,
    rate: &[f64],
    explicit: &SpectralVelocity,
    previous: Option<&SpectralVelocity>,
    source: Option<&SpectralVelocity>,
    dt: f64,
) -> SpectralVelocity {
    let mut out = x.clone();
    let (wa, wb) = if previous.is_some() { (1.5, -0.5) } else { (1.0, 0.0) };
    for c in 0..2 {
        let e = explicit.component(c);
        let p = previous.map(|p| p.component(c));
        let s = source.map(|s| s.component(c));
        let dst = out.component_mut(c);
        for (i, (slot, &r)) in dst.iter_mut().zip(rate).enumerate() {
            let mut rhs = e[i] * wa;
            if let Some(p) = p {
                rhs += p[i] * wb;
            }
            if let Some(s) = s {
                rhs += s[i];
            }
            let half = 0.5 * dt * r;
            *slot = (*slot * (1.0 - half) + rhs * dt) / (1.0 + half);
        }
    }
    out
}

fn ensure_finite(f: &SpectralVelocity, time: f64, what: &str) -> Result<()> {
    if f.is_finite() {
        Ok(())
    } else {
        Err(Error::BlowUp {
            time,
            what: what.to_string(),
        })
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if dt >= 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("time step must be finite and nonnegative, got {dt}")))
    }
}

/// Integrator for `du/dt + nu A u + B(u, u) = g` on the full grid.
#[derive(Clone, Debug)]
pub struct TruthStepper {
    forcing: SpectralVelocity,
    rate: Vec<f64>,
    dt: f64,
    advect: bool,
    previous: Option<SpectralVelocity>,
}

impl TruthStepper {
    pub fn new(forcing: &SpectralVelocity, nu: f64, dt: f64) -> Result<Self> {
        check_dt(dt)?;
        let grid = forcing.grid();
        Ok(TruthStepper {
            forcing: forcing.clone(),
            rate: grid.lambdas().iter().map(|l| nu * l).collect(),
            dt,
            advect: true,
            previous: None,
        })
    }

    /// Drops the nonlinear term (linear diagnostics only).
    pub fn without_advection(mut self) -> Self {
        self.advect = false;
        self
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Forgets the Adams-Bashforth history.
    pub fn reset(&mut self) {
        self.previous = None;
    }

    /// Advances `u` by one step; `time` is only used in error reports.
    pub fn step(&mut self, u: &SpectralVelocity, time: f64) -> Result<SpectralVelocity> {
        u.check_same_grid(&self.forcing)?;
        let mut explicit = self.forcing.clone();
        if self.advect {
            explicit.axpy(-1.0, &bilinear_b(u, u)?);
        }
        let next = cnab_update(u, &self.rate, &explicit, self.previous.as_ref(), None, self.dt);
        ensure_finite(&next, time + self.dt, "truth state")?;
        self.previous = Some(explicit);
        Ok(next)
    }
}

/// One truth step without history (Crank-Nicolson with an explicit Euler
/// nonlinear term).
pub fn step_truth(u: &SpectralVelocity, g: &SpectralVelocity, nu: f64, dt: f64) -> Result<SpectralVelocity> {
    TruthStepper::new(g, nu, dt)?.step(u, 0.0)
}

/// Smallest even size `>= 8` whose 2/3-rule square holds all of `P_N` and
/// whose prime factors are at most 7. Products of two `P_N` fields are then
/// resolved without aliasing into `P_N`.
pub fn compact_grid_points(cutoff: &ShellCutoff) -> usize {
    let kmax = (cutoff.ksq_max() as f64).sqrt().floor() as usize;
    let mut m = (3 * kmax + 1).max(8);
    loop {
        if m.is_multiple_of(2) && is_7_smooth(m) {
            return m;
        }
        m += 1;
    }
}

fn is_7_smooth(mut n: usize) -> bool {
    for p in [2, 3, 5, 7] {
        while n.is_multiple_of(p) {
            n /= p;
        }
    }
    n == 1
}

/// Integrator for the nudged Galerkin system
/// `dv/dt + nu A v + P_N B(v, v) = P_N g - beta P_N P_sigma (I_h(v) - I_h(u))`.
///
/// The state lives on a compact grid just large enough to hold `P_N` without
/// aliasing (or on the truth grid if that is smaller). Observations are given
/// on the truth grid. For the Fourier projector the feedback is folded into
/// the implicit part; for cell averages it is explicit, which requires
/// `dt * beta < 1` for stability.
#[derive(Clone, Debug)]
pub struct NudgedStepper {
    truth: WaveGrid,
    work: WaveGrid,
    cutoff: ShellCutoff,
    interp: InterpolantSpec,
    beta: f64,
    dt: f64,
    forcing: SpectralVelocity,
    rate: Vec<f64>,
    advect: bool,
    previous: Option<SpectralVelocity>,
}

impl NudgedStepper {
    pub fn new(
        g: &SpectralVelocity,
        nu: f64,
        beta: f64,
        cutoff: ShellCutoff,
        interp: InterpolantSpec,
        dt: f64,
    ) -> Result<Self> {
        check_dt(dt)?;
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta must be finite and nonnegative, got {beta}")));
        }
        let truth = g.grid().clone();
        if cutoff.kappa() > truth.dealias_radius() as f64 {
            return Err(Error::Cutoff(format!(
                "kappa_N = {} exceeds the dealias radius {} of the truth grid",
                cutoff.kappa(),
                truth.dealias_radius()
            )));
        }
        interp.validate(&truth)?;
        let points = compact_grid_points(&cutoff);
        let work = if points < truth.points() {
            WaveGrid::new(truth.length(), points)?
        } else {
            truth.clone()
        };
        let forcing = project_low(g, &cutoff).resample(&work)?;
        let observed = match interp {
            InterpolantSpec::FourierShell { kappa_k } => Some(ShellCutoff::new(kappa_k)?),
            InterpolantSpec::FiniteVolume { .. } => None,
        };
        let rate = (0..work.len())
            .map(|idx| {
                let ksq = work.ksq(idx);
                let damping = match &observed {
                    Some(k) if k.contains_ksq(ksq) && cutoff.contains_ksq(ksq) => beta,
                    _ => 0.0,
                };
                nu * work.lambda(idx) + damping
            })
            .collect();
        Ok(NudgedStepper {
            truth,
            work,
            cutoff,
            interp,
            beta,
            dt,
            forcing,
            rate,
            advect: true,
            previous: None,
        })
    }

    pub fn without_advection(mut self) -> Self {
        self.advect = false;
        self
    }

    /// Grid the nudged state is stored on.
    pub fn work_grid(&self) -> &WaveGrid {
        &self.work
    }

    pub fn truth_grid(&self) -> &WaveGrid {
        &self.truth
    }

    pub fn cutoff(&self) -> &ShellCutoff {
        &self.cutoff
    }

    pub fn reset(&mut self) {
        self.previous = None;
    }

    /// `P_N v0` on the work grid.
    pub fn initial_state(&self, v0: &SpectralVelocity) -> Result<SpectralVelocity> {
        project_low(v0, &self.cutoff).resample(&self.work)
    }

    /// Nudged state expressed on the truth grid.
    pub fn to_truth(&self, v: &SpectralVelocity) -> Result<SpectralVelocity> {
        v.resample(&self.truth)
    }

    /// `P_N P_sigma f` for `f` on the truth grid, returned on the work grid.
    fn low_solenoidal(&self, f: &SpectralVelocity) -> Result<SpectralVelocity> {
        let mut p = project_low(f, &self.cutoff);
        leray_project_in_place(&mut p);
        p.resample(&self.work)
    }

    /// `P_N P_sigma I_h(u)` for a truth-grid field `u`.
    pub fn observe(&self, u: &SpectralVelocity) -> Result<SpectralVelocity> {
        if *u.grid() != self.truth {
            return Err(Error::GridMismatch("observations must live on the truth grid".into()));
        }
        self.low_solenoidal(&apply_interpolant(&self.interp, u)?)
    }

    /// Advances `v` (work grid) by one step. `observation` is
    /// `P_N P_sigma I_h(u)` at the midpoint of the step, as produced by
    /// [`NudgedStepper::observe`].
    pub fn step(&mut self, v: &SpectralVelocity, observation: &SpectralVelocity, time: f64) -> Result<SpectralVelocity> {
        if *v.grid() != self.work || *observation.grid() != self.work {
            return Err(Error::GridMismatch("nudged state and observation must live on the work grid".into()));
        }
        let mut explicit = self.forcing.clone();
        if self.advect {
            let b = project_low(&bilinear_b(v, v)?, &self.cutoff);
            explicit.axpy(-1.0, &b);
        }
        if !self.interp.is_mode_diagonal() && self.beta != 0.0 {
            let fed_back = self.observe(&self.to_truth(v)?)?;
            explicit.axpy(-self.beta, &fed_back);
        }
        let source = observation.scaled(self.beta);
        let mut next = cnab_update(v, &self.rate, &explicit, self.previous.as_ref(), Some(&source), self.dt);
        let grid = self.work.clone();
        let cutoff = self.cutoff;
        next.retain_modes(|idx| cutoff.contains_ksq(grid.ksq(idx)));
        ensure_finite(&next, time + self.dt, "nudged state")?;
        self.previous = Some(explicit);
        Ok(next)
    }
}
