//! Convergence sweeps over the Galerkin cutoff and power-law fits of the
//! late-time errors against `lambda_{N+1}`.

use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::field::SpectralVelocity;
use crate::grid::ShellCutoff;
use crate::ops::log_factor;
use crate::run::{run_lockstep, NudgeConfig};
use crate::series::ErrorRow;

/// Least-squares line through `(ln lambda, ln err)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
}

pub fn fit_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 points, got {}", points.len())));
    }
    if let Some(&(l, e)) = points.iter().find(|(l, e)| !(*l > 0.0 && *e > 0.0)) {
        return Err(Error::Fit(format!("nonpositive point ({l}, {e})")));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all abscissae coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(SlopeFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
    })
}

/// Sup-in-window errors for one cutoff.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub kappa_n: f64,
    pub lambda_next: f64,
    pub l_n: f64,
    pub sup_sgm_l2: f64,
    pub sup_ppgm_l2: f64,
    pub sup_sgm_h1: f64,
    pub sup_ppgm_h1: f64,
    /// Whether the row entered the slope fits.
    pub fitted: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Slopes {
    pub sgm_l2: SlopeFit,
    pub ppgm_l2: SlopeFit,
    pub sgm_h1: SlopeFit,
    pub ppgm_h1: SlopeFit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub slopes: Option<Slopes>,
    /// Why `slopes` is missing, if it is.
    pub note: Option<String>,
    pub window: (f64, f64),
    /// Sup SGM `L^2` error of the run with `kappa_N` at the dealias radius.
    pub floor: Option<f64>,
}

pub const CONVERGENCE_CSV_HEADER: [&str; 7] = [
    "kappa_N",
    "lambda_next",
    "L_N",
    "sup_sgm_L2",
    "sup_ppgm_L2",
    "sup_sgm_H1",
    "sup_ppgm_H1",
];

impl ConvergenceReport {
    /// PPGM sup error strictly below SGM sup error in `L^2` at every cutoff.
    pub fn ppgm_below_sgm_l2(&self) -> bool {
        self.rows.iter().all(|r| r.sup_ppgm_l2 < r.sup_sgm_l2)
    }

    pub fn ppgm_below_sgm_h1(&self) -> bool {
        self.rows.iter().all(|r| r.sup_ppgm_h1 < r.sup_sgm_h1)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(CONVERGENCE_CSV_HEADER)?;
        for r in &self.rows {
            out.write_record([
                r.kappa_n.to_string(),
                r.lambda_next.to_string(),
                r.l_n.to_string(),
                r.sup_sgm_l2.to_string(),
                r.sup_ppgm_l2.to_string(),
                r.sup_sgm_h1.to_string(),
                r.sup_ppgm_h1.to_string(),
            ])?;
        }
        out.flush().map_err(|e| Error::io("convergence csv", e))
    }

    /// Gnuplot script plotting the sup errors of `csv_name` against `lambda_next`.
    pub fn gnuplot_script(&self, csv_name: &str) -> String {
        format!(
            "set datafile separator ','\n\
             set key autotitle columnhead\n\
             set logscale xy\n\
             set xlabel 'lambda_{{N+1}}'\n\
             set ylabel 'sup error over t in [{a}, {b}]'\n\
             set terminal pngcairo size 900,600\n\
             set output 'convergence.png'\n\
             plot '{csv_name}' using 2:4 with linespoints, \\\n\
             \x20    '' using 2:5 with linespoints, \\\n\
             \x20    '' using 2:6 with linespoints, \\\n\
             \x20    '' using 2:7 with linespoints\n",
            a = self.window.0,
            b = self.window.1,
        )
    }
}

impl fmt::Display for ConvergenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "window: t in [{}, {}]", self.window.0, self.window.1)?;
        if let Some(floor) = self.floor {
            writeln!(f, "floor (sup SGM L2 at the dealias radius): {floor:.3e}")?;
        }
        writeln!(
            f,
            "{:>8} {:>10} {:>8} {:>12} {:>12} {:>12} {:>12} {:>6}",
            "kappa_N", "lambda", "L_N", "sgm_L2", "ppgm_L2", "sgm_H1", "ppgm_H1", "fit"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:>8} {:>10} {:>8.4} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>6}",
                r.kappa_n,
                r.lambda_next,
                r.l_n,
                r.sup_sgm_l2,
                r.sup_ppgm_l2,
                r.sup_sgm_h1,
                r.sup_ppgm_h1,
                if r.fitted { "yes" } else { "no" }
            )?;
        }
        match &self.slopes {
            Some(s) => {
                for (name, fit) in [
                    ("sgm_L2", s.sgm_l2),
                    ("ppgm_L2", s.ppgm_l2),
                    ("sgm_H1", s.sgm_h1),
                    ("ppgm_H1", s.ppgm_h1),
                ] {
                    writeln!(f, "slope {name:<8} {:+.4}  (rms residual {:.3e})", fit.slope, fit.residual)?;
                }
            }
            None => writeln!(f, "slopes: {}", self.note.as_deref().unwrap_or("not fitted"))?,
        }
        writeln!(f, "PPGM below SGM at every cutoff: L2 {}, H1 {}", self.ppgm_below_sgm_l2(), self.ppgm_below_sgm_h1())
    }
}

/// Options for [`convergence_sweep`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepOptions {
    /// Late-time window `[t_a, t_b]` over which sup errors are taken.
    pub window: (f64, f64),
    /// Also nudge with `kappa_N` at the dealias radius to measure the floor
    /// and drop cutoffs whose SGM error is within 10x of it from the fits.
    pub measure_floor: bool,
}

impl SweepOptions {
    /// Window `[t_end / 2, t_end]` relative to the run start, with the floor run.
    pub fn default_for(config: &NudgeConfig) -> Self {
        SweepOptions {
            window: (0.5 * (config.t0 + config.t_end), config.t_end),
            measure_floor: true,
        }
    }
}

#[derive(Clone, Copy)]
struct Sups([f64; 4]);

impl Sups {
    fn update(&mut self, r: &ErrorRow) {
        let v = [r.err_sgm_l2, r.err_ppgm_l2, r.err_sgm_h1, r.err_ppgm_h1];
        for (s, x) in self.0.iter_mut().zip(v) {
            *s = s.max(x);
        }
    }
}

/// Runs all cutoffs against one shared truth trajectory started from `u0`
/// and reports sup errors over the window together with fitted slopes.
pub fn convergence_sweep(
    base: &NudgeConfig,
    cutoffs: &[ShellCutoff],
    u0: &SpectralVelocity,
    options: &SweepOptions,
) -> Result<ConvergenceReport> {
    base.validate()?;
    if cutoffs.is_empty() {
        return Err(Error::Cutoff("no cutoffs given".into()));
    }
    if cutoffs.windows(2).any(|w| !(w[1].kappa() > w[0].kappa())) {
        return Err(Error::Cutoff("cutoffs must be strictly increasing".into()));
    }
    let grid = base.grid_truth.clone();
    let radius = grid.dealias_radius() as f64;
    if let Some(c) = cutoffs.iter().find(|c| c.kappa() >= radius) {
        return Err(Error::Cutoff(format!(
            "kappa_N = {} is not below the dealias radius {radius}",
            c.kappa()
        )));
    }
    let (t_a, t_b) = options.window;
    if !(t_a > base.t0 && t_a < t_b && t_b <= base.t_end) {
        return Err(Error::InvalidParameter(format!(
            "window [{t_a}, {t_b}] must lie inside ({}, {}]",
            base.t0, base.t_end
        )));
    }

    let mut all = cutoffs.to_vec();
    if options.measure_floor {
        all.push(ShellCutoff::new(radius)?);
    }
    let g = base.build_forcing()?;
    let mut sups = vec![Sups([0.0; 4]); all.len()];
    let mut seen = 0usize;
    run_lockstep(base, &all, u0, |s| {
        if s.time < t_a - 1e-9 * base.dt || s.time > t_b + 1e-9 * base.dt {
            return Ok(());
        }
        seen += 1;
        for (i, (cut, v)) in all.iter().zip(s.nudged).enumerate() {
            if options.measure_floor && i == all.len() - 1 {
                let err = crate::ops::l2_norm(&(v - s.truth));
                sups[i].0[0] = sups[i].0[0].max(err);
                continue;
            }
            let row = ErrorRow::compute(s.time, s.truth, v, &g, base.nu, cut).map_err(|e| {
                Error::Cutoff(format!("kappa_N = {}: {e}", cut.kappa()))
            })?;
            sups[i].update(&row);
        }
        Ok(())
    })
    .map_err(|e| match e {
        Error::BlowUp { time, what } => Error::BlowUp {
            time,
            what: format!("{what} during the sweep over {:?}", cutoffs.iter().map(|c| c.kappa()).collect::<Vec<_>>()),
        },
        other => other,
    })?;
    if seen == 0 {
        return Err(Error::InvalidParameter(format!("no samples fall inside the window [{t_a}, {t_b}]")));
    }

    let floor = options.measure_floor.then(|| sups[all.len() - 1].0[0]);
    let lambda1 = grid.lambda1();
    let mut rows = Vec::with_capacity(cutoffs.len());
    for (cut, s) in cutoffs.iter().zip(&sups) {
        let [sgm_l2, ppgm_l2, sgm_h1, ppgm_h1] = s.0;
        rows.push(ConvergenceRow {
            kappa_n: cut.kappa(),
            lambda_next: cut.lambda_next(&grid),
            l_n: log_factor(cut, lambda1)?,
            sup_sgm_l2: sgm_l2,
            sup_ppgm_l2: ppgm_l2,
            sup_sgm_h1: sgm_h1,
            sup_ppgm_h1: ppgm_h1,
            fitted: floor.is_none_or(|fl| sgm_l2 >= 10.0 * fl),
        });
    }
    let (slopes, note) = fit_rows(&rows);
    Ok(ConvergenceReport {
        rows,
        slopes,
        note,
        window: (t_a, t_b),
        floor,
    })
}

fn fit_rows(rows: &[ConvergenceRow]) -> (Option<Slopes>, Option<String>) {
    let used: Vec<&ConvergenceRow> = rows.iter().filter(|r| r.fitted).collect();
    if used.len() < 3 {
        return (
            None,
            Some(format!("insufficient points: {} cutoff(s) usable, 3 required", used.len())),
        );
    }
    let fit = |pick: fn(&ConvergenceRow) -> f64| {
        fit_slope(&used.iter().map(|r| (r.lambda_next, pick(r))).collect::<Vec<_>>())
    };
    match (
        fit(|r| r.sup_sgm_l2),
        fit(|r| r.sup_ppgm_l2),
        fit(|r| r.sup_sgm_h1),
        fit(|r| r.sup_ppgm_h1),
    ) {
        (Ok(sgm_l2), Ok(ppgm_l2), Ok(sgm_h1), Ok(ppgm_h1)) => (
            Some(Slopes {
                sgm_l2,
                ppgm_l2,
                sgm_h1,
                ppgm_h1,
            }),
            None,
        ),
        (a, b, c, d) => {
            let msg = [a.err(), b.err(), c.err(), d.err()]
                .into_iter()
                .flatten()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join("; ");
            (None, Some(msg))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forcing::ForcingSpec;
    use crate::grid::make_grid;
    use crate::interp::InterpolantSpec;
    use crate::ops::log_factor_from_ratio;
    use crate::random::{random_field, FieldKind};
    use crate::run::InitialGuess;
    use std::f64::consts::PI;

    #[test]
    fn exact_power_laws() {
        let pts: Vec<(f64, f64)> = [4.0, 16.0, 64.0].iter().map(|&l: &f64| (l, 1.0 / l)).collect();
        let fit = fit_slope(&pts).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
        let flat = fit_slope(&[(2.0, 3.0), (5.0, 3.0), (9.0, 3.0)]).unwrap();
        assert!(flat.slope.abs() < 1e-15);
        assert!(fit_slope(&pts[..2]).is_err());
        assert!(fit_slope(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
    }

    #[test]
    fn log_corrected_rate() {
        // err = L_N / lambda with L_N = (1 + ln(lambda / lambda_1))^{1/2}
        let pts: Vec<(f64, f64)> = [16.0, 64.0, 256.0]
            .iter()
            .map(|&l: &f64| (l, log_factor_from_ratio(l) / l))
            .collect();
        let slope = fit_slope(&pts).unwrap().slope;
        // independent evaluation of the same regression in closed form
        let x: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
        let y: Vec<f64> = pts.iter().map(|&(l, _)| 0.5 * (1.0 + l.ln()).ln() - l.ln()).collect();
        let oracle = (y[2] - y[0]) / (x[2] - x[0]);
        assert!((slope - oracle).abs() < 1e-12);
        assert!(slope > -1.0 && slope < -0.8, "{slope}");
    }

    fn base() -> NudgeConfig {
        NudgeConfig {
            nu: 0.05,
            beta: 0.4,
            forcing: ForcingSpec::new(1.0, 1.0, 10.0, 1).with_tail(1e-3, 1.0),
            grid_truth: make_grid(2.0 * PI, 32).unwrap(),
            cutoff_n: ShellCutoff::new(4.0).unwrap(),
            interp: InterpolantSpec::FourierShell { kappa_k: 3.0 },
            dt: 0.05,
            t0: 0.0,
            t_end: 4.0,
            sample_every: 10,
            v0: InitialGuess::Zero,
        }
    }

    #[test]
    fn single_cutoff_has_no_slopes_and_is_deterministic() {
        let cfg = base();
        let u0 = random_field(&cfg.grid_truth, FieldKind::Solenoidal, 6.0, 2).scaled(0.05);
        let opts = SweepOptions::default_for(&cfg);
        let a = convergence_sweep(&cfg, &[ShellCutoff::new(4.0).unwrap()], &u0, &opts).unwrap();
        assert!(a.slopes.is_none());
        assert!(a.note.as_deref().unwrap().contains("insufficient"));
        assert_eq!(a.rows.len(), 1);
        assert!(a.floor.is_some());
        let b = convergence_sweep(&cfg, &[ShellCutoff::new(4.0).unwrap()], &u0, &opts).unwrap();
        assert_eq!(a, b);
        let mut csv = Vec::new();
        a.write_csv(&mut csv).unwrap();
        assert!(String::from_utf8(csv)
            .unwrap()
            .starts_with("kappa_N,lambda_next,L_N,sup_sgm_L2,sup_ppgm_L2,sup_sgm_H1,sup_ppgm_H1\n"));
        assert!(a.gnuplot_script("report.csv").contains("'report.csv'"));
        assert!(format!("{a}").contains("insufficient"));
    }

    #[test]
    fn rejects_bad_sweeps() {
        let cfg = base();
        let u0 = SpectralVelocity::zeros(&cfg.grid_truth);
        let opts = SweepOptions::default_for(&cfg);
        let c = |k: f64| ShellCutoff::new(k).unwrap();
        assert!(convergence_sweep(&cfg, &[c(4.0), c(3.0), c(5.0)], &u0, &opts).is_err());
        assert!(convergence_sweep(&cfg, &[c(4.0), c(10.0)], &u0, &opts).is_err());
        let bad = SweepOptions { window: (0.0, 2.0), ..opts };
        assert!(convergence_sweep(&cfg, &[c(4.0)], &u0, &bad).is_err());
    }
}
