//! Error time series of the Galerkin and postprocessed approximations.

use std::io::Write;

use crate::error::{Error, Result};
use crate::field::SpectralVelocity;
use crate::grid::ShellCutoff;
use crate::ops::{l2_norm, project_high, project_low, sobolev_norm};
use crate::postprocess::postprocess;
use crate::snapshot::Snapshot;

/// Errors against the truth at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorRow {
    pub t: f64,
    /// `|vN - u|`
    pub err_sgm_l2: f64,
    pub err_sgm_h1: f64,
    /// `|vN + Phi_1(vN) - u|`
    pub err_ppgm_l2: f64,
    pub err_ppgm_h1: f64,
    /// `|vN - P_N u|`
    pub err_lowmodes_l2: f64,
    /// `|Q_N u|`, kept for consistency checks; not written to CSV.
    pub high_modes_l2: f64,
}

impl ErrorRow {
    pub fn compute(
        t: f64,
        truth: &SpectralVelocity,
        nudged: &SpectralVelocity,
        g: &SpectralVelocity,
        nu: f64,
        cutoff: &ShellCutoff,
    ) -> Result<Self> {
        truth.check_same_grid(nudged)?;
        let sgm = nudged - truth;
        let ppgm = &postprocess(nudged, g, nu, cutoff)?.combined - truth;
        let low = nudged - &project_low(truth, cutoff);
        Ok(ErrorRow {
            t,
            err_sgm_l2: l2_norm(&sgm),
            err_sgm_h1: sobolev_norm(&sgm, 1.0),
            err_ppgm_l2: l2_norm(&ppgm),
            err_ppgm_h1: sobolev_norm(&ppgm, 1.0),
            err_lowmodes_l2: l2_norm(&low),
            high_modes_l2: l2_norm(&project_high(truth, cutoff)),
        })
    }

    /// `err_lowmodes <= err_sgm + |Q_N u|` up to rounding.
    pub fn triangle_holds(&self) -> bool {
        self.err_lowmodes_l2 <= (self.err_sgm_l2 + self.high_modes_l2) * (1.0 + 1e-12)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ErrorSeries {
    pub rows: Vec<ErrorRow>,
}

pub const ERROR_CSV_HEADER: [&str; 6] = [
    "t",
    "err_sgm_L2",
    "err_sgm_H1",
    "err_ppgm_L2",
    "err_ppgm_H1",
    "err_lowmodes_L2",
];

impl ErrorSeries {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(ERROR_CSV_HEADER)?;
        for r in &self.rows {
            out.write_record([
                r.t.to_string(),
                r.err_sgm_l2.to_string(),
                r.err_sgm_h1.to_string(),
                r.err_ppgm_l2.to_string(),
                r.err_ppgm_h1.to_string(),
                r.err_lowmodes_l2.to_string(),
            ])?;
        }
        out.flush().map_err(|e| Error::io("error series csv", e))
    }

    /// Rows with `t_a <= t <= t_b`.
    pub fn window(&self, t_a: f64, t_b: f64) -> impl Iterator<Item = &ErrorRow> {
        self.rows.iter().filter(move |r| r.t >= t_a && r.t <= t_b)
    }
}

/// Errors at every common sample time of two time-aligned snapshot streams.
pub fn error_series(
    truth: &[Snapshot],
    nudged: &[Snapshot],
    g: &SpectralVelocity,
    nu: f64,
    cutoff: &ShellCutoff,
) -> Result<ErrorSeries> {
    if truth.len() != nudged.len() {
        return Err(Error::TimeMismatch(format!(
            "{} truth snapshots but {} nudged snapshots",
            truth.len(),
            nudged.len()
        )));
    }
    let mut rows = Vec::with_capacity(truth.len());
    for (a, b) in truth.iter().zip(nudged) {
        if (a.time - b.time).abs() > 1e-12 * a.time.abs().max(1.0) {
            return Err(Error::TimeMismatch(format!(
                "truth at t = {} paired with nudged state at t = {}",
                a.time, b.time
            )));
        }
        rows.push(ErrorRow::compute(a.time, &a.field, &b.field, g, nu, cutoff)?);
    }
    Ok(ErrorSeries { rows })
}

/// Outcome of comparing the two halves of a late window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniformCheck {
    /// sup over the second half divided by sup over the first half.
    pub ratio: f64,
    pub pass: bool,
    pub window: (f64, f64),
}

/// Splits the series at `t_first + split (t_last - t_first)`; the part after
/// that point is the post-transient window, which is halved in time (a
/// sample exactly at the midpoint belongs to both halves). Passes
/// iff `sup err_ppgm_L2` over the second half is within a factor 2 of that
/// over the first half.
pub fn uniform_time_check(series: &ErrorSeries, split: f64) -> Result<UniformCheck> {
    if !(0.0..1.0).contains(&split) {
        return Err(Error::InvalidParameter(format!("split must lie in [0, 1), got {split}")));
    }
    let (first, last) = match (series.rows.first(), series.rows.last()) {
        (Some(a), Some(b)) => (a.t, b.t),
        _ => return Err(Error::Fit("empty error series".into())),
    };
    if !(last > first) {
        return Err(Error::Fit("error series spans no time".into()));
    }
    let start = first + split * (last - first);
    let middle = 0.5 * (start + last);
    let sup = |lo: f64, hi: f64| {
        series
            .rows
            .iter()
            .filter(|r| r.t >= lo && r.t <= hi)
            .map(|r| r.err_ppgm_l2)
            .fold(None, |m: Option<f64>, e| Some(m.map_or(e, |m| m.max(e))))
    };
    let (a, b) = match (sup(start, middle), sup(middle, last)) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::Fit(format!(
                "post-transient window [{start}, {last}] has an empty half"
            )))
        }
    };
    let ratio = if a == 0.0 && b == 0.0 { 1.0 } else { b / a };
    Ok(UniformCheck {
        ratio,
        pass: (0.5..=2.0).contains(&ratio),
        window: (start, last),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::random::{random_field, FieldKind};
    use std::f64::consts::PI;

    fn row(t: f64, e: f64) -> ErrorRow {
        ErrorRow {
            t,
            err_sgm_l2: e,
            err_sgm_h1: e,
            err_ppgm_l2: e,
            err_ppgm_h1: e,
            err_lowmodes_l2: 0.0,
            high_modes_l2: 0.0,
        }
    }

    #[test]
    fn uniform_examples() {
        let constant = ErrorSeries {
            rows: (0..=20).map(|i| row(i as f64, 3.0)).collect(),
        };
        let c = uniform_time_check(&constant, 0.5).unwrap();
        assert_eq!(c.ratio, 1.0);
        assert!(c.pass);
        assert_eq!(c.window, (10.0, 20.0));

        // x10 per half of the window [10, 20]
        let growing = ErrorSeries {
            rows: (0..=20).map(|i| row(i as f64, 10f64.powf(i as f64 / 5.0))).collect(),
        };
        let c = uniform_time_check(&growing, 0.5).unwrap();
        assert!((c.ratio - 10.0).abs() < 1e-9);
        assert!(!c.pass);

        assert!(uniform_time_check(&ErrorSeries::default(), 0.5).is_err());
        let single = ErrorSeries { rows: vec![row(1.0, 1.0)] };
        assert!(uniform_time_check(&single, 0.5).is_err());
    }

    #[test]
    fn definitions() {
        let grid = make_grid(2.0 * PI, 32).unwrap();
        let cut = ShellCutoff::new(4.0).unwrap();
        let u = random_field(&grid, FieldKind::Solenoidal, 10.0, 1);
        let g = SpectralVelocity::zeros(&grid);
        let projected = project_low(&u, &cut);
        let r = ErrorRow::compute(0.0, &u, &projected, &g, 1.0, &cut).unwrap();
        assert_eq!(r.err_lowmodes_l2, 0.0);
        assert!((r.err_sgm_l2 - l2_norm(&project_high(&u, &cut))).abs() < 1e-15);
        assert!(r.triangle_holds());

        let zero = SpectralVelocity::zeros(&grid);
        let r = ErrorRow::compute(0.0, &zero, &zero, &zero, 1.0, &cut).unwrap();
        assert_eq!([r.err_sgm_l2, r.err_sgm_h1, r.err_ppgm_l2, r.err_ppgm_h1, r.err_lowmodes_l2], [0.0; 5]);
    }

    #[test]
    fn alignment_and_csv() {
        let grid = make_grid(2.0 * PI, 16).unwrap();
        let cut = ShellCutoff::new(3.0).unwrap();
        let zero = SpectralVelocity::zeros(&grid);
        let u = random_field(&grid, FieldKind::Solenoidal, 5.0, 2);
        let truth = vec![Snapshot::new(0.0, u.clone()), Snapshot::new(1.0, u.clone())];
        let nudged = vec![Snapshot::new(0.0, zero.clone()), Snapshot::new(1.5, zero.clone())];
        assert!(matches!(
            error_series(&truth, &nudged, &zero, 1.0, &cut),
            Err(Error::TimeMismatch(_))
        ));
        assert!(matches!(
            error_series(&truth, &nudged[..1], &zero, 1.0, &cut),
            Err(Error::TimeMismatch(_))
        ));
        let nudged = vec![Snapshot::new(0.0, zero.clone()), Snapshot::new(1.0, zero)];
        let s = error_series(&truth, &nudged, &SpectralVelocity::zeros(&grid), 1.0, &cut).unwrap();
        assert!(s.rows.iter().all(|r| r.triangle_holds()));
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,err_sgm_L2,err_sgm_H1,err_ppgm_L2,err_ppgm_H1,err_lowmodes_L2\n"));
        assert_eq!(text.lines().count(), 3);
    }
}
