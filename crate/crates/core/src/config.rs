//! Experiment configuration files (TOML).
//!
//! ```toml
//! nu = 0.05
//! L = 6.283185307179586     # optional, default 2 pi
//! M_truth = 128
//! kappa_N = 16
//! beta = 0.425              # optional, default: largest value the condition checker allows
//! dt = 0.01
//! t0 = 0.0                  # optional
//! t_end = 100.0
//! sample_every = 100
//! v0_policy = "zero"        # or "seeded"
//! seed = 0                  # seeded initial guess and estimator sampling
//! spinup = 20.0             # truth spin-up time before t0
//!
//! interp.type = "fourier"   # or "fv" with interp.cells = 16
//! interp.kappa_K = 4
//!
//! forcing.shell_lo = 1
//! forcing.shell_hi = 1
//! forcing.G = 10
//! forcing.seed = 1
//! forcing.tail_ratio = 1e-4 # optional
//! forcing.tail_decay = 1.0  # optional
//!
//! constants.c0 = 1          # optional stand-ins for the absolute constants
//! constants.c = 1
//! constants.m = 1
//!
//! sweep.cutoffs = [4, 6, 8, 12, 16]
//! sweep.window = [50, 100]  # optional, default [(t0 + t_end)/2, t_end]
//!
//! verify.samples = 200      # interpolant estimator settings, all optional
//! verify.cells = [8, 16]
//! verify.shells = [8, 12, 16]
//!
//! probe.radius = 1.0        # Lipschitz probe run by `postprocess`, optional
//! probe.pairs = 20
//! probe.cutoffs = [4, 8, 16]
//! ```

use std::f64::consts::PI;
use std::path::Path;

use serde::Deserialize;

use crate::conditions::{suggest_beta, AssumedConstants};
use crate::error::{Error, Result};
use crate::field::SpectralVelocity;
use crate::forcing::ForcingSpec;
use crate::grid::{ShellCutoff, WaveGrid};
use crate::interp::InterpolantSpec;
use crate::ops::stokes_apply;
use crate::run::{spin_up, InitialGuess, NudgeConfig};
use crate::sweep::SweepOptions;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InterpKind {
    Fourier,
    Fv,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterpSection {
    #[serde(rename = "type")]
    pub kind: InterpKind,
    #[serde(rename = "kappa_K")]
    pub kappa_k: Option<f64>,
    pub cells: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum V0Policy {
    #[default]
    Zero,
    Seeded,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub cutoffs: Vec<f64>,
    pub window: Option<[f64; 2]>,
    #[serde(default = "yes")]
    pub measure_floor: bool,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    pub samples: usize,
    /// FV resolutions to estimate in addition to the configured interpolant.
    pub cells: Vec<usize>,
    /// Shell radii for the inverse-inequality estimate.
    pub shells: Vec<f64>,
    /// Grid size for the estimators; defaults to `M_truth`.
    #[serde(rename = "M")]
    pub points: Option<usize>,
}

impl Default for VerifySection {
    fn default() -> Self {
        VerifySection {
            samples: 200,
            cells: Vec::new(),
            shells: Vec::new(),
            points: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeSection {
    pub radius: f64,
    pub pairs: usize,
    pub cutoffs: Vec<f64>,
}

impl Default for ProbeSection {
    fn default() -> Self {
        ProbeSection {
            radius: 1.0,
            pairs: 20,
            cutoffs: Vec::new(),
        }
    }
}

/// A parsed configuration file.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub nu: f64,
    #[serde(rename = "L", default = "two_pi")]
    pub length: f64,
    #[serde(rename = "M_truth")]
    pub m_truth: usize,
    #[serde(rename = "kappa_N")]
    pub kappa_n: f64,
    pub beta: Option<f64>,
    pub dt: f64,
    #[serde(default)]
    pub t0: f64,
    pub t_end: f64,
    #[serde(default = "one")]
    pub sample_every: usize,
    #[serde(default)]
    pub v0_policy: V0Policy,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub spinup: f64,
    pub interp: InterpSection,
    pub forcing: ForcingSpec,
    #[serde(default)]
    pub constants: AssumedConstants,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default)]
    pub probe: ProbeSection,
}

fn two_pi() -> f64 {
    2.0 * PI
}

fn one() -> usize {
    1
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::from_toml_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    fn check(&self) -> Result<()> {
        self.interpolant()?;
        self.nudge_config()?.validate()?;
        Ok(())
    }

    pub fn grid(&self) -> Result<WaveGrid> {
        WaveGrid::new(self.length, self.m_truth)
    }

    pub fn interpolant(&self) -> Result<InterpolantSpec> {
        match self.interp.kind {
            InterpKind::Fourier => match self.interp.kappa_k {
                Some(kappa_k) => Ok(InterpolantSpec::FourierShell { kappa_k }),
                None => Err(Error::Config("interp.type = \"fourier\" requires interp.kappa_K".into())),
            },
            InterpKind::Fv => match self.interp.cells {
                Some(cells) => Ok(InterpolantSpec::FiniteVolume { cells }),
                None => Err(Error::Config("interp.type = \"fv\" requires interp.cells".into())),
            },
        }
    }

    /// `beta` from the file, or the condition checker's suggestion.
    pub fn beta(&self) -> Result<f64> {
        match self.beta {
            Some(b) => Ok(b),
            None => Ok(suggest_beta(self.nu, &self.interpolant()?, &self.grid()?, &self.constants)),
        }
    }

    pub fn nudge_config(&self) -> Result<NudgeConfig> {
        Ok(NudgeConfig {
            nu: self.nu,
            beta: self.beta()?,
            forcing: self.forcing,
            grid_truth: self.grid()?,
            cutoff_n: ShellCutoff::new(self.kappa_n)?,
            interp: self.interpolant()?,
            dt: self.dt,
            t0: self.t0,
            t_end: self.t_end,
            sample_every: self.sample_every,
            v0: match self.v0_policy {
                V0Policy::Zero => InitialGuess::Zero,
                V0Policy::Seeded => InitialGuess::Seeded(self.seed),
            },
        })
    }

    pub fn sweep_cutoffs(&self) -> Result<Vec<ShellCutoff>> {
        if self.sweep.cutoffs.is_empty() {
            return Err(Error::Config("sweep.cutoffs is missing or empty".into()));
        }
        self.sweep.cutoffs.iter().map(|&k| ShellCutoff::new(k)).collect()
    }

    pub fn sweep_options(&self) -> Result<SweepOptions> {
        let mut opts = SweepOptions::default_for(&self.nudge_config()?);
        if let Some([a, b]) = self.sweep.window {
            opts.window = (a, b);
        }
        opts.measure_floor = self.sweep.measure_floor;
        Ok(opts)
    }

    /// Truth state at `t0`: the steady Stokes response to the forcing,
    /// integrated forward for `spinup` time units.
    pub fn initial_truth(&self) -> Result<SpectralVelocity> {
        let cfg = self.nudge_config()?;
        let g = cfg.build_forcing()?;
        let stokes = stokes_apply(&g, -1.0)?.scaled(1.0 / self.nu);
        spin_up(&g, self.nu, self.dt, self.spinup, &stokes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
nu = 0.05
M_truth = 32
kappa_N = 6
dt = 0.01
t_end = 1.0
sample_every = 10
interp.type = "fourier"
interp.kappa_K = 4
forcing.shell_lo = 1
forcing.shell_hi = 1
forcing.G = 10
forcing.seed = 1
"#;

    #[test]
    fn parses_dotted_keys() {
        let cfg = Config::from_toml_str(BASE).unwrap();
        assert_eq!(cfg.m_truth, 32);
        assert_eq!(cfg.length, 2.0 * PI);
        assert_eq!(cfg.interpolant().unwrap(), InterpolantSpec::FourierShell { kappa_k: 4.0 });
        assert!((cfg.beta().unwrap() - 0.425).abs() < 1e-12);
        assert_eq!(cfg.constants, AssumedConstants::default());
        let n = cfg.nudge_config().unwrap();
        assert_eq!(n.v0, InitialGuess::Zero);
        assert_eq!(n.steps(), 100);
    }

    #[test]
    fn tables_and_sections() {
        let text = format!(
            "{BASE}beta = 1.5\nv0_policy = \"seeded\"\nseed = 9\n[constants]\nc0 = 2.0\n[sweep]\ncutoffs = [2, 4, 6]\nwindow = [0.5, 1.0]\n"
        );
        let cfg = Config::from_toml_str(&text).unwrap();
        assert_eq!(cfg.beta().unwrap(), 1.5);
        assert_eq!(cfg.constants.c0, 2.0);
        assert_eq!(cfg.nudge_config().unwrap().v0, InitialGuess::Seeded(9));
        assert_eq!(cfg.sweep_cutoffs().unwrap().len(), 3);
        assert_eq!(cfg.sweep_options().unwrap().window, (0.5, 1.0));
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(Config::from_toml_str("nu = 1"), Err(Error::Config(_))));
        let typo = format!("{BASE}betta = 1\n");
        assert!(Config::from_toml_str(&typo).is_err());
        let fv = BASE.replace("interp.type = \"fourier\"", "interp.type = \"fv\"");
        assert!(Config::from_toml_str(&fv).is_err());
        let big = BASE.replace("kappa_N = 6", "kappa_N = 12");
        assert!(Config::from_toml_str(&big).is_err());
        let err = Config::load(Path::new("/nonexistent/run.toml")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/run.toml"));
        assert!(err.is_config_error());
    }
}
