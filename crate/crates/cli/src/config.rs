use std::path::PathBuf;

use anyhow::{bail, Result};
use qstancu_core::{Family, Grid};
use serde::Serialize;

/// Environment variable overriding the moment-residual tolerance.
pub const MOMENT_TOL_ENV: &str = "QSTANCU_MOMENT_TOL";
pub const DEFAULT_MOMENT_TOL: f64 = 1e-8;

pub const DEFAULT_N_LADDER: [u32; 6] = [5, 10, 50, 100, 500, 1000];
pub const DEFAULT_Q_VALUES: [f64; 3] = [0.5, 0.9, 0.99];
pub const DEFAULT_X_VALUES: [f64; 4] = [0.5, 1.0, 2.0, 5.0];
pub const DEFAULT_GRID_MAX: f64 = 5.0;
pub const DEFAULT_GRID_POINTS: usize = 501;
/// Right end of the grid used for weighted norms.
pub const WEIGHTED_GRID_MAX: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Integrated versus closed-form moments of 1, t, t².
    Moments,
    /// Korovkin error against n along a q_n sequence.
    Converge,
    /// Pointwise rate-bound checks.
    Bounds,
    /// Statistical-convergence conditions for a q_n sequence.
    Statistical,
    /// Errors of all operator families side by side, plus the q = 1 reduction.
    Compare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(serialize_with = "family_label")]
    pub operator: Family,
    pub n_ladder: Vec<u32>,
    pub q_values: Vec<f64>,
    pub x_values: Vec<f64>,
    pub lattice_scales: Vec<f64>,
    pub grid: Grid,
    pub sequence: String,
    pub format: Format,
    #[serde(skip)]
    pub output_path: Option<PathBuf>,
    pub moment_tol: f64,
}

fn family_label<S: serde::Serializer>(f: &Family, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(f.label())
}

impl RunConfig {
    /// Defaults for `command`, with the tolerance read from the environment.
    pub fn new(command: Command) -> Result<Self> {
        Ok(Self {
            command,
            operator: Family::CaiPreserving,
            n_ladder: DEFAULT_N_LADDER.to_vec(),
            q_values: DEFAULT_Q_VALUES.to_vec(),
            x_values: DEFAULT_X_VALUES.to_vec(),
            lattice_scales: vec![1.0],
            grid: Grid::new(0.0, DEFAULT_GRID_MAX, DEFAULT_GRID_POINTS)?,
            sequence: "standard".to_string(),
            format: Format::Csv,
            output_path: None,
            moment_tol: moment_tol_from_env()?,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_ladder.is_empty() {
            bail!("n ladder is empty");
        }
        if self.n_ladder.windows(2).any(|w| w[0] >= w[1]) {
            bail!("n ladder must be strictly increasing: {:?}", self.n_ladder);
        }
        if let Some(n) = self.n_ladder.iter().find(|&&n| n < 2) {
            bail!("operator index must be >= 2, got {n}");
        }
        if self.q_values.is_empty() || self.q_values.iter().any(|q| !(*q > 0.0 && *q <= 1.0)) {
            bail!("q values must lie in (0, 1]: {:?}", self.q_values);
        }
        if self.x_values.is_empty() || self.x_values.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            bail!("evaluation points must be finite and >= 0: {:?}", self.x_values);
        }
        if self.lattice_scales.is_empty() || self.lattice_scales.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            bail!("lattice scales must be positive: {:?}", self.lattice_scales);
        }
        if !(self.moment_tol > 0.0) {
            bail!("moment tolerance must be positive, got {}", self.moment_tol);
        }
        qstancu_core::SequenceSpec::by_name(&self.sequence)?;
        Ok(())
    }

    /// Grid for ρ₀-weighted norms: the configured grid stretched to at least
    /// [`WEIGHTED_GRID_MAX`] at the same spacing.
    pub fn weighted_grid(&self) -> Result<Grid> {
        let x_max = self.grid.x_max().max(WEIGHTED_GRID_MAX);
        let points = ((x_max - self.grid.x_min()) / self.grid.spacing()).round() as usize + 1;
        Ok(Grid::new(self.grid.x_min(), x_max, points)?)
    }
}

pub fn moment_tol_from_env() -> Result<f64> {
    match std::env::var(MOMENT_TOL_ENV) {
        Ok(raw) => {
            let tol: f64 = raw.trim().parse().map_err(|e| anyhow::anyhow!("{MOMENT_TOL_ENV}={raw:?}: {e}"))?;
            if !(tol > 0.0) {
                bail!("{MOMENT_TOL_ENV} must be positive, got {tol}");
            }
            Ok(tol)
        }
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_MOMENT_TOL),
        Err(e) => bail!("{MOMENT_TOL_ENV}: {e}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = RunConfig::new(Command::Moments).unwrap();
        c.validate().unwrap();
        let w = c.weighted_grid().unwrap();
        assert_eq!(w.x_max(), 50.0);
        assert!((w.spacing() - c.grid.spacing()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_ladders() {
        let mut c = RunConfig::new(Command::Moments).unwrap();
        c.n_ladder.clear();
        assert!(c.validate().is_err());
        c.n_ladder = vec![10, 5];
        assert!(c.validate().is_err());
        c.n_ladder = vec![1, 5];
        assert!(c.validate().is_err());
        c.n_ladder = vec![5];
        c.q_values = vec![1.5];
        assert!(c.validate().is_err());
        c.q_values = vec![0.5];
        c.sequence = "nope".into();
        assert!(c.validate().is_err());
    }
}
