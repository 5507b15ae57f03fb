//! Run configuration for the 3-D fixed-point scheme.

use serde::{Deserialize, Serialize};

use super::data::{PatchData3D, Preset};
use super::deriv::{DerivativeMethod, Differentiator};
use super::grid::Grid3;
use super::picard::PicardOptions;
use super::solve::VariationalOptions;
use crate::error::Result;

fn default_iterations() -> usize {
    50
}

fn default_band_cells() -> f64 {
    3.0
}

/// `grid` nodes per side on `[-ell, ell]^3`; time horizon `horizon` split
/// into `levels` steps. The smoothing band is `band` when given, otherwise
/// `band_cells` grid spacings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Evolve3dConfig {
    pub grid: usize,
    pub ell: f64,
    pub horizon: f64,
    pub levels: usize,
    pub tol: f64,
    #[serde(default)]
    pub band: Option<f64>,
    #[serde(default = "default_band_cells")]
    pub band_cells: f64,
    #[serde(default = "default_iterations")]
    pub max_iterations: usize,
    #[serde(default)]
    pub derivatives: DerivativeMethod,
    pub preset: Preset,
}

impl Evolve3dConfig {
    pub fn grid(&self) -> Result<Grid3> {
        Grid3::cubic(self.grid, self.ell)
    }

    pub fn band_width(&self) -> Result<f64> {
        Ok(self.band.unwrap_or(self.band_cells * self.grid()?.spacing(0)))
    }

    pub fn differentiator(&self) -> Result<Differentiator> {
        Ok(Differentiator::new(self.grid()?, self.derivatives))
    }

    pub fn picard(&self) -> PicardOptions {
        PicardOptions {
            horizon: self.horizon,
            levels: self.levels,
            tol: self.tol,
            max_iterations: self.max_iterations,
            solve: VariationalOptions::default(),
        }
    }

    pub fn data(&self) -> Result<PatchData3D> {
        PatchData3D::preset(&self.preset, self.grid()?, self.band_width()?, &self.differentiator()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_defaults_and_rejects_unknown_keys() {
        let text = "grid = 16\nell = 3.0\nhorizon = 0.05\nlevels = 2\ntol = 1e-9\n[preset]\nkind = \"ball\"\nradius = 1.5\nstrength = 1.0\n";
        let c: Evolve3dConfig = toml::from_str(text).unwrap();
        assert_eq!(c.max_iterations, 50);
        assert_eq!(c.derivatives, DerivativeMethod::Spectral);
        assert!((c.band_width().unwrap() - 3.0 * 6.0 / 16.0).abs() < 1e-15);
        assert!(toml::from_str::<Evolve3dConfig>(&format!("{text}colour = 1\n")).is_err());
        let fd: Evolve3dConfig = toml::from_str(&text.replace("tol = 1e-9\n", "tol = 1e-9\nderivatives = \"finite-difference4\"\n")).unwrap();
        assert_eq!(fd.derivatives, DerivativeMethod::FiniteDifference4);
    }
}
