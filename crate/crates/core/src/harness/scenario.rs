//! Scenario files: TOML with typed sections, unknown keys rejected.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::contour2d::{checkpoint, Contour};
use crate::error::{Error, Result};
use crate::lagrangian3d::Evolve3dConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Module {
    Contour2d,
    Flatten,
    Twophase,
    Lagrangian3d,
}

impl Module {
    pub fn name(self) -> &'static str {
        match self {
            Module::Contour2d => "contour2d",
            Module::Flatten => "flatten",
            Module::Twophase => "twophase",
            Module::Lagrangian3d => "lagrangian3d",
        }
    }
}

fn default_radius() -> f64 {
    1.0
}

/// Initial or fixed boundary curve. `modes` is the band limit `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ContourSpec {
    Circle {
        #[serde(default = "default_radius")]
        radius: f64,
        modes: usize,
    },
    Ellipse { a: f64, b: f64, modes: usize },
    /// `r = 1 + sum a_n cos(n theta)` for the listed `(n, a_n)` pairs.
    Perturbed { amplitudes: Vec<(usize, f64)>, modes: usize },
    /// Seeded random cosine amplitudes `U(-1, 1) amplitude n^-decay`, `n = 2..=count + 1`.
    Random {
        count: usize,
        amplitude: f64,
        decay: f64,
        seed: u64,
        modes: usize,
    },
    /// A contour checkpoint file.
    Checkpoint { path: PathBuf },
}

impl ContourSpec {
    pub fn build(&self, base: &Path) -> Result<Contour> {
        match self {
            ContourSpec::Circle { radius, modes } => Ok(Contour::circle(*radius, *modes)),
            ContourSpec::Ellipse { a, b, modes } => Ok(Contour::ellipse(*a, *b, *modes)),
            ContourSpec::Perturbed { amplitudes, modes } => Ok(Contour::perturbed_circle(amplitudes, *modes)),
            ContourSpec::Random {
                count,
                amplitude,
                decay,
                seed,
                modes,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let amps: Vec<(usize, f64)> = (2..count + 2)
                    .map(|n| (n, amplitude * rng.random_range(-1.0..1.0) * (n as f64).powf(-decay)))
                    .collect();
                Ok(Contour::perturbed_circle(&amps, *modes))
            }
            ContourSpec::Checkpoint { path } => checkpoint::from_text(&std::fs::read_to_string(base.join(path))?),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Precondition(m));
        match self {
            ContourSpec::Circle { radius, modes } => {
                if !(*radius > 0.0) || *modes == 0 {
                    return bad(format!("circle needs a positive radius and modes >= 1 (radius {radius}, modes {modes})"));
                }
            }
            ContourSpec::Ellipse { a, b, modes } => {
                if !(*a > 0.0 && *b > 0.0) || *modes == 0 {
                    return bad(format!("ellipse needs positive semi-axes and modes >= 1 (a {a}, b {b})"));
                }
            }
            ContourSpec::Perturbed { amplitudes, modes } => {
                if let Some((n, _)) = amplitudes.iter().find(|(n, _)| *n > *modes || *n == 0) {
                    return bad(format!("perturbation mode {n} outside 1..={modes}"));
                }
            }
            ContourSpec::Random { count, modes, .. } => {
                if count + 1 > *modes {
                    return bad(format!("random perturbation reaches mode {} above modes {modes}", count + 1));
                }
            }
            ContourSpec::Checkpoint { .. } => {}
        }
        Ok(())
    }
}

fn default_cfl() -> f64 {
    0.5
}
fn one() -> f64 {
    1.0
}
fn one_usize() -> usize {
    1
}
fn default_sobolev() -> f64 {
    2.5
}

/// Contour dynamics run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Simulate2dParams {
    pub t_end: f64,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default = "one")]
    pub omega_plus: f64,
    #[serde(default)]
    pub omega_minus: f64,
    #[serde(default = "one_usize")]
    pub monitor_every: usize,
    /// Record the three summands of the breakdown monitor.
    #[serde(default)]
    pub monitor_f: bool,
    #[serde(default = "default_sobolev")]
    pub sobolev_order: f64,
    /// Compare the initial velocity against an area-quadrature oracle at this many probes.
    #[serde(default)]
    pub velocity_probes: usize,
}

fn default_samples() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyParams {
    pub k: u32,
    pub members: usize,
    pub band: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlattenParams {
    #[serde(default)]
    pub outer_radius: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub family: Option<FamilyParams>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EllipticCase {
    Kinked,
    Cubic,
    Periodic,
    Rough,
    RankineStream,
    RankineVelocity,
}

fn default_degree() -> u8 {
    1
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwophaseParams {
    pub case: EllipticCase,
    #[serde(default = "default_degree")]
    pub degree: u8,
    /// Mesh sizes, coarse to fine.
    #[serde(default)]
    pub hs: Vec<f64>,
    /// Write mesh and solution CSV for the finest size.
    #[serde(default = "default_true")]
    pub export: bool,
    /// Roughening-family member used by the rough-coefficient case.
    #[serde(default)]
    pub member: usize,
    #[serde(default)]
    pub seed: u64,
}

/// Grid and time-step sequence for a 3-D refinement study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefinementParams {
    pub grids: Vec<usize>,
    pub levels: Vec<usize>,
}

/// Acceptance bounds on one metric; all given bounds must hold.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Threshold {
    #[serde(default)]
    pub min: Option<f64>,
    #[serde(default)]
    pub max: Option<f64>,
}

impl Threshold {
    pub fn accepts(&self, v: f64) -> bool {
        !v.is_nan() && self.min.is_none_or(|m| v >= m) && self.max.is_none_or(|m| v <= m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub module: Module,
    #[serde(default)]
    pub description: Option<String>,
    /// Output directory; the command line `--out` takes precedence.
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub contour: Option<ContourSpec>,
    #[serde(default)]
    pub simulate2d: Option<Simulate2dParams>,
    #[serde(default)]
    pub flatten: Option<FlattenParams>,
    #[serde(default)]
    pub twophase: Option<TwophaseParams>,
    #[serde(default)]
    pub evolve3d: Option<Evolve3dConfig>,
    #[serde(default)]
    pub refinement: Option<RefinementParams>,
    #[serde(default)]
    pub thresholds: BTreeMap<String, Threshold>,
}

/// 1-based line and column of a byte offset.
pub fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn parse_error(text: &str, e: toml::de::Error) -> Error {
    let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
    Error::Parse {
        line,
        column,
        message: e.message().to_string(),
    }
}

fn override_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// Applies `path.to.key=value` overrides; the value is read as a TOML
/// literal and falls back to a plain string.
pub fn apply_overrides(table: &mut toml::Table, overrides: &[String]) -> Result<()> {
    for o in overrides {
        let (key, raw) = o
            .split_once('=')
            .ok_or_else(|| Error::InvalidInput(format!("override {o:?} is not of the form key=value")))?;
        let parts: Vec<&str> = key.trim().split('.').collect();
        if parts.iter().any(|p| p.is_empty()) {
            return Err(Error::InvalidInput(format!("override key {key:?} is malformed")));
        }
        let mut cur = &mut *table;
        for p in &parts[..parts.len() - 1] {
            let next = cur
                .entry(p.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            cur = next
                .as_table_mut()
                .ok_or_else(|| Error::InvalidInput(format!("override {key:?}: {p:?} is not a table")))?;
        }
        cur.insert(parts[parts.len() - 1].to_string(), override_value(raw.trim()));
    }
    Ok(())
}

impl Scenario {
    /// Parses scenario text, reporting syntax and schema errors with line and column.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with(text, &[])
    }

    pub fn parse_with(text: &str, overrides: &[String]) -> Result<Self> {
        let scenario: Scenario = toml::from_str(text).map_err(|e| parse_error(text, e))?;
        if overrides.is_empty() {
            return Ok(scenario);
        }
        let mut table: toml::Table = toml::from_str(text).map_err(|e| parse_error(text, e))?;
        apply_overrides(&mut table, overrides)?;
        let rendered = toml::to_string(&table).map_err(|e| Error::InvalidInput(e.to_string()))?;
        toml::from_str(&rendered).map_err(|e| Error::InvalidInput(format!("after overrides {overrides:?}: {}", e.message())))
    }

    /// Wraps a bare `[twophase]` parameter table (a problem file) into a
    /// scenario without thresholds. `hs` replaces the mesh sizes when given.
    pub fn from_problem(text: &str, name: &str, hs: Option<&[f64]>, overrides: &[String]) -> Result<Self> {
        let mut params: TwophaseParams = toml::from_str(text).map_err(|e| parse_error(text, e))?;
        if !overrides.is_empty() {
            let mut table: toml::Table = toml::from_str(text).map_err(|e| parse_error(text, e))?;
            apply_overrides(&mut table, overrides)?;
            let rendered = toml::to_string(&table).map_err(|e| Error::InvalidInput(e.to_string()))?;
            params = toml::from_str(&rendered)
                .map_err(|e| Error::InvalidInput(format!("problem file after overrides {overrides:?}: {}", e.message())))?;
        }
        if let Some(hs) = hs {
            params.hs = hs.to_vec();
        }
        Ok(Scenario {
            name: name.to_string(),
            module: Module::Twophase,
            description: None,
            out: None,
            contour: None,
            simulate2d: None,
            flatten: None,
            twophase: Some(params),
            evolve3d: None,
            refinement: None,
            thresholds: BTreeMap::new(),
        })
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        Self::parse_with(&std::fs::read_to_string(path)?, overrides)
    }

    fn require<'a, T>(&self, section: &'a Option<T>, name: &str) -> Result<&'a T> {
        section.as_ref().ok_or_else(|| {
            Error::Precondition(format!("module {} needs a [{name}] section", self.module.name()))
        })
    }

    /// Checks the target module's preconditions before anything runs.
    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() || self.name.contains(['/', '\\']) {
            return Err(Error::Precondition(format!("scenario name {:?} is not a valid directory name", self.name)));
        }
        if let Some(c) = &self.contour {
            c.validate()?;
        }
        for (k, t) in &self.thresholds {
            if t.min.is_none() && t.max.is_none() {
                return Err(Error::Precondition(format!("threshold {k:?} declares neither min nor max")));
            }
        }
        let pre = |m: String| Err(Error::Precondition(m));
        match self.module {
            Module::Contour2d => {
                self.require(&self.contour, "contour")?;
                let p = self.require(&self.simulate2d, "simulate2d")?;
                if !(p.t_end >= 0.0) {
                    return pre(format!("t_end must be non-negative, got {}", p.t_end));
                }
                if let Some(dt) = p.dt {
                    if !(dt > 0.0) {
                        return pre(format!("dt must be positive, got {dt}"));
                    }
                }
                if !(p.cfl > 0.0 && p.cfl <= 1.0) {
                    return pre(format!("cfl must lie in (0, 1], got {}", p.cfl));
                }
            }
            Module::Flatten => {
                self.require(&self.contour, "contour")?;
                let p = self.require(&self.flatten, "flatten")?;
                if p.samples == 0 {
                    return pre("flatten.samples must be positive".into());
                }
                if let Some(f) = &p.family {
                    if f.members < 2 {
                        return pre("a roughening family needs at least 2 members".into());
                    }
                }
            }
            Module::Twophase => {
                let p = self.require(&self.twophase, "twophase")?;
                if !matches!(p.degree, 1 | 2) {
                    return pre(format!("degree must be 1 or 2, got {}", p.degree));
                }
                if p.hs.len() < 3 || p.hs.iter().any(|h| !(*h > 0.0)) {
                    return pre(format!("need at least 3 positive mesh sizes, got {:?}", p.hs));
                }
                if p.case == EllipticCase::Rough && p.member >= super::run::ROUGH_FAMILY {
                    return pre(format!("rough member {} outside 0..{}", p.member, super::run::ROUGH_FAMILY));
                }
            }
            Module::Lagrangian3d => {
                let c = self.require(&self.evolve3d, "evolve3d")?;
                c.grid()?;
                if !(c.horizon > 0.0) {
                    return pre(format!("horizon must be positive, got {}", c.horizon));
                }
                if c.levels == 0 || !(c.tol > 0.0) {
                    return pre("levels and tol must be positive".into());
                }
                if let Some(r) = &self.refinement {
                    if r.grids.len() != r.levels.len() || r.grids.len() < 2 {
                        return pre("refinement needs matching grids and levels lists of length >= 2".into());
                    }
                }
            }
        }
        Ok(())
    }

    /// SHA-256 of the crate version and the canonical TOML form of the scenario.
    pub fn config_hash(&self) -> String {
        let canonical = toml::to_string(self).unwrap_or_default();
        let mut h = Sha256::new();
        h.update(env!("CARGO_PKG_VERSION").as_bytes());
        h.update(b"\n");
        h.update(canonical.as_bytes());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const RANKINE: &str = r#"
name = "rankine"
module = "contour2d"

[contour]
kind = "circle"
modes = 64

[simulate2d]
t_end = 1.0
dt = 0.05

[thresholds]
boundary_drift = { max = 1e-8 }
"#;

    #[test]
    fn parses_and_hashes_stably() {
        let s = Scenario::parse(RANKINE).unwrap();
        s.validate().unwrap();
        assert_eq!(s.config_hash(), Scenario::parse(RANKINE).unwrap().config_hash());
        assert_eq!(s.config_hash().len(), 64);
    }

    #[test]
    fn unknown_key_reports_position() {
        let text = RANKINE.replace("dt = 0.05", "dt = 0.05\nstep_size = 1");
        match Scenario::parse(&text) {
            Err(Error::Parse { line, column, message }) => {
                assert_eq!(line, 12, "{message}");
                assert_eq!(column, 1);
                assert!(message.contains("step_size"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_dt_fails_validation() {
        let s = Scenario::parse(&RANKINE.replace("dt = 0.05", "dt = -0.05")).unwrap();
        assert!(matches!(s.validate(), Err(Error::Precondition(_))));
    }

    #[test]
    fn overrides_replace_values() {
        let s = Scenario::parse_with(RANKINE, &["contour.modes=32".into(), "simulate2d.dt=0.1".into()]).unwrap();
        assert_eq!(s.contour, Some(ContourSpec::Circle { radius: 1.0, modes: 32 }));
        assert_eq!(s.simulate2d.unwrap().dt, Some(0.1));
        assert!(Scenario::parse_with(RANKINE, &["contour.colour=3".into()]).is_err());
        assert!(Scenario::parse_with(RANKINE, &["novalue".into()]).is_err());
    }

    #[test]
    fn problem_files_take_mesh_sizes_from_the_command_line() {
        let s = Scenario::from_problem("case = \"kinked\"\nhs = [0.4, 0.2, 0.1]\n", "p", Some(&[0.2, 0.1, 0.05]), &[]).unwrap();
        s.validate().unwrap();
        assert_eq!(s.twophase.unwrap().hs, vec![0.2, 0.1, 0.05]);
        match Scenario::from_problem("case = \"kinked\"\nhs = [0.4]\ndegre = 2\n", "p", None, &[]) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn random_contour_is_seeded() {
        let spec = ContourSpec::Random {
            count: 4,
            amplitude: 0.05,
            decay: 2.0,
            seed: 7,
            modes: 16,
        };
        let a = spec.build(Path::new(".")).unwrap();
        let b = spec.build(Path::new(".")).unwrap();
        assert_eq!(a.coeffs(), b.coeffs());
    }
}
