//! Python bindings: contours and their dynamics, flattening maps, two-phase
//! rate studies, the 3-D fixed-point solve and scenario runs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use pyo3::exceptions::{PyValueError, PyRuntimeError};
use pyo3::prelude::*;

use vortex_patch::contour2d::{self, chord_arc, sobolev_norm, EvolveOptions, PatchVorticity};
use vortex_patch::flatten::{self, BiharmonicMap};
use vortex_patch::harness::{self, RunOutput};
use vortex_patch::lagrangian3d::{picard_solve, Evolve3dConfig};
use vortex_patch::twophase::{convergence_study, Degree, ManufacturedCase, SolveOptions};
use vortex_patch::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

type Series = BTreeMap<String, Vec<(f64, f64)>>;

/// Closed curve stored by its truncated Fourier coefficients.
#[pyclass(name = "Contour", module = "pyvortexpatch", from_py_object)]
#[derive(Clone)]
struct PyContour {
    inner: contour2d::Contour,
}

#[pymethods]
impl PyContour {
    #[staticmethod]
    #[pyo3(signature = (radius=1.0, modes=32))]
    fn circle(radius: f64, modes: usize) -> Self {
        Self {
            inner: contour2d::Contour::circle(radius, modes),
        }
    }

    #[staticmethod]
    #[pyo3(signature = (a, b, modes=32))]
    fn ellipse(a: f64, b: f64, modes: usize) -> Self {
        Self {
            inner: contour2d::Contour::ellipse(a, b, modes),
        }
    }

    /// Unit circle with radial perturbation `sum eps_n cos(n theta)`.
    #[staticmethod]
    #[pyo3(signature = (amplitudes, modes=32))]
    fn perturbed(amplitudes: Vec<(usize, f64)>, modes: usize) -> Self {
        Self {
            inner: contour2d::Contour::perturbed_circle(&amplitudes, modes),
        }
    }

    /// Fit to equispaced samples of one period.
    #[staticmethod]
    fn from_points(points: Vec<(f64, f64)>, modes: usize) -> PyResult<Self> {
        let pts: Vec<[f64; 2]> = points.iter().map(|&(x, y)| [x, y]).collect();
        let inner = contour2d::Contour::from_samples(&pts, modes).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn modes(&self) -> usize {
        self.inner.band()
    }

    #[getter]
    fn time(&self) -> f64 {
        self.inner.time
    }

    fn area(&self) -> f64 {
        self.inner.area()
    }

    fn centroid(&self) -> (f64, f64) {
        let c = self.inner.centroid();
        (c[0], c[1])
    }

    fn point(&self, theta: f64) -> (f64, f64) {
        let p = self.inner.point(theta);
        (p[0], p[1])
    }

    fn sample(&self, count: usize) -> PyResult<Vec<(f64, f64)>> {
        let s = self.inner.sample(count).map_err(py_err)?;
        Ok(s.points.iter().map(|p| (p[0], p[1])).collect())
    }

    /// `(value, self_intersecting)` of the chord-arc constant.
    fn chord_arc(&self) -> (f64, bool) {
        let c = chord_arc(&self.inner);
        (c.value, c.self_intersecting)
    }

    #[pyo3(signature = (order=2.5))]
    fn sobolev_norm(&self, order: f64) -> f64 {
        sobolev_norm(&self.inner, order)
    }

    fn hausdorff_distance(&self, other: &PyContour) -> f64 {
        contour2d::hausdorff_distance(&self.inner, &other.inner)
    }

    /// Biot-Savart velocity at an off-curve point.
    #[pyo3(signature = (x, y, omega_plus=1.0, omega_minus=0.0))]
    fn velocity(&self, x: f64, y: f64, omega_plus: f64, omega_minus: f64) -> PyResult<(f64, f64)> {
        let vort = PatchVorticity { omega_plus, omega_minus };
        let u = contour2d::patch_velocity(&self.inner, vort, [x, y]).map_err(py_err)?;
        Ok((u[0], u[1]))
    }

    /// RK4 contour dynamics to `t_end`. Returns the final contour and the
    /// monitored series as `{name: [(time, value), ...]}`.
    #[pyo3(signature = (t_end, dt=None, omega_plus=1.0, omega_minus=0.0, monitor_every=1, monitor_f=false))]
    fn evolve(
        &self,
        py: Python<'_>,
        t_end: f64,
        dt: Option<f64>,
        omega_plus: f64,
        omega_minus: f64,
        monitor_every: usize,
        monitor_f: bool,
    ) -> PyResult<(PyContour, Series)> {
        let opts = EvolveOptions {
            t_end,
            dt,
            monitor_every,
            monitor_f,
            ..EvolveOptions::default()
        };
        let vort = PatchVorticity { omega_plus, omega_minus };
        let inner = &self.inner;
        let ev = py.detach(|| contour2d::evolve(inner, vort, &opts)).map_err(py_err)?;
        Ok((PyContour { inner: ev.last }, ev.series.by_name()))
    }

    fn to_text(&self) -> String {
        contour2d::checkpoint::to_text(&self.inner)
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        let inner = contour2d::checkpoint::from_text(text).map_err(py_err)?;
        Ok(Self { inner })
    }

    fn __repr__(&self) -> String {
        format!("Contour(modes={}, area={:.6})", self.inner.band(), self.inner.area())
    }
}

/// Biharmonic extension of a contour into the unit disk or an annulus.
#[pyclass(name = "FlatteningMap", module = "pyvortexpatch", from_py_object)]
#[derive(Clone)]
struct PyMap {
    inner: BiharmonicMap,
}

#[pymethods]
impl PyMap {
    /// `(inner radius, outer radius)` of the map's domain.
    fn domain(&self) -> (f64, f64) {
        self.inner.domain()
    }

    #[getter]
    fn condition(&self) -> f64 {
        self.inner.condition
    }

    fn evaluate(&self, r: f64, theta: f64) -> PyResult<(f64, f64)> {
        let p = self.inner.evaluate(r, theta).map_err(py_err)?;
        Ok((p[0], p[1]))
    }

    fn jacobian(&self, r: f64, theta: f64) -> PyResult<[[f64; 2]; 2]> {
        self.inner.jacobian(r, theta).map_err(py_err)
    }

    fn jacobian_det(&self, r: f64, theta: f64) -> PyResult<f64> {
        self.inner.jacobian_det(r, theta).map_err(py_err)
    }
}

#[pyfunction]
fn disk_map(contour: &PyContour) -> PyMap {
    PyMap {
        inner: flatten::solve_disk_extension(&contour.inner),
    }
}

/// Annulus map onto `1 <= r <= outer_radius`; the default radius is picked from the contour.
#[pyfunction]
#[pyo3(signature = (contour, outer_radius=None))]
fn annulus_map(contour: &PyContour, outer_radius: Option<f64>) -> PyResult<PyMap> {
    let radius = outer_radius.unwrap_or_else(|| flatten::default_outer_radius(&contour.inner));
    let inner = flatten::solve_annulus_extension(&contour.inner, radius).map_err(py_err)?;
    Ok(PyMap { inner })
}

/// `H^k` gain ratios over a seeded roughening family.
#[pyfunction]
#[pyo3(signature = (k=3, members=10, modes=128, seed=7))]
fn gain_ratios(py: Python<'_>, k: u32, members: usize, modes: usize, seed: u64) -> Vec<f64> {
    py.detach(|| flatten::sobolev_gain_ratio(&flatten::roughening_family(k, members, modes, seed), k))
}

/// Manufactured two-phase convergence study. `case` is `kinked`, `cubic` or
/// `periodic`. Returns the fitted rates and the per-mesh rows.
#[pyfunction]
#[pyo3(signature = (case, hs, degree=1))]
fn manufactured_study(py: Python<'_>, case: &str, hs: Vec<f64>, degree: u32) -> PyResult<BTreeMap<String, Py<PyAny>>> {
    let case = match case {
        "kinked" => ManufacturedCase::kinked_circle(),
        "cubic" => ManufacturedCase::cubic_circle(),
        "periodic" => ManufacturedCase::periodic_kinked(),
        other => return Err(PyValueError::new_err(format!("unknown case {other:?}"))),
    };
    let degree = match degree {
        1 => Degree::P1,
        2 => Degree::P2,
        d => return Err(PyValueError::new_err(format!("degree must be 1 or 2, got {d}"))),
    };
    let opts = SolveOptions {
        degree,
        ..SolveOptions::default()
    };
    let table = py.detach(|| convergence_study(&case, &hs, opts)).map_err(py_err)?;
    let rows: Vec<(f64, f64, f64, f64, f64)> =
        table.rows.iter().map(|r| (r.h, r.l2, r.h1, r.energy, r.flux_jump)).collect();
    let mut out = BTreeMap::new();
    out.insert("l2_rate".into(), table.l2_rate.into_pyobject(py)?.into_any().unbind());
    out.insert("h1_rate".into(), table.h1_rate.into_pyobject(py)?.into_any().unbind());
    out.insert("energy_rate".into(), table.energy_rate.into_pyobject(py)?.into_any().unbind());
    out.insert("flux_rate".into(), table.flux_rate.into_pyobject(py)?.into_any().unbind());
    out.insert("monotone".into(), pyo3::types::PyBool::new(py, table.monotone).to_owned().into_any().unbind());
    out.insert("rows".into(), rows.into_pyobject(py)?.into_any().unbind());
    Ok(out)
}

/// Lagrangian fixed-point solve from the TOML text of an `[evolve3d]` table.
/// Returns `(differences, factors)` per iteration.
#[pyfunction]
fn evolve3d(py: Python<'_>, config_toml: &str) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let cfg: Evolve3dConfig = toml::from_str(config_toml).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let report = py
        .detach(|| -> vortex_patch::Result<_> {
            let data = cfg.data()?;
            let (_, report) = picard_solve(&data, &cfg.differentiator()?, cfg.picard())?;
            Ok(report)
        })
        .map_err(py_err)?;
    Ok((report.differences, report.factors))
}

/// Outcome of one scenario run.
#[pyclass(name = "RunResult", module = "pyvortexpatch")]
struct PyRun {
    output: RunOutput,
}

#[pymethods]
impl PyRun {
    #[getter]
    fn scenario(&self) -> String {
        self.output.report.scenario.name.clone()
    }

    #[getter]
    fn passed(&self) -> bool {
        self.output.report.passed
    }

    /// Measured values by metric name.
    fn metrics(&self) -> BTreeMap<String, f64> {
        self.output
            .report
            .metrics
            .iter()
            .filter_map(|m| m.value.map(|v| (m.name.clone(), v)))
            .collect()
    }

    fn series(&self) -> Series {
        self.output.series.by_name()
    }

    fn summary(&self) -> String {
        self.output.report.summary()
    }

    /// Write series, manifest, artifacts and report into `directory`.
    fn write(&self, directory: PathBuf) -> PyResult<Vec<PathBuf>> {
        harness::write_run(&directory, &self.output).map_err(py_err)
    }
}

/// Load, validate and run a scenario file. `overrides` are `section.key=value`.
#[pyfunction]
#[pyo3(signature = (path, overrides=Vec::new()))]
fn run_scenario(py: Python<'_>, path: PathBuf, overrides: Vec<String>) -> PyResult<PyRun> {
    let output = py.detach(|| harness::run_file(Path::new(&path), &overrides)).map_err(py_err)?;
    Ok(PyRun { output })
}

#[pymodule]
fn pyvortexpatch(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyContour>()?;
    m.add_class::<PyMap>()?;
    m.add_class::<PyRun>()?;
    m.add_function(wrap_pyfunction!(disk_map, m)?)?;
    m.add_function(wrap_pyfunction!(annulus_map, m)?)?;
    m.add_function(wrap_pyfunction!(gain_ratios, m)?)?;
    m.add_function(wrap_pyfunction!(manufactured_study, m)?)?;
    m.add_function(wrap_pyfunction!(evolve3d, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
