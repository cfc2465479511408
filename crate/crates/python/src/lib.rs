//! Python module `heisenberg_hls`: group operations, kernels, grid
//! quadrature and the verifier experiments.

use hls_core::verifier::{self, ConstraintParams};
use hls_core::{
    DilationSpec, ExponentPair, GridSpec, GroupContext, GroupPoint, HlsError, KernelSpec, OmegaABParams,
    OmegaAParams, TestFunction, VParams,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: HlsError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn point(coords: &[f64]) -> PyResult<GroupPoint> {
    GroupPoint::from_flat(coords).map_err(err)
}

fn function(json: Option<&str>, n: usize) -> PyResult<TestFunction> {
    match json {
        None => Ok(TestFunction::standard_gaussian(n)),
        Some(s) => {
            let f: TestFunction = serde_json::from_str(s).map_err(|e| PyValueError::new_err(e.to_string()))?;
            f.validate(n).map_err(err)?;
            Ok(f)
        }
    }
}

/// Heisenberg group with block dimension `n` and twist `mu`.
#[pyclass(name = "Group", frozen)]
struct PyGroup(GroupContext);

#[pymethods]
impl PyGroup {
    #[new]
    #[pyo3(signature = (n=1, mu=1.0))]
    fn new(n: usize, mu: f64) -> PyResult<Self> {
        GroupContext::new(n, mu).map(Self).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.0.mu()
    }

    fn multiply(&self, x: Vec<f64>, y: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self.0.multiply(&point(&x)?, &point(&y)?).map_err(err)?.to_flat())
    }

    fn inverse(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(point(&x)?.inverse().to_flat())
    }

    /// `x ⊙ y⁻¹`.
    fn difference(&self, x: Vec<f64>, y: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self.0.difference(&point(&x)?, &point(&y)?).map_err(err)?.to_flat())
    }

    /// Zygmund dilation `(δ₁u, δ₂v, δ₁δ₂λt)`.
    #[staticmethod]
    #[pyo3(signature = (x, delta1, delta2, lam=1.0))]
    fn zygmund(x: Vec<f64>, delta1: f64, delta2: f64, lam: f64) -> PyResult<Vec<f64>> {
        let d = DilationSpec::zygmund(delta1, delta2).and_then(|d| d.with_lambda(lam)).map_err(err)?;
        Ok(d.apply(&point(&x)?).to_flat())
    }

    fn __repr__(&self) -> String {
        format!("Group(n={}, mu={})", self.0.n(), self.0.mu())
    }
}

#[pyclass(name = "Kernel", frozen)]
struct PyKernel(KernelSpec);

#[pymethods]
impl PyKernel {
    /// `V` with `alpha2 = alpha` and the sharp theta unless given.
    #[staticmethod]
    #[pyo3(signature = (n, alpha, beta, theta=None, alpha2=None))]
    fn v(n: usize, alpha: f64, beta: f64, theta: Option<f64>, alpha2: Option<f64>) -> PyResult<Self> {
        let p = VParams::new(n, alpha, alpha2.unwrap_or(alpha), beta, theta).map_err(err)?;
        Ok(Self(KernelSpec::V(p)))
    }

    #[staticmethod]
    fn omega_a(n: usize, a: f64) -> PyResult<Self> {
        Ok(Self(KernelSpec::OmegaA(OmegaAParams::new(n, a).map_err(err)?)))
    }

    #[staticmethod]
    fn omega_ab(n: usize, a: f64, b: f64) -> PyResult<Self> {
        Ok(Self(KernelSpec::OmegaAB(OmegaABParams::new(n, a, b).map_err(err)?)))
    }

    #[staticmethod]
    fn majorant(n: usize, s: f64) -> PyResult<Self> {
        KernelSpec::separable_majorant(n, s).map(Self).map_err(err)
    }

    fn __call__(&self, x: Vec<f64>) -> PyResult<f64> {
        self.0.eval(&point(&x)?).map_err(err)
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.0.name()
    }

    #[getter]
    fn s(&self) -> f64 {
        self.0.homogeneity_sum()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).unwrap_or_default()
    }

    fn __repr__(&self) -> String {
        format!("Kernel({})", self.to_json())
    }
}

/// Uniform grid on `[-L, L]^{2n+1}` with `N` nodes per axis.
#[pyclass(name = "Grid", frozen)]
struct PyGrid(GridSpec);

#[pymethods]
impl PyGrid {
    #[new]
    #[pyo3(signature = (n=1, half_width=6.0, nodes=17, staggered=false))]
    fn new(n: usize, half_width: f64, nodes: usize, staggered: bool) -> PyResult<Self> {
        GridSpec::heisenberg(n, half_width, nodes, staggered).map(Self).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn axis(&self, axis: usize) -> PyResult<Vec<f64>> {
        if axis >= self.0.dim() {
            return Err(PyValueError::new_err("axis out of range"));
        }
        Ok(self.0.axis_coords(axis))
    }

    /// Grid on which operator outputs live.
    fn complement(&self) -> Self {
        Self(self.0.complement())
    }

    #[getter]
    fn step(&self) -> f64 {
        self.0.base_step()
    }
}

/// `(input values, output values)` of the operator on `grid`; `function` is
/// a JSON test-function description (standard gaussian when omitted).
#[pyfunction]
#[pyo3(signature = (kernel, group, grid, function=None))]
fn apply(
    py: Python<'_>,
    kernel: &PyKernel,
    group: &PyGroup,
    grid: &PyGrid,
    function: Option<&str>,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let f = self::function(function, group.0.n())?;
    let (k, ctx, spec) = (kernel.0, group.0, grid.0.clone());
    py.detach(move || {
        let input = hls_core::sample(&f, &spec)?;
        let output = hls_core::apply_fractional_grid(&k, &ctx, &f, &spec)?;
        Ok::<_, HlsError>((input.into_values(), output.into_values()))
    })
    .map_err(err)
}

#[pyfunction]
fn admissible_q(n: usize, s: f64, p: f64) -> PyResult<f64> {
    verifier::admissible_q(n, s, p).map_err(err)
}

/// Constraint flags for a `V` or `Omega^ab` kernel; `None` where not defined.
#[pyfunction]
fn constraints<'py>(py: Python<'py>, kernel: &PyKernel, p: f64, q: f64) -> PyResult<Bound<'py, PyDict>> {
    let params = match kernel.0 {
        KernelSpec::V(v) => ConstraintParams::V(v),
        KernelSpec::OmegaAB(ab) => ConstraintParams::OmegaAB(ab),
        _ => return Err(PyValueError::new_err("constraints need a V or Omega^ab kernel")),
    };
    let r = verifier::constraint_report(&params, &ExponentPair::new(p, q).map_err(err)?);
    let d = PyDict::new(py);
    d.set_item("homogeneity_ok", r.homogeneity_ok)?;
    d.set_item("theta_ok", r.theta_ok)?;
    d.set_item("band_ok", r.band_ok)?;
    d.set_item("ab_b_ok", r.ab_b_ok)?;
    d.set_item("ab_anb_ok", r.ab_anb_ok)?;
    d.set_item("all_ok", r.all_ok())?;
    Ok(d)
}

/// Least-squares slope of `log(‖If_δ‖_q/‖f_δ‖_p)` against `log δ`.
#[pyfunction]
#[pyo3(signature = (kernel, group, grid, p, q, deltas, function=None))]
#[allow(clippy::too_many_arguments)]
fn dilation_fit<'py>(
    py: Python<'py>,
    kernel: &PyKernel,
    group: &PyGroup,
    grid: &PyGrid,
    p: f64,
    q: f64,
    deltas: Vec<f64>,
    function: Option<&str>,
) -> PyResult<Bound<'py, PyDict>> {
    let f = self::function(function, group.0.n())?;
    let pq = ExponentPair::new(p, q).map_err(err)?;
    let (k, ctx, spec) = (kernel.0, group.0, grid.0.clone());
    let fit = py
        .detach(move || verifier::dilation_exponent_fit(&k, &ctx, &f, &pq, &deltas, &spec))
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("slope", fit.slope)?;
    d.set_item("intercept", fit.intercept)?;
    d.set_item("max_residual", fit.max_residual)?;
    d.set_item("predicted_slope", fit.predicted_slope)?;
    Ok(d)
}

/// Runs a harness experiment from a JSON config; returns `(csv, all_pass)`.
#[pyfunction]
fn run_experiment(py: Python<'_>, config: &str) -> PyResult<(String, bool)> {
    let cfg = hls_cli::RunConfig::from_json(config).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let rows = py.detach(move || hls_cli::execute(&cfg)).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let csv = hls_cli::report::csv_string(&rows).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok((csv, rows.iter().all(|r| r.pass)))
}

#[pyfunction]
fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    hls_core::hurwitz_zeta(s, q)
}

#[pymodule]
fn heisenberg_hls(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGroup>()?;
    m.add_class::<PyKernel>()?;
    m.add_class::<PyGrid>()?;
    m.add_function(wrap_pyfunction!(apply, m)?)?;
    m.add_function(wrap_pyfunction!(admissible_q, m)?)?;
    m.add_function(wrap_pyfunction!(constraints, m)?)?;
    m.add_function(wrap_pyfunction!(dilation_fit, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(hurwitz_zeta, m)?)?;
    Ok(())
}
