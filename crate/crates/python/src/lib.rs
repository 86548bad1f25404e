//! Python bindings. Points are `(x, y)` tuples and matrices are lists of rows.

use nalgebra::DMatrix;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use windipp::geometry::Rect;
use windipp::gp::{self, GpModel};
use windipp::mission::{self, UavState};
use windipp::placement::{self, PlacementOptions};
use windipp::planner;
use windipp::routing::{self, GaParams, RouteSolution};
use windipp::scenario::{self, Region, WindSpec};
use windipp::{Error, Point};

type Xy = (f64, f64);

fn err(e: Error) -> PyErr {
    match e {
        Error::Config(_) | Error::Precondition(_) | Error::Invalid(_) | Error::Domain(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn pt((x, y): Xy) -> Point {
    Point::new(x, y)
}

fn pts(v: &[Xy]) -> Vec<Point> {
    v.iter().copied().map(pt).collect()
}

fn matrix(rows: &[Vec<f64>]) -> PyResult<DMatrix<f64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn region(side: f64) -> PyResult<Region> {
    let bounds = Rect::new(Point::new(0.0, 0.0), Point::new(side, side)).map_err(err)?;
    Region::new(bounds, vec![]).map_err(err)
}

/// Squared-exponential kernel hyperparameters.
#[pyclass(module = "windipp", frozen)]
struct Hyperparams(gp::GpHyperparams);

#[pymethods]
impl Hyperparams {
    #[new]
    #[pyo3(signature = (sigma_f, sigma_n, length_scale, length_scale_y = None))]
    fn new(sigma_f: f64, sigma_n: f64, length_scale: f64, length_scale_y: Option<f64>) -> PyResult<Self> {
        let h = gp::GpHyperparams { sigma_f, sigma_n, length_scales: [length_scale, length_scale_y.unwrap_or(length_scale)] };
        h.validate().map_err(err)?;
        Ok(Self(h))
    }

    #[getter]
    fn sigma_f(&self) -> f64 {
        self.0.sigma_f
    }

    #[getter]
    fn sigma_n(&self) -> f64 {
        self.0.sigma_n
    }

    #[getter]
    fn length_scales(&self) -> (f64, f64) {
        (self.0.length_scales[0], self.0.length_scales[1])
    }

    fn __repr__(&self) -> String {
        format!("Hyperparams(sigma_f={}, sigma_n={}, length_scales={:?})", self.0.sigma_f, self.0.sigma_n, self.0.length_scales)
    }
}

#[pyfunction]
fn kernel(p: Xy, q: Xy, h: &Hyperparams) -> f64 {
    gp::kernel(pt(p), pt(q), &h.0)
}

/// Differential entropy (nats) of a Gaussian with covariance `k`.
#[pyfunction]
fn entropy(k: Vec<Vec<f64>>) -> PyResult<f64> {
    gp::entropy(&matrix(&k)?).map_err(err)
}

#[pyfunction]
fn mutual_information(k: Vec<Vec<f64>>, first: Vec<usize>, second: Vec<usize>) -> PyResult<f64> {
    gp::mutual_information(&matrix(&k)?, &first, &second).map_err(err)
}

/// Posterior mean and covariance at `query`.
#[pyfunction]
#[pyo3(signature = (h, train_x, train_y, query, prior_mean = 0.0))]
fn gp_predict(h: &Hyperparams, train_x: Vec<Xy>, train_y: Vec<f64>, query: Vec<Xy>, prior_mean: f64) -> PyResult<(Vec<f64>, Vec<Vec<f64>>)> {
    let model = GpModel::new(h.0, pts(&train_x), train_y, prior_mean).map_err(err)?;
    let post = gp::predict(&model, &pts(&query)).map_err(err)?;
    Ok((post.mean.iter().copied().collect(), rows(&post.cov)))
}

#[pyfunction]
#[pyo3(signature = (h, train_x, train_y, prior_mean = 0.0))]
fn log_marginal_likelihood(h: &Hyperparams, train_x: Vec<Xy>, train_y: Vec<f64>, prior_mean: f64) -> PyResult<f64> {
    let model = GpModel::new(h.0, pts(&train_x), train_y, prior_mean).map_err(err)?;
    gp::log_marginal_likelihood(&model).map_err(err)
}

/// Places `n_tasks` points in a `side` x `side` square to maximize MI with a
/// test grid of the given spacing. Returns `(locations, objective)`.
#[pyfunction]
#[pyo3(signature = (side, n_tasks, grid_spacing, h, seed = 0))]
fn place_tasks(side: f64, n_tasks: usize, grid_spacing: f64, h: &Hyperparams, seed: u64) -> PyResult<(Vec<Xy>, f64)> {
    let region = region(side)?;
    let grid = placement::make_test_grid(&region, grid_spacing).map_err(err)?;
    let r = placement::optimize_task_locations(&region, n_tasks, &grid, &h.0, seed, &PlacementOptions::default())
        .map_err(err)?;
    Ok((r.placement.locations.iter().map(|p| (p.x, p.y)).collect(), r.placement.objective))
}

/// Flight time of the straight edge `p -> q` in uniform wind over a square
/// of the given side.
#[pyfunction]
#[pyo3(signature = (p, q, v0, wind_speed, wind_from_deg, side = 10_000.0))]
fn edge_cost(p: Xy, q: Xy, v0: f64, wind_speed: f64, wind_from_deg: f64, side: f64) -> PyResult<f64> {
    let region = region(side)?;
    let field = scenario::make_wind(&WindSpec::Uniform { speed: wind_speed, from_deg: wind_from_deg }, &region, side / 20.0)
        .map_err(err)?;
    planner::edge_cost(pt(p), pt(q), &field, v0).map_err(err)
}

/// Asymmetric travel costs between `n_tasks` tasks (ids `0..n`) and
/// `n_depots` depots (ids `n..n+m`). Depot-to-depot entries are ignored.
#[pyclass(module = "windipp", frozen)]
struct CostMatrix(planner::CostMatrix);

#[pymethods]
impl CostMatrix {
    #[new]
    fn new(n_tasks: usize, n_depots: usize, costs: Vec<Vec<f64>>) -> PyResult<Self> {
        let size = n_tasks + n_depots;
        if costs.len() != size || costs.iter().any(|r| r.len() != size) {
            return Err(PyValueError::new_err(format!("costs must be {size} x {size}")));
        }
        planner::CostMatrix::from_fn(n_tasks, n_depots, |i, j| costs[i][j]).map(Self).map_err(err)
    }

    #[getter]
    fn n_tasks(&self) -> usize {
        self.0.n_tasks
    }

    #[getter]
    fn n_depots(&self) -> usize {
        self.0.n_depots
    }

    fn cost(&self, i: usize, j: usize) -> Option<f64> {
        self.0.cost(i, j)
    }
}

/// One tour per UAV (task ids in visiting order), their costs and the maximum.
#[pyclass(module = "windipp", frozen, get_all)]
struct Routes {
    tours: Vec<Vec<usize>>,
    costs: Vec<f64>,
    c_max: f64,
}

impl From<RouteSolution> for Routes {
    fn from(s: RouteSolution) -> Self {
        Self { tours: s.tours, costs: s.costs, c_max: s.c_max }
    }
}

#[pymethods]
impl Routes {
    fn __repr__(&self) -> String {
        format!("Routes(tours={:?}, c_max={})", self.tours, self.c_max)
    }
}

/// Exact min-max routes by enumeration (small instances only).
#[pyfunction]
fn brute_force(cm: &CostMatrix) -> PyResult<Routes> {
    routing::brute_force(&cm.0).map(Routes::from).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (cm, seed = 0, generations = 500, population = 100))]
fn solve_ga(cm: &CostMatrix, seed: u64, generations: usize, population: usize) -> PyResult<Routes> {
    let params = GaParams { generations, population, ..GaParams::default() };
    routing::solve_ga(&cm.0, &params, seed).map(|r| r.solution.into()).map_err(err)
}

/// One Dubins step toward `carrot`. Returns `(x, y, heading)`.
#[pyfunction]
#[pyo3(signature = (position, heading, speed, r_min, carrot, dt = 0.1, k_h = mission::HEADING_GAIN))]
fn step_dubins(position: Xy, heading: f64, speed: f64, r_min: f64, carrot: Xy, dt: f64, k_h: f64) -> PyResult<(f64, f64, f64)> {
    let s = UavState::new(pt(position), heading, speed, r_min).map_err(err)?;
    let next = mission::step_dubins(&s, pt(carrot), dt, k_h);
    Ok((next.position.x, next.position.y, next.heading))
}

/// Free-space path loss (dB) at distance `d`.
#[pyfunction]
fn path_loss_db(d: f64, wavelength: f64, gain: f64) -> f64 {
    scenario::path_loss_db(d, wavelength, gain)
}

#[pymodule]
#[pyo3(name = "windipp")]
fn windipp_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Hyperparams>()?;
    m.add_class::<CostMatrix>()?;
    m.add_class::<Routes>()?;
    m.add_function(wrap_pyfunction!(kernel, m)?)?;
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    m.add_function(wrap_pyfunction!(mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(gp_predict, m)?)?;
    m.add_function(wrap_pyfunction!(log_marginal_likelihood, m)?)?;
    m.add_function(wrap_pyfunction!(place_tasks, m)?)?;
    m.add_function(wrap_pyfunction!(edge_cost, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force, m)?)?;
    m.add_function(wrap_pyfunction!(solve_ga, m)?)?;
    m.add_function(wrap_pyfunction!(step_dubins, m)?)?;
    m.add_function(wrap_pyfunction!(path_loss_db, m)?)?;
    Ok(())
}
