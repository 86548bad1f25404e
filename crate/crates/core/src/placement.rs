//! Task-location placement by mutual-information maximization.
//!
//! The task variables and the test-grid variables are treated as noisy
//! observations of one Gaussian process; the placement objective is the
//! mutual information between the two blocks of their joint covariance.
//! A simplex search over the `2n` task coordinates maximizes it.

use nalgebra::{Cholesky, DMatrix, Dyn};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{polyline_length, Point};
use crate::gp::{cholesky_jittered, cross_cov, gram, log_det, mutual_information, GpHyperparams};
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::scenario::Region;

/// Additive penalty per meter a coordinate has to be moved to get back into
/// free space, in nats.
pub const OUT_OF_REGION_PENALTY: f64 = 1e3;

/// Equally spaced test points inside the free part of a region.
#[derive(Debug, Clone, PartialEq)]
pub struct TestGrid {
    pub points: Vec<Point>,
    pub spacing: f64,
}

/// Axis-aligned lattice anchored at the region's lower-left corner,
/// keeping only points in free space.
pub fn make_test_grid(region: &Region, spacing: f64) -> Result<TestGrid> {
    let b = region.bounds;
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::Config(format!("test grid spacing must be positive, got {spacing}")));
    }
    if spacing > b.width() && spacing > b.height() {
        return Err(Error::Config(format!(
            "test grid spacing {spacing} exceeds both region sides ({} x {})",
            b.width(),
            b.height()
        )));
    }
    let nx = (b.width() / spacing + 1e-9).floor() as usize + 1;
    let ny = (b.height() / spacing + 1e-9).floor() as usize + 1;
    let points: Vec<Point> = (0..ny)
        .flat_map(|j| (0..nx).map(move |i| Point::new(b.min.x + i as f64 * spacing, b.min.y + j as f64 * spacing)))
        .filter(|p| region.is_free(*p))
        .collect();
    if points.len() < 4 {
        return Err(Error::Config(format!(
            "test grid with spacing {spacing} has only {} free points (need at least 4)",
            points.len()
        )));
    }
    Ok(TestGrid { points, spacing })
}

/// Planning-time hyperparameter leveling: lower noise, longer length scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Leveling {
    pub noise_factor: f64,
    pub length_factor: f64,
}

impl Default for Leveling {
    fn default() -> Self {
        Self { noise_factor: 0.1, length_factor: 1.5 }
    }
}

impl Leveling {
    pub fn apply(&self, sensor: &GpHyperparams) -> GpHyperparams {
        GpHyperparams {
            sigma_f: sensor.sigma_f,
            sigma_n: sensor.sigma_n * self.noise_factor,
            length_scales: sensor.length_scales.map(|l| l * self.length_factor),
        }
    }
}

/// Chosen task locations and their objective value (nats).
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub locations: Vec<Point>,
    pub objective: f64,
}

/// Mutual information between noisy observations at `tasks` and at the grid,
/// computed on the explicitly assembled joint covariance.
pub fn placement_objective(tasks: &[Point], grid: &TestGrid, h: &GpHyperparams) -> Result<f64> {
    if tasks.is_empty() {
        return Ok(0.0);
    }
    let all: Vec<Point> = tasks.iter().chain(&grid.points).copied().collect();
    let joint = gram(&all, h, true);
    let first: Vec<usize> = (0..tasks.len()).collect();
    let second: Vec<usize> = (tasks.len()..all.len()).collect();
    mutual_information(&joint, &first, &second)
}

/// Fast evaluator of the same mutual information through the Schur
/// complement of the (fixed) grid block:
/// `I = ½ (ln det K_T − ln det (K_T − K_To K_o⁻¹ K_oT))`.
pub struct MiEvaluator<'a> {
    grid: &'a [Point],
    hyper: GpHyperparams,
    grid_chol: Cholesky<f64, Dyn>,
}

impl<'a> MiEvaluator<'a> {
    pub fn new(grid: &'a [Point], hyper: GpHyperparams) -> Result<Self> {
        let grid_chol = cholesky_jittered(&gram(grid, &hyper, true), hyper.signal_variance())?;
        Ok(Self { grid, hyper, grid_chol })
    }

    pub fn mutual_information(&self, points: &[Point]) -> Result<f64> {
        if points.is_empty() {
            return Ok(0.0);
        }
        let k_t = gram(points, &self.hyper, true);
        let k_ot = cross_cov(self.grid, points, &self.hyper);
        let v = self
            .grid_chol
            .l_dirty()
            .solve_lower_triangular(&k_ot)
            .ok_or_else(|| Error::Numeric("triangular solve failed".into()))?;
        let schur: DMatrix<f64> = &k_t - v.tr_mul(&v);
        let schur = symmetrize(schur);
        Ok(0.5 * (log_det(&k_t)? - log_det(&schur)?))
    }
}

fn symmetrize(mut m: DMatrix<f64>) -> DMatrix<f64> {
    for i in 0..m.nrows() {
        for j in 0..i {
            let s = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = s;
            m[(j, i)] = s;
        }
    }
    m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlacementOptions {
    /// Independent stratified restarts; the best objective wins.
    pub restarts: usize,
    /// Iteration budget per optimized coordinate.
    pub iterations_per_coordinate: usize,
    /// Simplex diameter tolerance (m).
    pub x_tol: f64,
    /// Vertex value spread tolerance (nats).
    pub f_tol: f64,
    /// Initial simplex step as a fraction of the region size.
    pub initial_step: f64,
}

impl Default for PlacementOptions {
    fn default() -> Self {
        Self { restarts: 5, iterations_per_coordinate: 200, x_tol: 1e-3, f_tol: 1e-9, initial_step: 0.1 }
    }
}

/// Outcome of one placement optimization.
#[derive(Debug, Clone)]
pub struct PlacementResult {
    pub placement: Placement,
    /// Objective of the winning restart's starting locations.
    pub start_objective: f64,
    /// Best-so-far (penalized) objective after each simplex iteration of the winning restart.
    pub trace: Vec<f64>,
    pub restart: usize,
}

fn decode(x: &[f64]) -> Vec<Point> {
    x.chunks_exact(2).map(|c| Point::new(c[0], c[1])).collect()
}

fn encode(points: &[Point]) -> Vec<f64> {
    points.iter().flat_map(|p| [p.x, p.y]).collect()
}

/// `n` starting points, one per distinct cell of a `k × k` partition of the
/// bounding box (`k = ⌈√n⌉`), projected into free space.
pub fn stratified_start(region: &Region, n: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
    if n == 0 {
        return vec![];
    }
    let k = (n as f64).sqrt().ceil() as usize;
    let b = region.bounds;
    let (cw, ch) = (b.width() / k as f64, b.height() / k as f64);
    let mut cells: Vec<usize> = (0..k * k).collect();
    cells.shuffle(rng);
    cells[..n]
        .iter()
        .map(|&c| {
            let (ci, cj) = ((c % k) as f64, (c / k) as f64);
            let mut p = Point::default();
            for _ in 0..100 {
                p = Point::new(
                    b.min.x + (ci + rng.random::<f64>()) * cw,
                    b.min.y + (cj + rng.random::<f64>()) * ch,
                );
                if region.is_free(p) {
                    return p;
                }
            }
            region.project(p).0
        })
        .collect()
}

/// Runs one simplex search from `start`.
pub fn optimize_from(
    region: &Region,
    start: &[Point],
    grid: &TestGrid,
    h_plan: &GpHyperparams,
    opts: &PlacementOptions,
) -> Result<PlacementResult> {
    let start: Vec<Point> = start.iter().map(|p| region.project(*p).0).collect();
    let start_objective = placement_objective(&start, grid, h_plan)?;
    if start.is_empty() {
        return Ok(PlacementResult {
            placement: Placement { locations: vec![], objective: 0.0 },
            start_objective,
            trace: vec![0.0],
            restart: 0,
        });
    }
    let evaluator = MiEvaluator::new(&grid.points, *h_plan)?;
    let penalized = |x: &[f64]| -> f64 {
        let mut displacement = 0.0;
        let projected: Vec<Point> = decode(x)
            .into_iter()
            .map(|p| {
                let (q, d) = region.project(p);
                displacement += d;
                q
            })
            .collect();
        match evaluator.mutual_information(&projected) {
            Ok(mi) => -mi + OUT_OF_REGION_PENALTY * displacement,
            Err(_) => f64::INFINITY,
        }
    };
    let step = opts.initial_step * region.bounds.width().max(region.bounds.height());
    let x0 = encode(&start);
    let nm_opts = NelderMeadOptions {
        max_iter: opts.iterations_per_coordinate * x0.len(),
        x_tol: opts.x_tol,
        f_tol: opts.f_tol,
    };
    // step inward so the initial simplex does not start against the far wall
    let center = region.bounds.center();
    let steps: Vec<f64> = x0
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let c = if i % 2 == 0 { center.x } else { center.y };
            if v > c {
                -step
            } else {
                step
            }
        })
        .collect();
    let result = nelder_mead(penalized, &x0, &steps, &nm_opts);
    let locations: Vec<Point> = decode(&result.x).into_iter().map(|p| region.project(p).0).collect();
    let objective = placement_objective(&locations, grid, h_plan)?;
    let placement = if objective >= start_objective {
        Placement { locations, objective }
    } else {
        Placement { locations: start, objective: start_objective }
    };
    Ok(PlacementResult {
        placement,
        start_objective,
        trace: result.trace.iter().map(|f| -f).collect(),
        restart: 0,
    })
}

/// Best of `opts.restarts` seeded simplex searches. Restarts run in
/// parallel; the winner is the highest objective with ties going to the
/// lowest restart index, so the result does not depend on scheduling.
pub fn optimize_task_locations(
    region: &Region,
    n: usize,
    grid: &TestGrid,
    h_plan: &GpHyperparams,
    seed: u64,
    opts: &PlacementOptions,
) -> Result<PlacementResult> {
    h_plan.validate()?;
    let restarts = opts.restarts.max(1);
    let runs: Vec<Result<PlacementResult>> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let start = stratified_start(region, n, &mut rng);
            let mut run = optimize_from(region, &start, grid, h_plan, opts)?;
            run.restart = r;
            Ok(run)
        })
        .collect();
    let mut best: Option<PlacementResult> = None;
    for run in runs {
        let run = run?;
        if best.as_ref().is_none_or(|b| run.placement.objective > b.placement.objective) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// How well the task count matches the sensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitClass {
    Overfitted,
    Normal,
    Underfitted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitThresholds {
    /// Below this `MI₂ / MI₁` the tasks promise more than the tour delivers.
    pub min_ratio: f64,
    /// Above this `MI₂ / MI₁` the tour gathers information the tasks do not account for.
    pub max_ratio: f64,
    /// Sensing density (samples per `ℓ_x ℓ_y` of area) above which the tour
    /// counts as densely overlapped.
    pub overlap_density: f64,
}

impl Default for FitThresholds {
    fn default() -> Self {
        Self { min_ratio: 0.9, max_ratio: 1.2, overlap_density: 2.0 }
    }
}

/// Report comparing the information promised by the task locations with the
/// information gathered by sensing along a tour through them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostic {
    pub class: FitClass,
    /// Placement objective under the planning hyperparameters.
    pub mi_tasks: f64,
    /// Mutual information of the samples along the tour under the sensor hyperparameters.
    pub mi_path: f64,
    pub ratio: f64,
    pub tour_length: f64,
    pub samples: usize,
    /// Samples per `ℓ_x ℓ_y` of region area.
    pub sampling_density: f64,
}

/// Closed tour through `points` (nearest neighbour, then 2-opt), starting at index 0.
pub fn hamiltonian_tour(points: &[Point]) -> Vec<usize> {
    let n = points.len();
    if n == 0 {
        return vec![];
    }
    let mut tour = vec![0];
    let mut used = vec![false; n];
    used[0] = true;
    for _ in 1..n {
        let last = points[*tour.last().unwrap()];
        let next = (0..n)
            .filter(|&i| !used[i])
            .min_by(|&a, &b| last.dist(points[a]).total_cmp(&last.dist(points[b])))
            .unwrap();
        used[next] = true;
        tour.push(next);
    }
    let mut improved = true;
    while improved {
        improved = false;
        for i in 0..n.saturating_sub(1) {
            for j in i + 2..n {
                let (a, b) = (points[tour[i]], points[tour[i + 1]]);
                let (c, d) = (points[tour[j]], points[tour[(j + 1) % n]]);
                if (j + 1) % n == i {
                    continue;
                }
                if a.dist(c) + b.dist(d) < a.dist(b) + c.dist(d) - 1e-9 {
                    tour[i + 1..=j].reverse();
                    improved = true;
                }
            }
        }
    }
    tour
}

/// Points every `spacing` meters along a polyline, starting at its first vertex.
pub fn sample_polyline(poly: &[Point], spacing: f64) -> Vec<Point> {
    let mut out = Vec::new();
    if poly.is_empty() {
        return out;
    }
    out.push(poly[0]);
    let mut carry = 0.0;
    for w in poly.windows(2) {
        let len = w[0].dist(w[1]);
        let mut s = spacing - carry;
        while s <= len {
            out.push(w[0].lerp(w[1], s / len));
            s += spacing;
        }
        carry = len - (s - spacing);
    }
    out
}

/// Classifies a placement as over-, under- or normally fitted.
pub fn fitting_diagnostic(
    placement: &Placement,
    sensing_spacing: f64,
    h_sensor: &GpHyperparams,
    h_plan: &GpHyperparams,
    grid: &TestGrid,
    region: &Region,
    thresholds: &FitThresholds,
) -> Result<FitDiagnostic> {
    if !(sensing_spacing > 0.0) {
        return Err(Error::Config("sensing spacing must be positive".into()));
    }
    let mi_tasks = MiEvaluator::new(&grid.points, *h_plan)?.mutual_information(&placement.locations)?;
    let order = hamiltonian_tour(&placement.locations);
    let mut closed: Vec<Point> = order.iter().map(|&i| placement.locations[i]).collect();
    if let Some(&first) = closed.first() {
        closed.push(first);
    }
    let samples = sample_polyline(&closed, sensing_spacing);
    let mi_path = MiEvaluator::new(&grid.points, *h_sensor)?.mutual_information(&samples)?;
    let area = region.bounds.width() * region.bounds.height();
    let sampling_density = samples.len() as f64 * h_sensor.length_scales[0] * h_sensor.length_scales[1] / area;
    let ratio = if mi_tasks > 0.0 { mi_path / mi_tasks } else { f64::INFINITY };
    // Too many tasks: the leveled plan over-claims and the long tour
    // re-senses the same ground. Too few: the tour gathers far more than the
    // sparse tasks represent, or falls short without any overlap to blame.
    let class = if ratio > thresholds.max_ratio {
        FitClass::Underfitted
    } else if ratio < thresholds.min_ratio {
        if sampling_density > thresholds.overlap_density {
            FitClass::Overfitted
        } else {
            FitClass::Underfitted
        }
    } else {
        FitClass::Normal
    };
    Ok(FitDiagnostic {
        class,
        mi_tasks,
        mi_path,
        ratio,
        tour_length: polyline_length(&closed),
        samples: samples.len(),
        sampling_density,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Polygon, Rect};

    fn square(side: f64) -> Region {
        Region::new(Rect::new(Point::new(0.0, 0.0), Point::new(side, side)).unwrap(), vec![]).unwrap()
    }

    fn hyper() -> GpHyperparams {
        GpHyperparams::isotropic(30.0, 1.0, 30.0)
    }

    fn quick() -> PlacementOptions {
        PlacementOptions { restarts: 2, iterations_per_coordinate: 60, ..Default::default() }
    }

    #[test]
    fn grid_counts_and_obstacles() {
        let g = make_test_grid(&square(100.0), 50.0).unwrap();
        assert_eq!(g.points.len(), 9);
        let hole = Polygon::new(vec![
            Point::new(40.0, 40.0),
            Point::new(60.0, 40.0),
            Point::new(60.0, 60.0),
            Point::new(40.0, 60.0),
        ])
        .unwrap();
        let region = Region::new(square(100.0).bounds, vec![hole]).unwrap();
        let g = make_test_grid(&region, 50.0).unwrap();
        assert_eq!(g.points.len(), 8);
        assert!(g.points.iter().all(|p| region.is_free(*p)));
        assert!(make_test_grid(&square(100.0), 150.0).is_err());
        assert!(make_test_grid(&square(100.0), 0.0).is_err());
    }

    #[test]
    fn distant_tasks_carry_no_information() {
        let grid = make_test_grid(&square(100.0), 10.0).unwrap();
        let far = [Point::new(1e5, 1e5), Point::new(-1e5, 3e5)];
        assert!(placement_objective(&far, &grid, &hyper()).unwrap() < 1e-9);
    }

    #[test]
    fn duplicate_gains_less_than_a_new_location() {
        let grid = make_test_grid(&square(100.0), 10.0).unwrap();
        let h = hyper();
        let base = [Point::new(25.0, 25.0)];
        let f0 = placement_objective(&base, &grid, &h).unwrap();
        let dup = placement_objective(&[base[0], base[0]], &grid, &h).unwrap();
        let fresh = placement_objective(&[base[0], Point::new(75.0, 70.0)], &grid, &h).unwrap();
        assert!(dup > f0);
        assert!(dup - f0 < fresh - f0);
    }

    #[test]
    fn reflection_symmetry() {
        let grid = make_test_grid(&square(100.0), 10.0).unwrap();
        let h = hyper();
        let tasks = [Point::new(12.0, 31.0), Point::new(66.0, 80.0), Point::new(45.0, 5.0)];
        let mirrored: Vec<Point> = tasks.iter().map(|p| Point::new(100.0 - p.x, p.y)).collect();
        let a = placement_objective(&tasks, &grid, &h).unwrap();
        let b = placement_objective(&mirrored, &grid, &h).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn schur_route_matches_joint_covariance() {
        let grid = make_test_grid(&square(100.0), 10.0).unwrap();
        let h = hyper();
        let tasks = [Point::new(12.0, 31.0), Point::new(66.0, 80.0), Point::new(45.0, 5.0), Point::new(50.0, 50.0)];
        let slow = placement_objective(&tasks, &grid, &h).unwrap();
        let fast = MiEvaluator::new(&grid.points, h).unwrap().mutual_information(&tasks).unwrap();
        assert!((slow - fast).abs() < 1e-8 * slow.max(1.0), "{slow} vs {fast}");
    }

    #[test]
    fn no_tasks_gives_empty_placement() {
        let region = square(100.0);
        let grid = make_test_grid(&region, 10.0).unwrap();
        let r = optimize_task_locations(&region, 0, &grid, &hyper(), 1, &quick()).unwrap();
        assert!(r.placement.locations.is_empty());
        assert_eq!(r.placement.objective, 0.0);
    }

    #[test]
    fn optimizer_is_deterministic_and_stays_in_region() {
        let hole = Polygon::new(vec![
            Point::new(30.0, 30.0),
            Point::new(70.0, 30.0),
            Point::new(70.0, 70.0),
            Point::new(30.0, 70.0),
        ])
        .unwrap();
        let region = Region::new(square(100.0).bounds, vec![hole]).unwrap();
        let grid = make_test_grid(&region, 10.0).unwrap();
        let a = optimize_task_locations(&region, 4, &grid, &hyper(), 11, &quick()).unwrap();
        let b = optimize_task_locations(&region, 4, &grid, &hyper(), 11, &quick()).unwrap();
        assert_eq!(a.placement, b.placement);
        assert!(a.placement.locations.iter().all(|p| region.is_free(*p)));
        assert!(a.placement.objective >= a.start_objective);
        assert!(a.trace.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn warm_started_objective_grows_with_task_count() {
        let region = square(100.0);
        let grid = make_test_grid(&region, 10.0).unwrap();
        let h = hyper();
        let mut prev = optimize_task_locations(&region, 1, &grid, &h, 3, &quick()).unwrap().placement;
        for extra in [Point::new(90.0, 90.0), Point::new(10.0, 85.0)] {
            let mut start = prev.locations.clone();
            start.push(extra);
            let next = optimize_from(&region, &start, &grid, &h, &quick()).unwrap().placement;
            assert!(next.objective >= prev.objective);
            prev = next;
        }
    }

    #[test]
    fn single_task_matches_dense_scan() {
        let region = square(100.0);
        let grid = make_test_grid(&region, 10.0).unwrap();
        let h = hyper();
        let r = optimize_task_locations(&region, 1, &grid, &h, 5, &PlacementOptions::default()).unwrap();
        let mut best = f64::NEG_INFINITY;
        for i in 0..=100 {
            for j in 0..=100 {
                let p = Point::new(i as f64, j as f64);
                best = best.max(placement_objective(&[p], &grid, &h).unwrap());
            }
        }
        assert!(r.placement.objective >= best - 1e-6, "{} < {best}", r.placement.objective);
    }

    fn diagnose(n: usize, seed: u64) -> FitDiagnostic {
        let region = square(100.0);
        let grid = make_test_grid(&region, 10.0).unwrap();
        let sensor = hyper();
        let plan = Leveling::default().apply(&sensor);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let locations: Vec<Point> =
            (0..n).map(|_| Point::new(rng.random_range(0.0..100.0), rng.random_range(0.0..100.0))).collect();
        let placement = Placement { objective: placement_objective(&locations, &grid, &plan).unwrap(), locations };
        fitting_diagnostic(&placement, 5.0, &sensor, &plan, &grid, &region, &FitThresholds::default()).unwrap()
    }

    #[test]
    fn many_tasks_are_overfitted() {
        let d = diagnose(200, 1);
        assert_eq!(d.class, FitClass::Overfitted, "{d:?}");
    }

    #[test]
    fn few_tasks_are_underfitted() {
        let d = diagnose(5, 1);
        assert_eq!(d.class, FitClass::Underfitted, "{d:?}");
    }

    #[test]
    fn optimized_dozen_tasks_are_normal() {
        let region = square(100.0);
        let grid = make_test_grid(&region, 10.0).unwrap();
        let sensor = hyper();
        let plan = Leveling::default().apply(&sensor);
        let placement = optimize_task_locations(&region, 12, &grid, &plan, 1, &PlacementOptions::default()).unwrap().placement;
        let d = fitting_diagnostic(&placement, 5.0, &sensor, &plan, &grid, &region, &FitThresholds::default()).unwrap();
        assert_eq!(d.class, FitClass::Normal, "{d:?}");
        assert!(d.mi_path >= 0.9 * d.mi_tasks);
    }

    #[test]
    fn polyline_sampling_spacing() {
        let poly = [Point::new(0.0, 0.0), Point::new(10.0, 0.0), Point::new(10.0, 7.0)];
        let s = sample_polyline(&poly, 4.0);
        assert_eq!(s.len(), 5);
        assert_eq!(s[3], Point::new(10.0, 2.0));
        for w in s.windows(2) {
            assert!(w[0].dist(w[1]) <= 4.0 + 1e-12);
        }
    }

    #[test]
    fn tour_visits_every_point_once() {
        let pts: Vec<Point> = (0..9).map(|i| Point::new((i * 37 % 11) as f64, (i * 13 % 7) as f64)).collect();
        let mut t = hamiltonian_tour(&pts);
        assert_eq!(t[0], 0);
        t.sort_unstable();
        assert_eq!(t, (0..9).collect::<Vec<_>>());
    }
}
