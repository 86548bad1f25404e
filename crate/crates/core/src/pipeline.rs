//! The four stages wired together, shared by the end-to-end run and the
//! single-stage commands so both produce the same artifacts.

use std::fmt;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::gp::GpHyperparams;
use crate::io::{self, MetricsDoc, TruthRow};
use crate::mission::{run_mission, MissionResult};
use crate::placement::{fitting_diagnostic, make_test_grid, optimize_task_locations, FitDiagnostic, Placement, TestGrid};
use crate::planner::{build_cost_matrix, build_sample_graph, check_airspeed, CostMatrix};
use crate::routing::{check_feasible, solve_ga, RouteSolution};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Scenario,
    Place,
    Costs,
    Route,
    Simulate,
    TruthExport,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Scenario => "scenario",
            Stage::Place => "place",
            Stage::Costs => "costs",
            Stage::Route => "route",
            Stage::Simulate => "simulate",
            Stage::TruthExport => "truth-export",
        };
        f.write_str(name)
    }
}

/// An error tagged with the stage it came from.
#[derive(Debug)]
pub struct StageError {
    pub stage: Stage,
    pub error: Error,
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.stage, self.error)
    }
}

impl std::error::Error for StageError {}

trait Tag<T> {
    fn tag(self, stage: Stage) -> std::result::Result<T, StageError>;
}

impl<T> Tag<T> for Result<T> {
    fn tag(self, stage: Stage) -> std::result::Result<T, StageError> {
        self.map_err(|error| StageError { stage, error })
    }
}

pub type StageResult<T> = std::result::Result<T, StageError>;

pub fn build_scenario(cfg: &PipelineConfig) -> Result<Scenario> {
    let sc = &cfg.scenario;
    Scenario::build(sc.region.clone(), &sc.wind, sc.field_spacing, sc.source.clone())
}

pub fn test_grid(cfg: &PipelineConfig, scenario: &Scenario) -> Result<TestGrid> {
    make_test_grid(&scenario.region, cfg.placement.grid_spacing)
}

pub fn plan_hyper(cfg: &PipelineConfig) -> GpHyperparams {
    cfg.placement.leveling.apply(&cfg.sensor.hyper())
}

/// Stage 1: task locations.
pub fn stage_place(cfg: &PipelineConfig, scenario: &Scenario, grid: &TestGrid) -> Result<Placement> {
    let r = optimize_task_locations(
        &scenario.region,
        cfg.placement.n_tasks,
        grid,
        &plan_hyper(cfg),
        cfg.seeds.placement,
        &cfg.placement.options,
    )?;
    Ok(r.placement)
}

/// Over/under-fitting check of a placement for the configured sensing period.
pub fn diagnose(cfg: &PipelineConfig, scenario: &Scenario, grid: &TestGrid, placement: &Placement) -> Result<FitDiagnostic> {
    let spacing = cfg.mission.params.speed * cfg.mission.params.period;
    fitting_diagnostic(
        placement,
        spacing,
        &cfg.sensor.hyper(),
        &plan_hyper(cfg),
        grid,
        &scenario.region,
        &cfg.placement.thresholds,
    )
}

/// Stage 2: wind-aware cost matrix between tasks and depots.
pub fn stage_costs(cfg: &PipelineConfig, scenario: &Scenario, tasks: &[Point]) -> Result<CostMatrix> {
    check_airspeed(&scenario.wind, cfg.planner.v0)?;
    let fixed: Vec<Point> = tasks.iter().chain(&cfg.mission.depots).copied().collect();
    let graph = build_sample_graph(
        &scenario.region,
        &scenario.wind,
        &fixed,
        cfg.planner.samples,
        cfg.planner.gamma,
        cfg.seeds.planner,
    )?;
    let task_nodes: Vec<usize> = (0..tasks.len()).collect();
    let depot_nodes: Vec<usize> = (tasks.len()..fixed.len()).collect();
    build_cost_matrix(&graph, &depot_nodes, &task_nodes, cfg.planner.v0)
}

/// Stage 3: min-max routes.
pub fn stage_route(cfg: &PipelineConfig, cm: &CostMatrix) -> Result<RouteSolution> {
    if cm.n_depots != cfg.n_uavs() {
        return Err(Error::Invalid(format!(
            "cost matrix has {} depots but the config lists {}",
            cm.n_depots,
            cfg.n_uavs()
        )));
    }
    let sol = solve_ga(cm, &cfg.routing, cfg.seeds.routing)?.solution;
    let violations = check_feasible(&sol, cm.n_tasks, cm.n_depots);
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(Error::Invalid(format!("infeasible routes: {}", list.join("; "))));
    }
    Ok(sol)
}

/// Reference polyline of each UAV: its planned paths concatenated.
pub fn reference_paths(cfg: &PipelineConfig, cm: &CostMatrix, sol: &RouteSolution) -> Result<Vec<Vec<Point>>> {
    sol.tours
        .iter()
        .enumerate()
        .map(|(k, tour)| {
            let depot = cm.n_tasks + k;
            let mut line = vec![cfg.mission.depots[k]];
            let stops: Vec<usize> = std::iter::once(depot).chain(tour.iter().copied()).chain(std::iter::once(depot)).collect();
            if tour.is_empty() {
                return Ok(line);
            }
            for w in stops.windows(2) {
                let e = cm.entry(w[0], w[1]).ok_or_else(|| Error::Invalid(format!("no path {}->{}", w[0], w[1])))?;
                if e.waypoints.len() < 2 {
                    return Err(Error::Invalid(format!("path {}->{} has no waypoints", w[0], w[1])));
                }
                line.extend_from_slice(&e.waypoints[1..]);
            }
            Ok(line)
        })
        .collect()
}

/// Stage 4: fly the routes and map the field.
pub fn stage_simulate(
    cfg: &PipelineConfig,
    scenario: &Scenario,
    grid: &TestGrid,
    cm: &CostMatrix,
    sol: &RouteSolution,
) -> Result<MissionResult> {
    let refs = reference_paths(cfg, cm, sol)?;
    run_mission(scenario, &grid.points, &refs, &cfg.sensor.hyper(), &cfg.mission.params, cfg.seeds.mission)
}

pub fn truth_rows(scenario: &Scenario, grid: &TestGrid) -> Result<Vec<TruthRow>> {
    grid.points.iter().map(|p| Ok(TruthRow { x: p.x, y: p.y, value_dbm: scenario.truth(*p)? })).collect()
}

pub fn write_costs(out: &Path, cm: &CostMatrix) -> Result<()> {
    io::write_cost_matrix(&out.join(io::COST_MATRIX_FILE), cm)?;
    io::write_paths(&out.join(io::PATHS_FILE), cm)
}

pub fn write_mission(out: &Path, grid: &TestGrid, m: &MissionResult) -> Result<()> {
    io::write_trajectories(&out.join(io::TRAJECTORIES_FILE), &m.trajectories)?;
    io::write_measurements(&out.join(io::MEASUREMENTS_FILE), &m.measurements)?;
    io::write_belief(&out.join(io::BELIEF_FILE), &grid.points, &m.snapshots)?;
    io::write_json(&out.join(io::METRICS_FILE), &MetricsDoc { prior_rmse: m.prior_rmse, refreshes: m.metrics.clone() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n_tasks: usize,
    pub n_uavs: usize,
    pub placement_objective: f64,
    pub fit: FitDiagnostic,
    pub c_max: f64,
    pub tour_costs: Vec<f64>,
    pub measurements: usize,
    pub prior_rmse: f64,
    pub final_rmse: f64,
    pub final_mean_std: f64,
    pub final_cumulative_mi: f64,
    pub final_cumulative_mi_fixed: f64,
    /// Wall-clock times live in this file so the summary itself is reproducible.
    pub timings_file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub place_s: f64,
    pub costs_s: f64,
    pub route_s: f64,
    pub simulate_s: f64,
    pub total_s: f64,
}

/// Everything the end-to-end run produced, for callers that want the data
/// and not just the files.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub summary: Summary,
    pub timings: Timings,
    pub grid: TestGrid,
    pub placement: Placement,
    pub cost_matrix: CostMatrix,
    pub routes: RouteSolution,
    pub mission: MissionResult,
}

/// Runs place → costs → route → simulate and writes every artifact to `out`.
pub fn run_all(cfg: &PipelineConfig, out: &Path) -> StageResult<RunOutput> {
    let start = Instant::now();
    std::fs::create_dir_all(out).map_err(Error::from).tag(Stage::Scenario)?;
    let scenario = build_scenario(cfg).tag(Stage::Scenario)?;
    let grid = test_grid(cfg, &scenario).tag(Stage::Place)?;

    let t = Instant::now();
    let placement = stage_place(cfg, &scenario, &grid).tag(Stage::Place)?;
    io::write_placement(&out.join(io::PLACEMENT_FILE), &placement.locations).tag(Stage::Place)?;
    let fit = diagnose(cfg, &scenario, &grid, &placement).tag(Stage::Place)?;
    let place_s = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let cm = stage_costs(cfg, &scenario, &placement.locations).tag(Stage::Costs)?;
    write_costs(out, &cm).tag(Stage::Costs)?;
    let costs_s = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let routes = stage_route(cfg, &cm).tag(Stage::Route)?;
    io::write_routes(&out.join(io::ROUTES_FILE), &routes, cm.n_tasks).tag(Stage::Route)?;
    let route_s = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let mission = stage_simulate(cfg, &scenario, &grid, &cm, &routes).tag(Stage::Simulate)?;
    write_mission(out, &grid, &mission).tag(Stage::Simulate)?;
    let simulate_s = t.elapsed().as_secs_f64();

    let last = mission.metrics.last().expect("prior snapshot always present");
    let summary = Summary {
        n_tasks: cm.n_tasks,
        n_uavs: cm.n_depots,
        placement_objective: placement.objective,
        fit,
        c_max: routes.c_max,
        tour_costs: routes.costs.clone(),
        measurements: mission.measurements.len(),
        prior_rmse: mission.prior_rmse,
        final_rmse: last.rmse,
        final_mean_std: last.mean_std,
        final_cumulative_mi: last.cumulative_mi,
        final_cumulative_mi_fixed: last.cumulative_mi_fixed,
        timings_file: io::TIMINGS_FILE.into(),
    };
    io::write_json(&out.join(io::SUMMARY_FILE), &summary).tag(Stage::Simulate)?;
    let timings = Timings { place_s, costs_s, route_s, simulate_s, total_s: start.elapsed().as_secs_f64() };
    io::write_json(&out.join(io::TIMINGS_FILE), &timings).tag(Stage::Simulate)?;
    Ok(RunOutput { summary, timings, grid, placement, cost_matrix: cm, routes, mission })
}
