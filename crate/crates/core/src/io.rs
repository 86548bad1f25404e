//! Artifact files: CSV tables and JSON documents, each with a reader that
//! restores exactly what was written.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::mission::{BeliefSnapshot, Measurement, RefreshMetrics, Trajectory};
use crate::planner::{CostMatrix, PlannedPath};
use crate::routing::RouteSolution;

pub const PLACEMENT_FILE: &str = "placement.csv";
pub const COST_MATRIX_FILE: &str = "cost_matrix.csv";
pub const PATHS_FILE: &str = "paths.json";
pub const ROUTES_FILE: &str = "routes.json";
pub const TRAJECTORIES_FILE: &str = "trajectories.csv";
pub const MEASUREMENTS_FILE: &str = "measurements.csv";
pub const BELIEF_FILE: &str = "belief.csv";
pub const METRICS_FILE: &str = "metrics.json";
pub const SUMMARY_FILE: &str = "summary.json";
pub const TIMINGS_FILE: &str = "timings.json";
pub const TRUTH_FILE: &str = "truth.csv";

pub fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskRow {
    pub task_id: usize,
    pub x: f64,
    pub y: f64,
}

pub fn write_placement(path: &Path, tasks: &[Point]) -> Result<()> {
    write_csv(path, tasks.iter().enumerate().map(|(task_id, p)| TaskRow { task_id, x: p.x, y: p.y }))
}

pub fn read_placement(path: &Path) -> Result<Vec<Point>> {
    let rows: Vec<TaskRow> = read_csv(path)?;
    for (k, r) in rows.iter().enumerate() {
        if r.task_id != k {
            return Err(Error::Invalid(format!("{}: task ids must be 0, 1, 2, ... in order", path.display())));
        }
    }
    Ok(rows.into_iter().map(|r| Point::new(r.x, r.y)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostRow {
    pub from_id: usize,
    pub to_id: usize,
    pub cost: f64,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub from_id: usize,
    pub to_id: usize,
    pub waypoints: Vec<[f64; 2]>,
}

pub fn write_cost_matrix(path: &Path, cm: &CostMatrix) -> Result<()> {
    write_csv(path, cm.iter().map(|(from_id, to_id, p)| CostRow { from_id, to_id, cost: p.cost, length: p.length }))
}

pub fn write_paths(path: &Path, cm: &CostMatrix) -> Result<()> {
    let records: Vec<PathRecord> = cm
        .iter()
        .map(|(from_id, to_id, p)| PathRecord { from_id, to_id, waypoints: p.waypoints.iter().map(|w| [w.x, w.y]).collect() })
        .collect();
    write_json(path, &records)
}

/// Reads a cost matrix; the depot count is inferred from the number of
/// entries (depot pairs have none). `paths`, when given, fills in the waypoints.
pub fn read_cost_matrix(path: &Path, paths: Option<&Path>) -> Result<CostMatrix> {
    let rows: Vec<CostRow> = read_csv(path)?;
    let size = rows.iter().map(|r| r.from_id.max(r.to_id) + 1).max().unwrap_or(0);
    let missing = (size * size.saturating_sub(1)).checked_sub(rows.len());
    let m = missing.and_then(|miss| (1..=size).find(|&m| m * (m - 1) == miss)).ok_or_else(|| {
        Error::Invalid(format!("{}: {} entries do not describe tasks plus depots", path.display(), rows.len()))
    })?;
    let mut waypoints = std::collections::HashMap::new();
    if let Some(p) = paths {
        let records: Vec<PathRecord> = read_json(p)?;
        for r in records {
            waypoints.insert((r.from_id, r.to_id), r.waypoints.iter().map(|w| Point::new(w[0], w[1])).collect::<Vec<_>>());
        }
    }
    let items = rows
        .into_iter()
        .map(|r| {
            let wp = waypoints.remove(&(r.from_id, r.to_id)).unwrap_or_default();
            (r.from_id, r.to_id, PlannedPath { waypoints: wp, cost: r.cost, length: r.length })
        })
        .collect();
    CostMatrix::from_entries(size - m, m, items)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteRecord {
    pub uav_id: usize,
    pub depot_id: usize,
    pub tour: Vec<usize>,
    pub cost: f64,
}

pub fn write_routes(path: &Path, sol: &RouteSolution, n_tasks: usize) -> Result<()> {
    let records: Vec<RouteRecord> = sol
        .tours
        .iter()
        .zip(&sol.costs)
        .enumerate()
        .map(|(k, (tour, &cost))| RouteRecord { uav_id: k, depot_id: n_tasks + k, tour: tour.clone(), cost })
        .collect();
    write_json(path, &records)
}

pub fn read_routes(path: &Path) -> Result<RouteSolution> {
    let records: Vec<RouteRecord> = read_json(path)?;
    for (k, r) in records.iter().enumerate() {
        if r.uav_id != k {
            return Err(Error::Invalid(format!("{}: uav ids must be 0, 1, 2, ... in order", path.display())));
        }
    }
    let costs: Vec<f64> = records.iter().map(|r| r.cost).collect();
    let c_max = costs.iter().copied().fold(0.0, f64::max);
    Ok(RouteSolution { tours: records.into_iter().map(|r| r.tour).collect(), costs, c_max })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub uav_id: usize,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

pub fn write_trajectories(path: &Path, trajectories: &[Trajectory]) -> Result<()> {
    write_csv(
        path,
        trajectories.iter().enumerate().flat_map(|(uav_id, tr)| {
            tr.points.iter().map(move |p| TrajectoryRow {
                t: p.t,
                uav_id,
                x: p.state.position.x,
                y: p.state.position.y,
                heading: p.state.heading,
            })
        }),
    )
}

pub fn read_trajectories(path: &Path) -> Result<Vec<TrajectoryRow>> {
    read_csv(path)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRow {
    pub t: f64,
    pub uav_id: usize,
    pub x: f64,
    pub y: f64,
    pub value_dbm: f64,
}

pub fn write_measurements(path: &Path, measurements: &[Measurement]) -> Result<()> {
    write_csv(
        path,
        measurements.iter().map(|m| MeasurementRow {
            t: m.t,
            uav_id: m.uav_id,
            x: m.position.x,
            y: m.position.y,
            value_dbm: m.value_dbm,
        }),
    )
}

pub fn read_measurements(path: &Path) -> Result<Vec<Measurement>> {
    let rows: Vec<MeasurementRow> = read_csv(path)?;
    Ok(rows
        .into_iter()
        .map(|r| Measurement { t: r.t, uav_id: r.uav_id, position: Point::new(r.x, r.y), value_dbm: r.value_dbm })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeliefRow {
    pub snapshot: usize,
    pub x: f64,
    pub y: f64,
    pub mean: f64,
    pub std: f64,
}

pub fn write_belief(path: &Path, grid: &[Point], snapshots: &[BeliefSnapshot]) -> Result<()> {
    write_csv(
        path,
        snapshots.iter().enumerate().flat_map(|(k, s)| {
            grid.iter().zip(s.mean.iter().zip(&s.variance)).map(move |(p, (&mean, &var))| BeliefRow {
                snapshot: k,
                x: p.x,
                y: p.y,
                mean,
                std: var.max(0.0).sqrt(),
            })
        }),
    )
}

pub fn read_belief(path: &Path) -> Result<Vec<BeliefRow>> {
    read_csv(path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsDoc {
    pub prior_rmse: f64,
    pub refreshes: Vec<RefreshMetrics>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruthRow {
    pub x: f64,
    pub y: f64,
    pub value_dbm: f64,
}

pub fn write_truth(path: &Path, rows: &[TruthRow]) -> Result<()> {
    write_csv(path, rows.iter().copied())
}

pub fn read_truth(path: &Path) -> Result<Vec<TruthRow>> {
    read_csv(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn placement_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join(PLACEMENT_FILE);
        let tasks = vec![Point::new(0.1 + 0.2, 1.0 / 3.0), Point::new(-1e-300, 12345.678901234567)];
        write_placement(&p, &tasks).unwrap();
        assert_eq!(read_placement(&p).unwrap(), tasks);
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("task_id,x,y\n"));
    }

    #[test]
    fn cost_matrix_round_trip_infers_depots() {
        let dir = tempfile::tempdir().unwrap();
        let cm = CostMatrix::from_fn(4, 2, |i, j| 1.0 + (i * 7 + j) as f64 / 3.0).unwrap();
        let c = dir.path().join(COST_MATRIX_FILE);
        let w = dir.path().join(PATHS_FILE);
        write_cost_matrix(&c, &cm).unwrap();
        write_paths(&w, &cm).unwrap();
        let back = read_cost_matrix(&c, Some(&w)).unwrap();
        assert_eq!(back, cm);
        assert_eq!((back.n_tasks, back.n_depots), (4, 2));
    }

    #[test]
    fn routes_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join(ROUTES_FILE);
        let sol = RouteSolution { tours: vec![vec![2, 0], vec![], vec![1]], costs: vec![3.5, 0.0, 2.25], c_max: 3.5 };
        write_routes(&p, &sol, 3).unwrap();
        assert_eq!(read_routes(&p).unwrap(), sol);
        let records: Vec<RouteRecord> = read_json(&p).unwrap();
        assert_eq!(records[2].depot_id, 5);
    }
}
