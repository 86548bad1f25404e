//! Mission simulation: Dubins UAVs tracking their reference paths, periodic
//! noisy measurements of the RF field and the incrementally refreshed GP
//! belief map.
//!
//! Wind only enters the path costs; the flown ground track follows the
//! plain Dubins kinematics
//!
//! ```text
//! ẋ = v cos θ,  ẏ = v sin θ,  θ̇ = u,  |u| ≤ v / r_min
//! ```

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::gp::{entropy, fit_hyperparams, gram, predict, GpHyperparams, GpModel};
use crate::scenario::Scenario;

/// Wraps an angle to `(−π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut a = a % (2.0 * PI);
    if a <= -PI {
        a += 2.0 * PI;
    } else if a > PI {
        a -= 2.0 * PI;
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UavState {
    pub position: Point,
    /// Radians in `(−π, π]`, counter-clockwise from +x.
    pub heading: f64,
    pub speed: f64,
    pub r_min: f64,
}

impl UavState {
    pub fn new(position: Point, heading: f64, speed: f64, r_min: f64) -> Result<Self> {
        if !(speed > 0.0 && r_min > 0.0) {
            return Err(Error::Config(format!("UAV needs positive speed and turn radius, got v = {speed}, r_min = {r_min}")));
        }
        Ok(Self { position, heading: wrap_angle(heading), speed, r_min })
    }

    pub fn max_turn_rate(&self) -> f64 {
        self.speed / self.r_min
    }
}

/// Steering gain on the heading error, 1/s.
pub const HEADING_GAIN: f64 = 2.0;

/// Turn-rate command toward `carrot`.
pub fn turn_command(state: &UavState, carrot: Point, k_h: f64) -> f64 {
    let d = carrot - state.position;
    let err = if d.norm() == 0.0 { 0.0 } else { wrap_angle(d.y.atan2(d.x) - state.heading) };
    let limit = state.max_turn_rate();
    (k_h * err).clamp(-limit, limit)
}

/// One explicit Euler step steering toward `carrot`.
pub fn step_dubins(state: &UavState, carrot: Point, dt: f64, k_h: f64) -> UavState {
    let u = turn_command(state, carrot, k_h);
    let (s, c) = state.heading.sin_cos();
    UavState {
        position: Point::new(state.position.x + state.speed * c * dt, state.position.y + state.speed * s * dt),
        heading: wrap_angle(state.heading + u * dt),
        ..*state
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrackerParams {
    /// Look-ahead distance along the reference as a multiple of `r_min`.
    pub carrot_factor: f64,
    /// Final-waypoint acceptance radius as a multiple of `r_min`.
    pub acceptance_factor: f64,
    pub heading_gain: f64,
    pub dt: f64,
    /// Time budget as a multiple of the reference flight time, plus `time_margin`.
    pub time_factor: f64,
    pub time_margin: f64,
}

impl Default for TrackerParams {
    fn default() -> Self {
        Self { carrot_factor: 3.0, acceptance_factor: 1.0, heading_gain: HEADING_GAIN, dt: 0.1, time_factor: 5.0, time_margin: 600.0 }
    }
}

impl TrackerParams {
    pub fn validate(&self) -> Result<()> {
        let all_positive = [self.carrot_factor, self.acceptance_factor, self.heading_gain, self.dt, self.time_factor]
            .iter()
            .all(|v| *v > 0.0 && v.is_finite());
        if !all_positive || !(self.time_margin >= 0.0) {
            return Err(Error::Config(format!("tracker parameters must be positive, got {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub state: UavState,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn duration(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.t)
    }

    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].state.position.dist(w[1].state.position)).sum()
    }

    /// Position at time `t`, interpolated linearly between steps.
    pub fn position_at(&self, t: f64) -> Point {
        let pts = &self.points;
        let k = pts.partition_point(|p| p.t <= t);
        if k == 0 {
            return pts[0].state.position;
        }
        if k == pts.len() {
            return pts[k - 1].state.position;
        }
        let (a, b) = (&pts[k - 1], &pts[k]);
        a.state.position.lerp(b.state.position, (t - a.t) / (b.t - a.t))
    }
}

/// Arc-length parametrized reference polyline.
struct Reference<'a> {
    points: &'a [Point],
    cumulative: Vec<f64>,
}

impl<'a> Reference<'a> {
    fn new(points: &'a [Point]) -> Self {
        let mut cumulative = vec![0.0];
        for w in points.windows(2) {
            cumulative.push(cumulative.last().unwrap() + w[0].dist(w[1]));
        }
        Self { points, cumulative }
    }

    fn length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    fn at(&self, s: f64) -> Point {
        let s = s.clamp(0.0, self.length());
        let k = self.cumulative.partition_point(|&c| c <= s).clamp(1, self.points.len() - 1);
        let (c0, c1) = (self.cumulative[k - 1], self.cumulative[k]);
        if c1 == c0 {
            return self.points[k];
        }
        self.points[k - 1].lerp(self.points[k], (s - c0) / (c1 - c0))
    }

    /// Arc length of the closest reference point to `p` within `[from, to]`.
    fn project(&self, p: Point, from: f64, to: f64) -> f64 {
        let mut best = (f64::INFINITY, from);
        for k in 1..self.points.len() {
            let (c0, c1) = (self.cumulative[k - 1], self.cumulative[k]);
            if c1 < from || c0 > to || c1 == c0 {
                continue;
            }
            let (a, b) = (self.points[k - 1], self.points[k]);
            let d = b - a;
            let t = ((p - a).dot(d) / d.dot(d)).clamp((from - c0) / (c1 - c0), (to - c0) / (c1 - c0)).clamp(0.0, 1.0);
            let dist = p.dist(a.lerp(b, t));
            if dist < best.0 {
                best = (dist, c0 + t * (c1 - c0));
            }
        }
        best.1
    }
}

/// Follows `reference` with a pure-pursuit carrot that only moves forward.
/// Starts at the first waypoint heading along the first segment and stops
/// once the last waypoint is within the acceptance radius after the whole
/// reference has been traversed.
pub fn track_route(reference: &[Point], speed: f64, r_min: f64, params: &TrackerParams) -> Result<Trajectory> {
    params.validate()?;
    let Some(&start) = reference.first() else {
        return Err(Error::Mission("empty reference path".into()));
    };
    let heading = reference
        .iter()
        .find(|p| p.dist(start) > 0.0)
        .map_or(0.0, |p| (p.y - start.y).atan2(p.x - start.x));
    let mut state = UavState::new(start, heading, speed, r_min)?;
    let mut points = vec![TrajectoryPoint { t: 0.0, state }];
    let path = Reference::new(reference);
    if path.length() == 0.0 {
        return Ok(Trajectory { points });
    }
    let carrot_dist = params.carrot_factor * r_min;
    let accept = params.acceptance_factor * r_min;
    let goal = *reference.last().unwrap();
    let budget = params.time_factor * path.length() / speed + params.time_margin;
    let mut progress = 0.0;
    let mut step = 0usize;
    loop {
        progress = path.project(state.position, progress, progress + 2.0 * carrot_dist).max(progress);
        if path.length() - progress <= carrot_dist && state.position.dist(goal) <= accept {
            break;
        }
        let carrot = path.at(progress + carrot_dist);
        state = step_dubins(&state, carrot, params.dt, params.heading_gain);
        step += 1;
        let t = step as f64 * params.dt;
        points.push(TrajectoryPoint { t, state });
        if t > budget {
            return Err(Error::Mission(format!(
                "final waypoint ({:.1}, {:.1}) not reached within {budget:.1} s ({:.0} of {:.0} m tracked)",
                goal.x,
                goal.y,
                progress,
                path.length()
            )));
        }
    }
    Ok(Trajectory { points })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub t: f64,
    pub uav_id: usize,
    pub position: Point,
    pub value_dbm: f64,
}

/// Samples `truth + N(0, noise_sigma²)` every `period` seconds along a
/// trajectory, starting at `t = 0`.
pub fn sample_trajectory(
    traj: &Trajectory,
    uav_id: usize,
    period: f64,
    noise_sigma: f64,
    scenario: &Scenario,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Measurement>> {
    if !(period > 0.0) || !(noise_sigma >= 0.0) {
        return Err(Error::Config(format!("need period > 0 and noise >= 0, got {period}, {noise_sigma}")));
    }
    let count = (traj.duration() / period + 1e-9).floor() as usize + 1;
    let noise = Normal::new(0.0, noise_sigma).map_err(|e| Error::Config(e.to_string()))?;
    (0..count)
        .map(|k| {
            let t = k as f64 * period;
            let position = traj.position_at(t);
            let value_dbm = scenario.truth(position)? + noise.sample(rng);
            Ok(Measurement { t, uav_id, position, value_dbm })
        })
        .collect()
}

/// GP posterior over the test grid after a number of measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefSnapshot {
    pub measurements: usize,
    pub time: f64,
    pub hyper: GpHyperparams,
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefreshMetrics {
    pub snapshot: usize,
    pub measurements: usize,
    pub time: f64,
    pub sigma_f: f64,
    pub length_scale_x: f64,
    pub length_scale_y: f64,
    /// Root mean square error of the posterior mean against the truth on the grid.
    pub rmse: f64,
    pub mean_std: f64,
    /// Entropy reduction of the (noisy) grid variables under the fitted hyperparameters.
    pub cumulative_mi: f64,
    /// Same, with the sensor hyperparameters held fixed.
    pub cumulative_mi_fixed: f64,
    pub mean_std_fixed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MissionParams {
    pub speed: f64,
    pub r_min: f64,
    pub period: f64,
    pub refit_every: usize,
    /// Standard deviation of the injected measurement noise (dB); defaults
    /// to the sensor noise when absent.
    pub noise_sigma: Option<f64>,
    /// Prior mean of the belief map (dBm).
    pub prior_mean: f64,
    pub tracker: TrackerParams,
}

impl Default for MissionParams {
    fn default() -> Self {
        Self {
            speed: 100.0,
            r_min: 50.0,
            period: 10.0,
            refit_every: 20,
            noise_sigma: None,
            prior_mean: -90.0,
            tracker: TrackerParams::default(),
        }
    }
}

impl MissionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.speed > 0.0 && self.r_min > 0.0 && self.period > 0.0) || self.refit_every == 0 {
            return Err(Error::Config(format!(
                "mission needs positive speed, r_min, period and refit_every, got {self:?}"
            )));
        }
        if !self.prior_mean.is_finite() || self.noise_sigma.is_some_and(|s| !(s >= 0.0)) {
            return Err(Error::Config("prior mean must be finite and noise non-negative".into()));
        }
        self.tracker.validate()
    }
}

#[derive(Debug, Clone)]
pub struct MissionResult {
    pub trajectories: Vec<Trajectory>,
    /// All measurements ordered by time, then UAV id.
    pub measurements: Vec<Measurement>,
    /// Snapshot 0 is the prior.
    pub snapshots: Vec<BeliefSnapshot>,
    pub metrics: Vec<RefreshMetrics>,
    pub prior_rmse: f64,
}

fn rmse(a: &[f64], b: &[f64]) -> f64 {
    (a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64).sqrt()
}

fn mean_std(var: &[f64]) -> f64 {
    var.iter().map(|v| v.max(0.0).sqrt()).sum::<f64>() / var.len() as f64
}

/// Entropy of noisy observations of the grid under `model`.
fn noisy_grid_entropy(model: &GpModel, grid: &[Point]) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let post = predict(model, grid)?;
    let var = post.variance();
    let mut cov = post.cov;
    for i in 0..cov.nrows() {
        cov[(i, i)] += model.hyper.noise_variance();
    }
    Ok((entropy(&cov)?, post.mean.iter().copied().collect(), var))
}

/// Flies every reference path, samples the field and refreshes the belief
/// over `grid` every `refit_every` measurements (and once at the end).
pub fn run_mission(
    scenario: &Scenario,
    grid: &[Point],
    references: &[Vec<Point>],
    sensor: &GpHyperparams,
    params: &MissionParams,
    seed: u64,
) -> Result<MissionResult> {
    params.validate()?;
    sensor.validate()?;
    if grid.is_empty() {
        return Err(Error::Invalid("belief grid is empty".into()));
    }
    let noise_sigma = params.noise_sigma.unwrap_or(sensor.sigma_n);

    let flown: Vec<Result<(Trajectory, Vec<Measurement>)>> = references
        .par_iter()
        .enumerate()
        .map(|(k, reference)| {
            let traj = track_route(reference, params.speed, params.r_min, &params.tracker)
                .map_err(|e| Error::Mission(format!("UAV {k}: {e}")))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let m = sample_trajectory(&traj, k, params.period, noise_sigma, scenario, &mut rng)?;
            Ok((traj, m))
        })
        .collect();
    let mut trajectories = Vec::with_capacity(flown.len());
    let mut measurements = Vec::new();
    for r in flown {
        let (t, m) = r?;
        trajectories.push(t);
        measurements.extend(m);
    }
    measurements.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.uav_id.cmp(&b.uav_id)));

    let truth: Vec<f64> = grid.iter().map(|p| scenario.truth(*p)).collect::<Result<_>>()?;
    let prior = GpModel::new(*sensor, vec![], vec![], params.prior_mean)?;
    let (prior_entropy, prior_mean, prior_var) = noisy_grid_entropy(&prior, grid)?;
    let prior_rmse = rmse(&prior_mean, &truth);

    let mut snapshots = vec![BeliefSnapshot {
        measurements: 0,
        time: 0.0,
        hyper: *sensor,
        mean: prior_mean,
        variance: prior_var.clone(),
    }];
    let mut metrics = vec![RefreshMetrics {
        snapshot: 0,
        measurements: 0,
        time: 0.0,
        sigma_f: sensor.sigma_f,
        length_scale_x: sensor.length_scales[0],
        length_scale_y: sensor.length_scales[1],
        rmse: prior_rmse,
        mean_std: mean_std(&prior_var),
        cumulative_mi: 0.0,
        cumulative_mi_fixed: 0.0,
        mean_std_fixed: mean_std(&prior_var),
    }];

    let mut counts: Vec<usize> = (1..=measurements.len() / params.refit_every).map(|k| k * params.refit_every).collect();
    if counts.last() != Some(&measurements.len()) && !measurements.is_empty() {
        counts.push(measurements.len());
    }
    let mut hyper = *sensor;
    for count in counts {
        let used = &measurements[..count];
        let x: Vec<Point> = used.iter().map(|m| m.position).collect();
        let y: Vec<f64> = used.iter().map(|m| m.value_dbm).collect();
        let fixed = GpModel::new(*sensor, x, y, params.prior_mean)?;
        if count >= 2 {
            hyper = fit_hyperparams(&fixed, &hyper)?;
        }
        let fitted = fixed.with_hyper(hyper);
        let (post_entropy, mean, variance) = noisy_grid_entropy(&fitted, grid)?;
        let fitted_prior_entropy = entropy(&gram(grid, &hyper, true))?;
        let (fixed_entropy, _, fixed_var) = noisy_grid_entropy(&fixed, grid)?;
        let snapshot = snapshots.len();
        let time = used.last().map_or(0.0, |m| m.t);
        metrics.push(RefreshMetrics {
            snapshot,
            measurements: count,
            time,
            sigma_f: hyper.sigma_f,
            length_scale_x: hyper.length_scales[0],
            length_scale_y: hyper.length_scales[1],
            rmse: rmse(&mean, &truth),
            mean_std: mean_std(&variance),
            cumulative_mi: fitted_prior_entropy - post_entropy,
            cumulative_mi_fixed: prior_entropy - fixed_entropy,
            mean_std_fixed: mean_std(&fixed_var),
        });
        snapshots.push(BeliefSnapshot { measurements: count, time, hyper, mean, variance });
    }

    Ok(MissionResult { trajectories, measurements, snapshots, metrics, prior_rmse })
}
