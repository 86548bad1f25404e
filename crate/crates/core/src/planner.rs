//! Wind-aware path costs and the depot/task cost matrix.
//!
//! The normalized energy of flying a path σ at constant airspeed `v0` is
//!
//! ```text
//! C(σ) = τ − (1 / v0²) ∫ w(σ) · dσ,     τ = length / v0
//! ```
//!
//! Costs are computed on a shared r-disc sample graph with a multi-query
//! Fast Marching Tree: one run per source reaches every goal. Edge lengths,
//! wind line integrals and collision results are cached per undirected edge
//! and shared across runs (and threads).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::scenario::{Region, WindField};

/// Connection radius multiplier: `r = γ √(ln M / M) · diam`.
pub const DEFAULT_GAMMA: f64 = 2.0;

/// Midpoint-rule line integral of the wind along segment `pq`, with
/// sub-segments no longer than `min(grid spacing, |pq| / 4)`.
/// Returns the integral and the largest wind speed seen at a midpoint.
fn wind_line_integral(p: Point, q: Point, field: &WindField) -> Result<(f64, f64, usize)> {
    let len = p.dist(q);
    if len == 0.0 {
        return Ok((0.0, 0.0, 0));
    }
    let step = field.lattice.spacing.min(len / 4.0);
    let pieces = (len / step - 1e-9).ceil().max(1.0) as usize;
    let delta = (q - p) * (1.0 / pieces as f64);
    let mut integral = 0.0;
    let mut max_speed: f64 = 0.0;
    let mut worst = 0;
    for i in 0..pieces {
        let mid = p + delta * (i as f64 + 0.5);
        let w = field.wind_at(mid)?;
        integral += w.dot(delta);
        let s = w.norm();
        if s > max_speed {
            max_speed = s;
            worst = i;
        }
    }
    Ok((integral, max_speed, worst))
}

/// Cost of flying straight from `p` to `q` at airspeed `v0`.
pub fn edge_cost(p: Point, q: Point, field: &WindField, v0: f64) -> Result<f64> {
    if !(v0 > 0.0) {
        return Err(Error::Precondition(format!("airspeed must be positive, got {v0}")));
    }
    let (integral, max_speed, worst) = wind_line_integral(p, q, field)?;
    if v0 <= max_speed {
        let len = p.dist(q);
        let pieces = if len == 0.0 { 1 } else { (len / field.lattice.spacing.min(len / 4.0) - 1e-9).ceil() as usize };
        let a = p.lerp(q, worst as f64 / pieces as f64);
        let b = p.lerp(q, (worst + 1) as f64 / pieces as f64);
        return Err(Error::Precondition(format!(
            "airspeed {v0} m/s does not exceed wind speed {max_speed:.3} m/s on sub-segment {worst} \
             ({:.1}, {:.1})-({:.1}, {:.1})",
            a.x, a.y, b.x, b.y
        )));
    }
    Ok(p.dist(q) / v0 - integral / (v0 * v0))
}

/// Rejects airspeeds that do not exceed the strongest wind in the field.
pub fn check_airspeed(field: &WindField, v0: f64) -> Result<()> {
    let max = field.max_speed();
    if !(v0 > max) {
        return Err(Error::Precondition(format!(
            "planner requires airspeed v0 = {v0} m/s to exceed the maximum wind speed {max:.3} m/s"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
struct EdgeGeom {
    length: f64,
    /// Wind line integral from the lower to the higher node index.
    integral: f64,
}

#[derive(Debug, Default)]
struct EdgeSlot {
    geom: OnceLock<Option<EdgeGeom>>,
    free: OnceLock<bool>,
}

/// Collision status of a cached edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeStatus {
    Unknown,
    Free,
    Blocked,
}

/// Random r-disc graph over free space plus the fixed depot/task points.
#[derive(Debug)]
pub struct SampleGraph {
    pub nodes: Vec<Point>,
    pub radius: f64,
    /// The first `fixed` nodes are the fixed points, in the order given.
    pub fixed: usize,
    /// Number of uniform draws needed to collect the free samples.
    pub draws: usize,
    region: Region,
    field: WindField,
    offsets: Vec<usize>,
    adjacency: Vec<(u32, u32)>,
    slots: Vec<EdgeSlot>,
    collision_checks: AtomicUsize,
}

impl SampleGraph {
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[self.offsets[i]..self.offsets[i + 1]].iter().map(|&(j, _)| j as usize)
    }

    fn neighbor_slots(&self, i: usize) -> &[(u32, u32)] {
        &self.adjacency[self.offsets[i]..self.offsets[i + 1]]
    }

    fn slot_of(&self, i: usize, j: usize) -> Option<usize> {
        self.neighbor_slots(i).iter().find(|&&(k, _)| k as usize == j).map(|&(_, s)| s as usize)
    }

    fn geom(&self, slot: usize, i: usize, j: usize) -> Option<EdgeGeom> {
        *self.slots[slot].geom.get_or_init(|| {
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            let (p, q) = (self.nodes[a], self.nodes[b]);
            wind_line_integral(p, q, &self.field)
                .ok()
                .map(|(integral, _, _)| EdgeGeom { length: p.dist(q), integral })
        })
    }

    fn directed_cost(&self, slot: usize, from: usize, to: usize, v0: f64) -> Option<(f64, f64)> {
        let g = self.geom(slot, from, to)?;
        let integral = if from < to { g.integral } else { -g.integral };
        Some((g.length / v0 - integral / (v0 * v0), g.length))
    }

    fn is_free_slot(&self, slot: usize, i: usize, j: usize) -> bool {
        *self.slots[slot].free.get_or_init(|| {
            self.collision_checks.fetch_add(1, AtomicOrdering::Relaxed);
            self.region.segment_free(self.nodes[i], self.nodes[j])
        })
    }

    /// Cost of the cached edge `from → to`, if the nodes are neighbours.
    pub fn edge_cost(&self, from: usize, to: usize, v0: f64) -> Option<f64> {
        let slot = self.slot_of(from, to)?;
        self.directed_cost(slot, from, to, v0).map(|c| c.0)
    }

    /// Geometric length and wind integral of `from → to` as stored in the cache.
    pub fn edge_terms(&self, from: usize, to: usize) -> Option<(f64, f64)> {
        let slot = self.slot_of(from, to)?;
        let g = self.geom(slot, from, to)?;
        Some((g.length, if from < to { g.integral } else { -g.integral }))
    }

    /// Collision-checks (and caches) the edge between two neighbours.
    pub fn edge_free(&self, i: usize, j: usize) -> Option<bool> {
        self.slot_of(i, j).map(|s| self.is_free_slot(s, i, j))
    }

    pub fn edge_status(&self, i: usize, j: usize) -> EdgeStatus {
        match self.slot_of(i, j).and_then(|s| self.slots[s].free.get().copied()) {
            None => EdgeStatus::Unknown,
            Some(true) => EdgeStatus::Free,
            Some(false) => EdgeStatus::Blocked,
        }
    }

    /// Number of segment collision checks performed so far.
    pub fn collision_checks(&self) -> usize {
        self.collision_checks.load(AtomicOrdering::Relaxed)
    }

    pub fn edge_count(&self) -> usize {
        self.slots.len()
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn field(&self) -> &WindField {
        &self.field
    }

    /// Same graph with an empty edge cache.
    pub fn with_fresh_cache(&self) -> Self {
        Self {
            nodes: self.nodes.clone(),
            radius: self.radius,
            fixed: self.fixed,
            draws: self.draws,
            region: self.region.clone(),
            field: self.field.clone(),
            offsets: self.offsets.clone(),
            adjacency: self.adjacency.clone(),
            slots: (0..self.slots.len()).map(|_| EdgeSlot::default()).collect(),
            collision_checks: AtomicUsize::new(0),
        }
    }
}

/// Samples `samples` seeded uniform free points and connects every pair
/// closer than `γ √(ln M / M) · diam(region)`, where `M` counts all nodes.
pub fn build_sample_graph(
    region: &Region,
    field: &WindField,
    fixed: &[Point],
    samples: usize,
    gamma: f64,
    seed: u64,
) -> Result<SampleGraph> {
    if samples == 0 {
        return Err(Error::Config("sample graph needs at least one sample".into()));
    }
    if !(gamma > 0.0) {
        return Err(Error::Config(format!("connection radius factor must be positive, got {gamma}")));
    }
    for (k, p) in fixed.iter().enumerate() {
        if !region.is_free(*p) {
            return Err(Error::Config(format!("fixed point {k} at ({}, {}) is not in free space", p.x, p.y)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = region.bounds;
    let mut nodes: Vec<Point> = fixed.to_vec();
    let max_draws = samples.saturating_mul(1000).max(10_000);
    let mut draws = 0;
    while nodes.len() < fixed.len() + samples {
        if draws >= max_draws {
            return Err(Error::Config(format!(
                "region has (almost) no free space: {} free samples after {draws} draws",
                nodes.len() - fixed.len()
            )));
        }
        draws += 1;
        let p = Point::new(rng.random_range(b.min.x..=b.max.x), rng.random_range(b.min.y..=b.max.y));
        if region.is_free(p) {
            nodes.push(p);
        }
    }

    let m = nodes.len() as f64;
    let radius = gamma * (m.ln().max(f64::MIN_POSITIVE) / m).sqrt() * region.diameter();

    // bucket nodes into cells of side `radius` to find neighbours
    let cols = ((b.width() / radius).floor() as usize + 1).max(1);
    let rows = ((b.height() / radius).floor() as usize + 1).max(1);
    let cell_of = |p: Point| {
        let cx = (((p.x - b.min.x) / radius) as usize).min(cols - 1);
        let cy = (((p.y - b.min.y) / radius) as usize).min(rows - 1);
        (cx, cy)
    };
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); cols * rows];
    for (i, p) in nodes.iter().enumerate() {
        let (cx, cy) = cell_of(*p);
        buckets[cy * cols + cx].push(i);
    }
    let mut lists: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for (i, p) in nodes.iter().enumerate() {
        let (cx, cy) = cell_of(*p);
        for ny in cy.saturating_sub(1)..=(cy + 1).min(rows - 1) {
            for nx in cx.saturating_sub(1)..=(cx + 1).min(cols - 1) {
                for &j in &buckets[ny * cols + nx] {
                    if j != i && p.dist(nodes[j]) <= radius {
                        lists[i].push(j);
                    }
                }
            }
        }
        lists[i].sort_unstable();
    }

    let mut slot_ids = std::collections::HashMap::new();
    let mut offsets = Vec::with_capacity(nodes.len() + 1);
    let mut adjacency = Vec::new();
    offsets.push(0);
    for (i, list) in lists.iter().enumerate() {
        for &j in list {
            let key = (i.min(j), i.max(j));
            let next = slot_ids.len();
            let s = *slot_ids.entry(key).or_insert(next);
            adjacency.push((j as u32, s as u32));
        }
        offsets.push(adjacency.len());
    }
    let slots = (0..slot_ids.len()).map(|_| EdgeSlot::default()).collect();

    Ok(SampleGraph {
        nodes,
        radius,
        fixed: fixed.len(),
        draws,
        region: region.clone(),
        field: field.clone(),
        offsets,
        adjacency,
        slots,
        collision_checks: AtomicUsize::new(0),
    })
}

/// Reference path between two graph nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannedPath {
    pub waypoints: Vec<Point>,
    pub cost: f64,
    pub length: f64,
}

/// Result of a multi-query run for one goal.
#[derive(Debug, Clone, PartialEq)]
pub enum GoalOutcome {
    Reached(PlannedPath),
    Unreachable,
}

impl GoalOutcome {
    pub fn path(&self) -> Option<&PlannedPath> {
        match self {
            GoalOutcome::Reached(p) => Some(p),
            GoalOutcome::Unreachable => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Frontier {
    cost: f64,
    node: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    // reversed: BinaryHeap pops the cheapest node, lowest index on ties
    fn cmp(&self, other: &Self) -> Ordering {
        other.cost.total_cmp(&self.cost).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multi-query FMT* from `source`, expanding until every reachable goal has
/// been expanded or the frontier runs dry.
///
/// Each node is connected to its locally optimal already-expanded neighbour
/// and only that edge is collision-checked (lazily, through the shared
/// cache). Nodes are committed in order of tentative cost-to-come, so on an
/// obstacle-free graph the costs are exactly the graph shortest paths; if
/// the chosen edge turns out blocked the next best expanded neighbour is
/// tried.
pub fn fmt_multiquery(
    graph: &SampleGraph,
    source: usize,
    goals: &[usize],
    v0: f64,
) -> Result<BTreeMap<usize, GoalOutcome>> {
    let n = graph.nodes.len();
    if source >= n || goals.iter().any(|&g| g >= n) {
        return Err(Error::Invalid("source and goals must be graph nodes".into()));
    }
    check_airspeed(&graph.field, v0)?;

    let mut cost = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut parent_slot = vec![usize::MAX; n];
    let mut closed = vec![false; n];
    let mut is_goal = vec![false; n];
    for &g in goals {
        is_goal[g] = true;
    }
    let mut remaining = goals.iter().filter(|&&g| g != source).collect::<std::collections::BTreeSet<_>>().len();

    cost[source] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Frontier { cost: 0.0, node: source });

    while remaining > 0 {
        let Some(Frontier { cost: c, node: x }) = heap.pop() else { break };
        if closed[x] || c != cost[x] {
            continue;
        }
        if x != source && !graph.is_free_slot(parent_slot[x], parent[x], x) {
            // reconnect through the best expanded neighbour whose edge is free
            let mut candidates: Vec<(f64, usize, usize)> = graph
                .neighbor_slots(x)
                .iter()
                .filter(|&&(y, _)| closed[y as usize])
                .filter_map(|&(y, s)| {
                    let (y, s) = (y as usize, s as usize);
                    graph.directed_cost(s, y, x, v0).map(|(e, _)| (cost[y] + e, y, s))
                })
                .collect();
            candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            cost[x] = f64::INFINITY;
            parent[x] = usize::MAX;
            for (total, y, s) in candidates {
                if graph.is_free_slot(s, y, x) {
                    cost[x] = total;
                    parent[x] = y;
                    parent_slot[x] = s;
                    break;
                }
            }
            if cost[x].is_finite() {
                heap.push(Frontier { cost: cost[x], node: x });
            }
            continue;
        }
        closed[x] = true;
        if is_goal[x] && x != source {
            remaining -= 1;
        }
        for &(y, s) in graph.neighbor_slots(x) {
            let y = y as usize;
            if closed[y] {
                continue;
            }
            if let Some((e, _)) = graph.directed_cost(s as usize, x, y, v0) {
                let total = cost[x] + e;
                if total < cost[y] || (total == cost[y] && x < parent[y]) {
                    cost[y] = total;
                    parent[y] = x;
                    parent_slot[y] = s as usize;
                    heap.push(Frontier { cost: total, node: y });
                }
            }
        }
    }

    let mut out = BTreeMap::new();
    for &g in goals {
        if g == source {
            continue;
        }
        if !closed[g] {
            out.insert(g, GoalOutcome::Unreachable);
            continue;
        }
        let mut chain = vec![g];
        let mut k = g;
        while k != source {
            k = parent[k];
            chain.push(k);
        }
        chain.reverse();
        let waypoints: Vec<Point> = chain.iter().map(|&i| graph.nodes[i]).collect();
        let length = crate::geometry::polyline_length(&waypoints);
        out.insert(g, GoalOutcome::Reached(PlannedPath { waypoints, cost: cost[g], length }));
    }
    Ok(out)
}

/// Pairwise costs between `n` tasks (ids `0..n`) and `m` depots (ids `n..n+m`).
/// Depot-to-depot and diagonal entries are absent.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    pub n_tasks: usize,
    pub n_depots: usize,
    entries: Vec<Option<PlannedPath>>,
}

impl CostMatrix {
    pub fn size(&self) -> usize {
        self.n_tasks + self.n_depots
    }

    pub fn is_depot(&self, id: usize) -> bool {
        id >= self.n_tasks && id < self.size()
    }

    /// Whether the pair is an edge of the routing graph.
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && i < self.size() && j < self.size() && !(self.is_depot(i) && self.is_depot(j))
    }

    pub fn cost(&self, i: usize, j: usize) -> Option<f64> {
        self.entry(i, j).map(|p| p.cost)
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<&PlannedPath> {
        if i >= self.size() || j >= self.size() {
            return None;
        }
        self.entries[i * self.size() + j].as_ref()
    }

    /// Builds a matrix from a cost function; `f` is only called for routing edges.
    pub fn from_fn(n_tasks: usize, n_depots: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let size = n_tasks + n_depots;
        let mut entries = vec![None; size * size];
        let mut cm = Self { n_tasks, n_depots, entries: vec![] };
        for i in 0..size {
            for j in 0..size {
                if i != j && !(i >= n_tasks && j >= n_tasks) {
                    let c = f(i, j);
                    if !(c.is_finite() && c > 0.0) {
                        return Err(Error::Invalid(format!("cost {i}->{j} must be finite and positive, got {c}")));
                    }
                    entries[i * size + j] = Some(PlannedPath { waypoints: vec![], cost: c, length: 0.0 });
                }
            }
        }
        cm.entries = entries;
        Ok(cm)
    }

    /// Builds a matrix from explicit entries, checking that every routing edge is present.
    pub fn from_entries(n_tasks: usize, n_depots: usize, items: Vec<(usize, usize, PlannedPath)>) -> Result<Self> {
        let size = n_tasks + n_depots;
        let mut cm = Self { n_tasks, n_depots, entries: vec![None; size * size] };
        for (i, j, p) in items {
            if !cm.has_edge(i, j) {
                return Err(Error::Invalid(format!("{i}->{j} is not an edge of the routing graph")));
            }
            if !(p.cost.is_finite() && p.cost > 0.0) {
                return Err(Error::Invalid(format!("cost {i}->{j} must be finite and positive")));
            }
            cm.entries[i * size + j] = Some(p);
        }
        let missing: Vec<String> = (0..size)
            .flat_map(|i| (0..size).map(move |j| (i, j)))
            .filter(|&(i, j)| cm.has_edge(i, j) && cm.entries[i * size + j].is_none())
            .map(|(i, j)| format!("{i}->{j}"))
            .collect();
        if !missing.is_empty() {
            return Err(Error::Invalid(format!("missing cost entries: {}", missing.join(", "))));
        }
        Ok(cm)
    }

    /// All present entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &PlannedPath)> {
        let size = self.size();
        self.entries.iter().enumerate().filter_map(move |(k, e)| e.as_ref().map(|p| (k / size, k % size, p)))
    }
}

/// How the edge cache is shared between the per-source runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheSharing {
    /// One cache for all runs (the default).
    Shared,
    /// Every run starts from an empty cache.
    PerQuery,
}

/// Runs one multi-query FMT* per depot and task and assembles the matrix.
/// `task_nodes[t]` / `depot_nodes[d]` are the graph nodes of task `t` and depot `d`.
pub fn build_cost_matrix(
    graph: &SampleGraph,
    depot_nodes: &[usize],
    task_nodes: &[usize],
    v0: f64,
) -> Result<CostMatrix> {
    build_cost_matrix_with(graph, depot_nodes, task_nodes, v0, CacheSharing::Shared).map(|(cm, _)| cm)
}

/// Like [`build_cost_matrix`], also returning the number of collision checks.
pub fn build_cost_matrix_with(
    graph: &SampleGraph,
    depot_nodes: &[usize],
    task_nodes: &[usize],
    v0: f64,
    sharing: CacheSharing,
) -> Result<(CostMatrix, usize)> {
    check_airspeed(&graph.field, v0)?;
    let n = task_nodes.len();
    let m = depot_nodes.len();
    let ids: Vec<usize> = task_nodes.iter().chain(depot_nodes).copied().collect();
    let is_depot = |id: usize| id >= n;

    let run = |g: &SampleGraph, i: usize| -> Result<Vec<(usize, usize, GoalOutcome)>> {
        let targets: Vec<usize> = (0..n + m).filter(|&j| j != i && !(is_depot(i) && is_depot(j))).collect();
        let goals: Vec<usize> = targets.iter().map(|&j| ids[j]).collect();
        let out = fmt_multiquery(g, ids[i], &goals, v0)?;
        Ok(targets.iter().map(|&j| (i, j, out[&ids[j]].clone())).collect())
    };

    let (results, checks): (Vec<Result<Vec<_>>>, usize) = match sharing {
        CacheSharing::Shared => {
            let before = graph.collision_checks();
            let r = (0..n + m).into_par_iter().map(|i| run(graph, i)).collect();
            (r, graph.collision_checks() - before)
        }
        CacheSharing::PerQuery => {
            let mut total = 0;
            let mut r = Vec::with_capacity(n + m);
            for i in 0..n + m {
                let fresh = graph.with_fresh_cache();
                r.push(run(&fresh, i));
                total += fresh.collision_checks();
            }
            (r, total)
        }
    };

    let mut items = Vec::new();
    let mut unreachable = Vec::new();
    for res in results {
        for (i, j, outcome) in res? {
            match outcome {
                GoalOutcome::Reached(p) => items.push((i, j, p)),
                GoalOutcome::Unreachable => unreachable.push(format!("{i}->{j}")),
            }
        }
    }
    if !unreachable.is_empty() {
        return Err(Error::Unreachable(format!("no path for pairs {}", unreachable.join(", "))));
    }
    Ok((CostMatrix::from_entries(n, m, items)?, checks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Polygon, Rect};
    use crate::scenario::{make_wind, WindSpec};

    fn open_region(side: f64) -> Region {
        Region::new(Rect::new(Point::new(0.0, 0.0), Point::new(side, side)).unwrap(), vec![]).unwrap()
    }

    fn uniform(region: &Region, speed: f64, from_deg: f64) -> WindField {
        make_wind(&WindSpec::Uniform { speed, from_deg }, region, 100.0).unwrap()
    }

    #[test]
    fn closed_form_costs() {
        let region = open_region(2000.0);
        let p = Point::new(100.0, 500.0);
        let q = Point::new(1100.0, 500.0);
        let calm = uniform(&region, 0.0, 0.0);
        assert_eq!(edge_cost(p, q, &calm, 100.0).unwrap(), 10.0);
        // wind from the west blows toward +x: a tailwind for p -> q
        let west = uniform(&region, 10.0, 270.0);
        let fwd = edge_cost(p, q, &west, 100.0).unwrap();
        let back = edge_cost(q, p, &west, 100.0).unwrap();
        assert!((fwd - 9.0).abs() < 1e-12);
        assert!((back - 11.0).abs() < 1e-12);
        assert!((fwd + back - 20.0).abs() < 1e-9);
    }

    #[test]
    fn slow_airspeed_names_sub_segment() {
        let region = open_region(2000.0);
        let west = uniform(&region, 10.0, 270.0);
        let err = edge_cost(Point::new(0.0, 0.0), Point::new(500.0, 0.0), &west, 10.0).unwrap_err();
        match err {
            Error::Precondition(msg) => assert!(msg.contains("sub-segment 0"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn fixed_points_lead_and_seed_is_reproducible() {
        let region = open_region(1000.0);
        let field = uniform(&region, 3.0, 45.0);
        let fixed = [Point::new(10.0, 10.0), Point::new(900.0, 950.0)];
        let a = build_sample_graph(&region, &field, &fixed, 200, DEFAULT_GAMMA, 9).unwrap();
        let b = build_sample_graph(&region, &field, &fixed, 200, DEFAULT_GAMMA, 9).unwrap();
        assert_eq!(&a.nodes[..2], &fixed);
        assert_eq!(a.nodes, b.nodes);
        assert_eq!(a.draws, 200);
        let m = 202.0f64;
        assert!((a.radius - 2.0 * (m.ln() / m).sqrt() * region.diameter()).abs() < 1e-9);
    }

    #[test]
    fn fixed_point_in_obstacle_rejected() {
        let bounds = Rect::new(Point::new(0.0, 0.0), Point::new(100.0, 100.0)).unwrap();
        let block = Polygon::new(vec![
            Point::new(10.0, 10.0),
            Point::new(90.0, 10.0),
            Point::new(90.0, 90.0),
            Point::new(10.0, 90.0),
        ])
        .unwrap();
        let region = Region::new(bounds, vec![block]).unwrap();
        let field = uniform(&region, 0.0, 0.0);
        assert!(build_sample_graph(&region, &field, &[Point::new(50.0, 50.0)], 10, 2.0, 1).is_err());
    }

    #[test]
    fn direct_neighbour_goal_is_single_edge() {
        let region = open_region(1000.0);
        let field = uniform(&region, 5.0, 10.0);
        let fixed = [Point::new(500.0, 500.0), Point::new(520.0, 510.0)];
        let g = build_sample_graph(&region, &field, &fixed, 300, DEFAULT_GAMMA, 4).unwrap();
        let out = fmt_multiquery(&g, 0, &[1], 50.0).unwrap();
        let path = out[&1].path().unwrap();
        let direct = edge_cost(fixed[0], fixed[1], &field, 50.0).unwrap();
        // the direct edge is optimal under a uniform wind (costs are a metric plus a potential)
        assert_eq!(path.waypoints, fixed.to_vec());
        assert!((path.cost - direct).abs() < 1e-12);
    }

    #[test]
    fn goal_inside_obstacle_ring_is_unreachable() {
        let bounds = Rect::new(Point::new(0.0, 0.0), Point::new(1000.0, 1000.0)).unwrap();
        // a square ring around the center made of four thin walls
        let wall = |x0: f64, y0: f64, x1: f64, y1: f64| {
            Polygon::new(vec![Point::new(x0, y0), Point::new(x1, y0), Point::new(x1, y1), Point::new(x0, y1)]).unwrap()
        };
        let ring = vec![
            wall(400.0, 400.0, 600.0, 410.0),
            wall(400.0, 590.0, 600.0, 600.0),
            wall(400.0, 405.0, 410.0, 595.0),
            wall(590.0, 405.0, 600.0, 595.0),
        ];
        // walls overlap at the corners, which closes the ring
        let region = Region { bounds, obstacles: ring };
        let field = make_wind(&WindSpec::Uniform { speed: 0.0, from_deg: 0.0 }, &region, 50.0).unwrap();
        let fixed = [Point::new(100.0, 100.0), Point::new(500.0, 500.0)];
        let g = build_sample_graph(&region, &field, &fixed, 400, DEFAULT_GAMMA, 2).unwrap();
        let out = fmt_multiquery(&g, 0, &[1], 20.0).unwrap();
        assert_eq!(out[&1], GoalOutcome::Unreachable);
        let err = build_cost_matrix(&g, &[0], &[1], 20.0).unwrap_err();
        assert!(matches!(err, Error::Unreachable(_)));
    }

    #[test]
    fn matrix_has_no_depot_pairs() {
        let region = open_region(1000.0);
        let field = uniform(&region, 4.0, 200.0);
        let fixed = [
            Point::new(100.0, 100.0),
            Point::new(800.0, 300.0),
            Point::new(500.0, 900.0),
            Point::new(900.0, 900.0),
            Point::new(50.0, 950.0),
        ];
        let g = build_sample_graph(&region, &field, &fixed, 300, DEFAULT_GAMMA, 5).unwrap();
        let cm = build_cost_matrix(&g, &[3, 4], &[0, 1, 2], 30.0).unwrap();
        assert_eq!(cm.size(), 5);
        assert!(cm.cost(3, 4).is_none() && cm.cost(4, 3).is_none());
        assert!(cm.cost(0, 0).is_none());
        for (i, j, p) in cm.iter() {
            assert!(cm.has_edge(i, j));
            assert!(p.cost > 0.0);
            for w in p.waypoints.windows(2) {
                assert!(region.segment_free(w[0], w[1]));
            }
        }
        assert_eq!(cm.iter().count(), 5 * 4 - 2);
    }

    #[test]
    fn cached_terms_are_antisymmetric() {
        let region = open_region(1000.0);
        let spec = WindSpec::SeededSmoothNoise {
            mean_speed: 4.0,
            from_deg: 60.0,
            amplitude: 2.0,
            correlation_length: 200.0,
            seed: 3,
        };
        let field = make_wind(&spec, &region, 50.0).unwrap();
        let g = build_sample_graph(&region, &field, &[], 150, DEFAULT_GAMMA, 8).unwrap();
        for i in 0..g.nodes.len() {
            for j in g.neighbors(i).collect::<Vec<_>>() {
                let (l1, w1) = g.edge_terms(i, j).unwrap();
                let (l2, w2) = g.edge_terms(j, i).unwrap();
                assert_eq!(l1, l2);
                assert_eq!(w1, -w2);
            }
        }
    }
}
