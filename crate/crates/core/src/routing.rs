//! Min-max multiple-depot multiple-TSP over an asymmetric cost matrix.
//!
//! UAV `k` starts and ends at depot id `n + k`; its tour is an ordered list
//! of task ids in `0..n`, possibly empty. The objective is the longest tour
//! cost `C_max`. [`solve_ga`] is the production solver, [`brute_force`] the
//! exact oracle for small instances and [`check_feasible`] audits any
//! solution against the problem constraints.

use std::cmp::Ordering;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::planner::CostMatrix;

/// Largest instance [`brute_force`] accepts.
pub const BRUTE_FORCE_MAX_TASKS: usize = 9;
pub const BRUTE_FORCE_MAX_UAVS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteSolution {
    /// Task ids visited by each UAV, in order.
    pub tours: Vec<Vec<usize>>,
    /// Cost of each tour.
    pub costs: Vec<f64>,
    pub c_max: f64,
}

impl RouteSolution {
    /// Evaluates `tours` on `cm`.
    pub fn from_tours(tours: Vec<Vec<usize>>, cm: &CostMatrix) -> Result<Self> {
        let costs = tours
            .iter()
            .enumerate()
            .map(|(k, t)| route_cost(t, cm.n_tasks + k, cm))
            .collect::<Result<Vec<_>>>()?;
        let c_max = costs.iter().copied().fold(0.0, f64::max);
        Ok(Self { tours, costs, c_max })
    }

    pub fn total_cost(&self) -> f64 {
        self.costs.iter().sum()
    }
}

/// Cost of a closed tour `depot → tour[0] → … → tour[last] → depot`.
pub fn route_cost(tour: &[usize], depot: usize, cm: &CostMatrix) -> Result<f64> {
    if !cm.is_depot(depot) {
        return Err(Error::Invalid(format!("{depot} is not a depot id")));
    }
    if let Some(&bad) = tour.iter().find(|&&t| t >= cm.n_tasks) {
        return Err(Error::Invalid(format!("{bad} is not a task id")));
    }
    let mut seen = vec![false; cm.n_tasks];
    for &t in tour {
        if std::mem::replace(&mut seen[t], true) {
            return Err(Error::Invalid(format!("task {t} appears twice in the tour")));
        }
    }
    let Some((&first, &last)) = tour.first().zip(tour.last()) else {
        return Ok(0.0);
    };
    let edge = |i: usize, j: usize| cm.cost(i, j).ok_or_else(|| Error::Invalid(format!("no cost entry {i}->{j}")));
    let mut total = edge(depot, first)?;
    for w in tour.windows(2) {
        total += edge(w[0], w[1])?;
    }
    Ok(total + edge(last, depot)?)
}

/// Problem constraint a solution can break.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Constraint {
    /// Every task is visited by exactly one tour, exactly once.
    VisitExactlyOnce,
    /// Whatever enters a task leaves it; no tour ends at a task.
    FlowConservation,
    /// Each UAV flies at most one route.
    SingleRoutePerUav,
    /// Each route returns to the depot it left.
    ReturnToDepot,
    /// Every tour cost is bounded by the reported `C_max`.
    MaxCostBound,
    /// No closed walk among tasks is cut off from a depot.
    SubtourElimination,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: Constraint,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.constraint, self.detail)
    }
}

/// Lists every constraint `sol` violates for `n` tasks and `m` UAVs.
///
/// Tours are depot-anchored sequences, so flow conservation, depot return
/// and subtour elimination hold by construction as long as the tours only
/// contain task ids; a depot id inside a tour is reported as a broken return.
pub fn check_feasible(sol: &RouteSolution, n: usize, m: usize) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut v = |constraint, detail: String| out.push(Violation { constraint, detail });
    if sol.tours.len() != m {
        v(Constraint::SingleRoutePerUav, format!("{} tours for {m} UAVs", sol.tours.len()));
    }
    if sol.costs.len() != sol.tours.len() {
        v(Constraint::MaxCostBound, format!("{} costs for {} tours", sol.costs.len(), sol.tours.len()));
    }
    let mut visits = vec![0usize; n];
    for (k, tour) in sol.tours.iter().enumerate() {
        for &t in tour {
            if t < n {
                visits[t] += 1;
            } else if t < n + m {
                v(Constraint::ReturnToDepot, format!("tour {k} passes through depot {t}"));
            } else {
                v(Constraint::VisitExactlyOnce, format!("tour {k} contains unknown id {t}"));
            }
        }
    }
    for (t, &c) in visits.iter().enumerate() {
        if c != 1 {
            v(Constraint::VisitExactlyOnce, format!("task {t} visited {c} times"));
        }
    }
    for (k, &c) in sol.costs.iter().enumerate() {
        if !(c <= sol.c_max) {
            v(Constraint::MaxCostBound, format!("tour {k} costs {c} > C_max {}", sol.c_max));
        }
    }
    out
}

/// Ordering used to pick between solutions: `C_max`, then total cost, then
/// lexicographic tours.
fn compare(a: &RouteSolution, b: &RouteSolution) -> Ordering {
    a.c_max
        .total_cmp(&b.c_max)
        .then_with(|| a.total_cost().total_cmp(&b.total_cost()))
        .then_with(|| a.tours.cmp(&b.tours))
}

/// Best tour (cost, order) through each task subset for one depot, by
/// enumerating permutations in lexicographic order.
fn best_tours_per_subset(cm: &CostMatrix, depot: usize) -> Vec<(f64, Vec<usize>)> {
    let n = cm.n_tasks;
    (0..1usize << n)
        .into_par_iter()
        .map(|mask| {
            let mut perm: Vec<usize> = (0..n).filter(|t| mask >> t & 1 == 1).collect();
            let mut best = (route_cost(&perm, depot, cm).expect("valid ids"), perm.clone());
            while next_permutation(&mut perm) {
                let c = route_cost(&perm, depot, cm).expect("valid ids");
                if c < best.0 {
                    best = (c, perm.clone());
                }
            }
            best
        })
        .collect()
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Exact minimizer of `C_max` by exhaustive enumeration. Ties are broken
/// like the GA's: smaller total cost, then the lexicographically smallest
/// tuple of tours.
pub fn brute_force(cm: &CostMatrix) -> Result<RouteSolution> {
    let (n, m) = (cm.n_tasks, cm.n_depots);
    if n > BRUTE_FORCE_MAX_TASKS || m > BRUTE_FORCE_MAX_UAVS || m == 0 {
        return Err(Error::Invalid(format!(
            "brute force handles 1..={BRUTE_FORCE_MAX_UAVS} UAVs and at most {BRUTE_FORCE_MAX_TASKS} tasks, got m = {m}, n = {n}"
        )));
    }
    let tables: Vec<Vec<(f64, Vec<usize>)>> = (0..m).map(|k| best_tours_per_subset(cm, n + k)).collect();
    let mut best: Option<(f64, f64, Vec<Vec<usize>>)> = None;
    let mut owner = vec![0usize; n];
    loop {
        let mut masks = vec![0usize; m];
        for (t, &k) in owner.iter().enumerate() {
            masks[k] |= 1 << t;
        }
        let c_max = (0..m).map(|k| tables[k][masks[k]].0).fold(0.0, f64::max);
        let total: f64 = (0..m).map(|k| tables[k][masks[k]].0).sum();
        let better = match &best {
            None => true,
            Some((b, bt, tours)) => (c_max, total)
                .partial_cmp(&(*b, *bt))
                .is_some_and(|o| o.then_with(|| (0..m).map(|k| &tables[k][masks[k]].1).cmp(tours.iter())).is_lt()),
        };
        if better {
            best = Some((c_max, total, (0..m).map(|k| tables[k][masks[k]].1.clone()).collect()));
        }
        // next assignment of tasks to UAVs, counting in base m
        let mut t = 0;
        while t < n && owner[t] == m - 1 {
            owner[t] = 0;
            t += 1;
        }
        if t == n {
            break;
        }
        owner[t] += 1;
    }
    RouteSolution::from_tours(best.expect("at least one assignment").2, cm)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaParams {
    pub population: usize,
    pub generations: usize,
    pub tournament: usize,
    /// Per-child probability of a swap or inversion on the permutation.
    pub mutation_rate: f64,
    /// Per-child probability of moving one split point.
    pub split_jitter_rate: f64,
    /// Best individuals copied unchanged into the next generation.
    pub elitism: usize,
}

impl Default for GaParams {
    fn default() -> Self {
        Self { population: 100, generations: 500, tournament: 4, mutation_rate: 0.2, split_jitter_rate: 0.2, elitism: 2 }
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 || self.tournament == 0 || self.elitism > self.population {
            return Err(Error::Config(format!(
                "GA needs population >= 2, tournament >= 1 and elitism <= population, got {self:?}"
            )));
        }
        for (name, p) in [("mutation_rate", self.mutation_rate), ("split_jitter_rate", self.split_jitter_rate)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} must be in [0, 1], got {p}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Chromosome {
    perm: Vec<usize>,
    /// `m − 1` non-decreasing cut positions in `0..=n`.
    splits: Vec<usize>,
}

impl Chromosome {
    fn tours(&self) -> Vec<Vec<usize>> {
        let mut bounds = Vec::with_capacity(self.splits.len() + 2);
        bounds.push(0);
        bounds.extend(&self.splits);
        bounds.push(self.perm.len());
        bounds.windows(2).map(|w| self.perm[w[0]..w[1]].to_vec()).collect()
    }

    fn random(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        let mut splits: Vec<usize> = (0..m - 1).map(|_| rng.random_range(0..=n)).collect();
        splits.sort_unstable();
        Self { perm, splits }
    }
}

/// Order crossover: keep a slice of `a`, fill the rest in `b`'s order.
fn order_crossover(a: &[usize], b: &[usize], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = a.len();
    if n < 2 {
        return a.to_vec();
    }
    let (mut i, mut j) = (rng.random_range(0..n), rng.random_range(0..n));
    if i > j {
        std::mem::swap(&mut i, &mut j);
    }
    let mut child = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for k in i..=j {
        child[k] = a[k];
        used[a[k]] = true;
    }
    let mut fill = b.iter().filter(|&&g| !used[g]);
    for slot in child.iter_mut().filter(|s| **s == usize::MAX) {
        *slot = *fill.next().expect("enough genes");
    }
    child
}

/// One random swap, inversion or split move.
fn mutate(child: &mut Chromosome, n: usize, m: usize, rng: &mut ChaCha8Rng) {
    if m >= 2 && (n < 2 || rng.random_range(0..3) == 0) {
        let s = rng.random_range(0..m - 1);
        child.splits[s] = rng.random_range(0..=n);
        child.splits.sort_unstable();
    } else if n >= 2 {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        if rng.random::<bool>() {
            child.perm.swap(i, j);
        } else {
            child.perm[i.min(j)..=i.max(j)].reverse();
        }
    }
}

/// Genetic-algorithm solution and its per-generation best `C_max`.
#[derive(Debug, Clone)]
pub struct GaResult {
    pub solution: RouteSolution,
    /// Best `C_max` after each generation (index 0 is the initial population).
    pub trace: Vec<f64>,
}

/// Minimizes `C_max` with a permutation-plus-splits genetic algorithm.
/// Fitness evaluation runs in parallel; every random draw happens
/// sequentially, so the result depends only on the seed.
pub fn solve_ga(cm: &CostMatrix, params: &GaParams, seed: u64) -> Result<GaResult> {
    params.validate()?;
    let (n, m) = (cm.n_tasks, cm.n_depots);
    if n == 0 || m == 0 {
        return Err(Error::Invalid(format!("GA needs at least one task and one UAV, got n = {n}, m = {m}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let evaluate = |pop: &[Chromosome]| -> Result<Vec<RouteSolution>> {
        pop.par_iter().map(|c| RouteSolution::from_tours(c.tours(), cm)).collect()
    };
    let rank = |fit: &[RouteSolution]| -> Vec<usize> {
        let mut idx: Vec<usize> = (0..fit.len()).collect();
        idx.sort_by(|&a, &b| compare(&fit[a], &fit[b]).then(a.cmp(&b)));
        idx
    };

    let mut pop: Vec<Chromosome> = (0..params.population).map(|_| Chromosome::random(n, m, &mut rng)).collect();
    let mut fit = evaluate(&pop)?;
    let mut order = rank(&fit);
    let mut trace = vec![fit[order[0]].c_max];

    for _ in 0..params.generations {
        let mut next: Vec<Chromosome> = order[..params.elitism].iter().map(|&i| pop[i].clone()).collect();
        let tournament = |rng: &mut ChaCha8Rng| -> usize {
            (0..params.tournament)
                .map(|_| rng.random_range(0..pop.len()))
                .min_by(|&a, &b| compare(&fit[a], &fit[b]).then(a.cmp(&b)))
                .expect("non-empty tournament")
        };
        while next.len() < params.population {
            let a = tournament(&mut rng);
            let b = tournament(&mut rng);
            let mut child = Chromosome { perm: order_crossover(&pop[a].perm, &pop[b].perm, &mut rng), splits: pop[a].splits.clone() };
            if rng.random::<f64>() < params.mutation_rate && n >= 2 {
                let i = rng.random_range(0..n);
                let j = rng.random_range(0..n);
                if rng.random::<bool>() {
                    child.perm.swap(i, j);
                } else {
                    child.perm[i.min(j)..=i.max(j)].reverse();
                }
            }
            if rng.random::<f64>() < params.split_jitter_rate && m >= 2 {
                let s = rng.random_range(0..m - 1);
                let v = child.splits[s] as i64 + if rng.random::<bool>() { 1 } else { -1 };
                child.splits[s] = v.clamp(0, n as i64) as usize;
                child.splits.sort_unstable();
            }
            // clones add nothing; perturb until the child is new (bounded)
            for _ in 0..8 {
                if !next.iter().any(|c| c.perm == child.perm && c.splits == child.splits) {
                    break;
                }
                mutate(&mut child, n, m, &mut rng);
            }
            next.push(child);
        }
        pop = next;
        fit = evaluate(&pop)?;
        order = rank(&fit);
        trace.push(fit[order[0]].c_max);
    }
    Ok(GaResult { solution: fit[order[0]].clone(), trace })
}
