use proptest::prelude::*;

use windipp::geometry::{Polygon, Rect};
use windipp::planner::{build_cost_matrix_with, build_sample_graph, edge_cost, CacheSharing, DEFAULT_GAMMA};
use windipp::scenario::{make_wind, Region, WindSpec};
use windipp::Point;

fn square(side: f64, obstacles: Vec<Polygon>) -> Region {
    Region::new(Rect::new(Point::new(0.0, 0.0), Point::new(side, side)).unwrap(), obstacles).unwrap()
}

fn block(x0: f64, y0: f64, x1: f64, y1: f64) -> Polygon {
    Polygon::new(vec![Point::new(x0, y0), Point::new(x1, y0), Point::new(x1, y1), Point::new(x0, y1)]).unwrap()
}

fn two_blocks() -> Region {
    square(2000.0, vec![block(600.0, 300.0, 900.0, 1300.0), block(1200.0, 800.0, 1500.0, 1800.0)])
}

const TASKS: [(f64, f64); 5] = [(300.0, 1700.0), (1000.0, 1000.0), (1700.0, 300.0), (1800.0, 1900.0), (400.0, 400.0)];
const DEPOTS: [(f64, f64); 2] = [(100.0, 100.0), (1900.0, 1000.0)];

fn fixed() -> Vec<Point> {
    TASKS.iter().chain(&DEPOTS).map(|&(x, y)| Point::new(x, y)).collect()
}

#[test]
fn shared_cache_saves_collision_checks() {
    let region = two_blocks();
    let wind = make_wind(&WindSpec::Uniform { speed: 8.0, from_deg: 45.0 }, &region, 100.0).unwrap();
    let g = build_sample_graph(&region, &wind, &fixed(), 600, DEFAULT_GAMMA, 3).unwrap();
    let (tasks, depots): (Vec<usize>, Vec<usize>) = ((0..5).collect(), (5..7).collect());
    let (shared, shared_checks) =
        build_cost_matrix_with(&g.with_fresh_cache(), &depots, &tasks, 50.0, CacheSharing::Shared).unwrap();
    let (per_query, per_query_checks) =
        build_cost_matrix_with(&g.with_fresh_cache(), &depots, &tasks, 50.0, CacheSharing::PerQuery).unwrap();
    assert_eq!(shared, per_query);
    assert!(shared_checks < per_query_checks, "{shared_checks} vs {per_query_checks}");

    for (i, j, p) in shared.iter() {
        assert!(p.cost > 0.0, "{i}->{j} has cost {}", p.cost);
        for w in p.waypoints.windows(2) {
            assert!(region.segment_free(w[0], w[1]), "{i}->{j} crosses an obstacle");
        }
    }
}

#[test]
fn calm_air_gives_a_symmetric_matrix() {
    let region = two_blocks();
    let calm = make_wind(&WindSpec::Uniform { speed: 0.0, from_deg: 0.0 }, &region, 100.0).unwrap();
    let g = build_sample_graph(&region, &calm, &fixed(), 500, DEFAULT_GAMMA, 11).unwrap();
    let (cm, _) = build_cost_matrix_with(&g, &[5, 6], &[0, 1, 2, 3, 4], 40.0, CacheSharing::Shared).unwrap();
    for (i, j, p) in cm.iter() {
        let back = cm.cost(j, i).unwrap();
        assert!((p.cost - back).abs() <= 1e-9 * p.cost, "{i}<->{j}: {} vs {back}", p.cost);
        assert!((p.cost * 40.0 - p.length).abs() <= 1e-9 * p.length);
    }
}

#[test]
fn fast_airframes_approach_length_over_speed() {
    let region = square(2000.0, vec![]);
    let spec = WindSpec::SeededSmoothNoise { mean_speed: 5.0, from_deg: 120.0, amplitude: 2.0, correlation_length: 400.0, seed: 9 };
    let wind = make_wind(&spec, &region, 50.0).unwrap();
    let v0 = 100.0 * wind.max_speed();
    let (p, q) = (Point::new(150.0, 220.0), Point::new(1870.0, 1430.0));
    let mut previous = f64::INFINITY;
    for v in [2.0, 5.0, 20.0, 100.0].map(|k| k * wind.max_speed()) {
        let c = edge_cost(p, q, &wind, v).unwrap();
        let rel = (c * v - p.dist(q)).abs() / p.dist(q);
        assert!(rel < previous, "relative wind term {rel} did not shrink at v0 = {v}");
        previous = rel;
    }
    let c = edge_cost(p, q, &wind, v0).unwrap();
    assert!((c * v0 / p.dist(q) - 1.0).abs() < 0.01);
}

proptest! {
    #[test]
    fn round_trip_cost_is_twice_still_air_time(
        ax in 10.0..1990.0f64, ay in 10.0..1990.0f64, bx in 10.0..1990.0f64, by in 10.0..1990.0f64,
        speed in 0.0..9.0f64, from_deg in 0.0..360.0f64, seed in 0u64..50,
    ) {
        let region = square(2000.0, vec![]);
        let spec = WindSpec::SeededSmoothNoise { mean_speed: speed, from_deg, amplitude: 1.0, correlation_length: 300.0, seed };
        let wind = make_wind(&spec, &region, 100.0).unwrap();
        let (a, b) = (Point::new(ax, ay), Point::new(bx, by));
        let v0 = 20.0 + wind.max_speed();
        let sum = edge_cost(a, b, &wind, v0).unwrap() + edge_cost(b, a, &wind, v0).unwrap();
        prop_assert!((sum - 2.0 * a.dist(b) / v0).abs() <= 1e-9);
    }
}
