use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use windipp::config::PipelineConfig;
use windipp::io::{self, MetricsDoc};
use windipp::pipeline::Summary;
use windipp::planner::CostMatrix;
use windipp::routing::brute_force;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_windipp"))
}

fn small_config() -> PipelineConfig {
    let mut cfg = PipelineConfig::default().desk_scale();
    cfg.placement.n_tasks = 4;
    cfg.placement.options.restarts = 2;
    cfg.planner.samples = 300;
    cfg.routing.generations = 60;
    cfg
}

fn write_config(dir: &Path, cfg: &PipelineConfig) -> PathBuf {
    let path = dir.join("config.toml");
    std::fs::write(&path, cfg.to_toml_string().unwrap()).unwrap();
    path
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    bin()
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> =
        std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    names
}

#[test]
fn shipped_config_equals_builtin_defaults() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.toml");
    assert_eq!(PipelineConfig::load(&path).unwrap(), PipelineConfig::default());
}

#[test]
fn airspeed_below_wind_is_a_stage_failure() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config();
    cfg.planner.v0 = 5.0;
    let config = write_config(dir.path(), &cfg);
    let out = dir.path().join("out");
    let o = run(&["run"], &config, &out);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let msg = stderr(&o);
    assert!(msg.contains("[costs]") && msg.contains("to exceed the maximum wind speed"), "{msg}");
}

#[test]
fn usage_and_config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin().arg("fly").output().unwrap();
    assert_eq!(o.status.code(), Some(2));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[planner]\nsamples = \"many\"\n").unwrap();
    let o = run(&["run"], &bad, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));

    std::fs::write(&bad, "[sensor]\nsigma_f = -1.0\n").unwrap();
    let o = run(&["place"], &bad, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));

    let o = run(&["run"], &dir.path().join("absent.toml"), &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn missing_inputs_are_listed() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &small_config());
    let out = dir.path().join("empty");
    let o = run(&["costs"], &config, &out);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("missing inputs") && stderr(&o).contains(io::PLACEMENT_FILE), "{}", stderr(&o));

    let o = run(&["simulate"], &config, &out);
    assert_eq!(o.status.code(), Some(3));
    for f in [io::COST_MATRIX_FILE, io::PATHS_FILE, io::ROUTES_FILE] {
        assert!(stderr(&o).contains(f), "{}", stderr(&o));
    }
}

#[test]
fn place_writes_only_the_placement() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &small_config());
    let out = dir.path().join("out");
    let o = run(&["place"], &config, &out);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(listing(&out), vec![io::PLACEMENT_FILE.to_string()]);
    assert_eq!(io::read_placement(&out.join(io::PLACEMENT_FILE)).unwrap().len(), 4);
}

#[test]
fn route_on_handwritten_matrix_matches_brute_force() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config();
    cfg.mission.depots.truncate(2);
    let config = write_config(dir.path(), &cfg);
    let out = dir.path().join("out");
    std::fs::create_dir_all(&out).unwrap();
    let table = [
        [0.0, 12.0, 30.0, 25.0, 8.0, 40.0],
        [14.0, 0.0, 9.0, 21.0, 17.0, 33.0],
        [28.0, 11.0, 0.0, 7.0, 35.0, 12.0],
        [26.0, 19.0, 6.0, 0.0, 29.0, 10.0],
        [9.0, 15.0, 31.0, 27.0, 0.0, 0.0],
        [38.0, 30.0, 13.0, 9.0, 0.0, 0.0],
    ];
    let cm = CostMatrix::from_fn(4, 2, |i, j| table[i][j]).unwrap();
    io::write_cost_matrix(&out.join(io::COST_MATRIX_FILE), &cm).unwrap();
    let o = run(&["route"], &config, &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let got = io::read_routes(&out.join(io::ROUTES_FILE)).unwrap();
    let exact = brute_force(&cm).unwrap();
    assert_eq!(got.tours, exact.tours);
    assert!((got.c_max - exact.c_max).abs() < 1e-12);
}

#[test]
fn stagewise_commands_reproduce_the_full_run() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &small_config());
    let whole = dir.path().join("whole");
    let staged = dir.path().join("staged");
    let o = run(&["run"], &config, &whole);
    assert!(o.status.success(), "{}", stderr(&o));
    for cmd in ["place", "costs", "route", "simulate", "truth-export"] {
        let o = run(&[cmd], &config, &staged);
        assert!(o.status.success(), "{cmd}: {}", stderr(&o));
    }
    for f in [
        io::PLACEMENT_FILE,
        io::COST_MATRIX_FILE,
        io::PATHS_FILE,
        io::ROUTES_FILE,
        io::TRAJECTORIES_FILE,
        io::MEASUREMENTS_FILE,
        io::BELIEF_FILE,
        io::METRICS_FILE,
    ] {
        let (a, b) = (std::fs::read_to_string(whole.join(f)).unwrap(), std::fs::read_to_string(staged.join(f)).unwrap());
        if let Some((k, (x, y))) = a.lines().zip(b.lines()).enumerate().find(|(_, (x, y))| x != y) {
            panic!("{f} differs at line {k}:\n  run:    {x}\n  staged: {y}");
        }
        assert_eq!(a.len(), b.len(), "{f} differs in length");
    }

    // every artifact of the run parses back
    let tasks = io::read_placement(&whole.join(io::PLACEMENT_FILE)).unwrap();
    let cm = io::read_cost_matrix(&whole.join(io::COST_MATRIX_FILE), Some(&whole.join(io::PATHS_FILE))).unwrap();
    assert_eq!((cm.n_tasks, cm.n_depots), (tasks.len(), 3));
    let routes = io::read_routes(&whole.join(io::ROUTES_FILE)).unwrap();
    let mut visited: Vec<usize> = routes.tours.concat();
    visited.sort();
    assert_eq!(visited, (0..tasks.len()).collect::<Vec<_>>());
    let measurements = io::read_measurements(&whole.join(io::MEASUREMENTS_FILE)).unwrap();
    assert!(!measurements.is_empty());
    assert!(!io::read_trajectories(&whole.join(io::TRAJECTORIES_FILE)).unwrap().is_empty());
    let metrics: MetricsDoc = io::read_json(&whole.join(io::METRICS_FILE)).unwrap();
    let belief = io::read_belief(&whole.join(io::BELIEF_FILE)).unwrap();
    assert_eq!(belief.last().unwrap().snapshot + 1, metrics.refreshes.len());
    let summary: Summary = io::read_json(&whole.join(io::SUMMARY_FILE)).unwrap();
    assert_eq!(summary.measurements, measurements.len());
    assert_eq!(summary.final_rmse, metrics.refreshes.last().unwrap().rmse);
    let truth = io::read_truth(&staged.join(io::TRUTH_FILE)).unwrap();
    assert_eq!(truth.len() * metrics.refreshes.len(), belief.len());
}

#[test]
fn seed_flag_changes_the_placement() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &small_config());
    let read = |seed: &str| {
        let out = dir.path().join(seed);
        let o = bin().args(["place", "--seed", seed, "--config"]).arg(&config).arg("--out").arg(&out).output().unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        io::read_placement(&out.join(io::PLACEMENT_FILE)).unwrap()
    };
    assert_eq!(read("5"), read("5"));
    assert_ne!(read("5"), read("6"));
}
