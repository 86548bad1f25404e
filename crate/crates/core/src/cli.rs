//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for usage or configuration errors, 3 when a
//! pipeline stage fails.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::PipelineConfig;
use crate::error::Error;
use crate::io;
use crate::pipeline::{self, Stage, StageError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_STAGE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "windipp", version, about = "Informative path planning for UAV teams in wind")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every stage and write all artifacts.
    Run(Common),
    /// Choose task locations (writes placement.csv).
    Place(Common),
    /// Compute the wind-aware cost matrix from placement.csv.
    Costs(Common),
    /// Solve the routing problem from cost_matrix.csv.
    Route(Common),
    /// Fly the routes and build the belief map.
    Simulate(Common),
    /// Write the RF ground truth on the test grid.
    TruthExport(Common),
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// TOML configuration file; built-in defaults when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (also where stages look for earlier artifacts).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Replaces every seed in the configuration.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; 1 runs everything sequentially.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Shrink the scenario tenfold for a quick run.
    #[arg(long)]
    pub desk_scale: bool,
}

enum Failure {
    Config(String),
    Stage(StageError),
}

impl From<StageError> for Failure {
    fn from(e: StageError) -> Self {
        match e.error {
            Error::Config(msg) => Failure::Config(format!("[{}] {msg}", e.stage)),
            _ => Failure::Stage(e),
        }
    }
}

fn stage_err(stage: Stage) -> impl Fn(Error) -> Failure {
    move |error| Failure::from(StageError { stage, error })
}

fn load_config(c: &Common) -> Result<(PipelineConfig, PathBuf), Failure> {
    let mut cfg = match &c.config {
        Some(path) => PipelineConfig::load(path).map_err(|e| Failure::Config(e.to_string()))?,
        None => PipelineConfig::default(),
    };
    if c.desk_scale {
        cfg = cfg.desk_scale();
    }
    if let Some(seed) = c.seed {
        cfg.override_seed(seed);
    }
    cfg.validate().map_err(|e| Failure::Config(e.to_string()))?;
    let out = c.out.clone().or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    Ok((cfg, out))
}

fn require(stage: Stage, files: &[PathBuf]) -> Result<(), Failure> {
    let missing: Vec<String> = files.iter().filter(|f| !f.is_file()).map(|f| f.display().to_string()).collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(stage_err(stage)(Error::Invalid(format!("missing inputs: {}", missing.join(", ")))))
    }
}

fn execute(command: &Command, cfg: &PipelineConfig, out: &Path) -> Result<Vec<&'static str>, Failure> {
    std::fs::create_dir_all(out).map_err(|e| stage_err(Stage::Scenario)(e.into()))?;
    let scenario = || pipeline::build_scenario(cfg).map_err(stage_err(Stage::Scenario));
    match command {
        Command::Run(_) => {
            pipeline::run_all(cfg, out)?;
            Ok(vec![
                io::PLACEMENT_FILE,
                io::COST_MATRIX_FILE,
                io::PATHS_FILE,
                io::ROUTES_FILE,
                io::TRAJECTORIES_FILE,
                io::MEASUREMENTS_FILE,
                io::BELIEF_FILE,
                io::METRICS_FILE,
                io::SUMMARY_FILE,
                io::TIMINGS_FILE,
            ])
        }
        Command::Place(_) => {
            let e = stage_err(Stage::Place);
            let sc = scenario()?;
            let grid = pipeline::test_grid(cfg, &sc).map_err(&e)?;
            let placement = pipeline::stage_place(cfg, &sc, &grid).map_err(&e)?;
            io::write_placement(&out.join(io::PLACEMENT_FILE), &placement.locations).map_err(&e)?;
            Ok(vec![io::PLACEMENT_FILE])
        }
        Command::Costs(_) => {
            let e = stage_err(Stage::Costs);
            let input = out.join(io::PLACEMENT_FILE);
            require(Stage::Costs, &[input.clone()])?;
            let sc = scenario()?;
            let tasks = io::read_placement(&input).map_err(&e)?;
            let cm = pipeline::stage_costs(cfg, &sc, &tasks).map_err(&e)?;
            pipeline::write_costs(out, &cm).map_err(&e)?;
            Ok(vec![io::COST_MATRIX_FILE, io::PATHS_FILE])
        }
        Command::Route(_) => {
            let e = stage_err(Stage::Route);
            let input = out.join(io::COST_MATRIX_FILE);
            require(Stage::Route, &[input.clone()])?;
            let cm = io::read_cost_matrix(&input, None).map_err(&e)?;
            let sol = pipeline::stage_route(cfg, &cm).map_err(&e)?;
            io::write_routes(&out.join(io::ROUTES_FILE), &sol, cm.n_tasks).map_err(&e)?;
            Ok(vec![io::ROUTES_FILE])
        }
        Command::Simulate(_) => {
            let e = stage_err(Stage::Simulate);
            let inputs = [out.join(io::COST_MATRIX_FILE), out.join(io::PATHS_FILE), out.join(io::ROUTES_FILE)];
            require(Stage::Simulate, &inputs)?;
            let sc = scenario()?;
            let grid = pipeline::test_grid(cfg, &sc).map_err(&e)?;
            let cm = io::read_cost_matrix(&inputs[0], Some(&inputs[1])).map_err(&e)?;
            let sol = io::read_routes(&inputs[2]).map_err(&e)?;
            let sol = crate::routing::RouteSolution::from_tours(sol.tours, &cm).map_err(&e)?;
            let mission = pipeline::stage_simulate(cfg, &sc, &grid, &cm, &sol).map_err(&e)?;
            pipeline::write_mission(out, &grid, &mission).map_err(&e)?;
            Ok(vec![io::TRAJECTORIES_FILE, io::MEASUREMENTS_FILE, io::BELIEF_FILE, io::METRICS_FILE])
        }
        Command::TruthExport(_) => {
            let e = stage_err(Stage::TruthExport);
            let sc = scenario()?;
            let grid = pipeline::test_grid(cfg, &sc).map_err(&e)?;
            let rows = pipeline::truth_rows(&sc, &grid).map_err(&e)?;
            io::write_truth(&out.join(io::TRUTH_FILE), &rows).map_err(&e)?;
            Ok(vec![io::TRUTH_FILE])
        }
    }
}

fn common(command: &Command) -> &Common {
    match command {
        Command::Run(c)
        | Command::Place(c)
        | Command::Costs(c)
        | Command::Route(c)
        | Command::Simulate(c)
        | Command::TruthExport(c) => c,
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let c = common(&cli.command);
    let (cfg, out) = match load_config(c) {
        Ok(v) => v,
        Err(Failure::Config(msg)) | Err(Failure::Stage(StageError { error: Error::Config(msg), .. })) => {
            eprintln!("configuration error: {msg}");
            return EXIT_CONFIG;
        }
        Err(Failure::Stage(e)) => {
            eprintln!("error: {e}");
            return EXIT_STAGE;
        }
    };
    let threads = c.threads.unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("configuration error: cannot start {threads} threads: {e}");
            return EXIT_CONFIG;
        }
    };
    match pool.install(|| execute(&cli.command, &cfg, &out)) {
        Ok(files) => {
            for f in files {
                println!("{}", out.join(f).display());
            }
            EXIT_OK
        }
        Err(Failure::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            EXIT_CONFIG
        }
        Err(Failure::Stage(e)) => {
            eprintln!("error: {e}");
            EXIT_STAGE
        }
    }
}
