use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use trackpilot_cli::run::{cmd_run, RunConfig};
use trackpilot_cli::sweep::SweepRange;
use trackpilot_cli::track::{cmd_track, TrackArgs};
use trackpilot_cli::frame::cmd_plan_frame;
use trackpilot_core::TrackLayout;

/// Lattice-planner guidance along an athletics track, in simulation.
#[derive(Parser)]
#[command(name = "trackpilot", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario episode (or a sweep of episodes) and write its trace and metrics.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        dump_observations: bool,
        #[arg(long)]
        dump_plans: bool,
        /// KEY=START:STEP:END over a dotted scenario field, e.g. cost.k=0.1:0.1:0.5.
        #[arg(long = "sweep", value_name = "KEY=START:STEP:END")]
        sweeps: Vec<SweepRange>,
    },
    /// Perceive and plan one frame and print the result as JSON.
    PlanFrame {
        #[arg(long)]
        scenario: PathBuf,
        /// JSON file with the runner pose and optional obstacles.
        #[arg(long)]
        frame: PathBuf,
    },
    /// Write track geometry as CSV plus a length summary.
    Track {
        #[arg(long, default_value_t = TrackLayout::default().straight_length, allow_negative_numbers = true)]
        straight: f64,
        /// Radius of the lane-1 centerline on the bends.
        #[arg(long, default_value_t = TrackLayout::default().inner_radius, allow_negative_numbers = true)]
        inner_radius: f64,
        #[arg(long, default_value_t = TrackLayout::default().lane_width, allow_negative_numbers = true)]
        lane_width: f64,
        #[arg(long, default_value_t = TrackLayout::default().num_lanes)]
        lanes: u32,
        #[arg(long, default_value_t = trackpilot_core::simulator::DEFAULT_POINTS_PER_ARC)]
        points_per_arc: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Run {
            scenario,
            out,
            seed,
            dump_observations,
            dump_plans,
            sweeps,
        } => cmd_run(&RunConfig {
            scenario,
            out,
            seed,
            dump_observations,
            dump_plans,
            sweeps,
        }),
        Command::PlanFrame { scenario, frame } => cmd_plan_frame(&scenario, &frame),
        Command::Track {
            straight,
            inner_radius,
            lane_width,
            lanes,
            points_per_arc,
            out,
        } => cmd_track(&TrackArgs {
            layout: TrackLayout {
                straight_length: straight,
                inner_radius,
                lane_width,
                num_lanes: lanes,
            },
            points_per_arc,
            out,
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
