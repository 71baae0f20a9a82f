mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Design analysis and cycle simulation for desk-top pick-and-place arms.
#[derive(Debug, Parser)]
#[command(name = "armforge", version, propagate_version = true, arg_required_else_help = true)]
pub struct Cli {
    /// Output format. Each command has its own default.
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Planar mobility from link and joint counts, or of an arm config.
    Dof(DofArgs),
    /// Tool pose for a set of joint angles.
    Fk(FkArgs),
    /// Joint angles that put the tool at a point.
    Ik(IkArgs),
    /// Holding torques and link stresses at a configuration.
    Statics(StaticsArgs),
    /// Gripper sizing.
    #[command(subcommand)]
    Gripper(GripperCommand),
    /// Range-sensor experiments.
    #[command(subcommand)]
    Sense(SenseCommand),
    /// Run pick-and-place cycles.
    Simulate(SimulateArgs),
    /// Score a directory of cycle summaries.
    Score(ScoreArgs),
    /// Weighted decision matrices.
    #[command(subcommand)]
    Matrix(MatrixCommand),
    /// Bill-of-materials total, budget check and unit price.
    Bom(BomArgs),
    /// Workspace parameters and point membership.
    Workspace(WorkspaceArgs),
}

#[derive(Debug, Args)]
pub struct ArmArg {
    /// Arm config (JSON). Defaults to the built-in desk arm.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DofArgs {
    #[arg(long, requires_all = ["full_joints", "half_joints"], conflicts_with = "config")]
    pub links: Option<u32>,
    #[arg(long)]
    pub full_joints: Option<u32>,
    #[arg(long)]
    pub half_joints: Option<u32>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FkArgs {
    #[command(flatten)]
    pub arm: ArmArg,
    /// Comma-separated joint angles, radians.
    #[arg(long, allow_hyphen_values = true)]
    pub angles: String,
}

#[derive(Debug, Args)]
pub struct IkArgs {
    #[command(flatten)]
    pub arm: ArmArg,
    /// Target point x,y,z in meters.
    #[arg(long, allow_hyphen_values = true)]
    pub target: String,
    /// Starting joint angles. Defaults to the middle of each joint range.
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<String>,
    /// Seed for restart configurations.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct StaticsArgs {
    #[command(flatten)]
    pub arm: ArmArg,
    #[arg(long, allow_hyphen_values = true)]
    pub angles: String,
    /// Payload at the tool, kg. Defaults to the config's payload mass.
    #[arg(long)]
    pub payload: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum GripperCommand {
    /// Syringe-and-cup vacuum holding force.
    Vacuum(VacuumArgs),
    /// Pitch diameters and center distance of a gear pair.
    Gears(GearArgs),
}

#[derive(Debug, Args)]
pub struct VacuumArgs {
    /// Suction cup diameter, m.
    #[arg(long, default_value_t = 0.030)]
    pub cup_d: f64,
    /// Syringe bore diameter, m.
    #[arg(long, default_value_t = 0.020)]
    pub syringe_d: f64,
    /// Plunger retraction, m.
    #[arg(long, default_value_t = 0.0476)]
    pub travel: f64,
    /// Ambient pressure, Pa.
    #[arg(long, default_value_t = 1.035e5)]
    pub ambient: f64,
    /// Report the pressure-differential force instead of final pressure times area.
    #[arg(long)]
    pub physical: bool,
}

#[derive(Debug, Args)]
pub struct GearArgs {
    #[arg(long)]
    pub n1: u32,
    #[arg(long)]
    pub p1: f64,
    #[arg(long)]
    pub n2: u32,
    #[arg(long)]
    pub p2: f64,
}

#[derive(Debug, Subcommand)]
pub enum SenseCommand {
    /// Ultrasonic readings over a range of distances.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    #[arg(long)]
    pub step: f64,
    #[arg(long, default_value = "wood")]
    pub material: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sensor config (JSON). Defaults to an HC-SR04 class module.
    #[arg(long)]
    pub sensor: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub arm: ArmArg,
    /// Scene (JSON). Defaults to the built-in desk scene.
    #[arg(long)]
    pub scene: Option<PathBuf>,
    /// Simulator settings (JSON); command-line flags override them.
    #[arg(long)]
    pub sim: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Press the emergency stop at this simulated time, s.
    #[arg(long)]
    pub estop_at: Option<f64>,
    /// Run this many cycles with consecutive seeds, in parallel.
    #[arg(long, requires = "out")]
    pub sweep: Option<u32>,
    /// Directory for trace CSV and summary JSON files.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Directory holding summary JSON files.
    #[arg(long)]
    pub traces: PathBuf,
    /// Rubric (JSON). Defaults to equal weights and a 10 s bound.
    #[arg(long)]
    pub rubric: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum MatrixCommand {
    /// Weighted totals and ranking.
    Eval(MatrixFile),
    /// Smallest weight shift on one criterion that changes the winner.
    Sensitivity(SensitivityArgs),
    /// Rank functional requirements of a House-of-Quality matrix.
    Qfd(QfdArgs),
}

#[derive(Debug, Args)]
pub struct MatrixFile {
    /// Matrix (JSON), or a bundled table name such as `table2`.
    #[arg(long)]
    pub file: String,
}

#[derive(Debug, Args)]
pub struct SensitivityArgs {
    #[command(flatten)]
    pub matrix: MatrixFile,
    #[arg(long)]
    pub criterion: String,
}

#[derive(Debug, Args)]
pub struct QfdArgs {
    #[arg(long)]
    pub file: PathBuf,
}

#[derive(Debug, Args)]
pub struct BomArgs {
    /// Parts list (JSON). Defaults to the bundled desk-arm list.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Budget, USD.
    #[arg(long, default_value = "250")]
    pub budget: String,
    /// Markup over prototype cost for the unit price.
    #[arg(long, default_value = "0.30")]
    pub margin: String,
}

#[derive(Debug, Args)]
pub struct WorkspaceArgs {
    /// Workspace (JSON). Defaults to the desk workspace.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Point x,y,z to classify.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let body = serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            eprintln!("{body}");
            ExitCode::from(1)
        }
    }
}
