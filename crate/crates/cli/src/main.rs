//! `hybridrt` command line tool.

mod assets;
mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "hybridrt",
    version,
    about = "Hybrid surface/volume path tracer, HDR calibration, emitter recovery and XPBD dynamics"
)]
pub struct Cli {
    /// Worker threads for rendering and estimation (default: all cores).
    #[arg(long, global = true, env = "HYBRIDRT_THREADS")]
    pub threads: Option<usize>,

    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Render a scene to PPM (or PFM with --hdr).
    Render(RenderArgs),
    /// Step the scene's simulation and write per-frame snapshots.
    Simulate(SimulateArgs),
    /// Recover the camera response from an exposure bracket.
    HdrRecover(HdrRecoverArgs),
    /// Merge an exposure bracket into a radiance map.
    HdrMerge(HdrMergeArgs),
    /// Recover per-face emission from target images and prune to emitters.
    EstimateEmitters(EstimateArgs),
    /// Write analytic grids, meshes, brackets and example scenes.
    GenAssets(GenAssetsArgs),
}

/// Scene overrides shared by `render` and `simulate`.
#[derive(Args, Debug, Clone, Default)]
pub struct Overrides {
    /// Samples per pixel.
    #[arg(long)]
    pub spp: Option<u32>,
    /// Base seed of every random stream.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Image width in pixels.
    #[arg(long)]
    pub width: Option<usize>,
    /// Image height in pixels.
    #[arg(long)]
    pub height: Option<usize>,
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    /// Scene JSON file.
    #[arg(long)]
    pub scene: PathBuf,
    /// Output image path.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub overrides: Overrides,
    /// Write linear PFM instead of tone-mapped PPM.
    #[arg(long)]
    pub hdr: bool,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Scene JSON file.
    #[arg(long)]
    pub scene: PathBuf,
    /// Output directory for `frame_NNNN.*` files.
    #[arg(long)]
    pub out: PathBuf,
    /// Number of simulated frames after the initial snapshot.
    #[arg(long, default_value_t = 60)]
    pub frames: usize,
    /// Also render every frame.
    #[arg(long)]
    pub render: bool,
    #[command(flatten)]
    pub overrides: Overrides,
    /// Rendered frames as PFM instead of PPM.
    #[arg(long)]
    pub hdr: bool,
}

#[derive(Args, Debug)]
pub struct HdrRecoverArgs {
    /// Bracket manifest (`{"images": [...], "exposure_times": [...]}`).
    #[arg(long)]
    pub bracket: PathBuf,
    /// Output CSV (`z,g_r,g_g,g_b`).
    #[arg(long)]
    pub out: PathBuf,
    /// Smoothness weight.
    #[arg(long, default_value_t = hybridrt::hdr::DEFAULT_LAMBDA)]
    pub lambda: f64,
    /// Pixel sample positions.
    #[arg(long, default_value_t = hybridrt::hdr::DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Seed for the sample positions.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct HdrMergeArgs {
    /// Bracket manifest.
    #[arg(long)]
    pub bracket: PathBuf,
    /// Response CSV from `hdr-recover`.
    #[arg(long)]
    pub crf: PathBuf,
    /// Output PFM.
    #[arg(long)]
    pub out: PathBuf,
    /// Rescale so the brightest channel is 255.
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    /// Scene JSON whose meshes carry the candidate faces.
    #[arg(long)]
    pub scene: PathBuf,
    /// Target manifest (`{"poses": [camera...], "images": ["*.pfm"...]}`).
    #[arg(long)]
    pub targets: PathBuf,
    /// Output directory for `emitters.json`, `emission.json` and `loss.csv`.
    #[arg(long)]
    pub out: PathBuf,
    /// Estimator settings JSON (defaults when omitted).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Path depth of the transport model.
    #[arg(long, default_value_t = hybridrt::estimate::DEFAULT_MAX_DEPTH)]
    pub max_depth: u32,
    /// Samples per pixel of the transport model.
    #[arg(long)]
    pub spp: Option<u32>,
    /// Seed of the transport model.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum AssetKind {
    /// Sphere distance grid (`.sdfgrid`).
    SphereSdf,
    /// Box distance grid (`.sdfgrid`).
    BoxSdf,
    /// Emissive ball field (`.rfgrid`).
    SphereField,
    /// Unit slab field (`.rfgrid`).
    SmokeSlab,
    /// Furnace shell field (`.rfgrid`).
    FurnaceShell,
    /// Two-room field (`.rfgrid`).
    TwoRoom,
    /// Icosphere mesh (`.obj`).
    IcosphereObj,
    /// Five-exposure gamma-2.2 bracket of the HDR toy scene plus its radiance.
    HdrBracket,
    /// Emitter-recovery room: mesh, scene, poses and target renders.
    ToyRoom,
    /// Example scene files.
    Scenes,
}

#[derive(Args, Debug)]
pub struct GenAssetsArgs {
    pub kind: AssetKind,
    /// Output file, or directory for multi-file kinds.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Grid resolution per axis (image size for brackets and rooms).
    #[arg(long, default_value_t = 64)]
    pub res: usize,
    /// Radius or half-size of analytic shapes.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Seed for rendered assets.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Samples per pixel for rendered assets.
    #[arg(long, default_value_t = 64)]
    pub spp: u32,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Render(_) => "render",
            Command::Simulate(_) => "simulate",
            Command::HdrRecover(_) => "hdr-recover",
            Command::HdrMerge(_) => "hdr-merge",
            Command::EstimateEmitters(_) => "estimate-emitters",
            Command::GenAssets(_) => "gen-assets",
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(
                e.kind(),
                ErrorKind::DisplayHelp
                    | ErrorKind::DisplayVersion
                    | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            ) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            let first = msg
                .lines()
                .next()
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ");
            return CliError::Config(first.to_string()).report("args");
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    let name = cli.command.name();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(name),
    }
}
