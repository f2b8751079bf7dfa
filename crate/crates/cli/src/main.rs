mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sarhue::{ErrorKind, LookParams};

/// Subband chromatic coding of SAR single-look complex images.
#[derive(Debug, Parser)]
#[command(name = "sarhue", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Color-code an SLC container.
    Encode(EncodeArgs),
    /// Render a scene description to an SLC container and ground-truth sidecar.
    Synth(SynthArgs),
    /// Print the subband palette and optionally write a swatch.
    Palette(PaletteArgs),
    /// Estimate the equivalent number of looks.
    Enl(EnlArgs),
    /// Write one grayscale amplitude image per subband.
    Subbands(SubbandArgs),
    /// Print container metadata and the subband layout.
    Info(InfoArgs),
    /// Re-run a saved manifest.
    Replay {
        #[arg(long)]
        manifest: PathBuf,
    },
}

#[derive(Debug, Args)]
struct SpectralArgs {
    /// Number of range subbands.
    #[arg(long, default_value_t = 9)]
    nsub: usize,
    /// Equalization window coefficient.
    #[arg(long, default_value_t = 0.75)]
    a: f64,
    /// Skip spectral equalization.
    #[arg(long)]
    no_equalize: bool,
    /// Oversampling factor, overriding the container value.
    #[arg(long)]
    xi: Option<f64>,
}

#[derive(Debug, Args)]
struct EncodeArgs {
    input: PathBuf,
    /// Color image to write (.png or .ppm).
    #[arg(short, long)]
    output: PathBuf,
    #[command(flatten)]
    spectral: SpectralArgs,
    /// Multilook window, azimuth x range.
    #[arg(long, default_value = "9x9")]
    looks: LookParams,
    /// Amplitude percentile mapped to full brightness.
    #[arg(long, default_value_t = 95.0)]
    percentile: f64,
    /// Average complex subband samples instead of amplitudes.
    #[arg(long)]
    complex_average: bool,
    /// Write the run report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Also dump the multilooked subband amplitudes here.
    #[arg(long)]
    subbands_dir: Option<PathBuf>,
    /// Save a replayable manifest of this run.
    #[arg(long)]
    save_manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    scene: PathBuf,
    /// Output container stem.
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    save_manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PaletteArgs {
    #[arg(long, default_value_t = 9)]
    nsub: usize,
    /// Swatch image with one block per subband.
    #[arg(long)]
    swatch: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EnlArgs {
    input: PathBuf,
    /// Overlapping multilook window applied to the intensity first.
    #[arg(long, conflicts_with = "block")]
    looks: Option<LookParams>,
    /// Non-overlapping block average applied to the intensity first.
    #[arg(long)]
    block: Option<LookParams>,
    /// Also report ENL over square tiles of this size.
    #[arg(long)]
    tile: Option<usize>,
}

#[derive(Debug, Args)]
struct SubbandArgs {
    input: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    #[command(flatten)]
    spectral: SpectralArgs,
    #[arg(long, default_value = "1x1")]
    looks: LookParams,
}

#[derive(Debug, Args)]
struct InfoArgs {
    input: PathBuf,
    #[arg(long, default_value_t = 9)]
    nsub: usize,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<sarhue::Error>() {
            return match e.kind() {
                ErrorKind::Argument => 2,
                ErrorKind::Format => 3,
                ErrorKind::Numeric => 4,
                ErrorKind::Io => 5,
            };
        }
        if cause.is::<serde_json::Error>() {
            return 3;
        }
        if cause.is::<std::io::Error>() {
            return 5;
        }
    }
    1
}

fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("SARHUE_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| anyhow::anyhow!("SARHUE_THREADS must be a positive integer, got {v:?}"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    init_threads()?;
    match cli.command {
        Command::Encode(a) => commands::encode(a),
        Command::Synth(a) => commands::synth(a),
        Command::Palette(a) => commands::palette(a),
        Command::Enl(a) => commands::enl(a),
        Command::Subbands(a) => commands::subbands(a),
        Command::Info(a) => commands::info(a),
        Command::Replay { manifest } => commands::replay(&manifest),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let mut msg = String::new();
            for cause in e.chain() {
                let text = cause.to_string();
                if !msg.ends_with(&text) {
                    if !msg.is_empty() {
                        msg.push_str(": ");
                    }
                    msg.push_str(&text);
                }
            }
            eprintln!("error: {msg}");
            ExitCode::from(exit_code(&e))
        }
    }
}
