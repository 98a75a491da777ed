use std::path::PathBuf;
use std::process::ExitCode;

use bandish::commands;
use bandish::pipeline::Selection;
use bandish::RunConfig;
use bandish_core::pitchtrack::TrackerParams;
use clap::{Args, Parser, Subcommand};

/// Expressive timing and pitch analysis of bandish renditions.
#[derive(Parser)]
#[command(name = "bandish", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand)]
enum Command {
    /// Load and check the dataset and print its summary table
    Validate,
    /// Write pitch.csv for performances that only have audio.wav
    ExtractPitch,
    /// Timing deviations per syllable onset
    Timing,
    /// PAA strings and NLSS matrices per syllable
    Pitch,
    /// Cluster repetitions of each syllable by NLSS
    Cluster,
    /// Artist x syllable tables and box-plot summaries
    Aggregate,
    /// Run timing, pitch, cluster and aggregate
    Analyze,
    /// Fit an artist model, sample a rendition and render it
    Generate,
    /// Write the synthetic mini-dataset to --out
    SynthDataset,
}

#[derive(Args)]
struct Opts {
    /// Dataset root
    #[arg(long, global = true, env = "BANDISH_DATASET", default_value = "data/synthetic")]
    dataset: PathBuf,
    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for sampling; recorded in CSV and JSON outputs
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Restrict to one bandish (default: the first in the manifest)
    #[arg(long, global = true)]
    bandish: Option<String>,
    /// Restrict to one line, 1-based (tables and generation default to 1)
    #[arg(long, global = true)]
    line: Option<usize>,
    /// Restrict to one artist
    #[arg(long, global = true)]
    artist: Option<String>,
    /// PAA intervals per allotted beat
    #[arg(long, global = true, default_value_t = bandish_core::PAA_PER_BEAT)]
    paa_per_beat: usize,
    /// NLSS height at which the variation dendrogram is cut
    #[arg(long, global = true, default_value_t = 0.3)]
    nlss_threshold: f64,
    /// Tempo for generation in matra/min; defaults to the middle of the artist's range
    #[arg(long, global = true)]
    tempo: Option<f64>,
    /// Tonic for generation; defaults to the artist's own
    #[arg(long, global = true)]
    tonic_hz: Option<f64>,
    /// Lowest F0 the tracker searches, Hz
    #[arg(long, global = true, default_value_t = TrackerParams::default().fmin)]
    fmin: f64,
    /// Highest F0 the tracker searches, Hz
    #[arg(long, global = true, default_value_t = TrackerParams::default().fmax)]
    fmax: f64,
    /// Normalized autocorrelation a frame needs to count as voiced
    #[arg(long, global = true, default_value_t = TrackerParams::default().voicing_threshold)]
    voicing_threshold: f64,
    /// Sample rate of generated audio
    #[arg(long, global = true, default_value_t = 44_100)]
    sample_rate: u32,
    /// Gaussian jitter added to sampled deviations, in beats
    #[arg(long, global = true, default_value_t = 0.0)]
    jitter_sigma: f64,
    /// Draw pitch strings with equal weight per variation cluster
    #[arg(long, global = true)]
    cluster_weighted: bool,
    /// Also write SVG renderings of the tables
    #[arg(long, global = true)]
    svg: bool,
}

impl Opts {
    fn config(self) -> RunConfig {
        RunConfig {
            dataset: self.dataset,
            out: self.out,
            seed: self.seed,
            selection: Selection { bandish: self.bandish, line: self.line, artist: self.artist },
            per_beat: self.paa_per_beat,
            nlss_threshold: self.nlss_threshold,
            tempo: self.tempo,
            tonic_hz: self.tonic_hz,
            tracker: TrackerParams {
                fmin: self.fmin,
                fmax: self.fmax,
                voicing_threshold: self.voicing_threshold,
                ..TrackerParams::default()
            },
            sample_rate: self.sample_rate,
            jitter_sigma: self.jitter_sigma,
            cluster_weighted: self.cluster_weighted,
            svg: self.svg,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = cli.opts.config();
    let result = cfg.check().and_then(|()| match cli.command {
        Command::Validate => commands::validate(&cfg),
        Command::ExtractPitch => commands::extract_pitch(&cfg),
        Command::Timing => commands::timing(&cfg),
        Command::Pitch => commands::pitch(&cfg),
        Command::Cluster => commands::cluster(&cfg),
        Command::Aggregate => commands::aggregate(&cfg),
        Command::Analyze => commands::analyze(&cfg),
        Command::Generate => commands::generate(&cfg),
        Command::SynthDataset => commands::synth_dataset(&cfg.out, cfg.seed),
    });
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.class() as u8)
        }
    }
}
