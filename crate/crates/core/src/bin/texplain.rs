use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use texplain::commands::{
    cmd_batchsim, cmd_correlate, cmd_features, cmd_retrieve, cmd_synth, montage_path, BatchsimOutputs,
    CorrelateOutputs, RunConfig, Scenario, TABLE_ROWS,
};
use texplain::correlation::SignConvention;
use texplain::Result;

#[derive(Parser)]
#[command(name = "texplain", version, about = "Texture-based explanations for CNN features on image datasets")]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

/// Every config key, settable after the subcommand too.
#[derive(Args)]
struct Overrides {
    /// TOML run configuration; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[arg(long, global = true)]
    activation_root: Option<PathBuf>,
    #[arg(long, global = true)]
    image_root: Option<PathBuf>,
    #[arg(long = "out", global = true)]
    out_dir: Option<PathBuf>,
    /// Feature stage, 1-5.
    #[arg(long, global = true)]
    stage: Option<usize>,
    #[arg(long, global = true)]
    k: Option<usize>,
    #[arg(long, global = true, value_enum)]
    sign: Option<Sign>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Five comma-separated stage weights for the combined saliency map.
    #[arg(long, global = true, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sign {
    Similarity,
    Distance,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Planted,
    TwoRegimes,
}

#[derive(Subcommand)]
enum Command {
    /// Extract and cache one feature and combined saliency map per sample.
    Features,
    /// Nearest textures to a sample or a target class; writes a montage manifest.
    Retrieve { query: String },
    /// Texture-versus-CPS correlations, ranked table and bar chart.
    Correlate,
    /// Per-class texture profiles and their similarity heatmap.
    Batchsim,
    /// Generate a synthetic dataset with planted texture links.
    Synth {
        #[arg(long, value_enum)]
        scenario: Option<ScenarioArg>,
        #[arg(long)]
        classes: Option<usize>,
        #[arg(long)]
        samples_per_class: Option<usize>,
        #[arg(long)]
        texture_samples: Option<usize>,
        #[arg(long)]
        size: Option<usize>,
    },
}

fn build_config(o: Overrides) -> Result<RunConfig> {
    let mut cfg = match &o.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if o.manifest.is_some() {
        cfg.manifest = o.manifest;
    }
    if o.activation_root.is_some() {
        cfg.activation_root = o.activation_root;
    }
    if o.image_root.is_some() {
        cfg.image_root = o.image_root;
    }
    if let Some(p) = o.out_dir {
        cfg.out_dir = p;
    }
    if let Some(v) = o.stage {
        cfg.stage = v;
    }
    if let Some(v) = o.k {
        cfg.k = v;
    }
    if let Some(v) = o.sign {
        cfg.sign = match v {
            Sign::Similarity => SignConvention::Similarity,
            Sign::Distance => SignConvention::Distance,
        };
    }
    if let Some(v) = o.seed {
        cfg.seed = v;
    }
    if let Some(v) = o.weights {
        cfg.weights = v;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = build_config(cli.overrides)?;
    match cli.command {
        Command::Features => {
            let s = cmd_features(&cfg)?;
            println!("features: {} computed, {} up to date", s.computed, s.skipped);
        }
        Command::Retrieve { query } => {
            let m = cmd_retrieve(&cfg, &query)?;
            for n in &m.neighbors {
                println!("{:>3}  {:<24} {:<16} {:.4}", n.rank, n.image.sample_id, n.image.class_id, n.distance);
            }
            println!("montage: {}", montage_path(&cfg.out_dir, &query).display());
        }
        Command::Correlate => {
            let report = cmd_correlate(&cfg)?;
            print!("{}", report.ranked_table(TABLE_ROWS));
            println!("written to {}", CorrelateOutputs::new(&cfg.out_dir).correlations_csv.display());
        }
        Command::Batchsim => {
            let m = cmd_batchsim(&cfg)?;
            println!(
                "batch similarity over {} classes written to {}",
                m.len(),
                BatchsimOutputs::new(&cfg.out_dir).similarity_csv.display()
            );
        }
        Command::Synth {
            scenario,
            classes,
            samples_per_class,
            texture_samples,
            size,
        } => {
            let s = &mut cfg.synth;
            if let Some(v) = scenario {
                s.scenario = match v {
                    ScenarioArg::Planted => Scenario::Planted,
                    ScenarioArg::TwoRegimes => Scenario::TwoRegimes,
                };
            }
            s.classes = classes.unwrap_or(s.classes);
            s.samples_per_class = samples_per_class.unwrap_or(s.samples_per_class);
            s.texture_samples = texture_samples.unwrap_or(s.texture_samples);
            s.size = size.unwrap_or(s.size);
            let m = cmd_synth(&cfg)?;
            println!(
                "synth: {} samples in {} target and {} texture classes under {}",
                m.sample_count(),
                m.sem_classes().len(),
                m.texture_classes().len(),
                cfg.out_dir.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("texplain: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
