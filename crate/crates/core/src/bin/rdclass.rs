use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rdclass::compression::Algorithm;
use rdclass::pipeline::{self, ClassifierKind, CsvInput, FeatureSet, PipelineConfig};
use rdclass::Error;

#[derive(Parser)]
#[command(
    version,
    about = "Rate-distortion, classification and energy tools for sensor windows"
)]
struct Cli {
    /// TOML pipeline configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true)]
    window_len: Option<usize>,
    #[arg(long, global = true)]
    folds: Option<usize>,
    /// Features kept by greedy selection.
    #[arg(long, global = true)]
    k: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cut CSV files (PATH or PATH=CLASS) into windows; synthetic corpus if none given.
    Ingest { inputs: Vec<CsvInput> },
    /// Rate-distortion curves per class and over all classes.
    Rd {
        /// windows.json or the directory holding it.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        algorithm: Algorithm,
    },
    /// Extract and normalize the feature matrix.
    Features {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Greedy forward feature selection.
    Select {
        /// Feature matrix CSV or its directory.
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Cross-validated accuracy plus a model trained on every row.
    TrainEval {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        classifier: ClassifierKind,
        #[arg(long, default_value = "all")]
        features: FeatureSet,
        /// selection.json, required for `--features selected`.
        #[arg(long)]
        selection: Option<PathBuf>,
    },
    /// Star-network energy simulation.
    Simulate {
        /// Scenario JSON; defaults to synthetic nodes built from the config.
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Directory with rd_dct_<class> curve files.
        #[arg(long)]
        curves: Option<PathBuf>,
    },
    /// Every stage in sequence on the synthetic corpus.
    Pipeline,
}

fn config(cli: &Cli) -> rdclass::Result<PipelineConfig> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::from_toml_file(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(n) = cli.window_len {
        cfg.window_len = n;
    }
    if let Some(f) = cli.folds {
        cfg.folds = f;
    }
    if let Some(k) = cli.k {
        cfg.k = k;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> rdclass::Result<()> {
    let cfg = config(cli)?;
    let out = &cli.out;
    match &cli.command {
        Command::Ingest { inputs } => {
            let s = pipeline::cmd_ingest(&cfg, inputs, out)?;
            println!(
                "{} windows, {} dropped windows, {} discarded samples",
                s.windows, s.dropped_windows, s.discarded_samples
            );
        }
        Command::Rd { input, algorithm } => {
            let curves = pipeline::cmd_rd(&cfg, input, *algorithm, out)?;
            println!("{} curves written", curves.len());
        }
        Command::Features { input } => {
            let m = pipeline::cmd_features(&cfg, input, out)?;
            println!("{} rows x {} features", m.n_rows(), m.n_cols());
        }
        Command::Select { matrix } => {
            let r = pipeline::cmd_select(&cfg, matrix, out)?;
            println!("selected {}", r.selected_names.join(", "));
        }
        Command::TrainEval {
            matrix,
            classifier,
            features,
            selection,
        } => {
            let r = pipeline::cmd_train_eval(
                &cfg,
                matrix,
                *classifier,
                *features,
                selection.as_deref(),
                out,
            )?;
            println!(
                "{} on {}: accuracy {:.4}",
                r.classifier, r.features, r.accuracy
            );
        }
        Command::Simulate { scenario, curves } => {
            let r = pipeline::cmd_simulate(&cfg, scenario.as_deref(), curves.as_deref(), out)?;
            println!("{} node-periods simulated", r.results.len());
        }
        Command::Pipeline => {
            pipeline::cmd_pipeline(&cfg, out)?;
            println!("outputs in {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_input_error() {
        2
    } else {
        3
    }
}
