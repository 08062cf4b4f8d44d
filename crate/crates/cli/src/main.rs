use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use seizure_core::dataset::{load_csv, write_csv, FEATURE_COUNT};
use seizure_core::experiment::{
    emit_report, exploratory_analysis, parse_models, run_experiment, save_models, ExperimentConfig,
    PipelineMode, Preprocessor, ReportFormat,
};
use seizure_core::preprocess::Normalization;
use seizure_core::{synthetic, Matrix, TrainedClassifier};

#[derive(Debug, Parser)]
#[command(name = "seizure", version, about = "EEG seizure classifier benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Paper,
    Sound,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Scaling {
    Minmax,
    Zscore,
}

impl From<Scaling> for Normalization {
    fn from(s: Scaling) -> Self {
        match s {
            Scaling::Minmax => Normalization::MinMax,
            Scaling::Zscore => Normalization::ZScore,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Preprocess, train every requested model, evaluate and write reports.
    Run {
        /// Dataset CSV (id, 178 samples, label)
        #[arg(long)]
        data: Option<PathBuf>,
        /// TOML config; command-line flags take precedence
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Comma-separated subset, e.g. `extra_trees,random_forest`
        #[arg(long, value_delimiter = ',')]
        models: Option<Vec<String>>,
        #[arg(long)]
        test_fraction: Option<f64>,
        #[arg(long)]
        iqr_k: Option<f64>,
        #[arg(long, value_enum)]
        normalization: Option<Scaling>,
        /// The dataset file has no header row
        #[arg(long)]
        no_header: bool,
        /// Also write every trained model and the preprocessor under `<out>/models`
        #[arg(long)]
        save_models: bool,
    },
    /// Class and feature statistics plus the feature correlation matrix.
    Eda {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "eda")]
        out: PathBuf,
        #[arg(long, default_value_t = 1.5)]
        iqr_k: f64,
        #[arg(long, value_enum, default_value = "minmax")]
        normalization: Scaling,
        #[arg(long)]
        no_header: bool,
    },
    /// Score windows with a saved model.
    Predict {
        /// Model JSON written by `run --save-models`
        #[arg(long)]
        model: PathBuf,
        /// CSV of windows: 178 values per row, or the full id/samples/label layout
        #[arg(long)]
        data: PathBuf,
        /// Preprocessor JSON to apply before scoring; defaults to
        /// `preprocessor.json` next to the model when present
        #[arg(long)]
        preprocessor: Option<PathBuf>,
        /// Score rows as-is, skipping preprocessing
        #[arg(long, conflicts_with = "preprocessor")]
        raw: bool,
        /// Output CSV; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic dataset in the same CSV layout.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 200)]
        rows_per_class: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run {
            data,
            config,
            mode,
            seed,
            out,
            models,
            test_fraction,
            iqr_k,
            normalization,
            no_header,
            save_models: save,
        } => {
            let mut cfg = match &config {
                Some(path) => ExperimentConfig::from_file(path)?,
                None => ExperimentConfig::new(PathBuf::new()),
            };
            match data {
                Some(d) => cfg.dataset_path = d,
                None if cfg.dataset_path.as_os_str().is_empty() => {
                    bail!("missing required --data (or `data` in --config)")
                }
                None => {}
            }
            if let Some(m) = mode {
                cfg.mode = match m {
                    Mode::Paper => PipelineMode::Paper,
                    Mode::Sound => PipelineMode::Sound,
                };
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(names) = models {
                cfg.models = parse_models(names.iter().map(String::as_str))?;
            }
            if let Some(f) = test_fraction {
                cfg.test_fraction = f;
            }
            if let Some(k) = iqr_k {
                cfg.iqr_k = k;
            }
            if let Some(n) = normalization {
                cfg.normalization = n.into();
            }
            if no_header {
                cfg.has_header = false;
            }
            run(&cfg, &out, save)
        }
        Command::Eda {
            data,
            out,
            iqr_k,
            normalization,
            no_header,
        } => eda(&data, &out, iqr_k, normalization.into(), !no_header),
        Command::Predict {
            model,
            data,
            preprocessor,
            raw,
            out,
        } => predict(&model, &data, preprocessor, raw, out.as_deref()),
        Command::Synth {
            out,
            rows_per_class,
            seed,
        } => {
            let ds = synthetic::generate(rows_per_class, seed);
            let file =
                fs::File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            write_csv(&ds, io::BufWriter::new(file))?;
            println!("wrote {} rows to {}", ds.len(), out.display());
            Ok(())
        }
    }
}

fn run(cfg: &ExperimentConfig, out: &Path, save: bool) -> Result<()> {
    let report = run_experiment(cfg)?;
    let files = emit_report(&report, &[ReportFormat::Json, ReportFormat::Csv], out)?;
    if save {
        save_models(&report, out.join("models"))?;
    }
    let p = &report.preprocessing;
    println!(
        "mode {:?}, seed {}: {} outlier cells repaired, {} rows after oversampling, train {} / test {}",
        cfg.mode, cfg.seed, p.outliers_replaced, p.oversampled_rows, p.train_rows, p.test_rows
    );
    println!(
        "{:<20} {:>9} {:>9} {:>9} {:>9} {:>7} {:>6}",
        "model", "precision", "recall", "f1", "accuracy", "auc", "errors"
    );
    for m in &report.models {
        let r = &m.metrics;
        println!(
            "{:<20} {:>9.2} {:>9.2} {:>9.2} {:>9.2} {:>7.4} {:>6}",
            m.name,
            r.precision * 100.0,
            r.recall * 100.0,
            r.f1 * 100.0,
            r.accuracy * 100.0,
            m.auc,
            r.misclassified
        );
    }
    println!("{} files written to {}", files.len(), out.display());
    Ok(())
}

fn eda(
    data: &Path,
    out: &Path,
    iqr_k: f64,
    normalization: Normalization,
    header: bool,
) -> Result<()> {
    let ds = load_csv(data, header)?;
    let report = exploratory_analysis(&ds, normalization, iqr_k)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    fs::write(out.join("eda.json"), serde_json_pretty(&report)?)?;
    fs::write(out.join("correlation.csv"), report.correlation.to_csv())?;
    fs::write(out.join("outliers.csv"), report.outliers.to_csv())?;
    println!(
        "{} rows: {} seizure, {} non-seizure; {} outlier cells; written to {}",
        report.summary.total_rows,
        report.positives,
        report.negatives,
        report.outliers.total_replaced,
        out.display()
    );
    for (label, count) in &report.summary.class_counts {
        println!("  label {label}: {count}");
    }
    Ok(())
}

fn serde_json_pretty<T: serde::Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

/// Reads windows to score. Accepts bare rows of 178 values or the full
/// dataset layout (id, 178 values, label). A non-numeric first row is
/// treated as a header.
fn read_windows(path: &Path) -> Result<Matrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut rows = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let values = match cells.len() {
            n if n == FEATURE_COUNT => &cells[..],
            n if n == FEATURE_COUNT + 2 => &cells[1..=FEATURE_COUNT],
            n => bail!(
                "line {}: expected {} or {} columns, found {n}",
                line_no + 1,
                FEATURE_COUNT,
                FEATURE_COUNT + 2
            ),
        };
        let parsed: std::result::Result<Vec<f64>, _> =
            values.iter().map(|c| c.parse::<f64>()).collect();
        match parsed {
            Ok(v) => rows.push(v),
            Err(_) if rows.is_empty() && line_no == 0 => continue,
            Err(e) => bail!("line {}: {e}", line_no + 1),
        }
    }
    if rows.is_empty() {
        bail!("{} contains no rows", path.display());
    }
    Ok(Matrix::from_rows(&rows)?)
}

fn predict(
    model_path: &Path,
    data: &Path,
    preprocessor: Option<PathBuf>,
    raw: bool,
    out: Option<&Path>,
) -> Result<()> {
    let text = fs::read_to_string(model_path)
        .with_context(|| format!("reading {}", model_path.display()))?;
    let model = TrainedClassifier::from_json(&text)?;
    let mut windows = read_windows(data)?;

    let preprocessor = match preprocessor {
        Some(p) => Some(p),
        None if raw => None,
        None => model_path
            .parent()
            .map(|d| d.join("preprocessor.json"))
            .filter(|p| p.exists()),
    };
    if let Some(p) = preprocessor {
        let text = fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
        windows = Preprocessor::from_json(&text)?.transform(&windows)?.0;
    }

    let scores = model.predict_proba(&windows)?;
    let mut csv = String::from("row,score\n");
    for (i, s) in scores.iter().enumerate() {
        csv.push_str(&format!("{i},{s}\n"));
    }
    match out {
        Some(path) => {
            fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?
        }
        None => io::stdout().write_all(csv.as_bytes())?,
    }
    Ok(())
}
