use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use gaitscope::classify::{ClassifyError, Method, Scaling, Trainer, DEFAULT_C, DEFAULT_K};
use gaitscope::gait::GaitConfig;
use gaitscope::pipeline::{
    self, fixtures, report, FeatureTable, FeatureTableError, ParseError, PipelineError,
};
use gaitscope::signal::DEFAULT_SIGMA;

const EXIT_CODES: &str = "\
Exit status:
  0  success
  1  file could not be read or written
  2  invalid command line
  3  input failed to parse or validate (annotation document, feature CSV)
  4  computation failed (degenerate calibration, classifier preconditions)";

#[derive(Parser)]
#[command(name = "gaitscope", version, about = "Gait features and fall prediction from annotated walks", after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write rectified footfalls (top view) and head tracks (side view) as CSV.
    Rectify {
        annotations: PathBuf,
        /// Output directory; receives footfalls.csv and head.csv.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SIGMA)]
        sigma: f64,
    },
    /// Compute per-person stride length L and head range H.
    Extract {
        annotations: PathBuf,
        /// Output CSV path; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SIGMA)]
        sigma: f64,
    },
    /// Leave-one-out evaluation of a classifier on a feature table.
    Classify {
        #[command(flatten)]
        input: FeatureInput,
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Feature scaling fit inside each fold [default: none for svm, zscore for knn]
        #[arg(long)]
        scaling: Option<Scaling>,
        /// SVM regularization.
        #[arg(long, default_value_t = DEFAULT_C)]
        c: f64,
        /// Neighbours for kNN.
        #[arg(long, default_value_t = DEFAULT_K)]
        k: usize,
        /// Output directory; receives predictions.csv, roc.svg and summary.txt.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the feature table and both classifiers' results.
    Report {
        #[command(flatten)]
        input: FeatureInput,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct FeatureInput {
    /// Feature CSV (personId,L,H,outcome,strideCount).
    features: Option<PathBuf>,
    /// Use the bundled published feature table.
    #[arg(long)]
    fixture: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Svm,
    Knn,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{path}: {source}")]
    Features {
        path: PathBuf,
        source: FeatureTableError,
    },
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error("invalid argument: {0}")]
    Argument(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Argument(_) => 2,
            CliError::Parse { .. } | CliError::Features { .. } => 3,
            CliError::Pipeline(PipelineError::Table(_)) => 3,
            CliError::Pipeline(_) | CliError::Classify(_) => 4,
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn load_document(path: &Path) -> Result<pipeline::AnnotationDocument, CliError> {
    pipeline::parse_annotations(&read(path)?).map_err(|source| CliError::Parse {
        path: path.to_owned(),
        source,
    })
}

fn load_features(input: &FeatureInput) -> Result<FeatureTable, CliError> {
    match &input.features {
        Some(path) => {
            FeatureTable::read_csv(read(path)?.as_slice()).map_err(|source| CliError::Features {
                path: path.clone(),
                source,
            })
        }
        None => Ok(fixtures::load_feature_fixture()),
    }
}

fn gait_config(sigma: f64) -> Result<GaitConfig, CliError> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(CliError::Argument(format!(
            "--sigma must be positive, got {sigma}"
        )));
    }
    Ok(GaitConfig { sigma })
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Rectify {
            annotations,
            out,
            sigma,
        } => {
            let doc = load_document(&annotations)?;
            let tracks = pipeline::run_rectify(&doc, &gait_config(sigma)?)?;
            for e in &tracks.skipped {
                eprintln!("skipped {e}");
            }
            create_dir(&out)?;
            write(&out.join("footfalls.csv"), &tracks.footfalls_csv())?;
            write(&out.join("head.csv"), &tracks.head_csv())?;
        }
        Command::Extract {
            annotations,
            out,
            sigma,
        } => {
            let doc = load_document(&annotations)?;
            let result = pipeline::run_extract(&doc, &gait_config(sigma)?)?;
            for w in &result.warnings {
                eprintln!("warning: {w}");
            }
            for e in &result.skipped {
                eprintln!("skipped {e}");
            }
            let csv = result.table.to_csv_string();
            match out {
                Some(path) => write(&path, &csv)?,
                None => print!("{csv}"),
            }
        }
        Command::Classify {
            input,
            method,
            scaling,
            c,
            k,
            out,
        } => {
            let table = load_features(&input)?;
            let method = match method {
                MethodArg::Svm => Method::Svm { c },
                MethodArg::Knn => Method::Knn { k },
            };
            let trainer = Trainer::new(method, scaling.unwrap_or(method.default_scaling()));
            let result = pipeline::run_classify(&table, &trainer)?;
            let summary = report::summary(&result);
            print!("{summary}");
            if let Some(dir) = out {
                let title = format!("{} ({})", method.name(), trainer.scaling);
                create_dir(&dir)?;
                write(
                    &dir.join("predictions.csv"),
                    &report::predictions_csv(&result),
                )?;
                write(
                    &dir.join("roc.svg"),
                    &report::roc_svg(&result.roc, result.auc, &title),
                )?;
                write(&dir.join("summary.txt"), &summary)?;
            }
        }
        Command::Report { input } => {
            let table = load_features(&input)?;
            print!("{}", report::feature_summary(&table));
            for method in [Method::svm(), Method::knn()] {
                let result =
                    pipeline::run_classify(&table, &Trainer::with_default_scaling(method))?;
                println!();
                print!("{}", report::summary(&result));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
