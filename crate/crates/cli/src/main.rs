mod cache;
mod commands;
mod error;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use textmine::classify::ModelKind;
use textmine::config::FlatConfig;

use commands::Session;
use error::{CliError, CliResult};
use settings::RunConfig;

/// Corpus analytics for chaptered books: preprocessing, document-term
/// matrices, distances between chapters and books, and classification.
#[derive(Parser, Debug)]
#[command(name = "textmine", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Flat `section.key = value` settings file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Corpus manifest (TOML); same as corpus.manifest.
    #[arg(long, global = true, value_name = "PATH")]
    manifest: Option<PathBuf>,
    /// Seed for every random choice; default 42.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Output directory; default `out`.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Feature weighting for distances and for KNN, SVM and RF.
    #[arg(long, global = true, value_parser = ["counts", "tfidf"])]
    features: Option<String>,
    /// Restrict distance work to one measure.
    #[arg(long, global = true, value_parser = ["euclidean", "manhattan", "jaccard", "cosine"])]
    measure: Option<String>,
    /// Restrict book aggregation to one linkage.
    #[arg(long, global = true, value_parser = ["min", "max", "mean", "median"])]
    linkage: Option<String>,
    /// Number of cross-validation folds; default 10.
    #[arg(long, global = true, value_name = "M")]
    folds: Option<usize>,
    /// Override any setting, e.g. `--set grid.knn.k=1,3`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Log progress to standard error.
    #[arg(short, long, global = true)]
    verbose: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Read the corpus and write its cache and book table.
    Ingest,
    /// Clean and stem tokens; write frequency and part-of-speech tables.
    Preprocess,
    /// Build the document-term matrix and export it.
    Dtm,
    /// Pairwise chapter distances, heatmaps and metric checks.
    Dist,
    /// Book-by-book distances under each linkage.
    Linkage,
    /// Correlation between distance measures.
    Corr,
    /// Grid-search one classifier and save the retrained best model.
    Train(ModelArg),
    /// Cross-validated comparison of classifiers.
    Eval(EvalArg),
    /// Every stage, collected under `<out>/report`.
    Report,
}

#[derive(Args, Debug)]
struct ModelArg {
    #[arg(long, default_value = "mnb", value_parser = ["mnb", "knn", "svm", "rf"])]
    model: String,
}

#[derive(Args, Debug)]
struct EvalArg {
    /// One model, or `all`.
    #[arg(long, default_value = "all", value_parser = ["all", "mnb", "knn", "svm", "rf"])]
    model: String,
}

fn overrides(g: &GlobalArgs) -> CliResult<FlatConfig> {
    let mut c = FlatConfig::default();
    for kv in &g.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        c.set(k.trim(), v.trim());
    }
    let path = |p: &PathBuf| p.to_string_lossy().into_owned();
    if let Some(m) = &g.manifest {
        c.set("corpus.manifest", path(m));
    }
    if let Some(s) = g.seed {
        c.set("run.seed", s.to_string());
    }
    if let Some(o) = &g.out {
        c.set("run.out", path(o));
    }
    if let Some(f) = &g.features {
        c.set("features.mode", f.clone());
    }
    if let Some(m) = &g.measure {
        c.set("distance.measures", m.clone());
    }
    if let Some(l) = &g.linkage {
        c.set("distance.linkages", l.clone());
    }
    if let Some(m) = g.folds {
        c.set("eval.folds", m.to_string());
    }
    Ok(c)
}

fn run(cli: Cli) -> CliResult<String> {
    let file = cli
        .global
        .config
        .as_deref()
        .map(settings::load_file)
        .transpose()?;
    let cfg = RunConfig::resolve(file, &overrides(&cli.global)?)?;
    let out = cfg.out.clone();
    let mut s = Session::new(cfg);
    match cli.command {
        Command::Ingest => s.ingest(&out),
        Command::Preprocess => s.preprocess(&out),
        Command::Dtm => s.dtm_cmd(&out),
        Command::Dist => s.dist(&out),
        Command::Linkage => s.linkage(&out),
        Command::Corr => s.corr(&out),
        Command::Train(a) => s.train(&out, a.model.parse()?),
        Command::Eval(a) => {
            let kinds = if a.model == "all" {
                s.cfg.models.clone()
            } else {
                vec![a.model.parse::<ModelKind>()?]
            };
            s.eval(&out, &kinds)
        }
        Command::Report => s.report(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.global.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(summary) => {
            println!("{}", summary.trim_end());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("textmine: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
