//! Run configuration: defaults, then the config file, then flags.

use std::path::{Path, PathBuf};

use textmine::classify::ModelKind;
use textmine::config::FlatConfig;
use textmine::distance::{CorrelationMethod, Linkage, Measure};
use textmine::evaluate::Grids;
use textmine::preprocess::{PreprocessConfig, StopwordSet};

use crate::error::{CliError, CliResult};

pub const KEYS: &[&str] = &[
    "corpus.manifest",
    "run.seed",
    "run.out",
    "preprocess.stopwords",
    "preprocess.lowercase",
    "preprocess.remove_noise",
    "preprocess.stem",
    "preprocess.pos",
    "report.top_k",
    "features.mode",
    "distance.measures",
    "distance.linkages",
    "distance.correlation",
    "distance.metric_samples",
    "eval.folds",
    "eval.stratified",
    "eval.models",
    "grid.mnb.alpha",
    "grid.knn.k",
    "grid.knn.measure",
    "grid.svm.lambda",
    "grid.svm.epochs",
    "grid.rf.trees",
    "grid.rf.depth",
    "grid.rf.mtry",
];

/// Keys whose values are paths, resolved against the config file's folder.
const PATH_KEYS: &[&str] = &["corpus.manifest", "preprocess.stopwords", "run.out"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeatureMode {
    Counts,
    Tfidf,
}

impl FeatureMode {
    pub fn name(self) -> &'static str {
        match self {
            FeatureMode::Counts => "counts",
            FeatureMode::Tfidf => "tfidf",
        }
    }
}

impl std::str::FromStr for FeatureMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "counts" => Ok(FeatureMode::Counts),
            "tfidf" => Ok(FeatureMode::Tfidf),
            _ => Err(format!("unknown feature mode `{s}`")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub manifest: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub preprocess: PreprocessConfig,
    pub pos: bool,
    pub top_k: usize,
    pub features: FeatureMode,
    pub measures: Vec<Measure>,
    pub linkages: Vec<Linkage>,
    pub correlation: CorrelationMethod,
    pub metric_samples: usize,
    pub folds: usize,
    pub stratified: bool,
    pub models: Vec<ModelKind>,
    pub grids: Grids,
    /// Every resolved setting, for fingerprints and the report.
    pub resolved: FlatConfig,
}

fn cfg_err(e: textmine::Error) -> CliError {
    CliError::Config(match e {
        textmine::Error::Config(m) => m,
        other => other.to_string(),
    })
}

fn list<T: std::str::FromStr>(c: &FlatConfig, key: &str) -> CliResult<Option<Vec<T>>> {
    let v = c.get_list(key).map_err(cfg_err)?;
    if let Some(v) = &v {
        if v.is_empty() {
            return Err(CliError::Config(format!("`{key}` must not be empty")));
        }
    }
    Ok(v)
}

fn parse_depth(s: &str) -> Result<Option<usize>, String> {
    match s {
        "inf" | "none" => Ok(None),
        d => d.parse().map(Some).map_err(|_| format!("bad depth `{d}`")),
    }
}

fn parse_mtry(s: &str) -> Result<Option<usize>, String> {
    match s {
        "sqrt" => Ok(None),
        d => d.parse().map(Some).map_err(|_| format!("bad mtry `{d}`")),
    }
}

fn custom_list<T>(c: &FlatConfig, key: &str, f: fn(&str) -> Result<T, String>) -> CliResult<Option<Vec<T>>> {
    match c.get(key) {
        None => Ok(None),
        Some(v) => {
            let out: Vec<T> = v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(f)
                .collect::<Result<_, _>>()
                .map_err(|m| CliError::Config(format!("`{key}`: {m}")))?;
            if out.is_empty() {
                return Err(CliError::Config(format!("`{key}` must not be empty")));
            }
            Ok(Some(out))
        }
    }
}

/// Reads a config file, resolving relative path values against its folder.
pub fn load_file(path: &Path) -> CliResult<FlatConfig> {
    let mut c = FlatConfig::from_file(path).map_err(cfg_err)?;
    let base = path.parent().unwrap_or(Path::new(""));
    for key in PATH_KEYS {
        if let Some(v) = c.get(key) {
            let p = Path::new(v);
            if p.is_relative() {
                let joined = base.join(p).to_string_lossy().into_owned();
                c.set(key, joined);
            }
        }
    }
    Ok(c)
}

impl RunConfig {
    /// Applies `overrides` on top of `file` and validates the result.
    pub fn resolve(file: Option<FlatConfig>, overrides: &FlatConfig) -> CliResult<RunConfig> {
        let mut c = file.unwrap_or_default();
        for k in overrides.keys() {
            c.set(k, overrides.get(k).unwrap_or_default());
        }
        if let Some(bad) = c.keys().find(|k| !KEYS.contains(k)) {
            return Err(CliError::Config(format!("unknown setting `{bad}`")));
        }
        let get_bool = |k: &str, d: bool| c.get_bool(k).map(|v| v.unwrap_or(d)).map_err(cfg_err);
        let mut preprocess = PreprocessConfig {
            lowercase: get_bool("preprocess.lowercase", true)?,
            remove_noise: get_bool("preprocess.remove_noise", true)?,
            stem: get_bool("preprocess.stem", true)?,
            ..PreprocessConfig::default()
        };
        if let Some(p) = c.get("preprocess.stopwords") {
            let p = Path::new(p);
            if !p.is_file() {
                return Err(CliError::Config(format!(
                    "stopword file {} not found",
                    p.display()
                )));
            }
            preprocess.stopwords = StopwordSet::from_file(p).map_err(cfg_err)?;
        }
        let manifest = c.get("corpus.manifest").map(PathBuf::from);
        if let Some(m) = &manifest {
            if !m.is_file() {
                return Err(CliError::Config(format!("manifest {} not found", m.display())));
            }
        }
        let parsed = |k: &str| -> CliResult<Option<String>> { Ok(c.get(k).map(str::to_string)) };
        let features = match parsed("features.mode")? {
            Some(v) => v.parse().map_err(CliError::Config)?,
            None => FeatureMode::Counts,
        };
        let folds = c.get_parsed("eval.folds").map_err(cfg_err)?.unwrap_or(10);
        if folds < 2 {
            return Err(CliError::Config("eval.folds must be at least 2".into()));
        }
        let top_k = c.get_parsed("report.top_k").map_err(cfg_err)?.unwrap_or(50);
        if top_k == 0 {
            return Err(CliError::Config("report.top_k must be positive".into()));
        }
        let metric_samples = c
            .get_parsed("distance.metric_samples")
            .map_err(cfg_err)?
            .unwrap_or(10_000);
        if metric_samples == 0 {
            return Err(CliError::Config(
                "distance.metric_samples must be positive".into(),
            ));
        }

        let defaults = Grids::default();
        let knn_measure = c
            .get_parsed::<Measure>("grid.knn.measure")
            .map_err(cfg_err)?
            .unwrap_or(Measure::Euclidean);
        let grids = Grids {
            mnb: list::<f64>(&c, "grid.mnb.alpha")?.map_or(defaults.mnb, |a| Grids::mnb(&a)),
            knn: Grids::knn(
                &list::<usize>(&c, "grid.knn.k")?.unwrap_or(vec![1, 3, 5, 7, 11, 21]),
                knn_measure,
            ),
            svm: Grids::svm(
                &list::<f64>(&c, "grid.svm.lambda")?.unwrap_or(vec![1e-4, 1e-3, 1e-2, 1e-1]),
                &list::<usize>(&c, "grid.svm.epochs")?.unwrap_or(vec![20, 50]),
            ),
            rf: Grids::rf(
                &list::<usize>(&c, "grid.rf.trees")?.unwrap_or(vec![50, 200]),
                &custom_list(&c, "grid.rf.depth", parse_depth)?.unwrap_or(vec![None, Some(20)]),
                &custom_list(&c, "grid.rf.mtry", parse_mtry)?.unwrap_or(vec![None]),
            ),
        };

        Ok(RunConfig {
            manifest,
            out: PathBuf::from(c.get("run.out").unwrap_or("out")),
            seed: c.get_parsed("run.seed").map_err(cfg_err)?.unwrap_or(42),
            preprocess,
            pos: get_bool("preprocess.pos", true)?,
            top_k,
            features,
            measures: list(&c, "distance.measures")?.unwrap_or(Measure::ALL.to_vec()),
            linkages: list(&c, "distance.linkages")?.unwrap_or(Linkage::ALL.to_vec()),
            correlation: c
                .get_parsed("distance.correlation")
                .map_err(cfg_err)?
                .unwrap_or_default(),
            metric_samples,
            folds,
            stratified: get_bool("eval.stratified", false)?,
            models: list(&c, "eval.models")?.unwrap_or(ModelKind::ALL.to_vec()),
            grids,
            resolved: c,
        })
    }

    pub fn manifest(&self) -> CliResult<&Path> {
        self.manifest.as_deref().ok_or_else(|| {
            CliError::Config("no corpus manifest given (--manifest or corpus.manifest)".into())
        })
    }
}
