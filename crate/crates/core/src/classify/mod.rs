//! Chapter classifiers predicting the book a chapter belongs to.

mod forest;
mod knn;
mod mnb;
mod model_io;
mod svm;

use std::fmt;

pub use forest::{train_rf, train_rf_with, DecisionTree, RfConfig, RfModel, TreeNode};
pub use knn::{train_knn, KnnModel};
pub use mnb::{train_mnb, MnbModel};
pub use svm::{train_svm, SvmModel};

use crate::distance::Measure;
use crate::dtm::{DocTermMatrix, Vocabulary, WeightMatrix};
use crate::error::{Error, Result};
use crate::io::{csv_field, fmt_f64};
use crate::sparse::{Csr, RowView};

/// Feature rows with their book labels.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    pub features: Csr<f64>,
    pub labels: Vec<usize>,
    pub classes: Vec<String>,
    pub vocab: Vocabulary,
    pub row_names: Vec<String>,
}

impl LabeledDataset {
    pub fn new(
        features: Csr<f64>,
        labels: Vec<usize>,
        classes: Vec<String>,
        vocab: Vocabulary,
        row_names: Vec<String>,
    ) -> Result<Self> {
        let n = features.n_rows();
        if labels.len() != n || row_names.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: labels.len().min(row_names.len()),
            });
        }
        if vocab.len() != features.n_cols() {
            return Err(Error::DimensionMismatch {
                expected: features.n_cols(),
                got: vocab.len(),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= classes.len()) {
            return Err(Error::InvalidCorpus(format!(
                "label {bad} outside 0..{}",
                classes.len()
            )));
        }
        Ok(LabeledDataset {
            features,
            labels,
            classes,
            vocab,
            row_names,
        })
    }

    pub fn from_counts(dtm: &DocTermMatrix) -> Self {
        Self::from_weights(&dtm.as_weights())
    }

    pub fn from_weights(w: &WeightMatrix) -> Self {
        LabeledDataset {
            features: w.weights.clone(),
            labels: w.labels(),
            classes: w.books.iter().map(|b| b.name.clone()).collect(),
            vocab: w.vocab.clone(),
            row_names: w.row_names(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.features.n_cols()
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    /// Rows `idx` in the given order, keeping the full class list.
    pub fn subset(&self, idx: &[usize]) -> LabeledDataset {
        LabeledDataset {
            features: self.features.select_rows(idx),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            classes: self.classes.clone(),
            vocab: self.vocab.clone(),
            row_names: idx.iter().map(|&i| self.row_names[i].clone()).collect(),
        }
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut out = vec![0; self.n_classes()];
        for &l in &self.labels {
            out[l] += 1;
        }
        out
    }
}

/// A predicted label with one score per class. The label is the first
/// class attaining the highest score.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub label: usize,
    pub scores: Vec<f64>,
}

impl Prediction {
    pub(crate) fn from_scores(scores: Vec<f64>) -> Self {
        Prediction {
            label: argmax(&scores),
            scores,
        }
    }
}

/// Index of the first maximum; NaN never wins.
pub(crate) fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] || xs[best].is_nan() {
            best = i;
        }
    }
    best
}

/// Hyperparameters of one classifier configuration.
#[derive(Clone, Debug, PartialEq)]
pub enum Params {
    Mnb {
        alpha: f64,
    },
    Knn {
        k: usize,
        measure: Measure,
    },
    Svm {
        lambda: f64,
        epochs: usize,
    },
    Rf {
        n_trees: usize,
        max_depth: Option<usize>,
        mtry: Option<usize>,
    },
}

impl Params {
    pub fn kind(&self) -> ModelKind {
        match self {
            Params::Mnb { .. } => ModelKind::Mnb,
            Params::Knn { .. } => ModelKind::Knn,
            Params::Svm { .. } => ModelKind::Svm,
            Params::Rf { .. } => ModelKind::Rf,
        }
    }

    pub fn train(&self, data: &LabeledDataset, seed: u64) -> Result<Model> {
        Ok(match *self {
            Params::Mnb { alpha } => Model::Mnb(train_mnb(data, alpha)?),
            Params::Knn { k, measure } => Model::Knn(train_knn(data, k, measure)?),
            Params::Svm { lambda, epochs } => Model::Svm(train_svm(data, lambda, epochs, seed)?),
            Params::Rf {
                n_trees,
                max_depth,
                mtry,
            } => Model::Rf(train_rf(data, n_trees, max_depth, mtry, seed)?),
        })
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Params::Mnb { alpha } => write!(f, "alpha={alpha}"),
            Params::Knn { k, measure } => write!(f, "k={k} measure={measure}"),
            Params::Svm { lambda, epochs } => write!(f, "lambda={lambda} epochs={epochs}"),
            Params::Rf {
                n_trees,
                max_depth,
                mtry,
            } => {
                write!(f, "trees={n_trees} depth=")?;
                match max_depth {
                    Some(d) => write!(f, "{d}")?,
                    None => f.write_str("inf")?,
                }
                f.write_str(" mtry=")?;
                match mtry {
                    Some(m) => write!(f, "{m}"),
                    None => f.write_str("sqrt"),
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Mnb,
    Knn,
    Svm,
    Rf,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Mnb, ModelKind::Svm, ModelKind::Rf, ModelKind::Knn];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Mnb => "mnb",
            ModelKind::Knn => "knn",
            ModelKind::Svm => "svm",
            ModelKind::Rf => "rf",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown model `{s}`")))
    }
}

/// A trained classifier.
#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Mnb(MnbModel),
    Knn(KnnModel),
    Svm(SvmModel),
    Rf(RfModel),
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Mnb(_) => ModelKind::Mnb,
            Model::Knn(_) => ModelKind::Knn,
            Model::Svm(_) => ModelKind::Svm,
            Model::Rf(_) => ModelKind::Rf,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            Model::Mnb(m) => m.n_features(),
            Model::Knn(m) => m.n_features(),
            Model::Svm(m) => m.n_features(),
            Model::Rf(m) => m.n_features,
        }
    }

    pub fn n_classes(&self) -> usize {
        match self {
            Model::Mnb(m) => m.log_priors.len(),
            Model::Knn(m) => m.n_classes,
            Model::Svm(m) => m.biases.len(),
            Model::Rf(m) => m.n_classes,
        }
    }

    /// Classifies one sparse feature row.
    pub fn classify_row(&self, x: RowView<'_, f64>) -> Result<Prediction> {
        if let Some(&j) = x.indices.last() {
            if j >= self.n_features() {
                return Err(Error::DimensionMismatch {
                    expected: self.n_features(),
                    got: j + 1,
                });
            }
        }
        match self {
            Model::Mnb(m) => Ok(m.predict(x)),
            Model::Knn(m) => m.predict(x),
            Model::Svm(m) => Ok(m.predict(x)),
            Model::Rf(m) => Ok(m.predict(x)),
        }
    }

    pub fn classify_all(&self, x: &Csr<f64>) -> Result<Vec<Prediction>> {
        x.rows().map(|r| self.classify_row(r)).collect()
    }

    pub fn to_text(&self, classes: &[String]) -> String {
        model_io::write(self, classes)
    }

    /// Parses a model written by [`Model::to_text`], returning the model and
    /// its class names.
    pub fn from_text(s: &str) -> Result<(Model, Vec<String>)> {
        model_io::read(s)
    }
}

/// Classifies a dense feature vector.
pub fn classify(model: &Model, x: &[f64]) -> Result<Prediction> {
    if x.len() != model.n_features() {
        return Err(Error::DimensionMismatch {
            expected: model.n_features(),
            got: x.len(),
        });
    }
    let (indices, values): (Vec<usize>, Vec<f64>) =
        x.iter().copied().enumerate().filter(|&(_, v)| v != 0.0).unzip();
    model.classify_row(RowView {
        indices: &indices,
        values: &values,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Kernel {
    Linear,
    Rbf { gamma: f64 },
}

pub fn kernel(x: &[f64], y: &[f64], kind: Kernel) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(match kind {
        Kernel::Linear => x.iter().zip(y).map(|(a, b)| a * b).sum(),
        Kernel::Rbf { gamma } => {
            let sq: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
            (-gamma * sq).exp()
        }
    })
}

/// CSV of per-document predictions:
/// `doc_label,true,predicted,score_0..score_{T-1}`.
pub fn scores_csv(
    row_names: &[String],
    classes: &[String],
    truth: &[usize],
    predictions: &[Prediction],
) -> String {
    let mut out = String::from("doc_label,true,predicted");
    for t in 0..classes.len() {
        out.push_str(&format!(",score_{t}"));
    }
    out.push('\n');
    for ((name, &y), p) in row_names.iter().zip(truth).zip(predictions) {
        out.push_str(&csv_field(name));
        out.push(',');
        out.push_str(&csv_field(&classes[y]));
        out.push(',');
        out.push_str(&csv_field(&classes[p.label]));
        for s in &p.scores {
            out.push(',');
            out.push_str(&fmt_f64(*s));
        }
        out.push('\n');
    }
    out
}
