//! Cross-validation, grid search, and confusion matrices.

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::classify::{LabeledDataset, Model, ModelKind, Params, Prediction};
use crate::distance::{AxisLabels, Heatmap, Measure};
use crate::error::{Error, Result};
use crate::io::{csv_field, fmt_f64};
use crate::rng::SeedSource;
use crate::sparse::RowView;

/// Something that classifies a sparse row.
pub trait Predictor {
    fn predict_row(&self, x: RowView<'_, f64>) -> Result<Prediction>;
}

impl Predictor for Model {
    fn predict_row(&self, x: RowView<'_, f64>) -> Result<Prediction> {
        self.classify_row(x)
    }
}

/// Fits a predictor; must be deterministic given the data and seed.
pub trait Trainer: Sync {
    type Output: Predictor;
    fn fit(&self, data: &LabeledDataset, seed: u64) -> Result<Self::Output>;
}

impl Trainer for Params {
    type Output = Model;

    fn fit(&self, data: &LabeledDataset, seed: u64) -> Result<Model> {
        self.train(data, seed)
    }
}

/// Partition of n samples into m folds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldAssignment {
    pub fold_of: Vec<usize>,
    pub m: usize,
    pub seed: u64,
}

impl FoldAssignment {
    pub fn len(&self) -> usize {
        self.fold_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fold_of.is_empty()
    }

    pub fn test_indices(&self, k: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.fold_of[i] == k).collect()
    }

    pub fn train_indices(&self, k: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.fold_of[i] != k).collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.m];
        for &f in &self.fold_of {
            s[f] += 1;
        }
        s
    }

    /// `doc_index,fold`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("doc_index,fold\n");
        for (i, f) in self.fold_of.iter().enumerate() {
            out.push_str(&format!("{i},{f}\n"));
        }
        out
    }
}

fn check_folds(n: usize, m: usize) -> Result<()> {
    if m < 2 || m > n {
        return Err(Error::TooManyFolds { n, m });
    }
    Ok(())
}

fn round_robin(order: &[usize], n: usize, m: usize, seed: u64) -> FoldAssignment {
    let mut fold_of = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        fold_of[i] = pos % m;
    }
    FoldAssignment { fold_of, m, seed }
}

/// Seeded shuffle, then round-robin.
pub fn make_folds(n: usize, m: usize, seed: u64) -> Result<FoldAssignment> {
    check_folds(n, m)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut SeedSource::new(seed).stream("folds", 0));
    Ok(round_robin(&order, n, m, seed))
}

/// Like [`make_folds`], but deals each class out in turn so every fold gets
/// a near-equal share of each class.
pub fn make_folds_stratified(labels: &[usize], m: usize, seed: u64) -> Result<FoldAssignment> {
    let n = labels.len();
    check_folds(n, m)?;
    let n_classes = labels.iter().max().map_or(0, |&l| l + 1);
    let mut order = Vec::with_capacity(n);
    let src = SeedSource::new(seed);
    for t in 0..n_classes {
        let mut group: Vec<usize> = (0..n).filter(|&i| labels[i] == t).collect();
        group.shuffle(&mut src.stream("folds-stratified", t as u64));
        order.extend(group);
    }
    Ok(round_robin(&order, n, m, seed))
}

/// Counts of (true, predicted) class pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub classes: Vec<String>,
    counts: Vec<u64>,
}

/// One-vs-rest tallies for a single class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BinaryCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl BinaryCounts {
    /// (TP + TN) / (TP + TN + FP + FN)
    pub fn accuracy(&self) -> f64 {
        let total = self.tp + self.tn + self.fp + self.fn_;
        if total == 0 {
            0.0
        } else {
            (self.tp + self.tn) as f64 / total as f64
        }
    }
}

impl ConfusionMatrix {
    pub fn new(classes: Vec<String>) -> Self {
        let t = classes.len();
        ConfusionMatrix {
            classes,
            counts: vec![0; t * t],
        }
    }

    pub fn from_counts(classes: Vec<String>, counts: Vec<u64>) -> Result<Self> {
        let t = classes.len();
        if counts.len() != t * t {
            return Err(Error::LengthMismatch {
                left: t * t,
                right: counts.len(),
            });
        }
        Ok(ConfusionMatrix { classes, counts })
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn add(&mut self, truth: usize, predicted: usize) {
        let t = self.n_classes();
        self.counts[truth * t + predicted] += 1;
    }

    pub fn get(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth * self.n_classes() + predicted]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.n_classes()).map(|t| self.get(t, t)).sum()
    }

    pub fn support(&self) -> Vec<u64> {
        (0..self.n_classes())
            .map(|t| (0..self.n_classes()).map(|p| self.get(t, p)).sum())
            .collect()
    }

    pub fn one_vs_rest(&self, class: usize) -> BinaryCounts {
        let t = self.n_classes();
        let tp = self.get(class, class);
        let row: u64 = (0..t).map(|p| self.get(class, p)).sum();
        let col: u64 = (0..t).map(|y| self.get(y, class)).sum();
        BinaryCounts {
            tp,
            fn_: row - tp,
            fp: col - tp,
            tn: self.total() - row - col + tp,
        }
    }

    /// `true\predicted` header of class names, one row per true class.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("true\\predicted");
        for c in &self.classes {
            out.push(',');
            out.push_str(&csv_field(c));
        }
        out.push('\n');
        for (y, c) in self.classes.iter().enumerate() {
            out.push_str(&csv_field(c));
            for p in 0..self.n_classes() {
                out.push_str(&format!(",{}", self.get(y, p)));
            }
            out.push('\n');
        }
        out
    }

    /// Per class: `class,tp,fp,fn,tn,one_vs_rest_accuracy`, then an `all`
    /// row with the multiclass accuracy.
    pub fn per_class_csv(&self) -> String {
        let mut out = String::from("class,tp,fp,fn,tn,one_vs_rest_accuracy\n");
        for (t, c) in self.classes.iter().enumerate() {
            let b = self.one_vs_rest(t);
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                csv_field(c),
                b.tp,
                b.fp,
                b.fn_,
                b.tn,
                fmt_f64(b.accuracy())
            ));
        }
        out.push_str(&format!("all,,,,,{}\n", fmt_f64(accuracy(self))));
        out
    }

    pub fn heatmap(&self, title: &str) -> Heatmap {
        Heatmap {
            title: title.to_string(),
            n_rows: self.n_classes(),
            n_cols: self.n_classes(),
            values: self.counts.iter().map(|&c| c as f64).collect(),
            row_labels: AxisLabels::Each(self.classes.clone()),
            col_labels: AxisLabels::Each(self.classes.clone()),
        }
    }
}

/// Multiclass accuracy: trace over total. An empty matrix scores 0.
pub fn accuracy(cm: &ConfusionMatrix) -> f64 {
    let total = cm.total();
    if total == 0 {
        0.0
    } else {
        cm.trace() as f64 / total as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CvResult {
    pub fold_accuracy: Vec<f64>,
    /// Unweighted mean of the per-fold accuracies.
    pub mean_accuracy: f64,
    /// Accuracy of the pooled out-of-fold predictions: 1 - CV error under
    /// 0-1 loss.
    pub pooled_accuracy: f64,
    pub confusion: ConfusionMatrix,
    /// Out-of-fold prediction for every sample, in sample order.
    pub predictions: Vec<Prediction>,
}

/// Seed handed to the trainer for fold `k`.
pub fn fold_seed(seed: u64, k: usize) -> u64 {
    SeedSource::new(seed).child("cv-fold", k as u64).seed()
}

/// Trains on all folds but one and predicts the held-out fold, for every
/// fold.
pub fn cross_validate<T: Trainer>(
    trainer: &T,
    data: &LabeledDataset,
    folds: &FoldAssignment,
) -> Result<CvResult> {
    if folds.len() != data.len() {
        return Err(Error::DimensionMismatch {
            expected: data.len(),
            got: folds.len(),
        });
    }
    let per_fold: Vec<Result<Vec<(usize, Prediction)>>> = (0..folds.m)
        .into_par_iter()
        .map(|k| {
            let train = data.subset(&folds.train_indices(k));
            let distinct = train.class_counts().iter().filter(|&&c| c > 0).count();
            if distinct < 2 {
                log::warn!("fold {k}: training data has a single class");
            }
            let model = trainer.fit(&train, fold_seed(folds.seed, k))?;
            folds
                .test_indices(k)
                .into_iter()
                .map(|i| Ok((i, model.predict_row(data.features.row(i))?)))
                .collect()
        })
        .collect();
    let mut predictions: Vec<Option<Prediction>> = vec![None; data.len()];
    let mut confusion = ConfusionMatrix::new(data.classes.clone());
    let mut fold_accuracy = Vec::with_capacity(folds.m);
    for fold in per_fold {
        let fold = fold?;
        let correct = fold.iter().filter(|(i, p)| p.label == data.labels[*i]).count();
        fold_accuracy.push(correct as f64 / fold.len() as f64);
        for (i, p) in fold {
            confusion.add(data.labels[i], p.label);
            predictions[i] = Some(p);
        }
    }
    let predictions: Vec<Prediction> = predictions
        .into_iter()
        .map(|p| p.expect("every sample is in exactly one fold"))
        .collect();
    Ok(CvResult {
        mean_accuracy: fold_accuracy.iter().sum::<f64>() / fold_accuracy.len() as f64,
        pooled_accuracy: accuracy(&confusion),
        fold_accuracy,
        confusion,
        predictions,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSearchResult {
    pub points: Vec<Params>,
    /// `None` for points whose hyperparameters do not fit the data (for
    /// example k larger than a training fold).
    pub cv: Vec<Option<CvResult>>,
    pub best_index: usize,
    pub best_model: Model,
}

impl GridSearchResult {
    pub fn best(&self) -> &CvResult {
        self.cv[self.best_index]
            .as_ref()
            .expect("best point was evaluated")
    }

    pub fn best_params(&self) -> &Params {
        &self.points[self.best_index]
    }

    /// `point,params,cv_accuracy,mean_fold_accuracy`; skipped points have
    /// empty accuracy fields.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("point,params,cv_accuracy,mean_fold_accuracy\n");
        for (i, (p, cv)) in self.points.iter().zip(&self.cv).enumerate() {
            let (a, b) = cv.as_ref().map_or((String::new(), String::new()), |c| {
                (fmt_f64(c.pooled_accuracy), fmt_f64(c.mean_accuracy))
            });
            out.push_str(&format!("{i},{},{a},{b}\n", csv_field(&p.to_string())));
        }
        out
    }
}

/// Cross-validates every point on the same folds, keeps the first point
/// with the highest pooled accuracy, and retrains it on all of `data`.
pub fn grid_search(
    grid: &[Params],
    data: &LabeledDataset,
    folds: &FoldAssignment,
) -> Result<GridSearchResult> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut cv = Vec::with_capacity(grid.len());
    for p in grid {
        match cross_validate(p, data, folds) {
            Ok(r) => cv.push(Some(r)),
            Err(Error::InvalidHyperparameter(msg)) => {
                log::warn!("skipping {} {p}: {msg}", p.kind());
                cv.push(None);
            }
            Err(e) => return Err(e),
        }
    }
    let mut best: Option<usize> = None;
    for (i, r) in cv.iter().enumerate() {
        if let Some(r) = r {
            if best.is_none_or(|b| r.pooled_accuracy > cv[b].as_ref().unwrap().pooled_accuracy) {
                best = Some(i);
            }
        }
    }
    let best_index =
        best.ok_or_else(|| Error::InvalidHyperparameter("no grid point is feasible for this data".into()))?;
    let best_model = grid[best_index].train(data, folds.seed)?;
    Ok(GridSearchResult {
        points: grid.to_vec(),
        cv,
        best_index,
        best_model,
    })
}

/// Hyperparameter grids for the four classifiers.
#[derive(Clone, Debug, PartialEq)]
pub struct Grids {
    pub mnb: Vec<Params>,
    pub knn: Vec<Params>,
    pub svm: Vec<Params>,
    pub rf: Vec<Params>,
}

impl Grids {
    pub fn for_kind(&self, kind: ModelKind) -> &[Params] {
        match kind {
            ModelKind::Mnb => &self.mnb,
            ModelKind::Knn => &self.knn,
            ModelKind::Svm => &self.svm,
            ModelKind::Rf => &self.rf,
        }
    }

    pub fn mnb(alphas: &[f64]) -> Vec<Params> {
        alphas.iter().map(|&alpha| Params::Mnb { alpha }).collect()
    }

    pub fn knn(ks: &[usize], measure: Measure) -> Vec<Params> {
        ks.iter().map(|&k| Params::Knn { k, measure }).collect()
    }

    pub fn svm(lambdas: &[f64], epochs: &[usize]) -> Vec<Params> {
        lambdas
            .iter()
            .flat_map(|&lambda| epochs.iter().map(move |&epochs| Params::Svm { lambda, epochs }))
            .collect()
    }

    pub fn rf(trees: &[usize], depths: &[Option<usize>], mtry: &[Option<usize>]) -> Vec<Params> {
        let mut out = Vec::new();
        for &n_trees in trees {
            for &max_depth in depths {
                for &m in mtry {
                    out.push(Params::Rf {
                        n_trees,
                        max_depth,
                        mtry: m,
                    });
                }
            }
        }
        out
    }
}

impl Default for Grids {
    fn default() -> Self {
        Grids {
            mnb: Grids::mnb(&[0.1, 0.5, 1.0, 2.0]),
            knn: Grids::knn(&[1, 3, 5, 7, 11, 21], Measure::Euclidean),
            svm: Grids::svm(&[1e-4, 1e-3, 1e-2, 1e-1], &[20, 50]),
            rf: Grids::rf(&[50, 200], &[None, Some(20)], &[None]),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkRow {
    pub kind: ModelKind,
    pub search: GridSearchResult,
}

impl BenchmarkRow {
    pub fn cv_accuracy(&self) -> f64 {
        self.search.best().pooled_accuracy
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Benchmark {
    pub rows: Vec<BenchmarkRow>,
    pub folds: FoldAssignment,
}

impl Benchmark {
    /// `model,best_params,cv_accuracy`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,best_params,cv_accuracy\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{}\n",
                r.kind,
                csv_field(&r.search.best_params().to_string()),
                fmt_f64(r.cv_accuracy())
            ));
        }
        out
    }

    /// `model,fold,accuracy` for the best point of each model, plus a
    /// `mean` row per model.
    pub fn folds_csv(&self) -> String {
        let mut out = String::from("model,fold,accuracy\n");
        for r in &self.rows {
            let best = r.search.best();
            for (k, a) in best.fold_accuracy.iter().enumerate() {
                out.push_str(&format!("{},{k},{}\n", r.kind, fmt_f64(*a)));
            }
            out.push_str(&format!("{},mean,{}\n", r.kind, fmt_f64(best.mean_accuracy)));
        }
        out
    }

    pub fn row(&self, kind: ModelKind) -> Option<&BenchmarkRow> {
        self.rows.iter().find(|r| r.kind == kind)
    }
}

/// Grid-searches the given models on one shared fold assignment. MNB always
/// sees `counts`; the others see `features`.
pub fn benchmark_all(
    counts: &LabeledDataset,
    features: &LabeledDataset,
    folds: &FoldAssignment,
    grids: &Grids,
    kinds: &[ModelKind],
) -> Result<Benchmark> {
    if counts.labels != features.labels {
        return Err(Error::InvalidCorpus(
            "count and feature datasets disagree on labels".into(),
        ));
    }
    let mut rows = Vec::with_capacity(kinds.len());
    for &kind in kinds {
        let data = if kind == ModelKind::Mnb { counts } else { features };
        log::info!("grid search: {kind}");
        let search = grid_search(grids.for_kind(kind), data, folds)?;
        rows.push(BenchmarkRow { kind, search });
    }
    Ok(Benchmark {
        rows,
        folds: folds.clone(),
    })
}
