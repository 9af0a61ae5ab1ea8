use super::{LabeledDataset, Prediction};
use crate::distance::{sparse_distance, squared_norm, Measure};
use crate::error::{Error, Result};
use crate::sparse::{Csr, RowView};

/// k-nearest-neighbor classifier; stores its training rows.
#[derive(Clone, Debug, PartialEq)]
pub struct KnnModel {
    pub k: usize,
    pub measure: Measure,
    pub features: Csr<f64>,
    pub labels: Vec<usize>,
    pub n_classes: usize,
    norms: Vec<f64>,
}

impl KnnModel {
    pub(crate) fn from_parts(
        k: usize,
        measure: Measure,
        features: Csr<f64>,
        labels: Vec<usize>,
        n_classes: usize,
    ) -> Result<Self> {
        if k == 0 || k > features.n_rows() {
            return Err(Error::InvalidHyperparameter(format!(
                "k = {k} with {} training rows",
                features.n_rows()
            )));
        }
        let norms = features.rows().map(squared_norm).collect();
        Ok(KnnModel {
            k,
            measure,
            features,
            labels,
            n_classes,
            norms,
        })
    }

    pub fn n_features(&self) -> usize {
        self.features.n_cols()
    }

    /// Indices of the k nearest training rows; equal distances keep row
    /// order.
    pub fn neighbors(&self, x: RowView<'_, f64>) -> Result<Vec<usize>> {
        let nx = squared_norm(x);
        let mut dist = Vec::with_capacity(self.labels.len());
        for (i, row) in self.features.rows().enumerate() {
            dist.push((sparse_distance(self.measure, x, row, (nx, self.norms[i]))?, i));
        }
        dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        Ok(dist.into_iter().take(self.k).map(|(_, i)| i).collect())
    }

    /// Scores are vote fractions among the k neighbors.
    pub fn predict(&self, x: RowView<'_, f64>) -> Result<Prediction> {
        let mut votes = vec![0.0; self.n_classes];
        for i in self.neighbors(x)? {
            votes[self.labels[i]] += 1.0;
        }
        let k = self.k as f64;
        Ok(Prediction::from_scores(
            votes.into_iter().map(|v| v / k).collect(),
        ))
    }
}

pub fn train_knn(data: &LabeledDataset, k: usize, measure: Measure) -> Result<KnnModel> {
    if data.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    KnnModel::from_parts(
        k,
        measure,
        data.features.clone(),
        data.labels.clone(),
        data.n_classes(),
    )
}
