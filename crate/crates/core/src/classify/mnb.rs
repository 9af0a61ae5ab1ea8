use super::{LabeledDataset, Prediction};
use crate::error::{Error, Result};
use crate::sparse::RowView;

/// Multinomial naive Bayes with additive smoothing.
#[derive(Clone, Debug, PartialEq)]
pub struct MnbModel {
    pub log_priors: Vec<f64>,
    /// T rows of p log term probabilities, row-major.
    pub log_likelihoods: Vec<f64>,
    pub alpha: f64,
}

impl MnbModel {
    pub fn n_features(&self) -> usize {
        self.log_likelihoods.len() / self.log_priors.len().max(1)
    }

    pub fn class_log_likelihoods(&self, t: usize) -> &[f64] {
        let p = self.n_features();
        &self.log_likelihoods[t * p..(t + 1) * p]
    }

    /// Unnormalized log posterior per class.
    pub fn joint_log_likelihood(&self, x: RowView<'_, f64>) -> Vec<f64> {
        (0..self.log_priors.len())
            .map(|t| {
                let ll = self.class_log_likelihoods(t);
                let prior = self.log_priors[t];
                if prior == f64::NEG_INFINITY {
                    return prior;
                }
                prior + x.iter().map(|(j, v)| v * ll[j]).sum::<f64>()
            })
            .collect()
    }

    /// Posterior probabilities; scores sum to 1.
    pub fn predict(&self, x: RowView<'_, f64>) -> Prediction {
        let jll = self.joint_log_likelihood(x);
        let max = jll.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exp: Vec<f64> = jll.iter().map(|&s| (s - max).exp()).collect();
        let z: f64 = exp.iter().sum();
        Prediction::from_scores(exp.into_iter().map(|e| e / z).collect())
    }
}

/// Classes with no training rows get a log prior of -inf and are never
/// predicted.
pub fn train_mnb(data: &LabeledDataset, alpha: f64) -> Result<MnbModel> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidHyperparameter(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if data.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let (t_count, p) = (data.n_classes(), data.n_features());
    let mut counts = vec![0.0; t_count * p];
    for (row, &y) in data.features.rows().zip(&data.labels) {
        for (j, v) in row.iter() {
            counts[y * p + j] += v;
        }
    }
    let n = data.len() as f64;
    let log_priors = data
        .class_counts()
        .into_iter()
        .map(|c| (c as f64 / n).ln())
        .collect();
    let mut log_likelihoods = Vec::with_capacity(t_count * p);
    for t in 0..t_count {
        let row = &counts[t * p..(t + 1) * p];
        let denom = (row.iter().sum::<f64>() + alpha * p as f64).ln();
        log_likelihoods.extend(row.iter().map(|c| (c + alpha).ln() - denom));
    }
    Ok(MnbModel {
        log_priors,
        log_likelihoods,
        alpha,
    })
}
