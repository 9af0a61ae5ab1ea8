use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::{LabeledDataset, Prediction};
use crate::error::{Error, Result};
use crate::rng::SeedSource;
use crate::sparse::{Csr, RowView};

/// Linear one-vs-rest SVM. Class t scores a row by `w_t . x - b_t`.
#[derive(Clone, Debug, PartialEq)]
pub struct SvmModel {
    /// T rows of p weights, row-major.
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
    pub lambda: f64,
    pub epochs: usize,
    /// Per class: the objective at w = 0 followed by the objective of the
    /// averaged iterate at the end of each epoch.
    pub traces: Vec<Vec<f64>>,
}

impl SvmModel {
    pub fn n_features(&self) -> usize {
        self.weights.len() / self.biases.len().max(1)
    }

    pub fn class_weights(&self, t: usize) -> &[f64] {
        let p = self.n_features();
        &self.weights[t * p..(t + 1) * p]
    }

    pub fn margins(&self, x: RowView<'_, f64>) -> Vec<f64> {
        (0..self.biases.len())
            .map(|t| {
                let w = self.class_weights(t);
                x.iter().map(|(j, v)| w[j] * v).sum::<f64>() - self.biases[t]
            })
            .collect()
    }

    pub fn predict(&self, x: RowView<'_, f64>) -> Prediction {
        Prediction::from_scores(self.margins(x))
    }
}

/// Hinge objective `mean(max(0, 1 - y (w.x - b))) + lambda (|w|^2 + b^2)`.
pub fn svm_objective(x: &Csr<f64>, y: &[f64], w: &[f64], b: f64, lambda: f64) -> f64 {
    let hinge: f64 = x
        .rows()
        .zip(y)
        .map(|(r, &yi)| {
            let f: f64 = r.iter().map(|(j, v)| w[j] * v).sum::<f64>() - b;
            (1.0 - yi * f).max(0.0)
        })
        .sum();
    let reg = w.iter().map(|v| v * v).sum::<f64>() + b * b;
    hinge / y.len() as f64 + lambda * reg
}

fn cmp_rows(a: RowView<'_, f64>, b: RowView<'_, f64>) -> Ordering {
    a.indices.cmp(b.indices).then_with(|| {
        a.values
            .iter()
            .zip(b.values)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

/// Training order that depends on row content only, so permuting the
/// input does not change the model.
fn canonical_order(data: &LabeledDataset) -> Vec<usize> {
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.sort_by(|&a, &b| {
        data.labels[a]
            .cmp(&data.labels[b])
            .then_with(|| cmp_rows(data.features.row(a), data.features.row(b)))
    });
    order
}

/// Weight vector stored as `scale * v`, with a weighted running sum of the
/// iterates kept lazily: each coordinate's sum is brought up to date only
/// when that coordinate changes.
struct ScaledIterate {
    v: Vec<f64>,
    scale: f64,
    sqnorm: f64,
    acc: Vec<f64>,
    cum_at: Vec<f64>,
    cum: f64,
}

impl ScaledIterate {
    fn new(dim: usize) -> Self {
        ScaledIterate {
            v: vec![0.0; dim],
            scale: 1.0,
            sqnorm: 0.0,
            acc: vec![0.0; dim],
            cum_at: vec![0.0; dim],
            cum: 0.0,
        }
    }

    fn touch(&mut self, j: usize) {
        self.acc[j] += self.v[j] * (self.cum - self.cum_at[j]);
        self.cum_at[j] = self.cum;
    }

    fn add(&mut self, j: usize, delta: f64) {
        self.touch(j);
        let old = self.v[j];
        let new = old + delta / self.scale;
        self.sqnorm += new * new - old * old;
        self.v[j] = new;
    }

    fn flush(&mut self) {
        for j in 0..self.v.len() {
            self.touch(j);
        }
    }

    // Rescales v when the scale drifts far from 1, and restarts the running
    // scale sum once it dwarfs the current scale; both bound the rounding
    // in `cum - cum_at`.
    fn end_step(&mut self, weight: f64) {
        self.cum += weight * self.scale;
        let rescale = !(1e-8..=1e8).contains(&self.scale);
        if rescale || self.cum > 1e4 * weight * self.scale {
            self.flush();
            self.cum = 0.0;
            self.cum_at.iter_mut().for_each(|c| *c = 0.0);
        }
        if rescale {
            for x in &mut self.v {
                *x *= self.scale;
            }
            self.sqnorm = self.v.iter().map(|x| x * x).sum();
            self.scale = 1.0;
        }
    }

    /// Weighted sum of every iterate so far, divided by `total_weight`.
    fn average(&mut self, total_weight: f64) -> Vec<f64> {
        self.flush();
        self.acc.iter().map(|a| a / total_weight).collect()
    }
}

/// Weights, bias and objective trace of one one-vs-rest problem.
type BinaryFit = (Vec<f64>, f64, Vec<f64>);

/// One binary problem. Iterate t enters the average with weight t. Returns
/// (w, b, trace) for the best averaged iterate, counting w = 0 as a
/// candidate.
fn train_binary(
    x: &Csr<f64>,
    y: &[f64],
    base_order: &[usize],
    lambda: f64,
    epochs: usize,
    seeds: &SeedSource,
) -> Result<BinaryFit> {
    let p = x.n_cols();
    let radius = 1.0 / lambda.sqrt();
    let mut it = ScaledIterate::new(p + 1);
    let mut rng = seeds.stream("svm-order", 0);
    let mut order = base_order.to_vec();
    let mut best = (vec![0.0; p], 0.0, svm_objective(x, y, &vec![0.0; p], 0.0, lambda));
    let mut trace = vec![best.2];
    let mut t = 0usize;
    for epoch in 1..=epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let row = x.row(i);
            let f = it.scale * (row.iter().map(|(j, v)| it.v[j] * v).sum::<f64>() - it.v[p]);
            let eta = 1.0 / (2.0 * lambda * t as f64);
            if t > 1 {
                it.scale *= 1.0 - 1.0 / t as f64;
            }
            if y[i] * f < 1.0 {
                let g = eta * y[i];
                for (j, v) in row.iter() {
                    it.add(j, g * v);
                }
                it.add(p, -g);
            }
            let norm = it.scale * it.sqnorm.max(0.0).sqrt();
            if norm > radius {
                it.scale *= radius / norm;
            }
            it.end_step(t as f64);
        }
        let mut avg = it.average(t as f64 * (t as f64 + 1.0) / 2.0);
        let b = avg.pop().unwrap_or(0.0);
        let obj = svm_objective(x, y, &avg, b, lambda);
        if !obj.is_finite() {
            return Err(Error::NonFiniteObjective(epoch));
        }
        trace.push(obj);
        if obj < best.2 {
            best = (avg, b, obj);
        }
    }
    Ok((best.0, best.1, trace))
}

/// Trains one binary problem per class by stochastic subgradient descent on
/// the hinge objective, with steps `1 / (2 lambda t)` and a seeded
/// per-epoch shuffle.
pub fn train_svm(data: &LabeledDataset, lambda: f64, epochs: usize, seed: u64) -> Result<SvmModel> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidHyperparameter(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    if epochs == 0 {
        return Err(Error::InvalidHyperparameter("epochs must be at least 1".into()));
    }
    if data.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let order = canonical_order(data);
    let root = SeedSource::new(seed);
    let per_class: Vec<Result<BinaryFit>> = (0..data.n_classes())
        .into_par_iter()
        .map(|t| {
            let y: Vec<f64> = data
                .labels
                .iter()
                .map(|&l| if l == t { 1.0 } else { -1.0 })
                .collect();
            train_binary(
                &data.features,
                &y,
                &order,
                lambda,
                epochs,
                &root.child("svm-class", t as u64),
            )
        })
        .collect();
    let mut model = SvmModel {
        weights: Vec::with_capacity(data.n_classes() * data.n_features()),
        biases: Vec::new(),
        lambda,
        epochs,
        traces: Vec::new(),
    };
    for r in per_class {
        let (w, b, trace) = r?;
        model.weights.extend(w);
        model.biases.push(b);
        model.traces.push(trace);
    }
    Ok(model)
}
