use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{argmax, LabeledDataset, Prediction};
use crate::error::{Error, Result};
use crate::rng::SeedSource;
use crate::sparse::{Csr, RowView};

#[derive(Clone, Debug, PartialEq)]
pub enum TreeNode {
    /// Class distribution of the training weight reaching this leaf.
    Leaf { dist: Vec<f64> },
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecisionTree {
    pub nodes: Vec<TreeNode>,
}

impl DecisionTree {
    pub fn leaf_for(&self, x: RowView<'_, f64>) -> &[f64] {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                TreeNode::Leaf { dist } => return dist,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    let v = x.indices.binary_search(feature).map_or(0.0, |k| x.values[k]);
                    at = if v <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn predict_label(&self, x: RowView<'_, f64>) -> usize {
        argmax(self.leaf_for(x))
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[TreeNode], at: usize) -> usize {
            match &nodes[at] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
            }
        }
        go(&self.nodes, 0)
    }
}

/// Random forest of Gini trees; scores are the fraction of trees voting for
/// each class.
#[derive(Clone, Debug, PartialEq)]
pub struct RfModel {
    pub trees: Vec<DecisionTree>,
    pub max_depth: Option<usize>,
    pub mtry: usize,
    pub bootstrap: bool,
    pub seed: u64,
    pub n_features: usize,
    pub n_classes: usize,
}

impl RfModel {
    pub fn predict(&self, x: RowView<'_, f64>) -> Prediction {
        let mut votes = vec![0.0; self.n_classes];
        for t in &self.trees {
            votes[t.predict_label(x)] += 1.0;
        }
        let n = self.trees.len() as f64;
        Prediction::from_scores(votes.into_iter().map(|v| v / n).collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RfConfig {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    /// Features tried per split; defaults to ceil(sqrt(p)).
    pub mtry: Option<usize>,
    /// Train each tree on a bootstrap sample of size n rather than on every
    /// row once.
    pub bootstrap: bool,
    pub seed: u64,
}

pub fn train_rf(
    data: &LabeledDataset,
    n_trees: usize,
    max_depth: Option<usize>,
    mtry: Option<usize>,
    seed: u64,
) -> Result<RfModel> {
    train_rf_with(
        data,
        &RfConfig {
            n_trees,
            max_depth,
            mtry,
            bootstrap: true,
            seed,
        },
    )
}

pub fn train_rf_with(data: &LabeledDataset, cfg: &RfConfig) -> Result<RfModel> {
    let p = data.n_features();
    if data.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if cfg.n_trees == 0 {
        return Err(Error::InvalidHyperparameter("n_trees must be at least 1".into()));
    }
    let mtry = match cfg.mtry {
        Some(m) if m == 0 || m > p => {
            return Err(Error::InvalidHyperparameter(format!(
                "features_per_split = {m} with {p} features"
            )))
        }
        Some(m) => m,
        None => ((p as f64).sqrt().ceil() as usize).clamp(1, p.max(1)),
    };
    let root = SeedSource::new(cfg.seed);
    let trees = (0..cfg.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = root.stream("rf-tree", t as u64);
            let n = data.len();
            let mut weight = vec![0u32; n];
            if cfg.bootstrap {
                for _ in 0..n {
                    weight[rng.gen_range(0..n)] += 1;
                }
            } else {
                weight.iter_mut().for_each(|w| *w = 1);
            }
            TreeBuilder::new(data, &weight, mtry, cfg.max_depth).build(&mut rng)
        })
        .collect();
    Ok(RfModel {
        trees,
        max_depth: cfg.max_depth,
        mtry,
        bootstrap: cfg.bootstrap,
        seed: cfg.seed,
        n_features: p,
        n_classes: data.n_classes(),
    })
}

struct FeatureStats {
    occurrences: usize,
    min: f64,
    max: f64,
}

struct TreeBuilder<'a> {
    x: &'a Csr<f64>,
    labels: &'a [usize],
    weight: &'a [u32],
    n_classes: usize,
    mtry: usize,
    max_depth: Option<usize>,
    stats: Vec<Option<FeatureStats>>,
    slot: Vec<usize>,
}

impl<'a> TreeBuilder<'a> {
    fn new(data: &'a LabeledDataset, weight: &'a [u32], mtry: usize, max_depth: Option<usize>) -> Self {
        let p = data.n_features();
        TreeBuilder {
            x: &data.features,
            labels: &data.labels,
            weight,
            n_classes: data.n_classes(),
            mtry,
            max_depth,
            stats: (0..p).map(|_| None).collect(),
            slot: vec![usize::MAX; p],
        }
    }

    fn class_weights(&self, samples: &[usize]) -> Vec<f64> {
        let mut c = vec![0.0; self.n_classes];
        for &i in samples {
            c[self.labels[i]] += self.weight[i] as f64;
        }
        c
    }

    fn build(mut self, rng: &mut ChaCha8Rng) -> DecisionTree {
        let samples: Vec<usize> = (0..self.labels.len()).filter(|&i| self.weight[i] > 0).collect();
        let mut nodes = vec![TreeNode::Leaf { dist: Vec::new() }];
        let mut stack = vec![(0usize, samples, 0usize)];
        while let Some((at, samples, depth)) = stack.pop() {
            let counts = self.class_weights(&samples);
            let total: f64 = counts.iter().sum();
            let pure = counts.iter().filter(|&&c| c > 0.0).count() <= 1;
            let split = if pure || self.max_depth.is_some_and(|d| depth >= d) {
                None
            } else {
                self.best_split(&samples, &counts, rng)
            };
            match split {
                None => {
                    nodes[at] = TreeNode::Leaf {
                        dist: counts.iter().map(|c| c / total).collect(),
                    };
                }
                Some((feature, threshold)) => {
                    let (left, right): (Vec<usize>, Vec<usize>) = samples
                        .iter()
                        .partition(|&&i| self.x.get(i, feature).unwrap_or(0.0) <= threshold);
                    let (l, r) = (nodes.len(), nodes.len() + 1);
                    nodes.push(TreeNode::Leaf { dist: Vec::new() });
                    nodes.push(TreeNode::Leaf { dist: Vec::new() });
                    nodes[at] = TreeNode::Split {
                        feature,
                        threshold,
                        left: l,
                        right: r,
                    };
                    stack.push((r, right, depth + 1));
                    stack.push((l, left, depth + 1));
                }
            }
        }
        DecisionTree { nodes }
    }

    /// Features that take more than one value among `samples`, ascending.
    fn varying_features(&mut self, samples: &[usize]) -> Vec<usize> {
        let mut touched = Vec::new();
        for &i in samples {
            for (j, v) in self.x.row(i).iter() {
                match &mut self.stats[j] {
                    Some(s) => {
                        s.occurrences += 1;
                        s.min = s.min.min(v);
                        s.max = s.max.max(v);
                    }
                    slot @ None => {
                        *slot = Some(FeatureStats {
                            occurrences: 1,
                            min: v,
                            max: v,
                        });
                        touched.push(j);
                    }
                }
            }
        }
        let mut out: Vec<usize> = touched
            .into_iter()
            .filter(|&j| {
                let s = self.stats[j].take().expect("touched feature has stats");
                s.occurrences < samples.len() || s.min != s.max
            })
            .collect();
        out.sort_unstable();
        out
    }

    fn best_split(
        &mut self,
        samples: &[usize],
        counts: &[f64],
        rng: &mut ChaCha8Rng,
    ) -> Option<(usize, f64)> {
        let varying = self.varying_features(samples);
        if varying.is_empty() {
            return None;
        }
        let k = self.mtry.min(varying.len());
        let chosen: Vec<usize> = sample(rng, varying.len(), k)
            .into_iter()
            .map(|i| varying[i])
            .collect();
        for (s, &j) in chosen.iter().enumerate() {
            self.slot[j] = s;
        }
        let mut entries: Vec<Vec<(f64, usize)>> = vec![Vec::new(); k];
        for &i in samples {
            for (j, v) in self.x.row(i).iter() {
                if self.slot[j] != usize::MAX {
                    entries[self.slot[j]].push((v, i));
                }
            }
        }
        for &j in &chosen {
            self.slot[j] = usize::MAX;
        }

        let total: f64 = counts.iter().sum();
        let mut best: Option<(f64, usize, f64)> = None;
        for (s, mut col) in entries.into_iter().enumerate() {
            col.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut zero = counts.to_vec();
            for &(_, i) in &col {
                zero[self.labels[i]] -= self.weight[i] as f64;
            }
            let n_zero = samples.len() - col.len();
            // Groups of equal value in ascending order, the implicit zeros
            // placed among the stored values.
            let split_at = col.partition_point(|e| e.0 < 0.0);
            let mut groups: Vec<(f64, Vec<(usize, f64)>)> = Vec::new();
            let mut push = |v: f64, parts: Vec<(usize, f64)>| match groups.last_mut() {
                Some(g) if g.0 == v => g.1.extend(parts),
                _ => groups.push((v, parts)),
            };
            for &(v, i) in &col[..split_at] {
                push(v, vec![(self.labels[i], self.weight[i] as f64)]);
            }
            if n_zero > 0 {
                push(
                    0.0,
                    zero.iter().copied().enumerate().filter(|p| p.1 > 0.0).collect(),
                );
            }
            for &(v, i) in &col[split_at..] {
                push(v, vec![(self.labels[i], self.weight[i] as f64)]);
            }

            let mut left = vec![0.0; counts.len()];
            let mut right = counts.to_vec();
            let (mut wl, mut sql) = (0.0, 0.0);
            let mut wr = total;
            let mut sqr: f64 = counts.iter().map(|c| c * c).sum();
            for g in 0..groups.len().saturating_sub(1) {
                for &(t, w) in &groups[g].1 {
                    sql += (left[t] + w) * (left[t] + w) - left[t] * left[t];
                    sqr += (right[t] - w) * (right[t] - w) - right[t] * right[t];
                    left[t] += w;
                    right[t] -= w;
                    wl += w;
                    wr -= w;
                }
                // larger is purer: Gini impurity is W - sql/wl - sqr/wr
                let score = sql / wl + sqr / wr;
                if best.is_none_or(|b| score > b.0) {
                    let (a, b) = (groups[g].0, groups[g + 1].0);
                    let mid = a + (b - a) / 2.0;
                    let thr = if mid < b { mid } else { a };
                    best = Some((score, chosen[s], thr));
                }
            }
        }
        best.map(|(_, j, thr)| (j, thr))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::fixtures::dataset;

    fn xor() -> LabeledDataset {
        dataset(
            &[vec![0.0, 0.0], vec![1.0, 1.0], vec![1.0, 0.0], vec![0.0, 1.0]],
            &[0, 0, 1, 1],
            2,
        )
    }

    #[test]
    fn full_tree_fits_xor() {
        let d = xor();
        let cfg = RfConfig {
            n_trees: 1,
            max_depth: None,
            mtry: Some(2),
            bootstrap: false,
            seed: 3,
        };
        let m = train_rf_with(&d, &cfg).unwrap();
        for i in 0..d.len() {
            assert_eq!(m.predict(d.features.row(i)).label, d.labels[i]);
        }
        assert_eq!(m.trees[0].depth(), 2);
    }

    #[test]
    fn depth_limit_and_determinism() {
        let d = xor();
        let m = train_rf(&d, 5, Some(0), None, 1).unwrap();
        assert!(m.trees.iter().all(|t| t.nodes.len() == 1));
        let a = train_rf(&d, 7, None, None, 11).unwrap();
        let b = train_rf(&d, 7, None, None, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.mtry, 2);
    }

    #[test]
    fn negative_values_split() {
        let d = dataset(&[vec![-2.0], vec![-1.0], vec![0.0], vec![3.0]], &[0, 0, 1, 1], 2);
        let cfg = RfConfig {
            n_trees: 1,
            max_depth: None,
            mtry: None,
            bootstrap: false,
            seed: 0,
        };
        let m = train_rf_with(&d, &cfg).unwrap();
        match &m.trees[0].nodes[0] {
            TreeNode::Split { threshold, .. } => assert_eq!(*threshold, -0.5),
            n => panic!("{n:?}"),
        }
    }

    #[test]
    fn bad_mtry() {
        assert!(train_rf(&xor(), 1, None, Some(3), 0).is_err());
        assert!(train_rf(&xor(), 0, None, None, 0).is_err());
    }
}
