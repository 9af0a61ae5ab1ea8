//! Line-oriented text format for trained models. Reals are written in
//! shortest round-trip form so a read-back model is bit-identical.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use super::{DecisionTree, KnnModel, MnbModel, Model, RfModel, SvmModel, TreeNode};
use crate::distance::Measure;
use crate::error::{Error, Result};
use crate::sparse::Csr;

const MAGIC: &str = "textmine-model v1";

fn join(xs: &[f64]) -> String {
    let mut s = String::new();
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{x}");
    }
    s
}

pub(super) fn write(model: &Model, classes: &[String]) -> String {
    let mut out = String::new();
    let p = model.n_features();
    let params = match model {
        Model::Mnb(m) => format!("alpha={}", m.alpha),
        Model::Knn(m) => format!("k={} measure={}", m.k, m.measure),
        Model::Svm(m) => format!("lambda={} epochs={}", m.lambda, m.epochs),
        Model::Rf(m) => format!(
            "trees={} max_depth={} mtry={} bootstrap={} seed={}",
            m.trees.len(),
            m.max_depth.map_or("inf".to_string(), |d| d.to_string()),
            m.mtry,
            m.bootstrap,
            m.seed
        ),
    };
    let _ = writeln!(out, "{MAGIC} {} {params}", model.kind());
    let _ = writeln!(out, "features {p}");
    let _ = writeln!(out, "classes {}", classes.len());
    for c in classes {
        let _ = writeln!(out, "{c}");
    }
    match model {
        Model::Mnb(m) => {
            let _ = writeln!(out, "priors {}", join(&m.log_priors));
            for t in 0..m.log_priors.len() {
                let _ = writeln!(out, "loglik {}", join(m.class_log_likelihoods(t)));
            }
        }
        Model::Knn(m) => {
            let _ = writeln!(out, "rows {}", m.labels.len());
            for (row, y) in m.features.rows().zip(&m.labels) {
                let _ = write!(out, "{y}");
                for (j, v) in row.iter() {
                    let _ = write!(out, " {j}:{v}");
                }
                out.push('\n');
            }
        }
        Model::Svm(m) => {
            for t in 0..m.biases.len() {
                let _ = writeln!(out, "class {} {}", m.biases[t], join(m.class_weights(t)));
                let _ = writeln!(out, "trace {}", join(&m.traces[t]));
            }
        }
        Model::Rf(m) => {
            for tree in &m.trees {
                let _ = writeln!(out, "tree {}", tree.nodes.len());
                for node in &tree.nodes {
                    match node {
                        TreeNode::Leaf { dist } => {
                            let _ = writeln!(out, "leaf {}", join(dist));
                        }
                        TreeNode::Split {
                            feature,
                            threshold,
                            left,
                            right,
                        } => {
                            let _ = writeln!(out, "split {feature} {threshold} {left} {right}");
                        }
                    }
                }
            }
        }
    }
    out
}

struct Lines<'a> {
    it: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str> {
        let (i, l) = self
            .it
            .next()
            .ok_or_else(|| Error::parse(self.line + 1, "unexpected end of model"))?;
        self.line = i + 1;
        Ok(l)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line, msg)
    }

    /// Next line, which must start with `tag`; returns the rest.
    fn tagged(&mut self, tag: &str) -> Result<&'a str> {
        let l = self.next()?;
        match l.strip_prefix(tag) {
            Some(rest) if rest.is_empty() || rest.starts_with(' ') => Ok(rest.trim_start()),
            _ => Err(self.err(format!("expected `{tag}`"))),
        }
    }

    fn parse<T: FromStr>(&self, s: &str) -> Result<T> {
        s.parse().map_err(|_| self.err(format!("bad value `{s}`")))
    }

    fn reals(&self, s: &str, n: usize) -> Result<Vec<f64>> {
        let v: Vec<f64> = s
            .split_whitespace()
            .map(|x| self.parse(x))
            .collect::<Result<_>>()?;
        if v.len() != n {
            return Err(self.err(format!("expected {n} values, found {}", v.len())));
        }
        Ok(v)
    }
}

pub(super) fn read(s: &str) -> Result<(Model, Vec<String>)> {
    let mut lines = Lines {
        it: s.lines().enumerate(),
        line: 0,
    };
    let header = lines.next()?;
    let rest = header
        .strip_prefix(MAGIC)
        .ok_or_else(|| lines.err("not a textmine model"))?;
    let mut words = rest.split_whitespace();
    let kind = words.next().ok_or_else(|| lines.err("missing model kind"))?;
    let mut kv = HashMap::new();
    for w in words {
        let (k, v) = w
            .split_once('=')
            .ok_or_else(|| lines.err(format!("bad parameter `{w}`")))?;
        kv.insert(k, v);
    }
    let param = |k: &str| -> Result<&str> {
        kv.get(k)
            .copied()
            .ok_or_else(|| Error::parse(1, format!("missing parameter `{k}`")))
    };
    let p: usize = {
        let r = lines.tagged("features")?;
        lines.parse(r)?
    };
    let t: usize = {
        let r = lines.tagged("classes")?;
        lines.parse(r)?
    };
    let mut classes = Vec::with_capacity(t);
    for _ in 0..t {
        classes.push(lines.next()?.to_string());
    }
    let model = match kind {
        "mnb" => {
            let alpha = lines.parse(param("alpha")?)?;
            let r = lines.tagged("priors")?;
            let log_priors = lines.reals(r, t)?;
            let mut log_likelihoods = Vec::with_capacity(t * p);
            for _ in 0..t {
                let r = lines.tagged("loglik")?;
                log_likelihoods.extend(lines.reals(r, p)?);
            }
            Model::Mnb(MnbModel {
                log_priors,
                log_likelihoods,
                alpha,
            })
        }
        "knn" => {
            let k = lines.parse(param("k")?)?;
            let measure = Measure::from_str(param("measure")?)?;
            let r = lines.tagged("rows")?;
            let n: usize = lines.parse(r)?;
            let mut features = Csr::empty(p);
            let mut labels = Vec::with_capacity(n);
            for _ in 0..n {
                let l = lines.next()?;
                let mut it = l.split(' ');
                let y: usize = lines.parse(it.next().unwrap_or(""))?;
                if y >= t {
                    return Err(lines.err(format!("label {y} out of range")));
                }
                labels.push(y);
                let entries = it
                    .map(|e| {
                        let (j, v) = e
                            .split_once(':')
                            .ok_or_else(|| lines.err(format!("bad entry `{e}`")))?;
                        Ok((lines.parse(j)?, lines.parse(v)?))
                    })
                    .collect::<Result<Vec<(usize, f64)>>>()?;
                features.push_row(entries).map_err(|e| lines.err(e.to_string()))?;
            }
            Model::Knn(KnnModel::from_parts(k, measure, features, labels, t)?)
        }
        "svm" => {
            let lambda = lines.parse(param("lambda")?)?;
            let epochs = lines.parse(param("epochs")?)?;
            let mut m = SvmModel {
                weights: Vec::with_capacity(t * p),
                biases: Vec::with_capacity(t),
                lambda,
                epochs,
                traces: Vec::with_capacity(t),
            };
            for _ in 0..t {
                let r = lines.tagged("class")?;
                let v = lines.reals(r, p + 1)?;
                m.biases.push(v[0]);
                m.weights.extend_from_slice(&v[1..]);
                let r = lines.tagged("trace")?;
                let n = r.split_whitespace().count();
                m.traces.push(lines.reals(r, n)?);
            }
            Model::Svm(m)
        }
        "rf" => {
            let n_trees: usize = lines.parse(param("trees")?)?;
            let max_depth = match param("max_depth")? {
                "inf" => None,
                d => Some(lines.parse(d)?),
            };
            let mut trees = Vec::with_capacity(n_trees);
            for _ in 0..n_trees {
                let r = lines.tagged("tree")?;
                let n_nodes: usize = lines.parse(r)?;
                let mut nodes = Vec::with_capacity(n_nodes);
                for _ in 0..n_nodes {
                    let l = lines.next()?;
                    if let Some(r) = l.strip_prefix("leaf ") {
                        nodes.push(TreeNode::Leaf {
                            dist: lines.reals(r, t)?,
                        });
                    } else if let Some(r) = l.strip_prefix("split ") {
                        let f: Vec<&str> = r.split(' ').collect();
                        if f.len() != 4 {
                            return Err(lines.err("split needs 4 fields"));
                        }
                        let node = TreeNode::Split {
                            feature: lines.parse(f[0])?,
                            threshold: lines.parse(f[1])?,
                            left: lines.parse(f[2])?,
                            right: lines.parse(f[3])?,
                        };
                        if let TreeNode::Split {
                            feature, left, right, ..
                        } = node
                        {
                            if feature >= p || left >= n_nodes || right >= n_nodes {
                                return Err(lines.err("split refers outside the tree"));
                            }
                        }
                        nodes.push(node);
                    } else {
                        return Err(lines.err("expected `leaf` or `split`"));
                    }
                }
                trees.push(DecisionTree { nodes });
            }
            Model::Rf(RfModel {
                trees,
                max_depth,
                mtry: lines.parse(param("mtry")?)?,
                bootstrap: lines.parse(param("bootstrap")?)?,
                seed: lines.parse(param("seed")?)?,
                n_features: p,
                n_classes: t,
            })
        }
        other => return Err(Error::parse(1, format!("unknown model kind `{other}`"))),
    };
    if let Ok(l) = lines.next() {
        if !l.trim().is_empty() {
            return Err(lines.err("trailing content after model"));
        }
    }
    Ok((model, classes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::fixtures::dataset;
    use crate::classify::Params;

    #[test]
    fn every_kind_round_trips() {
        let d = dataset(
            &[
                vec![1.0, 0.0, 0.1],
                vec![0.0, 2.0, 1.0 / 3.0],
                vec![3.0, 1.0, 0.0],
                vec![0.0, 0.5, 7.0],
            ],
            &[0, 1, 0, 2],
            3,
        );
        let grid = [
            Params::Mnb { alpha: 0.1 },
            Params::Knn {
                k: 3,
                measure: Measure::Cosine,
            },
            Params::Svm {
                lambda: 1e-3,
                epochs: 5,
            },
            Params::Rf {
                n_trees: 4,
                max_depth: None,
                mtry: Some(2),
            },
            Params::Rf {
                n_trees: 2,
                max_depth: Some(1),
                mtry: None,
            },
        ];
        for params in grid {
            let m = params.train(&d, 5).unwrap();
            let text = m.to_text(&d.classes);
            let (back, classes) = Model::from_text(&text).unwrap();
            assert_eq!(back, m, "{params}");
            assert_eq!(classes, d.classes);
            assert_eq!(back.to_text(&classes), text);
        }
    }

    #[test]
    fn infinite_priors_survive() {
        let d = dataset(&[vec![1.0]], &[0], 2);
        let m = Params::Mnb { alpha: 1.0 }.train(&d, 0).unwrap();
        let (back, _) = Model::from_text(&m.to_text(&d.classes)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn malformed_models() {
        assert!(Model::from_text("").is_err());
        assert!(Model::from_text("hello").is_err());
        assert!(
            Model::from_text("textmine-model v1 mnb alpha=1\nfeatures 1\nclasses 1\nA\npriors 0\n").is_err()
        );
        assert!(Model::from_text("textmine-model v1 zzz\nfeatures 1\nclasses 0\n").is_err());
    }
}
