use std::fmt;
use std::str::FromStr;

use super::{pairwise, AxisLabels, DistanceMatrix, Heatmap, Measure};
use crate::dtm::WeightMatrix;
use crate::error::{Error, Result};
use crate::io::fmt_f64;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CorrelationMethod {
    #[default]
    Pearson,
    Spearman,
}

impl FromStr for CorrelationMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pearson" => Ok(CorrelationMethod::Pearson),
            "spearman" => Ok(CorrelationMethod::Spearman),
            _ => Err(Error::Config(format!("unknown correlation method `{s}`"))),
        }
    }
}

impl fmt::Display for CorrelationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorrelationMethod::Pearson => "pearson",
            CorrelationMethod::Spearman => "spearman",
        })
    }
}

/// Correlations between the distances produced by several measures.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureCorrelation {
    pub measures: Vec<Measure>,
    pub method: CorrelationMethod,
    values: Vec<f64>,
}

impl MeasureCorrelation {
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.measures.len() + b]
    }

    /// Correlation between two measures by name, if both were computed.
    pub fn between(&self, a: Measure, b: Measure) -> Option<f64> {
        let i = self.measures.iter().position(|&m| m == a)?;
        let j = self.measures.iter().position(|&m| m == b)?;
        Some(self.get(i, j))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("measure");
        for m in &self.measures {
            out.push(',');
            out.push_str(m.name());
        }
        out.push('\n');
        for (i, m) in self.measures.iter().enumerate() {
            out.push_str(m.name());
            for j in 0..self.measures.len() {
                out.push(',');
                out.push_str(&fmt_f64(self.get(i, j)));
            }
            out.push('\n');
        }
        out
    }

    pub fn heatmap(&self) -> Heatmap {
        let names: Vec<String> = self.measures.iter().map(|m| m.name().to_string()).collect();
        Heatmap {
            title: format!("{} correlation between distance measures", self.method),
            n_rows: names.len(),
            n_cols: names.len(),
            values: self.values.clone(),
            row_labels: AxisLabels::Each(names.clone()),
            col_labels: AxisLabels::Each(names),
        }
    }
}

fn ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut out = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

/// Centered vector and its norm; `None` when the vector is constant.
fn centered(x: &[f64]) -> Option<(Vec<f64>, f64)> {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let c: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
    (norm > 0.0).then_some((c, norm))
}

/// Correlates the strict upper triangles of already computed matrices.
pub fn correlate_matrices(
    matrices: &[DistanceMatrix],
    method: CorrelationMethod,
) -> Result<MeasureCorrelation> {
    let k = matrices.len();
    let mut vecs = Vec::with_capacity(k);
    for d in matrices {
        if d.len() < 2 {
            return Err(Error::TooFewRows {
                needed: 2,
                got: d.len(),
            });
        }
        let mut u = d.upper_triangle();
        if method == CorrelationMethod::Spearman {
            u = ranks(&u);
        }
        vecs.push(centered(&u).ok_or(Error::DegenerateMeasure(d.measure.name()))?);
    }
    if let Some(w) = vecs.windows(2).find(|w| w[0].0.len() != w[1].0.len()) {
        return Err(Error::LengthMismatch {
            left: w[0].0.len(),
            right: w[1].0.len(),
        });
    }
    let mut values = vec![0.0; k * k];
    for a in 0..k {
        values[a * k + a] = 1.0;
        for b in a + 1..k {
            let dot: f64 = vecs[a].0.iter().zip(&vecs[b].0).map(|(x, y)| x * y).sum();
            let r = (dot / (vecs[a].1 * vecs[b].1)).clamp(-1.0, 1.0);
            values[a * k + b] = r;
            values[b * k + a] = r;
        }
    }
    Ok(MeasureCorrelation {
        measures: matrices.iter().map(|d| d.measure).collect(),
        method,
        values,
    })
}

/// Computes each measure's pairwise matrix on `matrix` and correlates them.
pub fn measure_correlation(
    matrix: &WeightMatrix,
    measures: &[Measure],
    method: CorrelationMethod,
) -> Result<MeasureCorrelation> {
    let ds = measures
        .iter()
        .map(|&m| pairwise(matrix, m))
        .collect::<Result<Vec<_>>>()?;
    correlate_matrices(&ds, method)
}
