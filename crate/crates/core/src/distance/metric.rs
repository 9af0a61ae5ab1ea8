use rand::Rng;

use super::DistanceMatrix;
use crate::error::{Error, Result};
use crate::rng::SeedSource;
use crate::sparse::Csr;

/// Slack allowed on the triangle check for rounding in the stored values.
const TRIANGLE_TOL: f64 = 1e-9;

/// Axiom violations found in a distance matrix. Each list holds the
/// offending index pairs or triples.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MetricReport {
    pub negative: Vec<(usize, usize)>,
    pub asymmetric: Vec<(usize, usize)>,
    /// Pairs with d(i, j) != 0 where i == j or the rows are identical.
    pub identity: Vec<(usize, usize)>,
    /// Triples (i, j, k) with d(i, k) > d(i, j) + d(j, k).
    pub triangle: Vec<(usize, usize, usize)>,
    pub triangle_samples: usize,
}

impl MetricReport {
    pub fn is_clean(&self) -> bool {
        self.negative.is_empty()
            && self.asymmetric.is_empty()
            && self.identity.is_empty()
            && self.triangle.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "nonnegativity {}; symmetry {}; identity {}; triangle {} of {} sampled triples",
            self.negative.len(),
            self.asymmetric.len(),
            self.identity.len(),
            self.triangle.len(),
            self.triangle_samples
        )
    }
}

/// Checks nonnegativity and symmetry over every pair, zero distance on the
/// diagonal and between identical feature rows when `features` is given,
/// and the triangle inequality on `samples` seeded random triples.
pub fn metric_check(
    d: &DistanceMatrix,
    features: Option<&Csr<f64>>,
    samples: usize,
    seed: u64,
) -> Result<MetricReport> {
    let n = d.len();
    if n == 0 {
        return Err(Error::TooFewRows { needed: 1, got: 0 });
    }
    if samples == 0 {
        return Err(Error::InvalidHyperparameter("samples must be positive".into()));
    }
    let mut report = MetricReport {
        triangle_samples: samples,
        ..Default::default()
    };
    for i in 0..n {
        for j in 0..n {
            let v = d.get(i, j);
            if v.is_nan() || v < 0.0 {
                report.negative.push((i, j));
            }
            if j > i && v.to_bits() != d.get(j, i).to_bits() {
                report.asymmetric.push((i, j));
            }
        }
        if d.get(i, i) != 0.0 {
            report.identity.push((i, i));
        }
    }
    if let Some(x) = features {
        if x.n_rows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.n_rows(),
            });
        }
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (x.row(i), x.row(j));
                if a.indices == b.indices && a.values == b.values && d.get(i, j) != 0.0 {
                    report.identity.push((i, j));
                }
            }
        }
    }
    let mut rng = SeedSource::new(seed).stream("metric-check", 0);
    for _ in 0..samples {
        let (i, j, k) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
        let lhs = d.get(i, k);
        let rhs = d.get(i, j) + d.get(j, k);
        if lhs > rhs + TRIANGLE_TOL * (1.0 + rhs.abs()) {
            report.triangle.push((i, j, k));
        }
    }
    Ok(report)
}
