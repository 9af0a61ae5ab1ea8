//! Chapter-to-chapter distances, book-level linkage, and agreement between
//! measures.

mod correlation;
mod heatmap;
mod linkage;
mod metric;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

pub use correlation::{correlate_matrices, measure_correlation, CorrelationMethod, MeasureCorrelation};
pub use heatmap::{heatmap_svg, AxisLabels, Heatmap};
pub use linkage::{book_linkage, BookDistanceMatrix, Linkage};
pub use metric::{metric_check, MetricReport};

use crate::corpus::BookLabel;
use crate::dtm::{RowLabel, WeightMatrix};
use crate::error::{Error, Result};
use crate::io::{csv_field, fmt_f64};
use crate::sparse::RowView;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    Euclidean,
    Manhattan,
    Jaccard,
    Cosine,
}

impl Measure {
    pub const ALL: [Measure; 4] = [
        Measure::Euclidean,
        Measure::Manhattan,
        Measure::Jaccard,
        Measure::Cosine,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Euclidean => "euclidean",
            Measure::Manhattan => "manhattan",
            Measure::Jaccard => "jaccard",
            Measure::Cosine => "cosine",
        }
    }

    /// Distance between two dense vectors.
    pub fn distance(self, x: &[f64], y: &[f64]) -> Result<f64> {
        match self {
            Measure::Euclidean => euclidean(x, y),
            Measure::Manhattan => manhattan(x, y),
            Measure::Jaccard => jaccard_distance(x, y),
            Measure::Cosine => cosine_distance(x, y),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown measure `{s}`")))
    }
}

fn check_len(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(())
}

pub fn euclidean(x: &[f64], y: &[f64]) -> Result<f64> {
    check_len(x, y)?;
    Ok(x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

pub fn manhattan(x: &[f64], y: &[f64]) -> Result<f64> {
    check_len(x, y)?;
    Ok(x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum())
}

/// Generalized Jaccard: sum of elementwise minima over sum of maxima.
pub fn jaccard_similarity(x: &[f64], y: &[f64]) -> Result<f64> {
    check_len(x, y)?;
    let (mut num, mut den) = (0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        num += a.min(b);
        den += a.max(b);
    }
    if den == 0.0 {
        return Err(Error::BothZero);
    }
    Ok(num / den)
}

pub fn jaccard_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    Ok(1.0 - jaccard_similarity(x, y)?)
}

pub fn cosine_similarity(x: &[f64], y: &[f64]) -> Result<f64> {
    check_len(x, y)?;
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let nx: f64 = x.iter().map(|a| a * a).sum();
    let ny: f64 = y.iter().map(|b| b * b).sum();
    cosine_from_parts(dot, nx, ny)
}

// sqrt(nx * ny) rather than sqrt(nx) * sqrt(ny): the former is exactly nx
// when x == y, so identical vectors get similarity exactly 1.
fn cosine_from_parts(dot: f64, nx: f64, ny: f64) -> Result<f64> {
    if nx == 0.0 || ny == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(dot / (nx * ny).sqrt())
}

/// `1 - cosine_similarity`, floored at 0 against rounding.
pub fn cosine_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    Ok((1.0 - cosine_similarity(x, y)?).max(0.0))
}

/// Walks the union of two sparse supports in column order, yielding
/// (x_j, y_j) with zeros filled in.
fn merged<'a>(x: RowView<'a, f64>, y: RowView<'a, f64>) -> impl Iterator<Item = (f64, f64)> + 'a {
    let (mut a, mut b) = (0, 0);
    std::iter::from_fn(move || {
        let (xa, yb) = (x.indices.get(a), y.indices.get(b));
        match (xa, yb) {
            (None, None) => None,
            (Some(_), None) => {
                a += 1;
                Some((x.values[a - 1], 0.0))
            }
            (None, Some(_)) => {
                b += 1;
                Some((0.0, y.values[b - 1]))
            }
            (Some(i), Some(j)) => {
                if i < j {
                    a += 1;
                    Some((x.values[a - 1], 0.0))
                } else if j < i {
                    b += 1;
                    Some((0.0, y.values[b - 1]))
                } else {
                    a += 1;
                    b += 1;
                    Some((x.values[a - 1], y.values[b - 1]))
                }
            }
        }
    })
}

/// Distance between two sparse rows; `norms` are the squared norms, used by
/// cosine only.
pub(crate) fn sparse_distance(
    measure: Measure,
    x: RowView<'_, f64>,
    y: RowView<'_, f64>,
    norms: (f64, f64),
) -> Result<f64> {
    match measure {
        Measure::Euclidean => Ok(merged(x, y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()),
        Measure::Manhattan => Ok(merged(x, y).map(|(a, b)| (a - b).abs()).sum()),
        Measure::Jaccard => {
            let (mut num, mut den) = (0.0, 0.0);
            for (a, b) in merged(x, y) {
                num += a.min(b);
                den += a.max(b);
            }
            if den == 0.0 {
                return Err(Error::BothZero);
            }
            Ok(1.0 - num / den)
        }
        Measure::Cosine => {
            let dot: f64 = merged(x, y).map(|(a, b)| a * b).sum();
            Ok((1.0 - cosine_from_parts(dot, norms.0, norms.1)?).max(0.0))
        }
    }
}

pub(crate) fn squared_norm(x: RowView<'_, f64>) -> f64 {
    x.values.iter().map(|v| v * v).sum()
}

/// Square matrix of pairwise chapter distances.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
    pub rows: Vec<RowLabel>,
    pub books: Vec<BookLabel>,
    pub measure: Measure,
}

impl DistanceMatrix {
    /// Wraps a full n×n row-major array.
    pub fn from_values(
        values: Vec<f64>,
        rows: Vec<RowLabel>,
        books: Vec<BookLabel>,
        measure: Measure,
    ) -> Result<Self> {
        let n = rows.len();
        if values.len() != n * n {
            return Err(Error::LengthMismatch {
                left: n * n,
                right: values.len(),
            });
        }
        Ok(DistanceMatrix {
            n,
            values,
            rows,
            books,
            measure,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Entries strictly above the diagonal, row by row.
    pub fn upper_triangle(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n * (self.n.saturating_sub(1)) / 2);
        for i in 0..self.n {
            for j in i + 1..self.n {
                out.push(self.get(i, j));
            }
        }
        out
    }

    pub fn row_names(&self) -> Vec<String> {
        crate::dtm::row_names(&self.rows, &self.books)
    }

    /// Full square CSV with row and column headers.
    pub fn to_csv(&self) -> String {
        let names: Vec<String> = self.row_names().iter().map(|s| csv_field(s)).collect();
        let mut out = String::from("label");
        for n in &names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for (i, name) in names.iter().enumerate().take(self.n) {
            out.push_str(name);
            for j in 0..self.n {
                out.push(',');
                out.push_str(&fmt_f64(self.get(i, j)));
            }
            out.push('\n');
        }
        out
    }

    pub fn heatmap(&self) -> Heatmap {
        let labels = if self.n <= 60 {
            AxisLabels::Each(self.row_names())
        } else {
            let mut groups: Vec<(usize, usize, String)> = Vec::new();
            for (i, r) in self.rows.iter().enumerate() {
                match groups.last_mut() {
                    Some(g) if g.2 == self.books[r.book].name && g.0 + g.1 == i => g.1 += 1,
                    _ => groups.push((i, 1, self.books[r.book].name.clone())),
                }
            }
            AxisLabels::Groups(groups)
        };
        Heatmap {
            title: format!("{} distance between chapters", self.measure),
            n_rows: self.n,
            n_cols: self.n,
            values: self.values.clone(),
            row_labels: labels.clone(),
            col_labels: labels,
        }
    }
}

/// Distances between every pair of rows. Each unordered pair is computed
/// once and mirrored; the diagonal is exactly zero.
pub fn pairwise(matrix: &WeightMatrix, measure: Measure) -> Result<DistanceMatrix> {
    let x = &matrix.weights;
    let n = x.n_rows();
    if n < 2 {
        return Err(Error::TooFewRows { needed: 2, got: n });
    }
    let norms: Vec<f64> = x.rows().map(squared_norm).collect();
    let upper: Vec<Result<Vec<f64>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| {
                    sparse_distance(measure, x.row(i), x.row(j), (norms[i], norms[j])).map_err(|e| {
                        Error::PairUndefined {
                            measure: measure.name(),
                            left: i,
                            right: j,
                            source: Box::new(e),
                        }
                    })
                })
                .collect()
        })
        .collect();
    let mut values = vec![0.0; n * n];
    for (i, row) in upper.into_iter().enumerate() {
        for (k, d) in row?.into_iter().enumerate() {
            let j = i + 1 + k;
            values[i * n + j] = d;
            values[j * n + i] = d;
        }
    }
    DistanceMatrix::from_values(values, matrix.rows.clone(), matrix.books.clone(), measure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::Csr;

    fn wm(rows: &[Vec<f64>]) -> WeightMatrix {
        WeightMatrix {
            weights: Csr::from_dense(rows).unwrap(),
            rows: (0..rows.len())
                .map(|i| RowLabel {
                    book: 0,
                    chapter: i as u32 + 1,
                })
                .collect(),
            books: vec![BookLabel::new(0, "A")],
            vocab: crate::dtm::Vocabulary::new((0..rows[0].len()).map(|j| format!("t{j}"))),
        }
    }

    #[test]
    fn formula_examples() {
        assert_eq!(euclidean(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(euclidean(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(manhattan(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 7.0);
        assert_eq!(jaccard_similarity(&[2.0, 1.0], &[2.0, 1.0]).unwrap(), 1.0);
        assert_eq!(jaccard_similarity(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(
            jaccard_similarity(&[2.0, 1.0, 0.0], &[1.0, 1.0, 1.0]).unwrap(),
            0.5
        );
        assert_eq!(jaccard_distance(&[2.0, 1.0, 0.0], &[1.0, 1.0, 1.0]).unwrap(), 0.5);
        assert_eq!(jaccard_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(cosine_similarity(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 1.0);
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[0.0, 3.0]).unwrap(), 0.0);
        let s = cosine_similarity(&[1.0, 1.0], &[1.0, 0.0]).unwrap();
        assert!((s - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(cosine_distance(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        assert!(cosine_distance(&[0.3, 0.7], &[0.9, 2.1]).unwrap() < 1e-15);
    }

    #[test]
    fn formula_errors() {
        assert!(matches!(
            euclidean(&[1.0], &[1.0, 2.0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(jaccard_similarity(&[0.0], &[0.0]), Err(Error::BothZero)));
        assert!(matches!(
            cosine_similarity(&[0.0, 0.0], &[1.0, 0.0]),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn identical_rows_give_zero_matrix() {
        for m in Measure::ALL {
            let d = pairwise(&wm(&[vec![1.0, 2.0, 0.0], vec![1.0, 2.0, 0.0]]), m).unwrap();
            assert_eq!(d.values(), &[0.0; 4], "{m}");
        }
    }

    #[test]
    fn pairwise_reports_offending_rows() {
        let err = pairwise(
            &wm(&[vec![1.0, 0.0], vec![0.0, 0.0], vec![0.0, 1.0]]),
            Measure::Cosine,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            Error::PairUndefined {
                left: 0,
                right: 1,
                ..
            }
        ));
        assert!(pairwise(&wm(&[vec![1.0]]), Measure::Euclidean).is_err());
    }

    #[test]
    fn csv_layout() {
        let d = pairwise(&wm(&[vec![0.0, 0.0], vec![3.0, 4.0]]), Measure::Euclidean).unwrap();
        let csv = d.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "label,A:1,A:2");
        assert!(lines[1].starts_with("A:1,0.0000000000000000e0,5.0000000000000000e0"));
    }

    #[test]
    fn measure_names_parse() {
        for m in Measure::ALL {
            assert_eq!(m.name().parse::<Measure>().unwrap(), m);
        }
        assert!("chebyshev".parse::<Measure>().is_err());
    }
}
