use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::{AxisLabels, DistanceMatrix, Heatmap, Measure};
use crate::corpus::BookLabel;
use crate::error::{Error, Result};
use crate::io::{csv_field, fmt_f64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Linkage {
    Min,
    Max,
    Mean,
    Median,
}

impl Linkage {
    pub const ALL: [Linkage; 4] = [Linkage::Min, Linkage::Max, Linkage::Mean, Linkage::Median];

    pub fn name(self) -> &'static str {
        match self {
            Linkage::Min => "min",
            Linkage::Max => "max",
            Linkage::Mean => "mean",
            Linkage::Median => "median",
        }
    }

    /// Aggregates a non-empty block. Reorders `block`.
    pub fn aggregate(self, block: &mut [f64]) -> f64 {
        match self {
            Linkage::Min => block.iter().copied().fold(f64::INFINITY, f64::min),
            Linkage::Max => block.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Linkage::Mean => block.iter().sum::<f64>() / block.len() as f64,
            Linkage::Median => {
                block.sort_unstable_by(f64::total_cmp);
                let n = block.len();
                if n % 2 == 1 {
                    block[n / 2]
                } else {
                    (block[n / 2 - 1] + block[n / 2]) / 2.0
                }
            }
        }
    }
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Linkage::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown linkage `{s}`")))
    }
}

/// Book-by-book distances aggregated from chapter distances.
#[derive(Clone, Debug, PartialEq)]
pub struct BookDistanceMatrix {
    values: Vec<f64>,
    pub books: Vec<BookLabel>,
    pub measure: Measure,
    pub linkage: Linkage,
}

impl BookDistanceMatrix {
    pub fn len(&self) -> usize {
        self.books.len()
    }

    pub fn is_empty(&self) -> bool {
        self.books.is_empty()
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.books.len() + b]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("book");
        for b in &self.books {
            out.push(',');
            out.push_str(&csv_field(&b.name));
        }
        out.push('\n');
        for (a, book) in self.books.iter().enumerate() {
            out.push_str(&csv_field(&book.name));
            for b in 0..self.books.len() {
                out.push(',');
                out.push_str(&fmt_f64(self.get(a, b)));
            }
            out.push('\n');
        }
        out
    }

    pub fn heatmap(&self) -> Heatmap {
        let names: Vec<String> = self.books.iter().map(|b| b.name.clone()).collect();
        Heatmap {
            title: format!(
                "{} distance between books, {} linkage",
                self.measure, self.linkage
            ),
            n_rows: names.len(),
            n_cols: names.len(),
            values: self.values.clone(),
            row_labels: AxisLabels::Each(names.clone()),
            col_labels: AxisLabels::Each(names),
        }
    }
}

/// Aggregates each book-pair block of `d`. Diagonal blocks run over all
/// ordered pairs of the book's chapters, self-pairs included. Books without
/// rows in `d` are left out.
pub fn book_linkage(d: &DistanceMatrix, linkage: Linkage) -> BookDistanceMatrix {
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); d.books.len()];
    for (i, r) in d.rows.iter().enumerate() {
        members[r.book].push(i);
    }
    let present: Vec<usize> = (0..d.books.len()).filter(|&b| !members[b].is_empty()).collect();
    let b = present.len();
    let pairs: Vec<(usize, usize)> = (0..b).flat_map(|x| (x..b).map(move |y| (x, y))).collect();
    let cells: Vec<f64> = pairs
        .par_iter()
        .map(|&(x, y)| {
            let (rows_a, rows_b) = (&members[present[x]], &members[present[y]]);
            let mut block = Vec::with_capacity(rows_a.len() * rows_b.len());
            for &l in rows_a {
                for &m in rows_b {
                    block.push(d.get(l, m));
                }
            }
            linkage.aggregate(&mut block)
        })
        .collect();
    let mut values = vec![0.0; b * b];
    for (&(x, y), v) in pairs.iter().zip(cells) {
        values[x * b + y] = v;
        values[y * b + x] = v;
    }
    BookDistanceMatrix {
        values,
        books: present.iter().map(|&i| d.books[i].clone()).collect(),
        measure: d.measure,
        linkage,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dtm::RowLabel;

    fn matrix(values: Vec<f64>, books: &[usize]) -> DistanceMatrix {
        let n_books = books.iter().max().unwrap() + 1;
        let rows = books
            .iter()
            .enumerate()
            .map(|(i, &b)| RowLabel {
                book: b,
                chapter: i as u32 + 1,
            })
            .collect();
        let labels = (0..n_books).map(|i| BookLabel::new(i, format!("B{i}"))).collect();
        DistanceMatrix::from_values(values, rows, labels, Measure::Euclidean).unwrap()
    }

    #[test]
    fn cross_block_aggregates() {
        #[rustfmt::skip]
        let d = matrix(vec![
            0.0, 1.0, 2.0, 3.0,
            1.0, 0.0, 4.0, 5.0,
            2.0, 4.0, 0.0, 1.0,
            3.0, 5.0, 1.0, 0.0,
        ], &[0, 0, 1, 1]);
        let get = |l| book_linkage(&d, l).get(0, 1);
        assert_eq!(get(Linkage::Min), 2.0);
        assert_eq!(get(Linkage::Max), 5.0);
        assert_eq!(get(Linkage::Mean), 3.5);
        assert_eq!(get(Linkage::Median), 3.5);
        // diagonal block {0, 1, 1, 0}
        assert_eq!(book_linkage(&d, Linkage::Mean).get(0, 0), 0.5);
        assert_eq!(book_linkage(&d, Linkage::Median).get(0, 0), 0.5);
        assert_eq!(book_linkage(&d, Linkage::Min).get(1, 1), 0.0);
    }

    #[test]
    fn singletons_copy_the_matrix() {
        let vals = vec![0.0, 2.0, 7.0, 2.0, 0.0, 3.0, 7.0, 3.0, 0.0];
        let d = matrix(vals.clone(), &[0, 1, 2]);
        for l in Linkage::ALL {
            assert_eq!(book_linkage(&d, l).values(), &vals[..]);
        }
    }

    #[test]
    fn odd_median() {
        assert_eq!(Linkage::Median.aggregate(&mut [3.0, 1.0, 2.0]), 2.0);
    }
}
