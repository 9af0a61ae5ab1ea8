use proptest::prelude::*;

use textmine::corpus::BookLabel;
use textmine::distance::{book_linkage, pairwise, DistanceMatrix, Linkage, Measure};
use textmine::dtm::{RowLabel, Vocabulary, WeightMatrix};
use textmine::sparse::Csr;

fn weights(rows: &[Vec<f64>], books: &[usize]) -> WeightMatrix {
    let n_books = books.iter().max().map_or(0, |b| b + 1);
    let mut chapter = vec![0u32; n_books];
    let labels = books
        .iter()
        .map(|&b| {
            chapter[b] += 1;
            RowLabel {
                book: b,
                chapter: chapter[b],
            }
        })
        .collect();
    WeightMatrix {
        weights: Csr::from_dense(rows).unwrap(),
        rows: labels,
        books: (0..n_books).map(|b| BookLabel::new(b, format!("B{b}"))).collect(),
        vocab: Vocabulary::new((0..rows[0].len()).map(|j| format!("t{j:04}"))),
    }
}

// Sparse-ish count vectors: about half the entries are zero.
fn count_rows(n: std::ops::Range<usize>, p: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(
        prop::collection::vec(prop_oneof![Just(0.0), (1u32..20).prop_map(f64::from)], p),
        n,
    )
    .prop_filter("rows need some mass", |rows| {
        rows.iter().all(|r| r.iter().any(|&v| v > 0.0))
    })
}

fn brute(m: Measure, x: &[f64], y: &[f64]) -> f64 {
    match m {
        Measure::Euclidean => x
            .iter()
            .zip(y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt(),
        Measure::Manhattan => x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum(),
        Measure::Jaccard => {
            let num: f64 = x.iter().zip(y).map(|(a, b)| a.min(*b)).sum();
            let den: f64 = x.iter().zip(y).map(|(a, b)| a.max(*b)).sum();
            1.0 - num / den
        }
        Measure::Cosine => {
            let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
            let nx: f64 = x.iter().map(|a| a * a).sum::<f64>().sqrt();
            let ny: f64 = y.iter().map(|a| a * a).sum::<f64>().sqrt();
            (1.0 - dot / (nx * ny)).max(0.0)
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pairwise_matches_brute_force(rows in count_rows(2..9, 12)) {
        let books: Vec<usize> = (0..rows.len()).map(|i| i % 2).collect();
        let w = weights(&rows, &books);
        for m in Measure::ALL {
            let d = pairwise(&w, m).unwrap();
            for i in 0..rows.len() {
                prop_assert_eq!(d.get(i, i), 0.0);
                for j in 0..rows.len() {
                    prop_assert_eq!(d.get(i, j).to_bits(), d.get(j, i).to_bits());
                    if i != j {
                        let e = brute(m, &rows[i], &rows[j]);
                        prop_assert!((d.get(i, j) - e).abs() <= 1e-10 * e.max(1.0), "{} ({i},{j})", m);
                    }
                }
            }
        }
    }

    #[test]
    fn measures_are_bounded_and_nonnegative(rows in count_rows(2..3, 20)) {
        let (x, y) = (&rows[0], &rows[1]);
        for m in Measure::ALL {
            let d = m.distance(x, y).unwrap();
            prop_assert!(d >= 0.0);
            prop_assert_eq!(m.distance(x, x).unwrap(), 0.0);
            if matches!(m, Measure::Jaccard | Measure::Cosine) {
                prop_assert!(d <= 1.0 + 1e-15);
            }
        }
    }

    #[test]
    fn triangle_inequality_holds(rows in count_rows(3..4, 15)) {
        for m in [Measure::Euclidean, Measure::Manhattan, Measure::Jaccard] {
            let d = |a: usize, b: usize| m.distance(&rows[a], &rows[b]).unwrap();
            prop_assert!(d(0, 2) <= (d(0, 1) + d(1, 2)) * (1.0 + 1e-12) + 1e-12, "{}", m);
        }
    }

    #[test]
    fn linkages_are_ordered(vals in prop::collection::vec(0.0f64..10.0, 45), split in 1usize..9) {
        let n = 10;
        let mut full = vec![0.0; n * n];
        let mut it = vals.into_iter();
        for i in 0..n {
            for j in i + 1..n {
                let v = it.next().unwrap();
                full[i * n + j] = v;
                full[j * n + i] = v;
            }
        }
        let rows: Vec<RowLabel> = (0..n)
            .map(|i| RowLabel { book: usize::from(i >= split), chapter: i as u32 + 1 })
            .collect();
        let books = vec![BookLabel::new(0, "A"), BookLabel::new(1, "B")];
        let d = DistanceMatrix::from_values(full, rows, books, Measure::Euclidean).unwrap();
        let get = |l: Linkage| book_linkage(&d, l);
        let (lo, hi, mean, med) = (get(Linkage::Min), get(Linkage::Max), get(Linkage::Mean), get(Linkage::Median));
        for k in 0..4 {
            let (a, b) = (lo.values()[k], hi.values()[k]);
            prop_assert!(a <= mean.values()[k] + 1e-12 && mean.values()[k] <= b + 1e-12);
            prop_assert!(a <= med.values()[k] && med.values()[k] <= b);
        }
        prop_assert_eq!(lo.get(0, 1), lo.get(1, 0));
    }
}
