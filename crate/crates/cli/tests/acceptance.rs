//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Criteria 6 to 8 need the nine-book corpus. Point
//! `TEXTMINE_SCRIPTURE_MANIFEST` at its manifest (default
//! `data/scriptures/manifest.toml`). Without it they print FAIL with the
//! reason `blocked`; set `TEXTMINE_ACCEPTANCE_STRICT=1` to make that fail the
//! run as well.

// `!(x <= tol)` is used on purpose so that NaN counts as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use textmine::classify::{
    train_knn, train_mnb, train_rf_with, train_svm, LabeledDataset, Model, ModelKind, Params, RfConfig,
};
use textmine::corpus::{load_corpus, BookLabel, Corpus, CorpusManifest, RawDocument};
use textmine::distance::{
    book_linkage, cosine_distance, cosine_similarity, euclidean, jaccard_distance, jaccard_similarity,
    manhattan, measure_correlation, metric_check, pairwise, CorrelationMethod, DistanceMatrix, Linkage,
    Measure,
};
use textmine::dtm::{
    build_dtm, idf, tf, tfidf, DocTermMatrix, MatrixFiles, RowLabel, Vocabulary, WeightMatrix,
};
use textmine::evaluate::{benchmark_all, cross_validate, grid_search, make_folds, Grids};
use textmine::preprocess::{frequency_report, tokenize_words, PreprocessConfig};
use textmine::rng::SeedSource;
use textmine::sparse::Csr;

type Check = Result<String, String>;

enum Outcome {
    Pass(String),
    Fail(String),
    Blocked(String),
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn rng(name: &str) -> ChaCha8Rng {
    SeedSource::new(42).stream(name, 0)
}

fn workspace() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn toy_corpus() -> Corpus {
    let root = workspace().join("data/toy");
    load_corpus(
        &root,
        &CorpusManifest::from_file(&root.join("manifest.toml")).unwrap(),
    )
    .unwrap()
}

fn within(limit: Duration, start: Instant) -> Check {
    let t = start.elapsed();
    ensure!(t < limit, "took {t:.2?}, limit {limit:?}");
    Ok(format!("{t:.2?}"))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol
}

fn dataset(rows: &[Vec<f64>], labels: &[usize], classes: &[&str]) -> LabeledDataset {
    LabeledDataset::new(
        Csr::from_dense(rows).unwrap(),
        labels.to_vec(),
        classes.iter().map(|c| c.to_string()).collect(),
        Vocabulary::new((0..rows[0].len()).map(|j| format!("f{j:05}"))),
        (0..rows.len()).map(|i| format!("r{i}")).collect(),
    )
    .unwrap()
}

fn weights(rows: &[Vec<f64>], books: &[usize]) -> WeightMatrix {
    let n_books = books.iter().max().map_or(0, |b| b + 1);
    let mut chapter = vec![0u32; n_books];
    WeightMatrix {
        weights: Csr::from_dense(rows).unwrap(),
        rows: books
            .iter()
            .map(|&b| {
                chapter[b] += 1;
                RowLabel {
                    book: b,
                    chapter: chapter[b],
                }
            })
            .collect(),
        books: (0..n_books).map(|b| BookLabel::new(b, format!("B{b}"))).collect(),
        vocab: Vocabulary::new((0..rows[0].len()).map(|j| format!("t{j:05}"))),
    }
}

fn random_counts(r: &mut impl Rng, p: usize, max: u32) -> Vec<f64> {
    let mut v: Vec<f64> = (0..p)
        .map(|_| {
            if r.gen_bool(0.5) {
                0.0
            } else {
                f64::from(r.gen_range(1..=max))
            }
        })
        .collect();
    if v.iter().all(|&x| x == 0.0) {
        v[r.gen_range(0..p)] = 1.0;
    }
    v
}

// ---- 1 ----

fn oracle_distance(m: Measure, x: &[f64], y: &[f64]) -> f64 {
    let mut acc = [0.0f64; 3];
    for j in 0..x.len() {
        match m {
            Measure::Euclidean => acc[0] += (x[j] - y[j]) * (x[j] - y[j]),
            Measure::Manhattan => acc[0] += (x[j] - y[j]).abs(),
            Measure::Jaccard => {
                acc[0] += if x[j] < y[j] { x[j] } else { y[j] };
                acc[1] += if x[j] > y[j] { x[j] } else { y[j] };
            }
            Measure::Cosine => {
                acc[0] += x[j] * y[j];
                acc[1] += x[j] * x[j];
                acc[2] += y[j] * y[j];
            }
        }
    }
    match m {
        Measure::Euclidean => acc[0].sqrt(),
        Measure::Manhattan => acc[0],
        Measure::Jaccard => 1.0 - acc[0] / acc[1],
        Measure::Cosine => 1.0 - acc[0] / (acc[1].sqrt() * acc[2].sqrt()),
    }
}

fn formula_oracles() -> Check {
    let start = Instant::now();
    let tol = 1e-10;
    let mut r = rng("acceptance-formulas");
    let mut compared = 0usize;

    // 200 vectors as 100 pairs, each pair with its own length p <= 100.
    for pair in 0..100 {
        let p = r.gen_range(1..=100);
        let x = random_counts(&mut r, p, 12);
        let y = random_counts(&mut r, p, 12);
        let lib = [
            (Measure::Euclidean, euclidean(&x, &y).unwrap()),
            (Measure::Manhattan, manhattan(&x, &y).unwrap()),
            (Measure::Jaccard, jaccard_distance(&x, &y).unwrap()),
            (Measure::Cosine, 1.0 - cosine_similarity(&x, &y).unwrap()),
        ];
        for (m, v) in lib {
            let want = oracle_distance(m, &x, &y);
            ensure!(close(v, want, tol), "pair {pair}: {m} {v} vs {want}");
            let sparse = pairwise(&weights(&[x.clone(), y.clone()], &[0, 1]), m)
                .unwrap()
                .get(0, 1);
            let want_sparse = if m == Measure::Cosine { want.max(0.0) } else { want };
            ensure!(
                close(sparse, want_sparse, tol),
                "pair {pair}: sparse {m} {sparse} vs {want_sparse}"
            );
            compared += 2;
        }
        ensure!(
            close(
                jaccard_similarity(&x, &y).unwrap(),
                1.0 - oracle_distance(Measure::Jaccard, &x, &y),
                tol
            ),
            "pair {pair}: jaccard similarity"
        );
        ensure!(
            close(
                cosine_distance(&x, &y).unwrap(),
                oracle_distance(Measure::Cosine, &x, &y).max(0.0),
                tol
            ),
            "pair {pair}: cosine distance"
        );
    }

    // 200 count rows over p = 100 terms for tf, idf and tf-idf.
    let (n, p) = (200usize, 100usize);
    let mut rows: Vec<Vec<u32>> = (0..n)
        .map(|_| {
            random_counts(&mut r, p, 9)
                .into_iter()
                .map(|v| v as u32)
                .collect()
        })
        .collect();
    for j in 0..p {
        if rows.iter().all(|row| row[j] == 0) {
            rows[j][j] = 1;
        }
    }
    let mut counts = Csr::empty(p);
    for row in &rows {
        counts
            .push_row(
                row.iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(|(j, &c)| (j, c)),
            )
            .unwrap();
    }
    let dtm = DocTermMatrix {
        counts,
        rows: (0..n)
            .map(|i| RowLabel {
                book: 0,
                chapter: i as u32 + 1,
            })
            .collect(),
        books: vec![BookLabel::new(0, "B0")],
        vocab: Vocabulary::new((0..p).map(|j| format!("t{j:05}"))),
    };
    let idf_lib = idf(&dtm);
    let w = tfidf(&dtm).unwrap();
    for j in 0..p {
        let mut mj = 0usize;
        for row in &rows {
            if row[j] > 0 {
                mj += 1;
            }
        }
        let want = (n as f64 / mj as f64).ln();
        ensure!(close(idf_lib[j], want, tol), "idf[{j}] {} vs {want}", idf_lib[j]);
    }
    for (i, row) in rows.iter().enumerate() {
        let mut max = 0u32;
        for &c in row {
            if c > max {
                max = c;
            }
        }
        let tf_lib = tf(row).unwrap();
        let w_row = w.weights.row_dense(i);
        for j in 0..p {
            let tf_want = f64::from(row[j]) / f64::from(max);
            ensure!(close(tf_lib[j], tf_want, tol), "tf[{i},{j}]");
            let mj = rows.iter().filter(|r| r[j] > 0).count() as f64;
            let w_want = tf_want * (n as f64 / mj).ln();
            ensure!(
                close(w_row[j], w_want, tol),
                "tfidf[{i},{j}] {} vs {w_want}",
                w_row[j]
            );
            compared += 2;
        }
    }
    let t = within(Duration::from_secs(5), start)?;
    Ok(format!("{compared} entries within {tol:e}, {t}"))
}

// ---- 2 ----

fn metric_axioms() -> Check {
    let start = Instant::now();
    let mut r = rng("acceptance-metric");
    let mut rows: Vec<Vec<f64>> = (0..120).map(|_| random_counts(&mut r, 80, 15)).collect();
    // duplicated rows exercise the identity check
    rows[7] = rows[3].clone();
    rows[90] = rows[41].clone();
    let books: Vec<usize> = (0..rows.len()).map(|i| i % 3).collect();
    let w = weights(&rows, &books);
    let mut parts = Vec::new();
    for m in [Measure::Euclidean, Measure::Manhattan] {
        let d = pairwise(&w, m).unwrap();
        let rep = metric_check(&d, Some(&w.weights), 10_000, 42).unwrap();
        ensure!(
            rep.triangle_samples == 10_000,
            "{m}: {} triples sampled",
            rep.triangle_samples
        );
        ensure!(rep.is_clean(), "{m}: {}", rep.summary());
        parts.push(format!("{m} clean"));
    }
    let cos = metric_check(
        &pairwise(&w, Measure::Cosine).unwrap(),
        Some(&w.weights),
        10_000,
        42,
    )
    .unwrap();
    ensure!(cos.triangle_samples == 10_000, "cosine report incomplete");
    parts.push(format!("cosine {}", cos.summary()));
    let t = within(Duration::from_secs(10), start)?;
    Ok(format!("{}; {t}", parts.join("; ")))
}

// ---- 3 ----

fn linkage_fixture() -> DistanceMatrix {
    // 3 books x 4 chapters, d(i, j) = (i - j)^2
    let n = 12;
    let values = (0..n * n)
        .map(|k| ((k / n) as f64 - (k % n) as f64).powi(2))
        .collect();
    let rows = (0..n)
        .map(|i| RowLabel {
            book: i / 4,
            chapter: (i % 4) as u32 + 1,
        })
        .collect();
    let books = ["A", "B", "C"]
        .iter()
        .enumerate()
        .map(|(i, b)| BookLabel::new(i, *b))
        .collect();
    DistanceMatrix::from_values(values, rows, books, Measure::Euclidean).unwrap()
}

fn linkage_correctness() -> Check {
    let d = linkage_fixture();
    // Hand aggregates per block. Same-book blocks include the zero self-pairs.
    // Cross blocks between neighbouring books hold offsets 1..7, the A-C block
    // offsets 5..11.
    let diag = (0.0, 9.0, 40.0 / 16.0, 1.0);
    let near = (1.0, 49.0, 296.0 / 16.0, 16.0);
    let far = (25.0, 121.0, 1064.0 / 16.0, 64.0);
    let expect = [[diag, near, far], [near, diag, near], [far, near, diag]];
    for l in Linkage::ALL {
        let b = book_linkage(&d, l);
        for a in 0..3 {
            for c in 0..3 {
                let e = expect[a][c];
                let want = match l {
                    Linkage::Min => e.0,
                    Linkage::Max => e.1,
                    Linkage::Mean => e.2,
                    Linkage::Median => e.3,
                };
                ensure!(b.get(a, c) == want, "{l} ({a},{c}) = {} not {want}", b.get(a, c));
            }
        }
    }

    let mut r = rng("acceptance-linkage");
    for trial in 0..50 {
        let n = r.gen_range(6..24);
        let n_books = r.gen_range(2..5);
        let mut books_of: Vec<usize> = (0..n)
            .map(|i| if i < n_books { i } else { r.gen_range(0..n_books) })
            .collect();
        books_of.sort_unstable();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = r.gen_range(0.0..100.0);
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        let mut chapter = vec![0u32; n_books];
        let rows = books_of
            .iter()
            .map(|&b| {
                chapter[b] += 1;
                RowLabel {
                    book: b,
                    chapter: chapter[b],
                }
            })
            .collect();
        let books = (0..n_books).map(|b| BookLabel::new(b, format!("B{b}"))).collect();
        let d = DistanceMatrix::from_values(values, rows, books, Measure::Euclidean).unwrap();
        let [lo, hi, mean, med] =
            [Linkage::Min, Linkage::Max, Linkage::Mean, Linkage::Median].map(|l| book_linkage(&d, l));
        for k in 0..n_books * n_books {
            let (a, b, m, md) = (lo.values()[k], hi.values()[k], mean.values()[k], med.values()[k]);
            ensure!(a <= md, "trial {trial}: min {a} > median {md}");
            ensure!(a <= m && m <= b, "trial {trial}: mean {m} outside [{a}, {b}]");
        }
    }
    Ok("hand aggregates exact for all four linkages; 50 random matrices ordered".into())
}

// ---- 4 ----

fn mnb_oracle() -> Check {
    let data = LabeledDataset::new(
        Csr::from_dense(&[vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap(),
        vec![0, 1],
        vec!["A".into(), "B".into()],
        Vocabulary::new(["god", "tao"]),
        vec!["a".into(), "b".into()],
    )
    .unwrap();
    let m = train_mnb(&data, 1.0).unwrap();
    let lik: Vec<f64> = m.log_likelihoods.iter().map(|v| v.exp()).collect();
    for (got, want) in lik.iter().zip([0.75, 0.25, 0.25, 0.75]) {
        ensure!((got - want).abs() <= 1e-12, "likelihood {got} vs {want}");
    }
    for p in &m.log_priors {
        ensure!((p.exp() - 0.5).abs() <= 1e-12, "prior {}", p.exp());
    }
    let god = Csr::from_dense(&[vec![1.0, 0.0]]).unwrap();
    let pred = m.predict(god.row(0));
    let (pa, pb) = (0.5 * 0.75, 0.5 * 0.25);
    let want = [pa / (pa + pb), pb / (pa + pb)];
    ensure!(pred.label == 0, "classified as {}", pred.label);
    for (got, w) in pred.scores.iter().zip(want) {
        ensure!((got - w).abs() <= 1e-12, "posterior {got} vs {w}");
    }
    Ok("posteriors 0.75/0.25".into())
}

fn knn_oracle() -> Check {
    let mut r = rng("acceptance-knn");
    let mut checked = 0;
    for fixture in 0..4 {
        let rows: Vec<Vec<f64>> = (0..50)
            .map(|_| {
                let mut v: Vec<f64> = (0..5).map(|_| f64::from(r.gen_range(0..4u32))).collect();
                if v.iter().all(|&x| x == 0.0) {
                    v[0] = 1.0;
                }
                v
            })
            .collect();
        let labels: Vec<usize> = (0..50).map(|_| r.gen_range(0..3)).collect();
        let data = dataset(&rows, &labels, &["A", "B", "C"]);
        let queries: Vec<Vec<f64>> = rows
            .iter()
            .cloned()
            .chain((0..50).map(|_| random_counts(&mut r, 5, 3)))
            .collect();
        let qm = Csr::from_dense(&queries).unwrap();
        for m in Measure::ALL {
            for k in [1, 3, 5] {
                let model = train_knn(&data, k, m).unwrap();
                for (qi, q) in queries.iter().enumerate() {
                    let mut scan: Vec<(f64, usize)> = rows
                        .iter()
                        .enumerate()
                        .map(|(i, x)| (m.distance(q, x).unwrap(), i))
                        .collect();
                    scan.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
                    let nearest: Vec<usize> = scan[..k].iter().map(|&(_, i)| i).collect();
                    let mut votes = [0usize; 3];
                    for &i in &nearest {
                        votes[labels[i]] += 1;
                    }
                    let best = *votes.iter().max().unwrap();
                    let label = votes.iter().position(|&v| v == best).unwrap();
                    let got = model.predict(qm.row(qi)).unwrap();
                    ensure!(
                        model.neighbors(qm.row(qi)).unwrap() == nearest,
                        "fixture {fixture} {m} k={k} query {qi}: neighbours differ"
                    );
                    ensure!(
                        got.label == label,
                        "fixture {fixture} {m} k={k} query {qi}: {} vs {label}",
                        got.label
                    );
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} queries match the exhaustive scan"))
}

fn svm_oracle() -> Check {
    let mut r = rng("acceptance-svm");
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    while rows.len() < 60 {
        let (x, y): (f64, f64) = (r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0));
        let s = x + 0.5 * y - 0.3;
        if s.abs() < 0.4 {
            continue;
        }
        rows.push(vec![x, y]);
        labels.push(usize::from(s > 0.0));
    }
    let data = dataset(&rows, &labels, &["neg", "pos"]);
    let model = train_svm(&data, 1e-2, 100, 42).unwrap();
    let correct = (0..rows.len())
        .filter(|&i| model.predict(data.features.row(i)).label == labels[i])
        .count();
    ensure!(
        correct == rows.len(),
        "training accuracy {correct}/{}",
        rows.len()
    );
    for (t, trace) in model.traces.iter().enumerate() {
        ensure!(
            trace.len() == 101 && trace[0] == 1.0,
            "class {t}: trace starts {:?}",
            &trace[..2]
        );
        // trace[0] is w = 0; the epoch averages follow
        for e in 2..trace.len() {
            ensure!(
                trace[e] <= trace[e - 1] * 1.05,
                "class {t}: objective rose from {} to {} at epoch {e}",
                trace[e - 1],
                trace[e]
            );
        }
        ensure!(trace[100] <= trace[0], "class {t}: final objective above L(0)");
    }
    let last: Vec<String> = model
        .traces
        .iter()
        .map(|t| format!("{:.4}", t.last().unwrap()))
        .collect();
    Ok(format!(
        "accuracy 1.0 after 100 epochs, final objectives {}",
        last.join("/")
    ))
}

fn rf_oracle() -> Check {
    let mut r = rng("acceptance-rf");
    let mut seen = BTreeSet::new();
    let mut rows = Vec::new();
    while rows.len() < 80 {
        let v: Vec<u32> = (0..4).map(|_| r.gen_range(0..10)).collect();
        if seen.insert(v.clone()) {
            rows.push(v.into_iter().map(f64::from).collect::<Vec<f64>>());
        }
    }
    let labels: Vec<usize> = (0..rows.len()).map(|_| r.gen_range(0..3)).collect();
    let data = dataset(&rows, &labels, &["A", "B", "C"]);
    let cfg = RfConfig {
        n_trees: 1,
        max_depth: None,
        mtry: Some(4),
        bootstrap: false,
        seed: 42,
    };
    let model = train_rf_with(&data, &cfg).unwrap();
    let correct = (0..rows.len())
        .filter(|&i| model.predict(data.features.row(i)).label == labels[i])
        .count();
    ensure!(
        correct == rows.len(),
        "training accuracy {correct}/{}",
        rows.len()
    );
    Ok(format!(
        "one tree of depth {} fits {} random labels",
        model.trees[0].depth(),
        rows.len()
    ))
}

fn classifier_oracles() -> Check {
    let parts = [mnb_oracle()?, knn_oracle()?, svm_oracle()?, rf_oracle()?];
    Ok(format!(
        "MNB {}; KNN {}; SVM {}; RF {}",
        parts[0], parts[1], parts[2], parts[3]
    ))
}

// ---- 5 ----

fn run_eval(out: &Path) -> Result<(), String> {
    let manifest = workspace().join("data/toy/manifest.toml");
    let o = Command::new(env!("CARGO_BIN_EXE_textmine"))
        .args(["--seed", "42", "--manifest"])
        .arg(&manifest)
        .arg("--out")
        .arg(out)
        .arg("eval")
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(
        o.status.success(),
        "eval failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    Ok(())
}

fn csv_files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    v.sort();
    v
}

fn cv_determinism() -> Check {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_eval(a.path())?;
    run_eval(b.path())?;
    let (fa, fb) = (
        csv_files(&a.path().join("eval")),
        csv_files(&b.path().join("eval")),
    );
    ensure!(
        !fa.is_empty() && fa.len() == fb.len(),
        "{} vs {} csv files",
        fa.len(),
        fb.len()
    );
    for (x, y) in fa.iter().zip(&fb) {
        ensure!(x.file_name() == y.file_name(), "file lists differ");
        ensure!(
            std::fs::read(x).unwrap() == std::fs::read(y).unwrap(),
            "{} differs",
            x.display()
        );
    }

    // every chapter in exactly one test fold
    let folds = std::fs::read_to_string(a.path().join("eval/folds.csv")).unwrap();
    let mut seen: Vec<usize> = folds
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    seen.sort_unstable();
    ensure!(seen == (0..12).collect::<Vec<_>>(), "folds.csv covers {seen:?}");
    let data = LabeledDataset::from_counts(&build_dtm(&toy_corpus(), &PreprocessConfig::default()).unwrap());
    let f = make_folds(data.len(), 10, 42).unwrap();
    let mut tested = vec![0; data.len()];
    for k in 0..f.m {
        for i in f.test_indices(k) {
            tested[i] += 1;
        }
    }
    ensure!(tested.iter().all(|&c| c == 1), "test counts {tested:?}");
    let cv = cross_validate(&Params::Mnb { alpha: 1.0 }, &data, &f).unwrap();
    ensure!(
        cv.confusion.total() == data.len() as u64,
        "confusion total {}",
        cv.confusion.total()
    );

    // k = 1 is perfect on tight clusters; k = n_train votes the base rate
    let mut r = rng("acceptance-grid");
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..30 {
        let t = i % 3;
        let mut v: Vec<f64> = (0..3).map(|_| r.gen_range(0.0..1.0)).collect();
        v[t] += 20.0;
        rows.push(v);
        labels.push(t);
    }
    let data = dataset(&rows, &labels, &["A", "B", "C"]);
    let folds = make_folds(30, 5, 42).unwrap();
    let grid = Grids::knn(&[1, 24], Measure::Euclidean);
    let g = grid_search(&grid, &data, &folds).unwrap();
    ensure!(g.best_index == 0, "selected {}", g.best_params());
    let acc: Vec<f64> = g.cv.iter().map(|c| c.as_ref().unwrap().pooled_accuracy).collect();
    ensure!(acc[0] == 1.0 && acc[1] < 1.0, "grid accuracies {acc:?}");
    Ok(format!(
        "{} eval CSVs identical; 12 chapters tested once; grid picked k=1 ({:.2} vs {:.2})",
        fa.len(),
        acc[0],
        acc[1]
    ))
}

// ---- 6 to 8 ----

fn scripture_manifest() -> Option<PathBuf> {
    let p = std::env::var_os("TEXTMINE_SCRIPTURE_MANIFEST")
        .map(PathBuf::from)
        .unwrap_or_else(|| workspace().join("data/scriptures/manifest.toml"));
    p.is_file().then_some(p)
}

fn scripture_corpus(need_books: usize) -> Result<Corpus, Outcome> {
    let Some(path) = scripture_manifest() else {
        return Err(Outcome::Blocked(
            "nine-book corpus not present (set TEXTMINE_SCRIPTURE_MANIFEST)".into(),
        ));
    };
    let root = path.parent().unwrap_or(Path::new("."));
    let corpus = CorpusManifest::from_file(&path)
        .and_then(|m| load_corpus(root, &m))
        .map_err(|e| Outcome::Fail(format!("loading {}: {e}", path.display())))?;
    if corpus.books().len() < need_books {
        return Err(Outcome::Blocked(format!(
            "manifest has {} of {need_books} books",
            corpus.books().len()
        )));
    }
    Ok(corpus)
}

fn outcome(c: Check) -> Outcome {
    match c {
        Ok(s) => Outcome::Pass(s),
        Err(s) => Outcome::Fail(s),
    }
}

fn headline_ordering() -> Outcome {
    let corpus = match scripture_corpus(9) {
        Ok(c) => c,
        Err(o) => return o,
    };
    outcome((|| {
        let start = Instant::now();
        let dtm = build_dtm(&corpus, &PreprocessConfig::default()).map_err(|e| e.to_string())?;
        let data = LabeledDataset::from_counts(&dtm);
        let folds = make_folds(data.len(), 10, 42).map_err(|e| e.to_string())?;
        let bench = benchmark_all(&data, &data, &folds, &Grids::default(), &ModelKind::ALL)
            .map_err(|e| e.to_string())?;
        let acc = |k| bench.row(k).unwrap().cv_accuracy();
        let (mnb, svm, rf, knn) = (
            acc(ModelKind::Mnb),
            acc(ModelKind::Svm),
            acc(ModelKind::Rf),
            acc(ModelKind::Knn),
        );
        let table = format!("MNB {mnb:.4} SVM {svm:.4} RF {rf:.4} KNN {knn:.4}");
        ensure!(mnb > svm && svm > rf && rf > knn, "ordering broken: {table}");
        ensure!(mnb >= 0.80, "MNB below 0.80: {table}");
        let t = within(Duration::from_secs(600), start)?;
        Ok(format!("{table}; {t}"))
    })())
}

fn distance_claims() -> Outcome {
    let corpus = match scripture_corpus(9) {
        Ok(c) => c,
        Err(o) => return o,
    };
    outcome((|| {
        let dtm = build_dtm(&corpus, &PreprocessConfig::default()).map_err(|e| e.to_string())?;
        let c = measure_correlation(&dtm.as_weights(), &Measure::ALL, CorrelationMethod::Pearson)
            .map_err(|e| e.to_string())?;
        for a in 0..4 {
            ensure!(
                (c.get(a, a) - 1.0).abs() <= 1e-12,
                "diagonal {a} = {}",
                c.get(a, a)
            );
            for b in 0..4 {
                ensure!(
                    (c.get(a, b) - c.get(b, a)).abs() <= 1e-12,
                    "asymmetric at ({a},{b})"
                );
            }
        }
        let e = |m| c.between(Measure::Euclidean, m).unwrap();
        let (em, ej, ec) = (e(Measure::Manhattan), e(Measure::Jaccard), e(Measure::Cosine));
        ensure!(em > ej && em > ec, "corr E-M {em:.4}, E-J {ej:.4}, E-C {ec:.4}");
        Ok(format!("corr E-M {em:.4} > E-J {ej:.4}, E-C {ec:.4}"))
    })())
}

fn quran_sanity() -> Outcome {
    let corpus = match scripture_corpus(1) {
        Ok(c) => c,
        Err(o) => return o,
    };
    let Some(book) = corpus
        .books()
        .iter()
        .find(|b| b.name.to_lowercase().contains("quran"))
        .cloned()
    else {
        return Outcome::Blocked("no book named Quran in the manifest".into());
    };
    outcome((|| {
        let cfg = PreprocessConfig::default();
        let docs: Vec<&RawDocument> = corpus.documents().iter().filter(|d| d.book == book).collect();
        let raw: usize = docs.iter().map(|d| tokenize_words(&d.text).len()).sum();
        let tokens: Vec<String> = docs.iter().flat_map(|d| cfg.run(&d.text)).collect();
        let rep = frequency_report(&tokens, 5).map_err(|e| e.to_string())?;
        let top: Vec<&str> = rep.entries.iter().map(|e| e.token.as_str()).collect();
        ensure!(top.contains(&"god") && top.contains(&"lord"), "top five {top:?}");
        Ok(format!("top five {top:?}; {raw} raw tokens"))
    })())
}

// ---- 9 ----

fn round_trips() -> Check {
    let corpus = toy_corpus();
    let dtm = build_dtm(&corpus, &PreprocessConfig::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = MatrixFiles::new(dir.path(), "counts");
    dtm.export(&files).unwrap();
    ensure!(
        DocTermMatrix::import(&files).unwrap() == dtm,
        "count matrix changed"
    );
    let w = tfidf(&dtm).unwrap();
    let files = MatrixFiles::new(dir.path(), "tfidf");
    w.export(&files).unwrap();
    let back = textmine::dtm::WeightMatrix::import(&files).unwrap();
    let bits = |m: &WeightMatrix| {
        m.weights
            .rows()
            .flat_map(|r| r.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>())
            .collect::<Vec<u64>>()
    };
    ensure!(back == w && bits(&back) == bits(&w), "tf-idf matrix changed");
    ensure!(
        back.to_matrix_market() == w.to_matrix_market(),
        "tf-idf text changed"
    );

    let data = LabeledDataset::from_counts(&dtm);
    let weighted = LabeledDataset::from_weights(&w);
    let models = [
        Params::Mnb { alpha: 0.5 }.train(&data, 42).unwrap(),
        Params::Knn {
            k: 3,
            measure: Measure::Cosine,
        }
        .train(&weighted, 42)
        .unwrap(),
        Params::Svm {
            lambda: 1e-3,
            epochs: 10,
        }
        .train(&weighted, 42)
        .unwrap(),
        Params::Rf {
            n_trees: 10,
            max_depth: None,
            mtry: None,
        }
        .train(&weighted, 42)
        .unwrap(),
    ];
    for m in &models {
        let text = m.to_text(&data.classes);
        let (back, classes) = Model::from_text(&text).map_err(|e| format!("{}: {e}", m.kind()))?;
        ensure!(
            &back == m && classes == data.classes,
            "{} model changed",
            m.kind()
        );
        ensure!(back.to_text(&classes) == text, "{} text changed", m.kind());
        let (p, q) = (
            m.classify_all(&weighted.features).unwrap(),
            back.classify_all(&weighted.features).unwrap(),
        );
        let sb = |v: &[textmine::classify::Prediction]| {
            v.iter()
                .flat_map(|p| p.scores.iter().map(|s| s.to_bits()))
                .collect::<Vec<_>>()
        };
        ensure!(sb(&p) == sb(&q), "{} predictions changed", m.kind());
    }

    let back = Corpus::from_cache_str(&corpus.to_cache_string()).map_err(|e| e.to_string())?;
    ensure!(back == corpus, "toy corpus cache changed");
    let book = BookLabel::new(0, "Odd\tname");
    let odd = Corpus::new(
        vec![book.clone()],
        vec![
            RawDocument::new(
                book.clone(),
                1,
                "tab\there\nnew line \\ backslash \\t literal, é ü 漢",
            )
            .unwrap(),
            RawDocument::new(book, 2, "\r\ncarriage\r\n").unwrap(),
        ],
    )
    .map_err(|e| e.to_string())?;
    let back = Corpus::from_cache_str(&odd.to_cache_string()).map_err(|e| e.to_string())?;
    ensure!(back == odd, "escaped corpus changed");
    Ok("count and tf-idf matrices, four model kinds and the corpus cache are exact".into())
}

type Criterion = Box<dyn Fn() -> Outcome>;

fn main() {
    let strict = std::env::var("TEXTMINE_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let criteria: Vec<(u8, &str, Criterion)> = vec![
        (1, "formula oracles", Box::new(|| outcome(formula_oracles()))),
        (2, "metric axioms", Box::new(|| outcome(metric_axioms()))),
        (3, "linkage", Box::new(|| outcome(linkage_correctness()))),
        (
            4,
            "classifier oracles",
            Box::new(|| outcome(classifier_oracles())),
        ),
        (
            5,
            "cv and grid determinism",
            Box::new(|| outcome(cv_determinism())),
        ),
        (
            6,
            "classifier ordering on the nine books",
            Box::new(headline_ordering),
        ),
        (
            7,
            "distance correlations on the nine books",
            Box::new(distance_claims),
        ),
        (8, "quran token ranking", Box::new(quran_sanity)),
        (9, "round trips", Box::new(|| outcome(round_trips()))),
    ];
    let mut failed = Vec::new();
    for (id, name, run) in criteria {
        match run() {
            Outcome::Pass(s) => println!("PASS [{id}] {name}: {s}"),
            Outcome::Fail(s) => {
                println!("FAIL [{id}] {name}: {s}");
                failed.push(id);
            }
            Outcome::Blocked(s) => {
                println!("FAIL [{id}] {name}: blocked, {s}");
                if strict {
                    failed.push(id);
                }
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
