use std::path::PathBuf;

use textmine::classify::{train_mnb, train_svm, LabeledDataset, Params};
use textmine::corpus::{load_corpus, CorpusManifest};
use textmine::dtm::build_dtm;
use textmine::preprocess::PreprocessConfig;
use textmine::sparse::Csr;

fn toy() -> LabeledDataset {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/toy");
    let manifest = CorpusManifest::from_file(&root.join("manifest.toml")).unwrap();
    let corpus = load_corpus(&root, &manifest).unwrap();
    LabeledDataset::from_counts(&build_dtm(&corpus, &PreprocessConfig::default()).unwrap())
}

#[test]
fn svm_objective_falls_across_epochs_on_toy_corpus() {
    let data = toy();
    let m = train_svm(&data, 0.1, 50, 42).unwrap();
    for trace in &m.traces {
        assert_eq!(trace[0], 1.0);
        for e in 2..trace.len() {
            assert!(
                trace[e] <= trace[e - 1] * 1.05,
                "epoch {e}: {} -> {}",
                trace[e - 1],
                trace[e]
            );
        }
        assert!(trace.last().unwrap() < &trace[0]);
    }
}

#[test]
fn svm_ignores_input_order_on_toy_corpus() {
    let data = toy();
    let mut perm: Vec<usize> = (0..data.len()).collect();
    perm.reverse();
    perm.swap(0, 5);
    let a = train_svm(&data, 0.01, 5, 3).unwrap();
    let b = train_svm(&data.subset(&perm), 0.01, 5, 3).unwrap();
    assert_eq!(a, b);
}

#[test]
fn mnb_label_survives_integer_scaling() {
    let data = toy();
    let m = train_mnb(&data, 0.5).unwrap();
    for i in 0..data.len() {
        let x = data.features.row_dense(i);
        let base = m.predict(data.features.row(i)).label;
        for k in [2.0, 3.0, 7.0] {
            let scaled = Csr::from_dense(&[x.iter().map(|v| v * k).collect()]).unwrap();
            assert_eq!(m.predict(scaled.row(0)).label, base, "row {i} x{k}");
        }
    }
}

#[test]
fn retraining_is_bit_identical() {
    let data = toy();
    for p in [
        Params::Mnb { alpha: 1.0 },
        Params::Svm {
            lambda: 0.01,
            epochs: 5,
        },
        Params::Rf {
            n_trees: 20,
            max_depth: Some(4),
            mtry: None,
        },
        Params::Knn {
            k: 3,
            measure: textmine::distance::Measure::Jaccard,
        },
    ] {
        let (a, b) = (p.train(&data, 11).unwrap(), p.train(&data, 11).unwrap());
        assert_eq!(a.to_text(&data.classes), b.to_text(&data.classes), "{p}");
    }
}
