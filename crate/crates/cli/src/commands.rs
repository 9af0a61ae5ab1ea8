use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use textmine::classify::{scores_csv, LabeledDataset, ModelKind};
use textmine::corpus::{load_corpus, Corpus, CorpusManifest};
use textmine::distance::{book_linkage, correlate_matrices, metric_check, pairwise, DistanceMatrix, Measure};
use textmine::dtm::{build_dtm_from_tokens, slice_book, tfidf, DocTermMatrix, MatrixFiles, WeightMatrix};
use textmine::evaluate::{benchmark_all, grid_search, make_folds, make_folds_stratified, FoldAssignment};
use textmine::io::write_atomic;
use textmine::preprocess::{frequency_report, pos_report, pos_tag, tokenize_words};

use crate::cache::{dist_key, hash_parts, Cache};
use crate::error::{CliError, CliResult};
use crate::settings::{FeatureMode, RunConfig};

/// Shared state for one invocation. Loaded pieces are kept so `report` does
/// not redo them.
pub struct Session {
    pub cfg: RunConfig,
    cache: Cache,
    corpus: Option<Corpus>,
    tokens: Option<Vec<Vec<String>>>,
    dtm: Option<(DocTermMatrix, String)>,
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    write_atomic(path, contents.as_bytes())?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn slug(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() {
                c.to_ascii_lowercase()
            } else {
                '_'
            }
        })
        .collect();
    s.trim_matches('_').to_string()
}

impl Session {
    pub fn new(cfg: RunConfig) -> Self {
        let cache = Cache::new(&cfg.out);
        Session {
            cfg,
            cache,
            corpus: None,
            tokens: None,
            dtm: None,
        }
    }

    fn corpus(&mut self) -> CliResult<&Corpus> {
        if self.corpus.is_none() {
            let path = self.cfg.manifest()?.to_path_buf();
            let manifest = CorpusManifest::from_file(&path).map_err(|e| match e {
                textmine::Error::Manifest(m) => CliError::Config(format!("{}: {m}", path.display())),
                other => other.into(),
            })?;
            let root = path.parent().unwrap_or(Path::new("."));
            let root = if root.as_os_str().is_empty() {
                Path::new(".")
            } else {
                root
            };
            self.corpus = Some(load_corpus(root, &manifest)?);
        }
        Ok(self.corpus.as_ref().expect("just loaded"))
    }

    fn tokens(&mut self) -> CliResult<&Vec<Vec<String>>> {
        if self.tokens.is_none() {
            let pre = self.cfg.preprocess.clone();
            let tokens = self
                .corpus()?
                .documents()
                .iter()
                .map(|d| pre.run(&d.text))
                .collect();
            self.tokens = Some(tokens);
        }
        Ok(self.tokens.as_ref().expect("just built"))
    }

    /// Count matrix and its cache key.
    fn dtm(&mut self) -> CliResult<(DocTermMatrix, String)> {
        if let Some(d) = &self.dtm {
            return Ok(d.clone());
        }
        let fingerprint = self.cfg.preprocess.fingerprint();
        let key = hash_parts(&[
            b"dtm v1",
            self.corpus()?.to_cache_string().as_bytes(),
            fingerprint.as_bytes(),
        ]);
        let dtm = match self.cache.load_dtm(&key) {
            Some(d) => {
                log::info!("using cached matrix {key}");
                d
            }
            None => {
                let tokens = self.tokens()?.clone();
                let d = build_dtm_from_tokens(self.corpus()?, &tokens)?;
                self.cache.store_dtm(&key, &d)?;
                d
            }
        };
        self.dtm = Some((dtm, key));
        Ok(self.dtm.clone().expect("just set"))
    }

    fn weights(&mut self) -> CliResult<(WeightMatrix, String)> {
        let (dtm, key) = self.dtm()?;
        let w = match self.cfg.features {
            FeatureMode::Counts => dtm.as_weights(),
            FeatureMode::Tfidf => tfidf(&dtm)?,
        };
        Ok((w, key))
    }

    fn distances(&mut self, measure: Measure) -> CliResult<DistanceMatrix> {
        let (w, key) = self.weights()?;
        let dkey = dist_key(&key, self.cfg.features.name(), measure);
        let fresh = || pairwise(&w, measure);
        // The cached file holds values only; labels come from the matrix.
        let template = DistanceMatrix::from_values(
            vec![0.0; w.rows.len() * w.rows.len()],
            w.rows.clone(),
            w.books.clone(),
            measure,
        )?;
        if let Some(d) = self.cache.load_distances(&dkey, &template) {
            return Ok(d);
        }
        let d = fresh()?;
        self.cache.store_distances(&dkey, &d)?;
        Ok(d)
    }

    pub fn ingest(&mut self, dest: &Path) -> CliResult<String> {
        let corpus = self.corpus()?;
        let mut books = String::from("book,chapters\n");
        for (b, n) in corpus.books().iter().zip(corpus.book_sizes()) {
            let _ = writeln!(books, "{},{n}", textmine::io::csv_field(&b.name));
        }
        let summary = format!("{} books, {} chapters", corpus.books().len(), corpus.len());
        let cache = corpus.to_cache_string();
        write(&dest.join("ingest/corpus.tsv"), &cache)?;
        write(&dest.join("ingest/books.csv"), &books)?;
        Ok(summary)
    }

    pub fn preprocess(&mut self, dest: &Path) -> CliResult<String> {
        let top_k = self.cfg.top_k;
        let tokens = self.tokens()?.clone();
        let corpus = self.corpus()?.clone();
        let dir = dest.join("preprocess");
        let mut counts = String::from("book,raw_tokens,clean_tokens,distinct_tokens\n");
        for book in corpus.books() {
            let idx: Vec<usize> = (0..corpus.len())
                .filter(|&i| corpus.documents()[i].book.id == book.id)
                .collect();
            let raw: usize = idx
                .iter()
                .map(|&i| tokenize_words(&corpus.documents()[i].text).len())
                .sum();
            let clean: Vec<String> = idx.iter().flat_map(|&i| tokens[i].iter().cloned()).collect();
            let distinct = clean.iter().collect::<std::collections::BTreeSet<_>>().len();
            let _ = writeln!(
                counts,
                "{},{raw},{},{distinct}",
                textmine::io::csv_field(&book.name),
                clean.len()
            );
            if !clean.is_empty() {
                let rep = frequency_report(&clean, top_k)?;
                write(
                    &dir.join(format!("frequency_{}.csv", slug(&book.name))),
                    &rep.to_csv(),
                )?;
            }
        }
        write(&dir.join("token_counts.csv"), &counts)?;
        let all: Vec<String> = tokens.into_iter().flatten().collect();
        let rep = frequency_report(&all, top_k)?;
        write(&dir.join("frequency.csv"), &rep.to_csv())?;
        if self.cfg.pos {
            let tagged = pos_tag(&all);
            write(&dir.join("pos.csv"), &pos_report(&tagged).to_csv())?;
            let mut table = String::from("token,count,tag\n");
            let top: Vec<String> = rep.entries.iter().map(|e| e.token.clone()).collect();
            for (e, t) in rep.entries.iter().zip(pos_tag(&top)) {
                let _ = writeln!(
                    table,
                    "{},{},{}",
                    textmine::io::csv_field(&e.token),
                    e.count,
                    t.tag.as_str()
                );
            }
            write(&dir.join("pos_top_tokens.csv"), &table)?;
        }
        Ok(format!(
            "{} tokens after cleaning, {} distinct",
            rep.total, rep.distinct
        ))
    }

    pub fn dtm_cmd(&mut self, dest: &Path) -> CliResult<String> {
        let (dtm, _) = self.dtm()?;
        let dir = dest.join("dtm");
        dtm.export(&MatrixFiles::new(&dir, "counts"))?;
        if self.cfg.features == FeatureMode::Tfidf {
            tfidf(&dtm)?.export(&MatrixFiles::new(&dir, "tfidf"))?;
        }
        let mut shapes = String::from("matrix,rows,cols,nnz\n");
        let (n, p) = dtm.shape();
        let _ = writeln!(shapes, "all,{n},{p},{}", dtm.counts.nnz());
        for book in &dtm.books.clone() {
            let s = slice_book(&dtm, book)?;
            let (bn, bp) = s.shape();
            let _ = writeln!(
                shapes,
                "{},{bn},{bp},{}",
                textmine::io::csv_field(&book.name),
                s.counts.nnz()
            );
        }
        write(&dir.join("shapes.csv"), &shapes)?;
        Ok(format!("{n} x {p}"))
    }

    pub fn dist(&mut self, dest: &Path) -> CliResult<String> {
        let dir = dest.join("dist");
        let mut lines = Vec::new();
        let mut broken = Vec::new();
        let (w, _) = self.weights()?;
        for &m in &self.cfg.measures.clone() {
            let d = self.distances(m)?;
            write(&dir.join(format!("{m}.csv")), &d.to_csv())?;
            write(&dir.join(format!("{m}.svg")), &d.heatmap().to_svg())?;
            let report = metric_check(&d, Some(&w.weights), self.cfg.metric_samples, self.cfg.seed)?;
            let mut text = format!("{m}: {}\n", report.summary());
            for (i, j, k) in report.triangle.iter().take(50) {
                let _ = writeln!(
                    text,
                    "triangle d({i},{k}) = {} > d({i},{j}) + d({j},{k}) = {}",
                    d.get(*i, *k),
                    d.get(*i, *j) + d.get(*j, *k)
                );
            }
            write(&dir.join(format!("{m}_metric.txt")), &text)?;
            let proper = matches!(m, Measure::Euclidean | Measure::Manhattan | Measure::Jaccard);
            if proper && !report.is_clean() {
                broken.push(format!("{m}: {}", report.summary()));
            }
            lines.push(format!("{m}: {}", report.summary()));
        }
        if !broken.is_empty() {
            return Err(CliError::Invariant(format!(
                "metric axioms failed: {}",
                broken.join("; ")
            )));
        }
        Ok(lines.join("\n"))
    }

    pub fn linkage(&mut self, dest: &Path) -> CliResult<String> {
        let dir = dest.join("linkage");
        let mut n = 0;
        for &m in &self.cfg.measures.clone() {
            let d = self.distances(m)?;
            for &l in &self.cfg.linkages {
                let b = book_linkage(&d, l);
                write(&dir.join(format!("{m}_{l}.csv")), &b.to_csv())?;
                write(&dir.join(format!("{m}_{l}.svg")), &b.heatmap().to_svg())?;
                n += 1;
            }
        }
        Ok(format!("{n} book distance matrices"))
    }

    pub fn corr(&mut self, dest: &Path) -> CliResult<String> {
        let ds = self
            .cfg
            .measures
            .clone()
            .into_iter()
            .map(|m| self.distances(m))
            .collect::<CliResult<Vec<_>>>()?;
        let c = correlate_matrices(&ds, self.cfg.correlation)?;
        let k = c.measures.len();
        for a in 0..k {
            if c.get(a, a) != 1.0 || (0..k).any(|b| c.get(a, b) != c.get(b, a)) {
                return Err(CliError::Invariant(
                    "correlation matrix is not symmetric with unit diagonal".into(),
                ));
            }
        }
        let dir = dest.join("corr");
        write(&dir.join("correlation.csv"), &c.to_csv())?;
        write(&dir.join("correlation.svg"), &c.heatmap().to_svg())?;
        Ok(c.to_csv())
    }

    fn datasets(&mut self) -> CliResult<(LabeledDataset, LabeledDataset)> {
        let (dtm, _) = self.dtm()?;
        let counts = LabeledDataset::from_counts(&dtm);
        let features = match self.cfg.features {
            FeatureMode::Counts => counts.clone(),
            FeatureMode::Tfidf => LabeledDataset::from_weights(&tfidf(&dtm)?),
        };
        Ok((counts, features))
    }

    fn folds(&self, data: &LabeledDataset) -> CliResult<FoldAssignment> {
        let f = if self.cfg.stratified {
            make_folds_stratified(&data.labels, self.cfg.folds, self.cfg.seed)?
        } else {
            make_folds(data.len(), self.cfg.folds, self.cfg.seed)?
        };
        Ok(f)
    }

    pub fn train(&mut self, dest: &Path, kind: ModelKind) -> CliResult<String> {
        let (counts, features) = self.datasets()?;
        let data = if kind == ModelKind::Mnb { counts } else { features };
        let folds = self.folds(&data)?;
        let search = grid_search(self.cfg.grids.for_kind(kind), &data, &folds)?;
        let dir = dest.join("train");
        write(
            &dir.join(format!("{kind}.model")),
            &search.best_model.to_text(&data.classes),
        )?;
        write(&dir.join(format!("{kind}_grid.csv")), &search.to_csv())?;
        Ok(format!(
            "{kind}: best {} with cv accuracy {:.4}",
            search.best_params(),
            search.best().pooled_accuracy
        ))
    }

    pub fn eval(&mut self, dest: &Path, kinds: &[ModelKind]) -> CliResult<String> {
        let (counts, features) = self.datasets()?;
        let folds = self.folds(&counts)?;
        let bench = benchmark_all(&counts, &features, &folds, &self.cfg.grids, kinds)?;
        let dir = dest.join("eval");
        write(&dir.join("comparison.csv"), &bench.to_csv())?;
        write(&dir.join("folds.csv"), &folds.to_csv())?;
        write(&dir.join("fold_accuracy.csv"), &bench.folds_csv())?;
        for row in &bench.rows {
            let best = row.search.best();
            if best.confusion.total() as usize != counts.len() {
                return Err(CliError::Invariant(format!(
                    "{}: confusion matrix counts {} predictions for {} chapters",
                    row.kind,
                    best.confusion.total(),
                    counts.len()
                )));
            }
            let k = row.kind;
            write(&dir.join(format!("{k}_confusion.csv")), &best.confusion.to_csv())?;
            write(
                &dir.join(format!("{k}_per_class.csv")),
                &best.confusion.per_class_csv(),
            )?;
            write(
                &dir.join(format!("{k}_confusion.svg")),
                &best.confusion.heatmap(&format!("{k} confusion matrix")).to_svg(),
            )?;
            write(
                &dir.join(format!("{k}_scores.csv")),
                &scores_csv(
                    &counts.row_names,
                    &counts.classes,
                    &counts.labels,
                    &best.predictions,
                ),
            )?;
            write(&dir.join(format!("{k}_grid.csv")), &row.search.to_csv())?;
        }
        Ok(bench.to_csv())
    }

    /// Runs every stage into `<out>/report`.
    pub fn report(&mut self) -> CliResult<String> {
        let dest: PathBuf = self.cfg.out.join("report");
        let mut summary = String::new();
        let mut section = |title: &str, body: String| {
            let _ = writeln!(summary, "== {title}\n{}\n", body.trim_end());
        };
        section("corpus", self.ingest(&dest)?);
        section("preprocessing", self.preprocess(&dest)?);
        section("document-term matrix", self.dtm_cmd(&dest)?);
        section("distances", self.dist(&dest)?);
        section("linkage", self.linkage(&dest)?);
        section("measure correlation", self.corr(&dest)?);
        let kinds = self.cfg.models.clone();
        section("classifiers", self.eval(&dest, &kinds)?);
        section("settings", self.cfg.resolved.to_canonical_string());
        write(&dest.join("summary.txt"), &summary)?;
        Ok(summary)
    }
}
