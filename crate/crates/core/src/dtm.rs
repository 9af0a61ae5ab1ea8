//! Document-term matrices and TF-IDF weighting.
//!
//! Rows are chapters in corpus order, columns are the sorted vocabulary.
//! Counts are stored row-compressed; weights share the same sparsity pattern.

use std::collections::{BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use crate::corpus::{BookLabel, Corpus};
use crate::error::{Error, Result};
use crate::io::{fmt_f64, write_atomic};
use crate::preprocess::PreprocessConfig;
use crate::sparse::Csr;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Builds a vocabulary from any collection of terms; duplicates collapse
    /// and the result is sorted.
    pub fn new<I, S>(terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = terms.into_iter().map(Into::into).collect();
        let terms: Vec<String> = set.into_iter().collect();
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Vocabulary { terms, index }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn term(&self, j: usize) -> &str {
        &self.terms[j]
    }

    pub fn position(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }
}

/// Row identity: the book id and 1-based chapter number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowLabel {
    pub book: usize,
    pub chapter: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DocTermMatrix {
    pub counts: Csr<u32>,
    pub rows: Vec<RowLabel>,
    pub books: Vec<BookLabel>,
    pub vocab: Vocabulary,
}

/// Real-valued matrix over the same rows and vocabulary as a
/// [`DocTermMatrix`]: TF-IDF weights, or raw counts viewed as reals.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightMatrix {
    pub weights: Csr<f64>,
    pub rows: Vec<RowLabel>,
    pub books: Vec<BookLabel>,
    pub vocab: Vocabulary,
}

impl WeightMatrix {
    pub fn shape(&self) -> (usize, usize) {
        (self.weights.n_rows(), self.weights.n_cols())
    }

    pub fn labels(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.book).collect()
    }

    /// `BookName:chapter` for every row.
    pub fn row_names(&self) -> Vec<String> {
        row_names(&self.rows, &self.books)
    }
}

pub(crate) fn row_names(rows: &[RowLabel], books: &[BookLabel]) -> Vec<String> {
    rows.iter()
        .map(|r| format!("{}:{}", books[r.book].name, r.chapter))
        .collect()
}

/// Counts every preprocessed token of every document.
pub fn build_dtm(corpus: &Corpus, config: &PreprocessConfig) -> Result<DocTermMatrix> {
    let tokens: Vec<Vec<String>> = corpus.documents().iter().map(|d| config.run(&d.text)).collect();
    build_dtm_from_tokens(corpus, &tokens)
}

/// Same as [`build_dtm`] for documents already preprocessed; `tokens[i]`
/// belongs to the corpus' i-th document.
pub fn build_dtm_from_tokens(corpus: &Corpus, tokens: &[Vec<String>]) -> Result<DocTermMatrix> {
    if corpus.is_empty() {
        return Err(Error::EmptyInput);
    }
    if tokens.len() != corpus.len() {
        return Err(Error::LengthMismatch {
            left: corpus.len(),
            right: tokens.len(),
        });
    }
    if tokens.iter().all(Vec::is_empty) {
        return Err(Error::AllDocumentsEmpty);
    }
    if let Some(i) = tokens.iter().position(Vec::is_empty) {
        let d = &corpus.documents()[i];
        return Err(Error::EmptyDocument {
            book: d.book.name.clone(),
            chapter: d.chapter_index,
        });
    }
    let vocab = Vocabulary::new(tokens.iter().flatten().map(String::as_str));
    let mut counts = Csr::empty(vocab.len());
    for doc in tokens {
        let mut row: HashMap<usize, u32> = HashMap::new();
        for t in doc {
            let j = vocab.position(t).expect("term in vocabulary");
            *row.entry(j).or_default() += 1;
        }
        let mut row: Vec<(usize, u32)> = row.into_iter().collect();
        row.sort_unstable_by_key(|&(j, _)| j);
        counts.push_row(row)?;
    }
    let rows = corpus
        .documents()
        .iter()
        .map(|d| RowLabel {
            book: d.book.id,
            chapter: d.chapter_index,
        })
        .collect();
    Ok(DocTermMatrix {
        counts,
        rows,
        books: corpus.books().to_vec(),
        vocab,
    })
}

impl DocTermMatrix {
    pub fn shape(&self) -> (usize, usize) {
        (self.counts.n_rows(), self.counts.n_cols())
    }

    pub fn labels(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.book).collect()
    }

    pub fn row_names(&self) -> Vec<String> {
        row_names(&self.rows, &self.books)
    }

    /// Total occurrences of each term across the corpus.
    pub fn column_sums(&self) -> Vec<u64> {
        let mut sums = vec![0u64; self.vocab.len()];
        for r in self.counts.rows() {
            for (j, v) in r.iter() {
                sums[j] += u64::from(v);
            }
        }
        sums
    }

    /// Number of documents containing each term.
    pub fn document_frequencies(&self) -> Vec<usize> {
        let mut df = vec![0usize; self.vocab.len()];
        for r in self.counts.rows() {
            for &j in r.indices {
                df[j] += 1;
            }
        }
        df
    }

    pub fn dense_row(&self, i: usize) -> Vec<u32> {
        let mut out = vec![0; self.vocab.len()];
        for (j, v) in self.counts.row(i).iter() {
            out[j] = v;
        }
        out
    }

    /// Counts as reals, for distance computations and classifiers.
    pub fn as_weights(&self) -> WeightMatrix {
        WeightMatrix {
            weights: self.counts.map(f64::from),
            rows: self.rows.clone(),
            books: self.books.clone(),
            vocab: self.vocab.clone(),
        }
    }

    fn book_row_indices(&self, book: &BookLabel) -> Result<Vec<usize>> {
        if self.books.get(book.id) != Some(book) {
            return Err(Error::UnknownBook(book.name.clone()));
        }
        let idx: Vec<usize> = (0..self.rows.len())
            .filter(|&i| self.rows[i].book == book.id)
            .collect();
        if idx.is_empty() {
            return Err(Error::UnknownBook(book.name.clone()));
        }
        Ok(idx)
    }

    /// Stacks matrices row-wise over the union of their vocabularies.
    pub fn stack(parts: &[DocTermMatrix]) -> Result<DocTermMatrix> {
        let first = parts.first().ok_or(Error::EmptyInput)?;
        let vocab = Vocabulary::new(parts.iter().flat_map(|p| p.vocab.terms().iter().cloned()));
        let mut counts = Csr::empty(vocab.len());
        let mut rows = Vec::new();
        for p in parts {
            if p.books != first.books {
                return Err(Error::InvalidCorpus("stacked matrices disagree on books".into()));
            }
            let remap: Vec<usize> = p
                .vocab
                .terms()
                .iter()
                .map(|t| vocab.position(t).expect("union contains term"))
                .collect();
            for r in p.counts.rows() {
                // remap is monotone because both vocabularies are sorted
                counts.push_row(r.iter().map(|(j, v)| (remap[j], v)))?;
            }
            rows.extend_from_slice(&p.rows);
        }
        Ok(DocTermMatrix {
            counts,
            rows,
            books: first.books.clone(),
            vocab,
        })
    }
}

/// The rows of one book, with the vocabulary cut down to the terms that
/// occur in that book.
pub fn slice_book(dtm: &DocTermMatrix, book: &BookLabel) -> Result<DocTermMatrix> {
    let idx = dtm.book_row_indices(book)?;
    let sub = dtm.counts.select_rows(&idx);
    let used: BTreeSet<usize> = sub.rows().flat_map(|r| r.indices.to_vec()).collect();
    let cols: Vec<usize> = used.into_iter().collect();
    Ok(DocTermMatrix {
        counts: sub.select_columns(&cols),
        rows: idx.iter().map(|&i| dtm.rows[i]).collect(),
        books: dtm.books.clone(),
        vocab: Vocabulary::new(cols.iter().map(|&j| dtm.vocab.term(j).to_string())),
    })
}

/// Term frequency of one count row, normalized by the row maximum.
pub fn tf(counts_row: &[u32]) -> Result<Vec<f64>> {
    let max = counts_row.iter().copied().max().unwrap_or(0);
    if max == 0 {
        return Err(Error::ZeroRow(0));
    }
    let max = f64::from(max);
    Ok(counts_row.iter().map(|&c| f64::from(c) / max).collect())
}

/// Inverse document frequency `ln(m / m_j)` for every term.
pub fn idf(dtm: &DocTermMatrix) -> Vec<f64> {
    let m = dtm.rows.len() as f64;
    dtm.document_frequencies()
        .into_iter()
        .map(|mj| (m / mj as f64).ln())
        .collect()
}

pub fn tfidf(dtm: &DocTermMatrix) -> Result<WeightMatrix> {
    let idf = idf(dtm);
    let mut weights = Csr::empty(dtm.vocab.len());
    for (i, r) in dtm.counts.rows().enumerate() {
        let max = r.values.iter().copied().max().ok_or(Error::ZeroRow(i))?;
        if max == 0 {
            return Err(Error::ZeroRow(i));
        }
        let max = f64::from(max);
        weights.push_row(r.iter().map(|(j, c)| (j, f64::from(c) / max * idf[j])))?;
    }
    Ok(WeightMatrix {
        weights,
        rows: dtm.rows.clone(),
        books: dtm.books.clone(),
        vocab: dtm.vocab.clone(),
    })
}

// ---- MatrixMarket export/import ----

/// File names of an exported matrix: `<stem>.mtx`, `<stem>_rows.csv` and
/// `<stem>_vocab.txt`.
#[derive(Clone, Debug)]
pub struct MatrixFiles {
    pub matrix: PathBuf,
    pub rows: PathBuf,
    pub vocab: PathBuf,
}

impl MatrixFiles {
    pub fn new(dir: &Path, stem: &str) -> Self {
        MatrixFiles {
            matrix: dir.join(format!("{stem}.mtx")),
            rows: dir.join(format!("{stem}_rows.csv")),
            vocab: dir.join(format!("{stem}_vocab.txt")),
        }
    }
}

fn mm_header(kind: &str, books: &[BookLabel], n: usize, p: usize, nnz: usize) -> String {
    let mut s = format!("%%MatrixMarket matrix coordinate {kind} general\n");
    for b in books {
        s.push_str(&format!(
            "% book {} {}\n",
            b.id,
            b.name.replace(['\n', '\r'], " ")
        ));
    }
    s.push_str(&format!("{n} {p} {nnz}\n"));
    s
}

pub fn rows_csv(rows: &[RowLabel]) -> String {
    let mut s = String::from("book_id,chapter_index\n");
    for r in rows {
        s.push_str(&format!("{},{}\n", r.book, r.chapter));
    }
    s
}

fn vocab_text(vocab: &Vocabulary) -> String {
    let mut s = String::new();
    for t in vocab.terms() {
        s.push_str(t);
        s.push('\n');
    }
    s
}

struct MmBody<T> {
    books: Vec<BookLabel>,
    n: usize,
    p: usize,
    entries: Vec<(usize, usize, T)>,
}

fn parse_mm<T: std::str::FromStr>(s: &str, kind: &str) -> Result<MmBody<T>> {
    let mut lines = s.lines().enumerate();
    let header = format!("%%MatrixMarket matrix coordinate {kind} general");
    match lines.next() {
        Some((_, h)) if h.trim() == header => {}
        _ => return Err(Error::parse(1, format!("expected `{header}`"))),
    }
    let mut books = Vec::new();
    let mut size: Option<(usize, usize, usize)> = None;
    let mut entries = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        if let Some(rest) = line.strip_prefix("% book ") {
            let (id, name) = rest
                .split_once(' ')
                .ok_or_else(|| Error::parse(lineno, "malformed book comment"))?;
            let id = id.parse().map_err(|_| Error::parse(lineno, "bad book id"))?;
            books.push(BookLabel::new(id, name));
            continue;
        }
        if line.starts_with('%') || line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(Error::parse(lineno, "expected three fields"));
        }
        let a: usize = f[0].parse().map_err(|_| Error::parse(lineno, "bad index"))?;
        let b: usize = f[1].parse().map_err(|_| Error::parse(lineno, "bad index"))?;
        match size {
            None => {
                let nnz = f[2].parse().map_err(|_| Error::parse(lineno, "bad nnz"))?;
                size = Some((a, b, nnz));
            }
            Some((n, p, _)) => {
                if a == 0 || b == 0 || a > n || b > p {
                    return Err(Error::parse(lineno, "entry out of range"));
                }
                let v: T = f[2].parse().map_err(|_| Error::parse(lineno, "bad value"))?;
                entries.push((a - 1, b - 1, v));
            }
        }
    }
    let (n, p, nnz) = size.ok_or_else(|| Error::parse(0, "missing size line"))?;
    if entries.len() != nnz {
        return Err(Error::parse(
            0,
            format!("expected {nnz} entries, found {}", entries.len()),
        ));
    }
    entries.sort_by_key(|&(i, j, _)| (i, j));
    Ok(MmBody { books, n, p, entries })
}

fn csr_from_entries<T: Copy>(n: usize, p: usize, entries: &[(usize, usize, T)]) -> Result<Csr<T>> {
    let mut m = Csr::empty(p);
    let mut k = 0;
    for i in 0..n {
        let start = k;
        while k < entries.len() && entries[k].0 == i {
            k += 1;
        }
        m.push_row(entries[start..k].iter().map(|&(_, j, v)| (j, v)))?;
    }
    Ok(m)
}

fn parse_rows_csv(s: &str) -> Result<Vec<RowLabel>> {
    let mut lines = s.lines().enumerate();
    match lines.next() {
        Some((_, "book_id,chapter_index")) => {}
        _ => return Err(Error::parse(1, "expected header `book_id,chapter_index`")),
    }
    lines
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let (b, c) = l
                .split_once(',')
                .ok_or_else(|| Error::parse(i + 1, "expected two fields"))?;
            Ok(RowLabel {
                book: b.parse().map_err(|_| Error::parse(i + 1, "bad book id"))?,
                chapter: c.parse().map_err(|_| Error::parse(i + 1, "bad chapter"))?,
            })
        })
        .collect()
}

fn parse_vocab(s: &str) -> Result<Vocabulary> {
    let terms: Vec<&str> = s.lines().collect();
    let vocab = Vocabulary::new(terms.iter().copied());
    if vocab.terms().iter().map(String::as_str).ne(terms.iter().copied()) {
        return Err(Error::parse(0, "vocabulary must be sorted and distinct"));
    }
    Ok(vocab)
}

fn check_shape(n: usize, p: usize, rows: &[RowLabel], vocab: &Vocabulary, books: &[BookLabel]) -> Result<()> {
    if rows.len() != n || vocab.len() != p {
        return Err(Error::parse(0, "sidecar files disagree with matrix shape"));
    }
    if rows.iter().any(|r| r.book >= books.len()) {
        return Err(Error::parse(0, "row label references undeclared book"));
    }
    Ok(())
}

impl DocTermMatrix {
    pub fn to_matrix_market(&self) -> String {
        let (n, p) = self.shape();
        let mut s = mm_header("integer", &self.books, n, p, self.counts.nnz());
        for (i, r) in self.counts.rows().enumerate() {
            for (j, v) in r.iter() {
                s.push_str(&format!("{} {} {}\n", i + 1, j + 1, v));
            }
        }
        s
    }

    pub fn from_parts(matrix: &str, rows_csv: &str, vocab: &str) -> Result<Self> {
        let body: MmBody<u32> = parse_mm(matrix, "integer")?;
        let rows = parse_rows_csv(rows_csv)?;
        let vocab = parse_vocab(vocab)?;
        check_shape(body.n, body.p, &rows, &vocab, &body.books)?;
        if body.entries.iter().any(|e| e.2 == 0) {
            return Err(Error::parse(0, "count matrices store only positive entries"));
        }
        Ok(DocTermMatrix {
            counts: csr_from_entries(body.n, body.p, &body.entries)?,
            rows,
            books: body.books,
            vocab,
        })
    }

    pub fn export(&self, files: &MatrixFiles) -> Result<()> {
        write_atomic(&files.matrix, self.to_matrix_market().as_bytes())?;
        write_atomic(&files.rows, rows_csv(&self.rows).as_bytes())?;
        write_atomic(&files.vocab, vocab_text(&self.vocab).as_bytes())
    }

    pub fn import(files: &MatrixFiles) -> Result<Self> {
        DocTermMatrix::from_parts(&read(&files.matrix)?, &read(&files.rows)?, &read(&files.vocab)?)
    }
}

impl WeightMatrix {
    pub fn to_matrix_market(&self) -> String {
        let (n, p) = self.shape();
        let mut s = mm_header("real", &self.books, n, p, self.weights.nnz());
        for (i, r) in self.weights.rows().enumerate() {
            for (j, v) in r.iter() {
                s.push_str(&format!("{} {} {}\n", i + 1, j + 1, fmt_f64(v)));
            }
        }
        s
    }

    pub fn from_parts(matrix: &str, rows_csv: &str, vocab: &str) -> Result<Self> {
        let body: MmBody<f64> = parse_mm(matrix, "real")?;
        let rows = parse_rows_csv(rows_csv)?;
        let vocab = parse_vocab(vocab)?;
        check_shape(body.n, body.p, &rows, &vocab, &body.books)?;
        Ok(WeightMatrix {
            weights: csr_from_entries(body.n, body.p, &body.entries)?,
            rows,
            books: body.books,
            vocab,
        })
    }

    pub fn export(&self, files: &MatrixFiles) -> Result<()> {
        write_atomic(&files.matrix, self.to_matrix_market().as_bytes())?;
        write_atomic(&files.rows, rows_csv(&self.rows).as_bytes())?;
        write_atomic(&files.vocab, vocab_text(&self.vocab).as_bytes())
    }

    pub fn import(files: &MatrixFiles) -> Result<Self> {
        WeightMatrix::from_parts(&read(&files.matrix)?, &read(&files.rows)?, &read(&files.vocab)?)
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
        _ => Error::Io(e),
    })
}
