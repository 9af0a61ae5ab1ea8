//! Loading chaptered books from disk.
//!
//! A corpus is described by a manifest listing each book's source and the
//! rule that cuts it into chapters. Books are numbered in manifest order and
//! every chapter becomes one [`RawDocument`].

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use regex::{Regex, RegexBuilder};
use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BookLabel {
    pub id: usize,
    pub name: String,
}

impl BookLabel {
    pub fn new(id: usize, name: impl Into<String>) -> Self {
        BookLabel {
            id,
            name: name.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawDocument {
    pub book: BookLabel,
    /// 1-based position within the book.
    pub chapter_index: u32,
    pub text: String,
}

impl RawDocument {
    pub fn new(book: BookLabel, chapter_index: u32, text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        if chapter_index == 0 {
            return Err(Error::InvalidCorpus("chapter indices are 1-based".into()));
        }
        if text.trim().is_empty() {
            return Err(Error::EmptyChapter {
                index: chapter_index as usize,
            });
        }
        Ok(RawDocument {
            book,
            chapter_index,
            text,
        })
    }
}

/// Documents ordered book-major, then by ascending chapter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corpus {
    books: Vec<BookLabel>,
    documents: Vec<RawDocument>,
}

impl Corpus {
    pub fn new(books: Vec<BookLabel>, documents: Vec<RawDocument>) -> Result<Self> {
        let mut names = HashSet::new();
        for (i, b) in books.iter().enumerate() {
            if b.id != i {
                return Err(Error::InvalidCorpus(format!(
                    "book ids must be contiguous from 0, found {} at position {i}",
                    b.id
                )));
            }
            if b.name.trim().is_empty() {
                return Err(Error::InvalidCorpus(format!("book {i} has an empty name")));
            }
            if !names.insert(b.name.as_str()) {
                return Err(Error::InvalidCorpus(format!("duplicate book name `{}`", b.name)));
            }
        }
        let mut prev: Option<(usize, u32)> = None;
        for d in &documents {
            if books.get(d.book.id) != Some(&d.book) {
                return Err(Error::InvalidCorpus(format!(
                    "document references unknown book `{}`",
                    d.book.name
                )));
            }
            let key = (d.book.id, d.chapter_index);
            if let Some(p) = prev {
                if key <= p {
                    return Err(Error::InvalidCorpus(format!(
                        "documents out of order or duplicated at {}:{}",
                        d.book.name, d.chapter_index
                    )));
                }
            }
            prev = Some(key);
        }
        Ok(Corpus { books, documents })
    }

    pub fn books(&self) -> &[BookLabel] {
        &self.books
    }

    pub fn documents(&self) -> &[RawDocument] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Chapters per book, indexed by book id.
    pub fn book_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.books.len()];
        for d in &self.documents {
            sizes[d.book.id] += 1;
        }
        sizes
    }

    pub fn book_by_name(&self, name: &str) -> Option<&BookLabel> {
        self.books.iter().find(|b| b.name == name)
    }

    /// Serializes to the cache format: one tab-separated record per document
    /// (`book_id`, `chapter_index`, escaped text) after a header naming the
    /// books.
    pub fn to_cache_string(&self) -> String {
        let mut out = String::from("#textmine-corpus v1\n");
        for b in &self.books {
            out.push_str(&format!("#book\t{}\t{}\n", b.id, escape(&b.name)));
        }
        for d in &self.documents {
            out.push_str(&format!(
                "{}\t{}\t{}\n",
                d.book.id,
                d.chapter_index,
                escape(&d.text)
            ));
        }
        out
    }

    pub fn from_cache_str(s: &str) -> Result<Corpus> {
        let mut lines = s.lines().enumerate();
        match lines.next() {
            Some((_, "#textmine-corpus v1")) => {}
            _ => return Err(Error::parse(1, "missing corpus cache header")),
        }
        let mut books = Vec::new();
        let mut documents = Vec::new();
        for (i, line) in lines {
            let lineno = i + 1;
            let fields: Vec<&str> = line.split('\t').collect();
            if let Some(rest) = line.strip_prefix("#book\t") {
                let (id, name) = rest
                    .split_once('\t')
                    .ok_or_else(|| Error::parse(lineno, "malformed book record"))?;
                let id = id.parse().map_err(|_| Error::parse(lineno, "bad book id"))?;
                books.push(BookLabel::new(id, unescape(name, lineno)?));
                continue;
            }
            if fields.len() != 3 {
                return Err(Error::parse(lineno, "expected 3 tab-separated fields"));
            }
            let book_id: usize = fields[0]
                .parse()
                .map_err(|_| Error::parse(lineno, "bad book id"))?;
            let chapter: u32 = fields[1]
                .parse()
                .map_err(|_| Error::parse(lineno, "bad chapter index"))?;
            let book = books
                .get(book_id)
                .cloned()
                .ok_or_else(|| Error::parse(lineno, "record for undeclared book"))?;
            documents.push(RawDocument::new(book, chapter, unescape(fields[2], lineno)?)?);
        }
        Corpus::new(books, documents)
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str, line: usize) -> Result<String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('t') => out.push('\t'),
            _ => return Err(Error::parse(line, "bad escape sequence")),
        }
    }
    Ok(out)
}

/// How a book's source is cut into chapters.
#[derive(Clone, Debug)]
pub enum ChapterRule {
    /// The source is a directory holding one file per chapter (or a single
    /// file holding one chapter).
    PerFile,
    /// The source is one file; every match of the pattern starts a chapter.
    /// Patterns are compiled in multi-line mode, so `^`/`$` anchor at lines.
    Header(Regex),
}

impl ChapterRule {
    pub fn header(pattern: &str) -> Result<Self> {
        RegexBuilder::new(pattern)
            .multi_line(true)
            .build()
            .map(ChapterRule::Header)
            .map_err(|e| Error::Manifest(format!("bad chapter pattern `{pattern}`: {e}")))
    }

    /// Parses the manifest spelling: `per_file` or `regex:<pattern>`.
    pub fn parse(s: &str) -> Result<Self> {
        if s == "per_file" {
            Ok(ChapterRule::PerFile)
        } else if let Some(p) = s.strip_prefix("regex:") {
            ChapterRule::header(p)
        } else {
            Err(Error::Manifest(format!(
                "unknown chapter rule `{s}` (expected per_file or regex:<pattern>)"
            )))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chapter {
    /// The delimiter text that opened the chapter; empty for per-file rules.
    pub header: String,
    pub body: String,
}

/// Result of cutting a text into chapters. `preamble` holds whatever came
/// before the first header.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChapterSplit {
    pub preamble: String,
    pub chapters: Vec<Chapter>,
}

impl ChapterSplit {
    pub fn bodies(&self) -> Vec<&str> {
        self.chapters.iter().map(|c| c.body.as_str()).collect()
    }

    /// Concatenates preamble, headers and bodies back into the source text.
    pub fn reconstruct(&self) -> String {
        let mut s = self.preamble.clone();
        for c in &self.chapters {
            s.push_str(&c.header);
            s.push_str(&c.body);
        }
        s
    }
}

pub fn split_chapters(text: &str, rule: &ChapterRule) -> Result<ChapterSplit> {
    let chapters = match rule {
        ChapterRule::PerFile => {
            return if text.trim().is_empty() {
                Err(Error::EmptyChapter { index: 1 })
            } else {
                Ok(ChapterSplit {
                    preamble: String::new(),
                    chapters: vec![Chapter {
                        header: String::new(),
                        body: text.to_string(),
                    }],
                })
            };
        }
        ChapterRule::Header(re) => re.find_iter(text).collect::<Vec<_>>(),
    };
    if chapters.is_empty() {
        return Err(Error::NoChaptersFound);
    }
    let preamble = text[..chapters[0].start()].to_string();
    let mut out = Vec::with_capacity(chapters.len());
    for (k, m) in chapters.iter().enumerate() {
        let end = chapters.get(k + 1).map_or(text.len(), |next| next.start());
        let body = &text[m.end()..end];
        if body.trim().is_empty() {
            return Err(Error::EmptyChapter { index: k + 1 });
        }
        out.push(Chapter {
            header: m.as_str().to_string(),
            body: body.to_string(),
        });
    }
    Ok(ChapterSplit {
        preamble,
        chapters: out,
    })
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub name: String,
    pub path: PathBuf,
    pub chapter_rule: String,
}

/// Book list read from a TOML manifest:
///
/// ```toml
/// [[book]]
/// name = "Proverbs"
/// path = "proverbs.txt"
/// chapter_rule = 'regex:^CHAPTER \d+$'
/// ```
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusManifest {
    #[serde(rename = "book", default)]
    pub books: Vec<ManifestEntry>,
}

impl CorpusManifest {
    pub fn parse(s: &str) -> Result<Self> {
        let m: CorpusManifest = toml::from_str(s).map_err(|e| Error::Manifest(e.to_string()))?;
        if m.books.is_empty() {
            return Err(Error::Manifest("manifest lists no books".into()));
        }
        for b in &m.books {
            ChapterRule::parse(&b.chapter_rule)?;
        }
        Ok(m)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
            _ => Error::Io(e),
        })?;
        CorpusManifest::parse(&decode(path, bytes)?)
    }
}

fn decode(path: &Path, bytes: Vec<u8>) -> Result<String> {
    String::from_utf8(bytes).map_err(|e| Error::Encoding {
        path: path.to_path_buf(),
        offset: e.utf8_error().valid_up_to(),
    })
}

fn read_text(path: &Path) -> Result<String> {
    match fs::read(path) {
        Ok(bytes) => decode(path, bytes),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(Error::MissingFile(path.to_path_buf())),
        Err(e) => Err(Error::Io(e)),
    }
}

/// Sort key that orders `ch2.txt` before `ch10.txt`.
fn natural_key(name: &str) -> Vec<(bool, u64, String)> {
    let mut key = Vec::new();
    let mut chars = name.chars().peekable();
    while let Some(&c) = chars.peek() {
        let digit = c.is_ascii_digit();
        let mut run = String::new();
        while let Some(&c) = chars.peek() {
            if c.is_ascii_digit() != digit {
                break;
            }
            run.push(c);
            chars.next();
        }
        let num = if digit { run.parse().unwrap_or(u64::MAX) } else { 0 };
        key.push((digit, num, run));
    }
    key
}

fn chapter_texts(path: &Path, rule: &ChapterRule) -> Result<Vec<String>> {
    match rule {
        ChapterRule::PerFile if path.is_dir() => {
            let mut files = Vec::new();
            for entry in fs::read_dir(path)? {
                let entry = entry?;
                if entry.file_type()?.is_file() {
                    let name = entry.file_name().to_string_lossy().into_owned();
                    if !name.starts_with('.') {
                        files.push((natural_key(&name), entry.path()));
                    }
                }
            }
            files.sort();
            let mut out = Vec::with_capacity(files.len());
            for (k, (_, p)) in files.iter().enumerate() {
                let text = read_text(p)?;
                if text.trim().is_empty() {
                    return Err(Error::EmptyChapter { index: k + 1 });
                }
                out.push(text);
            }
            Ok(out)
        }
        _ => {
            let text = read_text(path)?;
            let split = split_chapters(&text, rule)?;
            if !split.preamble.trim().is_empty() {
                log::debug!(
                    "{}: ignoring {} bytes before the first chapter header",
                    path.display(),
                    split.preamble.len()
                );
            }
            Ok(split.chapters.into_iter().map(|c| c.body).collect())
        }
    }
}

/// Loads every book listed in `manifest`, resolving relative paths against
/// `root`.
pub fn load_corpus(root: &Path, manifest: &CorpusManifest) -> Result<Corpus> {
    if !root.is_dir() {
        return Err(Error::MissingFile(root.to_path_buf()));
    }
    if manifest.books.is_empty() {
        return Err(Error::Manifest("manifest lists no books".into()));
    }
    let mut books = Vec::with_capacity(manifest.books.len());
    let mut documents = Vec::new();
    for (id, entry) in manifest.books.iter().enumerate() {
        let book = BookLabel::new(id, entry.name.clone());
        let rule = ChapterRule::parse(&entry.chapter_rule)?;
        let path = root.join(&entry.path);
        if !path.exists() {
            return Err(Error::MissingFile(path));
        }
        let chapters = match chapter_texts(&path, &rule) {
            Err(Error::NoChaptersFound) => return Err(Error::EmptyBook(entry.name.clone())),
            other => other?,
        };
        if chapters.is_empty() {
            return Err(Error::EmptyBook(entry.name.clone()));
        }
        for (k, text) in chapters.into_iter().enumerate() {
            documents.push(RawDocument::new(book.clone(), k as u32 + 1, text.trim())?);
        }
        books.push(book);
    }
    Corpus::new(books, documents)
}
