//! Text cleaning: tokenization, noise and stopword removal, stemming, and
//! the frequency and part-of-speech reports built on top of them.

mod porter;
mod pos;
mod report;
mod tokenize;

use std::collections::HashSet;
use std::path::Path;
use std::sync::Arc;

pub use porter::{stem, stem_stable};
pub use pos::{pos_tag, PosTag, PosTaggedToken, RuleTagger, Tagger};
pub use report::{frequency_report, pos_report, FrequencyEntry, FrequencyReport, PosReport};
pub use tokenize::{tokenize_raw, tokenize_sentences, tokenize_words};

use crate::error::{Error, Result};

const ENGLISH_STOPWORDS: &str = include_str!("stopwords_en.txt");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StopwordSet {
    words: Arc<HashSet<String>>,
}

impl StopwordSet {
    /// Bundled English list.
    pub fn english() -> Self {
        StopwordSet::parse(ENGLISH_STOPWORDS)
    }

    pub fn empty() -> Self {
        StopwordSet {
            words: Arc::new(HashSet::new()),
        }
    }

    /// One token per line; blank lines and `#` comments are skipped.
    pub fn parse(s: &str) -> Self {
        let words = s
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        StopwordSet {
            words: Arc::new(words),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
            _ => Error::Io(e),
        })?;
        Ok(StopwordSet::parse(&text))
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

fn is_noise(token: &str, stopwords: &StopwordSet) -> bool {
    token.chars().all(|c| !c.is_alphanumeric())
        || token.chars().all(|c| c.is_ascii_digit())
        || stopwords.contains(token)
}

/// Drops stopwords and tokens made only of punctuation or only of digits.
pub fn remove_noise(tokens: &[String], stopwords: &StopwordSet) -> Vec<String> {
    tokens
        .iter()
        .filter(|t| !is_noise(t, stopwords))
        .cloned()
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreprocessConfig {
    pub lowercase: bool,
    pub remove_noise: bool,
    pub stopwords: StopwordSet,
    pub stem: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            lowercase: true,
            remove_noise: true,
            stopwords: StopwordSet::english(),
            stem: true,
        }
    }
}

impl PreprocessConfig {
    /// Tokens kept for the document-term matrix.
    ///
    /// Stages run as tokenize, lowercase, noise removal, stem. Stemming is
    /// iterated to a fixed point and a stem that lands on a stopword is
    /// dropped, which makes the whole pipeline idempotent.
    pub fn run(&self, text: &str) -> Vec<String> {
        let mut tokens = tokenize_raw(text);
        if self.lowercase {
            for t in &mut tokens {
                *t = t.to_lowercase();
            }
        }
        if self.remove_noise {
            tokens = remove_noise(&tokens, &self.stopwords);
        }
        if self.stem {
            for t in &mut tokens {
                *t = stem_stable(t);
            }
            if self.remove_noise {
                tokens.retain(|t| !is_noise(t, &self.stopwords));
            }
        }
        tokens
    }

    /// Stable textual summary used when fingerprinting cached results.
    pub fn fingerprint(&self) -> String {
        let mut words: Vec<&String> = self.stopwords.words.iter().collect();
        words.sort();
        format!(
            "lowercase={} noise={} stem={} stopwords={}",
            self.lowercase,
            self.remove_noise,
            self.stem,
            words.iter().map(|w| w.as_str()).collect::<Vec<_>>().join(" ")
        )
    }
}

/// Runs `config` over one document's text.
pub fn pipeline(doc: &crate::corpus::RawDocument, config: &PreprocessConfig) -> Vec<String> {
    config.run(&doc.text)
}
