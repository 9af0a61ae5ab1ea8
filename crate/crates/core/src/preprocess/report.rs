use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::io::{csv_field, fmt_f64};

use super::pos::{PosTag, PosTaggedToken};

#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyEntry {
    pub token: String,
    pub count: usize,
    pub ratio: f64,
}

/// Most frequent tokens, by count descending then token ascending. Ratios
/// are relative to `total`, the number of tokens counted, so they sum to 1
/// only when every distinct token is kept.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyReport {
    pub entries: Vec<FrequencyEntry>,
    pub total: usize,
    pub distinct: usize,
}

pub fn frequency_report(tokens: &[String], top_k: usize) -> Result<FrequencyReport> {
    if tokens.is_empty() {
        return Err(Error::EmptyInput);
    }
    if top_k == 0 {
        return Err(Error::InvalidHyperparameter("top_k must be at least 1".into()));
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for t in tokens {
        *counts.entry(t.as_str()).or_default() += 1;
    }
    let distinct = counts.len();
    let mut sorted: Vec<(&str, usize)> = counts.into_iter().collect();
    sorted.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let total = tokens.len();
    let entries = sorted
        .into_iter()
        .take(top_k)
        .map(|(token, count)| FrequencyEntry {
            token: token.to_string(),
            count,
            ratio: count as f64 / total as f64,
        })
        .collect();
    Ok(FrequencyReport {
        entries,
        total,
        distinct,
    })
}

impl FrequencyReport {
    /// CSV with header `token,count,ratio`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("token,count,ratio\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{}\n",
                csv_field(&e.token),
                e.count,
                fmt_f64(e.ratio)
            ));
        }
        out
    }
}

/// Tag frequencies, most frequent first.
#[derive(Clone, Debug, PartialEq)]
pub struct PosReport {
    pub counts: Vec<(PosTag, usize)>,
}

pub fn pos_report(tagged: &[PosTaggedToken]) -> PosReport {
    let mut counts: HashMap<PosTag, usize> = HashMap::new();
    for t in tagged {
        *counts.entry(t.tag).or_default() += 1;
    }
    let mut counts: Vec<(PosTag, usize)> = counts.into_iter().collect();
    counts.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    PosReport { counts }
}

impl PosReport {
    /// CSV with header `tag,count`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tag,count\n");
        for (tag, n) in &self.counts {
            out.push_str(&format!("{},{}\n", tag.as_str(), n));
        }
        out
    }
}
