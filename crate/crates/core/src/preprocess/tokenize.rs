//! Word and sentence tokenizers.

/// Splits text into maximal runs of alphabetic characters. An apostrophe is
/// kept when it sits between two letters (`god's`), and the typographic
/// apostrophe is normalized to `'`. Case is preserved.
pub fn tokenize_raw(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c.is_alphabetic() {
            current.push(c);
        } else if is_apostrophe(c)
            && !current.is_empty()
            && chars.get(i + 1).is_some_and(|n| n.is_alphabetic())
        {
            current.push('\'');
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Lowercased word tokens in original order.
pub fn tokenize_words(text: &str) -> Vec<String> {
    tokenize_raw(text).into_iter().map(|t| t.to_lowercase()).collect()
}

const ABBREVIATIONS: &[&str] = &[
    "mr.", "mrs.", "ms.", "dr.", "st.", "jr.", "sr.", "vs.", "etc.", "e.g.", "i.e.", "cf.", "ch.", "vol.",
    "no.", "viz.",
];

/// Splits on `.`, `!` or `?` followed by whitespace. A period ending one of a
/// few common abbreviations does not end a sentence. Text without a
/// terminator comes back whole.
pub fn tokenize_sentences(text: &str) -> Vec<String> {
    let mut sentences = Vec::new();
    let mut start = 0;
    let mut iter = text.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        if !matches!(c, '.' | '!' | '?') {
            continue;
        }
        let end = i + c.len_utf8();
        let at_boundary = match iter.peek() {
            None => true,
            Some(&(_, n)) => n.is_whitespace(),
        };
        if !at_boundary {
            continue;
        }
        let candidate = text[start..end].trim();
        if c == '.' {
            let last_word = candidate
                .rsplit(char::is_whitespace)
                .next()
                .unwrap_or("")
                .to_lowercase();
            if ABBREVIATIONS.contains(&last_word.as_str()) {
                continue;
            }
        }
        if !candidate.is_empty() {
            sentences.push(candidate.to_string());
        }
        start = end;
    }
    let rest = text[start..].trim();
    if !rest.is_empty() {
        sentences.push(rest.to_string());
    }
    sentences
}
