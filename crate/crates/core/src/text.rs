//! Deterministic word and sentence tokenization.
//!
//! The default configuration approximates a Treebank-style word tokenizer:
//! text is lowercased, leading and trailing punctuation is split into
//! one-character tokens, and English clitics (`n't`, `'s`, `'re`, ...) are
//! separated from their host word. Punctuation inside a word (`e.g`, `3.5`,
//! `well-known`) stays attached. There is no stemming and no stopword list.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Punctuation {
    /// Edge punctuation becomes separate one-character tokens.
    #[default]
    SplitOff,
    /// Edge punctuation is removed.
    Drop,
    /// Whitespace splitting only.
    KeepAttached,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SentenceRule {
    /// A sentence ends at a run of `.`, `!` or `?` followed by whitespace or end of text.
    #[default]
    PunctRule,
    /// Sentence boundaries are supplied by the caller as line breaks.
    ProvidedOffsets,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TokenizerConfig {
    pub lowercase: bool,
    pub punctuation: Punctuation,
    pub sentences: SentenceRule,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self {
            lowercase: true,
            punctuation: Punctuation::SplitOff,
            sentences: SentenceRule::PunctRule,
        }
    }
}

const CLITICS: [&str; 7] = ["n't", "'s", "'re", "'ve", "'ll", "'d", "'m"];

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric() && !c.is_whitespace()
}

pub fn tokenize(text: &str, config: &TokenizerConfig) -> Vec<String> {
    let text = if config.lowercase {
        std::borrow::Cow::Owned(text.to_lowercase())
    } else {
        std::borrow::Cow::Borrowed(text)
    };
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        match config.punctuation {
            Punctuation::KeepAttached => tokens.push(chunk.to_string()),
            Punctuation::SplitOff => split_chunk(chunk, &mut tokens, true),
            Punctuation::Drop => split_chunk(chunk, &mut tokens, false),
        }
    }
    tokens
}

fn split_chunk(chunk: &str, out: &mut Vec<String>, keep_punct: bool) {
    if is_clitic(chunk) {
        out.push(chunk.to_string());
        return;
    }
    let start = chunk.find(|c: char| !is_punct(c));
    let Some(start) = start else {
        if keep_punct {
            out.extend(chunk.chars().map(String::from));
        }
        return;
    };
    let end = chunk
        .char_indices()
        .rev()
        .find(|&(_, c)| !is_punct(c))
        .map(|(i, c)| i + c.len_utf8())
        .unwrap_or(chunk.len());

    if keep_punct {
        out.extend(chunk[..start].chars().map(String::from));
    }
    let core = &chunk[start..end];
    let mut host = core;
    let mut clitics = Vec::new();
    while let Some((rest, clitic)) = split_clitic(host) {
        clitics.push(clitic);
        host = rest;
    }
    out.push(host.to_string());
    out.extend(clitics.into_iter().rev().map(String::from));
    if keep_punct {
        out.extend(chunk[end..].chars().map(String::from));
    }
}

fn is_clitic(s: &str) -> bool {
    CLITICS.iter().any(|c| s.eq_ignore_ascii_case(c))
}

fn split_clitic(word: &str) -> Option<(&str, &str)> {
    let lower = word.to_ascii_lowercase();
    for clitic in CLITICS {
        if lower.ends_with(clitic) && word.len() > clitic.len() {
            let cut = word.len() - clitic.len();
            if !word.is_char_boundary(cut) {
                continue;
            }
            let host = &word[..cut];
            if host.chars().last().is_some_and(|c| c.is_alphanumeric()) {
                return Some((host, &word[cut..]));
            }
        }
    }
    None
}

/// Splits `text` into sentences; empty or whitespace-only segments are dropped.
pub fn split_sentences<'a>(text: &'a str, config: &TokenizerConfig) -> Vec<&'a str> {
    match config.sentences {
        SentenceRule::ProvidedOffsets => text.lines().map(str::trim).filter(|s| !s.is_empty()).collect(),
        SentenceRule::PunctRule => {
            let mut out = Vec::new();
            let mut begin = 0;
            let mut chars = text.char_indices().peekable();
            while let Some((i, c)) = chars.next() {
                if !matches!(c, '.' | '!' | '?') {
                    continue;
                }
                let mut end = i + c.len_utf8();
                while let Some(&(j, d)) = chars.peek() {
                    if matches!(d, '.' | '!' | '?') {
                        end = j + d.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                let at_boundary = chars.peek().is_none_or(|&(_, d)| d.is_whitespace());
                if at_boundary {
                    let sentence = text[begin..end].trim();
                    if !sentence.is_empty() {
                        out.push(sentence);
                    }
                    begin = end;
                }
            }
            let tail = text[begin..].trim();
            if !tail.is_empty() {
                out.push(tail);
            }
            out
        }
    }
}
