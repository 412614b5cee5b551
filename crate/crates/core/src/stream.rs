//! Stream records, token interning, the sliding window and overlap counting.

use std::collections::{HashMap, VecDeque};
use std::io::BufRead;
use std::sync::Arc;

use thiserror::Error;

pub type TokenId = u32;
pub type SeqId = u64;

/// Maps opaque token strings to dense ids in order of first appearance.
///
/// Later ids mean later first occurrence, which is used as a proxy for
/// rarity: records keep their tokens sorted by descending id.
#[derive(Debug, Default, Clone)]
pub struct TokenDictionary {
    ids: HashMap<String, TokenId>,
}

impl TokenDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<TokenId> {
        self.ids.get(token).copied()
    }

    pub fn intern(&mut self, token: &str) -> TokenId {
        if let Some(&id) = self.ids.get(token) {
            return id;
        }
        let id = TokenId::try_from(self.ids.len()).expect("token dictionary overflow");
        self.ids.insert(token.to_owned(), id);
        id
    }

    /// Interns `raw_tokens` (in order) and builds the canonical record.
    pub fn intern_record<S: AsRef<str>>(&mut self, raw_tokens: &[S], seq: SeqId, t: f64) -> RecordSet {
        let tokens = raw_tokens.iter().map(|tok| self.intern(tok.as_ref())).collect();
        RecordSet::new(seq, t, tokens)
    }
}

/// A deduplicated token set, sorted by descending token id.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordSet {
    pub seq: SeqId,
    pub t: f64,
    tokens: Vec<TokenId>,
}

impl RecordSet {
    pub fn new(seq: SeqId, t: f64, mut tokens: Vec<TokenId>) -> Self {
        tokens.sort_unstable_by(|a, b| b.cmp(a));
        tokens.dedup();
        Self { seq, t, tokens }
    }

    pub fn tokens(&self) -> &[TokenId] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// `|r ∩ s|` if it is at least `required`, otherwise `None`.
///
/// Merges the two descending token arrays and gives up as soon as the
/// unscanned suffixes can no longer supply enough matches.
pub fn overlap_count(r: &[TokenId], s: &[TokenId], required: usize) -> Option<usize> {
    if r.len().min(s.len()) < required {
        return None;
    }
    let (mut i, mut j, mut overlap) = (0, 0, 0);
    while i < r.len() && j < s.len() {
        if overlap + (r.len() - i).min(s.len() - j) < required {
            return None;
        }
        match r[i].cmp(&s[j]) {
            std::cmp::Ordering::Equal => {
                overlap += 1;
                i += 1;
                j += 1;
            }
            std::cmp::Ordering::Greater => i += 1,
            std::cmp::Ordering::Less => j += 1,
        }
    }
    (overlap >= required).then_some(overlap)
}

/// FIFO of the records whose timestamps lie in `(t_J - w, t_J]`.
#[derive(Debug, Clone)]
pub struct SlidingWindow {
    duration: f64,
    queue: VecDeque<Arc<RecordSet>>,
}

impl SlidingWindow {
    pub fn new(duration: f64) -> Self {
        assert!(duration > 0.0, "window duration must be positive");
        Self {
            duration,
            queue: VecDeque::new(),
        }
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &Arc<RecordSet>> + ExactSizeIterator {
        self.queue.iter()
    }

    /// A record is expired at `t_j` once `t + w <= t_j`. The end-time form is
    /// the same expression the stock uses for pair end times, so window and
    /// stock agree on every boundary tie.
    pub fn is_expired(&self, rec: &RecordSet, t_j: f64) -> bool {
        rec.t + self.duration <= t_j
    }

    /// Pops and returns (oldest first) every record expired at `t_j`.
    pub fn advance(&mut self, t_j: f64) -> Vec<Arc<RecordSet>> {
        let mut expired = Vec::new();
        while let Some(front) = self.queue.front() {
            if !self.is_expired(front, t_j) {
                break;
            }
            expired.extend(self.queue.pop_front());
        }
        expired
    }

    pub fn push(&mut self, rec: Arc<RecordSet>) {
        if let Some(back) = self.queue.back() {
            assert!(back.t <= rec.t, "window timestamps must be non-decreasing");
        }
        self.queue.push_back(rec);
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}: invalid timestamp `{text}`")]
    BadTimestamp { line: usize, text: String },
    #[error("line {line}: timestamp {t} precedes previous timestamp {previous}")]
    NonMonotonic { line: usize, t: f64, previous: f64 },
    #[error("I/O error: {0}")]
    Io(String),
}

/// One parsed input line, before interning.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRecord {
    pub line: usize,
    pub t: f64,
    pub tokens: Vec<String>,
}

/// Parses `<timestamp>\t<token> <token> ...` lines.
///
/// Blank lines and lines starting with `#` are skipped. A line holding only a
/// timestamp is an empty set.
pub fn parse_stream<R: BufRead>(reader: R) -> Result<Vec<RawRecord>, ParseError> {
    let mut out = Vec::new();
    let mut previous = f64::NEG_INFINITY;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| ParseError::Io(e.to_string()))?;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (ts, rest) = match trimmed.split_once('\t') {
            Some((ts, rest)) => (ts, rest),
            None => (trimmed, ""),
        };
        let t: f64 =
            ts.trim()
                .parse()
                .ok()
                .filter(|t: &f64| t.is_finite())
                .ok_or_else(|| ParseError::BadTimestamp {
                    line: line_no,
                    text: ts.to_string(),
                })?;
        if t < previous {
            return Err(ParseError::NonMonotonic {
                line: line_no,
                t,
                previous,
            });
        }
        previous = t;
        out.push(RawRecord {
            line: line_no,
            t,
            tokens: rest.split_ascii_whitespace().map(str::to_owned).collect(),
        });
    }
    Ok(out)
}
