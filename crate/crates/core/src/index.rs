//! Token → posting list index over the records currently in the window.
//!
//! Each posting list is a doubly linked list ordered by ascending timestamp
//! (hence ascending expiration). New records are appended at the tails, and
//! every indexed record keeps the node handles of its postings so it can be
//! unlinked in `O(|r|)` regardless of list lengths. Traversal from tail to
//! head yields records in non-increasing timestamp order, which is the order
//! candidate generation needs.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::stream::{RecordSet, SeqId, TokenId};

const NIL: u32 = u32::MAX;

#[derive(Debug, Error, PartialEq)]
pub enum IndexError {
    #[error("record {seq} at t={t} inserted after a record at t={last}")]
    OutOfOrder { seq: SeqId, t: f64, last: f64 },
    #[error("record {0} is already indexed")]
    AlreadyIndexed(SeqId),
    #[error("record {0} is not indexed")]
    NotIndexed(SeqId),
}

#[derive(Debug, Clone)]
struct Posting {
    rec: Arc<RecordSet>,
    token: TokenId,
    prev: u32,
    next: u32,
}

#[derive(Debug, Clone, Copy)]
struct List {
    head: u32,
    tail: u32,
    len: usize,
}

const EMPTY: List = List {
    head: NIL,
    tail: NIL,
    len: 0,
};

#[derive(Debug, Clone)]
pub struct InvertedIndex {
    postings: Vec<Option<Posting>>,
    free: Vec<u32>,
    lists: Vec<List>,
    handles: HashMap<SeqId, Vec<u32>>,
    last_t: f64,
}

impl Default for InvertedIndex {
    fn default() -> Self {
        Self::new()
    }
}

impl InvertedIndex {
    pub fn new() -> Self {
        Self {
            postings: Vec::new(),
            free: Vec::new(),
            lists: Vec::new(),
            handles: HashMap::new(),
            last_t: f64::NEG_INFINITY,
        }
    }

    /// Number of indexed records.
    pub fn num_records(&self) -> usize {
        self.handles.len()
    }

    pub fn contains(&self, seq: SeqId) -> bool {
        self.handles.contains_key(&seq)
    }

    pub fn list_len(&self, token: TokenId) -> usize {
        self.lists.get(token as usize).map_or(0, |l| l.len)
    }

    /// Tokens whose posting list is non-empty.
    pub fn tokens(&self) -> impl Iterator<Item = TokenId> + '_ {
        self.lists
            .iter()
            .enumerate()
            .filter(|(_, l)| l.len > 0)
            .map(|(t, _)| t as TokenId)
    }

    fn posting(&self, id: u32) -> &Posting {
        self.postings[id as usize].as_ref().expect("live posting")
    }

    fn posting_mut(&mut self, id: u32) -> &mut Posting {
        self.postings[id as usize].as_mut().expect("live posting")
    }

    pub fn insert(&mut self, rec: Arc<RecordSet>) -> Result<(), IndexError> {
        if rec.t < self.last_t {
            return Err(IndexError::OutOfOrder {
                seq: rec.seq,
                t: rec.t,
                last: self.last_t,
            });
        }
        if self.handles.contains_key(&rec.seq) {
            return Err(IndexError::AlreadyIndexed(rec.seq));
        }
        self.last_t = rec.t;
        let mut handles = Vec::with_capacity(rec.len());
        for &token in rec.tokens() {
            let slot = token as usize;
            if slot >= self.lists.len() {
                self.lists.resize(slot + 1, EMPTY);
            }
            let tail = self.lists[slot].tail;
            let node = Posting {
                rec: Arc::clone(&rec),
                token,
                prev: tail,
                next: NIL,
            };
            let id = match self.free.pop() {
                Some(id) => {
                    self.postings[id as usize] = Some(node);
                    id
                }
                None => {
                    self.postings.push(Some(node));
                    u32::try_from(self.postings.len() - 1).expect("posting arena overflow")
                }
            };
            if tail == NIL {
                self.lists[slot].head = id;
            } else {
                self.posting_mut(tail).next = id;
            }
            let list = &mut self.lists[slot];
            list.tail = id;
            list.len += 1;
            handles.push(id);
        }
        self.handles.insert(rec.seq, handles);
        Ok(())
    }

    pub fn remove(&mut self, seq: SeqId) -> Result<(), IndexError> {
        let handles = self.handles.remove(&seq).ok_or(IndexError::NotIndexed(seq))?;
        for id in handles {
            let Posting { token, prev, next, .. } = self.postings[id as usize].take().expect("live posting");
            if prev == NIL {
                self.lists[token as usize].head = next;
            } else {
                self.posting_mut(prev).next = next;
            }
            if next == NIL {
                self.lists[token as usize].tail = prev;
            } else {
                self.posting_mut(next).prev = prev;
            }
            self.lists[token as usize].len -= 1;
            self.free.push(id);
        }
        Ok(())
    }

    /// Records in `token`'s list, newest first. Unknown tokens yield nothing.
    pub fn lookup(&self, token: TokenId) -> Postings<'_> {
        let start = self.lists.get(token as usize).map_or(NIL, |l| l.tail);
        Postings {
            index: self,
            cursor: start,
            forward: false,
        }
    }

    /// Records in `token`'s list, oldest first.
    pub fn lookup_forward(&self, token: TokenId) -> Postings<'_> {
        let start = self.lists.get(token as usize).map_or(NIL, |l| l.head);
        Postings {
            index: self,
            cursor: start,
            forward: true,
        }
    }
}

pub struct Postings<'a> {
    index: &'a InvertedIndex,
    cursor: u32,
    forward: bool,
}

impl<'a> Iterator for Postings<'a> {
    type Item = &'a Arc<RecordSet>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.cursor == NIL {
            return None;
        }
        let p = self.index.posting(self.cursor);
        self.cursor = if self.forward { p.next } else { p.prev };
        Some(&p.rec)
    }
}
