//! The stock: every valid pair that may still appear in the top-k result.
//!
//! Entries live in two order-statistic trees over the same pairs:
//!
//! * `S` orders by score (best first), then end time descending, then `i`
//!   and `j` ascending. Its first `k` entries are the join result, and this
//!   is the global tie order used everywhere a result list is compared.
//! * `E` orders by end time ascending, then score worst-first, then `i` and
//!   `j` descending. Within one end time this is exactly the reverse of `S`.
//!
//! A pair `p` is *dominated* by `q` when `q` precedes `p` in `S` and
//! `e_q >= e_p`: `q` outranks `p` for the rest of `p`'s lifetime. A pair with
//! at least `k` dominators is irrelevant; a minimal stock holds exactly the
//! relevant pairs. For a minimal stock the `v`-th entry of `E` is aligned
//! with the `(v + k - 1)`-th entry of `S`, which gives the logarithmic
//! skyband lower bound and drives both cleanup and the merge insert.

use std::cmp::Ordering;
use std::collections::HashSet;

use thiserror::Error;

use crate::ostree::OrderStatTree;
use crate::similarity::SimilarityKind;
use crate::stream::SeqId;

/// A candidate or stored pair: `i` is the newer record, `j` the older one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StockEntry {
    pub i: SeqId,
    pub j: SeqId,
    pub sim: f64,
    pub end: f64,
}

/// Compares two pairs in the global result order (the order of `S`).
pub fn cmp_result_order(kind: SimilarityKind, a: &StockEntry, b: &StockEntry) -> Ordering {
    kind.cmp_better_first(a.sim, b.sim)
        .then_with(|| b.end.total_cmp(&a.end))
        .then_with(|| a.i.cmp(&b.i))
        .then_with(|| a.j.cmp(&b.j))
}

#[derive(Debug, Clone, Copy)]
struct Ranked {
    goodness: f64,
    entry: StockEntry,
}

#[derive(Debug, Clone, Copy)]
struct BySim(Ranked);

#[derive(Debug, Clone, Copy)]
struct ByEnd(Ranked);

impl Ord for BySim {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        b.goodness
            .total_cmp(&a.goodness)
            .then_with(|| b.entry.end.total_cmp(&a.entry.end))
            .then_with(|| a.entry.i.cmp(&b.entry.i))
            .then_with(|| a.entry.j.cmp(&b.entry.j))
    }
}

impl Ord for ByEnd {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        a.entry
            .end
            .total_cmp(&b.entry.end)
            .then_with(|| a.goodness.total_cmp(&b.goodness))
            .then_with(|| b.entry.i.cmp(&a.entry.i))
            .then_with(|| b.entry.j.cmp(&a.entry.j))
    }
}

macro_rules! ord_boilerplate {
    ($t:ty) => {
        impl PartialOrd for $t {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }
        impl PartialEq for $t {
            fn eq(&self, other: &Self) -> bool {
                self.cmp(other) == Ordering::Equal
            }
        }
        impl Eq for $t {}
    };
}
ord_boilerplate!(BySim);
ord_boilerplate!(ByEnd);

/// How the stock treats pairs that can never reach the result again.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StockPolicy {
    /// Keep only relevant pairs (minimal stock).
    Minimal,
    /// Keep every inserted pair until it expires.
    RetainAll,
}

#[derive(Debug, Error, PartialEq)]
pub enum StockError {
    #[error("pair ({i}, {j}) is already stored")]
    Duplicate { i: SeqId, j: SeqId },
    #[error("pair ({i}, {j}) ends at {end}, not after index time {t_j}")]
    NotValid { i: SeqId, j: SeqId, end: f64, t_j: f64 },
    #[error("candidate batch is not sorted in result order at position {0}")]
    Unsorted(usize),
    #[error("index time cannot move back from {current} to {requested}")]
    TimeRegression { current: f64, requested: f64 },
}

#[derive(Debug, Clone)]
pub struct Stock {
    kind: SimilarityKind,
    k: usize,
    policy: StockPolicy,
    t_j: f64,
    by_sim: OrderStatTree<BySim>,
    by_end: OrderStatTree<ByEnd>,
    pairs: HashSet<(SeqId, SeqId)>,
}

impl Stock {
    pub fn new(kind: SimilarityKind, k: usize, policy: StockPolicy) -> Self {
        assert!(k >= 1, "k must be at least 1");
        Self {
            kind,
            k,
            policy,
            t_j: f64::NEG_INFINITY,
            by_sim: OrderStatTree::new(),
            by_end: OrderStatTree::new(),
            pairs: HashSet::new(),
        }
    }

    pub fn kind(&self) -> SimilarityKind {
        self.kind
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn policy(&self) -> StockPolicy {
        self.policy
    }

    pub fn index_time(&self) -> f64 {
        self.t_j
    }

    pub fn len(&self) -> usize {
        self.by_sim.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_sim.is_empty()
    }

    pub fn contains_pair(&self, i: SeqId, j: SeqId) -> bool {
        self.pairs.contains(&(i, j))
    }

    /// The current join result: the first `min(k, |S|)` entries of `S`.
    pub fn topk(&self) -> Vec<StockEntry> {
        self.by_sim.iter().take(self.k).map(|p| p.0.entry).collect()
    }

    /// All entries in `S` order.
    pub fn entries(&self) -> impl Iterator<Item = StockEntry> + '_ {
        self.by_sim.iter().map(|p| p.0.entry)
    }

    /// All entries in `E` order.
    pub fn entries_by_end(&self) -> impl Iterator<Item = StockEntry> + '_ {
        self.by_end.iter().map(|p| p.0.entry)
    }

    fn ranked(&self, entry: StockEntry) -> Ranked {
        Ranked {
            goodness: self.kind.goodness(entry.sim),
            entry,
        }
    }

    fn s_at(&self, pos: usize) -> BySim {
        *self.by_sim.select(pos).expect("S position in range")
    }

    fn e_at(&self, pos: usize) -> Ranked {
        self.by_end.select(pos).expect("E position in range").0
    }

    fn add(&mut self, r: Ranked) {
        self.by_sim.insert(BySim(r));
        self.by_end.insert(ByEnd(r));
        self.pairs.insert((r.entry.i, r.entry.j));
    }

    fn discard(&mut self, r: Ranked) {
        self.by_sim.remove(&BySim(r));
        self.by_end.remove(&ByEnd(r));
        self.pairs.remove(&(r.entry.i, r.entry.j));
    }

    /// Advances the index time and drops every pair with `end <= t`.
    /// Returns the number of pairs removed.
    pub fn set_index_time(&mut self, t: f64) -> Result<usize, StockError> {
        if t < self.t_j {
            return Err(StockError::TimeRegression {
                current: self.t_j,
                requested: t,
            });
        }
        self.t_j = t;
        let mut removed = 0;
        while let Some(first) = self.by_end.first().copied() {
            if first.0.entry.end > t {
                break;
            }
            self.discard(first.0);
            removed += 1;
        }
        Ok(removed)
    }

    /// Skyband lower bound: the score of the `k`-th best pair still valid at
    /// future time `t` (pairs with `end >= t`), or the worst score when fewer
    /// than `k` such pairs exist. Exact only for a minimal stock.
    pub fn lower_bound(&self, t: f64) -> f64 {
        let v = self.by_end.count_while(|p| p.0.entry.end < t);
        let pos = v + self.k - 1;
        if v >= self.len() || pos >= self.len() {
            return self.kind.worst();
        }
        self.s_at(pos).0.entry.sim
    }

    /// Adds a pair without any relevance bookkeeping. Returns `false` if the
    /// pair was already present. Follow with [`Stock::cleanup`] or
    /// [`Stock::optimized_cleanup`] to restore minimality.
    pub fn push_unchecked(&mut self, entry: StockEntry) -> bool {
        if self.pairs.contains(&(entry.i, entry.j)) {
            return false;
        }
        self.add(self.ranked(entry));
        true
    }

    /// Removes every irrelevant pair.
    pub fn cleanup(&mut self) -> usize {
        self.sweep(0, f64::INFINITY)
    }

    /// Removes every irrelevant pair, assuming the stock was minimal before
    /// `batch` was added with [`Stock::push_unchecked`]. Only pairs ranked at
    /// or after the best batch pair in `S` and ending no later than the latest
    /// batch pair can be irrelevant, so the walk starts at the first `E`
    /// position that may hold one and stops past the latest batch end time.
    ///
    /// Old pairs ranked at or after `S` position `s0` sit at `E` position
    /// `s0 - k + 1` or later, but a batch pair ending early can sit before
    /// that, so the start also covers the earliest batch pair in `E`.
    pub fn optimized_cleanup(&mut self, batch: &[StockEntry]) -> usize {
        let Some(best) = batch
            .iter()
            .map(|c| self.ranked(*c))
            .min_by(|a, b| BySim(*a).cmp(&BySim(*b)))
        else {
            return 0;
        };
        let max_end = batch.iter().map(|c| c.end).fold(f64::NEG_INFINITY, f64::max);
        let s0 = self.by_sim.rank(&BySim(best));
        let first_batch_e = batch
            .iter()
            .map(|c| self.by_end.rank(&ByEnd(self.ranked(*c))))
            .min()
            .unwrap_or(usize::MAX);
        let start = (s0 + 1).saturating_sub(self.k).min(first_batch_e);
        self.sweep(start, max_end)
    }

    /// Walks `E[e]` against `S[e + k - 1]` from `E` position `start`. Every
    /// pair before `start` in `E` must be relevant. `E[e]` sorting after its
    /// partner in `S` proves it irrelevant. The walk stops at the end of `S`
    /// or once `E[e]` ends after `max_end`.
    fn sweep(&mut self, start: usize, max_end: f64) -> usize {
        let k = self.k;
        let mut e = start;
        let mut s = e + k - 1;
        let mut removed = 0;
        while s < self.len() {
            let pe = self.e_at(e);
            if pe.entry.end > max_end {
                break;
            }
            if BySim(pe) > self.s_at(s) {
                self.discard(pe);
                removed += 1;
            } else {
                s += 1;
                e += 1;
            }
        }
        removed
    }

    fn validate_batch(&self, cands: &[StockEntry]) -> Result<(), StockError> {
        let mut seen = HashSet::with_capacity(cands.len());
        for (pos, c) in cands.iter().enumerate() {
            if self.pairs.contains(&(c.i, c.j)) || !seen.insert((c.i, c.j)) {
                return Err(StockError::Duplicate { i: c.i, j: c.j });
            }
            if c.end <= self.t_j {
                return Err(StockError::NotValid {
                    i: c.i,
                    j: c.j,
                    end: c.end,
                    t_j: self.t_j,
                });
            }
            if pos > 0 && cmp_result_order(self.kind, &cands[pos - 1], c) != Ordering::Less {
                return Err(StockError::Unsorted(pos));
            }
        }
        Ok(())
    }

    /// Inserts a batch of candidates sorted in result order (best first).
    /// Returns how many were stored.
    ///
    /// Under [`StockPolicy::Minimal`] this is a single merge pass over `S`,
    /// `E` and the batch: each candidate is admitted only if it is relevant,
    /// and pairs the new candidates render irrelevant are removed on the way.
    pub fn insert(&mut self, cands: &[StockEntry]) -> Result<usize, StockError> {
        self.validate_batch(cands)?;
        if cands.is_empty() {
            return Ok(0);
        }
        match self.policy {
            StockPolicy::RetainAll => {
                for c in cands {
                    self.add(self.ranked(*c));
                }
                Ok(cands.len())
            }
            StockPolicy::Minimal => Ok(self.merge_insert(cands)),
        }
    }

    fn merge_insert(&mut self, cands: &[StockEntry]) -> usize {
        let k = self.k;
        let max_end = cands.iter().map(|c| c.end).fold(f64::NEG_INFINITY, f64::max);
        let first = self.ranked(cands[0]);

        // (E[e], S[s]) is the skyband vertex to check next; `t_bound` is the
        // end time of the previous vertex. A candidate slotted right before
        // S[s] is relevant iff it outlives `t_bound`. While |S| < k the bound
        // is -inf and candidates fill the open top-k slots unconditionally.
        let mut s = self.by_sim.rank(&BySim(first)).max(k - 1);
        let mut e = s + 1 - k;
        let mut t_bound = if e == 0 {
            f64::NEG_INFINITY
        } else {
            self.e_at(e - 1).entry.end
        };
        let mut next = 0;
        let mut inserted = 0;
        loop {
            while next < cands.len() {
                let c = self.ranked(cands[next]);
                if s < self.len() && BySim(c) > self.s_at(s) {
                    break;
                }
                next += 1;
                if c.entry.end > t_bound {
                    self.add(c);
                    inserted += 1;
                }
            }
            if s >= self.len() {
                // every candidate was consumed by the loop above
                break;
            }
            let pe = self.e_at(e);
            if pe.entry.end > max_end {
                // Nothing from here on can be dominated by a candidate, and
                // every remaining candidate has k dominators already.
                break;
            }
            if BySim(pe) > self.s_at(s) {
                self.discard(pe);
            } else {
                t_bound = pe.entry.end;
                s += 1;
                e += 1;
            }
        }
        inserted
    }

    /// Structural self-check: both trees hold the same pairs, the pair set
    /// matches, and every stored pair is valid at the index time.
    pub fn check_structure(&self) -> Result<(), String> {
        if self.by_sim.len() != self.by_end.len() || self.by_sim.len() != self.pairs.len() {
            return Err(format!(
                "size mismatch: |S|={} |E|={} pairs={}",
                self.by_sim.len(),
                self.by_end.len(),
                self.pairs.len()
            ));
        }
        let mut from_s: Vec<StockEntry> = self.entries().collect();
        for w in from_s.windows(2) {
            if cmp_result_order(self.kind, &w[0], &w[1]) != Ordering::Less {
                return Err(format!("S out of order at {:?}", w[0]));
            }
        }
        let from_e: Vec<StockEntry> = self.entries_by_end().collect();
        for w in from_e.windows(2) {
            if w[0].end > w[1].end {
                return Err(format!("E out of order at {:?}", w[0]));
            }
        }
        let mut from_e_sorted = from_e;
        from_s.sort_by_key(|a| (a.i, a.j));
        from_e_sorted.sort_by_key(|a| (a.i, a.j));
        if from_s != from_e_sorted {
            return Err("S and E hold different pairs".into());
        }
        if let Some(p) = from_s.iter().find(|p| p.end <= self.t_j) {
            return Err(format!("expired pair {p:?} at t_J={}", self.t_j));
        }
        Ok(())
    }
}
