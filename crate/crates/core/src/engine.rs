//! The stream join framework: index time, window(s), inverted index(es) and
//! stock, with baseline and inverted-index candidate generation.
//!
//! Inserting a record first advances the index time to the record's
//! timestamp (expiring pairs from the stock and records from the window and
//! index), then generates candidate pairs against the window, hands them to
//! the stock, and finally adds the record to the window and index.
//!
//! In two-stream mode each stream has its own window and index; a record
//! probes the *other* stream's structures and is stored in its own.

use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::index::{IndexError, InvertedIndex};
use crate::similarity::SimilarityKind;
use crate::stock::{cmp_result_order, Stock, StockEntry, StockError, StockPolicy};
use crate::stream::{overlap_count, RecordSet, SeqId, SlidingWindow, TokenId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Pair the new record with every window record; keep every positive pair.
    Base,
    /// Inverted index with bound-based cropping; shortest posting lists first.
    Swoop,
    /// As `Swoop`, but lists are probed in the record's canonical token order.
    SwoopNoOpt,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Base, Algorithm::Swoop, Algorithm::SwoopNoOpt];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Base => "base",
            Algorithm::Swoop => "swoop",
            Algorithm::SwoopNoOpt => "swoop-noopt",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                EngineError::InvalidConfig(format!("unknown algorithm `{s}` (expected base|swoop|swoop-noopt)"))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JoinMode {
    SelfJoin,
    RrJoin,
}

/// Which input stream a record belongs to in two-stream mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Origin {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineConfig {
    pub algorithm: Algorithm,
    pub k: usize,
    /// Window duration in seconds.
    pub window: f64,
    pub similarity: SimilarityKind,
    pub mode: JoinMode,
}

impl EngineConfig {
    pub fn new(algorithm: Algorithm, k: usize, window: f64, similarity: SimilarityKind) -> Self {
        Self {
            algorithm,
            k,
            window,
            similarity,
            mode: JoinMode::SelfJoin,
        }
    }

    pub fn rr_join(mut self) -> Self {
        self.mode = JoinMode::RrJoin;
        self
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.k == 0 {
            return Err(EngineError::InvalidConfig("k must be at least 1".into()));
        }
        if !(self.window.is_finite() && self.window > 0.0) {
            return Err(EngineError::InvalidConfig(format!(
                "window duration must be positive, got {}",
                self.window
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum EngineError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("timestamp {got} precedes index time {index_time}")]
    TimeRegression { index_time: f64, got: f64 },
    #[error("sequence id {got} is not greater than previous id {previous}")]
    SeqRegression { previous: SeqId, got: SeqId },
    #[error("a self-join engine only accepts records from the left stream")]
    RightInSelfJoin,
    #[error(transparent)]
    Stock(#[from] StockError),
    #[error(transparent)]
    Index(#[from] IndexError),
}

/// Work done for one inserted record.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct InsertStats {
    /// Pairs formed during candidate generation, before verification.
    pub pre_candidates: usize,
    /// Verified pairs sent to the stock.
    pub candidates: usize,
}

#[derive(Debug, Clone)]
struct Side {
    window: SlidingWindow,
    index: Option<InvertedIndex>,
}

#[derive(Debug, Clone)]
pub struct JoinEngine {
    config: EngineConfig,
    t_j: f64,
    last_seq: Option<SeqId>,
    sides: Vec<Side>,
    stock: Stock,
}

impl JoinEngine {
    pub fn new(config: EngineConfig) -> Result<Self, EngineError> {
        config.validate()?;
        let indexed = config.algorithm != Algorithm::Base;
        let side = || Side {
            window: SlidingWindow::new(config.window),
            index: indexed.then(InvertedIndex::new),
        };
        let sides = match config.mode {
            JoinMode::SelfJoin => vec![side()],
            JoinMode::RrJoin => vec![side(), side()],
        };
        let policy = match config.algorithm {
            Algorithm::Base => StockPolicy::RetainAll,
            Algorithm::Swoop | Algorithm::SwoopNoOpt => StockPolicy::Minimal,
        };
        Ok(Self {
            config,
            t_j: f64::NEG_INFINITY,
            last_seq: None,
            sides,
            stock: Stock::new(config.similarity, config.k, policy),
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn index_time(&self) -> f64 {
        self.t_j
    }

    pub fn stock(&self) -> &Stock {
        &self.stock
    }

    /// Total number of valid records across all windows.
    pub fn window_len(&self) -> usize {
        self.sides.iter().map(|s| s.window.len()).sum()
    }

    pub fn window(&self, origin: Origin) -> &SlidingWindow {
        &self.sides[self.side_of(origin)].window
    }

    pub fn index(&self, origin: Origin) -> Option<&InvertedIndex> {
        self.sides[self.side_of(origin)].index.as_ref()
    }

    fn side_of(&self, origin: Origin) -> usize {
        match (self.config.mode, origin) {
            (JoinMode::SelfJoin, _) | (JoinMode::RrJoin, Origin::Left) => 0,
            (JoinMode::RrJoin, Origin::Right) => 1,
        }
    }

    /// Side whose records a record from `origin` is paired with.
    fn probe_side_of(&self, origin: Origin) -> usize {
        match (self.config.mode, origin) {
            (JoinMode::SelfJoin, _) => 0,
            (JoinMode::RrJoin, Origin::Left) => 1,
            (JoinMode::RrJoin, Origin::Right) => 0,
        }
    }

    pub fn topk(&self) -> Vec<StockEntry> {
        self.stock.topk()
    }

    /// Moves the index time forward, dropping expired pairs and records.
    pub fn set_index_time(&mut self, t: f64) -> Result<(), EngineError> {
        if t < self.t_j || t.is_nan() {
            return Err(EngineError::TimeRegression {
                index_time: self.t_j,
                got: t,
            });
        }
        self.t_j = t;
        self.stock.set_index_time(t)?;
        for side in &mut self.sides {
            for gone in side.window.advance(t) {
                if let Some(index) = side.index.as_mut() {
                    index.remove(gone.seq)?;
                }
            }
        }
        Ok(())
    }

    pub fn insert(&mut self, record: impl Into<Arc<RecordSet>>) -> Result<InsertStats, EngineError> {
        self.insert_from(record, Origin::Left)
    }

    pub fn insert_from(
        &mut self,
        record: impl Into<Arc<RecordSet>>,
        origin: Origin,
    ) -> Result<InsertStats, EngineError> {
        let record: Arc<RecordSet> = record.into();
        if self.config.mode == JoinMode::SelfJoin && origin == Origin::Right {
            return Err(EngineError::RightInSelfJoin);
        }
        if let Some(previous) = self.last_seq {
            if record.seq <= previous {
                return Err(EngineError::SeqRegression {
                    previous,
                    got: record.seq,
                });
            }
        }
        self.set_index_time(record.t)?;
        self.last_seq = Some(record.seq);

        let probe = self.probe_side_of(origin);
        let (mut cands, stats) = match self.config.algorithm {
            Algorithm::Base => self.baseline_candidates(probe, &record),
            Algorithm::Swoop => self.swoop_candidates(probe, &record, ProbeOrder::ShortestListFirst),
            Algorithm::SwoopNoOpt => self.swoop_candidates(probe, &record, ProbeOrder::Canonical),
        };
        let kind = self.config.similarity;
        cands.sort_unstable_by(|a, b| cmp_result_order(kind, a, b));
        self.stock.insert(&cands)?;

        let own = self.side_of(origin);
        let side = &mut self.sides[own];
        if let Some(index) = side.index.as_mut() {
            index.insert(Arc::clone(&record))?;
        }
        side.window.push(record);
        Ok(stats)
    }

    /// Candidates for `r` by pairing it with every record of the (probe) window.
    pub fn get_candidates_baseline(&self, r: &RecordSet, origin: Origin) -> (Vec<StockEntry>, InsertStats) {
        self.baseline_candidates(self.probe_side_of(origin), r)
    }

    /// Candidates for `r` from the inverted index of the probe side.
    ///
    /// Panics if the engine runs the baseline algorithm (no index).
    pub fn get_candidates_swoop(
        &self,
        r: &RecordSet,
        origin: Origin,
        order: ProbeOrder,
    ) -> (Vec<StockEntry>, InsertStats) {
        self.swoop_candidates(self.probe_side_of(origin), r, order)
    }

    fn pair(&self, r: &RecordSet, s: &RecordSet, sim: f64) -> StockEntry {
        let (newer, older) = if r.seq > s.seq { (r, s) } else { (s, r) };
        StockEntry {
            i: newer.seq,
            j: older.seq,
            sim,
            end: older.t + self.config.window,
        }
    }

    fn baseline_candidates(&self, probe: usize, r: &RecordSet) -> (Vec<StockEntry>, InsertStats) {
        let kind = self.config.similarity;
        let window = &self.sides[probe].window;
        let mut out = Vec::new();
        for s in window.iter() {
            if let Some(o) = overlap_count(r.tokens(), s.tokens(), 1) {
                out.push(self.pair(r, s, kind.sim(r.len(), s.len(), o)));
            }
        }
        let stats = InsertStats {
            pre_candidates: window.len(),
            candidates: out.len(),
        };
        (out, stats)
    }

    /// Order in which `r`'s posting lists are probed under `order`.
    pub fn order_tokens_for_probe(&self, r: &RecordSet, origin: Origin, order: ProbeOrder) -> Vec<TokenId> {
        let index = self.sides[self.probe_side_of(origin)].index.as_ref();
        probe_order(index, r, order)
    }

    fn swoop_candidates(&self, probe: usize, r: &RecordSet, order: ProbeOrder) -> (Vec<StockEntry>, InsertStats) {
        let index = self.sides[probe]
            .index
            .as_ref()
            .expect("inverted index present for swoop engines");
        let kind = self.config.similarity;
        let w = self.config.window;
        let len = r.len();

        // Pre-candidates with the skyband lower bound at their pair end time.
        let mut pre: HashMap<SeqId, (f64, &Arc<RecordSet>)> = HashMap::new();
        for (pos, token) in probe_order(Some(index), r, order).into_iter().enumerate() {
            let upper = kind.positional_upper_bound(len, pos + 1);
            for s in index.lookup(token) {
                let lower = match pre.entry(s.seq) {
                    Entry::Occupied(hit) => hit.get().0,
                    Entry::Vacant(slot) => {
                        let lower = self.stock.lower_bound(s.t + w);
                        if kind.better(lower, upper) {
                            break;
                        }
                        slot.insert((lower, s));
                        continue;
                    }
                };
                if kind.better(lower, upper) {
                    break;
                }
            }
        }

        let mut out = Vec::new();
        for (lower, s) in pre.values() {
            let required = kind.min_overlap(len, s.len(), *lower).max(1);
            if let Some(o) = overlap_count(r.tokens(), s.tokens(), required) {
                out.push(self.pair(r, s, kind.sim(len, s.len(), o)));
            }
        }
        let stats = InsertStats {
            pre_candidates: pre.len(),
            candidates: out.len(),
        };
        (out, stats)
    }
}

/// Posting-list processing order for inverted-index candidate generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeOrder {
    /// Pop lists from a min-heap on their current length.
    ShortestListFirst,
    /// The record's canonical order (descending token id).
    Canonical,
}

fn probe_order(index: Option<&InvertedIndex>, r: &RecordSet, order: ProbeOrder) -> Vec<TokenId> {
    match (order, index) {
        (ProbeOrder::ShortestListFirst, Some(index)) => {
            let mut heap: BinaryHeap<Reverse<(usize, usize, TokenId)>> = r
                .tokens()
                .iter()
                .enumerate()
                .map(|(pos, &tok)| Reverse((index.list_len(tok), pos, tok)))
                .collect();
            let mut out = Vec::with_capacity(r.len());
            while let Some(Reverse((_, _, tok))) = heap.pop() {
                out.push(tok);
            }
            out
        }
        _ => r.tokens().to_vec(),
    }
}

/// Score of two sets computed from their contents, without going through
/// the length/overlap form.
pub fn set_sim(kind: SimilarityKind, a: &HashSet<TokenId>, b: &HashSet<TokenId>) -> f64 {
    let inter = a.intersection(b).count();
    match kind {
        SimilarityKind::Jaccard => inter as f64 / a.union(b).count() as f64,
        SimilarityKind::Cosine => inter as f64 / ((a.len() * b.len()) as f64).sqrt(),
        SimilarityKind::Dice => (2.0 * inter as f64) / ((a.len() + b.len()) as f64),
        SimilarityKind::Overlap => inter as f64,
        SimilarityKind::Hamming => a.symmetric_difference(b).count() as f64,
    }
}

fn oracle_pair(
    a: &RecordSet,
    b: &RecordSet,
    sets: (&HashSet<TokenId>, &HashSet<TokenId>),
    w: f64,
    kind: SimilarityKind,
) -> Option<StockEntry> {
    if sets.0.is_disjoint(sets.1) {
        return None;
    }
    let (newer, older) = if a.seq > b.seq { (a, b) } else { (b, a) };
    Some(StockEntry {
        i: newer.seq,
        j: older.seq,
        sim: set_sim(kind, sets.0, sets.1),
        end: older.t + w,
    })
}

fn oracle_finish(mut pairs: Vec<StockEntry>, k: usize, kind: SimilarityKind) -> Vec<StockEntry> {
    pairs.sort_by(|a, b| cmp_result_order(kind, a, b));
    pairs.truncate(k);
    pairs
}

/// Top-k of a self-join over `window` computed by enumerating every pair.
/// All records are taken to be valid; zero-overlap pairs are excluded.
pub fn brute_force_topk(window: &[&RecordSet], w: f64, k: usize, kind: SimilarityKind) -> Vec<StockEntry> {
    let sets: Vec<HashSet<TokenId>> = window.iter().map(|r| r.tokens().iter().copied().collect()).collect();
    let mut pairs = Vec::new();
    for a in 0..window.len() {
        for b in 0..a {
            pairs.extend(oracle_pair(window[a], window[b], (&sets[a], &sets[b]), w, kind));
        }
    }
    oracle_finish(pairs, k, kind)
}

/// Top-k of a two-stream join over `left × right` by enumeration.
pub fn brute_force_topk_rr(
    left: &[&RecordSet],
    right: &[&RecordSet],
    w: f64,
    k: usize,
    kind: SimilarityKind,
) -> Vec<StockEntry> {
    let to_sets = |v: &[&RecordSet]| -> Vec<HashSet<TokenId>> {
        v.iter().map(|r| r.tokens().iter().copied().collect()).collect()
    };
    let (ls, rs) = (to_sets(left), to_sets(right));
    let mut pairs = Vec::new();
    for (a, sa) in left.iter().zip(&ls) {
        for (b, sb) in right.iter().zip(&rs) {
            pairs.extend(oracle_pair(a, b, (sa, sb), w, kind));
        }
    }
    oracle_finish(pairs, k, kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::TokenDictionary;
    use SimilarityKind::Jaccard;

    fn engine(algo: Algorithm, k: usize, w: f64) -> JoinEngine {
        JoinEngine::new(EngineConfig::new(algo, k, w, Jaccard)).unwrap()
    }

    struct Feed {
        dict: TokenDictionary,
        seq: SeqId,
    }

    impl Feed {
        fn new() -> Self {
            Self {
                dict: TokenDictionary::new(),
                seq: 0,
            }
        }

        fn rec(&mut self, t: f64, toks: &[&str]) -> RecordSet {
            self.seq += 1;
            self.dict.intern_record(toks, self.seq, t)
        }
    }

    #[test]
    fn first_record_has_no_candidates() {
        for algo in Algorithm::ALL {
            let mut e = engine(algo, 3, 10.0);
            let mut f = Feed::new();
            let stats = e.insert(f.rec(1.0, &["a", "b"])).unwrap();
            assert_eq!(stats.candidates, 0);
            assert_eq!(e.window_len(), 1);
            assert!(e.stock().is_empty());
        }
    }

    #[test]
    fn disjoint_sets_leave_stock_empty() {
        for algo in Algorithm::ALL {
            let mut e = engine(algo, 3, 10.0);
            let mut f = Feed::new();
            e.insert(f.rec(1.0, &["a", "b"])).unwrap();
            e.insert(f.rec(2.0, &["c"])).unwrap();
            assert!(e.topk().is_empty(), "{algo}");
        }
    }

    #[test]
    fn insert_walkthrough_on_small_stream() {
        // Window w = 10; r7 = {a, c} arrives at t = 9.
        let mut f = Feed::new();
        let recs = [
            f.rec(1.0, &["a", "b"]),
            f.rec(2.0, &["b", "c"]),
            f.rec(4.0, &["a", "c", "d"]),
            f.rec(5.0, &["d"]),
            f.rec(6.0, &["a"]),
            f.rec(8.0, &["c", "e"]),
            f.rec(9.0, &["a", "c"]),
        ];
        for algo in Algorithm::ALL {
            let mut e = engine(algo, 2, 10.0);
            for (n, r) in recs.iter().enumerate() {
                e.insert(r.clone()).unwrap();
                let window: Vec<&RecordSet> = recs[..=n].iter().collect();
                assert_eq!(
                    e.topk(),
                    brute_force_topk(&window, 10.0, 2, Jaccard),
                    "{algo} after {n}"
                );
            }
            let top = e.topk();
            // {a,c} vs {a,c,d}: 2/3; {a,c} vs {a}: 1/2 and {c,e}: 1/3.
            assert_eq!((top[0].i, top[0].j), (7, 3));
            assert!((top[0].sim - 2.0 / 3.0).abs() < 1e-15);
            assert_eq!(top[0].end, 14.0);
        }
    }

    #[test]
    fn swoop_with_empty_stock_matches_baseline_candidates() {
        let mut f = Feed::new();
        let mut swoop = engine(Algorithm::Swoop, 1000, 100.0);
        let mut base = engine(Algorithm::Base, 1000, 100.0);
        let recs = [
            f.rec(1.0, &["a", "b", "c"]),
            f.rec(2.0, &["b", "c", "d"]),
            f.rec(3.0, &["x"]),
            f.rec(4.0, &["c", "x", "a"]),
        ];
        let probe = f.rec(5.0, &["a", "c", "x", "q"]);
        for r in &recs {
            // Leave the stock empty so the skyband bound cannot crop.
            swoop.sides[0].window.push(Arc::new(r.clone()));
            swoop.sides[0]
                .index
                .as_mut()
                .unwrap()
                .insert(Arc::new(r.clone()))
                .unwrap();
            base.sides[0].window.push(Arc::new(r.clone()));
        }
        let sort = |mut v: Vec<StockEntry>| {
            v.sort_by(|a, b| cmp_result_order(Jaccard, a, b));
            v
        };
        let (sc, _) = swoop.get_candidates_swoop(&probe, Origin::Left, ProbeOrder::ShortestListFirst);
        let (bc, bs) = base.get_candidates_baseline(&probe, Origin::Left);
        assert_eq!(bs.pre_candidates, 4);
        assert_eq!(sort(sc), sort(bc));
    }

    #[test]
    fn baseline_identical_set_scores_one() {
        let mut f = Feed::new();
        let mut e = engine(Algorithm::Base, 3, 10.0);
        e.insert(f.rec(1.0, &["a", "b"])).unwrap();
        let (c, stats) = e.get_candidates_baseline(&f.rec(2.0, &["b", "a"]), Origin::Left);
        assert_eq!(stats.pre_candidates, 1);
        assert_eq!(c[0].sim, 1.0);
    }

    #[test]
    fn probe_orders() {
        let mut f = Feed::new();
        let mut e = engine(Algorithm::Swoop, 3, 100.0);
        // a appears in three records, b in one, c in none.
        e.insert(f.rec(1.0, &["a", "b"])).unwrap();
        e.insert(f.rec(2.0, &["a"])).unwrap();
        e.insert(f.rec(3.0, &["a", "c"])).unwrap();
        let r = f.rec(4.0, &["a", "b", "d"]);
        let (a, b, d) = (
            f.dict.get("a").unwrap(),
            f.dict.get("b").unwrap(),
            f.dict.get("d").unwrap(),
        );
        assert_eq!(
            e.order_tokens_for_probe(&r, Origin::Left, ProbeOrder::Canonical),
            vec![d, b, a]
        );
        assert_eq!(
            e.order_tokens_for_probe(&r, Origin::Left, ProbeOrder::ShortestListFirst),
            vec![d, b, a]
        );
        let r = f.rec(5.0, &["b", "a", "c", "e"]);
        let (c, e_tok) = (f.dict.get("c").unwrap(), f.dict.get("e").unwrap());
        // lengths: e=0, b=1, c=1, a=3; ties keep canonical position
        assert_eq!(
            e.order_tokens_for_probe(&r, Origin::Left, ProbeOrder::ShortestListFirst),
            vec![e_tok, c, b, a]
        );
    }

    #[test]
    fn rejects_time_and_seq_regressions() {
        let mut f = Feed::new();
        let mut e = engine(Algorithm::Swoop, 3, 10.0);
        e.insert(f.rec(5.0, &["a"])).unwrap();
        let err = e.insert(f.rec(4.0, &["a"])).unwrap_err();
        assert!(matches!(err, EngineError::TimeRegression { .. }));
        let stale = RecordSet::new(1, 6.0, vec![0]);
        assert!(matches!(e.insert(stale), Err(EngineError::SeqRegression { .. })));
        assert_eq!(
            e.insert_from(f.rec(7.0, &["a"]), Origin::Right),
            Err(EngineError::RightInSelfJoin)
        );
    }

    #[test]
    fn rejects_bad_config() {
        assert!(JoinEngine::new(EngineConfig::new(Algorithm::Swoop, 0, 1.0, Jaccard)).is_err());
        assert!(JoinEngine::new(EngineConfig::new(Algorithm::Swoop, 1, 0.0, Jaccard)).is_err());
        assert!("quick".parse::<Algorithm>().is_err());
        assert_eq!("swoop-noopt".parse::<Algorithm>(), Ok(Algorithm::SwoopNoOpt));
    }

    #[test]
    fn expiry_clears_window_index_and_stock() {
        let mut f = Feed::new();
        let mut e = engine(Algorithm::Swoop, 3, 10.0);
        e.insert(f.rec(0.0, &["a", "b"])).unwrap();
        e.insert(f.rec(1.0, &["a", "b"])).unwrap();
        assert_eq!(e.topk().len(), 1);
        e.set_index_time(10.0).unwrap();
        assert_eq!(e.window_len(), 1);
        assert!(e.topk().is_empty());
        assert_eq!(e.index(Origin::Left).unwrap().num_records(), 1);
        e.set_index_time(11.0).unwrap();
        assert_eq!(e.window_len(), 0);
        assert_eq!(e.index(Origin::Left).unwrap().tokens().count(), 0);
    }

    #[test]
    fn rr_join_pairs_only_across_streams() {
        let mut f = Feed::new();
        for algo in Algorithm::ALL {
            let mut e = JoinEngine::new(EngineConfig::new(algo, 5, 10.0, Jaccard).rr_join()).unwrap();
            let s = e.insert_from(f.rec(1.0, &["a", "b"]), Origin::Left).unwrap();
            assert_eq!(s.candidates, 0);
            e.insert_from(f.rec(2.0, &["a", "b"]), Origin::Left).unwrap();
            assert!(e.topk().is_empty(), "same-stream pairs must not join");
            e.insert_from(f.rec(3.0, &["a", "b"]), Origin::Right).unwrap();
            let top = e.topk();
            assert_eq!(top.len(), 2);
            assert!(top.iter().all(|p| p.sim == 1.0));
            // The later left record outlives the earlier one.
            assert_eq!(top[0].end, 12.0);
        }
    }

    #[test]
    fn oracle_trivia() {
        let r = RecordSet::new(0, 0.0, vec![1, 2]);
        assert!(brute_force_topk(&[&r], 5.0, 3, Jaccard).is_empty());
        let s = RecordSet::new(1, 1.0, vec![2, 1]);
        let top = brute_force_topk(&[&r, &s], 5.0, 3, Jaccard);
        assert_eq!(
            top,
            vec![StockEntry {
                i: 1,
                j: 0,
                sim: 1.0,
                end: 5.0
            }]
        );
    }
}
