#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swoop_core::engine::{set_sim, Origin};
use swoop_core::harness::Event;
use swoop_core::similarity::{Direction, SimilarityKind};
use swoop_core::stock::StockEntry;
use swoop_core::stream::{RawRecord, RecordSet, SeqId, TokenId};

/// A pair keyed by result order: better score, then later end, then ids.
#[derive(Debug, Clone, Copy)]
pub struct Ranked {
    pub good: f64,
    pub entry: StockEntry,
}

impl Ranked {
    pub fn new(kind: SimilarityKind, entry: StockEntry) -> Self {
        let good = match kind.direction() {
            Direction::Maximize => entry.sim,
            Direction::Minimize => -entry.sim,
        };
        Self { good, entry }
    }
}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .good
            .total_cmp(&self.good)
            .then(other.entry.end.total_cmp(&self.entry.end))
            .then(self.entry.i.cmp(&other.entry.i))
            .then(self.entry.j.cmp(&other.entry.j))
    }
}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ranked {}

/// Keeps every valid positive pair of the join in result order.
pub struct Oracle {
    kind: SimilarityKind,
    k: usize,
    w: f64,
    two_streams: bool,
    window: VecDeque<(Arc<RecordSet>, HashSet<TokenId>, Origin)>,
    pairs: BTreeSet<Ranked>,
    by_older: HashMap<SeqId, Vec<Ranked>>,
}

impl Oracle {
    pub fn new(kind: SimilarityKind, k: usize, w: f64, two_streams: bool) -> Self {
        Self {
            kind,
            k,
            w,
            two_streams,
            window: VecDeque::new(),
            pairs: BTreeSet::new(),
            by_older: HashMap::new(),
        }
    }

    pub fn window_len(&self) -> usize {
        self.window.len()
    }

    pub fn step(&mut self, event: &Event) {
        let r = &event.record;
        let t = r.t;
        while let Some((old, _, _)) = self.window.front() {
            if old.t + self.w > t {
                break;
            }
            let seq = old.seq;
            for p in self.by_older.remove(&seq).unwrap_or_default() {
                self.pairs.remove(&p);
            }
            self.window.pop_front();
        }
        let set: HashSet<TokenId> = r.tokens().iter().copied().collect();
        for (s, s_set, origin) in &self.window {
            if self.two_streams && *origin == event.origin {
                continue;
            }
            if set.is_disjoint(s_set) {
                continue;
            }
            let p = Ranked::new(
                self.kind,
                StockEntry {
                    i: r.seq,
                    j: s.seq,
                    sim: set_sim(self.kind, &set, s_set),
                    end: s.t + self.w,
                },
            );
            self.pairs.insert(p);
            self.by_older.entry(s.seq).or_default().push(p);
        }
        self.window.push_back((Arc::clone(r), set, event.origin));
    }

    pub fn topk(&self) -> Vec<StockEntry> {
        self.pairs.iter().take(self.k).map(|p| p.entry).collect()
    }
}

/// Pairs in `entries` with at least `k` peers that rank before them and do
/// not end earlier.
pub fn irrelevant(kind: SimilarityKind, k: usize, entries: &[StockEntry]) -> Vec<StockEntry> {
    let mut ranked: Vec<Ranked> = entries.iter().map(|e| Ranked::new(kind, *e)).collect();
    ranked.sort();
    let mut ends: Vec<f64> = ranked.iter().map(|p| p.entry.end).collect();
    ends.sort_by(f64::total_cmp);
    ends.dedup();
    let mut fenwick = vec![0usize; ends.len() + 1];
    let mut out = Vec::new();
    for (seen, p) in ranked.iter().enumerate() {
        let pos = ends.partition_point(|&e| e < p.entry.end);
        // Earlier pairs ending strictly before p.
        let mut before = 0;
        let mut idx = pos;
        while idx > 0 {
            before += fenwick[idx];
            idx &= idx - 1;
        }
        if seen - before >= k {
            out.push(p.entry);
        }
        let mut idx = pos + 1;
        while idx < fenwick.len() {
            fenwick[idx] += 1;
            idx += idx & idx.wrapping_neg();
        }
    }
    out
}

/// Same as [`irrelevant`] by direct quadratic counting.
pub fn irrelevant_quadratic(kind: SimilarityKind, k: usize, entries: &[StockEntry]) -> Vec<StockEntry> {
    let mut ranked: Vec<Ranked> = entries.iter().map(|e| Ranked::new(kind, *e)).collect();
    ranked.sort();
    ranked
        .iter()
        .enumerate()
        .filter(|(n, p)| ranked[..*n].iter().filter(|q| q.entry.end >= p.entry.end).count() >= k)
        .map(|(_, p)| p.entry)
        .collect()
}

/// Shape of a random test stream.
#[derive(Debug, Clone, Copy)]
pub struct StreamShape {
    pub events: usize,
    pub universe: usize,
    pub max_len: usize,
    /// Probability that a set shares the previous set's timestamp.
    pub tie_prob: f64,
}

/// Mean gap between consecutive timestamps produced by [`random_stream`].
pub fn mean_gap(shape: &StreamShape) -> f64 {
    (1.0 - shape.tie_prob) * 0.55
}

/// Skewed random tokens, set sizes `0..=max_len`, and timestamps advancing
/// by multiples of 0.1 (or not at all).
pub fn random_stream(seed: u64, shape: &StreamShape) -> Vec<RawRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = rng.gen_range(0.0..5.0);
    let mut out = Vec::with_capacity(shape.events);
    for line in 1..=shape.events {
        if line > 1 && !rng.gen_bool(shape.tie_prob) {
            t += rng.gen_range(1..=10) as f64 * 0.1;
        }
        let len = rng.gen_range(0..=shape.max_len);
        let tokens = (0..len)
            .map(|_| {
                let u: f64 = rng.gen();
                format!("w{}", (u * u * shape.universe as f64) as usize)
            })
            .collect();
        out.push(RawRecord { line, t, tokens });
    }
    out
}

/// Runs `check` on a fixed set of workloads across `threads` worker threads.
pub fn parallel<T: Sync, R: Send>(items: &[T], check: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(items.len().max(1));
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut results: Vec<(usize, R)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|_| {
                scope.spawn(|| {
                    let mut local = Vec::new();
                    loop {
                        let n = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                        if n >= items.len() {
                            break local;
                        }
                        local.push((n, check(&items[n])));
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    results.sort_by_key(|(n, _)| *n);
    results.into_iter().map(|(_, r)| r).collect()
}
