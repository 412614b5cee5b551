//! Driving engines over parsed streams.

use std::fmt;
use std::io::{self, Write};
use std::sync::Arc;
use std::time::Instant;

use thiserror::Error;

use super::metrics::{queue_latencies, RunMetrics};
use crate::engine::{EngineConfig, EngineError, InsertStats, JoinEngine, JoinMode, Origin};
use crate::stock::StockEntry;
use crate::stream::{RawRecord, RecordSet, TokenDictionary};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{mode} needs {expected} input stream(s), got {got}")]
    InputCount {
        mode: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("`{engine}` diverged from `{reference}` at snapshot {index} (t_J = {t_j})")]
    SnapshotMismatch {
        engine: String,
        reference: String,
        index: usize,
        t_j: f64,
    },
    #[error("engine `{engine}` failed: {source}")]
    Engine {
        engine: String,
        #[source]
        source: EngineError,
    },
    #[error("engine thread panicked")]
    Panicked,
}

/// One arrival: an interned record and the stream it came from.
#[derive(Debug, Clone)]
pub struct Event {
    pub record: Arc<RecordSet>,
    pub origin: Origin,
}

#[derive(Debug, Clone, Default)]
pub struct PreparedStream {
    pub events: Vec<Event>,
    pub dictionary: TokenDictionary,
    pub inputs: usize,
}

/// Interns one or two parsed streams into a single event sequence.
///
/// Two streams are merged by timestamp, the first stream winning ties;
/// sequence numbers follow the merged order and both streams share one
/// token dictionary.
pub fn prepare(inputs: &[Vec<RawRecord>]) -> PreparedStream {
    let mut cursors = vec![0usize; inputs.len()];
    let mut dictionary = TokenDictionary::new();
    let mut events = Vec::with_capacity(inputs.iter().map(Vec::len).sum());
    loop {
        let next = (0..inputs.len())
            .filter(|&s| cursors[s] < inputs[s].len())
            .min_by(|&a, &b| {
                inputs[a][cursors[a]]
                    .t
                    .total_cmp(&inputs[b][cursors[b]].t)
                    .then(a.cmp(&b))
            });
        let Some(side) = next else { break };
        let raw = &inputs[side][cursors[side]];
        cursors[side] += 1;
        let seq = events.len() as u64;
        events.push(Event {
            record: Arc::new(dictionary.intern_record(&raw.tokens, seq, raw.t)),
            origin: if side == 0 { Origin::Left } else { Origin::Right },
        });
    }
    PreparedStream {
        events,
        dictionary,
        inputs: inputs.len(),
    }
}

/// The top-k result right after an event.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotRecord {
    pub t_j: f64,
    pub rows: Vec<StockEntry>,
}

impl fmt::Display for SnapshotRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.rows {
            writeln!(f, "{} {} {} {} {}", self.t_j, p.i, p.j, p.sim, p.end)?;
        }
        Ok(())
    }
}

pub fn write_snapshots<W: Write>(mut out: W, snapshots: &[SnapshotRecord]) -> io::Result<()> {
    for s in snapshots {
        write!(out, "{s}")?;
    }
    out.flush()
}

/// Anything that maintains a continuous top-k join over an event sequence.
pub trait ContinuousJoin: Send {
    fn label(&self) -> String;
    fn config(&self) -> EngineConfig;
    fn process(&mut self, event: &Event) -> Result<InsertStats, EngineError>;
    fn index_time(&self) -> f64;
    fn topk(&self) -> Vec<StockEntry>;
    fn stock_len(&self) -> usize;
    fn window_len(&self) -> usize;
}

impl ContinuousJoin for JoinEngine {
    fn label(&self) -> String {
        self.config().algorithm.to_string()
    }

    fn config(&self) -> EngineConfig {
        *JoinEngine::config(self)
    }

    fn process(&mut self, event: &Event) -> Result<InsertStats, EngineError> {
        self.insert_from(Arc::clone(&event.record), event.origin)
    }

    fn index_time(&self) -> f64 {
        JoinEngine::index_time(self)
    }

    fn topk(&self) -> Vec<StockEntry> {
        JoinEngine::topk(self)
    }

    fn stock_len(&self) -> usize {
        self.stock().len()
    }

    fn window_len(&self) -> usize {
        JoinEngine::window_len(self)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Take a snapshot after every `n`-th event; `None` takes none.
    pub snapshot_every: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub metrics: RunMetrics,
    pub snapshots: Vec<SnapshotRecord>,
}

pub fn check_inputs(mode: JoinMode, inputs: usize) -> Result<(), HarnessError> {
    let (name, expected) = match mode {
        JoinMode::SelfJoin => ("self-join", 1),
        JoinMode::RrJoin => ("rr-join", 2),
    };
    if inputs == expected {
        Ok(())
    } else {
        Err(HarnessError::InputCount {
            mode: name,
            expected,
            got: inputs,
        })
    }
}

/// Feeds every event to `engine`, collecting measures and snapshots.
pub fn run_engine(
    engine: &mut dyn ContinuousJoin,
    events: &[Event],
    opts: RunOptions,
) -> Result<RunOutput, HarnessError> {
    let mut metrics = RunMetrics::new(engine.label(), engine.config());
    let mut snapshots = Vec::new();
    let mut service = Vec::with_capacity(events.len());
    let mut window_sum = 0u64;
    for (n, event) in events.iter().enumerate() {
        let started = Instant::now();
        let stats = engine.process(event).map_err(|source| HarnessError::Engine {
            engine: engine.label(),
            source,
        })?;
        service.push(started.elapsed().as_secs_f64());
        metrics.pre_candidates += stats.pre_candidates as u64;
        metrics.candidates += stats.candidates as u64;
        metrics.max_stock_size = metrics.max_stock_size.max(engine.stock_len());
        window_sum += engine.window_len() as u64;
        if opts
            .snapshot_every
            .is_some_and(|every| every > 0 && (n + 1) % every == 0)
        {
            snapshots.push(SnapshotRecord {
                t_j: engine.index_time(),
                rows: engine.topk(),
            });
        }
    }
    metrics.sets_processed = events.len() as u64;
    metrics.elapsed = service.iter().sum();
    if !events.is_empty() {
        metrics.avg_window_size = window_sum as f64 / events.len() as f64;
        let origin = events[0].record.t;
        let arrivals: Vec<f64> = events.iter().map(|e| e.record.t - origin).collect();
        metrics.latencies = queue_latencies(&arrivals, &service);
    }
    Ok(RunOutput { metrics, snapshots })
}

/// Builds an engine from `config` and runs it over `stream`.
pub fn run(config: EngineConfig, stream: &PreparedStream, opts: RunOptions) -> Result<RunOutput, HarnessError> {
    check_inputs(config.mode, stream.inputs)?;
    let mut engine = JoinEngine::new(config).map_err(|source| HarnessError::Engine {
        engine: config.algorithm.to_string(),
        source,
    })?;
    run_engine(&mut engine, &stream.events, opts)
}

/// Runs every engine over the same events on its own thread and checks that
/// all of them produce the same snapshots as the first.
///
/// Without a snapshot interval every event is compared.
pub fn compare(
    engines: Vec<Box<dyn ContinuousJoin>>,
    stream: &PreparedStream,
    opts: RunOptions,
) -> Result<Vec<RunOutput>, HarnessError> {
    for e in &engines {
        check_inputs(e.config().mode, stream.inputs)?;
    }
    let opts = RunOptions {
        snapshot_every: Some(opts.snapshot_every.unwrap_or(1)),
    };
    let results: Vec<Result<RunOutput, HarnessError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = engines
            .into_iter()
            .map(|mut engine| scope.spawn(move || run_engine(engine.as_mut(), &stream.events, opts)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or(Err(HarnessError::Panicked)))
            .collect()
    });
    let outputs = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    if let Some((reference, rest)) = outputs.split_first() {
        for other in rest {
            let diverged = reference
                .snapshots
                .iter()
                .zip(&other.snapshots)
                .position(|(a, b)| a != b)
                .or((reference.snapshots.len() != other.snapshots.len())
                    .then(|| reference.snapshots.len().min(other.snapshots.len())));
            if let Some(index) = diverged {
                let t_j = reference
                    .snapshots
                    .get(index)
                    .or(other.snapshots.get(index))
                    .map_or(f64::NAN, |s| s.t_j);
                return Err(HarnessError::SnapshotMismatch {
                    engine: other.metrics.label.clone(),
                    reference: reference.metrics.label.clone(),
                    index,
                    t_j,
                });
            }
        }
    }
    Ok(outputs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Algorithm;
    use crate::similarity::SimilarityKind;
    use crate::stream::parse_stream;

    fn parse(text: &str) -> Vec<RawRecord> {
        parse_stream(text.as_bytes()).unwrap()
    }

    fn cfg(algo: Algorithm, k: usize, w: f64) -> EngineConfig {
        EngineConfig::new(algo, k, w, SimilarityKind::Jaccard)
    }

    const HAND: &str = "1\ta b c\n2\tb c d\n3\ta b c d\n";

    #[test]
    fn empty_input_gives_zero_counters() {
        let stream = prepare(&[Vec::new()]);
        let out = run(
            cfg(Algorithm::Swoop, 3, 5.0),
            &stream,
            RunOptions {
                snapshot_every: Some(1),
            },
        )
        .unwrap();
        assert_eq!(out.metrics.counters(), (0, 0, 0, 0, 0.0));
        assert!(out.metrics.latencies.is_empty());
        assert!(out.snapshots.is_empty());
    }

    #[test]
    fn hand_stream_top1() {
        // Two pairs score 3/4; the one ending later ranks first.
        let stream = prepare(&[parse(HAND)]);
        let out = run(
            cfg(Algorithm::Swoop, 1, 100.0),
            &stream,
            RunOptions {
                snapshot_every: Some(3),
            },
        )
        .unwrap();
        assert_eq!(out.snapshots.len(), 1);
        let snap = &out.snapshots[0];
        assert_eq!(snap.t_j, 3.0);
        assert_eq!(
            snap.rows,
            vec![StockEntry {
                i: 2,
                j: 1,
                sim: 0.75,
                end: 102.0
            }]
        );
        assert_eq!(snap.to_string(), "3 2 1 0.75 102\n");
    }

    #[test]
    fn base_and_swoop_agree_with_different_work() {
        let text: String = (0..60)
            .map(|i| format!("{i}\tx{} x{} x{} y{}\n", i % 5, i % 7, i % 3, i % 11))
            .collect();
        let stream = prepare(&[parse(&text)]);
        let opts = RunOptions {
            snapshot_every: Some(1),
        };
        let base = run(cfg(Algorithm::Base, 3, 20.0), &stream, opts).unwrap();
        let swoop = run(cfg(Algorithm::Swoop, 3, 20.0), &stream, opts).unwrap();
        assert_eq!(base.snapshots, swoop.snapshots);
        assert_ne!(base.metrics.pre_candidates, swoop.metrics.pre_candidates);
        assert!(swoop.metrics.candidates <= swoop.metrics.pre_candidates);
        assert!(base.metrics.max_stock_size >= swoop.metrics.max_stock_size);
    }

    #[test]
    fn counters_are_deterministic() {
        let stream = prepare(&[parse(HAND)]);
        let a = run(cfg(Algorithm::Swoop, 2, 10.0), &stream, RunOptions::default()).unwrap();
        let b = run(cfg(Algorithm::Swoop, 2, 10.0), &stream, RunOptions::default()).unwrap();
        assert_eq!(a.metrics.counters(), b.metrics.counters());
    }

    #[test]
    fn merges_two_streams_left_first_on_ties() {
        let left = parse("1\ta\n2\tb\n");
        let right = parse("0.5\tc\n2\ta\n");
        let stream = prepare(&[left, right]);
        let order: Vec<(f64, Origin)> = stream.events.iter().map(|e| (e.record.t, e.origin)).collect();
        assert_eq!(
            order,
            vec![
                (0.5, Origin::Right),
                (1.0, Origin::Left),
                (2.0, Origin::Left),
                (2.0, Origin::Right)
            ]
        );
        assert_eq!(stream.dictionary.get("c"), Some(0));
        let seqs: Vec<u64> = stream.events.iter().map(|e| e.record.seq).collect();
        assert_eq!(seqs, vec![0, 1, 2, 3]);
    }

    #[test]
    fn input_count_must_match_mode() {
        let one = prepare(&[parse(HAND)]);
        let rr = cfg(Algorithm::Swoop, 1, 5.0).rr_join();
        assert!(matches!(
            run(rr, &one, RunOptions::default()),
            Err(HarnessError::InputCount { .. })
        ));
        let two = prepare(&[parse(HAND), parse(HAND)]);
        assert!(run(cfg(Algorithm::Swoop, 1, 5.0), &two, RunOptions::default()).is_err());
        assert!(run(rr, &two, RunOptions::default()).is_ok());
    }

    struct Lossy(JoinEngine);

    impl ContinuousJoin for Lossy {
        fn label(&self) -> String {
            "lossy".into()
        }
        fn config(&self) -> EngineConfig {
            *self.0.config()
        }
        fn process(&mut self, event: &Event) -> Result<InsertStats, EngineError> {
            self.0.process(event)
        }
        fn index_time(&self) -> f64 {
            self.0.index_time()
        }
        fn topk(&self) -> Vec<StockEntry> {
            let mut top = self.0.topk();
            top.pop();
            top
        }
        fn stock_len(&self) -> usize {
            self.0.stock().len()
        }
        fn window_len(&self) -> usize {
            self.0.window_len()
        }
    }

    #[test]
    fn compare_flags_divergence() {
        let stream = prepare(&[parse(HAND)]);
        let c = cfg(Algorithm::Swoop, 2, 10.0);
        let good = compare(
            vec![
                Box::new(JoinEngine::new(cfg(Algorithm::Base, 2, 10.0)).unwrap()),
                Box::new(JoinEngine::new(c).unwrap()),
                Box::new(JoinEngine::new(cfg(Algorithm::SwoopNoOpt, 2, 10.0)).unwrap()),
            ],
            &stream,
            RunOptions::default(),
        )
        .unwrap();
        assert_eq!(good.len(), 3);
        let err = compare(
            vec![
                Box::new(JoinEngine::new(c).unwrap()),
                Box::new(Lossy(JoinEngine::new(c).unwrap())),
            ],
            &stream,
            RunOptions::default(),
        )
        .unwrap_err();
        match err {
            HarnessError::SnapshotMismatch { engine, index, .. } => {
                assert_eq!(engine, "lossy");
                assert_eq!(index, 1);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn compare_single_engine() {
        let stream = prepare(&[parse(HAND)]);
        let out = compare(
            vec![Box::new(JoinEngine::new(cfg(Algorithm::Swoop, 2, 10.0)).unwrap())],
            &stream,
            RunOptions::default(),
        )
        .unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].snapshots.len(), 3);
    }
}
