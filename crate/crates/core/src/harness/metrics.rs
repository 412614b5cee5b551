//! Run measures and their CSV form.

use std::io::Write;

use crate::engine::EngineConfig;

/// Column order of the metrics CSV.
pub const CSV_COLUMNS: [&str; 13] = [
    "algorithm",
    "k",
    "w",
    "similarity",
    "sets",
    "elapsed_s",
    "set_rate",
    "pre_candidates",
    "candidates",
    "max_stock",
    "avg_window",
    "lat_p50_s",
    "lat_max_s",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub label: String,
    pub config: EngineConfig,
    pub sets_processed: u64,
    /// Wall time spent inside the engine, in seconds.
    pub elapsed: f64,
    pub pre_candidates: u64,
    pub candidates: u64,
    pub max_stock_size: usize,
    pub avg_window_size: f64,
    /// Per-event latency in seconds, in event order.
    pub latencies: Vec<f64>,
}

impl RunMetrics {
    pub fn new(label: impl Into<String>, config: EngineConfig) -> Self {
        Self {
            label: label.into(),
            config,
            sets_processed: 0,
            elapsed: 0.0,
            pre_candidates: 0,
            candidates: 0,
            max_stock_size: 0,
            avg_window_size: 0.0,
            latencies: Vec::new(),
        }
    }

    /// Processed sets per second of engine time.
    pub fn set_rate(&self) -> f64 {
        if self.elapsed > 0.0 {
            self.sets_processed as f64 / self.elapsed
        } else {
            0.0
        }
    }

    pub fn latency_p50(&self) -> f64 {
        if self.latencies.is_empty() {
            return 0.0;
        }
        let mut sorted = self.latencies.clone();
        sorted.sort_by(f64::total_cmp);
        sorted[(sorted.len() - 1) / 2]
    }

    pub fn latency_max(&self) -> f64 {
        self.latencies.iter().copied().fold(0.0, f64::max)
    }

    /// The deterministic part of the metrics (everything but timings).
    pub fn counters(&self) -> (u64, u64, u64, usize, f64) {
        (
            self.sets_processed,
            self.pre_candidates,
            self.candidates,
            self.max_stock_size,
            self.avg_window_size,
        )
    }

    pub fn row(&self) -> CsvRow {
        CsvRow {
            algorithm: self.label.clone(),
            k: self.config.k,
            w: self.config.window,
            similarity: self.config.similarity.to_string(),
            sets: self.sets_processed,
            elapsed_s: self.elapsed,
            set_rate: self.set_rate(),
            pre_candidates: self.pre_candidates,
            candidates: self.candidates,
            max_stock: self.max_stock_size,
            avg_window: self.avg_window_size,
            lat_p50_s: self.latency_p50(),
            lat_max_s: self.latency_max(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub algorithm: String,
    pub k: usize,
    pub w: f64,
    pub similarity: String,
    pub sets: u64,
    pub elapsed_s: f64,
    pub set_rate: f64,
    pub pre_candidates: u64,
    pub candidates: u64,
    pub max_stock: usize,
    pub avg_window: f64,
    pub lat_p50_s: f64,
    pub lat_max_s: f64,
}

impl CsvRow {
    pub fn values(&self) -> [String; 13] {
        [
            self.algorithm.clone(),
            self.k.to_string(),
            self.w.to_string(),
            self.similarity.clone(),
            self.sets.to_string(),
            self.elapsed_s.to_string(),
            self.set_rate.to_string(),
            self.pre_candidates.to_string(),
            self.candidates.to_string(),
            self.max_stock.to_string(),
            self.avg_window.to_string(),
            self.lat_p50_s.to_string(),
            self.lat_max_s.to_string(),
        ]
    }
}

/// One row per run, columns as in [`CSV_COLUMNS`].
pub fn write_metrics_csv<W: Write>(out: W, runs: &[RunMetrics]) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(CSV_COLUMNS)?;
    for run in runs {
        wtr.write_record(run.row().values())?;
    }
    wtr.flush()?;
    Ok(())
}

/// One row per measure and one column per run.
pub fn write_comparison_csv<W: Write>(out: W, runs: &[RunMetrics]) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    let mut header = vec!["metric".to_string()];
    header.extend(runs.iter().map(|r| r.label.clone()));
    wtr.write_record(&header)?;
    let cols: Vec<[String; 13]> = runs.iter().map(|r| r.row().values()).collect();
    for (m, name) in CSV_COLUMNS.iter().enumerate().skip(1) {
        let mut line = vec![name.to_string()];
        line.extend(cols.iter().map(|c| c[m].clone()));
        wtr.write_record(&line)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Latency of each event under a single-server queue.
///
/// Event `n` arrives at `arrivals[n]` and needs `service[n]` seconds; it starts
/// once it has arrived and the previous event has finished.
pub fn queue_latencies(arrivals: &[f64], service: &[f64]) -> Vec<f64> {
    let mut finish = f64::NEG_INFINITY;
    arrivals
        .iter()
        .zip(service)
        .map(|(&a, &s)| {
            finish = finish.max(a) + s;
            finish - a
        })
        .collect()
}
