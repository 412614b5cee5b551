//! Seeded synthetic set streams.
//!
//! Tokens are named `t<n>`. Timestamps are `i / rate`. A fraction
//! `dup_rate` of the sets are near-duplicates: a copy of one of the last few
//! sets with each token replaced with probability [`DUP_MUTATION`].

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};
use thiserror::Error;

/// The token injected by [`Profile::LateHotToken`].
pub const HOT_TOKEN: &str = "HOT";

/// How many recent sets a near-duplicate may copy from.
pub const DUP_LOOKBACK: usize = 10;

pub const DUP_MUTATION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// Tokens drawn uniformly from the universe.
    Uniform,
    /// Tokens drawn from a Zipf distribution (exponent 1) over the universe.
    Zipf,
    /// Uniform tokens, plus [`HOT_TOKEN`] in each set with probability 0.5
    /// from event `n / 4` on.
    LateHotToken,
}

impl Profile {
    pub fn name(self) -> &'static str {
        match self {
            Profile::Uniform => "uniform",
            Profile::Zipf => "zipf",
            Profile::LateHotToken => "late-hot-token",
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Profile {
    type Err = GeneratorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [Profile::Uniform, Profile::Zipf, Profile::LateHotToken]
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| GeneratorError::UnknownProfile(s.to_string()))
    }
}

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("unknown profile `{0}` (expected uniform|zipf|late-hot-token)")]
    UnknownProfile(String),
    #[error("invalid generator parameters: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub profile: Profile,
    /// Number of sets.
    pub n: usize,
    /// Number of distinct ordinary tokens.
    pub universe: usize,
    /// Set sizes are uniform in `min_len..=max_len`.
    pub min_len: usize,
    pub max_len: usize,
    /// Sets per second.
    pub rate: f64,
    pub dup_rate: f64,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            profile: Profile::Uniform,
            n: 10_000,
            universe: 100_000,
            min_len: 5,
            max_len: 15,
            rate: 100.0,
            dup_rate: 0.0,
            seed: 0,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<(), GeneratorError> {
        let bad = |msg: &str| Err(GeneratorError::Invalid(msg.to_string()));
        if self.universe == 0 {
            return bad("universe must be positive");
        }
        if self.min_len > self.max_len {
            return bad("min-len exceeds max-len");
        }
        if self.max_len > self.universe {
            return bad("max-len exceeds universe");
        }
        if !(self.rate.is_finite() && self.rate > 0.0) {
            return bad("rate must be positive");
        }
        if !(0.0..=1.0).contains(&self.dup_rate) {
            return bad("dup-rate must lie in [0, 1]");
        }
        Ok(())
    }
}

/// A generated set before formatting: timestamp and token names.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticRecord {
    pub t: f64,
    pub tokens: Vec<String>,
}

struct TokenSource {
    profile: Profile,
    universe: usize,
    zipf: Option<Zipf<f64>>,
}

impl TokenSource {
    fn draw(&self, rng: &mut ChaCha8Rng) -> String {
        let id = match &self.zipf {
            Some(z) => z.sample(rng) as usize - 1,
            None => rng.gen_range(0..self.universe),
        };
        format!("t{id}")
    }
}

pub fn generate_records(cfg: &GeneratorConfig) -> Result<Vec<SyntheticRecord>, GeneratorError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let source = TokenSource {
        profile: cfg.profile,
        universe: cfg.universe,
        zipf: match cfg.profile {
            Profile::Zipf => {
                Some(Zipf::new(cfg.universe as u64, 1.0).map_err(|e| GeneratorError::Invalid(e.to_string()))?)
            }
            Profile::Uniform | Profile::LateHotToken => None,
        },
    };
    let hot_from = cfg.n / 4;
    let mut out: Vec<SyntheticRecord> = Vec::with_capacity(cfg.n);
    for i in 0..cfg.n {
        let mut tokens: Vec<String> = Vec::new();
        if !out.is_empty() && rng.gen_bool(cfg.dup_rate) {
            let back = rng.gen_range(1..=out.len().min(DUP_LOOKBACK));
            for tok in &out[out.len() - back].tokens {
                if tok == HOT_TOKEN {
                    continue;
                }
                let tok = if rng.gen_bool(DUP_MUTATION) {
                    source.draw(&mut rng)
                } else {
                    tok.clone()
                };
                if !tokens.contains(&tok) {
                    tokens.push(tok);
                }
            }
        } else {
            let len = rng.gen_range(cfg.min_len..=cfg.max_len);
            while tokens.len() < len {
                let tok = source.draw(&mut rng);
                if !tokens.contains(&tok) {
                    tokens.push(tok);
                }
            }
        }
        if source.profile == Profile::LateHotToken && i >= hot_from && rng.gen_bool(0.5) {
            tokens.push(HOT_TOKEN.to_string());
        }
        out.push(SyntheticRecord {
            t: i as f64 / cfg.rate,
            tokens,
        });
    }
    Ok(out)
}

/// Writes a generated stream in the `<t>\t<tok> <tok> ...` text format.
pub fn generate_synthetic<W: Write>(cfg: &GeneratorConfig, out: W) -> Result<(), GeneratorError> {
    let records = generate_records(cfg)?;
    write_stream(&records, out)?;
    Ok(())
}

pub fn write_stream<W: Write>(records: &[SyntheticRecord], out: W) -> io::Result<()> {
    let mut out = io::BufWriter::new(out);
    for r in records {
        writeln!(out, "{}\t{}", r.t, r.tokens.join(" "))?;
    }
    out.flush()
}
