//! Well-behaved set similarity functions.
//!
//! A similarity is well-behaved when it can be evaluated from the two set
//! lengths and their overlap alone, is symmetric, improves monotonically with
//! the overlap, and admits an inverse giving the minimum overlap required to
//! reach a threshold. Jaccard, Cosine, Dice and Overlap are similarities
//! (larger is better); Hamming is a distance (smaller is better). All engine
//! code compares scores through [`SimilarityKind::better`] and friends, never
//! with raw `<`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Whether larger or smaller scores are preferred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SimilarityKind {
    Jaccard,
    Cosine,
    Dice,
    Overlap,
    Hamming,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown similarity `{0}` (expected jaccard|cosine|dice|overlap|hamming)")]
pub struct UnknownSimilarity(pub String);

impl SimilarityKind {
    pub const ALL: [SimilarityKind; 5] = [
        SimilarityKind::Jaccard,
        SimilarityKind::Cosine,
        SimilarityKind::Dice,
        SimilarityKind::Overlap,
        SimilarityKind::Hamming,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SimilarityKind::Jaccard => "jaccard",
            SimilarityKind::Cosine => "cosine",
            SimilarityKind::Dice => "dice",
            SimilarityKind::Overlap => "overlap",
            SimilarityKind::Hamming => "hamming",
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            SimilarityKind::Hamming => Direction::Minimize,
            _ => Direction::Maximize,
        }
    }

    /// Score of two sets with lengths `l_r`, `l_s` sharing `overlap` tokens.
    ///
    /// Panics if a length is zero or the overlap exceeds the shorter length.
    pub fn sim(self, l_r: usize, l_s: usize, overlap: usize) -> f64 {
        assert!(l_r >= 1 && l_s >= 1, "set lengths must be positive (got {l_r}, {l_s})");
        assert!(overlap <= l_r.min(l_s), "overlap {overlap} exceeds min({l_r}, {l_s})");
        self.sim_unchecked(l_r, l_s, overlap)
    }

    #[inline]
    pub(crate) fn sim_unchecked(self, l_r: usize, l_s: usize, overlap: usize) -> f64 {
        let (r, s, o) = (l_r as f64, l_s as f64, overlap as f64);
        match self {
            SimilarityKind::Jaccard => o / ((l_r + l_s - overlap) as f64),
            SimilarityKind::Cosine => o / ((l_r * l_s) as f64).sqrt(),
            SimilarityKind::Dice => (2.0 * o) / ((l_r + l_s) as f64),
            SimilarityKind::Overlap => o,
            SimilarityKind::Hamming => (r + s) - 2.0 * o,
        }
    }

    /// `true` when `a` is strictly better than `b` under this kind's direction.
    #[inline]
    pub fn better(self, a: f64, b: f64) -> bool {
        match self.direction() {
            Direction::Maximize => a > b,
            Direction::Minimize => a < b,
        }
    }

    #[inline]
    pub fn at_least_as_good(self, a: f64, b: f64) -> bool {
        !self.better(b, a)
    }

    /// Orders scores best-first.
    #[inline]
    pub fn cmp_better_first(self, a: f64, b: f64) -> Ordering {
        self.goodness(b).total_cmp(&self.goodness(a))
    }

    /// The bottom element of the better-than order: no real pair scores worse.
    pub fn worst(self) -> f64 {
        match self.direction() {
            Direction::Maximize => 0.0,
            Direction::Minimize => f64::INFINITY,
        }
    }

    /// Monotone re-encoding where larger always means better.
    ///
    /// The `+ 0.0` folds a negative zero into positive zero so that
    /// `total_cmp` agrees with numeric equality.
    #[inline]
    pub fn goodness(self, score: f64) -> f64 {
        match self.direction() {
            Direction::Maximize => score + 0.0,
            Direction::Minimize => -score + 0.0,
        }
    }

    /// Smallest overlap `o` such that `sim(l_r, l_s, o)` is at least as good
    /// as `threshold`, clamped to `[0, min(l_r, l_s)]`.
    ///
    /// The closed form is rounded toward the stricter side and then corrected
    /// against `sim` directly, so floating-point error at integer boundaries
    /// never yields an off-by-one.
    pub fn min_overlap(self, l_r: usize, l_s: usize, threshold: f64) -> usize {
        let max_o = l_r.min(l_s);
        if max_o == 0 {
            return 0;
        }
        let (r, s) = (l_r as f64, l_s as f64);
        let estimate = match self {
            SimilarityKind::Jaccard => (threshold / (1.0 + threshold) * (r + s)).ceil(),
            SimilarityKind::Cosine => (threshold * (r * s).sqrt()).ceil(),
            SimilarityKind::Dice => (threshold * (r + s) / 2.0).ceil(),
            SimilarityKind::Overlap => threshold.ceil(),
            SimilarityKind::Hamming => ((r + s - threshold + 1.0) / 2.0).floor(),
        };
        let mut o = if estimate.is_nan() || estimate <= 0.0 {
            0
        } else if estimate >= max_o as f64 {
            max_o
        } else {
            estimate as usize
        };
        let reaches = |o: usize| self.at_least_as_good(self.sim_unchecked(l_r, l_s, o), threshold);
        while o > 0 && reaches(o - 1) {
            o -= 1;
        }
        while o < max_o && !reaches(o) {
            o += 1;
        }
        o
    }

    /// Best score any set can reach with `r` (of length `l_r`) when it is first
    /// met at probe position `rho` (1-based), i.e. when at least `rho - 1`
    /// tokens of `r` are missing from it.
    pub fn positional_upper_bound(self, l_r: usize, rho: usize) -> f64 {
        assert!(rho >= 1 && rho <= l_r, "probe position {rho} outside 1..={l_r}");
        let rest = l_r - rho + 1;
        self.sim_unchecked(l_r, rest, rest)
    }
}

impl fmt::Display for SimilarityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SimilarityKind {
    type Err = UnknownSimilarity;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SimilarityKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownSimilarity(s.to_string()))
    }
}
