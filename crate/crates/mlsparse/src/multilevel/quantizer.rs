//! Level quantizers: the subset of levels at which single-level solutions are
//! actually computed, and the tight (A, B) constants describing how much
//! rounding can inflate the cost.

use crate::multilevel::{LevelCostFn, MultiLevelError};
use crate::weight::Weight;

/// A rounding set Q = {i_1 = 1 < i_2 < … < i_m <= ell}. Level i is served by
/// the sparsifier computed at the largest element of Q at or below i, plus
/// everything computed above i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quantizer {
    levels: Vec<usize>,
    ell: usize,
}

impl Quantizer {
    pub fn new(mut levels: Vec<usize>, ell: usize) -> Result<Self, MultiLevelError> {
        levels.sort_unstable();
        levels.dedup();
        if ell == 0 {
            return Err(MultiLevelError::NoLevels);
        }
        if levels.first() != Some(&1) || levels.last().is_none_or(|&m| m > ell) {
            return Err(MultiLevelError::BadQuantizer);
        }
        Ok(Quantizer { levels, ell })
    }

    /// Bottom-up preset: Q = {1, ell}.
    pub fn bottom_up(ell: usize) -> Result<Self, MultiLevelError> {
        if ell <= 1 {
            Self::new(vec![1], ell)
        } else {
            Self::new(vec![1, ell], ell)
        }
    }

    /// Top-down preset: Q = {1, …, ell}.
    pub fn top_down(ell: usize) -> Result<Self, MultiLevelError> {
        Self::new((1..=ell).collect(), ell)
    }

    /// Powers-of-two preset: Q = {1, 2, 4, …} ∩ {1..ell}.
    pub fn powers_of_two(ell: usize) -> Result<Self, MultiLevelError> {
        let mut levels = Vec::new();
        let mut p = 1usize;
        while p <= ell {
            levels.push(p);
            p *= 2;
        }
        Self::new(levels, ell)
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn level_count(&self) -> usize {
        self.ell
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, level: usize) -> bool {
        self.levels.binary_search(&level).is_ok()
    }

    /// Largest element of Q at or below `i`: the level whose sparsifier
    /// serves level i.
    pub fn serving_level(&self, i: usize) -> usize {
        debug_assert!((1..=self.ell).contains(&i));
        match self.levels.binary_search(&i) {
            Ok(_) => i,
            Err(pos) => self.levels[pos - 1],
        }
    }

    /// Smallest element of Q at or above `i` when it exists, otherwise ell.
    /// This is the rounding map behind the A constant.
    pub fn round_up(&self, i: usize) -> usize {
        debug_assert!((1..=self.ell).contains(&i));
        match self.levels.binary_search(&i) {
            Ok(_) => i,
            Err(pos) if pos < self.levels.len() => self.levels[pos],
            Err(_) => self.ell,
        }
    }

    /// The k-th element i_k (1-based), with i_{m+1} = ell + 1.
    pub fn element_or_sentinel(&self, k: usize) -> usize {
        if k <= self.levels.len() {
            self.levels[k - 1]
        } else {
            self.ell + 1
        }
    }

    /// All 2^{ell-1} quantizers containing level 1, in mask order.
    pub fn enumerate_all(ell: usize) -> Vec<Quantizer> {
        let free = ell - 1;
        let mut out = Vec::with_capacity(1 << free);
        for mask in 0u64..(1u64 << free) {
            let mut levels = vec![1];
            for b in 0..free {
                if mask & (1 << b) != 0 {
                    levels.push(b + 2);
                }
            }
            out.push(Quantizer::new(levels, ell).unwrap());
        }
        out
    }
}

impl std::fmt::Display for Quantizer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.levels.iter().map(|l| l.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Tight constants of the rounding analysis for a given cost scaling and
/// quantizer: A bounds g(round_up(i))/g(i) over all levels, B bounds the cost
/// of stacking an edge across every computed level at or below its own.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizerProfile {
    pub a: Weight,
    pub b: Weight,
}

pub fn quantizer_profile(g: &LevelCostFn, q: &Quantizer) -> QuantizerProfile {
    let ell = q.level_count();
    let mut a = Weight::from_integer(1);
    for i in 1..=ell {
        let ratio = g.eval(q.round_up(i)) / g.eval(i);
        if ratio > a {
            a = ratio;
        }
    }
    let mut b = Weight::from_integer(1);
    let mut prefix = Weight::from_integer(0);
    for &ik in q.levels() {
        prefix += g.eval(ik);
        let ratio = prefix / g.eval(ik);
        if ratio > b {
            b = ratio;
        }
    }
    QuantizerProfile { a, b }
}
