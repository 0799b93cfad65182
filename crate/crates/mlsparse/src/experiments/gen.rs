//! Seeded random instances: Erdős–Rényi graphs with integer weights and
//! nested terminal samples.
//!
//! All randomness comes from ChaCha8 streams seeded explicitly, so any
//! (parameters, seed) pair regenerates the same instance on every platform.

use crate::experiments::ExperimentError;
use crate::graph::{Graph, VertexId};
use crate::multilevel::TerminalHierarchy;
use crate::weight::Weight;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

pub const DEFAULT_GEN_ATTEMPTS: usize = 100;

/// ER(n, p) with p = 2·ln(n)/n and uniform integer weights in 1..=10,
/// resampled until connected (the ER distribution conditioned on
/// connectivity). The PRNG stream continues across attempts.
pub fn gen_er(n: u32, seed: u64) -> Result<Graph, ExperimentError> {
    gen_er_with(n, seed, None, DEFAULT_GEN_ATTEMPTS)
}

/// `gen_er` with an optional edge cap (for instances that must stay within
/// the exact-solver guards) and an explicit resampling budget.
pub fn gen_er_with(
    n: u32,
    seed: u64,
    max_edges: Option<usize>,
    attempts: usize,
) -> Result<Graph, ExperimentError> {
    if n < 3 {
        return Err(ExperimentError::BadConfig("n must be at least 3".into()));
    }
    let p = 2.0 * (n as f64).ln() / n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..attempts {
        let mut g = Graph::new(0..n);
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen::<f64>() < p {
                    let w = rng.gen_range(1..=10i128);
                    g.add_edge(u, v, Weight::from_integer(w)).expect("fresh pair");
                }
            }
        }
        if !g.is_connected() {
            continue;
        }
        if let Some(cap) = max_edges {
            if g.edge_count() > cap {
                continue;
            }
        }
        return Ok(g);
    }
    Err(ExperimentError::GenerationFailed { n, seed, attempts })
}

/// Nested terminal sets with |T_i| = floor(n·(ell−i+1)/(ell+1)), sampled
/// uniformly without replacement, each level from the one below it.
pub fn sample_terminals(
    g: &Graph,
    ell: usize,
    seed: u64,
) -> Result<TerminalHierarchy, ExperimentError> {
    if ell == 0 {
        return Err(ExperimentError::BadConfig("ell must be at least 1".into()));
    }
    let n = g.vertex_count();
    let top_size = n / (ell + 1);
    if top_size < 2 {
        return Err(ExperimentError::TerminalsTooSmall { n, ell });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<VertexId> = g.vertex_ids().to_vec();
    let mut levels: Vec<BTreeSet<VertexId>> = Vec::with_capacity(ell);
    for i in 1..=ell {
        let size = n * (ell - i + 1) / (ell + 1);
        // Partial Fisher-Yates over the current pool.
        for j in 0..size.min(pool.len()) {
            let k = rng.gen_range(j..pool.len());
            pool.swap(j, k);
        }
        pool.truncate(size);
        let mut sorted = pool.clone();
        sorted.sort_unstable();
        levels.push(sorted.into_iter().collect());
        pool = levels.last().unwrap().iter().copied().collect();
    }
    Ok(TerminalHierarchy::new(levels)?)
}
