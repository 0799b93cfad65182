//! Optimal rounding set for measured level minima.
//!
//! Choosing Q = {i_1 = 1 < … < i_m} to minimize Σ_k g(i_{k+1}−1)·y_{i_k}
//! (with i_{m+1} = ell+1) is a shortest-path problem on nodes {1..ell+1}: the
//! arc (i, j) with i < j costs g(j−1)·y_i, and 1 → ell+1 paths correspond
//! one-to-one with feasible Q. An exact DP replaces the ILP formulation.

use crate::multilevel::{LevelCostFn, MultiLevelError, Quantizer};
use crate::weight::Weight;
use num_traits::Zero;

/// Returns the minimizing quantizer and the optimal value. Ties are broken
/// toward fewer elements, then lexicographically smaller level lists.
pub fn best_q(
    minima: &[Weight],
    g: &LevelCostFn,
) -> Result<(Quantizer, Weight), MultiLevelError> {
    let ell = minima.len();
    if ell == 0 {
        return Err(MultiLevelError::NoLevels);
    }
    if minima.iter().any(|y| *y < Weight::zero()) {
        return Err(MultiLevelError::NegativeMin);
    }
    // dist[j] over nodes 1..=ell+1, stored 0-based.
    #[derive(Clone)]
    struct Label {
        cost: Weight,
        hops: usize,
        path: Vec<usize>,
    }
    let mut dist: Vec<Option<Label>> = vec![None; ell + 2];
    dist[1] = Some(Label { cost: Weight::zero(), hops: 0, path: vec![1] });
    for j in 2..=(ell + 1) {
        let mut best: Option<Label> = None;
        for i in 1..j {
            let Some(prev) = dist[i].clone() else { continue };
            let cost = prev.cost + g.eval(j - 1) * minima[i - 1];
            let mut path = prev.path;
            path.push(j);
            let cand = Label { cost, hops: prev.hops + 1, path };
            let better = match &best {
                None => true,
                Some(b) => {
                    (cand.cost, cand.hops, cand.path.clone())
                        < (b.cost, b.hops, b.path.clone())
                }
            };
            if better {
                best = Some(cand);
            }
        }
        dist[j] = best;
    }
    let label = dist[ell + 1].clone().expect("node 1 reaches the sink");
    let mut levels = label.path;
    levels.pop(); // drop the sink
    Ok((Quantizer::new(levels, ell)?, label.cost))
}

/// The Σ_k g(i_{k+1}−1)·y_{i_k} merge bound for one particular quantizer:
/// what the rounding algorithm can cost at most, given the per-level minima.
pub fn merge_cost_bound(q: &Quantizer, minima: &[Weight], g: &LevelCostFn) -> Weight {
    let mut total = Weight::zero();
    for (k, &ik) in q.levels().iter().enumerate() {
        let next = q.element_or_sentinel(k + 2);
        total += g.eval(next - 1) * minima[ik - 1];
    }
    total
}
