use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use congest_mwc::graph::{GraphError, WeightedGraph};

#[derive(Debug, thiserror::Error)]
pub enum RandomGraphError {
    #[error("{m} edges do not fit a simple graph on {n} nodes")]
    TooManyEdges { n: usize, m: usize },
    #[error("maximum weight must be in [1, 2^63), got {0}")]
    BadWeight(u64),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Maps `i < n(n-1)/2` to the `i`-th pair `(u, v)`, `u < v`, in row order.
fn pair_at(n: usize, mut i: usize) -> (usize, usize) {
    let mut u = 0;
    while i >= n - 1 - u {
        i -= n - 1 - u;
        u += 1;
    }
    (u, u + 1 + i)
}

/// Uniform simple undirected graph with `m` edges and weights uniform in `[1, max_weight]`.
pub fn gen_random_graph(n: usize, m: usize, max_weight: u64, seed: u64) -> Result<WeightedGraph, RandomGraphError> {
    let pairs = n * n.saturating_sub(1) / 2;
    if m > pairs {
        return Err(RandomGraphError::TooManyEdges { n, m });
    }
    if max_weight == 0 || max_weight >= 1 << 63 {
        return Err(RandomGraphError::BadWeight(max_weight));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = sample(&mut rng, pairs, m).into_vec();
    chosen.sort_unstable();
    let mut g = WeightedGraph::new(n, false);
    for i in chosen {
        let (u, v) = pair_at(n, i);
        g.add_edge(u, v, rng.random_range(1..=max_weight))?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_indexing_is_a_bijection() {
        let n = 7;
        let all: Vec<_> = (0..n * (n - 1) / 2).map(|i| pair_at(n, i)).collect();
        let mut expected = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                expected.push((u, v));
            }
        }
        assert_eq!(all, expected);
    }
}
