use rand::seq::SliceRandom;
use rand::Rng;

use super::graph::{is_connected, Graph, MAX_NODES};
use crate::error::{Error, Result};

/// Whole-sample rejection budget for the pairing model.
pub const RETRY_BUDGET: usize = 10_000;

pub(crate) fn check_regular_params(n: usize, k: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    if k >= n {
        return Err(Error::invalid(format!("degree k={k} must be below n={n}")));
    }
    if !(n * k).is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "n*k = {} is odd; no {k}-regular graph on {n} nodes",
            n * k
        )));
    }
    if n > MAX_NODES {
        return Err(Error::Capacity(format!(
            "graphs are limited to {MAX_NODES} nodes"
        )));
    }
    Ok(())
}

/// Samples a simple connected `k`-regular graph with the pairing model.
///
/// Each attempt shuffles the `n*k` half-edge points and pairs them in order;
/// samples with loops, repeated edges or more than one component are discarded.
pub fn random_k_regular_connected<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<Graph> {
    check_regular_params(n, k)?;
    if k == 0 {
        return Err(Error::invalid("degree k must be at least 1"));
    }
    let mut points: Vec<usize> = (0..n * k).map(|p| p / k).collect();
    'attempt: for _ in 0..RETRY_BUDGET {
        points.shuffle(rng);
        let mut g = Graph::empty(n)?;
        for pair in points.chunks_exact(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v || g.has_edge(u, v) {
                continue 'attempt;
            }
            g.add_edge(u, v)?;
        }
        if is_connected(&g) {
            return Ok(g);
        }
    }
    Err(Error::GenerationFailure {
        n,
        k,
        attempts: RETRY_BUDGET,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn five_four_is_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = random_k_regular_connected(5, 4, &mut rng).unwrap();
        assert_eq!(g, Graph::complete(5).unwrap());
    }

    #[test]
    fn ten_four_is_regular_and_connected() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let g = random_k_regular_connected(10, 4, &mut rng).unwrap();
            assert!((0..10).all(|v| g.degree(v) == 4));
            assert!(is_connected(&g));
        }
    }

    #[test]
    fn parameter_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(matches!(
            random_k_regular_connected(5, 3, &mut rng),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            random_k_regular_connected(4, 4, &mut rng),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            random_k_regular_connected(4, 0, &mut rng),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn disconnected_only_realisations_fail() {
        // Every 1-regular graph on 4 nodes is a perfect matching with two components.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert!(matches!(
            random_k_regular_connected(4, 1, &mut rng),
            Err(Error::GenerationFailure {
                attempts: RETRY_BUDGET,
                ..
            })
        ));
    }

    #[test]
    fn deterministic_for_seed() {
        let a = random_k_regular_connected(10, 4, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = random_k_regular_connected(10, 4, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }
}
