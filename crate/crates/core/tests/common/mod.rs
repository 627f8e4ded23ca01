use coopnet::graphs::{random_k_regular_connected, triangle_counts, Graph};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Triangle-free graphs: cycles, bipartite circulants, Petersen, K_{a,a} and random cubic graphs.
pub fn triangle_free_suite() -> Vec<Graph> {
    let mut suite = vec![
        Graph::cycle(4).unwrap(),
        Graph::cycle(7).unwrap(),
        Graph::cycle(10).unwrap(),
        Graph::circulant(8, &[1, 3]).unwrap(),
        Graph::circulant(10, &[1, 3]).unwrap(),
        Graph::circulant(12, &[1, 5]).unwrap(),
        // Petersen graph.
        Graph::from_edges(
            10,
            &[
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 0),
                (0, 5),
                (1, 6),
                (2, 7),
                (3, 8),
                (4, 9),
                (5, 7),
                (7, 9),
                (9, 6),
                (6, 8),
                (8, 5),
            ],
        )
        .unwrap(),
    ];
    // Complete bipartite graphs K_{a,a}.
    for a in [2usize, 3, 4, 5] {
        let edges: Vec<_> = (0..a)
            .flat_map(|u| (a..2 * a).map(move |v| (u, v)))
            .collect();
        suite.push(Graph::from_edges(2 * a, &edges).unwrap());
    }
    // Random regular graphs that happen to be triangle-free.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut found = 0;
    while found < 20 {
        let g = random_k_regular_connected(12, 3, &mut rng).unwrap();
        if triangle_counts(&g).iter().all(|&t| t == 0) {
            suite.push(g);
            found += 1;
        }
    }
    suite
}
