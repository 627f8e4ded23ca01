use coopnet::graphs::{
    average_clustering, canonical_key, enumerate_k_regular_connected, graph6, is_connected,
    local_triangle_count, random_k_regular_connected, Graph,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// Counts labeled connected k-regular graphs on n nodes by direct backtracking.
fn labeled_connected_count(n: usize, k: usize) -> u64 {
    fn go(v: usize, n: usize, k: usize, rows: &mut Vec<u64>, count: &mut u64) {
        if v == n {
            let g = Graph::from_rows(rows.clone()).unwrap();
            if is_connected(&g) {
                *count += 1;
            }
            return;
        }
        let need = k - rows[v].count_ones() as usize;
        let candidates: Vec<usize> = (v + 1..n)
            .filter(|&u| (rows[u].count_ones() as usize) < k)
            .collect();
        if candidates.len() < need {
            return;
        }
        choose(v, 0, need, &candidates, n, k, rows, count);
    }

    #[allow(clippy::too_many_arguments)]
    fn choose(
        v: usize,
        from: usize,
        need: usize,
        cand: &[usize],
        n: usize,
        k: usize,
        rows: &mut Vec<u64>,
        count: &mut u64,
    ) {
        if need == 0 {
            go(v + 1, n, k, rows, count);
            return;
        }
        for idx in from..cand.len() {
            if cand.len() - idx < need {
                break;
            }
            let u = cand[idx];
            rows[v] |= 1 << u;
            rows[u] |= 1 << v;
            choose(v, idx + 1, need - 1, cand, n, k, rows, count);
            rows[v] &= !(1 << u);
            rows[u] &= !(1 << v);
        }
    }

    let mut rows = vec![0u64; n];
    let mut count = 0;
    go(0, n, k, &mut rows, &mut count);
    count
}

/// Automorphism count by plain backtracking over adjacency-preserving maps.
fn automorphism_count(g: &Graph) -> u64 {
    fn go(g: &Graph, v: usize, image: &mut Vec<usize>, used: &mut Vec<bool>) -> u64 {
        let n = g.node_count();
        if v == n {
            return 1;
        }
        let mut total = 0;
        for w in 0..n {
            if used[w] || g.degree(w) != g.degree(v) {
                continue;
            }
            if (0..v).all(|u| g.has_edge(u, v) == g.has_edge(image[u], w)) {
                image[v] = w;
                used[w] = true;
                total += go(g, v + 1, image, used);
                used[w] = false;
            }
        }
        total
    }
    let n = g.node_count();
    go(g, 0, &mut vec![0; n], &mut vec![false; n])
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Every labeled graph lies in exactly one class, and a class holds n!/|Aut| labelings.
fn check_complete(n: usize, k: usize) {
    let set = enumerate_k_regular_connected(n, k).unwrap();
    let orbit_total: u64 = set
        .iter()
        .map(|e| factorial(n) / automorphism_count(&e.graph))
        .sum();
    assert_eq!(
        orbit_total,
        labeled_connected_count(n, k),
        "(n, k) = ({n}, {k})"
    );
    let keys: BTreeSet<_> = set.iter().map(|e| e.canonical_key.clone()).collect();
    assert_eq!(keys.len(), set.len());
    for e in &set {
        assert_eq!(e.graph.regular_degree(), Some(k));
        assert!(is_connected(&e.graph));
    }
}

#[test]
fn complete_for_small_parameters() {
    check_complete(5, 4);
    check_complete(6, 3);
    check_complete(7, 4);
    check_complete(8, 3);
}

#[test]
fn complete_for_ten_nodes_degree_four() {
    check_complete(10, 4);
}

#[test]
fn small_classes_by_exhaustive_relabeling() {
    // Group every labeled cubic graph on 6 nodes by its minimum code over all 720 relabelings.
    fn min_code(g: &Graph, perms: &[Vec<usize>]) -> Vec<bool> {
        perms
            .iter()
            .map(|p| {
                let h = g.permute(p).unwrap();
                (1..6)
                    .flat_map(|j| (0..j).map(move |i| (i, j)))
                    .map(|(i, j)| h.has_edge(i, j))
                    .collect()
            })
            .min()
            .unwrap()
    }
    let mut perms = Vec::new();
    let mut p: Vec<usize> = (0..6).collect();
    heap_permutations(&mut p, 6, &mut perms);
    let pairs: Vec<(usize, usize)> = (0..6)
        .flat_map(|i| (i + 1..6).map(move |j| (i, j)))
        .collect();
    let mut classes = BTreeSet::new();
    for mask in 0u32..1 << pairs.len() {
        if mask.count_ones() != 9 {
            continue;
        }
        let edges: Vec<_> = pairs
            .iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let g = Graph::from_edges(6, &edges).unwrap();
        if g.regular_degree() == Some(3) && is_connected(&g) {
            classes.insert(min_code(&g, &perms));
        }
    }
    assert_eq!(
        classes.len(),
        enumerate_k_regular_connected(6, 3).unwrap().len()
    );
}

fn heap_permutations(p: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == 1 {
        out.push(p.clone());
        return;
    }
    for i in 0..k {
        heap_permutations(p, k - 1, out);
        let swap = if k.is_multiple_of(2) { i } else { 0 };
        p.swap(swap, k - 1);
    }
}

#[test]
fn keys_survive_relabeling() {
    let set = enumerate_k_regular_connected(10, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut perm: Vec<usize> = (0..10).collect();
    for e in &set {
        for _ in 0..1000 {
            perm.shuffle(&mut rng);
            assert_eq!(
                canonical_key(&e.graph.permute(&perm).unwrap()),
                e.canonical_key
            );
        }
    }
}

#[test]
fn random_graphs_land_in_the_enumerated_set() {
    let keys: BTreeSet<_> = enumerate_k_regular_connected(10, 4)
        .unwrap()
        .into_iter()
        .map(|e| e.canonical_key)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut seen = BTreeSet::new();
    for _ in 0..2000 {
        let key = canonical_key(&random_k_regular_connected(10, 4, &mut rng).unwrap());
        assert!(keys.contains(&key), "{key}");
        seen.insert(key);
    }
    // Every class has positive probability; 2000 draws should reach most of them.
    assert!(seen.len() > 50, "{}", seen.len());
}

#[test]
fn clustering_is_quantized() {
    // Local coefficients are t/6 for t in 0..=6, so averages over ten nodes are multiples of 1/60.
    for e in enumerate_k_regular_connected(10, 4).unwrap() {
        let tri: usize = (0..10).map(|v| local_triangle_count(&e.graph, v)).sum();
        assert_eq!(tri % 3, 0);
        let sixtieths = e.chi * 60.0;
        assert!((sixtieths - sixtieths.round()).abs() < 1e-9);
        assert!((e.chi - tri as f64 / 60.0).abs() < 1e-12);
        assert_eq!(e.chi, average_clustering(&e.graph));
    }
}

#[test]
fn graph6_round_trips() {
    let set = enumerate_k_regular_connected(10, 4).unwrap();
    let mut text = Vec::new();
    graph6::write_graphs(&mut text, set.iter().map(|e| &e.graph)).unwrap();
    let back = graph6::read_graphs(text.as_slice()).unwrap();
    assert_eq!(back.len(), set.len());
    for (g, e) in back.iter().zip(&set) {
        assert_eq!(*g, e.graph);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..1000 {
        let g = random_k_regular_connected(10, 4, &mut rng).unwrap();
        assert_eq!(graph6::decode(&graph6::encode(&g)).unwrap(), g);
    }
}
