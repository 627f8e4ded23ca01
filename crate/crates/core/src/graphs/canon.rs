//! Exact canonical labeling.
//!
//! The canonical form of a graph is the relabeling whose column-wise upper
//! triangle bit string (the graph6 bit order) is lexicographically smallest.
//! The search places one node per position; at each position only candidates
//! whose column against the already placed prefix is minimal can lead to the
//! minimum, and siblings related by an automorphism that fixes the prefix
//! pointwise are explored once.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use super::graph::{bits, Graph};
use super::graph6;

/// Isomorphism-invariant identifier: the graph6 token of the canonical relabeling.
///
/// Ordering is by node count, then by the canonical bit string.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CanonicalKey(String);

impl CanonicalKey {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The canonical representative itself.
    pub fn to_graph(&self) -> Graph {
        graph6::decode(&self.0).expect("canonical keys are valid graph6")
    }
}

impl Ord for CanonicalKey {
    fn cmp(&self, other: &Self) -> Ordering {
        // Equal node counts give equal-length tokens whose bytes are
        // order-preserving 6-bit chunks of the bit string.
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for CanonicalKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalKey({})", self.0)
    }
}

impl Serialize for CanonicalKey {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

pub fn canonical_key(g: &Graph) -> CanonicalKey {
    CanonicalKey(graph6::encode(&canonical_form(g)))
}

/// The canonically relabeled graph.
pub fn canonical_form(g: &Graph) -> Graph {
    let order = canonical_order(g);
    let mut perm = vec![0; g.node_count()];
    for (pos, &v) in order.iter().enumerate() {
        perm[v] = pos;
    }
    g.permute(&perm).expect("canonical order is a permutation")
}

/// Node placed at each canonical position.
pub fn canonical_order(g: &Graph) -> Vec<usize> {
    let mut search = Search::new(g);
    search.run();
    search.best_order
}

/// True iff `g` already carries its canonical labeling.
pub fn is_canonical(g: &Graph) -> bool {
    let mut search = Search::new(g);
    search.pin_identity();
    search.run();
    !search.beaten
}

#[inline]
fn column(g: &Graph, v: usize, prefix: &[usize]) -> u64 {
    let row = g.row(v);
    prefix
        .iter()
        .fold(0u64, |acc, &u| acc << 1 | (row >> u & 1))
}

struct Search<'a> {
    g: &'a Graph,
    n: usize,
    order: Vec<usize>,
    cols: Vec<u64>,
    placed: u64,
    best_order: Vec<usize>,
    best_cols: Vec<u64>,
    have_best: bool,
    automorphisms: Vec<Vec<usize>>,
    /// First leaf reached; its subtree at every depth is explored before any sibling.
    first_order: Vec<usize>,
    /// After an automorphism is found, abandon the branch chosen at this depth.
    unwind_to: Option<usize>,
    /// The best is pinned to the identity labeling; stop at the first smaller code.
    check_only: bool,
    beaten: bool,
}

impl<'a> Search<'a> {
    fn new(g: &'a Graph) -> Self {
        let n = g.node_count();
        Search {
            g,
            n,
            order: Vec::with_capacity(n),
            cols: Vec::with_capacity(n),
            placed: 0,
            best_order: Vec::new(),
            best_cols: Vec::new(),
            have_best: false,
            automorphisms: Vec::new(),
            first_order: Vec::new(),
            unwind_to: None,
            check_only: false,
            beaten: false,
        }
    }

    fn pin_identity(&mut self) {
        let identity: Vec<usize> = (0..self.n).collect();
        self.best_cols = (0..self.n)
            .map(|p| column(self.g, p, &identity[..p]))
            .collect();
        self.best_order = identity;
        self.have_best = true;
        self.check_only = true;
    }

    fn run(&mut self) {
        self.descend();
    }

    /// Strict comparison of the current prefix against the same-length prefix of the best.
    fn prefix_less_than_best(&self) -> bool {
        !self.have_best || self.cols[..] < self.best_cols[..self.cols.len()]
    }

    fn descend(&mut self) {
        let p = self.order.len();
        let less = self.prefix_less_than_best();
        if p == self.n {
            self.leaf(less);
            return;
        }
        let free = self.g.full_mask() & !self.placed;
        let min_col = bits(free)
            .map(|v| column(self.g, v, &self.order))
            .min()
            .expect("unplaced nodes remain");
        if self.have_best && !less {
            match min_col.cmp(&self.best_cols[p]) {
                Ordering::Greater => return,
                Ordering::Less if self.check_only => {
                    self.beaten = true;
                    return;
                }
                _ => {}
            }
        }
        let mut explored: Vec<usize> = Vec::new();
        for v in bits(free) {
            if self.beaten {
                return;
            }
            if column(self.g, v, &self.order) != min_col {
                continue;
            }
            if !explored.is_empty() && self.equivalent_to_explored(v, &explored) {
                continue;
            }
            explored.push(v);
            self.order.push(v);
            self.cols.push(min_col);
            self.placed |= 1 << v;
            self.descend();
            self.placed &= !(1 << v);
            self.cols.pop();
            self.order.pop();
            match self.unwind_to {
                Some(d) if d == p => self.unwind_to = None,
                Some(_) => return,
                None => {}
            }
        }
    }

    fn leaf(&mut self, less: bool) {
        if self.first_order.is_empty() {
            self.first_order.clone_from(&self.order);
        }
        if !self.have_best || less {
            self.best_cols.clone_from(&self.cols);
            self.best_order.clone_from(&self.order);
            self.have_best = true;
            return;
        }
        // Equal codes. A pinned best was never visited, so compare against the
        // first leaf instead; either reference lies in an already explored subtree.
        let reference = if self.check_only {
            &self.first_order
        } else {
            &self.best_order
        };
        let Some(d) = reference.iter().zip(&self.order).position(|(a, b)| a != b) else {
            return;
        };
        // reference[i] -> order[i] is an automorphism, so the branch taken at
        // depth d mirrors one already searched.
        let mut gamma = vec![0; self.n];
        for (&a, &b) in reference.iter().zip(&self.order) {
            gamma[a] = b;
        }
        self.automorphisms.push(gamma);
        self.unwind_to = Some(d);
    }

    /// Whether `v` shares an orbit with an explored sibling under the known
    /// automorphisms that fix the current prefix pointwise.
    fn equivalent_to_explored(&self, v: usize, explored: &[usize]) -> bool {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut any = false;
        for gamma in &self.automorphisms {
            if self.order.iter().any(|&u| gamma[u] != u) {
                continue;
            }
            any = true;
            for (x, &y) in gamma.iter().enumerate() {
                let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                if rx != ry {
                    parent[rx] = ry;
                }
            }
        }
        if !any {
            return false;
        }
        let rv = find(&mut parent, v);
        explored.iter().any(|&e| find(&mut parent, e) == rv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Minimum column-wise code over all n! relabelings.
    fn brute_force_min_code(g: &Graph) -> Vec<bool> {
        let n = g.node_count();
        let mut order: Vec<usize> = (0..n).collect();
        let mut best: Option<Vec<bool>> = None;
        permutations(&mut order, 0, &mut |ord| {
            let mut code = Vec::new();
            for j in 1..n {
                for i in 0..j {
                    code.push(g.has_edge(ord[i], ord[j]));
                }
            }
            if best.as_ref().is_none_or(|b| code < *b) {
                best = Some(code);
            }
        });
        best.unwrap()
    }

    fn permutations(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == v.len() {
            f(v);
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            permutations(v, k + 1, f);
            v.swap(k, i);
        }
    }

    fn code_of(g: &Graph) -> Vec<bool> {
        let n = g.node_count();
        let mut code = Vec::new();
        for j in 1..n {
            for i in 0..j {
                code.push(g.has_edge(i, j));
            }
        }
        code
    }

    fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
        use rand::Rng;
        let mut g = Graph::empty(n).unwrap();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    g.add_edge(u, v).unwrap();
                }
            }
        }
        g
    }

    #[test]
    fn matches_brute_force_minimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=7 {
            for _ in 0..30 {
                let g = random_graph(n, 0.45, &mut rng);
                let form = canonical_form(&g);
                assert_eq!(code_of(&form), brute_force_min_code(&g), "{g:?}");
                assert!(is_canonical(&form));
            }
        }
    }

    #[test]
    fn invariant_under_relabeling() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [5, 8, 10, 12] {
            for _ in 0..20 {
                let g = random_graph(n, 0.4, &mut rng);
                let key = canonical_key(&g);
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut rng);
                assert_eq!(key, canonical_key(&g.permute(&perm).unwrap()));
            }
        }
    }

    #[test]
    fn complete_graph_reversed() {
        let k5 = Graph::complete(5).unwrap();
        let rev = k5.permute(&[4, 3, 2, 1, 0]).unwrap();
        assert_eq!(canonical_key(&k5), canonical_key(&rev));
        assert_eq!(canonical_key(&k5).as_str(), "D~{");
    }

    #[test]
    fn distinguishes_non_isomorphic() {
        let c10 = Graph::cycle(10).unwrap();
        let c5x2 = Graph::from_edges(
            10,
            &[
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 0),
                (5, 6),
                (6, 7),
                (7, 8),
                (8, 9),
                (9, 5),
            ],
        )
        .unwrap();
        assert_ne!(canonical_key(&c10), canonical_key(&c5x2));
        let circ = Graph::circulant(10, &[1, 2]).unwrap();
        let other = Graph::circulant(10, &[1, 3]).unwrap();
        assert_ne!(canonical_key(&circ), canonical_key(&other));
    }

    #[test]
    fn symmetric_graphs_finish_quickly() {
        for n in [12, 24, 48, 64] {
            let k = Graph::complete(n).unwrap();
            assert!(is_canonical(&canonical_form(&k)));
        }
        // Sparse graphs with small groups cost far more; keep to modest sizes.
        for n in [12, 16] {
            let c = Graph::cycle(n).unwrap();
            assert_eq!(canonical_form(&c).regular_degree(), Some(2));
        }
    }

    #[test]
    fn key_round_trips_to_representative() {
        let g = Graph::circulant(10, &[1, 2]).unwrap();
        let key = canonical_key(&g);
        assert_eq!(key.to_graph(), canonical_form(&g));
    }
}
