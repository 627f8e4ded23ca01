use std::fmt;

use crate::error::{Error, Result};

/// Largest node count representable; each adjacency row is a 64-bit mask.
pub const MAX_NODES: usize = 64;

/// Undirected simple graph on nodes `0..node_count`.
///
/// Adjacency is stored as one bit row per node, so neighbourhood intersections
/// (triangle counts, gossip voter sets) are single AND operations.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    rows: Vec<u64>,
}

impl Graph {
    /// Edgeless graph on `n` nodes.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("graph must have at least one node"));
        }
        if n > MAX_NODES {
            return Err(Error::Capacity(format!(
                "graphs are limited to {MAX_NODES} nodes, got {n}"
            )));
        }
        Ok(Graph { rows: vec![0; n] })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n)?;
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Builds a graph from bit rows, checking symmetry and the absence of loops.
    pub fn from_rows(rows: Vec<u64>) -> Result<Self> {
        let n = rows.len();
        Graph::empty(n)?;
        let g = Graph { rows };
        let mask = g.full_mask();
        for (u, &row) in g.rows.iter().enumerate() {
            if row & !mask != 0 {
                return Err(Error::invalid(format!("row {u} references nodes >= {n}")));
            }
            if row >> u & 1 == 1 {
                return Err(Error::invalid(format!("self-loop at node {u}")));
            }
            for v in bits(row) {
                if g.rows[v] >> u & 1 == 0 {
                    return Err(Error::invalid(format!("asymmetric adjacency {u}-{v}")));
                }
            }
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let n = self.node_count();
        if u >= n || v >= n {
            return Err(Error::invalid(format!(
                "edge {u}-{v} out of range for {n} nodes"
            )));
        }
        if u == v {
            return Err(Error::invalid(format!("self-loop at node {u}")));
        }
        self.rows[u] |= 1 << v;
        self.rows[v] |= 1 << u;
        Ok(())
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u] >> v & 1 == 1
    }

    /// Neighbourhood of `v` as a bit mask.
    #[inline]
    pub fn row(&self, v: usize) -> u64 {
        self.rows[v]
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].count_ones() as usize
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        bits(self.rows[v])
    }

    pub fn edge_count(&self) -> usize {
        self.rows
            .iter()
            .map(|r| r.count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    /// Edges as `(u, v)` with `u < v`, in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.node_count() {
            for v in bits(self.rows[u] >> u >> 1) {
                out.push((u, u + 1 + v));
            }
        }
        out
    }

    /// The common degree if every node has the same degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let k = self.degree(0);
        (1..self.node_count())
            .all(|v| self.degree(v) == k)
            .then_some(k)
    }

    /// Relabels nodes so that old node `v` becomes `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let n = self.node_count();
        if perm.len() != n {
            return Err(Error::invalid("permutation length differs from node count"));
        }
        let mut seen = 0u64;
        for &p in perm {
            if p >= n || seen >> p & 1 == 1 {
                return Err(Error::invalid("not a permutation"));
            }
            seen |= 1 << p;
        }
        let mut rows = vec![0u64; n];
        for u in 0..n {
            for v in bits(self.rows[u]) {
                rows[perm[u]] |= 1 << perm[v];
            }
        }
        Ok(Graph { rows })
    }

    pub(crate) fn full_mask(&self) -> u64 {
        low_mask(self.node_count())
    }

    /// Cycle on `n >= 3` nodes.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid("a cycle needs at least 3 nodes"));
        }
        Self::circulant(n, &[1])
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut g = Graph::empty(n)?;
        let mask = g.full_mask();
        for (v, row) in g.rows.iter_mut().enumerate() {
            *row = mask & !(1 << v);
        }
        Ok(g)
    }

    /// Circulant graph: node `v` is joined to `v ± o (mod n)` for each offset `o`.
    pub fn circulant(n: usize, offsets: &[usize]) -> Result<Self> {
        let mut g = Graph::empty(n)?;
        for v in 0..n {
            for &o in offsets {
                let o = o % n;
                if o == 0 {
                    return Err(Error::invalid("circulant offset must be nonzero mod n"));
                }
                g.add_edge(v, (v + o) % n)?;
            }
        }
        Ok(g)
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.node_count())
            .field("edges", &self.edges())
            .finish()
    }
}

#[inline]
pub(crate) fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Iterates the set bit positions of `mask`, lowest first.
pub(crate) fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let b = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(b)
        }
    })
}

/// True iff a traversal from node 0 reaches every node.
pub fn is_connected(g: &Graph) -> bool {
    let full = g.full_mask();
    let mut seen = 1u64;
    let mut frontier = 1u64;
    while frontier != 0 {
        let mut next = 0u64;
        for v in bits(frontier) {
            next |= g.row(v);
        }
        frontier = next & !seen;
        seen |= next;
    }
    seen & full == full
}
