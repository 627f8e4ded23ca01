//! Orderly generation of connected k-regular graphs.
//!
//! Nodes are added one at a time; node `p` picks its neighbours among
//! `0..p`. A partial graph survives only if its induced subgraph on `0..=p`
//! is in canonical form. Canonical forms are closed under taking prefixes,
//! so every isomorphism class is reached exactly once through its canonical
//! representative and no deduplication pass is needed.

use rayon::prelude::*;
use serde::Serialize;

use super::canon::{canonical_key, is_canonical, CanonicalKey};
use super::clustering::average_clustering;
use super::graph::{bits, is_connected, Graph};
use super::random::check_regular_params;
use crate::error::{Error, Result};

/// Largest node count accepted by [`enumerate_k_regular_connected`].
pub const MAX_ENUMERATION_NODES: usize = 12;

#[derive(Clone, Debug, Serialize)]
pub struct GraphSetEntry {
    #[serde(skip)]
    pub graph: Graph,
    pub canonical_key: CanonicalKey,
    pub chi: f64,
}

impl GraphSetEntry {
    pub fn new(graph: Graph) -> Self {
        let canonical_key = canonical_key(&graph);
        let chi = average_clustering(&graph);
        GraphSetEntry {
            graph,
            canonical_key,
            chi,
        }
    }
}

/// One representative per isomorphism class, sorted by canonical key.
pub fn enumerate_k_regular_connected(n: usize, k: usize) -> Result<Vec<GraphSetEntry>> {
    check_regular_params(n, k)?;
    if n > MAX_ENUMERATION_NODES {
        return Err(Error::Capacity(format!(
            "exhaustive enumeration is limited to n <= {MAX_ENUMERATION_NODES}, got {n}"
        )));
    }
    let root = Partial {
        n,
        k,
        rows: vec![0; n],
        placed: 1,
    };
    // Fan out over the choices for a few early nodes, then search sequentially.
    let mut frontier = vec![root];
    while !frontier.is_empty()
        && frontier.len() < 64
        && frontier.iter().all(|p| p.placed < n.min(5))
    {
        frontier = frontier.iter().flat_map(Partial::children).collect();
    }
    let mut found: Vec<Graph> = frontier
        .par_iter()
        .flat_map_iter(|p| {
            let mut out = Vec::new();
            p.complete(&mut out);
            out
        })
        .collect();
    found.retain(is_connected);
    let mut entries: Vec<GraphSetEntry> = found.into_iter().map(GraphSetEntry::new).collect();
    entries.sort_by(|a, b| a.canonical_key.cmp(&b.canonical_key));
    debug_assert!(entries
        .windows(2)
        .all(|w| w[0].canonical_key < w[1].canonical_key));
    Ok(entries)
}

#[derive(Clone)]
struct Partial {
    n: usize,
    k: usize,
    rows: Vec<u64>,
    placed: usize,
}

impl Partial {
    fn degree(&self, v: usize) -> usize {
        self.rows[v].count_ones() as usize
    }

    fn complete(&self, out: &mut Vec<Graph>) {
        if self.placed == self.n {
            out.push(Graph::from_rows(self.rows.clone()).expect("partial rows are symmetric"));
            return;
        }
        for child in self.children() {
            child.complete(out);
        }
    }

    /// All canonical extensions by node `placed`.
    fn children(&self) -> Vec<Partial> {
        let p = self.placed;
        let (n, k) = (self.n, self.k);
        let future = n - 1 - p;
        let open: u64 = (0..p)
            .filter(|&u| self.degree(u) < k)
            .fold(0, |m, u| m | 1 << u);
        // Nodes that can no longer wait for later nodes must connect to p now.
        let forced: u64 = bits(open)
            .filter(|&u| k - self.degree(u) > future)
            .fold(0, |m, u| m | 1 << u);
        let optional = open & !forced;
        let mut out = Vec::new();
        // Enumerate subsets of `optional`, each joined with `forced`.
        let mut sub = 0u64;
        loop {
            let nbrs = forced | sub;
            let d = nbrs.count_ones() as usize;
            if d <= k && k - d <= future {
                let mut rows = self.rows.clone();
                rows[p] = nbrs;
                for u in bits(nbrs) {
                    rows[u] |= 1 << p;
                }
                let child = Partial {
                    n,
                    k,
                    rows,
                    placed: p + 1,
                };
                if child.feasible() && child.prefix_is_canonical() {
                    out.push(child);
                }
            }
            if sub == optional {
                break;
            }
            sub = (sub.wrapping_sub(optional)) & optional;
        }
        out
    }

    /// Degree deficits of placed nodes can still be met by the remaining nodes.
    fn feasible(&self) -> bool {
        let future = self.n - self.placed;
        let deficit: usize = (0..self.placed).map(|u| self.k - self.degree(u)).sum();
        if (0..self.placed).any(|u| self.k - self.degree(u) > future) {
            return false;
        }
        let stubs = future * self.k;
        if deficit > stubs {
            return false;
        }
        let internal = stubs - deficit;
        internal.is_multiple_of(2) && internal / 2 <= future * future.saturating_sub(1) / 2
    }

    fn prefix_is_canonical(&self) -> bool {
        let p = self.placed;
        let mask = (1u64 << p) - 1;
        let rows: Vec<u64> = self.rows[..p].iter().map(|r| r & mask).collect();
        is_canonical(&Graph::from_rows(rows).expect("prefix rows are symmetric"))
    }
}
