use super::graph::Graph;

/// Number of adjacent pairs among the neighbours of `v`.
pub fn local_triangle_count(g: &Graph, v: usize) -> usize {
    let nv = g.row(v);
    g.neighbors(v)
        .map(|u| (g.row(u) & nv).count_ones() as usize)
        .sum::<usize>()
        / 2
}

pub fn triangle_counts(g: &Graph) -> Vec<usize> {
    (0..g.node_count())
        .map(|v| local_triangle_count(g, v))
        .collect()
}

/// Local coefficient of `v`; `None` when the degree is below 2.
pub fn local_clustering(g: &Graph, v: usize) -> Option<f64> {
    let d = g.degree(v);
    (d >= 2).then(|| local_triangle_count(g, v) as f64 / (d * (d - 1) / 2) as f64)
}

/// Average clustering coefficient (chi).
///
/// Nodes with degree below 2 contribute 0 and are reported through `log::warn!`.
pub fn average_clustering(g: &Graph) -> f64 {
    let n = g.node_count();
    let mut degenerate = 0;
    let sum: f64 = (0..n)
        .map(|v| {
            local_clustering(g, v).unwrap_or_else(|| {
                degenerate += 1;
                0.0
            })
        })
        .sum();
    if degenerate > 0 {
        log::warn!("{degenerate} node(s) with degree < 2 counted as clustering 0");
    }
    sum / n as f64
}
