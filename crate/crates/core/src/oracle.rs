//! Exact expected payoff curves for tiny groups, by exhaustive enumeration of
//! every equally likely pairing sequence and every cheater assignment.
//!
//! The oracle drives the game through the single-decision operations
//! (`vanilla_action`, `gossip_action`, `play_pair`) rather than the stepping
//! machinery used by the simulator. Values are double precision; compare with
//! [`TOLERANCE`].

use crate::error::{Error, Result};
use crate::game::{
    gossip_action, play_pair, type_average_payoffs, vanilla_action, AgentType, PayoffMatrix,
    SimulationState,
};
use crate::graphs::Graph;

pub const MAX_ORACLE_NODES: usize = 4;
pub const MAX_ORACLE_STEPS: usize = 8;
/// Absolute tolerance for comparing oracle values.
pub const TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct ExactPoint {
    pub step: usize,
    pub r: f64,
    /// Expected cooperator mean over the sequences where it is defined.
    pub coop: Option<f64>,
    pub cheat: Option<f64>,
    /// Probability that the cooperator mean is defined.
    pub coop_defined: f64,
    pub cheat_defined: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactCurves {
    pub n: usize,
    pub points: Vec<ExactPoint>,
}

impl ExactCurves {
    /// Largest absolute difference between two oracles, treating a mismatch in definedness as infinite.
    pub fn max_abs_diff(&self, other: &ExactCurves) -> f64 {
        fn d(a: Option<f64>, b: Option<f64>) -> f64 {
            match (a, b) {
                (Some(x), Some(y)) => (x - y).abs(),
                (None, None) => 0.0,
                _ => f64::INFINITY,
            }
        }
        if self.points.len() != other.points.len() {
            return f64::INFINITY;
        }
        self.points
            .iter()
            .zip(&other.points)
            .map(|(a, b)| d(a.coop, b.coop).max(d(a.cheat, b.cheat)))
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy)]
enum Rule<'g> {
    Vanilla,
    Gossip(&'g Graph),
}

pub fn exact_vanilla_curves(
    n: usize,
    m: usize,
    steps: usize,
    payoffs: &PayoffMatrix,
) -> Result<ExactCurves> {
    guard(n, steps)?;
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    exact(n, m, steps, &pairs, Rule::Vanilla, payoffs)
}

/// Vanilla decisions with partners drawn uniformly from the edges of `g`.
pub fn exact_vanilla_on_graph_curves(
    g: &Graph,
    m: usize,
    steps: usize,
    payoffs: &PayoffMatrix,
) -> Result<ExactCurves> {
    guard(g.node_count(), steps)?;
    exact(g.node_count(), m, steps, &g.edges(), Rule::Vanilla, payoffs)
}

pub fn exact_gossip_curves(
    g: &Graph,
    m: usize,
    steps: usize,
    payoffs: &PayoffMatrix,
) -> Result<ExactCurves> {
    guard(g.node_count(), steps)?;
    exact(
        g.node_count(),
        m,
        steps,
        &g.edges(),
        Rule::Gossip(g),
        payoffs,
    )
}

fn guard(n: usize, steps: usize) -> Result<()> {
    if n > MAX_ORACLE_NODES || steps > MAX_ORACLE_STEPS {
        return Err(Error::Capacity(format!(
            "exact enumeration is limited to n <= {MAX_ORACLE_NODES} and steps <= {MAX_ORACLE_STEPS}, got n={n}, steps={steps}"
        )));
    }
    if n < 2 {
        return Err(Error::invalid("at least two agents are needed to play"));
    }
    Ok(())
}

#[derive(Clone, Copy, Default)]
struct Acc {
    coop_sum: f64,
    coop_count: u64,
    cheat_sum: f64,
    cheat_count: u64,
    nodes: u64,
}

fn exact(
    n: usize,
    m: usize,
    steps: usize,
    pairs: &[(usize, usize)],
    rule: Rule<'_>,
    payoffs: &PayoffMatrix,
) -> Result<ExactCurves> {
    if m > n {
        return Err(Error::invalid(format!("m={m} exceeds n={n}")));
    }
    if pairs.is_empty() {
        return Err(Error::invalid("no pairs to draw from"));
    }
    let mut acc = vec![Acc::default(); steps];
    for mask in 0u32..1 << n {
        if mask.count_ones() as usize != m {
            continue;
        }
        let types = (0..n)
            .map(|i| {
                if mask >> i & 1 == 1 {
                    AgentType::Cheater
                } else {
                    AgentType::Cooperator
                }
            })
            .collect();
        let state = SimulationState::with_types(types);
        walk(&state, 0, pairs, rule, payoffs, &mut acc)?;
    }
    let points = acc
        .iter()
        .enumerate()
        .map(|(t, a)| ExactPoint {
            step: t + 1,
            r: 2.0 * (t + 1) as f64 / n as f64,
            coop: (a.coop_count > 0).then(|| a.coop_sum / a.coop_count as f64),
            cheat: (a.cheat_count > 0).then(|| a.cheat_sum / a.cheat_count as f64),
            coop_defined: a.coop_count as f64 / a.nodes as f64,
            cheat_defined: a.cheat_count as f64 / a.nodes as f64,
        })
        .collect();
    Ok(ExactCurves { n, points })
}

/// Every node at a given depth is an equally likely history, so plain sums suffice.
fn walk(
    state: &SimulationState,
    depth: usize,
    pairs: &[(usize, usize)],
    rule: Rule<'_>,
    payoffs: &PayoffMatrix,
    acc: &mut [Acc],
) -> Result<()> {
    if depth == acc.len() {
        return Ok(());
    }
    for &(i, j) in pairs {
        let mut next = state.clone();
        let (ai, aj) = match rule {
            Rule::Vanilla => (vanilla_action(i, j, state)?, vanilla_action(j, i, state)?),
            Rule::Gossip(g) => (
                gossip_action(i, j, state, g)?,
                gossip_action(j, i, state, g)?,
            ),
        };
        play_pair(&mut next, i, j, ai, aj, payoffs)?;
        let means = type_average_payoffs(&next);
        let a = &mut acc[depth];
        a.nodes += 1;
        if let Some(c) = means.coop {
            a.coop_sum += c;
            a.coop_count += 1;
        }
        if let Some(d) = means.cheat {
            a.cheat_sum += d;
            a.cheat_count += 1;
        }
        walk(&next, depth + 1, pairs, rule, payoffs, acc)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Option<f64>, b: f64) -> bool {
        a.is_some_and(|a| (a - b).abs() < TOLERANCE)
    }

    #[test]
    fn two_agents_closed_form() {
        let c = exact_vanilla_curves(2, 1, 8, &PayoffMatrix::default()).unwrap();
        for p in &c.points {
            let t = p.step as f64;
            assert!(close(p.coop, -1.6 / t));
            assert!(close(p.cheat, 1.5 / t));
            assert_eq!(p.r, t);
        }
    }

    #[test]
    fn two_cooperators() {
        let c = exact_vanilla_curves(2, 0, 5, &PayoffMatrix::default()).unwrap();
        assert!(c
            .points
            .iter()
            .all(|p| close(p.coop, 1.0) && p.cheat.is_none()));
    }

    #[test]
    fn four_agents_first_step() {
        let c = exact_vanilla_curves(4, 1, 1, &PayoffMatrix::default()).unwrap();
        let p = &c.points[0];
        assert!(close(p.coop, -0.3));
        assert!(close(p.cheat, 1.5));
        assert!((p.cheat_defined - 0.5).abs() < TOLERANCE);
        assert_eq!(p.coop_defined, 1.0);
    }

    #[test]
    fn four_agents_second_step_by_hand() {
        // Cheater 0 (by symmetry), pairs {01,02,03,12,13,23}, 36 sequences.
        // Worked by hand for the cheater mean: the cheater has
        // played in 6*6 - 3*3 = 27 sequences; its mean is 1.5 unless it met the
        // same partner twice (3 sequences, mean 0.75).
        let c = exact_vanilla_curves(4, 1, 2, &PayoffMatrix::default()).unwrap();
        let expected = (24.0 * 1.5 + 3.0 * 0.75) / 27.0;
        assert!(close(c.points[1].cheat, expected));
    }

    #[test]
    fn complete_four_gossip() {
        let k4 = Graph::complete(4).unwrap();
        let c = exact_gossip_curves(&k4, 0, 6, &PayoffMatrix::default()).unwrap();
        assert!(c.points.iter().all(|p| close(p.coop, 1.0)));
        let c = exact_gossip_curves(&k4, 1, 3, &PayoffMatrix::default()).unwrap();
        assert!(close(c.points[0].cheat, 1.5));
    }

    #[test]
    fn triangle_free_gossip_equals_edge_vanilla() {
        let c4 = Graph::cycle(4).unwrap();
        let p = PayoffMatrix::default();
        for m in 0..=4 {
            let gossip = exact_gossip_curves(&c4, m, 6, &p).unwrap();
            let vanilla = exact_vanilla_on_graph_curves(&c4, m, 6, &p).unwrap();
            assert!(gossip.max_abs_diff(&vanilla) < TOLERANCE, "m={m}");
        }
    }

    #[test]
    fn guards() {
        let p = PayoffMatrix::default();
        assert!(matches!(
            exact_vanilla_curves(5, 1, 2, &p),
            Err(Error::Capacity(_))
        ));
        assert!(matches!(
            exact_vanilla_curves(4, 1, 9, &p),
            Err(Error::Capacity(_))
        ));
        assert!(matches!(
            exact_gossip_curves(&Graph::complete(5).unwrap(), 1, 2, &p),
            Err(Error::Capacity(_))
        ));
    }
}
