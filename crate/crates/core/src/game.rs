//! Repeated prisoner's dilemma between agents of fixed type.
//!
//! Every agent keeps a belief about every other agent, overwritten with the
//! partner's last observed action. In the plain model an agent cheats a
//! partner it believes to be a cheater and otherwise plays its own type. In
//! the gossip model it also counts trusted neighbours (neighbours it still
//! believes to be cooperators) who believe the partner is a cheater, and
//! treats the partner as a cheater once they make up at least half of
//! `k + 1`.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{Graph, MAX_NODES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgentType {
    Cooperator,
    Cheater,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Cooperate,
    Cheat,
}

impl AgentType {
    /// The action an agent of this type plays toward a partner it trusts.
    pub fn own_action(self) -> Action {
        match self {
            AgentType::Cooperator => Action::Cooperate,
            AgentType::Cheater => Action::Cheat,
        }
    }
}

impl Action {
    /// The type an observer infers from this action.
    pub fn revealed_type(self) -> AgentType {
        match self {
            Action::Cooperate => AgentType::Cooperator,
            Action::Cheat => AgentType::Cheater,
        }
    }
}

/// Symmetric 2x2 payoffs, indexed by (own action, partner's action).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PayoffMatrix {
    /// Both cooperate.
    pub cc: f64,
    /// Own cooperate, partner cheats.
    pub cd: f64,
    /// Own cheat, partner cooperates.
    pub dc: f64,
    /// Both cheat.
    pub dd: f64,
}

impl Default for PayoffMatrix {
    fn default() -> Self {
        PayoffMatrix {
            cc: 1.0,
            cd: -1.6,
            dc: 1.5,
            dd: 0.0,
        }
    }
}

impl PayoffMatrix {
    pub fn payoff(&self, own: Action, other: Action) -> f64 {
        match (own, other) {
            (Action::Cooperate, Action::Cooperate) => self.cc,
            (Action::Cooperate, Action::Cheat) => self.cd,
            (Action::Cheat, Action::Cooperate) => self.dc,
            (Action::Cheat, Action::Cheat) => self.dd,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.cc, self.cd, self.dc, self.dd];
        if all.iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::invalid("payoffs must be finite"))
        }
    }

    /// Violations of the dilemma ordering `cc < dc < 2 cc` and `cd < dd < cc`.
    ///
    /// Cheating a cooperator must pay more than cooperating but less than the
    /// joint cooperative surplus; being cheated is worse than mutual cheating,
    /// which is worse than mutual cooperation.
    pub fn dilemma_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.cc < self.dc && self.dc < 2.0 * self.cc) {
            out.push(format!(
                "expected cc < dc < 2cc, got cc={} dc={}",
                self.cc, self.dc
            ));
        }
        if !(self.cd < self.dd && self.dd < self.cc) {
            out.push(format!(
                "expected cd < dd < cc, got cd={} dd={} cc={}",
                self.cd, self.dd, self.cc
            ));
        }
        out
    }
}

/// Who believes whom to be a cheater. Row `i` is a bit mask over partners `j`.
///
/// Everyone starts out believed to be a cooperator. There is no self-belief.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeliefMatrix {
    cheaters: Vec<u64>,
}

impl BeliefMatrix {
    pub fn new(n: usize) -> Self {
        BeliefMatrix {
            cheaters: vec![0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.cheaters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cheaters.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> AgentType {
        if self.cheaters[i] >> j & 1 == 1 {
            AgentType::Cheater
        } else {
            AgentType::Cooperator
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, t: AgentType) {
        match t {
            AgentType::Cheater => self.cheaters[i] |= 1 << j,
            AgentType::Cooperator => self.cheaters[i] &= !(1 << j),
        }
    }

    /// Partners `i` believes to be cheaters.
    #[inline]
    pub fn cheater_mask(&self, i: usize) -> u64 {
        self.cheaters[i]
    }
}

#[derive(Clone, Debug)]
pub struct SimulationState {
    pub types: Vec<AgentType>,
    pub beliefs: BeliefMatrix,
    pub cumulative_payoff: Vec<f64>,
    pub interactions_played: Vec<u64>,
    pub steps_elapsed: u64,
}

/// One interaction, as seen from outside.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepEvent {
    pub i: usize,
    pub j: usize,
    pub action_i: Action,
    pub action_j: Action,
}

/// Mean per-interaction payoff by type; `None` when no agent of that type has played.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TypeMeans {
    pub coop: Option<f64>,
    pub cheat: Option<f64>,
}

/// Fresh state with exactly `m` cheaters drawn uniformly without replacement.
pub fn new_state<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<SimulationState> {
    if n == 0 {
        return Err(Error::invalid("group size n must be positive"));
    }
    if n > MAX_NODES {
        return Err(Error::Capacity(format!(
            "at most {MAX_NODES} agents are supported"
        )));
    }
    if m > n {
        return Err(Error::invalid(format!(
            "cheater count m={m} exceeds group size n={n}"
        )));
    }
    let mut types = vec![AgentType::Cooperator; n];
    for c in index::sample(rng, n, m) {
        types[c] = AgentType::Cheater;
    }
    Ok(SimulationState::with_types(types))
}

impl SimulationState {
    /// Fresh state with the given type assignment.
    pub fn with_types(types: Vec<AgentType>) -> Self {
        let n = types.len();
        SimulationState {
            types,
            beliefs: BeliefMatrix::new(n),
            cumulative_payoff: vec![0.0; n],
            interactions_played: vec![0; n],
            steps_elapsed: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.types.len()
    }

    pub fn cheater_count(&self) -> usize {
        self.types
            .iter()
            .filter(|&&t| t == AgentType::Cheater)
            .count()
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        let n = self.n();
        if i == j {
            return Err(Error::invalid(format!("agent {i} cannot play itself")));
        }
        if i >= n || j >= n {
            return Err(Error::invalid(format!(
                "agents {i}, {j} out of range for n={n}"
            )));
        }
        Ok(())
    }
}

pub fn vanilla_action(i: usize, j: usize, state: &SimulationState) -> Result<Action> {
    state.check_pair(i, j)?;
    Ok(act(state.types[i], state.beliefs.get(i, j)))
}

#[inline]
fn act(own: AgentType, expected: AgentType) -> Action {
    match expected {
        AgentType::Cheater => Action::Cheat,
        AgentType::Cooperator => own.own_action(),
    }
}

/// Number of trusted neighbours of `i` (excluding `j`) who believe `j` is a cheater.
pub fn slander_votes(i: usize, j: usize, state: &SimulationState, g: &Graph) -> usize {
    let trusted = g.row(i) & !state.beliefs.cheater_mask(i) & !(1u64 << j);
    crate::graphs::bits_of(trusted)
        .filter(|&f| state.beliefs.cheater_mask(f) >> j & 1 == 1)
        .count()
}

/// What `i` expects of `j` after consulting trusted neighbours in `g`.
pub fn gossip_expectation(
    i: usize,
    j: usize,
    state: &SimulationState,
    g: &Graph,
) -> Result<AgentType> {
    state.check_pair(i, j)?;
    if g.node_count() != state.n() {
        return Err(Error::invalid(format!(
            "graph has {} nodes but the group has {} agents",
            g.node_count(),
            state.n()
        )));
    }
    Ok(expectation(i, j, state, g))
}

#[inline]
#[allow(clippy::int_plus_one)]
fn expectation(i: usize, j: usize, state: &SimulationState, g: &Graph) -> AgentType {
    if state.beliefs.get(i, j) == AgentType::Cheater {
        return AgentType::Cheater;
    }
    let votes = slander_votes(i, j, state, g);
    let k = g.degree(i);
    // votes / (k + 1) >= 1/2
    if 2 * votes >= k + 1 {
        AgentType::Cheater
    } else {
        AgentType::Cooperator
    }
}

pub fn gossip_action(i: usize, j: usize, state: &SimulationState, g: &Graph) -> Result<Action> {
    let e = gossip_expectation(i, j, state, g)?;
    Ok(act(state.types[i], e))
}

/// Plays one interaction with the given actions: pays both sides, counts the
/// interaction and overwrites each side's belief with what it observed.
pub fn play_pair(
    state: &mut SimulationState,
    i: usize,
    j: usize,
    action_i: Action,
    action_j: Action,
    payoffs: &PayoffMatrix,
) -> Result<StepEvent> {
    state.check_pair(i, j)?;
    Ok(apply(state, i, j, action_i, action_j, payoffs))
}

#[inline]
fn apply(
    state: &mut SimulationState,
    i: usize,
    j: usize,
    action_i: Action,
    action_j: Action,
    payoffs: &PayoffMatrix,
) -> StepEvent {
    state.cumulative_payoff[i] += payoffs.payoff(action_i, action_j);
    state.cumulative_payoff[j] += payoffs.payoff(action_j, action_i);
    state.interactions_played[i] += 1;
    state.interactions_played[j] += 1;
    state.beliefs.set(i, j, action_j.revealed_type());
    state.beliefs.set(j, i, action_i.revealed_type());
    state.steps_elapsed += 1;
    StepEvent {
        i,
        j,
        action_i,
        action_j,
    }
}

/// How partners are drawn and how decisions are made.
#[derive(Clone, Debug)]
pub struct Dynamics<'g> {
    kind: Kind<'g>,
    edges: Vec<(usize, usize)>,
}

#[derive(Clone, Copy, Debug)]
enum Kind<'g> {
    Vanilla,
    VanillaOnEdges(&'g Graph),
    Gossip(&'g Graph),
}

impl<'g> Dynamics<'g> {
    /// Uniform over all unordered pairs, decisions from own beliefs only.
    pub fn vanilla() -> Self {
        Dynamics {
            kind: Kind::Vanilla,
            edges: Vec::new(),
        }
    }

    /// Uniform over the edges of `g`, decisions from own beliefs only.
    pub fn vanilla_on_edges(g: &'g Graph) -> Result<Self> {
        Ok(Dynamics {
            edges: nonempty_edges(g)?,
            kind: Kind::VanillaOnEdges(g),
        })
    }

    /// Uniform over the edges of `g`, decisions with neighbour gossip.
    pub fn gossip(g: &'g Graph) -> Result<Self> {
        Ok(Dynamics {
            edges: nonempty_edges(g)?,
            kind: Kind::Gossip(g),
        })
    }

    pub fn graph(&self) -> Option<&'g Graph> {
        match self.kind {
            Kind::Vanilla => None,
            Kind::VanillaOnEdges(g) | Kind::Gossip(g) => Some(g),
        }
    }

    pub fn check_state(&self, state: &SimulationState) -> Result<()> {
        match self.graph() {
            None if state.n() < 2 => Err(Error::invalid("at least two agents are needed to play")),
            Some(g) if g.node_count() != state.n() => Err(Error::invalid(format!(
                "graph has {} nodes but the group has {} agents",
                g.node_count(),
                state.n()
            ))),
            _ => Ok(()),
        }
    }

    /// Draws one pair, decides both actions, and plays them.
    pub fn step<R: Rng + ?Sized>(
        &self,
        state: &mut SimulationState,
        payoffs: &PayoffMatrix,
        rng: &mut R,
    ) -> Result<StepEvent> {
        self.check_state(state)?;
        Ok(self.step_unchecked(state, payoffs, rng))
    }

    #[inline]
    pub(crate) fn step_unchecked<R: Rng + ?Sized>(
        &self,
        state: &mut SimulationState,
        payoffs: &PayoffMatrix,
        rng: &mut R,
    ) -> StepEvent {
        let (i, j) = match self.kind {
            Kind::Vanilla => {
                let n = state.n();
                let i = rng.gen_range(0..n);
                let mut j = rng.gen_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                (i, j)
            }
            Kind::VanillaOnEdges(_) | Kind::Gossip(_) => {
                self.edges[rng.gen_range(0..self.edges.len())]
            }
        };
        let (ai, aj) = match self.kind {
            Kind::Vanilla | Kind::VanillaOnEdges(_) => (
                act(state.types[i], state.beliefs.get(i, j)),
                act(state.types[j], state.beliefs.get(j, i)),
            ),
            Kind::Gossip(g) => (
                act(state.types[i], expectation(i, j, state, g)),
                act(state.types[j], expectation(j, i, state, g)),
            ),
        };
        apply(state, i, j, ai, aj, payoffs)
    }
}

fn nonempty_edges(g: &Graph) -> Result<Vec<(usize, usize)>> {
    let edges = g.edges();
    if edges.is_empty() {
        return Err(Error::invalid("the interaction graph has no edges"));
    }
    Ok(edges)
}

pub fn step_vanilla<R: Rng + ?Sized>(
    state: &mut SimulationState,
    payoffs: &PayoffMatrix,
    rng: &mut R,
) -> Result<StepEvent> {
    Dynamics::vanilla().step(state, payoffs, rng)
}

pub fn step_gossip<R: Rng + ?Sized>(
    state: &mut SimulationState,
    g: &Graph,
    payoffs: &PayoffMatrix,
    rng: &mut R,
) -> Result<StepEvent> {
    Dynamics::gossip(g)?.step(state, payoffs, rng)
}

pub fn type_average_payoffs(state: &SimulationState) -> TypeMeans {
    let mut sums = [0.0f64; 2];
    let mut counts = [0usize; 2];
    for ((&t, &pay), &played) in state
        .types
        .iter()
        .zip(&state.cumulative_payoff)
        .zip(&state.interactions_played)
    {
        if played == 0 {
            continue;
        }
        let slot = (t == AgentType::Cheater) as usize;
        sums[slot] += pay / played as f64;
        counts[slot] += 1;
    }
    let mean = |slot: usize| (counts[slot] > 0).then(|| sums[slot] / counts[slot] as f64);
    TypeMeans {
        coop: mean(0),
        cheat: mean(1),
    }
}
