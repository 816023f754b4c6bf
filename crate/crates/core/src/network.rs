//! Undirected friendship network over a population, with the reciprocated
//! formation rule and an invariant audit.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::identity::{Agent, IdentitySpace};

/// Friendship edges over a fixed population.
///
/// Ids are dense: the agent with id `i` is stored at index `i`. Edges are
/// stored with the smaller id first. `degree` is maintained incrementally by
/// [`NetworkState::add_edge`] and can be audited against the edge list with
/// [`NetworkState::violations`].
#[derive(Debug, Clone)]
pub struct NetworkState {
    space: IdentitySpace,
    agents: Vec<Agent>,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
    degree: Vec<u32>,
}

impl NetworkState {
    /// Empty network. Fails if ids are not `0..n` in order or an agent does
    /// not conform to the space.
    pub fn new(space: IdentitySpace, agents: Vec<Agent>) -> Result<Self> {
        for (position, agent) in agents.iter().enumerate() {
            if agent.id != position {
                return Err(Error::NonDenseIds {
                    position,
                    found: agent.id,
                });
            }
            space.check(agent)?;
        }
        let n = agents.len();
        Ok(Self {
            space,
            agents,
            edges: Vec::new(),
            neighbors: vec![Vec::new(); n],
            degree: vec![0; n],
        })
    }

    /// Builds a state from recorded edges and degrees without enforcing the
    /// formation rule, so that externally produced networks can be audited.
    /// Edges referencing unknown agents are kept in the edge list but not in
    /// the adjacency; [`NetworkState::violations`] reports them.
    pub fn from_parts(
        space: IdentitySpace,
        agents: Vec<Agent>,
        edges: Vec<(usize, usize)>,
        degree: Vec<u32>,
    ) -> Result<Self> {
        let mut state = Self::new(space, agents)?;
        if degree.len() != state.len() {
            return Err(Error::InvalidConfig(vec![format!(
                "{} degree entries for {} agents",
                degree.len(),
                state.len()
            )]));
        }
        for &(a, b) in &edges {
            if a < state.len() && b < state.len() {
                state.neighbors[a].push(b);
                if a != b {
                    state.neighbors[b].push(a);
                }
            }
        }
        state.edges = edges
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        state.degree = degree;
        Ok(state)
    }

    pub fn space(&self) -> &IdentitySpace {
        &self.space
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn agent(&self, id: usize) -> Result<&Agent> {
        self.agents.get(id).ok_or(Error::UnknownAgent(id))
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    /// Edges in formation order, smaller id first.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges sorted by (ego, alter).
    pub fn sorted_edges(&self) -> Vec<(usize, usize)> {
        let mut edges = self.edges.clone();
        edges.sort_unstable();
        edges
    }

    pub fn neighbors(&self, id: usize) -> &[usize] {
        &self.neighbors[id]
    }

    pub fn degree(&self, id: usize) -> u32 {
        self.degree[id]
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degree
    }

    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        let (a, b) = if self.neighbors[x].len() <= self.neighbors[y].len() {
            (x, y)
        } else {
            (y, x)
        };
        self.neighbors[a].contains(&b)
    }

    pub(crate) fn dist(&self, x: usize, y: usize) -> f64 {
        self.space
            .distance_unchecked(&self.agents[x].si, &self.agents[y].si)
    }

    pub fn w_dist(&self, x: usize, y: usize) -> Result<f64> {
        self.space.w_dist(self.agent(x)?, self.agent(y)?)
    }

    fn has_room(&self, id: usize) -> bool {
        self.degree[id] < self.agents[id].tc
    }

    fn reaches(&self, x: usize, y: usize) -> bool {
        let reach = self.agents[x].to.min(self.agents[y].to);
        self.dist(x, y) <= f64::from(reach)
    }

    /// Id-checked pair test without the self-pair error, for internal scans.
    pub(crate) fn eligible_unchecked(&self, x: usize, y: usize) -> bool {
        self.has_room(x) && self.has_room(y) && self.reaches(x, y) && !self.has_edge(x, y)
    }

    /// Whether `x` and `y` may become friends right now: not yet friends,
    /// both reach across their distance, and both are strictly below
    /// capacity.
    pub fn eligible(&self, x: usize, y: usize) -> Result<bool> {
        if x == y {
            return Err(Error::SelfPair(x));
        }
        self.agent(x)?;
        self.agent(y)?;
        Ok(self.eligible_unchecked(x, y))
    }

    /// Records a friendship between two eligible agents.
    pub fn add_edge(&mut self, x: usize, y: usize) -> Result<()> {
        if !self.eligible(x, y)? {
            return Err(Error::Ineligible(x, y));
        }
        self.insert(x, y);
        Ok(())
    }

    pub(crate) fn insert(&mut self, x: usize, y: usize) {
        self.edges.push((x.min(y), x.max(y)));
        self.neighbors[x].push(y);
        self.neighbors[y].push(x);
        self.degree[x] += 1;
        self.degree[y] += 1;
    }

    /// Every currently eligible unordered pair, by exhaustive scan.
    pub fn eligible_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut pairs = Vec::new();
        for x in 0..n {
            for y in x + 1..n {
                if self.eligible_unchecked(x, y) {
                    pairs.push((x, y));
                }
            }
        }
        pairs
    }

    /// True iff no unordered pair is eligible. Exhaustive O(n²) scan.
    pub fn is_equilibrium(&self) -> bool {
        self.first_eligible_pair().is_none()
    }

    fn first_eligible_pair(&self) -> Option<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
            .find(|&(x, y)| self.eligible_unchecked(x, y))
    }

    /// Audits every structural invariant plus equilibrium. An empty vector
    /// means the state is a valid terminal network.
    pub fn violations(&self) -> Vec<Violation> {
        let n = self.len();
        let mut out = Vec::new();
        let mut seen = HashSet::with_capacity(self.edges.len());
        let mut counted = vec![0u32; n];

        for &(a, b) in &self.edges {
            if a >= n || b >= n {
                out.push(Violation::UnknownAgent {
                    id: if a >= n { a } else { b },
                });
                continue;
            }
            if a == b {
                out.push(Violation::SelfLoop { id: a });
                continue;
            }
            if !seen.insert((a, b)) {
                out.push(Violation::DuplicateEdge { x: a, y: b });
                continue;
            }
            counted[a] += 1;
            counted[b] += 1;
            let distance = self.dist(a, b);
            let reach = self.agents[a].to.min(self.agents[b].to);
            if distance > f64::from(reach) {
                out.push(Violation::Outreach {
                    x: a,
                    y: b,
                    distance,
                    reach,
                });
            }
        }

        for (id, agent) in self.agents.iter().enumerate() {
            if counted[id] != self.degree[id] {
                out.push(Violation::DegreeMismatch {
                    id,
                    recorded: self.degree[id],
                    actual: counted[id],
                });
            }
            if counted[id] > agent.tc {
                out.push(Violation::Capacity {
                    id,
                    degree: counted[id],
                    capacity: agent.tc,
                });
            }
        }

        if out.is_empty() {
            if let Some((x, y)) = self.first_eligible_pair() {
                out.push(Violation::NotEquilibrium { x, y });
            }
        }
        out
    }
}

/// A broken network invariant, naming the offending agents.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    SelfLoop {
        id: usize,
    },
    DuplicateEdge {
        x: usize,
        y: usize,
    },
    UnknownAgent {
        id: usize,
    },
    Capacity {
        id: usize,
        degree: u32,
        capacity: u32,
    },
    Outreach {
        x: usize,
        y: usize,
        distance: f64,
        reach: u32,
    },
    DegreeMismatch {
        id: usize,
        recorded: u32,
        actual: u32,
    },
    NotEquilibrium {
        x: usize,
        y: usize,
    },
}

impl Violation {
    pub fn invariant(&self) -> &'static str {
        match self {
            Violation::SelfLoop { .. } => "no-self-loop",
            Violation::DuplicateEdge { .. } => "no-duplicate-edge",
            Violation::UnknownAgent { .. } => "known-agent",
            Violation::Capacity { .. } => "capacity",
            Violation::Outreach { .. } => "outreach",
            Violation::DegreeMismatch { .. } => "degree-reconciliation",
            Violation::NotEquilibrium { .. } => "equilibrium",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} invariant violated: ", self.invariant())?;
        match self {
            Violation::SelfLoop { id } => write!(f, "agent {id} is friends with itself"),
            Violation::DuplicateEdge { x, y } => write!(f, "edge ({x}, {y}) listed more than once"),
            Violation::UnknownAgent { id } => write!(f, "edge references unknown agent {id}"),
            Violation::Capacity {
                id,
                degree,
                capacity,
            } => write!(f, "agent {id} has {degree} friends but capacity {capacity}"),
            Violation::Outreach {
                x,
                y,
                distance,
                reach,
            } => write!(
                f,
                "edge ({x}, {y}) spans distance {distance} but the shorter outreach is {reach}"
            ),
            Violation::DegreeMismatch {
                id,
                recorded,
                actual,
            } => write!(
                f,
                "agent {id} records degree {recorded} but has {actual} edges"
            ),
            Violation::NotEquilibrium { x, y } => {
                write!(f, "agents {x} and {y} could still become friends")
            }
        }
    }
}
