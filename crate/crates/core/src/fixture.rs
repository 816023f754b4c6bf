//! The six-person worked example: four majority members (A–D) and two
//! minority members (E, F) in a one-dimensional identity space.
//!
//! | agent | group | outreach | capacity | friends |
//! |-------|-------|----------|----------|---------|
//! | A     | 0     | 0        | 3        | C, D    |
//! | B     | 0     | 1        | 2        | D, E    |
//! | C     | 0     | 0        | 2        | A, D    |
//! | D     | 0     | 1        | 3        | A, B, C |
//! | E     | 1     | 1        | 2        | B, F    |
//! | F     | 1     | 1        | 3        | E       |
//!
//! The finished network is an equilibrium: F still has room but A cannot
//! reach across groups and everyone else is full.

use crate::identity::{Agent, IdentitySpace};
use crate::network::NetworkState;

pub const A: usize = 0;
pub const B: usize = 1;
pub const C: usize = 2;
pub const D: usize = 3;
pub const E: usize = 4;
pub const F: usize = 5;

pub const LABELS: [&str; 6] = ["A", "B", "C", "D", "E", "F"];

pub fn table_agents() -> Vec<Agent> {
    let rows = [
        (0, 0, 3),
        (0, 1, 2),
        (0, 0, 2),
        (0, 1, 3),
        (1, 1, 2),
        (1, 1, 3),
    ];
    rows.iter()
        .enumerate()
        .map(|(id, &(si, to, tc))| Agent::new(id, vec![si], to, tc))
        .collect()
}

pub fn table_edges() -> Vec<(usize, usize)> {
    vec![(A, C), (A, D), (B, D), (C, D), (B, E), (E, F)]
}

/// The six agents with no friendships yet.
pub fn table_population() -> NetworkState {
    NetworkState::new(IdentitySpace::unit(), table_agents()).expect("fixture is well formed")
}

/// The six agents with their listed friendships.
pub fn table_network() -> NetworkState {
    let mut state = table_population();
    for (x, y) in table_edges() {
        state.add_edge(x, y).expect("fixture edges are eligible");
    }
    state
}
