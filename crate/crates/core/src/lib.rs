//! Friendship formation in a social identity space.
//!
//! Agents sit at integer coordinates in a weighted identity space. Two agents
//! become friends only if both can reach across the weighted Manhattan
//! distance between them (tie outreach) and both still have room for another
//! friend (tie capacity). The [`dynamics`] module grows a network from an
//! empty edge set until no eligible pair remains; [`metrics`] measures how
//! segregated the resulting friendships are, and [`experiment`] runs the
//! offline-vs-online parameter sweep and writes CSV results.

pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod fixture;
pub mod identity;
pub mod io;
pub mod metrics;
pub mod network;
pub mod sampling;

pub use dynamics::{run_to_equilibrium, FormationProcess, SchedulerPolicy};
pub use error::{Error, Result};
pub use experiment::{ExperimentConfig, Scenario, SweepOutput};
pub use identity::{Agent, IdentitySpace};
pub use metrics::{ScenarioSummary, TrialRecord};
pub use network::{NetworkState, Violation};
pub use sampling::{PopulationSpec, RngSeed};
