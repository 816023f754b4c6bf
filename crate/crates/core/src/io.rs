//! CSV files: result tables, agent lists and edge lists.
//!
//! `agents_*.csv` columns: `id,si,to,tc,degree`.
//! `edges_*.csv` columns: `ego_id,alter_id,ego_si,alter_si`, with
//! `ego_id < alter_id`. Identity coordinates with more than one dimension
//! are joined with `;`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::identity::{Agent, IdentitySpace};
use crate::network::NetworkState;

pub const TRIALS_FILE: &str = "trials.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const RATIOS_FILE: &str = "ratios.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentRow {
    pub id: usize,
    pub si: String,
    pub to: u32,
    pub tc: u32,
    pub degree: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRow {
    pub ego_id: usize,
    pub alter_id: usize,
    pub ego_si: String,
    pub alter_si: String,
}

fn join_si(si: &[u32]) -> String {
    si.iter().map(u32::to_string).collect::<Vec<_>>().join(";")
}

fn parse_si(text: &str, path: &Path) -> Result<Vec<u32>> {
    text.split(';')
        .map(|c| {
            c.trim().parse().map_err(|_| Error::Malformed {
                path: path.to_path_buf(),
                message: format!("bad identity coordinate '{c}'"),
            })
        })
        .collect()
}

/// Writes serializable rows with a header.
pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut out = csv::Writer::from_path(path)?;
    for row in rows {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}

/// Like [`write_rows`] but to any writer, e.g. stdout.
pub fn write_rows_to<W: Write, T: Serialize>(writer: W, rows: &[T]) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    for row in rows {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut reader = csv::Reader::from_path(path)?;
    let rows = reader
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()?;
    Ok(rows)
}

pub fn agent_rows(state: &NetworkState) -> Vec<AgentRow> {
    state
        .agents()
        .iter()
        .map(|a| AgentRow {
            id: a.id,
            si: join_si(&a.si),
            to: a.to,
            tc: a.tc,
            degree: state.degree(a.id),
        })
        .collect()
}

pub fn edge_rows(state: &NetworkState) -> Vec<EdgeRow> {
    let agents = state.agents();
    state
        .sorted_edges()
        .into_iter()
        .map(|(x, y)| EdgeRow {
            ego_id: x,
            alter_id: y,
            ego_si: join_si(&agents[x].si),
            alter_si: join_si(&agents[y].si),
        })
        .collect()
}

pub fn write_agents(path: &Path, state: &NetworkState) -> Result<()> {
    write_rows(path, &agent_rows(state))
}

pub fn write_edges(path: &Path, state: &NetworkState) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    write_rows_to(file, &edge_rows(state))
}

/// Loads an agent list and an edge list into a state for auditing. The
/// formation rule is not enforced here; see [`NetworkState::violations`].
/// Identity columns of the edge file must agree with the agent file.
pub fn load_network(
    agents_path: &Path,
    edges_path: &Path,
    space: IdentitySpace,
) -> Result<NetworkState> {
    let agent_rows: Vec<AgentRow> = read_rows(agents_path)?;
    let mut agents = Vec::with_capacity(agent_rows.len());
    let mut degree = Vec::with_capacity(agent_rows.len());
    for row in &agent_rows {
        agents.push(Agent::new(
            row.id,
            parse_si(&row.si, agents_path)?,
            row.to,
            row.tc,
        ));
        degree.push(row.degree);
    }

    let edge_rows: Vec<EdgeRow> = read_rows(edges_path)?;
    let mut edges = Vec::with_capacity(edge_rows.len());
    for row in edge_rows {
        for (id, si) in [(row.ego_id, &row.ego_si), (row.alter_id, &row.alter_si)] {
            if let Some(agent) = agents.get(id) {
                if parse_si(si, edges_path)? != agent.si {
                    return Err(Error::Malformed {
                        path: edges_path.to_path_buf(),
                        message: format!("identity of agent {id} disagrees with the agent list"),
                    });
                }
            }
        }
        edges.push((row.ego_id, row.alter_id));
    }
    NetworkState::from_parts(space, agents, edges, degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;

    #[test]
    fn fixture_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let state = fixture::table_network();
        let (a, e) = (dir.path().join("agents.csv"), dir.path().join("edges.csv"));
        write_agents(&a, &state).unwrap();
        write_edges(&e, &state).unwrap();

        let text = std::fs::read_to_string(&e).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("ego_id,alter_id,ego_si,alter_si"));
        assert_eq!(lines.next(), Some("0,2,0,0"));
        assert_eq!(text.lines().count(), 7);
        assert!(std::fs::read_to_string(&a)
            .unwrap()
            .starts_with("id,si,to,tc,degree\n0,0,0,3,2\n"));

        let loaded = load_network(&a, &e, IdentitySpace::unit()).unwrap();
        assert_eq!(loaded.agents(), state.agents());
        assert_eq!(loaded.sorted_edges(), state.sorted_edges());
        assert!(loaded.violations().is_empty());
    }

    #[test]
    fn multi_dimensional_identity() {
        let path = Path::new("x.csv");
        assert_eq!(parse_si("1;0;2", path).unwrap(), vec![1, 0, 2]);
        assert_eq!(join_si(&[1, 0, 2]), "1;0;2");
        assert!(parse_si("1;x", path).is_err());
    }
}
