//! Identity space, agents, and the weighted identity distance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A weighted social identity space. The number of dimensions is the
/// number of weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentitySpace {
    weights: Vec<f64>,
}

impl IdentitySpace {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidSpace(
                "at least one dimension is required".into(),
            ));
        }
        if let Some((d, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(Error::InvalidSpace(format!(
                "weight {w} for dimension {d} must be finite and non-negative"
            )));
        }
        Ok(Self { weights })
    }

    /// One identity dimension with unit weight.
    pub fn unit() -> Self {
        Self { weights: vec![1.0] }
    }

    pub fn dims(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn check(&self, agent: &Agent) -> Result<()> {
        if agent.si.len() != self.dims() {
            return Err(Error::DimensionMismatch {
                agent: agent.id,
                expected: self.dims(),
                found: agent.si.len(),
            });
        }
        Ok(())
    }

    /// Weighted Manhattan distance between two agents' coordinates.
    pub fn w_dist(&self, x: &Agent, y: &Agent) -> Result<f64> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.distance_unchecked(&x.si, &y.si))
    }

    /// Distance over coordinate slices already known to conform to the space.
    pub(crate) fn distance_unchecked(&self, a: &[u32], b: &[u32]) -> f64 {
        self.weights
            .iter()
            .zip(a.iter().zip(b))
            .map(|(w, (&p, &q))| w * f64::from(p.abs_diff(q)))
            .sum()
    }
}

impl Default for IdentitySpace {
    fn default() -> Self {
        Self::unit()
    }
}

/// An individual with identity coordinates, tie outreach (longest tie it
/// can form) and tie capacity (most friends it can hold).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Agent {
    pub id: usize,
    pub si: Vec<u32>,
    pub to: u32,
    pub tc: u32,
}

impl Agent {
    pub fn new(id: usize, si: Vec<u32>, to: u32, tc: u32) -> Self {
        Self { id, si, to, tc }
    }

    /// Agents at the origin of the space form the majority group; any nonzero
    /// coordinate marks a minority member.
    pub fn is_minority(&self) -> bool {
        self.si.iter().any(|&c| c != 0)
    }
}
